#include "optprob/marginal_matcher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optprob {

namespace {

void check_axes(const PhaseSpaceGrid& w, const MultiplierPair& m) {
    if (static_cast<int>(m.lambda_q.size()) != w.n_q ||
        static_cast<int>(m.mu_p.size()) != w.n_p)
        throw std::invalid_argument("multipliers do not match the grid axes");
}

// Solve sum_k max(v_k - t, 0) * dx = target for t; the left side is
// continuous, piecewise linear, and strictly decreasing wherever positive.
double row_root(const std::vector<double>& v, double dx, double target, int iters) {
    double v_max = *std::max_element(v.begin(), v.end());
    if (target <= 0.0) return v_max;
    double v_min = *std::min_element(v.begin(), v.end());
    double lo = v_min - target / dx;  // single max(v_min - lo, 0) term already >= target
    double hi = v_max;                // sum is 0
    for (int it = 0; it < iters; ++it) {
        double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (double vk : v) s += std::max(vk - mid, 0.0);
        if (s * dx > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PhaseSpaceGrid apply_multipliers(const PhaseSpaceGrid& w, const MultiplierPair& m) {
    check_axes(w, m);
    PhaseSpaceGrid p = w;
    for (int i = 0; i < w.n_q; ++i)
        for (int j = 0; j < w.n_p; ++j)
            p.at(i, j) = std::max(w.at(i, j) - m.lambda_q[i] - m.mu_p[j], 0.0);
    return p;
}

std::pair<std::vector<double>, std::vector<double>> marginal_residuals(const PhaseSpaceGrid& w,
                                                                       const MultiplierPair& m) {
    PhaseSpaceGrid p = apply_multipliers(w, m);
    auto rq = marginal_q(p);
    auto rp = marginal_p(p);
    auto wq = marginal_q(w);
    auto wp = marginal_p(w);
    for (int i = 0; i < w.n_q; ++i) rq[i] -= wq[i];
    for (int j = 0; j < w.n_p; ++j) rp[j] -= wp[j];
    return {std::move(rq), std::move(rp)};
}

MatchOutcome solve_multipliers(const PhaseSpaceGrid& w, const MatchConfig& cfg) {
    validate(w);
    const auto rho_q = marginal_q(w);
    const auto rho_p = marginal_p(w);
    for (double v : rho_q)
        if (v < -1e-8) throw std::invalid_argument("solve_multipliers: q-marginal is negative");
    for (double v : rho_p)
        if (v < -1e-8) throw std::invalid_argument("solve_multipliers: p-marginal is negative");

    MatchOutcome out;
    out.multipliers.lambda_q.assign(w.n_q, 0.0);
    out.multipliers.mu_p.assign(w.n_p, 0.0);
    auto& lam = out.multipliers.lambda_q;
    auto& mu = out.multipliers.mu_p;

    auto max_residual = [&]() {
        auto [rq, rp] = marginal_residuals(w, out.multipliers);
        double m = 0.0;
        for (double v : rq) m = std::max(m, std::abs(v));
        for (double v : rp) m = std::max(m, std::abs(v));
        return m;
    };

    double res = max_residual();
    int sweep = 0;
    std::vector<double> row(std::max(w.n_q, w.n_p));
    while (res > cfg.tol && sweep < cfg.max_iters) {
        // lambda half-sweep: rows are independent given mu. Rows whose quantum
        // marginal carries no mass are clipped to zero outright (no damping).
        for (int i = 0; i < w.n_q; ++i) {
            row.resize(w.n_p);
            for (int j = 0; j < w.n_p; ++j) row[j] = w.at(i, j) - mu[j];
            if (rho_q[i] < cfg.zero_marginal_floor) {
                lam[i] = *std::max_element(row.begin(), row.end());
            } else {
                double solved = row_root(row, w.dp(), rho_q[i], cfg.bisect_iters);
                lam[i] += cfg.damping * (solved - lam[i]);
            }
        }
        // mu half-sweep
        for (int j = 0; j < w.n_p; ++j) {
            row.resize(w.n_q);
            for (int i = 0; i < w.n_q; ++i) row[i] = w.at(i, j) - lam[i];
            if (rho_p[j] < cfg.zero_marginal_floor) {
                mu[j] = *std::max_element(row.begin(), row.end());
            } else {
                double solved = row_root(row, w.dq(), rho_p[j], cfg.bisect_iters);
                mu[j] += cfg.damping * (solved - mu[j]);
            }
        }
        // gauge: window average of lambda is zero
        double mean = 0.0;
        for (double v : lam) mean += v;
        mean /= lam.size();
        for (double& v : lam) v -= mean;
        for (double& v : mu) v += mean;

        res = max_residual();
        out.residual_history.push_back(res);
        ++sweep;
    }

    // re-clip empty rows/columns against the final multipliers so they end
    // exactly massless; when no sweep ran, W already satisfied both marginals
    // and P = W is returned untouched
    for (int i = 0; sweep > 0 && i < w.n_q; ++i) {
        if (rho_q[i] >= cfg.zero_marginal_floor) continue;
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < w.n_p; ++j) mx = std::max(mx, w.at(i, j) - mu[j]);
        lam[i] = mx;
    }
    for (int j = 0; sweep > 0 && j < w.n_p; ++j) {
        if (rho_p[j] >= cfg.zero_marginal_floor) continue;
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < w.n_q; ++i) mx = std::max(mx, w.at(i, j) - lam[i]);
        mu[j] = mx;
    }
    if (sweep > 0) {
        double mean = 0.0;
        for (double v : lam) mean += v;
        mean /= lam.size();
        for (double& v : lam) v -= mean;
        for (double& v : mu) v += mean;
    }

    out.p = apply_multipliers(w, out.multipliers);
    out.result.iterations = sweep;
    auto [rq, rp] = marginal_residuals(w, out.multipliers);
    double mq = 0.0, mp = 0.0;
    for (double v : rq) mq = std::max(mq, std::abs(v));
    for (double v : rp) mp = std::max(mp, std::abs(v));
    out.result.residuals = {mq, mp};
    out.result.converged = std::max(mq, mp) <= cfg.tol;
    out.result.sigma2 = sigma2(out.p, w, w.purity);
    out.result.uncertainty_product = moments(out.p).uncertainty_product;
    out.result.x_max = std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace optprob
