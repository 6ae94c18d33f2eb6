#include "optprob/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace optprob {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string to_text(const OptimResult& r) {
    std::ostringstream out;
    out << "c = " << fmt(r.c) << '\n';
    out << "d = " << fmt(r.d) << '\n';
    out << "x_max = " << (std::isinf(r.x_max) ? "inf" : fmt(r.x_max)) << '\n';
    out << "sigma2 = " << fmt(r.sigma2) << '\n';
    out << "uncertainty_product = " << fmt(r.uncertainty_product) << '\n';
    out << "iterations = " << r.iterations << '\n';
    out << "converged = " << (r.converged ? 1 : 0) << '\n';
    static const char* names[] = {"residual_mass", "residual_xmoment"};
    for (std::size_t i = 0; i < r.residuals.size(); ++i) {
        const char* name = i < 2 ? names[i] : nullptr;
        if (name)
            out << name << " = " << fmt(r.residuals[i]) << '\n';
        else
            out << "residual_" << i << " = " << fmt(r.residuals[i]) << '\n';
    }
    return out.str();
}

// ---- radial path ------------------------------------------------------------

namespace {

// Integrate g piecewise over [0, hi], splitting at the union of the profile's
// breakpoints and extra points.
double piecewise_integral(const std::function<double(double)>& g, double hi,
                          const std::vector<double>& breaks, const QuadratureOptions& opts = {}) {
    std::vector<double> pts{0.0};
    for (double b : breaks)
        if (b > 0.0 && b < hi) pts.push_back(b);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += adaptive_integrate(g, pts[i], pts[i + 1], opts);
    return total;
}

std::vector<double> merged_breaks(const RadialProfile& a, const RadialProfile& b) {
    std::vector<double> out = a.breakpoints;
    out.insert(out.end(), b.breakpoints.begin(), b.breakpoints.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

double constraint_integral(const RadialProfile& w, double c) {
    auto shifted = [&w, c](double x) { return w(x) - c; };
    auto crossings = find_crossings(shifted, 0.0, w.x_tail);
    std::vector<double> breaks = w.breakpoints;
    breaks.insert(breaks.end(), crossings.begin(), crossings.end());
    auto positive_part = [&](double x) { return std::max(w(x) - c, 0.0); };
    return kPi * piecewise_integral(positive_part, w.x_tail, breaks);
}

RadialProfile threshold_density(const RadialProfile& w, double c, double d, double x_max) {
    double hi = std::min(x_max, w.x_tail);
    RadialProfile out;
    out.x_tail = w.x_tail;
    out.breakpoints = w.breakpoints;
    if (hi > 0.0) {
        auto shifted = [&w, c, d](double x) { return w(x) - c - d * x; };
        auto crossings = find_crossings(shifted, 0.0, hi);
        out.breakpoints.insert(out.breakpoints.end(), crossings.begin(), crossings.end());
    }
    if (std::isfinite(x_max) && x_max < w.x_tail) out.breakpoints.push_back(x_max);
    std::sort(out.breakpoints.begin(), out.breakpoints.end());
    out.f = [wf = w.f, c, d, x_max](double x) {
        if (x > x_max) return wf(x);
        return std::max(wf(x) - c - d * x, 0.0);
    };
    return out;
}

double sigma2(const RadialProfile& p, const RadialProfile& w, double purity, double upper) {
    if (!(purity > 0.0) || purity > 1.0)
        throw std::invalid_argument("sigma2: purity must lie in (0, 1]");
    double hi = std::min({upper, p.x_tail, w.x_tail});
    auto dev2 = [&p, &w](double x) {
        double d = p(x) - w(x);
        return d * d;
    };
    double integral = piecewise_integral(dev2, hi, merged_breaks(p, w));
    return 2.0 * kPi / purity * kPi * integral;
}

namespace {

void require_normalized(double mass, double tol) {
    if (std::abs(mass - 1.0) > tol)
        throw std::invalid_argument("solve: input distribution integrates to " + fmt(mass) +
                                    ", not 1 (renormalize first)");
}

double radial_mass(const RadialProfile& w) { return radial_integral(w, 0); }

// (1/2) * pi int x P / (pi int P): var_q = var_p about the center, so the
// uncertainty product equals the half x-moment for a normalized density.
double radial_uncertainty_product(const RadialProfile& p) {
    double m0 = radial_integral(p, 0);
    double m1 = radial_integral(p, 1);
    return 0.5 * m1 / m0;
}

}  // namespace

RadialSolve solve_c(const RadialProfile& w, double purity, const SolverConfig& cfg) {
    double mass = radial_mass(w);
    require_normalized(mass, cfg.normalization_tol);

    auto [min_w, max_w] = sampled_range(w.f, 0.0, w.x_tail);
    RadialSolve out;
    out.result.x_max = kInf;
    if (min_w >= -1e-12 * std::max(1.0, std::abs(max_w))) {
        out.result.c = 0.0;
        out.result.sigma2 = 0.0;
        out.result.residuals = {mass - 1.0};
        out.result.uncertainty_product = radial_uncertainty_product(w);
        out.p_min = w;
        return out;
    }

    double lo = 0.0, hi = max_w;
    if (!(constraint_integral(w, lo) >= 1.0))
        throw std::runtime_error("solve_c: constraint integral < 1 at c = 0; "
                                 "input is not a normalized quasi-distribution");
    int iters = 0;
    while (hi - lo > cfg.c_abs_tol) {
        double mid = 0.5 * (lo + hi);
        if (constraint_integral(w, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
        ++iters;
    }
    double c = 0.5 * (lo + hi);
    double residual = constraint_integral(w, c) - 1.0;
    if (std::abs(residual) > cfg.constraint_tol)
        throw std::runtime_error("solve_c: bisection stalled with constraint residual " +
                                 fmt(residual));

    out.result.c = c;
    out.result.iterations = iters;
    out.result.residuals = {residual};
    out.p_min = threshold_density(w, c);
    out.result.sigma2 = sigma2(out.p_min, w, purity);
    out.result.uncertainty_product = radial_uncertainty_product(out.p_min);
    return out;
}

namespace {

// Mass and x-moment balance of (P - W) over x <= x_max for P = (W - c - x d)^+.
std::array<double, 2> cd_residuals(const RadialProfile& w, double c, double d, double x_max) {
    auto shifted = [&w, c, d](double x) { return w(x) - c - d * x; };
    auto crossings = find_crossings(shifted, 0.0, x_max);
    std::vector<double> breaks = w.breakpoints;
    breaks.insert(breaks.end(), crossings.begin(), crossings.end());
    auto dev = [&](double x) { return std::max(w(x) - c - d * x, 0.0) - w(x); };
    auto dev_x = [&](double x) { return dev(x) * x; };
    return {kPi * piecewise_integral(dev, x_max, breaks),
            kPi * piecewise_integral(dev_x, x_max, breaks)};
}

}  // namespace

RadialSolve solve_cd(const RadialProfile& w, double x_max, double purity,
                     const SolverConfig& cfg) {
    if (!(x_max > 0.0)) throw std::invalid_argument("solve_cd: x_max must be positive");
    double mass = radial_mass(w);
    require_normalized(mass, cfg.normalization_tol);

    double hi = std::min(x_max, w.x_tail);
    if (hi < w.x_tail) {
        auto [tail_min, tail_max] = sampled_range(w.f, hi, w.x_tail);
        (void)tail_max;
        if (tail_min < -1e-12)
            throw std::invalid_argument("solve_cd: W changes sign beyond x_max; "
                                        "enlarge x_max so the tail stays nonnegative");
    }

    RadialSolve out;
    out.result.x_max = x_max;

    auto [min_w, max_w] = sampled_range(w.f, 0.0, w.x_tail);
    if (min_w >= -1e-12 * std::max(1.0, std::abs(max_w))) {
        out.result.residuals = {0.0, 0.0};
        out.result.uncertainty_product = radial_uncertainty_product(w);
        out.p_min = w;
        return out;
    }

    double c = solve_c(w, purity, cfg).result.c;
    double d = 0.0;

    if (cfg.fix_d) {
        // 1-D bisection on the mass balance with d = 0
        double lo_c = 0.0, hi_c = max_w;
        int iters = 0;
        while (hi_c - lo_c > cfg.c_abs_tol) {
            double mid = 0.5 * (lo_c + hi_c);
            if (cd_residuals(w, mid, 0.0, hi)[0] > 0.0)
                lo_c = mid;
            else
                hi_c = mid;
            ++iters;
        }
        c = 0.5 * (lo_c + hi_c);
        auto res = cd_residuals(w, c, 0.0, hi);
        out.result.c = c;
        out.result.iterations = iters;
        out.result.residuals = {res[0], res[1]};
        out.result.converged = std::abs(res[0]) <= cfg.constraint_tol;
    } else {
        auto res = cd_residuals(w, c, d, hi);
        double best_norm = std::max(std::abs(res[0]), std::abs(res[1]));
        int iter = 0;
        bool ok = best_norm <= cfg.newton_tol;
        for (; iter < cfg.max_iterations && !ok; ++iter) {
            double hc = cfg.fd_step * std::max(1.0, std::abs(c));
            double hd = cfg.fd_step * std::max(1.0, std::abs(d));
            auto rcp = cd_residuals(w, c + hc, d, hi);
            auto rcm = cd_residuals(w, c - hc, d, hi);
            auto rdp = cd_residuals(w, c, d + hd, hi);
            auto rdm = cd_residuals(w, c, d - hd, hi);
            double j00 = (rcp[0] - rcm[0]) / (2 * hc), j01 = (rdp[0] - rdm[0]) / (2 * hd);
            double j10 = (rcp[1] - rcm[1]) / (2 * hc), j11 = (rdp[1] - rdm[1]) / (2 * hd);
            double det = j00 * j11 - j01 * j10;
            if (std::abs(det) < 1e-300)
                throw std::runtime_error("solve_cd: singular Jacobian");
            double dc = -(j11 * res[0] - j01 * res[1]) / det;
            double dd = -(-j10 * res[0] + j00 * res[1]) / det;

            double step = 1.0;
            std::array<double, 2> trial{};
            double trial_norm = kInf;
            for (int halving = 0; halving < 40; ++halving) {
                trial = cd_residuals(w, c + step * dc, d + step * dd, hi);
                trial_norm = std::max(std::abs(trial[0]), std::abs(trial[1]));
                if (trial_norm < best_norm) break;
                step *= 0.5;
            }
            if (trial_norm >= best_norm) break;  // stalled
            c += step * dc;
            d += step * dd;
            res = trial;
            best_norm = trial_norm;
            ok = best_norm <= cfg.newton_tol;
        }
        out.result.c = c;
        out.result.d = d;
        out.result.iterations = iter;
        out.result.residuals = {res[0], res[1]};
        out.result.converged = ok;
    }

    out.p_min = threshold_density(w, out.result.c, out.result.d, hi);
    out.result.sigma2 = sigma2(out.p_min, w, purity, hi);
    out.result.uncertainty_product = radial_uncertainty_product(out.p_min);
    return out;
}

double quantumness(const RadialProfile& w, double purity) {
    return solve_c(w, purity).result.sigma2;
}

// ---- grid path --------------------------------------------------------------

double constraint_integral(const PhaseSpaceGrid& w, double c) {
    double total = 0.0;
    for (double v : w.values) total += std::max(v - c, 0.0);
    return total * w.cell_area();
}

PhaseSpaceGrid threshold_density(const PhaseSpaceGrid& w, double c, double d, double x_max,
                                 std::optional<Center> center) {
    if (d != 0.0 && !center)
        throw std::invalid_argument("threshold_density: d != 0 requires a declared center");
    PhaseSpaceGrid out = w;
    for (int i = 0; i < w.n_q; ++i)
        for (int j = 0; j < w.n_p; ++j) {
            double x = 0.0;
            if (center) {
                double dqc = w.q_center(i) - center->q;
                double dpc = w.p_center(j) - center->p;
                x = dqc * dqc + dpc * dpc;
            }
            if (x > x_max) continue;  // keep W outside the constraint window
            out.at(i, j) = std::max(w.at(i, j) - c - d * x, 0.0);
        }
    return out;
}

double sigma2(const PhaseSpaceGrid& p, const PhaseSpaceGrid& w, double purity) {
    if (!p.same_domain(w)) throw std::invalid_argument("sigma2: grid domains differ");
    if (!(purity > 0.0)) throw std::invalid_argument("sigma2: purity must be positive");
    double total = 0.0;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        double dv = p.values[k] - w.values[k];
        total += dv * dv;
    }
    return 2.0 * kPi / purity * total * w.cell_area();
}

GridSolve solve_c(const PhaseSpaceGrid& w, const SolverConfig& cfg) {
    validate(w);
    double mass = integrate(w);
    require_normalized(mass, cfg.normalization_tol);

    double min_w = *std::min_element(w.values.begin(), w.values.end());
    double max_w = *std::max_element(w.values.begin(), w.values.end());

    GridSolve out{.result = {}, .p_min = w};
    out.result.x_max = kInf;
    if (min_w >= -1e-12 * std::max(1.0, std::abs(max_w))) {
        out.result.residuals = {mass - 1.0};
        out.result.uncertainty_product = moments(w).uncertainty_product;
        return out;
    }

    double lo = 0.0, hi = max_w;
    int iters = 0;
    while (hi - lo > cfg.c_abs_tol) {
        double mid = 0.5 * (lo + hi);
        if (constraint_integral(w, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
        ++iters;
    }
    double c = 0.5 * (lo + hi);
    double residual = constraint_integral(w, c) - 1.0;
    if (std::abs(residual) > cfg.constraint_tol)
        throw std::runtime_error("solve_c: bisection stalled with constraint residual " +
                                 fmt(residual));

    out.result.c = c;
    out.result.iterations = iters;
    out.result.residuals = {residual};
    out.p_min = threshold_density(w, c);
    out.result.sigma2 = sigma2(out.p_min, w, w.purity);
    out.result.uncertainty_product = moments(out.p_min).uncertainty_product;
    return out;
}

namespace {

std::array<double, 2> cd_residuals_grid(const PhaseSpaceGrid& w, Center center, double c,
                                        double d, double x_max) {
    double r0 = 0.0, r1 = 0.0;
    for (int i = 0; i < w.n_q; ++i)
        for (int j = 0; j < w.n_p; ++j) {
            double dqc = w.q_center(i) - center.q;
            double dpc = w.p_center(j) - center.p;
            double x = dqc * dqc + dpc * dpc;
            if (x > x_max) continue;
            double dev = std::max(w.at(i, j) - c - d * x, 0.0) - w.at(i, j);
            r0 += dev;
            r1 += dev * x;
        }
    double area = w.cell_area();
    return {r0 * area, r1 * area};
}

}  // namespace

GridSolve solve_cd(const PhaseSpaceGrid& w, Center center, double x_max,
                   const SolverConfig& cfg) {
    validate(w);
    if (!(x_max > 0.0)) throw std::invalid_argument("solve_cd: x_max must be positive");
    double mass = integrate(w);
    require_normalized(mass, cfg.normalization_tol);

    double max_w = *std::max_element(w.values.begin(), w.values.end());
    for (int i = 0; i < w.n_q; ++i)
        for (int j = 0; j < w.n_p; ++j) {
            double dqc = w.q_center(i) - center.q;
            double dpc = w.p_center(j) - center.p;
            if (dqc * dqc + dpc * dpc > x_max &&
                w.at(i, j) < -1e-12 * std::max(1.0, std::abs(max_w)))
                throw std::invalid_argument("solve_cd: W changes sign beyond x_max");
        }

    double c = solve_c(w, cfg).result.c;
    double d = 0.0;
    auto res = cd_residuals_grid(w, center, c, d, x_max);
    double best_norm = std::max(std::abs(res[0]), std::abs(res[1]));
    int iter = 0;
    bool ok = best_norm <= cfg.newton_tol;
    for (; iter < cfg.max_iterations && !ok; ++iter) {
        double hc = cfg.fd_step * std::max(1.0, std::abs(c));
        double hd = cfg.fd_step * std::max(1.0, std::abs(d));
        auto rcp = cd_residuals_grid(w, center, c + hc, d, x_max);
        auto rcm = cd_residuals_grid(w, center, c - hc, d, x_max);
        auto rdp = cd_residuals_grid(w, center, c, d + hd, x_max);
        auto rdm = cd_residuals_grid(w, center, c, d - hd, x_max);
        double j00 = (rcp[0] - rcm[0]) / (2 * hc), j01 = (rdp[0] - rdm[0]) / (2 * hd);
        double j10 = (rcp[1] - rcm[1]) / (2 * hc), j11 = (rdp[1] - rdm[1]) / (2 * hd);
        double det = j00 * j11 - j01 * j10;
        if (std::abs(det) < 1e-300) throw std::runtime_error("solve_cd: singular Jacobian");
        double dc = -(j11 * res[0] - j01 * res[1]) / det;
        double dd = -(-j10 * res[0] + j00 * res[1]) / det;

        double step = 1.0;
        std::array<double, 2> trial{};
        double trial_norm = kInf;
        for (int halving = 0; halving < 40; ++halving) {
            trial = cd_residuals_grid(w, center, c + step * dc, d + step * dd, x_max);
            trial_norm = std::max(std::abs(trial[0]), std::abs(trial[1]));
            if (trial_norm < best_norm) break;
            step *= 0.5;
        }
        if (trial_norm >= best_norm) break;
        c += step * dc;
        d += step * dd;
        res = trial;
        best_norm = trial_norm;
        ok = best_norm <= cfg.newton_tol;
    }

    GridSolve out{.result = {}, .p_min = threshold_density(w, c, d, x_max, center)};
    out.result.c = c;
    out.result.d = d;
    out.result.x_max = x_max;
    out.result.iterations = iter;
    out.result.residuals = {res[0], res[1]};
    out.result.converged = ok;
    out.result.sigma2 = sigma2(out.p_min, w, w.purity);
    out.result.uncertainty_product = moments(out.p_min).uncertainty_product;
    return out;
}

double quantumness(const PhaseSpaceGrid& w) { return solve_c(w).result.sigma2; }

}  // namespace optprob
