#include "optprob/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optprob {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

PhaseSpaceGrid PhaseSpaceGrid::zeros(const GridWindow& w) {
    PhaseSpaceGrid g;
    g.q_min = w.q_min;
    g.q_max = w.q_max;
    g.p_min = w.p_min;
    g.p_max = w.p_max;
    g.n_q = w.n_q;
    g.n_p = w.n_p;
    g.values.assign(static_cast<std::size_t>(w.n_q) * w.n_p, 0.0);
    validate(g);
    return g;
}

void validate(const PhaseSpaceGrid& g) {
    if (!(g.q_max > g.q_min) || !(g.p_max > g.p_min))
        throw std::invalid_argument("PhaseSpaceGrid: window bounds must be increasing");
    if (g.n_q < 1 || g.n_p < 1)
        throw std::invalid_argument("PhaseSpaceGrid: cell counts must be positive");
    if (g.values.size() != static_cast<std::size_t>(g.n_q) * g.n_p)
        throw std::invalid_argument("PhaseSpaceGrid: value count does not match n_q * n_p");
    for (double v : g.values)
        if (!std::isfinite(v)) throw std::invalid_argument("PhaseSpaceGrid: non-finite value");
    if (!(g.purity > 0.0) || g.purity > 1.0)
        throw std::invalid_argument("PhaseSpaceGrid: purity must lie in (0, 1]");
}

double integrate(const PhaseSpaceGrid& g) {
    double total = 0.0;
    for (int i = 0; i < g.n_q; ++i) {
        double row = 0.0;
        for (int j = 0; j < g.n_p; ++j) row += g.at(i, j);
        total += row;
    }
    return total * g.cell_area();
}

std::vector<double> marginal_q(const PhaseSpaceGrid& g) {
    std::vector<double> out(g.n_q, 0.0);
    for (int i = 0; i < g.n_q; ++i) {
        double row = 0.0;
        for (int j = 0; j < g.n_p; ++j) row += g.at(i, j);
        out[i] = row * g.dp();
    }
    return out;
}

std::vector<double> marginal_p(const PhaseSpaceGrid& g) {
    std::vector<double> out(g.n_p, 0.0);
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_p; ++j) out[j] += g.at(i, j);
    for (double& v : out) v *= g.dq();
    return out;
}

Moments moments(const PhaseSpaceGrid& g) {
    double mass = integrate(g);
    if (!(mass > 0.0))
        throw std::invalid_argument("moments: grid integrates to a non-positive value");

    Moments m;
    double min_v = *std::min_element(g.values.begin(), g.values.end());
    double max_v = *std::max_element(g.values.begin(), g.values.end());
    m.from_signed_density = min_v < -1e-14 * std::max(1.0, std::abs(max_v));

    double sq = 0.0, sp = 0.0;
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_p; ++j) {
            sq += g.q_center(i) * g.at(i, j);
            sp += g.p_center(j) * g.at(i, j);
        }
    m.mean_q = sq * g.cell_area() / mass;
    m.mean_p = sp * g.cell_area() / mass;

    double vq = 0.0, vp = 0.0;
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_p; ++j) {
            double dqc = g.q_center(i) - m.mean_q;
            double dpc = g.p_center(j) - m.mean_p;
            vq += dqc * dqc * g.at(i, j);
            vp += dpc * dpc * g.at(i, j);
        }
    m.var_q = vq * g.cell_area() / mass;
    m.var_p = vp * g.cell_area() / mass;
    m.uncertainty_product = (m.var_q >= 0.0 && m.var_p >= 0.0)
                                ? std::sqrt(m.var_q * m.var_p)
                                : std::numeric_limits<double>::quiet_NaN();
    return m;
}

namespace {

// Keys cubic convolution weights (a = -1/2) for fractional offset t in [0, 1),
// applied to samples at offsets -1, 0, 1, 2.
inline void cubic_weights(double t, double w[4]) {
    double t2 = t * t, t3 = t2 * t;
    w[0] = -0.5 * t3 + t2 - 0.5 * t;
    w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
    w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace

PhaseSpaceGrid rotate(const PhaseSpaceGrid& g, double angle,
                      const std::function<double(double, double)>& tail) {
    validate(g);
    double wq = g.q_max - g.q_min, wp = g.p_max - g.p_min;
    if (g.n_q != g.n_p || std::abs(wq - wp) > 1e-12 * std::max(wq, wp))
        throw std::invalid_argument("rotate: window must be square");

    const double cq = 0.5 * (g.q_min + g.q_max);
    const double cp = 0.5 * (g.p_min + g.p_max);
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double hq = g.dq(), hp = g.dp();

    PhaseSpaceGrid out = g;
    for (int i = 0; i < g.n_q; ++i) {
        for (int j = 0; j < g.n_p; ++j) {
            // back-rotate the target point about the window center
            double q = g.q_center(i) - cq, p = g.p_center(j) - cp;
            double qs = ca * q + sa * p + cq;
            double ps = -sa * q + ca * p + cp;
            if (qs < g.q_min || qs > g.q_max || ps < g.p_min || ps > g.p_max) {
                out.at(i, j) = tail ? tail(qs, ps) : 0.0;
                continue;
            }
            double fq = (qs - (g.q_min + 0.5 * hq)) / hq;
            double fp = (ps - (g.p_min + 0.5 * hp)) / hp;
            int i0 = static_cast<int>(std::floor(fq));
            int j0 = static_cast<int>(std::floor(fp));
            double wgq[4], wgp[4];
            cubic_weights(fq - i0, wgq);
            cubic_weights(fp - j0, wgp);
            double acc = 0.0;
            for (int a = 0; a < 4; ++a) {
                int ii = i0 - 1 + a;
                for (int b = 0; b < 4; ++b) {
                    int jj = j0 - 1 + b;
                    double v;
                    if (ii < 0 || ii >= g.n_q || jj < 0 || jj >= g.n_p)
                        v = tail ? tail(g.q_min + (ii + 0.5) * hq, g.p_min + (jj + 0.5) * hp)
                                 : 0.0;
                    else
                        v = g.at(ii, jj);
                    acc += wgq[a] * wgp[b] * v;
                }
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

PhaseSpaceGrid rasterize(const RadialProfile& f, double q_cl, double p_cl, const GridWindow& w) {
    if (w.n_q < 8 || w.n_p < 8)
        throw std::invalid_argument("rasterize: need at least 8 cells per axis");
    PhaseSpaceGrid g = PhaseSpaceGrid::zeros(w);
    for (int i = 0; i < g.n_q; ++i) {
        double dqc = g.q_center(i) - q_cl;
        for (int j = 0; j < g.n_p; ++j) {
            double dpc = g.p_center(j) - p_cl;
            g.at(i, j) = f(dqc * dqc + dpc * dpc);
        }
    }
    return g;
}

PhaseSpaceGrid smear(const PhaseSpaceGrid& g, double b) {
    validate(g);
    if (!(b > 0.0)) throw std::invalid_argument("smear: b must be positive");

    // separable kernel: exp(-dq^2/(2 b^2)) along q, exp(-2 b^2 dp^2) along p
    const double sig_q = b;
    const double sig_p = 0.5 / b;
    const int rq = std::max(1, static_cast<int>(std::ceil(7.0 * sig_q / g.dq())));
    const int rp = std::max(1, static_cast<int>(std::ceil(7.0 * sig_p / g.dp())));

    std::vector<double> kq(2 * rq + 1), kp(2 * rp + 1);
    for (int a = -rq; a <= rq; ++a) {
        double d = a * g.dq();
        kq[a + rq] = std::exp(-d * d / (2.0 * b * b));
    }
    for (int a = -rp; a <= rp; ++a) {
        double d = a * g.dp();
        kp[a + rp] = std::exp(-2.0 * b * b * d * d);
    }

    PhaseSpaceGrid tmp = g;
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_p; ++j) {
            double acc = 0.0;
            for (int a = -rq; a <= rq; ++a) {
                int ii = i + a;
                if (ii < 0 || ii >= g.n_q) continue;
                acc += kq[a + rq] * g.at(ii, j);
            }
            tmp.at(i, j) = acc;
        }
    PhaseSpaceGrid out = g;
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_p; ++j) {
            double acc = 0.0;
            for (int a = -rp; a <= rp; ++a) {
                int jj = j + a;
                if (jj < 0 || jj >= g.n_p) continue;
                acc += kp[a + rp] * tmp.at(i, jj);
            }
            out.at(i, j) = acc * g.cell_area() / kPi;
        }
    return out;
}

}  // namespace optprob
