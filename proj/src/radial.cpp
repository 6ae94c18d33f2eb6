#include "optprob/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace optprob {

RadialProfile RadialProfile::from_table(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
        throw std::invalid_argument("from_table: need >= 2 knots and matching value count");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("from_table: knots must be strictly ascending");

    RadialProfile out;
    out.x_tail = knots.back();
    out.breakpoints = knots;
    out.f = [k = std::move(knots), v = std::move(values)](double x) {
        if (x <= k.front()) return v.front();
        if (x >= k.back()) return 0.0;
        auto it = std::upper_bound(k.begin(), k.end(), x);
        std::size_t i = static_cast<std::size_t>(it - k.begin());
        double t = (x - k[i - 1]) / (k[i] - k[i - 1]);
        return v[i - 1] + t * (v[i] - v[i - 1]);
    };
    return out;
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kKronrodX = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussW = {0.129484966168870, 0.279705391489277,
                                           0.381830050505119, 0.417959183673469};

// one G7/K15 panel: returns the Kronrod value and |K15 - G7| as error estimate
std::pair<double, double> gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double fx[8];
    fx[7] = f(mid);
    double kron = kKronrodW[7] * fx[7];
    double gauss = kGaussW[3] * fx[7];
    for (int i = 0; i < 7; ++i) {
        double lo = f(mid - half * kKronrodX[i]);
        double hi = f(mid + half * kKronrodX[i]);
        kron += kKronrodW[i] * (lo + hi);
        if (i % 2 == 1) gauss += kGaussW[i / 2] * (lo + hi);
    }
    return {kron * half, std::abs(kron - gauss) * half};
}

double gk_recurse(const std::function<double(double)>& f, double a, double b, double tol,
                  int depth_left) {
    auto [value, err] = gk15(f, a, b);
    if (err <= tol) return value;
    if (depth_left <= 0)
        throw std::runtime_error("adaptive_integrate: quadrature did not converge to tolerance "
                                 "within refinement depth limit");
    double mid = 0.5 * (a + b);
    return gk_recurse(f, a, mid, 0.5 * tol, depth_left - 1) +
           gk_recurse(f, mid, b, 0.5 * tol, depth_left - 1);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& g, double a, double b,
                          const QuadratureOptions& opts) {
    if (!(b > a)) return 0.0;
    return gk_recurse(g, a, b, opts.abs_tol, opts.max_depth);
}

namespace {

// [a, b] split at the profile's interior breakpoints, ascending.
std::vector<double> split_points(const RadialProfile& f, double a, double b) {
    std::vector<double> pts{a};
    for (double bp : f.breakpoints)
        if (bp > a && bp < b) pts.push_back(bp);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace

double radial_integral(const RadialProfile& f, int moment_power, double upper,
                       const QuadratureOptions& opts) {
    if (moment_power < 0) throw std::invalid_argument("radial_integral: moment_power < 0");
    double hi = std::min(upper, f.x_tail);
    if (!(hi > 0.0)) return 0.0;

    auto integrand = [&f, moment_power](double x) {
        double w = 1.0;
        for (int i = 0; i < moment_power; ++i) w *= x;
        return w * f(x);
    };
    const auto pts = split_points(f, 0.0, hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += adaptive_integrate(integrand, pts[i], pts[i + 1], opts);
    return std::acos(-1.0) * total;
}

double radial_marginal(const RadialProfile& f, double u, const QuadratureOptions& opts) {
    double u2 = u * u;
    if (u2 >= f.x_tail) return 0.0;
    double p_hi = std::sqrt(f.x_tail - u2);

    auto integrand = [&f, u2](double p) { return 2.0 * f(u2 + p * p); };
    // breakpoints in x land at p = sqrt(bp - u^2)
    std::vector<double> pts{0.0};
    for (double bp : f.breakpoints)
        if (bp > u2 && bp < f.x_tail) pts.push_back(std::sqrt(bp - u2));
    pts.push_back(p_hi);
    std::sort(pts.begin(), pts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += adaptive_integrate(integrand, pts[i], pts[i + 1], opts);
    return total;
}

std::vector<double> find_crossings(const std::function<double(double)>& g, double lo, double hi,
                                   int samples) {
    std::vector<double> roots;
    if (!(hi > lo) || samples < 2) return roots;
    double h = (hi - lo) / samples;
    double xa = lo, ga = g(xa);
    for (int i = 1; i <= samples; ++i) {
        double xb = lo + i * h, gb = g(xb);
        if (ga == 0.0) {
            roots.push_back(xa);
        } else if (ga * gb < 0.0) {
            double a = xa, b = xb, fa = ga;
            for (int it = 0; it < 80; ++it) {
                double m = 0.5 * (a + b), fm = g(m);
                if (fm == 0.0) { a = b = m; break; }
                if (fa * fm < 0.0) b = m;
                else { a = m; fa = fm; }
            }
            roots.push_back(0.5 * (a + b));
        }
        xa = xb;
        ga = gb;
    }
    if (ga == 0.0) roots.push_back(hi);
    // collapse duplicates from exact-zero hits next to sign changes
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return b - a < 1e-13 * (1.0 + hi - lo); }),
                roots.end());
    return roots;
}

std::pair<double, double> sampled_range(const std::function<double(double)>& f, double lo,
                                        double hi, int samples) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (int i = 0; i <= samples; ++i) {
        double v = f(lo + (hi - lo) * i / samples);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    return {mn, mx};
}

}  // namespace optprob
