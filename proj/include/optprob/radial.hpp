#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace optprob {

/// A real function of the squared phase-space radius x = (q - q_cl)^2 + (p - p_cl)^2.
///
/// Rotationally symmetric phase-space functions reduce to this 1-D form; the
/// full phase-space integral of a profile f is pi * int_0^inf f(x) dx.
/// Values beyond x_tail are treated as negligible (the closed-form states decay
/// like exp(-x), contributing < 1e-20 past the default tail).
struct RadialProfile {
    std::function<double(double)> f;
    double x_tail = 60.0;
    /// Interior x where f has kinks (threshold crossings, window edges, table
    /// knots). Quadrature splits at these so each piece stays smooth.
    std::vector<double> breakpoints;

    double operator()(double x) const { return f(x); }

    /// Piecewise-linear profile through (knots, values); knots strictly ascending.
    /// Evaluates to 0 beyond the last knot.
    static RadialProfile from_table(std::vector<double> knots, std::vector<double> values);
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    int max_depth = 15;
};

/// Adaptive Gauss-Kronrod integral of g over [a, b].
/// Throws std::runtime_error if the error estimate does not reach abs_tol
/// within the refinement depth limit.
double adaptive_integrate(const std::function<double(double)>& g, double a, double b,
                          const QuadratureOptions& opts = {});

/// pi * int_0^upper x^k f(x) dx. upper = inf integrates to the profile tail.
double radial_integral(const RadialProfile& f, int moment_power = 0,
                       double upper = std::numeric_limits<double>::infinity(),
                       const QuadratureOptions& opts = {});

/// 1-D marginal of the radial profile at signed axis offset u from the center:
/// 2 * int_0^inf f(u^2 + p^2) dp.
double radial_marginal(const RadialProfile& f, double u, const QuadratureOptions& opts = {});

/// Zeros of g on [lo, hi], located by uniform scan plus bisection refinement.
/// Resolves features no narrower than (hi - lo) / samples.
std::vector<double> find_crossings(const std::function<double(double)>& g, double lo, double hi,
                                   int samples = 8192);

/// min/max of f sampled on a uniform grid over [lo, hi] (endpoints included).
std::pair<double, double> sampled_range(const std::function<double(double)>& f, double lo,
                                        double hi, int samples = 8192);

}  // namespace optprob
