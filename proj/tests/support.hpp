#pragma once

// Test-side numerical oracles, independent of the library's quadrature path
// (composite Simpson with interval doubling vs. the library's Gauss-Kronrod).

#include <cmath>
#include <functional>
#include <stdexcept>

namespace testsupport {

inline double simpson_fixed(const std::function<double(double)>& f, double a, double b, int n) {
    // n panels, n even
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Composite Simpson, doubling panels until successive estimates agree to tol.
inline double simpson_oracle(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-11) {
    double prev = simpson_fixed(f, a, b, 64);
    for (int n = 128; n <= (1 << 22); n *= 2) {
        double cur = simpson_fixed(f, a, b, n);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    throw std::runtime_error("simpson_oracle did not converge");
}

constexpr double kPi = 3.141592653589793238462643383279502884;

// Closed-form radial Wigner profiles for the first three states.
inline double w0(double x) { return std::exp(-x) / kPi; }
inline double w1(double x) { return 2.0 / kPi * (x - 0.5) * std::exp(-x); }
inline double w2(double x) {
    double u = x - 1.0;
    return 2.0 / kPi * (u * u - 0.5) * std::exp(-x);
}

}  // namespace testsupport
