#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optprob/optimizer.hpp"
#include "optprob/states.hpp"
#include "support.hpp"

using namespace optprob;
using testsupport::kPi;

// Reference solutions computed independently (adaptive quadrature + Brent /
// high-precision Newton on the constraint equations):
//   n=1: c = 0.0105338383, sigma2 = 0.2770490727, product = 1.1075268323
//   n=2: c = 0.0159546203, sigma2 = 0.2680845534, product = 1.7218159350
//   n=1, x_max=18: c = 0.0183706963, d = -0.0014130920, sigma2 = 0.2876909066
//   n=2, x_max=15: c = 0.0423477620, d = -0.0040836458, sigma2 = 0.3222537244

TEST_CASE("constraint integral") {
    auto w1 = wigner_radial({.n = 1});

    // at c = 0 the positive part carries the clipped lobe twice:
    // 1 + 2 int_0^1/2 (1/2 - x) e^-x dx = 1 + 2 (e^-1/2 - 1/2)
    double expected = 1.0 + 2.0 * (std::exp(-0.5) - 0.5);
    CHECK(constraint_integral(w1, 0.0) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(constraint_integral(w1, 0.0) > 1.0);

    auto [mn, mx] = sampled_range(w1.f, 0.0, w1.x_tail);
    (void)mn;
    CHECK(constraint_integral(w1, mx) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));

    CHECK(constraint_integral(w1, -0.05) > expected);  // >= 1 for c <= 0
}

TEST_CASE("constraint integral is strictly decreasing in c") {
    for (int n : {1, 2}) {
        auto w = wigner_radial({.n = n});
        auto [mn, mx] = sampled_range(w.f, 0.0, w.x_tail);
        (void)mn;
        double prev = constraint_integral(w, 0.0);
        for (int k = 1; k < 20; ++k) {
            double cur = constraint_integral(w, mx * k / 20.0);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("solve_c reproduces the reference multipliers and deviations") {
    auto s1 = solve_c(wigner_radial({.n = 1}));
    CHECK(s1.result.c == doctest::Approx(0.0105338383).epsilon(1e-6));
    CHECK(s1.result.sigma2 == doctest::Approx(0.2770490727).epsilon(1e-7));
    CHECK(s1.result.uncertainty_product == doctest::Approx(1.1075268323).epsilon(1e-7));
    CHECK(std::abs(s1.result.residuals[0]) < 1e-10);
    // solution is normalized after thresholding
    CHECK(radial_integral(s1.p_min) == doctest::Approx(1.0).epsilon(1e-9));

    auto s2 = solve_c(wigner_radial({.n = 2}));
    CHECK(s2.result.c == doctest::Approx(0.0159546203).epsilon(1e-6));
    CHECK(s2.result.sigma2 == doctest::Approx(0.2680845534).epsilon(1e-7));
    CHECK(s2.result.uncertainty_product == doctest::Approx(1.7218159350).epsilon(1e-7));
}

TEST_CASE("solve_c on a nonnegative distribution is the identity") {
    auto w0 = wigner_radial({.n = 0});
    auto s = solve_c(w0);
    CHECK(s.result.c == 0.0);
    CHECK(s.result.sigma2 == 0.0);
    for (double x : {0.0, 0.5, 2.0}) CHECK(s.p_min(x) == w0(x));
    CHECK(s.result.uncertainty_product == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("solve_c rejects non-normalized input") {
    auto w1 = wigner_radial({.n = 1});
    RadialProfile scaled{.f = [w1](double x) { return 2.0 * w1(x); },
                         .x_tail = w1.x_tail,
                         .breakpoints = {}};
    CHECK_THROWS_AS(solve_c(scaled), std::invalid_argument);
}

TEST_CASE("sigma2 against the Husimi distributions") {
    // analytic values: 55/108 and 835/1296
    auto w1 = wigner_radial({.n = 1});
    auto q1 = husimi_radial({.n = 1});
    CHECK(sigma2(q1, w1) == doctest::Approx(55.0 / 108.0).epsilon(1e-9));

    auto w2 = wigner_radial({.n = 2});
    auto q2 = husimi_radial({.n = 2});
    CHECK(sigma2(q2, w2) == doctest::Approx(835.0 / 1296.0).epsilon(1e-9));

    CHECK(sigma2(w1, w1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    // impure-state weight scales the value by 1/purity
    CHECK(sigma2(q1, w1, 0.5) == doctest::Approx(2.0 * 55.0 / 108.0).epsilon(1e-9));
}

TEST_CASE("threshold_density") {
    auto w0 = wigner_radial({.n = 0});
    auto p0 = threshold_density(w0, 0.0, 0.0);
    for (double x : {0.0, 1.0, 5.0}) CHECK(p0(x) == w0(x));

    auto w1 = wigner_radial({.n = 1});
    double c = 0.0105338383;
    auto p1 = threshold_density(w1, c);
    // vanishes below the inner crossing (x ~ 0.5281) and above the outer one
    CHECK(p1(0.45) == 0.0);
    CHECK(p1(0.75) > 0.0);
    CHECK(p1(5.762) > 0.0);
    CHECK(p1(5.80) == 0.0);
    // crossings recorded as breakpoints
    bool has_inner = false, has_outer = false;
    for (double b : p1.breakpoints) {
        if (std::abs(b - 0.528057) < 1e-4) has_inner = true;
        if (std::abs(b - 5.762093) < 1e-4) has_outer = true;
    }
    CHECK(has_inner);
    CHECK(has_outer);

    auto dead = threshold_density(w1, 1.0);
    for (double x : {0.0, 1.5, 10.0}) CHECK(dead(x) == 0.0);

    // outside x_max the density reverts to W
    auto part = threshold_density(w1, 0.5, 0.0, 2.0);
    CHECK(part(3.0) == w1(3.0));
    CHECK(part(1.5) == 0.0);  // W(3/2) < 0.5
}

TEST_CASE("solve_cd reproduces the constrained reference solutions") {
    auto r1 = solve_cd(wigner_radial({.n = 1}), 18.0);
    CHECK(r1.result.converged);
    CHECK(r1.result.c == doctest::Approx(0.0183706963).epsilon(1e-5));
    CHECK(r1.result.d == doctest::Approx(-0.0014130920).epsilon(1e-4));
    CHECK(r1.result.sigma2 == doctest::Approx(0.2876909066).epsilon(1e-6));
    CHECK(r1.result.uncertainty_product == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(std::abs(r1.result.residuals[0]) < 1e-10);
    CHECK(std::abs(r1.result.residuals[1]) < 1e-10);

    auto r2 = solve_cd(wigner_radial({.n = 2}), 15.0);
    CHECK(r2.result.converged);
    CHECK(r2.result.c == doctest::Approx(0.0423477620).epsilon(1e-5));
    CHECK(r2.result.d == doctest::Approx(-0.0040836458).epsilon(1e-4));
    CHECK(r2.result.sigma2 == doctest::Approx(0.3222537244).epsilon(1e-6));
    CHECK(r2.result.uncertainty_product == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("solve_cd degenerate modes") {
    auto w0 = wigner_radial({.n = 0});
    auto s = solve_cd(w0, 10.0);
    CHECK(s.result.c == 0.0);
    CHECK(s.result.d == 0.0);
    CHECK(s.result.sigma2 == 0.0);

    // d forced to zero with unbounded window reproduces solve_c
    SolverConfig cfg;
    cfg.fix_d = true;
    auto w1 = wigner_radial({.n = 1});
    auto fixed = solve_cd(w1, std::numeric_limits<double>::infinity(), 1.0, cfg);
    auto plain = solve_c(w1);
    CHECK(std::abs(fixed.result.c - plain.result.c) < 1e-9);
    CHECK(std::abs(fixed.result.sigma2 - plain.result.sigma2) < 1e-9);

    // W_1 is negative inside x < 1/2, beyond a tiny x_max
    CHECK_THROWS_AS(solve_cd(w1, 0.1), std::invalid_argument);
}

TEST_CASE("quantumness") {
    CHECK(quantumness(wigner_radial({.n = 0})) == 0.0);
    CHECK(quantumness(wigner_radial({.n = 1})) == doctest::Approx(0.2770).epsilon(5e-3));
    CHECK(quantumness(wigner_radial({.n = 2})) == doctest::Approx(0.2681).epsilon(5e-3));
}

TEST_CASE("global minimum over generated feasible densities") {
    auto w1 = wigner_radial({.n = 1});
    auto best = solve_c(w1);

    auto check_feasible = [&](const RadialProfile& p) {
        CHECK(radial_integral(p) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(sigma2(p, w1) >= best.result.sigma2 - 1e-9);
    };

    check_feasible(husimi_radial({.n = 1}));

    // renormalized |W|; pi int |W_1| = 1 + 4 (e^-1/2 - 1/2) analytically
    double abs_mass = 1.0 + 4.0 * (std::exp(-0.5) - 0.5);
    check_feasible(RadialProfile{.f = [w1, abs_mass](double x) { return std::abs(w1(x)) / abs_mass; },
                                 .x_tail = w1.x_tail,
                                 .breakpoints = {0.5}});

    // convex mixtures of the optimum with normalized radial Gaussians
    // (widths small enough that the profile tail carries < 1e-8 of the mass)
    for (double t : {0.2, 0.7}) {
        for (double width : {0.5, 1.5, 3.0}) {
            auto pm = best.p_min;
            check_feasible(RadialProfile{
                .f = [pm, t, width](double x) {
                    double gauss = std::exp(-x / width) / (kPi * width);
                    return (1.0 - t) * pm(x) + t * gauss;
                },
                .x_tail = pm.x_tail,
                .breakpoints = pm.breakpoints});
        }
    }
}

TEST_CASE("grid path agrees with the radial path") {
    auto w1 = wigner_radial({.n = 1});
    auto grid = rasterize(w1, 0.0, 0.0, {-8, 8, -8, 8, 256, 256});
    auto gs = solve_c(grid);
    auto rs = solve_c(w1);
    CHECK(std::abs(gs.result.c - rs.result.c) < 2e-4);
    CHECK(std::abs(gs.result.sigma2 - rs.result.sigma2) < 1e-3);
    CHECK(integrate(gs.p_min) == doctest::Approx(1.0).epsilon(1e-8));

    auto gcd = solve_cd(grid, {0.0, 0.0}, 18.0);
    auto rcd = solve_cd(w1, 18.0);
    CHECK(gcd.result.converged);
    CHECK(std::abs(gcd.result.c - rcd.result.c) < 2e-4);
    CHECK(std::abs(gcd.result.d - rcd.result.d) < 2e-5);
    CHECK(std::abs(gcd.result.sigma2 - rcd.result.sigma2) < 1e-3);
}

TEST_CASE("grid-path edge cases") {
    auto w1 = wigner_radial({.n = 1});
    auto grid = rasterize(w1, 0.0, 0.0, {-8, 8, -8, 8, 64, 64});

    CHECK_THROWS_AS(threshold_density(grid, 0.01, -0.001), std::invalid_argument);

    auto other = rasterize(w1, 0.0, 0.0, {-8, 8, -8, 8, 32, 32});
    CHECK_THROWS_AS(sigma2(other, grid), std::invalid_argument);

    auto scaled = grid;
    for (auto& v : scaled.values) v *= 3.0;
    CHECK_THROWS_AS(solve_c(scaled), std::invalid_argument);

    // positive grid: identity
    auto g0 = rasterize(wigner_radial({.n = 0}), 0.0, 0.0, {-8, 8, -8, 8, 64, 64});
    auto s0 = solve_c(g0);
    CHECK(s0.result.c == 0.0);
    CHECK(s0.result.sigma2 == 0.0);
}

TEST_CASE("sigma2 is rotation invariant on the grid path") {
    auto w1 = wigner_radial({.n = 1});
    auto grid = rasterize(w1, 0.0, 0.0, {-8, 8, -8, 8, 256, 256});
    auto s = solve_c(grid);
    auto wr = rotate(grid, kPi / 7);
    auto pr = rotate(s.p_min, kPi / 7);
    double s2r = sigma2(pr, wr, grid.purity);
    CHECK(std::abs(s2r - s.result.sigma2) < 5e-5);  // resampling-limited at this resolution
}

TEST_CASE("serialized result block") {
    auto r = solve_c(wigner_radial({.n = 1})).result;
    auto text = to_text(r);
    CHECK(text.find("c = ") != std::string::npos);
    CHECK(text.find("sigma2 = ") != std::string::npos);
    CHECK(text.find("residual_mass = ") != std::string::npos);
    CHECK(text.find("x_max = inf") != std::string::npos);
}
