#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optprob/marginal_matcher.hpp"
#include "optprob/states.hpp"
#include "support.hpp"

using namespace optprob;
using testsupport::kPi;

namespace {

PhaseSpaceGrid raster(int n, int fock, double half = 8.0) {
    return rasterize(wigner_radial({.n = fock}), 0.0, 0.0, {-half, half, -half, half, n, n});
}

}  // namespace

TEST_CASE("marginal residuals") {
    auto w0 = raster(64, 0);
    MultiplierPair zero{std::vector<double>(64, 0.0), std::vector<double>(64, 0.0)};
    auto [rq, rp] = marginal_residuals(w0, zero);
    for (double v : rq) CHECK(v == 0.0);
    for (double v : rp) CHECK(v == 0.0);

    // with lambda = mu = 0 on a signed W, the residual at q is the clipped
    // negative mass of that row
    auto w1 = raster(128, 1);
    MultiplierPair zero1{std::vector<double>(128, 0.0), std::vector<double>(128, 0.0)};
    auto [rq1, rp1] = marginal_residuals(w1, zero1);
    int mid = 64;  // q ~ 0.0625, inside the negative disk
    double clipped = 0.0;
    for (int j = 0; j < w1.n_p; ++j) clipped += std::max(-w1.at(mid, j), 0.0);
    clipped *= w1.dp();
    CHECK(rq1[mid] == doctest::Approx(clipped).epsilon(1e-12));
    CHECK(rq1[mid] > 0.0);
    CHECK(rp1[mid] == doctest::Approx(clipped).epsilon(1e-12));  // symmetry

    // gauge freedom: shifting lambda by +k and mu by -k leaves everything put
    MultiplierPair shifted{std::vector<double>(128, 0.25), std::vector<double>(128, -0.25)};
    auto [rq2, rp2] = marginal_residuals(w1, shifted);
    for (int i = 0; i < 128; ++i) CHECK(rq2[i] == doctest::Approx(rq1[i]).scale(1.0).epsilon(1e-13));
    for (int j = 0; j < 128; ++j) CHECK(rp2[j] == doctest::Approx(rp1[j]).scale(1.0).epsilon(1e-13));

    MultiplierPair bad{std::vector<double>(5, 0.0), std::vector<double>(128, 0.0)};
    CHECK_THROWS_AS(marginal_residuals(w1, bad), std::invalid_argument);
}

TEST_CASE("nonnegative W converges immediately to P = W") {
    auto w0 = raster(64, 0);
    auto out = solve_multipliers(w0);
    CHECK(out.result.converged);
    CHECK(out.result.iterations == 0);
    for (double v : out.multipliers.lambda_q) CHECK(v == 0.0);
    for (double v : out.multipliers.mu_p) CHECK(v == 0.0);
    for (std::size_t k = 0; k < w0.values.size(); ++k) CHECK(out.p.values[k] == w0.values[k]);
    CHECK(out.result.sigma2 == 0.0);
}

TEST_CASE("marginal matching on the n = 1 state") {
    auto w1 = raster(128, 1);
    auto out = solve_multipliers(w1);
    REQUIRE(out.result.converged);
    CHECK(out.result.iterations < 500);
    CHECK(out.result.residuals[0] < 1e-8);
    CHECK(out.result.residuals[1] < 1e-8);

    // feasibility: P >= 0 and both marginals match W's
    for (double v : out.p.values) CHECK(v >= 0.0);
    auto pq = marginal_q(out.p);
    StateSpec s{.n = 1};
    for (int i = 0; i < w1.n_q; ++i)
        CHECK(pq[i] ==
              doctest::Approx(position_density(s, w1.q_center(i))).scale(1.0).epsilon(1e-6));

    // gauge: window average of lambda is zero
    double mean = 0.0;
    for (double v : out.multipliers.lambda_q) mean += v;
    mean /= out.multipliers.lambda_q.size();
    CHECK(std::abs(mean) < 1e-13);

    // matching both marginals costs more deviation than normalization alone,
    // and beats the product-of-marginals competitor
    auto rq = marginal_q(w1);
    auto rp = marginal_p(w1);
    double mass = integrate(w1);
    PhaseSpaceGrid prod = w1;
    for (int i = 0; i < w1.n_q; ++i)
        for (int j = 0; j < w1.n_p; ++j) prod.at(i, j) = rq[i] * rp[j] / mass;
    double s2_prod = sigma2(prod, w1);
    CHECK(out.result.sigma2 <= s2_prod + 1e-9);

    // one-parameter marginal-preserving deformations of the product density
    // stay feasible and never beat the solution
    for (double k : {0.8, 2.0}) {
        for (double phase : {0.0, 1.1}) {
            PhaseSpaceGrid comp = prod;
            std::vector<double> sfun(w1.n_q), zfun(w1.n_p);
            double sm = 0.0, zm = 0.0;
            for (int i = 0; i < w1.n_q; ++i) sfun[i] = std::cos(k * w1.q_center(i) + phase);
            for (int j = 0; j < w1.n_p; ++j) zfun[j] = std::cos(k * w1.p_center(j) - phase);
            for (int i = 0; i < w1.n_q; ++i) sm += rq[i] * sfun[i];
            for (int j = 0; j < w1.n_p; ++j) zm += rp[j] * zfun[j];
            double rq_tot = 0.0, rp_tot = 0.0;
            for (double v : rq) rq_tot += v;
            for (double v : rp) rp_tot += v;
            for (int i = 0; i < w1.n_q; ++i) sfun[i] -= sm / rq_tot;
            for (int j = 0; j < w1.n_p; ++j) zfun[j] -= zm / rp_tot;
            double smax = 0.0, zmax = 0.0;
            for (double v : sfun) smax = std::max(smax, std::abs(v));
            for (double v : zfun) zmax = std::max(zmax, std::abs(v));
            double eps = 0.9 / (smax * zmax);
            for (int i = 0; i < w1.n_q; ++i)
                for (int j = 0; j < w1.n_p; ++j)
                    comp.at(i, j) = prod.at(i, j) * (1.0 + eps * sfun[i] * zfun[j]);

            for (double v : comp.values) CHECK(v >= 0.0);
            auto cq = marginal_q(comp);
            for (int i = 0; i < w1.n_q; ++i)
                CHECK(cq[i] == doctest::Approx(rq[i]).scale(1.0).epsilon(1e-12));
            CHECK(sigma2(comp, w1) >= out.result.sigma2 - 1e-9);
        }
    }
}

TEST_CASE("rows with vanishing marginals are zeroed") {
    // wide window: rows beyond |q| ~ 8 carry marginals below the floor
    auto w1 = raster(128, 1, 12.0);
    auto out = solve_multipliers(w1);
    REQUIRE(out.result.converged);
    auto pq = marginal_q(out.p);
    auto wq = marginal_q(w1);
    for (int i = 0; i < w1.n_q; ++i) {
        if (wq[i] < 1e-14) CHECK(pq[i] <= 1e-14);
    }
    for (double v : out.p.values) CHECK(v >= 0.0);
}

TEST_CASE("iteration cap reports non-convergence without throwing") {
    auto w1 = raster(64, 1);
    MatchConfig cfg;
    cfg.max_iters = 2;
    auto out = solve_multipliers(w1, cfg);
    CHECK_FALSE(out.result.converged);
    CHECK(out.result.iterations == 2);
    CHECK(out.residual_history.size() == 2);
}

TEST_CASE("input validation") {
    auto w1 = raster(64, 1);
    auto bad = w1;
    bad.values[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_multipliers(bad), std::invalid_argument);
}
