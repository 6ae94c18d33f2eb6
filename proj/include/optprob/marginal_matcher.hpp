#pragma once

#include <utility>
#include <vector>

#include "optprob/grid.hpp"
#include "optprob/optimizer.hpp"

namespace optprob {

/// Multiplier functions sampled on the working grid's axes. Only the sum
/// lambda(q) + mu(p) enters the density; the gauge is fixed so that the
/// window average of lambda is zero.
struct MultiplierPair {
    std::vector<double> lambda_q;
    std::vector<double> mu_p;
};

struct MatchConfig {
    double tol = 1e-8;        // max marginal residual at convergence
    int max_iters = 500;      // full (lambda + mu) sweeps
    double damping = 0.5;
    double zero_marginal_floor = 1e-14;  // rows/columns below this carry no mass
    int bisect_iters = 60;
};

/// P = (W - lambda - mu) theta(.) for the given multipliers.
PhaseSpaceGrid apply_multipliers(const PhaseSpaceGrid& w, const MultiplierPair& m);

/// Marginal defect of P against W: r_q(q) = int (P - W) dp and the symmetric
/// r_p(p). Throws std::invalid_argument on axis mismatch.
std::pair<std::vector<double>, std::vector<double>> marginal_residuals(const PhaseSpaceGrid& w,
                                                                       const MultiplierPair& m);

struct MatchOutcome {
    MultiplierPair multipliers;
    OptimResult result;      // sigma2, iterations, residuals = {max |r_q|, max |r_p|}
    PhaseSpaceGrid p;
    std::vector<double> residual_history;  // max residual after each sweep
};

/// Positive density closest to W that reproduces both of W's marginals:
/// alternating per-row/per-column monotone root-finds for lambda(q) and mu(p)
/// with damping, iterated until the marginal residuals drop below tol.
/// Requires W normalized and its marginals nonnegative (quantum probability
/// densities). Non-convergence is reported through result.converged.
MatchOutcome solve_multipliers(const PhaseSpaceGrid& w, const MatchConfig& cfg = {});

}  // namespace optprob
