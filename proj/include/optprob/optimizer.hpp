#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "optprob/grid.hpp"
#include "optprob/radial.hpp"

namespace optprob {

/// Outcome of one optimization run: the multipliers, the minimized deviation
/// sigma^2 = (2 pi / purity) * int (P - W)^2, and solver diagnostics.
struct OptimResult {
    double c = 0.0;
    double d = 0.0;
    double x_max = std::numeric_limits<double>::infinity();
    double sigma2 = 0.0;
    double uncertainty_product = 0.0;
    int iterations = 0;
    std::vector<double> residuals;
    bool converged = true;
};

struct SolverConfig {
    double c_abs_tol = 1e-12;        // bisection interval width on c
    double constraint_tol = 1e-10;   // |normalization constraint residual|
    double newton_tol = 1e-10;       // (c, d) residual infinity norm
    int max_iterations = 200;
    double fd_step = 1e-6;           // central-difference step, times max(1, |var|)
    bool fix_d = false;              // solve the mass constraint only, with d = 0
    double normalization_tol = 1e-6;
};

/// Serialize as a flat key = value block (one per line).
std::string to_text(const OptimResult& r);

// ---- radial path ----------------------------------------------------------

/// Integral over the region {W - c >= 0} of (W - c).
double constraint_integral(const RadialProfile& w, double c);

/// Pointwise max(W - c - d x, 0) for x <= x_max, W beyond. Breakpoints carry
/// the threshold crossings so downstream quadrature stays piecewise-smooth.
RadialProfile threshold_density(const RadialProfile& w, double c, double d = 0.0,
                                double x_max = std::numeric_limits<double>::infinity());

/// (2 pi / purity) * int (P - W)^2 over phase space, radial reduction.
double sigma2(const RadialProfile& p, const RadialProfile& w, double purity = 1.0,
              double upper = std::numeric_limits<double>::infinity());

struct RadialSolve {
    OptimResult result;
    RadialProfile p_min;
};

/// Positive normalized density closest to w: P = (W - c) theta(W - c) with c
/// fixed by the normalization constraint (bisection; c = 0 when W >= 0).
/// Requires pi * int w = 1 within config.normalization_tol.
RadialSolve solve_c(const RadialProfile& w, double purity = 1.0, const SolverConfig& cfg = {});

/// Two-multiplier variant: P = (W - c - x d) theta(.) for x <= x_max and W
/// beyond, with (c, d) solving the mass and x-moment balance over x <= x_max
/// (damped Newton, central-difference Jacobian). W must stay nonnegative for
/// x >= x_max. Non-convergence is reported via result.converged, not thrown.
RadialSolve solve_cd(const RadialProfile& w, double x_max, double purity = 1.0,
                     const SolverConfig& cfg = {});

/// solve_c then sigma2.
double quantumness(const RadialProfile& w, double purity = 1.0);

// ---- grid path -------------------------------------------------------------

double constraint_integral(const PhaseSpaceGrid& w, double c);

struct Center {
    double q, p;
};

/// Grid transcription of the thresholded form. d != 0 requires a declared
/// center so that x = (q - center.q)^2 + (p - center.p)^2 is defined.
PhaseSpaceGrid threshold_density(const PhaseSpaceGrid& w, double c, double d = 0.0,
                                 double x_max = std::numeric_limits<double>::infinity(),
                                 std::optional<Center> center = std::nullopt);

/// Domains must match exactly.
double sigma2(const PhaseSpaceGrid& p, const PhaseSpaceGrid& w, double purity = 1.0);

struct GridSolve {
    OptimResult result;
    PhaseSpaceGrid p_min;
};

/// Grid-path solve_c; purity is taken from the grid. uncertainty_product comes
/// from the moments of the solution density.
GridSolve solve_c(const PhaseSpaceGrid& w, const SolverConfig& cfg = {});

/// Grid-path two-multiplier solve about the given center.
GridSolve solve_cd(const PhaseSpaceGrid& w, Center center, double x_max,
                   const SolverConfig& cfg = {});

double quantumness(const PhaseSpaceGrid& w);

}  // namespace optprob
