#pragma once

#include <functional>
#include <vector>

#include "optprob/radial.hpp"

namespace optprob {

struct GridWindow {
    double q_min, q_max, p_min, p_max;
    int n_q, n_p;
};

/// Uniformly sampled real function on a (q, p) rectangle, values at cell
/// centers, row-major in q then p. Immutable by convention once filled.
struct PhaseSpaceGrid {
    double q_min = 0.0, q_max = 0.0, p_min = 0.0, p_max = 0.0;
    int n_q = 0, n_p = 0;
    std::vector<double> values;
    double purity = 1.0;

    double dq() const { return (q_max - q_min) / n_q; }
    double dp() const { return (p_max - p_min) / n_p; }
    double cell_area() const { return dq() * dp(); }
    double q_center(int i) const { return q_min + (i + 0.5) * dq(); }
    double p_center(int j) const { return p_min + (j + 0.5) * dp(); }

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_p + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n_p + j]; }

    bool same_domain(const PhaseSpaceGrid& o) const {
        return q_min == o.q_min && q_max == o.q_max && p_min == o.p_min && p_max == o.p_max &&
               n_q == o.n_q && n_p == o.n_p;
    }

    static PhaseSpaceGrid zeros(const GridWindow& w);
};

/// Throws std::invalid_argument on malformed bounds, counts, or non-finite values.
void validate(const PhaseSpaceGrid& g);

struct Moments {
    double mean_q = 0.0, mean_p = 0.0;
    double var_q = 0.0, var_p = 0.0;
    double uncertainty_product = 0.0;
    /// Set when the grid holds a signed quasi-distribution; second moments are
    /// then reported as-is but have no variance interpretation.
    bool from_signed_density = false;
};

/// Midpoint-rule integral: sum of values times cell area, row-major fixed order.
double integrate(const PhaseSpaceGrid& g);

/// Density over q: out[i] = sum_j values(i,j) * dp. Integrating the output with
/// the 1-D midpoint rule reproduces integrate(g) exactly.
std::vector<double> marginal_q(const PhaseSpaceGrid& g);
std::vector<double> marginal_p(const PhaseSpaceGrid& g);

/// Means and central second moments of the grid treated as a density.
/// Throws std::invalid_argument when integrate(g) <= 0.
Moments moments(const PhaseSpaceGrid& g);

/// Resample on the same window after rotating the function by `angle` about the
/// window center (cubic convolution). Points whose source falls outside the
/// window take `tail`(q, p) when supplied, else 0. Requires a square window.
PhaseSpaceGrid rotate(const PhaseSpaceGrid& g, double angle,
                      const std::function<double(double, double)>& tail = {});

/// Sample f((q - q_cl)^2 + (p - p_cl)^2) at cell centers. Windows with fewer
/// than 8 cells per axis are rejected.
PhaseSpaceGrid rasterize(const RadialProfile& f, double q_cl, double p_cl, const GridWindow& w);

/// Gaussian smearing of the grid with the minimum-uncertainty kernel
/// (1/pi) exp(-(dq)^2 / (2 b^2) - 2 b^2 (dp)^2); b^2 = 1/2 turns a Wigner grid
/// into its Husimi counterpart.
PhaseSpaceGrid smear(const PhaseSpaceGrid& g, double b);

}  // namespace optprob
