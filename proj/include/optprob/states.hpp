#pragma once

#include <utility>

#include "optprob/radial.hpp"

namespace optprob {

/// A displaced oscillator eigenstate: the n-th excited state carried along the
/// classical trajectory, centered at (q_cl, p_cl) in phase space. Dimensionless
/// units, hbar = 1. Pure closed-form states have purity 1; the purity field is
/// only consumed as the 1/Tr(rho^2) weight of the deviation functional.
struct StateSpec {
    int n = 0;
    double q_cl = 0.0;
    double p_cl = 0.0;
    double purity = 1.0;
};

/// Width of the Gaussian smearing that turns W into a positive distribution.
/// b^2 = 1/2 gives the Husimi Q function.
struct HusimiParams {
    double b = 0.7071067811865476;  // 1/sqrt(2)
    double b2() const { return b * b; }
};

void validate(const StateSpec& s);

/// Wigner function of the state as a radial profile W_n(x),
/// x = (q - q_cl)^2 + (p - p_cl)^2. Normalized: pi * int W_n = 1.
/// n = 0: (1/pi) exp(-x); n = 1: (2/pi)(x - 1/2) exp(-x);
/// n = 2: (2/pi)((x - 1)^2 - 1/2) exp(-x); general n via Laguerre polynomials.
RadialProfile wigner_radial(const StateSpec& state);

/// Husimi function Q_n(x) = (1/(2 pi)) (x/2)^n exp(-x/2) / n!, nonnegative.
/// Only the isotropic smearing b^2 = 1/2 reduces to a radial profile; other b
/// produce an anisotropic result and are rejected here (smear a grid instead).
RadialProfile husimi_radial(const StateSpec& state, const HusimiParams& params = {});

/// Exact position probability density |<q|psi>|^2 at q.
double position_density(const StateSpec& state, double q);

/// Variances of the b-smeared distribution: ((dq)^2 + b^2, (dp)^2 + 1/(4 b^2))
/// where (dq)^2 = (dp)^2 = n + 1/2 are the exact quantum dispersions.
std::pair<double, double> smeared_variances(const StateSpec& state, const HusimiParams& params);

}  // namespace optprob
