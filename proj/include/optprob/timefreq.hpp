#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "optprob/grid.hpp"

namespace optprob {

/// Uniformly sampled complex time series. The record is padded with zeros to a
/// power-of-two length of at least 16 before any transform.
struct SignalRecord {
    std::vector<std::complex<double>> samples;
    double sample_rate = 1.0;  // Hz
    bool analytic = false;
    double t_start = 0.0;      // time of samples[0]

    double dt() const { return 1.0 / sample_rate; }
};

/// Throws std::invalid_argument on empty/non-finite input or sample_rate <= 0.
void validate(const SignalRecord& s);

/// Copy padded with trailing zeros to the next power of two (minimum 16).
SignalRecord pad_to_pow2(const SignalRecord& s);

/// Analytic signal of the record's real part: negative-frequency bins zeroed,
/// positive bins doubled, DC and Nyquist kept. Any imaginary input component
/// is discarded (raw measurements are real).
SignalRecord to_analytic(const SignalRecord& s);

/// Discrete Wigner-Ville distribution on a (t, omega) grid:
///   W[n, k] = (dt/pi) Re sum_l s[n+l] conj(s[n-l]) e^{-2 pi i k l / M},
/// omega_k = pi k / (M dt). The time marginal reproduces |s(t)|^2 exactly and
/// the frequency marginal reproduces |s_hat(omega)|^2 (unitary convention) up
/// to discretization. Non-analytic input is made analytic first.
PhaseSpaceGrid wigner_ville(const SignalRecord& s);

/// Squared windowed transform (1/(2 pi)) |(psi_{b,t,omega}, s)|^2 on the same
/// (t, omega) axes as wigner_ville; equals the Wigner-Ville grid smeared with
/// the minimum-uncertainty Gaussian of width b. Nonnegative.
PhaseSpaceGrid spectrogram(const SignalRecord& s, double b);

/// Squared instantaneous bandwidth from the signal amplitude alone:
/// (1/2) ((A'/A)^2 - A''/A) by central differences at an interior index.
/// Throws on boundary indices or nonpositive amplitude at the point.
double bandwidth_from_amplitude(std::span<const double> amplitude, double dt, int index);

/// Conditional variance of omega at the given time index under a nonnegative
/// density grid. Throws when the column carries no mass.
double positive_bandwidth(const PhaseSpaceGrid& p, int t_index);

/// sigma2 weight for sampled-signal grids: discrete records are not
/// unit-purity states, so the deviation is normalized by the grid's actual
/// 2 pi int W^2 instead. Returns int (P - W)^2 / int W^2.
double signal_sigma2(const PhaseSpaceGrid& p, const PhaseSpaceGrid& w);

/// Signal file, CSV: line 1 is the sample rate; each following line one
/// complex sample as re,im. Line-numbered errors.
SignalRecord read_signal_csv(std::istream& in);
SignalRecord read_signal_csv_file(const std::string& path);
void write_signal_csv(std::ostream& out, const SignalRecord& s);

}  // namespace optprob
