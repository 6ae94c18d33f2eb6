#include "optprob/timefreq.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace optprob {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using cvec = std::vector<std::complex<double>>;

// One cached FFTW plan per transform length; executed on caller buffers via
// the new-array interface. Single-threaded use only.
class Fft {
  public:
    static void forward(cvec& data) { instance().run(data, FFTW_FORWARD); }
    static void inverse(cvec& data) {
        instance().run(data, FFTW_BACKWARD);
        double scale = 1.0 / data.size();
        for (auto& v : data) v *= scale;
    }

  private:
    static Fft& instance() {
        static Fft f;
        return f;
    }
    ~Fft() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }
    void run(cvec& data, int sign) {
        auto key = std::make_pair(data.size(), sign);
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            cvec scratch(data.size());
            auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
            fftw_plan plan =
                fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
            it = plans_.emplace(key, plan).first;
        }
        auto* buf = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(it->second, buf, buf);
    }
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};


}  // namespace

void validate(const SignalRecord& s) {
    if (s.samples.empty()) throw std::invalid_argument("SignalRecord: empty sample array");
    if (!(s.sample_rate > 0.0))
        throw std::invalid_argument("SignalRecord: sample_rate must be positive");
    for (const auto& v : s.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("SignalRecord: non-finite sample");
}

SignalRecord pad_to_pow2(const SignalRecord& s) {
    validate(s);
    std::size_t n = 16;
    while (n < s.samples.size()) n <<= 1;
    SignalRecord out = s;
    out.samples.resize(n, {0.0, 0.0});
    return out;
}

SignalRecord to_analytic(const SignalRecord& s) {
    SignalRecord out = pad_to_pow2(s);
    const std::size_t m = out.samples.size();
    // one-sided construction applies to the real measurement
    for (auto& v : out.samples) v = {v.real(), 0.0};
    Fft::forward(out.samples);
    for (std::size_t k = 1; k < m / 2; ++k) out.samples[k] *= 2.0;
    for (std::size_t k = m / 2 + 1; k < m; ++k) out.samples[k] = 0.0;
    Fft::inverse(out.samples);
    out.analytic = true;
    return out;
}

PhaseSpaceGrid wigner_ville(const SignalRecord& input) {
    SignalRecord s = input.analytic ? pad_to_pow2(input) : to_analytic(input);
    const int m = static_cast<int>(s.samples.size());
    const double dt = s.dt();
    const double domega = kPi / (m * dt);

    PhaseSpaceGrid g;
    g.n_q = m;
    g.n_p = m;
    g.q_min = s.t_start - 0.5 * dt;
    g.q_max = g.q_min + m * dt;
    g.p_min = -0.5 * domega;
    g.p_max = g.p_min + m * domega;
    g.values.assign(static_cast<std::size_t>(m) * m, 0.0);

    cvec lag(m);
    for (int n = 0; n < m; ++n) {
        std::fill(lag.begin(), lag.end(), std::complex<double>{0.0, 0.0});
        int lmax = std::min(n, m - 1 - n);
        for (int l = -lmax; l <= lmax; ++l)
            lag[(l + m) % m] = s.samples[n + l] * std::conj(s.samples[n - l]);
        Fft::forward(lag);
        for (int k = 0; k < m; ++k) g.at(n, k) = lag[k].real() * dt / kPi;
    }
    return g;
}

PhaseSpaceGrid spectrogram(const SignalRecord& input, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("spectrogram: b must be positive");
    SignalRecord s = input.analytic ? pad_to_pow2(input) : to_analytic(input);
    const int m = static_cast<int>(s.samples.size());
    const double dt = s.dt();
    const double domega = kPi / (m * dt);

    PhaseSpaceGrid g;
    g.n_q = m;
    g.n_p = m;
    g.q_min = s.t_start - 0.5 * dt;
    g.q_max = g.q_min + m * dt;
    g.p_min = -0.5 * domega;
    g.p_max = g.p_min + m * domega;
    g.values.assign(static_cast<std::size_t>(m) * m, 0.0);

    const double norm = 1.0 / (std::pow(2.0 * kPi, 0.25) * std::sqrt(b));
    cvec windowed(2 * m);
    for (int n = 0; n < m; ++n) {
        std::fill(windowed.begin(), windowed.end(), std::complex<double>{0.0, 0.0});
        for (int k = 0; k < m; ++k) {
            double tau = (k - n) * dt;
            windowed[k] = s.samples[k] * (norm * std::exp(-tau * tau / (4.0 * b * b)) * dt);
        }
        // zero-padded FFT of length 2m gives the half-band frequency step
        // pi/(m dt); the t_start phase drops out of the modulus.
        Fft::forward(windowed);
        for (int k = 0; k < m; ++k) {
            double a = std::abs(windowed[k]);
            g.at(n, k) = a * a / (2.0 * kPi);
        }
    }
    return g;
}

double bandwidth_from_amplitude(std::span<const double> amplitude, double dt, int index) {
    if (!(dt > 0.0)) throw std::invalid_argument("bandwidth_from_amplitude: dt must be positive");
    if (index < 1 || index + 1 >= static_cast<int>(amplitude.size()))
        throw std::invalid_argument("bandwidth_from_amplitude: index must be interior");
    double a = amplitude[index];
    if (!(a > 0.0))
        throw std::invalid_argument("bandwidth_from_amplitude: amplitude must be positive "
                                    "at the evaluation point");
    double da = (amplitude[index + 1] - amplitude[index - 1]) / (2.0 * dt);
    double dda = (amplitude[index + 1] - 2.0 * a + amplitude[index - 1]) / (dt * dt);
    double r = da / a;
    return 0.5 * (r * r - dda / a);
}

double positive_bandwidth(const PhaseSpaceGrid& p, int t_index) {
    if (t_index < 0 || t_index >= p.n_q)
        throw std::invalid_argument("positive_bandwidth: time index out of range");
    double scale = *std::max_element(p.values.begin(), p.values.end());
    double mass = 0.0, first = 0.0;
    for (int k = 0; k < p.n_p; ++k) {
        double v = p.at(t_index, k);
        if (v < -1e-12 * std::max(1.0, scale))
            throw std::invalid_argument("positive_bandwidth: density has negative values");
        v = std::max(v, 0.0);
        mass += v;
        first += v * p.p_center(k);
    }
    if (!(mass > 0.0)) throw std::invalid_argument("positive_bandwidth: zero column mass");
    double mean = first / mass;
    double second = 0.0;
    for (int k = 0; k < p.n_p; ++k) {
        double v = std::max(p.at(t_index, k), 0.0);
        double d = p.p_center(k) - mean;
        second += v * d * d;
    }
    return second / mass;
}

double signal_sigma2(const PhaseSpaceGrid& p, const PhaseSpaceGrid& w) {
    if (!p.same_domain(w)) throw std::invalid_argument("signal_sigma2: grid domains differ");
    double dev = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        double d = p.values[k] - w.values[k];
        dev += d * d;
        norm += w.values[k] * w.values[k];
    }
    if (!(norm > 0.0)) throw std::invalid_argument("signal_sigma2: reference grid is zero");
    return dev / norm;
}

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

double parse_num(const std::string& s, int line, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) fail(line, std::string("trailing characters after ") + what);
        if (!std::isfinite(v)) fail(line, std::string(what) + " is not finite");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line, std::string("cannot parse ") + what + " from '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(line, std::string(what) + " out of range");
    }
}

}  // namespace

SignalRecord read_signal_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(1, "missing sample-rate header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    SignalRecord s;
    s.sample_rate = parse_num(line, 1, "sample_rate");
    if (!(s.sample_rate > 0.0)) fail(1, "sample_rate must be positive");

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) fail(lineno, "expected re,im");
        double re = parse_num(line.substr(0, comma), lineno, "re");
        double im = parse_num(line.substr(comma + 1), lineno, "im");
        s.samples.emplace_back(re, im);
    }
    if (s.samples.empty()) fail(lineno + 1, "no samples");
    return s;
}

SignalRecord read_signal_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open signal file: " + path);
    return read_signal_csv(in);
}

void write_signal_csv(std::ostream& out, const SignalRecord& s) {
    validate(s);
    char buf[90];
    std::snprintf(buf, sizeof buf, "%.17g\n", s.sample_rate);
    out << buf;
    for (const auto& v : s.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.real(), v.imag());
        out << buf;
    }
}

}  // namespace optprob
