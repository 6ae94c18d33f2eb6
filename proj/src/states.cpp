#include "optprob/states.hpp"

#include <boost/math/special_functions/hermite.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <stdexcept>

namespace optprob {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void validate(const StateSpec& s) {
    if (s.n < 0) throw std::invalid_argument("StateSpec: n must be >= 0");
    if (!(s.purity > 0.0) || s.purity > 1.0)
        throw std::invalid_argument("StateSpec: purity must lie in (0, 1]");
}

RadialProfile wigner_radial(const StateSpec& state) {
    validate(state);
    const int n = state.n;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    RadialProfile out;
    out.f = [n, sign](double x) {
        return sign / kPi * std::exp(-x) * boost::math::laguerre(static_cast<unsigned>(n), 2.0 * x);
    };
    return out;
}

RadialProfile husimi_radial(const StateSpec& state, const HusimiParams& params) {
    validate(state);
    if (std::abs(params.b2() - 0.5) > 1e-9)
        throw std::invalid_argument(
            "husimi_radial: only b^2 = 1/2 yields a rotationally symmetric smearing; "
            "use optprob::smear on a rasterized grid for other widths");
    const int n = state.n;
    double fact = std::tgamma(n + 1.0);
    RadialProfile out;
    out.f = [n, fact](double x) {
        return std::pow(0.5 * x, n) * std::exp(-0.5 * x) / (2.0 * kPi * fact);
    };
    return out;
}

double position_density(const StateSpec& state, double q) {
    validate(state);
    const int n = state.n;
    double u = q - state.q_cl;
    double h = boost::math::hermite(static_cast<unsigned>(n), u);
    double norm = std::ldexp(1.0, n) * std::tgamma(n + 1.0) * std::sqrt(kPi);
    return h * h * std::exp(-u * u) / norm;
}

std::pair<double, double> smeared_variances(const StateSpec& state, const HusimiParams& params) {
    validate(state);
    if (!(params.b > 0.0)) throw std::invalid_argument("HusimiParams: b must be positive");
    double quantum = state.n + 0.5;
    double b2 = params.b2();
    return {quantum + b2, quantum + 0.25 / b2};
}

}  // namespace optprob
