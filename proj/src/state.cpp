#include "cpbnr/state.hpp"

#include <cmath>
#include <stdexcept>

namespace cpbnr {

namespace {

// F_n through logs: ln|F_n| = -|a|^2/2 + n ln|a| - lgamma(n+1)/2, phase n*arg(a).
std::complex<double> coherent_coeff(std::complex<double> alpha, int n) {
    const double mod = std::abs(alpha);
    if (mod == 0.0)
        return n == 0 ? 1.0 : 0.0;
    const double logmag = -0.5 * mod * mod + n * std::log(mod) - 0.5 * std::lgamma(n + 1.0);
    return std::polar(std::exp(logmag), n * std::arg(alpha));
}

} // namespace

AmplitudeState coherent_init(const CoherentSpec& spec) {
    if (!(spec.tail_tolerance > 0.0) || !(spec.tail_tolerance < 1.0))
        throw std::invalid_argument("coherent_init: tail_tolerance must lie in (0, 1)");

    // Walk the Poisson weights until the remaining tail drops below tolerance.
    const double nbar = std::norm(spec.alpha);
    int n_max = 0;
    double cum = std::exp(-nbar);
    double term = cum;
    while (1.0 - cum >= spec.tail_tolerance && n_max < kMaxFockIndex) {
        ++n_max;
        term *= nbar / n_max;
        cum += term;
    }
    return coherent_truncated(spec.alpha, n_max);
}

AmplitudeState coherent_truncated(std::complex<double> alpha, int n_max) {
    if (n_max < 0 || n_max > kMaxFockIndex)
        throw std::invalid_argument("coherent_truncated: n_max out of range");
    AmplitudeState s;
    s.n_max = n_max;
    s.c1.resize(n_max + 1);
    s.c0.assign(n_max + 2, 0.0);
    for (int n = 0; n <= n_max; ++n)
        s.c1[n] = coherent_coeff(alpha, n);
    return s;
}

double norm_squared(const AmplitudeState& s) {
    double acc = 0.0;
    for (const auto& z : s.c1) acc += std::norm(z);
    for (const auto& z : s.c0) acc += std::norm(z);
    return acc;
}

} // namespace cpbnr
