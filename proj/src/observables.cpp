#include "cpbnr/observables.hpp"

#include <cmath>

namespace cpbnr {

namespace {

double xlnx(double x) {
    return x > 0.0 ? x * std::log(x) : 0.0;
}

} // namespace

EntropyInputs entropy_inputs(const AmplitudeState& s) {
    EntropyInputs in;
    for (int n = 0; n <= s.n_max; ++n) {
        in.cc += std::norm(s.c1[n]);
        in.ss += std::norm(s.c0[n + 1]);
    }
    for (int n = 0; n + 1 <= s.n_max; ++n)
        in.cs += std::conj(s.c1[n + 1]) * s.c0[n + 1];
    return in;
}

double inversion(const AmplitudeState& s) {
    double acc = 0.0;
    for (int n = 0; n <= s.n_max; ++n)
        acc += std::norm(s.c1[n]) - std::norm(s.c0[n + 1]);
    return acc;
}

double entropy_from_inputs(const EntropyInputs& in, double norm2, bool renormalize) {
    double cc = in.cc, ss = in.ss;
    double cs2 = std::norm(in.cs);
    if (renormalize && norm2 > 1e-300) {
        cc /= norm2;
        ss /= norm2;
        cs2 /= norm2 * norm2;
    }
    const double disc = std::sqrt((cc - ss) * (cc - ss) + 4.0 * cs2);
    const double pp = 0.5 * ((cc + ss) + disc);
    const double pm = 0.5 * ((cc + ss) - disc);
    return -(xlnx(pp) + xlnx(pm));
}

double entropy(const AmplitudeState& s, bool renormalize) {
    return entropy_from_inputs(entropy_inputs(s), norm_squared(s), renormalize);
}

double mean_excitation(const AmplitudeState& s) {
    const double norm2 = norm_squared(s);
    if (norm2 <= 1e-300)
        return 0.0;
    double acc = 0.0;
    for (int n = 0; n <= s.n_max; ++n)
        acc += n * std::norm(s.c1[n]);
    for (int n = 0; n <= s.n_max + 1; ++n)
        acc += n * std::norm(s.c0[n]);
    return acc / norm2;
}

} // namespace cpbnr
