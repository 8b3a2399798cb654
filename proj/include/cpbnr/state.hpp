#pragma once

#include <complex>
#include <vector>

namespace cpbnr {

// Joint qubit+resonator amplitudes in the product Fock basis.
// c1[n] = C_{1,n} for n = 0..n_max, c0[n] = C_{0,n} for n = 0..n_max+1.
// The interaction couples C_{1,n} only to C_{0,n+1}; C_{0,0} is decoupled.
struct AmplitudeState {
    std::vector<std::complex<double>> c1;
    std::vector<std::complex<double>> c0;
    int n_max = 0;
    double t = 0.0;  // units of 1/lambda0

    bool dims_consistent() const {
        return n_max >= 0 &&
               c1.size() == static_cast<size_t>(n_max) + 1 &&
               c0.size() == static_cast<size_t>(n_max) + 2;
    }
};

// Coherent resonator state |alpha> with the qubit excited.
struct CoherentSpec {
    std::complex<double> alpha = 0.0;
    double tail_tolerance = 1e-12;  // discarded Poisson weight
};

// Hard truncation ceiling; bounds memory regardless of tail_tolerance.
inline constexpr int kMaxFockIndex = 4096;

// Builds C_{1,n}(0) = F_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), C_{0,n}(0) = 0.
// n_max is the smallest index with sum_{n>n_max} |F_n|^2 < tail_tolerance,
// capped at kMaxFockIndex.  Amplitudes are evaluated through log-factorials so
// no intermediate over- or underflows for any representable alpha.
// Throws std::invalid_argument unless 0 < tail_tolerance < 1.
AmplitudeState coherent_init(const CoherentSpec& spec);

// Same initial state truncated at a caller-chosen n_max (amplitudes beyond it
// are dropped, not renormalized, so the norm is 1 minus the discarded tail).
AmplitudeState coherent_truncated(std::complex<double> alpha, int n_max);

// Sum of |c1|^2 and |c0|^2 over all stored amplitudes.
double norm_squared(const AmplitudeState& s);

} // namespace cpbnr
