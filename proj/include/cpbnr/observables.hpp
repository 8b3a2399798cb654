#pragma once

#include "cpbnr/state.hpp"

namespace cpbnr {

// Bilinear sums the reduced qubit density matrix is built from:
//   cc = sum_n |C_{1,n}|^2, ss = sum_n |C_{0,n+1}|^2,
//   cs = sum_n conj(C_{1,n+1}) C_{0,n+1}.
// cs pairs amplitudes from neighbouring excitation blocks, which is why any
// per-block phase factoring must be undone before it is evaluated.
struct EntropyInputs {
    double cc = 0.0;
    double ss = 0.0;
    std::complex<double> cs = 0.0;
};

EntropyInputs entropy_inputs(const AmplitudeState& s);

// Population inversion sum_n (|C_{1,n}|^2 - |C_{0,n+1}|^2); C_{0,0} does not
// participate in the inversion.
double inversion(const AmplitudeState& s);

// Von Neumann entropy of the reduced qubit state,
//   pi_pm = [(cc+ss) +- sqrt((cc-ss)^2 + 4|cs|^2)] / 2,
//   S = -(pi_+ ln pi_+ + pi_- ln pi_-),  with 0 ln 0 = 0.
// Without loss pi_+ + pi_- = 1.  Under loss the raw sums shrink with the
// norm; renormalize = true divides them by norm2 first (skipped when
// norm2 <= 1e-300) so S is the entropy of the conditioned state.
double entropy_from_inputs(const EntropyInputs& in, double norm2, bool renormalize);

double entropy(const AmplitudeState& s, bool renormalize = false);

// Mean resonator occupation sum_n n(|C_{1,n}|^2 + |C_{0,n}|^2) / norm2;
// 0 for a numerically empty state.
double mean_excitation(const AmplitudeState& s);

} // namespace cpbnr
