#pragma once

#include "cpbnr/model.hpp"
#include "cpbnr/state.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace cpbnr {

// Brute-force reference: the full (non-Hermitian) Hamiltonian matrix over the
// truncated product basis, with no block decomposition and no gauge tricks.
// Exists to cross-check the block solver, not for production runs.
struct DenseHamiltonian {
    int dim = 0;
    Eigen::MatrixXcd entries;
    std::vector<std::pair<int, int>> basis;  // (qubit level, Fock n)
};

// Basis order: |1,0> .. |1,n_max>, then |0,0> .. |0,n_max+1>.
// Diagonals carry the Kerr shift chi*n*(n-1) and the loss terms
// -i(kappa + n delta)/2 (excited) and -i n delta/2 (ground); the only
// off-diagonal entries are <0,n+1|H|1,n> = <1,n|H|0,n+1> = lambda sqrt(n+1).
DenseHamiltonian assemble(const SystemParams& p, const ModulationLaw& law, double t, int n_max);

inline constexpr int kOracleMaxFock = 64;  // O(dim^3) per step; validation only

// Steps psi(t+dt) = exp(-i H(t+dt/2) dt) psi(t) over `steps` uniform steps
// (midpoint-exponential rule, second order in dt; exact for constant
// coefficients up to matrix-exponential accuracy).
// Throws std::invalid_argument for inconsistent inputs, n_max > kOracleMaxFock,
// or steps < 1 with t_end > 0.
AmplitudeState propagate_dense(const AmplitudeState& s0, const SystemParams& p,
                               const ModulationLaw& law, double t_end, int steps);

} // namespace cpbnr
