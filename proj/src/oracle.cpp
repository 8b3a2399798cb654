#include "cpbnr/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

namespace cpbnr {

namespace {

using cplx = std::complex<double>;

} // namespace

DenseHamiltonian assemble(const SystemParams& p, const ModulationLaw& law, double t, int n_max) {
    if (n_max < 0)
        throw std::invalid_argument("assemble: n_max must be non-negative");
    const CoefficientSet c = eval_coefficients(p, law, t);

    DenseHamiltonian H;
    H.dim = 2 * (n_max + 1) + 1;
    H.entries = Eigen::MatrixXcd::Zero(H.dim, H.dim);
    H.basis.reserve(H.dim);
    for (int n = 0; n <= n_max; ++n) H.basis.emplace_back(1, n);
    for (int n = 0; n <= n_max + 1; ++n) H.basis.emplace_back(0, n);

    const cplx half_i(0.0, 0.5);
    auto kerr = [&](int n) { return c.chi * n * (n - 1.0); };
    for (int n = 0; n <= n_max; ++n) {
        H.entries(n, n) = n * c.omega + 0.5 * c.omega_c + kerr(n)
                          - half_i * (c.kappa + n * c.delta);
    }
    const int g0 = n_max + 1;  // column/row offset of the ground manifold
    for (int n = 0; n <= n_max + 1; ++n) {
        H.entries(g0 + n, g0 + n) = n * c.omega - 0.5 * c.omega_c + kerr(n)
                                    - half_i * (n * c.delta);
    }
    for (int n = 0; n <= n_max; ++n) {
        const double g = c.lambda * std::sqrt(n + 1.0);
        H.entries(n, g0 + n + 1) = g;
        H.entries(g0 + n + 1, n) = g;
    }
    return H;
}

AmplitudeState propagate_dense(const AmplitudeState& s0, const SystemParams& p,
                               const ModulationLaw& law, double t_end, int steps) {
    p.validate();
    if (!s0.dims_consistent())
        throw std::invalid_argument("propagate_dense: amplitude arrays inconsistent with n_max");
    if (s0.n_max > kOracleMaxFock)
        throw std::invalid_argument("propagate_dense: n_max exceeds the oracle cap");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("propagate_dense: t_end must be finite and non-negative");
    if (t_end == 0.0)
        return s0;
    if (steps < 1)
        throw std::invalid_argument("propagate_dense: steps must be >= 1");

    const int nb = s0.n_max + 1;
    const int dim = 2 * nb + 1;
    Eigen::VectorXcd psi(dim);
    for (int n = 0; n < nb; ++n) psi(n) = s0.c1[n];
    for (int n = 0; n <= nb; ++n) psi(nb + n) = s0.c0[n];

    const double dt = t_end / steps;
    const cplx mi_dt(0.0, -dt);
    const bool frozen = (law.kind == LawKind::Constant);
    Eigen::MatrixXcd U;
    if (frozen)
        U = (mi_dt * assemble(p, law, 0.0, s0.n_max).entries).exp();
    for (int k = 0; k < steps; ++k) {
        if (!frozen) {
            const double tm = (k + 0.5) * dt;
            U = (mi_dt * assemble(p, law, tm, s0.n_max).entries).exp();
        }
        psi = U * psi;
    }

    AmplitudeState out;
    out.n_max = s0.n_max;
    out.t = t_end;
    out.c1.resize(nb);
    out.c0.resize(nb + 1);
    for (int n = 0; n < nb; ++n) out.c1[n] = psi(n);
    for (int n = 0; n <= nb; ++n) out.c0[n] = psi(nb + n);
    return out;
}

} // namespace cpbnr
