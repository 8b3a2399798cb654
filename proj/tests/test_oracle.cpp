#include "cpbnr/oracle.hpp"

#include "cpbnr/dynamics.hpp"
#include "cpbnr/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace cpbnr;

namespace {

SystemParams small_system() {
    SystemParams p;
    p.omega0 = 20.0;
    p.omega_c = 20.0;
    p.chi0 = 0.2;
    p.kappa = 0.005;
    p.delta = 0.002;
    p.epsilon = 0.001;
    p.tau = 0.5;
    p.omega_prime = 1.0;
    return p;
}

double max_amplitude_gap(const AmplitudeState& a, const AmplitudeState& b) {
    double worst = 0.0;
    for (size_t n = 0; n < a.c1.size(); ++n) worst = std::max(worst, std::abs(a.c1[n] - b.c1[n]));
    for (size_t n = 0; n < a.c0.size(); ++n) worst = std::max(worst, std::abs(a.c0[n] - b.c0[n]));
    return worst;
}

} // namespace

TEST_CASE("dense matrix layout and entries") {
    SystemParams p = small_system();
    p.kappa = 0.0;
    p.delta = 0.0;
    const DenseHamiltonian H = assemble(p, ModulationLaw::constant(), 0.0, 2);

    REQUIRE(H.dim == 7);
    REQUIRE(H.entries.rows() == 7);
    REQUIRE(H.basis.size() == 7);
    CHECK(H.basis[0] == std::pair<int, int>(1, 0));
    CHECK(H.basis[2] == std::pair<int, int>(1, 2));
    CHECK(H.basis[3] == std::pair<int, int>(0, 0));
    CHECK(H.basis[6] == std::pair<int, int>(0, 3));

    // Excited diagonal: n omega + omega_c/2 + chi n(n-1)
    CHECK(H.entries(0, 0).real() == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(H.entries(2, 2).real() == doctest::Approx(2 * 20.0 + 10.0 + 0.2 * 2).epsilon(1e-14));
    // Ground diagonal: n omega - omega_c/2 + chi n(n-1)
    CHECK(H.entries(3, 3).real() == doctest::Approx(-10.0).epsilon(1e-14));
    CHECK(H.entries(6, 6).real() == doctest::Approx(3 * 20.0 - 10.0 + 0.2 * 6).epsilon(1e-14));
    // Exchange coupling lambda sqrt(n+1) between |1,n> and |0,n+1>
    CHECK(H.entries(0, 4).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(H.entries(2, 6).real() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(H.entries(4, 0) == H.entries(0, 4));
    // |0,0> couples to nothing
    CHECK(H.entries.row(3).cwiseAbs().sum() == doctest::Approx(10.0).epsilon(1e-14));

    // Lossless: exactly Hermitian
    CHECK((H.entries - H.entries.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense loss terms sit on the imaginary diagonal") {
    const SystemParams p = small_system();
    const DenseHamiltonian H = assemble(p, ModulationLaw::constant(), 0.0, 2);
    CHECK(H.entries(0, 0).imag() == doctest::Approx(-0.5 * 0.005).epsilon(1e-14));
    CHECK(H.entries(2, 2).imag() == doctest::Approx(-0.5 * (0.005 + 2 * 0.002)).epsilon(1e-14));
    CHECK(H.entries(3, 3).imag() == 0.0);
    CHECK(H.entries(6, 6).imag() == doctest::Approx(-0.5 * 3 * 0.002).epsilon(1e-14));
}

TEST_CASE("zero horizon returns the input state") {
    const AmplitudeState s0 = coherent_truncated({1.0, 0.0}, 6);
    const AmplitudeState s = propagate_dense(s0, small_system(), ModulationLaw::sinusoidal(0.5, 1.0), 0.0, 100);
    CHECK(max_amplitude_gap(s0, s) == 0.0);
}

TEST_CASE("dense propagation reproduces the vacuum Rabi flop") {
    SystemParams p = small_system();
    p.chi0 = 0.0;
    p.kappa = 0.0;
    p.delta = 0.0;
    p.tau = 0.0;
    p.omega_prime = 0.0;
    p.epsilon = 0.0;
    const AmplitudeState s0 = coherent_truncated({0.0, 0.0}, 0);
    // Constant law: one exponential is exact
    const AmplitudeState s = propagate_dense(s0, p, ModulationLaw::constant(), 1.3, 1);
    const std::complex<double> phase = std::polar(1.0, -0.5 * 20.0 * 1.3);
    CHECK(std::abs(s.c1[0] - phase * std::cos(1.3)) < 1e-12);
    CHECK(std::abs(s.c0[1] - phase * std::complex<double>(0.0, -std::sin(1.3))) < 1e-12);
}

TEST_CASE("lossless dense propagation is unitary") {
    SystemParams p = small_system();
    p.kappa = 0.0;
    p.delta = 0.0;
    const AmplitudeState s0 = coherent_truncated({1.0, 0.0}, 8);
    const AmplitudeState s =
        propagate_dense(s0, p, ModulationLaw::sinusoidal(0.5, 1.0), 2.0, 400);
    CHECK(std::abs(norm_squared(s) - norm_squared(s0)) < 1e-12);
}

TEST_CASE("midpoint stepping converges at second order") {
    const SystemParams p = small_system();
    const ModulationLaw law = ModulationLaw::sinusoidal(0.5, 1.0);
    const AmplitudeState s0 = coherent_truncated({1.0, 0.0}, 8);
    const AmplitudeState s1 = propagate_dense(s0, p, law, 2.0, 50);
    const AmplitudeState s2 = propagate_dense(s0, p, law, 2.0, 100);
    const AmplitudeState s4 = propagate_dense(s0, p, law, 2.0, 200);
    const double d1 = max_amplitude_gap(s1, s2);
    const double d2 = max_amplitude_gap(s2, s4);
    REQUIRE(d2 > 0.0);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("dense route and block route agree on a modulated lossy run") {
    const SystemParams p = small_system();
    const ModulationLaw law = ModulationLaw::sinusoidal(0.5, 1.0);
    const AmplitudeState s0 = coherent_truncated({1.0, 0.0}, 8);

    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    cfg.t_end = 1.0;
    const AmplitudeState blk = propagate_state(s0, p, law, cfg, 1.0);
    const AmplitudeState ref = propagate_dense(s0, p, law, 1.0, 3000);
    CHECK(max_amplitude_gap(blk, ref) < 1e-8);
}

TEST_CASE("dense route input validation") {
    const SystemParams p = small_system();
    const ModulationLaw law = ModulationLaw::constant();
    AmplitudeState s0 = coherent_truncated({1.0, 0.0}, 4);
    CHECK_THROWS_AS(propagate_dense(s0, p, law, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(propagate_dense(s0, p, law, -1.0, 10), std::invalid_argument);
    s0.c0.pop_back();
    CHECK_THROWS_AS(propagate_dense(s0, p, law, 1.0, 10), std::invalid_argument);
    const AmplitudeState big = coherent_truncated({1.0, 0.0}, kOracleMaxFock + 1);
    CHECK_THROWS_AS(propagate_dense(big, p, law, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(assemble(p, law, 0.0, -1), std::invalid_argument);
}
