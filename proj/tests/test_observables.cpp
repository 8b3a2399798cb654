#include "cpbnr/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cpbnr;

namespace {

AmplitudeState random_state(std::mt19937& rng, int n_max) {
    std::normal_distribution<double> g(0.0, 1.0);
    AmplitudeState s;
    s.n_max = n_max;
    s.c1.resize(n_max + 1);
    s.c0.resize(n_max + 2);
    for (auto& z : s.c1) z = {g(rng), g(rng)};
    for (auto& z : s.c0) z = {g(rng), g(rng)};
    const double scale = 1.0 / std::sqrt(norm_squared(s));
    for (auto& z : s.c1) z *= scale;
    for (auto& z : s.c0) z *= scale;
    return s;
}

} // namespace

TEST_CASE("initial coherent state observables") {
    const AmplitudeState s = coherent_init({5.0, 1e-12});
    CHECK(inversion(s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy(s, false) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mean_excitation(s) == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("balanced single-block superposition") {
    AmplitudeState s;
    s.n_max = 1;
    s.c1.assign(2, 0.0);
    s.c0.assign(3, 0.0);
    s.c1[0] = 1.0 / std::sqrt(2.0);
    s.c0[1] = 1.0 / std::sqrt(2.0);
    CHECK(inversion(s) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(norm_squared(s) == doctest::Approx(1.0).epsilon(1e-15));
    // no cross terms between the two manifolds at the same n, so cs picks
    // up nothing: S = -(1/2 ln 1/2)*2 = ln 2
    CHECK(entropy(s, false) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("entropy from explicit bilinears") {
    CHECK(entropy_from_inputs({0.5, 0.5, 0.0}, 1.0, false) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(entropy_from_inputs({1.0, 0.0, 0.0}, 1.0, false) == 0.0);
    CHECK(entropy_from_inputs({0.0, 0.0, 0.0}, 0.0, false) == 0.0);
    CHECK(entropy_from_inputs({0.0, 0.0, 0.0}, 0.0, true) == 0.0);
    // maximal cross term makes the state pure again
    const double s = entropy_from_inputs({0.5, 0.5, 0.5}, 1.0, false);
    CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("entropy eigenvalues stay consistent with the bilinears") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        // physical bilinears: cc + ss = norm^2 <= 1
        const double cc = u(rng), ss = (1.0 - cc) * u(rng);
        const double mag = std::sqrt(cc * ss) * u(rng);  // keeps the matrix positive
        const double ph = 6.28 * u(rng);
        const EntropyInputs in{cc, ss, std::polar(mag, ph)};
        const double disc = std::sqrt((cc - ss) * (cc - ss) + 4.0 * mag * mag);
        const double pp = 0.5 * (cc + ss + disc);
        const double pm = 0.5 * (cc + ss - disc);
        // trace and determinant of the reduced matrix
        CHECK(pp + pm == doctest::Approx(cc + ss).epsilon(1e-12));
        CHECK(pp * pm == doctest::Approx(cc * ss - mag * mag).epsilon(2e-10));
        CHECK(pm >= -1e-12);
        const double s = entropy_from_inputs(in, 1.0, false);
        CHECK(std::isfinite(s));
        CHECK(s >= -1e-12);
    }
}

TEST_CASE("entropy is invariant under a global phase") {
    std::mt19937 rng(7);
    AmplitudeState s = random_state(rng, 12);
    const double ref = entropy(s, false);
    const std::complex<double> ph = std::polar(1.0, 1.234);
    for (auto& z : s.c1) z *= ph;
    for (auto& z : s.c0) z *= ph;
    CHECK(entropy(s, false) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("renormalized entropy of a unit-norm state matches the raw one") {
    std::mt19937 rng(11);
    const AmplitudeState s = random_state(rng, 20);
    CHECK(entropy(s, true) == doctest::Approx(entropy(s, false)).epsilon(1e-9));
}

TEST_CASE("renormalization conditions away the lost norm") {
    // half the population decayed uniformly: raw sums shrink, the
    // conditioned qubit state is unchanged
    EntropyInputs in{0.3, 0.2, std::complex<double>(0.05, 0.02)};
    const double full = entropy_from_inputs(in, 1.0, true);
    EntropyInputs damped{in.cc * 0.5, in.ss * 0.5, in.cs * 0.5};
    CHECK(entropy_from_inputs(damped, 0.5, true) == doctest::Approx(full).epsilon(1e-12));
    CHECK(entropy_from_inputs(damped, 0.5, false) != doctest::Approx(full).epsilon(1e-3));
}

TEST_CASE("mean excitation counts both manifolds") {
    AmplitudeState s;
    s.n_max = 2;
    s.c1.assign(3, 0.0);
    s.c0.assign(4, 0.0);
    s.c1[2] = std::sqrt(0.5);  // n = 2 with qubit excited
    s.c0[3] = std::sqrt(0.5);  // n = 3 with qubit down
    CHECK(mean_excitation(s) == doctest::Approx(2.5).epsilon(1e-14));

    AmplitudeState zero;
    zero.n_max = 0;
    zero.c1.assign(1, 0.0);
    zero.c0.assign(2, 0.0);
    CHECK(mean_excitation(zero) == 0.0);
}

TEST_CASE("inversion ignores the decoupled ground amplitude") {
    AmplitudeState s;
    s.n_max = 0;
    s.c1.assign(1, 0.0);
    s.c0.assign(2, 0.0);
    s.c0[0] = 1.0;  // |0,0> only
    CHECK(inversion(s) == 0.0);
    CHECK(norm_squared(s) == 1.0);
    CHECK(mean_excitation(s) == 0.0);
}
