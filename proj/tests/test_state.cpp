#include "cpbnr/state.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpbnr;

TEST_CASE("vacuum initial state") {
    const AmplitudeState s = coherent_init({0.0, 1e-12});
    CHECK(s.n_max == 0);
    REQUIRE(s.dims_consistent());
    CHECK(s.c1[0] == std::complex<double>(1.0, 0.0));
    CHECK(s.c0[0] == std::complex<double>(0.0, 0.0));
    CHECK(s.c0[1] == std::complex<double>(0.0, 0.0));
    CHECK(norm_squared(s) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("coherent amplitudes obey the ladder recurrence") {
    const std::complex<double> alpha(3.0, -1.5);
    const AmplitudeState s = coherent_init({alpha, 1e-12});
    // F_{n+1} sqrt(n+1) = alpha F_n
    for (int n = 0; n + 1 <= s.n_max; ++n) {
        const std::complex<double> lhs = s.c1[n + 1] * std::sqrt(n + 1.0);
        const std::complex<double> rhs = alpha * s.c1[n];
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs) + 1e-300);
    }
    CHECK(std::abs(s.c1[0]) == doctest::Approx(std::exp(-0.5 * std::norm(alpha))).epsilon(1e-13));
}

TEST_CASE("truncation keeps the Poisson tail below tolerance") {
    // mean occupation 25; minimal truncations frozen from exact Poisson sums:
    // tail < 1e-9 at 60, < 1e-12 at 68, < 1e-15 at 74
    CHECK(coherent_init({5.0, 1e-9}).n_max == 60);
    const AmplitudeState s = coherent_init({5.0, 1e-12});
    CHECK(s.n_max == 68);
    CHECK(coherent_init({5.0, 1e-15}).n_max == 74);

    const double norm2 = norm_squared(s);
    CHECK(norm2 >= 1.0 - 1e-12);
    CHECK(norm2 <= 1.0 + 1e-14);

    // peak of the distribution sits at the mean
    CHECK(std::norm(s.c1[25]) > std::norm(s.c1[10]));
    CHECK(std::norm(s.c1[25]) > std::norm(s.c1[40]));
    // |F_25| = |F_24| * 5/sqrt(25)
    CHECK(std::abs(s.c1[25]) == doctest::Approx(std::abs(s.c1[24])).epsilon(1e-12));
}

TEST_CASE("looser tolerance never enlarges the basis") {
    int prev = kMaxFockIndex;
    for (double tol : {1e-15, 1e-12, 1e-9, 1e-6, 1e-3}) {
        const int n = coherent_init({4.0, tol}).n_max;
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("large amplitude hits the hard cap without overflow") {
    const AmplitudeState s = coherent_init({64.0, 1e-12});  // mean 4096
    CHECK(s.n_max == kMaxFockIndex);
    for (const auto& z : s.c1)
        CHECK(std::isfinite(std::abs(z)));
}

TEST_CASE("explicit truncation keeps raw amplitudes") {
    const AmplitudeState s = coherent_truncated(1.0, 12);
    CHECK(s.n_max == 12);
    REQUIRE(s.dims_consistent());
    // dropped Poisson(1) weight beyond n = 12 is ~6.4e-11
    CHECK(norm_squared(s) == doctest::Approx(1.0 - 6.36e-11).epsilon(1e-13));
    CHECK(std::abs(s.c1[0]) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(coherent_init({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(coherent_init({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(coherent_init({1.0, -1e-9}), std::invalid_argument);
    CHECK_THROWS_AS(coherent_truncated(1.0, -1), std::invalid_argument);
    CHECK_THROWS_AS(coherent_truncated(1.0, kMaxFockIndex + 1), std::invalid_argument);
}
