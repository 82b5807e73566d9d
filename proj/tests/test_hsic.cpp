#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lsnm/errors.hpp"
#include "lsnm/hsic.hpp"
#include "lsnm/rng.hpp"
#include "oracles.hpp"

using namespace lsnm;

namespace {
std::vector<double> randn(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& a : v) a = rng.gaussian();
    return v;
}
}  // namespace

TEST_CASE("median bandwidth: hand-enumerated cases") {
    CHECK(median_bandwidth({0, 1}) == 1.0);
    CHECK(median_bandwidth({0, 1, 3}) == 2.0);  // pairwise distances {1, 3, 2}
    CHECK(median_bandwidth({0, 0, 1}) == 1.0);  // {0, 1, 1}
}

TEST_CASE("median bandwidth equals full enumeration on random inputs") {
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep) % 40;
        auto u = randn(n, 800 + static_cast<std::uint64_t>(rep));
        CHECK(median_bandwidth(u) ==
              doctest::Approx(oracles::median_pairwise_distance(u)).epsilon(1e-13));
    }
}

TEST_CASE("median bandwidth: homogeneity and degenerate inputs") {
    auto u = randn(25, 4);
    const double b = median_bandwidth(u);
    std::vector<double> scaled(u);
    for (double& a : scaled) a *= 10.0;
    CHECK(median_bandwidth(scaled) == doctest::Approx(10.0 * b).epsilon(1e-12));
    CHECK_THROWS_AS(median_bandwidth({2, 2, 2, 2}), AllIdenticalError);
    // majority ties: median 0 falls back to the smallest nonzero distance
    CHECK(median_bandwidth({0, 0, 0, 0, 0, 0, 0, 0.5}) == 0.5);
}

TEST_CASE("trace form equals the brute-force V-statistic expansion") {
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 6 + static_cast<std::size_t>(rep * 2);
        auto u = randn(n, 20 + static_cast<std::uint64_t>(rep));
        auto v = randn(n, 50 + static_cast<std::uint64_t>(rep));
        for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * u[i] * u[i];
        HsicResult r = hsic_statistic(u, v);
        const double brute =
            oracles::hsic_v_statistic_brute(u, v, r.bandwidth_u, r.bandwidth_v);
        CHECK(std::abs(r.statistic - brute) <= 1e-12);
    }
}

TEST_CASE("dependence scores above an independent shuffle") {
    int wins = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto u = randn(50, 7000 + static_cast<std::uint64_t>(trial));
        const double dependent = hsic_statistic(u, u).statistic;
        std::vector<double> shuffled(u);
        Rng rng(9000 + static_cast<std::uint64_t>(trial));
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
            std::swap(shuffled[i], shuffled[j]);
        }
        const double independent = hsic_statistic(u, shuffled).statistic;
        if (dependent > independent) ++wins;
    }
    CHECK(wins >= 95);
}

TEST_CASE("symmetry and nonnegativity") {
    for (int rep = 0; rep < 10; ++rep) {
        auto u = randn(40, 300 + static_cast<std::uint64_t>(rep));
        auto v = randn(40, 400 + static_cast<std::uint64_t>(rep));
        HsicResult uv = hsic_statistic(u, v);
        HsicResult vu = hsic_statistic(v, u);
        CHECK(std::abs(uv.statistic - vu.statistic) <= 1e-12);
        CHECK(uv.statistic >= 0.0);
    }
}

TEST_CASE("affine invariance under the median heuristic") {
    auto u = randn(60, 5);
    auto v = randn(60, 6);
    const double base = hsic_statistic(u, v).statistic;
    std::vector<double> au(u);
    for (double& a : au) a = 3.25 * a - 17.0;
    CHECK(std::abs(hsic_statistic(au, v).statistic - base) <= 1e-10);
}

TEST_CASE("independent statistic shrinks with sample size") {
    double s100 = 0.0, s1000 = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        auto u1 = randn(100, 100 + static_cast<std::uint64_t>(rep));
        auto v1 = randn(100, 6100 + static_cast<std::uint64_t>(rep));
        s100 += hsic_statistic(u1, v1).statistic;
        auto u2 = randn(1000, 7100 + static_cast<std::uint64_t>(rep));
        auto v2 = randn(1000, 8100 + static_cast<std::uint64_t>(rep));
        s1000 += hsic_statistic(u2, v2).statistic;
    }
    CHECK(s1000 / 20.0 < s100 / 20.0);
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(hsic_statistic({1, 2, 3}, {1, 2}), LengthMismatchError);
    CHECK_THROWS_AS(hsic_statistic({1, 2, 3}, {1, 2, 3}), InvalidParamsError);
    CHECK_THROWS_AS(hsic_statistic({1, 1, 1, 1}, {1, 2, 3, 4}), AllIdenticalError);
}

TEST_CASE("permutation diagnostic: dependent data gets a small p-value") {
    auto u = randn(120, 12);
    std::vector<double> v(u.size());
    Rng rng(13);
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + 0.2 * rng.gaussian();
    HsicPermutationTest dependent = hsic_permutation_test(u, v, 99, 21);
    CHECK(dependent.p_value <= 0.05);

    auto w = randn(120, 14);
    HsicPermutationTest independent = hsic_permutation_test(u, w, 99, 22);
    CHECK(independent.p_value > 0.05);
    // observed statistic agrees with the streaming implementation
    CHECK(independent.observed.statistic ==
          doctest::Approx(hsic_statistic(u, w).statistic).epsilon(1e-10));
}
