#include <doctest.h>

#include <cmath>

#include "mimodfe/rng.hpp"
#include "mimodfe/waterfill.hpp"

using namespace mimodfe;

namespace {

double info_of(const RVec& lam, const RVec& gamma) {
    double info = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        info += std::log2(1.0 + gamma(i) * lam(i));
    }
    return info;
}

RVec make_vec(std::initializer_list<double> vals) {
    RVec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("waterfill");

TEST_CASE("two equal channels split the budget evenly") {
    const auto res = inverse_waterfill(make_vec({1.0, 1.0}), 2.0, 2);
    CHECK(res.active_rank == 2);
    CHECK(res.loadings(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.loadings(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.achieved_info_bits == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("weak channel is excluded from the active set") {
    // threshold for r=2 is sqrt(4/2) > 1, so only the strong channel loads
    const auto res = inverse_waterfill(make_vec({4.0, 1.0}), 1.0, 2);
    CHECK(res.active_rank == 1);
    CHECK(res.loadings(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(res.loadings(1) == 0.0);
    CHECK(res.achieved_info_bits == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single channel") {
    CHECK_THROWS_AS(inverse_waterfill(make_vec({5.0}), 0.0, 1), DomainError);
    const auto res = inverse_waterfill(make_vec({5.0}), std::log2(6.0), 1);
    CHECK(res.active_rank == 1);
    CHECK(res.loadings(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(inverse_waterfill(RVec(), 1.0, 1), DimensionError);
    CHECK_THROWS_AS(inverse_waterfill(make_vec({1.0, 0.0}), 1.0, 2), DomainError);
    CHECK_THROWS_AS(inverse_waterfill(make_vec({1.0, -2.0}), 1.0, 2), DomainError);
    CHECK_THROWS_AS(inverse_waterfill(make_vec({1.0, 2.0}), 1.0, 2), DomainError);
    CHECK_THROWS_AS(inverse_waterfill(make_vec({1.0}), 1.0, 0), DimensionError);
    CHECK_THROWS_AS(inverse_waterfill(make_vec({1.0}), 1.0, 2), DimensionError);
}

TEST_CASE("constraint satisfaction and constant water level on random instances") {
    Rng rng = Rng::derive(99, {1});
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.bits() % 6);
        RVec lam(n);
        for (int i = 0; i < n; ++i) lam(i) = std::exp(2.0 * rng.normal());
        std::sort(lam.data(), lam.data() + n, std::greater<double>());
        const double info = 0.1 + 6.0 * rng.uniform01();

        const auto res = inverse_waterfill(lam, info, n);
        CHECK(std::abs(info_of(lam, res.loadings) - info) < 1e-9);

        // water level constant over active streams
        double level = res.loadings(0) + 1.0 / lam(0);
        for (int i = 1; i < res.active_rank; ++i) {
            const double li = res.loadings(i) + 1.0 / lam(i);
            CHECK(std::abs(li - level) / level < 1e-9);
        }
        // active set is a prefix
        for (int i = 0; i < n; ++i) {
            if (res.loadings(i) == 0.0) {
                for (int j = i; j < n; ++j) CHECK(res.loadings(j) == 0.0);
                break;
            }
            CHECK(res.loadings(i) > 0.0);
        }
    }
}

TEST_CASE("power is monotone in the information target") {
    Rng rng = Rng::derive(99, {2});
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.bits() % 4);
        RVec lam(n);
        for (int i = 0; i < n; ++i) lam(i) = std::exp(1.5 * rng.normal());
        std::sort(lam.data(), lam.data() + n, std::greater<double>());
        double prev = 0.0;
        for (double info = 0.5; info < 6.0; info += 0.5) {
            const double p = inverse_waterfill(lam, info, n).total_power();
            CHECK(p >= prev);
            prev = p;
        }
    }
}

TEST_CASE("a stream cap below the natural rank still meets the target") {
    const RVec lam = make_vec({8.0, 4.0, 2.0});
    const double info = 6.0;
    const auto full = inverse_waterfill(lam, info, 3);
    REQUIRE(full.active_rank == 3);

    const auto capped = inverse_waterfill(lam, info, 2);
    CHECK(capped.active_rank == 2);
    CHECK(capped.loadings.size() == 2);
    CHECK(capped.loadings.minCoeff() > 0.0);
    CHECK(std::abs(capped.achieved_info_bits - info) < 1e-9);
    // fewer streams cannot be cheaper
    CHECK(capped.total_power() >= full.total_power() - 1e-12);
}

TEST_CASE("a cap above the natural rank zero-pads the loadings") {
    const auto res = inverse_waterfill(make_vec({4.0, 1.0}), 1.0, 2);
    CHECK(res.active_rank == 1);
    CHECK(res.loadings.size() == 2);
    CHECK(res.loadings(1) == 0.0);
}

TEST_CASE("grid-search oracle confirms optimality on small instances") {
    // light version of the acceptance sweep: 2 eigenvalues, one free
    // coordinate; the second loading is solved from the constraint
    const RVec lam = make_vec({3.0, 0.7});
    for (double info : {0.5, 1.0, 2.0, 4.0}) {
        const auto res = inverse_waterfill(lam, info, 2);
        CHECK(std::abs(res.achieved_info_bits - info) < 1e-9);

        double best = 1e300;
        const double hi = (std::exp2(info) - 1.0) / lam(0);
        const int steps = 20000;
        for (int i = 0; i <= steps; ++i) {
            const double g0 = hi * i / steps;
            const double rem = info - std::log2(1.0 + g0 * lam(0));
            if (rem < 0.0) continue;
            const double g1 = (std::exp2(rem) - 1.0) / lam(1);
            best = std::min(best, g0 + g1);
        }
        CHECK(res.total_power() <= best + 1e-6);
        CHECK(res.total_power() >= best - 1e-3);
    }
}

TEST_SUITE_END();
