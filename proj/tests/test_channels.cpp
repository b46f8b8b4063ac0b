#include <doctest.h>

#include <cmath>

#include "mimodfe/channels.hpp"
#include "test_helpers.hpp"

using namespace mimodfe;

namespace {

CVec make_taps(std::initializer_list<Complex> vals) {
    CVec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (Complex x : vals) v(i++) = x;
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("channels");

TEST_CASE("toeplitz_matrix: memoryless channel is the identity") {
    const CMat h = toeplitz_matrix(make_taps({1.0}), 3);
    CHECK(testutil::rel_error(h, CMat::Identity(3, 3)) == 0.0);
}

TEST_CASE("toeplitz_matrix: two taps unrolled") {
    const CMat h = toeplitz_matrix(make_taps({1.0, 1.0}), 2);
    REQUIRE(h.rows() == 3);
    REQUIRE(h.cols() == 2);
    CHECK(h(0, 0) == Complex(1.0));
    CHECK(h(0, 1) == Complex(0.0));
    CHECK(h(1, 0) == Complex(1.0));
    CHECK(h(1, 1) == Complex(1.0));
    CHECK(h(2, 0) == Complex(0.0));
    CHECK(h(2, 1) == Complex(1.0));
}

TEST_CASE("toeplitz_matrix: columns are shifted copies") {
    Rng rng = Rng::derive(7, {1});
    CVec taps(4);
    for (int i = 0; i < 4; ++i) taps(i) = rng.complex_normal(1.0);
    const int block = 8;
    const CMat h = toeplitz_matrix(taps, block);
    for (int j = 0; j < block; ++j) {
        for (int i = 0; i < h.rows(); ++i) {
            const int lag = i - j;
            const Complex want = (lag >= 0 && lag < 4) ? taps(lag) : Complex(0.0);
            CHECK(h(i, j) == want);
        }
    }
    // energy: squared Frobenius norm = block * tap energy
    CHECK(h.squaredNorm() == doctest::Approx(block * taps.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("toeplitz_matrix: rejects bad dimensions") {
    CHECK_THROWS_AS(toeplitz_matrix(CVec(), 3), DimensionError);
    CHECK_THROWS_AS(toeplitz_matrix(make_taps({1.0}), 0), DimensionError);
}

TEST_CASE("dmt_matrix: memoryless channel is the identity") {
    const CMat h = dmt_matrix(make_taps({1.0}), 5);
    CHECK(testutil::rel_error(h, CMat::Identity(5, 5)) < 1e-15);
}

TEST_CASE("dmt_matrix: unit delay gives the DFT twiddles") {
    const CMat h = dmt_matrix(make_taps({0.0, 1.0}), 4);
    CHECK(std::abs(h(0, 0) - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(h(1, 1) - Complex(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(h(2, 2) - Complex(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(h(3, 3) - Complex(0.0, 1.0)) < 1e-14);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i != j) CHECK(h(i, j) == Complex(0.0));
        }
    }
}

TEST_CASE("dmt_matrix: diagonal equals the direct DFT sum") {
    Rng rng = Rng::derive(7, {2});
    const int block = 32;
    CVec taps(10);
    for (int i = 0; i < 10; ++i) taps(i) = rng.complex_normal(0.1);
    const CMat h = dmt_matrix(taps, block);
    constexpr double two_pi = 6.28318530717958647692;
    for (int m = 0; m < block; ++m) {
        Complex want = 0.0;
        for (int l = 0; l < 10; ++l) {
            want += taps(l) * std::exp(Complex(0.0, -two_pi * l * m / block));
        }
        CHECK(std::abs(h(m, m) - want) < 1e-12);
    }
}

TEST_CASE("dmt_matrix: taps longer than the block are refused") {
    CHECK_THROWS_AS(dmt_matrix(make_taps({1.0, 1.0, 1.0}), 2), ConfigError);
}

TEST_CASE("sample_channel: deterministic under a fixed seed") {
    Rng a = Rng::derive(123, {9, 4});
    Rng b = Rng::derive(123, {9, 4});
    const IsiChannel ca = sample_channel(a, 9, 32, Modulation::dmt);
    const IsiChannel cb = sample_channel(b, 9, 32, Modulation::dmt);
    CHECK((ca.taps - cb.taps).norm() == 0.0);
    CHECK(ca.memory() == 9);
    CHECK(ca.matrix().rows() == 32);
}

TEST_CASE("sample_channel: unit expected energy") {
    Rng rng = Rng::derive(7, {3});
    double total = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        total += sample_channel(rng, 9, 16, Modulation::dmt).taps.squaredNorm();
    }
    CHECK(total / trials == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("sample_channel: single tap power is exponential with mean 1") {
    Rng rng = Rng::derive(7, {4});
    double mean = 0.0, second = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        const double p = sample_channel(rng, 0, 4, Modulation::dmt).taps.squaredNorm();
        mean += p;
        second += p * p;
    }
    mean /= trials;
    second /= trials;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.03));
    // exponential: second moment is 2 * mean^2
    CHECK(second == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("sample_channel: zero-padded matrices are tall") {
    Rng rng = Rng::derive(7, {5});
    const IsiChannel ch = sample_channel(rng, 3, 8, Modulation::zero_padded);
    const CMat h = ch.matrix();
    CHECK(h.rows() == 11);
    CHECK(h.cols() == 8);
}

TEST_SUITE_END();
