// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "z3sim/errors.hpp"
#include "z3sim/pa.hpp"

using namespace z3sim;

TEST_CASE("rapp AM/AM at the saturation knee") {
    const double p_sat = 1.7;
    const PaModel model = RappPa{p_sat, 2.0};
    const cxd x = std::sqrt(p_sat) * std::polar(1.0, 0.9);
    const cxd y = amplify(x, model);
    // |x| = sqrt(p_sat) gives |y| = |x| / 2^(1/4).
    CHECK(std::abs(y) == doctest::Approx(std::sqrt(p_sat) / std::pow(2.0, 0.25)).epsilon(1e-12));
    CHECK(std::abs(std::arg(y) - std::arg(x)) < 1e-12);
    CHECK(std::abs(std::abs(amplify(cxd{1.0, 0.0}, RappPa{1.0, 2.0})) - 0.8408964152537146) <
          1e-12);
}

TEST_CASE("rapp saturates toward sqrt(p_sat)") {
    for (const double p_sat : {0.5, 1.0, 4.0}) {
        const PaModel model = RappPa{p_sat, 2.0};
        const cxd y = amplify(cxd{100.0 * std::sqrt(p_sat), 0.0}, model);
        CHECK(std::abs(std::abs(y) - std::sqrt(p_sat)) < 1e-4 * std::sqrt(p_sat));
    }
}

TEST_CASE("rapp AM/AM is strictly increasing and strictly bounded") {
    const double p_sat = 1.3;
    const PaModel model = RappPa{p_sat, 2.0};
    double previous = 0.0;
    for (int i = 1; i <= 10000; ++i) {
        // log-spaced magnitudes from 1e-3 to 1e3 times sqrt(p_sat)
        const double magnitude = std::sqrt(p_sat) * std::pow(10.0, -3.0 + 6.0 * i / 10000.0);
        const double out = std::abs(amplify(cxd{magnitude, 0.0}, model));
        CHECK(out > previous);
        CHECK(out < std::sqrt(p_sat));
        previous = out;
    }
}

TEST_CASE("rapp and ideal preserve phase") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mag(1e-6, 10.0);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    const PaModel rapp = RappPa{1.0, 2.0};
    const PaModel ideal = IdealPa{};
    for (int i = 0; i < 1000; ++i) {
        const cxd x = std::polar(mag(rng), phase(rng));
        CHECK(std::abs(std::arg(amplify(x, rapp)) - std::arg(x)) < 1e-12);
        CHECK(amplify(x, ideal) == x);
    }
}

TEST_CASE("ideal PA is homogeneous") {
    const PaModel ideal = IdealPa{};
    const cxd x{0.3, -1.2};
    const cxd c{2.5, 0.7};
    CHECK(amplify(c * x, ideal) == c * amplify(x, ideal));
}

TEST_CASE("polynomial model evaluates and is odd") {
    const PaModel model = Polynomial3Pa{{1.0, 0.0}, {-0.1, 0.0}};
    CHECK(std::abs(amplify(cxd{1.0, 0.0}, model) - cxd{0.9, 0.0}) < 1e-15);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 200; ++i) {
        const cxd x{normal(rng), normal(rng)};
        CHECK(amplify(-x, model) == -amplify(x, model));
    }
}

TEST_CASE("rapp with large smoothness approaches the ideal clipper") {
    const double p_sat = 2.0;
    const PaModel model = RappPa{p_sat, 100.0};
    const double below = std::abs(amplify(cxd{0.5 * std::sqrt(p_sat), 0.0}, model));
    const double above = std::abs(amplify(cxd{2.0 * std::sqrt(p_sat), 0.0}, model));
    CHECK(std::abs(below - 0.5 * std::sqrt(p_sat)) < 0.01 * 0.5 * std::sqrt(p_sat));
    CHECK(std::abs(above - std::sqrt(p_sat)) < 0.01 * std::sqrt(p_sat));
}

TEST_CASE("small-signal gain with finite-difference oracle") {
    CHECK(small_signal_gain(RappPa{0.7, 3.5}) == cxd{1.0, 0.0});
    CHECK(small_signal_gain(IdealPa{}) == cxd{1.0, 0.0});
    CHECK(small_signal_gain(Polynomial3Pa{{0.5, 0.0}, {-0.2, 0.0}}) == cxd{0.5, 0.0});

    const double h = 1e-6;
    for (const PaModel& model :
         {PaModel{RappPa{1.0, 2.0}}, PaModel{Polynomial3Pa{{0.5, 0.0}, {-0.2, 0.0}}},
          PaModel{IdealPa{}}}) {
        const cxd fd = amplify(cxd{h, 0.0}, model) / h;
        CHECK(std::abs(fd - small_signal_gain(model)) < 1e-6);
    }
}

TEST_CASE("matrix amplification matches the scalar path") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd x(7, 5);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = cxd{normal(rng), normal(rng)};
        }
    }
    for (const PaModel& model :
         {PaModel{RappPa{1.0, 2.0}}, PaModel{RappPa{2.0, 1.5}},
          PaModel{Polynomial3Pa{{1.0, 0.1}, {-0.05, 0.02}}}, PaModel{IdealPa{}}}) {
        const Eigen::MatrixXcd y = amplify(x, model);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                CHECK(y(i, j) == amplify(x(i, j), model));
            }
        }
    }
}

TEST_CASE("pa validation") {
    CHECK_THROWS_AS(validate(PaModel{RappPa{0.0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(validate(PaModel{RappPa{1.0, -1.0}}), ValidationError);
    CHECK_THROWS_AS(validate(PaModel{Polynomial3Pa{{0.0, 0.0}, {1.0, 0.0}}}), ValidationError);
    CHECK_THROWS_AS(amplify(cxd{std::nan(""), 0.0}, PaModel{IdealPa{}}), ValidationError);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Ones(2, 2);
    bad(0, 1) = cxd{0.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(amplify(bad, PaModel{IdealPa{}}), ValidationError);
}
