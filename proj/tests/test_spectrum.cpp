#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <ginv/matrixlab.hpp>
#include <ginv/spectrum.hpp>

#include "oracles.hpp"

using ginv::Atom;
using ginv::SpectrumSpec;

namespace {
const char* kFig1 = "0.2:1,0.4:3,0.4:10";
}

TEST_CASE("canonicalize keeps an already canonical spectrum") {
    const SpectrumSpec spec = SpectrumSpec::canonicalize({{0.2, 1.0}, {0.4, 3.0}, {0.4, 10.0}});
    REQUIRE(spec.size() == 3);
    CHECK(spec.atoms()[0].weight == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(spec.atoms()[1].eigenvalue == 3.0);
    CHECK(spec.atoms()[2].eigenvalue == 10.0);
}

TEST_CASE("canonicalize merges duplicates and normalizes weights") {
    const SpectrumSpec spec = SpectrumSpec::canonicalize({{1.0, 2.0}, {1.0, 2.0}});
    REQUIRE(spec.size() == 1);
    CHECK(spec.atoms()[0].weight == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spec.atoms()[0].eigenvalue == 2.0);
}

TEST_CASE("canonicalize sorts atoms ascending") {
    const SpectrumSpec spec = SpectrumSpec::canonicalize({{0.5, 5.0}, {0.5, 1.0}});
    CHECK(spec.atoms()[0].eigenvalue == 1.0);
    CHECK(spec.atoms()[1].eigenvalue == 5.0);
}

TEST_CASE("canonicalize rejects bad atoms naming the offender") {
    CHECK_THROWS_AS(SpectrumSpec::canonicalize({}), ginv::validation_error);
    CHECK_THROWS_WITH_AS(SpectrumSpec::canonicalize({{0.5, 1.0}, {-0.1, 2.0}}),
                         doctest::Contains("atom 1"), ginv::validation_error);
    CHECK_THROWS_WITH_AS(SpectrumSpec::canonicalize({{0.5, 0.0}}),
                         doctest::Contains("eigenvalue"), ginv::validation_error);
}

TEST_CASE("parse round-trips the CLI syntax") {
    const SpectrumSpec spec = SpectrumSpec::parse(kFig1);
    REQUIRE(spec.size() == 3);
    CHECK(spec.to_string() == kFig1);
    CHECK_THROWS_AS(SpectrumSpec::parse("0.2:1,banana"), ginv::validation_error);
    CHECK_THROWS_AS(SpectrumSpec::parse("0.2,1"), ginv::validation_error);
}

TEST_CASE("integrate computes exact finite sums") {
    const SpectrumSpec id = SpectrumSpec::identity();
    CHECK(id.integrate([](double t) { return 1.0 / t; }) == 1.0);

    const SpectrumSpec fig1 = SpectrumSpec::parse(kFig1);
    CHECK(fig1.integrate([](double t) { return 1.0 / t; }) ==
          doctest::Approx(0.2 + 0.4 / 3.0 + 0.4 / 10.0).epsilon(1e-15));
    CHECK(fig1.integrate([](double t) { return 1.0 / (t * t); }) ==
          doctest::Approx(0.2 + 0.4 / 9.0 + 0.4 / 100.0).epsilon(1e-15));
}

TEST_CASE("integrate flags poles with the offending atom") {
    const SpectrumSpec fig1 = SpectrumSpec::parse(kFig1);
    CHECK_THROWS_WITH_AS(fig1.integrate([](double t) { return 1.0 / (t - 3.0); }),
                         doctest::Contains("atom 1"), ginv::numeric_error);
}

TEST_CASE("inverse_moment matches integrate and rejects unsupported orders") {
    const SpectrumSpec fig1 = SpectrumSpec::parse(kFig1);
    CHECK(fig1.inverse_moment(1) == doctest::Approx(0.37333333333333333).epsilon(1e-15));
    CHECK(fig1.inverse_moment(2) == doctest::Approx(0.24844444444444444).epsilon(1e-15));
    CHECK(SpectrumSpec::identity().inverse_moment(1) == 1.0);
    CHECK_THROWS_AS(fig1.inverse_moment(3), ginv::validation_error);
}

TEST_CASE("total mass and linearity hold for random spectra") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const SpectrumSpec spec = oracles::random_spectrum(rng);
        CHECK(std::abs(spec.integrate([](double) { return 1.0; }) - 1.0) < 1e-12);

        auto f = [](double t) { return std::sin(t); };
        auto g = [](double t) { return 1.0 / (1.0 + t); };
        const double a = 2.5, b = -0.75;
        const double lhs = spec.integrate([&](double t) { return a * f(t) + b * g(t); });
        const double rhs = a * spec.integrate(f) + b * spec.integrate(g);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("inverse moments equal exact traces of an apportioned diagonal Sigma") {
    // exact proportions: weights k/20 keep w*p integral for p = 40
    const SpectrumSpec spec =
        SpectrumSpec::canonicalize({{0.25, 0.5}, {0.5, 2.0}, {0.25, 8.0}});
    const ginv::CovarianceModel model = ginv::CovarianceModel::diagonal_from_spectrum(spec, 40);
    for (int k = 1; k <= 2; ++k) {
        double trace = 0.0;
        for (ginv::Index i = 0; i < model.dim(); ++i) {
            trace += std::pow(model.eigenvalues()[i], -k);
        }
        CHECK(trace / 40.0 == doctest::Approx(spec.inverse_moment(k)).epsilon(1e-15));
    }
}
