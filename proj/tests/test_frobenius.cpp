#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <ginv/frobenius.hpp>
#include <ginv/stieltjes.hpp>

#include "oracles.hpp"

using ginv::CovarianceModel;
using ginv::Index;
using ginv::Matrix;
using ginv::SpectrumSpec;

namespace {
const SpectrumSpec kId = SpectrumSpec::identity();
const SpectrumSpec kFig1 = SpectrumSpec::parse("0.2:1,0.4:3,0.4:10");
}  // namespace

TEST_CASE("identity spectrum collapses both limits to 1/(c-1)^3") {
    for (double c : {1.5, 2.0, 4.0, 10.0}) {
        const double expected = 1.0 / std::pow(c - 1.0, 3);
        CHECK(std::abs(ginv::asymptotic_fro_plus(c, kId) - expected) < 1e-10);
        CHECK(std::abs(ginv::asymptotic_fro_minus(c, kId) - expected) < 1e-10);
        CHECK(std::abs(ginv::asymptotic_nfl(c, kId)) < 1e-10);
    }
}

TEST_CASE("asymptotic plus norm follows from the bisected zero point") {
    // oracle: pure bisection for m0, then the explicit derivative expression
    const double m0 = oracles::gram_zero_bisection(2.0, kFig1, 1e-13);
    const double tail = 2.0 * kFig1.integrate([&](double t) {
        const double d = 1.0 + t * m0;
        return t * t / (d * d);
    });
    const double oracle = (1.0 / (1.0 / (m0 * m0) - tail)) / 2.0;
    CHECK(std::abs(ginv::asymptotic_fro_plus(2.0, kFig1) - oracle) < 1e-9);
    CHECK(std::abs(ginv::asymptotic_fro_plus(2.0, kFig1) - 0.07587731746308832) < 1e-12);
}

TEST_CASE("asymptotic minus norm is the closed two-moment expression") {
    // hand arithmetic: 0.75 * (28/75)^2 + 0.25 * (559/2250) = 7499/45000
    CHECK(ginv::asymptotic_fro_minus(2.0, kFig1) ==
          doctest::Approx(7499.0 / 45000.0).epsilon(1e-14));
    const double i1 = 1.0, i2 = 1.0;  // identity spectrum moments
    const double c = 4.0;
    const double byhand = (1.0 + c * (c - 1.0)) / (c * c * std::pow(c - 1.0, 3)) * i1 * i1 +
                          i2 / std::pow(c * (c - 1.0), 2);
    CHECK(std::abs(byhand - 1.0 / 27.0) < 1e-15);
    CHECK(std::abs(ginv::asymptotic_fro_minus(4.0, kId) - 1.0 / 27.0) < 1e-15);
}

TEST_CASE("asymptotic NFL values for the shipped spectrum") {
    const double nfl2 = ginv::asymptotic_nfl(2.0, kFig1);
    CHECK(std::abs(nfl2 - 1.1962353179592995) < 1e-11);
    CHECK(nfl2 > 1.15);
    CHECK(nfl2 < 1.25);
    const double nfl107 = ginv::asymptotic_nfl(1.07, kFig1);
    CHECK(nfl107 < 0.15);
    CHECK(std::abs(nfl107 - 0.10802612489151642) < 1e-11);
}

TEST_CASE("trace limit of the reflexive inverse") {
    CHECK(std::abs(ginv::trace_limit_minus(2.0, kId) - 0.5) < 1e-15);
    CHECK(std::abs(ginv::trace_limit_minus(4.0, kId) - 1.0 / 12.0) < 1e-15);
    CHECK(ginv::trace_limit_minus(2.0, kFig1) == doctest::Approx(14.0 / 75.0).epsilon(1e-14));
}

TEST_CASE("empirical NFL of identical matrices vanishes") {
    const Matrix y = ginv::sample_noise(12, 6, ginv::NoiseKind::gaussian, 3);
    const Matrix sp = ginv::moore_penrose_inverse(y);
    CHECK(ginv::empirical_nfl(sp, sp) == 0.0);
    CHECK_THROWS_AS(ginv::empirical_nfl(Matrix::Zero(3, 3), Matrix::Identity(3, 3)),
                    ginv::validation_error);
    CHECK_THROWS_AS(ginv::empirical_nfl(Matrix::Identity(3, 3), Matrix::Identity(4, 4)),
                    ginv::validation_error);
}

TEST_CASE("the cross-trace identity collapses the norm difference") {
    // tr(S+ S-) = tr(S+ S+): the reason NFL reduces to a norm ratio
    const Index p = 60, n = 30;
    const Matrix x = ginv::sample_noise(p, n, ginv::NoiseKind::gaussian, 20240601);
    const CovarianceModel fig = CovarianceModel::diagonal_from_spectrum(kFig1, p);
    const auto pair = ginv::make_inverse_pair(fig, x);
    const double cross = (pair.S_plus * pair.S_minus).trace();
    const double self = (pair.S_plus * pair.S_plus).trace();
    CHECK(std::abs(cross - self) / self < 1e-8);
    // and therefore ||S- - S+||_F^2 = ||S-||_F^2 - ||S+||_F^2
    const double diff_norm = (pair.S_minus - pair.S_plus).squaredNorm();
    CHECK(diff_norm == doctest::Approx(pair.S_minus.squaredNorm() - pair.S_plus.squaredNorm())
                           .epsilon(1e-8));
}

TEST_CASE("precision estimator formula on a literal matrix") {
    Matrix s_minus(2, 2);
    s_minus << 1.0, 0.0, 0.0, 2.0;
    // (1/2) * (c(c-1))^2 * [5 - (1/(c-1)+c) * 9/2] with c = 2
    CHECK(ginv::precision_fro_estimator(s_minus, 2.0, 2) ==
          doctest::Approx(2.0 * (5.0 - 13.5)).epsilon(1e-14));
    CHECK_THROWS_AS(ginv::precision_fro_estimator(s_minus, 2.0, 3), ginv::validation_error);
    CHECK_THROWS_AS(ginv::precision_fro_estimator(s_minus, 0.9, 2), ginv::validation_error);
}

TEST_CASE("estimator limit identity ties the minus norm, trace and second moment") {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> cs(1.05, 12.0);
    for (int trial = 0; trial < 20; ++trial) {
        const SpectrumSpec spec = oracles::random_spectrum(rng);
        const double c = cs(rng);
        const double lhs = std::pow(c * (c - 1.0), 2) *
                           (ginv::asymptotic_fro_minus(c, spec) -
                            (1.0 / (c - 1.0) + c) * std::pow(ginv::trace_limit_minus(c, spec), 2));
        const double i2 = spec.inverse_moment(2);
        CHECK(std::abs(lhs - i2) <= 1e-10 * std::max(1.0, std::abs(i2)));
    }
}

TEST_CASE("estimator converges to the population second moment in simulation") {
    const Index p = 300;
    const double c = 2.0;
    const CovarianceModel fig = CovarianceModel::diagonal_from_spectrum(kFig1, p);
    double acc = 0.0;
    const int reps = 8;
    for (int r = 0; r < reps; ++r) {
        const Matrix x = ginv::sample_noise(p, p / 2, ginv::NoiseKind::gaussian,
                                            ginv::derive_seed(90210, r));
        const Matrix s_minus = ginv::reflexive_inverse(fig, x);
        acc += ginv::precision_fro_estimator(s_minus, c, p);
    }
    acc /= reps;
    CHECK(std::abs(acc - kFig1.inverse_moment(2)) / kFig1.inverse_moment(2) < 0.15);
}

TEST_CASE("finite-spectrum equivalents reduce to the asymptotic formulas") {
    const CovarianceModel fig = CovarianceModel::diagonal_from_spectrum(kFig1, 10);
    const auto eq = ginv::finite_spectrum_equivalents(fig, 2.0);
    CHECK(eq.fro_plus == doctest::Approx(ginv::asymptotic_fro_plus(2.0, kFig1)).epsilon(1e-12));
    CHECK(eq.fro_minus == doctest::Approx(ginv::asymptotic_fro_minus(2.0, kFig1)).epsilon(1e-12));
    CHECK(eq.m_zero == doctest::Approx(ginv::m_gram_zero(2.0, kFig1)).epsilon(1e-12));

    const CovarianceModel id = CovarianceModel::diagonal_from_spectrum(kId, 8);
    for (double c : {2.0, 3.0}) {
        const auto ideq = ginv::finite_spectrum_equivalents(id, c);
        CHECK(std::abs(ideq.fro_plus - 1.0 / std::pow(c - 1.0, 3)) < 1e-12);
        CHECK(std::abs(ideq.fro_minus - 1.0 / std::pow(c - 1.0, 3)) < 1e-12);
        CHECK(std::abs(ideq.m_zero - 1.0 / (c - 1.0)) < 1e-12);
    }
}

TEST_CASE("equivalents move continuously with the eigenvalues") {
    // bump one eigenvalue by 1%: outputs move by well under 5%
    const SpectrumSpec bumped = SpectrumSpec::canonicalize({{0.2, 1.0}, {0.4, 3.03}, {0.4, 10.0}});
    const CovarianceModel a = CovarianceModel::diagonal_from_spectrum(kFig1, 20);
    const CovarianceModel b = CovarianceModel::diagonal_from_spectrum(bumped, 20);
    const auto ea = ginv::finite_spectrum_equivalents(a, 2.0);
    const auto eb = ginv::finite_spectrum_equivalents(b, 2.0);
    CHECK(std::abs(eb.fro_plus - ea.fro_plus) / ea.fro_plus < 0.05);
    CHECK(std::abs(eb.fro_minus - ea.fro_minus) / ea.fro_minus < 0.05);
    CHECK(std::abs(eb.m_zero - ea.m_zero) / ea.m_zero < 0.05);
}

TEST_CASE("both norms blow up like (c-1)^-3 near the singular edge") {
    for (double c : {1.1, 1.05, 1.01}) {
        const double scale = std::pow(c - 1.0, 3);
        CHECK(std::abs(ginv::asymptotic_fro_plus(c, kId) * scale - 1.0) < 1e-10);
        CHECK(std::abs(ginv::asymptotic_fro_minus(c, kId) * scale - 1.0) < 1e-10);
    }
}

TEST_CASE("frobenius report is internally consistent") {
    const Index p = 40, n = 20;
    const CovarianceModel id = CovarianceModel::diagonal_from_spectrum(kId, p);
    const Matrix x = ginv::sample_noise(p, n, ginv::NoiseKind::gaussian, 555);
    const auto pair = ginv::make_inverse_pair(id, x);
    const auto rep = ginv::make_frobenius_report(id, pair, 2.0);
    CHECK(rep.nfl_emp == rep.fro_minus_emp / rep.fro_plus_emp - 1.0);
    CHECK(rep.nfl_asym == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.fro_plus_asym == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.precision_norm_true == 1.0);
    CHECK(rep.trace_minus_asym == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.fro_plus_emp > 0.0);
    CHECK(rep.fro_minus_emp >= rep.fro_plus_emp);
}

TEST_CASE("asymptotic functionals validate the concentration range") {
    CHECK_THROWS_AS(ginv::asymptotic_fro_plus(1.0, kId), ginv::validation_error);
    CHECK_THROWS_AS(ginv::asymptotic_fro_minus(0.5, kId), ginv::validation_error);
    CHECK_THROWS_AS(ginv::trace_limit_minus(1.0, kId), ginv::validation_error);
}
