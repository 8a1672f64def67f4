#pragma once

#include <ginv/matrixlab.hpp>
#include <ginv/spectrum.hpp>

namespace ginv {

// Asymptotic (1/p)-normalized squared Frobenius norms of the two generalized
// inverses as p/n -> c > 1, together with the normalized Frobenius loss
//   NFL = ||S^-||_F^2 / ||S^+||_F^2 - 1
// and the consistent estimator of (1/p)||Sigma^{-1}||_F^2 built from S^-.

// limit of (1/p)||S^+||_F^2:  m0'(c, H) / c  with m0 the Gram zero point
double asymptotic_fro_plus(double c, const SpectrumSpec& spectrum);

// limit of (1/p)||S^-||_F^2:
//   (1 + c(c-1)) / (c^2 (c-1)^3) * (int dH/tau)^2  +  (int dH/tau^2) / (c(c-1))^2
double asymptotic_fro_minus(double c, const SpectrumSpec& spectrum);

double asymptotic_nfl(double c, const SpectrumSpec& spectrum);

// ||S^-||_F^2 / ||S^+||_F^2 - 1 from realized matrices
double empirical_nfl(const Matrix& s_plus, const Matrix& s_minus);

// limit of (1/p) tr(S^-):  (int dH/tau) / (c(c-1))
double trace_limit_minus(double c, const SpectrumSpec& spectrum);

// (1/p) (c(c-1))^2 [ ||S^-||_F^2 - (1/(c-1) + c) (tr S^-)^2 / p ],
// a consistent estimator of (1/p)||Sigma^{-1}||_F^2; c = c_eff = p/n.
double precision_fro_estimator(const Matrix& s_minus, double c_eff, Index p);

// Finite-p plug-in equivalents: the asymptotic formulas evaluated over the
// exact discrete spectrum of a given Sigma.
struct SpectrumEquivalents {
    double fro_plus;
    double fro_minus;
    double m_zero;
};

SpectrumEquivalents finite_spectrum_equivalents(const CovarianceModel& model, double c);

// Full per-run comparison of empirical functionals with their limits.
struct FrobeniusReport {
    double c_eff;
    double fro_plus_emp, fro_minus_emp;    // (1/p) ||.||_F^2 from data
    double fro_plus_asym, fro_minus_asym;  // limits at c_eff
    double nfl_emp, nfl_asym;
    double trace_minus_emp, trace_minus_asym;
    double precision_norm_estimate;  // estimator from S^-
    double precision_norm_true;      // (1/p)||Sigma^{-1}||_F^2 of the model
};

FrobeniusReport make_frobenius_report(const CovarianceModel& model, const InversePair& pair,
                                      double c_eff);

}  // namespace ginv
