#include <ginv/frobenius.hpp>

#include <cmath>

#include <ginv/stieltjes.hpp>

namespace ginv {

double asymptotic_fro_plus(double c, const SpectrumSpec& spectrum) {
    if (!(c > 1.0)) throw validation_error("asymptotic_fro_plus: requires c > 1");
    const double m0 = m_gram_zero(c, spectrum);
    return m_gram_zero_prime(c, spectrum, m0) / c;
}

double asymptotic_fro_minus(double c, const SpectrumSpec& spectrum) {
    if (!(c > 1.0)) throw validation_error("asymptotic_fro_minus: requires c > 1");
    const double i1 = spectrum.inverse_moment(1);
    const double i2 = spectrum.inverse_moment(2);
    const double cm1 = c - 1.0;
    return (1.0 + c * cm1) / (c * c * cm1 * cm1 * cm1) * i1 * i1 +
           i2 / ((c * cm1) * (c * cm1));
}

double asymptotic_nfl(double c, const SpectrumSpec& spectrum) {
    return asymptotic_fro_minus(c, spectrum) / asymptotic_fro_plus(c, spectrum) - 1.0;
}

double empirical_nfl(const Matrix& s_plus, const Matrix& s_minus) {
    if (s_plus.rows() != s_minus.rows() || s_plus.cols() != s_minus.cols()) {
        throw validation_error("empirical_nfl: shape mismatch");
    }
    const double plus = spectral_stats(s_plus).frobenius_sq;
    const double minus = spectral_stats(s_minus).frobenius_sq;
    if (!(plus > 0.0)) throw validation_error("empirical_nfl: degenerate S^+ (zero norm)");
    return minus / plus - 1.0;
}

double trace_limit_minus(double c, const SpectrumSpec& spectrum) {
    if (!(c > 1.0)) throw validation_error("trace_limit_minus: requires c > 1");
    return spectrum.inverse_moment(1) / (c * (c - 1.0));
}

double precision_fro_estimator(const Matrix& s_minus, double c_eff, Index p) {
    if (!(c_eff > 1.0)) throw validation_error("precision_fro_estimator: requires c_eff > 1");
    if (s_minus.rows() != s_minus.cols() || s_minus.rows() != p) {
        throw validation_error("precision_fro_estimator: matrix is not p x p");
    }
    const double fro_sq = s_minus.squaredNorm();
    const double tr = s_minus.trace();
    const double factor = c_eff * (c_eff - 1.0);
    const double corrected =
        fro_sq - (1.0 / (c_eff - 1.0) + c_eff) * tr * tr / static_cast<double>(p);
    return factor * factor * corrected / static_cast<double>(p);
}

SpectrumEquivalents finite_spectrum_equivalents(const CovarianceModel& model, double c) {
    if (!(c > 1.0)) throw validation_error("finite_spectrum_equivalents: requires c > 1");
    const SpectrumSpec h = model.exact_spectrum();
    SpectrumEquivalents eq;
    eq.m_zero = m_gram_zero(c, h);
    eq.fro_plus = m_gram_zero_prime(c, h, eq.m_zero) / c;
    eq.fro_minus = asymptotic_fro_minus(c, h);
    return eq;
}

FrobeniusReport make_frobenius_report(const CovarianceModel& model, const InversePair& pair,
                                      double c_eff) {
    const double p = static_cast<double>(model.dim());
    const SpectrumSpec h = model.exact_spectrum();
    FrobeniusReport rep;
    rep.c_eff = c_eff;
    rep.fro_plus_emp = pair.S_plus.squaredNorm() / p;
    rep.fro_minus_emp = pair.S_minus.squaredNorm() / p;
    rep.fro_plus_asym = asymptotic_fro_plus(c_eff, h);
    rep.fro_minus_asym = asymptotic_fro_minus(c_eff, h);
    rep.nfl_emp = rep.fro_minus_emp / rep.fro_plus_emp - 1.0;
    rep.nfl_asym = rep.fro_minus_asym / rep.fro_plus_asym - 1.0;
    rep.trace_minus_emp = pair.S_minus.trace() / p;
    rep.trace_minus_asym = trace_limit_minus(c_eff, h);
    rep.precision_norm_estimate = precision_fro_estimator(pair.S_minus, c_eff, model.dim());
    rep.precision_norm_true = model.inv_frobenius_sq_over_p();
    return rep;
}

}  // namespace ginv
