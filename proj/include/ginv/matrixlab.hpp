#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <ginv/errors.hpp>
#include <ginv/spectrum.hpp>

namespace ginv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// deterministic sampling

enum class NoiseKind { gaussian, rademacher, uniform_scaled };

NoiseKind noise_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

// splitmix64 step; the basis of all seed derivation
std::uint64_t mix_seed(std::uint64_t x);

// Stable per-task seed: hash-chains the parts into the master seed so that
// execution order can never change sampled data.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// p x n matrix of i.i.d. zero-mean unit-variance entries.  The generator and
// the transforms are fixed here (not delegated to std distributions), so the
// output is identical across platforms for a given (seed, p, n, kind).
Matrix sample_noise(Index p, Index n, NoiseKind kind, std::uint64_t seed);

// ---------------------------------------------------------------------------
// population covariance

// Population covariance with cached spectral form: Sigma = Q diag(tau) Q'.
// The diagonal variant (Q = I) realizes a SpectrumSpec with atom counts
// apportioned by largest remainder; a dense symmetric positive-definite
// matrix is accepted as well.
class CovarianceModel {
public:
    static CovarianceModel diagonal_from_spectrum(const SpectrumSpec& spectrum, Index p);
    static CovarianceModel from_dense(const Matrix& sigma);

    Index dim() const { return eigenvalues_.size(); }
    bool is_diagonal() const { return basis_.size() == 0; }
    const Vector& eigenvalues() const { return eigenvalues_; }  // ascending

    Matrix apply_sqrt(const Matrix& x) const;      // Sigma^{1/2} x
    Matrix apply_inv_sqrt(const Matrix& x) const;  // Sigma^{-1/2} x

    Matrix sigma() const;
    Matrix sqrt_sigma() const;
    Matrix inv_sqrt_sigma() const;
    Matrix inverse() const;

    // Exact discrete spectrum of this finite Sigma (weights 1/p, merged).
    SpectrumSpec exact_spectrum() const;

    // (1/p) ||Sigma^{-1}||_F^2 and (1/p) tr(Sigma^{-1})
    double inv_frobenius_sq_over_p() const;
    double inv_trace_over_p() const;

private:
    CovarianceModel(Vector eigenvalues, Matrix basis);
    Vector eigenvalues_;  // ascending, strictly positive
    Matrix basis_;        // orthonormal columns; empty means diagonal
};

// Largest-remainder apportionment of p slots to the spectrum's atoms.
std::vector<Index> apportion_counts(const SpectrumSpec& spectrum, Index p);

// ---------------------------------------------------------------------------
// scenario

// One simulation configuration.  n = round(p/c); requires n < p (singular
// regime).  When round-off pushes p/n more than 10% away from the target c a
// warning string is attached.
struct Scenario {
    Index p = 0;
    double c = 0.0;  // target concentration
    Index n = 0;
    double c_eff = 0.0;  // p/n
    SpectrumSpec spectrum = SpectrumSpec::identity();
    NoiseKind noise = NoiseKind::gaussian;
    std::uint64_t seed = 0;
    std::optional<std::string> warning;

    static Scenario make(Index p, double c, SpectrumSpec spectrum, NoiseKind noise,
                         std::uint64_t seed);
};

// ---------------------------------------------------------------------------
// sample covariance and its generalized inverses

// Y = Sigma^{1/2} X
Matrix build_observations(const CovarianceModel& model, const Matrix& x);

// S = (1/n) Y Y'; symmetric PSD of rank <= n.
template <typename Derived>
Matrix sample_covariance(const Eigen::MatrixBase<Derived>& y) {
    if (y.cols() < 1) throw validation_error("sample_covariance: need at least one column");
    const double inv_n = 1.0 / static_cast<double>(y.cols());
    Matrix s = Matrix::Zero(y.rows(), y.rows());
    s.selfadjointView<Eigen::Lower>().rankUpdate(y.derived(), inv_n);
    return s.selfadjointView<Eigen::Lower>();
}

// Moore-Penrose inverse of S computed through the n x n Gram matrix:
//   S^+ = (1/n) Y ((1/n) Y'Y)^{-2} Y'.
// Fails when the Gram matrix is numerically singular (condition > 1e12).
Matrix moore_penrose_inverse(const Matrix& y, double* gram_min_eigenvalue = nullptr);

// Reflexive (non Moore-Penrose) inverse built from oracle knowledge of Sigma:
//   S^- = (1/n) Sigma^{-1/2} X ((1/n) X'X)^{-2} X' Sigma^{-1/2}.
// Simulation-only: it is not computable from observed data.
Matrix reflexive_inverse(const CovarianceModel& model, const Matrix& x,
                         double* gram_min_eigenvalue = nullptr);

struct InversePair {
    Matrix S;
    Matrix S_plus;
    Matrix S_minus;
    double gram_eigen_floor;  // smallest Gram eigenvalue met while inverting
};

InversePair make_inverse_pair(const CovarianceModel& model, const Matrix& x);

struct SpectralStats {
    double trace;
    double frobenius_sq;  // tr(A^2) = sum of squared eigenvalues
    Vector eigenvalues;   // descending
};

// Requires symmetry up to 1e-10 relative asymmetry.
SpectralStats spectral_stats(const Matrix& a);

// Relative residuals of the four Penrose conditions for a candidate inverse G
// of S:  S G S = S,  G S G = G,  (S G)' = S G,  (G S)' = G S.
struct PenroseResiduals {
    double product_identity;   // ||S G S - S|| / ||S||
    double reflexive_identity; // ||G S G - G|| / ||G||
    double left_symmetry;      // ||(S G)' - S G|| / ||S G||
    double right_symmetry;     // ||(G S)' - G S|| / ||G S||
};

PenroseResiduals penrose_residuals(const Matrix& s, const Matrix& g);

}  // namespace ginv
