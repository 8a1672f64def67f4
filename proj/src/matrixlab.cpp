#include <ginv/matrixlab.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ginv {

namespace {

constexpr double kGramConditionLimit = 1e12;
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrt3 = 1.7320508075688772935274463415059;

// Scalar stream with fixed transforms on top of mt19937_64; std::*_distribution
// is implementation-defined, which would break cross-platform replay.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed) : rng_(seed) {}

    // uniform on (0, 1]
    double uniform01() {
        return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
    }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double theta = kTwoPi * uniform01();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double rademacher() { return (rng_() >> 63) ? 1.0 : -1.0; }

    double uniform_scaled() { return (2.0 * uniform01() - 1.0) * kSqrt3; }

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

Matrix symmetric_from_lower(Matrix&& m) {
    return m.selfadjointView<Eigen::Lower>();
}

// Factor F = V diag(1/d) from the spectral form of the Gram matrix
// G = (1/n) M'M = V diag(d) V', guarded against numerical singularity.
Matrix gram_inverse_factor(const char* name, const Matrix& m, double* min_eig_out) {
    const Index n = m.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix gram = Matrix::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose(), inv_n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_from_lower(std::move(gram)));
    if (es.info() != Eigen::Success) {
        throw numeric_error(std::string(name) + ": Gram eigendecomposition failed");
    }
    const Vector& d = es.eigenvalues();  // ascending
    const double dmin = d[0];
    const double dmax = d[n - 1];
    if (min_eig_out) *min_eig_out = dmin;
    if (!(dmin > 0.0) || dmax / dmin > kGramConditionLimit) {
        throw numeric_error(std::string(name) + ": singular Gram matrix, smallest eigenvalue " +
                            std::to_string(dmin));
    }
    return es.eigenvectors() * d.cwiseInverse().asDiagonal();
}

}  // namespace

NoiseKind noise_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "rademacher") return NoiseKind::rademacher;
    if (name == "uniform-scaled" || name == "uniform") return NoiseKind::uniform_scaled;
    throw validation_error("unknown noise kind '" + name +
                           "' (expected gaussian|rademacher|uniform-scaled)");
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::rademacher: return "rademacher";
        case NoiseKind::uniform_scaled: return "uniform-scaled";
    }
    return "?";
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    std::uint64_t s = mix_seed(master);
    s = mix_seed(s ^ a);
    s = mix_seed(s ^ b);
    s = mix_seed(s ^ c);
    return s;
}

Matrix sample_noise(Index p, Index n, NoiseKind kind, std::uint64_t seed) {
    if (p < 1 || n < 1) throw validation_error("sample_noise: dimensions must be positive");
    NoiseStream stream(seed);
    Matrix x(p, n);
    // column-major fill order is part of the replay contract
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < p; ++i) {
            switch (kind) {
                case NoiseKind::gaussian: x(i, j) = stream.gaussian(); break;
                case NoiseKind::rademacher: x(i, j) = stream.rademacher(); break;
                case NoiseKind::uniform_scaled: x(i, j) = stream.uniform_scaled(); break;
            }
        }
    }
    return x;
}

// ---------------------------------------------------------------------------

std::vector<Index> apportion_counts(const SpectrumSpec& spectrum, Index p) {
    if (p < 1) throw validation_error("apportion_counts: p must be positive");
    const auto& atoms = spectrum.atoms();
    std::vector<Index> counts(atoms.size());
    std::vector<double> remainders(atoms.size());
    Index assigned = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double exact = atoms[i].weight * static_cast<double>(p);
        counts[i] = static_cast<Index>(std::floor(exact));
        remainders[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (Index k = 0; k < p - assigned; ++k) ++counts[order[static_cast<std::size_t>(k)]];
    return counts;
}

CovarianceModel::CovarianceModel(Vector eigenvalues, Matrix basis)
    : eigenvalues_(std::move(eigenvalues)), basis_(std::move(basis)) {}

CovarianceModel CovarianceModel::diagonal_from_spectrum(const SpectrumSpec& spectrum, Index p) {
    const auto counts = apportion_counts(spectrum, p);
    Vector eigs(p);
    Index k = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (Index j = 0; j < counts[i]; ++j) eigs[k++] = spectrum.atoms()[i].eigenvalue;
    }
    return CovarianceModel(std::move(eigs), Matrix());
}

CovarianceModel CovarianceModel::from_dense(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1) {
        throw validation_error("covariance: matrix must be square and nonempty");
    }
    const double scale = std::max(1.0, sigma.norm());
    if ((sigma - sigma.transpose()).norm() > 1e-10 * scale) {
        throw validation_error("covariance: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.transpose()));
    if (es.info() != Eigen::Success) throw numeric_error("covariance: eigendecomposition failed");
    const Vector& d = es.eigenvalues();
    if (!(d[0] > 0.0) || d[0] < 1e-12 * d[d.size() - 1]) {
        throw validation_error("covariance: matrix is not positive definite (min eigenvalue " +
                               std::to_string(d[0]) + ")");
    }
    return CovarianceModel(d, es.eigenvectors());
}

Matrix CovarianceModel::apply_sqrt(const Matrix& x) const {
    if (x.rows() != dim()) throw validation_error("apply_sqrt: dimension mismatch");
    if (is_diagonal()) return eigenvalues_.cwiseSqrt().asDiagonal() * x;
    return basis_ * (eigenvalues_.cwiseSqrt().asDiagonal() * (basis_.transpose() * x));
}

Matrix CovarianceModel::apply_inv_sqrt(const Matrix& x) const {
    if (x.rows() != dim()) throw validation_error("apply_inv_sqrt: dimension mismatch");
    const Vector s = eigenvalues_.cwiseSqrt().cwiseInverse();
    if (is_diagonal()) return s.asDiagonal() * x;
    return basis_ * (s.asDiagonal() * (basis_.transpose() * x));
}

Matrix CovarianceModel::sigma() const {
    if (is_diagonal()) return eigenvalues_.asDiagonal();
    return basis_ * eigenvalues_.asDiagonal() * basis_.transpose();
}

Matrix CovarianceModel::sqrt_sigma() const {
    if (is_diagonal()) return Matrix(eigenvalues_.cwiseSqrt().asDiagonal());
    return basis_ * eigenvalues_.cwiseSqrt().asDiagonal() * basis_.transpose();
}

Matrix CovarianceModel::inv_sqrt_sigma() const {
    const Vector s = eigenvalues_.cwiseSqrt().cwiseInverse();
    if (is_diagonal()) return Matrix(s.asDiagonal());
    return basis_ * s.asDiagonal() * basis_.transpose();
}

Matrix CovarianceModel::inverse() const {
    const Vector s = eigenvalues_.cwiseInverse();
    if (is_diagonal()) return Matrix(s.asDiagonal());
    return basis_ * s.asDiagonal() * basis_.transpose();
}

SpectrumSpec CovarianceModel::exact_spectrum() const {
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(dim()));
    const double w = 1.0 / static_cast<double>(dim());
    for (Index i = 0; i < dim(); ++i) atoms.push_back({w, eigenvalues_[i]});
    return SpectrumSpec::canonicalize(std::move(atoms));
}

double CovarianceModel::inv_frobenius_sq_over_p() const {
    return eigenvalues_.cwiseInverse().squaredNorm() / static_cast<double>(dim());
}

double CovarianceModel::inv_trace_over_p() const {
    return eigenvalues_.cwiseInverse().sum() / static_cast<double>(dim());
}

// ---------------------------------------------------------------------------

Scenario Scenario::make(Index p, double c, SpectrumSpec spectrum, NoiseKind noise,
                        std::uint64_t seed) {
    if (p < 2) throw validation_error("scenario: p must be at least 2");
    if (!(c > 1.0)) throw validation_error("scenario: requires concentration c > 1");
    Scenario sc;
    sc.p = p;
    sc.c = c;
    sc.n = std::max<Index>(1, static_cast<Index>(std::llround(static_cast<double>(p) / c)));
    if (sc.n >= p) {
        throw validation_error("scenario: p/c rounds to n >= p; not in the singular regime");
    }
    sc.c_eff = static_cast<double>(p) / static_cast<double>(sc.n);
    sc.spectrum = std::move(spectrum);
    sc.noise = noise;
    sc.seed = seed;
    if (std::abs(sc.c_eff - c) > 0.10 * c) {
        sc.warning = "effective ratio p/n = " + std::to_string(sc.c_eff) +
                     " deviates more than 10% from target c = " + std::to_string(c);
    }
    return sc;
}

Matrix build_observations(const CovarianceModel& model, const Matrix& x) {
    return model.apply_sqrt(x);
}

Matrix moore_penrose_inverse(const Matrix& y, double* gram_min_eigenvalue) {
    const Matrix f = gram_inverse_factor("moore_penrose_inverse", y, gram_min_eigenvalue);
    const Matrix b = y * f;
    const double inv_n = 1.0 / static_cast<double>(y.cols());
    Matrix s = Matrix::Zero(y.rows(), y.rows());
    s.selfadjointView<Eigen::Lower>().rankUpdate(b, inv_n);
    return symmetric_from_lower(std::move(s));
}

Matrix reflexive_inverse(const CovarianceModel& model, const Matrix& x,
                         double* gram_min_eigenvalue) {
    if (x.rows() != model.dim()) throw validation_error("reflexive_inverse: dimension mismatch");
    const Matrix f = gram_inverse_factor("reflexive_inverse", x, gram_min_eigenvalue);
    const Matrix b = model.apply_inv_sqrt(x * f);
    const double inv_n = 1.0 / static_cast<double>(x.cols());
    Matrix s = Matrix::Zero(x.rows(), x.rows());
    s.selfadjointView<Eigen::Lower>().rankUpdate(b, inv_n);
    return symmetric_from_lower(std::move(s));
}

InversePair make_inverse_pair(const CovarianceModel& model, const Matrix& x) {
    InversePair pair;
    const Matrix y = build_observations(model, x);
    pair.S = sample_covariance(y);
    double floor_plus = 0.0, floor_minus = 0.0;
    pair.S_plus = moore_penrose_inverse(y, &floor_plus);
    pair.S_minus = reflexive_inverse(model, x, &floor_minus);
    pair.gram_eigen_floor = std::min(floor_plus, floor_minus);
    return pair;
}

SpectralStats spectral_stats(const Matrix& a) {
    if (a.rows() != a.cols()) throw validation_error("spectral_stats: matrix must be square");
    const double scale = std::max(1.0, a.norm());
    if ((a - a.transpose()).norm() > 1e-10 * scale) {
        throw validation_error("spectral_stats: matrix asymmetry exceeds tolerance");
    }
    SpectralStats stats;
    stats.trace = a.trace();
    stats.frobenius_sq = a.squaredNorm();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw numeric_error("spectral_stats: eigensolver failed");
    stats.eigenvalues = es.eigenvalues().reverse();
    return stats;
}

PenroseResiduals penrose_residuals(const Matrix& s, const Matrix& g) {
    const Matrix sg = s * g;
    const Matrix gs = g * s;
    PenroseResiduals r;
    r.product_identity = (sg * s - s).norm() / s.norm();
    r.reflexive_identity = (gs * g - g).norm() / g.norm();
    r.left_symmetry = (sg.transpose() - sg).norm() / sg.norm();
    r.right_symmetry = (gs.transpose() - gs).norm() / gs.norm();
    return r;
}

}  // namespace ginv
