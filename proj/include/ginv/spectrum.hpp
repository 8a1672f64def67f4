#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <ginv/errors.hpp>

namespace ginv {

struct Atom {
    double weight;
    double eigenvalue;
};

namespace detail {
inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const std::complex<double>& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
}
}  // namespace detail

// Discrete population spectral distribution: a finite mixture of point masses
// on the positive axis.  Canonical form has weights summing to one and
// strictly increasing eigenvalues (duplicates merged by adding weights).
// Immutable after construction; all integrals against it are exact finite sums.
class SpectrumSpec {
public:
    // Validates and canonicalizes a raw atom list.  Weights are treated as
    // relative masses and normalized, so rounded config values like
    // 0.33,0.33,0.33 are accepted.
    static SpectrumSpec canonicalize(std::vector<Atom> raw, std::string label = {});

    // Unit point mass at eigenvalue one (identity covariance).
    static SpectrumSpec identity();

    // Text form used by the CLI: comma-separated weight:eigenvalue pairs,
    // e.g. "0.2:1,0.4:3,0.4:10".
    static SpectrumSpec parse(const std::string& text, std::string label = {});

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    const std::string& label() const { return label_; }
    std::string to_string() const;

    // sum_i w_i f(tau_i); exact, no quadrature.  f may return double or
    // complex<double>.
    template <typename F>
    auto integrate(F&& f) const -> decltype(f(double{})) {
        using R = decltype(f(double{}));
        R acc{};
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            R v = f(atoms_[i].eigenvalue);
            if (!detail::is_finite(v)) {
                throw numeric_error("integrate: integrand not finite at atom " +
                                    std::to_string(i) + " (eigenvalue " +
                                    std::to_string(atoms_[i].eigenvalue) + ")");
            }
            acc += atoms_[i].weight * v;
        }
        return acc;
    }

    // integrate(tau^-k); equals (1/p) tr(Sigma^-k) for an exactly apportioned
    // finite diagonal Sigma.  Supported k: 1, 2.
    double inverse_moment(int k) const;

private:
    SpectrumSpec() = default;
    std::vector<Atom> atoms_;
    std::string label_;
};

}  // namespace ginv
