#include <ginv/stieltjes.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace ginv {

namespace {

constexpr double kAlphaFloor = 1.0 / 64.0;
constexpr int kStallLimit = 500;  // Picard iterations without residual improvement
constexpr int kNewtonLimit = 60;

std::string fmt_z(Complex z) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", z.real(), z.imag());
    return buf;
}

// Damped Picard iteration on m = rhs(m) with a Newton finisher on the defect
// F(m) = rhs(m) - m.  Picard keeps the best iterate seen; Newton starts from
// it once Picard converges too slowly (near the real axis the contraction
// rate degrades like 1 - O(Im z)) or stalls.
template <typename Rhs, typename RhsPrime>
StieltjesSolution hybrid_fixed_point(const char* name, Complex z, Complex m0, Rhs rhs,
                                     RhsPrime rhs_prime, const SolveOptions& opts) {
    Complex m = m0;
    double alpha = 1.0;
    double r_prev = std::numeric_limits<double>::infinity();
    Complex best_m = m;
    double best_r = std::numeric_limits<double>::infinity();
    int since_best = 0;
    int it = 0;
    while (it < opts.max_iter) {
        ++it;
        const Complex f = rhs(m);
        const double r = std::abs(f - m);
        if (!std::isfinite(r)) break;  // stepped onto a pole; Newton restarts from best
        if (r < best_r) {
            best_m = m;
            best_r = r;
            since_best = 0;
        } else if (++since_best >= kStallLimit) {
            break;
        }
        if (r < opts.tol) return {z, m, r, it, alpha};
        if (r > r_prev && alpha > kAlphaFloor) alpha = std::max(alpha / 2.0, kAlphaFloor);
        m = (1.0 - alpha) * m + alpha * f;
        r_prev = r;
    }

    m = best_m;
    double r = best_r;
    for (int k = 0; k < kNewtonLimit; ++k) {
        const Complex defect = rhs(m) - m;
        r = std::abs(defect);
        if (r < opts.tol) return {z, m, r, it + k, alpha};
        const Complex slope = rhs_prime(m) - 1.0;
        if (!detail::is_finite(slope) || slope == Complex(0.0, 0.0)) break;
        const Complex next = m - defect / slope;
        if (!detail::is_finite(next)) break;
        m = next;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    throw numeric_error(std::string(name) + ": no convergence at z=" + fmt_z(z) +
                        ", last residual " + buf);
}

void require_upper_half(const char* name, Complex z) {
    if (!(z.imag() > 0.0)) {
        throw validation_error(std::string(name) + ": z must lie in the upper half-plane, got z=" +
                               fmt_z(z));
    }
}

void check_herglotz(const char* name, Complex z, Complex m) {
    if (z.imag() > 0.0 && !(m.imag() > 0.0)) {
        throw numeric_error(std::string(name) + ": converged to a branch with Im m <= 0 at z=" +
                            fmt_z(z));
    }
}

Complex gram_rhs_at(Complex m, Complex z, double c, const SpectrumSpec& spectrum) {
    Complex acc(0.0, 0.0);
    for (const Atom& a : spectrum.atoms()) acc += a.weight * a.eigenvalue / (1.0 + a.eigenvalue * m);
    return 1.0 / (c * acc - z);
}

Complex plus_rhs_at(Complex m, Complex z, double c, const SpectrumSpec& spectrum) {
    Complex acc(0.0, 0.0);
    for (const Atom& a : spectrum.atoms())
        acc += a.weight / (z * a.eigenvalue * c * (z * m + 1.0) - 1.0);
    return -(1.0 / z) * (2.0 - 1.0 / c + acc);
}

}  // namespace

Complex mp_stieltjes(Complex z, double c) {
    if (!(c > 0.0)) throw validation_error("mp_stieltjes: c must be positive");
    if (z == Complex(0.0, 0.0)) throw numeric_error("mp_stieltjes: pole at z = 0");
    if (z.imag() < 0.0) return std::conj(mp_stieltjes(std::conj(z), c));

    const Complex w = std::sqrt((1.0 + c - z) * (1.0 + c - z) - 4.0 * c);
    const Complex m1 = (1.0 - c - z + w) / (2.0 * c * z);
    const Complex m2 = (1.0 - c - z - w) / (2.0 * c * z);
    if (z.imag() > 0.0) return m1.imag() > 0.0 ? m1 : m2;

    // real z off the support: pick the root continuous with the limit from above
    const double delta = 1e-8 * std::max(1.0, std::abs(z));
    const Complex ref = mp_stieltjes(z + Complex(0.0, delta), c);
    return std::abs(m1 - ref) < std::abs(m2 - ref) ? m1 : m2;
}

StieltjesSolution solve_m_gram(Complex z, double c, const SpectrumSpec& spectrum,
                               SolveOptions opts) {
    if (!(c > 0.0)) throw validation_error("solve_m_gram: c must be positive");
    if (z == Complex(0.0, 0.0)) {
        throw validation_error("solve_m_gram: z = 0 is handled by m_gram_zero");
    }
    auto rhs = [&](Complex m) { return gram_rhs_at(m, z, c, spectrum); };
    auto rhs_prime = [&](Complex m) {
        Complex s1(0.0, 0.0), s2(0.0, 0.0);
        for (const Atom& a : spectrum.atoms()) {
            const Complex d = 1.0 + a.eigenvalue * m;
            s1 += a.weight * a.eigenvalue / d;
            s2 += a.weight * a.eigenvalue * a.eigenvalue / (d * d);
        }
        const Complex den = c * s1 - z;
        return c * s2 / (den * den);
    };
    StieltjesSolution sol = hybrid_fixed_point("solve_m_gram", z, -1.0 / z, rhs, rhs_prime, opts);
    check_herglotz("solve_m_gram", z, sol.m);
    return sol;
}

double m_gram_zero(double c, const SpectrumSpec& spectrum, double tol) {
    if (!(c > 1.0)) throw validation_error("m_gram_zero: requires c > 1");
    // phi(m) = c m int tau dH/(1+tau m) - 1 rises from -1 to c - 1 > 0
    auto phi = [&](double m) {
        return c * m * spectrum.integrate([&](double t) { return t / (1.0 + t * m); }) - 1.0;
    };
    double lo = 1e-12, hi = 1.0;
    int guard = 0;
    while (phi(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 128) throw numeric_error("m_gram_zero: bracketing failed");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    double m = 0.5 * (lo + hi);
    // Newton polish on the defect form f(m) = c int tau dH/(1+tau m) - 1/m
    for (int i = 0; i < 8; ++i) {
        const double f =
            c * spectrum.integrate([&](double t) { return t / (1.0 + t * m); }) - 1.0 / m;
        if (std::abs(f) < tol) break;
        const double fp =
            -c * spectrum.integrate([&](double t) { return t * t / ((1.0 + t * m) * (1.0 + t * m)); }) +
            1.0 / (m * m);
        m -= f / fp;
    }
    const double defect =
        c * spectrum.integrate([&](double t) { return t / (1.0 + t * m); }) - 1.0 / m;
    if (!(std::abs(defect) < tol)) {
        throw numeric_error("m_gram_zero: defect " + std::to_string(defect) + " above tolerance");
    }
    return m;
}

double m_gram_zero_prime(double c, const SpectrumSpec& spectrum, double m_zero) {
    if (!(m_zero > 0.0)) throw validation_error("m_gram_zero_prime: m_zero must be positive");
    const double tail = c * spectrum.integrate([&](double t) {
        const double d = 1.0 + t * m_zero;
        return t * t / (d * d);
    });
    const double den = 1.0 / (m_zero * m_zero) - tail;
    if (!(den > 0.0)) {
        throw numeric_error("m_gram_zero_prime: nonpositive denominator (c too close to 1)");
    }
    return 1.0 / den;
}

StieltjesSolution solve_m_plus(Complex z, double c, const SpectrumSpec& spectrum,
                               SolveOptions opts) {
    if (!(c > 1.0)) throw validation_error("solve_m_plus: requires c > 1");
    require_upper_half("solve_m_plus", z);

    // The plus law relates algebraically to the Gram companion transform:
    //   m_plus(z) = -1/z - m_gram(1/z) / (c z^2),
    // with m_gram(1/z) reached through conjugation since 1/z lies in the
    // lower half-plane.  The Gram fixed point is a Herglotz self-map, so the
    // iteration cannot be captured by the spurious large-|z| branch of the
    // plus equation.
    const Complex w = 1.0 / std::conj(z);
    SolveOptions inner = opts;
    inner.tol = opts.tol * std::min(1.0, c * std::norm(z)) / 4.0;
    const StieltjesSolution gram = solve_m_gram(w, c, spectrum, inner);
    Complex m = -1.0 / z - std::conj(gram.m) / (c * z * z);

    auto defect_at = [&](Complex mm) { return plus_rhs_at(mm, z, c, spectrum) - mm; };
    double defect = std::abs(defect_at(m));
    int iterations = gram.iterations;
    // polish on the plus equation itself if tolerance transfer fell short
    for (int k = 0; k < kNewtonLimit && !(defect < opts.tol); ++k, ++iterations) {
        Complex slope(0.0, 0.0);
        for (const Atom& a : spectrum.atoms()) {
            const Complex d = z * a.eigenvalue * c * (z * m + 1.0) - 1.0;
            slope += a.weight * a.eigenvalue / (d * d);
        }
        slope = z * c * slope - 1.0;
        if (!detail::is_finite(slope) || slope == Complex(0.0, 0.0)) break;
        m -= defect_at(m) / slope;
        defect = std::abs(defect_at(m));
    }
    if (!(defect < opts.tol)) {
        throw numeric_error("solve_m_plus: defect above tolerance at z=" + fmt_z(z));
    }
    check_herglotz("solve_m_plus", z, m);
    return {z, m, defect, iterations, gram.damping_used};
}

StieltjesSolution solve_m_minus(Complex z, double c, const SpectrumSpec& spectrum,
                                SolveOptions opts) {
    if (!(c > 1.0)) throw validation_error("solve_m_minus: requires c > 1");
    require_upper_half("solve_m_minus", z);

    auto q_at = [&](Complex m, double tau) {
        return tau * c * z * z * m * (1.0 - c / (1.0 - c - c * z * m)) - 1.0;
    };
    auto rhs = [&](Complex m) {
        Complex acc(0.0, 0.0);
        for (const Atom& a : spectrum.atoms()) acc += a.weight / q_at(m, a.eigenvalue);
        return -1.0 / z - (1.0 / z) * acc;
    };
    auto rhs_prime = [&](Complex m) {
        Complex acc(0.0, 0.0);
        const Complex g = 1.0 - c - c * z * m;
        for (const Atom& a : spectrum.atoms()) {
            const Complex q = q_at(m, a.eigenvalue);
            const Complex dq = a.eigenvalue * c * z * z * (1.0 - c * (1.0 - c) / (g * g));
            acc += a.weight * dq / (q * q);
        }
        return (1.0 / z) * acc;
    };

    // Moment-aware start: m ~ -1/z - mu1/z^2 with mu1 the mean of the minus
    // law.  The plain -1/z start drifts to a non-principal root once |z| is a
    // few units above the support.
    const double mu1 =
        spectrum.integrate([](double t) { return 1.0 / t; }) / (c * (c - 1.0));
    const Complex m0 = -1.0 / z - mu1 / (z * z);
    StieltjesSolution sol = hybrid_fixed_point("solve_m_minus", z, m0, rhs, rhs_prime, opts);
    check_herglotz("solve_m_minus", z, sol.m);
    return sol;
}

Complex empirical_stieltjes(const Eigen::VectorXd& eigenvalues, Complex z) {
    require_upper_half("empirical_stieltjes", z);
    if (eigenvalues.size() == 0) throw validation_error("empirical_stieltjes: empty spectrum");
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) acc += 1.0 / (eigenvalues[i] - z);
    return acc / static_cast<double>(eigenvalues.size());
}

Complex psi_transform(Complex m_at_inv_z, Complex z) {
    if (z == Complex(0.0, 0.0)) throw numeric_error("psi_transform: pole at z = 0");
    return -(1.0 / z) * m_at_inv_z - 1.0;
}

std::vector<DensityPoint> density_grid(SpectralLaw law, double c, const SpectrumSpec& spectrum,
                                       const std::vector<double>& grid, double epsilon,
                                       SolveOptions opts) {
    if (!(epsilon > 0.0)) throw validation_error("density_grid: epsilon must be positive");
    std::vector<DensityPoint> out;
    out.reserve(grid.size());
    for (double x : grid) {
        if (!(x > 0.0)) throw validation_error("density_grid: grid points must be positive");
        const Complex z(x, epsilon);
        DensityPoint pt{x, std::numeric_limits<double>::quiet_NaN(), false};
        try {
            Complex m;
            switch (law) {
                case SpectralLaw::mp: m = mp_stieltjes(z, c); break;
                case SpectralLaw::plus: m = solve_m_plus(z, c, spectrum, opts).m; break;
                case SpectralLaw::minus: m = solve_m_minus(z, c, spectrum, opts).m; break;
            }
            pt.density = std::max(0.0, m.imag() / M_PI);
            pt.ok = true;
        } catch (const numeric_error&) {
            // leave the point marked missing; the sweep continues
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace ginv
