#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include <ginv/spectrum.hpp>

namespace ginv {

using Complex = std::complex<double>;

// The module solves the limiting spectral-transform equations of the two
// generalized inverses of a singular sample covariance matrix, for a
// discrete population spectrum H and concentration c = dim/sample > 1.
//
// Transforms handled here (z in the upper half-plane, m = m(z)):
//
//   Marchenko-Pastur (closed form):
//     m_mp(z) = (1 - c - z + sqrt((1 + c - z)^2 - 4c)) / (2 c z)
//
//   Gram companion transform (limit of the n x n Gram spectrum), fixed point:
//     m = 1 / (c * int tau dH / (1 + tau m) - z)
//   and its z -> 0 limit m0 > 0 solving 1/m0 = c * int tau dH / (1 + tau m0),
//   with derivative  m0' = 1 / (1/m0^2 - c * int tau^2 dH / (1 + tau m0)^2).
//
//   Pseudo-inverse law ("plus"), fixed point:
//     m = -(1/z) * (2 - 1/c + int dH / (z tau c (z m + 1) - 1))
//
//   Reflexive-inverse law ("minus"), fixed point:
//     m = -1/z - (1/z) * int dH / (tau c z^2 m (1 - c/(1 - c - c z m)) - 1)
//
// All fixed points are located by damped Picard iteration (initial damping 1,
// halved whenever the residual grows, floor 1/64) with a Newton finisher on
// the fixed-point defect; solutions are accepted only when the defect is
// below tolerance and Im m > 0 for Im z > 0.

struct SolveOptions {
    double tol = 1e-10;   // fixed-point defect magnitude
    int max_iter = 10000;
};

struct StieltjesSolution {
    Complex z;            // evaluation point
    Complex m;            // transform value
    double residual;      // |defect| of the defining equation at m
    int iterations;       // total iterations spent (Picard + Newton)
    double damping_used;  // damping factor at exit
};

// Closed-form Marchenko-Pastur transform with the square-root branch chosen
// so that Im m > 0 on the upper half-plane; for real z off the support the
// branch continuous with the upper half-plane limit.  c > 0.
Complex mp_stieltjes(Complex z, double c);

// Gram companion transform.  Accepts Im z > 0 or real z outside the support.
StieltjesSolution solve_m_gram(Complex z, double c, const SpectrumSpec& spectrum,
                               SolveOptions opts = {});

// Zero point m0 of the Gram companion transform (unique positive root); tol
// bounds the defect of  c * int tau dH/(1 + tau m) - 1/m.
double m_gram_zero(double c, const SpectrumSpec& spectrum, double tol = 1e-12);

// Derivative of the Gram companion transform at zero, evaluated from m0.
double m_gram_zero_prime(double c, const SpectrumSpec& spectrum, double m_zero);

// Limiting transforms of the two inverse laws at Im z > 0, c > 1.
StieltjesSolution solve_m_plus(Complex z, double c, const SpectrumSpec& spectrum,
                               SolveOptions opts = {});
StieltjesSolution solve_m_minus(Complex z, double c, const SpectrumSpec& spectrum,
                                SolveOptions opts = {});

// (1/p) sum_i 1/(lambda_i - z) for an observed spectrum; Im z > 0.
Complex empirical_stieltjes(const Eigen::VectorXd& eigenvalues, Complex z);

// Moment transform Psi(z) = -(1/z) m(1/z) - 1; takes m already evaluated at
// 1/z.  z != 0.
Complex psi_transform(Complex m_at_inv_z, Complex z);

enum class SpectralLaw { plus, minus, mp };

struct DensityPoint {
    double x;
    double density;  // clipped at zero; NaN when the solve failed
    bool ok;
};

// Stieltjes inversion density(x) ~ Im m(x + i eps) / pi on a positive grid.
// Solver failures are recorded per point and do not abort the sweep.
std::vector<DensityPoint> density_grid(SpectralLaw law, double c, const SpectrumSpec& spectrum,
                                       const std::vector<double>& grid, double epsilon,
                                       SolveOptions opts = {});

}  // namespace ginv
