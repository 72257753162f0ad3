#pragma once

#include "ptqm/dynamics.hpp"
#include "ptqm/numcore.hpp"

#include <string>
#include <vector>

namespace ptqm {

/// Statistical ensemble; for quasi-Hermitian systems the carrier is
/// rho_H = sum_i p_i |psi_i><psi_i| rho with states rho-normalized.
struct DensityMatrix {
    Mat op;      // the (generally non-Hermitian) density operator
    Mat metric;  // identity for Hermitian systems

    double trace_defect() const { return std::abs(op.trace() - cplx(1, 0)); }
    /// Real spectrum of the density operator (clamped imaginary tolerance).
    RVec spectrum(double imag_tol = 1e-9) const;
};

DensityMatrix density_matrix(const std::vector<Vec>& states, const std::vector<double>& probs,
                             const Mat& metric);

/// Standard index contraction over the traced factor; dim = d_A * d_B.
Mat partial_trace(const Mat& rho, Eigen::Index d_A, Eigen::Index d_B, bool keep_A);

/// S = -sum lambda ln lambda with 0 ln 0 = 0; requires unit trace.
double von_neumann(const DensityMatrix& dm, double trace_tol = 1e-8);
double von_neumann_from_eigs(const RVec& lambdas);

/// Heisenberg evolution i hbar d rho/dt = [h, rho] with Hermitian h(t).
TimeSeries<Mat> heisenberg_evolve(const Mat& rho0, const HamiltonianFn& h_fn,
                                  const std::vector<double>& t_grid, const OdeOptions& opt = {});

enum class BathRegime { PTSymmetric, ExceptionalPoint, SpontaneouslyBroken };

struct EntropyCurve {
    RealSeries S;
    RealSeries mu;                       // unwrapped mixing angle
    std::vector<double> lambda_minus, lambda_plus;  // normalized spectrum samples
    BathRegime regime = BathRegime::PTSymmetric;
    double max_norm_deviation = 0;       // |lambda_- + lambda_+ - 1| before renormalizing
};

struct BosonBathParams {
    double g = 0.7, kappa = 0.3;
    int N = 50;
    double c1 = 1.0;
    double gamma = M_PI / 4;  // initial-state angle (input by construction)
};

/// Closed-form reduced-boson entropy across the three regimes, with the
/// arctan branch unwrapped for continuity. lambda_- + lambda_+ is
/// renormalized to one; the deviation is reported, and values outside the
/// admissible range raise a formula-domain error.
EntropyCurve boson_bath_entropy(const BosonBathParams& p, const std::vector<double>& t_grid);

/// Period of the PT-regime curve, pi / (2 sqrt(N) sqrt(g^2 - kappa^2)).
double boson_bath_period(const BosonBathParams& p);

/// Lag (in samples) of the first autocorrelation peak of a uniformly sampled
/// signal; used for the periodicity checks.
std::size_t autocorrelation_peak_lag(const std::vector<double>& signal, std::size_t min_lag);

}  // namespace ptqm
