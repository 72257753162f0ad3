#pragma once

#include "ptqm/numcore.hpp"

#include <array>
#include <functional>
#include <vector>

namespace ptqm {

using HamiltonianFn = std::function<Mat(double)>;

/// Metric and Dyson-map samples along a time grid.
struct MetricTrajectory {
    MatSeries rho;
    MatSeries eta;                 // filled where rho is positive definite
    std::vector<bool> positive;    // per sample
    std::vector<double> det;       // per sample
    double max_resym_drift = 0;    // ||rho - rho^dag|| seen before re-symmetrization

    std::size_t size() const { return rho.size(); }
};

struct TdqheOptions {
    OdeOptions ode{};                // defaults: RK45, tol 1e-10
    double positivity_threshold = 1e-12;
};

/// Integrates i hbar d rho/dt = H^dag rho - rho H, re-symmetrizing at every
/// grid sample (drift logged). Positivity loss clears the per-sample flag but
/// the trajectory continues.
MetricTrajectory tdqhe_integrate(const HamiltonianFn& H_fn, const Mat& rho0,
                                 const std::vector<double>& t_grid, const TdqheOptions& opt = {});

/// Closed-form time-dependent metric for the two-level model,
/// rho(t) = a0 I + a1 sx + a2 sy + a3 sz with four integration constants.
/// The 2x2 square-root chain keeps det(rho) analytic, which is what makes the
/// large-t broken-regime evaluations representable in double precision.
class TwoLevelMetric {
public:
    TwoLevelMetric(double omega, double lambda, double kappa, std::array<double, 4> c);

    /// det(rho) = 1 choice in the PT-symmetric regime (|lambda| > |kappa|).
    static TwoLevelMetric pt_regime(double omega, double lambda, double kappa);
    /// det(rho) = 1 choice in the spontaneously broken regime (|lambda| < |kappa|).
    static TwoLevelMetric broken_regime(double omega, double lambda, double kappa);

    std::array<double, 4> alphas(double t) const;
    std::array<double, 4> alpha_dots(double t) const;
    Mat rho(double t) const;
    Mat rho_dot(double t) const;
    Mat eta(double t) const;       // positive Hermitian square root
    Mat eta_dot(double t) const;
    Mat eta_inv(double t) const;
    Mat hamiltonian() const { return H_; }
    /// h(t) = eta H eta^-1 + i hbar etadot eta^-1 (Hermitian up to roundoff)
    Mat hermitian_h(double t) const;
    /// Htilde(t) = H + i hbar eta^-1 etadot (the observable energy operator)
    Mat energy_op(double t) const;
    double det_rho() const { return det_; }  // time independent here (Im tr H = 0)

    double omega() const { return omega_; }
    double lambda() const { return lambda_; }
    double kappa() const { return kappa_; }

private:
    double omega_, lambda_, kappa_;
    std::array<double, 4> c_;
    cplx Om_;      // sqrt(kappa^2 - lambda^2), possibly imaginary
    double det_;   // analytic det(rho)
    Mat H_;
};

/// Energy-operator trace along a metric trajectory: Htilde = H + i hbar eta^-1 etadot,
/// etadot from a 4th-order stencil on the sampled eta (uniform grid).
struct EnergyTrace {
    MatSeries H_tilde;
    std::vector<double> qh_residual;  // ||rho Htilde - Htilde^dag rho|| per sample
};

EnergyTrace energy_operator(const HamiltonianFn& H_fn, const MetricTrajectory& traj);

/// <psi| rho(t) Htilde(t) |psi> for a fixed state.
CplxSeries expectation_along(const EnergyTrace& trace, const MetricTrajectory& traj, const Vec& psi);

/// Instantaneous eigenvalues with continuity tracking by eigenvector overlap.
struct SpectrumTracks {
    std::vector<double> times;
    std::vector<std::vector<cplx>> tracks;  // tracks[k][i] = branch k at time i
    bool branch_switch_warning = false;
};

SpectrumTracks instantaneous_spectrum(const MatSeries& H_tilde_traj);

/// Time-ordered propagator as a midpoint exponential product over n_steps.
Mat propagator(const HamiltonianFn& H_fn, double t_from, double t_to, int n_steps);

/// Step-doubling until the self-consistency residual drops below tol.
Mat propagator_auto(const HamiltonianFn& H_fn, double t_from, double t_to, double tol = 1e-8,
                    int n0 = 16, int n_max = 1 << 22);

struct DuhamelResult {
    Mat direct;           // U(t,t') by direct time-ordered product
    Mat identity_rhs;     // u - (i/hbar) int U (H - h) u ds  (exact U under the integral)
    Mat first_order;      // same with U -> u (one-step iterated series)
    double identity_residual = 0;
};

DuhamelResult duhamel_first_order(const HamiltonianFn& H_fn, const HamiltonianFn& h_fn,
                                  double t_from, double t_to, int quad_points = 200,
                                  int prop_steps = 4096);

/// G(t,t') = -(i/hbar) U(t,t') theta(t-t'), theta(0) = 1.
Mat greens_function(const HamiltonianFn& H_fn, double t, double t_prime, int n_steps = 2048);

}  // namespace ptqm
