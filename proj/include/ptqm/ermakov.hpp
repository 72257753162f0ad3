#pragma once

#include "ptqm/models.hpp"
#include "ptqm/numcore.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace ptqm {

using ScalarFn = std::function<double(double)>;

/// Sampled positive solution of an Ermakov-Pinney equation together with its
/// first two derivatives and the per-sample residual of the governing form.
struct EPSolution {
    std::vector<double> times;
    std::vector<double> value;   // chi or sigma
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<double> residual;

    double max_residual() const;
};

/// Pinney superposition sigma = sqrt(A u^2 + B v^2 + 2 C u v) for
/// u'' = kappa(t) u, v'' = kappa(t) v, checked against
/// sigma'' - kappa sigma - omega^2 / sigma^3 = 0.
/// The admissible C satisfies C^2 = A B - omega^2 / W^2 with W the Wronskian;
/// the residual check is the ground truth for the constraint form.
struct PinneyInput {
    ScalarFn kappa;
    double omega = 1.0;
    double A = 1.0, B = 1.0, C = 0.0;
    // u, v and derivatives; if absent they are integrated numerically from
    // u(0)=1, u'(0)=0, v(0)=0, v'(0)=1
    std::optional<std::array<ScalarFn, 4>> uv;  // {u, u', v, v'}
};

EPSolution pinney_sigma(const PinneyInput& in, const std::vector<double>& t_grid);

/// Wronskian-consistent C for given A, B, omega (squared-Wronskian form).
double pinney_constraint_c(double A, double B, double omega, double wronskian);

/// chi(t) = sqrt((1+c3^2) cosh^2(c4 - int lambda) - c3^2), the closed-form
/// solution of the dissipative equation
/// chi'' - (lambda'/lambda) chi' - lambda^2 chi = c3^2 lambda^2 / chi^3.
struct DissipativeEPInput {
    ScalarFn lambda;
    ScalarFn lambda_dot;  // for the residual; may be empty if residuals not wanted
    double c3 = 1.0;
    double c4 = 0.0;
};

EPSolution dissipative_ep_chi(const DissipativeEPInput& in, const std::vector<double>& t_grid);

/// gamma3 = sgn(c4 - int lambda) arccosh(chi), gamma4 = arcsinh(c3 sech gamma3);
/// the signed branch keeps the pair smooth through chi = 1 and on the flow
/// gamma3' = -lambda cosh gamma4, gamma4' = lambda tanh gamma3 sinh gamma4.
struct GammaChain {
    std::vector<double> times;
    std::vector<double> gamma3, gamma4;
    std::vector<double> gamma3_dot, gamma4_dot;  // from the flow equations
    double c1 = 0, c2 = 0, c3 = 0;

    /// max | sinh(gamma4) cosh(gamma3) - c3 |
    double constraint_defect() const;
};

GammaChain gamma_chain(const DissipativeEPInput& in, const std::vector<double>& t_grid,
                       double c1 = 0, double c2 = 0);

struct HkChainResult {
    Mat h;         // a (K1+K2) + (lambda/2)(sinh g4 / cosh g3)(K1-K2)
    Mat H_tilde;   // energy operator
    Mat eta;       // e^{c1 K1} e^{c2 K2} e^{g3 K3} e^{g4 K4}
    Mat rho;       // eta^dag eta
    double tdde_residual_interior = 0;  // || eta H eta^-1 + i hbar etadot eta^-1 - h ||
    double h_defect_interior = 0;
};

struct HkChainOptions {
    bool long_double_conjugation = true;  // the direct-conjugation check needs the headroom
};

/// Assembles the time-dependent Hermitian partner and the energy operator for
/// H_K(t) = a(t)(K1+K2) + i lambda(t) K3 at one time, including the
/// direct-conjugation TDDE residual on the interior sector.
HkChainResult hk_hermitian_and_energy(const ScalarFn& a_fn, const ScalarFn& lambda_fn,
                                      const GammaChain& chain, std::size_t sample,
                                      const TwoModeK& k, const HkChainOptions& opt = {});

}  // namespace ptqm
