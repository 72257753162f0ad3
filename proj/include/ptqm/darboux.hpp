#pragma once

#include "ptqm/numcore.hpp"

#include <functional>
#include <vector>

namespace ptqm {

/// Uniform Dirichlet grid; the n stored points exclude the endpoints.
struct Grid1D {
    double x_min = -10, x_max = 10;
    int n = 2000;

    double h() const { return (x_max - x_min) / (n + 1); }
    double point(int j) const { return x_min + (j + 1) * h(); }
    RVec points() const {
        RVec x(n);
        for (int j = 0; j < n; ++j) x[j] = point(j);
        return x;
    }
    void validate() const {
        if (n < 200) throw Error("Grid1D: need at least 200 points");
        if (x_max <= x_min) throw Error("Grid1D: empty interval");
    }
};

using Field = Vec;
using FieldSeries = TimeSeries<Vec>;

/// 4th-order first derivative (one-sided at the ends).
Field grid_d1(const Field& f, const Grid1D& g);
/// Second derivative: 4th-order central inside, 2nd-order at the edge rows,
/// Dirichlet (f = 0) beyond the endpoints.
Field grid_d2(const Field& f, const Grid1D& g);

/// Indices where |u| >= rel * max|u|; derivative-quality assertions live here.
std::vector<int> trust_window(const Field& u, double rel = 1e-6);

struct SusyFactorization {
    Grid1D grid;
    Field W, V1, V2;

    Field apply_Lp(const Field& f) const;  // -d/dx + W
    Field apply_Lm(const Field& f) const;  // +d/dx + W
    Field apply_H1(const Field& f) const;  // -d2 + V1 (3-point stencil)
    Field apply_H2(const Field& f) const;
    /// ||(H1 - L+ L-) f|| / ||f|| over the interior (edge rows dropped)
    double factorization_defect_H1(const Field& f) const;
    double factorization_defect_H2(const Field& f) const;
    /// Tridiagonal spectra (real superpotentials only), lowest k levels.
    RVec eig_H1(int k) const;
    RVec eig_H2(int k) const;
};

SusyFactorization susy_factorize(const std::function<cplx(double)>& W_fn, const Grid1D& grid);

/// Richardson-extrapolated lowest spectra of the SUSY pair on grids n and 2n.
struct SusySpectra {
    RVec E1, E2;
};
SusySpectra susy_spectra_richardson(const std::function<cplx(double)>& W_fn, const Grid1D& grid,
                                    int k_levels);

struct ComplexifiedSuperpotential {
    Field W;  // W_r + i W_i
    Field V1, V2;
    double max_im_V1 = 0, max_im_V2 = 0;
};

/// W_r = sign * (1/2) d/dx ln W_i; exactly one of V1, V2 comes out real.
ComplexifiedSuperpotential complexify_superpotential(const std::function<double(double)>& Wi_fn,
                                                     int sign, const Grid1D& grid);

/// Crank-Nicolson TDSE evolution for h = -d2 + v(x,t) (units of h_j = p^2 + v_j).
FieldSeries cn_evolve(const std::function<cplx(double, double)>& v, const Field& psi0,
                      const Grid1D& grid, const std::vector<double>& t_grid);

/// || i psi_t + psi_xx - v psi || / ||psi|| on the trust window, psi_t from a
/// 2nd-order time stencil on the sampled series.
double tdse_residual(const FieldSeries& psi, const std::function<cplx(double, double)>& v,
                     const Grid1D& grid, double trust_rel = 1e-6);

struct TdDarbouxResult {
    FieldSeries u;        // seed
    FieldSeries phi1;     // transformed solution
    FieldSeries v1;       // partner potential samples
    RealSeries l1;        // gauge function
    double max_im_v1 = 0;            // the construction forces v1 real
    double im_s_x_dependence = 0;    // x-spread of Im(v0 + 2(u_x/u)^2 - 2 u_xx/u)
};

/// Time-dependent Hermitian Darboux transformation from a seed solution of
/// i u_t = -u_xx + v0 u. The seed must be nodeless on the trust window.
TdDarbouxResult td_darboux_hermitian(const std::function<cplx(double, double)>& v0,
                                     const FieldSeries& u_seed, const Grid1D& grid,
                                     double trust_rel = 1e-6);

/// Multiplication-operator Dyson map w(x,t) with its time derivative.
struct GaugeOp {
    std::function<cplx(double, double)> w;
    std::function<cplx(double, double)> w_dot;

    Field apply(const Field& f, const Grid1D& g, double t) const;
    Field apply_inv(const Field& f, const Grid1D& g, double t) const;
};

inline GaugeOp identity_gauge() {
    return {[](double, double) { return cplx(1, 0); }, [](double, double) { return cplx(0, 0); }};
}

struct TdDarbouxNHResult {
    double intertwining_residual = 0;  // (IH) applied to the supplied test function
    FieldSeries psi1;                  // eta1^{-1} (1/(l1 (eta0 U)^*)) int^x |eta0 U|^2
    double psi1_tdse_residual = 0;     // against the H1-TDSE
    bool psi1_nodeless = true;
};

/// Non-Hermitian time-dependent Darboux: L = eta1^{-1} l eta0 with
/// H_j = eta_j^{-1} h_j eta_j - i hbar eta_j^{-1} eta_j'. The test function
/// needs an analytic time derivative.
TdDarbouxNHResult td_darboux_nonhermitian(
    const std::function<cplx(double, double)>& v0, const TdDarbouxResult& hermitian,
    const GaugeOp& eta0, const GaugeOp& eta1, const Grid1D& grid,
    const std::function<cplx(double, double)>& psi_test,
    const std::function<cplx(double, double)>& psi_test_dot, double trust_rel = 1e-6);

}  // namespace ptqm
