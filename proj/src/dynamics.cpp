#include "ptqm/dynamics.hpp"

#include "ptqm/models.hpp"

#include <algorithm>
#include <cmath>

namespace ptqm {

MetricTrajectory tdqhe_integrate(const HamiltonianFn& H_fn, const Mat& rho0,
                                 const std::vector<double>& t_grid, const TdqheOptions& opt) {
    require_square(rho0, "tdqhe_integrate");
    if (hermiticity_defect(rho0) > 1e-10 * rel_scale(rho0))
        throw Error("tdqhe_integrate: rho0 must be Hermitian");
    const double hb = hbar();
    auto rhs = [&](double t, const Mat& r) -> Mat {
        Mat H = H_fn(t);
        return cplx(0, -1.0 / hb) * (H.adjoint() * r - r * H);
    };

    MetricTrajectory out;
    Mat rho = (rho0 + rho0.adjoint()) / 2.0;
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
        if (g > 0) {
            auto seg = ode_integrate_matrix(rhs, rho, {t_grid[g - 1], t_grid[g]}, opt.ode);
            rho = seg.values.back();
        }
        out.max_resym_drift = std::max(out.max_resym_drift, hermiticity_defect(rho));
        rho = (rho + rho.adjoint()) / 2.0;
        out.rho.push_back(t_grid[g], rho);
        out.det.push_back(rho.determinant().real());
        auto ew = eigh(rho);
        const bool pos = ew.eigenvalues.minCoeff() > opt.positivity_threshold;
        out.positive.push_back(pos);
        if (pos) {
            out.eta.push_back(t_grid[g],
                              Mat(ew.eigenvectors * ew.eigenvalues.cwiseSqrt().asDiagonal() *
                                  ew.eigenvectors.adjoint()));
        } else {
            out.eta.push_back(t_grid[g], Mat::Zero(rho.rows(), rho.cols()));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// two-level closed forms
// ---------------------------------------------------------------------------

TwoLevelMetric::TwoLevelMetric(double omega, double lambda, double kappa, std::array<double, 4> c)
    : omega_(omega), lambda_(lambda), kappa_(kappa), c_(c) {
    if (lambda == 0) throw Error("TwoLevelMetric: lambda = 0 not covered by the alpha closed forms");
    const double gap = kappa * kappa - lambda * lambda;
    if (std::abs(gap) < 1e-12 * std::max(kappa * kappa, lambda * lambda))
        throw Error("TwoLevelMetric: exceptional point |lambda| = |kappa|; "
                    "use a series/limit treatment instead of the generic closed form");
    Om_ = std::sqrt(cplx(gap, 0));
    det_ = c[2] * c[2] * (1 - kappa * kappa / (lambda * lambda)) - 4 * c[0] * c[1] -
           c[3] * c[3];  // c4 enters rho as alpha3 = c4, so quadratically in det
    H_ = build_two_level(omega, lambda, kappa);
}

TwoLevelMetric TwoLevelMetric::pt_regime(double omega, double lambda, double kappa) {
    if (std::abs(lambda) <= std::abs(kappa))
        throw Error("TwoLevelMetric::pt_regime requires |lambda| > |kappa|");
    const double zeta = std::sqrt(lambda * lambda - kappa * kappa);
    return TwoLevelMetric(omega, lambda, kappa,
                          {0.5, 0.5, std::sqrt(2.0) * lambda / zeta, 0.0});
}

TwoLevelMetric TwoLevelMetric::broken_regime(double omega, double lambda, double kappa) {
    if (std::abs(lambda) >= std::abs(kappa))
        throw Error("TwoLevelMetric::broken_regime requires |lambda| < |kappa|");
    const double xi = std::sqrt(kappa * kappa - lambda * lambda);
    return TwoLevelMetric(omega, lambda, kappa,
                          {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), -lambda / xi, 0.0});
}

std::array<double, 4> TwoLevelMetric::alphas(double t) const {
    const cplx E = std::exp(Om_ * t), Em = std::exp(-Om_ * t);
    const cplx a0 = kappa_ * (c_[0] * E - c_[1] * Em) / Om_ + c_[2];
    const cplx a1 = c_[0] * E + c_[1] * Em;
    const cplx a2 = lambda_ * (c_[1] * Em - c_[0] * E) / Om_ - c_[2] * kappa_ / lambda_;
    // in the PT regime Om is imaginary; real metrics need c1 = c2 there
    const double scale = std::max({std::abs(a0), std::abs(a1), std::abs(a2), 1.0});
    if (std::max({std::abs(a0.imag()), std::abs(a1.imag()), std::abs(a2.imag())}) > 1e-10 * scale)
        throw Error("TwoLevelMetric: constants produce a non-Hermitian rho "
                    "(PT regime requires c1 = c2)");
    return {a0.real(), a1.real(), a2.real(), c_[3]};
}

std::array<double, 4> TwoLevelMetric::alpha_dots(double t) const {
    const auto a = alphas(t);
    return {kappa_ * a[1], lambda_ * a[2] + kappa_ * a[0], -lambda_ * a[1], 0.0};
}

namespace {
Mat from_pauli(const std::array<double, 4>& a) {
    Mat m(2, 2);
    m << cplx(a[0] + a[3], 0), cplx(a[1], -a[2]), cplx(a[1], a[2]), cplx(a[0] - a[3], 0);
    return m;
}
}  // namespace

Mat TwoLevelMetric::rho(double t) const { return from_pauli(alphas(t)); }
Mat TwoLevelMetric::rho_dot(double t) const { return from_pauli(alpha_dots(t)); }

// 2x2 PSD square root with the determinant supplied analytically:
// sqrt(rho) = (rho + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
Mat TwoLevelMetric::eta(double t) const {
    if (det_ <= 0) throw Error("TwoLevelMetric::eta: det(rho) <= 0, metric broken down");
    const Mat r = rho(t);
    const double sd = std::sqrt(det_);
    const double s = std::sqrt(r.trace().real() + 2 * sd);
    return (r + sd * Mat::Identity(2, 2)) / s;
}

Mat TwoLevelMetric::eta_dot(double t) const {
    const Mat r = rho(t), rd = rho_dot(t);
    const double sd = std::sqrt(det_);
    const double s = std::sqrt(r.trace().real() + 2 * sd);
    const double ds = rd.trace().real() / (2 * s);
    return rd / s - (r + sd * Mat::Identity(2, 2)) * (ds / (s * s));
}

Mat TwoLevelMetric::eta_inv(double t) const {
    const Mat r = rho(t);
    const double sd = std::sqrt(det_);
    const double tr = r.trace().real();
    const double s = std::sqrt(tr + 2 * sd);
    // adj(rho + sd I) / det(rho + sd I), det = sd (tr + 2 sd) = sd s^2
    return ((tr + sd) * Mat::Identity(2, 2) - r) / (s * sd);
}

Mat TwoLevelMetric::hermitian_h(double t) const {
    const double hb = hbar();
    return eta(t) * H_ * eta_inv(t) + cplx(0, hb) * eta_dot(t) * eta_inv(t);
}

Mat TwoLevelMetric::energy_op(double t) const {
    const double hb = hbar();
    return H_ + cplx(0, hb) * eta_inv(t) * eta_dot(t);
}

// ---------------------------------------------------------------------------

EnergyTrace energy_operator(const HamiltonianFn& H_fn, const MetricTrajectory& traj) {
    if (traj.size() < 5) throw Error("energy_operator: need at least 5 trajectory samples");
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (!traj.positive[i])
            throw Error("energy_operator: eta singular/broken at t=" + std::to_string(traj.eta.times[i]));
    auto etadot = fd4_derivative(traj.eta);
    const double hb = hbar();
    EnergyTrace out;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.eta.times[i];
        const Mat& eta = traj.eta.values[i];
        Mat ht = H_fn(t) + cplx(0, hb) * eta.inverse() * etadot[i];
        out.H_tilde.push_back(t, ht);
        out.qh_residual.push_back((traj.rho.values[i] * ht - ht.adjoint() * traj.rho.values[i]).norm());
    }
    return out;
}

CplxSeries expectation_along(const EnergyTrace& trace, const MetricTrajectory& traj, const Vec& psi) {
    CplxSeries out;
    for (std::size_t i = 0; i < trace.H_tilde.size(); ++i) {
        const cplx v = psi.dot(traj.rho.values[i] * trace.H_tilde.values[i] * psi);
        out.push_back(trace.H_tilde.times[i], v);
    }
    return out;
}

SpectrumTracks instantaneous_spectrum(const MatSeries& traj) {
    if (traj.empty()) throw Error("instantaneous_spectrum: empty trajectory");
    const Eigen::Index n = traj.values.front().rows();
    SpectrumTracks out;
    out.times = traj.times;
    out.tracks.assign(std::size_t(n), {});
    Mat prev_vecs;
    std::vector<cplx> prev_vals;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        auto eg = eig_general(traj.values[i], true);
        std::vector<int> perm(static_cast<std::size_t>(n), 0);
        if (i == 0) {
            for (Eigen::Index k = 0; k < n; ++k) perm[std::size_t(k)] = int(k);
        } else {
            // greedy overlap assignment against the previous frame
            std::vector<bool> used(std::size_t(n), false);
            for (Eigen::Index k = 0; k < n; ++k) {
                double best = -1;
                int bj = -1;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (used[std::size_t(j)]) continue;
                    const double ov = std::abs(prev_vecs.col(k).dot(eg.right_eigenvectors.col(j)));
                    if (ov > best) { best = ov; bj = int(j); }
                }
                used[std::size_t(bj)] = true;
                perm[std::size_t(k)] = bj;
                if (best < 0.7) out.branch_switch_warning = true;
            }
        }
        Mat reordered(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            out.tracks[std::size_t(k)].push_back(eg.eigenvalues[std::size_t(perm[std::size_t(k)])]);
            reordered.col(k) = eg.right_eigenvectors.col(perm[std::size_t(k)]);
        }
        prev_vecs = reordered;
    }
    return out;
}

Mat propagator(const HamiltonianFn& H_fn, double t_from, double t_to, int n_steps) {
    if (n_steps < 1) throw Error("propagator: n_steps must be >= 1");
    if (t_from == t_to) {
        Mat h = H_fn(t_from);
        return Mat::Identity(h.rows(), h.cols());
    }
    const double hb = hbar();
    const double ds = (t_to - t_from) / n_steps;
    Mat u;
    for (int k = 0; k < n_steps; ++k) {
        const double mid = t_from + (k + 0.5) * ds;
        Mat step = expm(cplx(0, -ds / hb) * H_fn(mid));
        u = (k == 0) ? step : Mat(step * u);
    }
    return u;
}

Mat propagator_auto(const HamiltonianFn& H_fn, double t_from, double t_to, double tol, int n0,
                    int n_max) {
    Mat u = propagator(H_fn, t_from, t_to, n0);
    for (int n = 2 * n0; n <= n_max; n *= 2) {
        Mat u2 = propagator(H_fn, t_from, t_to, n);
        if ((u2 - u).norm() <= tol) return u2;
        u = std::move(u2);
    }
    return u;
}

DuhamelResult duhamel_first_order(const HamiltonianFn& H_fn, const HamiltonianFn& h_fn,
                                  double t_from, double t_to, int quad_points, int prop_steps) {
    const double hb = hbar();
    DuhamelResult out;
    out.direct = propagator(H_fn, t_from, t_to, prop_steps);
    Mat u_full = propagator(h_fn, t_from, t_to, prop_steps);

    auto integrand_exact = [&](double s) -> Mat {
        // U(t,s) [H(s)-h(s)] u(s,t')
        const double span = std::max(std::abs(t_to - t_from), 1e-12);
        const int nU = std::max(2, int(prop_steps * std::abs(t_to - s) / span));
        const int nu = std::max(2, int(prop_steps * std::abs(s - t_from) / span));
        return propagator(H_fn, s, t_to, nU) * (H_fn(s) - h_fn(s)) * propagator(h_fn, t_from, s, nu);
    };
    auto integrand_first = [&](double s) -> Mat {
        const double span = std::max(std::abs(t_to - t_from), 1e-12);
        const int nU = std::max(2, int(prop_steps * std::abs(t_to - s) / span));
        const int nu = std::max(2, int(prop_steps * std::abs(s - t_from) / span));
        return propagator(h_fn, s, t_to, nU) * (H_fn(s) - h_fn(s)) * propagator(h_fn, t_from, s, nu);
    };
    if (quad_points % 2) ++quad_points;
    const Mat corr = integrate_simpson_matrix(integrand_exact, t_from, t_to, quad_points);
    const Mat corr1 = integrate_simpson_matrix(integrand_first, t_from, t_to, quad_points);
    out.identity_rhs = u_full - cplx(0, 1.0 / hb) * corr;
    out.first_order = u_full - cplx(0, 1.0 / hb) * corr1;
    out.identity_residual = (out.identity_rhs - out.direct).norm();
    return out;
}

Mat greens_function(const HamiltonianFn& H_fn, double t, double t_prime, int n_steps) {
    Mat h = H_fn(t_prime);
    if (t < t_prime) return Mat::Zero(h.rows(), h.cols());
    return cplx(0, -1.0 / hbar()) * propagator(H_fn, t_prime, t, n_steps);
}

}  // namespace ptqm
