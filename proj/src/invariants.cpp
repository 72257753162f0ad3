#include "ptqm/invariants.hpp"

#include <algorithm>
#include <cmath>

namespace ptqm {

RealSeries lr_residual(const MatSeries& I_traj, const HamiltonianFn& H_fn) {
    auto dI = fd4_derivative(I_traj);
    const double hb = hbar();
    RealSeries out;
    for (std::size_t i = 0; i < I_traj.size(); ++i) {
        const double t = I_traj.times[i];
        const Mat& I = I_traj.values[i];
        Mat H = H_fn(t);
        Mat r = dI[i] - cplx(0, 1.0 / hb) * (I * H - H * I);
        out.push_back(t, r.norm());
    }
    return out;
}

MatSeries transport_invariant(const HamiltonianFn& H_fn, const Mat& I0,
                              const std::vector<double>& t_grid, int steps_per_unit) {
    MatSeries out;
    Mat U = Mat::Identity(I0.rows(), I0.cols());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0) {
            const double dt = t_grid[i] - t_grid[i - 1];
            const int n = std::max(8, int(std::ceil(std::abs(dt) * steps_per_unit)));
            U = propagator(H_fn, t_grid[i - 1], t_grid[i], n) * U;
        }
        out.push_back(t_grid[i], U * I0 * U.inverse());
    }
    return out;
}

MatSeries invariant_similarity_eta(const MatSeries& I_traj, double ep_tol) {
    if (I_traj.empty()) throw Error("invariant_similarity_eta: empty trajectory");
    const Eigen::Index n = I_traj.values.front().rows();
    MatSeries out;
    Mat prev;
    for (std::size_t i = 0; i < I_traj.size(); ++i) {
        auto eg = eig_general(I_traj.values[i], true);
        Mat V = eg.right_eigenvectors;
        Eigen::JacobiSVD<Mat> svd(V);
        if (svd.singularValues().minCoeff() < ep_tol)
            throw Error("invariant_similarity_eta: invariant eigenvectors coalesce at t=" +
                        std::to_string(I_traj.times[i]));
        if (i > 0) {
            // order and phase continuity against the previous frame
            Mat reordered(n, n);
            std::vector<bool> used(std::size_t(n), false);
            for (Eigen::Index k = 0; k < n; ++k) {
                double best = -1;
                Eigen::Index bj = 0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (used[std::size_t(j)]) continue;
                    const double ov = std::abs(prev.col(k).dot(V.col(j)));
                    if (ov > best) { best = ov; bj = j; }
                }
                used[std::size_t(bj)] = true;
                cplx ov = prev.col(k).dot(V.col(bj));
                reordered.col(k) = V.col(bj) * (std::abs(ov) > 0 ? std::conj(ov) / std::abs(ov) : 1.0);
            }
            V = reordered;
        }
        prev = V;
        out.push_back(I_traj.times[i], V.inverse());
    }
    return out;
}

LrPhaseResult lr_phase(const MatSeries& I_traj, const HamiltonianFn& H_fn, int eigen_index,
                       double eigenvalue_drift_tol) {
    if (I_traj.size() < 5) throw Error("lr_phase: need at least 5 samples");
    const Eigen::Index n = I_traj.values.front().rows();
    if (eigen_index < 0 || eigen_index >= n) throw Error("lr_phase: eigen_index out of range");
    const double hb = hbar();

    // eigenvector trajectory of the chosen invariant branch, gauge-smoothed
    MatSeries phi_series;
    std::vector<cplx> lambdas;
    Vec prev;
    for (std::size_t i = 0; i < I_traj.size(); ++i) {
        auto eg = eig_general(I_traj.values[i], true);
        Eigen::Index pick = eigen_index;
        if (i > 0) {
            double best = -1;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double ov = std::abs(prev.dot(eg.right_eigenvectors.col(j)));
                if (ov > best) { best = ov; pick = j; }
            }
        }
        Vec v = eg.right_eigenvectors.col(pick);
        if (i > 0) {
            cplx ov = prev.dot(v);
            if (std::abs(ov) > 0) v *= std::conj(ov) / std::abs(ov);
        }
        prev = v;
        lambdas.push_back(eg.eigenvalues[std::size_t(pick)]);
        phi_series.push_back(I_traj.times[i], Mat(v));
    }

    LrPhaseResult out;
    const double T = I_traj.times.back() - I_traj.times.front();
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        const double dt = I_traj.times[i] - I_traj.times[i - 1];
        out.max_eigenvalue_drift =
            std::max(out.max_eigenvalue_drift, std::abs(lambdas[i] - lambdas[i - 1]) / dt);
    }
    if (out.max_eigenvalue_drift > eigenvalue_drift_tol * std::max(1.0, std::abs(lambdas[0])) &&
        T > 0)
        throw Error("lr_phase: invariant eigenvalue drifts (dLambda/dt = " +
                    std::to_string(out.max_eigenvalue_drift) + "), not a conserved invariant");

    auto dphi = fd4_derivative(phi_series);
    std::vector<double> adot(I_traj.size());
    for (std::size_t i = 0; i < I_traj.size(); ++i) {
        const Vec phi = phi_series.values[i].col(0);
        const Vec dp = dphi[i].col(0);
        const cplx val = phi.dot(cplx(0, hb) * dp - H_fn(I_traj.times[i]) * phi);
        adot[i] = val.real() / hb;  // alpha real by construction for normalized phi
    }
    // cumulative Simpson with trapezoid fallback on the last odd interval
    std::vector<double> alpha(I_traj.size(), 0.0);
    for (std::size_t i = 1; i < I_traj.size(); ++i) {
        if (i >= 2 && (i % 2 == 0)) {
            const double h = I_traj.times[i] - I_traj.times[i - 1];
            alpha[i] = alpha[i - 2] + h / 3.0 * (adot[i - 2] + 4 * adot[i - 1] + adot[i]);
        } else {
            const double h = I_traj.times[i] - I_traj.times[i - 1];
            alpha[i] = alpha[i - 1] + h / 2.0 * (adot[i - 1] + adot[i]);
        }
    }
    for (std::size_t i = 0; i < I_traj.size(); ++i) {
        out.alpha.push_back(I_traj.times[i], alpha[i]);
        out.psi.push_back(std::exp(cplx(0, hb * alpha[i])) * phi_series.values[i].col(0));
    }
    return out;
}

Mat swanson_invariant(const SwansonInvariantInput& in, const FockRep& rep) {
    if (in.sigma <= 0) throw Error("swanson_invariant: sigma must be positive");
    const double g1 = in.gamma_dot - in.gamma * in.sigma_dot / in.sigma;
    const cplx g2 = cplx(0, 2) * in.alpha - in.sigma_dot / in.sigma;
    const Mat shift = rep.p + (in.M * g1) * rep.id + (in.M * g2) * rep.x;
    const Mat pos = rep.x + in.gamma * rep.id;
    return (in.sigma * in.sigma / (2 * in.m_ref)) * shift * shift +
           (in.m_ref * in.omega * in.omega / (2 * in.sigma * in.sigma)) * pos * pos;
}

double tdde_defect(const MatSeries& eta_traj, const HamiltonianFn& H_fn) {
    auto deta = fd4_derivative(eta_traj);
    const double hb = hbar();
    double worst = 0;
    for (std::size_t i = 0; i < eta_traj.size(); ++i) {
        const Mat& eta = eta_traj.values[i];
        Mat inv = eta.inverse();
        Mat h = eta * H_fn(eta_traj.times[i]) * inv + cplx(0, hb) * deta[i] * inv;
        worst = std::max(worst, hermiticity_defect(h));
    }
    return worst;
}

std::pair<int, int> series_combination_indices(bool first_is_tilde, int n, bool second_is_tilde,
                                               int m) {
    const int delta = (second_is_tilde ? 1 : 0) - (first_is_tilde ? 1 : 0);
    return {2 * m - n + delta, 2 * n - m - delta};
}

DysonSeries dyson_series_iterate(const MatSeries& eta_traj, const MatSeries& etat_traj,
                                 const HamiltonianFn& H_fn, int depth,
                                 const DysonSeriesOptions& opt) {
    if (eta_traj.size() != etat_traj.size() || eta_traj.size() < 5)
        throw Error("dyson_series_iterate: seed grids must match, >= 5 samples");
    for (std::size_t i = 0; i < eta_traj.size(); ++i)
        if (std::abs(eta_traj.times[i] - etat_traj.times[i]) > 1e-12)
            throw Error("dyson_series_iterate: seed grids must match");

    const double d1 = tdde_defect(eta_traj, H_fn);
    const double d2 = tdde_defect(etat_traj, H_fn);
    if (d1 > opt.seed_tdde_tol || d2 > opt.seed_tdde_tol)
        throw Error("dyson_series_iterate: seeds do not solve the TDDE (defects " +
                    std::to_string(d1) + ", " + std::to_string(d2) + ")");

    DysonSeries out;
    const std::size_t ns = eta_traj.size();
    std::vector<Mat> A(ns), Ainv(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        A[i] = etat_traj.values[i] * eta_traj.values[i].inverse();
        Ainv[i] = A[i].inverse();
        out.A.push_back(eta_traj.times[i], A[i]);
    }

    // invariant seed: by default eta(0)^{-1} S(0) eta(0), which transports to
    // I_h(t) = S(t) and makes the seed gates exact
    Mat I0;
    if (opt.I0) {
        I0 = *opt.I0;
    } else {
        const Mat S0 = A[0].adjoint() * A[0];
        const Mat e0i = eta_traj.values[0].inverse();
        I0 = e0i * S0 * eta_traj.values[0];
    }
    auto I_H = transport_invariant(H_fn, I0, eta_traj.times);
    std::vector<Mat> I_h(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        Mat inv = eta_traj.values[i].inverse();
        I_h[i] = eta_traj.values[i] * I_H.values[i] * inv;
        const Mat S = A[i].adjoint() * A[i];
        out.commutator_SI.push_back((I_h[i] * S - S * I_h[i]).norm());
    }

    // generated maps in the paper's eta3, eta4, eta5, eta6, ... order:
    // A-powers +2, -1, +4, -2, +6, -3, ...
    std::vector<int> powers;
    for (int j = 1; int(powers.size()) < depth; ++j) {
        powers.push_back(2 * j);
        if (int(powers.size()) < depth) powers.push_back(-j);
    }

    for (int p : powers) {
        SeriesLevel lvl;
        lvl.index = p;
        MatSeries gen;
        double inv_defect = 0;
        for (std::size_t i = 0; i < ns; ++i) {
            Mat Ap = Mat::Identity(A[i].rows(), A[i].cols());
            for (int k = 0; k < std::abs(p); ++k) Ap = Ap * (p > 0 ? A[i] : Ainv[i]);
            gen.push_back(eta_traj.times[i], Mat(Ap * eta_traj.values[i]));
            Mat In = Ap * I_h[i] * Ap.inverse();
            inv_defect = std::max(inv_defect, hermiticity_defect(In) / rel_scale(In));
        }
        lvl.invariant_hermiticity_defect = inv_defect;
        lvl.gate_passed = inv_defect <= opt.gate_tol;
        lvl.h_hermiticity_defect = tdde_defect(gen, H_fn);
        if (lvl.gate_passed) ++out.accepted;
        out.levels.push_back(lvl);
    }
    return out;
}

}  // namespace ptqm
