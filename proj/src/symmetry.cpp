#include "ptqm/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace ptqm {

double pt_residual(const Mat& H, const AntilinearOp& pt) {
    require_square(H, "pt_residual");
    pt.validate();
    if (pt.U.rows() != H.rows()) throw Error("pt_residual: dimension mismatch");
    // [H, PT] = 0 rewritten linearly: H U conj(v) = U conj(H v) for all v
    // <=> U conj(H) U^-1 = H
    return (pt.U * H.conjugate() * pt.U.inverse() - H).norm();
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::PTSymmetric: return "PTSymmetric";
        case Regime::ExceptionalPoint: return "ExceptionalPoint";
        case Regime::SpontaneouslyBroken: return "SpontaneouslyBroken";
        case Regime::HamiltonianLevelBroken: return "HamiltonianLevelBroken";
    }
    return "?";
}

namespace {

// smallest principal angle between any two (unit) eigenvector columns
double min_pair_angle(const Mat& vecs) {
    double best = M_PI / 2;
    for (Eigen::Index i = 0; i < vecs.cols(); ++i)
        for (Eigen::Index j = i + 1; j < vecs.cols(); ++j) {
            double c = std::min(1.0, std::abs(vecs.col(i).dot(vecs.col(j))));
            best = std::min(best, std::acos(c));
        }
    return best;
}

// greedy nearest-conjugate matching of the non-real eigenvalues
bool conjugate_pairs_match(std::vector<cplx> ev, double tol) {
    std::vector<cplx> pending;
    for (const auto& e : ev)
        if (std::abs(e.imag()) > tol) pending.push_back(e);
    while (!pending.empty()) {
        cplx e = pending.back();
        pending.pop_back();
        double best = 1e300;
        std::size_t bi = 0;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            double d = std::abs(pending[i] - std::conj(e));
            if (d < best || (d == best && pending[i].real() < pending[bi].real())) { best = d; bi = i; }
        }
        if (pending.empty() || best > tol) return false;
        pending.erase(pending.begin() + bi);
    }
    return true;
}

}  // namespace

RegimeReport classify_regime(const Mat& H, const AntilinearOp& pt, const ClassifyOptions& opt) {
    RegimeReport rep;
    rep.pt_hamiltonian_residual = pt_residual(H, pt);
    auto eg = eig_general(H, true);
    rep.eigenvalues = eg.eigenvalues;
    double radius = 0;
    for (const auto& e : rep.eigenvalues) radius = std::max(radius, std::abs(e));
    const double tol = opt.tol * std::max(1.0, radius);

    if (rep.pt_hamiltonian_residual > tol * 10) {
        rep.label = Regime::HamiltonianLevelBroken;
        return rep;
    }

    for (const auto& e : rep.eigenvalues) rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(e.imag()));
    rep.min_eigenvector_angle = min_pair_angle(eg.right_eigenvectors);
    const double pair_tol = std::max(opt.pair_tol, tol);
    rep.conjugate_pairs_matched = conjugate_pairs_match(rep.eigenvalues, pair_tol);

    if (rep.min_eigenvector_angle <= opt.angle_tol) {
        rep.label = Regime::ExceptionalPoint;
        rep.confident = rep.min_eigenvector_angle < opt.angle_tol / 10;
        return rep;
    }
    if (rep.max_abs_imag <= tol) {
        rep.label = Regime::PTSymmetric;
        rep.confident = true;
        // each eigenvector must be a PT eigenstate up to a phase
        for (Eigen::Index j = 0; j < eg.right_eigenvectors.cols(); ++j) {
            Vec v = eg.right_eigenvectors.col(j);
            Vec w = pt.apply(v);
            cplx phase = v.dot(w);  // <v|w>, |phase| ~ 1 when w = e^{i phi} v
            rep.pt_eigenstate_phases.push_back(phase);
            if (std::abs(std::abs(phase) - 1.0) > 1e-6) rep.confident = false;
        }
        return rep;
    }
    rep.label = Regime::SpontaneouslyBroken;
    rep.confident = rep.conjugate_pairs_matched && rep.max_abs_imag > 10 * tol;
    return rep;
}

double BiorthoSystem::orthonormality_defect() const {
    return (left.adjoint() * right - Mat::Identity(right.rows(), right.cols())).norm();
}

double BiorthoSystem::completeness_defect() const {
    Mat sum = Mat::Zero(right.rows(), right.cols());
    for (Eigen::Index n = 0; n < right.cols(); ++n) sum += right.col(n) * left.col(n).adjoint();
    return (sum - Mat::Identity(right.rows(), right.cols())).norm();
}

BiorthoSystem biorthonormalize(const Mat& H, double ep_angle_tol) {
    require_square(H, "biorthonormalize");
    auto rg = eig_general(H, true);
    if (min_pair_angle(rg.right_eigenvectors) <= ep_angle_tol)
        throw Error("biorthonormalize: eigenvectors coalesce (exceptional point); "
                    "the defective case needs to be treated separately");
    auto lg = eig_general(H.adjoint(), true);

    const Eigen::Index n = H.rows();
    BiorthoSystem sys;
    sys.eigenvalues = rg.eigenvalues;
    sys.right.resize(n, n);
    sys.left.resize(n, n);
    std::vector<bool> used(std::size_t(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        // partner of eigenvalue E is the H^dag eigenvector with eigenvalue E*
        const cplx target = std::conj(rg.eigenvalues[std::size_t(k)]);
        Eigen::Index best = -1;
        double bd = 1e300;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[std::size_t(j)]) continue;
            double d = std::abs(lg.eigenvalues[std::size_t(j)] - target);
            if (d < bd) { bd = d; best = j; }
        }
        used[std::size_t(best)] = true;
        Vec psi = rg.right_eigenvectors.col(k);
        Vec phi = lg.right_eigenvectors.col(best);
        cplx c = phi.dot(psi);  // <phi|psi>
        if (std::abs(c) < 1e-14)
            throw Error("biorthonormalize: degenerate overlap between left/right partners");
        // scale psi by a, phi by b: conj(b) a c = 1 and |a| |psi| = |b| |phi| (balanced)
        const double s = std::sqrt(phi.norm() / (psi.norm() * std::abs(c)));
        const cplx b = std::conj(1.0 / (s * c));
        psi *= s;
        phi *= b;
        // deterministic phase: largest |component| of psi real positive
        Eigen::Index kk;
        psi.cwiseAbs().maxCoeff(&kk);
        cplx ph = psi(kk) / std::abs(psi(kk));
        psi /= ph;
        phi *= std::conj(ph);  // keeps <phi|psi> = 1
        sys.right.col(k) = psi;
        sys.left.col(k) = phi;
    }
    return sys;
}

COperator c_operator(const BiorthoSystem& sys, const Mat& P, double pd_tol) {
    require_square(P, "c_operator");
    const Eigen::Index n = P.rows();
    if ((P * P - Mat::Identity(n, n)).norm() > pd_tol * rel_scale(P))
        throw Error("c_operator: P^2 != I");
    // quasi-Hermiticity of P is checked against the reconstructed H = sum E |Psi><Phi|
    Mat H = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        H += sys.eigenvalues[std::size_t(k)] * sys.right.col(k) * sys.left.col(k).adjoint();
    if ((P * H * P - H.adjoint()).norm() > pd_tol * rel_scale(H) * 100)
        throw Error("c_operator: P H P != H^dag, P is not a valid parity for this system");

    COperator out;
    out.C = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Vec pv = P * sys.right.col(k);
        const cplx s = sys.left.col(k).dot(pv) / sys.left.col(k).squaredNorm();
        const double sr = s.real();
        if (std::abs(std::abs(sr) - 1.0) > 1e-6 || std::abs(s.imag()) > 1e-6)
            throw Error("c_operator: signature entry " + std::to_string(sr) +
                        " not +-1; balanced gauge violated or P unsuitable");
        const int sn = sr > 0 ? 1 : -1;
        out.signature.push_back(sn);
        out.C += double(sn) * sys.right.col(k) * sys.left.col(k).adjoint();
    }
    return out;
}

double cpt_equals_rho(const Mat& P, const Mat& C, const Mat& rho) {
    require_square(P, "cpt_equals_rho");
    if (P.rows() != C.rows() || P.rows() != rho.rows())
        throw Error("cpt_equals_rho: dimension mismatch");
    return (P * C - rho).norm();
}

}  // namespace ptqm
