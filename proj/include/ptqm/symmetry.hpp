#pragma once

#include "ptqm/numcore.hpp"

#include <string>
#include <vector>

namespace ptqm {

/// Antilinear operator v -> U conj(v) with unitary U.
struct AntilinearOp {
    Mat U;
    bool involution = true;  // PT^2 = 1 expected

    void validate(double tol = 1e-12) const {
        require_square(U, "AntilinearOp");
        const double udef = (U.adjoint() * U - Mat::Identity(U.rows(), U.cols())).norm();
        if (udef > tol * rel_scale(U)) throw Error("AntilinearOp: U not unitary, defect " + std::to_string(udef));
        if (involution) {
            const double idef = (U * U.conjugate() - Mat::Identity(U.rows(), U.cols())).norm();
            if (idef > tol * rel_scale(U))
                throw Error("AntilinearOp: U conj(U) != I, not an involution, defect " + std::to_string(idef));
        }
    }

    Vec apply(const Vec& v) const { return U * v.conjugate(); }
};

inline AntilinearOp pt_sigma_z_conj() { Mat u(2, 2); u << 1, 0, 0, -1; return {u}; }
inline AntilinearOp pt_conj(Eigen::Index n) { return {Mat::Identity(n, n)}; }

/// || U conj(H) U^-1 - H ||; zero iff H commutes with the antilinear map.
double pt_residual(const Mat& H, const AntilinearOp& pt);

enum class Regime {
    PTSymmetric,
    ExceptionalPoint,
    SpontaneouslyBroken,
    // the antilinear symmetry fails already at the Hamiltonian level
    HamiltonianLevelBroken,
};

std::string to_string(Regime r);

struct RegimeReport {
    Regime label = Regime::PTSymmetric;
    std::vector<cplx> eigenvalues;
    double max_abs_imag = 0;
    bool conjugate_pairs_matched = false;
    double min_eigenvector_angle = 0;  // radians; EP detector
    std::vector<cplx> pt_eigenstate_phases;  // e^{i phi} per state, PT-symmetric case only
    double pt_hamiltonian_residual = 0;
    bool confident = true;  // false near classification thresholds
};

struct ClassifyOptions {
    double tol = 1e-9;          // relative to spectral radius
    double angle_tol = 1e-6;    // radians, eigenvector coalescence threshold
    double pair_tol = 1e-8;     // conjugate-pair matching
};

RegimeReport classify_regime(const Mat& H, const AntilinearOp& pt, const ClassifyOptions& opt = {});

/// Paired left/right eigenvector system, <Phi_n|Psi_m> = delta_nm, with the
/// scaling freedom fixed by |Psi_n| = |Phi_n| (balanced gauge) and a
/// deterministic phase.
struct BiorthoSystem {
    std::vector<cplx> eigenvalues;
    Mat right;  // columns Psi_n
    Mat left;   // columns Phi_n

    double orthonormality_defect() const;
    double completeness_defect() const;
};

BiorthoSystem biorthonormalize(const Mat& H, double ep_angle_tol = 1e-8);

/// C = sum_n s_n |Psi_n><Phi_n| with s_n = +-1 read off from P|Psi_n> = s_n|Phi_n>.
struct COperator {
    Mat C;
    std::vector<int> signature;
};

COperator c_operator(const BiorthoSystem& sys, const Mat& P, double pd_tol = 1e-10);

/// || P C - rho ||  (the CPT inner product coincides with the rho-inner product)
double cpt_equals_rho(const Mat& P, const Mat& C, const Mat& rho);

}  // namespace ptqm
