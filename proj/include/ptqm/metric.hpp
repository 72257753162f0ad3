#pragma once

#include "ptqm/models.hpp"
#include "ptqm/numcore.hpp"
#include "ptqm/rational.hpp"

#include <optional>
#include <vector>

namespace ptqm {

/// A static Dyson map / metric pair with its diagnostics.
struct MetricSolution {
    Mat rho;
    Mat eta;
    Mat h;  // eta H eta^-1
    double det_rho = 0;
    double min_eigenvalue = 0;
    double quasi_hermiticity_residual = 0;  // ||rho H - H^dag rho||
    double h_hermiticity_defect = 0;

    void fill_diagnostics(const Mat& H);
};

/// Dyson map from the eigenvector rows of H (left eigenvectors); h comes out
/// diagonal with the eigenvalues of H. Broken-regime inputs yield a complex
/// diagonal h, which is reported through h_hermiticity_defect.
MetricSolution eta_from_eigenvectors(const Mat& H, double ep_angle_tol = 1e-8);

enum class QhNormalization { UnitDet, FixTrace };

struct QhOptions {
    QhNormalization normalization = QhNormalization::UnitDet;
    double nullspace_tol = 1e-10;    // singular values below tol * s_max span the nullspace
    int scan_per_dim = 24;           // coarse positivity scan density
    double refine_tol = 1e-12;
};

struct QhResult {
    std::vector<MetricSolution> candidates;  // positive-definite, sorted by trace
    int nullspace_dim = 0;
};

/// Solves rho H - H^dag rho = 0 over Hermitian rho as a real linear system,
/// filters positive-definite representatives and applies the normalization.
/// The first candidate is the trace-minimal one.
QhResult solve_qh_linear(const Mat& H, const QhOptions& opt = {});

/// One perturbative order: coefficients of q_n on the algebra generators.
struct PerturbativeMetric {
    const LieAlgebraSpec* algebra = nullptr;
    std::vector<int> orders;                        // realized odd orders 1,3,5,...
    std::vector<std::vector<GRational>> q_coeffs;   // per order, per generator
    bool terminated = false;                        // hit an exactly zero order

    std::vector<GRational> coeff(int order) const;
};

/// Recursive BCH solver for rho = e^q with H = h0 + i eps h1, all expansions
/// on the algebra generators in exact Gaussian-rational arithmetic.
/// Kernel components of ad_{h0} are fixed to zero (minimal-norm choice).
PerturbativeMetric bch_perturbative(const LieAlgebraSpec& algebra,
                                    const std::vector<Rational>& h0_coeffs,
                                    const std::vector<Rational>& h1_coeffs, int max_order = 7);

}  // namespace ptqm
