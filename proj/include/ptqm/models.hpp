#pragma once

#include "ptqm/numcore.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ptqm {

inline Mat pauli_i() { return Mat::Identity(2, 2); }
inline Mat pauli_x() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat pauli_y() { Mat m(2, 2); m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Mat pauli_z() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }

/// H = -1/2 (w I + lambda sigma_z + i kappa sigma_x)
Mat build_two_level(double omega, double lambda, double kappa);

/// Named generators with real structure constants, convention
/// [K_i, K_j] = i * sum_k f[i][j][k] K_k, plus an optional matrix rep.
struct LieAlgebraSpec {
    std::string name;
    std::vector<std::string> generator_names;
    std::vector<std::vector<std::vector<double>>> f;  // f[i][j][k]
    std::vector<Mat> rep;                              // optional, may be empty

    std::size_t dim() const { return generator_names.size(); }
    double structure(std::size_t i, std::size_t j, std::size_t k) const { return f[i][j][k]; }
    /// max |f[i][j][k] + f[j][i][k]|
    double antisymmetry_defect() const;
    /// max over (i,j,k,m) of the contracted Jacobi identity residual
    double jacobi_defect() const;
};

/// Truncated harmonic-oscillator ladder representation. Operator identities
/// hold on the interior (low-excitation) sector only; the boundary rows carry
/// truncation artifacts by construction.
struct FockRep {
    int cutoff = 0;       // per-mode dimension
    int modes = 1;
    Mat a, ad, x, p;      // first mode
    Mat b, bd, y, py;     // second mode (two-mode reps only)
    Mat id;

    Eigen::Index dim() const { return id.rows(); }
    int interior_excitation() const { return cutoff - 2; }
    /// Projector onto total excitation <= interior_excitation().
    Mat interior_projector() const;
    /// Restriction of m to the interior sector (projects both sides).
    Mat interior(const Mat& m) const { Mat pr = interior_projector(); return pr * m * pr; }
    double interior_norm(const Mat& m) const { return interior(m).norm(); }
};

FockRep build_fock_single_mode(int cutoff);

struct TwoModeK {
    FockRep rep;
    Mat K1, K2, K3, K4;
};

/// Two oscillator modes plus the K1..K4 generators of the coupled-oscillator
/// algebra. Requires cutoff >= 8.
TwoModeK build_fock_two_mode(int cutoff);

using CoeffFn = std::function<double(double)>;

/// H_K(t) = a(t) K1 + b(t) K2 + i lambda(t) K3
Mat build_hk(const CoeffFn& a_fn, const CoeffFn& b_fn, const CoeffFn& lambda_fn, double t,
             const TwoModeK& k);

/// Swanson Hamiltonian p^2/2M + (M/2) Omega^2 x^2 + i alpha {x,p} in a
/// truncated single-mode rep. alpha may be complex.
Mat build_swanson(double M, double Omega, cplx alpha, const FockRep& rep);

struct BBGrid {
    double x_max = 12.0;
    int n_points = 1200;
};

/// Lowest eigenvalues (by real part) of H = p^2/2 + x^2 (ix)^eps discretized
/// on the real line with the branch (ix)^eps = |x|^eps e^{i pi eps sgn(x)/2}.
/// Valid for 0 <= eps <= 1.5 on this real-axis formulation.
std::vector<cplx> bb_spectrum(double eps, const BBGrid& grid, int k_levels);

/// Catalogue of the algebras used in the paper models: the coupled-oscillator
/// K-algebra and su(2) in the Pauli basis.
std::vector<LieAlgebraSpec> lie_registry(int k_matrix_cutoff = 12);

/// Tagged parameter bundle for the concrete models; serialized by the CLI.
struct ModelSpec {
    enum class Tag { TwoLevel, CoupledK, Swanson, BosonBath, Anharmonic, BenderBoettcher };
    Tag tag = Tag::TwoLevel;

    // TwoLevel
    double omega = 1.0, lambda = 2.0, kappa = 1.0;
    // CoupledK / Swanson
    int fock_cutoff = 16;
    // BosonBath
    double bb_nu = 1.0, bb_g = 0.7, bb_kappa = 0.3, bb_c1 = 1.0, bb_gamma = 0.0;
    int bath_size = 50;
    // BenderBoettcher
    double epsilon = 0.0;

    void validate() const;
};

}  // namespace ptqm
