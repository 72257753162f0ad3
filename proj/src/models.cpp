#include "ptqm/models.hpp"

#include <lapacke.h>

#include <cmath>

namespace ptqm {

Mat build_two_level(double omega, double lambda, double kappa) {
    return -0.5 * (omega * pauli_i() + lambda * pauli_z() + cplx(0, kappa) * pauli_x());
}

double LieAlgebraSpec::antisymmetry_defect() const {
    double worst = 0;
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                worst = std::max(worst, std::abs(f[i][j][k] + f[j][i][k]));
    return worst;
}

double LieAlgebraSpec::jacobi_defect() const {
    // [K_i,[K_j,K_k]] + cyclic = 0  =>  sum_m f[j][k][m] f[i][m][l] + cyclic = 0
    double worst = 0;
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    double s = 0;
                    for (std::size_t m = 0; m < n; ++m)
                        s += f[j][k][m] * f[i][m][l] + f[k][i][m] * f[j][m][l] +
                             f[i][j][m] * f[k][m][l];
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

Mat FockRep::interior_projector() const {
    const Eigen::Index d = dim();
    Mat pr = Mat::Zero(d, d);
    const int nmax = interior_excitation();
    if (modes == 1) {
        for (int n = 0; n <= std::min(nmax, cutoff - 1); ++n) pr(n, n) = 1.0;
    } else {
        for (int n = 0; n < cutoff; ++n)
            for (int m = 0; m < cutoff; ++m)
                if (n + m <= nmax) pr(n * cutoff + m, n * cutoff + m) = 1.0;
    }
    return pr;
}

FockRep build_fock_single_mode(int cutoff) {
    if (cutoff < 4) throw Error("build_fock_single_mode: cutoff too small (need >= 4)");
    FockRep r;
    r.cutoff = cutoff;
    r.modes = 1;
    r.a = Mat::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) r.a(n - 1, n) = std::sqrt(double(n));
    r.ad = r.a.adjoint();
    r.x = (r.a + r.ad) / std::sqrt(2.0);
    r.p = cplx(0, 1) * (r.ad - r.a) / std::sqrt(2.0);
    r.id = Mat::Identity(cutoff, cutoff);
    return r;
}

TwoModeK build_fock_two_mode(int cutoff) {
    if (cutoff < 8) throw Error("build_fock_two_mode: cutoff too small (need >= 8)");
    FockRep single = build_fock_single_mode(cutoff);
    const Eigen::Index d1 = cutoff;
    Mat id1 = Mat::Identity(d1, d1);
    auto kron = [](const Mat& l, const Mat& r) {
        Mat out(l.rows() * r.rows(), l.cols() * r.cols());
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            for (Eigen::Index j = 0; j < l.cols(); ++j)
                out.block(i * r.rows(), j * r.cols(), r.rows(), r.cols()) = l(i, j) * r;
        return out;
    };
    TwoModeK k;
    k.rep.cutoff = cutoff;
    k.rep.modes = 2;
    k.rep.a = kron(single.a, id1);
    k.rep.ad = k.rep.a.adjoint();
    k.rep.b = kron(id1, single.a);
    k.rep.bd = k.rep.b.adjoint();
    k.rep.x = kron(single.x, id1);
    k.rep.p = kron(single.p, id1);
    k.rep.y = kron(id1, single.x);
    k.rep.py = kron(id1, single.p);
    k.rep.id = Mat::Identity(d1 * d1, d1 * d1);
    const Mat& X = k.rep.x;
    const Mat& P = k.rep.p;
    const Mat& Y = k.rep.y;
    const Mat& PY = k.rep.py;
    k.K1 = 0.5 * (P * P + X * X);
    k.K2 = 0.5 * (PY * PY + Y * Y);
    k.K3 = 0.5 * (X * Y + P * PY);
    k.K4 = 0.5 * (X * PY - Y * P);
    return k;
}

Mat build_hk(const CoeffFn& a_fn, const CoeffFn& b_fn, const CoeffFn& lambda_fn, double t,
             const TwoModeK& k) {
    const double a = a_fn(t), b = b_fn(t), lam = lambda_fn(t);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(lam))
        throw Error("build_hk: coefficient function not finite at t=" + std::to_string(t));
    return a * k.K1 + b * k.K2 + cplx(0, lam) * k.K3;
}

Mat build_swanson(double M, double Omega, cplx alpha, const FockRep& rep) {
    if (M <= 0) throw Error("build_swanson: mass must be positive");
    const Mat& X = rep.x;
    const Mat& P = rep.p;
    return P * P / (2 * M) + 0.5 * M * Omega * Omega * X * X +
           cplx(0, 1) * alpha * (X * P + P * X);
}

std::vector<cplx> bb_spectrum(double eps, const BBGrid& grid, int k_levels) {
    if (eps < 0 || eps > 1.5)
        throw Error("bb_spectrum: eps outside the real-axis validity window [0, 1.5]");
    if (grid.x_max < 10 || grid.n_points < 1000)
        throw Error("bb_spectrum: grid too coarse (need x_max >= 10, n_points >= 1000)");
    const int n = grid.n_points;
    const double h = 2 * grid.x_max / (n + 1);
    Mat m = Mat::Zero(n, n);
    // 4th-order 5-point stencil for p^2/2 interior, 2nd order at the edge rows
    const double d0 = 30.0 / (24 * h * h), d1 = -16.0 / (24 * h * h), d2 = 1.0 / (24 * h * h);
    for (int i = 0; i < n; ++i) {
        const double x = -grid.x_max + (i + 1) * h;
        const cplx v = x * x * std::pow(std::abs(x), eps) *
                       std::exp(cplx(0, M_PI * eps / 2 * (x >= 0 ? 1.0 : -1.0)));
        if (i >= 2 && i <= n - 3) {
            m(i, i) = d0 + v;
            m(i, i - 1) = m(i, i + 1) = d1;
            m(i, i - 2) = m(i, i + 2) = d2;
        } else {
            m(i, i) = 1.0 / (h * h) + v;
            if (i > 0) m(i, i - 1) = -0.5 / (h * h);
            if (i < n - 1) m(i, i + 1) = -0.5 / (h * h);
        }
    }
    auto eg = eig_general(m, false);
    if (int(eg.eigenvalues.size()) < k_levels) throw Error("bb_spectrum: fewer levels than requested");
    return {eg.eigenvalues.begin(), eg.eigenvalues.begin() + k_levels};
}

std::vector<LieAlgebraSpec> lie_registry(int k_matrix_cutoff) {
    std::vector<LieAlgebraSpec> out;

    LieAlgebraSpec kalg;
    kalg.name = "coupled-oscillator-K";
    kalg.generator_names = {"K1", "K2", "K3", "K4"};
    kalg.f.assign(4, std::vector<std::vector<double>>(4, std::vector<double>(4, 0.0)));
    auto set = [&](int i, int j, std::initializer_list<std::pair<int, double>> terms) {
        for (auto [k, v] : terms) {
            kalg.f[i][j][k] = v;
            kalg.f[j][i][k] = -v;
        }
    };
    set(0, 2, {{3, 1.0}});        // [K1,K3] =  i K4
    set(0, 3, {{2, -1.0}});       // [K1,K4] = -i K3
    set(1, 2, {{3, -1.0}});       // [K2,K3] = -i K4
    set(1, 3, {{2, 1.0}});        // [K2,K4] =  i K3
    set(2, 3, {{0, 0.5}, {1, -0.5}});  // [K3,K4] = i/2 (K1 - K2)
    if (k_matrix_cutoff >= 8) {
        auto k = build_fock_two_mode(k_matrix_cutoff);
        kalg.rep = {k.K1, k.K2, k.K3, k.K4};
    }
    out.push_back(std::move(kalg));

    LieAlgebraSpec su2;
    su2.name = "su2-pauli";
    su2.generator_names = {"sx", "sy", "sz"};
    su2.f.assign(3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
    // [s_i, s_j] = 2 i eps_ijk s_k
    const int e[3][3] = {{0, 3, -2}, {-3, 0, 1}, {2, -1, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (e[i][j] != 0) su2.f[i][j][std::abs(e[i][j]) - 1] = 2.0 * (e[i][j] > 0 ? 1 : -1);
    su2.rep = {pauli_x(), pauli_y(), pauli_z()};
    out.push_back(std::move(su2));

    for (const auto& alg : out) {
        if (alg.antisymmetry_defect() > 0) throw Error("lie_registry: antisymmetry violated");
        if (alg.jacobi_defect() > 1e-12)
            throw Error("lie_registry: Jacobi identity violated for " + alg.name);
    }
    return out;
}

void ModelSpec::validate() const {
    switch (tag) {
        case Tag::CoupledK:
        case Tag::Swanson:
            if (fock_cutoff < 8) throw Error("ModelSpec: fock_cutoff must be >= 8");
            break;
        case Tag::BosonBath:
            if (bath_size < 1) throw Error("ModelSpec: bath size N must be >= 1");
            if (bb_g == 0 && bb_kappa == 0) throw Error("ModelSpec: g and kappa cannot both vanish");
            break;
        case Tag::BenderBoettcher:
            if (epsilon < 0 || epsilon > 1.5) throw Error("ModelSpec: epsilon outside [0, 1.5]");
            break;
        default:
            break;
    }
}

}  // namespace ptqm
