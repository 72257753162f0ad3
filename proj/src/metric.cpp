#include "ptqm/metric.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ptqm {

void MetricSolution::fill_diagnostics(const Mat& H) {
    det_rho = rho.determinant().real();
    auto ew = eigh(rho, 1e-9);
    min_eigenvalue = ew.eigenvalues.minCoeff();
    quasi_hermiticity_residual = (rho * H - H.adjoint() * rho).norm();
    h_hermiticity_defect = hermiticity_defect(h);
}

MetricSolution eta_from_eigenvectors(const Mat& H, double ep_angle_tol) {
    require_square(H, "eta_from_eigenvectors");
    auto eg = eig_general(H, true);
    // coalescence check via the smallest singular value of the eigenvector matrix
    Eigen::JacobiSVD<Mat> svd(eg.right_eigenvectors);
    if (svd.singularValues().minCoeff() < ep_angle_tol)
        throw Error("eta_from_eigenvectors: eigenvector matrix singular (exceptional point)");
    Mat eta = eg.right_eigenvectors.inverse();  // rows = left eigenvectors
    for (Eigen::Index r = 0; r < eta.rows(); ++r) eta.row(r).normalize();
    MetricSolution sol;
    sol.eta = eta;
    sol.rho = eta.adjoint() * eta;
    sol.h = eta * H * eta.inverse();
    sol.fill_diagnostics(H);
    return sol;
}

namespace {

// orthonormal basis of Hermitian n x n matrices, n^2 elements
std::vector<Mat> hermitian_basis(Eigen::Index n) {
    std::vector<Mat> basis;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < n; ++k) {
        Mat e = Mat::Zero(n, n);
        e(k, k) = 1.0;
        basis.push_back(e);
    }
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = k + 1; l < n; ++l) {
            Mat e = Mat::Zero(n, n);
            e(k, l) = r2;
            e(l, k) = r2;
            basis.push_back(e);
            e.setZero();
            e(k, l) = cplx(0, r2);
            e(l, k) = cplx(0, -r2);
            basis.push_back(e);
        }
    return basis;
}

double min_eig_of(const Mat& m) {
    Mat h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// trace / det^{1/n} over the positive cone; +inf outside
double scale_free_trace(const Mat& m) {
    const double me = min_eig_of(m);
    if (me <= 0) return std::numeric_limits<double>::infinity();
    const double d = m.determinant().real();
    return m.trace().real() / std::pow(d, 1.0 / double(m.rows()));
}

}  // namespace

QhResult solve_qh_linear(const Mat& H, const QhOptions& opt) {
    require_square(H, "solve_qh_linear");
    require_finite(H, "solve_qh_linear");
    const Eigen::Index n = H.rows();
    auto basis = hermitian_basis(n);
    const Eigen::Index nb = Eigen::Index(basis.size());

    // real linear system: vec_re_im(B H - H^dag B) per basis element
    RMat sys(2 * n * n, nb);
    for (Eigen::Index j = 0; j < nb; ++j) {
        Mat r = basis[std::size_t(j)] * H - H.adjoint() * basis[std::size_t(j)];
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index rr = 0; rr < n; ++rr) {
                sys(c * n + rr, j) = r(rr, c).real();
                sys(n * n + c * n + rr, j) = r(rr, c).imag();
            }
    }
    Eigen::JacobiSVD<RMat> svd(sys, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    std::vector<RVec> null_basis;
    for (Eigen::Index j = 0; j < sv.size(); ++j)
        if (sv(j) <= opt.nullspace_tol * std::max(smax, 1.0)) null_basis.push_back(svd.matrixV().col(j));

    QhResult out;
    out.nullspace_dim = int(null_basis.size());
    if (null_basis.empty()) return out;

    auto assemble = [&](const RVec& coeffs) {
        Mat m = Mat::Zero(n, n);
        for (std::size_t k = 0; k < null_basis.size(); ++k) {
            const RVec& dir = null_basis[k];
            for (Eigen::Index j = 0; j < nb; ++j) m += coeffs[Eigen::Index(k)] * dir(j) * basis[std::size_t(j)];
        }
        return Mat((m + m.adjoint()) / 2.0);
    };

    const int d = out.nullspace_dim;
    // deterministic coarse scan of sphere directions in nullspace coordinates
    std::vector<RVec> seeds;
    if (d == 1) {
        RVec v(1);
        v << 1.0;
        seeds.push_back(v);
        v << -1.0;
        seeds.push_back(v);
    } else {
        const int steps = opt.scan_per_dim;
        std::vector<RVec> frontier;
        RVec base = RVec::Zero(d);
        frontier.push_back(base);
        // spherical product grid over d-1 angles
        std::vector<int> idx(std::size_t(d) - 1, 0);
        while (true) {
            RVec v(d);
            double s = 1.0;
            for (int a = 0; a < d - 1; ++a) {
                const double th = (a == d - 2 ? 2.0 : 1.0) * M_PI * idx[std::size_t(a)] / steps;
                v[a] = s * std::cos(th);
                s *= std::sin(th);
            }
            v[d - 1] = s;
            seeds.push_back(v);
            int a = 0;
            for (; a < d - 1; ++a) {
                if (++idx[std::size_t(a)] < steps) break;
                idx[std::size_t(a)] = 0;
            }
            if (a == d - 1) break;
        }
    }

    auto objective = [&](const RVec& v) { return scale_free_trace(assemble(v)); };

    // keep distinct positive-definite representatives
    std::vector<RVec> pd_dirs;
    for (const auto& s : seeds) {
        if (!std::isfinite(objective(s))) continue;
        bool dup = false;
        for (const auto& p : pd_dirs)
            if ((p - s).norm() < 1e-9 || (p + s).norm() < 1e-9) dup = true;
        if (!dup) pd_dirs.push_back(s);
    }
    if (pd_dirs.empty()) return out;

    // refine the best direction: cyclic golden-section sweeps in coordinate planes
    RVec best = pd_dirs[0];
    for (const auto& p : pd_dirs)
        if (objective(p) < objective(best)) best = p;
    best.normalize();
    const double gr = (std::sqrt(5.0) - 1) / 2;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double improved = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < std::max(d, i + 2); ++j) {
                RVec u = best;
                RVec w = RVec::Zero(d);
                if (d == 1) break;
                w[i] = -best[j % d];
                w[j % d] = best[i];
                if (w.norm() < 1e-14) continue;
                w.normalize();
                auto f1d = [&](double th) { return objective(RVec(std::cos(th) * u + std::sin(th) * w)); };
                double a = -0.5, b = 0.5;
                double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
                double f1 = f1d(x1), f2 = f1d(x2);
                for (int it = 0; it < 90; ++it) {
                    if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f1d(x1); }
                    else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f1d(x2); }
                }
                const double th = (a + b) / 2;
                RVec cand = std::cos(th) * u + std::sin(th) * w;
                if (objective(cand) < objective(best) - 1e-15) { improved += std::abs(th); best = cand.normalized(); }
            }
        if (improved < 1e-13) break;
    }

    auto normalize_solution = [&](Mat rho) {
        if (opt.normalization == QhNormalization::UnitDet) {
            const double det = rho.determinant().real();
            rho /= std::pow(det, 1.0 / double(n));
        } else {
            rho *= double(n) / rho.trace().real();
        }
        return rho;
    };

    std::vector<RVec> ordered{best};
    for (const auto& p : pd_dirs)
        if ((p.normalized() - best).norm() > 1e-6) ordered.push_back(p.normalized());

    for (const auto& dir : ordered) {
        Mat rho = assemble(dir);
        if (min_eig_of(rho) <= 0) continue;
        if (rho.trace().real() < 0) rho = -rho;
        rho = normalize_solution(rho);
        MetricSolution sol;
        sol.rho = rho;
        sol.eta = sqrtm_psd(rho);
        sol.h = sol.eta * H * sol.eta.inverse();
        sol.fill_diagnostics(H);
        bool dup = false;
        for (const auto& c : out.candidates)
            if ((c.rho - sol.rho).norm() < 1e-6 * rel_scale(sol.rho)) dup = true;
        if (!dup) out.candidates.push_back(std::move(sol));
    }
    std::sort(out.candidates.begin(), out.candidates.end(),
              [](const MetricSolution& a, const MetricSolution& b) {
                  return a.rho.trace().real() < b.rho.trace().real();
              });
    return out;
}

// ---------------------------------------------------------------------------
// exact BCH perturbation theory
// ---------------------------------------------------------------------------

namespace {

using GVec = std::vector<GRational>;  // coefficients on generators

Rational to_rational(double x) {
    for (std::int64_t q = 1; q <= 64; ++q) {
        const double n = x * double(q);
        const double rn = std::round(n);
        if (std::abs(n - rn) < 1e-12 && std::abs(rn) < 1e15) return Rational(std::int64_t(rn), q);
    }
    throw Error("bch_perturbative: structure constant " + std::to_string(x) + " is not a small rational");
}

struct AlgebraOps {
    std::size_t g;
    std::vector<std::vector<std::vector<Rational>>> f;

    GVec commutator(const GVec& a, const GVec& b) const {
        GVec out(g);
        for (std::size_t i = 0; i < g; ++i) {
            if (a[i].is_zero()) continue;
            for (std::size_t j = 0; j < g; ++j) {
                if (b[j].is_zero()) continue;
                const GRational prod = a[i] * b[j];
                for (std::size_t k = 0; k < g; ++k)
                    if (!f[i][j][k].is_zero())
                        out[k] = out[k] + prod * GRational(Rational(0), f[i][j][k]);  // i * f
            }
        }
        return out;
    }
};

// polynomial in eps with GVec coefficients, truncated at fixed degree
struct Series {
    std::vector<GVec> c;  // c[m] = coefficient of eps^m

    static Series zero(std::size_t g, int deg) { return {std::vector<GVec>(std::size_t(deg) + 1, GVec(g))}; }

    Series& add(const Series& o) {
        for (std::size_t m = 0; m < c.size(); ++m)
            for (std::size_t k = 0; k < c[m].size(); ++k) c[m][k] = c[m][k] + o.c[m][k];
        return *this;
    }
    Series scaled(const Rational& r) const {
        Series out = *this;
        for (auto& lvl : out.c)
            for (auto& x : lvl) x = x * GRational(r);
        return out;
    }
};

Series ad_series(const AlgebraOps& alg, const Series& q, const Series& x, int deg) {
    Series out = Series::zero(alg.g, deg);
    for (int m1 = 0; m1 <= deg; ++m1)
        for (int m2 = 0; m1 + m2 <= deg; ++m2) {
            GVec br = alg.commutator(q.c[std::size_t(m1)], x.c[std::size_t(m2)]);
            for (std::size_t k = 0; k < alg.g; ++k)
                out.c[std::size_t(m1 + m2)][k] = out.c[std::size_t(m1 + m2)][k] + br[k];
        }
    return out;
}

// F(q) = sum_{k>=1} ad_q^k(h0)/k! + i eps (2 h1 + sum_{k>=1} ad_q^k(h1)/k!)
Series master_series(const AlgebraOps& alg, const Series& q, const GVec& h0, const GVec& h1, int deg) {
    Series out = Series::zero(alg.g, deg);
    Series s0 = Series::zero(alg.g, deg);
    s0.c[0] = h0;
    Series s1 = Series::zero(alg.g, deg);
    s1.c[0] = h1;
    Rational fact(1);
    for (int k = 1; k <= deg; ++k) {
        s0 = ad_series(alg, q, s0, deg);
        s1 = ad_series(alg, q, s1, deg);
        fact = fact * Rational(k);
        out.add(s0.scaled(Rational(1) / fact));
        // the h1 chain is multiplied by i eps: shift degree by one
        Series shifted = Series::zero(alg.g, deg);
        for (int m = 0; m < deg; ++m)
            for (std::size_t kk = 0; kk < alg.g; ++kk)
                shifted.c[std::size_t(m + 1)][kk] = s1.c[std::size_t(m)][kk] * GRational::i() / GRational(fact);
        out.add(shifted);
    }
    // + 2 i eps h1
    for (std::size_t k = 0; k < alg.g; ++k)
        out.c[1][k] = out.c[1][k] + GRational(Rational(2)) * GRational::i() * GRational(h1[k]);
    return out;
}

// exact solve of M x = rhs with minimal-norm x orthogonal to ker(M).
// M is g x g Gaussian-rational; throws on inconsistency naming the generator.
GVec solve_min_norm(const std::vector<GVec>& M_cols, const GVec& rhs,
                    const std::vector<std::string>& names) {
    const std::size_t g = rhs.size();
    // Gaussian elimination on the augmented [M | rhs], tracking original rows
    std::vector<GVec> A(g, GVec(g + 1));
    std::vector<std::size_t> orig(g);
    for (std::size_t r = 0; r < g; ++r) {
        for (std::size_t c = 0; c < g; ++c) A[r][c] = M_cols[c][r];
        A[r][g] = rhs[r];
        orig[r] = r;
    }
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < g && row < g; ++col) {
        std::size_t pr = row;
        while (pr < g && A[pr][col].is_zero()) ++pr;
        if (pr == g) continue;
        std::swap(A[row], A[pr]);
        std::swap(orig[row], orig[pr]);
        const GRational p = A[row][col];
        for (std::size_t c = col; c <= g; ++c) A[row][c] = A[row][c] / p;
        for (std::size_t r = 0; r < g; ++r) {
            if (r == row || A[r][col].is_zero()) continue;
            const GRational m = A[r][col];
            for (std::size_t c = col; c <= g; ++c) A[r][c] = A[r][c] - m * A[row][c];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < g; ++r)
        if (!A[r][g].is_zero())
            throw Error("bch_perturbative: right-hand side outside range(ad_h0); obstruction along " +
                        names[orig[r]]);
    // particular solution with free variables zero
    GVec x(g);
    for (std::size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = A[k][g];
    // kernel basis (free columns)
    std::vector<GVec> kernel;
    std::vector<bool> is_pivot(g, false);
    for (auto c : pivot_col) is_pivot[c] = true;
    for (std::size_t fc = 0; fc < g; ++fc) {
        if (is_pivot[fc]) continue;
        GVec kv(g);
        kv[fc] = GRational(Rational(1));
        for (std::size_t k = 0; k < pivot_col.size(); ++k) kv[pivot_col[k]] = -A[k][fc];
        kernel.push_back(kv);
    }
    if (kernel.empty()) return x;
    // project x onto the orthogonal complement of the kernel (exact normal equations)
    const std::size_t kd = kernel.size();
    auto dot = [](const GVec& a, const GVec& b) {
        GRational s;
        for (std::size_t i = 0; i < a.size(); ++i)
            s = s + (GRational(a[i].re, -a[i].im) * b[i]);  // conjugate-linear in the first slot
        return s;
    };
    std::vector<GVec> G(kd, GVec(kd + 1));
    for (std::size_t i = 0; i < kd; ++i) {
        for (std::size_t j = 0; j < kd; ++j) G[i][j] = dot(kernel[i], kernel[j]);
        G[i][kd] = dot(kernel[i], x);
    }
    // small exact solve for the projection coefficients
    for (std::size_t col = 0; col < kd; ++col) {
        std::size_t pr = col;
        while (pr < kd && G[pr][col].is_zero()) ++pr;
        if (pr == kd) throw Error("bch_perturbative: singular kernel Gram matrix");
        std::swap(G[col], G[pr]);
        const GRational p = G[col][col];
        for (std::size_t c = col; c <= kd; ++c) G[col][c] = G[col][c] / p;
        for (std::size_t r = 0; r < kd; ++r) {
            if (r == col || G[r][col].is_zero()) continue;
            const GRational m = G[r][col];
            for (std::size_t c = col; c <= kd; ++c) G[r][c] = G[r][c] - m * G[col][c];
        }
    }
    for (std::size_t i = 0; i < kd; ++i)
        for (std::size_t k = 0; k < g; ++k) x[k] = x[k] - G[i][kd] * kernel[i][k];
    return x;
}

}  // namespace

std::vector<GRational> PerturbativeMetric::coeff(int order) const {
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (orders[i] == order) return q_coeffs[i];
    throw Error("PerturbativeMetric: order " + std::to_string(order) + " not computed");
}

PerturbativeMetric bch_perturbative(const LieAlgebraSpec& algebra,
                                    const std::vector<Rational>& h0_coeffs,
                                    const std::vector<Rational>& h1_coeffs, int max_order) {
    const std::size_t g = algebra.dim();
    if (h0_coeffs.size() != g || h1_coeffs.size() != g)
        throw Error("bch_perturbative: coefficient size mismatch with algebra");

    AlgebraOps alg;
    alg.g = g;
    alg.f.assign(g, std::vector<std::vector<Rational>>(g, std::vector<Rational>(g)));
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j)
            for (std::size_t k = 0; k < g; ++k) alg.f[i][j][k] = to_rational(algebra.f[i][j][k]);

    GVec h0(g), h1(g);
    for (std::size_t i = 0; i < g; ++i) {
        h0[i] = GRational(h0_coeffs[i]);
        h1[i] = GRational(h1_coeffs[i]);
    }

    // ad_{h0} as columns: image of each generator
    std::vector<GVec> ad_cols(g);
    for (std::size_t j = 0; j < g; ++j) {
        GVec ej(g);
        ej[j] = GRational(Rational(1));
        ad_cols[j] = alg.commutator(h0, ej);
    }

    PerturbativeMetric out;
    out.algebra = &algebra;
    Series q = Series::zero(g, max_order);
    for (int n = 1; n <= max_order; ++n) {
        Series F = master_series(alg, q, h0, h1, n);
        // F_n + (-ad_{h0} q_n) = 0  =>  ad_{h0} q_n = F_n
        GVec qn = solve_min_norm(ad_cols, F.c[std::size_t(n)], algebra.generator_names);
        q.c[std::size_t(n)] = qn;
        out.orders.push_back(n);
        out.q_coeffs.push_back(qn);
        bool zero = true;
        for (const auto& x : qn) zero = zero && x.is_zero();
        if (n > 1 && zero && n % 2 == 1) out.terminated = true;
    }
    return out;
}

}  // namespace ptqm
