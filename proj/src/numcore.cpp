#include "ptqm/numcore.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ptqm {

namespace {

void sort_pairs(std::vector<cplx>& ev, Mat* vecs) {
    std::vector<std::size_t> order(ev.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ev[a].real() != ev[b].real()) return ev[a].real() < ev[b].real();
        return ev[a].imag() < ev[b].imag();
    });
    std::vector<cplx> sorted(ev.size());
    Mat vs;
    if (vecs) vs.resize(vecs->rows(), vecs->cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = ev[order[i]];
        if (vecs) vs.col(Eigen::Index(i)) = vecs->col(Eigen::Index(order[i]));
    }
    ev = std::move(sorted);
    if (vecs) *vecs = std::move(vs);
}

void fix_phase(Mat& vecs) {
    for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
        Eigen::Index k;
        vecs.col(j).cwiseAbs().maxCoeff(&k);
        cplx pivot = vecs(k, j);
        if (std::abs(pivot) > 0) vecs.col(j) *= std::conj(pivot) / std::abs(pivot);
    }
}

}  // namespace

EigGeneral eig_general(const Mat& m, bool want_vectors) {
    require_square(m, "eig_general");
    require_finite(m, "eig_general");
    const lapack_int n = lapack_int(m.rows());
    Mat a = m;  // column-major, overwritten
    std::vector<cplx> w(static_cast<std::size_t>(n), cplx{});
    Mat vr;
    if (want_vectors) vr.resize(n, n);
    lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n,
        reinterpret_cast<lapack_complex_double*>(a.data()), n,
        reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
        want_vectors ? reinterpret_cast<lapack_complex_double*>(vr.data()) : nullptr,
        want_vectors ? n : 1);
    if (info != 0) {
        double res = std::nan("");
        throw Error("eig_general: QR iteration failed to converge (info=" + std::to_string(info) +
                    ", residual " + std::to_string(res) + ")");
    }
    EigGeneral out;
    out.eigenvalues = std::move(w);
    if (want_vectors) {
        sort_pairs(out.eigenvalues, &vr);
        for (Eigen::Index j = 0; j < vr.cols(); ++j) vr.col(j).normalize();
        fix_phase(vr);
        out.right_eigenvectors = std::move(vr);
    } else {
        sort_pairs(out.eigenvalues, nullptr);
    }
    return out;
}

EigHerm eigh(const Mat& m, double herm_tol) {
    require_square(m, "eigh");
    require_finite(m, "eigh");
    const double defect = hermiticity_defect(m);
    if (defect > herm_tol * rel_scale(m))
        throw Error("eigh: input not Hermitian, defect " + std::to_string(defect) +
                    " exceeds " + std::to_string(herm_tol) + " * scale");
    const lapack_int n = lapack_int(m.rows());
    Mat a = (m + m.adjoint()) / 2.0;
    RVec w(n);
    lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'V', 'L', n,
                                    reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0) throw Error("eigh: zheev failed, info=" + std::to_string(info));
    fix_phase(a);
    return {std::move(w), std::move(a)};
}

RVec eig_tridiag(const RVec& diag, const RVec& offdiag) {
    if (offdiag.size() != diag.size() - 1) throw Error("eig_tridiag: offdiag size must be n-1");
    RVec d = diag, e = offdiag;
    lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'N', lapack_int(d.size()), d.data(),
                                    e.data(), nullptr, 1);
    if (info != 0) throw Error("eig_tridiag: dstev failed, info=" + std::to_string(info));
    return d;
}

Mat sqrtm_psd(const Mat& m, double min_eig_threshold) {
    auto [w, v] = eigh(m);
    if (w.minCoeff() <= min_eig_threshold) {
        std::string bad;
        for (Eigen::Index i = 0; i < w.size(); ++i)
            if (w[i] <= min_eig_threshold) bad += (bad.empty() ? "" : ", ") + std::to_string(w[i]);
        throw Error("sqrtm_psd: matrix not positive definite; eigenvalues at or below threshold: " + bad);
    }
    return v * w.cwiseSqrt().asDiagonal() * v.adjoint();
}

Mat sqrtm_psd_derivative(const Mat& m, const Mat& dm, double min_eig_threshold) {
    auto [w, v] = eigh(m);
    if (w.minCoeff() <= min_eig_threshold)
        throw Error("sqrtm_psd_derivative: matrix not positive definite");
    RVec s = w.cwiseSqrt();
    Mat rhs = v.adjoint() * dm * v;
    Mat x(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) x(i, j) = rhs(i, j) / (s[i] + s[j]);
    return v * x * v.adjoint();
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Dopri {
    const std::function<Vec(double, const Vec&)>& rhs;
    Vec k1, k2, k3, k4, k5, k6, k7;

    // one step from (t, y) with size h; returns 5th order solution + error estimate norm
    double step(double t, const Vec& y, double h, Vec& out) {
        k1 = rhs(t, y);
        k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        out = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(t + h, out);
        Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        return err.norm();
    }
};

}  // namespace

TimeSeries<Vec> ode_integrate(const std::function<Vec(double, const Vec&)>& rhs,
                              const Vec& state0, const std::vector<double>& t_grid,
                              const OdeOptions& opt) {
    if (t_grid.size() < 1) throw Error("ode_integrate: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1]) throw Error("ode_integrate: grid must be strictly increasing");
    if (!state0.allFinite()) throw Error("ode_integrate: non-finite initial state");
    if (opt.method == OdeMethod::RK45 && opt.tol <= 0) throw Error("ode_integrate: RK45 requires tol > 0");

    TimeSeries<Vec> out;
    out.push_back(t_grid[0], state0);
    Vec y = state0;

    if (opt.method == OdeMethod::RK4) {
        // classic fixed-step RK4; each grid interval split so h <= h_init
        for (std::size_t g = 1; g < t_grid.size(); ++g) {
            double t = t_grid[g - 1];
            const double tend = t_grid[g];
            const int nsub = std::max(1, int(std::ceil((tend - t) / opt.h_init)));
            const double h = (tend - t) / nsub;
            for (int s = 0; s < nsub; ++s) {
                Vec k1 = rhs(t, y);
                Vec k2 = rhs(t + h / 2, y + (h / 2) * k1);
                Vec k3 = rhs(t + h / 2, y + (h / 2) * k2);
                Vec k4 = rhs(t + h, y + h * k3);
                y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
                t += h;
            }
            if (!y.allFinite()) throw Error("ode_integrate: non-finite state at t=" + std::to_string(tend));
            out.push_back(tend, y);
        }
        return out;
    }

    Dopri stepper{rhs};
    double h = opt.h_init;
    std::size_t steps = 0;
    Vec ynew(y.size());
    for (std::size_t g = 1; g < t_grid.size(); ++g) {
        double t = t_grid[g - 1];
        const double tend = t_grid[g];
        while (t < tend) {
            h = std::min(h, tend - t);
            if (h < opt.h_min)
                throw Error("ode_integrate: step size underflow (stiffness) at t=" + std::to_string(t));
            if (++steps > opt.max_steps) throw Error("ode_integrate: max step count exceeded");
            const double err = stepper.step(t, y, h, ynew);
            const double scale = opt.tol * std::max(1.0, y.norm());
            if (err <= scale) {
                t += h;
                y.swap(ynew);
                if (!y.allFinite())
                    throw Error("ode_integrate: non-finite state at t=" + std::to_string(t));
                h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2)));
            } else {
                h *= std::max(0.1, 0.9 * std::pow(scale / err, 0.2));
            }
        }
        out.push_back(tend, y);
    }
    return out;
}

MatSeries ode_integrate_matrix(const std::function<Mat(double, const Mat&)>& rhs,
                               const Mat& state0, const std::vector<double>& t_grid,
                               const OdeOptions& opt) {
    const Eigen::Index r = state0.rows(), c = state0.cols();
    auto vec_rhs = [&](double t, const Vec& v) -> Vec {
        Mat m = Eigen::Map<const Mat>(v.data(), r, c);
        Mat d = rhs(t, m);
        return Eigen::Map<const Vec>(d.data(), r * c);
    };
    Vec v0 = Eigen::Map<const Vec>(state0.data(), r * c);
    auto flat = ode_integrate(vec_rhs, v0, t_grid, opt);
    MatSeries out;
    for (std::size_t i = 0; i < flat.size(); ++i)
        out.push_back(flat.times[i], Mat(Eigen::Map<const Mat>(flat.values[i].data(), r, c)));
    return out;
}

namespace {

template <typename T>
T simpson_rec(const std::function<T(double)>& f, double a, double b, T fa, T fm, T fb, T whole,
              double tol, int depth) {
    const double m = (a + b) / 2;
    const double lm = (a + m) / 2, rm = (m + b) / 2;
    T flm = f(lm), frm = f(rm);
    T left = (m - a) / 6 * (fa + 4.0 * flm + fm);
    T right = (b - m) / 6 * (fm + 4.0 * frm + fb);
    T delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_rec<double>(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

cplx integrate_adaptive_cplx(const std::function<cplx(double)>& f, double a, double b, double tol,
                             int max_depth) {
    if (a == b) return 0.0;
    cplx fa = f(a), fb = f(b), fm = f((a + b) / 2);
    cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec<cplx>(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

Mat integrate_simpson_matrix(const std::function<Mat(double)>& f, double a, double b, int n) {
    if (n % 2 != 0 || n < 2) throw Error("integrate_simpson_matrix: n must be even and >= 2");
    const double h = (b - a) / n;
    Mat acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * (h / 3);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) return {a};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
    out.back() = b;
    return out;
}

std::vector<Mat> fd4_derivative(const MatSeries& series) {
    const std::size_t n = series.size();
    if (n < 5) throw Error("fd4_derivative: need at least 5 samples");
    const double h = series.times[1] - series.times[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(series.times[i] - series.times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw Error("fd4_derivative: grid is not uniform");
    const auto& v = series.values;
    std::vector<Mat> d(n);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12 * h);
    // one-sided 4th order at the ends
    auto fwd = [&](std::size_t i) {
        return (-25 * v[i] + 48 * v[i + 1] - 36 * v[i + 2] + 16 * v[i + 3] - 3 * v[i + 4]) / (12 * h);
    };
    auto bwd = [&](std::size_t i) {
        return (25 * v[i] - 48 * v[i - 1] + 36 * v[i - 2] - 16 * v[i - 3] + 3 * v[i - 4]) / (12 * h);
    };
    d[0] = fwd(0);
    d[1] = fwd(1);
    d[n - 2] = bwd(n - 2);
    d[n - 1] = bwd(n - 1);
    return d;
}

}  // namespace ptqm
