#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptqm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Planck constant; the whole library works in natural units by default.
inline std::atomic<double>& hbar_storage() {
    static std::atomic<double> h{1.0};
    return h;
}
inline double hbar() { return hbar_storage().load(std::memory_order_relaxed); }
inline void set_hbar(double h) { hbar_storage().store(h, std::memory_order_relaxed); }

inline void require_square(const Mat& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(std::string(who) + ": matrix must be square, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_finite(const Mat& m, const char* who) {
    if (!m.allFinite()) throw Error(std::string(who) + ": matrix has non-finite entries");
}

inline double rel_scale(const Mat& m) { return std::max(1.0, m.norm()); }

inline Mat dagger(const Mat& m) { return m.adjoint(); }

inline double hermiticity_defect(const Mat& m) { return (m - m.adjoint()).norm(); }

/// Ordered samples of a homogeneous quantity on a strictly increasing time grid.
template <typename V>
struct TimeSeries {
    std::vector<double> times;
    std::vector<V> values;

    TimeSeries() = default;
    TimeSeries(std::vector<double> t, std::vector<V> v) : times(std::move(t)), values(std::move(v)) {
        validate();
    }

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    void push_back(double t, V v) {
        if (!times.empty() && t <= times.back())
            throw Error("TimeSeries: times must be strictly increasing");
        times.push_back(t);
        values.push_back(std::move(v));
    }

    void validate() const {
        if (times.size() != values.size()) throw Error("TimeSeries: times/values size mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (times[i] <= times[i - 1]) throw Error("TimeSeries: times must be strictly increasing");
    }

    /// Index of the sample at time t (exact grid lookup with tolerance).
    std::size_t index_of(double t, double tol = 1e-12) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) <= tol) return i;
        throw Error("TimeSeries: time " + std::to_string(t) + " not on grid");
    }
};

using MatSeries = TimeSeries<Mat>;
using RealSeries = TimeSeries<double>;
using CplxSeries = TimeSeries<cplx>;

struct EigGeneral {
    std::vector<cplx> eigenvalues;  // sorted by (real, imag) ascending
    Mat right_eigenvectors;         // unit-norm columns, empty if not requested
};

/// Dense non-symmetric complex eigenproblem (LAPACK zgeev behind the contract).
EigGeneral eig_general(const Mat& m, bool want_vectors = true);

struct EigHerm {
    RVec eigenvalues;  // ascending
    Mat eigenvectors;  // orthonormal columns
};

/// Hermitian eigenproblem; rejects inputs with a Hermiticity defect.
EigHerm eigh(const Mat& m, double herm_tol = 1e-12);

/// Real symmetric tridiagonal eigenvalues (ascending).
RVec eig_tridiag(const RVec& diag, const RVec& offdiag);

namespace detail {

// Pade-13 scaling and squaring, usable at double or long double precision.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> expm_impl(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Real = typename Eigen::NumTraits<Scalar>::Real;
    const Eigen::Index n = a.rows();
    const Real theta13 = Real(5.371920351148152);
    Real norm = Real(0);
    for (Eigen::Index j = 0; j < n; ++j) {
        Real col = Real(0);
        for (Eigen::Index i = 0; i < n; ++i) col += std::abs(a(i, j));
        norm = std::max(norm, col);
    }
    int squarings = 0;
    if (norm > theta13) {
        squarings = std::max(0, int(std::ceil(std::log2(double(norm / theta13)))));
        if (squarings > 80) throw Error("expm: scaled-argument overflow, norm " + std::to_string(double(norm)));
    }
    M as = a / Scalar(std::pow(Real(2), Real(squarings)));
    static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800.,  129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,       1323241920.,
                               40840800.,          960960.,            16380.,
                               182.,               1.};
    const M a2 = as * as;
    const M a4 = a2 * a2;
    const M a6 = a4 * a2;
    const M ident = M::Identity(n, n);
    M u = as * (a6 * (Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2) +
                Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 + Scalar(b[1]) * ident);
    M v = a6 * (Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2) +
          Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 + Scalar(b[0]) * ident;
    M num = v + u;
    M den = v - u;
    M r = den.partialPivLu().solve(num);
    for (int i = 0; i < squarings; ++i) r = r * r;
    if (!r.allFinite()) throw Error("expm: non-finite result (argument norm " + std::to_string(double(norm)) + ")");
    return r;
}

}  // namespace detail

/// Matrix exponential; exp(0) = I exactly.
inline Mat expm(const Mat& m) {
    require_square(m, "expm");
    require_finite(m, "expm");
    if (m.isZero(0.0)) return Mat::Identity(m.rows(), m.cols());
    return detail::expm_impl<cplx>(m);
}

using MatL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

inline MatL expm_ld(const MatL& m) { return detail::expm_impl<std::complex<long double>>(m); }

inline MatL to_long_double(const Mat& m) {
    return m.cast<std::complex<long double>>();
}
inline Mat from_long_double(const MatL& m) {
    return m.cast<cplx>();
}

/// Positive square root of a Hermitian positive-definite matrix.
/// Indefinite inputs signal metric breakdown and are rejected with the
/// offending eigenvalues listed.
Mat sqrtm_psd(const Mat& m, double min_eig_threshold = 1e-12);

/// Derivative of sqrtm_psd along a given d(m)/dt: solves the Sylvester
/// equation  s X + X s = dm  in the eigenbasis of s = sqrt(m).
Mat sqrtm_psd_derivative(const Mat& m, const Mat& dm, double min_eig_threshold = 1e-12);

enum class OdeMethod { RK4, RK45 };

struct OdeOptions {
    OdeMethod method = OdeMethod::RK45;
    double tol = 1e-10;       // RK45 local error target per step
    double h_init = 1e-3;
    double h_min = 1e-14;
    std::size_t max_steps = 50'000'000;
};

/// Integrates x' = rhs(t, x) over the given grid and returns the samples at
/// exactly the grid times. RK4 steps the grid intervals directly; RK45 is
/// Dormand-Prince 5(4) with step control and exact hits on grid points.
TimeSeries<Vec> ode_integrate(const std::function<Vec(double, const Vec&)>& rhs,
                              const Vec& state0, const std::vector<double>& t_grid,
                              const OdeOptions& opt = {});

/// Matrix-valued convenience wrapper around ode_integrate.
MatSeries ode_integrate_matrix(const std::function<Mat(double, const Mat&)>& rhs,
                               const Mat& state0, const std::vector<double>& t_grid,
                               const OdeOptions& opt = {});

/// Adaptive Simpson quadrature.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 48);
cplx integrate_adaptive_cplx(const std::function<cplx(double)>& f, double a, double b,
                             double tol = 1e-12, int max_depth = 48);

/// Composite Simpson on n (even) intervals, complex matrix integrand.
Mat integrate_simpson_matrix(const std::function<Mat(double)>& f, double a, double b, int n);

/// Uniform grid helper: n points from a to b inclusive.
std::vector<double> linspace(double a, double b, std::size_t n);

/// 4th-order central first derivative of a sampled series (one-sided 4th-order
/// stencils at the ends). Requires a uniform grid with at least 5 samples.
std::vector<Mat> fd4_derivative(const MatSeries& series);

}  // namespace ptqm
