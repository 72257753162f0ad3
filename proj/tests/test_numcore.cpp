#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptqm/models.hpp"
#include "ptqm/numcore.hpp"

#include <cmath>
#include <random>

using namespace ptqm;

namespace {

Mat random_matrix(Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Mat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

}  // namespace

TEST_CASE("eig_general basics") {
    auto id = eig_general(Mat::Identity(2, 2));
    CHECK(std::abs(id.eigenvalues[0] - 1.0) < 1e-14);
    CHECK(std::abs(id.eigenvalues[1] - 1.0) < 1e-14);

    auto sx = eig_general(pauli_x());
    CHECK(std::abs(sx.eigenvalues[0] - cplx(-1, 0)) < 1e-14);
    CHECK(std::abs(sx.eigenvalues[1] - cplx(1, 0)) < 1e-14);

    // two-level H with omega=1, lambda=2, kappa=1: E = -1/2 -+ sqrt(3)/2
    auto tl = eig_general(build_two_level(1, 2, 1));
    const double z = std::sqrt(3.0) / 2;
    CHECK(std::abs(tl.eigenvalues[0] - cplx(-0.5 - z, 0)) < 1e-12);
    CHECK(std::abs(tl.eigenvalues[1] - cplx(-0.5 + z, 0)) < 1e-12);
}

TEST_CASE("eig residuals up to dim 64") {
    for (Eigen::Index n : {4, 16, 64}) {
        Mat m = random_matrix(n, 11 + unsigned(n));
        auto eg = eig_general(m);
        for (Eigen::Index k = 0; k < n; ++k) {
            Vec v = eg.right_eigenvectors.col(k);
            CHECK((m * v - eg.eigenvalues[std::size_t(k)] * v).norm() <= 1e-10 * m.norm());
            CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("eigh") {
    Mat d(2, 2);
    d << 3, 0, 0, 1;
    auto e = eigh(d);
    CHECK(e.eigenvalues[0] == doctest::Approx(1).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(3).epsilon(1e-14));

    auto ez = eigh(pauli_z());
    CHECK(ez.eigenvalues[0] == doctest::Approx(-1));
    CHECK(ez.eigenvalues[1] == doctest::Approx(1));

    // static rho of the two-level model at lambda=2, kappa=1
    const double zeta = std::sqrt(3.0);
    Mat rho(2, 2);
    rho << 2.0 / zeta, cplx(0, 1.0 / zeta), cplx(0, -1.0 / zeta), 2.0 / zeta;
    auto er = eigh(rho);
    CHECK(er.eigenvalues[0] == doctest::Approx(std::sqrt(3.0) / 3).epsilon(1e-12));
    CHECK(er.eigenvalues[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK((er.eigenvectors.adjoint() * er.eigenvectors - Mat::Identity(2, 2)).norm() < 1e-12);

    CHECK_THROWS_AS(eigh(build_two_level(1, 2, 1)), Error);  // not Hermitian
}

TEST_CASE("expm") {
    CHECK((expm(Mat::Zero(3, 3)) - Mat::Identity(3, 3)).norm() == 0.0);

    const double th = 0.7;
    Mat rot = expm(cplx(0, th) * pauli_y());
    Mat expect(2, 2);
    expect << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    CHECK((rot - expect).norm() < 1e-14);

    for (unsigned seed : {1u, 2u, 3u}) {
        Mat m = random_matrix(6, seed);
        m *= 10.0 / m.norm();
        CHECK((expm(m) * expm(-m) - Mat::Identity(6, 6)).norm() < 1e-10);
    }
    // expm(M^dag) = expm(M)^dag
    Mat m = random_matrix(5, 77);
    CHECK((expm(m.adjoint()) - expm(m).adjoint()).norm() < 1e-12 * expm(m).norm());
}

TEST_CASE("expm Hermitizes the static H_K via the BCH-free conjugation") {
    // eta = e^{theta K4}, theta = arctanh(lambda/(b-a)); rho = e^{2 theta K4}
    auto k = build_fock_two_mode(12);
    const double a = 1.0, b = 2.0, lam = 0.4;
    Mat H = a * k.K1 + b * k.K2 + cplx(0, lam) * k.K3;
    const double theta = std::atanh(lam / (b - a));
    Mat eta = expm(theta * k.K4);
    Mat h = eta * H * eta.inverse();
    CHECK(k.rep.interior_norm(h - h.adjoint()) < 1e-8);
    // the squared map is the metric: rho H rho^{-1} = H^dag
    Mat rho = expm(2 * theta * k.K4);
    CHECK(k.rep.interior_norm(rho * H - H.adjoint() * rho) < 1e-8);
}

TEST_CASE("sqrtm_psd") {
    CHECK((sqrtm_psd(Mat::Identity(4, 4)) - Mat::Identity(4, 4)).norm() < 1e-14);
    Mat d(2, 2);
    d << 4, 0, 0, 9;
    Mat r = sqrtm_psd(d);
    CHECK(std::abs(r(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(r(1, 1) - 3.0) < 1e-14);

    Mat indef(2, 2);
    indef << 1, 0, 0, -2;
    CHECK_THROWS_WITH_AS(sqrtm_psd(indef), doctest::Contains("-2.0"), Error);

    // composition consistency: sqrt(sqrt(M)^4) = M for PD M
    Mat m = random_matrix(5, 5);
    Mat pd = m * m.adjoint() + Mat::Identity(5, 5);
    Mat s = sqrtm_psd(pd);
    Mat s4 = s * s * s * s;
    CHECK((sqrtm_psd(s4) - pd).norm() < 1e-8 * pd.norm());
}

TEST_CASE("sqrtm derivative solves the Sylvester equation") {
    Mat m = random_matrix(4, 9);
    Mat pd = m * m.adjoint() + 2.0 * Mat::Identity(4, 4);
    Mat dm = random_matrix(4, 10);
    dm = (dm + dm.adjoint()) / 2.0;
    Mat s = sqrtm_psd(pd);
    Mat x = sqrtm_psd_derivative(pd, dm);
    CHECK((s * x + x * s - dm).norm() < 1e-11 * dm.norm());
}

TEST_CASE("ode_integrate") {
    // constant rhs = 0
    Vec r0(4);
    r0 << 1, 2, 3, 4;
    auto flat = ode_integrate([](double, const Vec& v) { return Vec(Vec::Zero(v.size())); }, r0,
                              linspace(0, 1, 5));
    CHECK((flat.values.back() - r0).norm() == 0.0);

    // scalar x' = x
    auto s = ode_integrate([](double, const Vec& v) { return v; }, Vec::Ones(1), {0.0, 1.0});
    CHECK(std::abs(s.values.back()[0] - std::exp(1.0)) < 1e-8);

    // RK4 global order on the exponential: halve h twice, fit the exponent
    std::vector<double> errs;
    for (double h : {0.05, 0.025, 0.0125}) {
        OdeOptions opt;
        opt.method = OdeMethod::RK4;
        opt.h_init = h;
        auto r = ode_integrate([](double, const Vec& v) { return v; }, Vec::Ones(1), {0.0, 2.0}, opt);
        errs.push_back(std::abs(r.values.back()[0] - std::exp(2.0)));
    }
    const double p1 = std::log2(errs[0] / errs[1]);
    const double p2 = std::log2(errs[1] / errs[2]);
    CHECK(p1 == doctest::Approx(4.0).epsilon(0.3 / 4.0));
    CHECK(p2 == doctest::Approx(4.0).epsilon(0.3 / 4.0));
}

TEST_CASE("ode_integrate stiffness error carries the failure time") {
    // x' = x^2 from x(0)=1 blows up at t=1
    OdeOptions opt;
    opt.tol = 1e-8;
    CHECK_THROWS_AS(
        ode_integrate([](double, const Vec& v) { return Vec(v.array().square().matrix()); },
                      Vec::Ones(1), {0.0, 2.0}, opt),
        Error);
}

TEST_CASE("adaptive Simpson") {
    CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(integrate_adaptive_cplx([](double x) { return std::exp(cplx(0, x)); }, 0, M_PI) -
                   cplx(0, 2)) < 1e-12);
}

TEST_CASE("fd4 derivative order") {
    MatSeries s;
    for (double t : linspace(0, 1, 41)) {
        Mat m(1, 1);
        m(0, 0) = std::sin(3 * t);
        s.push_back(t, m);
    }
    auto d = fd4_derivative(s);
    double worst = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        worst = std::max(worst, std::abs(d[i](0, 0) - 3 * std::cos(3 * s.times[i])));
    CHECK(worst < 2e-6);
}

TEST_CASE("TimeSeries invariants") {
    TimeSeries<double> ts;
    ts.push_back(0.0, 1.0);
    CHECK_THROWS_AS(ts.push_back(0.0, 2.0), Error);
    CHECK_THROWS_AS(ts.push_back(-1.0, 2.0), Error);
    ts.push_back(0.5, 2.0);
    CHECK(ts.index_of(0.5) == 1);
}
