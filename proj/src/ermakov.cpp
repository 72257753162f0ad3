#include "ptqm/ermakov.hpp"

#include <algorithm>
#include <cmath>

namespace ptqm {

double EPSolution::max_residual() const {
    double m = 0;
    for (double r : residual) m = std::max(m, std::abs(r));
    return m;
}

double pinney_constraint_c(double A, double B, double omega, double wronskian) {
    const double c2 = A * B - omega * omega / (wronskian * wronskian);
    if (c2 < 0) throw Error("pinney_constraint_c: A B < omega^2 / W^2, no real C");
    return std::sqrt(c2);
}

EPSolution pinney_sigma(const PinneyInput& in, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw Error("pinney_sigma: empty grid");

    // obtain u, u', v, v' on the grid
    std::vector<std::array<double, 4>> uv(t_grid.size());
    if (in.uv) {
        const auto& f = *in.uv;
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            uv[i] = {f[0](t_grid[i]), f[1](t_grid[i]), f[2](t_grid[i]), f[3](t_grid[i])};
    } else {
        auto rhs = [&](double t, const Vec& y) {
            Vec d(4);
            const double k = in.kappa(t);
            d << y[1], k * y[0], y[3], k * y[2];  // x'' = kappa x
            return d;
        };
        Vec y0(4);
        y0 << 1, 0, 0, 1;
        std::vector<double> grid = t_grid;
        if (grid.front() > 0) grid.insert(grid.begin(), 0.0);
        OdeOptions opt;
        opt.tol = 1e-12;
        auto sol = ode_integrate(rhs, y0, grid, opt);
        const std::size_t off = grid.size() - t_grid.size();
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const Vec& y = sol.values[i + off];
            uv[i] = {y[0].real(), y[1].real(), y[2].real(), y[3].real()};
        }
    }

    // Wronskian must stay away from zero (it is constant for exact solutions)
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double w = uv[i][0] * uv[i][3] - uv[i][2] * uv[i][1];
        if (std::abs(w) < 1e-10)
            throw Error("pinney_sigma: Wronskian vanishes at t=" + std::to_string(t_grid[i]));
    }

    EPSolution out;
    out.times = t_grid;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        const double u = uv[i][0], ut = uv[i][1], v = uv[i][2], vt = uv[i][3];
        const double k = in.kappa(t);
        const double s2 = in.A * u * u + in.B * v * v + 2 * in.C * u * v;
        if (s2 <= 0)
            throw Error("pinney_sigma: sigma^2 <= 0 at t=" + std::to_string(t));
        const double s = std::sqrt(s2);
        const double sd = (in.A * u * ut + in.B * v * vt + in.C * (ut * v + u * vt)) / s;
        // second derivative from u'' = kappa u, v'' = kappa v
        const double num = in.A * (ut * ut + u * (k * u)) + in.B * (vt * vt + v * (k * v)) +
                           in.C * (k * u * v + 2 * ut * vt + u * k * v);
        const double sdd = (num - sd * sd) / s;
        out.value.push_back(s);
        out.d1.push_back(sd);
        out.d2.push_back(sdd);
        out.residual.push_back(sdd - k * s - in.omega * in.omega / (s2 * s));
    }
    return out;
}

namespace {

double integral_of(const ScalarFn& f, double a, double b) {
    return integrate_adaptive(f, a, b, 1e-13);
}

}  // namespace

EPSolution dissipative_ep_chi(const DissipativeEPInput& in, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw Error("dissipative_ep_chi: empty grid");
    EPSolution out;
    out.times = t_grid;
    const double k2 = 1 + in.c3 * in.c3;
    double acc = integral_of(in.lambda, 0.0, t_grid.front());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0) acc += integral_of(in.lambda, t_grid[i - 1], t_grid[i]);
        const double lam = in.lambda(t_grid[i]);
        if (std::abs(lam) < 1e-14)
            throw Error("dissipative_ep_chi: lambda vanishes at t=" + std::to_string(t_grid[i]) +
                        " (the lambda'/lambda coefficient requires lambda != 0)");
        const double u = in.c4 - acc;
        const double ch = std::cosh(u), sh = std::sinh(u);
        const double chi2 = k2 * ch * ch - in.c3 * in.c3;
        const double chi = std::sqrt(chi2);
        // chi' = -lambda k2 sinh u cosh u / chi
        const double chid = -lam * k2 * sh * ch / chi;
        double resid = 0, chidd = 0;
        if (in.lambda_dot) {
            const double lamd = in.lambda_dot(t_grid[i]);
            // chi'' from differentiating chi' (u' = -lambda)
            chidd = (-lamd * k2 * sh * ch + lam * lam * k2 * (ch * ch + sh * sh)) / chi -
                    chid * chid / chi;
            resid = chidd - (lamd / lam) * chid - lam * lam * chi -
                    in.c3 * in.c3 * lam * lam / (chi2 * chi);
        }
        out.value.push_back(chi);
        out.d1.push_back(chid);
        out.d2.push_back(chidd);
        out.residual.push_back(resid);
    }
    return out;
}

double GammaChain::constraint_defect() const {
    double m = 0;
    for (std::size_t i = 0; i < times.size(); ++i)
        m = std::max(m, std::abs(std::sinh(gamma4[i]) * std::cosh(gamma3[i]) - c3));
    return m;
}

GammaChain gamma_chain(const DissipativeEPInput& in, const std::vector<double>& t_grid, double c1,
                       double c2) {
    GammaChain out;
    out.times = t_grid;
    out.c1 = c1;
    out.c2 = c2;
    out.c3 = in.c3;
    double acc = integral_of(in.lambda, 0.0, t_grid.front());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0) acc += integral_of(in.lambda, t_grid[i - 1], t_grid[i]);
        const double u = in.c4 - acc;
        const double k2 = 1 + in.c3 * in.c3;
        const double chi2 = k2 * std::cosh(u) * std::cosh(u) - in.c3 * in.c3;
        const double chi = std::sqrt(chi2);
        if (chi < 1.0 - 1e-12)
            throw Error("gamma_chain: chi < 1 at t=" + std::to_string(t_grid[i]) +
                        ", outside the arccosh domain");
        // signed branch through the chi = 1 turning point
        const double g3 = (u >= 0 ? 1.0 : -1.0) * std::acosh(std::max(chi, 1.0));
        const double g4 = std::asinh(in.c3 / std::cosh(g3));
        const double lam = in.lambda(t_grid[i]);
        out.gamma3.push_back(g3);
        out.gamma4.push_back(g4);
        out.gamma3_dot.push_back(-lam * std::cosh(g4));
        out.gamma4_dot.push_back(lam * std::tanh(g3) * std::sinh(g4));
    }
    return out;
}

namespace {

template <typename M>
M expm_any(const M& a) {
    return detail::expm_impl<typename M::Scalar>(a);
}

}  // namespace

HkChainResult hk_hermitian_and_energy(const ScalarFn& a_fn, const ScalarFn& lambda_fn,
                                      const GammaChain& chain, std::size_t sample,
                                      const TwoModeK& k, const HkChainOptions& opt) {
    if (sample >= chain.times.size()) throw Error("hk_hermitian_and_energy: sample out of range");
    const double t = chain.times[sample];
    const double a = a_fn(t), lam = lambda_fn(t);
    const double g3 = chain.gamma3[sample], g4 = chain.gamma4[sample];
    const double g3d = chain.gamma3_dot[sample], g4d = chain.gamma4_dot[sample];
    const double hb = hbar();

    HkChainResult out;
    out.h = a * (k.K1 + k.K2) + 0.5 * lam * (std::sinh(g4) / std::cosh(g3)) * (k.K1 - k.K2);
    out.H_tilde = a * (k.K1 + k.K2) + 0.25 * lam * std::sinh(2 * g4) * (k.K1 - k.K2) -
                  cplx(0, lam) * (std::sinh(g4) * std::sinh(g4) * k.K3 -
                                  std::sinh(g4) * std::tanh(g3) * k.K4);

    const Mat H = a * (k.K1 + k.K2) + cplx(0, lam) * k.K3;
    const Mat pr = k.rep.interior_projector();

    auto conjugation_residuals = [&](auto scalar_tag) {
        using S = decltype(scalar_tag);
        using MX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
        auto cast = [](const Mat& m) { return MX(m.template cast<S>()); };
        const MX K1 = cast(k.K1), K2 = cast(k.K2), K3 = cast(k.K3), K4 = cast(k.K4);
        const MX E1 = expm_any(MX(S(chain.c1) * K1));
        const MX E2 = expm_any(MX(S(chain.c2) * K2));
        const MX E3 = expm_any(MX(S(g3) * K3));
        const MX E4 = expm_any(MX(S(g4) * K4));
        const MX E4i = expm_any(MX(S(-g4) * K4));
        const MX E3i = expm_any(MX(S(-g3) * K3));
        const MX E2i = expm_any(MX(S(-chain.c2) * K2));
        const MX E1i = expm_any(MX(S(-chain.c1) * K1));
        MX eta = E1 * E2 * E3 * E4;
        MX etainv = E4i * E3i * E2i * E1i;
        MX etadot = E1 * E2 * (S(g3d) * (K3 * E3) * E4 + E3 * (S(g4d) * (K4 * E4)));
        const MX prx = cast(pr);
        MX lhs = eta * cast(H) * etainv + S(0, hb) * etadot * etainv;
        MX diff = prx * (lhs - cast(out.h)) * prx;
        MX hdef = prx * (lhs - lhs.adjoint()) * prx;
        out.eta = MX(eta).template cast<cplx>();
        out.rho = (eta.adjoint() * eta).template cast<cplx>();
        out.tdde_residual_interior = double(diff.norm());
        out.h_defect_interior = double(hdef.norm());
    };

    if (opt.long_double_conjugation)
        conjugation_residuals(std::complex<long double>{});
    else
        conjugation_residuals(cplx{});
    return out;
}

}  // namespace ptqm
