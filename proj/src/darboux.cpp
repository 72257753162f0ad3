#include "ptqm/darboux.hpp"

#include <algorithm>
#include <cmath>

namespace ptqm {

Field grid_d1(const Field& f, const Grid1D& g) {
    const int n = g.n;
    const double h = g.h();
    Field d(n);
    for (int i = 2; i < n - 2; ++i)
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12 * h);
    auto fwd = [&](int i) {
        return (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]) /
               (12 * h);
    };
    auto bwd = [&](int i) {
        return (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]) /
               (12 * h);
    };
    d[0] = fwd(0);
    d[1] = fwd(1);
    d[n - 2] = bwd(n - 2);
    d[n - 1] = bwd(n - 1);
    return d;
}

Field grid_d2(const Field& f, const Grid1D& g) {
    const int n = g.n;
    const double h = g.h();
    Field d(n);
    for (int i = 2; i < n - 2; ++i)
        d[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) /
               (12 * h * h);
    auto edge = [&](int i) {
        const cplx fm = (i == 0) ? cplx(0) : f[i - 1];   // Dirichlet
        const cplx fp = (i == n - 1) ? cplx(0) : f[i + 1];
        return (fp - 2.0 * f[i] + fm) / (h * h);
    };
    d[0] = edge(0);
    d[1] = edge(1);
    d[n - 2] = edge(n - 2);
    d[n - 1] = edge(n - 1);
    return d;
}

std::vector<int> trust_window(const Field& u, double rel) {
    double mx = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) mx = std::max(mx, std::abs(u[i]));
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) >= rel * mx) idx.push_back(int(i));
    return idx;
}

Field SusyFactorization::apply_Lp(const Field& f) const { return -grid_d1(f, grid) + W.cwiseProduct(f); }
Field SusyFactorization::apply_Lm(const Field& f) const { return grid_d1(f, grid) + W.cwiseProduct(f); }
Field SusyFactorization::apply_H1(const Field& f) const { return -grid_d2(f, grid) + V1.cwiseProduct(f); }
Field SusyFactorization::apply_H2(const Field& f) const { return -grid_d2(f, grid) + V2.cwiseProduct(f); }

namespace {

double interior_ratio(const Field& num, const Field& den, int margin) {
    double nn = 0, dd = 0;
    for (Eigen::Index i = margin; i < num.size() - margin; ++i) {
        nn += std::norm(num[i]);
        dd += std::norm(den[i]);
    }
    return std::sqrt(nn) / std::max(std::sqrt(dd), 1e-300);
}

}  // namespace

double SusyFactorization::factorization_defect_H1(const Field& f) const {
    Field d = apply_H1(f) - apply_Lp(apply_Lm(f));
    return interior_ratio(d, f, 8);
}

double SusyFactorization::factorization_defect_H2(const Field& f) const {
    Field d = apply_H2(f) - apply_Lm(apply_Lp(f));
    return interior_ratio(d, f, 8);
}

namespace {

RVec lowest_tridiag(const Field& V, const Grid1D& g, int k) {
    for (Eigen::Index i = 0; i < V.size(); ++i)
        if (std::abs(V[i].imag()) > 1e-12)
            throw Error("susy eig: complex potential, tridiagonal solver needs a real spectrum path");
    const double h = g.h();
    RVec diag(g.n), off(g.n - 1);
    for (int i = 0; i < g.n; ++i) diag[i] = 2.0 / (h * h) + V[i].real();
    off.setConstant(-1.0 / (h * h));
    RVec all = eig_tridiag(diag, off);
    return all.head(k);
}

}  // namespace

RVec SusyFactorization::eig_H1(int k) const { return lowest_tridiag(V1, grid, k); }
RVec SusyFactorization::eig_H2(int k) const { return lowest_tridiag(V2, grid, k); }

SusyFactorization susy_factorize(const std::function<cplx(double)>& W_fn, const Grid1D& grid) {
    grid.validate();
    SusyFactorization s;
    s.grid = grid;
    s.W.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) s.W[i] = W_fn(grid.point(i));
    if (!s.W.allFinite()) throw Error("susy_factorize: superpotential not finite on grid");
    Field Wp = grid_d1(s.W, grid);
    s.V1 = s.W.cwiseProduct(s.W) - Wp;
    s.V2 = s.W.cwiseProduct(s.W) + Wp;
    return s;
}

SusySpectra susy_spectra_richardson(const std::function<cplx(double)>& W_fn, const Grid1D& grid,
                                    int k_levels) {
    Grid1D fine = grid;
    fine.n = 2 * grid.n + 1;  // halves the spacing exactly
    auto c = susy_factorize(W_fn, grid);
    auto f = susy_factorize(W_fn, fine);
    SusySpectra out;
    out.E1 = (4.0 * f.eig_H1(k_levels) - c.eig_H1(k_levels)) / 3.0;
    out.E2 = (4.0 * f.eig_H2(k_levels) - c.eig_H2(k_levels)) / 3.0;
    return out;
}

ComplexifiedSuperpotential complexify_superpotential(const std::function<double(double)>& Wi_fn,
                                                     int sign, const Grid1D& grid) {
    grid.validate();
    if (sign != 1 && sign != -1) throw Error("complexify_superpotential: sign must be +-1");
    Field Wi(grid.n), lnWi(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double w = Wi_fn(grid.point(i));
        if (w <= 0)
            throw Error("complexify_superpotential: W_i must stay positive (log domain), got " +
                        std::to_string(w) + " at x=" + std::to_string(grid.point(i)));
        Wi[i] = w;
        lnWi[i] = std::log(w);
    }
    ComplexifiedSuperpotential out;
    Field Wr = 0.5 * double(sign) * grid_d1(lnWi, grid);
    out.W = Wr + cplx(0, 1) * Wi;
    Field Wp = grid_d1(out.W, grid);
    out.V1 = out.W.cwiseProduct(out.W) - Wp;
    out.V2 = out.W.cwiseProduct(out.W) + Wp;
    for (int i = 8; i < grid.n - 8; ++i) {
        out.max_im_V1 = std::max(out.max_im_V1, std::abs(out.V1[i].imag()));
        out.max_im_V2 = std::max(out.max_im_V2, std::abs(out.V2[i].imag()));
    }
    return out;
}

FieldSeries cn_evolve(const std::function<cplx(double, double)>& v, const Field& psi0,
                      const Grid1D& grid, const std::vector<double>& t_grid) {
    grid.validate();
    if (psi0.size() != grid.n) throw Error("cn_evolve: field size mismatch");
    const int n = grid.n;
    const double h2 = grid.h() * grid.h();
    FieldSeries out;
    Field psi = psi0;
    out.push_back(t_grid[0], psi);
    // Thomas solve of (I + i dt/2 H) psi_new = (I - i dt/2 H) psi
    std::vector<cplx> a(n), b(n), cdiag(n), rhs(n);
    for (std::size_t gidx = 1; gidx < t_grid.size(); ++gidx) {
        const double dt = t_grid[gidx] - t_grid[gidx - 1];
        const double tm = 0.5 * (t_grid[gidx] + t_grid[gidx - 1]);
        const cplx mu = cplx(0, dt / 2);
        const cplx off = -1.0 / h2;
        for (int i = 0; i < n; ++i) {
            const cplx Hd = 2.0 / h2 + v(grid.point(i), tm);
            b[i] = 1.0 + mu * Hd;
            a[i] = mu * off;
            cdiag[i] = mu * off;
            const cplx l = (i > 0) ? psi[i - 1] : cplx(0);
            const cplx r = (i < n - 1) ? psi[i + 1] : cplx(0);
            rhs[i] = psi[i] - mu * (Hd * psi[i] + off * l + off * r);
        }
        // forward sweep
        for (int i = 1; i < n; ++i) {
            const cplx m = a[i] / b[i - 1];
            b[i] -= m * cdiag[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        psi[n - 1] = rhs[n - 1] / b[n - 1];
        for (int i = n - 2; i >= 0; --i) psi[i] = (rhs[i] - cdiag[i] * psi[i + 1]) / b[i];
        if (!psi.allFinite()) throw Error("cn_evolve: blow-up at t=" + std::to_string(t_grid[gidx]));
        out.push_back(t_grid[gidx], psi);
    }
    return out;
}

double tdse_residual(const FieldSeries& psi, const std::function<cplx(double, double)>& v,
                     const Grid1D& grid, double trust_rel) {
    if (psi.size() < 3) throw Error("tdse_residual: need >= 3 samples");
    double worst = 0;
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
        const double dt = psi.times[i + 1] - psi.times[i - 1];
        Field pt = (psi.values[i + 1] - psi.values[i - 1]) / dt;
        Field pxx = grid_d2(psi.values[i], grid);
        Field res(grid.n);
        for (int j = 0; j < grid.n; ++j)
            res[j] = cplx(0, 1) * pt[j] + pxx[j] - v(grid.point(j), psi.times[i]) * psi.values[i][j];
        auto win = trust_window(psi.values[i], trust_rel);
        double rn = 0, pn = 0;
        for (int j : win) {
            if (j < 4 || j >= grid.n - 4) continue;
            rn += std::norm(res[j]);
            pn += std::norm(psi.values[i][j]);
        }
        worst = std::max(worst, std::sqrt(rn) / std::max(std::sqrt(pn), 1e-300));
    }
    return worst;
}

TdDarbouxResult td_darboux_hermitian(const std::function<cplx(double, double)>& v0,
                                     const FieldSeries& u_seed, const Grid1D& grid,
                                     double trust_rel) {
    if (u_seed.size() < 3) throw Error("td_darboux_hermitian: need >= 3 seed samples");
    TdDarbouxResult out;
    out.u = u_seed;

    // s = v0 + 2 (u_x/u)^2 - 2 u_xx/u per sample; Im(s) must be x-independent
    std::vector<double> im_s(u_seed.size());
    std::vector<Field> s_fields(u_seed.size());
    for (std::size_t i = 0; i < u_seed.size(); ++i) {
        const Field& u = u_seed.values[i];
        auto win = trust_window(u, trust_rel);
        for (int j : win)
            if (std::abs(u[j]) == 0)
                throw Error("td_darboux_hermitian: seed vanishes at x=" +
                            std::to_string(grid.point(j)) + ", singular transformation");
        Field ux = grid_d1(u, grid), uxx = grid_d2(u, grid);
        Field s(grid.n);
        for (int j = 0; j < grid.n; ++j) {
            const cplx r = ux[j] / u[j];
            s[j] = v0(grid.point(j), u_seed.times[i]) + 2.0 * r * r - 2.0 * uxx[j] / u[j];
        }
        s_fields[i] = s;
        // x-average of Im s over the trusted, interior window
        double acc = 0, lo = 1e300, hi = -1e300;
        int cnt = 0;
        for (int j : win) {
            if (j < 8 || j >= grid.n - 8) continue;
            acc += s[j].imag();
            lo = std::min(lo, s[j].imag());
            hi = std::max(hi, s[j].imag());
            ++cnt;
        }
        if (cnt == 0) throw Error("td_darboux_hermitian: empty trust window");
        im_s[i] = acc / cnt;
        out.im_s_x_dependence = std::max(out.im_s_x_dependence, hi - lo);
    }

    // l1(t) = exp(-int_0^t Im s dt') by cumulative trapezoid over the samples
    std::vector<double> integral(u_seed.size(), 0.0);
    for (std::size_t i = 1; i < u_seed.size(); ++i)
        integral[i] = integral[i - 1] +
                      0.5 * (im_s[i] + im_s[i - 1]) * (u_seed.times[i] - u_seed.times[i - 1]);

    for (std::size_t i = 0; i < u_seed.size(); ++i) {
        const double l1 = std::exp(-integral[i]);
        out.l1.push_back(u_seed.times[i], l1);
        const Field& u = u_seed.values[i];
        auto win = trust_window(u, trust_rel);
        Field v1(grid.n), phi(grid.n);
        // v1 = s + i l1'/l1 with l1'/l1 = -<Im s>_x; reality is forced up to
        // the x-dependence defect of Im s
        for (int j = 0; j < grid.n; ++j)
            v1[j] = cplx(s_fields[i][j].real(), s_fields[i][j].imag() - im_s[i]);
        for (int j : win)
            if (j >= 8 && j < grid.n - 8)
                out.max_im_v1 = std::max(out.max_im_v1, std::abs(v1[j].imag()));
        // phi1 = (1/(l1 u*)) int_{x_min}^x |u|^2 (cumulative trapezoid)
        double cum = 0;
        double prev = std::norm(u[0]);
        for (int j = 0; j < grid.n; ++j) {
            const double cur = std::norm(u[j]);
            if (j > 0) cum += 0.5 * (cur + prev) * grid.h();
            prev = cur;
            phi[j] = cum / (l1 * std::conj(u[j]));
        }
        out.v1.push_back(u_seed.times[i], v1);
        out.phi1.push_back(u_seed.times[i], phi);
    }
    return out;
}

Field GaugeOp::apply(const Field& f, const Grid1D& g, double t) const {
    Field out(f.size());
    for (int j = 0; j < g.n; ++j) out[j] = w(g.point(j), t) * f[j];
    return out;
}

Field GaugeOp::apply_inv(const Field& f, const Grid1D& g, double t) const {
    Field out(f.size());
    for (int j = 0; j < g.n; ++j) {
        const cplx wv = w(g.point(j), t);
        if (std::abs(wv) < 1e-300)
            throw Error("GaugeOp: non-invertible at x=" + std::to_string(g.point(j)));
        out[j] = f[j] / wv;
    }
    return out;
}

TdDarbouxNHResult td_darboux_nonhermitian(
    const std::function<cplx(double, double)>& v0, const TdDarbouxResult& herm,
    const GaugeOp& eta0, const GaugeOp& eta1, const Grid1D& grid,
    const std::function<cplx(double, double)>& psi_test,
    const std::function<cplx(double, double)>& psi_test_dot, double trust_rel) {
    TdDarbouxNHResult out;
    const auto& times = herm.u.times;

    auto v1_at = [&](std::size_t i, int j) { return herm.v1.values[i][j]; };

    auto apply_h = [&](const Field& f, std::size_t i, bool partner) {
        Field d2 = grid_d2(f, grid);
        Field r(grid.n);
        for (int j = 0; j < grid.n; ++j)
            r[j] = -d2[j] + (partner ? v1_at(i, j) : v0(grid.point(j), times[i])) * f[j];
        return r;
    };
    auto apply_H = [&](const Field& f, std::size_t i, bool partner) {
        // H = eta^{-1} h eta - i hbar eta^{-1} eta'
        const GaugeOp& gauge = partner ? eta1 : eta0;
        const double t = times[i];
        Field gf = gauge.apply(f, grid, t);
        Field hf = apply_h(gf, i, partner);
        Field r = gauge.apply_inv(hf, grid, t);
        for (int j = 0; j < grid.n; ++j)
            r[j] -= cplx(0, hbar()) * gauge.w_dot(grid.point(j), t) / gauge.w(grid.point(j), t) * f[j];
        return r;
    };
    auto apply_l = [&](const Field& f, std::size_t i) {
        const Field& u = herm.u.values[i];
        Field fx = grid_d1(f, grid);
        Field ux = grid_d1(u, grid);
        const double l1 = herm.l1.values[i];
        Field r(grid.n);
        for (int j = 0; j < grid.n; ++j) r[j] = l1 * (fx[j] - ux[j] / u[j] * f[j]);
        return r;
    };
    auto apply_L = [&](const Field& f, std::size_t i) {
        return eta1.apply_inv(apply_l(eta0.apply(f, grid, times[i]), i), grid, times[i]);
    };

    // intertwining residual at interior time samples
    double worst = 0;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        const double t = times[i];
        Field psi(grid.n), psid(grid.n);
        for (int j = 0; j < grid.n; ++j) {
            psi[j] = psi_test(grid.point(j), t);
            psid[j] = psi_test_dot(grid.point(j), t);
        }
        Field lhs_in = cplx(0, 1) * psid - apply_H(psi, i, false);
        Field lhs = apply_L(lhs_in, i);
        // d/dt (L psi) by a centered stencil over neighbour samples
        Field Lp(grid.n), Lm(grid.n);
        {
            Field pp(grid.n), pm(grid.n);
            for (int j = 0; j < grid.n; ++j) {
                pp[j] = psi_test(grid.point(j), times[i + 1]);
                pm[j] = psi_test(grid.point(j), times[i - 1]);
            }
            Lp = apply_L(pp, i + 1);
            Lm = apply_L(pm, i - 1);
        }
        Field dLpsi = (Lp - Lm) / (times[i + 1] - times[i - 1]);
        Field rhs = cplx(0, 1) * dLpsi - apply_H(apply_L(psi, i), i, true);
        Field diff = lhs - rhs;
        auto win = trust_window(herm.u.values[i], trust_rel);
        double dn = 0, pn = 0;
        for (int j : win) {
            if (j < 8 || j >= grid.n - 8) continue;
            dn += std::norm(diff[j]);
            pn += std::norm(psi[j]);
        }
        worst = std::max(worst, std::sqrt(dn) / std::max(std::sqrt(pn), 1e-300));
    }
    out.intertwining_residual = worst;

    // psi1 per (ntP): eta1^{-1} (1/(l1 (eta0 U)^*)) int^x |eta0 U|^2, U = eta0^{-1} u
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Field& u = herm.u.values[i];  // u = eta0 U by construction
        const double l1 = herm.l1.values[i];
        Field raw(grid.n);
        double cum = 0, prev = std::norm(u[0]);
        for (int j = 0; j < grid.n; ++j) {
            const double cur = std::norm(u[j]);
            if (j > 0) cum += 0.5 * (cur + prev) * grid.h();
            prev = cur;
            raw[j] = cum / (l1 * std::conj(u[j]));
        }
        out.psi1.push_back(times[i], eta1.apply_inv(raw, grid, times[i]));
    }
    // nodelessness of psi1 on the interior of the trust window
    for (std::size_t i = 0; i < times.size(); ++i) {
        auto win = trust_window(herm.u.values[i], trust_rel);
        for (std::size_t k = 1; k < win.size(); ++k) {
            const int j = win[k];
            if (j <= win[0] + 2) continue;
            if (std::abs(out.psi1.values[i][j]) == 0) out.psi1_nodeless = false;
        }
    }
    // TDSE residual of psi1 under H1 = eta1^{-1} h1 eta1 - i hbar eta1^{-1} eta1'
    double worst_tdse = 0;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        Field pt = (out.psi1.values[i + 1] - out.psi1.values[i - 1]) / (times[i + 1] - times[i - 1]);
        Field hp = apply_H(out.psi1.values[i], i, true);
        Field res = cplx(0, 1) * pt - hp;
        auto win = trust_window(herm.u.values[i], trust_rel);
        double rn = 0, pn = 0;
        for (int j : win) {
            if (j < 8 || j >= grid.n - 8) continue;
            rn += std::norm(res[j]);
            pn += std::norm(out.psi1.values[i][j]);
        }
        worst_tdse = std::max(worst_tdse, std::sqrt(rn) / std::max(std::sqrt(pn), 1e-300));
    }
    out.psi1_tdse_residual = worst_tdse;
    return out;
}

}  // namespace ptqm
