#include "ptqm/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace ptqm {

RVec DensityMatrix::spectrum(double imag_tol) const {
    auto eg = eig_general(op, false);
    RVec out(Eigen::Index(eg.eigenvalues.size()));
    for (std::size_t i = 0; i < eg.eigenvalues.size(); ++i) {
        if (std::abs(eg.eigenvalues[i].imag()) > imag_tol)
            throw Error("DensityMatrix: complex eigenvalue " + std::to_string(eg.eigenvalues[i].real()) +
                        " + " + std::to_string(eg.eigenvalues[i].imag()) + "i");
        out[Eigen::Index(i)] = eg.eigenvalues[i].real();
    }
    std::sort(out.begin(), out.end());
    return out;
}

DensityMatrix density_matrix(const std::vector<Vec>& states, const std::vector<double>& probs,
                             const Mat& metric) {
    if (states.empty() || states.size() != probs.size())
        throw Error("density_matrix: states/probs mismatch");
    double sum = 0;
    for (double p : probs) {
        if (p < -1e-12 || p > 1 + 1e-12) throw Error("density_matrix: probability outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw Error("density_matrix: probabilities must sum to 1");
    const Eigen::Index n = states.front().size();
    DensityMatrix dm;
    dm.metric = metric;
    dm.op = Mat::Zero(n, n);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != n) throw Error("density_matrix: state dimension mismatch");
        const double nrm2 = states[i].dot(metric * states[i]).real();
        if (nrm2 <= 0) throw Error("density_matrix: state has non-positive metric norm");
        const Vec psi = states[i] / std::sqrt(nrm2);
        dm.op += probs[i] * psi * psi.adjoint() * metric;
    }
    return dm;
}

Mat partial_trace(const Mat& rho, Eigen::Index d_A, Eigen::Index d_B, bool keep_A) {
    require_square(rho, "partial_trace");
    if (rho.rows() != d_A * d_B) throw Error("partial_trace: dim(rho) != d_A * d_B");
    if (keep_A) {
        Mat out = Mat::Zero(d_A, d_A);
        for (Eigen::Index i = 0; i < d_A; ++i)
            for (Eigen::Index j = 0; j < d_A; ++j)
                for (Eigen::Index k = 0; k < d_B; ++k) out(i, j) += rho(i * d_B + k, j * d_B + k);
        return out;
    }
    Mat out = Mat::Zero(d_B, d_B);
    for (Eigen::Index i = 0; i < d_B; ++i)
        for (Eigen::Index j = 0; j < d_B; ++j)
            for (Eigen::Index k = 0; k < d_A; ++k) out(i, j) += rho(k * d_B + i, k * d_B + j);
    return out;
}

double von_neumann_from_eigs(const RVec& lambdas) {
    double s = 0;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        double l = lambdas[i];
        if (l < -1e-10) throw Error("von_neumann: eigenvalue " + std::to_string(l) + " below tolerance");
        l = std::max(l, 0.0);
        if (l > 0) s -= l * std::log(l);
    }
    return s;
}

double von_neumann(const DensityMatrix& dm, double trace_tol) {
    if (dm.trace_defect() > trace_tol)
        throw Error("von_neumann: trace defect " + std::to_string(dm.trace_defect()));
    return von_neumann_from_eigs(dm.spectrum());
}

TimeSeries<Mat> heisenberg_evolve(const Mat& rho0, const HamiltonianFn& h_fn,
                                  const std::vector<double>& t_grid, const OdeOptions& opt) {
    require_square(rho0, "heisenberg_evolve");
    const double hb = hbar();
    auto rhs = [&](double t, const Mat& r) -> Mat {
        Mat h = h_fn(t);
        if (hermiticity_defect(h) > 1e-10 * rel_scale(h))
            throw Error("heisenberg_evolve: generator not Hermitian at t=" + std::to_string(t));
        return cplx(0, -1.0 / hb) * (h * r - r * h);
    };
    return ode_integrate_matrix(rhs, rho0, t_grid, opt);
}

double boson_bath_period(const BosonBathParams& p) {
    const double gap = p.g * p.g - p.kappa * p.kappa;
    if (gap <= 0) throw Error("boson_bath_period: defined in the PT regime |g| > |kappa| only");
    return M_PI / (2 * std::sqrt(double(p.N)) * std::sqrt(gap));
}

EntropyCurve boson_bath_entropy(const BosonBathParams& p, const std::vector<double>& t_grid) {
    if (p.N < 1) throw Error("boson_bath_entropy: N >= 1 required");
    if (p.g == 0 && p.kappa == 0) throw Error("boson_bath_entropy: g and kappa cannot both vanish");
    const double gap = p.g * p.g - p.kappa * p.kappa;
    EntropyCurve out;
    const double rN = std::sqrt(double(p.N));

    auto mu_of = [&](double t) -> double {
        if (gap > 1e-14) {
            const double zg = std::sqrt(gap);
            const double K = std::sqrt(p.c1 * p.c1 + gap) / zg;
            const double theta = 2 * rN * zg * t;
            // branch-unwrapped arctan(K tan(theta))
            const double base = std::atan(K * std::tan(theta));
            const double branch = std::round(theta / M_PI);
            return 0.5 * (base + M_PI * branch);
        }
        if (gap < -1e-14) {
            const double xi = std::sqrt(-gap);
            const double arg = p.c1 * p.c1 + gap;  // c1^2 - (kappa^2 - g^2)
            if (arg < 0)
                throw Error("boson_bath_entropy: c1^2 < kappa^2 - g^2, broken-regime formula domain");
            return 0.5 * std::atan(std::sqrt(arg) * std::tanh(2 * rN * xi * t) / xi);
        }
        return 0.5 * std::atan(2 * rN * std::abs(p.c1) * t);
    };

    out.regime = gap > 1e-14 ? BathRegime::PTSymmetric
                             : (gap < -1e-14 ? BathRegime::SpontaneouslyBroken
                                             : BathRegime::ExceptionalPoint);
    for (double t : t_grid) {
        const double mu = mu_of(t);
        const double lm = std::pow(std::sin(p.gamma) * std::sin(mu) - std::cos(p.gamma) * std::cos(mu), 2);
        const double lp = std::pow(std::sin(p.gamma) * std::sin(mu) + std::cos(p.gamma) * std::cos(mu), 2);
        const double sum = lm + lp;
        if (sum < 1e-12)
            throw Error("boson_bath_entropy: lambda_- + lambda_+ ~ 0 at t=" + std::to_string(t));
        out.max_norm_deviation = std::max(out.max_norm_deviation, std::abs(sum - 1.0));
        const double pm = lm / sum, pp = lp / sum;
        if (pm < -1e-9 || pp < -1e-9 || pm > 1 + 1e-9 || pp > 1 + 1e-9)
            throw Error("boson_bath_entropy: lambda outside [0,1] at t=" + std::to_string(t));
        RVec lam(2);
        lam << pm, pp;
        out.mu.push_back(t, mu);
        out.lambda_minus.push_back(pm);
        out.lambda_plus.push_back(pp);
        out.S.push_back(t, von_neumann_from_eigs(lam));
    }
    return out;
}

std::size_t autocorrelation_peak_lag(const std::vector<double>& x, std::size_t min_lag) {
    const std::size_t n = x.size();
    if (min_lag >= n / 2) throw Error("autocorrelation_peak_lag: series too short");
    double mean = 0;
    for (double v : x) mean += v;
    mean /= double(n);
    auto corr = [&](std::size_t lag) {
        double num = 0, d1 = 0, d2 = 0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            const double a = x[i] - mean, b = x[i + lag] - mean;
            num += a * b;
            d1 += a * a;
            d2 += b * b;
        }
        return num / std::max(std::sqrt(d1 * d2), 1e-300);
    };
    // first local maximum above threshold after min_lag
    std::size_t best = 0;
    double best_c = -2;
    for (std::size_t lag = min_lag; lag < n / 2; ++lag) {
        const double c = corr(lag);
        if (c > best_c) { best_c = c; best = lag; }
        if (best_c > 0.95 && c < best_c - 0.2) break;  // past the first strong peak
    }
    return best;
}

}  // namespace ptqm
