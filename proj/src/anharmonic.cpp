#include "ptqm/anharmonic.hpp"

#include <cmath>

namespace ptqm {

double AnharmonicChain::g(double t) const {
    const double s = sigma.f(t);
    if (s <= 0) throw Error("AnharmonicChain: sigma must be positive, got " + std::to_string(s));
    return 0.25 / (s * s * s);
}

double AnharmonicChain::g_dot(double t) const {
    const double s = sigma.f(t), sd = sigma.d1(t);
    return -0.75 * sd / (s * s * s * s);
}

double AnharmonicChain::g_ddot(double t) const {
    const double s = sigma.f(t), sd = sigma.d1(t), sdd = sigma.d2(t);
    return 3.0 * sd * sd / std::pow(s, 5) - 0.75 * sdd / std::pow(s, 4);
}

double AnharmonicChain::g_dddot(double t) const {
    const double s = sigma.f(t), sd = sigma.d1(t), sdd = sigma.d2(t), sddd = sigma.d3(t);
    return -15.0 * sd * sd * sd / std::pow(s, 6) + 9.0 * sd * sdd / std::pow(s, 5) -
           0.75 * sddd / std::pow(s, 4);
}

double AnharmonicChain::m(double t) const {
    const double s = sigma.f(t), sd = sigma.d1(t), sdd = sigma.d2(t);
    return (4 * c2 + sd * sd - 2 * s * sdd) / (4 * s * s);
}

double AnharmonicChain::m_dot(double t) const {
    const double s = sigma.f(t), sd = sigma.d1(t), sddd = sigma.d3(t);
    return -sddd / (2 * s) - 2 * sd * m(t) / s;
}

AnharmonicChain sigma_to_gm(const C3Function& sigma, double c2) {
    AnharmonicChain chain{sigma, c2};
    chain.g(0.0);  // domain check at a representative point
    return chain;
}

RealSeries thirdo_residual(const AnharmonicChain& chain, const std::vector<double>& t_grid) {
    RealSeries out;
    for (double t : t_grid) {
        const double g = chain.g(t), gd = chain.g_dot(t), gdd = chain.g_ddot(t),
                     gddd = chain.g_dddot(t);
        const double m = chain.m(t), md = chain.m_dot(t);
        const double r = 9 * g * g * (gddd - 6 * g * md) + 36 * g * gd * (g * m - gdd) +
                         28 * gd * gd * gd;
        out.push_back(t, std::abs(r));
    }
    return out;
}

C2Fit fit_c2(const C3Function& sigma, const std::function<double(double)>& m_target,
             const std::vector<double>& t_samples) {
    // m(t) = c2 / sigma^2 + (sigma'^2 - 2 sigma sigma'') / (4 sigma^2)
    double sw = 0, swr = 0;
    for (double t : t_samples) {
        const double s = sigma.f(t), sd = sigma.d1(t), sdd = sigma.d2(t);
        const double w = 1.0 / (s * s);
        const double base = (sd * sd - 2 * s * sdd) / (4 * s * s);
        sw += w * w;
        swr += w * (m_target(t) - base);
    }
    C2Fit fit;
    fit.c2 = swr / sw;
    AnharmonicChain chain{sigma, fit.c2};
    for (double t : t_samples) fit.residual = std::max(fit.residual, std::abs(chain.m(t) - m_target(t)));
    return fit;
}

DysonCoefficients dyson_coefficients(const AnharmonicChain& chain, double c1, double t) {
    const double g = chain.g(t), gd = chain.g_dot(t), gdd = chain.g_ddot(t), m = chain.m(t);
    if (std::abs(gd) < 1e-12 * std::max(1.0, std::abs(g)))
        throw Error("dyson_coefficients: g'(t) = 0 at t=" + std::to_string(t) +
                    " (turning point of g), gamma and delta are singular there");
    DysonCoefficients c;
    c.alpha = gd / (6 * g);
    c.beta = 1.0 / (6 * g);
    c.gamma = (12 * g * g * g + 6 * m * g * g + gd * gd - g * gdd) / (4 * gd * g * g);
    c.delta = c1 * g / gd - g * std::log(g) / (2 * gd);
    return c;
}

double anharmonic_potential(const AnharmonicChain& chain, double z, double t) {
    return chain.m(t) / 4 * z * z - chain.g(t) / 16 * z * z * z * z;
}

double doublewell_potential(const AnharmonicChain& chain, double y, double t) {
    const double g = chain.g(t), gd = chain.g_dot(t), m = chain.m(t);
    if (gd == 0) throw Error("doublewell_potential: g'(t) = 0, potential singular at t=" + std::to_string(t));
    const double quartic_bracket = y * y + gd * gd / (36 * g * g * g) + 72 * g * g * m / (gd * gd) -
                                   m / g + 2;
    const double linear = (36 * g * g * m + gd * gd) * std::sqrt(g) * std::log(g) / (12 * gd * gd);
    const double offset = std::pow(gd, 4) / (5184 * std::pow(g, 5)) -
                          gd * gd * m / (144 * g * g * g) - gd * gd / (72 * g * g) - m / 2;
    return g / 4 * y * y * quartic_bracket + linear * y + offset;
}

int count_local_minima(const std::vector<double>& v) {
    int count = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] < v[i - 1] && v[i] <= v[i + 1]) ++count;
    return count;
}

}  // namespace ptqm
