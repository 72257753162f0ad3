#pragma once

#include "ptqm/numcore.hpp"

#include <array>
#include <functional>
#include <vector>

namespace ptqm {

/// Scalar function of time with analytic derivatives through third order.
struct C3Function {
    std::function<double(double)> f, d1, d2, d3;

    static C3Function constant(double v) {
        return {[v](double) { return v; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                [](double) { return 0.0; }};
    }
    static C3Function cosh_t() {
        return {[](double t) { return std::cosh(t); }, [](double t) { return std::sinh(t); },
                [](double t) { return std::cosh(t); }, [](double t) { return std::sinh(t); }};
    }
    static C3Function exp_t(double rate = 1.0) {
        return {[rate](double t) { return std::exp(rate * t); },
                [rate](double t) { return rate * std::exp(rate * t); },
                [rate](double t) { return rate * rate * std::exp(rate * t); },
                [rate](double t) { return rate * rate * rate * std::exp(rate * t); }};
    }
};

/// g = 1/(4 sigma^3) and m = (4 c2 + sigma'^2 - 2 sigma sigma'')/(4 sigma^2),
/// both with analytic derivative chains.
struct AnharmonicChain {
    C3Function sigma;
    double c2 = 0;

    double g(double t) const;
    double g_dot(double t) const;
    double g_ddot(double t) const;
    double g_dddot(double t) const;
    double m(double t) const;
    double m_dot(double t) const;
};

AnharmonicChain sigma_to_gm(const C3Function& sigma, double c2);

/// |9 g^2 (g''' - 6 g m') + 36 g g' (g m - g'') + 28 g'^3| pointwise.
RealSeries thirdo_residual(const AnharmonicChain& chain, const std::vector<double>& t_grid);

/// Least-squares c2 reconciling m(t) from the chain with a target m(t);
/// m is affine in c2, so this is a one-dimensional exact fit.
struct C2Fit {
    double c2 = 0;
    double residual = 0;
};
C2Fit fit_c2(const C3Function& sigma, const std::function<double(double)>& m_target,
             const std::vector<double>& t_samples);

/// alpha = g'/6g, beta = 1/6g, gamma = (12g^3 + 6mg^2 + g'^2 - g g'')/(4 g' g^2),
/// delta = c1 g/g' - g ln g / (2 g'). Singular where g' = 0.
struct DysonCoefficients {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
};
DysonCoefficients dyson_coefficients(const AnharmonicChain& chain, double c1, double t);

/// V(z,t) = (m/4) z^2 - (g/16) z^4
double anharmonic_potential(const AnharmonicChain& chain, double z, double t);
/// The double-well partner potential (quartic + quadratic + linear + offset).
double doublewell_potential(const AnharmonicChain& chain, double y, double t);

/// Interior local minima of sampled values (sign changes of the discrete slope).
int count_local_minima(const std::vector<double>& values);

}  // namespace ptqm
