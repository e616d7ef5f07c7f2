#pragma once

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmarg/box.hpp"

namespace qmarg {

/// Posterior written as likelihood times prior, both factorizing per
/// dimension: f(t|theta) = prod f(t_k|theta_k), g(theta) = prod g_k(theta_k).
/// Priors carry unit mass over their (possibly truncated) support.
struct FactorizedTarget {
    std::size_t dims = 0;
    std::vector<double> data;  // observed t
    std::function<double(std::size_t, double)> likelihood1d;  // f(t_k | theta_k)
    std::function<double(std::size_t, double)> prior1d;       // g_k(theta_k)
    Box support = Box::unit(1);
    std::vector<double> defaultAnchor;

    // Set when the target is the Exponential-likelihood / Gamma-prior case,
    // unlocking the closed-form variance components.
    std::vector<double> gammaPriorShape;  // r
    std::vector<double> gammaPriorRate;   // v

    bool hasGammaExpForm() const {
        return gammaPriorShape.size() == dims && gammaPriorRate.size() == dims;
    }
};

struct AnchorPoint {
    std::vector<double> c;
};

inline void checkAnchor(const FactorizedTarget& ft, const AnchorPoint& anchor) {
    if (anchor.c.size() != ft.dims)
        throw std::invalid_argument("anchor: dims mismatch");
    if (!ft.support.contains(anchor.c))
        throw std::invalid_argument("anchor: point lies outside the support");
}

/// First-order anchored component for dimension k over the prior-weighted
/// space: f_k(x) = f(t_k|x) * prod_{i != k} f(t_i|c_i) g_i(c_i) - f_empty,
/// with f_empty = f(t|c) * prod_i g_i(c_i).
inline std::function<double(double)> anchoredComponent(const FactorizedTarget& ft,
                                                       const AnchorPoint& anchor,
                                                       std::size_t k) {
    checkAnchor(ft, anchor);
    if (k >= ft.dims) throw std::invalid_argument("anchoredComponent: dim out of range");
    double prodOther = 1.0;
    for (std::size_t i = 0; i < ft.dims; ++i)
        if (i != k) prodOther *= ft.likelihood1d(i, anchor.c[i]) * ft.prior1d(i, anchor.c[i]);
    const double fEmpty =
        prodOther * ft.likelihood1d(k, anchor.c[k]) * ft.prior1d(k, anchor.c[k]);
    auto lik = ft.likelihood1d;
    return [prodOther, fEmpty, lik, k](double x) { return prodOther * lik(k, x) - fEmpty; };
}

/// The constant component f_empty; its variance is exactly f_empty^2
/// because the priors integrate to one.
inline double anchoredEmptyComponent(const FactorizedTarget& ft, const AnchorPoint& anchor) {
    checkAnchor(ft, anchor);
    double p = 1.0;
    for (std::size_t i = 0; i < ft.dims; ++i)
        p *= ft.likelihood1d(i, anchor.c[i]) * ft.prior1d(i, anchor.c[i]);
    return p;
}

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double kGl8Nodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr double kGl8Weights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Composite Gauss-Legendre with panel edges graded geometrically toward the
// lower endpoint, so integrable singularities of the prior (Gamma shapes
// below one) cost no accuracy. The skipped head below the smallest edge has
// relative width 1e-18 of the interval.
inline double gauss8Graded(const std::function<double(double)>& f, double a, double b,
                           std::size_t panels) {
    if (panels < 1) throw std::invalid_argument("gauss8Graded: need >= 1 panel");
    const double q = std::exp(std::log(1e-18) / static_cast<double>(panels));
    double acc = 0.0;
    double hiOff = b - a;
    for (std::size_t j = 0; j < panels; ++j) {
        const double loOff = hiOff * q;
        const double lo = a + loOff, hi = a + hiOff;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double panelAcc = 0.0;
        for (int g = 0; g < 8; ++g) panelAcc += kGl8Weights[g] * f(mid + half * kGl8Nodes[g]);
        acc += panelAcc * half;
        hiOff = loOff;
    }
    return acc;
}

}  // namespace detail

/// Variance of the k-th anchored component by 1-D quadrature of
/// f_k(x)^2 g_k(x) over the support interval; the remaining dimensions
/// integrate out exactly because the priors have unit mass. The panel count
/// is doubled once as a convergence check.
inline double varianceComponentNumeric(const FactorizedTarget& ft, const AnchorPoint& anchor,
                                       std::size_t k, std::size_t panels = 64) {
    checkAnchor(ft, anchor);
    if (k >= ft.dims) throw std::invalid_argument("varianceComponentNumeric: dim out of range");
    const auto fk = anchoredComponent(ft, anchor, k);
    const auto prior = ft.prior1d;
    const auto integrand = [&](double x) {
        const double v = fk(x);
        return v * v * prior(k, x);
    };
    const double a = ft.support.lower(k), b = ft.support.upper(k);
    const double coarse = detail::gauss8Graded(integrand, a, b, panels);
    const double fine = detail::gauss8Graded(integrand, a, b, 2 * panels);
    const double scale = std::max(std::abs(fine), std::abs(coarse));
    if (scale > 0.0 && std::abs(fine - coarse) > 1e-6 * scale)
        throw std::runtime_error(
            "varianceComponentNumeric: quadrature did not converge on dim " +
            std::to_string(k) + " (change " + std::to_string(std::abs(fine - coarse) / scale) +
            " after doubling panels)");
    return fine;
}

/// Closed-form variance component for the Exponential-likelihood,
/// Gamma(r_k, v_k)-prior case with fully normalized prior densities:
///   sigma_k^2 = prod_{i != k} a_i^2 *
///     [ K_k Gamma(r_k+2) / (2 t_k + v_k)^(r_k+2) + a_k^2
///       - 2 a_k K_k Gamma(r_k+1) / (t_k + v_k)^(r_k+1) ],
/// where a_i = f(t_i|c_i) g_i(c_i) and K_k = v_k^r_k / Gamma(r_k) is the
/// prior normalization constant.
inline double varianceComponentGammaExp(const std::vector<double>& shapes,
                                        const std::vector<double>& rates,
                                        const std::vector<double>& data,
                                        const std::vector<double>& anchor, std::size_t k) {
    const std::size_t s = shapes.size();
    if (rates.size() != s || data.size() != s || anchor.size() != s)
        throw std::invalid_argument("varianceComponentGammaExp: parameter dims mismatch");
    if (k >= s) throw std::invalid_argument("varianceComponentGammaExp: dim out of range");
    for (std::size_t i = 0; i < s; ++i) {
        if (!(shapes[i] > 0.0) || !(rates[i] > 0.0))
            throw std::invalid_argument("varianceComponentGammaExp: shapes/rates must be > 0");
        if (data[i] < 0.0)
            throw std::invalid_argument("varianceComponentGammaExp: data must be >= 0");
    }

    const auto gammaPdf = [&](std::size_t i, double x) {
        return std::pow(rates[i], shapes[i]) * std::pow(x, shapes[i] - 1.0) *
               std::exp(-rates[i] * x) / boost::math::tgamma(shapes[i]);
    };
    const auto expLik = [&](std::size_t i, double lam) {
        return lam * std::exp(-lam * data[i]);
    };

    double prodOtherSq = 1.0;
    for (std::size_t i = 0; i < s; ++i)
        if (i != k) {
            const double ai = expLik(i, anchor[i]) * gammaPdf(i, anchor[i]);
            prodOtherSq *= ai * ai;
        }
    const double ak = expLik(k, anchor[k]) * gammaPdf(k, anchor[k]);
    const double r = shapes[k], v = rates[k], t = data[k];
    const double K = std::pow(v, r) / boost::math::tgamma(r);
    const double term1 = K * boost::math::tgamma(r + 2.0) / std::pow(2.0 * t + v, r + 2.0);
    const double term3 = 2.0 * ak * K * boost::math::tgamma(r + 1.0) / std::pow(t + v, r + 1.0);
    return prodOtherSq * (term1 + ak * ak - term3);
}

/// First-order variance components and the relative importances derived
/// from them. Importances normalize over the first-order total only; the
/// neglected interactions are the price of the anchored approximation.
struct VarianceReport {
    std::vector<double> anchor;
    double sigma0sq = 0.0;
    std::vector<double> sigmaKsq;
    std::vector<double> importance;   // S_k in [0,1], summing to 1
    std::vector<double> percentages;  // 100 * S_k
};

inline VarianceReport importances(std::vector<double> sigmaKsq, double sigma0sq,
                                  std::vector<double> anchor) {
    double total = 0.0;
    for (double v : sigmaKsq) {
        if (!(v >= 0.0))
            throw std::invalid_argument("importances: variance components must be >= 0");
        total += v;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("importances: all variance components are zero");
    VarianceReport vr;
    vr.anchor = std::move(anchor);
    vr.sigma0sq = sigma0sq;
    vr.sigmaKsq = std::move(sigmaKsq);
    vr.importance.resize(vr.sigmaKsq.size());
    vr.percentages.resize(vr.sigmaKsq.size());
    for (std::size_t k = 0; k < vr.sigmaKsq.size(); ++k) {
        vr.importance[k] = vr.sigmaKsq[k] / total;
        vr.percentages[k] = 100.0 * vr.importance[k];
    }
    return vr;
}

/// Full report for a factorized target: closed form when the Gamma/Exp
/// structure is present, numeric quadrature otherwise.
inline VarianceReport varianceReport(const FactorizedTarget& ft, const AnchorPoint& anchor,
                                     std::size_t panels = 64) {
    checkAnchor(ft, anchor);
    std::vector<double> comps(ft.dims);
    for (std::size_t k = 0; k < ft.dims; ++k)
        comps[k] = ft.hasGammaExpForm()
                       ? varianceComponentGammaExp(ft.gammaPriorShape, ft.gammaPriorRate,
                                                   ft.data, anchor.c, k)
                       : varianceComponentNumeric(ft, anchor, k, panels);
    const double f0 = anchoredEmptyComponent(ft, anchor);
    return importances(std::move(comps), f0 * f0, anchor.c);
}

}  // namespace qmarg
