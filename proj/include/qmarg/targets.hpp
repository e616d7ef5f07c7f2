#pragma once

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmarg/box.hpp"
#include "qmarg/fanova.hpp"

namespace qmarg {

/// Evaluatable joint density with analytic marginals on its default box.
/// evaluate() may be unnormalized; trueMarginal(k) is always a normalized
/// density on [a_k, b_k) (truncation renormalized).
struct TargetDensity {
    std::string name;
    std::size_t dims = 0;
    Box defaultBox = Box::unit(1);
    bool separable = false;
    std::function<double(std::span<const double>)> evaluate;
    std::function<double(std::size_t, double)> marginalPdf;
    // sup |pi^(n)| over the axis interval, when known analytically.
    std::function<double(std::size_t, std::uint32_t)> smoothnessC;
    std::optional<FactorizedTarget> factorization;

    std::function<double(double)> trueMarginal(std::size_t k) const {
        if (k >= dims) throw std::invalid_argument("trueMarginal: axis out of range");
        auto f = marginalPdf;
        return [f, k](double x) { return f(k, x); };
    }
};

namespace detail {

inline double normalPhi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normalPdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

inline double gammaPdf(double x, double shape, double rate) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return shape > 1.0 ? 0.0 : (shape == 1.0 ? rate : 0.0);
    return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                    std::lgamma(shape));
}

inline double gammaMass(double shape, double rate, double lo, double hi) {
    const double plo = lo <= 0.0 ? 0.0 : boost::math::gamma_p(shape, rate * lo);
    return boost::math::gamma_p(shape, rate * hi) - plo;
}

}  // namespace detail

/// Product of Exponential(lambda_k) densities truncated to the box.
/// sup |pi^(n)| on [0,b) is lambda^(n+1), taken as the one-sided limit at 0.
inline TargetDensity productExponential(const std::vector<double>& lambdas, const Box& box) {
    const std::size_t s = lambdas.size();
    if (box.dims() != s) throw std::invalid_argument("productExponential: dims mismatch");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("productExponential: rates must be > 0");

    TargetDensity t;
    t.name = "exponential";
    t.dims = s;
    t.defaultBox = box;
    t.separable = true;
    t.evaluate = [lambdas](std::span<const double> x) {
        double v = 1.0;
        for (std::size_t k = 0; k < lambdas.size(); ++k)
            v *= lambdas[k] * std::exp(-lambdas[k] * x[k]);
        return v;
    };
    t.marginalPdf = [lambdas, box](std::size_t k, double x) {
        const double l = lambdas.at(k);
        const double mass = std::exp(-l * box.lower(k)) - std::exp(-l * box.upper(k));
        return l * std::exp(-l * x) / mass;
    };
    t.smoothnessC = [lambdas](std::size_t k, std::uint32_t n) {
        return std::pow(lambdas.at(k), n + 1.0);
    };
    return t;
}

/// Product of Beta(alpha_k, beta_k) densities. Shapes below one are
/// singular at the corresponding boundary, so evaluation is only defined on
/// the open interior; the default preset box keeps points away from it.
inline TargetDensity productBeta(const std::vector<double>& alphas,
                                 const std::vector<double>& betas, const Box& box) {
    const std::size_t s = alphas.size();
    if (betas.size() != s || box.dims() != s)
        throw std::invalid_argument("productBeta: dims mismatch");
    for (std::size_t k = 0; k < s; ++k) {
        if (!(alphas[k] > 0.0) || !(betas[k] > 0.0))
            throw std::invalid_argument("productBeta: shapes must be > 0");
        if (box.lower(k) < 0.0 || box.upper(k) > 1.0)
            throw std::invalid_argument("productBeta: box must lie within [0,1)");
    }

    auto pdf1 = [alphas, betas](std::size_t k, double x) {
        if (x <= 0.0 || x >= 1.0)
            throw std::domain_error("productBeta: evaluation at the boundary of (0,1)");
        return std::exp((alphas[k] - 1.0) * std::log(x) + (betas[k] - 1.0) * std::log1p(-x)) /
               boost::math::beta(alphas[k], betas[k]);
    };

    TargetDensity t;
    t.name = "beta";
    t.dims = s;
    t.defaultBox = box;
    t.separable = true;
    t.evaluate = [pdf1, s](std::span<const double> x) {
        double v = 1.0;
        for (std::size_t k = 0; k < s; ++k) v *= pdf1(k, x[k]);
        return v;
    };
    t.marginalPdf = [pdf1, alphas, betas, box](std::size_t k, double x) {
        const double mass = boost::math::ibeta(alphas.at(k), betas.at(k), box.upper(k)) -
                            boost::math::ibeta(alphas.at(k), betas.at(k), box.lower(k));
        return pdf1(k, x) / mass;
    };
    return t;
}

/// Product of Gamma(shape_k, rate_k) densities truncated to the box. When
/// every shape exceeds one, the target also carries its conjugate
/// factorization (Exponential likelihood with datum t_k = rate_k / 2 on a
/// Gamma(shape_k - 1, rate_k / 2) prior), which reproduces this posterior.
inline TargetDensity productGamma(const std::vector<double>& shapes,
                                  const std::vector<double>& rates, const Box& box) {
    const std::size_t s = shapes.size();
    if (rates.size() != s || box.dims() != s)
        throw std::invalid_argument("productGamma: dims mismatch");
    for (std::size_t k = 0; k < s; ++k)
        if (!(shapes[k] > 0.0) || !(rates[k] > 0.0))
            throw std::invalid_argument("productGamma: shapes/rates must be > 0");

    TargetDensity t;
    t.name = "gamma";
    t.dims = s;
    t.defaultBox = box;
    t.separable = true;
    t.evaluate = [shapes, rates, s](std::span<const double> x) {
        double v = 1.0;
        for (std::size_t k = 0; k < s; ++k) v *= detail::gammaPdf(x[k], shapes[k], rates[k]);
        return v;
    };
    t.marginalPdf = [shapes, rates, box](std::size_t k, double x) {
        const double mass =
            detail::gammaMass(shapes.at(k), rates.at(k), box.lower(k), box.upper(k));
        return detail::gammaPdf(x, shapes[k], rates[k]) / mass;
    };

    bool conjugate = true;
    for (double r : shapes)
        if (!(r > 1.0)) conjugate = false;
    if (conjugate) {
        std::vector<double> priorShape(s), priorRate(s), data(s);
        for (std::size_t k = 0; k < s; ++k) {
            priorShape[k] = shapes[k] - 1.0;
            priorRate[k] = rates[k] / 2.0;
            data[k] = rates[k] / 2.0;
        }
        FactorizedTarget ft;
        ft.dims = s;
        ft.data = data;
        ft.gammaPriorShape = priorShape;
        ft.gammaPriorRate = priorRate;
        ft.likelihood1d = [data](std::size_t k, double lam) {
            return lam * std::exp(-lam * data.at(k));
        };
        ft.prior1d = [priorShape, priorRate](std::size_t k, double lam) {
            return detail::gammaPdf(lam, priorShape.at(k), priorRate.at(k));
        };
        std::vector<double> lo(s, 0.0), hi(s), anchor(s);
        for (std::size_t k = 0; k < s; ++k) {
            const double qPrior =
                boost::math::gamma_p_inv(priorShape[k], 1.0 - 1e-12) / priorRate[k];
            const double qPost = boost::math::gamma_p_inv(shapes[k], 1.0 - 1e-12) / rates[k];
            hi[k] = std::max(qPrior, qPost);
            anchor[k] = priorShape[k] / (priorRate[k] + data[k]);  // posterior mode
        }
        ft.support = Box(lo, hi);
        ft.defaultAnchor = anchor;
        t.factorization = std::move(ft);
    }
    return t;
}

/// Conjugate construction from explicit prior parameters and data: the
/// target is the product of Gamma(r_k + 1, v_k + t_k) posteriors.
inline TargetDensity gammaPosterior(const std::vector<double>& priorShape,
                                    const std::vector<double>& priorRate,
                                    const std::vector<double>& data, const Box& box) {
    const std::size_t s = priorShape.size();
    if (priorRate.size() != s || data.size() != s)
        throw std::invalid_argument("gammaPosterior: dims mismatch");
    std::vector<double> postShape(s), postRate(s);
    for (std::size_t k = 0; k < s; ++k) {
        postShape[k] = priorShape[k] + 1.0;
        postRate[k] = priorRate[k] + data[k];
    }
    TargetDensity t = productGamma(postShape, postRate, box);

    FactorizedTarget ft;
    ft.dims = s;
    ft.data = data;
    ft.gammaPriorShape = priorShape;
    ft.gammaPriorRate = priorRate;
    ft.likelihood1d = [data](std::size_t k, double lam) {
        return lam * std::exp(-lam * data.at(k));
    };
    ft.prior1d = [priorShape, priorRate](std::size_t k, double lam) {
        return detail::gammaPdf(lam, priorShape.at(k), priorRate.at(k));
    };
    std::vector<double> lo(s, 0.0), hi(s), anchor(s);
    for (std::size_t k = 0; k < s; ++k) {
        const double qPrior =
            boost::math::gamma_p_inv(priorShape[k], 1.0 - 1e-12) / priorRate[k];
        const double qPost = boost::math::gamma_p_inv(postShape[k], 1.0 - 1e-12) / postRate[k];
        hi[k] = std::max(qPrior, qPost);
        anchor[k] = priorShape[k] / (priorRate[k] + data[k]);
    }
    ft.support = Box(lo, hi);
    ft.defaultAnchor = anchor;
    t.factorization = std::move(ft);
    return t;
}

/// Mixture of axis-aligned Gaussian products, truncated to the box.
/// Marginals are 1-D Gaussian mixtures reweighted by the per-component
/// box masses of the remaining axes.
inline TargetDensity gaussianMixture(const std::vector<double>& weights,
                                     const std::vector<std::vector<double>>& means,
                                     const std::vector<std::vector<double>>& sigmas,
                                     const Box& box) {
    const std::size_t nc = weights.size();
    if (nc == 0 || means.size() != nc || sigmas.size() != nc)
        throw std::invalid_argument("gaussianMixture: component count mismatch");
    const std::size_t s = box.dims();
    double wsum = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        if (means[c].size() != s || sigmas[c].size() != s)
            throw std::invalid_argument("gaussianMixture: component dims mismatch");
        if (!(weights[c] > 0.0))
            throw std::invalid_argument("gaussianMixture: weights must be > 0");
        for (double sig : sigmas[c])
            if (!(sig > 0.0)) throw std::invalid_argument("gaussianMixture: sigma must be > 0");
        wsum += weights[c];
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("gaussianMixture: weights must sum to 1");

    // Per-component, per-axis box mass.
    std::vector<std::vector<double>> axisMass(nc, std::vector<double>(s));
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t k = 0; k < s; ++k)
            axisMass[c][k] =
                detail::normalPhi((box.upper(k) - means[c][k]) / sigmas[c][k]) -
                detail::normalPhi((box.lower(k) - means[c][k]) / sigmas[c][k]);

    TargetDensity t;
    t.name = "gaussian_mixture";
    t.dims = s;
    t.defaultBox = box;
    t.separable = nc == 1;
    t.evaluate = [weights, means, sigmas, nc, s](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            double comp = weights[c];
            for (std::size_t k = 0; k < s; ++k)
                comp *= detail::normalPdf(x[k], means[c][k], sigmas[c][k]);
            v += comp;
        }
        return v;
    };
    t.marginalPdf = [weights, means, sigmas, axisMass, nc, s](std::size_t k, double x) {
        double num = 0.0, den = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            double rest = weights[c];
            for (std::size_t i = 0; i < s; ++i)
                if (i != k) rest *= axisMass[c][i];
            num += rest * detail::normalPdf(x, means[c][k], sigmas[c][k]);
            den += rest * axisMass[c][k];
        }
        return num / den;
    };
    return t;
}

// ---------------------------------------------------------------------------
// Named presets. These parameter tables are the versioned defaults that all
// benchmark runs and tests refer to; data/presets.json mirrors them.
// ---------------------------------------------------------------------------

namespace presets {

inline TargetDensity exponential(std::size_t dims, std::vector<double> lambdas = {}) {
    if (lambdas.empty()) {
        const std::vector<double> base = {1.0, 2.0, 0.5, 1.5, 1.0, 2.0, 0.5, 1.5};
        for (std::size_t k = 0; k < dims; ++k) lambdas.push_back(base[k % base.size()]);
    }
    std::vector<double> lo(dims, 0.0), hi(dims);
    for (std::size_t k = 0; k < dims; ++k) hi[k] = -std::log(1e-6) / lambdas[k];
    return productExponential(lambdas, Box(lo, hi));
}

inline TargetDensity beta4() {
    // One symmetric axis, two heavily skewed ones, one mildly skewed.
    const std::vector<double> alphas = {0.8, 2.0, 5.0, 4.0};
    const std::vector<double> betas = {5.0, 2.0, 0.8, 2.0};
    return productBeta(alphas, betas, Box::cube(4, 1e-6, 1.0 - 1e-6));
}

/// Axes of beta4 whose marginals are heavily skewed.
inline std::vector<std::size_t> beta4SkewedAxes() { return {0, 2}; }

inline TargetDensity multimodal4() {
    // Two well-separated modes with unequal weights; mode positions differ
    // per axis so coarse grids alias the inner averages.
    const std::vector<double> w = {0.55, 0.45};
    const std::vector<std::vector<double>> mu = {{-2.10, -1.85, -2.25, -1.95},
                                                 {1.90, 2.15, 1.80, 2.05}};
    const std::vector<std::vector<double>> sig = {{0.50, 0.55, 0.45, 0.60},
                                                  {0.55, 0.45, 0.60, 0.50}};
    return gaussianMixture(w, mu, sig, Box::cube(4, -4.5, 4.5));
}

struct GammaSpec {
    std::vector<double> priorShape;
    std::vector<double> priorRate;
    std::vector<double> data;
};

inline GammaSpec gamma10Spec() {
    return {{2.0, 1.5, 1.2, 3.0, 2.5, 4.0, 3.5, 2.8, 1.8, 3.2},
            {1.0, 0.6, 0.5, 1.5, 0.9, 2.0, 2.2, 1.8, 0.8, 1.6},
            {0.8, 0.3, 0.2, 1.1, 0.6, 1.6, 1.4, 0.9, 0.45, 1.3}};
}

inline GammaSpec gamma12Spec() {
    return {{2.0, 1.5, 1.2, 3.0, 2.5, 4.0, 3.5, 2.8, 1.8, 3.2, 2.2, 2.6},
            {1.0, 0.6, 0.5, 1.5, 0.9, 2.0, 2.2, 1.8, 0.8, 1.6, 1.1, 0.7},
            {0.8, 0.3, 0.2, 1.1, 0.6, 1.6, 1.4, 0.9, 0.45, 1.3, 0.7, 0.35}};
}

inline Box gammaBox(const GammaSpec& spec, double tailMass = 1e-7) {
    const std::size_t s = spec.priorShape.size();
    std::vector<double> lo(s, 0.0), hi(s);
    for (std::size_t k = 0; k < s; ++k) {
        const double shape = spec.priorShape[k] + 1.0;
        const double rate = spec.priorRate[k] + spec.data[k];
        hi[k] = boost::math::gamma_p_inv(shape, 1.0 - tailMass) / rate;
    }
    return Box(lo, hi);
}

inline TargetDensity gamma10() {
    const GammaSpec spec = gamma10Spec();
    return gammaPosterior(spec.priorShape, spec.priorRate, spec.data, gammaBox(spec));
}

inline TargetDensity gamma12() {
    const GammaSpec spec = gamma12Spec();
    return gammaPosterior(spec.priorShape, spec.priorRate, spec.data, gammaBox(spec));
}

}  // namespace presets

/// Resolves the preset names accepted by the CLI.
inline TargetDensity presetTarget(const std::string& name) {
    if (name == "exp2") {
        TargetDensity t = presets::exponential(2);
        t.name = "exp2";
        return t;
    }
    if (name == "exp4") {
        TargetDensity t = presets::exponential(4);
        t.name = "exp4";
        return t;
    }
    if (name == "beta4") {
        TargetDensity t = presets::beta4();
        t.name = "beta4";
        return t;
    }
    if (name == "multimodal4") {
        TargetDensity t = presets::multimodal4();
        t.name = "multimodal4";
        return t;
    }
    if (name == "gamma10") {
        TargetDensity t = presets::gamma10();
        t.name = "gamma10";
        return t;
    }
    if (name == "gamma12") {
        TargetDensity t = presets::gamma12();
        t.name = "gamma12";
        return t;
    }
    throw std::invalid_argument("unknown target preset: " + name);
}

}  // namespace qmarg
