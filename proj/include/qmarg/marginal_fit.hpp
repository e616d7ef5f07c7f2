#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmarg/metrics.hpp"
#include "qmarg/polynomial.hpp"
#include "qmarg/quadrature.hpp"

namespace qmarg {

/// Degrees beyond this are rejected; the shifted-Legendre solve is
/// well-conditioned in this range, raw Vandermonde would not be.
inline constexpr std::uint32_t kMaxFitDegree = 30;

/// Scatter of (k-th coordinate, density value) pairs: the regression data
/// for one marginal. Order matches the evaluated point set.
struct Projection {
    std::size_t axis = 0;
    std::vector<double> abscissae;
    std::vector<double> values;
    double lo = 0.0;  // [a_k, b_k)
    double hi = 1.0;
    double reducedVolume = 1.0;
};

inline Projection project(const EvaluatedSet& es, std::size_t k) {
    if (k >= es.points.dims()) throw std::invalid_argument("project: axis out of range");
    Projection p;
    p.axis = k;
    p.lo = es.points.box().lower(k);
    p.hi = es.points.box().upper(k);
    p.reducedVolume = es.points.box().reducedVolume(k);
    p.abscissae.resize(es.size());
    for (std::size_t i = 0; i < es.size(); ++i) p.abscissae[i] = es.points.coord(i, k);
    p.values = es.values;
    return p;
}

/// Fitted polynomial for one marginal, stored as a Legendre series on the
/// interval mapped to [-1, 1]. predict() is unscaled; multiply by `scale`
/// (the reduced box volume) to estimate the unnormalized marginal.
struct MarginalFit {
    std::size_t axis = 0;
    std::uint32_t degree = 0;
    std::vector<double> coefficients;  // Legendre basis on [-1, 1]
    IntervalMap basisMap;
    std::vector<double> nodes;  // grid abscissae or slab centers, ascending
    double scale = 1.0;

    // Solve diagnostics.
    double conditionEstimate = 1.0;
    bool conditionWarning = false;
    // Partitioned fits only: per-slab counts, and scale*predict(center) -
    // partition mean when the exact interpolation identity does not apply.
    std::vector<std::size_t> slabCounts;
    std::vector<double> slabResiduals;
    bool snappedAbscissae = false;

    double predict(double x) const {
        return legendreEval(coefficients, basisMap.toUnit(x));
    }
};

namespace detail {

struct LsSolution {
    std::vector<double> coeffs;
    double conditionEstimate = 1.0;
};

// Least squares in the Legendre basis by blockwise Householder QR of the
// augmented design matrix [A | y]; memory stays O(block) for any N.
inline LsSolution solveLegendreLs(const std::vector<double>& abscissae,
                                  const std::vector<double>& values,
                                  const std::vector<double>* rowWeightSqrt,
                                  const IntervalMap& map, std::uint32_t degree) {
    const std::size_t n = degree + 1;
    const std::size_t N = abscissae.size();
    const std::size_t cols = n + 1;
    constexpr std::size_t kBlock = 4096;

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(cols, cols);
    Eigen::MatrixXd stacked(cols + std::min(N, kBlock), cols);
    std::vector<double> row(n);
    for (std::size_t lo = 0; lo < N; lo += kBlock) {
        const std::size_t hi = std::min(N, lo + kBlock);
        const std::size_t rows = hi - lo;
        stacked.resize(cols + rows, cols);
        stacked.topRows(cols) = tri;
        for (std::size_t i = lo; i < hi; ++i) {
            legendreRow(map.toUnit(abscissae[i]), row);
            const double w = rowWeightSqrt ? (*rowWeightSqrt)[i] : 1.0;
            for (std::size_t j = 0; j < n; ++j) stacked(cols + i - lo, j) = w * row[j];
            stacked(cols + i - lo, n) = w * values[i];
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
        tri = qr.matrixQR()
                  .topRows(cols)
                  .triangularView<Eigen::Upper>();
    }

    const Eigen::MatrixXd r = tri.topLeftCorner(n, n);
    const Eigen::VectorXd qty = tri.topRightCorner(n, 1);
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(r(j, j));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    if (dmin == 0.0)
        throw std::runtime_error("least squares: rank-deficient design matrix");
    const Eigen::VectorXd c = r.triangularView<Eigen::Upper>().solve(qty);

    LsSolution sol;
    sol.coeffs.assign(c.data(), c.data() + n);
    sol.conditionEstimate = dmax / dmin;
    return sol;
}

// Maps every projection abscissa to a node index (1 ulp slack) and checks
// that the grid structure is what the theorems require.
inline std::vector<std::size_t> matchToNodes(const Projection& p,
                                             const std::vector<double>& nodes) {
    std::vector<std::size_t> idx(p.abscissae.size());
    std::vector<bool> seen(nodes.size(), false);
    for (std::size_t i = 0; i < p.abscissae.size(); ++i) {
        bool found = false;
        for (std::size_t l = 0; l < nodes.size(); ++l)
            if (withinOneUlp(p.abscissae[i], nodes[l])) {
                idx[i] = l;
                seen[l] = true;
                found = true;
                break;
            }
        if (!found)
            throw StructureError(
                "fit: projection abscissa " + std::to_string(p.abscissae[i]) +
                " matches none of the nodes; the point set is not grid-structured");
    }
    for (std::size_t l = 0; l < nodes.size(); ++l)
        if (!seen[l])
            throw StructureError("fit: node " + std::to_string(nodes[l]) +
                                 " has no replicates in the projection");
    return idx;
}

inline std::vector<double> sortedDistinctNodes(std::vector<double> nodes) {
    std::sort(nodes.begin(), nodes.end());
    for (std::size_t l = 1; l < nodes.size(); ++l)
        if (withinOneUlp(nodes[l], nodes[l - 1]))
            throw std::invalid_argument("fit: repeated-node degeneracy, nodes must be distinct");
    return nodes;
}

inline MarginalFit finishFit(const Projection& p, std::vector<double> nodes,
                             const LsSolution& sol, std::uint32_t degree) {
    MarginalFit fit;
    fit.axis = p.axis;
    fit.degree = degree;
    fit.coefficients = sol.coeffs;
    fit.basisMap = IntervalMap{p.lo, p.hi};
    fit.nodes = std::move(nodes);
    fit.scale = p.reducedVolume;
    fit.conditionEstimate = sol.conditionEstimate;
    fit.conditionWarning = sol.conditionEstimate > 1e12;
    return fit;
}

inline void checkDegree(std::size_t nodeCount, std::optional<std::uint32_t> degreeOverride) {
    if (nodeCount == 0) throw std::invalid_argument("fit: need at least one node");
    const std::uint32_t deg =
        degreeOverride.value_or(static_cast<std::uint32_t>(nodeCount - 1));
    if (deg > kMaxFitDegree)
        throw std::invalid_argument("fit: degree " + std::to_string(deg) +
                                    " exceeds the supported maximum of " +
                                    std::to_string(kMaxFitDegree));
    if (deg > nodeCount - 1)
        throw std::invalid_argument("fit: degree must be at most nodes-1");
}

}  // namespace detail

/// Ordinary least squares polynomial of degree n-1 through the projected
/// scatter, where the abscissae take exactly n distinct node values. By the
/// interpolation equivalence its predictions at the nodes equal the
/// per-node sample means. A lower degree may be forced explicitly, but then
/// the WLS/OLS equivalence no longer holds.
inline MarginalFit fitLeastSquares(const Projection& p, const std::vector<double>& nodes,
                                   std::optional<std::uint32_t> degreeOverride = std::nullopt) {
    auto sorted = detail::sortedDistinctNodes(nodes);
    detail::checkDegree(sorted.size(), degreeOverride);
    detail::matchToNodes(p, sorted);
    const auto degree =
        degreeOverride.value_or(static_cast<std::uint32_t>(sorted.size() - 1));
    const IntervalMap map{p.lo, p.hi};
    auto sol = detail::solveLegendreLs(p.abscissae, p.values, nullptr, map, degree);
    return detail::finishFit(p, std::move(sorted), sol, degree);
}

/// Weighted least squares with one strictly positive weight per node,
/// applied to every replicate of that node. With degree n-1 this coincides
/// with the ordinary fit; the operation exists so that equivalence can be
/// tested rather than assumed.
inline MarginalFit fitWeightedLeastSquares(const Projection& p,
                                           const std::vector<double>& nodes,
                                           const std::vector<double>& weights,
                                           std::optional<std::uint32_t> degreeOverride =
                                               std::nullopt) {
    auto sorted = detail::sortedDistinctNodes(nodes);
    if (weights.size() != nodes.size())
        throw std::invalid_argument("fitWeightedLeastSquares: one weight per node required");
    detail::checkDegree(sorted.size(), degreeOverride);

    // Reorder weights to the sorted node order.
    std::vector<double> wSorted(sorted.size());
    for (std::size_t l = 0; l < nodes.size(); ++l) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), nodes[l]);
        wSorted[static_cast<std::size_t>(it - sorted.begin())] = weights[l];
    }
    for (double w : wSorted)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("fitWeightedLeastSquares: weights must be positive");

    const auto nodeOf = detail::matchToNodes(p, sorted);
    std::vector<double> rowW(p.abscissae.size());
    for (std::size_t i = 0; i < rowW.size(); ++i) rowW[i] = std::sqrt(wSorted[nodeOf[i]]);

    const auto degree =
        degreeOverride.value_or(static_cast<std::uint32_t>(sorted.size() - 1));
    const IntervalMap map{p.lo, p.hi};
    auto sol = detail::solveLegendreLs(p.abscissae, p.values, &rowW, map, degree);
    return detail::finishFit(p, std::move(sorted), sol, degree);
}

/// Partitioned-LDS marginal fit: split the axis range into n equal slabs,
/// regress the density values against the slab midpoints, degree n-1.
/// With equal slab counts the fit provably interpolates the partition
/// means, and that identity is enforced; with unequal counts the fit uses
/// the raw abscissae and reports per-slab residuals instead.
inline MarginalFit fitPartitioned(const EvaluatedSet& es, std::size_t k, std::uint32_t n) {
    const auto pm = partitionMeans(es, k, n);  // rejects empty slabs
    const bool equalCounts =
        std::all_of(pm.memberCounts.begin(), pm.memberCounts.end(),
                    [&](std::size_t c) { return c == pm.memberCounts.front(); });

    Projection p = project(es, k);
    if (equalCounts) {
        const auto slabs = partitionAlongAxis(es.points, k, n);
        for (std::size_t u = 0; u < slabs.size(); ++u)
            for (std::size_t idx : slabs[u].members) p.abscissae[idx] = slabs[u].center();
    }

    detail::checkDegree(n, std::nullopt);
    const IntervalMap map{p.lo, p.hi};
    auto sol = detail::solveLegendreLs(p.abscissae, p.values, nullptr, map, n - 1);
    MarginalFit fit = detail::finishFit(p, pm.slabCenters, sol, n - 1);
    fit.slabCounts = pm.memberCounts;
    fit.snappedAbscissae = equalCounts;

    double scaleRef = 0.0;
    for (double m : pm.means) scaleRef = std::max(scaleRef, std::abs(m));
    fit.slabResiduals.resize(n);
    for (std::size_t u = 0; u < n; ++u)
        fit.slabResiduals[u] = fit.scale * fit.predict(pm.slabCenters[u]) - pm.means[u];

    if (equalCounts && scaleRef > 0.0) {
        for (std::size_t u = 0; u < n; ++u)
            if (std::abs(fit.slabResiduals[u]) > 1e-8 * scaleRef)
                throw std::runtime_error(
                    "fitPartitioned: interpolation identity violated at slab " +
                    std::to_string(u) + " (residual " +
                    std::to_string(fit.slabResiduals[u]) + "); solver conditioning " +
                    std::to_string(fit.conditionEstimate));
    }
    return fit;
}

enum class BoundKind { Chebyshev, Equidistant };

/// Interpolation error bound for one marginal: C bounds |pi^(n)| on the
/// interval, n is the node count.
struct ErrorBound {
    double C = 0.0;
    std::uint32_t n = 0;
    double a = 0.0;
    double b = 1.0;
    BoundKind kind = BoundKind::Chebyshev;
    double bound = 0.0;
};

/// Chebyshev-node bound: C / (2^(n-1) n!) * ((b-a)/2)^n.
inline ErrorBound chebyshevBound(double C, std::uint32_t n, double a, double b) {
    if (!(C >= 0.0)) throw std::invalid_argument("chebyshevBound: C must be >= 0");
    if (n < 1 || !(a < b)) throw std::invalid_argument("chebyshevBound: need n >= 1, a < b");
    const double value = C / (std::pow(2.0, n - 1.0) * std::tgamma(n + 1.0)) *
                         std::pow(0.5 * (b - a), n);
    return {C, n, a, b, BoundKind::Chebyshev, value};
}

/// Equidistant-node bound: C / (4n) * ((b-a)/(n-1))^n.
inline ErrorBound equidistantBound(double C, std::uint32_t n, double a, double b) {
    if (!(C >= 0.0)) throw std::invalid_argument("equidistantBound: C must be >= 0");
    if (n < 2 || !(a < b)) throw std::invalid_argument("equidistantBound: need n >= 2, a < b");
    const double value = C / (4.0 * n) * std::pow((b - a) / (n - 1.0), n);
    return {C, n, a, b, BoundKind::Equidistant, value};
}

/// Evaluates scale*predict on a dense mesh, clips negatives, renormalizes.
/// Heavy clipping shows up as the clipped mass fraction in the second
/// member of the returned pair.
inline std::pair<TabulatedDensity, double> normalizeFitWithDiagnostics(
    const MarginalFit& fit, std::size_t panels = 2048) {
    double clipped = 0.0, kept = 0.0;
    std::vector<double> xs(panels + 1), ys(panels + 1);
    const double a = fit.basisMap.a, b = fit.basisMap.b;
    for (std::size_t i = 0; i <= panels; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
        const double v = fit.scale * fit.predict(xs[i]);
        ys[i] = std::max(0.0, v);
        (v < 0.0 ? clipped : kept) += std::abs(v);
    }
    TabulatedDensity tab(std::move(xs), std::move(ys));
    if (!(tab.mass() > 0.0))
        throw std::runtime_error("normalizeFit: fit is nonpositive over the whole interval");
    const double clipFraction = clipped + kept > 0.0 ? clipped / (clipped + kept) : 0.0;
    return {tab.normalized(), clipFraction};
}

inline TabulatedDensity normalizeFit(const MarginalFit& fit, std::size_t panels = 2048) {
    return normalizeFitWithDiagnostics(fit, panels).first;
}

}  // namespace qmarg
