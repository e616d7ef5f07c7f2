#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmarg/parallel.hpp"
#include "qmarg/point_set.hpp"

namespace qmarg {

/// Raised when an operation needs structure (shared abscissae, nonempty
/// slabs) that the supplied point set does not have.
struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point set together with the density evaluated at each point.
struct EvaluatedSet {
    PointSet points;
    std::vector<double> values;

    EvaluatedSet(PointSet ps, std::vector<double> vals)
        : points(std::move(ps)), values(std::move(vals)) {
        if (values.size() != points.size())
            throw std::invalid_argument("EvaluatedSet: values.length != N");
        for (double v : values)
            if (!std::isfinite(v))
                throw std::invalid_argument("EvaluatedSet: non-finite density value");
    }

    std::size_t size() const { return values.size(); }
};

/// Evaluates fn at every point, in parallel over index blocks.
inline EvaluatedSet evaluateOn(PointSet ps,
                               const std::function<double(std::span<const double>)>& fn,
                               unsigned threads = 0) {
    std::vector<double> vals(ps.size());
    parallelForBlocks(ps.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) vals[i] = fn(ps.point(i));
    });
    return EvaluatedSet(std::move(ps), std::move(vals));
}

/// Box-scaled QMC/MC integral estimate: volume * mean(values).
inline double integrate(const EvaluatedSet& es) {
    if (es.size() == 0) throw std::invalid_argument("integrate: empty evaluation");
    return es.points.box().volume() * pairwiseSum(es.values) /
           static_cast<double>(es.size());
}

namespace detail {

inline bool withinOneUlp(double x, double a) {
    if (x == a) return true;
    return x == std::nextafter(a, std::numeric_limits<double>::infinity()) ||
           x == std::nextafter(a, -std::numeric_limits<double>::infinity());
}

}  // namespace detail

/// Distinct axis-k coordinate values, ascending. Exact comparison: grid
/// constructors own the abscissae, so replicates are bit-identical.
inline std::vector<double> distinctAbscissae(const PointSet& ps, std::size_t k) {
    if (k >= ps.dims()) throw std::invalid_argument("distinctAbscissae: axis out of range");
    std::vector<double> xs(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) xs[i] = ps.coord(i, k);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

/// Point-wise mean at a fixed abscissa: the reduced volume times the average
/// of values whose k-th coordinate equals the abscissa. Matching is exact
/// (1 ulp slack); anything looser would hide mis-structured inputs.
inline double pointwiseMean(const EvaluatedSet& es, std::size_t k, double abscissa) {
    if (k >= es.points.dims()) throw std::invalid_argument("pointwiseMean: axis out of range");
    std::vector<double> matched;
    for (std::size_t i = 0; i < es.size(); ++i)
        if (detail::withinOneUlp(es.points.coord(i, k), abscissa))
            matched.push_back(es.values[i]);
    if (matched.empty())
        throw StructureError("pointwiseMean: no point has coordinate " +
                             std::to_string(abscissa) + " on axis " + std::to_string(k) +
                             "; the point set is not grid-structured along this axis");
    return es.points.box().reducedVolume(k) * pairwiseSum(matched) /
           static_cast<double>(matched.size());
}

/// Slab means of one axis partition: reduced-volume-scaled averages of the
/// values falling in each equal-width slab, keyed by the slab midpoints.
struct PartitionMeans {
    std::size_t axis = 0;
    std::vector<double> slabCenters;
    std::vector<double> means;
    std::vector<std::size_t> memberCounts;

    std::size_t parts() const { return means.size(); }
};

inline PartitionMeans partitionMeans(const EvaluatedSet& es, std::size_t k, std::uint32_t n) {
    const auto slabs = partitionAlongAxis(es.points, k, n);
    const double vred = es.points.box().reducedVolume(k);
    PartitionMeans pm;
    pm.axis = k;
    pm.slabCenters.reserve(n);
    pm.means.reserve(n);
    pm.memberCounts.reserve(n);
    std::vector<double> vals;
    for (std::size_t u = 0; u < slabs.size(); ++u) {
        const auto& slab = slabs[u];
        if (slab.members.empty())
            throw StructureError("partitionMeans: slab " + std::to_string(u) +
                                 " on axis " + std::to_string(k) +
                                 " is empty; increase N or decrease the part count");
        vals.clear();
        for (std::size_t idx : slab.members) vals.push_back(es.values[idx]);
        pm.slabCenters.push_back(slab.center());
        pm.means.push_back(vred * pairwiseSum(vals) / static_cast<double>(vals.size()));
        pm.memberCounts.push_back(vals.size());
    }
    return pm;
}

}  // namespace qmarg
