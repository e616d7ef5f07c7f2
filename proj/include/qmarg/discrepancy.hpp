#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qmarg/point_set.hpp"

namespace qmarg {

/// Star discrepancy of the n-point regular grid: 1 - (1 - 1/n)^s.
/// Uses integer powers while n^s is exactly representable so the small
/// closed-form cases come out correctly rounded.
inline double gridStarDiscrepancy(std::uint32_t n, std::uint32_t s) {
    if (n < 1 || s < 1) throw std::invalid_argument("gridStarDiscrepancy: n, s must be >= 1");
    long double num = 1.0L, den = 1.0L;
    bool exact = true;
    for (std::uint32_t i = 0; i < s; ++i) {
        num *= n - 1;
        den *= n;
        if (den > 0x1.0p62L) {
            exact = false;
            break;
        }
    }
    if (exact) return static_cast<double>((den - num) / den);
    return -std::expm1(s * std::log1p(-1.0 / n));
}

struct DiscrepancyResult {
    double value = 0.0;
    bool exact = false;  // false: lower-bound estimate from sampled anchor boxes
};

namespace detail {

// Candidate corner coordinates per axis: every distinct point coordinate
// plus 1. The sup over anchored boxes is attained (as a one-sided limit)
// on this grid.
inline std::vector<std::vector<double>> candidateCorners(
    const std::vector<std::vector<double>>& coords) {
    std::vector<std::vector<double>> cand(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) {
        cand[k] = coords[k];
        cand[k].push_back(1.0);
        std::sort(cand[k].begin(), cand[k].end());
        cand[k].erase(std::unique(cand[k].begin(), cand[k].end()), cand[k].end());
    }
    return cand;
}

inline double localDiscrepancy(double vol, std::size_t open, std::size_t closed, std::size_t n) {
    const double dn = static_cast<double>(n);
    return std::max(vol - static_cast<double>(open) / dn,
                    static_cast<double>(closed) / dn - vol);
}

}  // namespace detail

/// Exact star discrepancy for small inputs (s <= 3, N <= 256) by enumerating
/// the candidate corner grid with both open and closed counts. Larger inputs
/// fall back to a lower-bound estimate from sampled anchors, flagged as such.
inline DiscrepancyResult starDiscrepancyExact(const PointSet& ps,
                                              std::size_t estimatorAnchors = 1 << 14,
                                              std::uint64_t estimatorSeed = 0x9e3779b9) {
    const std::size_t s = ps.dims();
    const std::size_t n = ps.size();

    // Work on the unit cube.
    std::vector<std::vector<double>> coords(s, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < s; ++k)
            coords[k][i] = (ps.coord(i, k) - ps.box().lower(k)) / ps.box().width(k);

    const bool exactFeasible = s <= 3 && n <= 256;
    if (!exactFeasible) {
        // Lower bound: local discrepancy at sampled anchors drawn from the
        // candidate coordinate grid (plus the all-ones corner).
        auto cand = detail::candidateCorners(coords);
        std::mt19937_64 rng(estimatorSeed);
        double best = 0.0;
        std::vector<double> y(s);
        for (std::size_t it = 0; it < estimatorAnchors; ++it) {
            for (std::size_t k = 0; k < s; ++k)
                y[k] = cand[k][rng() % cand[k].size()];
            std::size_t open = 0, closed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                bool isOpen = true, isClosed = true;
                for (std::size_t k = 0; k < s; ++k) {
                    const double x = coords[k][i];
                    if (x >= y[k]) isOpen = false;
                    if (x > y[k]) {
                        isClosed = false;
                        break;
                    }
                }
                open += isOpen;
                closed += isClosed;
            }
            double vol = 1.0;
            for (std::size_t k = 0; k < s; ++k) vol *= y[k];
            best = std::max(best, detail::localDiscrepancy(vol, open, closed, n));
        }
        return {best, false};
    }

    auto cand = detail::candidateCorners(coords);
    double best = 0.0;

    if (s == 1) {
        for (double y : cand[0]) {
            std::size_t open = 0, closed = 0;
            for (double x : coords[0]) {
                open += x < y;
                closed += x <= y;
            }
            best = std::max(best, detail::localDiscrepancy(y, open, closed, n));
        }
        return {best, true};
    }

    if (s == 2) {
        for (double y0 : cand[0])
            for (double y1 : cand[1]) {
                std::size_t open = 0, closed = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double x0 = coords[0][i], x1 = coords[1][i];
                    open += x0 < y0 && x1 < y1;
                    closed += x0 <= y0 && x1 <= y1;
                }
                best = std::max(best, detail::localDiscrepancy(y0 * y1, open, closed, n));
            }
        return {best, true};
    }

    // s == 3: for each (y0, y1) pair sweep the sorted third coordinates of
    // the points inside / on the 2-D prefix, so each pair costs O(N log N).
    std::vector<double> zOpen, zClosed;
    for (double y0 : cand[0])
        for (double y1 : cand[1]) {
            zOpen.clear();
            zClosed.clear();
            for (std::size_t i = 0; i < n; ++i) {
                const double x0 = coords[0][i], x1 = coords[1][i];
                if (x0 < y0 && x1 < y1) zOpen.push_back(coords[2][i]);
                if (x0 <= y0 && x1 <= y1) zClosed.push_back(coords[2][i]);
            }
            std::sort(zOpen.begin(), zOpen.end());
            std::sort(zClosed.begin(), zClosed.end());
            const double area = y0 * y1;
            for (double y2 : cand[2]) {
                const auto open = static_cast<std::size_t>(
                    std::lower_bound(zOpen.begin(), zOpen.end(), y2) - zOpen.begin());
                const auto closed = static_cast<std::size_t>(
                    std::upper_bound(zClosed.begin(), zClosed.end(), y2) - zClosed.begin());
                best = std::max(best, detail::localDiscrepancy(area * y2, open, closed, n));
            }
        }
    return {best, true};
}

}  // namespace qmarg
