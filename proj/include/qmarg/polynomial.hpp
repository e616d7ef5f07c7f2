#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmarg {

/// Affine map between an interval [a, b) and the canonical [-1, 1].
struct IntervalMap {
    double a = -1.0;
    double b = 1.0;

    double toUnit(double x) const { return (2.0 * x - (a + b)) / (b - a); }
    double fromUnit(double u) const { return 0.5 * ((b - a) * u + (a + b)); }
};

/// Legendre polynomials P_0..P_deg at u via the three-term recurrence.
inline void legendreRow(double u, std::span<double> out) {
    const std::size_t m = out.size();
    if (m == 0) return;
    out[0] = 1.0;
    if (m == 1) return;
    out[1] = u;
    for (std::size_t j = 2; j < m; ++j)
        out[j] = ((2.0 * j - 1.0) * u * out[j - 1] - (j - 1.0) * out[j - 2]) / j;
}

/// Evaluates a Legendre series with the given coefficients at u.
inline double legendreEval(std::span<const double> coeffs, double u) {
    if (coeffs.empty()) return 0.0;
    double pPrev = 1.0;
    double acc = coeffs[0];
    if (coeffs.size() == 1) return acc;
    double p = u;
    acc += coeffs[1] * p;
    for (std::size_t j = 2; j < coeffs.size(); ++j) {
        const double pNext = ((2.0 * j - 1.0) * u * p - (j - 1.0) * pPrev) / j;
        pPrev = p;
        p = pNext;
        acc += coeffs[j] * p;
    }
    return acc;
}

}  // namespace qmarg
