#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qmarg {

/// Density tabulated on a monotone mesh over [a, b); the carrier for all
/// distance computations.
struct TabulatedDensity {
    std::vector<double> xs;
    std::vector<double> ys;

    TabulatedDensity() = default;
    TabulatedDensity(std::vector<double> x, std::vector<double> y)
        : xs(std::move(x)), ys(std::move(y)) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw std::invalid_argument("TabulatedDensity: need >= 2 matching mesh points");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1]))
                throw std::invalid_argument("TabulatedDensity: mesh must be strictly increasing");
        for (double v : ys)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("TabulatedDensity: values must be finite and >= 0");
    }

    /// Trapezoid mass over the mesh.
    double mass() const {
        double m = 0.0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            m += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
        return m;
    }

    /// Linear interpolation; zero outside the mesh.
    double operator()(double x) const {
        if (x <= xs.front()) return x == xs.front() ? ys.front() : 0.0;
        if (x >= xs.back()) return x == xs.back() ? ys.back() : 0.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + t * (ys[i] - ys[i - 1]);
    }

    TabulatedDensity normalized() const {
        const double m = mass();
        if (!(m > 0.0)) throw std::invalid_argument("TabulatedDensity: zero mass");
        TabulatedDensity out = *this;
        for (double& v : out.ys) v /= m;
        return out;
    }
};

/// Tabulates a callable on a uniform mesh of `panels` intervals over [a, b],
/// clipping negatives to zero.
inline TabulatedDensity tabulate(const std::function<double(double)>& f, double a, double b,
                                 std::size_t panels = 2048) {
    if (!(a < b)) throw std::invalid_argument("tabulate: need a < b");
    std::vector<double> xs(panels + 1), ys(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
        ys[i] = std::max(0.0, f(xs[i]));
    }
    return TabulatedDensity(std::move(xs), std::move(ys));
}

namespace detail {

// Union mesh restricted to the overlap handling; the finer of the two
// meshes wins, and both tabulations are linearly resampled onto it.
inline std::vector<double> commonMesh(const TabulatedDensity& p, const TabulatedDensity& q) {
    std::vector<double> mesh;
    mesh.reserve(p.xs.size() + q.xs.size());
    mesh.insert(mesh.end(), p.xs.begin(), p.xs.end());
    mesh.insert(mesh.end(), q.xs.begin(), q.xs.end());
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
    return mesh;
}

}  // namespace detail

/// Hellinger distance H(p, q) = sqrt(1/2 * integral (sqrt p - sqrt q)^2),
/// in [0, 1]. Inputs are normalized to unit mass first and resampled onto
/// the union mesh by linear interpolation.
inline double hellinger(const TabulatedDensity& p, const TabulatedDensity& q) {
    const TabulatedDensity pn = p.normalized(), qn = q.normalized();
    const auto mesh = detail::commonMesh(pn, qn);
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double d = std::sqrt(pn(mesh[i])) - std::sqrt(qn(mesh[i]));
        const double cur = d * d;
        if (i > 0) acc += 0.5 * (cur + prev) * (mesh[i] - mesh[i - 1]);
        prev = cur;
    }
    return std::sqrt(std::min(1.0, std::max(0.0, 0.5 * acc)));
}

/// Max absolute difference over the union mesh.
inline double supError(const TabulatedDensity& p, const TabulatedDensity& q) {
    const auto mesh = detail::commonMesh(p, q);
    double worst = 0.0;
    for (double x : mesh) worst = std::max(worst, std::abs(p(x) - q(x)));
    return worst;
}

/// L2 distance sqrt(integral (p - q)^2) over the union mesh.
inline double l2Error(const TabulatedDensity& p, const TabulatedDensity& q) {
    const auto mesh = detail::commonMesh(p, q);
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double d = p(mesh[i]) - q(mesh[i]);
        const double cur = d * d;
        if (i > 0) acc += 0.5 * (cur + prev) * (mesh[i] - mesh[i - 1]);
        prev = cur;
    }
    return std::sqrt(acc);
}

}  // namespace qmarg
