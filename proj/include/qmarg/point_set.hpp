#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmarg/box.hpp"
#include "qmarg/parallel.hpp"

namespace qmarg {

/// Hard cap on generated points; guards against accidental n^s blowups.
inline constexpr std::uint64_t kDefaultPointBudget = std::uint64_t{1} << 26;

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Generating vector of a rank-1 lattice: z components modulo N,
/// each coprime to N so every 1-D projection has N distinct values.
struct GeneratingVector {
    std::vector<std::uint64_t> components;
    std::uint64_t modulus = 0;

    GeneratingVector() = default;
    GeneratingVector(std::vector<std::uint64_t> z, std::uint64_t N)
        : components(std::move(z)), modulus(N) {
        if (N < 2) throw std::invalid_argument("GeneratingVector: modulus must be >= 2");
        for (std::size_t j = 0; j < components.size(); ++j) {
            const std::uint64_t zj = components[j] % N;
            if (zj == 0 || std::gcd(zj, N) != 1)
                throw std::invalid_argument("GeneratingVector: gcd(z[" + std::to_string(j) +
                                            "], N) != 1");
            components[j] = zj;
        }
    }

    std::size_t dims() const { return components.size(); }
};

/// Korobov-parameter form z = (1, g, g^2, ...) mod N.
inline GeneratingVector korobovVector(std::uint64_t N, std::uint64_t g, std::size_t dims) {
    if (std::gcd(g % N, N) != 1)
        throw std::invalid_argument("korobovVector: gcd(g, N) != 1");
    std::vector<std::uint64_t> z(dims);
    std::uint64_t acc = 1;
    for (std::size_t j = 0; j < dims; ++j) {
        z[j] = acc;
        acc = static_cast<std::uint64_t>((static_cast<unsigned __int128>(acc) * g) % N);
    }
    return GeneratingVector(std::move(z), N);
}

enum class PointSetKind { RegularGrid, ChebyshevGrid, Random, Korobov, TensorGrid };

inline const char* toString(PointSetKind k) {
    switch (k) {
        case PointSetKind::RegularGrid: return "regular_grid";
        case PointSetKind::ChebyshevGrid: return "chebyshev_grid";
        case PointSetKind::Random: return "random";
        case PointSetKind::Korobov: return "korobov";
        case PointSetKind::TensorGrid: return "tensor_grid";
    }
    return "?";
}

/// N points in s dimensions stored row-major, plus how they were made.
/// Immutable after construction; every coordinate lies in [lower, upper).
class PointSet {
public:
    PointSet(std::vector<double> rowMajor, Box box, PointSetKind kind)
        : data_(std::move(rowMajor)), box_(std::move(box)), kind_(kind) {
        if (data_.empty() || data_.size() % box_.dims() != 0)
            throw std::invalid_argument("PointSet: data size must be a positive multiple of dims");
        n_ = data_.size() / box_.dims();
    }

    std::size_t size() const { return n_; }
    std::size_t dims() const { return box_.dims(); }
    const Box& box() const { return box_; }
    PointSetKind kind() const { return kind_; }

    std::span<const double> point(std::size_t i) const {
        return {data_.data() + i * dims(), dims()};
    }
    double coord(std::size_t i, std::size_t k) const { return data_[i * dims() + k]; }
    const std::vector<double>& raw() const { return data_; }

    // Optional provenance, filled in by the constructors below.
    std::optional<std::uint32_t> pointsPerAxis;      // grid kinds
    std::optional<std::uint64_t> seed;               // random kind
    std::optional<GeneratingVector> generator;       // korobov kind
    std::vector<double> shift;                       // korobov kind, unit-cube shift

private:
    std::vector<double> data_;
    Box box_;
    PointSetKind kind_;
    std::size_t n_ = 0;
};

namespace detail {

inline void checkBudget(std::uint64_t n, std::uint64_t budget, const char* what) {
    if (n == 0) throw std::invalid_argument(std::string(what) + ": empty point set requested");
    if (n > budget)
        throw CapacityError(std::string(what) + ": " + std::to_string(n) +
                            " points exceed the budget of " + std::to_string(budget));
}

inline std::uint64_t checkedPow(std::uint64_t base, std::uint32_t exp, std::uint64_t budget,
                                const char* what) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (r > budget / base)
            throw CapacityError(std::string(what) + ": n^s overflows the point budget");
        r *= base;
    }
    return r;
}

// Keeps mapped coordinates strictly below the open upper bound.
inline double clampBelow(double x, double hi) {
    return x < hi ? x : std::nextafter(hi, -std::numeric_limits<double>::infinity());
}

}  // namespace detail

/// Tensor product of explicit per-axis abscissae. The workhorse behind the
/// grid constructors; also useful on its own for anisotropic node layouts.
inline PointSet makeTensorGrid(const std::vector<std::vector<double>>& axes, const Box& box,
                               std::uint64_t budget = kDefaultPointBudget,
                               PointSetKind kind = PointSetKind::TensorGrid) {
    const std::size_t s = box.dims();
    if (axes.size() != s) throw std::invalid_argument("makeTensorGrid: axes/box dims mismatch");
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < s; ++k) {
        if (axes[k].empty()) throw std::invalid_argument("makeTensorGrid: empty axis");
        for (double x : axes[k])
            if (x < box.lower(k) || x >= box.upper(k))
                throw std::invalid_argument("makeTensorGrid: abscissa outside box");
        if (total > budget / axes[k].size())
            throw CapacityError("makeTensorGrid: grid size exceeds the point budget");
        total *= axes[k].size();
    }
    detail::checkBudget(total, budget, "makeTensorGrid");

    std::vector<double> data(total * s);
    // Row index decomposes mixed-radix; last axis varies fastest.
    for (std::uint64_t i = 0; i < total; ++i) {
        std::uint64_t rem = i;
        for (std::size_t k = s; k-- > 0;) {
            const auto& ax = axes[k];
            data[i * s + k] = ax[rem % ax.size()];
            rem /= ax.size();
        }
    }
    return PointSet(std::move(data), box, kind);
}

/// Midpoint regular grid: n abscissae per axis at a + (l + 1/2) w / n.
inline PointSet makeRegularGrid(std::uint32_t n, const Box& box,
                                std::uint64_t budget = kDefaultPointBudget) {
    if (n < 2) throw std::invalid_argument("makeRegularGrid: n must be >= 2");
    detail::checkedPow(n, static_cast<std::uint32_t>(box.dims()), budget, "makeRegularGrid");
    std::vector<std::vector<double>> axes(box.dims());
    for (std::size_t k = 0; k < box.dims(); ++k) {
        axes[k].resize(n);
        const double w = box.width(k) / n;
        for (std::uint32_t l = 0; l < n; ++l) axes[k][l] = box.lower(k) + (l + 0.5) * w;
    }
    PointSet ps = makeTensorGrid(axes, box, budget, PointSetKind::RegularGrid);
    ps.pointsPerAxis = n;
    return ps;
}

/// Chebyshev nodes (roots of the first-kind polynomial) per axis, affinely
/// shifted to [a_k, b_k), tensorized. Nodes are strictly interior.
inline PointSet makeChebyshevGrid(std::uint32_t n, const Box& box,
                                  std::uint64_t budget = kDefaultPointBudget) {
    if (n < 2) throw std::invalid_argument("makeChebyshevGrid: n must be >= 2");
    detail::checkedPow(n, static_cast<std::uint32_t>(box.dims()), budget, "makeChebyshevGrid");
    std::vector<std::vector<double>> axes(box.dims());
    for (std::size_t k = 0; k < box.dims(); ++k) {
        axes[k].resize(n);
        const double mid = 0.5 * (box.lower(k) + box.upper(k));
        const double half = 0.5 * box.width(k);
        for (std::uint32_t l = 1; l <= n; ++l)
            axes[k][l - 1] = mid + half * std::cos((2.0 * l - 1.0) * M_PI / (2.0 * n));
    }
    PointSet ps = makeTensorGrid(axes, box, budget, PointSetKind::ChebyshevGrid);
    ps.pointsPerAxis = n;
    return ps;
}

/// Chebyshev abscissae for one interval, in the natural (descending) order.
inline std::vector<double> chebyshevNodes(std::uint32_t n, double a, double b) {
    std::vector<double> xs(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::uint32_t l = 1; l <= n; ++l)
        xs[l - 1] = mid + half * std::cos((2.0 * l - 1.0) * M_PI / (2.0 * n));
    return xs;
}

/// N independent uniform draws over the box. The generator mapping is fully
/// specified (mt19937_64, 53-bit mantissa draws), so a seed pins the bytes.
inline PointSet makeRandom(std::uint64_t N, const Box& box, std::uint64_t seed,
                           std::uint64_t budget = kDefaultPointBudget) {
    if (N < 1) throw std::invalid_argument("makeRandom: N must be >= 1");
    detail::checkBudget(N, budget, "makeRandom");
    const std::size_t s = box.dims();
    std::vector<double> data(N * s);
    std::mt19937_64 rng(seed);
    for (std::uint64_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < s; ++k) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
            data[i * s + k] =
                detail::clampBelow(box.lower(k) + u * box.width(k), box.upper(k));
        }
    PointSet ps(std::move(data), box, PointSetKind::Random);
    ps.seed = seed;
    return ps;
}

/// Rank-1 lattice: point i = frac(i z / N + shift) mapped onto the box.
inline PointSet makeKorobov(std::uint64_t N, const GeneratingVector& z, const Box& box,
                            const std::vector<double>& shift = {},
                            std::uint64_t budget = kDefaultPointBudget) {
    if (z.modulus != N) throw std::invalid_argument("makeKorobov: generator modulus != N");
    if (z.dims() != box.dims())
        throw std::invalid_argument("makeKorobov: generator dims != box dims");
    if (!shift.empty() && shift.size() != box.dims())
        throw std::invalid_argument("makeKorobov: shift dims mismatch");
    for (double sh : shift)
        if (sh < 0.0 || sh >= 1.0)
            throw std::invalid_argument("makeKorobov: shift components must lie in [0,1)");
    detail::checkBudget(N, budget, "makeKorobov");

    const std::size_t s = box.dims();
    std::vector<double> data(N * s);
    parallelForBlocks(N, 0, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t k = 0; k < s; ++k) {
                const std::uint64_t q = static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(i) * z.components[k]) % N);
                double u = static_cast<double>(q) / static_cast<double>(N);
                if (!shift.empty()) {
                    u += shift[k];
                    if (u >= 1.0) u -= 1.0;
                }
                data[i * s + k] =
                    detail::clampBelow(box.lower(k) + u * box.width(k), box.upper(k));
            }
    });
    PointSet ps(std::move(data), box, PointSetKind::Korobov);
    ps.generator = z;
    ps.shift = shift;
    return ps;
}

inline PointSet makeKorobov(std::uint64_t N, std::uint64_t g, const Box& box,
                            const std::vector<double>& shift = {},
                            std::uint64_t budget = kDefaultPointBudget) {
    return makeKorobov(N, korobovVector(N, g, box.dims()), box, shift, budget);
}

/// One equal-width slab of an axis partition plus its member point indices.
struct Slab {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> members;

    double center() const { return 0.5 * (lo + hi); }
    std::size_t count() const { return members.size(); }
};

/// Splits the axis-k range into n equal-width slabs and assigns every point
/// to exactly one slab by its k-th coordinate. Slabs may come back empty;
/// downstream estimators must reject those.
inline std::vector<Slab> partitionAlongAxis(const PointSet& ps, std::size_t k, std::uint32_t n) {
    if (k >= ps.dims()) throw std::invalid_argument("partitionAlongAxis: axis out of range");
    if (n < 2) throw std::invalid_argument("partitionAlongAxis: need at least 2 parts");
    const double a = ps.box().lower(k);
    const double width = ps.box().width(k) / n;
    std::vector<Slab> slabs(n);
    for (std::uint32_t u = 0; u < n; ++u) {
        slabs[u].lo = a + u * width;
        slabs[u].hi = (u + 1 == n) ? ps.box().upper(k) : a + (u + 1) * width;
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double x = ps.coord(i, k);
        auto u = static_cast<std::size_t>((x - a) / width);
        if (u >= n) u = n - 1;  // guard against rounding at the top edge
        // Rounding in the division can also misplace a point by one slab.
        if (x < slabs[u].lo) --u;
        else if (u + 1 < n && x >= slabs[u].hi) ++u;
        slabs[u].members.push_back(i);
    }
    return slabs;
}

}  // namespace qmarg
