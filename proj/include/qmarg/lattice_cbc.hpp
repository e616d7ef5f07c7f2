#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qmarg/fanova.hpp"
#include "qmarg/parallel.hpp"
#include "qmarg/point_set.hpp"

namespace qmarg {

/// Search specification for a weighted Korobov lattice: product weights
/// gamma_j > 0 and the alpha = 2 shift-invariant worst-case-error kernel.
struct WeightedSearchSpec {
    std::uint64_t N = 0;
    std::size_t dims = 0;
    std::vector<double> gamma;

    WeightedSearchSpec(std::uint64_t n, std::size_t s, std::vector<double> g)
        : N(n), dims(s), gamma(std::move(g)) {
        if (N < 2) throw std::invalid_argument("WeightedSearchSpec: N must be >= 2");
        if (dims == 0 || gamma.size() != dims)
            throw std::invalid_argument("WeightedSearchSpec: need one weight per dimension");
        for (double g2 : gamma)
            if (!(g2 >= 0.0))
                throw std::invalid_argument("WeightedSearchSpec: weights must be >= 0");
    }

    static WeightedSearchSpec uniform(std::uint64_t n, std::size_t s) {
        return WeightedSearchSpec(n, s, std::vector<double>(s, 1.0));
    }
};

namespace detail {

/// alpha = 2 kernel: omega(x) = 2 pi^2 (x^2 - x + 1/6) on [0, 1).
inline double omegaKernel(double x) {
    return 2.0 * M_PI * M_PI * (x * x - x + 1.0 / 6.0);
}

inline std::vector<double> omegaTable(std::uint64_t N) {
    std::vector<double> w(N);
    for (std::uint64_t q = 0; q < N; ++q)
        w[q] = omegaKernel(static_cast<double>(q) / static_cast<double>(N));
    return w;
}

}  // namespace detail

/// Squared worst-case error of the rank-1 lattice with generating vector z
/// in the weighted Korobov space:
///   e^2(z) = -1 + (1/N) sum_i prod_j [1 + gamma_j omega(frac(i z_j / N))].
inline double worstCaseErrorSq(const GeneratingVector& z, const WeightedSearchSpec& spec) {
    if (z.modulus != spec.N || z.dims() != spec.dims)
        throw std::invalid_argument("worstCaseErrorSq: generator does not match the spec");
    const std::uint64_t N = spec.N;
    std::vector<double> terms(N);
    for (std::uint64_t i = 0; i < N; ++i) {
        double p = 1.0;
        for (std::size_t j = 0; j < spec.dims; ++j) {
            const auto q = static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(i) * z.components[j]) % N);
            p *= 1.0 + spec.gamma[j] *
                           detail::omegaKernel(static_cast<double>(q) / static_cast<double>(N));
        }
        terms[i] = p;
    }
    return -1.0 + pairwiseSum(terms) / static_cast<double>(N);
}

struct CbcResult {
    GeneratingVector vector;
    std::vector<double> e2Sequence;  // e^2 after each coordinate, nondecreasing
};

/// Component-by-component construction: coordinate by coordinate, pick the
/// candidate coprime to N that minimizes the worst-case error with earlier
/// coordinates held fixed; ties break toward the smallest candidate.
/// Candidates are enumerated below N/2 only: z and N - z generate mirror
/// lattices with identical criterion values, and the tie-break would always
/// select the smaller twin.
inline CbcResult cbcSearch(const WeightedSearchSpec& spec, unsigned threads = 0) {
    if (spec.N > (std::uint64_t{1} << 20) || spec.dims > 64)
        throw CapacityError("cbcSearch: budget is N <= 2^20 and s <= 64");
    const std::uint64_t N = spec.N;

    std::vector<std::uint64_t> candidates;
    for (std::uint64_t z = 1; z < (N + 1) / 2; ++z)
        if (std::gcd(z, N) == 1) candidates.push_back(z);
    if (candidates.empty()) candidates.push_back(1);  // N = 2 or 3

    const std::vector<double> wtab = detail::omegaTable(N);
    std::vector<double> prod(N, 1.0);
    std::vector<std::uint64_t> chosen;
    std::vector<double> e2seq;
    chosen.reserve(spec.dims);

    for (std::size_t j = 0; j < spec.dims; ++j) {
        const double g = spec.gamma[j];
        std::uint64_t bestZ = 1;
        double bestSum = 0.0;

        if (j == 0) {
            // Every coprime candidate permutes {0..N-1}; all tie, take 1.
            double acc = 0.0;
            for (std::uint64_t q = 0; q < N; ++q) acc += prod[q] * (1.0 + g * wtab[q]);
            bestSum = acc;
        } else {
            struct Best {
                double sum = std::numeric_limits<double>::infinity();
                std::uint64_t z = 0;
            };
            const unsigned nThreads =
                threads == 0 ? defaultThreadCount() : threads;
            const std::size_t nBlocks =
                std::min<std::size_t>(std::max<unsigned>(nThreads, 1), candidates.size());
            std::vector<Best> blockBest(nBlocks);
            parallelForBlocks(candidates.size(), static_cast<unsigned>(nBlocks),
                              [&](std::size_t lo, std::size_t hi) {
                const std::size_t chunk =
                    (candidates.size() + nBlocks - 1) / nBlocks;
                Best local;
                for (std::size_t ci = lo; ci < hi; ++ci) {
                    const std::uint64_t z = candidates[ci];
                    double acc = prod[0] * (1.0 + g * wtab[0]);
                    std::uint64_t q = 0;
                    for (std::uint64_t i = 1; i < N; ++i) {
                        q += z;
                        if (q >= N) q -= N;
                        acc += prod[i] * (1.0 + g * wtab[q]);
                    }
                    if (acc < local.sum || (acc == local.sum && z < local.z)) {
                        local.sum = acc;
                        local.z = z;
                    }
                }
                blockBest[lo / chunk] = local;
            });
            Best merged;
            for (const Best& b : blockBest)
                if (b.z != 0 &&
                    (b.sum < merged.sum || (b.sum == merged.sum && b.z < merged.z)))
                    merged = b;
            bestZ = merged.z;
            bestSum = merged.sum;
        }

        chosen.push_back(bestZ);
        e2seq.push_back(-1.0 + bestSum / static_cast<double>(N));
        std::uint64_t q = 0;
        for (std::uint64_t i = 0; i < N; ++i) {
            prod[i] *= 1.0 + g * wtab[q];
            q += bestZ;
            if (q >= N) q -= N;
        }
    }
    return {GeneratingVector(std::move(chosen), N), std::move(e2seq)};
}

/// Product weights from first-order importances: gamma_k = S_k / max_j S_j,
/// floored so no coordinate drops out of the search criterion entirely.
inline std::vector<double> weightsFromImportances(const VarianceReport& vr,
                                                  double floor = 1e-4) {
    if (vr.importance.empty())
        throw std::invalid_argument("weightsFromImportances: empty report");
    const double top = *std::max_element(vr.importance.begin(), vr.importance.end());
    if (!(top > 0.0))
        throw std::invalid_argument("weightsFromImportances: all importances are zero");
    std::vector<double> gamma(vr.importance.size());
    for (std::size_t k = 0; k < gamma.size(); ++k)
        gamma[k] = std::max(floor, vr.importance[k] / top);
    return gamma;
}

}  // namespace qmarg
