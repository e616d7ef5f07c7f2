#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmarg/discrepancy.hpp"
#include "qmarg/io.hpp"
#include "qmarg/korobov_table.hpp"
#include "qmarg/lattice_cbc.hpp"
#include "qmarg/marginal_fit.hpp"
#include "qmarg/metrics.hpp"
#include "qmarg/targets.hpp"

namespace qmarg {

/// Default slab count for partitioned fits: balances interpolation
/// resolution against per-slab averaging noise and keeps the degree in the
/// well-conditioned range.
inline std::uint32_t defaultPartitionCount(std::uint64_t N) {
    const auto n = static_cast<std::uint32_t>(std::lround(std::cbrt(static_cast<double>(N))));
    return std::clamp<std::uint32_t>(n, 8, 24);
}

struct PointSetSpec {
    std::string kind = "korobov";     // grid | chebyshev | random | korobov
    std::uint64_t N = 0;              // random / korobov size
    std::uint32_t n = 0;              // grid kinds: points per axis
    std::string generator = "auto";   // auto | table | cbc | korobov:<g> | file:<path>
    std::string weights = "uniform";  // uniform | fanova | from:<path>
    std::uint64_t seed = 1;
    std::vector<double> shift;
};

struct EstimatorSpec {
    std::vector<std::size_t> axes;             // empty = all axes
    std::uint32_t partitionCount = 0;          // 0 = defaultPartitionCount(N)
    std::optional<std::uint32_t> degreeOverride;
};

struct ExperimentSpec {
    std::string target;           // preset name; empty if inlineTarget is set
    nlohmann::json inlineTarget;  // {type, params..., box:{lower,upper}}
    std::size_t dims = 0;         // lattice-only runs without a target
    PointSetSpec points;
    EstimatorSpec estimator;
    std::vector<double> anchor;   // fanova anchor override
    std::string outDir;           // empty = no files written
    std::uint64_t budget = kDefaultPointBudget;
    unsigned threads = 0;
    bool recordTimings = true;
};

// ---------------------------------------------------------------------------
// Spec resolution
// ---------------------------------------------------------------------------

inline TargetDensity resolveTarget(const ExperimentSpec& spec) {
    if (!spec.target.empty()) return presetTarget(spec.target);
    const auto& cfg = spec.inlineTarget;
    if (cfg.is_null()) throw std::invalid_argument("experiment: no target given");
    const auto type = cfg.at("type").get<std::string>();
    Box box(cfg.at("box").at("lower").get<std::vector<double>>(),
            cfg.at("box").at("upper").get<std::vector<double>>());
    if (type == "exponential")
        return productExponential(cfg.at("lambda").get<std::vector<double>>(), box);
    if (type == "beta")
        return productBeta(cfg.at("alpha").get<std::vector<double>>(),
                           cfg.at("beta").get<std::vector<double>>(), box);
    if (type == "gamma")
        return productGamma(cfg.at("shape").get<std::vector<double>>(),
                            cfg.at("rate").get<std::vector<double>>(), box);
    if (type == "gamma_posterior")
        return gammaPosterior(cfg.at("prior_shape").get<std::vector<double>>(),
                              cfg.at("prior_rate").get<std::vector<double>>(),
                              cfg.at("data").get<std::vector<double>>(), box);
    if (type == "gaussian_mixture")
        return gaussianMixture(cfg.at("weights").get<std::vector<double>>(),
                               cfg.at("means").get<std::vector<std::vector<double>>>(),
                               cfg.at("sigmas").get<std::vector<std::vector<double>>>(), box);
    throw std::invalid_argument("experiment: unknown inline target type " + type);
}

/// Product weights for the lattice construction, resolved from the spec.
inline std::vector<double> resolveLatticeWeights(const ExperimentSpec& spec,
                                                 const std::optional<TargetDensity>& target,
                                                 std::size_t dims) {
    const std::string& w = spec.points.weights;
    if (w == "uniform" || w.empty()) return std::vector<double>(dims, 1.0);
    if (w == "fanova") {
        if (!target || !target->factorization)
            throw std::invalid_argument(
                "points.weights=fanova requires a target with a factorization");
        const auto& ft = *target->factorization;
        const AnchorPoint anchor{spec.anchor.empty() ? ft.defaultAnchor : spec.anchor};
        return weightsFromImportances(varianceReport(ft, anchor));
    }
    if (w.rfind("from:", 0) == 0) {
        const auto vr = varianceReportFromJson(nlohmann::json::parse(readTextFile(w.substr(5))));
        return weightsFromImportances(vr);
    }
    throw std::invalid_argument("experiment: unknown weights source " + w);
}

struct LatticeChoice {
    GeneratingVector vector;
    std::vector<double> gamma;
    std::vector<double> e2Sequence;  // empty when not computed
    std::string source;              // table | cbc | korobov:<g> | file
};

inline bool isUniform(const std::vector<double>& gamma) {
    for (double g : gamma)
        if (g != 1.0) return false;
    return true;
}

/// Picks the generating vector: explicit parameter, the bundled table for
/// unweighted sizes it covers, or a CBC search.
inline LatticeChoice resolveGeneratingVector(const ExperimentSpec& spec, std::size_t dims,
                                             const std::vector<double>& gamma) {
    const auto& g = spec.points.generator;
    const std::uint64_t N = spec.points.N;
    if (g.rfind("korobov:", 0) == 0) {
        const std::uint64_t param = std::stoull(g.substr(8));
        return {korobovVector(N, param, dims), gamma, {}, g};
    }
    if (g.rfind("file:", 0) == 0) {
        auto z = generatingVectorFromJson(nlohmann::json::parse(readTextFile(g.substr(5))));
        if (z.modulus != N || z.dims() < dims)
            throw std::invalid_argument("generator file does not match N/dims");
        z = GeneratingVector(
            std::vector<std::uint64_t>(z.components.begin(), z.components.begin() + dims), N);
        return {z, gamma, {}, "file"};
    }
    const bool uniform = isUniform(gamma);
    if (g == "table" || (g == "auto" && uniform)) {
        if (auto z = tableGeneratingVector(N, dims)) return {*z, gamma, {}, "table"};
        if (g == "table")
            throw std::invalid_argument("no bundled generating vector for N=" +
                                        std::to_string(N));
    }
    auto res = cbcSearch(WeightedSearchSpec(N, dims, gamma), spec.threads);
    return {res.vector, gamma, res.e2Sequence, "cbc"};
}

/// Materializes the point set described by the spec over the box.
inline PointSet buildPointSet(const ExperimentSpec& spec, const Box& box,
                              const std::optional<TargetDensity>& target) {
    const auto& p = spec.points;
    if (p.kind == "grid") return makeRegularGrid(p.n, box, spec.budget);
    if (p.kind == "chebyshev") return makeChebyshevGrid(p.n, box, spec.budget);
    if (p.kind == "random") return makeRandom(p.N, box, p.seed, spec.budget);
    if (p.kind == "korobov") {
        const auto gamma = resolveLatticeWeights(spec, target, box.dims());
        const auto choice = resolveGeneratingVector(spec, box.dims(), gamma);
        return makeKorobov(p.N, choice.vector, box, p.shift, spec.budget);
    }
    throw std::invalid_argument("experiment: unknown point set kind " + p.kind);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct PhaseTimings {
    double generateMs = 0.0;
    double evaluateMs = 0.0;
    double fitMs = 0.0;
    double scoreMs = 0.0;

    double totalMs() const { return generateMs + evaluateMs + fitMs + scoreMs; }
};

namespace detail {

class PhaseTimer {
public:
    explicit PhaseTimer(bool enabled) : enabled_(enabled) {}
    template <typename F>
    auto time(double& slot, F&& f) -> decltype(f()) {
        if (!enabled_) return f();
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            slot += std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        } else {
            auto result = f();
            slot += std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
            return result;
        }
    }

private:
    bool enabled_;
};

inline void ensureOutDir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

inline std::string joinPath(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

}  // namespace detail

struct LatticeArtifacts {
    LatticeChoice choice;
    PointSet points;
};

/// `lattice` command: construct (or look up) the generating vector,
/// materialize the point set, and write vector JSON plus both point
/// serializations when an output directory is set.
inline LatticeArtifacts runLattice(const ExperimentSpec& spec) {
    std::optional<TargetDensity> target;
    if (!spec.target.empty() || !spec.inlineTarget.is_null())
        target = resolveTarget(spec);
    const Box box = target ? target->defaultBox : Box::unit(spec.dims);
    if (spec.points.kind != "korobov")
        throw std::invalid_argument("lattice: point set kind must be korobov");
    const auto gamma = resolveLatticeWeights(spec, target, box.dims());
    auto choice = resolveGeneratingVector(spec, box.dims(), gamma);
    PointSet ps = makeKorobov(spec.points.N, choice.vector, box, spec.points.shift, spec.budget);

    if (!spec.outDir.empty()) {
        detail::ensureOutDir(spec.outDir);
        writeTextFile(
            detail::joinPath(spec.outDir, "generating_vector.json"),
            generatingVectorToJson(choice.vector, choice.gamma, choice.e2Sequence).dump(2) +
                "\n");
        std::ofstream csv(detail::joinPath(spec.outDir, "points.csv"), std::ios::binary);
        writePointSetCsv(ps, csv);
        std::ofstream bin(detail::joinPath(spec.outDir, "points.qmcp"), std::ios::binary);
        writePointSetBinary(ps, bin);
    }
    return {std::move(choice), std::move(ps)};
}

struct AxisEstimate {
    std::size_t axis = 0;
    MarginalFit fit;
    TabulatedDensity density;       // normalized tabulation
    double clipFraction = 0.0;
    double hellinger = 0.0;         // vs analytic marginal
    double supErrorNormalized = 0.0;
};

struct EstimateResult {
    std::string targetName;
    std::string method;
    std::uint64_t evalCount = 0;
    std::uint32_t partitionCount = 0;
    std::vector<AxisEstimate> axes;
    PhaseTimings timings;
};

/// `estimate` command: evaluate the target on the point set, fit every
/// requested axis, normalize, and score against the analytic marginals.
inline EstimateResult runEstimate(const ExperimentSpec& spec) {
    const TargetDensity target = resolveTarget(spec);
    detail::PhaseTimer timer(true);
    EstimateResult out;
    out.targetName = target.name;
    out.method = spec.points.kind;

    PointSet ps = timer.time(out.timings.generateMs,
                             [&] { return buildPointSet(spec, target.defaultBox, target); });
    const bool gridStructured =
        ps.kind() == PointSetKind::RegularGrid || ps.kind() == PointSetKind::ChebyshevGrid ||
        ps.kind() == PointSetKind::TensorGrid;
    out.evalCount = ps.size();

    EvaluatedSet es = timer.time(out.timings.evaluateMs, [&] {
        return evaluateOn(std::move(ps), target.evaluate, spec.threads);
    });

    std::vector<std::size_t> axes = spec.estimator.axes;
    if (axes.empty())
        for (std::size_t k = 0; k < target.dims; ++k) axes.push_back(k);

    const std::uint32_t parts = spec.estimator.partitionCount
                                    ? spec.estimator.partitionCount
                                    : defaultPartitionCount(es.size());
    out.partitionCount = gridStructured ? 0 : parts;

    for (std::size_t k : axes) {
        AxisEstimate ax;
        ax.axis = k;
        ax.fit = timer.time(out.timings.fitMs, [&] {
            if (gridStructured) {
                const Projection p = project(es, k);
                return fitLeastSquares(p, distinctAbscissae(es.points, k),
                                       spec.estimator.degreeOverride);
            }
            return fitPartitioned(es, k, parts);
        });
        auto norm = normalizeFitWithDiagnostics(ax.fit);
        ax.density = std::move(norm.first);
        ax.clipFraction = norm.second;
        timer.time(out.timings.scoreMs, [&] {
            const auto truth = tabulate(target.trueMarginal(k), target.defaultBox.lower(k),
                                        target.defaultBox.upper(k));
            ax.hellinger = hellinger(ax.density, truth);
            ax.supErrorNormalized = supError(ax.density, truth.normalized());
        });
        out.axes.push_back(std::move(ax));
    }

    if (!spec.outDir.empty()) {
        detail::ensureOutDir(spec.outDir);
        std::ostringstream metrics;
        metrics << "target,axis,method,N,metric,value\n";
        for (const auto& ax : out.axes) {
            const std::string base =
                out.targetName + "_marginal" + std::to_string(ax.axis + 1);
            writeTextFile(detail::joinPath(spec.outDir, base + "_fit.json"),
                          fitToJson(ax.fit).dump(2) + "\n");
            std::ofstream csv(detail::joinPath(spec.outDir, base + "_density.csv"),
                              std::ios::binary);
            writeTabulatedCsv(ax.density, csv);
            for (const char* m : {"hellinger", "sup_error"})
                metrics << out.targetName << ',' << ax.axis + 1 << ',' << out.method << ','
                        << out.evalCount << ',' << m << ','
                        << formatDouble(std::string(m) == "hellinger" ? ax.hellinger
                                                                      : ax.supErrorNormalized)
                        << '\n';
        }
        writeTextFile(detail::joinPath(spec.outDir, out.targetName + "_metrics.csv"),
                      metrics.str());
    }
    return out;
}

/// `fanova` command: variance components and importances of the target's
/// factorization (closed form when available).
inline VarianceReport runFanova(const ExperimentSpec& spec) {
    const TargetDensity target = resolveTarget(spec);
    if (!target.factorization)
        throw std::invalid_argument("fanova: target " + target.name +
                                    " carries no likelihood-prior factorization");
    const auto& ft = *target.factorization;
    const AnchorPoint anchor{spec.anchor.empty() ? ft.defaultAnchor : spec.anchor};
    VarianceReport vr = varianceReport(ft, anchor);
    if (!spec.outDir.empty()) {
        detail::ensureOutDir(spec.outDir);
        writeTextFile(detail::joinPath(spec.outDir, target.name + "_fanova.json"),
                      varianceReportToJson(vr).dump(2) + "\n");
    }
    return vr;
}

// ---------------------------------------------------------------------------
// bench: a matrix of runs on one target plus an optional convergence series
// ---------------------------------------------------------------------------

struct BenchRun {
    std::string method;  // label in the output CSV
    PointSetSpec points;
    EstimatorSpec estimator;
};

struct BenchSpec {
    std::string target;
    nlohmann::json inlineTarget;
    std::vector<BenchRun> runs;
    // Figure-5-style series: sup error of partitioned fits over (n, m).
    std::vector<std::uint32_t> convergenceParts;
    std::vector<std::uint32_t> convergenceSlabPoints;
    std::string outDir;
    std::uint64_t budget = kDefaultPointBudget;
    unsigned threads = 0;
    bool recordTimings = true;
};

struct BenchRow {
    std::size_t marginal = 0;  // 1-based
    double weightPercent = 0.0;
    std::string method;
    std::uint64_t N = 0;
    double hellinger = 0.0;
    double supError = 0.0;
    double wallMs = 0.0;
};

struct ConvergenceRow {
    std::size_t axis = 0;  // 1-based
    std::uint32_t parts = 0;
    std::uint32_t slabPoints = 0;
    std::uint64_t N = 0;
    double supError = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<ConvergenceRow> convergence;
    std::string comparisonCsv;
    std::string convergenceCsv;
};

inline BenchResult runBench(const BenchSpec& bench) {
    ExperimentSpec base;
    base.target = bench.target;
    base.inlineTarget = bench.inlineTarget;
    base.budget = bench.budget;
    base.threads = bench.threads;
    base.recordTimings = bench.recordTimings;
    const TargetDensity target = resolveTarget(base);

    // Table-1-style weight column from the factorization, when present.
    std::vector<double> weightPercent(target.dims, 0.0);
    if (target.factorization) {
        const auto& ft = *target.factorization;
        weightPercent = varianceReport(ft, AnchorPoint{ft.defaultAnchor}).percentages;
    }

    BenchResult result;
    for (const auto& run : bench.runs) {
        ExperimentSpec spec = base;
        spec.points = run.points;
        spec.estimator = run.estimator;
        spec.outDir.clear();
        const auto est = runEstimate(spec);
        for (const auto& ax : est.axes)
            result.rows.push_back({ax.axis + 1, weightPercent[ax.axis], run.method,
                                   est.evalCount, ax.hellinger, ax.supErrorNormalized,
                                   bench.recordTimings ? est.timings.totalMs() : 0.0});
    }

    // Convergence series over (parts, points-per-slab) pairs.
    for (std::uint32_t n : bench.convergenceParts)
        for (std::uint32_t m : bench.convergenceSlabPoints) {
            ExperimentSpec spec = base;
            spec.points.kind = "korobov";
            spec.points.N = static_cast<std::uint64_t>(n) * m;
            spec.points.generator = "auto";
            spec.estimator.partitionCount = n;
            const auto est = runEstimate(spec);
            for (const auto& ax : est.axes)
                result.convergence.push_back(
                    {ax.axis + 1, n, m, est.evalCount, ax.supErrorNormalized});
        }

    std::ostringstream cmp;
    cmp << "marginal,weight_percent,method,N,hellinger,sup_error,wall_ms\n";
    for (const auto& r : result.rows)
        cmp << r.marginal << ',' << formatDouble(r.weightPercent) << ',' << r.method << ','
            << r.N << ',' << formatDouble(r.hellinger) << ',' << formatDouble(r.supError)
            << ',' << formatDouble(r.wallMs) << '\n';
    result.comparisonCsv = cmp.str();

    std::ostringstream cnv;
    cnv << "axis,parts,slab_points,N,sup_error\n";
    for (const auto& r : result.convergence)
        cnv << r.axis << ',' << r.parts << ',' << r.slabPoints << ',' << r.N << ','
            << formatDouble(r.supError) << '\n';
    result.convergenceCsv = cnv.str();

    if (!bench.outDir.empty()) {
        detail::ensureOutDir(bench.outDir);
        writeTextFile(detail::joinPath(bench.outDir, "bench_comparison.csv"),
                      result.comparisonCsv);
        if (!result.convergence.empty())
            writeTextFile(detail::joinPath(bench.outDir, "bench_convergence.csv"),
                          result.convergenceCsv);
    }
    return result;
}

}  // namespace qmarg
