#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmarg/fanova.hpp"
#include "qmarg/marginal_fit.hpp"
#include "qmarg/metrics.hpp"
#include "qmarg/point_set.hpp"
#include "qmarg/quadrature.hpp"

namespace qmarg {

/// Shortest decimal representation that round-trips the double exactly.
inline std::string formatDouble(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Point sets: CSV (one point per row) and a little-endian binary container
// with the 16-byte header {magic "QMCP", version u16, s u16, N u64}.
// ---------------------------------------------------------------------------

inline void writePointSetCsv(const PointSet& ps, std::ostream& out) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t k = 0; k < ps.dims(); ++k) {
            if (k) out << ',';
            out << formatDouble(ps.coord(i, k));
        }
        out << '\n';
    }
}

/// Raw coordinate matrix as read back from a serialized container; the
/// formats do not carry the box.
struct RawPoints {
    std::uint64_t n = 0;
    std::uint16_t dims = 0;
    std::vector<double> data;  // row-major
};

inline RawPoints readPointSetCsv(std::istream& in) {
    RawPoints raw;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint16_t cols = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc{})
                throw std::runtime_error("point CSV: malformed number in line: " + line);
            raw.data.push_back(v);
            ++cols;
            p = res.ptr;
            if (p < end && *p == ',') ++p;
        }
        if (raw.dims == 0) raw.dims = cols;
        else if (cols != raw.dims)
            throw std::runtime_error("point CSV: inconsistent column count");
        ++raw.n;
    }
    return raw;
}

inline constexpr std::uint16_t kPointBinaryVersion = 1;

inline void writePointSetBinary(const PointSet& ps, std::ostream& out) {
    const char magic[4] = {'Q', 'M', 'C', 'P'};
    out.write(magic, 4);
    const std::uint16_t version = kPointBinaryVersion;
    const auto dims = static_cast<std::uint16_t>(ps.dims());
    const auto n = static_cast<std::uint64_t>(ps.size());
    // Little-endian byte order; this is a no-op copy on the platforms we
    // build for, written out explicitly so the format stays pinned.
    auto putLe = [&out](const void* p, std::size_t bytes) {
        const auto* b = static_cast<const unsigned char*>(p);
        out.write(reinterpret_cast<const char*>(b), static_cast<std::streamsize>(bytes));
    };
    static_assert(std::endian::native == std::endian::little,
                  "binary point container assumes a little-endian host");
    putLe(&version, 2);
    putLe(&dims, 2);
    putLe(&n, 8);
    putLe(ps.raw().data(), ps.raw().size() * sizeof(double));
}

inline RawPoints readPointSetBinary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "QMCP", 4) != 0)
        throw std::runtime_error("point binary: bad magic");
    std::uint16_t version = 0;
    RawPoints raw;
    in.read(reinterpret_cast<char*>(&version), 2);
    in.read(reinterpret_cast<char*>(&raw.dims), 2);
    in.read(reinterpret_cast<char*>(&raw.n), 8);
    if (!in || version != kPointBinaryVersion)
        throw std::runtime_error("point binary: unsupported version");
    raw.data.resize(raw.n * raw.dims);
    in.read(reinterpret_cast<char*>(raw.data.data()),
            static_cast<std::streamsize>(raw.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("point binary: truncated payload");
    return raw;
}

// ---------------------------------------------------------------------------
// JSON / CSV forms of the analysis artifacts.
// ---------------------------------------------------------------------------

inline nlohmann::json fitToJson(const MarginalFit& fit) {
    return {{"axis", fit.axis},
            {"degree", fit.degree},
            {"basis", "shifted-legendre"},
            {"coefficients", fit.coefficients},
            {"interval", {fit.basisMap.a, fit.basisMap.b}},
            {"scale", fit.scale}};
}

inline MarginalFit fitFromJson(const nlohmann::json& j) {
    MarginalFit fit;
    fit.axis = j.at("axis").get<std::size_t>();
    fit.degree = j.at("degree").get<std::uint32_t>();
    if (j.at("basis").get<std::string>() != "shifted-legendre")
        throw std::runtime_error("fit JSON: unknown basis");
    fit.coefficients = j.at("coefficients").get<std::vector<double>>();
    fit.basisMap = IntervalMap{j.at("interval").at(0).get<double>(),
                               j.at("interval").at(1).get<double>()};
    fit.scale = j.at("scale").get<double>();
    return fit;
}

inline void writePartitionMeansCsv(const PartitionMeans& pm, std::ostream& out) {
    out << "slab_center,mean,count\n";
    for (std::size_t u = 0; u < pm.parts(); ++u)
        out << formatDouble(pm.slabCenters[u]) << ',' << formatDouble(pm.means[u]) << ','
            << pm.memberCounts[u] << '\n';
}

inline void writeTabulatedCsv(const TabulatedDensity& tab, std::ostream& out) {
    out << "x,density\n";
    for (std::size_t i = 0; i < tab.xs.size(); ++i)
        out << formatDouble(tab.xs[i]) << ',' << formatDouble(tab.ys[i]) << '\n';
}

inline nlohmann::json varianceReportToJson(const VarianceReport& vr) {
    return {{"anchor", vr.anchor},
            {"sigma0sq", vr.sigma0sq},
            {"sigmaKsq", vr.sigmaKsq},
            {"importance", vr.importance},
            {"percent", vr.percentages}};
}

inline VarianceReport varianceReportFromJson(const nlohmann::json& j) {
    VarianceReport vr;
    vr.anchor = j.at("anchor").get<std::vector<double>>();
    vr.sigma0sq = j.at("sigma0sq").get<double>();
    vr.sigmaKsq = j.at("sigmaKsq").get<std::vector<double>>();
    vr.importance = j.at("importance").get<std::vector<double>>();
    vr.percentages = j.at("percent").get<std::vector<double>>();
    return vr;
}

inline nlohmann::json generatingVectorToJson(const GeneratingVector& z,
                                             const std::vector<double>& gamma,
                                             const std::vector<double>& e2Sequence) {
    return {{"N", z.modulus},
            {"s", z.dims()},
            {"z", z.components},
            {"gamma", gamma},
            {"e2_sequence", e2Sequence}};
}

inline GeneratingVector generatingVectorFromJson(const nlohmann::json& j) {
    return GeneratingVector(j.at("z").get<std::vector<std::uint64_t>>(),
                            j.at("N").get<std::uint64_t>());
}

inline void writeTextFile(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
}

inline std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qmarg
