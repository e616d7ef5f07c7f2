// Regenerates the bundled table of unweighted Korobov generating vectors:
// runs the CBC search for each power-of-two size and rewrites both the JSON
// data file and the embedded header. The largest sizes take a while; the
// outputs are rewritten after every size so partial runs are still usable.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmarg/lattice_cbc.hpp"

namespace {

struct Entry {
    std::uint64_t N;
    std::vector<std::uint64_t> z;
    std::vector<double> e2;
};

void writeJson(const std::string& path, const std::vector<Entry>& entries, std::size_t dims) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json obj;
        obj["N"] = e.N;
        obj["s"] = dims;
        obj["z"] = e.z;
        obj["gamma"] = std::vector<double>(dims, 1.0);
        obj["e2_sequence"] = e.e2;
        arr.push_back(obj);
    }
    std::ofstream out(path);
    out << arr.dump(2) << "\n";
}

void writeHeader(const std::string& path, const std::vector<Entry>& entries) {
    std::ofstream out(path);
    out << "#pragma once\n\n"
        << "// Bundled CBC-optimized generating vectors for unweighted (gamma = 1)\n"
        << "// Korobov lattices, N a power of two, up to 16 dimensions. Regenerate with\n"
        << "// tools/make_lattice_table; data/korobov_table.json mirrors this table.\n\n"
        << "#include <cstdint>\n#include <optional>\n#include <vector>\n\n"
        << "#include \"qmarg/point_set.hpp\"\n\n"
        << "namespace qmarg {\n\n"
        << "struct KorobovTableEntry {\n"
        << "    std::uint64_t N;\n"
        << "    std::vector<std::uint64_t> z;   // 16 components, CBC order\n"
        << "    std::vector<double> e2;         // worst-case error^2 after each coordinate\n"
        << "};\n\n"
        << "inline const std::vector<KorobovTableEntry>& korobovTable() {\n"
        << "    static const std::vector<KorobovTableEntry> table = {\n";
    out.precision(17);
    for (const auto& e : entries) {
        out << "        {" << e.N << "ull,\n         {";
        for (std::size_t j = 0; j < e.z.size(); ++j)
            out << e.z[j] << (j + 1 < e.z.size() ? "ull, " : "ull},");
        out << "\n         {";
        for (std::size_t j = 0; j < e.e2.size(); ++j) {
            out << std::scientific << e.e2[j];
            out << (j + 1 < e.e2.size() ? ", " : "}},");
        }
        out << "\n";
    }
    out << "    };\n"
        << "    return table;\n"
        << "}\n\n"
        << "/// Table lookup: the s-component prefix of the stored vector (CBC prefixes\n"
        << "/// are themselves CBC optima for the same weights).\n"
        << "inline std::optional<GeneratingVector> tableGeneratingVector(std::uint64_t N, "
           "std::size_t s) {\n"
        << "    for (const auto& entry : korobovTable())\n"
        << "        if (entry.N == N && s <= entry.z.size())\n"
        << "            return GeneratingVector(\n"
        << "                std::vector<std::uint64_t>(entry.z.begin(), entry.z.begin() + s), "
           "N);\n"
        << "    return std::nullopt;\n"
        << "}\n\n"
        << "}  // namespace qmarg\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regenerate the bundled Korobov generating-vector table"};
    int minLog2 = 8, maxLog2 = 20;
    std::size_t dims = 16;
    unsigned threads = 0;
    std::string outJson = "data/korobov_table.json";
    std::string outHeader = "include/qmarg/korobov_table.hpp";
    app.add_option("--min-log2", minLog2, "Smallest size as log2(N)");
    app.add_option("--max-log2", maxLog2, "Largest size as log2(N)");
    app.add_option("--dims", dims, "Components per vector");
    app.add_option("--threads", threads, "Worker threads (0 = all)");
    app.add_option("--out-json", outJson, "JSON table path");
    app.add_option("--out-header", outHeader, "Header table path");
    CLI11_PARSE(app, argc, argv);

    std::vector<Entry> entries;
    for (int lg = minLog2; lg <= maxLog2; ++lg) {
        const std::uint64_t N = std::uint64_t{1} << lg;
        const auto start = std::chrono::steady_clock::now();
        auto res = qmarg::cbcSearch(qmarg::WeightedSearchSpec::uniform(N, dims), threads);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("N=2^%d: e2[%zu]=%.6e  (%.1fs)\n", lg, dims - 1, res.e2Sequence.back(),
                    secs);
        std::fflush(stdout);
        entries.push_back({N, res.vector.components, res.e2Sequence});
        writeJson(outJson, entries, dims);
        writeHeader(outHeader, entries);
    }
    return 0;
}
