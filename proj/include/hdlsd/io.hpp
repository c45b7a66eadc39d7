#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "hdlsd/model.hpp"
#include "hdlsd/simulate.hpp"

namespace hdlsd {

using Json = nlohmann::json;

// ProcessModel / TaperSpec JSON documents.
//
// {
//   "family":     {"kind": "identity" | "ma" | "arma11" | "iid_rows",
//                  "order": 2,                 (ma)
//                  "q_max": 64,                (arma11, optional)
//                  "coefficients": [..]},      (iid_rows, f_1, f_2, ...)
//   "atoms":      [{"lambda": [0.2], "weight": 0.5}, ...],
//   "scaling":    [g_B per atom],              (optional)
//   "filter":     [b_0, b_1, ...],             (optional)
//   "innovation": "real_gaussian" | "complex_gaussian" | "rademacher" | "uniform",
//   "rotation":   "identity" | "random_orthogonal"
// }
Json to_json(const ProcessModel& model);
ProcessModel model_from_json(const Json& doc);

// {"kind": "geometric" | "polynomial" | "custom", "beta"|"alpha": x, "table": [..], "horizon": n}
Json to_json(const TaperSpec& taper);
TaperSpec taper_from_json(const Json& doc);

/// FNV-1a of the canonical JSON serialization.
std::uint64_t model_hash(const ProcessModel& model);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

// Binary matrix container: one ASCII header line
//   HDLSD1 <p> <n> <q> <kind> <real|complex> <seed> <model-hash-hex>\n
// followed by the entries in column-major order as little-endian float64
// (complex entries as interleaved re, im).
struct ContainerHeader {
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t q = 0;
    std::string kind;  // lag | circulant | autocov | tapered
    bool complex_valued = false;
    std::uint64_t seed = 0;
    std::uint64_t model_hash = 0;
};

void write_container(const std::filesystem::path& file, const ContainerHeader& header,
                     const DenseMatrix& entries);

struct ContainerContents {
    ContainerHeader header;
    DenseMatrix entries;
};

ContainerContents read_container(const std::filesystem::path& file);

void write_path(const std::filesystem::path& file, const PathMatrix& path);
PathMatrix read_path(const std::filesystem::path& file);

}  // namespace hdlsd
