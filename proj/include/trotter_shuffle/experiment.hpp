#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "trotter_shuffle/arrays.hpp"
#include "trotter_shuffle/trotter.hpp"

namespace trotter_shuffle {

inline constexpr const char *version       = "0.1.0";
inline constexpr int         schema_version = 1;

/// Config validation failure; the message names the offending field.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { converge, tail, regime, words, evolution };
enum class SigmaMode { random, identity };

const char *to_string(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind           kind = ExperimentKind::converge;
    std::vector<std::size_t> n_list;
    Eigen::Index             d      = 2;
    std::size_t              trials = 1;
    std::uint64_t            seed   = 0;
    double                   eps    = 0.1;
    nlohmann::json           generator = nlohmann::json::object(); // {"name": ..., params}
    SigmaMode                sigma_mode = SigmaMode::random;
    BlockMode                block_mode = BlockMode::sqrt_default;
    std::filesystem::path    out_path;

    std::optional<nlohmann::json> target; // converge: extra comparison generator
    std::size_t                   path_points = 101;
    std::optional<std::size_t>    a_n;   // tail / words: fixed block size
    std::size_t                   tail_points = 12;
    std::vector<double>           p_grid; // words
    double                        s = 0.0, t = 1.0; // evolution window
    bool                          products = true; // regime: also evaluate sup_dev
    std::size_t                   threads  = 1;

    /// Throws ConfigError with a field-level message.
    static ExperimentConfig from_json(const nlohmann::json &doc);
    nlohmann::json          to_json() const;
    void                    validate() const;
};

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::string                    suffix; // file name part: <stem>.<suffix>.csv
    std::vector<std::string>       header;
    std::vector<std::vector<Cell>> rows;

    std::vector<double> column(const std::string &name) const;
};

struct SummaryRow {
    std::size_t n = 0;
    std::string metric;
    double      median = 0.0, p05 = 0.0, p95 = 0.0;
};

struct ExperimentReport {
    ExperimentConfig        config;
    Table                   records; // one row per (n, trial), sorted by (n, trial)
    std::vector<Table>      extra;   // paths / tail / tau tables
    std::vector<SummaryRow> summary;

    const Table *find_extra(const std::string &suffix) const;
};

/// Row generator named in config.generator, for cell (n, trial).
ArrayRow build_row(const ExperimentConfig &config, std::size_t n, std::size_t trial);

ExperimentReport run(const ExperimentConfig &config);

/// Main CSV at out_path, extra tables next to it, and a JSON sidecar
/// (<stem>.json) with the config echo, summary and schema.
void emit(const ExperimentReport &report, const std::filesystem::path &out_path);

void write_csv(std::ostream &os, const Table &table);

/// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

} // namespace trotter_shuffle
