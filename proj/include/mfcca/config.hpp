#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfcca/error.hpp"
#include "mfcca/fluctuation.hpp"
#include "mfcca/network.hpp"
#include "mfcca/series.hpp"
#include "mfcca/synth.hpp"
#include "mfcca/tail.hpp"

namespace mfcca {

/// One source of price series: a file glob, or an in-memory generator.
struct InputSpec {
    std::string glob;
    PriceSchema schema;
    std::optional<GeneratorSpec> synth;
    std::string synth_asset;              // asset id (prefix for correlated_pair)
    bool synth_seed_given = false;        // otherwise derived from the run seed
};

struct IndexSpec {
    bool enabled = false;
    std::string id = "INDEX";
    std::vector<std::string> members;
    IndexMode mode = IndexMode::RawSum;
};

struct SpectrumBlock {
    bool enabled = false;
    std::vector<std::string> series;  // empty: every asset
    Millis window{30LL * 86'400'000};
    Millis step{5LL * 86'400'000};
    std::vector<double> q_grid = make_q_grid(-3.0, 3.0, 0.2);
    std::vector<std::size_t> scales;   // samples; empty: log-spaced default
    std::size_t scale_count = 20;
    std::size_t fit_min = 10;
    std::size_t fit_max = 0;           // 0: window / 10
    unsigned poly_degree = 2;
    Direction direction = Direction::Forward;
    double r2_min = 0.98;
    bool write_surface = false;        // full-series F(q,s) surface per asset
};

struct TailsBlock {
    bool enabled = false;
    std::vector<std::string> series;
    Millis window{30LL * 86'400'000};
    Millis step{5LL * 86'400'000};
    double fraction = 0.01;
    TailMethod method = TailMethod::Hill;
};

struct RhoBlock {
    bool enabled = false;
    std::vector<std::pair<std::string, std::string>> pairs;  // empty: all pairs
    Millis window{10LL * 86'400'000};
    Millis step{1LL * 86'400'000};
    std::vector<double> q_set{1.0, 4.0};
    std::vector<Millis> scales{Millis{10 * 60'000}, Millis{360 * 60'000}};
    unsigned poly_degree = 2;
    Direction direction = Direction::Forward;
};

struct MstBlock {
    bool enabled = false;
    std::vector<std::string> assets;  // empty: every asset
    Millis window{7LL * 86'400'000};
    Millis step{1LL * 86'400'000};
    std::vector<double> q_set{1.0, 4.0};
    std::vector<Millis> scales{Millis{10 * 60'000}, Millis{60 * 60'000}, Millis{360 * 60'000}};
    unsigned poly_degree = 2;
    Direction direction = Direction::Forward;
    bool write_edges = true;
    MetricOptions metrics;
};

struct RunConfig {
    std::vector<InputSpec> inputs;
    Millis interval = kOneMinute;
    std::size_t max_fill = 60;
    unsigned threads = 0;  // 0: available parallelism
    std::uint64_t seed = 0;
    std::filesystem::path output = "out";
    std::filesystem::path base_dir = ".";  // input globs are relative to this
    IndexSpec index;
    SpectrumBlock spectrum;
    TailsBlock tails;
    RhoBlock rho;
    MstBlock mst;

    /// Every block enabled with its default settings.
    static RunConfig with_all_blocks();
};

/// Thrown by parse_config; what() lists every problem, one per line.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Parses the YAML run configuration. Unknown keys, wrong types and bad values
/// are all collected before throwing ConfigError. A block is enabled by being
/// present unless it says `enabled: false`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Static checks including cross-field rules (segment floor, q != 0 for
/// spectra, q > 0 for rho/mst, fit range coverage). Empty result means ok.
std::vector<std::string> validate(const RunConfig& config);

}  // namespace mfcca
