#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfcca/config.hpp"
#include "mfcca/series.hpp"

namespace mfcca {

struct BlockReport {
    std::string name;
    std::string status = "skipped";  // ok | failed | skipped
    std::string error;
    std::vector<std::string> outputs;  // relative to the output directory
    double seconds = 0.0;
    nlohmann::json details = nlohmann::json::object();
};

struct RunReport {
    bool ok = true;  // false iff some enabled block failed
    std::vector<BlockReport> blocks;
    nlohmann::json manifest;
    std::filesystem::path manifest_path;
};

/// Expands input globs (relative to config.base_dir, sorted) and synthesizes
/// generator inputs. Throws InputError if a glob matches nothing.
std::vector<PriceSeries> load_inputs(const RunConfig& config,
                                     std::vector<std::string>* sources = nullptr);

/// Resolved configuration as JSON, echoed into the manifest.
nlohmann::json config_to_json(const RunConfig& config);

/// ingest -> synchronize -> returns -> spectrum, tails, rho, mst blocks.
/// Invalid configurations, unreadable inputs and unknown asset references throw
/// before any block runs; failures inside a block are recorded in the report
/// and the manifest while the remaining blocks still run.
RunReport run(const RunConfig& config);

}  // namespace mfcca
