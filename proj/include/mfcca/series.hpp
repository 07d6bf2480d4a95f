#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfcca/duration.hpp"

namespace mfcca {

/// Raw price observations of one asset.
struct PriceSeries {
    std::string asset_id;
    std::vector<EpochMs> timestamps;  // strictly increasing
    std::vector<double> prices;       // strictly positive, same length
    Millis sampling_interval = kOneMinute;

    std::size_t size() const { return prices.size(); }
};

/// Normalized logarithmic returns r = (R - mean) / std, where
/// R(t) = log P(t + lag) - log P(t). Each value is stamped with the time of
/// the later price, i.e. the moment the return is realized.
struct ReturnSeries {
    std::string asset_id;
    std::vector<EpochMs> timestamps;
    std::vector<double> values;
    double raw_mean = 0.0;
    double raw_std = 1.0;  // population standard deviation
    Millis sampling_interval = kOneMinute;

    std::size_t size() const { return values.size(); }
};

/// Integrated, mean-subtracted signal X(j) = sum_{i<=j} (x_i - <x>).
struct Profile {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Assets aligned on a shared regular grid; columns[i] belongs to assets[i].
/// Assets are kept in lexicographic id order.
struct Panel {
    std::vector<std::string> assets;
    std::vector<EpochMs> grid;
    std::vector<std::vector<double>> columns;
    Millis interval = kOneMinute;

    std::size_t size() const { return assets.size(); }
    std::size_t length() const { return grid.size(); }
    /// Column index of an asset; throws InvalidArgument if absent.
    std::size_t index_of(const std::string& asset) const;
    /// Column i repackaged as a PriceSeries on the panel grid.
    PriceSeries series(std::size_t i) const;
};

/// Column names used when reading price files.
struct PriceSchema {
    std::string timestamp = "timestamp";
    std::string price = "price";
    std::string asset;  // optional; empty means one asset per file
};

/// Reads every asset of a price CSV. Rows are sorted by timestamp and
/// duplicated timestamps keep the last row. Without an asset column the asset
/// id is the file stem. Errors name the offending line.
std::vector<PriceSeries> load_price_file(const std::filesystem::path& path,
                                         const PriceSchema& schema = {});

/// Single-asset variant of load_price_file; throws if the file holds several.
PriceSeries load_prices(const std::filesystem::path& path, const PriceSchema& schema = {});

struct SyncOptions {
    Millis interval = kOneMinute;
    std::size_t max_fill = 60;  // longest tolerated forward fill, in intervals
};

/// Aligns assets on a grid spanning the common overlap [latest start,
/// earliest end] with previous-tick fill. Gaps longer than max_fill are
/// collected for every asset and reported together.
Panel synchronize(const std::vector<PriceSeries>& series, const SyncOptions& opts = {});

/// Log returns at the given lag, z-scored with the population std.
/// Throws DegenerateInput for constant prices.
ReturnSeries to_returns(const PriceSeries& series, Millis lag);

/// Per-column returns of a price panel. The grid drops its first `lag`
/// points. Constant columns become all-zero and are listed in `degenerate`.
Panel to_returns(const Panel& prices, Millis lag, std::vector<std::string>* degenerate = nullptr);

/// Same computation for the raw values of an arbitrary series (no timestamps).
ReturnSeries normalize(std::span<const double> raw_returns);

enum class IndexMode { RawSum, Rebased };

/// Equal-weight index over panel members: plain sum of prices (RawSum) or sum
/// of prices divided by each member's first price (Rebased).
PriceSeries build_index(const Panel& panel, const std::vector<std::string>& members,
                        IndexMode mode = IndexMode::RawSum, std::string index_id = "INDEX");

Profile profile(std::span<const double> values);

/// z-scores values in place (population std). Returns false if the std is 0.
bool zscore_in_place(std::span<double> values);

void write_panel_csv(std::ostream& out, const Panel& panel);
void write_prices_csv(std::ostream& out, const std::vector<PriceSeries>& series);

}  // namespace mfcca
