#include "mfcca/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"

namespace mfcca {
namespace {

// Neumaier-compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) carry += (sum - t) + v;
        else carry += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

// Shifted by the first value, so a constant input has an exact mean.
double mean_of(std::span<const double> v) {
    const double anchor = v.front();
    CompensatedSum s;
    for (double x : v) s.add(x - anchor);
    return anchor + s.value() / static_cast<double>(v.size());
}

double population_std(std::span<const double> v, double mean) {
    CompensatedSum s;
    for (double x : v) s.add((x - mean) * (x - mean));
    return std::sqrt(s.value() / static_cast<double>(v.size()));
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::filesystem::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw InputError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

struct Row {
    EpochMs t;
    double price;
};

}  // namespace

std::size_t Panel::index_of(const std::string& asset) const {
    const auto it = std::find(assets.begin(), assets.end(), asset);
    if (it == assets.end()) throw InvalidArgument("unknown asset '" + asset + "'");
    return static_cast<std::size_t>(it - assets.begin());
}

PriceSeries Panel::series(std::size_t i) const {
    return PriceSeries{assets.at(i), grid, columns.at(i), interval};
}

std::vector<PriceSeries> load_price_file(const std::filesystem::path& path,
                                         const PriceSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    csv::Reader reader(in);
    csv::Record rec;
    if (!reader.next(rec)) throw InputError(path.string() + ": empty file");
    const auto header = rec.fields;
    const std::size_t ts_col = find_column(header, schema.timestamp, path);
    const std::size_t px_col = find_column(header, schema.price, path);
    const bool has_asset = !schema.asset.empty();
    const std::size_t asset_col = has_asset ? find_column(header, schema.asset, path) : 0;
    const std::size_t needed = std::max({ts_col, px_col, asset_col}) + 1;

    std::map<std::string, std::vector<Row>> rows;
    const std::string default_id = path.stem().string();
    while (reader.next(rec)) {
        if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;  // blank line
        const std::string where = path.string() + ": line " + std::to_string(rec.line);
        if (rec.fields.size() < needed) throw InputError(where + ": too few fields");
        Row row{};
        if (!parse_timestamp(rec.fields[ts_col], row.t))
            throw InputError(where + ": unparseable timestamp '" + rec.fields[ts_col] + "'");
        const std::string& px = rec.fields[px_col];
        const char* end = px.data() + px.size();
        auto [ptr, ec] = std::from_chars(px.data(), end, row.price);
        if (ec != std::errc{} || ptr != end || !std::isfinite(row.price))
            throw InputError(where + ": unparseable price '" + px + "'");
        if (row.price <= 0.0)
            throw InputError(where + ": non-positive price " + px);
        rows[has_asset ? rec.fields[asset_col] : default_id].push_back(row);
    }

    std::vector<PriceSeries> out;
    for (auto& [id, list] : rows) {
        std::stable_sort(list.begin(), list.end(),
                         [](const Row& a, const Row& b) { return a.t < b.t; });
        PriceSeries s;
        s.asset_id = id;
        for (const Row& r : list) {
            if (!s.timestamps.empty() && s.timestamps.back() == r.t) {
                s.prices.back() = r.price;  // last observation wins
            } else {
                s.timestamps.push_back(r.t);
                s.prices.push_back(r.price);
            }
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) throw InputError(path.string() + ": no data rows");
    return out;
}

PriceSeries load_prices(const std::filesystem::path& path, const PriceSchema& schema) {
    auto all = load_price_file(path, schema);
    if (all.size() != 1)
        throw InputError(path.string() + ": expected one asset, found " +
                         std::to_string(all.size()));
    return std::move(all.front());
}

Panel synchronize(const std::vector<PriceSeries>& series, const SyncOptions& opts) {
    if (series.empty()) throw InvalidArgument("synchronize: no series given");
    if (opts.interval.count() <= 0) throw InvalidArgument("synchronize: interval must be > 0");

    std::vector<const PriceSeries*> order;
    for (const auto& s : series) {
        if (s.timestamps.empty() || s.timestamps.size() != s.prices.size())
            throw InvalidArgument("synchronize: asset '" + s.asset_id + "' is empty or ragged");
        order.push_back(&s);
    }
    std::sort(order.begin(), order.end(),
              [](const PriceSeries* a, const PriceSeries* b) { return a->asset_id < b->asset_id; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (order[i]->asset_id == order[i - 1]->asset_id)
            throw InvalidArgument("synchronize: duplicate asset '" + order[i]->asset_id + "'");

    EpochMs start = order.front()->timestamps.front();
    EpochMs stop = order.front()->timestamps.back();
    for (const auto* s : order) {
        start = std::max(start, s->timestamps.front());
        stop = std::min(stop, s->timestamps.back());
    }
    if (start > stop) throw InvalidArgument("synchronize: assets have no common time window");

    Panel panel;
    panel.interval = opts.interval;
    const EpochMs step = opts.interval.count();
    for (EpochMs t = start; t <= stop; t += step) panel.grid.push_back(t);

    const EpochMs max_stale = static_cast<EpochMs>(opts.max_fill) * step;
    std::string problems;
    for (const auto* s : order) {
        std::vector<double> column;
        column.reserve(panel.grid.size());
        std::size_t j = 0;
        std::size_t reported_hole = static_cast<std::size_t>(-1);
        for (EpochMs g : panel.grid) {
            while (j + 1 < s->timestamps.size() && s->timestamps[j + 1] <= g) ++j;
            if (s->timestamps[j] > g) {
                problems += "\n  " + s->asset_id + ": no observation at or before grid start";
                break;
            }
            if (g - s->timestamps[j] > max_stale && reported_hole != j) {
                reported_hole = j;
                const EpochMs hole_end =
                    j + 1 < s->timestamps.size() ? s->timestamps[j + 1] : s->timestamps[j];
                problems += "\n  " + s->asset_id + ": gap from " +
                            std::to_string(s->timestamps[j]) + " to " + std::to_string(hole_end) +
                            " exceeds max_fill of " + std::to_string(opts.max_fill) +
                            " intervals";
            }
            column.push_back(s->prices[j]);
        }
        panel.assets.push_back(s->asset_id);
        panel.columns.push_back(std::move(column));
    }
    if (!problems.empty()) throw InputError("synchronize failed:" + problems);
    return panel;
}

ReturnSeries normalize(std::span<const double> raw) {
    if (raw.size() < 2) throw InvalidArgument("normalize: need at least 2 values");
    ReturnSeries out;
    out.raw_mean = mean_of(raw);
    out.raw_std = population_std(raw, out.raw_mean);
    if (!(out.raw_std > 0.0)) throw DegenerateInput("returns have zero variance (constant prices)");
    out.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out.values[i] = (raw[i] - out.raw_mean) / out.raw_std;
    return out;
}

ReturnSeries to_returns(const PriceSeries& series, Millis lag) {
    const std::size_t n = series.size();
    if (n < 3) throw InvalidArgument("to_returns: series '" + series.asset_id + "' has < 3 points");
    const std::size_t k = to_samples(lag, series.sampling_interval, "return lag");
    if (k >= n) throw InvalidArgument("to_returns: lag exceeds series length");

    std::vector<double> raw(n - k);
    for (std::size_t i = 0; i + k < n; ++i)
        raw[i] = std::log(series.prices[i + k]) - std::log(series.prices[i]);
    ReturnSeries out;
    try {
        out = normalize(raw);
    } catch (const DegenerateInput&) {
        throw DegenerateInput("to_returns: asset '" + series.asset_id +
                              "' has constant prices (zero return variance)");
    }
    out.asset_id = series.asset_id;
    out.sampling_interval = series.sampling_interval;
    if (series.timestamps.size() == n)
        out.timestamps.assign(series.timestamps.begin() + static_cast<std::ptrdiff_t>(k),
                              series.timestamps.end());
    return out;
}

Panel to_returns(const Panel& prices, Millis lag, std::vector<std::string>* degenerate) {
    const std::size_t k = to_samples(lag, prices.interval, "return lag");
    if (prices.length() < k + 2) throw InvalidArgument("to_returns: panel too short for lag");
    Panel out;
    out.assets = prices.assets;
    out.interval = prices.interval;
    out.grid.assign(prices.grid.begin() + static_cast<std::ptrdiff_t>(k), prices.grid.end());
    for (std::size_t c = 0; c < prices.size(); ++c) {
        try {
            out.columns.push_back(to_returns(prices.series(c), lag).values);
        } catch (const DegenerateInput&) {
            out.columns.emplace_back(out.grid.size(), 0.0);
            if (degenerate) degenerate->push_back(prices.assets[c]);
        }
    }
    return out;
}

PriceSeries build_index(const Panel& panel, const std::vector<std::string>& members,
                        IndexMode mode, std::string index_id) {
    if (members.empty()) throw InvalidArgument("build_index: member list is empty");
    std::vector<std::size_t> cols;
    for (const auto& m : members) cols.push_back(panel.index_of(m));

    PriceSeries out;
    out.asset_id = std::move(index_id);
    out.timestamps = panel.grid;
    out.sampling_interval = panel.interval;
    out.prices.assign(panel.length(), 0.0);
    for (std::size_t c : cols) {
        const auto& col = panel.columns[c];
        const double scale = mode == IndexMode::Rebased ? col.front() : 1.0;
        for (std::size_t i = 0; i < col.size(); ++i) out.prices[i] += col[i] / scale;
    }
    return out;
}

Profile profile(std::span<const double> values) {
    if (values.size() < 2) throw InvalidArgument("profile: need at least 2 values");
    const double mean = mean_of(values);
    Profile p;
    p.values.resize(values.size());
    CompensatedSum run;
    for (std::size_t i = 0; i < values.size(); ++i) {
        run.add(values[i] - mean);
        p.values[i] = run.value();
    }
    return p;
}

bool zscore_in_place(std::span<double> values) {
    if (values.size() < 2) return false;
    const double mean = mean_of(values);
    const double sd = population_std(values, mean);
    if (!(sd > 0.0)) return false;
    for (double& v : values) v = (v - mean) / sd;
    return true;
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
    std::vector<std::string> row{"timestamp"};
    row.insert(row.end(), panel.assets.begin(), panel.assets.end());
    csv::write_row(out, row);
    for (std::size_t i = 0; i < panel.length(); ++i) {
        row.assign(1, std::to_string(panel.grid[i]));
        for (const auto& col : panel.columns) row.push_back(csv::format_double(col[i]));
        csv::write_row(out, row);
    }
}

void write_prices_csv(std::ostream& out, const std::vector<PriceSeries>& series) {
    csv::write_row(out, {"timestamp", "price", "asset"});
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.size(); ++i)
            csv::write_row(out, {std::to_string(s.timestamps[i]),
                                 csv::format_double(s.prices[i]), s.asset_id});
}

}  // namespace mfcca
