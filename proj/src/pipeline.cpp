#include "mfcca/pipeline.hpp"

#include <glob.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

#include "mfcca/cross_correlation.hpp"
#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"
#include "mfcca/multifractal.hpp"
#include "mfcca/network.hpp"
#include "mfcca/synth.hpp"
#include "mfcca/tail.hpp"
#include "mfcca/version.hpp"

namespace mfcca {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<std::string> out;
    if (rc == 0)
        for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    globfree(&g);
    return out;
}

std::string safe_name(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return out;
}

std::string q_label(double q) {
    std::string s = csv::format_double(q);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot write");
    out << content;
}

template <class Fn>
std::string render(Fn&& fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

std::string direction_name(Direction d) {
    return d == Direction::Forward ? "forward" : "bidirectional";
}

Json durations(const std::vector<Millis>& v) {
    Json out = Json::array();
    for (Millis d : v) out.push_back(format_duration(d));
    return out;
}

ReturnSeries column_returns(const Panel& returns, std::size_t i) {
    ReturnSeries r;
    r.asset_id = returns.assets[i];
    r.timestamps = returns.grid;
    r.values = returns.columns[i];
    r.sampling_interval = returns.interval;
    return r;
}

Panel select_columns(const Panel& p, const std::vector<std::string>& ids) {
    if (ids.empty()) return p;
    Panel out;
    out.grid = p.grid;
    out.interval = p.interval;
    std::vector<std::string> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& id : sorted) {
        out.assets.push_back(id);
        out.columns.push_back(p.columns[p.index_of(id)]);
    }
    return out;
}

}  // namespace

std::vector<PriceSeries> load_inputs(const RunConfig& config, std::vector<std::string>* sources) {
    std::vector<PriceSeries> all;
    for (std::size_t i = 0; i < config.inputs.size(); ++i) {
        const InputSpec& in = config.inputs[i];
        if (in.synth) {
            GeneratorSpec g = *in.synth;
            if (!in.synth_seed_given) g.seed = derive_seed(config.seed, i);
            const auto series = generate(g);
            if (series.size() == 1) {
                all.push_back(integrate_to_prices(series[0], in.synth_asset, 0, config.interval));
            } else {
                all.push_back(integrate_to_prices(series[0], in.synth_asset + "_X", 0, config.interval));
                all.push_back(integrate_to_prices(series[1], in.synth_asset + "_Y", 0, config.interval));
            }
            if (sources) sources->push_back("synth:" + to_string(g.kind) + ":seed=" + std::to_string(g.seed));
            continue;
        }
        const fs::path pattern = fs::path(in.glob).is_absolute() ? fs::path(in.glob)
                                                                 : config.base_dir / in.glob;
        const auto files = expand_glob(pattern.string());
        if (files.empty()) throw InputError("input '" + in.glob + "' matches no files");
        for (const auto& f : files) {
            auto loaded = load_price_file(f, in.schema);
            for (auto& s : loaded) {
                s.sampling_interval = config.interval;
                all.push_back(std::move(s));
            }
            if (sources) sources->push_back(f);
        }
    }
    if (all.empty()) throw InputError("no inputs configured");
    return all;
}

Json config_to_json(const RunConfig& c) {
    Json j;
    Json inputs = Json::array();
    for (const auto& in : c.inputs) {
        Json e;
        if (in.synth) {
            e["synth"] = {{"kind", to_string(in.synth->kind)}, {"levels", in.synth->levels},
                          {"p", in.synth->p}, {"hurst", in.synth->hurst}, {"gamma", in.synth->gamma},
                          {"c", in.synth->target_c}, {"length", in.synth->length}};
            if (in.synth_seed_given) e["synth"]["seed"] = in.synth->seed;
            e["asset"] = in.synth_asset;
        } else {
            e = {{"glob", in.glob}, {"timestamp", in.schema.timestamp}, {"price", in.schema.price},
                 {"asset", in.schema.asset}};
        }
        inputs.push_back(e);
    }
    j["inputs"] = inputs;
    j["interval"] = format_duration(c.interval);
    j["max_fill"] = c.max_fill;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    j["output"] = c.output.string();
    j["index"] = {{"enabled", c.index.enabled}, {"id", c.index.id}, {"members", c.index.members},
                  {"mode", c.index.mode == IndexMode::RawSum ? "raw" : "rebased"}};
    const auto& sp = c.spectrum;
    j["spectrum"] = {{"enabled", sp.enabled}, {"series", sp.series},
                     {"window", format_duration(sp.window)}, {"step", format_duration(sp.step)},
                     {"q_grid", sp.q_grid}, {"scales", sp.scales}, {"scale_count", sp.scale_count},
                     {"fit_min", sp.fit_min}, {"fit_max", sp.fit_max},
                     {"poly_degree", sp.poly_degree}, {"direction", direction_name(sp.direction)},
                     {"r2_min", sp.r2_min}, {"surface", sp.write_surface}};
    j["tails"] = {{"enabled", c.tails.enabled}, {"series", c.tails.series},
                  {"window", format_duration(c.tails.window)}, {"step", format_duration(c.tails.step)},
                  {"fraction", c.tails.fraction}, {"method", to_string(c.tails.method)}};
    Json pairs = Json::array();
    for (const auto& [a, b] : c.rho.pairs) pairs.push_back({a, b});
    j["rho"] = {{"enabled", c.rho.enabled}, {"pairs", pairs},
                {"window", format_duration(c.rho.window)}, {"step", format_duration(c.rho.step)},
                {"q", c.rho.q_set}, {"s", durations(c.rho.scales)},
                {"poly_degree", c.rho.poly_degree}, {"direction", direction_name(c.rho.direction)}};
    j["mst"] = {{"enabled", c.mst.enabled}, {"assets", c.mst.assets},
                {"window", format_duration(c.mst.window)}, {"step", format_duration(c.mst.step)},
                {"q", c.mst.q_set}, {"s", durations(c.mst.scales)},
                {"poly_degree", c.mst.poly_degree}, {"direction", direction_name(c.mst.direction)},
                {"edges", c.mst.write_edges},
                {"path_metric", c.mst.metrics.path == PathMetric::Hops ? "hops" : "weighted"},
                {"rho_average",
                 c.mst.metrics.rho_average == RhoAverage::AllPairs ? "all_pairs" : "tree_edges"}};
    return j;
}

RunReport run(const RunConfig& config) {
    if (auto violations = validate(config); !violations.empty()) throw ConfigError(std::move(violations));
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    const fs::path out_dir = config.output;

    // Ingest and align.
    std::vector<std::string> sources;
    auto series = load_inputs(config, &sources);
    Panel prices = synchronize(series, SyncOptions{config.interval, config.max_fill});
    if (config.index.enabled) {
        PriceSeries idx = build_index(prices, config.index.members, config.index.mode, config.index.id);
        if (std::find(prices.assets.begin(), prices.assets.end(), idx.asset_id) != prices.assets.end())
            throw InvalidArgument("index id '" + idx.asset_id + "' collides with an input asset");
        const auto pos = std::lower_bound(prices.assets.begin(), prices.assets.end(), idx.asset_id);
        const auto at = pos - prices.assets.begin();
        prices.assets.insert(pos, idx.asset_id);
        prices.columns.insert(prices.columns.begin() + at, std::move(idx.prices));
    }
    std::vector<std::string> degenerate;
    const Panel returns = to_returns(prices, config.interval, &degenerate);

    // Every asset reference is checked before any block starts.
    std::vector<std::string> unknown;
    auto check = [&](const std::vector<std::string>& ids, const std::string& where) {
        for (const auto& id : ids)
            if (std::find(returns.assets.begin(), returns.assets.end(), id) == returns.assets.end())
                unknown.push_back(where + ": unknown asset '" + id + "'");
    };
    if (config.spectrum.enabled) check(config.spectrum.series, "spectrum.series");
    if (config.tails.enabled) check(config.tails.series, "tails.series");
    if (config.rho.enabled)
        for (const auto& [a, b] : config.rho.pairs) check({a, b}, "rho.pairs");
    if (config.mst.enabled) check(config.mst.assets, "mst.assets");
    if (!unknown.empty()) throw ConfigError(std::move(unknown));

    fs::create_directories(out_dir);
    const unsigned threads = config.threads;
    const auto& all_ids = returns.assets;

    RunReport report;
    auto run_block = [&](const std::string& name, bool enabled, auto&& body) {
        BlockReport br;
        br.name = name;
        if (enabled) {
            const auto start = Clock::now();
            try {
                body(br);
                br.status = "ok";
            } catch (const std::exception& e) {
                br.status = "failed";
                br.error = e.what();
                report.ok = false;
            }
            br.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        }
        report.blocks.push_back(std::move(br));
    };

    run_block("spectrum", config.spectrum.enabled, [&](BlockReport& br) {
        const auto& b = config.spectrum;
        const auto w = static_cast<std::size_t>(b.window.count() / config.interval.count());
        SpectrumOptions opts;
        opts.q_grid = b.q_grid;
        opts.s_grid = b.scales.empty() ? default_scales(w, b.scale_count) : b.scales;
        opts.fit_range = FitRange{b.fit_min, b.fit_max ? b.fit_max : w / 10};
        opts.fluctuation.direction = b.direction;
        opts.fluctuation.poly_degree = b.poly_degree;
        opts.r2_min = b.r2_min;
        for (const auto& id : b.series.empty() ? all_ids : b.series) {
            const ReturnSeries r = column_returns(returns, returns.index_of(id));
            const SpectrumTimeline tl = rolling_spectrum(r, b.window, b.step, opts, threads);
            const std::string file = "spectrum_" + safe_name(id) + ".csv";
            write_file(out_dir / file, render([&](std::ostream& o) { write_spectrum_timeline_csv(o, tl); }));
            br.outputs.push_back(file);
            Json flagged = Json::array();
            for (const auto& rec : tl.records)
                if (rec.flags) flagged.push_back({{"window_end", rec.window_end},
                                                  {"flags", spectrum_flags_to_string(rec.flags)}});
            br.details[id] = {{"windows", tl.records.size()}, {"flagged", flagged}};
            if (b.write_surface) {
                const auto scales = b.scales.empty() ? default_scales(r.size(), b.scale_count) : b.scales;
                const auto surf = fluctuation_surface(r.values, b.q_grid, scales, opts.fluctuation);
                const std::string sf = "surface_" + safe_name(id) + ".csv";
                const std::string ef = "surface_" + safe_name(id) + "_excluded.csv";
                write_file(out_dir / sf, render([&](std::ostream& o) { write_surface_csv(o, surf); }));
                write_file(out_dir / ef, render([&](std::ostream& o) { write_exclusions_csv(o, surf); }));
                br.outputs.push_back(sf);
                br.outputs.push_back(ef);
            }
        }
    });

    run_block("tails", config.tails.enabled, [&](BlockReport& br) {
        const auto& b = config.tails;
        for (const auto& id : b.series.empty() ? all_ids : b.series) {
            const ReturnSeries r = column_returns(returns, returns.index_of(id));
            const auto tl = rolling_tail(r, b.window, b.step, b.fraction, b.method, threads);
            const std::string file = "tails_" + safe_name(id) + ".csv";
            write_file(out_dir / file, render([&](std::ostream& o) { write_tail_timeline_csv(o, tl); }));
            br.outputs.push_back(file);
            Json flagged = Json::array();
            for (const auto& rec : tl)
                if (const auto f = tail_flags_to_string(rec); !f.empty())
                    flagged.push_back({{"window_end", rec.window_end}, {"flags", f}});
            br.details[id] = {{"windows", tl.size()}, {"flagged", flagged}};
        }
    });

    run_block("rho", config.rho.enabled, [&](BlockReport& br) {
        const auto& b = config.rho;
        auto pairs = b.pairs;
        if (pairs.empty())
            for (std::size_t i = 0; i < all_ids.size(); ++i)
                for (std::size_t j = i + 1; j < all_ids.size(); ++j) pairs.emplace_back(all_ids[i], all_ids[j]);
        RollingRhoOptions opts{b.q_set, b.scales, b.poly_degree, b.direction};
        for (const auto& [a, c] : pairs) {
            const auto recs = rolling_rho(column_returns(returns, returns.index_of(a)),
                                          column_returns(returns, returns.index_of(c)), b.window,
                                          b.step, opts, threads);
            const std::string file = "rho_" + safe_name(a) + "__" + safe_name(c) + ".csv";
            write_file(out_dir / file, render([&](std::ostream& o) { write_rho_timeline_csv(o, recs); }));
            br.outputs.push_back(file);
            std::size_t flagged = 0;
            for (const auto& r : recs) flagged += r.degenerate;
            br.details[a + "/" + c] = {{"records", recs.size()}, {"degenerate", flagged}};
        }
    });

    run_block("mst", config.mst.enabled, [&](BlockReport& br) {
        const auto& b = config.mst;
        const Panel sub = select_columns(returns, b.assets);
        RollingMstOptions opts;
        opts.q_set = b.q_set;
        opts.scales = b.scales;
        opts.poly_degree = b.poly_degree;
        opts.direction = b.direction;
        opts.metrics = b.metrics;
        opts.keep_edges = b.write_edges;
        const auto recs = rolling_mst(sub, b.window, b.step, opts, threads);
        write_file(out_dir / "mst_metrics.csv",
                   render([&](std::ostream& o) { write_mst_metrics_csv(o, recs); }));
        br.outputs.push_back("mst_metrics.csv");
        std::size_t flagged = 0;
        for (const auto& r : recs) {
            flagged += r.degenerate;
            if (!b.write_edges || r.degenerate) continue;
            const fs::path dir = fs::path("mst_edges") /
                                 ("q" + q_label(r.q) + "_s" + std::to_string(r.s));
            const std::string stem = std::to_string(r.window_end);
            write_file(out_dir / dir / (stem + ".csv"),
                       render([&](std::ostream& o) { write_edge_list_csv(o, sub.assets, r.edges); }));
            write_file(out_dir / dir / (stem + ".net"),
                       render([&](std::ostream& o) { write_pajek(o, sub.assets, r.edges); }));
        }
        if (b.write_edges) br.outputs.push_back("mst_edges/");
        br.details = {{"assets", sub.assets}, {"records", recs.size()}, {"degenerate", flagged}};
    });

    Json blocks = Json::object();
    for (const auto& br : report.blocks)
        blocks[br.name] = {{"status", br.status}, {"error", br.error}, {"outputs", br.outputs},
                           {"seconds", br.seconds}, {"details", br.details}};
    report.manifest = {
        {"tool", "mfcca"},
        {"version", kVersion},
        {"config", config_to_json(config)},
        {"sources", sources},
        {"panel", {{"assets", prices.assets}, {"length", prices.length()},
                   {"start", prices.grid.front()}, {"end", prices.grid.back()},
                   {"degenerate_assets", degenerate}}},
        {"blocks", blocks},
        {"ok", report.ok},
        {"timings", {{"total_seconds",
                      std::chrono::duration<double>(Clock::now() - t0).count()}}},
    };
    report.manifest_path = out_dir / "manifest.json";
    write_file(report.manifest_path, report.manifest.dump(2) + "\n");
    return report;
}

}  // namespace mfcca
