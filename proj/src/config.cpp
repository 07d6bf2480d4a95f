#include "mfcca/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mfcca/csv.hpp"
#include "mfcca/multifractal.hpp"

namespace mfcca {
namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out = "invalid configuration:";
    for (const auto& l : lines) out += "\n  " + l;
    return out;
}

// Walks a YAML tree, collecting every problem instead of stopping at the first.
class Walker {
public:
    explicit Walker(std::vector<std::string>& problems) : problems_(problems) {}

    void fail(const std::string& where, const std::string& what) {
        problems_.push_back(where + ": " + what);
    }

    bool is_map(const YAML::Node& n, const std::string& where) {
        if (n.IsMap()) return true;
        fail(where, "expected a table");
        return false;
    }

    void check_keys(const YAML::Node& n, const std::string& where,
                    std::initializer_list<const char*> allowed) {
        for (const auto& kv : n) {
            const std::string key = kv.first.Scalar();
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* a) { return key == a; });
            if (!known) fail(where.empty() ? key : where + "." + key, "unknown key");
        }
    }

    template <class T>
    void scalar(const YAML::Node& map, const char* key, const std::string& where, T& out) {
        const YAML::Node n = map[key];
        if (!n) return;
        try {
            if (!n.IsScalar()) throw YAML::Exception(YAML::Mark::null_mark(), "not a scalar");
            if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
                const std::string s = n.Scalar();
                if (!s.empty() && s.front() == '-') throw YAML::Exception(YAML::Mark::null_mark(), "negative");
            }
            out = n.as<T>();
            if constexpr (std::is_floating_point_v<T>) {
                if (!std::isfinite(out)) throw YAML::Exception(YAML::Mark::null_mark(), "not finite");
            }
        } catch (const YAML::Exception&) {
            fail(path(where, key), "expected " + type_name<T>());
        }
    }

    void duration(const YAML::Node& map, const char* key, const std::string& where, Millis& out) {
        const YAML::Node n = map[key];
        if (!n) return;
        if (!n.IsScalar()) return fail(path(where, key), "expected a duration such as 30d or 10min");
        try {
            out = parse_duration(n.Scalar());
        } catch (const Error& e) {
            fail(path(where, key), e.what());
        }
    }

    // Duration strings, or bare integers meaning a number of samples.
    void scales(const YAML::Node& map, const char* key, const std::string& where, Millis interval,
                std::vector<Millis>& out) {
        const YAML::Node n = map[key];
        if (!n) return;
        if (!n.IsSequence()) return fail(path(where, key), "expected a list of scales");
        std::vector<Millis> v;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string item = path(where, key) + "[" + std::to_string(i) + "]";
            if (!n[i].IsScalar()) {
                fail(item, "expected a scale");
                continue;
            }
            const std::string s = n[i].Scalar();
            try {
                if (!s.empty() && std::all_of(s.begin(), s.end(), ::isdigit))
                    v.push_back(interval * std::stoll(s));
                else
                    v.push_back(parse_duration(s));
            } catch (const std::exception& e) {
                fail(item, e.what());
            }
        }
        out = std::move(v);
    }

    template <class T>
    void list(const YAML::Node& map, const char* key, const std::string& where, std::vector<T>& out) {
        const YAML::Node n = map[key];
        if (!n) return;
        if (!n.IsSequence()) return fail(path(where, key), "expected a list");
        std::vector<T> v;
        for (std::size_t i = 0; i < n.size(); ++i) {
            try {
                if (!n[i].IsScalar()) throw YAML::Exception(YAML::Mark::null_mark(), "not a scalar");
                v.push_back(n[i].as<T>());
            } catch (const YAML::Exception&) {
                fail(path(where, key) + "[" + std::to_string(i) + "]", "expected " + type_name<T>());
            }
        }
        out = std::move(v);
    }

    template <class E>
    void choice(const YAML::Node& map, const char* key, const std::string& where,
                std::initializer_list<std::pair<const char*, E>> options, E& out) {
        const YAML::Node n = map[key];
        if (!n) return;
        const std::string s = n.IsScalar() ? n.Scalar() : "";
        for (const auto& [name, value] : options)
            if (s == name) {
                out = value;
                return;
            }
        std::string names;
        for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + std::string(name);
        fail(path(where, key), "expected one of " + names);
    }

    static std::string path(const std::string& where, const char* key) {
        return where.empty() ? std::string(key) : where + "." + key;
    }

private:
    template <class T>
    static std::string type_name() {
        if constexpr (std::is_same_v<T, bool>) return "true or false";
        else if constexpr (std::is_floating_point_v<T>) return "a number";
        else if constexpr (std::is_integral_v<T>) return "a non-negative integer";
        else return "a string";
    }

    std::vector<std::string>& problems_;
};

bool block_enabled(Walker& w, const YAML::Node& n, const std::string& where) {
    bool enabled = true;
    w.scalar(n, "enabled", where, enabled);
    return enabled;
}

void parse_input(Walker& w, const YAML::Node& n, const std::string& where, InputSpec& in) {
    if (!w.is_map(n, where)) return;
    w.check_keys(n, where, {"glob", "timestamp", "price", "asset", "synth"});
    w.scalar(n, "glob", where, in.glob);
    w.scalar(n, "timestamp", where, in.schema.timestamp);
    w.scalar(n, "price", where, in.schema.price);
    const YAML::Node synth = n["synth"];
    if (synth) {
        const std::string sw = where + ".synth";
        if (!w.is_map(synth, sw)) return;
        w.check_keys(synth, sw, {"kind", "levels", "p", "hurst", "gamma", "c", "length", "seed"});
        GeneratorSpec g;
        std::string kind;
        w.scalar(synth, "kind", sw, kind);
        try {
            g.kind = parse_generator_kind(kind);
        } catch (const Error& e) {
            w.fail(sw + ".kind", e.what());
        }
        w.scalar(synth, "levels", sw, g.levels);
        w.scalar(synth, "p", sw, g.p);
        w.scalar(synth, "hurst", sw, g.hurst);
        w.scalar(synth, "gamma", sw, g.gamma);
        w.scalar(synth, "c", sw, g.target_c);
        w.scalar(synth, "length", sw, g.length);
        if (synth["seed"]) {
            w.scalar(synth, "seed", sw, g.seed);
            in.synth_seed_given = true;
        }
        in.synth = g;
        w.scalar(n, "asset", where, in.synth_asset);
        if (in.synth_asset.empty()) w.fail(where + ".asset", "synthetic inputs need an asset id");
        if (!in.glob.empty()) w.fail(where, "give either glob or synth, not both");
    } else {
        w.scalar(n, "asset", where, in.schema.asset);
        if (in.glob.empty()) w.fail(where + ".glob", "missing");
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_lines(problems)), problems_(std::move(problems)) {}

RunConfig RunConfig::with_all_blocks() {
    RunConfig c;
    c.spectrum.enabled = c.tails.enabled = c.rho.enabled = c.mst.enabled = true;
    return c;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    std::vector<std::string> problems;
    Walker w(problems);
    RunConfig cfg;
    cfg.base_dir = base_dir;

    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError({std::string("syntax error: ") + e.what()});
    }
    if (root.IsNull()) return cfg;
    if (!root.IsMap()) throw ConfigError({"top level: expected a table"});

    try {
        w.check_keys(root, "", {"inputs", "interval", "max_fill", "threads", "seed", "output",
                                "index", "spectrum", "tails", "rho", "mst"});
        w.duration(root, "interval", "", cfg.interval);
        w.scalar(root, "max_fill", "", cfg.max_fill);
        w.scalar(root, "threads", "", cfg.threads);
        w.scalar(root, "seed", "", cfg.seed);
        std::string output = cfg.output.string();
        w.scalar(root, "output", "", output);
        cfg.output = output;

        if (const YAML::Node inputs = root["inputs"]) {
            if (!inputs.IsSequence()) {
                w.fail("inputs", "expected a list");
            } else {
                for (std::size_t i = 0; i < inputs.size(); ++i) {
                    InputSpec in;
                    parse_input(w, inputs[i], "inputs[" + std::to_string(i) + "]", in);
                    cfg.inputs.push_back(std::move(in));
                }
            }
        }

        if (const YAML::Node n = root["index"]; n && w.is_map(n, "index")) {
            w.check_keys(n, "index", {"enabled", "id", "members", "mode"});
            cfg.index.enabled = block_enabled(w, n, "index");
            w.scalar(n, "id", "index", cfg.index.id);
            w.list(n, "members", "index", cfg.index.members);
            w.choice(n, "mode", "index", {{"raw", IndexMode::RawSum}, {"rebased", IndexMode::Rebased}},
                     cfg.index.mode);
        }

        const std::initializer_list<std::pair<const char*, Direction>> directions{
            {"forward", Direction::Forward}, {"bidirectional", Direction::Bidirectional}};

        if (const YAML::Node n = root["spectrum"]; n && w.is_map(n, "spectrum")) {
            auto& b = cfg.spectrum;
            w.check_keys(n, "spectrum", {"enabled", "series", "window", "step", "q_grid", "q_min",
                                         "q_max", "q_step", "scales", "scale_count", "fit_min",
                                         "fit_max", "poly_degree", "direction", "r2_min", "surface"});
            b.enabled = block_enabled(w, n, "spectrum");
            w.list(n, "series", "spectrum", b.series);
            w.duration(n, "window", "spectrum", b.window);
            w.duration(n, "step", "spectrum", b.step);
            if (n["q_grid"]) {
                if (n["q_min"] || n["q_max"] || n["q_step"])
                    w.fail("spectrum.q_grid", "give either q_grid or q_min/q_max/q_step");
                w.list(n, "q_grid", "spectrum", b.q_grid);
            } else if (n["q_min"] || n["q_max"] || n["q_step"]) {
                double lo = -3.0, hi = 3.0, step = 0.2;
                w.scalar(n, "q_min", "spectrum", lo);
                w.scalar(n, "q_max", "spectrum", hi);
                w.scalar(n, "q_step", "spectrum", step);
                try {
                    b.q_grid = make_q_grid(lo, hi, step);
                } catch (const Error& e) {
                    w.fail("spectrum.q_min", e.what());
                }
            }
            w.list(n, "scales", "spectrum", b.scales);
            w.scalar(n, "scale_count", "spectrum", b.scale_count);
            w.scalar(n, "fit_min", "spectrum", b.fit_min);
            w.scalar(n, "fit_max", "spectrum", b.fit_max);
            w.scalar(n, "poly_degree", "spectrum", b.poly_degree);
            w.choice(n, "direction", "spectrum", directions, b.direction);
            w.scalar(n, "r2_min", "spectrum", b.r2_min);
            w.scalar(n, "surface", "spectrum", b.write_surface);
        }

        if (const YAML::Node n = root["tails"]; n && w.is_map(n, "tails")) {
            auto& b = cfg.tails;
            w.check_keys(n, "tails", {"enabled", "series", "window", "step", "fraction", "method"});
            b.enabled = block_enabled(w, n, "tails");
            w.list(n, "series", "tails", b.series);
            w.duration(n, "window", "tails", b.window);
            w.duration(n, "step", "tails", b.step);
            w.scalar(n, "fraction", "tails", b.fraction);
            w.choice(n, "method", "tails",
                     {{"hill", TailMethod::Hill}, {"ls_loglog", TailMethod::LsLogLog}}, b.method);
        }

        if (const YAML::Node n = root["rho"]; n && w.is_map(n, "rho")) {
            auto& b = cfg.rho;
            w.check_keys(n, "rho", {"enabled", "pairs", "window", "step", "q", "s", "poly_degree",
                                    "direction"});
            b.enabled = block_enabled(w, n, "rho");
            if (const YAML::Node pairs = n["pairs"]) {
                if (!pairs.IsSequence()) w.fail("rho.pairs", "expected a list of [A, B] pairs");
                for (std::size_t i = 0; pairs.IsSequence() && i < pairs.size(); ++i) {
                    const YAML::Node p = pairs[i];
                    if (!p.IsSequence() || p.size() != 2 || !p[0].IsScalar() || !p[1].IsScalar()) {
                        w.fail("rho.pairs[" + std::to_string(i) + "]", "expected [A, B]");
                        continue;
                    }
                    b.pairs.emplace_back(p[0].Scalar(), p[1].Scalar());
                }
            }
            w.duration(n, "window", "rho", b.window);
            w.duration(n, "step", "rho", b.step);
            w.list(n, "q", "rho", b.q_set);
            w.scales(n, "s", "rho", cfg.interval, b.scales);
            w.scalar(n, "poly_degree", "rho", b.poly_degree);
            w.choice(n, "direction", "rho", directions, b.direction);
        }

        if (const YAML::Node n = root["mst"]; n && w.is_map(n, "mst")) {
            auto& b = cfg.mst;
            w.check_keys(n, "mst", {"enabled", "assets", "window", "step", "q", "s", "poly_degree",
                                    "direction", "edges", "path_metric", "rho_average"});
            b.enabled = block_enabled(w, n, "mst");
            w.list(n, "assets", "mst", b.assets);
            w.duration(n, "window", "mst", b.window);
            w.duration(n, "step", "mst", b.step);
            w.list(n, "q", "mst", b.q_set);
            w.scales(n, "s", "mst", cfg.interval, b.scales);
            w.scalar(n, "poly_degree", "mst", b.poly_degree);
            w.choice(n, "direction", "mst", directions, b.direction);
            w.scalar(n, "edges", "mst", b.write_edges);
            w.choice(n, "path_metric", "mst",
                     {{"hops", PathMetric::Hops}, {"weighted", PathMetric::Weighted}},
                     b.metrics.path);
            w.choice(n, "rho_average", "mst",
                     {{"all_pairs", RhoAverage::AllPairs}, {"tree_edges", RhoAverage::TreeEdges}},
                     b.metrics.rho_average);
        }
    } catch (const YAML::Exception& e) {
        problems.push_back(std::string("malformed configuration: ") + e.what());
    }

    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open configuration file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

namespace {

void check_window(std::vector<std::string>& v, const std::string& block, Millis window, Millis step,
                  Millis interval) {
    for (const auto& [name, d] : {std::pair{"window", window}, std::pair{"step", step}}) {
        if (d.count() <= 0 || d.count() % interval.count() != 0)
            v.push_back(block + "." + name + ": " + format_duration(d) +
                        " is not a positive multiple of the sampling interval " +
                        format_duration(interval));
    }
}

void check_rolling_block(std::vector<std::string>& v, const std::string& block, Millis window,
                         const std::vector<double>& q_set, const std::vector<Millis>& scales,
                         unsigned poly_degree, Millis interval) {
    if (q_set.empty()) v.push_back(block + ".q: empty");
    for (std::size_t i = 0; i < q_set.size(); ++i)
        if (!(q_set[i] > 0.0))
            v.push_back(block + ".q[" + std::to_string(i) + "]: q = " + csv::format_double(q_set[i]) +
                        " must be > 0 for the cross-correlation coefficient");
    if (scales.empty()) v.push_back(block + ".s: empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const std::string where = block + ".s[" + std::to_string(i) + "]";
        const Millis s = scales[i];
        if (s.count() <= 0 || s.count() % interval.count() != 0) {
            v.push_back(where + ": " + format_duration(s) +
                        " is not a positive multiple of the sampling interval");
            continue;
        }
        const auto samples = static_cast<std::size_t>(s.count() / interval.count());
        if (samples < static_cast<std::size_t>(poly_degree) + 2)
            v.push_back(where + ": " + std::to_string(samples) +
                        " samples are too few for a degree-" + std::to_string(poly_degree) + " fit");
        if (window.count() > 0 && window.count() % interval.count() == 0) {
            const auto w = static_cast<std::size_t>(window.count() / interval.count());
            const std::size_t segments = w / samples;
            if (segments < kMinSegments)
                v.push_back(where + ": scale " + format_duration(s) + " gives only " +
                            std::to_string(segments) + " segments in a " + format_duration(window) +
                            " window (< " + std::to_string(kMinSegments) + ")");
        }
    }
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> v;
    if (c.interval.count() <= 0) {
        v.push_back("interval: must be positive");
        return v;
    }
    for (std::size_t i = 0; i < c.inputs.size(); ++i) {
        const auto& in = c.inputs[i];
        if (!in.synth) continue;
        try {
            in.synth->validate();
        } catch (const Error& e) {
            v.push_back("inputs[" + std::to_string(i) + "].synth: " + e.what());
        }
    }
    if (c.index.enabled && c.index.members.empty()) v.push_back("index.members: empty");

    if (c.spectrum.enabled) {
        const auto& b = c.spectrum;
        check_window(v, "spectrum", b.window, b.step, c.interval);
        if (std::find(b.q_grid.begin(), b.q_grid.end(), 0.0) != b.q_grid.end())
            v.push_back("spectrum.q_grid: contains 0, but the fluctuation function requires q != 0");
        if (b.q_grid.size() < 5) v.push_back("spectrum.q_grid: need at least 5 q values");
        if (!std::is_sorted(b.q_grid.begin(), b.q_grid.end()) ||
            std::adjacent_find(b.q_grid.begin(), b.q_grid.end()) != b.q_grid.end())
            v.push_back("spectrum.q_grid: must be strictly increasing");
        if (!(b.r2_min >= 0.0 && b.r2_min <= 1.0)) v.push_back("spectrum.r2_min: must be in [0, 1]");
        if (b.window.count() > 0 && b.window.count() % c.interval.count() == 0) {
            const auto w = static_cast<std::size_t>(b.window.count() / c.interval.count());
            std::vector<std::size_t> scales = b.scales;
            if (scales.empty()) {
                try {
                    scales = default_scales(w, std::max<std::size_t>(b.scale_count, 2));
                } catch (const Error&) {
                    v.push_back("spectrum.window: " + format_duration(b.window) +
                                " is too short for the default scale grid");
                }
            }
            for (std::size_t s : scales) {
                if (s < b.poly_degree + 2u)
                    v.push_back("spectrum.scales: " + std::to_string(s) +
                                " is too short for a degree-" + std::to_string(b.poly_degree) + " fit");
                if (s > w / 4)
                    v.push_back("spectrum.scales: " + std::to_string(s) +
                                " leaves fewer than 4 segments in the window");
            }
            const std::size_t fit_max = b.fit_max ? b.fit_max : w / 10;
            const auto in_range = std::count_if(scales.begin(), scales.end(), [&](std::size_t s) {
                return s >= b.fit_min && s <= fit_max;
            });
            if (!scales.empty() && in_range < 4)
                v.push_back("spectrum.fit_min/fit_max: only " + std::to_string(in_range) +
                            " scales inside the fit range (need 4)");
        }
    }
    if (c.tails.enabled) {
        check_window(v, "tails", c.tails.window, c.tails.step, c.interval);
        if (!(c.tails.fraction > 0.0 && c.tails.fraction < 1.0))
            v.push_back("tails.fraction: must be in (0, 1)");
    }
    if (c.rho.enabled) {
        check_window(v, "rho", c.rho.window, c.rho.step, c.interval);
        check_rolling_block(v, "rho", c.rho.window, c.rho.q_set, c.rho.scales, c.rho.poly_degree,
                            c.interval);
        for (const auto& [a, b] : c.rho.pairs)
            if (a == b) v.push_back("rho.pairs: pair [" + a + ", " + b + "] repeats one asset");
    }
    if (c.mst.enabled) {
        check_window(v, "mst", c.mst.window, c.mst.step, c.interval);
        check_rolling_block(v, "mst", c.mst.window, c.mst.q_set, c.mst.scales, c.mst.poly_degree,
                            c.interval);
        if (c.mst.assets.size() == 1) v.push_back("mst.assets: need at least 2 assets");
    }
    return v;
}

}  // namespace mfcca
