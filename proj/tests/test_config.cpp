#include <algorithm>
#include <random>

#include "doctest.h"
#include "mfcca/config.hpp"
#include "mfcca/error.hpp"
#include "support.hpp"

using namespace mfcca;

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& text) {
    return std::any_of(problems.begin(), problems.end(),
                       [&](const std::string& p) { return p.find(text) != std::string::npos; });
}

std::vector<std::string> parse_problems(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

}  // namespace

TEST_CASE("defaults follow the analysis conventions") {
    const RunConfig c = RunConfig::with_all_blocks();
    CHECK(c.interval == kOneMinute);
    CHECK(c.spectrum.window == parse_duration("30d"));
    CHECK(c.spectrum.step == parse_duration("5d"));
    CHECK(c.spectrum.q_grid.front() == -3.0);
    CHECK(c.spectrum.q_grid.back() == 3.0);
    CHECK(c.rho.window == parse_duration("10d"));
    CHECK(c.rho.step == parse_duration("1d"));
    CHECK(c.rho.q_set == std::vector<double>{1.0, 4.0});
    CHECK(c.rho.scales == std::vector<Millis>{parse_duration("10min"), parse_duration("360min")});
    CHECK(c.mst.window == parse_duration("7d"));
    CHECK(c.mst.scales.size() == 3);
    CHECK(c.tails.fraction == 0.01);
    CHECK(c.index.mode == IndexMode::RawSum);
    CHECK(c.spectrum.direction == Direction::Forward);
    CHECK(c.mst.metrics.path == PathMetric::Hops);
    CHECK(c.mst.metrics.rho_average == RhoAverage::AllPairs);
}

TEST_CASE("fully default configurations validate") {
    CHECK(validate(RunConfig{}).empty());
    CHECK(validate(RunConfig::with_all_blocks()).empty());
    CHECK(validate(parse_config("spectrum: {}\ntails: {}\nrho: {}\nmst: {}\n")).empty());
}

TEST_CASE("a full configuration parses") {
    const RunConfig c = parse_config(R"(
interval: 1min
max_fill: 30
threads: 4
seed: 99
output: results
inputs:
  - glob: "data/*.csv"
    timestamp: time
    price: close
  - synth: {kind: cascade, levels: 14, p: 0.75, seed: 5}
    asset: CAS
index: {members: [A, B], mode: rebased}
spectrum:
  series: [CAS]
  window: 10d
  step: 2d
  q_min: -2
  q_max: 2
  q_step: 0.5
  fit_max: 500
  direction: bidirectional
  surface: true
tails: {window: 10d, step: 1d, fraction: 0.02, method: ls_loglog}
rho:
  pairs: [[A, B], [A, CAS]]
  s: [10min, 60]
  q: [2]
mst:
  enabled: false
  edges: false
  path_metric: weighted
)", "/cfg");
    CHECK(c.max_fill == 30);
    CHECK(c.threads == 4);
    CHECK(c.seed == 99);
    CHECK(c.output == "results");
    CHECK(c.base_dir == "/cfg");
    REQUIRE(c.inputs.size() == 2);
    CHECK(c.inputs[0].glob == "data/*.csv");
    CHECK(c.inputs[0].schema.price == "close");
    REQUIRE(c.inputs[1].synth);
    CHECK(c.inputs[1].synth->levels == 14);
    CHECK(c.inputs[1].synth_seed_given);
    CHECK(c.index.enabled);
    CHECK(c.index.mode == IndexMode::Rebased);
    CHECK(c.spectrum.enabled);
    CHECK(c.spectrum.q_grid == std::vector<double>{-2, -1.5, -1, -0.5, 0.5, 1, 1.5, 2});
    CHECK(c.spectrum.direction == Direction::Bidirectional);
    CHECK(c.spectrum.write_surface);
    CHECK(c.tails.method == TailMethod::LsLogLog);
    CHECK(c.rho.pairs.size() == 2);
    CHECK(c.rho.scales == std::vector<Millis>{Millis{600'000}, Millis{3'600'000}});
    CHECK_FALSE(c.mst.enabled);
    CHECK_FALSE(c.mst.write_edges);
    CHECK(c.mst.metrics.path == PathMetric::Weighted);
    CHECK(validate(c).empty());
}

TEST_CASE("unknown keys fail naming the key") {
    const auto top = parse_problems("qq_grid: [1, 2]\n");
    CHECK(mentions(top, "qq_grid: unknown key"));
    const auto nested = parse_problems("spectrum:\n  qq_grid: [1, 2]\n");
    CHECK(mentions(nested, "spectrum.qq_grid: unknown key"));
}

TEST_CASE("every problem is reported at once") {
    const auto p = parse_problems("interval: soon\nthreads: -2\nrho:\n  direction: sideways\n  window: 3\n  junk: 1\n");
    CHECK(p.size() >= 3);
    CHECK(mentions(p, "interval"));
    CHECK(mentions(p, "threads"));
    CHECK(mentions(p, "rho.direction"));
    CHECK(mentions(p, "rho.junk"));
}

TEST_CASE("segment floor violation") {
    RunConfig c;
    c.rho.enabled = true;
    c.rho.window = parse_duration("1d");
    const auto v = validate(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("rho.s[1]") != std::string::npos);
    CHECK(v[0].find("only 4 segments") != std::string::npos);
}

TEST_CASE("q = 0 in the spectrum grid is rejected") {
    RunConfig c;
    c.spectrum.enabled = true;
    c.spectrum.q_grid = {-2, -1, 0, 1, 2};
    CHECK(mentions(validate(c), "q != 0"));
    const auto parsed = parse_config("spectrum: {q_grid: [-2, -1, 0, 1, 2]}\n");
    CHECK(mentions(validate(parsed), "spectrum.q_grid"));
}

TEST_CASE("cross-field rules") {
    RunConfig c = RunConfig::with_all_blocks();
    c.spectrum.window = Millis{90'000};
    c.tails.fraction = 1.5;
    c.rho.q_set = {-1.0};
    c.rho.pairs = {{"A", "A"}};
    c.mst.assets = {"A"};
    c.index.enabled = true;
    const auto v = validate(c);
    CHECK(mentions(v, "spectrum.window"));
    CHECK(mentions(v, "tails.fraction"));
    CHECK(mentions(v, "rho.q[0]"));
    CHECK(mentions(v, "rho.pairs"));
    CHECK(mentions(v, "mst.assets"));
    CHECK(mentions(v, "index.members"));

    RunConfig s;
    s.spectrum.enabled = true;
    s.spectrum.scales = {2, 20, 40};
    const auto sv = validate(s);
    CHECK(mentions(sv, "too short"));
    CHECK(mentions(sv, "fit range"));
}

TEST_CASE("malformed text never escapes as anything but ConfigError") {
    const std::string seed_text =
        "interval: 1min\nspectrum:\n  window: 30d\n  q_grid: [-3, -1, 1, 2, 3]\nrho:\n  pairs: [[A, B]]\n"
        "  s: [10min]\nmst: {assets: [A, B, C]}\ninputs:\n  - synth: {kind: fgn, hurst: 0.6}\n    asset: F\n";
    const std::string alphabet = "{}[]:,-'\"\n #&*!|>%@`abcdefghijklmnopqrstuvwxyz0123456789.";
    std::mt19937_64 gen(1);
    std::size_t parsed = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string text = seed_text;
        const int edits = 1 + static_cast<int>(gen() % 6);
        for (int e = 0; e < edits; ++e) {
            const std::size_t pos = gen() % text.size();
            switch (gen() % 3) {
                case 0: text[pos] = alphabet[gen() % alphabet.size()]; break;
                case 1: text.erase(pos, 1 + gen() % 8); break;
                default: text.insert(pos, 1, alphabet[gen() % alphabet.size()]);
            }
        }
        try {
            const RunConfig c = parse_config(text);
            (void)validate(c);
            ++parsed;
        } catch (const ConfigError&) {
        } catch (const std::exception& e) {
            FAIL("unexpected exception: " << e.what() << " for input:\n" << text);
        }
    }
    CHECK(parsed > 0);
}

TEST_CASE("load_config resolves the base directory") {
    support::ScratchDir dir("config");
    const auto p = dir.write("sub/run.yaml", "inputs:\n  - glob: \"*.csv\"\n");
    const RunConfig c = load_config(p);
    CHECK(c.base_dir == dir.path() / "sub");
    CHECK_THROWS_AS(load_config(dir.path() / "none.yaml"), InputError);
}
