// mfcca command line: run a YAML-configured analysis, validate a config,
// or write a synthetic price file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mfcca/config.hpp"
#include "mfcca/error.hpp"
#include "mfcca/pipeline.hpp"
#include "mfcca/series.hpp"
#include "mfcca/synth.hpp"
#include "mfcca/version.hpp"

namespace {

enum Exit : int { kOk = 0, kBlockFailed = 1, kBadConfig = 2, kBadInput = 3 };

struct Common {
    std::string config;
    std::string out;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

std::optional<std::string> env(const char* name) {
    if (const char* v = std::getenv(name); v && *v) return std::string(v);
    return std::nullopt;
}

void add_common(CLI::App* cmd, Common& c, bool run_options) {
    cmd->add_option("-c,--config", c.config, "YAML configuration file")->envname("MFCCA_CONFIG");
    if (!run_options) return;
    cmd->add_option("-o,--out", c.out, "output directory (overrides config)")->envname("MFCCA_OUT");
    cmd->add_option("-t,--threads", c.threads, "worker threads, 0 = all cores")->envname("MFCCA_THREADS");
    cmd->add_option("--seed", c.seed, "run seed for synthetic inputs")->envname("MFCCA_SEED");
}

mfcca::RunConfig load(const Common& c) {
    if (c.config.empty()) throw mfcca::InvalidArgument("no configuration given (--config or MFCCA_CONFIG)");
    mfcca::RunConfig cfg = mfcca::load_config(c.config);
    if (!c.out.empty()) cfg.output = c.out;
    if (c.threads) cfg.threads = *c.threads;
    if (c.seed) cfg.seed = *c.seed;
    return cfg;
}

int print_problems(const std::vector<std::string>& problems) {
    for (const auto& p : problems) std::cerr << "error: " << p << "\n";
    return kBadConfig;
}

int do_run(const Common& c, const std::string& only) {
    mfcca::RunConfig cfg = load(c);
    if (only == "spectrum") cfg.tails.enabled = cfg.rho.enabled = cfg.mst.enabled = false, cfg.spectrum.enabled = true;
    if (only == "tails") cfg.spectrum.enabled = cfg.rho.enabled = cfg.mst.enabled = false, cfg.tails.enabled = true;
    if (only == "rho") cfg.spectrum.enabled = cfg.tails.enabled = cfg.mst.enabled = false, cfg.rho.enabled = true;
    if (only == "mst") cfg.spectrum.enabled = cfg.tails.enabled = cfg.rho.enabled = false, cfg.mst.enabled = true;
    const mfcca::RunReport report = mfcca::run(cfg);
    for (const auto& b : report.blocks) {
        if (b.status == "skipped") continue;
        std::cout << b.name << ": " << b.status;
        if (!b.error.empty()) std::cout << " (" << b.error << ")";
        std::cout << "\n";
    }
    std::cout << "manifest: " << report.manifest_path.string() << "\n";
    return report.ok ? kOk : kBlockFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multifractal cross-correlation analysis of price series"};
    app.set_version_flag("--version", std::string(mfcca::kVersion));
    app.require_subcommand(1);

    Common common;
    auto* run = app.add_subcommand("run", "run every enabled block of a configuration");
    add_common(run, common, true);
    std::vector<std::pair<std::string, CLI::App*>> single;
    for (const char* name : {"spectrum", "tails", "rho", "mst"}) {
        auto* sub = app.add_subcommand(name, std::string("run only the ") + name + " block");
        add_common(sub, common, true);
        single.emplace_back(name, sub);
    }
    auto* validate = app.add_subcommand("validate", "check a configuration without computing");
    add_common(validate, common, false);

    mfcca::GeneratorSpec gen;
    std::string kind = "cascade", asset = "SYN", synth_out, interval = "1min";
    auto* synth = app.add_subcommand("synth", "write a synthetic price file");
    synth->add_option("--kind", kind, "cascade | fgn | iid_gaussian | pareto | correlated_pair");
    synth->add_option("--levels", gen.levels, "cascade levels");
    synth->add_option("--p", gen.p, "cascade weight");
    synth->add_option("--hurst", gen.hurst, "fGn Hurst exponent");
    synth->add_option("--gamma", gen.gamma, "Pareto tail exponent");
    synth->add_option("--c", gen.target_c, "correlated pair coefficient");
    synth->add_option("--length", gen.length, "series length");
    synth->add_option("--seed", gen.seed, "generator seed")->envname("MFCCA_SEED");
    synth->add_option("--asset", asset, "asset id (prefix for correlated_pair)");
    synth->add_option("--interval", interval, "sampling interval");
    synth->add_option("-o,--out", synth_out, "output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const auto cfg = load(common);
            const auto problems = mfcca::validate(cfg);
            if (!problems.empty()) return print_problems(problems);
            std::cout << "ok\n";
            return kOk;
        }
        if (*synth) {
            gen.kind = mfcca::parse_generator_kind(kind);
            gen.validate();
            const mfcca::Millis step = mfcca::parse_duration(interval);
            const auto values = mfcca::generate(gen);
            std::vector<mfcca::PriceSeries> prices;
            if (values.size() == 1) {
                prices.push_back(mfcca::integrate_to_prices(values[0], asset, 0, step));
            } else {
                prices.push_back(mfcca::integrate_to_prices(values[0], asset + "_X", 0, step));
                prices.push_back(mfcca::integrate_to_prices(values[1], asset + "_Y", 0, step));
            }
            if (synth_out.empty()) {
                mfcca::write_prices_csv(std::cout, prices);
            } else {
                std::ofstream f(synth_out, std::ios::binary);
                if (!f) throw mfcca::InputError(synth_out + ": cannot write");
                mfcca::write_prices_csv(f, prices);
            }
            return kOk;
        }
        for (const auto& [name, sub] : single)
            if (*sub) return do_run(common, name);
        return do_run(common, "");
    } catch (const mfcca::ConfigError& e) {
        return print_problems(e.problems());
    } catch (const mfcca::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
}
