#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfcca/series.hpp"

namespace mfcca {

/// SplitMix64 used as a counter-based generator: the i-th draw (i = 1, 2, ...)
/// is mix64(seed + i * 0x9E3779B97F4A7C15). Output depends only on (seed, i),
/// never on the platform's standard library.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();
    /// Standard normal via Box-Muller; draws come in pairs.
    double normal();
    bool coin() { return (next_u64() >> 63) != 0; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

/// Seed of the independent stream `stream` derived from a master seed:
/// mix64(master ^ mix64(stream + 0xD1B54A32D192ED03)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Binomial multiplicative cascade of 2^levels cells. Every cell of mass v
/// splits into v*p and v*(1-p); with `randomize` the larger share goes left or
/// right by a fair coin, otherwise always left. levels in [8, 24], p in [0.5, 1).
std::vector<double> binomial_cascade(unsigned levels, double p, std::uint64_t seed,
                                     bool randomize = true);

/// Fractional Gaussian noise with Hurst exponent H in (0, 1) and unit
/// variance, by exact circulant embedding. length must be a power of two.
std::vector<double> fgn(double hurst, std::size_t length, std::uint64_t seed);

std::vector<double> iid_gaussian(std::size_t length, std::uint64_t seed);

/// Pareto samples with P(X > x) = (x_min / x)^gamma for x >= x_min.
std::vector<double> pareto(double gamma, std::size_t length, std::uint64_t seed,
                           double x_min = 1.0);

/// y = c x + sqrt(1 - c^2) z with x, z iid standard normal.
std::pair<std::vector<double>, std::vector<double>> correlated_pair(double c, std::size_t length,
                                                                    std::uint64_t seed);

enum class GeneratorKind { Cascade, Fgn, IidGaussian, Pareto, CorrelatedPair };

GeneratorKind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorKind kind);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::IidGaussian;
    double p = 0.7;          // cascade
    double hurst = 0.5;      // fgn
    double gamma = 3.0;      // pareto
    double target_c = 0.0;   // correlated_pair
    std::size_t length = 1 << 16;  // cascade uses 2^levels
    unsigned levels = 16;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on out-of-range parameters.
    void validate() const;
};

/// One series per output (two for correlated_pair).
std::vector<std::vector<double>> generate(const GeneratorSpec& spec);

/// Turns a return-like series into a price path: P_0 = 1,
/// P_{i+1} = P_i exp(scale * (x_i - mean) / std), stamped start + i * interval.
/// Log returns of the result recover the normalized input.
PriceSeries integrate_to_prices(const std::vector<double>& values, std::string asset_id,
                                EpochMs start = 0, Millis interval = kOneMinute,
                                double scale = 1e-3);

}  // namespace mfcca
