#include "mfcca/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "mfcca/error.hpp"

namespace mfcca {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT (forward, e^{-2 pi i jk / n}).
void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::size_t half = len / 2;
        std::vector<std::complex<double>> tw(half);
        for (std::size_t k = 0; k < half; ++k)
            tw[k] = {std::cos(ang * static_cast<double>(k)), std::sin(ang * static_cast<double>(k))};
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + half] * tw[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

double fgn_autocovariance(double hurst, std::size_t k) {
    const double h2 = 2.0 * hurst;
    const double kd = static_cast<double>(k);
    return 0.5 * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) + std::pow(std::abs(kd - 1.0), h2));
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream + 0xD1B54A32D192ED03ull));
}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * kGolden);
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<double> binomial_cascade(unsigned levels, double p, std::uint64_t seed, bool randomize) {
    if (levels < 8 || levels > 24) throw InvalidArgument("binomial_cascade: levels must be in [8, 24]");
    if (!(p >= 0.5 && p < 1.0)) throw InvalidArgument("binomial_cascade: p must be in [0.5, 1)");
    CounterRng rng(seed);
    std::vector<double> cells{1.0};
    for (unsigned level = 0; level < levels; ++level) {
        std::vector<double> next(cells.size() * 2);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const bool big_left = randomize ? rng.coin() : true;
            const double a = cells[i] * (big_left ? p : 1.0 - p);
            const double b = cells[i] * (big_left ? 1.0 - p : p);
            next[2 * i] = a;
            next[2 * i + 1] = b;
        }
        cells = std::move(next);
    }
    return cells;
}

std::vector<double> fgn(double hurst, std::size_t length, std::uint64_t seed) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidArgument("fgn: H must be in (0, 1)");
    if (!is_power_of_two(length)) throw InvalidArgument("fgn: length must be a power of two");

    // First row of the 2n circulant embedding of the autocovariance matrix.
    const std::size_t m = 2 * length;
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= length; ++k) row[k] = fgn_autocovariance(hurst, k);
    for (std::size_t k = length + 1; k < m; ++k) row[k] = row[m - k];
    fft(row);

    CounterRng rng(seed);
    std::vector<std::complex<double>> w(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double lambda = row[j].real();
        if (lambda < -1e-9)
            throw DegenerateInput("fgn: circulant embedding is not positive semi-definite");
        const double amp = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(m));
        const double re = rng.normal();
        const double im = rng.normal();
        w[j] = {amp * re, amp * im};
    }
    fft(w);
    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) out[i] = w[i].real();
    return out;
}

std::vector<double> iid_gaussian(std::size_t length, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> out(length);
    for (double& v : out) v = rng.normal();
    return out;
}

std::vector<double> pareto(double gamma, std::size_t length, std::uint64_t seed, double x_min) {
    if (!(gamma > 0.0) || !(x_min > 0.0)) throw InvalidArgument("pareto: gamma and x_min must be > 0");
    CounterRng rng(seed);
    std::vector<double> out(length);
    for (double& v : out) v = x_min * std::pow(rng.uniform(), -1.0 / gamma);
    return out;
}

std::pair<std::vector<double>, std::vector<double>> correlated_pair(double c, std::size_t length,
                                                                    std::uint64_t seed) {
    if (!(std::abs(c) <= 1.0)) throw InvalidArgument("correlated_pair: |c| must be <= 1");
    CounterRng rx(derive_seed(seed, 0));
    CounterRng rz(derive_seed(seed, 1));
    const double d = std::sqrt(1.0 - c * c);
    std::vector<double> x(length), y(length);
    for (std::size_t i = 0; i < length; ++i) {
        x[i] = rx.normal();
        y[i] = c * x[i] + d * rz.normal();
    }
    return {std::move(x), std::move(y)};
}

GeneratorKind parse_generator_kind(const std::string& name) {
    if (name == "cascade") return GeneratorKind::Cascade;
    if (name == "fgn") return GeneratorKind::Fgn;
    if (name == "iid_gaussian") return GeneratorKind::IidGaussian;
    if (name == "pareto") return GeneratorKind::Pareto;
    if (name == "correlated_pair") return GeneratorKind::CorrelatedPair;
    throw InvalidArgument("unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Cascade: return "cascade";
        case GeneratorKind::Fgn: return "fgn";
        case GeneratorKind::IidGaussian: return "iid_gaussian";
        case GeneratorKind::Pareto: return "pareto";
        case GeneratorKind::CorrelatedPair: return "correlated_pair";
    }
    return "unknown";
}

void GeneratorSpec::validate() const {
    switch (kind) {
        case GeneratorKind::Cascade:
            if (levels < 8 || levels > 24) throw InvalidArgument("cascade levels must be in [8, 24]");
            if (!(p >= 0.5 && p < 1.0)) throw InvalidArgument("cascade p must be in [0.5, 1)");
            return;
        case GeneratorKind::Fgn:
            if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidArgument("fgn H must be in (0, 1)");
            if (!is_power_of_two(length)) throw InvalidArgument("fgn length must be a power of two");
            return;
        case GeneratorKind::Pareto:
            if (!(gamma > 0.0)) throw InvalidArgument("pareto gamma must be > 0");
            break;
        case GeneratorKind::CorrelatedPair:
            if (!(std::abs(target_c) <= 1.0)) throw InvalidArgument("correlated_pair |c| must be <= 1");
            break;
        case GeneratorKind::IidGaussian:
            break;
    }
    if (length < 2) throw InvalidArgument("generator length must be at least 2");
}

std::vector<std::vector<double>> generate(const GeneratorSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case GeneratorKind::Cascade: return {binomial_cascade(spec.levels, spec.p, spec.seed)};
        case GeneratorKind::Fgn: return {fgn(spec.hurst, spec.length, spec.seed)};
        case GeneratorKind::IidGaussian: return {iid_gaussian(spec.length, spec.seed)};
        case GeneratorKind::Pareto: return {pareto(spec.gamma, spec.length, spec.seed)};
        case GeneratorKind::CorrelatedPair: {
            auto [x, y] = correlated_pair(spec.target_c, spec.length, spec.seed);
            return {std::move(x), std::move(y)};
        }
    }
    return {};
}

PriceSeries integrate_to_prices(const std::vector<double>& values, std::string asset_id,
                                EpochMs start, Millis interval, double scale) {
    const ReturnSeries z = normalize(values);
    PriceSeries ps;
    ps.asset_id = std::move(asset_id);
    ps.sampling_interval = interval;
    ps.prices.reserve(values.size() + 1);
    ps.timestamps.reserve(values.size() + 1);
    double log_p = 0.0;
    ps.prices.push_back(1.0);
    ps.timestamps.push_back(start);
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        log_p += scale * z.values[i];
        ps.prices.push_back(std::exp(log_p));
        ps.timestamps.push_back(start + static_cast<EpochMs>(i + 1) * interval.count());
    }
    return ps;
}

}  // namespace mfcca
