#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfcca/series.hpp"

namespace mfcca {

enum class TailMethod { Hill, LsLogLog };

TailMethod parse_tail_method(const std::string& name);
std::string to_string(TailMethod method);

/// Power-law fit P(X > x) ~ x^-gamma to the largest magnitudes.
struct TailFit {
    double gamma = 0.0;
    double tail_fraction = 0.01;
    std::size_t k = 0;          // order statistics in the tail
    double threshold = 0.0;     // x_(k+1), the largest magnitude left out
    TailMethod method = TailMethod::Hill;
    std::size_t sample_size = 0;  // nonzero magnitudes
    bool low_sample = false;      // k < kMinTailSamples
};

inline constexpr std::size_t kMinTailSamples = 50;

/// Hill estimate k / sum_{i<=k} ln(x_i / x_{k+1}) from magnitudes sorted in
/// descending order.
double hill_estimate(std::span<const double> sorted_desc, std::size_t k);

/// Fits the tail of |values|. Zeros are dropped, k = ceil(fraction * n).
/// Hill is the maximum-likelihood estimate; LsLogLog regresses
/// log(i / n) on log x_i for the k largest values and returns minus the slope.
/// Throws InvalidArgument if fewer than k + 1 nonzero values remain and
/// DegenerateInput if the tail is flat.
TailFit fit_tail(std::span<const double> values, double tail_fraction = 0.01,
                 TailMethod method = TailMethod::Hill);

enum class Regime { LevyStable, Unstable };

std::string to_string(Regime regime);

/// Levy-stable iff gamma <= 2.
Regime classify_regime(double gamma);
inline Regime classify_regime(const TailFit& fit) { return classify_regime(fit.gamma); }

struct TailRecord {
    EpochMs window_end = 0;
    TailFit fit;
    Regime regime = Regime::Unstable;
    bool failed = false;  // no fit could be made in this window
};

std::string tail_flags_to_string(const TailRecord& record);

std::vector<TailRecord> rolling_tail(const ReturnSeries& series, Millis window, Millis step,
                                     double tail_fraction = 0.01,
                                     TailMethod method = TailMethod::Hill, unsigned threads = 1);

void write_tail_timeline_csv(std::ostream& out, const std::vector<TailRecord>& records);

}  // namespace mfcca
