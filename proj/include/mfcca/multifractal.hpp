#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfcca/fluctuation.hpp"
#include "mfcca/series.hpp"

namespace mfcca {

/// Inclusive range of scales used in the log-log fit.
struct FitRange {
    std::size_t s_min = 10;
    std::size_t s_max = 0;
};

/// [10, length / 10].
FitRange default_fit_range(std::size_t length);

/// Slopes of log |F(q,s)| against log s, one per q. Holds h(q) for a single
/// signal and lambda(q) for a pair.
struct ScalingExponents {
    std::vector<double> q_grid;
    std::vector<double> exponent;
    std::vector<double> r2;
    std::vector<std::uint8_t> usable;        // fit could be computed
    std::vector<std::uint8_t> scaling;       // usable and r2 >= r2_min
    std::vector<std::uint8_t> mixed_sign;    // cross case: F changed sign across scales
    FitRange fit_range;
    std::size_t scales_used = 0;
};

/// Ordinary least squares per q over the scales inside fit_range. A q whose F
/// is non-positive (single signal) or zero (cross) at a needed scale is marked
/// unusable. Throws InvalidArgument with fewer than 4 scales in range.
ScalingExponents fit_scaling(const FluctuationSurface& surface, FitRange range,
                             double r2_min = 0.98);

struct SingularitySpectrum {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> alpha;
    std::vector<double> f_alpha;
    double alpha_min = 0.0;
    double alpha0 = 0.0;
    double alpha_max = 0.0;
    double delta_alpha = 0.0;
    /// ((alpha_max - alpha0) - (alpha0 - alpha_min)) / delta_alpha; positive
    /// when the right shoulder is longer, 0 for a point spectrum.
    double asymmetry = 0.0;
    bool monotone = true;       // alpha(q) non-increasing in q
    bool f_bounded = true;      // every f(alpha) <= 1 + 1e-6
};

/// Spectrum from h(q) via alpha = h + q h'(q), f = q (alpha - h) + 1 with
/// central differences for h' (one-sided at the grid ends). Unusable q values
/// are dropped first; throws InvalidArgument if fewer than 5 remain.
SingularitySpectrum singularity_spectrum(const ScalingExponents& exps);

/// Same construction straight from sampled h(q).
SingularitySpectrum singularity_spectrum(const std::vector<double>& q,
                                         const std::vector<double>& h);

enum SpectrumFlag : std::uint32_t {
    kSpectrumDegenerate = 1u << 0,   // constant data in the window
    kSpectrumNonScaling = 1u << 1,   // some q with r2 below r2_min
    kSpectrumNonConcave = 1u << 2,   // alpha(q) not monotone
    kSpectrumFAboveOne = 1u << 3,
    kSpectrumFitFailed = 1u << 4,    // too few usable q or scales
};

std::string spectrum_flags_to_string(std::uint32_t flags);

struct SpectrumOptions {
    std::vector<double> q_grid = make_q_grid(-3.0, 3.0, 0.2);
    std::vector<std::size_t> s_grid;        // empty: default_scales(window)
    std::optional<FitRange> fit_range;       // empty: default_fit_range(window)
    FluctuationOptions fluctuation;
    double r2_min = 0.98;
};

struct SpectrumRecord {
    EpochMs window_end = 0;
    double alpha_min = std::nan("");
    double alpha0 = std::nan("");
    double alpha_max = std::nan("");
    double delta_alpha = std::nan("");
    double asymmetry = std::nan("");
    double min_r2 = std::nan("");
    std::uint32_t flags = 0;
};

struct SpectrumTimeline {
    std::string asset_id;
    std::vector<SpectrumRecord> records;
};

/// Number of window positions: floor((length - window) / step) + 1, or 0.
std::size_t window_count(std::size_t length, std::size_t window, std::size_t step);

/// Full pipeline for one window of returns: z-score, surface, fit, spectrum.
/// Throws DegenerateInput for constant data.
SingularitySpectrum window_spectrum(std::span<const double> window, const SpectrumOptions& opts,
                                    ScalingExponents* exps_out = nullptr);

/// Slides a window over the returns, re-normalizing inside each window, and
/// summarizes the spectrum at every position. Keyed by the timestamp of the
/// last return in the window (or its index when the series has none).
SpectrumTimeline rolling_spectrum(const ReturnSeries& series, Millis window, Millis step,
                                  const SpectrumOptions& opts = {}, unsigned threads = 1);

void write_spectrum_timeline_csv(std::ostream& out, const SpectrumTimeline& timeline);

}  // namespace mfcca
