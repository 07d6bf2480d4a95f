#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfcca/fluctuation.hpp"
#include "mfcca/series.hpp"

namespace mfcca {

/// q-dependent detrended cross-correlation coefficient at one (q, s).
struct RhoValue {
    double q = 1.0;
    std::size_t s = 0;
    double value = 0.0;
    std::size_t excluded_segments = 0;
};

/// rho(q,s) = F^q_xy / sqrt(F^q_xx F^q_yy) with one segmentation shared by all
/// three moments. Requires q > 0, equal lengths and T >= 4s. Throws
/// DegenerateInput when either signal has zero detrended variance.
RhoValue rho_q(std::span<const double> x, std::span<const double> y, double q,
               const SegmentationConfig& cfg);

/// Symmetric matrix of rho(q,s) over a set of assets. Pairs that involve a
/// degenerate asset hold NaN.
struct RhoMatrix {
    std::vector<std::string> assets;
    double q = 1.0;
    std::size_t s = 0;
    EpochMs window_start = 0;
    EpochMs window_end = 0;
    std::vector<double> entries;  // row-major N x N
    std::vector<std::string> degenerate_assets;

    std::size_t size() const { return assets.size(); }
    double at(std::size_t i, std::size_t j) const { return entries[i * assets.size() + j]; }
    /// Off-diagonal pairs i < j holding a finite coefficient.
    std::size_t finite_pairs() const;
};

/// Per-asset profiles, detrended residuals and single-signal moments, computed
/// once and shared by every pair.
class DetrendedColumns {
public:
    DetrendedColumns(const std::vector<std::span<const double>>& columns,
                     const SegmentationConfig& cfg, const std::vector<double>& q_set);

    std::size_t size() const { return residuals_.size(); }
    const SegmentationConfig& config() const { return cfg_; }
    const std::vector<double>& q_set() const { return q_set_; }
    /// F^q_xx of column i at q_set()[k]; 0 marks a degenerate column.
    double self_moment(std::size_t i, std::size_t k) const { return self_[i][k]; }
    bool degenerate(std::size_t i) const;
    /// rho for every q in q_set(); NaN when the denominator vanishes.
    std::vector<double> pair(std::size_t i, std::size_t j) const;

private:
    SegmentationConfig cfg_;
    std::vector<double> q_set_;
    std::vector<std::vector<double>> residuals_;
    std::vector<std::vector<double>> self_;
};

/// One matrix per q in q_set, all at the scale in cfg. Diagonal entries are 1.
std::vector<RhoMatrix> rho_matrices(const std::vector<std::span<const double>>& columns,
                                    const std::vector<std::string>& assets,
                                    const std::vector<double>& q_set,
                                    const SegmentationConfig& cfg, unsigned threads = 1);

/// All pairs of a panel of aligned return columns.
RhoMatrix rho_matrix(const Panel& returns, double q, const SegmentationConfig& cfg,
                     unsigned threads = 1);

/// Minimum number of forward segments a rolling window must hold.
inline constexpr std::size_t kMinSegments = 10;

struct RollingRhoOptions {
    std::vector<double> q_set{1.0, 4.0};
    std::vector<Millis> scales{Millis{10 * 60'000}, Millis{360 * 60'000}};
    unsigned poly_degree = 2;
    Direction direction = Direction::Forward;
};

struct RhoRecord {
    EpochMs window_end = 0;
    double q = 1.0;
    std::size_t s = 0;
    double value = 0.0;
    std::size_t excluded_segments = 0;
    bool degenerate = false;
};

/// Throws InvalidArgument naming the scale if floor(window / s) < kMinSegments,
/// or if any q <= 0.
void check_rolling_scales(std::size_t window_samples, const std::vector<std::size_t>& scales,
                          const std::vector<double>& q_set);

/// rho(q,s) of two aligned return series in a sliding window, one record per
/// (window, s, q), window-major. Windows where either series is flat are
/// flagged degenerate with a NaN value.
std::vector<RhoRecord> rolling_rho(const ReturnSeries& x, const ReturnSeries& y, Millis window,
                                   Millis step, const RollingRhoOptions& opts = {},
                                   unsigned threads = 1);

void write_rho_timeline_csv(std::ostream& out, const std::vector<RhoRecord>& records);
void write_rho_matrix_csv(std::ostream& out, const RhoMatrix& m);

}  // namespace mfcca
