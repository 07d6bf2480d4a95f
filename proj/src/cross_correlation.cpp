#include "mfcca/cross_correlation.hpp"

#include <cmath>
#include <ostream>

#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"
#include "mfcca/multifractal.hpp"
#include "mfcca/parallel.hpp"

namespace mfcca {

std::size_t RhoMatrix::finite_pairs() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j) count += std::isfinite(at(i, j)) ? 1 : 0;
    return count;
}

DetrendedColumns::DetrendedColumns(const std::vector<std::span<const double>>& columns,
                                   const SegmentationConfig& cfg, const std::vector<double>& q_set)
    : cfg_(cfg), q_set_(q_set) {
    cfg_.validate();
    for (double q : q_set_)
        if (!(q > 0.0)) throw InvalidArgument("rho(q,s) is only defined here for q > 0");
    residuals_.reserve(columns.size());
    self_.reserve(columns.size());
    for (const auto& col : columns) {
        residuals_.push_back(detrended_residuals(profile(col).values, cfg_));
        const auto& r = residuals_.back();
        const SegmentCovariances cov = covariances_from_residuals(r, r, cfg_.scale);
        std::vector<double> moments(q_set_.size(), 0.0);
        for (std::size_t k = 0; k < q_set_.size(); ++k) {
            const double m = q_moment(cov.values, q_set_[k]).value;
            moments[k] = m > 0.0 && std::isfinite(m) ? m : 0.0;
        }
        self_.push_back(std::move(moments));
    }
}

bool DetrendedColumns::degenerate(std::size_t i) const {
    for (double m : self_[i])
        if (m == 0.0) return true;
    return false;
}

std::vector<double> DetrendedColumns::pair(std::size_t i, std::size_t j) const {
    std::vector<double> out(q_set_.size(), std::nan(""));
    if (degenerate(i) || degenerate(j)) return out;
    const SegmentCovariances cov = covariances_from_residuals(residuals_[i], residuals_[j], cfg_.scale);
    for (std::size_t k = 0; k < q_set_.size(); ++k) {
        const double num = q_moment(cov.values, q_set_[k]).value;
        out[k] = num / std::sqrt(self_[i][k] * self_[j][k]);
    }
    return out;
}

RhoValue rho_q(std::span<const double> x, std::span<const double> y, double q,
               const SegmentationConfig& cfg) {
    if (!(q > 0.0)) throw InvalidArgument("rho_q: q must be > 0");
    if (x.size() != y.size()) throw InvalidArgument("rho_q: series lengths differ");
    if (x.size() < 4 * cfg.scale)
        throw InvalidArgument("rho_q: need T >= 4s (T = " + std::to_string(x.size()) +
                              ", s = " + std::to_string(cfg.scale) + ")");
    const DetrendedColumns cols({x, y}, cfg, {q});
    const double value = cols.pair(0, 1).front();
    if (std::isnan(value))
        throw DegenerateInput("rho_q: zero detrended variance in one of the series");
    return RhoValue{q, cfg.scale, value, 0};
}

std::vector<RhoMatrix> rho_matrices(const std::vector<std::span<const double>>& columns,
                                    const std::vector<std::string>& assets,
                                    const std::vector<double>& q_set,
                                    const SegmentationConfig& cfg, unsigned threads) {
    const std::size_t n = columns.size();
    if (n < 2) throw InvalidArgument("rho_matrix: need at least 2 assets");
    if (assets.size() != n) throw InvalidArgument("rho_matrix: asset ids do not match columns");
    for (const auto& c : columns)
        if (c.size() != columns.front().size())
            throw InvalidArgument("rho_matrix: columns are not aligned");
    if (columns.front().size() < 4 * cfg.scale)
        throw InvalidArgument("rho_matrix: need T >= 4s");

    const DetrendedColumns cols(columns, cfg, q_set);
    std::vector<RhoMatrix> out(q_set.size());
    for (std::size_t k = 0; k < q_set.size(); ++k) {
        out[k].assets = assets;
        out[k].q = q_set[k];
        out[k].s = cfg.scale;
        out[k].entries.assign(n * n, std::nan(""));
        for (std::size_t i = 0; i < n; ++i) {
            out[k].entries[i * n + i] = 1.0;
            if (cols.degenerate(i)) out[k].degenerate_assets.push_back(assets[i]);
        }
    }
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto rho = cols.pair(i, j);
            for (std::size_t k = 0; k < q_set.size(); ++k) {
                out[k].entries[i * n + j] = rho[k];
                out[k].entries[j * n + i] = rho[k];
            }
        }
    });
    return out;
}

RhoMatrix rho_matrix(const Panel& returns, double q, const SegmentationConfig& cfg,
                     unsigned threads) {
    std::vector<std::span<const double>> cols(returns.columns.begin(), returns.columns.end());
    auto mats = rho_matrices(cols, returns.assets, {q}, cfg, threads);
    if (!returns.grid.empty()) {
        mats.front().window_start = returns.grid.front();
        mats.front().window_end = returns.grid.back();
    }
    return std::move(mats.front());
}

void check_rolling_scales(std::size_t window_samples, const std::vector<std::size_t>& scales,
                          const std::vector<double>& q_set) {
    for (double q : q_set)
        if (!(q > 0.0)) throw InvalidArgument("q = " + csv::format_double(q) + " is not > 0");
    for (std::size_t s : scales)
        if (s == 0 || window_samples / s < kMinSegments)
            throw InvalidArgument("scale s = " + std::to_string(s) + " gives only " +
                                  std::to_string(s == 0 ? 0 : window_samples / s) +
                                  " segments in a " + std::to_string(window_samples) +
                                  "-sample window (< " + std::to_string(kMinSegments) + ")");
}

std::vector<RhoRecord> rolling_rho(const ReturnSeries& x, const ReturnSeries& y, Millis window,
                                   Millis step, const RollingRhoOptions& opts, unsigned threads) {
    if (x.size() != y.size()) throw InvalidArgument("rolling_rho: series lengths differ");
    if (!x.timestamps.empty() && !y.timestamps.empty() && x.timestamps != y.timestamps)
        throw InvalidArgument("rolling_rho: series are not aligned");
    const std::size_t w = to_samples(window, x.sampling_interval, "rho window");
    const std::size_t st = to_samples(step, x.sampling_interval, "rho step");
    std::vector<std::size_t> scales;
    for (Millis s : opts.scales) scales.push_back(to_samples(s, x.sampling_interval, "rho scale"));
    check_rolling_scales(w, scales, opts.q_set);
    if (w > x.size()) throw InvalidArgument("rolling_rho: window longer than series");

    const std::size_t windows = window_count(x.size(), w, st);
    const std::size_t per_window = scales.size() * opts.q_set.size();
    std::vector<RhoRecord> out(windows * per_window);
    parallel_for(windows, threads, [&](std::size_t wi) {
        const std::size_t start = wi * st;
        const EpochMs end = x.timestamps.empty() ? static_cast<EpochMs>(start + w - 1)
                                                 : x.timestamps[start + w - 1];
        const std::vector<std::span<const double>> cols{
            std::span<const double>(x.values).subspan(start, w),
            std::span<const double>(y.values).subspan(start, w)};
        for (std::size_t si = 0; si < scales.size(); ++si) {
            const SegmentationConfig cfg{scales[si], opts.direction, opts.poly_degree};
            const DetrendedColumns dc(cols, cfg, opts.q_set);
            const auto rho = dc.pair(0, 1);
            for (std::size_t k = 0; k < opts.q_set.size(); ++k) {
                RhoRecord& r = out[wi * per_window + si * opts.q_set.size() + k];
                r.window_end = end;
                r.q = opts.q_set[k];
                r.s = scales[si];
                r.value = rho[k];
                r.degenerate = std::isnan(rho[k]);
            }
        }
    });
    return out;
}

void write_rho_timeline_csv(std::ostream& out, const std::vector<RhoRecord>& records) {
    csv::write_row(out, {"window_end", "q", "s", "rho", "excluded_segments"});
    for (const auto& r : records)
        csv::write_row(out, {std::to_string(r.window_end), csv::format_double(r.q),
                             std::to_string(r.s), csv::format_double(r.value),
                             std::to_string(r.excluded_segments)});
}

void write_rho_matrix_csv(std::ostream& out, const RhoMatrix& m) {
    std::vector<std::string> row{"asset"};
    row.insert(row.end(), m.assets.begin(), m.assets.end());
    csv::write_row(out, row);
    for (std::size_t i = 0; i < m.size(); ++i) {
        row.assign(1, m.assets[i]);
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(csv::format_double(m.at(i, j)));
        csv::write_row(out, row);
    }
}

}  // namespace mfcca
