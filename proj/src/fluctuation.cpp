#include "mfcca/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"

namespace mfcca {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

double variance_of(std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

}  // namespace

void SegmentationConfig::validate() const {
    if (scale < static_cast<std::size_t>(poly_degree) + 2)
        throw InvalidArgument("segment length " + std::to_string(scale) +
                              " is too short for a degree-" + std::to_string(poly_degree) +
                              " fit (need s >= m + 2)");
}

std::size_t SegmentationConfig::segment_count(std::size_t length) const {
    const std::size_t forward = length / scale;
    return direction == Direction::Bidirectional ? 2 * forward : forward;
}

std::size_t SegmentationConfig::segment_offset(std::size_t nu, std::size_t length) const {
    const std::size_t forward = length / scale;
    if (nu < forward) return nu * scale;
    return length - (nu - forward + 1) * scale;
}

SegmentDetrender::SegmentDetrender(std::size_t length, unsigned degree)
    : length_(length), degree_(degree) {
    if (length < static_cast<std::size_t>(degree) + 2)
        throw InvalidArgument("SegmentDetrender: segment too short for polynomial degree");
    const std::size_t rows = degree + 1;
    basis_.assign(rows * length, 0.0);
    const double half = 0.5 * static_cast<double>(length - 1);
    for (std::size_t j = 0; j < rows; ++j) {
        std::span<double> row(basis_.data() + j * length, length);
        for (std::size_t k = 0; k < length; ++k) {
            const double t = (static_cast<double>(k) - half) / half;
            row[k] = std::pow(t, static_cast<double>(j));
        }
        // Modified Gram-Schmidt, applied twice.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                std::span<const double> prev(basis_.data() + i * length, length);
                const double c = dot(prev, row);
                for (std::size_t k = 0; k < length; ++k) row[k] -= c * prev[k];
            }
        }
        const double norm = std::sqrt(dot(row, row));
        for (double& v : row) v /= norm;
    }
}

void SegmentDetrender::residuals(std::span<const double> segment, std::span<double> out) const {
    if (out.data() != segment.data()) std::copy(segment.begin(), segment.end(), out.begin());
    for (std::size_t j = 0; j <= degree_; ++j) {
        std::span<const double> row(basis_.data() + j * length_, length_);
        const double c = dot(row, out);
        for (std::size_t k = 0; k < length_; ++k) out[k] -= c * row[k];
    }
}

std::vector<double> detrended_residuals(std::span<const double> profile,
                                        const SegmentationConfig& cfg) {
    cfg.validate();
    const std::size_t n = profile.size();
    if (n < cfg.scale)
        throw InvalidArgument("series length " + std::to_string(n) + " is shorter than scale " +
                              std::to_string(cfg.scale));
    const SegmentDetrender detrender(cfg.scale, cfg.poly_degree);
    const std::size_t segments = cfg.segment_count(n);
    std::vector<double> out(segments * cfg.scale);
    for (std::size_t nu = 0; nu < segments; ++nu) {
        const std::size_t off = cfg.segment_offset(nu, n);
        detrender.residuals(profile.subspan(off, cfg.scale),
                            std::span<double>(out.data() + nu * cfg.scale, cfg.scale));
    }
    return out;
}

double segment_covariance(std::span<const double> a, std::span<const double> b) {
    return dot(a, b) / static_cast<double>(a.size());
}

SegmentCovariances covariances_from_residuals(std::span<const double> rx,
                                              std::span<const double> ry, std::size_t scale) {
    if (rx.size() != ry.size() || scale == 0 || rx.size() % scale != 0)
        throw InvalidArgument("covariances_from_residuals: mismatched residual layouts");
    SegmentCovariances cov;
    cov.scale = scale;
    const std::size_t segments = rx.size() / scale;
    cov.values.resize(segments);
    for (std::size_t nu = 0; nu < segments; ++nu)
        cov.values[nu] = segment_covariance(rx.subspan(nu * scale, scale),
                                            ry.subspan(nu * scale, scale));
    return cov;
}

SegmentCovariances detrended_covariances(const Profile& x, const Profile& y,
                                         const SegmentationConfig& cfg) {
    if (x.size() != y.size()) throw InvalidArgument("detrended_covariances: profile lengths differ");
    const auto rx = detrended_residuals(x.values, cfg);
    const auto ry = detrended_residuals(y.values, cfg);
    return covariances_from_residuals(rx, ry, cfg.scale);
}

SegmentCovariances detrended_variances(const Profile& x, const SegmentationConfig& cfg) {
    const auto rx = detrended_residuals(x.values, cfg);
    return covariances_from_residuals(rx, rx, cfg.scale);
}

QMoment q_moment(std::span<const double> covariances, double q, double zero_floor) {
    if (q == 0.0) throw InvalidArgument("q must be nonzero");
    if (covariances.empty()) throw InvalidArgument("no segments to average");
    const double half_q = 0.5 * q;
    double acc = 0.0;
    std::size_t used = 0;
    QMoment m;
    for (double f2 : covariances) {
        const double mag = std::abs(f2);
        // A zero covariance has no finite negative moment even with a zero floor.
        if (q < 0.0 && (mag < zero_floor || mag == 0.0)) {
            ++m.excluded;
            continue;
        }
        const double term = half_q == 1.0 ? mag : std::pow(mag, half_q);
        acc += f2 < 0.0 ? -term : term;
        ++used;
    }
    if (used == 0)
        throw DegenerateInput("all " + std::to_string(covariances.size()) +
                              " segments fall below the zero floor for q = " + std::to_string(q));
    m.value = acc / static_cast<double>(used);
    return m;
}

double signed_root(double moment, double q) {
    const double mag = std::abs(moment);
    const double root = q == 2.0 ? std::sqrt(mag) : std::pow(mag, 1.0 / q);
    return moment < 0.0 ? -root : root;
}

QMoment fluctuation_function(const SegmentCovariances& cov, double q, double zero_floor) {
    QMoment m = q_moment(cov.values, q, zero_floor);
    m.value = signed_root(m.value, q);
    return m;
}

FluctuationSurface fluctuation_surface(std::span<const double> x, std::span<const double> y,
                                       const std::vector<double>& q_grid,
                                       const std::vector<std::size_t>& s_grid,
                                       const FluctuationOptions& opts) {
    if (q_grid.empty() || s_grid.empty()) throw InvalidArgument("fluctuation_surface: empty grid");
    if (std::find(q_grid.begin(), q_grid.end(), 0.0) != q_grid.end())
        throw InvalidArgument("fluctuation_surface: q grid must not contain 0");
    if (x.size() != y.size()) throw InvalidArgument("fluctuation_surface: series lengths differ");
    const std::size_t n = x.size();
    const std::size_t s_max = *std::max_element(s_grid.begin(), s_grid.end());
    if (s_max > n / 4)
        throw InvalidArgument("fluctuation_surface: scale " + std::to_string(s_max) +
                              " leaves fewer than 4 segments in " + std::to_string(n) + " samples");

    const bool single = x.data() == y.data();
    const Profile px = profile(x);
    const Profile py = single ? Profile{} : profile(y);
    const double var_ref = single ? variance_of(x) : std::sqrt(variance_of(x) * variance_of(y));
    const double zero_floor = opts.zero_floor_factor * var_ref;

    FluctuationSurface surf;
    surf.q_grid = q_grid;
    surf.s_grid = s_grid;
    surf.single_signal = single;
    const std::size_t cells = q_grid.size() * s_grid.size();
    surf.values.assign(cells, std::nan(""));
    surf.valid.assign(cells, 0);
    surf.excluded.assign(cells, 0);

    for (std::size_t si = 0; si < s_grid.size(); ++si) {
        const SegmentationConfig cfg{s_grid[si], opts.direction, opts.poly_degree};
        const auto rx = detrended_residuals(px.values, cfg);
        const SegmentCovariances cov =
            single ? covariances_from_residuals(rx, rx, cfg.scale)
                   : covariances_from_residuals(rx, detrended_residuals(py.values, cfg), cfg.scale);
        for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
            const std::size_t idx = surf.index(si, qi);
            try {
                const QMoment f = fluctuation_function(cov, q_grid[qi], zero_floor);
                surf.values[idx] = f.value;
                surf.excluded[idx] = f.excluded;
                surf.valid[idx] = std::isfinite(f.value) ? 1 : 0;
            } catch (const DegenerateInput&) {
                surf.excluded[idx] = cov.count();
            }
        }
    }
    return surf;
}

FluctuationSurface fluctuation_surface(std::span<const double> x,
                                       const std::vector<double>& q_grid,
                                       const std::vector<std::size_t>& s_grid,
                                       const FluctuationOptions& opts) {
    return fluctuation_surface(x, x, q_grid, s_grid, opts);
}

std::vector<double> make_q_grid(double q_min, double q_max, double step) {
    if (!(step > 0.0) || !(q_min < q_max))
        throw InvalidArgument("make_q_grid: need q_min < q_max and step > 0");
    const double inv = 1.0 / step;
    const bool integral_inverse = std::abs(inv - std::round(inv)) < 1e-9;
    const long lo = std::lround(std::ceil(q_min / step - 1e-9));
    const long hi = std::lround(std::floor(q_max / step + 1e-9));
    std::vector<double> grid;
    for (long k = lo; k <= hi; ++k) {
        if (k == 0) continue;
        grid.push_back(integral_inverse ? static_cast<double>(k) / std::round(inv)
                                        : static_cast<double>(k) * step);
    }
    return grid;
}

std::vector<std::size_t> default_scales(std::size_t length, std::size_t count, std::size_t s_min) {
    const std::size_t s_max = length / 4;
    if (s_max < s_min || count < 2)
        throw InvalidArgument("default_scales: series of " + std::to_string(length) +
                              " samples is too short for scales starting at " +
                              std::to_string(s_min));
    std::vector<std::size_t> scales;
    const double ratio = std::log(static_cast<double>(s_max) / static_cast<double>(s_min));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        auto s = static_cast<std::size_t>(std::llround(static_cast<double>(s_min) * std::exp(ratio * t)));
        s = std::clamp(s, s_min, s_max);
        if (scales.empty() || scales.back() != s) scales.push_back(s);
    }
    return scales;
}

void write_surface_csv(std::ostream& out, const FluctuationSurface& surface) {
    std::vector<std::string> row{"s"};
    for (double q : surface.q_grid) row.push_back("q=" + csv::format_double(q));
    csv::write_row(out, row);
    for (std::size_t si = 0; si < surface.s_grid.size(); ++si) {
        row.assign(1, std::to_string(surface.s_grid[si]));
        for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi)
            row.push_back(surface.is_valid(si, qi) ? csv::format_double(surface.at(si, qi)) : "nan");
        csv::write_row(out, row);
    }
}

void write_exclusions_csv(std::ostream& out, const FluctuationSurface& surface) {
    std::vector<std::string> row{"s"};
    for (double q : surface.q_grid) row.push_back("q=" + csv::format_double(q));
    csv::write_row(out, row);
    for (std::size_t si = 0; si < surface.s_grid.size(); ++si) {
        row.assign(1, std::to_string(surface.s_grid[si]));
        for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi)
            row.push_back(std::to_string(surface.excluded[surface.index(si, qi)]));
        csv::write_row(out, row);
    }
}

}  // namespace mfcca
