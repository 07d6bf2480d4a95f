#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfcca/series.hpp"

namespace mfcca {

enum class Direction {
    Forward,       // floor(T/s) segments counted from the start
    Bidirectional  // the forward set plus floor(T/s) segments counted from the end
};

struct SegmentationConfig {
    std::size_t scale = 10;  // segment length s, in samples
    Direction direction = Direction::Forward;
    unsigned poly_degree = 2;

    /// Throws InvalidArgument unless s >= m + 2.
    void validate() const;
    std::size_t segment_count(std::size_t length) const;
    /// Start offset of segment nu.
    std::size_t segment_offset(std::size_t nu, std::size_t length) const;
};

/// Removes a least-squares polynomial of fixed degree from segments of fixed
/// length. The fit uses an orthonormal basis built on centered, rescaled
/// abscissae, so every segment costs O(s * (m + 1)).
class SegmentDetrender {
public:
    SegmentDetrender(std::size_t length, unsigned degree);

    std::size_t length() const { return length_; }
    unsigned degree() const { return degree_; }

    /// out = segment - best polynomial fit; out may alias segment.
    void residuals(std::span<const double> segment, std::span<double> out) const;

private:
    std::size_t length_;
    unsigned degree_;
    std::vector<double> basis_;  // (degree + 1) rows of length_ values
};

/// Detrended residuals of every segment of a profile, stored segment after
/// segment (segment_count * s values).
std::vector<double> detrended_residuals(std::span<const double> profile,
                                        const SegmentationConfig& cfg);

/// (1/s) * sum_k a_k b_k over one segment. The single-signal variance and the
/// cross covariance both go through this function, so F2(x, x) is bitwise
/// identical to the variance of x.
double segment_covariance(std::span<const double> a, std::span<const double> b);

/// Per-segment detrended covariances F2_xy(nu, s).
struct SegmentCovariances {
    std::vector<double> values;
    std::size_t scale = 0;

    std::size_t count() const { return values.size(); }
};

SegmentCovariances detrended_covariances(const Profile& x, const Profile& y,
                                         const SegmentationConfig& cfg);
/// Single-signal case x == y.
SegmentCovariances detrended_variances(const Profile& x, const SegmentationConfig& cfg);
/// Covariances from precomputed residual blocks of equal layout.
SegmentCovariances covariances_from_residuals(std::span<const double> rx,
                                              std::span<const double> ry, std::size_t scale);

struct QMoment {
    double value = 0.0;         // F^q, or F(q,s) for fluctuation_function
    std::size_t excluded = 0;   // segments dropped by the zero floor (q < 0 only)
};

/// q-th order covariance F^q = (1/M) sum sign(F2) |F2|^{q/2}. For q < 0
/// segments with |F2| < zero_floor are left out of the average.
/// Throws DegenerateInput if every segment is excluded.
QMoment q_moment(std::span<const double> covariances, double q, double zero_floor = 0.0);

/// F(q,s) = sign(F^q) |F^q|^{1/q}.
QMoment fluctuation_function(const SegmentCovariances& cov, double q, double zero_floor = 0.0);

/// Signed q-th root used by fluctuation_function.
double signed_root(double moment, double q);

struct FluctuationOptions {
    Direction direction = Direction::Forward;
    unsigned poly_degree = 2;
    /// zero_floor = zero_floor_factor * series variance (geometric mean of the
    /// two variances in the cross case).
    double zero_floor_factor = 1e-15;
};

/// F(q,s) on a (q, s) grid. Values are stored scale-major.
struct FluctuationSurface {
    std::vector<double> q_grid;
    std::vector<std::size_t> s_grid;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
    std::vector<std::size_t> excluded;
    bool single_signal = true;

    std::size_t index(std::size_t si, std::size_t qi) const { return si * q_grid.size() + qi; }
    double at(std::size_t si, std::size_t qi) const { return values[index(si, qi)]; }
    bool is_valid(std::size_t si, std::size_t qi) const { return valid[index(si, qi)] != 0; }
};

FluctuationSurface fluctuation_surface(std::span<const double> x, std::span<const double> y,
                                       const std::vector<double>& q_grid,
                                       const std::vector<std::size_t>& s_grid,
                                       const FluctuationOptions& opts = {});
FluctuationSurface fluctuation_surface(std::span<const double> x,
                                       const std::vector<double>& q_grid,
                                       const std::vector<std::size_t>& s_grid,
                                       const FluctuationOptions& opts = {});

/// q in [q_min, q_max] with the given step, 0 left out. Values are computed as
/// integer multiples of the step so the grid is exactly symmetric.
std::vector<double> make_q_grid(double q_min = -3.0, double q_max = 3.0, double step = 0.2);

/// About `count` distinct log-spaced integer scales in [s_min, length / 4].
std::vector<std::size_t> default_scales(std::size_t length, std::size_t count = 20,
                                        std::size_t s_min = 10);

/// Rows are scales, columns are q values.
void write_surface_csv(std::ostream& out, const FluctuationSurface& surface);
/// Sidecar with the number of zero-floor exclusions per grid point.
void write_exclusions_csv(std::ostream& out, const FluctuationSurface& surface);

}  // namespace mfcca
