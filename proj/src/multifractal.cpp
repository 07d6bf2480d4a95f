#include "mfcca/multifractal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"
#include "mfcca/parallel.hpp"

namespace mfcca {
namespace {

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.r2 = syy > 0.0 ? std::min(1.0, sxy * sxy / (sxx * syy)) : 1.0;
    return fit;
}

}  // namespace

FitRange default_fit_range(std::size_t length) { return FitRange{10, length / 10}; }

ScalingExponents fit_scaling(const FluctuationSurface& surface, FitRange range, double r2_min) {
    std::vector<std::size_t> picked;
    for (std::size_t si = 0; si < surface.s_grid.size(); ++si)
        if (surface.s_grid[si] >= range.s_min && surface.s_grid[si] <= range.s_max)
            picked.push_back(si);
    if (picked.size() < 4)
        throw InvalidArgument("fit_scaling: only " + std::to_string(picked.size()) +
                              " scales inside [" + std::to_string(range.s_min) + ", " +
                              std::to_string(range.s_max) + "], need at least 4");

    ScalingExponents out;
    const std::size_t nq = surface.q_grid.size();
    out.q_grid = surface.q_grid;
    out.exponent.assign(nq, std::nan(""));
    out.r2.assign(nq, std::nan(""));
    out.usable.assign(nq, 0);
    out.scaling.assign(nq, 0);
    out.mixed_sign.assign(nq, 0);
    out.fit_range = range;
    out.scales_used = picked.size();

    std::vector<double> log_s, log_f;
    for (std::size_t si : picked) log_s.push_back(std::log(static_cast<double>(surface.s_grid[si])));
    for (std::size_t qi = 0; qi < nq; ++qi) {
        log_f.clear();
        bool ok = true;
        bool saw_pos = false, saw_neg = false;
        for (std::size_t si : picked) {
            const double f = surface.at(si, qi);
            if (!surface.is_valid(si, qi) || f == 0.0 || (surface.single_signal && f < 0.0)) {
                ok = false;
                break;
            }
            (f > 0.0 ? saw_pos : saw_neg) = true;
            log_f.push_back(std::log(std::abs(f)));
        }
        if (!ok) continue;
        const LineFit fit = ols(log_s, log_f);
        out.exponent[qi] = fit.slope;
        out.r2[qi] = fit.r2;
        out.usable[qi] = 1;
        out.scaling[qi] = fit.r2 >= r2_min ? 1 : 0;
        out.mixed_sign[qi] = saw_pos && saw_neg ? 1 : 0;
    }
    return out;
}

SingularitySpectrum singularity_spectrum(const std::vector<double>& q, const std::vector<double>& h) {
    const std::size_t n = q.size();
    if (n != h.size()) throw InvalidArgument("singularity_spectrum: q and h sizes differ");
    if (n < 5) throw InvalidArgument("singularity_spectrum: need h(q) on at least 5 q values");
    for (std::size_t i = 1; i < n; ++i)
        if (!(q[i] > q[i - 1])) throw InvalidArgument("singularity_spectrum: q grid must be increasing");

    SingularitySpectrum sp;
    sp.q = q;
    sp.h = h;
    sp.alpha.resize(n);
    sp.f_alpha.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? i : i + 1;
        const double dh = (h[hi] - h[lo]) / (q[hi] - q[lo]);
        sp.alpha[i] = h[i] + q[i] * dh;
        sp.f_alpha[i] = q[i] * (sp.alpha[i] - h[i]) + 1.0;
        if (sp.f_alpha[i] > 1.0 + 1e-6) sp.f_bounded = false;
        if (i > 0 && sp.alpha[i] > sp.alpha[i - 1] + 1e-12) sp.monotone = false;
    }

    // alpha at q = 0 by linear interpolation between the grid points around 0
    // (extrapolation from the nearest pair if the grid does not straddle 0).
    std::size_t right = static_cast<std::size_t>(
        std::upper_bound(q.begin(), q.end(), 0.0) - q.begin());
    right = std::clamp<std::size_t>(right, 1, n - 1);
    const std::size_t left = right - 1;
    sp.alpha0 = sp.alpha[left] +
                (0.0 - q[left]) * (sp.alpha[right] - sp.alpha[left]) / (q[right] - q[left]);

    const auto [mn, mx] = std::minmax_element(sp.alpha.begin(), sp.alpha.end());
    sp.alpha_min = *mn;
    sp.alpha_max = *mx;
    sp.delta_alpha = sp.alpha_max - sp.alpha_min;
    sp.asymmetry = sp.delta_alpha > 0.0
                       ? ((sp.alpha_max - sp.alpha0) - (sp.alpha0 - sp.alpha_min)) / sp.delta_alpha
                       : 0.0;
    return sp;
}

SingularitySpectrum singularity_spectrum(const ScalingExponents& exps) {
    std::vector<double> q, h;
    for (std::size_t i = 0; i < exps.q_grid.size(); ++i) {
        if (!exps.usable[i]) continue;
        q.push_back(exps.q_grid[i]);
        h.push_back(exps.exponent[i]);
    }
    return singularity_spectrum(q, h);
}

std::string spectrum_flags_to_string(std::uint32_t flags) {
    static constexpr std::pair<std::uint32_t, const char*> names[] = {
        {kSpectrumDegenerate, "degenerate"},
        {kSpectrumNonScaling, "non_scaling"},
        {kSpectrumNonConcave, "non_concave"},
        {kSpectrumFAboveOne, "f_above_one"},
        {kSpectrumFitFailed, "fit_failed"},
    };
    std::string out;
    for (const auto& [bit, name] : names) {
        if (!(flags & bit)) continue;
        if (!out.empty()) out += '|';
        out += name;
    }
    return out;
}

std::size_t window_count(std::size_t length, std::size_t window, std::size_t step) {
    if (step == 0) throw InvalidArgument("window step must be positive");
    if (window == 0 || window > length) return 0;
    return (length - window) / step + 1;
}

namespace {

struct ResolvedGrid {
    std::vector<std::size_t> scales;
    FitRange range;
};

ResolvedGrid resolve_grid(std::size_t n, const SpectrumOptions& opts) {
    ResolvedGrid g;
    g.scales = opts.s_grid.empty() ? default_scales(n) : opts.s_grid;
    g.range = opts.fit_range.value_or(default_fit_range(n));
    return g;
}

}  // namespace

SingularitySpectrum window_spectrum(std::span<const double> window, const SpectrumOptions& opts,
                                    ScalingExponents* exps_out) {
    std::vector<double> x(window.begin(), window.end());
    if (!zscore_in_place(x)) throw DegenerateInput("window has constant data");
    const ResolvedGrid g = resolve_grid(x.size(), opts);
    const FluctuationSurface surf = fluctuation_surface(x, opts.q_grid, g.scales, opts.fluctuation);
    ScalingExponents exps = fit_scaling(surf, g.range, opts.r2_min);
    SingularitySpectrum sp = singularity_spectrum(exps);
    if (exps_out) *exps_out = std::move(exps);
    return sp;
}

SpectrumTimeline rolling_spectrum(const ReturnSeries& series, Millis window, Millis step,
                                  const SpectrumOptions& opts, unsigned threads) {
    const std::size_t w = to_samples(window, series.sampling_interval, "spectrum window");
    const std::size_t st = to_samples(step, series.sampling_interval, "spectrum step");
    if (w > series.size())
        throw InvalidArgument("spectrum window longer than series '" + series.asset_id + "'");
    for (double q : opts.q_grid)
        if (q == 0.0) throw InvalidArgument("spectrum q grid must not contain 0");
    {
        // Fail on configuration problems before touching any window.
        const ResolvedGrid g = resolve_grid(w, opts);
        if (*std::max_element(g.scales.begin(), g.scales.end()) > w / 4)
            throw InvalidArgument("spectrum scales exceed window / 4");
        std::size_t in_range = 0;
        for (std::size_t s : g.scales) in_range += s >= g.range.s_min && s <= g.range.s_max;
        if (in_range < 4) throw InvalidArgument("spectrum fit range holds fewer than 4 scales");
        SegmentationConfig{g.scales.front(), opts.fluctuation.direction,
                           opts.fluctuation.poly_degree}.validate();
    }

    SpectrumTimeline tl;
    tl.asset_id = series.asset_id;
    tl.records.resize(window_count(series.size(), w, st));
    parallel_for(tl.records.size(), threads, [&](std::size_t i) {
        const std::size_t start = i * st;
        SpectrumRecord& rec = tl.records[i];
        rec.window_end = series.timestamps.empty()
                             ? static_cast<EpochMs>(start + w - 1)
                             : series.timestamps[start + w - 1];
        try {
            ScalingExponents exps;
            const auto sp = window_spectrum(
                std::span<const double>(series.values).subspan(start, w), opts, &exps);
            rec.alpha_min = sp.alpha_min;
            rec.alpha0 = sp.alpha0;
            rec.alpha_max = sp.alpha_max;
            rec.delta_alpha = sp.delta_alpha;
            rec.asymmetry = sp.asymmetry;
            double min_r2 = 1.0;
            for (std::size_t k = 0; k < exps.q_grid.size(); ++k) {
                if (!exps.usable[k]) continue;
                min_r2 = std::min(min_r2, exps.r2[k]);
                if (!exps.scaling[k]) rec.flags |= kSpectrumNonScaling;
            }
            rec.min_r2 = min_r2;
            if (!sp.monotone) rec.flags |= kSpectrumNonConcave;
            if (!sp.f_bounded) rec.flags |= kSpectrumFAboveOne;
        } catch (const DegenerateInput&) {
            rec.flags |= kSpectrumDegenerate;
        } catch (const InvalidArgument&) {
            rec.flags |= kSpectrumFitFailed;
        }
    });
    return tl;
}

void write_spectrum_timeline_csv(std::ostream& out, const SpectrumTimeline& timeline) {
    csv::write_row(out, {"window_end", "alpha_min", "alpha0", "alpha_max", "delta_alpha",
                         "asymmetry", "min_r2", "flags"});
    for (const auto& r : timeline.records)
        csv::write_row(out, {std::to_string(r.window_end), csv::format_double(r.alpha_min),
                             csv::format_double(r.alpha0), csv::format_double(r.alpha_max),
                             csv::format_double(r.delta_alpha), csv::format_double(r.asymmetry),
                             csv::format_double(r.min_r2), spectrum_flags_to_string(r.flags)});
}

}  // namespace mfcca
