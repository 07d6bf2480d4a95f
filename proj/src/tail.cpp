#include "mfcca/tail.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"
#include "mfcca/multifractal.hpp"
#include "mfcca/parallel.hpp"

namespace mfcca {

TailMethod parse_tail_method(const std::string& name) {
    if (name == "hill") return TailMethod::Hill;
    if (name == "ls_loglog") return TailMethod::LsLogLog;
    throw InvalidArgument("unknown tail method '" + name + "'");
}

std::string to_string(TailMethod method) {
    return method == TailMethod::Hill ? "hill" : "ls_loglog";
}

std::string to_string(Regime regime) {
    return regime == Regime::LevyStable ? "levy_stable" : "unstable";
}

double hill_estimate(std::span<const double> sorted_desc, std::size_t k) {
    if (k == 0 || k >= sorted_desc.size())
        throw InvalidArgument("hill_estimate: need 0 < k < n");
    const double threshold = sorted_desc[k];
    if (!(threshold > 0.0)) throw DegenerateInput("hill_estimate: threshold magnitude is zero");
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(sorted_desc[i] / threshold);
    if (!(sum > 0.0)) throw DegenerateInput("hill_estimate: tail values are all tied");
    return static_cast<double>(k) / sum;
}

TailFit fit_tail(std::span<const double> values, double tail_fraction, TailMethod method) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw InvalidArgument("fit_tail: tail fraction must be in (0, 1)");
    std::vector<double> mags;
    mags.reserve(values.size());
    for (double v : values) {
        const double a = std::abs(v);
        if (a > 0.0 && std::isfinite(a)) mags.push_back(a);
    }
    const std::size_t n = mags.size();
    const auto k = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    if (k == 0 || k + 1 > n)
        throw InvalidArgument("fit_tail: " + std::to_string(n) +
                              " nonzero magnitudes are too few for fraction " +
                              csv::format_double(tail_fraction));
    std::partial_sort(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k + 1), mags.end(),
                      std::greater<>());

    TailFit fit;
    fit.tail_fraction = tail_fraction;
    fit.k = k;
    fit.threshold = mags[k];
    fit.method = method;
    fit.sample_size = n;
    fit.low_sample = k < kMinTailSamples;
    if (method == TailMethod::Hill) {
        fit.gamma = hill_estimate(mags, k);
    } else {
        if (k < 2) throw InvalidArgument("fit_tail: log-log regression needs k >= 2");
        double mx = 0.0, my = 0.0;
        std::vector<double> lx(k), ly(k);
        for (std::size_t i = 0; i < k; ++i) {
            lx[i] = std::log(mags[i]);
            ly[i] = std::log(static_cast<double>(i + 1) / static_cast<double>(n));
            mx += lx[i];
            my += ly[i];
        }
        mx /= static_cast<double>(k);
        my /= static_cast<double>(k);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        if (!(sxx > 0.0)) throw DegenerateInput("fit_tail: tail values are all tied");
        fit.gamma = -sxy / sxx;
        if (!(fit.gamma > 0.0)) throw DegenerateInput("fit_tail: non-decaying tail");
    }
    return fit;
}

Regime classify_regime(double gamma) {
    return gamma <= 2.0 ? Regime::LevyStable : Regime::Unstable;
}

std::string tail_flags_to_string(const TailRecord& record) {
    if (record.failed) return "failed";
    return record.fit.low_sample ? "low_sample" : "";
}

std::vector<TailRecord> rolling_tail(const ReturnSeries& series, Millis window, Millis step,
                                     double tail_fraction, TailMethod method, unsigned threads) {
    const std::size_t w = to_samples(window, series.sampling_interval, "tail window");
    const std::size_t st = to_samples(step, series.sampling_interval, "tail step");
    if (w > series.size()) throw InvalidArgument("tail window longer than series '" + series.asset_id + "'");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw InvalidArgument("tail fraction must be in (0, 1)");

    std::vector<TailRecord> out(window_count(series.size(), w, st));
    parallel_for(out.size(), threads, [&](std::size_t i) {
        const std::size_t start = i * st;
        TailRecord& rec = out[i];
        rec.window_end = series.timestamps.empty() ? static_cast<EpochMs>(start + w - 1)
                                                   : series.timestamps[start + w - 1];
        rec.fit.tail_fraction = tail_fraction;
        rec.fit.method = method;
        try {
            rec.fit = fit_tail(std::span<const double>(series.values).subspan(start, w),
                               tail_fraction, method);
            rec.regime = classify_regime(rec.fit);
        } catch (const Error&) {
            rec.failed = true;
            rec.fit.gamma = std::nan("");
        }
    });
    return out;
}

void write_tail_timeline_csv(std::ostream& out, const std::vector<TailRecord>& records) {
    csv::write_row(out, {"window_end", "gamma", "k", "threshold", "method", "regime", "flags"});
    for (const auto& r : records)
        csv::write_row(out, {std::to_string(r.window_end), csv::format_double(r.fit.gamma),
                             std::to_string(r.fit.k), csv::format_double(r.fit.threshold),
                             to_string(r.fit.method), r.failed ? "" : to_string(r.regime),
                             tail_flags_to_string(r)});
}

}  // namespace mfcca
