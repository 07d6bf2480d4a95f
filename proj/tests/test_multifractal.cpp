#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mfcca/error.hpp"
#include "mfcca/multifractal.hpp"
#include "mfcca/synth.hpp"
#include "oracles.hpp"

using namespace mfcca;

namespace {

FluctuationSurface power_law_surface(const std::vector<double>& q, const std::vector<std::size_t>& s,
                                     double (*h)(double)) {
    FluctuationSurface f;
    f.q_grid = q;
    f.s_grid = s;
    for (std::size_t si : s)
        for (double qq : q) f.values.push_back(2.0 * std::pow(static_cast<double>(si), h(qq)));
    f.valid.assign(f.values.size(), 1);
    f.excluded.assign(f.values.size(), 0);
    return f;
}

ReturnSeries stamped(std::vector<double> v, Millis interval) {
    ReturnSeries r;
    r.asset_id = "S";
    r.values = std::move(v);
    r.sampling_interval = interval;
    for (std::size_t i = 0; i < r.values.size(); ++i)
        r.timestamps.push_back(static_cast<EpochMs>(i + 1) * interval.count());
    return r;
}

std::vector<double> linear_h(const std::vector<double>& q, double a, double b, double c = 0.0) {
    std::vector<double> h;
    for (double v : q) h.push_back(a + b * v + c * v * v);
    return h;
}

}  // namespace

TEST_CASE("exact power law gives constant exponents with r2 = 1") {
    const auto q = make_q_grid();
    const std::vector<std::size_t> s{10, 20, 40, 80, 160, 320};
    const auto e = fit_scaling(power_law_surface(q, s, [](double) { return 0.7; }), {10, 320});
    CHECK(e.scales_used == 6);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(e.exponent[i] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(e.r2[i] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.scaling[i]);
    }
    const auto sp = singularity_spectrum(e);
    CHECK(sp.delta_alpha <= 0.02);
    CHECK(sp.delta_alpha >= 0.0);
}

TEST_CASE("fit range selects scales and needs four of them") {
    const std::vector<std::size_t> s{10, 20, 40, 80, 160, 320};
    const auto surf = power_law_surface({1.0, 2.0}, s, [](double q) { return 0.5 + 0.01 * q; });
    const auto e = fit_scaling(surf, {20, 160});
    CHECK(e.scales_used == 4);
    CHECK(e.exponent[1] == doctest::Approx(0.52));
    CHECK_THROWS_AS(fit_scaling(surf, {40, 160}), InvalidArgument);
    CHECK(default_fit_range(43'200).s_min == 10);
    CHECK(default_fit_range(43'200).s_max == 4'320);
}

TEST_CASE("non-positive F marks that q unusable without failing the fit") {
    const std::vector<std::size_t> s{10, 20, 40, 80};
    auto surf = power_law_surface({-1.0, 1.0}, s, [](double) { return 0.5; });
    surf.values[surf.index(2, 0)] = 0.0;
    const auto e = fit_scaling(surf, {10, 80});
    CHECK_FALSE(e.usable[0]);
    CHECK(e.usable[1]);
}

TEST_CASE("white noise has h(2) near 1/2") {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = iid_gaussian(1 << 16, 300 + seed);
        const auto e = fit_scaling(fluctuation_surface(x, {2.0}, default_scales(x.size())),
                                   default_fit_range(x.size()));
        mean += e.exponent[0] / 20;
    }
    CHECK(std::fabs(mean - 0.5) <= 0.03);
}

TEST_CASE("cascade h(q) follows the analytic curve") {
    const std::vector<double> q{-3, -2, -1, 1, 2, 3};
    std::vector<double> mean(q.size(), 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = binomial_cascade(16, 0.7, 40 + seed);
        const auto e = fit_scaling(fluctuation_surface(x, q, default_scales(x.size())),
                                   default_fit_range(x.size()));
        for (std::size_t i = 0; i < q.size(); ++i) mean[i] += e.exponent[i] / 10;
    }
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::fabs(mean[i] - oracle::cascade_h(q[i], 0.7)) <= 0.05);
}

TEST_CASE("constant h collapses the spectrum to a point") {
    const auto q = make_q_grid();
    const auto sp = singularity_spectrum(q, std::vector<double>(q.size(), 0.5));
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(sp.alpha[i] == doctest::Approx(0.5));
        CHECK(sp.f_alpha[i] == doctest::Approx(1.0));
    }
    CHECK(sp.delta_alpha == 0.0);
    CHECK(sp.asymmetry == 0.0);
}

TEST_CASE("linear h gives the closed-form spectrum") {
    const auto q = make_q_grid();
    const auto sp = singularity_spectrum(q, linear_h(q, 0.5, -0.05));
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(sp.alpha[i] == doctest::Approx(0.5 - 0.1 * q[i]).epsilon(1e-12));
        CHECK(sp.f_alpha[i] == doctest::Approx(1.0 - 0.05 * q[i] * q[i]).epsilon(1e-12));
    }
    CHECK(sp.alpha_min == doctest::Approx(0.2));
    CHECK(sp.alpha_max == doctest::Approx(0.8));
    CHECK(sp.alpha0 == doctest::Approx(0.5));
    CHECK(sp.delta_alpha == doctest::Approx(0.6));
    CHECK(std::fabs(sp.asymmetry) <= 1e-12);
    CHECK(sp.monotone);
    CHECK(sp.f_bounded);
}

TEST_CASE("asymmetry sign follows the longer shoulder") {
    const auto q = make_q_grid();
    const auto left = singularity_spectrum(q, linear_h(q, 0.5, -0.05, -0.005));
    const auto right = singularity_spectrum(q, linear_h(q, 0.5, -0.05, 0.005));
    CHECK(left.monotone);
    CHECK(right.monotone);
    CHECK(left.asymmetry < -0.3);
    CHECK(right.asymmetry > 0.3);
    CHECK(left.asymmetry >= -1.0);
    CHECK(right.asymmetry <= 1.0);
}

TEST_CASE("non-monotone alpha is flagged, not fatal") {
    const auto q = make_q_grid();
    const auto sp = singularity_spectrum(q, linear_h(q, 0.5, 0.0, 0.02));
    CHECK_FALSE(sp.monotone);
    CHECK(sp.delta_alpha >= 0.0);
    CHECK_THROWS_AS(singularity_spectrum({1, 2, 3, 4}, {0.5, 0.5, 0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(singularity_spectrum({1, 3, 2, 4, 5}, {0.5, 0.5, 0.5, 0.5, 0.5}), InvalidArgument);
}

TEST_CASE("Legendre maximum stays near 1 for scaling inputs") {
    for (const auto& x : {fgn(0.6, 1 << 15, 4), binomial_cascade(15, 0.65, 4)}) {
        const auto sp = window_spectrum(x, SpectrumOptions{});
        const double f_max = *std::max_element(sp.f_alpha.begin(), sp.f_alpha.end());
        CHECK(f_max >= 0.98);
        CHECK(f_max <= 1.0 + 1e-6);
    }
}

TEST_CASE("window count arithmetic") {
    CHECK(window_count(100, 30, 5) == 15);
    CHECK(window_count(30, 30, 5) == 1);
    CHECK(window_count(29, 30, 5) == 0);
}

TEST_CASE("rolling spectrum over 100 days with 30 day windows") {
    const Millis hour{3'600'000};
    const auto r = stamped(fgn(0.5, 4096, 12), hour);
    ReturnSeries hundred = r;
    hundred.values.resize(2400);
    hundred.timestamps.resize(2400);
    const auto tl = rolling_spectrum(hundred, parse_duration("30d"), parse_duration("5d"));
    REQUIRE(tl.records.size() == 15);
    CHECK(tl.records.front().window_end == hundred.timestamps[719]);
    CHECK(tl.records.back().window_end == hundred.timestamps.back());
    for (const auto& rec : tl.records) CHECK(rec.delta_alpha >= 0.0);
}

TEST_CASE("stitched monofractal and cascade halves") {
    auto mono = fgn(0.5, 1 << 15, 6);
    auto casc = binomial_cascade(15, 0.75, 6);
    zscore_in_place(casc);
    std::vector<double> x = mono;
    x.insert(x.end(), casc.begin(), casc.end());
    const auto r = stamped(x, kOneMinute);
    const Millis window{8192 * 60'000}, step{4096 * 60'000};
    const auto tl = rolling_spectrum(r, window, step, {}, 2);
    REQUIRE(tl.records.size() == 15);
    double first = 0.0, second = 0.0;
    for (std::size_t w = 0; w < tl.records.size(); ++w) {
        const std::size_t start = w * 4096;
        const std::span<const double> slice(x.data() + start, 8192);
        const auto direct = window_spectrum(slice, SpectrumOptions{});
        CHECK(tl.records[w].delta_alpha == direct.delta_alpha);
        if (start + 8192 <= x.size() / 2) first = std::max(first, tl.records[w].delta_alpha);
        if (start >= x.size() / 2) second = std::max(second, tl.records[w].delta_alpha);
    }
    CHECK(first < 0.15);
    CHECK(second > 0.5);
}

TEST_CASE("flat windows become flagged records") {
    auto x = iid_gaussian(4000, 1);
    for (std::size_t i = 1000; i < 2000; ++i) x[i] = 0.0;
    const auto r = stamped(x, kOneMinute);
    const auto tl = rolling_spectrum(r, Millis{1000 * 60'000}, Millis{500 * 60'000});
    REQUIRE(tl.records.size() == 7);
    CHECK((tl.records[2].flags & kSpectrumDegenerate) != 0);
    CHECK(std::isnan(tl.records[2].delta_alpha));
    CHECK((tl.records[0].flags & kSpectrumDegenerate) == 0);
    CHECK(spectrum_flags_to_string(kSpectrumDegenerate | kSpectrumNonScaling) == "degenerate|non_scaling");
}

TEST_CASE("rolling spectrum is bit-identical across thread counts") {
    const auto r = stamped(binomial_cascade(14, 0.7, 2), kOneMinute);
    const Millis w{4096 * 60'000}, st{1024 * 60'000};
    std::ostringstream a, b;
    write_spectrum_timeline_csv(a, rolling_spectrum(r, w, st, {}, 1));
    write_spectrum_timeline_csv(b, rolling_spectrum(r, w, st, {}, 4));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("window_end,alpha_min,alpha0,alpha_max,delta_alpha,asymmetry,min_r2,flags\n", 0) == 0);
}

TEST_CASE("rolling spectrum rejects impossible configurations") {
    const auto r = stamped(iid_gaussian(1000, 1), kOneMinute);
    CHECK_THROWS_AS(rolling_spectrum(r, Millis{2000 * 60'000}, kOneMinute), InvalidArgument);
    CHECK_THROWS_AS(rolling_spectrum(r, Millis{500 * 60'000}, Millis{0}), InvalidArgument);
    SpectrumOptions bad;
    bad.q_grid = {-1.0, 0.0, 1.0, 2.0, 3.0};
    CHECK_THROWS_AS(rolling_spectrum(r, Millis{500 * 60'000}, kOneMinute, bad), InvalidArgument);
}
