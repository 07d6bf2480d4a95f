#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mfcca/error.hpp"
#include "mfcca/synth.hpp"
#include "mfcca/tail.hpp"

using namespace mfcca;

namespace {

ReturnSeries stamped(std::vector<double> v) {
    ReturnSeries r;
    r.asset_id = "T";
    r.values = std::move(v);
    for (std::size_t i = 0; i < r.values.size(); ++i)
        r.timestamps.push_back(static_cast<EpochMs>(i + 1) * 60'000);
    return r;
}

}  // namespace

TEST_CASE("Hill hand fixture") {
    const double expected = 3.0 / (6.0 * std::log(2.0));
    const std::vector<double> sorted{8, 4, 2, 1};
    CHECK(std::fabs(hill_estimate(sorted, 3) - expected) <= 1e-12);
    const std::vector<double> shuffled{2, -8, 1, 4};
    const auto fit = fit_tail(shuffled, 0.75);
    CHECK(fit.k == 3);
    CHECK(fit.threshold == 1.0);
    CHECK(std::fabs(fit.gamma - expected) <= 1e-12);
    CHECK(fit.low_sample);
    CHECK(fit.sample_size == 4);
}

TEST_CASE("Pareto samples recover gamma") {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        mean += fit_tail(pareto(3.0, 50'000, 60 + seed), 0.02).gamma / 20;
    CHECK(std::fabs(mean - 3.0) <= 0.15);
    const auto ls = fit_tail(pareto(3.0, 50'000, 1), 0.02, TailMethod::LsLogLog);
    CHECK(ls.method == TailMethod::LsLogLog);
    CHECK(std::fabs(ls.gamma - 3.0) <= 0.5);
}

TEST_CASE("exact Pareto order statistics") {
    const std::size_t n = 100'000;
    const double gamma = 2.5;
    std::vector<double> x(n);
    for (std::size_t i = 1; i <= n; ++i)
        x[i - 1] = std::pow(static_cast<double>(i) / static_cast<double>(n), -1.0 / gamma);
    const auto fit = fit_tail(x, 0.01);
    CHECK(fit.k == 1000);
    CHECK_FALSE(fit.low_sample);
    CHECK(std::fabs(fit.gamma - gamma) <= 0.02 * gamma);
}

TEST_CASE("Hill is scale invariant") {
    const auto x = pareto(2.2, 5000, 7);
    const double base = fit_tail(x, 0.05).gamma;
    std::vector<double> pow2(x.size()), any(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) pow2[i] = 64.0 * x[i], any[i] = 0.37 * x[i];
    CHECK(fit_tail(pow2, 0.05).gamma == base);
    CHECK(std::fabs(fit_tail(any, 0.05).gamma - base) <= 1e-12 * base);
}

TEST_CASE("zeros are dropped and short samples rejected") {
    auto x = pareto(3.0, 1000, 2);
    x.insert(x.end(), 5000, 0.0);
    const auto fit = fit_tail(x, 0.01);
    CHECK(fit.sample_size == 1000);
    CHECK(fit.k == 10);
    CHECK(fit.low_sample);
    CHECK_THROWS_AS(fit_tail(std::vector<double>{0.0, 0.0, 1.0}, 0.5), InvalidArgument);
    CHECK_THROWS_AS(fit_tail(std::vector<double>(100, 2.0), 0.1), DegenerateInput);
    CHECK_THROWS_AS(fit_tail(x, 0.0), InvalidArgument);
}

TEST_CASE("regime boundary is inclusive at 2") {
    CHECK(classify_regime(1.8) == Regime::LevyStable);
    CHECK(classify_regime(3.2) == Regime::Unstable);
    CHECK(classify_regime(2.0) == Regime::LevyStable);
    CHECK(classify_regime(std::nextafter(2.0, 3.0)) == Regime::Unstable);
    CHECK(to_string(Regime::LevyStable) == "levy_stable");
    CHECK(parse_tail_method("ls_loglog") == TailMethod::LsLogLog);
    CHECK_THROWS_AS(parse_tail_method("kde"), InvalidArgument);
}

TEST_CASE("Gaussian tails look thin") {
    const auto fit = fit_tail(iid_gaussian(100'000, 3), 0.01);
    CHECK(fit.gamma > 4.0);
}

TEST_CASE("stitched heavy and light tails cross the boundary once") {
    auto x = pareto(1.8, 40'000, 11);
    const auto y = pareto(3.2, 40'000, 12);
    x.insert(x.end(), y.begin(), y.end());
    const auto recs = rolling_tail(stamped(x), Millis{20'000 * 60'000LL}, Millis{5'000 * 60'000LL}, 0.02,
                                   TailMethod::Hill, 2);
    REQUIRE(recs.size() == 13);
    int crossings = 0;
    for (std::size_t i = 1; i < recs.size(); ++i) crossings += recs[i].regime != recs[i - 1].regime;
    CHECK(crossings == 1);
    CHECK(recs.front().regime == Regime::LevyStable);
    CHECK(recs.back().regime == Regime::Unstable);
    CHECK(recs.front().window_end == 20'000 * 60'000LL);
}

TEST_CASE("rolling tail flags and CSV") {
    auto x = iid_gaussian(3000, 5);
    std::fill(x.begin(), x.begin() + 1000, 0.0);
    const auto recs = rolling_tail(stamped(x), Millis{1000 * 60'000}, Millis{1000 * 60'000}, 0.01);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].failed);
    CHECK(tail_flags_to_string(recs[0]) == "failed");
    CHECK(recs[1].fit.low_sample);
    CHECK(tail_flags_to_string(recs[1]) == "low_sample");
    std::ostringstream out;
    write_tail_timeline_csv(out, recs);
    CHECK(out.str().rfind("window_end,gamma,k,threshold,method,regime,flags\n", 0) == 0);
}
