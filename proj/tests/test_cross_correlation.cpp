#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "mfcca/cross_correlation.hpp"
#include "mfcca/error.hpp"
#include "mfcca/synth.hpp"
#include "oracles.hpp"

using namespace mfcca;

namespace {

ReturnSeries stamped(std::vector<double> v, std::string id) {
    ReturnSeries r;
    r.asset_id = std::move(id);
    r.values = std::move(v);
    for (std::size_t i = 0; i < r.values.size(); ++i)
        r.timestamps.push_back(static_cast<EpochMs>(i + 1) * 60'000);
    return r;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
}

const SegmentationConfig kCfg{32, Direction::Forward, 2};

}  // namespace

TEST_CASE("identical and negated inputs give exactly 1 and -1") {
    const auto x = binomial_cascade(12, 0.7, 3);
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    for (double q : {0.5, 1.0, 2.0, 4.0}) {
        CHECK(rho_q(x, x, q, kCfg).value == 1.0);
        CHECK(rho_q(x, neg, q, kCfg).value == -1.0);
    }
}

TEST_CASE("rho is symmetric and flips sign exactly") {
    const auto [x, y] = correlated_pair(0.4, 4096, 8);
    std::vector<double> ny(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ny[i] = -y[i];
    for (double q : {1.0, 3.0}) {
        const double r = rho_q(x, y, q, kCfg).value;
        CHECK(rho_q(y, x, q, kCfg).value == r);
        CHECK(rho_q(x, ny, q, kCfg).value == -r);
        CHECK(std::fabs(r) <= 1.0);
    }
}

TEST_CASE("rho is invariant under positive affine maps") {
    const auto [x, y] = correlated_pair(-0.3, 2048, 9);
    std::vector<double> ax(x.size()), cy(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = 4.0 * x[i] - 7.0, cy[i] = 0.02 * y[i] + 100.0;
    for (double q : {1.0, 4.0})
        CHECK(std::fabs(rho_q(ax, cy, q, kCfg).value - rho_q(x, y, q, kCfg).value) <= 1e-9);
}

TEST_CASE("independent Gaussian pairs average to zero") {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto [x, y] = correlated_pair(0.0, 1 << 15, 100 + seed);
        mean += rho_q(x, y, 1.0, kCfg).value / 50;
    }
    CHECK(std::fabs(mean) <= 0.02);
}

TEST_CASE("correlated pair with c = 0.6 gives rho(1, 32) in [0.4, 0.8]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [x, y] = correlated_pair(0.6, 1 << 15, 500 + seed);
        const double r = rho_q(x, y, 1.0, kCfg).value;
        CHECK(r >= 0.4);
        CHECK(r <= 0.8);
    }
}

TEST_CASE("q = 2 rho tracks the Pearson coefficient") {
    std::vector<double> rho, pearson;
    for (int k = 0; k < 30; ++k) {
        const double c = -0.9 + 1.8 * k / 29.0;
        const auto [x, y] = correlated_pair(c, 4096, 700 + static_cast<std::uint64_t>(k));
        rho.push_back(rho_q(x, y, 2.0, {128, Direction::Forward, 0}).value);
        pearson.push_back(oracle::pearson(x, y));
    }
    CHECK(oracle::pearson(ranks(rho), ranks(pearson)) > 0.9);
}

TEST_CASE("rho_q preconditions") {
    const auto x = iid_gaussian(256, 1), y = iid_gaussian(256, 2);
    CHECK_THROWS_AS(rho_q(x, y, 0.0, kCfg), InvalidArgument);
    CHECK_THROWS_AS(rho_q(x, y, -1.0, kCfg), InvalidArgument);
    CHECK_THROWS_AS(rho_q(x, std::vector<double>(255, 1.0), 1.0, kCfg), InvalidArgument);
    CHECK_THROWS_AS(rho_q(x, y, 1.0, {65, Direction::Forward, 2}), InvalidArgument);
    CHECK_NOTHROW(rho_q(x, y, 1.0, {64, Direction::Forward, 2}));
    CHECK_THROWS_AS(rho_q(x, std::vector<double>(256, 3.0), 1.0, kCfg), DegenerateInput);
}

TEST_CASE("matrix of two assets matches rho_q") {
    const auto [x, y] = correlated_pair(0.5, 1024, 4);
    Panel p;
    p.assets = {"A", "B"};
    p.columns = {x, y};
    for (std::size_t i = 0; i < x.size(); ++i) p.grid.push_back(static_cast<EpochMs>(i) * 60'000);
    const auto m = rho_matrix(p, 1.0, kCfg);
    const double r = rho_q(x, y, 1.0, kCfg).value;
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(1, 1) == 1.0);
    CHECK(m.at(0, 1) == r);
    CHECK(m.at(1, 0) == r);
    CHECK(m.finite_pairs() == 1);
}

TEST_CASE("identical columns give an all-ones matrix") {
    const auto x = iid_gaussian(512, 5);
    Panel p;
    p.assets = {"A", "B", "C", "D"};
    p.columns.assign(4, x);
    p.grid.resize(x.size());
    const auto m = rho_matrix(p, 4.0, kCfg, 3);
    for (double v : m.entries) CHECK(v == 1.0);
    CHECK(m.finite_pairs() == 6);
}

TEST_CASE("matrix is symmetric and flags flat columns") {
    std::vector<std::vector<double>> cols;
    for (std::uint64_t k = 0; k < 6; ++k) cols.push_back(iid_gaussian(640, 50 + k));
    cols.push_back(std::vector<double>(640, 1.5));
    std::vector<std::span<const double>> spans(cols.begin(), cols.end());
    const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f", "flat"};
    const auto mats = rho_matrices(spans, ids, {1.0, 4.0}, kCfg, 2);
    REQUIRE(mats.size() == 2);
    for (const auto& m : mats) {
        CHECK(m.degenerate_assets == std::vector<std::string>{"flat"});
        CHECK(m.finite_pairs() == 15);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j)
                if (i != 6 && j != 6) CHECK(m.at(i, j) == m.at(j, i));
        CHECK(std::isnan(m.at(0, 6)));
    }
    CHECK(mats[1].q == 4.0);
    CHECK(mats[0].at(1, 2) == rho_q(cols[1], cols[2], 1.0, kCfg).value);
}

TEST_CASE("segment floor on rolling windows") {
    CHECK(SegmentationConfig{360, Direction::Forward, 2}.segment_count(14'400) == 40);
    CHECK_NOTHROW(check_rolling_scales(14'400, {10, 360}, {1.0, 4.0}));
    CHECK_THROWS_AS(check_rolling_scales(1'440, {10, 360}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(check_rolling_scales(14'400, {10}, {0.0}), InvalidArgument);
}

TEST_CASE("rolling rho emits one record per window, scale and q") {
    const auto [x, y] = correlated_pair(0.0, 6 * 1440, 31);
    const auto rx = stamped(x, "X"), ry = stamped(y, "Y");
    RollingRhoOptions opts;
    opts.scales = {Millis{10 * 60'000}, Millis{120 * 60'000}};
    const Millis window{2 * 86'400'000LL}, step{86'400'000LL};
    const auto recs = rolling_rho(rx, ry, window, step, opts, 2);
    REQUIRE(recs.size() == 5 * 4);
    CHECK(recs[0].s == 10);
    CHECK(recs[0].q == 1.0);
    CHECK(recs[1].q == 4.0);
    CHECK(recs[2].s == 120);
    CHECK(recs[0].window_end == rx.timestamps[2 * 1440 - 1]);
    CHECK(recs[4].window_end == rx.timestamps[3 * 1440 - 1]);
    double mean = 0.0;
    for (const auto& r : recs) mean += r.value / static_cast<double>(recs.size());
    CHECK(std::fabs(mean) <= 0.05);

    std::ostringstream a, b;
    write_rho_timeline_csv(a, recs);
    write_rho_timeline_csv(b, rolling_rho(rx, ry, window, step, opts, 1));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("window_end,q,s,rho,excluded_segments\n", 0) == 0);
}

TEST_CASE("rolling rho flags flat windows and enforces the floor") {
    auto x = iid_gaussian(3 * 1440, 1);
    const auto y = iid_gaussian(3 * 1440, 2);
    std::fill(x.begin(), x.begin() + 1440, 0.0);
    RollingRhoOptions opts;
    opts.scales = {Millis{10 * 60'000}};
    opts.q_set = {1.0};
    const auto recs = rolling_rho(stamped(x, "X"), stamped(y, "Y"), Millis{86'400'000}, Millis{86'400'000}, opts);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].degenerate);
    CHECK(std::isnan(recs[0].value));
    CHECK_FALSE(recs[1].degenerate);
    opts.scales = {Millis{360 * 60'000}};
    CHECK_THROWS_AS(rolling_rho(stamped(x, "X"), stamped(y, "Y"), Millis{86'400'000}, Millis{86'400'000}, opts),
                    InvalidArgument);
}

TEST_CASE("matrix CSV has asset header row and column") {
    Panel p;
    p.assets = {"A", "B"};
    p.columns = {iid_gaussian(256, 1), iid_gaussian(256, 2)};
    p.grid.resize(256);
    std::ostringstream out;
    write_rho_matrix_csv(out, rho_matrix(p, 1.0, kCfg));
    const std::string s = out.str();
    CHECK(s.rfind("asset,A,B\nA,1,", 0) == 0);
    CHECK(s.find("\nB,") != std::string::npos);
}
