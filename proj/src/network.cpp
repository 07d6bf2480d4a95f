#include "mfcca/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include "mfcca/csv.hpp"
#include "mfcca/error.hpp"
#include "mfcca/multifractal.hpp"
#include "mfcca/parallel.hpp"

namespace mfcca {

double rho_to_distance(double rho) { return std::sqrt(2.0 * (1.0 - rho)); }

DistanceMatrix distance_matrix(const RhoMatrix& rho) {
    const std::size_t n = rho.size();
    DistanceMatrix d;
    d.assets = rho.assets;
    d.q = rho.q;
    d.s = rho.s;
    d.entries.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double r = rho.at(i, j);
            if (!(std::abs(r) <= 1.0 + kRhoClampTolerance))
                throw InvalidArgument("distance_matrix: rho(" + rho.assets[i] + ", " +
                                      rho.assets[j] + ") = " + csv::format_double(r) +
                                      " lies outside [-1, 1]");
            r = std::clamp(r, -1.0, 1.0);
            d.entries[i * n + j] = rho_to_distance(r);
        }
    }
    return d;
}

MstResult prim_mst(const std::vector<double>& weights, std::size_t n,
                   const std::vector<std::string>& assets) {
    if (n < 2) throw InvalidArgument("mst: need at least 2 nodes");
    if (weights.size() != n * n) throw InvalidArgument("mst: weight matrix has wrong size");
    for (double w : weights)
        if (!std::isfinite(w)) throw InvalidArgument("mst: non-finite distance");

    MstResult res;
    if (assets.empty()) {
        for (std::size_t i = 0; i < n; ++i) res.assets.push_back(std::to_string(i));
    } else {
        if (assets.size() != n) throw InvalidArgument("mst: asset ids do not match matrix");
        res.assets = assets;
    }
    const std::size_t root = static_cast<std::size_t>(
        std::min_element(res.assets.begin(), res.assets.end()) - res.assets.begin());

    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<double> key(n, inf);
    std::vector<std::size_t> parent(n, none);
    std::vector<char> in_tree(n, 0);
    res.degrees.assign(n, 0);

    std::size_t current = root;
    in_tree[root] = 1;
    for (std::size_t added = 1; added < n; ++added) {
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const double w = weights[current * n + v];
            if (w < key[v] || (w == key[v] && current < parent[v])) {
                key[v] = w;
                parent[v] = current;
            }
        }
        std::size_t best = none;
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && (best == none || key[v] < key[best])) best = v;
        in_tree[best] = 1;
        res.edges.push_back(MstEdge{parent[best], best, key[best]});
        ++res.degrees[parent[best]];
        ++res.degrees[best];
        res.total_weight += key[best];
        current = best;
    }
    return res;
}

MstResult mst(const DistanceMatrix& d) { return prim_mst(d.entries, d.size(), d.assets); }

double mean_path_length(const MstResult& tree, PathMetric metric) {
    const std::size_t n = tree.assets.size();
    if (n < 2) return 0.0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : tree.edges) {
        adj[e.parent].emplace_back(e.child, e.weight);
        adj[e.child].emplace_back(e.parent, e.weight);
    }
    // Integer hop totals keep the closed forms exact.
    std::uint64_t hop_total = 0;
    double weight_total = 0.0;
    std::vector<std::size_t> hops(n);
    std::vector<double> dist(n);
    std::vector<char> seen(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(seen.begin(), seen.end(), 0);
        std::queue<std::size_t> bfs;
        bfs.push(src);
        seen[src] = 1;
        hops[src] = 0;
        dist[src] = 0.0;
        while (!bfs.empty()) {
            const std::size_t u = bfs.front();
            bfs.pop();
            for (const auto& [v, w] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                hops[v] = hops[u] + 1;
                dist[v] = dist[u] + w;
                bfs.push(v);
            }
        }
        for (std::size_t v = src + 1; v < n; ++v) {
            if (!seen[v]) throw InvalidArgument("mean_path_length: tree is not connected");
            hop_total += hops[v];
            weight_total += dist[v];
        }
    }
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return metric == PathMetric::Hops ? static_cast<double>(hop_total) / pairs
                                      : weight_total / pairs;
}

NetworkMetrics mst_metrics(const MstResult& tree, const RhoMatrix& rho, const MetricOptions& opts) {
    if (tree.assets != rho.assets)
        throw InvalidArgument("mst_metrics: tree and rho matrix cover different assets");
    const std::size_t n = tree.assets.size();
    NetworkMetrics m;
    m.mean_path_length = mean_path_length(tree, opts.path);

    double sum = 0.0;
    std::size_t count = 0;
    if (opts.rho_average == RhoAverage::AllPairs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                sum += rho.at(i, j);
                ++count;
            }
    } else {
        for (const auto& e : tree.edges) {
            sum += rho.at(e.parent, e.child);
            ++count;
        }
    }
    m.mean_rho = count ? sum / static_cast<double>(count) : 0.0;

    std::size_t hub = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (tree.degrees[i] > tree.degrees[hub] ||
            (tree.degrees[i] == tree.degrees[hub] && tree.assets[i] < tree.assets[hub]))
            hub = i;
    }
    m.k_max = tree.degrees[hub];
    m.hub_id = tree.assets[hub];
    return m;
}

std::vector<MstRecord> rolling_mst(const Panel& returns, Millis window, Millis step,
                                   const RollingMstOptions& opts, unsigned threads) {
    if (returns.size() < 2) throw InvalidArgument("rolling_mst: need at least 2 assets");
    const std::size_t w = to_samples(window, returns.interval, "mst window");
    const std::size_t st = to_samples(step, returns.interval, "mst step");
    std::vector<std::size_t> scales;
    for (Millis s : opts.scales) scales.push_back(to_samples(s, returns.interval, "mst scale"));
    check_rolling_scales(w, scales, opts.q_set);
    if (w > returns.length()) throw InvalidArgument("rolling_mst: window longer than panel");

    const std::size_t windows = window_count(returns.length(), w, st);
    const std::size_t per_window = scales.size() * opts.q_set.size();
    std::vector<MstRecord> out(windows * per_window);
    parallel_for(windows, threads, [&](std::size_t wi) {
        const std::size_t start = wi * st;
        std::vector<std::span<const double>> cols;
        for (const auto& c : returns.columns) cols.push_back(std::span<const double>(c).subspan(start, w));
        for (std::size_t si = 0; si < scales.size(); ++si) {
            const SegmentationConfig cfg{scales[si], opts.direction, opts.poly_degree};
            const auto mats = rho_matrices(cols, returns.assets, opts.q_set, cfg, 1);
            for (std::size_t k = 0; k < opts.q_set.size(); ++k) {
                MstRecord& rec = out[wi * per_window + si * opts.q_set.size() + k];
                rec.window_end = returns.grid[start + w - 1];
                rec.q = opts.q_set[k];
                rec.s = scales[si];
                if (!mats[k].degenerate_assets.empty()) {
                    rec.degenerate = true;
                    rec.metrics.mean_path_length = std::nan("");
                    rec.metrics.mean_rho = std::nan("");
                    continue;
                }
                const MstResult tree = mst(distance_matrix(mats[k]));
                rec.metrics = mst_metrics(tree, mats[k], opts.metrics);
                if (opts.keep_edges) rec.edges = tree.edges;
            }
        }
    });
    return out;
}

void write_mst_metrics_csv(std::ostream& out, const std::vector<MstRecord>& records) {
    csv::write_row(out, {"window_end", "q", "s", "mean_L", "mean_rho", "k_max", "hub_id"});
    for (const auto& r : records)
        csv::write_row(out, {std::to_string(r.window_end), csv::format_double(r.q),
                             std::to_string(r.s), csv::format_double(r.metrics.mean_path_length),
                             csv::format_double(r.metrics.mean_rho),
                             r.degenerate ? "" : std::to_string(r.metrics.k_max), r.metrics.hub_id});
}

void write_edge_list_csv(std::ostream& out, const std::vector<std::string>& assets,
                         const std::vector<MstEdge>& edges) {
    csv::write_row(out, {"parent", "child", "weight"});
    for (const auto& e : edges)
        csv::write_row(out, {assets.at(e.parent), assets.at(e.child), csv::format_double(e.weight)});
}

void write_pajek(std::ostream& out, const std::vector<std::string>& assets,
                 const std::vector<MstEdge>& edges) {
    out << "*Vertices " << assets.size() << '\n';
    for (std::size_t i = 0; i < assets.size(); ++i) {
        std::string label = assets[i];
        std::replace(label.begin(), label.end(), '"', '\'');
        out << (i + 1) << " \"" << label << "\"\n";
    }
    out << "*Edges\n";
    for (const auto& e : edges)
        out << (e.parent + 1) << ' ' << (e.child + 1) << ' ' << csv::format_double(e.weight) << '\n';
}

}  // namespace mfcca
