#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfcca/cross_correlation.hpp"
#include "mfcca/series.hpp"

namespace mfcca {

/// d = sqrt(2 (1 - rho)); 0 for perfect correlation, sqrt(2) for
/// independence, 2 for perfect anticorrelation.
double rho_to_distance(double rho);

inline constexpr double kRhoClampTolerance = 1e-9;

struct DistanceMatrix {
    std::vector<std::string> assets;
    std::vector<double> entries;  // row-major N x N
    double q = 1.0;
    std::size_t s = 0;

    std::size_t size() const { return assets.size(); }
    double at(std::size_t i, std::size_t j) const { return entries[i * assets.size() + j]; }
};

/// Entrywise transform. Values within kRhoClampTolerance outside [-1, 1] are
/// clamped; anything further out (or NaN) throws InvalidArgument naming the pair.
DistanceMatrix distance_matrix(const RhoMatrix& rho);

struct MstEdge {
    std::size_t parent = 0;
    std::size_t child = 0;
    double weight = 0.0;
};

struct MstResult {
    std::vector<std::string> assets;
    std::vector<MstEdge> edges;      // in the order Prim attached them
    std::vector<std::size_t> degrees;
    double total_weight = 0.0;
};

/// Prim's algorithm on the complete graph, O(N^2). Starts from the
/// lexicographically smallest asset id; among equal keys the vertex with the
/// smaller index is attached first, and an equal-weight edge replaces the
/// current one only when it comes from a smaller-index parent.
MstResult mst(const DistanceMatrix& d);

/// Same for a bare weight matrix with assets named by their index.
MstResult prim_mst(const std::vector<double>& weights, std::size_t n,
                   const std::vector<std::string>& assets = {});

enum class PathMetric { Hops, Weighted };
enum class RhoAverage { AllPairs, TreeEdges };

struct NetworkMetrics {
    double mean_path_length = 0.0;
    double mean_rho = 0.0;
    std::size_t k_max = 0;
    std::string hub_id;
};

struct MetricOptions {
    PathMetric path = PathMetric::Hops;
    RhoAverage rho_average = RhoAverage::AllPairs;
};

/// Mean over all unordered node pairs of the tree distance (hops or summed
/// weights), by breadth-first search from every node.
double mean_path_length(const MstResult& tree, PathMetric metric = PathMetric::Hops);

/// <L>, <rho> and the largest degree with its hub (ties go to the
/// lexicographically first asset). Throws InvalidArgument when the tree and the
/// matrix cover different assets.
NetworkMetrics mst_metrics(const MstResult& tree, const RhoMatrix& rho,
                           const MetricOptions& opts = {});

struct RollingMstOptions {
    std::vector<double> q_set{1.0, 4.0};
    std::vector<Millis> scales{Millis{10 * 60'000}, Millis{60 * 60'000}, Millis{360 * 60'000}};
    unsigned poly_degree = 2;
    Direction direction = Direction::Forward;
    MetricOptions metrics;
    bool keep_edges = false;
};

struct MstRecord {
    EpochMs window_end = 0;
    double q = 1.0;
    std::size_t s = 0;
    NetworkMetrics metrics;
    std::vector<MstEdge> edges;  // only with keep_edges
    bool degenerate = false;     // some asset flat in this window; no tree built
};

/// rho matrix -> distances -> tree -> metrics for every window position and
/// every (s, q), window-major. Columns of `returns` are aligned return series.
std::vector<MstRecord> rolling_mst(const Panel& returns, Millis window, Millis step,
                                   const RollingMstOptions& opts = {}, unsigned threads = 1);

void write_mst_metrics_csv(std::ostream& out, const std::vector<MstRecord>& records);
/// parent, child, weight with asset ids.
void write_edge_list_csv(std::ostream& out, const std::vector<std::string>& assets,
                         const std::vector<MstEdge>& edges);
/// Pajek .net: "*Vertices N" node list then "*Edges" list with weights.
void write_pajek(std::ostream& out, const std::vector<std::string>& assets,
                 const std::vector<MstEdge>& edges);

}  // namespace mfcca
