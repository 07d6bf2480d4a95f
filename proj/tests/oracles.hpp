#pragma once
// Straightforward reference implementations used as test oracles. None of
// them share code with the library beyond plain types.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

/// Least-squares polynomial of degree m through (k, y_k), k = 1..n, solved
/// from the normal equations with partial-pivot Gaussian elimination.
std::vector<double> polyfit_values(const std::vector<double>& y, unsigned m);

/// Cumulative sum of the mean-subtracted input, plain loop.
std::vector<double> profile(const std::vector<double>& x);

/// Per-segment detrended covariance over forward segments of length s.
std::vector<double> segment_covariances(const std::vector<double>& x, const std::vector<double>& y,
                                        std::size_t s, unsigned m);

/// Textbook DFA: sqrt of the mean detrended variance over forward segments.
double dfa_f2(const std::vector<double>& x, std::size_t s, unsigned m);

/// Signed q-th order fluctuation function, no exclusions.
double fq(const std::vector<double>& x, const std::vector<double>& y, double q, std::size_t s,
          unsigned m);

/// Closed form for the binomial cascade.
double cascade_h(double q, double p);

double ols_slope(const std::vector<double>& x, const std::vector<double>& y);
double mean(const std::vector<double>& v);
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Kruskal with union-find on a row-major n x n matrix. Totals here are summed
/// in ascending weight order so equal edge sets give bitwise equal totals.
double kruskal_weight(const std::vector<double>& w, std::size_t n);

/// Minimum total weight over all n^(n-2) labeled trees (Pruefer decoding).
double brute_force_mst_weight(const std::vector<double>& w, std::size_t n);

/// Random symmetric matrix with zero diagonal and entries in (0, 2).
std::vector<double> random_weights(std::size_t n, std::uint64_t seed);

}  // namespace oracle
