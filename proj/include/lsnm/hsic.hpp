#pragma once

#include <cstdint>
#include <vector>

namespace lsnm {

struct HsicResult {
    double statistic = 0.0;  // biased V-statistic, clamped to >= 0
    double bandwidth_u = 0.0;
    double bandwidth_v = 0.0;
    std::size_t n = 0;
};

// Median of pairwise distances |u_i - u_j| over distinct pairs (the average of
// the two middle order statistics when the pair count is even). Falls back to
// the smallest nonzero distance if the median is 0. Throws AllIdenticalError
// when every value is identical. O(n log n log range), no pairwise storage.
double median_bandwidth(const std::vector<double>& u);

// Biased V-statistic (1/n^2) tr(K H L H) with Gaussian kernels
// k(a,b) = exp(-(a-b)^2 / (2 sigma^2)) and per-variable median-heuristic
// bandwidths. Computed in a streaming fashion; memory is O(n).
HsicResult hsic_statistic(const std::vector<double>& u, const std::vector<double>& v);

// Optional diagnostic: permutation test on the HSIC statistic. Returns the
// permuted statistics (size n_permutations) for the given draw seed; kernels
// and bandwidths stay fixed while v is re-indexed. Builds explicit Gram
// matrices, so memory is O(n^2).
struct HsicPermutationTest {
    HsicResult observed;
    std::vector<double> null_statistics;  // sorted ascending
    double p_value = 1.0;                 // (1 + #{null >= observed}) / (B + 1)
};

HsicPermutationTest hsic_permutation_test(const std::vector<double>& u,
                                          const std::vector<double>& v,
                                          std::size_t n_permutations, std::uint64_t seed);

}  // namespace lsnm
