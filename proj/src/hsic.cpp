#include "lsnm/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsnm/errors.hpp"
#include "lsnm/rng.hpp"

namespace lsnm {

namespace {

// Number of pairs (i < j) in sorted `u` with u_j - u_i <= t; two pointers, O(n).
std::uint64_t count_pairs_within(const std::vector<double>& u, double t) {
    std::uint64_t count = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 1; hi < u.size(); ++hi) {
        while (u[hi] - u[lo] > t) ++lo;
        count += hi - lo;
    }
    return count;
}

// Exact k-th smallest pairwise distance of sorted `u` (1-based k), found by
// bisecting the value space; the crossing point of the pair-count step
// function is a representable distance.
double kth_pair_distance(const std::vector<double>& u, std::uint64_t k) {
    double lo = 0.0;
    double hi = u.back() - u.front();
    if (count_pairs_within(u, lo) >= k) return 0.0;
    while (true) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (count_pairs_within(u, mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

double median_bandwidth(const std::vector<double>& u) {
    if (u.size() < 2) throw InvalidParamsError("median_bandwidth: needs at least 2 points");
    std::vector<double> s(u);
    std::sort(s.begin(), s.end());
    if (s.front() == s.back()) throw AllIdenticalError("median_bandwidth: all values identical");
    const std::uint64_t m = static_cast<std::uint64_t>(s.size()) * (s.size() - 1) / 2;
    double med;
    if (m % 2 == 1) {
        med = kth_pair_distance(s, m / 2 + 1);
    } else {
        med = 0.5 * (kth_pair_distance(s, m / 2) + kth_pair_distance(s, m / 2 + 1));
    }
    if (med > 0.0) return med;
    // Over half the pairs coincide; fall back to the smallest nonzero distance.
    const std::uint64_t zeros = count_pairs_within(s, 0.0);
    return kth_pair_distance(s, zeros + 1);
}

HsicResult hsic_statistic(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw LengthMismatchError("hsic: input lengths differ");
    const std::size_t n = u.size();
    if (n < 4) throw InvalidParamsError("hsic: needs at least 4 points");

    HsicResult res;
    res.n = n;
    res.bandwidth_u = median_bandwidth(u);
    res.bandwidth_v = median_bandwidth(v);
    const double cu = -1.0 / (2.0 * res.bandwidth_u * res.bandwidth_u);
    const double cv = -1.0 / (2.0 * res.bandwidth_v * res.bandwidth_v);

    // (1/n^2) tr(KHLH) expanded so the Gram matrices never materialize:
    //   sum_ij K L / n^2 + (sum K)(sum L) / n^4 - 2 sum_i krow_i lrow_i / n^3
    std::vector<double> krow(n, 1.0), lrow(n, 1.0);  // diagonals included up front
    double sum_kl = 0.0, sum_k = 0.0, sum_l = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double du = u[i] - u[j];
            const double dv = v[i] - v[j];
            const double kij = std::exp(cu * du * du);
            const double lij = std::exp(cv * dv * dv);
            sum_kl += kij * lij;
            sum_k += kij;
            sum_l += lij;
            krow[i] += kij;
            krow[j] += kij;
            lrow[i] += lij;
            lrow[j] += lij;
        }
    }
    const double nn = static_cast<double>(n);
    const double total_kl = 2.0 * sum_kl + nn;  // diag terms K_ii L_ii = 1
    const double total_k = 2.0 * sum_k + nn;
    const double total_l = 2.0 * sum_l + nn;
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) cross += krow[i] * lrow[i];
    const double stat = total_kl / (nn * nn) + total_k * total_l / (nn * nn * nn * nn) -
                        2.0 * cross / (nn * nn * nn);
    res.statistic = std::max(stat, 0.0);
    return res;
}

HsicPermutationTest hsic_permutation_test(const std::vector<double>& u,
                                          const std::vector<double>& v,
                                          std::size_t n_permutations, std::uint64_t seed) {
    HsicPermutationTest out;
    out.observed = hsic_statistic(u, v);
    const std::size_t n = u.size();
    const double cu = -1.0 / (2.0 * out.observed.bandwidth_u * out.observed.bandwidth_u);
    const double cv = -1.0 / (2.0 * out.observed.bandwidth_v * out.observed.bandwidth_v);

    // Row-major Gram matrices; K is centered once (tr(KHLH) = tr((HKH)L)), so
    // a permutation only re-indexes the raw L.
    std::vector<double> kc(n * n), l(n * n);
    std::vector<double> krow(n, 0.0);
    double ktot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double du = u[i] - u[j];
            const double dv = v[i] - v[j];
            kc[i * n + j] = std::exp(cu * du * du);
            l[i * n + j] = std::exp(cv * dv * dv);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        krow[i] = std::accumulate(kc.begin() + static_cast<std::ptrdiff_t>(i * n),
                                  kc.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), 0.0);
    ktot = std::accumulate(krow.begin(), krow.end(), 0.0);
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            kc[i * n + j] += -krow[i] / nn - krow[j] / nn + ktot / (nn * nn);

    std::vector<std::size_t> perm(n);
    out.null_statistics.resize(n_permutations);
    for (std::size_t b = 0; b < n_permutations; ++b) {
        Rng rng(derive_seed(seed, /*stream=*/0x9E2A, b));
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
            std::swap(perm[i], perm[j]);
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* krowp = kc.data() + i * n;
            const double* lrowp = l.data() + perm[i] * n;
            double row_acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) row_acc += krowp[j] * lrowp[perm[j]];
            acc += row_acc;
        }
        out.null_statistics[b] = std::max(acc / (nn * nn), 0.0);
    }
    std::size_t ge = 0;
    for (double s : out.null_statistics)
        if (s >= out.observed.statistic) ++ge;
    out.p_value = static_cast<double>(1 + ge) / static_cast<double>(n_permutations + 1);
    std::sort(out.null_statistics.begin(), out.null_statistics.end());
    return out;
}

}  // namespace lsnm
