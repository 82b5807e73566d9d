// Test-side reference implementations. Everything here is deliberately naive
// and independent of the library code paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracles {

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

// Hand-rolled two-pass mean and population standard deviation.
inline MeanStd two_pass_mean_std(const std::vector<double>& v) {
    double sum = 0.0;
    for (double a : v) sum += a;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - mean) * (a - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

// Median of all pairwise distances by full enumeration.
inline double median_pairwise_distance(const std::vector<double>& u) {
    std::vector<double> d;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j) d.push_back(std::abs(u[i] - u[j]));
    std::sort(d.begin(), d.end());
    const std::size_t m = d.size();
    if (m % 2 == 1) return d[m / 2];
    return 0.5 * (d[m / 2 - 1] + d[m / 2]);
}

// Brute-force biased HSIC V-statistic over all index tuples:
//   (1/n^2) sum_ij K_ij L_ij + (1/n^4) sum_ijqr K_ij L_qr - (2/n^3) sum_ijq K_ij L_iq
inline double hsic_v_statistic_brute(const std::vector<double>& u, const std::vector<double>& v,
                                     double bw_u, double bw_v) {
    const std::size_t n = u.size();
    auto ker = [](double a, double b, double bw) {
        const double d = a - b;
        return std::exp(-d * d / (2.0 * bw * bw));
    };
    double t1 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t1 += ker(u[i], u[j], bw_u) * ker(v[i], v[j], bw_v);
    double t2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t q = 0; q < n; ++q)
                for (std::size_t r = 0; r < n; ++r)
                    t2 += ker(u[i], u[j], bw_u) * ker(v[q], v[r], bw_v);
    double t3 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t q = 0; q < n; ++q) t3 += ker(u[i], u[j], bw_u) * ker(v[i], v[q], bw_v);
    const double nn = static_cast<double>(n);
    return t1 / (nn * nn) + t2 / (nn * nn * nn * nn) - 2.0 * t3 / (nn * nn * nn);
}

// Minimal MLP forward pass (tanh hidden layers, linear output) reading a
// flat parameter array laid out layer by layer as [W row-major, b].
inline double mlp_forward_flat(const std::vector<int>& sizes, const double* params, double x) {
    std::vector<double> act = {x};
    const double* p = params;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int nin = sizes[l], nout = sizes[l + 1];
        std::vector<double> next(static_cast<std::size_t>(nout), 0.0);
        for (int o = 0; o < nout; ++o)
            for (int i = 0; i < nin; ++i) next[static_cast<std::size_t>(o)] += p[o * nin + i] * act[static_cast<std::size_t>(i)];
        p += nout * nin;
        for (int o = 0; o < nout; ++o) next[static_cast<std::size_t>(o)] += p[o];
        p += nout;
        if (l + 2 < sizes.size())
            for (double& a : next) a = std::tanh(a);
        act = std::move(next);
    }
    return act[0];
}

inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson(ranks(a), ranks(b));
}

}  // namespace oracles
