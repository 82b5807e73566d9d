#include "lsnm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lsnm/errors.hpp"
#include "lsnm/rng.hpp"

namespace lsnm {

const char* to_string(Direction d) {
    switch (d) {
        case Direction::Forward: return "forward";
        case Direction::Backward: return "backward";
        case Direction::NoConclusion: return "no-conclusion";
    }
    return "?";
}

void validate(const PairDataset& d) {
    if (d.x.size() != d.y.size())
        throw InvalidParamsError("dataset '" + d.name + "': column lengths differ");
    if (d.x.size() < 2)
        throw InvalidParamsError("dataset '" + d.name + "': needs at least 2 points");
    if (!(d.weight >= 0.0))
        throw InvalidParamsError("dataset '" + d.name + "': negative weight");
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        if (!std::isfinite(d.x[i]) || !std::isfinite(d.y[i]))
            throw InvalidParamsError("dataset '" + d.name + "': non-finite value at row " +
                                     std::to_string(i));
    }
}

ColumnStats column_stats(const std::vector<double>& v) {
    // Two-pass for accuracy: mean first, then centered second moment.
    const double n = static_cast<double>(v.size());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : v) {
        const double c = a - mean;
        ss += c * c;
    }
    return {mean, std::sqrt(ss / n)};
}

namespace {

std::vector<double> standardize_column(const std::vector<double>& v, const std::string& which,
                                       const std::string& name) {
    ColumnStats st = column_stats(v);
    if (!(st.stddev > 0.0))
        throw ConstantColumnError("dataset '" + name + "': column " + which +
                                  " has zero standard deviation");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - st.mean) / st.stddev;
    return out;
}

}  // namespace

PairDataset standardize(const PairDataset& d) {
    validate(d);
    PairDataset out = d;
    out.x = standardize_column(d.x, "x", d.name);
    out.y = standardize_column(d.y, "y", d.name);
    return out;
}

std::size_t split_train_count(std::size_t n, double fraction) {
    if (!(fraction > 0.0) || !(fraction <= 1.0))
        throw InvalidParamsError("split fraction must be in (0, 1]");
    if (fraction == 1.0) return n;
    auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    return std::min(k, n);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            const SplitSpec& s) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (s.train_fraction == 1.0) return {idx, idx};
    const std::size_t n_train = split_train_count(n, s.train_fraction);
    Rng rng(derive_seed(s.seed, /*stream=*/0x5911));
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(idx[i], idx[j]);
    }
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    return {train, test};
}

std::pair<PairDataset, PairDataset> split(const PairDataset& d, const SplitSpec& s) {
    validate(d);
    const std::size_t n = d.size();
    if (s.train_fraction == 1.0) {
        (void)split_train_count(n, s.train_fraction);  // validates the fraction
        return {d, d};
    }
    auto [train_idx, test_idx] = split_indices(n, s);
    if (train_idx.size() < 2 || test_idx.size() < 2)
        throw EmptySplitError("split of " + std::to_string(n) + " points at fraction " +
                              std::to_string(s.train_fraction) + " leaves a side with < 2 points");
    auto take = [&](const std::vector<std::size_t>& which) {
        PairDataset part;
        part.weight = d.weight;
        part.truth = d.truth;
        part.name = d.name;
        part.x.reserve(which.size());
        part.y.reserve(which.size());
        for (std::size_t k : which) {
            part.x.push_back(d.x[k]);
            part.y.push_back(d.y[k]);
        }
        return part;
    };
    return {take(train_idx), take(test_idx)};
}

PairDataset parse_pair_text(const std::string& content, const std::string& name) {
    PairDataset d;
    d.name = name;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        double a, b;
        if (!(row >> a >> b))
            throw MalformedPairError("'" + name + "' line " + std::to_string(lineno) +
                                     ": expected at least two numeric columns");
        d.x.push_back(a);
        d.y.push_back(b);
    }
    validate(d);
    return d;
}

PairDataset load_pair_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pair_text(buf.str(), path);
}

void save_pair_text(const PairDataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < d.size(); ++i)
        out << format_double(d.x[i]) << ' ' << format_double(d.y[i]) << '\n';
    if (!out) throw Error("write failed for '" + path + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace lsnm
