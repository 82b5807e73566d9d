#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lsnm {

enum class Direction {
    Forward,   // x -> y
    Backward,  // x <- y
    NoConclusion,
};

const char* to_string(Direction d);

// A bivariate sample: x is the putative cause, y the putative effect.
// Immutable by convention once built; all operations return new datasets.
struct PairDataset {
    std::vector<double> x;
    std::vector<double> y;
    double weight = 1.0;
    std::optional<Direction> truth;
    std::string name;

    std::size_t size() const { return x.size(); }
};

// Throws InvalidParamsError unless sizes match, n >= 2, all values are finite
// and weight >= 0.
void validate(const PairDataset& d);

struct ColumnStats {
    double mean = 0.0;
    double stddev = 0.0;  // population convention (divide by n)
};

ColumnStats column_stats(const std::vector<double>& v);

// Rescales both columns to empirical mean 0 and population variance 1.
// Throws ConstantColumnError if a column has zero standard deviation.
PairDataset standardize(const PairDataset& d);

struct SplitSpec {
    double train_fraction = 0.8;  // in (0, 1]; 1.0 means train = test = full data
    std::uint64_t seed = 0;
};

// ceil(fraction * n), robust to representation error in fraction * n.
std::size_t split_train_count(std::size_t n, double fraction);

// Index-level split; train gets ceil(fraction * n) indices via a seeded
// Fisher-Yates shuffle, both sides sorted ascending. fraction 1.0 puts every
// index on both sides.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            const SplitSpec& s);

// Seeded Fisher-Yates split. train gets ceil(fraction * n) points; fraction 1.0
// returns the full dataset on both sides. Throws EmptySplitError if either
// side would have fewer than 2 points.
std::pair<PairDataset, PairDataset> split(const PairDataset& d, const SplitSpec& s);

// Whitespace-delimited rows with two or more numeric columns; the first two
// columns are taken as (cause candidate, effect candidate). Lines starting
// with '#' are ignored.
PairDataset load_pair_text(const std::string& path);
PairDataset parse_pair_text(const std::string& content, const std::string& name);
void save_pair_text(const PairDataset& d, const std::string& path);

// Lossless double formatting used by every text/CSV writer.
std::string format_double(double v);

}  // namespace lsnm
