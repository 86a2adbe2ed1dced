#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covote/meta.hpp"
#include "covote/types.hpp"

namespace covote::report {

// Symmetric group-by-group matrix of one metric.  Cells are optional so an
// undefined upstream value stays visibly missing instead of becoming 0.
struct PairMatrix {
    std::string metric; // "alpha" | "ergm-mu" | "avg-rt"
    std::vector<std::string> groups;
    bool has_diagonal = true;
    std::vector<std::optional<double>> cells; // row-major k x k, kept symmetric

    std::int32_t size() const { return static_cast<std::int32_t>(groups.size()); }
    const std::optional<double>& at(std::int32_t i, std::int32_t j) const;
    void set(std::int32_t i, std::int32_t j, double value); // both orientations
};

// Diagonal: within-group agreement; off-diagonal: between-group agreement.
// Undefined scores stay missing.
PairMatrix build_alpha_matrix(const VoteMatrix& matrix, const RollcallFilter& filter = {});

// Pooled group-mix coefficients of one class, read back from meta rows.  The
// cell (a, b) comes from term "mix.<attribute>.<a>.<b>" (either orientation).
PairMatrix build_meta_matrix(std::vector<std::string> groups, std::span<const meta::MetaCsvRow> rows,
                             std::string_view class_label, std::string_view attribute = "group");

// Diagonal: average retweets within a group; off-diagonal: between groups.
// Groups without nodes in the retweet graph stay missing.
PairMatrix build_retweet_matrix(const Graph& retweets, const VoteMatrix& matrix);

struct Threshold {
    std::string label;
    bool greater = true; // x > value when true, x < value otherwise
    double value = 0.0;
};

struct ThresholdSpec {
    std::string metric; // must match the matrix it is applied to
    std::vector<Threshold> thresholds; // labels unique
};

ThresholdSpec default_alpha_thresholds();   // high > 0.75, medium > 0.25, opposition < -0.25
ThresholdSpec default_retweet_thresholds(); // high > 10, medium > 1, low < 0.001

struct BlockList {
    std::string label;
    std::vector<std::pair<std::string, std::string>> pairs; // group order, i <= j
};

// Cells satisfying each threshold predicate, diagonal included when defined.
// Missing cells never match.
std::vector<BlockList> threshold_blocks(const PairMatrix& matrix, const ThresholdSpec& spec);

// Spearman rank correlation with average-rank ties over the off-diagonal
// cells both matrices define.  Requires the same group list and at least 3
// comparable cells.
double rank_correlation(const PairMatrix& a, const PairMatrix& b);

// CSV: header group_a,group_b,value; one row per unordered pair (plus the
// diagonal when defined); missing cells serialize as an empty value field.
void write_pairs_csv(const std::string& path, const PairMatrix& matrix);

struct PairCsvRow {
    std::string group_a;
    std::string group_b;
    std::optional<double> value;
};

std::vector<PairCsvRow> read_pairs_csv(const std::string& path);

// JSON artifact with schema_version, metric, and per-threshold pair arrays.
void write_blocks_json(const std::string& path, const PairMatrix& matrix, const ThresholdSpec& spec);

struct ComparisonEntry {
    std::string metric_a;
    std::string metric_b;
    std::string scope;
    std::optional<double> spearman; // absent when incomparable
    std::int32_t cells = 0;
    std::string note; // reason when spearman is absent
};

void write_comparison_json(const std::string& path, std::span<const ComparisonEntry> entries);

} // namespace covote::report
