#include "covote/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "covote/agreement.hpp"
#include "covote/networks.hpp"
#include "csv.hpp"

namespace covote::report {

namespace {

std::size_t cell_index(const PairMatrix& m, std::int32_t i, std::int32_t j) {
    if (i < 0 || j < 0 || i >= m.size() || j >= m.size())
        throw precondition_error("pair matrix index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(m.size()) + static_cast<std::size_t>(j);
}

PairMatrix make_matrix(std::string metric, std::vector<std::string> groups) {
    PairMatrix m;
    m.metric = std::move(metric);
    m.groups = std::move(groups);
    m.cells.assign(m.groups.size() * m.groups.size(), std::nullopt);
    return m;
}

} // namespace

const std::optional<double>& PairMatrix::at(std::int32_t i, std::int32_t j) const {
    return cells[cell_index(*this, i, j)];
}

void PairMatrix::set(std::int32_t i, std::int32_t j, double value) {
    cells[cell_index(*this, i, j)] = value;
    cells[cell_index(*this, j, i)] = value;
}

PairMatrix build_alpha_matrix(const VoteMatrix& matrix, const RollcallFilter& filter) {
    PairMatrix m = make_matrix("alpha", matrix.groups());
    for (std::int32_t i = 0; i < m.size(); ++i) {
        AlphaScore within = group_cohesion(matrix, m.groups[static_cast<std::size_t>(i)], filter);
        if (within.defined) m.set(i, i, within.alpha);
        for (std::int32_t j = i + 1; j < m.size(); ++j) {
            AlphaScore between = group_coalition(matrix, m.groups[static_cast<std::size_t>(i)],
                                                 m.groups[static_cast<std::size_t>(j)], filter);
            if (between.defined) m.set(i, j, between.alpha);
        }
    }
    return m;
}

PairMatrix build_meta_matrix(std::vector<std::string> groups, std::span<const meta::MetaCsvRow> rows,
                             std::string_view class_label, std::string_view attribute) {
    PairMatrix m = make_matrix("ergm-mu", std::move(groups));
    const std::string prefix = "mix." + std::string(attribute) + ".";
    for (std::int32_t i = 0; i < m.size(); ++i) {
        for (std::int32_t j = i; j < m.size(); ++j) {
            const std::string& a = m.groups[static_cast<std::size_t>(i)];
            const std::string& b = m.groups[static_cast<std::size_t>(j)];
            std::string forward = prefix + a + "." + b;
            std::string backward = prefix + b + "." + a;
            for (const meta::MetaCsvRow& row : rows) {
                if (row.class_label != class_label) continue;
                if (row.term != forward && row.term != backward) continue;
                if (row.mu) m.set(i, j, *row.mu);
                break; // first matching row wins; orientations never coexist
            }
        }
    }
    return m;
}

PairMatrix build_retweet_matrix(const Graph& retweets, const VoteMatrix& matrix) {
    PairMatrix m = make_matrix("avg-rt", matrix.groups());
    std::vector<std::vector<std::int32_t>> nodes;
    nodes.reserve(m.groups.size());
    for (const std::string& group : m.groups)
        nodes.push_back(group_nodes(retweets, matrix, group));
    for (std::int32_t i = 0; i < m.size(); ++i) {
        auto within = avg_retweets_within(retweets, nodes[static_cast<std::size_t>(i)]);
        if (within) m.set(i, i, *within);
        for (std::int32_t j = i + 1; j < m.size(); ++j) {
            auto between = avg_retweets_between(retweets, nodes[static_cast<std::size_t>(i)],
                                                nodes[static_cast<std::size_t>(j)]);
            if (between) m.set(i, j, *between);
        }
    }
    return m;
}

ThresholdSpec default_alpha_thresholds() {
    return {"alpha",
            {{"high", true, 0.75}, {"medium", true, 0.25}, {"opposition", false, -0.25}}};
}

ThresholdSpec default_retweet_thresholds() {
    return {"avg-rt", {{"high", true, 10.0}, {"medium", true, 1.0}, {"low", false, 0.001}}};
}

std::vector<BlockList> threshold_blocks(const PairMatrix& matrix, const ThresholdSpec& spec) {
    if (spec.metric != matrix.metric)
        throw precondition_error("threshold metric '" + spec.metric + "' does not match matrix metric '" +
                                 matrix.metric + "'");
    std::set<std::string> labels;
    for (const Threshold& t : spec.thresholds) {
        if (!labels.insert(t.label).second)
            throw validation_error("duplicate threshold label '" + t.label + "'");
    }

    std::vector<BlockList> blocks;
    blocks.reserve(spec.thresholds.size());
    for (const Threshold& t : spec.thresholds) {
        BlockList block;
        block.label = t.label;
        for (std::int32_t i = 0; i < matrix.size(); ++i) {
            for (std::int32_t j = i; j < matrix.size(); ++j) {
                if (i == j && !matrix.has_diagonal) continue;
                const auto& cell = matrix.at(i, j);
                if (!cell) continue;
                bool hit = t.greater ? *cell > t.value : *cell < t.value;
                if (hit)
                    block.pairs.emplace_back(matrix.groups[static_cast<std::size_t>(i)],
                                             matrix.groups[static_cast<std::size_t>(j)]);
            }
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

namespace {

// Ranks with ties replaced by the mean of the tied positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && values[order[end]] == values[order[start]]) ++end;
        double mean_rank = (static_cast<double>(start) + static_cast<double>(end - 1)) / 2.0 + 1.0;
        for (std::size_t k = start; k < end; ++k) ranks[order[k]] = mean_rank;
        start = end;
    }
    return ranks;
}

} // namespace

double rank_correlation(const PairMatrix& a, const PairMatrix& b) {
    if (a.groups != b.groups) throw precondition_error("pair matrices cover different group sets");
    std::vector<double> xs, ys;
    for (std::int32_t i = 0; i < a.size(); ++i) {
        for (std::int32_t j = i + 1; j < a.size(); ++j) {
            const auto& x = a.at(i, j);
            const auto& y = b.at(i, j);
            if (x && y) {
                xs.push_back(*x);
                ys.push_back(*y);
            }
        }
    }
    if (xs.size() < 3)
        throw precondition_error("rank correlation needs at least 3 comparable off-diagonal cells");

    std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);
    const auto n = static_cast<double>(rx.size());
    double mean = (n + 1.0) / 2.0; // ranks always average to this, ties included
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        double dx = rx[k] - mean;
        double dy = ry[k] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw precondition_error("rank correlation undefined: a matrix has constant cells");
    return sxy / std::sqrt(sxx * syy);
}

void write_pairs_csv(const std::string& path, const PairMatrix& matrix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "group_a,group_b,value\n";
    for (std::int32_t i = 0; i < matrix.size(); ++i) {
        for (std::int32_t j = i; j < matrix.size(); ++j) {
            if (i == j && !matrix.has_diagonal) continue;
            const auto& cell = matrix.at(i, j);
            std::vector<std::string> fields = {matrix.groups[static_cast<std::size_t>(i)],
                                               matrix.groups[static_cast<std::size_t>(j)],
                                               cell ? detail::format_double(*cell) : ""};
            detail::write_csv_row(out, fields);
        }
    }
}

std::vector<PairCsvRow> read_pairs_csv(const std::string& path) {
    static constexpr std::string_view header[] = {"group_a", "group_b", "value"};
    auto reader = detail::open_csv_with_header(path, header);
    std::vector<PairCsvRow> rows;
    while (auto row = reader.next()) {
        if (row->size() != 3) throw parse_error(path, reader.record_line(), 1, "expected 3 fields");
        PairCsvRow rec;
        rec.group_a = (*row)[0];
        rec.group_b = (*row)[1];
        if (!(*row)[2].empty()) rec.value = detail::parse_double_field(reader, (*row)[2], "value");
        rows.push_back(std::move(rec));
    }
    return rows;
}

void write_blocks_json(const std::string& path, const PairMatrix& matrix, const ThresholdSpec& spec) {
    auto blocks = threshold_blocks(matrix, spec);
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["metric"] = matrix.metric;
    doc["thresholds"] = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < blocks.size(); ++t) {
        const Threshold& threshold = spec.thresholds[t];
        nlohmann::ordered_json entry;
        entry["label"] = blocks[t].label;
        entry["comparison"] = threshold.greater ? ">" : "<";
        entry["value"] = threshold.value;
        entry["pairs"] = nlohmann::ordered_json::array();
        for (const auto& [a, b] : blocks[t].pairs) entry["pairs"].push_back({a, b});
        doc["thresholds"].push_back(std::move(entry));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

void write_comparison_json(const std::string& path, std::span<const ComparisonEntry> entries) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["comparisons"] = nlohmann::ordered_json::array();
    for (const ComparisonEntry& entry : entries) {
        nlohmann::ordered_json item;
        item["metric_a"] = entry.metric_a;
        item["metric_b"] = entry.metric_b;
        item["scope"] = entry.scope;
        if (entry.spearman) item["spearman"] = *entry.spearman;
        else item["spearman"] = nullptr;
        item["cells"] = entry.cells;
        if (!entry.note.empty()) item["note"] = entry.note;
        doc["comparisons"].push_back(std::move(item));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

} // namespace covote::report
