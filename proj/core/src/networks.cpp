#include "covote/networks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv.hpp"

namespace covote {

namespace {

Graph covote_graph_of_column(const VoteMatrix& matrix, std::int32_t rollcall) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(matrix.member_count()));
    for (const Member& m : matrix.members()) ids.push_back(m.id);
    Graph g(std::move(ids));

    auto column = matrix.column(rollcall);
    std::vector<std::int32_t> yes, no;
    for (std::int32_t i = 0; i < matrix.member_count(); ++i) {
        switch (column[static_cast<std::size_t>(i)]) {
            case VoteValue::Yes: yes.push_back(i); break;
            case VoteValue::No: no.push_back(i); break;
            default: break;
        }
    }
    auto add_clique = [&g](const std::vector<std::int32_t>& nodes) {
        for (std::size_t a = 0; a < nodes.size(); ++a)
            for (std::size_t b = a + 1; b < nodes.size(); ++b) g.add_edge(nodes[a], nodes[b], 1.0);
    };
    add_clique(yes);
    add_clique(no);
    return g;
}

std::vector<char> membership_mask(const Graph& graph, std::span<const std::int32_t> nodes) {
    std::vector<char> mask(static_cast<std::size_t>(graph.node_count()), 0);
    for (std::int32_t i : nodes) {
        if (i < 0 || i >= graph.node_count()) throw precondition_error("node index out of range");
        mask[static_cast<std::size_t>(i)] = 1;
    }
    return mask;
}

} // namespace

Graph build_covote_network(const VoteMatrix& matrix, std::int32_t rollcall) {
    if (rollcall < 0 || rollcall >= matrix.rollcall_count()) throw not_found_error("roll-call index out of range");
    return covote_graph_of_column(matrix, rollcall);
}

Graph build_covote_network(const VoteMatrix& matrix, std::string_view rollcall_id) {
    return covote_graph_of_column(matrix, matrix.rollcall_index(rollcall_id));
}

std::vector<std::int32_t> group_nodes(const Graph& graph, const VoteMatrix& matrix, std::string_view group) {
    if (std::find(matrix.groups().begin(), matrix.groups().end(), group) == matrix.groups().end())
        throw not_found_error("unknown group '" + std::string(group) + "'");
    std::vector<std::int32_t> nodes;
    for (std::int32_t i = 0; i < graph.node_count(); ++i) {
        auto member = graph.node_id(i);
        // Graph nodes that are not dataset members simply never match.
        try {
            if (matrix.member(matrix.member_index(member)).group == group) nodes.push_back(i);
        } catch (const not_found_error&) {
        }
    }
    return nodes;
}

double internal_weight(const Graph& graph, std::span<const std::int32_t> nodes) {
    std::vector<char> mask = membership_mask(graph, nodes);
    double sum = 0.0;
    for (std::int32_t i : nodes) {
        for (const auto& [j, w] : graph.neighbors(i)) {
            if (j > i && mask[static_cast<std::size_t>(j)]) sum += w;
        }
    }
    return sum;
}

double cross_weight(const Graph& graph, std::span<const std::int32_t> set_a,
                    std::span<const std::int32_t> set_b) {
    std::vector<char> mask_b = membership_mask(graph, set_b);
    for (std::int32_t a : set_a) {
        if (mask_b[static_cast<std::size_t>(a)]) throw precondition_error("node sets must be disjoint");
    }
    // Each cross edge has exactly one endpoint in A, so it is seen once.
    double sum = 0.0;
    for (std::int32_t a : set_a) {
        for (const auto& [j, w] : graph.neighbors(a)) {
            if (mask_b[static_cast<std::size_t>(j)]) sum += w;
        }
    }
    return sum;
}

std::optional<double> avg_retweets_within(const Graph& graph, std::span<const std::int32_t> nodes) {
    if (nodes.empty()) return std::nullopt;
    return internal_weight(graph, nodes) / static_cast<double>(nodes.size());
}

std::optional<double> avg_retweets_within(const Graph& graph, const VoteMatrix& matrix, std::string_view group) {
    return avg_retweets_within(graph, group_nodes(graph, matrix, group));
}

std::optional<double> avg_retweets_between(const Graph& graph, std::span<const std::int32_t> set_a,
                                           std::span<const std::int32_t> set_b) {
    if (set_a.empty() || set_b.empty()) return std::nullopt;
    return cross_weight(graph, set_a, set_b) / static_cast<double>(set_a.size() + set_b.size());
}

std::optional<double> avg_retweets_between(const Graph& graph, const VoteMatrix& matrix,
                                           std::string_view group_a, std::string_view group_b) {
    if (group_a == group_b) throw precondition_error("between measure requires two distinct groups");
    return avg_retweets_between(graph, group_nodes(graph, matrix, group_a),
                                group_nodes(graph, matrix, group_b));
}

std::vector<TimelinePoint> activity_timeline(const std::map<Date, std::int64_t>& daily_counts,
                                             const std::set<Date>& session_days) {
    if (daily_counts.size() < 2) throw precondition_error("timeline requires at least two distinct days");
    for (const auto& [date, count] : daily_counts) {
        if (count < 0) throw precondition_error("daily count must be >= 0 on " + date.to_string());
    }

    Date first = daily_counts.begin()->first;
    Date last = daily_counts.rbegin()->first;
    std::vector<TimelinePoint> points;
    points.reserve(static_cast<std::size_t>(last.days - first.days + 1));
    for (Date d = first; d <= last; d = d.next()) {
        auto it = daily_counts.find(d);
        TimelinePoint p;
        p.date = d;
        p.count = (it != daily_counts.end()) ? it->second : 0;
        p.has_session = session_days.count(d) > 0;
        points.push_back(p);
    }

    double n = static_cast<double>(points.size());
    double mean = 0.0;
    for (const TimelinePoint& p : points) mean += static_cast<double>(p.count);
    mean /= n;
    double variance = 0.0;
    for (const TimelinePoint& p : points) {
        double d = static_cast<double>(p.count) - mean;
        variance += d * d;
    }
    variance /= n; // population variance over the full window
    double stddev = std::sqrt(variance);

    for (TimelinePoint& p : points) {
        p.zscore = stddev > 0.0 ? (static_cast<double>(p.count) - mean) / stddev : 0.0;
        p.is_peak = p.zscore > 2.0;
    }
    return points;
}

void write_timeline_csv(const std::string& path, std::span<const TimelinePoint> points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "date,count,zscore,is_peak,has_session\n";
    for (const TimelinePoint& p : points) {
        std::vector<std::string> fields = {p.date.to_string(), std::to_string(p.count),
                                           detail::format_double(p.zscore), p.is_peak ? "true" : "false",
                                           p.has_session ? "true" : "false"};
        detail::write_csv_row(out, fields);
    }
}

} // namespace covote
