#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "covote/types.hpp"

namespace covote {

// Co-voting graph of one roll-call over the full member set: Yes voters form
// one clique, No voters another, Abstain/Absent members stay isolated.  Node
// index i is member index i, so attribute tables align.
Graph build_covote_network(const VoteMatrix& matrix, std::int32_t rollcall);
Graph build_covote_network(const VoteMatrix& matrix, std::string_view rollcall_id);

// Graph node indices whose ids belong to the given declared group.  Only
// members present in the graph count.
std::vector<std::int32_t> group_nodes(const Graph& graph, const VoteMatrix& matrix, std::string_view group);

// Total weight of edges with both endpoints inside the set.  Integer-valued
// weights accumulate exactly.
double internal_weight(const Graph& graph, std::span<const std::int32_t> nodes);

// Total weight of edges with one endpoint in each of two disjoint sets.
double cross_weight(const Graph& graph, std::span<const std::int32_t> set_a,
                    std::span<const std::int32_t> set_b);

// Average retweet volume per member: internal weight / |A|.  Undefined
// (nullopt) when the set has no nodes in the graph.
std::optional<double> avg_retweets_within(const Graph& graph, std::span<const std::int32_t> nodes);
std::optional<double> avg_retweets_within(const Graph& graph, const VoteMatrix& matrix, std::string_view group);

// Average cross volume per member of the pair: cross weight / (|A| + |B|).
// Undefined when either set has no nodes in the graph.
std::optional<double> avg_retweets_between(const Graph& graph, std::span<const std::int32_t> set_a,
                                           std::span<const std::int32_t> set_b);
std::optional<double> avg_retweets_between(const Graph& graph, const VoteMatrix& matrix,
                                           std::string_view group_a, std::string_view group_b);

struct TimelinePoint {
    Date date;
    std::int64_t count = 0;
    double zscore = 0.0;
    bool is_peak = false;     // zscore > 2
    bool has_session = false; // date appears in session_days
};

// Daily activity with z-scores over the full observation window.  Days
// missing from daily_counts inside [min, max] count as zero.  The z-score
// uses the population standard deviation; zero variance yields all-zero
// z-scores and no peaks.  Requires at least two distinct days.
std::vector<TimelinePoint> activity_timeline(const std::map<Date, std::int64_t>& daily_counts,
                                             const std::set<Date>& session_days);

// CSV export: header date,count,zscore,is_peak,has_session.
void write_timeline_csv(const std::string& path, std::span<const TimelinePoint> points);

} // namespace covote
