#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covote/date.hpp"
#include "covote/errors.hpp"

namespace covote {

// A single recorded position on one roll-call.  Abstain and Absent never
// enter agreement scores but stay distinct states throughout.
enum class VoteValue : std::uint8_t { Yes, No, Abstain, Absent };

// Yes and No are the only "cast" values.
constexpr bool is_cast(VoteValue v) {
    return v == VoteValue::Yes || v == VoteValue::No;
}

std::string_view to_string(VoteValue v);

struct Member {
    std::string id;             // unique within a dataset
    std::string full_name;
    std::string group;          // political group at this membership epoch
    std::string country;
    std::string national_party;
    std::string twitter_handle; // empty when the member has no account
    Date active_from;
    Date active_to;             // inclusive; >= active_from
};

struct RollCall {
    std::string id;             // unique within a dataset
    Date date;
    std::string policy_area;    // empty means unclassified
    std::map<std::string, VoteValue> votes; // explicitly recorded votes by member id
};

using MemberSet = std::vector<std::int32_t>; // member indices, deterministic order

// Selects the roll-calls that enter an analysis; empty means all.
using RollcallFilter = std::function<bool(const RollCall&)>;

// Dense members x roll-calls grid of vote values.  Members without a recorded
// vote on a roll-call hold Absent.  Columns (one roll-call across all
// members) are contiguous because per-roll-call scans dominate.
class VoteMatrix {
public:
    VoteMatrix() = default;

    // group_order fixes the declared group set and its reporting order; when
    // empty it is derived from members in order of first appearance.
    VoteMatrix(std::vector<Member> members, std::vector<RollCall> rollcalls,
               std::vector<std::string> group_order = {});

    std::int32_t member_count() const { return static_cast<std::int32_t>(members_.size()); }
    std::int32_t rollcall_count() const { return static_cast<std::int32_t>(rollcalls_.size()); }

    const std::vector<Member>& members() const { return members_; }
    const std::vector<RollCall>& rollcalls() const { return rollcalls_; }
    const Member& member(std::int32_t i) const { return members_.at(static_cast<std::size_t>(i)); }
    const RollCall& rollcall(std::int32_t u) const { return rollcalls_.at(static_cast<std::size_t>(u)); }

    std::int32_t member_index(std::string_view id) const;   // not_found_error on miss
    std::int32_t rollcall_index(std::string_view id) const; // not_found_error on miss

    VoteValue at(std::int32_t member, std::int32_t rollcall) const {
        return cells_[static_cast<std::size_t>(rollcall) * members_.size() + static_cast<std::size_t>(member)];
    }

    // All values of one roll-call, indexed by member.
    std::span<const VoteValue> column(std::int32_t rollcall) const {
        return {cells_.data() + static_cast<std::size_t>(rollcall) * members_.size(), members_.size()};
    }

    // Declared groups in reporting order.
    const std::vector<std::string>& groups() const { return groups_; }

    // Member indices of one declared group, ascending.  Unknown group is an
    // error; a declared group may still yield an empty set per epoch.
    MemberSet subset_by_group(std::string_view group) const;

    // Number of Yes/No votes on a roll-call, optionally within a subset.
    std::int32_t cast_count(std::string_view rollcall_id) const;
    std::int32_t cast_count(std::string_view rollcall_id, std::span<const std::int32_t> subset) const;
    std::int32_t cast_count_at(std::int32_t rollcall) const;
    std::int32_t cast_count_at(std::int32_t rollcall, std::span<const std::int32_t> subset) const;

private:
    std::vector<Member> members_;
    std::vector<RollCall> rollcalls_;
    std::vector<VoteValue> cells_; // column-major: [rollcall][member]
    std::vector<std::string> groups_;
    std::unordered_map<std::string, std::int32_t> member_index_;
    std::unordered_map<std::string, std::int32_t> rollcall_index_;
};

// Distinct non-empty policy areas in order of first appearance.
std::vector<std::string> policy_areas(const VoteMatrix& matrix);

// Undirected weighted graph over string node ids.  At most one edge per
// pair, no self loops, weights >= 0.  Adjacency lists stay sorted so edge
// iteration order is deterministic.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::vector<std::string> node_ids); // duplicate ids rejected

    std::int32_t node_count() const { return static_cast<std::int32_t>(node_ids_.size()); }
    const std::string& node_id(std::int32_t i) const { return node_ids_.at(static_cast<std::size_t>(i)); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    std::optional<std::int32_t> find_node(std::string_view id) const;

    bool has_edge(std::int32_t i, std::int32_t j) const;
    double edge_weight(std::int32_t i, std::int32_t j) const; // 0 when absent

    void add_edge(std::int32_t i, std::int32_t j, double weight);        // pair must not exist yet
    void add_edge_weight(std::int32_t i, std::int32_t j, double weight); // accumulates, creates on demand
    void remove_edge(std::int32_t i, std::int32_t j);
    void toggle_edge(std::int32_t i, std::int32_t j);                    // weight 1 on insert

    std::size_t edge_count() const { return edge_count_; }
    double total_weight() const { return total_weight_; }

    // Neighbors of i with weights, ascending by node index.
    std::span<const std::pair<std::int32_t, double>> neighbors(std::int32_t i) const {
        return adjacency_.at(static_cast<std::size_t>(i));
    }

    // Visits each edge once as (i, j, weight) with i < j, ascending.
    template <typename F>
    void for_each_edge(F&& visit) const {
        for (std::int32_t i = 0; i < node_count(); ++i) {
            for (const auto& [j, w] : adjacency_[static_cast<std::size_t>(i)]) {
                if (j > i) visit(i, j, w);
            }
        }
    }

private:
    void check_pair(std::int32_t i, std::int32_t j) const;

    std::vector<std::string> node_ids_;
    std::unordered_map<std::string, std::int32_t> node_index_;
    std::vector<std::vector<std::pair<std::int32_t, double>>> adjacency_;
    std::size_t edge_count_ = 0;
    double total_weight_ = 0.0;
};

} // namespace covote
