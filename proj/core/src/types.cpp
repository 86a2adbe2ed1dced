#include "covote/types.hpp"

#include <algorithm>

namespace covote {

std::string_view to_string(VoteValue v) {
    switch (v) {
        case VoteValue::Yes: return "Yes";
        case VoteValue::No: return "No";
        case VoteValue::Abstain: return "Abstain";
        case VoteValue::Absent: return "Absent";
    }
    return "Absent";
}

VoteMatrix::VoteMatrix(std::vector<Member> members, std::vector<RollCall> rollcalls,
                       std::vector<std::string> group_order)
    : members_(std::move(members)), rollcalls_(std::move(rollcalls)), groups_(std::move(group_order)) {
    member_index_.reserve(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        auto [it, inserted] = member_index_.emplace(members_[i].id, static_cast<std::int32_t>(i));
        if (!inserted) throw validation_error("duplicate member id '" + members_[i].id + "'");
        if (members_[i].active_to < members_[i].active_from)
            throw validation_error("member '" + members_[i].id + "' has active_to before active_from");
    }
    rollcall_index_.reserve(rollcalls_.size());
    for (std::size_t u = 0; u < rollcalls_.size(); ++u) {
        auto [it, inserted] = rollcall_index_.emplace(rollcalls_[u].id, static_cast<std::int32_t>(u));
        if (!inserted) throw validation_error("duplicate roll-call id '" + rollcalls_[u].id + "'");
    }

    if (groups_.empty()) {
        for (const Member& m : members_) {
            if (std::find(groups_.begin(), groups_.end(), m.group) == groups_.end()) groups_.push_back(m.group);
        }
    } else {
        for (const Member& m : members_) {
            if (std::find(groups_.begin(), groups_.end(), m.group) == groups_.end())
                throw validation_error("member '" + m.id + "' has group '" + m.group +
                                       "' outside the declared group order");
        }
    }

    cells_.assign(members_.size() * rollcalls_.size(), VoteValue::Absent);
    for (std::size_t u = 0; u < rollcalls_.size(); ++u) {
        for (const auto& [member_id, value] : rollcalls_[u].votes) {
            auto it = member_index_.find(member_id);
            if (it == member_index_.end())
                throw validation_error("roll-call '" + rollcalls_[u].id + "' references unknown member '" +
                                       member_id + "'");
            cells_[u * members_.size() + static_cast<std::size_t>(it->second)] = value;
        }
    }
}

std::int32_t VoteMatrix::member_index(std::string_view id) const {
    auto it = member_index_.find(std::string(id));
    if (it == member_index_.end()) throw not_found_error("unknown member id '" + std::string(id) + "'");
    return it->second;
}

std::int32_t VoteMatrix::rollcall_index(std::string_view id) const {
    auto it = rollcall_index_.find(std::string(id));
    if (it == rollcall_index_.end()) throw not_found_error("unknown roll-call id '" + std::string(id) + "'");
    return it->second;
}

MemberSet VoteMatrix::subset_by_group(std::string_view group) const {
    if (std::find(groups_.begin(), groups_.end(), group) == groups_.end())
        throw not_found_error("unknown group '" + std::string(group) + "'");
    MemberSet subset;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i].group == group) subset.push_back(static_cast<std::int32_t>(i));
    }
    return subset;
}

std::int32_t VoteMatrix::cast_count(std::string_view rollcall_id) const {
    return cast_count_at(rollcall_index(rollcall_id));
}

std::int32_t VoteMatrix::cast_count(std::string_view rollcall_id, std::span<const std::int32_t> subset) const {
    return cast_count_at(rollcall_index(rollcall_id), subset);
}

std::int32_t VoteMatrix::cast_count_at(std::int32_t rollcall) const {
    auto col = column(rollcall);
    std::int32_t n = 0;
    for (VoteValue v : col) n += is_cast(v) ? 1 : 0;
    return n;
}

std::int32_t VoteMatrix::cast_count_at(std::int32_t rollcall, std::span<const std::int32_t> subset) const {
    auto col = column(rollcall);
    std::int32_t n = 0;
    for (std::int32_t i : subset) n += is_cast(col[static_cast<std::size_t>(i)]) ? 1 : 0;
    return n;
}

std::vector<std::string> policy_areas(const VoteMatrix& matrix) {
    std::vector<std::string> areas;
    for (const RollCall& rc : matrix.rollcalls()) {
        if (rc.policy_area.empty()) continue;
        if (std::find(areas.begin(), areas.end(), rc.policy_area) == areas.end()) areas.push_back(rc.policy_area);
    }
    return areas;
}

Graph::Graph(std::vector<std::string> node_ids) : node_ids_(std::move(node_ids)) {
    node_index_.reserve(node_ids_.size());
    for (std::size_t i = 0; i < node_ids_.size(); ++i) {
        auto [it, inserted] = node_index_.emplace(node_ids_[i], static_cast<std::int32_t>(i));
        if (!inserted) throw validation_error("duplicate node id '" + node_ids_[i] + "'");
    }
    adjacency_.resize(node_ids_.size());
}

std::optional<std::int32_t> Graph::find_node(std::string_view id) const {
    auto it = node_index_.find(std::string(id));
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
}

void Graph::check_pair(std::int32_t i, std::int32_t j) const {
    if (i < 0 || j < 0 || i >= node_count() || j >= node_count())
        throw precondition_error("edge endpoint out of range");
    if (i == j) throw precondition_error("self loops are not allowed");
}

namespace {

// Sorted-vector lookup; adjacency lists stay small relative to n.
auto find_neighbor(std::vector<std::pair<std::int32_t, double>>& list, std::int32_t j) {
    return std::lower_bound(list.begin(), list.end(), j,
                            [](const auto& entry, std::int32_t key) { return entry.first < key; });
}

auto find_neighbor(const std::vector<std::pair<std::int32_t, double>>& list, std::int32_t j) {
    return std::lower_bound(list.begin(), list.end(), j,
                            [](const auto& entry, std::int32_t key) { return entry.first < key; });
}

} // namespace

bool Graph::has_edge(std::int32_t i, std::int32_t j) const {
    check_pair(i, j);
    const auto& list = adjacency_[static_cast<std::size_t>(i)];
    auto it = find_neighbor(list, j);
    return it != list.end() && it->first == j;
}

double Graph::edge_weight(std::int32_t i, std::int32_t j) const {
    check_pair(i, j);
    const auto& list = adjacency_[static_cast<std::size_t>(i)];
    auto it = find_neighbor(list, j);
    return (it != list.end() && it->first == j) ? it->second : 0.0;
}

void Graph::add_edge(std::int32_t i, std::int32_t j, double weight) {
    check_pair(i, j);
    if (weight < 0.0) throw precondition_error("edge weight must be >= 0");
    auto& li = adjacency_[static_cast<std::size_t>(i)];
    auto it = find_neighbor(li, j);
    if (it != li.end() && it->first == j)
        throw precondition_error("edge already exists between '" + node_id(i) + "' and '" + node_id(j) + "'");
    li.insert(it, {j, weight});
    auto& lj = adjacency_[static_cast<std::size_t>(j)];
    lj.insert(find_neighbor(lj, i), {i, weight});
    ++edge_count_;
    total_weight_ += weight;
}

void Graph::add_edge_weight(std::int32_t i, std::int32_t j, double weight) {
    check_pair(i, j);
    if (weight < 0.0) throw precondition_error("edge weight must be >= 0");
    auto& li = adjacency_[static_cast<std::size_t>(i)];
    auto it = find_neighbor(li, j);
    if (it == li.end() || it->first != j) {
        add_edge(i, j, weight);
        return;
    }
    it->second += weight;
    auto& lj = adjacency_[static_cast<std::size_t>(j)];
    find_neighbor(lj, i)->second += weight;
    total_weight_ += weight;
}

void Graph::remove_edge(std::int32_t i, std::int32_t j) {
    check_pair(i, j);
    auto& li = adjacency_[static_cast<std::size_t>(i)];
    auto it = find_neighbor(li, j);
    if (it == li.end() || it->first != j)
        throw not_found_error("no edge between '" + node_id(i) + "' and '" + node_id(j) + "'");
    double w = it->second;
    li.erase(it);
    auto& lj = adjacency_[static_cast<std::size_t>(j)];
    lj.erase(find_neighbor(lj, i));
    --edge_count_;
    total_weight_ -= w;
}

void Graph::toggle_edge(std::int32_t i, std::int32_t j) {
    if (has_edge(i, j)) {
        remove_edge(i, j);
    } else {
        add_edge(i, j, 1.0);
    }
}

} // namespace covote
