#include "covote/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "csv.hpp"
#include "text.hpp"

namespace covote::ingest {

// ---------------------------------------------------------------------------
// Token table

TokenTable TokenTable::identity() {
    TokenTable table;
    table.tokens = {{"Yes", VoteValue::Yes},
                    {"No", VoteValue::No},
                    {"Abstain", VoteValue::Abstain},
                    {"Absent", VoteValue::Absent}};
    return table;
}

std::optional<VoteValue> TokenTable::lookup(std::string_view token) const {
    auto it = tokens.find(std::string(token));
    if (it == tokens.end()) return std::nullopt;
    return it->second;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// A bare or double-quoted scalar; quoted form carries no escapes.
std::string unquote(const std::string& path, std::size_t line, std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        std::string_view inner = s.substr(1, s.size() - 2);
        if (inner.find('"') != std::string_view::npos)
            throw parse_error(path, line, 1, "nested quote in token entry");
        return std::string(inner);
    }
    if (!s.empty() && (s.front() == '"' || s.back() == '"'))
        throw parse_error(path, line, 1, "unbalanced quote in token entry");
    return std::string(s);
}

std::optional<VoteValue> vote_value_by_name(std::string_view name) {
    if (name == "Yes") return VoteValue::Yes;
    if (name == "No") return VoteValue::No;
    if (name == "Abstain") return VoteValue::Abstain;
    if (name == "Absent") return VoteValue::Absent;
    return std::nullopt;
}

} // namespace

TokenTable TokenTable::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path, 0, 0, "cannot open file");
    TokenTable table;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line != "[tokens]")
                throw parse_error(path, line_no, 1, "unknown section '" + std::string(line) + "'");
            continue;
        }
        // Split on the first '=' outside quotes.
        std::size_t eq = std::string_view::npos;
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quotes = !in_quotes;
            else if (line[i] == '=' && !in_quotes) {
                eq = i;
                break;
            }
        }
        if (eq == std::string_view::npos)
            throw parse_error(path, line_no, 1, "expected 'token = value'");
        std::string key = unquote(path, line_no, trim(line.substr(0, eq)));
        std::string value = unquote(path, line_no, trim(line.substr(eq + 1)));
        if (key.empty()) throw parse_error(path, line_no, 1, "empty token");
        auto mapped = vote_value_by_name(value);
        if (!mapped)
            throw parse_error(path, line_no, 1,
                              "value '" + value + "' is not one of Yes, No, Abstain, Absent");
        if (!table.tokens.emplace(std::move(key), *mapped).second)
            throw parse_error(path, line_no, 1, "duplicate token entry");
    }
    if (table.tokens.empty()) throw parse_error(path, line_no, 1, "token table is empty");
    return table;
}

// ---------------------------------------------------------------------------
// File readers

namespace {

Date parse_date_field(const std::string& path, std::size_t line, std::string_view field,
                      std::string_view what) {
    auto date = Date::parse(field);
    if (!date)
        throw parse_error(path, line, 1,
                          std::string(what) + " '" + std::string(field) + "' is not a valid ISO date");
    return *date;
}

} // namespace

std::vector<Member> parse_register(const std::string& path) {
    static constexpr std::string_view header[] = {"id",       "full_name",      "group",
                                                  "country",  "national_party", "twitter_handle",
                                                  "active_from", "active_to"};
    auto reader = detail::open_csv_with_header(path, header);
    std::vector<Member> members;
    while (auto row = reader.next()) {
        std::size_t line = reader.record_line();
        if (row->size() != 8) throw parse_error(path, line, 1, "expected 8 fields");
        Member m;
        m.id = (*row)[0];
        m.full_name = (*row)[1];
        m.group = (*row)[2];
        m.country = (*row)[3];
        m.national_party = (*row)[4];
        m.twitter_handle = (*row)[5];
        if (m.id.empty()) throw parse_error(path, line, 1, "empty member id");
        if (m.full_name.empty()) throw parse_error(path, line, 1, "empty member name");
        if (m.group.empty()) throw parse_error(path, line, 1, "empty group");
        m.active_from = parse_date_field(path, line, (*row)[6], "active_from");
        m.active_to = parse_date_field(path, line, (*row)[7], "active_to");
        if (m.active_to < m.active_from)
            throw parse_error(path, line, 1, "active_to precedes active_from");
        members.push_back(std::move(m));
    }

    // One person may appear once per membership epoch; overlapping intervals
    // under one id are genuine duplicates.
    std::unordered_map<std::string, std::vector<std::size_t>> by_id;
    for (std::size_t i = 0; i < members.size(); ++i) by_id[members[i].id].push_back(i);
    for (const auto& [id, rows] : by_id) {
        for (std::size_t a = 0; a < rows.size(); ++a) {
            for (std::size_t b = a + 1; b < rows.size(); ++b) {
                const Member& x = members[rows[a]];
                const Member& y = members[rows[b]];
                if (x.active_from <= y.active_to && y.active_from <= x.active_to)
                    throw validation_error("duplicate member id '" + id +
                                           "' with overlapping active intervals");
            }
        }
    }
    return members;
}

ParsedVotes parse_rollcalls(const std::string& path, const TokenTable& tokens) {
    static constexpr std::string_view header[] = {"rollcall_id", "date",       "policy_area",
                                                  "voter_id",    "voter_name", "value"};
    auto reader = detail::open_csv_with_header(path, header);
    ParsedVotes parsed;
    std::unordered_map<std::string, std::size_t> index;
    std::map<std::string, std::int64_t> unknown_tokens;

    while (auto row = reader.next()) {
        std::size_t line = reader.record_line();
        if (row->size() != 6) throw parse_error(path, line, 1, "expected 6 fields");
        const std::string& rollcall_id = (*row)[0];
        if (rollcall_id.empty()) throw parse_error(path, line, 1, "empty rollcall_id");
        Date date = parse_date_field(path, line, (*row)[1], "date");
        const std::string& area = (*row)[2];

        RawVoteRecord record;
        record.voter_id = (*row)[3];
        record.voter_name = (*row)[4];
        if (record.voter_id.empty() && record.voter_name.empty())
            throw parse_error(path, line, 1, "record carries neither voter_id nor voter_name");
        auto value = tokens.lookup((*row)[5]);
        if (!value) {
            ++unknown_tokens[(*row)[5]];
            continue;
        }
        record.value = *value;

        auto [it, inserted] = index.emplace(rollcall_id, parsed.rollcalls.size());
        if (inserted) {
            parsed.rollcalls.push_back(RawRollcall{rollcall_id, date, area, {}});
        } else {
            const RawRollcall& existing = parsed.rollcalls[it->second];
            if (existing.date != date)
                throw parse_error(path, line, 1, "roll-call '" + rollcall_id + "' has conflicting dates");
            if (existing.policy_area != area)
                throw parse_error(path, line, 1,
                                  "roll-call '" + rollcall_id + "' has conflicting policy areas");
        }
        parsed.rollcalls[it->second].records.push_back(std::move(record));
    }

    if (!unknown_tokens.empty()) {
        std::ostringstream msg;
        msg << "unknown vote tokens:";
        for (const auto& [token, count] : unknown_tokens) msg << " '" << token << "' x" << count;
        throw validation_error(msg.str());
    }

    for (const RawRollcall& rc : parsed.rollcalls) {
        bool any_cast = std::any_of(rc.records.begin(), rc.records.end(),
                                    [](const RawVoteRecord& r) { return is_cast(r.value); });
        if (!any_cast)
            parsed.warnings.push_back("roll-call '" + rc.id + "' has no cast votes; retained");
    }
    return parsed;
}

std::vector<RetweetEdge> parse_retweets(const std::string& path) {
    static constexpr std::string_view header[] = {"source_id", "target_id", "count"};
    auto reader = detail::open_csv_with_header(path, header);
    std::vector<RetweetEdge> edges;
    while (auto row = reader.next()) {
        std::size_t line = reader.record_line();
        if (row->size() != 3) throw parse_error(path, line, 1, "expected 3 fields");
        RetweetEdge edge;
        edge.source_id = (*row)[0];
        edge.target_id = (*row)[1];
        if (edge.source_id.empty() || edge.target_id.empty())
            throw parse_error(path, line, 1, "empty node id");
        edge.count = detail::parse_int_field(reader, (*row)[2], "count");
        if (edge.count <= 0) throw parse_error(path, line, 1, "count must be a positive integer");
        edges.push_back(std::move(edge));
    }
    return edges;
}

// ---------------------------------------------------------------------------
// Identifier resolution

double jaccard_similarity(std::string_view name_a, std::string_view name_b) {
    std::set<std::string> a = detail::token_set(name_a);
    std::set<std::string> b = detail::token_set(name_b);
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const std::string& t : a) common += b.count(t);
    std::size_t unions = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(unions);
}

std::string_view to_string(MatchMethod m) {
    switch (m) {
        case MatchMethod::ExactId: return "exact-id";
        case MatchMethod::ExactName: return "exact-name";
        case MatchMethod::Jaccard: return "jaccard";
    }
    return "exact-id";
}

const IdMatch* IdMapping::find(std::string_view voter_key) const {
    auto it = std::lower_bound(matches.begin(), matches.end(), voter_key,
                               [](const IdMatch& m, std::string_view key) { return m.voter_key < key; });
    if (it == matches.end() || it->voter_key != voter_key) return nullptr;
    return &*it;
}

std::string voter_key(const RawVoteRecord& record) {
    return record.voter_id.empty() ? record.voter_name : record.voter_id;
}

namespace {

struct VoterUnit {
    std::string key;
    std::string name; // first-seen display name
    bool has_id;
};

struct RegisterUnit {
    std::string id;
    std::string name;
    std::string normalized;
};

} // namespace

IdMapping resolve_ids(std::span<const Member> reg, std::span<const RawRollcall> rollcalls,
                      double threshold) {
    if (!(threshold > 0.0) || threshold > 1.0)
        throw precondition_error("jaccard threshold must lie in (0, 1]");

    // Unique register ids; epoch rows of one person share id and name.
    std::vector<RegisterUnit> units;
    std::unordered_set<std::string> seen_ids;
    for (const Member& m : reg) {
        if (seen_ids.insert(m.id).second)
            units.push_back({m.id, m.full_name, detail::normalized_name(m.full_name)});
    }

    // Unique voter keys in first-appearance order.
    std::vector<VoterUnit> voters;
    std::unordered_set<std::string> seen_keys;
    for (const RawRollcall& rc : rollcalls) {
        for (const RawVoteRecord& record : rc.records) {
            std::string key = voter_key(record);
            if (seen_keys.insert(key).second)
                voters.push_back({std::move(key), record.voter_name, !record.voter_id.empty()});
        }
    }

    IdMapping mapping;
    std::unordered_set<std::string> used_register;
    std::unordered_set<std::string> matched_voters;
    auto accept = [&](const VoterUnit& voter, const RegisterUnit& unit, double score, MatchMethod method) {
        mapping.matches.push_back({voter.key, unit.id, score, method});
        used_register.insert(unit.id);
        matched_voters.insert(voter.key);
    };

    std::unordered_map<std::string, const RegisterUnit*> by_id;
    for (const RegisterUnit& u : units) by_id[u.id] = &u;
    for (const VoterUnit& voter : voters) {
        if (!voter.has_id) continue;
        auto it = by_id.find(voter.key);
        if (it != by_id.end()) accept(voter, *it->second, 1.0, MatchMethod::ExactId);
    }

    // Exact normalized names; several register members sharing the record's
    // name are indistinguishable at score 1.
    std::vector<const VoterUnit*> pending;
    for (const VoterUnit& voter : voters) {
        if (!matched_voters.count(voter.key)) pending.push_back(&voter);
    }
    std::sort(pending.begin(), pending.end(),
              [](const VoterUnit* a, const VoterUnit* b) { return a->key < b->key; });
    for (const VoterUnit* voter : pending) {
        std::string normalized = detail::normalized_name(voter->name);
        if (normalized.empty()) continue;
        std::vector<const RegisterUnit*> candidates;
        for (const RegisterUnit& unit : units) {
            if (!used_register.count(unit.id) && unit.normalized == normalized) candidates.push_back(&unit);
        }
        if (candidates.size() > 1) {
            std::ostringstream msg;
            msg << "record name '" << voter->name << "' matches register ids";
            for (const RegisterUnit* c : candidates) msg << " '" << c->id << "'";
            msg << " at equal score";
            throw validation_error(msg.str());
        }
        if (candidates.size() == 1) accept(*voter, *candidates[0], 1.0, MatchMethod::ExactName);
    }

    // Greedy Jaccard over what is left, best scores first.
    struct Candidate {
        double score;
        std::string register_id;
        std::string voter_key;
        const VoterUnit* voter;
        const RegisterUnit* unit;
    };
    std::vector<Candidate> candidates;
    for (const VoterUnit* voter : pending) {
        if (matched_voters.count(voter->key)) continue;
        for (const RegisterUnit& unit : units) {
            if (used_register.count(unit.id)) continue;
            double score = jaccard_similarity(voter->name, unit.name);
            if (score >= threshold) candidates.push_back({score, unit.id, voter->key, voter, &unit});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.voter_key != b.voter_key) return a.voter_key < b.voter_key;
        return a.register_id < b.register_id;
    });
    std::size_t i = 0;
    while (i < candidates.size()) {
        // One voter's candidates at one score level are contiguous.
        std::size_t j = i + 1;
        while (j < candidates.size() && candidates[j].score == candidates[i].score &&
               candidates[j].voter_key == candidates[i].voter_key)
            ++j;
        const Candidate& c = candidates[i];
        if (!matched_voters.count(c.voter_key) && !used_register.count(c.register_id)) {
            std::vector<const Candidate*> available;
            for (std::size_t k = i; k < j; ++k) {
                if (!used_register.count(candidates[k].register_id)) available.push_back(&candidates[k]);
            }
            if (available.size() > 1) {
                std::ostringstream msg;
                msg << "record name '" << c.voter->name << "' matches register ids";
                for (const Candidate* a : available) msg << " '" << a->register_id << "'";
                msg << " at equal score " << c.score;
                throw validation_error(msg.str());
            }
            accept(*c.voter, *c.unit, c.score, MatchMethod::Jaccard);
        }
        i = j;
    }

    for (const VoterUnit& voter : voters) {
        if (!matched_voters.count(voter.key)) mapping.unmatched.push_back(voter.key);
    }
    std::sort(mapping.unmatched.begin(), mapping.unmatched.end());
    std::sort(mapping.matches.begin(), mapping.matches.end(),
              [](const IdMatch& a, const IdMatch& b) { return a.voter_key < b.voter_key; });
    return mapping;
}

// ---------------------------------------------------------------------------
// Dataset assembly

namespace {

struct Epoch {
    std::size_t register_row;
    std::string member_id; // raw id, or id@active_from for multi-epoch people
};

[[noreturn]] void throw_listing(const char* what, const std::vector<std::string>& items) {
    std::ostringstream msg;
    msg << what << ":";
    std::size_t shown = std::min<std::size_t>(items.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) msg << " '" << items[i] << "'";
    if (items.size() > shown) msg << " and " << items.size() - shown << " more";
    throw validation_error(msg.str());
}

} // namespace

Dataset build_dataset(std::span<const Member> reg, const std::vector<RawRollcall>& rollcalls,
                      std::span<const RetweetEdge> retweet_edges, const IdMapping& mapping,
                      const BuildOptions& options) {
    Dataset dataset;
    dataset.mapping = mapping;
    BuildReport& report = dataset.report;

    // Epoch expansion: one matrix member per register row, renamed when a
    // person has several rows.
    std::unordered_map<std::string, std::vector<std::size_t>> rows_by_id;
    for (std::size_t i = 0; i < reg.size(); ++i) rows_by_id[reg[i].id].push_back(i);

    std::vector<Member> members(reg.begin(), reg.end());
    std::unordered_map<std::string, std::vector<std::size_t>> epochs_by_id; // sorted by active_from
    for (auto& [id, rows] : rows_by_id) {
        std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            return reg[a].active_from < reg[b].active_from;
        });
        if (rows.size() > 1) {
            for (std::size_t row : rows) {
                members[row].id = reg[row].id + "@" + reg[row].active_from.to_string();
                ++report.epoch_members;
            }
        }
        epochs_by_id[id] = rows;
    }

    std::vector<std::string> unresolved;
    std::set<std::string> unresolved_seen;
    auto record_unresolved = [&](const std::string& key) {
        if (unresolved_seen.insert(key).second) unresolved.push_back(key);
    };

    std::vector<RollCall> calls;
    calls.reserve(rollcalls.size());
    for (const RawRollcall& raw : rollcalls) {
        RollCall rc;
        rc.id = raw.id;
        rc.date = raw.date;
        rc.policy_area = raw.policy_area;
        for (const RawVoteRecord& record : raw.records) {
            ++report.vote_records;
            std::string key = voter_key(record);
            const IdMatch* match = mapping.find(key);
            if (!match) {
                ++report.votes_dropped_unresolved;
                record_unresolved(key);
                continue;
            }
            const auto& rows = epochs_by_id.at(match->register_id);
            const std::size_t* hit = nullptr;
            for (const std::size_t& row : rows) {
                if (reg[row].active_from <= raw.date && raw.date <= reg[row].active_to) {
                    hit = &row;
                    break;
                }
            }
            if (!hit) {
                if (options.strict)
                    throw validation_error("vote by '" + key + "' on " + raw.date.to_string() +
                                           " falls outside every active interval of member '" +
                                           match->register_id + "'");
                ++report.votes_dropped_out_of_epoch;
                continue;
            }
            const std::string& member_id = members[*hit].id;
            auto [it, inserted] = rc.votes.emplace(member_id, record.value);
            if (!inserted) {
                if (options.strict)
                    throw validation_error("duplicate vote for member '" + member_id +
                                           "' in roll-call '" + raw.id + "'");
                ++report.votes_dropped_duplicate;
            }
        }
        calls.push_back(std::move(rc));
    }

    if (!unresolved.empty() && options.strict)
        throw_listing("unresolved voter identifiers", unresolved);
    report.dropped_voter_keys = std::move(unresolved);

    dataset.matrix = VoteMatrix(std::move(members), std::move(calls), options.group_order);
    const VoteMatrix& matrix = dataset.matrix;

    // Retweet edges live at the person level; multi-epoch people contribute
    // through their latest epoch.  Matrix member order equals register row
    // order, so a row index is a member index.
    std::unordered_map<std::string, std::int32_t> person_to_member;
    for (const auto& [id, rows] : epochs_by_id)
        person_to_member[id] = static_cast<std::int32_t>(rows.back());

    std::map<std::pair<std::int32_t, std::int32_t>, double> weights;
    std::vector<std::string> unknown_nodes;
    std::set<std::string> unknown_seen;
    for (const RetweetEdge& edge : retweet_edges) {
        ++report.retweet_rows;
        auto s = person_to_member.find(edge.source_id);
        auto t = person_to_member.find(edge.target_id);
        if (s == person_to_member.end() || t == person_to_member.end()) {
            if (s == person_to_member.end() && unknown_seen.insert(edge.source_id).second)
                unknown_nodes.push_back(edge.source_id);
            if (t == person_to_member.end() && unknown_seen.insert(edge.target_id).second)
                unknown_nodes.push_back(edge.target_id);
            ++report.retweets_dropped_unknown;
            continue;
        }
        if (s->second == t->second) {
            if (options.strict)
                throw validation_error("self retweet for member '" + edge.source_id + "'");
            ++report.retweets_dropped_self;
            continue;
        }
        std::pair<std::int32_t, std::int32_t> key{std::min(s->second, t->second),
                                                  std::max(s->second, t->second)};
        weights[key] += static_cast<double>(edge.count);
        report.retweet_events += edge.count;
    }
    if (!unknown_nodes.empty() && options.strict)
        throw_listing("retweet rows reference unknown member ids", unknown_nodes);

    // Node set: members incident to at least one accepted edge, member order.
    std::set<std::int32_t> involved;
    for (const auto& [pair, weight] : weights) {
        involved.insert(pair.first);
        involved.insert(pair.second);
    }
    std::vector<std::string> node_ids;
    std::unordered_map<std::int32_t, std::int32_t> node_of_member;
    for (std::int32_t member : involved) {
        node_of_member[member] = static_cast<std::int32_t>(node_ids.size());
        node_ids.push_back(matrix.member(member).id);
    }
    dataset.retweets = Graph(std::move(node_ids));
    for (const auto& [pair, weight] : weights)
        dataset.retweets.add_edge(node_of_member[pair.first], node_of_member[pair.second], weight);

    // Attendance: share of cast cells per group and overall.
    if (matrix.member_count() > 0 && matrix.rollcall_count() > 0) {
        std::int64_t total_cast = 0;
        for (const std::string& group : matrix.groups()) {
            MemberSet subset = matrix.subset_by_group(group);
            std::int64_t cast = 0;
            for (std::int32_t u = 0; u < matrix.rollcall_count(); ++u)
                cast += matrix.cast_count_at(u, subset);
            total_cast += cast;
            report.attendance_by_group[group] =
                static_cast<double>(cast) /
                (static_cast<double>(subset.size()) * static_cast<double>(matrix.rollcall_count()));
        }
        report.attendance_overall =
            static_cast<double>(total_cast) / (static_cast<double>(matrix.member_count()) *
                                               static_cast<double>(matrix.rollcall_count()));
    }
    return dataset;
}

// ---------------------------------------------------------------------------
// Canonical bundle writers

void write_members_csv(const std::string& path, std::span<const Member> members) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "id,full_name,group,country,national_party,twitter_handle,active_from,active_to\n";
    for (const Member& m : members) {
        std::vector<std::string> fields = {m.id,
                                           m.full_name,
                                           m.group,
                                           m.country,
                                           m.national_party,
                                           m.twitter_handle,
                                           m.active_from.to_string(),
                                           m.active_to.to_string()};
        detail::write_csv_row(out, fields);
    }
}

void write_votes_csv(const std::string& path, const VoteMatrix& matrix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "rollcall_id,date,policy_area,voter_id,voter_name,value\n";
    for (const RollCall& rc : matrix.rollcalls()) {
        for (const auto& [member_id, value] : rc.votes) {
            const Member& m = matrix.member(matrix.member_index(member_id));
            std::vector<std::string> fields = {rc.id,       rc.date.to_string(),
                                               rc.policy_area, member_id,
                                               m.full_name, std::string(covote::to_string(value))};
            detail::write_csv_row(out, fields);
        }
    }
}

void write_retweets_csv(const std::string& path, const Graph& retweets) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "source_id,target_id,count\n";
    retweets.for_each_edge([&](std::int32_t i, std::int32_t j, double weight) {
        double rounded = std::round(weight);
        if (rounded != weight || weight < 1.0)
            throw validation_error("retweet weight between '" + retweets.node_id(i) + "' and '" +
                                   retweets.node_id(j) + "' is not a positive integer");
        std::vector<std::string> fields = {retweets.node_id(i), retweets.node_id(j),
                                           std::to_string(static_cast<std::int64_t>(rounded))};
        detail::write_csv_row(out, fields);
    });
}

} // namespace covote::ingest
