#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covote/types.hpp"

namespace covote::ingest {

// Raw vote token -> VoteValue mapping parsed from a minimal TOML-style file:
// `raw = "Yes"` entries, optional [tokens] section header, # comments, keys
// quotable when they contain spaces or '='.
struct TokenTable {
    std::map<std::string, VoteValue> tokens;

    static TokenTable identity(); // Yes/No/Abstain/Absent map to themselves
    static TokenTable parse_file(const std::string& path);

    std::optional<VoteValue> lookup(std::string_view token) const;
};

struct RawVoteRecord {
    std::string voter_id; // may be empty: some sources carry names only
    std::string voter_name;
    VoteValue value = VoteValue::Absent;
};

struct RawRollcall {
    std::string id;
    Date date;
    std::string policy_area; // empty = unclassified
    std::vector<RawVoteRecord> records;
};

struct ParsedVotes {
    std::vector<RawRollcall> rollcalls; // order of first appearance
    std::vector<std::string> warnings;  // roll-calls without a single cast vote
};

struct RetweetEdge {
    std::string source_id;
    std::string target_id;
    std::int64_t count = 0;
};

// Readers for the three dataset files.  All parse failures throw parse_error
// with file, line, column; register duplicate-id checks allow one member to
// appear in several rows when the active intervals are disjoint (group
// changes mid-term).
std::vector<Member> parse_register(const std::string& path);
ParsedVotes parse_rollcalls(const std::string& path, const TokenTable& tokens);
std::vector<RetweetEdge> parse_retweets(const std::string& path);

// |tokens(a) n tokens(b)| / |tokens(a) u tokens(b)| over normalized name
// token sets; 1.0 when both sets are empty.
double jaccard_similarity(std::string_view name_a, std::string_view name_b);

enum class MatchMethod : std::uint8_t { ExactId, ExactName, Jaccard };

std::string_view to_string(MatchMethod m);

struct IdMatch {
    std::string voter_key; // voter id, or the raw name for id-less records
    std::string register_id;
    double score = 0.0;
    MatchMethod method = MatchMethod::ExactId;
};

struct IdMapping {
    std::vector<IdMatch> matches;       // ascending by voter_key
    std::vector<std::string> unmatched; // voter keys without an accepted match

    const IdMatch* find(std::string_view voter_key) const;
};

// The resolution unit of a vote record: its voter id when present, else the
// raw voter name.
std::string voter_key(const RawVoteRecord& record);

// Three-stage resolution: exact id, exact normalized name, then greedy
// Jaccard matching in descending score order (ties broken by register id,
// then voter key).  A voter whose best available score is reached by two
// register members at once is an ambiguity error.  Injective both ways.
IdMapping resolve_ids(std::span<const Member> reg, std::span<const RawRollcall> rollcalls,
                      double threshold);

struct BuildOptions {
    bool strict = true; // strict: any unresolvable record is an error
    std::vector<std::string> group_order; // pins reporting order; empty = appearance order
};

struct BuildReport {
    std::int64_t vote_records = 0;
    std::int64_t votes_dropped_unresolved = 0;
    std::int64_t votes_dropped_out_of_epoch = 0;
    std::int64_t votes_dropped_duplicate = 0;
    std::int64_t retweet_rows = 0;
    std::int64_t retweet_events = 0; // accepted count sum == graph total weight
    std::int64_t retweets_dropped_unknown = 0;
    std::int64_t retweets_dropped_self = 0;
    std::int32_t epoch_members = 0; // matrix members created by epoch splitting
    std::vector<std::string> dropped_voter_keys;
    std::map<std::string, double> attendance_by_group; // cast share of group cells
    double attendance_overall = 0.0;
};

struct Dataset {
    VoteMatrix matrix;
    Graph retweets;
    IdMapping mapping;
    BuildReport report;
};

// Assembles the matrix and retweet graph.  Members appearing in several
// register epochs become one matrix member per epoch (id suffixed with
// "@<active_from>"); votes route to the epoch containing the roll-call date
// and retweet edges attach to the latest epoch.  Retweet edge weights
// accumulate over rows and directions.
Dataset build_dataset(std::span<const Member> reg, const std::vector<RawRollcall>& rollcalls,
                      std::span<const RetweetEdge> retweet_edges, const IdMapping& mapping,
                      const BuildOptions& options = {});

// Canonical bundle writers; a written bundle re-ingests losslessly with the
// identity token table and exact-id resolution.
void write_members_csv(const std::string& path, std::span<const Member> members);
void write_votes_csv(const std::string& path, const VoteMatrix& matrix);
void write_retweets_csv(const std::string& path, const Graph& retweets);

} // namespace covote::ingest
