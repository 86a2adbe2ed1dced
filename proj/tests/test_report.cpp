#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "covote/agreement.hpp"
#include "covote/report.hpp"
#include "covote/rng.hpp"
#include "helpers.hpp"

using namespace covote;
using namespace covote::report;
using covote::testutil::TempDir;

namespace {

PairMatrix empty_matrix(std::string metric, std::vector<std::string> groups) {
    PairMatrix m;
    m.metric = std::move(metric);
    m.groups = std::move(groups);
    m.cells.assign(m.groups.size() * m.groups.size(), std::nullopt);
    return m;
}

} // namespace

TEST_CASE("pair matrix set fills both orientations and at bounds-checks") {
    PairMatrix m = empty_matrix("alpha", {"A", "B", "C"});
    m.set(0, 2, 0.5);
    CHECK(m.at(0, 2) == 0.5);
    CHECK(m.at(2, 0) == 0.5);
    CHECK_FALSE(m.at(1, 2).has_value());
    CHECK_THROWS_AS((void)m.at(3, 0), precondition_error);
    CHECK_THROWS_AS(m.set(0, -1, 1.0), precondition_error);
}

TEST_CASE("alpha matrix mirrors the agreement functions and keeps undefined cells missing") {
    // G3 has a single member, so its within-group score is undefined.
    std::vector<Member> members = {
        testutil::member("m0", "A0", "G1"), testutil::member("m1", "A1", "G1"),
        testutil::member("m2", "B0", "G2"), testutil::member("m3", "B1", "G2"),
        testutil::member("m4", "C0", "G3")};
    std::vector<RollCall> rollcalls = {
        testutil::rollcall("r1", "2020-01-10", "Trade",
                           {{"m0", VoteValue::Yes},
                            {"m1", VoteValue::Yes},
                            {"m2", VoteValue::No},
                            {"m3", VoteValue::Yes},
                            {"m4", VoteValue::No}}),
        testutil::rollcall("r2", "2020-01-11", "Trade",
                           {{"m0", VoteValue::No},
                            {"m1", VoteValue::Yes},
                            {"m2", VoteValue::No},
                            {"m3", VoteValue::No},
                            {"m4", VoteValue::Yes}}),
    };
    VoteMatrix matrix(std::move(members), std::move(rollcalls));

    PairMatrix m = build_alpha_matrix(matrix);
    REQUIRE(m.groups == std::vector<std::string>{"G1", "G2", "G3"});
    CHECK(m.metric == "alpha");

    AlphaScore g1 = group_cohesion(matrix, "G1");
    REQUIRE(g1.defined);
    CHECK(m.at(0, 0) == g1.alpha);

    AlphaScore g12 = group_coalition(matrix, "G1", "G2");
    REQUIRE(g12.defined);
    CHECK(m.at(0, 1) == g12.alpha);
    CHECK(m.at(1, 0) == g12.alpha);

    // One member: no within pairs, the cell stays empty rather than zero.
    CHECK_FALSE(m.at(2, 2).has_value());
    CHECK(m.at(1, 2).has_value());
}

TEST_CASE("meta matrix picks mix terms in either orientation") {
    std::vector<meta::MetaCsvRow> rows;
    rows.push_back({"mix.group.A.A", "Overall", 1.5, 0.1, 0.2, 3});
    rows.push_back({"mix.group.A.B", "Overall", -0.5, 0.1, 0.2, 3});
    rows.push_back({"mix.group.C.B", "Overall", 0.25, 0.1, 0.2, 3}); // reversed orientation
    rows.push_back({"mix.group.A.C", "Overall", std::nullopt, std::nullopt, std::nullopt, 0});
    rows.push_back({"mix.group.B.B", "Trade", 9.0, 0.1, 0.2, 3}); // other class, ignored
    rows.push_back({"edges", "Overall", 2.0, 0.1, 0.2, 3});       // not a mix term

    PairMatrix m = build_meta_matrix({"A", "B", "C"}, rows, "Overall");
    CHECK(m.metric == "ergm-mu");
    CHECK(m.at(0, 0) == 1.5);
    CHECK(m.at(0, 1) == -0.5);
    CHECK(m.at(1, 2) == 0.25);
    CHECK(m.at(2, 1) == 0.25);
    CHECK_FALSE(m.at(0, 2).has_value()); // undefined pooled cell stays missing
    CHECK_FALSE(m.at(1, 1).has_value()); // the Trade row must not leak into Overall
}

TEST_CASE("retweet matrix mirrors the average-volume helpers") {
    std::vector<Member> members = {
        testutil::member("m0", "A0", "G1"), testutil::member("m1", "A1", "G1"),
        testutil::member("m2", "B0", "G2"),
        testutil::member("m3", "C0", "G3")}; // G3 never appears in the graph
    std::vector<RollCall> rollcalls = {testutil::rollcall(
        "r1", "2020-01-10", "Trade",
        {{"m0", VoteValue::Yes}, {"m1", VoteValue::Yes}, {"m2", VoteValue::No}, {"m3", VoteValue::No}})};
    VoteMatrix matrix(std::move(members), std::move(rollcalls));

    Graph g({"m0", "m1", "m2"});
    g.add_edge(0, 1, 10.0);
    g.add_edge(1, 2, 3.0);

    PairMatrix m = build_retweet_matrix(g, matrix);
    CHECK(m.metric == "avg-rt");
    CHECK(m.at(0, 0) == 10.0 / 2.0); // internal weight over group size
    CHECK(m.at(0, 1) == 3.0 / 3.0);  // cross weight over combined size
    CHECK(m.at(1, 1) == 0.0);        // present but no internal edges
    CHECK_FALSE(m.at(0, 2).has_value()); // G3 has no nodes in the graph
    CHECK_FALSE(m.at(2, 2).has_value());
}

TEST_CASE("threshold blocks honor the predicate and skip missing cells") {
    PairMatrix m = empty_matrix("alpha", {"A", "B", "C"});
    m.set(0, 0, 0.9);
    m.set(0, 1, 0.3);
    m.set(1, 1, 0.8);
    m.set(0, 2, -0.6);
    // (1,2) and (2,2) stay missing

    auto blocks = threshold_blocks(m, default_alpha_thresholds());
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0].label == "high");
    CHECK(blocks[0].pairs == std::vector<std::pair<std::string, std::string>>{{"A", "A"}, {"B", "B"}});
    CHECK(blocks[1].label == "medium");
    CHECK(blocks[1].pairs ==
          std::vector<std::pair<std::string, std::string>>{{"A", "A"}, {"A", "B"}, {"B", "B"}});
    CHECK(blocks[2].label == "opposition");
    CHECK(blocks[2].pairs == std::vector<std::pair<std::string, std::string>>{{"A", "C"}});
}

TEST_CASE("raising a greater-than cutoff never adds pairs") {
    Rng rng(404);
    PairMatrix m = empty_matrix("alpha", {"A", "B", "C", "D"});
    for (std::int32_t i = 0; i < m.size(); ++i)
        for (std::int32_t j = i; j < m.size(); ++j)
            if (rng.uniform01() < 0.8) m.set(i, j, rng.uniform01() * 2.0 - 1.0);

    ThresholdSpec spec{"alpha", {{"loose", true, 0.0}, {"tight", true, 0.5}}};
    auto blocks = threshold_blocks(m, spec);
    REQUIRE(blocks.size() == 2);
    for (const auto& pair : blocks[1].pairs) {
        bool found = std::find(blocks[0].pairs.begin(), blocks[0].pairs.end(), pair) !=
                     blocks[0].pairs.end();
        CHECK(found);
    }
    CHECK(blocks[1].pairs.size() <= blocks[0].pairs.size());
}

TEST_CASE("threshold spec validation") {
    PairMatrix m = empty_matrix("alpha", {"A", "B"});
    m.set(0, 1, 0.5);

    ThresholdSpec wrong{"avg-rt", {{"high", true, 10.0}}};
    CHECK_THROWS_AS((void)threshold_blocks(m, wrong), precondition_error);

    ThresholdSpec dup{"alpha", {{"high", true, 0.5}, {"high", true, 0.75}}};
    CHECK_THROWS_WITH_AS((void)threshold_blocks(m, dup), doctest::Contains("duplicate threshold label"),
                         validation_error);
}

TEST_CASE("rank correlation matches frozen hand-computed values") {
    PairMatrix a = empty_matrix("alpha", {"A", "B", "C", "D"});
    PairMatrix b = empty_matrix("avg-rt", {"A", "B", "C", "D"});
    // Off-diagonal cells in iteration order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
    double ax[] = {1.0, 2.0, 3.0, 4.0};
    double bx[] = {2.0, 1.0, 3.0, 4.0}; // one adjacent swap: rho = 0.8
    std::pair<int, int> cells[] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}};
    for (int k = 0; k < 4; ++k) {
        a.set(cells[k].first, cells[k].second, ax[k]);
        b.set(cells[k].first, cells[k].second, bx[k]);
    }
    // Two extra cells defined on only one side must be ignored.
    a.set(1, 3, 99.0);
    b.set(2, 3, -99.0);

    CHECK(rank_correlation(a, a) == 1.0);
    CHECK(rank_correlation(a, b) == 0.8);
    CHECK(rank_correlation(b, a) == 0.8);
}

TEST_CASE("rank correlation averages tied ranks") {
    PairMatrix a = empty_matrix("alpha", {"A", "B", "C", "D"});
    PairMatrix b = empty_matrix("avg-rt", {"A", "B", "C", "D"});
    double ax[] = {1.0, 2.0, 2.0, 3.0}; // ranks 1, 2.5, 2.5, 4
    double bx[] = {10.0, 20.0, 30.0, 40.0};
    std::pair<int, int> cells[] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}};
    for (int k = 0; k < 4; ++k) {
        a.set(cells[k].first, cells[k].second, ax[k]);
        b.set(cells[k].first, cells[k].second, bx[k]);
    }
    CHECK(rank_correlation(a, b) == doctest::Approx(0.9486832980505138).epsilon(1e-14));
}

TEST_CASE("rank correlation preconditions") {
    PairMatrix a = empty_matrix("alpha", {"A", "B", "C"});
    PairMatrix other = empty_matrix("alpha", {"A", "B", "X"});
    CHECK_THROWS_AS((void)rank_correlation(a, other), precondition_error);

    PairMatrix b = empty_matrix("avg-rt", {"A", "B", "C"});
    a.set(0, 1, 1.0);
    b.set(0, 1, 2.0);
    a.set(0, 2, 2.0);
    b.set(0, 2, 1.0);
    // Only two comparable cells.
    CHECK_THROWS_WITH_AS((void)rank_correlation(a, b), doctest::Contains("at least 3"),
                         precondition_error);

    a.set(1, 2, 3.0);
    b.set(1, 2, 3.0);
    CHECK_NOTHROW((void)rank_correlation(a, b));

    PairMatrix flat = empty_matrix("avg-rt", {"A", "B", "C"});
    flat.set(0, 1, 5.0);
    flat.set(0, 2, 5.0);
    flat.set(1, 2, 5.0);
    CHECK_THROWS_WITH_AS((void)rank_correlation(a, flat), doctest::Contains("constant"),
                         precondition_error);
}

TEST_CASE("pairs csv round-trips values and missing cells") {
    TempDir dir("report");
    PairMatrix m = empty_matrix("alpha", {"A", "B,quoted", "C"});
    m.set(0, 0, 1.0);
    m.set(0, 1, -0.125);
    m.set(1, 2, 0.1 + 0.2); // not exactly 0.3; the writer must preserve the bits
    std::string path = dir.file("pairs.csv");
    write_pairs_csv(path, m);

    auto rows = read_pairs_csv(path);
    REQUIRE(rows.size() == 6); // 3 diagonal + 3 off-diagonal, missing ones included
    CHECK(rows[0].group_a == "A");
    CHECK(rows[0].group_b == "A");
    CHECK(rows[0].value == 1.0);
    CHECK(rows[1].group_b == "B,quoted"); // comma survives quoting
    CHECK(rows[1].value == -0.125);
    CHECK_FALSE(rows[2].value.has_value()); // (A,C) missing
    CHECK(rows[4].value == 0.1 + 0.2);      // bitwise round trip
    CHECK_FALSE(rows[5].value.has_value()); // (C,C) missing
}

TEST_CASE("pairs csv omits the diagonal when the matrix has none") {
    TempDir dir("report");
    PairMatrix m = empty_matrix("ergm-mu", {"A", "B"});
    m.has_diagonal = false;
    m.set(0, 1, 2.0);
    std::string path = dir.file("pairs.csv");
    write_pairs_csv(path, m);
    auto rows = read_pairs_csv(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].group_a == "A");
    CHECK(rows[0].group_b == "B");
}

TEST_CASE("blocks json carries the thresholds and matching pairs") {
    TempDir dir("report");
    PairMatrix m = empty_matrix("avg-rt", {"A", "B"});
    m.set(0, 0, 20.0);
    m.set(0, 1, 0.0005);
    m.set(1, 1, 2.0);
    std::string path = dir.file("blocks.json");
    write_blocks_json(path, m, default_retweet_thresholds());

    std::ifstream in(path);
    auto doc = nlohmann::json::parse(in);
    CHECK(doc.at("schema_version") == 1);
    CHECK(doc.at("metric") == "avg-rt");
    const auto& thresholds = doc.at("thresholds");
    REQUIRE(thresholds.size() == 3);
    CHECK(thresholds[0].at("label") == "high");
    CHECK(thresholds[0].at("comparison") == ">");
    CHECK(thresholds[0].at("value") == 10.0);
    REQUIRE(thresholds[0].at("pairs").size() == 1);
    CHECK(thresholds[0].at("pairs")[0][0] == "A");
    CHECK(thresholds[0].at("pairs")[0][1] == "A");
    CHECK(thresholds[1].at("label") == "medium");
    REQUIRE(thresholds[1].at("pairs").size() == 2);
    CHECK(thresholds[2].at("label") == "low");
    CHECK(thresholds[2].at("comparison") == "<");
    REQUIRE(thresholds[2].at("pairs").size() == 1);
    CHECK(thresholds[2].at("pairs")[0][1] == "B");
}

TEST_CASE("comparison json writes null spearman with a note") {
    TempDir dir("report");
    std::vector<ComparisonEntry> entries;
    entries.push_back({"alpha", "ergm-mu", "overall", 0.75, 6, ""});
    entries.push_back({"alpha", "avg-rt", "overall", std::nullopt, 2,
                       "rank correlation needs at least 3 comparable off-diagonal cells"});
    std::string path = dir.file("comparison.json");
    write_comparison_json(path, entries);

    std::ifstream in(path);
    auto doc = nlohmann::json::parse(in);
    CHECK(doc.at("schema_version") == 1);
    const auto& list = doc.at("comparisons");
    REQUIRE(list.size() == 2);
    CHECK(list[0].at("metric_a") == "alpha");
    CHECK(list[0].at("metric_b") == "ergm-mu");
    CHECK(list[0].at("scope") == "overall");
    CHECK(list[0].at("spearman") == 0.75);
    CHECK(list[0].at("cells") == 6);
    CHECK_FALSE(list[0].contains("note"));
    CHECK(list[1].at("spearman").is_null());
    CHECK(list[1].at("note") == entries[1].note);
}
