#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "covote/networks.hpp"
#include "covote/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace covote;
using testutil::member;
using testutil::rollcall;

namespace {

VoteMatrix five_member_fixture() {
    std::vector<Member> members = {member("a", "A", "G1"), member("b", "B", "G1"),
                                   member("c", "C", "G2"), member("d", "D", "G2"),
                                   member("e", "E", "G2")};
    std::vector<RollCall> rollcalls = {
        rollcall("r1", "2020-01-10", "",
                 {{"a", VoteValue::Yes},
                  {"b", VoteValue::Yes},
                  {"c", VoteValue::Yes},
                  {"d", VoteValue::No},
                  {"e", VoteValue::No}}),
        rollcall("r2", "2020-01-11", "",
                 {{"a", VoteValue::Yes}, {"b", VoteValue::Abstain}, {"c", VoteValue::No}}),
    };
    return VoteMatrix(std::move(members), std::move(rollcalls));
}

} // namespace

TEST_CASE("co-vote network joins same-side voters into cliques") {
    VoteMatrix matrix = five_member_fixture();
    Graph g = build_covote_network(matrix, 0);
    CHECK(g.node_count() == 5);
    // Yes clique {a,b,c}: 3 edges; No clique {d,e}: 1 edge.
    CHECK(g.edge_count() == 4);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(0, 2));
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(3, 4));
    CHECK_FALSE(g.has_edge(0, 3));

    Graph g2 = build_covote_network(matrix, "r2");
    // only a (Yes) and c (No) cast; different sides, no edge; b/d/e isolated
    CHECK(g2.edge_count() == 0);
}

TEST_CASE("group nodes respect declared membership and graph presence") {
    VoteMatrix matrix = five_member_fixture();
    Graph g(std::vector<std::string>{"a", "c", "d"}); // b and e absent from the graph
    g.add_edge(0, 1, 2.0);
    auto g1 = group_nodes(g, matrix, "G1");
    auto g2 = group_nodes(g, matrix, "G2");
    CHECK(g1 == std::vector<std::int32_t>{0});
    CHECK(g2 == std::vector<std::int32_t>{1, 2});
    CHECK_THROWS_AS(group_nodes(g, matrix, "NOPE"), not_found_error);
}

TEST_CASE("average retweet volumes divide exact weight sums") {
    Graph g(std::vector<std::string>{"a1", "a2", "b1"});
    g.add_edge(0, 1, 10.0); // inside A
    g.add_edge(0, 2, 4.0);  // cross
    g.add_edge(1, 2, 2.0);  // cross

    std::vector<std::int32_t> set_a = {0, 1}, set_b = {2};
    CHECK(internal_weight(g, set_a) == 10.0);
    CHECK(cross_weight(g, set_a, set_b) == 6.0);
    CHECK(avg_retweets_within(g, set_a) == 5.0);
    CHECK(avg_retweets_between(g, set_a, set_b) == 2.0); // 6 / (2 + 1)

    std::vector<std::int32_t> empty;
    CHECK_FALSE(avg_retweets_within(g, empty).has_value());
    CHECK_FALSE(avg_retweets_between(g, set_a, empty).has_value());
}

TEST_CASE("retweet weight is conserved across the group partition") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto n = static_cast<std::int32_t>(5 + rng.below(20));
        std::vector<std::string> ids;
        std::vector<std::string> groups;
        for (std::int32_t i = 0; i < n; ++i) {
            ids.push_back("m" + std::to_string(i));
            groups.push_back("G" + std::to_string(rng.below(4)));
        }
        Graph g(ids);
        for (std::int32_t i = 0; i < n; ++i)
            for (std::int32_t j = i + 1; j < n; ++j)
                if (rng.bernoulli(0.3)) g.add_edge(i, j, static_cast<double>(1 + rng.below(50)));

        std::map<std::string, std::vector<std::int32_t>> by_group;
        for (std::int32_t i = 0; i < n; ++i) by_group[groups[static_cast<std::size_t>(i)]].push_back(i);

        double total = 0.0;
        std::vector<std::string> names;
        for (const auto& [name, _] : by_group) names.push_back(name);
        for (std::size_t a = 0; a < names.size(); ++a) {
            total += internal_weight(g, by_group[names[a]]);
            for (std::size_t b = a + 1; b < names.size(); ++b)
                total += cross_weight(g, by_group[names[a]], by_group[names[b]]);
        }
        CHECK(total == g.total_weight()); // exact: integer-valued weights
    }
}

TEST_CASE("timeline z-scores match the frozen four-day example") {
    // counts 1,1,1,5: mean 2, population variance 3, so the last day's
    // z-score is 3/sqrt(3) = sqrt(3)
    std::map<Date, std::int64_t> counts = {
        {*Date::parse("2020-05-01"), 1},
        {*Date::parse("2020-05-02"), 1},
        {*Date::parse("2020-05-03"), 1},
        {*Date::parse("2020-05-04"), 5},
    };
    std::set<Date> sessions = {*Date::parse("2020-05-02")};
    auto points = activity_timeline(counts, sessions);
    REQUIRE(points.size() == 4);
    CHECK(points[3].zscore == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(points[0].zscore == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK_FALSE(points[3].is_peak); // sqrt(3) < 2
    CHECK(points[1].has_session);
    CHECK_FALSE(points[0].has_session);
}

TEST_CASE("timeline fills gaps with zero-count days and flags peaks") {
    std::map<Date, std::int64_t> counts = {
        {*Date::parse("2020-05-01"), 1}, {*Date::parse("2020-05-03"), 1},
        {*Date::parse("2020-05-04"), 1}, {*Date::parse("2020-05-05"), 1},
        {*Date::parse("2020-05-06"), 1}, {*Date::parse("2020-05-07"), 1},
        {*Date::parse("2020-05-08"), 1}, {*Date::parse("2020-05-09"), 1},
        {*Date::parse("2020-05-10"), 1}, {*Date::parse("2020-05-11"), 30},
    };
    auto points = activity_timeline(counts, {});
    REQUIRE(points.size() == 11); // 2020-05-02 filled in
    CHECK(points[1].date == *Date::parse("2020-05-02"));
    CHECK(points[1].count == 0);
    CHECK(points.back().is_peak);
    int peaks = 0;
    for (const auto& p : points) peaks += p.is_peak ? 1 : 0;
    CHECK(peaks == 1);
}

TEST_CASE("constant timeline has zero z-scores and no peaks") {
    std::map<Date, std::int64_t> counts = {
        {*Date::parse("2020-05-01"), 3},
        {*Date::parse("2020-05-02"), 3},
    };
    auto points = activity_timeline(counts, {});
    for (const auto& p : points) {
        CHECK(p.zscore == 0.0);
        CHECK_FALSE(p.is_peak);
    }
}

TEST_CASE("timeline requires at least two distinct days") {
    std::map<Date, std::int64_t> one = {{*Date::parse("2020-05-01"), 3}};
    CHECK_THROWS_AS(activity_timeline(one, {}), precondition_error);
    CHECK_THROWS_AS(activity_timeline({}, {}), precondition_error);
}

TEST_CASE("timeline csv export is stable") {
    testutil::TempDir dir("timeline");
    std::map<Date, std::int64_t> counts = {
        {*Date::parse("2020-05-01"), 1},
        {*Date::parse("2020-05-02"), 3},
    };
    auto points = activity_timeline(counts, {*Date::parse("2020-05-01")});
    std::string path = dir.file("timeline.csv");
    write_timeline_csv(path, points);
    CHECK(testutil::read_file(path) ==
          "date,count,zscore,is_peak,has_session\n"
          "2020-05-01,1,-1,false,true\n"
          "2020-05-02,3,1,false,false\n");
}

TEST_CASE("graph rejects malformed edits") {
    Graph g(std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(g.add_edge(0, 0, 1.0), precondition_error);
    g.add_edge(0, 1, 1.0);
    CHECK_THROWS_AS(g.add_edge(1, 0, 1.0), precondition_error); // already present
    g.remove_edge(0, 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.total_weight() == 0.0);
    g.toggle_edge(0, 1);
    CHECK(g.edge_weight(1, 0) == 1.0);
    g.toggle_edge(0, 1);
    CHECK_FALSE(g.has_edge(0, 1));
    CHECK_THROWS_AS(Graph(std::vector<std::string>{"a", "a"}), validation_error);
}
