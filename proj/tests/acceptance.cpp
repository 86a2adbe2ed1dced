// Release gate.  Each numbered criterion prints exactly one line:
//
//   [PASS] 03 pair contribution identity        (0.02 s) 212 matrices ...
//   [FAIL] 05 estimator agreement               (4.10 s) mask 17: ...
//   [SKIP] 11 public dataset reproduction       COVOTE_DATASET_DIR not set
//
// The process exits nonzero when any criterion fails.  Skipped criteria
// (optional external data) do not fail the gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "covote/agreement.hpp"
#include "covote/ergm.hpp"
#include "covote/meta.hpp"
#include "covote/networks.hpp"
#include "covote/pipeline.hpp"
#include "covote/rng.hpp"
#include "covote/simulate.hpp"
#include "covote/types.hpp"
#include "helpers.hpp"

using namespace covote;
using covote::testutil::member;
using covote::testutil::rollcall;

namespace {

struct Outcome {
    bool pass = true;
    bool skipped = false;
    std::string detail;
};

Outcome fail(std::string detail) { return {false, false, std::move(detail)}; }
Outcome pass(std::string detail) { return {true, false, std::move(detail)}; }
Outcome skip(std::string detail) { return {true, true, std::move(detail)}; }

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

// ---------------------------------------------------------------------------
// Shared random fixtures

struct RandomMatrix {
    VoteMatrix matrix;
    std::int32_t member_count;
};

VoteValue random_vote(std::mt19937_64& rng) {
    // Cast values dominate so most roll-calls carry pair information.
    double u = std::uniform_real_distribution<>(0.0, 1.0)(rng);
    if (u < 0.35) return VoteValue::Yes;
    if (u < 0.65) return VoteValue::No;
    if (u < 0.75) return VoteValue::Abstain;
    return VoteValue::Absent;
}

RandomMatrix random_matrix(std::mt19937_64& rng, std::int32_t min_members, std::int32_t max_members,
                           std::int32_t max_rollcalls) {
    std::int32_t n = std::uniform_int_distribution<std::int32_t>(min_members, max_members)(rng);
    std::int32_t m = std::uniform_int_distribution<std::int32_t>(1, max_rollcalls)(rng);
    std::vector<Member> members;
    for (std::int32_t i = 0; i < n; ++i)
        members.push_back(member("m" + std::to_string(i), "Member " + std::to_string(i),
                                 i % 2 == 0 ? "G1" : "G2"));
    std::vector<RollCall> rollcalls;
    for (std::int32_t u = 0; u < m; ++u) {
        std::map<std::string, VoteValue> votes;
        for (std::int32_t i = 0; i < n; ++i) {
            VoteValue v = random_vote(rng);
            if (v != VoteValue::Absent) votes["m" + std::to_string(i)] = v;
        }
        rollcalls.push_back(rollcall("r" + std::to_string(u), "2020-02-03", "Area", std::move(votes)));
    }
    return {VoteMatrix(std::move(members), std::move(rollcalls)), n};
}

// Brute-force coincidence accumulation over explicit ordered pairs; the
// reference the fast implementation is measured against.
struct OracleCoincidence {
    double entries[2][2] = {{0, 0}, {0, 0}};
    std::int64_t total = 0; // sum of m_u over included roll-calls
    std::int64_t used = 0;
    bool defined = false;
    double alpha = 0.0;

    void finish() {
        double n0 = entries[0][0] + entries[0][1];
        double n1 = entries[1][0] + entries[1][1];
        double n = n0 + n1;
        double expected = n > 1.0 ? 2.0 * n0 * n1 / (n * (n - 1.0)) : 0.0;
        defined = n > 1.0 && expected > 0.0;
        if (defined) {
            double observed = (entries[0][1] + entries[1][0]) / n;
            alpha = 1.0 - observed / expected;
        }
    }
};

OracleCoincidence oracle_within(const VoteMatrix& matrix, const std::vector<std::int32_t>& subset) {
    OracleCoincidence oracle;
    for (std::int32_t u = 0; u < matrix.rollcall_count(); ++u) {
        std::vector<int> cast;
        for (std::int32_t i : subset) {
            VoteValue v = matrix.at(i, u);
            if (v == VoteValue::Yes) cast.push_back(0);
            else if (v == VoteValue::No) cast.push_back(1);
        }
        auto m = static_cast<std::int64_t>(cast.size());
        if (m < 2) continue;
        double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t a = 0; a < cast.size(); ++a)
            for (std::size_t b = 0; b < cast.size(); ++b)
                if (a != b) oracle.entries[cast[a]][cast[b]] += w;
        oracle.total += m;
        ++oracle.used;
    }
    oracle.finish();
    return oracle;
}

// ---------------------------------------------------------------------------
// 1. coincidence matrices and alpha against the brute-force enumerator

Outcome criterion_alpha_oracle() {
    std::mt19937_64 rng(101);
    double worst_entry = 0.0, worst_alpha = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        RandomMatrix rm = random_matrix(rng, 2, 6, 8);

        std::vector<std::int32_t> subset(static_cast<std::size_t>(rm.member_count));
        std::iota(subset.begin(), subset.end(), 0);
        if (trial % 2 == 1) {
            std::shuffle(subset.begin(), subset.end(), rng);
            auto keep = std::uniform_int_distribution<std::size_t>(1, subset.size())(rng);
            subset.resize(keep);
            std::sort(subset.begin(), subset.end());
        }

        CoincidenceMatrix cm = coincidences_within(rm.matrix, subset);
        AlphaScore score = alpha_from_coincidences(cm);
        OracleCoincidence oracle = oracle_within(rm.matrix, subset);

        for (int c = 0; c < 2; ++c) {
            for (int cp = 0; cp < 2; ++cp) {
                double dev = std::abs(cm.entries[c][cp] - oracle.entries[c][cp]);
                worst_entry = std::max(worst_entry, dev);
                if (dev > 1e-12)
                    return fail(fmt("trial %d cell (%d,%d) deviates by %.3e", trial, c, cp, dev));
            }
        }
        if (cm.total != static_cast<double>(oracle.total))
            return fail(fmt("trial %d pooled total %.17g != exact %lld", trial, cm.total,
                            static_cast<long long>(oracle.total)));
        if (cm.votes_used != oracle.used)
            return fail(fmt("trial %d used %lld roll-calls, oracle used %lld", trial,
                            static_cast<long long>(cm.votes_used), static_cast<long long>(oracle.used)));
        if (score.defined != oracle.defined)
            return fail(fmt("trial %d defined flags disagree", trial));
        if (score.defined) {
            double dev = std::abs(score.alpha - oracle.alpha);
            worst_alpha = std::max(worst_alpha, dev);
            if (dev > 1e-12) return fail(fmt("trial %d alpha deviates by %.3e", trial, dev));
        }
    }
    return pass(fmt("200 matrices; max cell dev %.2e, max alpha dev %.2e", worst_entry, worst_alpha));
}

// ---------------------------------------------------------------------------
// 2. endpoints: exact 1 under perfect agreement, near 0 under coin flips

Outcome criterion_alpha_endpoints() {
    // Perfect agreement with both values represented and scattered absences.
    std::mt19937_64 rng(202);
    for (int variant = 0; variant < 3; ++variant) {
        std::int32_t n = 4 + variant;
        std::vector<Member> members;
        for (std::int32_t i = 0; i < n; ++i)
            members.push_back(member("m" + std::to_string(i), "M" + std::to_string(i), "G"));
        std::vector<RollCall> rollcalls;
        for (std::int32_t u = 0; u < 8; ++u) {
            VoteValue value = u % 2 == 0 ? VoteValue::Yes : VoteValue::No;
            std::map<std::string, VoteValue> votes;
            for (std::int32_t i = 0; i < n; ++i) {
                if (variant > 0 && std::uniform_real_distribution<>(0.0, 1.0)(rng) < 0.2) continue;
                votes["m" + std::to_string(i)] = value;
            }
            rollcalls.push_back(rollcall("r" + std::to_string(u), "2020-02-03", "", std::move(votes)));
        }
        VoteMatrix matrix(std::move(members), std::move(rollcalls));
        AlphaScore score = group_cohesion(matrix, "G");
        if (!score.defined) return fail(fmt("variant %d undefined", variant));
        if (score.alpha != 1.0)
            return fail(fmt("variant %d perfect agreement alpha %.17g != 1", variant, score.alpha));
    }

    // Independent fair coin flips across 10^4 roll-calls.
    std::int32_t n = 6;
    std::vector<Member> members;
    for (std::int32_t i = 0; i < n; ++i)
        members.push_back(member("m" + std::to_string(i), "M" + std::to_string(i), "G"));
    std::vector<RollCall> rollcalls;
    for (std::int32_t u = 0; u < 10000; ++u) {
        std::map<std::string, VoteValue> votes;
        for (std::int32_t i = 0; i < n; ++i)
            votes["m" + std::to_string(i)] = rng() & 1 ? VoteValue::Yes : VoteValue::No;
        rollcalls.push_back(rollcall("r" + std::to_string(u), "2020-02-03", "", std::move(votes)));
    }
    VoteMatrix matrix(std::move(members), std::move(rollcalls));
    AlphaScore chance = group_cohesion(matrix, "G");
    if (!chance.defined) return fail("chance fixture undefined");
    if (std::abs(chance.alpha) >= 0.05)
        return fail(fmt("uniform voting alpha %.4f, expected |alpha| < 0.05", chance.alpha));
    return pass(fmt("perfect fixtures exact; uniform alpha %.4f", chance.alpha));
}

// ---------------------------------------------------------------------------
// 3. per-roll-call contribution identity, within and between

Outcome criterion_contribution_identity() {
    std::mt19937_64 rng(303);
    std::int64_t checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        RandomMatrix rm = random_matrix(rng, 4, 6, 8);

        std::vector<std::int32_t> indices(static_cast<std::size_t>(rm.member_count));
        std::iota(indices.begin(), indices.end(), 0);
        std::shuffle(indices.begin(), indices.end(), rng);
        auto size_a = std::uniform_int_distribution<std::size_t>(1, indices.size() - 1)(rng);
        std::vector<std::int32_t> set_a(indices.begin(), indices.begin() + size_a);
        std::vector<std::int32_t> set_b(indices.begin() + size_a, indices.end());
        std::sort(set_a.begin(), set_a.end());
        std::sort(set_b.begin(), set_b.end());

        for (std::int32_t u = 0; u < rm.matrix.rollcall_count(); ++u) {
            auto column = rm.matrix.column(u);
            auto cast_in = [&](const std::vector<std::int32_t>& set) {
                std::int64_t count = 0;
                for (std::int32_t i : set) {
                    VoteValue v = column[static_cast<std::size_t>(i)];
                    if (v == VoteValue::Yes || v == VoteValue::No) ++count;
                }
                return count;
            };

            VoteCoincidence within = vote_coincidences_within(column, set_a);
            std::int64_t m_a = cast_in(set_a);
            if (within.included != (m_a >= 2))
                return fail(fmt("trial %d roll-call %d within inclusion disagrees", trial, u));
            if (within.included && within.total_contribution != static_cast<double>(m_a))
                return fail(fmt("trial %d roll-call %d within contribution %.17g != %lld", trial, u,
                                within.total_contribution, static_cast<long long>(m_a)));

            VoteCoincidence between = vote_coincidences_between(column, set_a, set_b);
            std::int64_t m_b = cast_in(set_b);
            if (between.included != (m_a >= 1 && m_b >= 1))
                return fail(fmt("trial %d roll-call %d between inclusion disagrees", trial, u));
            if (between.included &&
                between.total_contribution != static_cast<double>(m_a + m_b))
                return fail(fmt("trial %d roll-call %d between contribution %.17g != %lld", trial, u,
                                between.total_contribution, static_cast<long long>(m_a + m_b)));
            ++checked;
        }
    }
    return pass(fmt("%lld roll-call columns, contributions exact", static_cast<long long>(checked)));
}

// ---------------------------------------------------------------------------
// 4. change statistics equal the recount difference

ergm::AttributeTable random_attributes(std::mt19937_64& rng, std::int32_t n) {
    const char* countries[] = {"X", "Y", "Z"};
    const char* groups[] = {"A", "B"};
    std::vector<std::string> country, group;
    for (std::int32_t i = 0; i < n; ++i) {
        country.push_back(countries[rng() % 3]);
        group.push_back(groups[rng() % 2]);
    }
    ergm::AttributeTable attrs;
    attrs.add("country", country, {"X", "Y", "Z"});
    attrs.add("group", group, {"A", "B"});
    return attrs;
}

Graph random_graph(std::mt19937_64& rng, std::int32_t n, double density) {
    std::vector<std::string> ids;
    for (std::int32_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
    Graph g(std::move(ids));
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int32_t j = i + 1; j < n; ++j)
            if (std::uniform_real_distribution<>(0.0, 1.0)(rng) < density) g.add_edge(i, j, 1.0);
    return g;
}

Outcome criterion_change_statistics() {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 1000; ++trial) {
        std::int32_t n = std::uniform_int_distribution<std::int32_t>(4, 8)(rng);
        Graph g = random_graph(rng, n, 0.4);
        ergm::AttributeTable attrs = random_attributes(rng, n);

        // Integer-valued covariate so every statistic sum is exact.
        ergm::EdgeCovTerm cov;
        cov.name = "cov";
        cov.n = n;
        cov.values.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
        for (std::int32_t i = 0; i < n; ++i) {
            for (std::int32_t j = i + 1; j < n; ++j) {
                auto w = static_cast<double>(rng() % 21);
                cov.values[static_cast<std::size_t>(i) * n + j] = w;
                cov.values[static_cast<std::size_t>(j) * n + i] = w;
            }
        }

        std::vector<ergm::Term> terms;
        switch (trial % 6) {
            case 0: terms = {ergm::EdgesTerm{}}; break;
            case 1: terms = {ergm::EdgesTerm{}, ergm::NodematchTerm{"country"}}; break;
            case 2:
                terms = {ergm::NodemixTerm{"group", ergm::all_category_pairs(attrs, "group", false)}};
                break;
            case 3: terms = {ergm::EdgesTerm{}, cov}; break;
            case 4: terms = {ergm::EdgesTerm{}, ergm::TrianglesTerm{}}; break;
            default:
                terms = {ergm::EdgesTerm{}, ergm::NodematchTerm{"country"},
                         ergm::NodemixTerm{"group", ergm::all_category_pairs(attrs, "group", false)}, cov,
                         ergm::TrianglesTerm{}};
                break;
        }
        ergm::Model model(terms, attrs);

        auto i = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n));
        auto j = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n));
        if (i == j) j = (j + 1) % n;

        std::vector<double> delta = ergm::change_stats(g, model, i, j);
        Graph with = g, without = g;
        if (!with.has_edge(i, j)) with.add_edge(i, j, 1.0);
        if (without.has_edge(i, j)) without.remove_edge(i, j);
        std::vector<double> hi = ergm::compute_stats(with, model);
        std::vector<double> lo = ergm::compute_stats(without, model);
        for (std::size_t k = 0; k < delta.size(); ++k) {
            if (delta[k] != hi[k] - lo[k])
                return fail(fmt("trial %d stat '%s': delta %.17g != recount %.17g", trial,
                                model.stat_names()[k].c_str(), delta[k], hi[k] - lo[k]));
        }
    }

    // Closing the open triad adds exactly one triangle; a far dyad adds none.
    Graph path(std::vector<std::string>{"a", "b", "c", "d", "e"});
    path.add_edge(0, 1, 1.0);
    path.add_edge(1, 2, 1.0);
    ergm::AttributeTable none;
    none.add("id", {"a", "b", "c", "d", "e"});
    ergm::Model triangles({ergm::TrianglesTerm{}}, none);
    if (ergm::change_stats(path, triangles, 0, 2) != std::vector<double>{1.0})
        return fail("closing a two-path did not add exactly one triangle");
    if (ergm::change_stats(path, triangles, 3, 4) != std::vector<double>{0.0})
        return fail("an isolated dyad changed the triangle count");
    return pass("1000 random triples and the triangle closure exact");
}

// ---------------------------------------------------------------------------
// 5. estimators agree across all 4-node graphs

Outcome criterion_estimator_agreement() {
    const std::pair<std::int32_t, std::int32_t> dyads[6] = {{0, 1}, {0, 2}, {0, 3},
                                                            {1, 2}, {1, 3}, {2, 3}};
    const std::vector<std::vector<std::string>> patterns = {
        {"A", "A", "B", "B"}, {"A", "B", "A", "B"}, {"A", "A", "A", "B"}};

    double worst_mple = 0.0, worst_mcmc = 0.0;
    int mcmc_compared = 0;
    for (int mask = 0; mask < 64; ++mask) {
        Graph g(std::vector<std::string>{"n0", "n1", "n2", "n3"});
        for (int d = 0; d < 6; ++d)
            if (mask & (1 << d)) g.add_edge(dyads[d].first, dyads[d].second, 1.0);

        ergm::AttributeTable attrs;
        attrs.add("bloc", patterns[static_cast<std::size_t>(mask) % patterns.size()], {"A", "B"});
        ergm::Model model({ergm::EdgesTerm{}, ergm::NodematchTerm{"bloc"}}, attrs);

        ergm::Fit exact = ergm::exact_mle(g, model);
        ergm::Fit pseudo = ergm::mple(g, model);
        for (std::size_t k = 0; k < exact.theta.size(); ++k) {
            if (exact.status[k] != pseudo.status[k])
                return fail(fmt("mask %d stat '%s': exact %s vs mple %s", mask,
                                model.stat_names()[k].c_str(),
                                std::string(to_string(exact.status[k])).c_str(),
                                std::string(to_string(pseudo.status[k])).c_str()));
            if (exact.status[k] != ergm::CoefStatus::Ok) continue;
            double dev = std::abs(exact.theta[k] - pseudo.theta[k]);
            worst_mple = std::max(worst_mple, dev);
            if (dev > 1e-6)
                return fail(fmt("mask %d stat '%s': |exact - mple| = %.3e", mask,
                                model.stat_names()[k].c_str(), dev));
        }

        bool all_ok = exact.converged &&
                      std::all_of(exact.status.begin(), exact.status.end(),
                                  [](ergm::CoefStatus s) { return s == ergm::CoefStatus::Ok; });
        if (!all_ok) continue;

        ergm::McmcOptions options;
        options.sampler.seed = derive_seed(505, "mask" + std::to_string(mask));
        ergm::Fit mcmc = ergm::mcmc_mle(g, model, options);
        ++mcmc_compared;
        for (std::size_t k = 0; k < exact.theta.size(); ++k) {
            double dev = std::abs(exact.theta[k] - mcmc.theta[k]);
            worst_mcmc = std::max(worst_mcmc, dev);
            if (dev > 0.05)
                return fail(fmt("mask %d stat '%s': |exact - mcmc| = %.4f", mask,
                                model.stat_names()[k].c_str(), dev));
        }
    }
    return pass(fmt("64 graphs; max |exact-mple| %.2e; max |exact-mcmc| %.4f on %d estimable graphs",
                    worst_mple, worst_mcmc, mcmc_compared));
}

// ---------------------------------------------------------------------------
// 6. sampler hits the exact stationary distribution

Outcome criterion_sampler_distribution() {
    Graph start(std::vector<std::string>{"n0", "n1", "n2"});
    ergm::AttributeTable attrs;
    attrs.add("id", {"n0", "n1", "n2"});
    ergm::Model model({ergm::EdgesTerm{}}, attrs);

    // theta = ln 2: P(y) = 2^edges / 27 over the 8 graphs on 3 nodes.
    std::vector<double> theta = {std::log(2.0)};
    ergm::SamplerConfig config;
    config.burn_in = 10000;
    config.iterations = 1000000;
    config.thin = 1;
    config.seed = 606;

    std::vector<std::int64_t> counts(8, 0);
    auto observer = [&](const Graph& g, std::span<const double>) {
        int state = (g.has_edge(0, 1) ? 1 : 0) | (g.has_edge(0, 2) ? 2 : 0) | (g.has_edge(1, 2) ? 4 : 0);
        ++counts[static_cast<std::size_t>(state)];
    };
    ergm::SampleResult result = ergm::mh_sample(start, model, theta, config, observer);
    if (result.rows != 1000000) return fail(fmt("expected 1000000 emitted states, got %zu", result.rows));

    double chi_square = 0.0;
    for (int state = 0; state < 8; ++state) {
        int edges = __builtin_popcount(static_cast<unsigned>(state));
        double expected = 1000000.0 * std::pow(2.0, edges) / 27.0;
        double diff = static_cast<double>(counts[static_cast<std::size_t>(state)]) - expected;
        chi_square += diff * diff / expected;
    }
    // 1% critical value of chi-square with 7 degrees of freedom.
    if (chi_square >= 18.475307)
        return fail(fmt("chi-square %.2f >= 18.48 against the exact distribution", chi_square));

    // theta = 0 makes all graphs equally likely: mean edge count 1.5.
    std::vector<double> zero = {0.0};
    ergm::SamplerConfig uniform_config;
    uniform_config.burn_in = 10000;
    uniform_config.iterations = 1000000;
    uniform_config.thin = 10;
    uniform_config.seed = 607;
    ergm::SampleResult uniform = ergm::mh_sample(start, model, zero, uniform_config);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r = 0; r < uniform.rows; ++r) {
        double e = uniform.row(r)[0];
        sum += e;
        sum_sq += e * e;
    }
    double n = static_cast<double>(uniform.rows);
    double mean = sum / n;
    double se = std::sqrt((sum_sq / n - mean * mean) / n);
    if (std::abs(mean - 1.5) >= 3.0 * se)
        return fail(fmt("uniform mean edges %.5f departs from 1.5 by more than 3 SE (%.5f)", mean, se));
    return pass(fmt("chi-square %.2f < 18.48; uniform mean %.4f within 3 SE", chi_square, mean));
}

// ---------------------------------------------------------------------------
// 7. logistic anchors

Outcome criterion_logistic_anchors() {
    if (ergm::logistic(0.0) != 0.5) return fail("logistic(0) != 0.5");
    double lift = ergm::logistic(1.0) - 0.5;
    if (std::abs(lift - 0.2311) > 0.0001)
        return fail(fmt("logistic(1) - 0.5 = %.5f, expected 0.2311 +- 0.0001", lift));
    double low = ergm::logistic(-3.0);
    if (std::abs(low - 0.0474) > 0.0005)
        return fail(fmt("logistic(-3) = %.5f, expected 0.0474 +- 0.0005", low));
    return pass(fmt("0.5 exact; %.5f; %.5f", lift + 0.5, low));
}

// ---------------------------------------------------------------------------
// 8. meta-analysis closed form and planted recovery

Outcome criterion_meta_recovery() {
    // Fixed-effect closed form with the between-study variance pinned to 0.
    std::vector<meta::StudyEstimate> studies = {
        {0.30, 0.0400, "", "t"}, {0.50, 0.0900, "", "t"}, {0.20, 0.0100, "", "t"},
        {0.45, 0.0625, "", "t"}, {0.10, 0.0144, "", "t"},
    };
    double weight_sum = 0.0, weighted = 0.0;
    for (const auto& s : studies) {
        weight_sum += 1.0 / s.variance;
        weighted += s.value / s.variance;
    }
    double mu_closed = weighted / weight_sum;
    double se_closed = 1.0 / std::sqrt(weight_sum);

    meta::MetaOptions pinned;
    pinned.pinned_between_variance = 0.0;
    meta::MetaResult fixed = meta::meta_fit(studies, pinned);
    if (std::abs(fixed.mu - mu_closed) > 1e-12 || std::abs(fixed.se_mu - se_closed) > 1e-12 ||
        fixed.between_variance != 0.0)
        return fail(fmt("pinned fit mu %.17g vs closed form %.17g", fixed.mu, mu_closed));

    // Planted random-effects population: mu = 0.4, between variance 0.09.
    std::mt19937_64 rng(808);
    std::normal_distribution<> standard(0.0, 1.0);
    std::vector<meta::StudyEstimate> planted;
    for (int i = 0; i < 500; ++i) {
        double sd_within = 0.05 + 0.25 * std::uniform_real_distribution<>(0.0, 1.0)(rng);
        double truth = 0.4 + 0.3 * standard(rng);
        planted.push_back({truth + sd_within * standard(rng), sd_within * sd_within, "", "t"});
    }
    meta::MetaResult random_effects = meta::meta_fit(planted);
    if (std::abs(random_effects.mu - 0.4) >= 3.0 * random_effects.se_mu)
        return fail(fmt("planted mu %.4f misses 0.4 by more than 3 se (%.4f)", random_effects.mu,
                        random_effects.se_mu));
    if (std::abs(random_effects.between_variance - 0.09) >= 0.3 * 0.09)
        return fail(fmt("planted between variance %.4f outside 0.09 +- 30%%",
                        random_effects.between_variance));
    return pass(fmt("closed form exact; planted mu %.4f (se %.4f), between var %.4f",
                    random_effects.mu, random_effects.se_mu, random_effects.between_variance));
}

// ---------------------------------------------------------------------------
// 9. end-to-end planted cohesion and coalition recovery

Outcome criterion_planted_recovery() {
    simulate::SimulationConfig config;
    config.groups = {"G1", "G2", "G3"};
    config.sizes = {10, 10, 10};
    config.cohesion = {0.95, 0.8, 0.55};
    config.coalition = {0.0, 0.9, 0.0, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0};
    config.rollcalls = 200;
    config.attendance = 0.75;
    config.seed = 909;
    simulate::Simulation sim = simulate::run(config);

    AlphaScore a1 = group_cohesion(sim.matrix, "G1");
    AlphaScore a2 = group_cohesion(sim.matrix, "G2");
    AlphaScore a3 = group_cohesion(sim.matrix, "G3");
    if (!(a1.defined && a2.defined && a3.defined)) return fail("a cohesion alpha is undefined");
    if (!(a1.alpha > a2.alpha && a2.alpha > a3.alpha))
        return fail(fmt("alpha ranking %.3f, %.3f, %.3f does not match the planted order", a1.alpha,
                        a2.alpha, a3.alpha));

    AlphaScore c12 = group_coalition(sim.matrix, "G1", "G2");
    AlphaScore c13 = group_coalition(sim.matrix, "G1", "G3");
    AlphaScore c23 = group_coalition(sim.matrix, "G2", "G3");
    if (!(c12.alpha > c13.alpha && c12.alpha > c23.alpha))
        return fail(fmt("alpha pair (G1,G2) %.3f is not the top off-diagonal (%.3f, %.3f)", c12.alpha,
                        c13.alpha, c23.alpha));

    // Per-roll-call fits on the group mixing terms alone, pooled overall.
    ergm::FitRollcallConfig fit_config;
    fit_config.terms.nodematch_country = false;
    fit_config.terms.nodematch_party = false;
    fit_config.terms.nodemix_group = true;
    fit_config.terms.edgecov_retweets = false;
    fit_config.seed = 910;
    std::vector<ergm::FitRecord> records;
    for (std::int32_t u = 0; u < sim.matrix.rollcall_count(); ++u) {
        ergm::Fit fit = ergm::fit_rollcall(sim.matrix, u, nullptr, fit_config);
        auto rows = ergm::fit_records(sim.matrix.rollcall(u).id, sim.matrix.rollcall(u).policy_area, fit);
        records.insert(records.end(), rows.begin(), rows.end());
    }
    meta::MetaByClassOptions meta_options;
    meta_options.grouping = meta::Grouping::Overall;
    meta::ClassSummary summary = meta::meta_by_class(records, meta_options);

    auto mu_of = [&](const std::string& term) -> std::optional<double> {
        for (const meta::ClassResult& cell : summary.results) {
            if (cell.term == term && cell.class_label == meta::overall_class)
                return cell.defined ? std::optional<double>(cell.result.mu) : std::nullopt;
        }
        return std::nullopt;
    };
    auto g11 = mu_of("mix.group.G1.G1"), g22 = mu_of("mix.group.G2.G2"), g33 = mu_of("mix.group.G3.G3");
    auto g12 = mu_of("mix.group.G1.G2"), g13 = mu_of("mix.group.G1.G3"), g23 = mu_of("mix.group.G2.G3");
    if (!(g11 && g22 && g33 && g12 && g13 && g23)) return fail("a pooled mixing cell is undefined");
    if (!(*g11 > *g22 && *g22 > *g33))
        return fail(fmt("pooled diagonal ranking %.3f, %.3f, %.3f does not match the planted order",
                        *g11, *g22, *g33));
    if (!(*g12 > *g13 && *g12 > *g23))
        return fail(fmt("pooled pair (G1,G2) %.3f is not the top off-diagonal (%.3f, %.3f)", *g12,
                        *g13, *g23));
    return pass(fmt("alpha %.2f/%.2f/%.2f and pooled %.2f/%.2f/%.2f in planted order; (G1,G2) top pair",
                    a1.alpha, a2.alpha, a3.alpha, *g11, *g22, *g33));
}

// ---------------------------------------------------------------------------
// 10. group averages conserve the total retweet weight

Outcome criterion_weight_conservation() {
    std::mt19937_64 rng(1010);
    for (int trial = 0; trial < 100; ++trial) {
        std::int32_t n = std::uniform_int_distribution<std::int32_t>(3, 40)(rng);
        auto group_count = std::uniform_int_distribution<std::int32_t>(2, 5)(rng);

        std::vector<Member> members;
        std::vector<std::string> node_ids;
        std::vector<std::int32_t> group_of(static_cast<std::size_t>(n));
        for (std::int32_t i = 0; i < n; ++i) {
            group_of[static_cast<std::size_t>(i)] =
                std::uniform_int_distribution<std::int32_t>(0, group_count - 1)(rng);
            std::string id = "m" + std::to_string(i);
            members.push_back(member(id, "M" + std::to_string(i),
                                     "G" + std::to_string(group_of[static_cast<std::size_t>(i)])));
            node_ids.push_back(id);
        }
        VoteMatrix matrix(std::move(members), {});
        Graph graph(node_ids);
        for (std::int32_t i = 0; i < n; ++i)
            for (std::int32_t j = i + 1; j < n; ++j)
                if (std::uniform_real_distribution<>(0.0, 1.0)(rng) < 0.15)
                    graph.add_edge(i, j, static_cast<double>(1 + rng() % 30));

        // Independent integer tally of every edge by endpoint groups.
        std::vector<std::int64_t> within_weight(static_cast<std::size_t>(group_count), 0);
        std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> cross_weight_of;
        graph.for_each_edge([&](std::int32_t i, std::int32_t j, double w) {
            std::int32_t a = group_of[static_cast<std::size_t>(i)];
            std::int32_t b = group_of[static_cast<std::size_t>(j)];
            if (a == b) within_weight[static_cast<std::size_t>(a)] += static_cast<std::int64_t>(w);
            else cross_weight_of[{std::min(a, b), std::max(a, b)}] += static_cast<std::int64_t>(w);
        });

        std::vector<std::int64_t> group_size(static_cast<std::size_t>(group_count), 0);
        for (std::int32_t i = 0; i < n; ++i) ++group_size[static_cast<std::size_t>(group_of[i])];

        std::int64_t recovered = 0;
        for (std::int32_t a = 0; a < group_count; ++a) {
            std::string name = "G" + std::to_string(a);
            if (group_size[static_cast<std::size_t>(a)] == 0) continue;
            auto avg = avg_retweets_within(graph, matrix, name);
            if (!avg) return fail(fmt("trial %d group %s average undefined", trial, name.c_str()));
            double expected = static_cast<double>(within_weight[static_cast<std::size_t>(a)]) /
                              static_cast<double>(group_size[static_cast<std::size_t>(a)]);
            if (*avg != expected)
                return fail(fmt("trial %d group %s average %.17g != %.17g", trial, name.c_str(), *avg,
                                expected));
            recovered += within_weight[static_cast<std::size_t>(a)];
        }
        for (std::int32_t a = 0; a < group_count; ++a) {
            for (std::int32_t b = a + 1; b < group_count; ++b) {
                if (group_size[static_cast<std::size_t>(a)] == 0 ||
                    group_size[static_cast<std::size_t>(b)] == 0)
                    continue;
                auto avg = avg_retweets_between(graph, matrix, "G" + std::to_string(a),
                                                "G" + std::to_string(b));
                if (!avg) return fail(fmt("trial %d pair (%d,%d) average undefined", trial, a, b));
                auto it = cross_weight_of.find({a, b});
                std::int64_t cross = it == cross_weight_of.end() ? 0 : it->second;
                double denom = static_cast<double>(group_size[static_cast<std::size_t>(a)] +
                                                   group_size[static_cast<std::size_t>(b)]);
                if (*avg != static_cast<double>(cross) / denom)
                    return fail(fmt("trial %d pair (%d,%d) average %.17g != %.17g", trial, a, b, *avg,
                                    static_cast<double>(cross) / denom));
                recovered += cross;
            }
        }
        if (static_cast<double>(recovered) != graph.total_weight())
            return fail(fmt("trial %d recovered weight %lld != graph total %.17g", trial,
                            static_cast<long long>(recovered), graph.total_weight()));
    }
    return pass("100 random graphs; averages are exact quotients and weights partition the total");
}

// ---------------------------------------------------------------------------
// 11. optional reproduction from the public dataset

Outcome criterion_public_dataset() {
    const char* env = std::getenv("COVOTE_DATASET_DIR");
    if (!env || !*env) return skip("COVOTE_DATASET_DIR not set");
    std::string dir(env);

    pipeline::PipelineConfig config = pipeline::default_config();
    config.inputs.members = dir + "/members.csv";
    config.inputs.votes = dir + "/votes.csv";
    config.inputs.retweets = dir + "/retweets.csv";
    ingest::Dataset dataset = pipeline::load_dataset(config);

    if (dataset.matrix.member_count() != 787)
        return fail(fmt("members %d != 787", dataset.matrix.member_count()));
    if (dataset.matrix.rollcall_count() != 2535)
        return fail(fmt("roll-calls %d != 2535", dataset.matrix.rollcall_count()));
    if (dataset.retweets.node_count() != 530 || dataset.retweets.edge_count() != 4723 ||
        dataset.retweets.total_weight() != 26133.0)
        return fail(fmt("retweet graph %d/%zu/%.0f != 530/4723/26133", dataset.retweets.node_count(),
                        dataset.retweets.edge_count(), dataset.retweets.total_weight()));

    const std::vector<std::string>& groups = dataset.matrix.groups();
    if (groups.size() != 9) return fail(fmt("group count %zu != 9", groups.size()));

    double cohesion_sum = 0.0;
    for (const std::string& g : groups) cohesion_sum += group_cohesion(dataset.matrix, g).alpha;
    double cohesion_mean = cohesion_sum / 9.0;
    if (std::abs(cohesion_mean - 0.70) > 0.05)
        return fail(fmt("nine-group mean cohesion alpha %.3f outside 0.70 +- 0.05", cohesion_mean));

    double pair_sum = 0.0;
    double rt_between_sum = 0.0;
    int pairs = 0;
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            pair_sum += group_coalition(dataset.matrix, groups[a], groups[b]).alpha;
            rt_between_sum += avg_retweets_between(dataset.retweets, dataset.matrix, groups[a],
                                                   groups[b]).value_or(0.0);
            ++pairs;
        }
    }
    double pair_mean = pair_sum / pairs;
    if (std::abs(pair_mean - 0.02) > 0.02)
        return fail(fmt("36-pair mean alpha %.3f outside 0.02 +- 0.02", pair_mean));

    double rt_within_sum = 0.0;
    for (const std::string& g : groups)
        rt_within_sum += avg_retweets_within(dataset.retweets, dataset.matrix, g).value_or(0.0);
    double rt_within_mean = rt_within_sum / 9.0;
    double rt_between_mean = rt_between_sum / pairs;
    if (std::abs(rt_within_mean - 99.0) > 5.0)
        return fail(fmt("mean within-group average retweets %.1f outside 99 +- 5", rt_within_mean));
    if (std::abs(rt_between_mean - 0.8) > 0.1)
        return fail(fmt("mean between-group average retweets %.2f outside 0.8 +- 0.1", rt_between_mean));

    // Retweet covariate pooled per policy area through the standard stages.
    auto out = std::filesystem::temp_directory_path() / ("covote_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(out);
    config.output_dir = out.string();
    config.seed = 1;
    config.force = true;
    pipeline::run(config, {pipeline::Stage::Ergm, pipeline::Stage::Meta});
    std::vector<meta::MetaCsvRow> rows = meta::read_meta_csv((out / "meta.csv").string());
    std::filesystem::remove_all(out);

    std::optional<double> overall, economic;
    for (const meta::MetaCsvRow& row : rows) {
        if (row.term != "edgecov.retweets" || !row.mu) continue;
        if (row.class_label == meta::overall_class) overall = row.mu;
        if (row.class_label == "Economic and monetary system") economic = row.mu;
    }
    if (!overall || !economic) return fail("edgecov pooled cells missing from meta.csv");
    if (!(*overall > 0.0))
        return fail(fmt("overall edgecov coefficient %.4f is not positive", *overall));
    if (!(*economic < 0.0))
        return fail(fmt("economic policy edgecov coefficient %.4f is not negative", *economic));
    return pass(fmt("counts exact; cohesion %.3f; pairs %.3f; retweets %.1f/%.2f; edgecov %+0.3f/%+0.3f",
                    cohesion_mean, pair_mean, rt_within_mean, rt_between_mean, *overall, *economic));
}

// ---------------------------------------------------------------------------

struct Criterion {
    int number;
    const char* name;
    double time_budget_s; // 0 = no budget
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "alpha coincidence oracle", 5.0, criterion_alpha_oracle},
        {2, "alpha endpoints", 0.0, criterion_alpha_endpoints},
        {3, "pair contribution identity", 0.0, criterion_contribution_identity},
        {4, "change statistic recount", 0.0, criterion_change_statistics},
        {5, "estimator agreement", 120.0, criterion_estimator_agreement},
        {6, "sampler distribution", 0.0, criterion_sampler_distribution},
        {7, "logistic anchors", 0.0, criterion_logistic_anchors},
        {8, "meta-analysis recovery", 10.0, criterion_meta_recovery},
        {9, "planted recovery end to end", 300.0, criterion_planted_recovery},
        {10, "weight conservation", 0.0, criterion_weight_conservation},
        {11, "public dataset reproduction", 0.0, criterion_public_dataset},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        auto started = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = fail(std::string("unexpected exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (outcome.pass && !outcome.skipped && criterion.time_budget_s > 0.0 &&
            elapsed >= criterion.time_budget_s) {
            outcome = fail(fmt("exceeded the %.0f s budget (took %.1f s)", criterion.time_budget_s,
                               elapsed));
        }

        const char* tag = outcome.skipped ? "[SKIP]" : outcome.pass ? "[PASS]" : "[FAIL]";
        if (outcome.skipped) {
            std::printf("%s %02d %-32s %s\n", tag, criterion.number, criterion.name,
                        outcome.detail.c_str());
        } else {
            std::printf("%s %02d %-32s (%6.2f s) %s\n", tag, criterion.number, criterion.name, elapsed,
                        outcome.detail.c_str());
        }
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }

    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
