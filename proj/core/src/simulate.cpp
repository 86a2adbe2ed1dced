#include "covote/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "covote/rng.hpp"

namespace covote::simulate {

namespace {

void validate(const SimulationConfig& config) {
    const std::size_t k = config.groups.size();
    if (k == 0) throw validation_error("simulation needs at least one group");
    if (config.sizes.size() != k || config.cohesion.size() != k)
        throw validation_error("groups, sizes, and cohesion must have matching lengths");
    for (const std::string& g : config.groups) {
        if (g.empty()) throw validation_error("empty group name");
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            if (config.groups[a] == config.groups[b])
                throw validation_error("duplicate group name '" + config.groups[a] + "'");
        }
    }
    for (std::int32_t size : config.sizes) {
        if (size < 1) throw validation_error("every group needs at least one member");
    }
    for (double p : config.cohesion) {
        if (!(p >= 0.0 && p <= 1.0)) throw validation_error("cohesion probabilities must lie in [0,1]");
    }
    if (!config.coalition.empty()) {
        if (config.coalition.size() != k * k)
            throw validation_error("coalition matrix must be k x k");
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                double c = config.coalition[a * k + b];
                if (!(c >= 0.0 && c <= 1.0)) throw validation_error("coalition entries must lie in [0,1]");
                if (c != config.coalition[b * k + a])
                    throw validation_error("coalition matrix must be symmetric");
            }
        }
    }
    if (config.rollcalls < 0) throw validation_error("negative roll-call count");
    if (!(config.attendance >= 0.0 && config.attendance <= 1.0))
        throw validation_error("attendance must lie in [0,1]");
    if (config.retweet_within_rate < 0.0 || config.retweet_between_rate < 0.0)
        throw validation_error("retweet rates must be non-negative");
}

std::string padded(std::int32_t value, std::int32_t width) {
    std::string digits = std::to_string(value);
    if (static_cast<std::int32_t>(digits.size()) < width)
        digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return digits;
}

} // namespace

Simulation run(const SimulationConfig& config) {
    validate(config);
    const std::size_t k = config.groups.size();
    const Date last_date =
        Date{config.start_date.days + std::max<std::int32_t>(config.rollcalls - 1, 0)};

    std::vector<Member> members;
    std::vector<std::int32_t> group_of;
    for (std::size_t g = 0; g < k; ++g) {
        for (std::int32_t i = 0; i < config.sizes[g]; ++i) {
            auto index = static_cast<std::int32_t>(members.size());
            Member m;
            m.id = "m" + std::to_string(g) + "_" + padded(i, 2);
            m.full_name = "Member " + std::to_string(g) + " " + std::to_string(i);
            m.group = config.groups[g];
            m.country = "C" + std::to_string(index % 5);
            m.national_party = "P" + std::to_string(index % 7);
            m.twitter_handle = "@" + m.id;
            m.active_from = config.start_date;
            m.active_to = last_date;
            members.push_back(std::move(m));
            group_of.push_back(static_cast<std::int32_t>(g));
        }
    }

    // Strongest earlier partner per group; positions chain through it.
    std::vector<std::size_t> partner(k, 0);
    std::vector<double> copy_prob(k, 0.0);
    for (std::size_t g = 1; g < k && !config.coalition.empty(); ++g) {
        for (std::size_t h = 0; h < g; ++h) {
            double c = config.coalition[g * k + h];
            if (c > copy_prob[g]) {
                copy_prob[g] = c;
                partner[g] = h;
            }
        }
    }

    Rng votes_rng(derive_seed(config.seed, "votes"));
    const std::int32_t id_width =
        static_cast<std::int32_t>(std::to_string(std::max(config.rollcalls, 1)).size());
    std::vector<RollCall> calls;
    calls.reserve(static_cast<std::size_t>(config.rollcalls));
    std::vector<bool> position(k, false); // true = Yes
    for (std::int32_t u = 0; u < config.rollcalls; ++u) {
        RollCall rc;
        rc.id = "rc" + padded(u + 1, id_width);
        rc.date = Date{config.start_date.days + u};
        if (!config.policy_areas.empty())
            rc.policy_area = config.policy_areas[static_cast<std::size_t>(u) % config.policy_areas.size()];
        for (std::size_t g = 0; g < k; ++g) {
            bool copied = g > 0 && copy_prob[g] > 0.0 && votes_rng.bernoulli(copy_prob[g]);
            position[g] = copied ? position[partner[g]] : votes_rng.bernoulli(0.5);
        }
        for (std::size_t m = 0; m < members.size(); ++m) {
            if (!votes_rng.bernoulli(config.attendance)) continue;
            bool follows = votes_rng.bernoulli(config.cohesion[static_cast<std::size_t>(group_of[m])]);
            bool yes = follows == position[static_cast<std::size_t>(group_of[m])];
            rc.votes.emplace(members[m].id, yes ? VoteValue::Yes : VoteValue::No);
        }
        calls.push_back(std::move(rc));
    }

    Simulation sim;
    std::vector<std::string> group_order = config.groups;
    sim.matrix = VoteMatrix(std::move(members), std::move(calls), std::move(group_order));

    Rng retweet_rng(derive_seed(config.seed, "retweets"));
    const std::int32_t n = sim.matrix.member_count();
    std::vector<std::pair<std::pair<std::int32_t, std::int32_t>, double>> edges;
    for (std::int32_t i = 0; i < n; ++i) {
        for (std::int32_t j = i + 1; j < n; ++j) {
            double rate = group_of[static_cast<std::size_t>(i)] == group_of[static_cast<std::size_t>(j)]
                              ? config.retweet_within_rate
                              : config.retweet_between_rate;
            std::int64_t count = rate > 0.0 ? retweet_rng.poisson(rate) : 0;
            if (count > 0) edges.push_back({{i, j}, static_cast<double>(count)});
        }
    }
    std::vector<bool> involved(static_cast<std::size_t>(n), false);
    for (const auto& [pair, weight] : edges) {
        involved[static_cast<std::size_t>(pair.first)] = true;
        involved[static_cast<std::size_t>(pair.second)] = true;
    }
    std::vector<std::string> node_ids;
    std::vector<std::int32_t> node_of(static_cast<std::size_t>(n), -1);
    for (std::int32_t i = 0; i < n; ++i) {
        if (involved[static_cast<std::size_t>(i)]) {
            node_of[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(node_ids.size());
            node_ids.push_back(sim.matrix.member(i).id);
        }
    }
    sim.retweets = Graph(std::move(node_ids));
    for (const auto& [pair, weight] : edges)
        sim.retweets.add_edge(node_of[static_cast<std::size_t>(pair.first)],
                              node_of[static_cast<std::size_t>(pair.second)], weight);
    return sim;
}

} // namespace covote::simulate
