#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covote/types.hpp"

namespace covote::simulate {

// Seeded generator of synthetic chambers.  Per roll-call, group 0 draws a
// uniform Yes/No position; every later group copies the position of its
// strongest earlier coalition partner with the configured probability and
// draws fresh otherwise.  Members attend with attendance probability and
// follow their group position with their group's cohesion probability
// (voting the opposite way otherwise).  Retweet counts are Poisson per dyad
// with a within-group or between-group rate.
struct SimulationConfig {
    std::vector<std::string> groups;
    std::vector<std::int32_t> sizes;    // one per group, >= 1
    std::vector<double> cohesion;       // one per group, in [0,1]
    std::vector<double> coalition;      // k x k row-major, symmetric, in [0,1]; empty = independent
    std::int32_t rollcalls = 100;
    double attendance = 1.0;
    double retweet_within_rate = 0.0;   // Poisson mean per within-group dyad
    double retweet_between_rate = 0.0;  // Poisson mean per cross-group dyad
    std::vector<std::string> policy_areas; // cycled over roll-calls; empty = unclassified
    Date start_date = Date::from_ymd(2020, 1, 6);
    std::uint64_t seed = 0;
};

struct Simulation {
    VoteMatrix matrix;
    Graph retweets;
};

// Fully deterministic for a fixed config (including seed).  Countries and
// national parties are assigned round-robin across the whole chamber so
// attribute statistics stay linearly independent of the group partition.
Simulation run(const SimulationConfig& config);

} // namespace covote::simulate
