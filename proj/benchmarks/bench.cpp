#include <benchmark/benchmark.h>

#include "covote/agreement.hpp"
#include "covote/ergm.hpp"
#include "covote/networks.hpp"
#include "covote/report.hpp"
#include "covote/rng.hpp"
#include "covote/simulate.hpp"

namespace {

using namespace covote;

const simulate::Simulation& fixture() {
    static const simulate::Simulation sim = [] {
        simulate::SimulationConfig config;
        config.groups = {"G1", "G2", "G3", "G4", "G5"};
        config.sizes = {40, 40, 40, 20, 20};
        config.cohesion = {0.95, 0.85, 0.75, 0.65, 0.55};
        config.rollcalls = 400;
        config.attendance = 0.85;
        config.retweet_within_rate = 1.5;
        config.retweet_between_rate = 0.05;
        config.seed = 7;
        return simulate::run(config);
    }();
    return sim;
}

void BM_AlphaMatrix(benchmark::State& state) {
    const VoteMatrix& matrix = fixture().matrix;
    for (auto _ : state) benchmark::DoNotOptimize(report::build_alpha_matrix(matrix));
}
BENCHMARK(BM_AlphaMatrix)->Unit(benchmark::kMillisecond);

void BM_GroupCohesion(benchmark::State& state) {
    const VoteMatrix& matrix = fixture().matrix;
    for (auto _ : state) benchmark::DoNotOptimize(group_cohesion(matrix, "G1"));
}
BENCHMARK(BM_GroupCohesion)->Unit(benchmark::kMicrosecond);

ergm::Model rollcall_model(const VoteMatrix& matrix) {
    ergm::AttributeTable attrs = ergm::AttributeTable::from_members(matrix.members(), matrix.groups());
    std::vector<ergm::Term> terms;
    terms.push_back(ergm::NodematchTerm{"country"});
    terms.push_back(ergm::NodematchTerm{"national_party"});
    terms.push_back(ergm::NodemixTerm{"group", ergm::all_category_pairs(attrs, "group", false)});
    return ergm::Model(std::move(terms), std::move(attrs));
}

void BM_ChangeStats(benchmark::State& state) {
    const VoteMatrix& matrix = fixture().matrix;
    ergm::Model model = rollcall_model(matrix);
    Graph graph = build_covote_network(matrix, 0);
    Rng rng(11);
    const std::int32_t n = graph.node_count();
    for (auto _ : state) {
        auto i = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n)));
        auto j = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
        if (j >= i) ++j;
        benchmark::DoNotOptimize(ergm::change_stats(graph, model, i, j));
    }
}
BENCHMARK(BM_ChangeStats);

void BM_Mple(benchmark::State& state) {
    const VoteMatrix& matrix = fixture().matrix;
    ergm::Model model = rollcall_model(matrix);
    Graph graph = build_covote_network(matrix, 0);
    for (auto _ : state) benchmark::DoNotOptimize(ergm::mple(graph, model));
}
BENCHMARK(BM_Mple)->Unit(benchmark::kMillisecond);

void BM_Sampler(benchmark::State& state) {
    const VoteMatrix& matrix = fixture().matrix;
    ergm::Model model = rollcall_model(matrix);
    Graph graph = build_covote_network(matrix, 0);
    std::vector<double> theta(static_cast<std::size_t>(model.dimension()), 0.0);
    ergm::SamplerConfig config;
    config.burn_in = 0;
    config.iterations = static_cast<std::uint64_t>(state.range(0));
    config.thin = 10;
    config.seed = 3;
    for (auto _ : state) benchmark::DoNotOptimize(ergm::mh_sample(graph, model, theta, config));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sampler)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
