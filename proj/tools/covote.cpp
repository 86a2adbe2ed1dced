#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covote/errors.hpp"
#include "covote/pipeline.hpp"

namespace {

using covote::pipeline::PipelineConfig;
using covote::pipeline::Stage;

struct CommonFlags {
    std::string config_path;
    std::string members, votes, retweets, tokens;
    std::string out;
    double jaccard = 0.0;
    bool lenient = false;
    bool force = false;
};

void add_input_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--members", flags.members, "member register CSV (overrides config)");
    cmd->add_option("--votes", flags.votes, "roll-call vote CSV (overrides config)");
    cmd->add_option("--retweets", flags.retweets, "retweet edge CSV (overrides config)");
    cmd->add_option("--tokens", flags.tokens, "vote token mapping CSV (overrides config)");
    cmd->add_option("--jaccard-threshold", flags.jaccard, "name-match acceptance threshold");
    cmd->add_flag("--lenient", flags.lenient, "drop unresolvable records instead of failing");
    cmd->add_option("--out", flags.out, "output directory (overrides config)");
    cmd->add_flag("--force", flags.force, "overwrite existing outputs");
}

PipelineConfig make_config(const CLI::App* cmd, const CommonFlags& flags) {
    PipelineConfig config = flags.config_path.empty()
                                ? covote::pipeline::default_config()
                                : covote::pipeline::load_config(flags.config_path);
    if (cmd->count("--members")) config.inputs.members = flags.members;
    if (cmd->count("--votes")) config.inputs.votes = flags.votes;
    if (cmd->count("--retweets")) config.inputs.retweets = flags.retweets;
    if (cmd->count("--tokens")) config.inputs.tokens = flags.tokens;
    if (cmd->count("--jaccard-threshold")) config.jaccard_threshold = flags.jaccard;
    if (cmd->count("--lenient")) config.strict = false;
    if (cmd->count("--out")) config.output_dir = flags.out;
    if (cmd->count("--force")) config.force = true;
    return config;
}

int cmd_ingest(const CLI::App* cmd, const CommonFlags& flags) {
    PipelineConfig config = make_config(cmd, flags);
    covote::pipeline::IngestOutcome outcome = covote::pipeline::run_ingest(config);
    const auto& d = outcome.dataset;
    std::fprintf(stderr, "ingest: %d members (%d from epoch splits), %d roll-calls, %d retweet nodes\n",
                 d.matrix.member_count(), d.report.epoch_members, d.matrix.rollcall_count(),
                 d.retweets.node_count());
    for (const std::string& warning : outcome.warnings)
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    for (const std::string& file : outcome.outputs)
        std::fprintf(stderr, "wrote %s/%s\n", config.output_dir.c_str(), file.c_str());
    return 0;
}

int cmd_simulate(const CLI::App* cmd, const std::string& config_path, std::uint64_t seed,
                 const std::string& out) {
    covote::pipeline::SimulateConfigFile config = covote::pipeline::load_simulate_config(config_path);
    if (cmd->count("--seed")) {
        config.sim.seed = seed;
        config.has_seed = true;
    }
    if (!config.has_seed)
        throw covote::validation_error("simulate draws random numbers; provide a seed (config or --seed)");
    if (cmd->count("--out")) config.output_dir = out;
    if (cmd->count("--force")) config.force = true;
    std::vector<std::string> outputs = covote::pipeline::run_simulate(config);
    for (const std::string& file : outputs)
        std::fprintf(stderr, "wrote %s/%s\n", config.output_dir.c_str(), file.c_str());
    return 0;
}

int cmd_run(const CLI::App* cmd, const CommonFlags& flags, const std::vector<std::string>& stage_names,
            std::uint64_t seed, std::int32_t threads) {
    PipelineConfig config = make_config(cmd, flags);
    if (cmd->count("--seed")) config.seed = seed;
    if (cmd->count("--threads")) config.threads = threads;

    std::vector<Stage> stages;
    if (stage_names.empty()) {
        stages = covote::pipeline::all_stages();
    } else {
        for (const std::string& name : stage_names) {
            auto stage = covote::pipeline::parse_stage(name);
            if (!stage)
                throw covote::validation_error("unknown stage '" + name +
                                               "' (expected alpha, ergm, meta, twitter, or report)");
            stages.push_back(*stage);
        }
    }

    covote::pipeline::RunResult result = covote::pipeline::run(config, stages);
    for (const covote::pipeline::StageOutcome& outcome : result.stages) {
        std::fprintf(stderr, "stage %s: %zu outputs in %.1f ms\n",
                     std::string(covote::pipeline::to_string(outcome.stage)).c_str(),
                     outcome.outputs.size(), outcome.wall_ms);
    }
    for (const std::string& warning : result.warnings)
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cohesion and coalition measures from roll-call votes and retweet networks"};
    app.set_version_flag("--version", std::string(covote::pipeline::tool_version));
    app.require_subcommand(1);

    CommonFlags ingest_flags;
    CLI::App* ingest = app.add_subcommand("ingest", "normalize raw inputs into a canonical bundle");
    add_input_flags(ingest, ingest_flags);

    std::string sim_config;
    std::string sim_out;
    std::uint64_t sim_seed = 0;
    bool sim_force = false;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic planted dataset");
    simulate->add_option("--config", sim_config, "JSON simulation configuration")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--seed", sim_seed, "random seed (overrides config)");
    simulate->add_option("--out", sim_out, "output directory (overrides config)");
    simulate->add_flag("--force", sim_force, "overwrite existing outputs");

    CommonFlags run_flags;
    std::vector<std::string> stage_names;
    std::uint64_t run_seed = 0;
    std::int32_t run_threads = 0;
    CLI::App* run = app.add_subcommand("run", "execute analysis stages over a dataset");
    add_input_flags(run, run_flags);
    run->add_option("--stages", stage_names, "stages to run (default: all)")->delimiter(',');
    run->add_option("--seed", run_seed, "random seed for the ergm stage (overrides config)");
    run->add_option("--threads", run_threads,
                    "worker threads, 0 = all cores (COVOTE_THREADS overrides)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest, ingest_flags);
        if (simulate->parsed()) return cmd_simulate(simulate, sim_config, sim_seed, sim_out);
        if (run->parsed()) return cmd_run(run, run_flags, stage_names, run_seed, run_threads);
    } catch (const covote::non_convergence_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
