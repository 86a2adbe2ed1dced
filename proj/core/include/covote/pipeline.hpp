#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covote/ergm.hpp"
#include "covote/ingest.hpp"
#include "covote/meta.hpp"
#include "covote/report.hpp"
#include "covote/simulate.hpp"

namespace covote::pipeline {

inline constexpr std::string_view tool_version = "0.1.0";

struct InputPaths {
    std::string members;
    std::string votes;
    std::string retweets;
    std::string tokens;   // empty = built-in identity token table
    std::string activity; // optional CSV date,count of daily retweet volume
    std::string sessions; // optional CSV date of plenary session days
};

// Everything a run needs; loadable from JSON with flag overrides on top.
// force and threads are transient and never enter the configuration hash.
struct PipelineConfig {
    InputPaths inputs;
    std::vector<std::string> group_order; // empty = order of first appearance
    double jaccard_threshold = 0.5;
    bool strict = true;
    ergm::RollcallTermSpec terms;
    bool force_mcmc = false;
    ergm::SamplerConfig sampler;
    meta::MetaByClassOptions meta;
    std::vector<report::ThresholdSpec> thresholds; // default: alpha and avg-rt presets
    std::optional<std::uint64_t> seed;
    std::string output_dir = "out";
    std::int32_t threads = 0; // 0 = hardware concurrency; COVOTE_THREADS overrides
    bool force = false;       // allow overwriting existing stage outputs
};

PipelineConfig default_config();

// Strict JSON loader: unknown keys are errors so typos cannot silently fall
// back to defaults.
PipelineConfig load_config(const std::string& path);

// Stable hash of everything that can change results (excludes output_dir,
// threads, force).  Stage outputs recorded under a different hash are stale.
std::string config_hash(const PipelineConfig& config);

enum class Stage : std::uint8_t { Alpha, Ergm, Meta, Twitter, Report };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);
std::vector<Stage> all_stages();

struct StageOutcome {
    Stage stage;
    double wall_ms = 0.0;
    std::vector<std::string> outputs; // paths relative to output_dir
};

struct RunResult {
    std::vector<StageOutcome> stages;
    std::vector<std::string> warnings;
};

// Runs the requested stages in canonical order against the configured
// inputs.  Dependencies (meta after ergm; report after alpha, meta, twitter)
// must be satisfied either within the call or by fresh manifest entries from
// earlier runs.  A manifest.json in the output directory records config
// hash, seed, versions, and wall time per stage; wall time is the only
// field allowed to differ between identical runs.
RunResult run(const PipelineConfig& config, const std::vector<Stage>& stages);

struct IngestOutcome {
    ingest::Dataset dataset;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
};

// Parses and validates the inputs, writes the canonical dataset bundle plus
// ingest_report.json into the output directory.
IngestOutcome run_ingest(const PipelineConfig& config);

struct SimulateConfigFile {
    simulate::SimulationConfig sim;
    bool has_seed = false; // the CLI requires a seed from the file or the flag
    std::string output_dir = "simdata";
    bool force = false;
};

SimulateConfigFile load_simulate_config(const std::string& path);

// Generates the synthetic dataset and writes it as a canonical bundle.
std::vector<std::string> run_simulate(const SimulateConfigFile& config);

// Loads the dataset exactly the way `run` does (parse, resolve, build).
ingest::Dataset load_dataset(const PipelineConfig& config);

} // namespace covote::pipeline
