#include "covote/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "covote/networks.hpp"
#include "csv.hpp"

namespace covote::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig default_config() {
    PipelineConfig config;
    config.thresholds = {report::default_alpha_thresholds(), report::default_retweet_thresholds()};
    return config;
}

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
    throw validation_error("config " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            config_error(where, "unknown key '" + key + "'");
    }
}

const json* maybe(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double get_double(const json& value, const std::string& where) {
    if (!value.is_number()) config_error(where, "expected a number");
    return value.get<double>();
}

bool get_bool(const json& value, const std::string& where) {
    if (!value.is_boolean()) config_error(where, "expected true or false");
    return value.get<bool>();
}

std::string get_string(const json& value, const std::string& where) {
    if (!value.is_string()) config_error(where, "expected a string");
    return value.get<std::string>();
}

std::uint64_t get_unsigned(const json& value, const std::string& where) {
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0))
        config_error(where, "expected a non-negative integer");
    return value.get<std::uint64_t>();
}

std::vector<std::string> get_string_array(const json& value, const std::string& where) {
    if (!value.is_array()) config_error(where, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : value) out.push_back(get_string(v, where));
    return out;
}

void load_inputs(const json& obj, InputPaths& inputs) {
    check_keys(obj, "inputs", {"members", "votes", "retweets", "tokens", "activity", "sessions"});
    if (const json* v = maybe(obj, "members")) inputs.members = get_string(*v, "inputs.members");
    if (const json* v = maybe(obj, "votes")) inputs.votes = get_string(*v, "inputs.votes");
    if (const json* v = maybe(obj, "retweets")) inputs.retweets = get_string(*v, "inputs.retweets");
    if (const json* v = maybe(obj, "tokens")) inputs.tokens = get_string(*v, "inputs.tokens");
    if (const json* v = maybe(obj, "activity")) inputs.activity = get_string(*v, "inputs.activity");
    if (const json* v = maybe(obj, "sessions")) inputs.sessions = get_string(*v, "inputs.sessions");
}

void load_terms(const json& obj, ergm::RollcallTermSpec& terms) {
    check_keys(obj, "ergm.terms",
               {"nodematch_country", "nodematch_party", "nodemix_group", "ordered_group_pairs",
                "edgecov_retweets", "edges"});
    if (const json* v = maybe(obj, "nodematch_country"))
        terms.nodematch_country = get_bool(*v, "ergm.terms.nodematch_country");
    if (const json* v = maybe(obj, "nodematch_party"))
        terms.nodematch_party = get_bool(*v, "ergm.terms.nodematch_party");
    if (const json* v = maybe(obj, "nodemix_group"))
        terms.nodemix_group = get_bool(*v, "ergm.terms.nodemix_group");
    if (const json* v = maybe(obj, "ordered_group_pairs"))
        terms.ordered_group_pairs = get_bool(*v, "ergm.terms.ordered_group_pairs");
    if (const json* v = maybe(obj, "edgecov_retweets"))
        terms.edgecov_retweets = get_bool(*v, "ergm.terms.edgecov_retweets");
    if (const json* v = maybe(obj, "edges")) terms.edges = get_bool(*v, "ergm.terms.edges");
}

void load_ergm(const json& obj, PipelineConfig& config) {
    check_keys(obj, "ergm", {"terms", "force_mcmc", "sampler"});
    if (const json* v = maybe(obj, "terms")) load_terms(*v, config.terms);
    if (const json* v = maybe(obj, "force_mcmc")) config.force_mcmc = get_bool(*v, "ergm.force_mcmc");
    if (const json* v = maybe(obj, "sampler")) {
        check_keys(*v, "ergm.sampler", {"burn_in", "iterations", "thin"});
        if (const json* f = maybe(*v, "burn_in"))
            config.sampler.burn_in = get_unsigned(*f, "ergm.sampler.burn_in");
        if (const json* f = maybe(*v, "iterations"))
            config.sampler.iterations = get_unsigned(*f, "ergm.sampler.iterations");
        if (const json* f = maybe(*v, "thin"))
            config.sampler.thin = static_cast<std::uint32_t>(get_unsigned(*f, "ergm.sampler.thin"));
        if (config.sampler.thin == 0) config_error("ergm.sampler.thin", "must be positive");
        if (config.sampler.iterations == 0) config_error("ergm.sampler.iterations", "must be positive");
    }
}

void load_meta(const json& obj, meta::MetaByClassOptions& options) {
    check_keys(obj, "meta",
               {"method", "pinned_between_variance", "include_flagged", "variance_inflation", "terms"});
    if (const json* v = maybe(obj, "method")) {
        std::string method = get_string(*v, "meta.method");
        if (method == "paule-mandel") options.meta.method = meta::VarianceMethod::PauleMandel;
        else if (method == "dersimonian-laird") options.meta.method = meta::VarianceMethod::DerSimonianLaird;
        else config_error("meta.method", "expected 'paule-mandel' or 'dersimonian-laird'");
    }
    if (const json* v = maybe(obj, "pinned_between_variance"))
        options.meta.pinned_between_variance = get_double(*v, "meta.pinned_between_variance");
    if (const json* v = maybe(obj, "include_flagged"))
        options.include_flagged = get_bool(*v, "meta.include_flagged");
    if (const json* v = maybe(obj, "variance_inflation")) {
        options.variance_inflation = get_double(*v, "meta.variance_inflation");
        if (!(options.variance_inflation >= 1.0))
            config_error("meta.variance_inflation", "must be at least 1");
    }
    if (const json* v = maybe(obj, "terms")) options.terms = get_string_array(*v, "meta.terms");
}

std::vector<report::ThresholdSpec> load_thresholds(const json& arr) {
    if (!arr.is_array()) config_error("thresholds", "expected an array");
    std::vector<report::ThresholdSpec> specs;
    for (const auto& item : arr) {
        check_keys(item, "thresholds[]", {"metric", "levels"});
        report::ThresholdSpec spec;
        const json* metric = maybe(item, "metric");
        if (!metric) config_error("thresholds[]", "missing metric");
        spec.metric = get_string(*metric, "thresholds[].metric");
        if (spec.metric != "alpha" && spec.metric != "ergm-mu" && spec.metric != "avg-rt")
            config_error("thresholds[].metric", "expected 'alpha', 'ergm-mu', or 'avg-rt'");
        const json* levels = maybe(item, "levels");
        if (!levels || !levels->is_array()) config_error("thresholds[]", "missing levels array");
        for (const auto& level : *levels) {
            check_keys(level, "thresholds[].levels[]", {"label", "comparison", "value"});
            report::Threshold t;
            const json* label = maybe(level, "label");
            const json* comparison = maybe(level, "comparison");
            const json* value = maybe(level, "value");
            if (!label || !comparison || !value)
                config_error("thresholds[].levels[]", "needs label, comparison, and value");
            t.label = get_string(*label, "thresholds[].levels[].label");
            std::string op = get_string(*comparison, "thresholds[].levels[].comparison");
            if (op == ">") t.greater = true;
            else if (op == "<") t.greater = false;
            else config_error("thresholds[].levels[].comparison", "expected '>' or '<'");
            t.value = get_double(*value, "thresholds[].levels[].value");
            spec.thresholds.push_back(std::move(t));
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open config '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw validation_error("config '" + path + "' is not valid JSON");
    if (!doc.is_object()) throw validation_error("config '" + path + "' must be a JSON object");
    return doc;
}

} // namespace

PipelineConfig load_config(const std::string& path) {
    json doc = read_json_file(path);
    check_keys(doc, "top level",
               {"schema_version", "inputs", "group_order", "jaccard_threshold", "strict", "ergm",
                "meta", "thresholds", "seed", "output_dir", "threads"});
    if (const json* v = maybe(doc, "schema_version")) {
        if (get_unsigned(*v, "schema_version") != 1) config_error("schema_version", "expected 1");
    }

    PipelineConfig config = default_config();
    if (const json* v = maybe(doc, "inputs")) load_inputs(*v, config.inputs);
    if (const json* v = maybe(doc, "group_order")) config.group_order = get_string_array(*v, "group_order");
    if (const json* v = maybe(doc, "jaccard_threshold")) {
        config.jaccard_threshold = get_double(*v, "jaccard_threshold");
        if (!(config.jaccard_threshold > 0.0 && config.jaccard_threshold <= 1.0))
            config_error("jaccard_threshold", "must lie in (0, 1]");
    }
    if (const json* v = maybe(doc, "strict")) config.strict = get_bool(*v, "strict");
    if (const json* v = maybe(doc, "ergm")) load_ergm(*v, config);
    if (const json* v = maybe(doc, "meta")) load_meta(*v, config.meta);
    if (const json* v = maybe(doc, "thresholds")) config.thresholds = load_thresholds(*v);
    if (const json* v = maybe(doc, "seed")) config.seed = get_unsigned(*v, "seed");
    if (const json* v = maybe(doc, "output_dir")) config.output_dir = get_string(*v, "output_dir");
    if (const json* v = maybe(doc, "threads"))
        config.threads = static_cast<std::int32_t>(get_unsigned(*v, "threads"));
    return config;
}

namespace {

ordered_json semantic_json(const PipelineConfig& c) {
    ordered_json j;
    j["inputs"] = {{"members", c.inputs.members},   {"votes", c.inputs.votes},
                   {"retweets", c.inputs.retweets}, {"tokens", c.inputs.tokens},
                   {"activity", c.inputs.activity}, {"sessions", c.inputs.sessions}};
    j["group_order"] = c.group_order;
    j["jaccard_threshold"] = c.jaccard_threshold;
    j["strict"] = c.strict;
    j["ergm"] = {{"terms",
                  {{"nodematch_country", c.terms.nodematch_country},
                   {"nodematch_party", c.terms.nodematch_party},
                   {"nodemix_group", c.terms.nodemix_group},
                   {"ordered_group_pairs", c.terms.ordered_group_pairs},
                   {"edgecov_retweets", c.terms.edgecov_retweets},
                   {"edges", c.terms.edges}}},
                 {"force_mcmc", c.force_mcmc},
                 {"sampler",
                  {{"burn_in", c.sampler.burn_in},
                   {"iterations", c.sampler.iterations},
                   {"thin", c.sampler.thin}}}};
    ordered_json meta_j;
    meta_j["method"] =
        c.meta.meta.method == meta::VarianceMethod::PauleMandel ? "paule-mandel" : "dersimonian-laird";
    if (c.meta.meta.pinned_between_variance)
        meta_j["pinned_between_variance"] = *c.meta.meta.pinned_between_variance;
    meta_j["include_flagged"] = c.meta.include_flagged;
    meta_j["variance_inflation"] = c.meta.variance_inflation;
    meta_j["terms"] = c.meta.terms;
    j["meta"] = std::move(meta_j);
    ordered_json specs = ordered_json::array();
    for (const report::ThresholdSpec& spec : c.thresholds) {
        ordered_json levels = ordered_json::array();
        for (const report::Threshold& t : spec.thresholds)
            levels.push_back({{"label", t.label}, {"comparison", t.greater ? ">" : "<"}, {"value", t.value}});
        specs.push_back({{"metric", spec.metric}, {"levels", std::move(levels)}});
    }
    j["thresholds"] = std::move(specs);
    if (c.seed) j["seed"] = *c.seed;
    else j["seed"] = nullptr;
    return j;
}

} // namespace

std::string config_hash(const PipelineConfig& config) {
    std::string text = semantic_json(config).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

// ---------------------------------------------------------------------------
// Stages and manifest

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Alpha: return "alpha";
        case Stage::Ergm: return "ergm";
        case Stage::Meta: return "meta";
        case Stage::Twitter: return "twitter";
        case Stage::Report: return "report";
    }
    return "alpha";
}

std::optional<Stage> parse_stage(std::string_view name) {
    if (name == "alpha") return Stage::Alpha;
    if (name == "ergm") return Stage::Ergm;
    if (name == "meta") return Stage::Meta;
    if (name == "twitter") return Stage::Twitter;
    if (name == "report") return Stage::Report;
    return std::nullopt;
}

std::vector<Stage> all_stages() {
    return {Stage::Alpha, Stage::Ergm, Stage::Meta, Stage::Twitter, Stage::Report};
}

namespace {

ordered_json load_manifest(const fs::path& dir) {
    fs::path path = dir / "manifest.json";
    if (!fs::exists(path)) {
        ordered_json manifest;
        manifest["schema_version"] = 1;
        manifest["tool_version"] = std::string(tool_version);
        manifest["stages"] = ordered_json::object();
        return manifest;
    }
    std::ifstream in(path, std::ios::binary);
    ordered_json manifest = ordered_json::parse(in, nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object() || !manifest.contains("stages"))
        throw validation_error("existing manifest '" + path.string() + "' is unreadable");
    if (manifest.value("schema_version", 0) != 1)
        throw validation_error("existing manifest '" + path.string() + "' has an unsupported schema");
    return manifest;
}

void save_manifest(const fs::path& dir, const ordered_json& manifest) {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw validation_error("cannot write manifest in '" + dir.string() + "'");
    out << manifest.dump(2) << "\n";
}

void require_fresh(const ordered_json& manifest, Stage dependent, Stage dependency,
                   const std::string& hash) {
    const auto& stages = manifest.at("stages");
    std::string name(to_string(dependency));
    auto it = stages.find(name);
    if (it == stages.end() || it->value("config_hash", "") != hash)
        throw validation_error("stage '" + std::string(to_string(dependent)) + "' needs stage '" + name +
                               "' outputs for the current configuration; run the '" + name +
                               "' stage first");
}

void refuse_overwrite(const fs::path& dir, const std::vector<std::string>& outputs, bool force) {
    if (force) return;
    for (const std::string& rel : outputs) {
        fs::path path = dir / rel;
        if (fs::exists(path))
            throw validation_error("output '" + path.string() + "' already exists; pass --force to replace it");
    }
}

std::string slug(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        if (ch >= 'A' && ch <= 'Z') out.push_back(static_cast<char>(ch - 'A' + 'a'));
        else if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) out.push_back(ch);
        else out.push_back('_');
    }
    return out;
}

// Deterministic unique file slugs for policy areas.
std::map<std::string, std::string> area_slugs(const std::vector<std::string>& areas) {
    std::map<std::string, std::string> slugs;
    std::set<std::string> taken;
    taken.insert("overall"); // reserved for the unfiltered scope
    for (const std::string& area : areas) {
        std::string base = slug(area);
        std::string candidate = base;
        int suffix = 2;
        while (!taken.insert(candidate).second) candidate = base + "_" + std::to_string(suffix++);
        slugs[area] = candidate;
    }
    return slugs;
}

std::int32_t resolve_threads(std::int32_t configured) {
    if (const char* env = std::getenv("COVOTE_THREADS"); env != nullptr && *env != '\0') {
        std::int32_t value = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
        if (ec != std::errc() || *ptr != '\0' || value <= 0)
            throw validation_error("COVOTE_THREADS must be a positive integer");
        return value;
    }
    if (configured > 0) return configured;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<std::int32_t>(hw);
}

// Index-ordered parallel map; worker count never changes results.
void parallel_for(std::int32_t threads, std::int32_t count, const std::function<void(std::int32_t)>& body) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::int32_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int32_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (std::int32_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                std::int32_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(count);
                    break;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

report::PairMatrix matrix_from_pairs_csv(const fs::path& path, std::string metric,
                                         const std::vector<std::string>& groups) {
    report::PairMatrix m;
    m.metric = std::move(metric);
    m.groups = groups;
    m.cells.assign(groups.size() * groups.size(), std::nullopt);
    std::map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < groups.size(); ++i)
        index[groups[i]] = static_cast<std::int32_t>(i);
    for (const report::PairCsvRow& row : report::read_pairs_csv(path.string())) {
        auto a = index.find(row.group_a);
        auto b = index.find(row.group_b);
        if (a == index.end() || b == index.end())
            throw validation_error("'" + path.string() + "' names a group outside the dataset order");
        if (row.value) m.set(a->second, b->second, *row.value);
    }
    return m;
}

std::map<Date, std::int64_t> parse_activity_csv(const std::string& path) {
    static constexpr std::string_view header[] = {"date", "count"};
    auto reader = detail::open_csv_with_header(path, header);
    std::map<Date, std::int64_t> counts;
    while (auto row = reader.next()) {
        std::size_t line = reader.record_line();
        if (row->size() != 2) throw parse_error(path, line, 1, "expected 2 fields");
        auto date = Date::parse((*row)[0]);
        if (!date) throw parse_error(path, line, 1, "invalid date '" + (*row)[0] + "'");
        std::int64_t count = detail::parse_int_field(reader, (*row)[1], "count");
        if (count < 0) throw parse_error(path, line, 1, "negative count");
        if (!counts.emplace(*date, count).second)
            throw parse_error(path, line, 1, "duplicate date '" + (*row)[0] + "'");
    }
    return counts;
}

std::set<Date> parse_sessions_csv(const std::string& path) {
    static constexpr std::string_view header[] = {"date"};
    auto reader = detail::open_csv_with_header(path, header);
    std::set<Date> days;
    while (auto row = reader.next()) {
        std::size_t line = reader.record_line();
        if (row->size() != 1) throw parse_error(path, line, 1, "expected 1 field");
        auto date = Date::parse((*row)[0]);
        if (!date) throw parse_error(path, line, 1, "invalid date '" + (*row)[0] + "'");
        days.insert(*date);
    }
    return days;
}

} // namespace

// ---------------------------------------------------------------------------
// Dataset loading

ingest::Dataset load_dataset(const PipelineConfig& config) {
    if (config.inputs.members.empty()) throw validation_error("inputs.members path is required");
    if (config.inputs.votes.empty()) throw validation_error("inputs.votes path is required");

    ingest::TokenTable tokens = config.inputs.tokens.empty()
                                    ? ingest::TokenTable::identity()
                                    : ingest::TokenTable::parse_file(config.inputs.tokens);
    std::vector<Member> reg = ingest::parse_register(config.inputs.members);
    ingest::ParsedVotes votes = ingest::parse_rollcalls(config.inputs.votes, tokens);
    ingest::IdMapping mapping = ingest::resolve_ids(reg, votes.rollcalls, config.jaccard_threshold);
    std::vector<ingest::RetweetEdge> edges;
    if (!config.inputs.retweets.empty()) edges = ingest::parse_retweets(config.inputs.retweets);

    ingest::BuildOptions options;
    options.strict = config.strict;
    options.group_order = config.group_order;
    return ingest::build_dataset(reg, votes.rollcalls, edges, mapping, options);
}

// ---------------------------------------------------------------------------
// ingest command

IngestOutcome run_ingest(const PipelineConfig& config) {
    if (config.inputs.members.empty()) throw validation_error("inputs.members path is required");
    if (config.inputs.votes.empty()) throw validation_error("inputs.votes path is required");

    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs = {"members.csv", "votes.csv", "retweets.csv", "ingest_report.json"};
    refuse_overwrite(dir, outputs, config.force);

    ingest::TokenTable tokens = config.inputs.tokens.empty()
                                    ? ingest::TokenTable::identity()
                                    : ingest::TokenTable::parse_file(config.inputs.tokens);
    std::vector<Member> reg = ingest::parse_register(config.inputs.members);
    ingest::ParsedVotes votes = ingest::parse_rollcalls(config.inputs.votes, tokens);
    ingest::IdMapping mapping = ingest::resolve_ids(reg, votes.rollcalls, config.jaccard_threshold);
    std::vector<ingest::RetweetEdge> edges;
    if (!config.inputs.retweets.empty()) edges = ingest::parse_retweets(config.inputs.retweets);

    ingest::BuildOptions options;
    options.strict = config.strict;
    options.group_order = config.group_order;

    IngestOutcome outcome;
    outcome.dataset = ingest::build_dataset(reg, votes.rollcalls, edges, mapping, options);
    outcome.warnings = votes.warnings;
    outcome.outputs = outputs;
    const ingest::Dataset& dataset = outcome.dataset;

    ingest::write_members_csv((dir / "members.csv").string(), dataset.matrix.members());
    ingest::write_votes_csv((dir / "votes.csv").string(), dataset.matrix);
    ingest::write_retweets_csv((dir / "retweets.csv").string(), dataset.retweets);

    std::int64_t exact_id = 0, exact_name = 0, jaccard = 0;
    for (const ingest::IdMatch& match : dataset.mapping.matches) {
        switch (match.method) {
            case ingest::MatchMethod::ExactId: ++exact_id; break;
            case ingest::MatchMethod::ExactName: ++exact_name; break;
            case ingest::MatchMethod::Jaccard: ++jaccard; break;
        }
    }

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["tool_version"] = std::string(tool_version);
    doc["members"] = dataset.matrix.member_count();
    doc["epoch_members"] = dataset.report.epoch_members;
    doc["rollcalls"] = dataset.matrix.rollcall_count();
    doc["policy_areas"] = policy_areas(dataset.matrix).size();
    doc["groups"] = dataset.matrix.groups();
    doc["matches"] = {{"exact_id", exact_id}, {"exact_name", exact_name}, {"jaccard", jaccard}};
    doc["unmatched"] = dataset.mapping.unmatched;
    doc["votes"] = {{"records", dataset.report.vote_records},
                    {"dropped_unresolved", dataset.report.votes_dropped_unresolved},
                    {"dropped_out_of_epoch", dataset.report.votes_dropped_out_of_epoch},
                    {"dropped_duplicate", dataset.report.votes_dropped_duplicate}};
    doc["retweets"] = {{"nodes", dataset.retweets.node_count()},
                       {"edges", dataset.retweets.edge_count()},
                       {"total_weight", dataset.retweets.total_weight()},
                       {"rows", dataset.report.retweet_rows},
                       {"dropped_unknown", dataset.report.retweets_dropped_unknown},
                       {"dropped_self", dataset.report.retweets_dropped_self}};
    ordered_json attendance;
    attendance["overall"] = dataset.report.attendance_overall;
    attendance["by_group"] = ordered_json::object();
    for (const auto& [group, rate] : dataset.report.attendance_by_group)
        attendance["by_group"][group] = rate;
    doc["attendance"] = std::move(attendance);
    doc["warnings"] = votes.warnings;

    std::ofstream out(dir / "ingest_report.json", std::ios::binary);
    if (!out) throw validation_error("cannot write ingest report");
    out << doc.dump(2) << "\n";
    return outcome;
}

// ---------------------------------------------------------------------------
// simulate command

SimulateConfigFile load_simulate_config(const std::string& path) {
    json doc = read_json_file(path);
    check_keys(doc, "top level",
               {"schema_version", "groups", "sizes", "cohesion", "coalition", "rollcalls", "attendance",
                "retweet_within_rate", "retweet_between_rate", "policy_areas", "start_date", "seed",
                "output_dir"});
    if (const json* v = maybe(doc, "schema_version")) {
        if (get_unsigned(*v, "schema_version") != 1) config_error("schema_version", "expected 1");
    }
    SimulateConfigFile config;
    if (const json* v = maybe(doc, "groups")) config.sim.groups = get_string_array(*v, "groups");
    if (const json* v = maybe(doc, "sizes")) {
        if (!v->is_array()) config_error("sizes", "expected an array");
        for (const auto& s : *v)
            config.sim.sizes.push_back(static_cast<std::int32_t>(get_unsigned(s, "sizes")));
    }
    if (const json* v = maybe(doc, "cohesion")) {
        if (!v->is_array()) config_error("cohesion", "expected an array");
        for (const auto& c : *v) config.sim.cohesion.push_back(get_double(c, "cohesion"));
    }
    if (const json* v = maybe(doc, "coalition")) {
        if (!v->is_array()) config_error("coalition", "expected an array of rows");
        for (const auto& row : *v) {
            if (!row.is_array()) config_error("coalition", "expected an array of rows");
            for (const auto& c : row) config.sim.coalition.push_back(get_double(c, "coalition"));
        }
    }
    if (const json* v = maybe(doc, "rollcalls"))
        config.sim.rollcalls = static_cast<std::int32_t>(get_unsigned(*v, "rollcalls"));
    if (const json* v = maybe(doc, "attendance")) config.sim.attendance = get_double(*v, "attendance");
    if (const json* v = maybe(doc, "retweet_within_rate"))
        config.sim.retweet_within_rate = get_double(*v, "retweet_within_rate");
    if (const json* v = maybe(doc, "retweet_between_rate"))
        config.sim.retweet_between_rate = get_double(*v, "retweet_between_rate");
    if (const json* v = maybe(doc, "policy_areas"))
        config.sim.policy_areas = get_string_array(*v, "policy_areas");
    if (const json* v = maybe(doc, "start_date")) {
        auto date = Date::parse(get_string(*v, "start_date"));
        if (!date) config_error("start_date", "expected an ISO date");
        config.sim.start_date = *date;
    }
    if (const json* v = maybe(doc, "seed")) {
        config.sim.seed = get_unsigned(*v, "seed");
        config.has_seed = true;
    }
    if (const json* v = maybe(doc, "output_dir")) config.output_dir = get_string(*v, "output_dir");
    return config;
}

std::vector<std::string> run_simulate(const SimulateConfigFile& config) {
    simulate::Simulation sim = simulate::run(config.sim);

    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs = {"members.csv", "votes.csv", "retweets.csv",
                                        "simulate_manifest.json"};
    refuse_overwrite(dir, outputs, config.force);

    ingest::write_members_csv((dir / "members.csv").string(), sim.matrix.members());
    ingest::write_votes_csv((dir / "votes.csv").string(), sim.matrix);
    ingest::write_retweets_csv((dir / "retweets.csv").string(), sim.retweets);

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["tool_version"] = std::string(tool_version);
    doc["seed"] = config.sim.seed;
    doc["groups"] = config.sim.groups;
    doc["sizes"] = config.sim.sizes;
    doc["rollcalls"] = config.sim.rollcalls;
    doc["members"] = sim.matrix.member_count();
    doc["retweet_edges"] = sim.retweets.edge_count();
    doc["retweet_weight"] = sim.retweets.total_weight();
    std::ofstream out(dir / "simulate_manifest.json", std::ios::binary);
    if (!out) throw validation_error("cannot write simulate manifest");
    out << doc.dump(2) << "\n";
    return outputs;
}

// ---------------------------------------------------------------------------
// run command

namespace {

struct StageContext {
    const PipelineConfig& config;
    const fs::path dir;
    const std::string hash;
    ingest::Dataset* dataset; // null for stages that work from files alone
    RunResult* result;
};

std::vector<std::string> stage_alpha(StageContext& ctx) {
    const VoteMatrix& matrix = ctx.dataset->matrix;
    std::vector<std::string> areas = policy_areas(matrix);
    auto slugs = area_slugs(areas);

    std::vector<std::string> outputs = {"pairs_alpha_overall.csv"};
    for (const std::string& area : areas) outputs.push_back("pairs_alpha_" + slugs[area] + ".csv");
    refuse_overwrite(ctx.dir, outputs, ctx.config.force);

    report::PairMatrix overall = report::build_alpha_matrix(matrix);
    report::write_pairs_csv((ctx.dir / "pairs_alpha_overall.csv").string(), overall);
    for (const std::string& area : areas) {
        RollcallFilter filter = [&area](const RollCall& rc) { return rc.policy_area == area; };
        report::PairMatrix scoped = report::build_alpha_matrix(matrix, filter);
        report::write_pairs_csv((ctx.dir / ("pairs_alpha_" + slugs[area] + ".csv")).string(), scoped);
    }
    return outputs;
}

std::vector<std::string> stage_ergm(StageContext& ctx) {
    std::vector<std::string> outputs = {"fits.csv"};
    refuse_overwrite(ctx.dir, outputs, ctx.config.force);
    const VoteMatrix& matrix = ctx.dataset->matrix;

    ergm::FitRollcallConfig fit_config;
    fit_config.terms = ctx.config.terms;
    fit_config.seed = *ctx.config.seed;
    fit_config.force_mcmc = ctx.config.force_mcmc;
    fit_config.mcmc.sampler = ctx.config.sampler;
    const Graph* retweets = ctx.config.terms.edgecov_retweets ? &ctx.dataset->retweets : nullptr;

    const std::int32_t count = matrix.rollcall_count();
    std::vector<ergm::Fit> fits(static_cast<std::size_t>(count));
    parallel_for(resolve_threads(ctx.config.threads), count, [&](std::int32_t u) {
        fits[static_cast<std::size_t>(u)] = ergm::fit_rollcall(matrix, u, retweets, fit_config);
    });

    std::vector<ergm::FitRecord> records;
    std::int32_t informative = 0;
    for (std::int32_t u = 0; u < count; ++u) {
        const ergm::Fit& fit = fits[static_cast<std::size_t>(u)];
        bool any_ok = std::any_of(fit.status.begin(), fit.status.end(),
                                  [](ergm::CoefStatus s) { return s == ergm::CoefStatus::Ok; });
        if (fit.converged && !fit.degenerate && !fit.empty_network && any_ok) ++informative;
        auto rc_records = ergm::fit_records(matrix.rollcall(u).id, matrix.rollcall(u).policy_area, fit);
        records.insert(records.end(), rc_records.begin(), rc_records.end());
    }
    ergm::write_fit_records_csv((ctx.dir / "fits.csv").string(), records);
    if (count > 0 && informative == 0)
        throw non_convergence_error("no roll-call fit yielded usable coefficients; fits.csv retained");
    return outputs;
}

std::vector<std::string> stage_meta(StageContext& ctx) {
    std::vector<std::string> outputs = {"meta.csv"};
    refuse_overwrite(ctx.dir, outputs, ctx.config.force);
    fs::path fits = ctx.dir / "fits.csv";
    if (!fs::exists(fits))
        throw validation_error("fits.csv is missing from the output directory; re-run the ergm stage");

    std::vector<ergm::FitRecord> records = ergm::read_fit_records_csv(fits.string());
    meta::ClassSummary summary = meta::meta_by_class(records, ctx.config.meta);
    meta::write_meta_csv((ctx.dir / "meta.csv").string(), summary.results);
    for (const std::string& warning : summary.warnings) ctx.result->warnings.push_back(warning);

    bool any_defined = std::any_of(summary.results.begin(), summary.results.end(),
                                   [](const meta::ClassResult& r) { return r.defined; });
    if (!summary.results.empty() && !any_defined)
        throw non_convergence_error("every meta-analysis cell is undefined; meta.csv retained");
    return outputs;
}

std::vector<std::string> stage_twitter(StageContext& ctx) {
    std::vector<std::string> outputs = {"pairs_avg-rt_overall.csv"};
    bool with_timeline = !ctx.config.inputs.activity.empty();
    if (with_timeline) outputs.push_back("timeline.csv");
    refuse_overwrite(ctx.dir, outputs, ctx.config.force);

    report::PairMatrix m = report::build_retweet_matrix(ctx.dataset->retweets, ctx.dataset->matrix);
    report::write_pairs_csv((ctx.dir / "pairs_avg-rt_overall.csv").string(), m);

    if (with_timeline) {
        auto counts = parse_activity_csv(ctx.config.inputs.activity);
        std::set<Date> sessions;
        if (!ctx.config.inputs.sessions.empty()) sessions = parse_sessions_csv(ctx.config.inputs.sessions);
        auto points = activity_timeline(counts, sessions);
        write_timeline_csv((ctx.dir / "timeline.csv").string(), points);
    }
    return outputs;
}

std::vector<std::string> stage_report(StageContext& ctx) {
    fs::path meta_path = ctx.dir / "meta.csv";
    if (!fs::exists(meta_path))
        throw validation_error("meta.csv is missing from the output directory; re-run the meta stage");
    std::vector<meta::MetaCsvRow> meta_rows = meta::read_meta_csv(meta_path.string());
    const std::vector<std::string>& groups = ctx.dataset->matrix.groups();

    std::vector<std::string> classes;
    for (const meta::MetaCsvRow& row : meta_rows) {
        if (std::find(classes.begin(), classes.end(), row.class_label) == classes.end())
            classes.push_back(row.class_label);
    }
    std::vector<std::string> areas;
    for (const std::string& c : classes) {
        if (c != meta::overall_class) areas.push_back(c);
    }
    auto slugs = area_slugs(areas);
    auto class_slug = [&](const std::string& c) {
        return c == meta::overall_class ? std::string("overall") : slugs[c];
    };

    std::vector<std::string> outputs;
    for (const std::string& c : classes) outputs.push_back("pairs_ergm-mu_" + class_slug(c) + ".csv");
    for (const report::ThresholdSpec& spec : ctx.config.thresholds)
        outputs.push_back("blocks_" + spec.metric + ".json");
    outputs.push_back("comparison.json");
    refuse_overwrite(ctx.dir, outputs, ctx.config.force);

    report::PairMatrix mu_overall;
    bool have_mu_overall = false;
    for (const std::string& c : classes) {
        report::PairMatrix m = report::build_meta_matrix(groups, meta_rows, c);
        report::write_pairs_csv((ctx.dir / ("pairs_ergm-mu_" + class_slug(c) + ".csv")).string(), m);
        if (c == meta::overall_class) {
            mu_overall = std::move(m);
            have_mu_overall = true;
        }
    }
    if (!have_mu_overall) mu_overall = report::build_meta_matrix(groups, meta_rows, meta::overall_class);

    report::PairMatrix alpha =
        matrix_from_pairs_csv(ctx.dir / "pairs_alpha_overall.csv", "alpha", groups);
    report::PairMatrix avg_rt =
        matrix_from_pairs_csv(ctx.dir / "pairs_avg-rt_overall.csv", "avg-rt", groups);

    for (const report::ThresholdSpec& spec : ctx.config.thresholds) {
        const report::PairMatrix* source = nullptr;
        if (spec.metric == "alpha") source = &alpha;
        else if (spec.metric == "avg-rt") source = &avg_rt;
        else if (spec.metric == "ergm-mu") source = &mu_overall;
        else throw validation_error("no matrix for threshold metric '" + spec.metric + "'");
        report::write_blocks_json((ctx.dir / ("blocks_" + spec.metric + ".json")).string(), *source, spec);
    }

    auto count_common = [](const report::PairMatrix& a, const report::PairMatrix& b) {
        std::int32_t common = 0;
        for (std::int32_t i = 0; i < a.size(); ++i)
            for (std::int32_t j = i + 1; j < a.size(); ++j)
                if (a.at(i, j) && b.at(i, j)) ++common;
        return common;
    };
    std::vector<report::ComparisonEntry> entries;
    auto compare = [&](const report::PairMatrix& a, const report::PairMatrix& b) {
        report::ComparisonEntry entry;
        entry.metric_a = a.metric;
        entry.metric_b = b.metric;
        entry.scope = "overall";
        entry.cells = count_common(a, b);
        try {
            entry.spearman = report::rank_correlation(a, b);
        } catch (const covote::error& e) {
            entry.note = e.what();
        }
        entries.push_back(std::move(entry));
    };
    compare(alpha, mu_overall);
    compare(alpha, avg_rt);
    compare(mu_overall, avg_rt);
    report::write_comparison_json((ctx.dir / "comparison.json").string(), entries);
    return outputs;
}

} // namespace

RunResult run(const PipelineConfig& config, const std::vector<Stage>& stages) {
    if (!(config.jaccard_threshold > 0.0 && config.jaccard_threshold <= 1.0))
        throw validation_error("jaccard threshold must lie in (0, 1]");

    // Canonical order with duplicates removed.
    std::vector<Stage> ordered;
    for (Stage stage : all_stages()) {
        if (std::find(stages.begin(), stages.end(), stage) != stages.end()) ordered.push_back(stage);
    }
    if (ordered.empty()) throw validation_error("no stages requested");
    bool wants_ergm = std::find(ordered.begin(), ordered.end(), Stage::Ergm) != ordered.end();
    if (wants_ergm && !config.seed)
        throw validation_error("the ergm stage samples; provide a seed (config or --seed)");

    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    ordered_json manifest = load_manifest(dir);
    const std::string hash = config_hash(config);

    bool needs_dataset = std::any_of(ordered.begin(), ordered.end(), [](Stage s) {
        return s == Stage::Alpha || s == Stage::Ergm || s == Stage::Twitter || s == Stage::Report;
    });
    std::optional<ingest::Dataset> dataset;
    if (needs_dataset) dataset = load_dataset(config);

    RunResult result;
    for (Stage stage : ordered) {
        if (stage == Stage::Meta) {
            require_fresh(manifest, Stage::Meta, Stage::Ergm, hash);
        } else if (stage == Stage::Report) {
            require_fresh(manifest, Stage::Report, Stage::Alpha, hash);
            require_fresh(manifest, Stage::Report, Stage::Meta, hash);
            require_fresh(manifest, Stage::Report, Stage::Twitter, hash);
        }

        StageContext ctx{config, dir, hash, dataset ? &*dataset : nullptr, &result};
        auto started = std::chrono::steady_clock::now();
        std::vector<std::string> outputs;
        switch (stage) {
            case Stage::Alpha: outputs = stage_alpha(ctx); break;
            case Stage::Ergm: outputs = stage_ergm(ctx); break;
            case Stage::Meta: outputs = stage_meta(ctx); break;
            case Stage::Twitter: outputs = stage_twitter(ctx); break;
            case Stage::Report: outputs = stage_report(ctx); break;
        }
        auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);

        StageOutcome outcome;
        outcome.stage = stage;
        outcome.wall_ms = elapsed.count();
        outcome.outputs = outputs;
        result.stages.push_back(outcome);

        ordered_json entry;
        entry["config_hash"] = hash;
        if (stage == Stage::Ergm) entry["seed"] = *config.seed;
        entry["wall_ms"] = outcome.wall_ms;
        entry["outputs"] = outputs;
        manifest["stages"][std::string(to_string(stage))] = std::move(entry);
        manifest["tool_version"] = std::string(tool_version);
        save_manifest(dir, manifest);
    }
    return result;
}

} // namespace covote::pipeline
