#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "covote/types.hpp"

namespace covote::ergm {

// Categorical node attributes used by match/mix statistics.  Category codes
// are dense ints; -1 marks a missing value, which is an error for any
// attribute a model actually uses.
class AttributeTable {
public:
    AttributeTable() = default;

    // Attributes "group", "country", "national_party" from a member list.
    // The category order of "group" can be pinned so statistic names stay
    // stable across roll-calls even when an epoch leaves a group empty.
    static AttributeTable from_members(std::span<const Member> members,
                                       std::vector<std::string> group_order = {});

    // values[i] is node i's raw label; empty string means missing.  The
    // optional category list pins codes and may contain unused labels.
    void add(const std::string& name, const std::vector<std::string>& values,
             std::vector<std::string> categories = {});

    std::int32_t node_count() const { return node_count_; }
    bool has(std::string_view name) const;
    const std::vector<std::string>& categories(std::string_view name) const;
    const std::vector<std::int32_t>& codes(std::string_view name) const;

private:
    struct Attribute {
        std::string name;
        std::vector<std::string> categories;
        std::vector<std::int32_t> codes;
    };
    const Attribute& find(std::string_view name) const;

    std::vector<Attribute> attributes_;
    std::int32_t node_count_ = -1;
};

// Model terms.  All except Triangles are dyad independent.
struct EdgesTerm {};

struct NodematchTerm {
    std::string attribute;
};

// One statistic per listed category pair.  A pair (a, b) with a != b counts
// edges whose endpoint categories are {a, b}; listing both orientations
// (see all_category_pairs ordered mode) mirrors the count into redundant
// statistics and exists only for parity experiments.
struct NodemixTerm {
    std::string attribute;
    std::vector<std::pair<std::string, std::string>> pairs; // no duplicates
};

// Symmetric non-negative dyad covariate; values are row-major n x n.
struct EdgeCovTerm {
    std::string name;
    std::int32_t n = 0;
    std::vector<double> values;

    double at(std::int32_t i, std::int32_t j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
};

struct TrianglesTerm {};

using Term = std::variant<EdgesTerm, NodematchTerm, NodemixTerm, EdgeCovTerm, TrianglesTerm>;

// Category pairs for a nodemix over every category of an attribute:
// unordered gives k(k+1)/2 pairs (a <= b in category order), ordered gives
// all k^2 including the redundant mirrored ones.
std::vector<std::pair<std::string, std::string>> all_category_pairs(const AttributeTable& attrs,
                                                                    std::string_view attribute, bool ordered);

// A term list bound to an attribute table.  Construction validates that
// every referenced attribute exists, no used node value is missing, nodemix
// pairs name real categories without duplicates, and covariate matrices are
// symmetric, non-negative, and of matching size.
class Model {
public:
    Model(std::vector<Term> terms, AttributeTable attributes);

    std::int32_t dimension() const { return dimension_; }
    const std::vector<std::string>& stat_names() const { return stat_names_; }
    const AttributeTable& attributes() const { return attributes_; }
    std::int32_t node_count() const { return attributes_.node_count(); }
    bool dyad_independent() const { return dyad_independent_; }

    // Internal evaluation hooks; the free functions below are the public
    // entry points.  Dyad terms are every term except Triangles.
    void add_dyad_terms(std::int32_t i, std::int32_t j, double sign, double* stats) const;
    std::int32_t triangles_offset() const { return triangles_offset_; } // -1 when absent

private:
    struct CompiledNodemix {
        std::int32_t category_count = 0;
        // targets[x*k + y]: up to two statistic slots an {x, y} edge
        // increments (-1 padding).
        std::vector<std::array<std::int32_t, 2>> targets;
    };

    std::vector<Term> terms_;
    AttributeTable attributes_;
    std::vector<std::string> stat_names_;
    std::vector<std::int32_t> offsets_;              // first stat slot per term
    std::vector<const std::int32_t*> term_codes_;    // attribute codes per term or nullptr
    std::vector<CompiledNodemix> compiled_mix_;      // parallel to nodemix terms
    std::vector<std::int32_t> mix_slot_;             // term index -> compiled_mix_ index or -1
    std::int32_t dimension_ = 0;
    std::int32_t triangles_offset_ = -1;
    bool dyad_independent_ = true;
};

// Statistic vector g(y) of a graph under a model.
std::vector<double> compute_stats(const Graph& graph, const Model& model);

// Change statistic of dyad (i, j): g(y + ij) - g(y - ij), independent of
// whether the edge is currently present.
std::vector<double> change_stats(const Graph& graph, const Model& model, std::int32_t i, std::int32_t j);

// Standard logistic function 1 / (1 + exp(-x)).
double logistic(double x);

enum class CoefStatus : std::uint8_t {
    Ok,
    NonEstimable, // statistic structurally constant; no information
    Separated,    // likelihood maximized at infinity; estimate clamped
};

enum class FitMethod : std::uint8_t { Mple, McmcMle, Exact };

std::string_view to_string(CoefStatus s);
std::string_view to_string(FitMethod m);

struct Fit {
    std::vector<std::string> stat_names;
    std::vector<double> theta;
    std::vector<double> std_error;
    std::vector<CoefStatus> status;
    FitMethod method = FitMethod::Mple;
    bool converged = false;
    bool degenerate = false;     // sampler drifted far from the observed stats
    bool empty_network = false;  // roll-call with zero cast votes
    std::int32_t iterations = 0; // IRLS/Newton iterations or sampling rounds
    double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
    double effective_samples = std::numeric_limits<double>::quiet_NaN();

    bool usable() const; // converged, not degenerate/empty, all coefficients Ok
};

struct MpleOptions {
    std::int32_t max_iterations = 100;
    double gradient_tolerance = 1e-8;
    double theta_clamp = 10.0; // |theta| at this bound marks separation
};

// Maximum pseudo-likelihood: logistic regression of edge indicators on
// change statistics over all dyads.  Exact maximum likelihood when the
// model is dyad independent.
Fit mple(const Graph& graph, const Model& model, const MpleOptions& options = {});

struct SamplerConfig {
    std::uint64_t burn_in = 100000;
    std::uint64_t iterations = 100000;
    std::uint32_t thin = 10; // emit every thin-th post-burn-in state
    std::uint64_t seed = 0;
};

struct SampleResult {
    std::size_t rows = 0;      // emitted states
    std::size_t columns = 0;   // model dimension
    std::vector<double> stats; // row-major rows x columns
    double acceptance_rate = 0.0;

    std::span<const double> row(std::size_t r) const { return {stats.data() + r * columns, columns}; }
};

// Metropolis sampler over single-dyad toggles starting from `start`.
// Proposal: uniform random dyad; acceptance min(1, exp(theta . delta * s)).
// Fully deterministic for a fixed seed.  The observer, when set, sees every
// emitted state alongside its statistics.
using SampleObserver = std::function<void(const Graph&, std::span<const double>)>;
SampleResult mh_sample(const Graph& start, const Model& model, std::span<const double> theta,
                       const SamplerConfig& config, const SampleObserver& observer = {});

struct McmcOptions {
    SamplerConfig sampler;
    std::int32_t max_rounds = 30;
    double tolerance = 1e-4;        // outer stopping: max |theta change|, floored at the MC noise scale
    double trust_radius = 1.0;      // per-round step bound in each coordinate
    double degeneracy_sds = 5.0;    // sampled mean drift threshold
    std::int32_t final_sample_scale = 4; // converged estimate re-solved on a chain this much longer
    MpleOptions initial;            // options for the MPLE starting point
};

// Monte Carlo maximum likelihood via iterated importance-sampled likelihood
// ratios.  Every round resamples with the same seed (common random numbers),
// which turns the outer loop into a deterministic fixed-point iteration.
Fit mcmc_mle(const Graph& graph, const Model& model, const McmcOptions& options = {});

struct ExactOptions {
    std::int32_t max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double theta_clamp = 10.0;
};

// Reference maximum likelihood by full enumeration of all graphs on the
// node set.  Refuses node counts above 5.
Fit exact_mle(const Graph& graph, const Model& model, const ExactOptions& options = {});

// Term selection for the per-roll-call production model.
struct RollcallTermSpec {
    bool nodematch_country = true;
    bool nodematch_party = true;
    bool nodemix_group = true;
    bool ordered_group_pairs = false; // 81-style redundant listing, parity only
    bool edgecov_retweets = true;     // used only when a retweet graph is given
    bool edges = false;               // intercept; collinear with a full nodemix
};

struct FitRollcallConfig {
    RollcallTermSpec terms;
    std::uint64_t seed = 0;    // per-fit stream is derive_seed(seed, rollcall id)
    bool force_mcmc = false;   // validation path for dyad-independent models
    MpleOptions mple;
    McmcOptions mcmc;
};

// Builds the co-vote network of one roll-call and fits the selected terms.
// Dyad-independent models use the pseudo-likelihood (exact likelihood under
// dyad independence); force_mcmc switches to the sampler route.
Fit fit_rollcall(const VoteMatrix& matrix, std::int32_t rollcall, const Graph* retweets,
                 const FitRollcallConfig& config);

// Flat per-coefficient record used for the on-disk fit dump.
struct FitRecord {
    std::string rollcall_id;
    std::string policy_area;
    std::string term;
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::string flag; // ok | non_estimable | separated | empty | degenerate
};

std::vector<FitRecord> fit_records(const std::string& rollcall_id, const std::string& policy_area,
                                   const Fit& fit);

// CSV round-trip: header rollcall_id,policy_area,term,estimate,std_error,converged,flag
void write_fit_records_csv(const std::string& path, std::span<const FitRecord> records);
std::vector<FitRecord> read_fit_records_csv(const std::string& path);

} // namespace covote::ergm
