#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covote/ergm.hpp"

namespace covote::meta {

// One per-roll-call coefficient entering a pooled estimate.  Infinite
// variance is allowed and contributes nothing (zero weight, exact no-op).
struct StudyEstimate {
    double value = 0.0;
    double variance = std::numeric_limits<double>::infinity(); // squared standard error
    std::string class_label; // policy area; empty = unclassified
    std::string term;
};

enum class VarianceMethod : std::uint8_t {
    PauleMandel,      // iterated weighted least squares fixed point
    DerSimonianLaird, // one-shot moment estimator for sensitivity checks
};

struct MetaOptions {
    VarianceMethod method = VarianceMethod::PauleMandel;
    std::optional<double> pinned_between_variance; // 0 pins the fixed-effect model
    std::int32_t max_iterations = 100;
    double tolerance = 1e-10; // |between-variance change| stopping rule
};

struct MetaResult {
    double mu = std::numeric_limits<double>::quiet_NaN();
    double between_variance = 0.0;
    double se_mu = std::numeric_limits<double>::quiet_NaN(); // (sum of weights)^(-1/2)
    std::int32_t k_studies = 0;                              // finite-variance studies pooled
    std::int32_t iterations = 0;
};

// Random-effects pooled mean with inverse-variance weights 1/(v + tau2).
// Exactly permutation invariant: studies are brought into a canonical order
// before any accumulation.  Throws when no finite-variance study exists.
MetaResult meta_fit(std::span<const StudyEstimate> estimates, const MetaOptions& options = {});

enum class Grouping : std::uint8_t { Overall, PerArea, Both };

// Class label used for the pool of all roll-calls.
inline constexpr std::string_view overall_class = "Overall";

struct MetaByClassOptions {
    MetaOptions meta;
    Grouping grouping = Grouping::Both;
    std::vector<std::string> terms; // empty selects every term in the dump
    // Records that are flagged or unconverged are excluded by default (with
    // counts); setting include_flagged keeps them at inflated variance.
    bool include_flagged = false;
    double variance_inflation = 100.0;
};

struct ClassResult {
    std::string term;
    std::string class_label; // overall_class or a policy area
    bool defined = false;    // false when no finite-variance study remained
    MetaResult result;
    std::int32_t excluded = 0; // records of this (term, class) dropped before pooling
};

struct ClassSummary {
    std::vector<ClassResult> results; // term-major; overall first, then areas by appearance
    std::vector<std::string> warnings;
};

// One meta_fit per (term, class).  The overall pool takes every roll-call;
// unclassified roll-calls enter the overall pool only.
ClassSummary meta_by_class(std::span<const ergm::FitRecord> records,
                           const MetaByClassOptions& options = {});

// Sum of size[g] * mu_g over sum of sizes.  Zero-size groups are skipped
// outright so their (possibly undefined) mean cannot leak in.
double group_size_weighted_overall(const std::map<std::string, MetaResult>& per_group,
                                   const std::map<std::string, std::int64_t>& sizes);

// CSV round-trip: header term,class,mu,sigma2,se,k with empty numeric fields
// for undefined cells.
void write_meta_csv(const std::string& path, std::span<const ClassResult> results);

struct MetaCsvRow {
    std::string term;
    std::string class_label;
    std::optional<double> mu;
    std::optional<double> sigma2;
    std::optional<double> se;
    std::int64_t k = 0;
};

std::vector<MetaCsvRow> read_meta_csv(const std::string& path);

} // namespace covote::meta
