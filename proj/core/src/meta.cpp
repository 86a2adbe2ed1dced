#include "covote/meta.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv.hpp"

namespace covote::meta {

namespace {

struct Study {
    double variance;
    double value;

    bool operator<(const Study& other) const {
        if (variance != other.variance) return variance < other.variance;
        return value < other.value;
    }
};

// Finite-variance studies in canonical order; infinite-variance entries are
// dropped here, which is exactly their zero-weight contribution.
std::vector<Study> collect(std::span<const StudyEstimate> estimates) {
    std::vector<Study> studies;
    for (const StudyEstimate& e : estimates) {
        if (std::isinf(e.variance) && e.variance > 0.0) continue;
        if (!(e.variance > 0.0) || !std::isfinite(e.variance))
            throw validation_error("study variance must be positive or infinite");
        if (!std::isfinite(e.value))
            throw validation_error("study value must be finite when its variance is");
        studies.push_back({e.variance, e.value});
    }
    std::sort(studies.begin(), studies.end());
    return studies;
}

double weighted_mean(const std::vector<Study>& studies, double tau2) {
    double sw = 0.0, swt = 0.0;
    for (const Study& s : studies) {
        double w = 1.0 / (s.variance + tau2);
        sw += w;
        swt += w * s.value;
    }
    return swt / sw;
}

double paule_mandel(const std::vector<Study>& studies, const MetaOptions& options,
                    std::int32_t& iterations) {
    const auto k = static_cast<double>(studies.size());
    double tau2 = 0.0;
    for (std::int32_t it = 1; it <= options.max_iterations; ++it) {
        iterations = it;
        double mu = weighted_mean(studies, tau2);
        double q = 0.0, slope = 0.0;
        for (const Study& s : studies) {
            double w = 1.0 / (s.variance + tau2);
            double d2 = (s.value - mu) * (s.value - mu);
            q += w * d2;
            slope += w * w * d2;
        }
        if (slope <= 0.0) {
            tau2 = 0.0; // zero dispersion: all values coincide with the mean
            break;
        }
        double next = std::max(0.0, tau2 + (q - (k - 1.0)) / slope);
        bool done = std::abs(next - tau2) < options.tolerance;
        tau2 = next;
        if (done) break;
    }
    return tau2;
}

double dersimonian_laird(const std::vector<Study>& studies) {
    const auto k = static_cast<double>(studies.size());
    double sw = 0.0, sw2 = 0.0;
    for (const Study& s : studies) {
        double w = 1.0 / s.variance;
        sw += w;
        sw2 += w * w;
    }
    double mu = weighted_mean(studies, 0.0);
    double q = 0.0;
    for (const Study& s : studies) q += (s.value - mu) * (s.value - mu) / s.variance;
    double denom = sw - sw2 / sw;
    if (denom <= 0.0) return 0.0;
    return std::max(0.0, (q - (k - 1.0)) / denom);
}

} // namespace

MetaResult meta_fit(std::span<const StudyEstimate> estimates, const MetaOptions& options) {
    std::vector<Study> studies = collect(estimates);
    if (studies.empty())
        throw precondition_error("meta-analysis needs at least one finite-variance study");

    MetaResult result;
    result.k_studies = static_cast<std::int32_t>(studies.size());

    double tau2 = 0.0;
    if (options.pinned_between_variance) {
        tau2 = *options.pinned_between_variance;
        if (!(tau2 >= 0.0) || !std::isfinite(tau2))
            throw validation_error("pinned between-study variance must be finite and non-negative");
    } else if (studies.size() > 1) {
        if (options.method == VarianceMethod::DerSimonianLaird) {
            tau2 = dersimonian_laird(studies);
            result.iterations = 1;
        } else {
            tau2 = paule_mandel(studies, options, result.iterations);
        }
    }

    double sw = 0.0;
    for (const Study& s : studies) sw += 1.0 / (s.variance + tau2);
    result.mu = weighted_mean(studies, tau2);
    result.between_variance = tau2;
    result.se_mu = std::sqrt(1.0 / sw);
    return result;
}

namespace {

void append_unique(std::vector<std::string>& order, const std::string& value) {
    if (std::find(order.begin(), order.end(), value) == order.end()) order.push_back(value);
}

ClassResult pool(const std::string& term, const std::string& class_label,
                 const std::vector<StudyEstimate>& studies, std::int32_t excluded,
                 const MetaOptions& options) {
    ClassResult cell;
    cell.term = term;
    cell.class_label = class_label;
    cell.excluded = excluded;
    if (!studies.empty()) {
        cell.result = meta_fit(studies, options);
        cell.defined = true;
    }
    return cell;
}

} // namespace

ClassSummary meta_by_class(std::span<const ergm::FitRecord> records, const MetaByClassOptions& options) {
    ClassSummary summary;

    std::vector<std::string> term_order;
    std::vector<std::string> area_order;
    for (const ergm::FitRecord& rec : records) {
        append_unique(term_order, rec.term);
        if (!rec.policy_area.empty()) append_unique(area_order, rec.policy_area);
    }
    if (!options.terms.empty()) {
        std::vector<std::string> requested;
        for (const std::string& term : options.terms) {
            if (std::find(term_order.begin(), term_order.end(), term) == term_order.end()) {
                summary.warnings.push_back("term '" + term + "' absent from the fit dump; skipped");
            } else {
                append_unique(requested, term);
            }
        }
        term_order = std::move(requested);
    }

    for (const std::string& term : term_order) {
        // Usable studies and drop counts per class, plus the overall pool.
        std::vector<StudyEstimate> overall;
        std::int32_t overall_excluded = 0;
        std::map<std::string, std::vector<StudyEstimate>> by_area;
        std::map<std::string, std::int32_t> area_excluded;

        for (const ergm::FitRecord& rec : records) {
            if (rec.term != term) continue;
            std::optional<StudyEstimate> study;
            double variance = rec.std_error * rec.std_error;
            bool finite = std::isfinite(rec.estimate) && std::isfinite(variance) && variance > 0.0;
            if (finite) {
                bool clean = rec.flag == "ok" && rec.converged;
                if (clean) {
                    study = StudyEstimate{rec.estimate, variance, rec.policy_area, term};
                } else if (options.include_flagged) {
                    double inflated = variance * options.variance_inflation;
                    if (std::isfinite(inflated) && inflated > 0.0)
                        study = StudyEstimate{rec.estimate, inflated, rec.policy_area, term};
                }
            }
            if (study) {
                overall.push_back(*study);
                if (!rec.policy_area.empty()) by_area[rec.policy_area].push_back(*study);
            } else {
                ++overall_excluded;
                if (!rec.policy_area.empty()) ++area_excluded[rec.policy_area];
            }
        }

        if (options.grouping != Grouping::PerArea)
            summary.results.push_back(
                pool(term, std::string(overall_class), overall, overall_excluded, options.meta));
        if (options.grouping != Grouping::Overall) {
            for (const std::string& area : area_order) {
                auto it = by_area.find(area);
                static const std::vector<StudyEstimate> none;
                const auto& studies = it == by_area.end() ? none : it->second;
                auto ex = area_excluded.find(area);
                summary.results.push_back(
                    pool(term, area, studies, ex == area_excluded.end() ? 0 : ex->second, options.meta));
            }
        }
    }
    return summary;
}

double group_size_weighted_overall(const std::map<std::string, MetaResult>& per_group,
                                   const std::map<std::string, std::int64_t>& sizes) {
    if (per_group.empty()) throw precondition_error("no per-group results to weight");
    double numerator = 0.0, denominator = 0.0;
    for (const auto& [group, result] : per_group) {
        auto it = sizes.find(group);
        if (it == sizes.end()) throw not_found_error("no size for group '" + group + "'");
        if (it->second < 0) throw validation_error("negative size for group '" + group + "'");
        if (it->second == 0) continue;
        numerator += static_cast<double>(it->second) * result.mu;
        denominator += static_cast<double>(it->second);
    }
    if (denominator <= 0.0) throw precondition_error("group sizes sum to zero");
    return numerator / denominator;
}

void write_meta_csv(const std::string& path, std::span<const ClassResult> results) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "term,class,mu,sigma2,se,k\n";
    for (const ClassResult& cell : results) {
        std::vector<std::string> fields = {
            cell.term,
            cell.class_label,
            cell.defined ? detail::format_double(cell.result.mu) : "",
            cell.defined ? detail::format_double(cell.result.between_variance) : "",
            cell.defined ? detail::format_double(cell.result.se_mu) : "",
            std::to_string(cell.defined ? cell.result.k_studies : 0)};
        detail::write_csv_row(out, fields);
    }
}

std::vector<MetaCsvRow> read_meta_csv(const std::string& path) {
    static constexpr std::string_view header[] = {"term", "class", "mu", "sigma2", "se", "k"};
    auto reader = detail::open_csv_with_header(path, header);
    std::vector<MetaCsvRow> rows;
    while (auto row = reader.next()) {
        if (row->size() != 6) throw parse_error(path, reader.record_line(), 1, "expected 6 fields");
        MetaCsvRow rec;
        rec.term = (*row)[0];
        rec.class_label = (*row)[1];
        if (!(*row)[2].empty()) rec.mu = detail::parse_double_field(reader, (*row)[2], "mu");
        if (!(*row)[3].empty()) rec.sigma2 = detail::parse_double_field(reader, (*row)[3], "sigma2");
        if (!(*row)[4].empty()) rec.se = detail::parse_double_field(reader, (*row)[4], "se");
        rec.k = detail::parse_int_field(reader, (*row)[5], "k");
        rows.push_back(std::move(rec));
    }
    return rows;
}

} // namespace covote::meta
