#include "covote/ergm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <Eigen/Dense>

#include "covote/networks.hpp"
#include "covote/rng.hpp"
#include "csv.hpp"

namespace covote::ergm {

// ---------------------------------------------------------------------------
// Attribute table

AttributeTable AttributeTable::from_members(std::span<const Member> members,
                                            std::vector<std::string> group_order) {
    AttributeTable table;
    std::vector<std::string> groups, countries, parties;
    groups.reserve(members.size());
    for (const Member& m : members) {
        groups.push_back(m.group);
        countries.push_back(m.country);
        parties.push_back(m.national_party);
    }
    table.add("group", groups, std::move(group_order));
    table.add("country", countries);
    table.add("national_party", parties);
    return table;
}

void AttributeTable::add(const std::string& name, const std::vector<std::string>& values,
                         std::vector<std::string> categories) {
    if (node_count_ >= 0 && static_cast<std::int32_t>(values.size()) != node_count_)
        throw validation_error("attribute '" + name + "' has a different node count");
    if (has(name)) throw validation_error("attribute '" + name + "' already exists");

    Attribute attr;
    attr.name = name;
    attr.categories = std::move(categories);
    for (const std::string& c : attr.categories) {
        if (c.empty()) throw validation_error("attribute '" + name + "' has an empty category label");
    }
    attr.codes.reserve(values.size());
    for (const std::string& v : values) {
        if (v.empty()) {
            attr.codes.push_back(-1); // missing
            continue;
        }
        auto it = std::find(attr.categories.begin(), attr.categories.end(), v);
        if (it == attr.categories.end()) {
            attr.categories.push_back(v);
            attr.codes.push_back(static_cast<std::int32_t>(attr.categories.size()) - 1);
        } else {
            attr.codes.push_back(static_cast<std::int32_t>(it - attr.categories.begin()));
        }
    }
    node_count_ = static_cast<std::int32_t>(values.size());
    attributes_.push_back(std::move(attr));
}

bool AttributeTable::has(std::string_view name) const {
    for (const Attribute& a : attributes_) {
        if (a.name == name) return true;
    }
    return false;
}

const AttributeTable::Attribute& AttributeTable::find(std::string_view name) const {
    for (const Attribute& a : attributes_) {
        if (a.name == name) return a;
    }
    throw not_found_error("unknown attribute '" + std::string(name) + "'");
}

const std::vector<std::string>& AttributeTable::categories(std::string_view name) const {
    return find(name).categories;
}

const std::vector<std::int32_t>& AttributeTable::codes(std::string_view name) const {
    return find(name).codes;
}

std::vector<std::pair<std::string, std::string>> all_category_pairs(const AttributeTable& attrs,
                                                                    std::string_view attribute, bool ordered) {
    const auto& cats = attrs.categories(attribute);
    std::vector<std::pair<std::string, std::string>> pairs;
    if (ordered) {
        for (const auto& a : cats)
            for (const auto& b : cats) pairs.emplace_back(a, b);
    } else {
        for (std::size_t i = 0; i < cats.size(); ++i)
            for (std::size_t j = i; j < cats.size(); ++j) pairs.emplace_back(cats[i], cats[j]);
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Model compilation and statistic evaluation

namespace {

std::int32_t category_code(const std::vector<std::string>& cats, const std::string& label,
                           const std::string& attr) {
    auto it = std::find(cats.begin(), cats.end(), label);
    if (it == cats.end())
        throw validation_error("nodemix pair names unknown category '" + label + "' of attribute '" + attr + "'");
    return static_cast<std::int32_t>(it - cats.begin());
}

void require_complete(const AttributeTable& attrs, const std::string& attribute) {
    const auto& codes = attrs.codes(attribute);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] < 0)
            throw validation_error("node " + std::to_string(i) + " is missing attribute '" + attribute + "'");
    }
}

// Number of common neighbors of i and j; equals the triangle change of the
// dyad regardless of the current edge state.
std::int64_t common_neighbors(const Graph& g, std::int32_t i, std::int32_t j) {
    auto ni = g.neighbors(i);
    auto nj = g.neighbors(j);
    std::int64_t count = 0;
    std::size_t a = 0, b = 0;
    while (a < ni.size() && b < nj.size()) {
        if (ni[a].first < nj[b].first) ++a;
        else if (ni[a].first > nj[b].first) ++b;
        else {
            ++count;
            ++a;
            ++b;
        }
    }
    return count;
}

} // namespace

Model::Model(std::vector<Term> terms, AttributeTable attributes)
    : terms_(std::move(terms)), attributes_(std::move(attributes)) {
    if (terms_.empty()) throw validation_error("model needs at least one term");
    if (attributes_.node_count() < 0) throw validation_error("attribute table has no nodes");

    for (const Term& term : terms_) {
        std::int32_t offset = dimension_;
        offsets_.push_back(offset);
        const std::int32_t* codes = nullptr;
        std::int32_t mix = -1;

        if (std::holds_alternative<EdgesTerm>(term)) {
            stat_names_.push_back("edges");
            dimension_ += 1;
        } else if (const auto* nm = std::get_if<NodematchTerm>(&term)) {
            require_complete(attributes_, nm->attribute);
            codes = attributes_.codes(nm->attribute).data();
            stat_names_.push_back("nodematch." + nm->attribute);
            dimension_ += 1;
        } else if (const auto* mx = std::get_if<NodemixTerm>(&term)) {
            require_complete(attributes_, mx->attribute);
            codes = attributes_.codes(mx->attribute).data();
            const auto& cats = attributes_.categories(mx->attribute);
            std::int32_t k = static_cast<std::int32_t>(cats.size());

            CompiledNodemix compiled;
            compiled.category_count = k;
            compiled.targets.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), {-1, -1});
            std::set<std::pair<std::int32_t, std::int32_t>> seen;
            for (const auto& [la, lb] : mx->pairs) {
                std::int32_t ca = category_code(cats, la, mx->attribute);
                std::int32_t cb = category_code(cats, lb, mx->attribute);
                if (!seen.insert({ca, cb}).second)
                    throw validation_error("duplicate nodemix pair (" + la + ", " + lb + ")");
                std::int32_t slot = dimension_;
                stat_names_.push_back("mix." + mx->attribute + "." + la + "." + lb);
                dimension_ += 1;
                auto attach = [&](std::int32_t x, std::int32_t y) {
                    auto& cell = compiled.targets[static_cast<std::size_t>(x) * static_cast<std::size_t>(k) +
                                                  static_cast<std::size_t>(y)];
                    if (cell[0] == -1) cell[0] = slot;
                    else if (cell[1] == -1) cell[1] = slot;
                    else
                        throw validation_error("category pair {" + la + ", " + lb +
                                               "} is covered by more than two statistics");
                };
                attach(ca, cb);
                if (ca != cb) attach(cb, ca);
            }
            mix = static_cast<std::int32_t>(compiled_mix_.size());
            compiled_mix_.push_back(std::move(compiled));
        } else if (const auto* ec = std::get_if<EdgeCovTerm>(&term)) {
            if (ec->n != attributes_.node_count())
                throw validation_error("edge covariate '" + ec->name + "' size does not match the node count");
            if (ec->values.size() != static_cast<std::size_t>(ec->n) * static_cast<std::size_t>(ec->n))
                throw validation_error("edge covariate '" + ec->name + "' is not a full n x n matrix");
            for (std::int32_t i = 0; i < ec->n; ++i) {
                for (std::int32_t j = i; j < ec->n; ++j) {
                    double vij = ec->at(i, j);
                    if (vij < 0.0 || !std::isfinite(vij))
                        throw validation_error("edge covariate '" + ec->name + "' has a negative or non-finite value");
                    if (vij != ec->at(j, i))
                        throw validation_error("edge covariate '" + ec->name + "' is not symmetric");
                }
            }
            stat_names_.push_back("edgecov." + ec->name);
            dimension_ += 1;
        } else if (std::holds_alternative<TrianglesTerm>(term)) {
            if (triangles_offset_ >= 0) throw validation_error("duplicate triangles term");
            triangles_offset_ = dimension_;
            stat_names_.push_back("triangles");
            dimension_ += 1;
            dyad_independent_ = false;
        }

        term_codes_.push_back(codes);
        mix_slot_.push_back(mix);
    }
}

void Model::add_dyad_terms(std::int32_t i, std::int32_t j, double sign, double* stats) const {
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        const Term& term = terms_[t];
        std::int32_t offset = offsets_[t];
        if (std::holds_alternative<EdgesTerm>(term)) {
            stats[offset] += sign;
        } else if (std::holds_alternative<NodematchTerm>(term)) {
            const std::int32_t* codes = term_codes_[t];
            if (codes[i] == codes[j]) stats[offset] += sign;
        } else if (std::holds_alternative<NodemixTerm>(term)) {
            const std::int32_t* codes = term_codes_[t];
            const CompiledNodemix& mix = compiled_mix_[static_cast<std::size_t>(mix_slot_[t])];
            const auto& cell = mix.targets[static_cast<std::size_t>(codes[i]) *
                                               static_cast<std::size_t>(mix.category_count) +
                                           static_cast<std::size_t>(codes[j])];
            if (cell[0] >= 0) stats[cell[0]] += sign;
            if (cell[1] >= 0) stats[cell[1]] += sign;
        } else if (const auto* ec = std::get_if<EdgeCovTerm>(&term)) {
            stats[offset] += sign * ec->at(i, j);
        }
    }
}

namespace {

void change_stats_into(const Graph& graph, const Model& model, std::int32_t i, std::int32_t j, double* out) {
    std::fill(out, out + model.dimension(), 0.0);
    model.add_dyad_terms(i, j, 1.0, out);
    if (model.triangles_offset() >= 0)
        out[model.triangles_offset()] = static_cast<double>(common_neighbors(graph, i, j));
}

void check_model_graph(const Graph& graph, const Model& model) {
    if (graph.node_count() != model.node_count())
        throw precondition_error("graph and model node counts differ");
}

} // namespace

std::vector<double> compute_stats(const Graph& graph, const Model& model) {
    check_model_graph(graph, model);
    std::vector<double> stats(static_cast<std::size_t>(model.dimension()), 0.0);
    graph.for_each_edge([&](std::int32_t i, std::int32_t j, double) {
        model.add_dyad_terms(i, j, 1.0, stats.data());
    });
    if (model.triangles_offset() >= 0) {
        std::int64_t tripled = 0; // every triangle is counted once per edge
        graph.for_each_edge([&](std::int32_t i, std::int32_t j, double) {
            tripled += common_neighbors(graph, i, j);
        });
        stats[static_cast<std::size_t>(model.triangles_offset())] = static_cast<double>(tripled / 3);
    }
    return stats;
}

std::vector<double> change_stats(const Graph& graph, const Model& model, std::int32_t i, std::int32_t j) {
    check_model_graph(graph, model);
    if (i < 0 || j < 0 || i >= graph.node_count() || j >= graph.node_count() || i == j)
        throw precondition_error("change statistic requires two distinct nodes in range");
    std::vector<double> delta(static_cast<std::size_t>(model.dimension()), 0.0);
    change_stats_into(graph, model, i, j, delta.data());
    return delta;
}

double logistic(double x) {
    // Evaluate via the non-overflowing branch.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::string_view to_string(CoefStatus s) {
    switch (s) {
        case CoefStatus::Ok: return "ok";
        case CoefStatus::NonEstimable: return "non_estimable";
        case CoefStatus::Separated: return "separated";
    }
    return "ok";
}

std::string_view to_string(FitMethod m) {
    switch (m) {
        case FitMethod::Mple: return "mple";
        case FitMethod::McmcMle: return "mcmc_mle";
        case FitMethod::Exact: return "exact";
    }
    return "mple";
}

bool Fit::usable() const {
    if (!converged || degenerate || empty_network) return false;
    for (CoefStatus s : status) {
        if (s != CoefStatus::Ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

std::vector<std::pair<std::int32_t, std::int32_t>> dyad_list(std::int32_t n) {
    std::vector<std::pair<std::int32_t, std::int32_t>> dyads;
    dyads.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int32_t j = i + 1; j < n; ++j) dyads.emplace_back(i, j);
    return dyads;
}

struct ActiveSet {
    std::vector<std::int32_t> index; // active column -> model column
    std::vector<bool> active;       // per model column
};

// Columns that are identically zero across all rows carry no information
// (structurally empty dyad classes) and are excluded from estimation.
ActiveSet split_active(const Eigen::MatrixXd& design) {
    ActiveSet set;
    set.active.assign(static_cast<std::size_t>(design.cols()), false);
    for (Eigen::Index k = 0; k < design.cols(); ++k) {
        if (design.col(k).cwiseAbs().maxCoeff() > 0.0) {
            set.active[static_cast<std::size_t>(k)] = true;
            set.index.push_back(static_cast<std::int32_t>(k));
        }
    }
    return set;
}

void fill_inactive(Fit& fit, const ActiveSet& set) {
    for (std::size_t k = 0; k < set.active.size(); ++k) {
        if (!set.active[k]) {
            fit.theta[k] = std::numeric_limits<double>::quiet_NaN();
            fit.std_error[k] = std::numeric_limits<double>::infinity();
            fit.status[k] = CoefStatus::NonEstimable;
        }
    }
}

void flag_separated(Fit& fit, const ActiveSet& set, const Eigen::VectorXd& theta, double clamp) {
    for (std::size_t a = 0; a < set.index.size(); ++a) {
        std::size_t k = static_cast<std::size_t>(set.index[a]);
        if (std::abs(theta(static_cast<Eigen::Index>(a))) >= clamp - 1e-6) {
            fit.status[k] = CoefStatus::Separated;
            fit.std_error[k] = std::numeric_limits<double>::infinity();
            fit.converged = false;
        }
    }
}

Fit make_fit_shell(const Model& model, FitMethod method) {
    Fit fit;
    fit.stat_names = model.stat_names();
    fit.theta.assign(static_cast<std::size_t>(model.dimension()), 0.0);
    fit.std_error.assign(static_cast<std::size_t>(model.dimension()), 0.0);
    fit.status.assign(static_cast<std::size_t>(model.dimension()), CoefStatus::Ok);
    fit.method = method;
    return fit;
}

} // namespace

Fit mple(const Graph& graph, const Model& model, const MpleOptions& options) {
    check_model_graph(graph, model);
    const std::int32_t n = graph.node_count();
    if (n < 2) throw precondition_error("estimation requires at least two nodes");
    const std::int32_t p = model.dimension();
    auto dyads = dyad_list(n);
    const auto rows = static_cast<Eigen::Index>(dyads.size());

    Eigen::MatrixXd design(rows, p);
    Eigen::VectorXd response(rows);
    std::vector<double> buffer(static_cast<std::size_t>(p));
    for (Eigen::Index r = 0; r < rows; ++r) {
        auto [i, j] = dyads[static_cast<std::size_t>(r)];
        change_stats_into(graph, model, i, j, buffer.data());
        for (std::int32_t k = 0; k < p; ++k) design(r, k) = buffer[static_cast<std::size_t>(k)];
        response(r) = graph.has_edge(i, j) ? 1.0 : 0.0;
    }

    ActiveSet active = split_active(design);
    Fit fit = make_fit_shell(model, FitMethod::Mple);
    fill_inactive(fit, active);
    const auto pa = static_cast<Eigen::Index>(active.index.size());
    if (pa == 0) {
        fit.converged = false;
        return fit;
    }

    Eigen::MatrixXd x(rows, pa);
    for (Eigen::Index a = 0; a < pa; ++a) x.col(a) = design.col(active.index[static_cast<std::size_t>(a)]);

    // Exactly collinear statistics cannot be attributed; refuse instead of
    // returning an arbitrary solution.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < pa)
        throw validation_error("model statistics are collinear; drop the intercept or redundant pairs");

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(pa);
    bool gradient_ok = false;
    std::int32_t used = 0;
    Eigen::MatrixXd info(pa, pa);
    for (std::int32_t it = 0; it < options.max_iterations; ++it) {
        used = it + 1;
        Eigen::VectorXd eta = x * theta;
        Eigen::VectorXd prob = eta.unaryExpr([](double v) { return logistic(v); });
        Eigen::VectorXd gradient = x.transpose() * (response - prob);
        if (gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
            gradient_ok = true;
            used = it;
            break;
        }
        Eigen::VectorXd weights = prob.array() * (1.0 - prob.array());
        info = x.transpose() * weights.asDiagonal() * x;
        info.diagonal().array() += 1e-12;
        theta += info.ldlt().solve(gradient);
        theta = theta.cwiseMax(-options.theta_clamp).cwiseMin(options.theta_clamp);
    }

    // Observed information at the final estimate for standard errors.
    Eigen::VectorXd prob = (x * theta).unaryExpr([](double v) { return logistic(v); });
    Eigen::VectorXd weights = prob.array() * (1.0 - prob.array());
    info = x.transpose() * weights.asDiagonal() * x;
    info.diagonal().array() += 1e-12;
    Eigen::MatrixXd covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(pa, pa));

    fit.converged = gradient_ok;
    fit.iterations = used;
    for (Eigen::Index a = 0; a < pa; ++a) {
        std::size_t k = static_cast<std::size_t>(active.index[static_cast<std::size_t>(a)]);
        fit.theta[k] = theta(a);
        fit.std_error[k] = std::sqrt(std::max(covariance(a, a), 0.0));
    }
    flag_separated(fit, active, theta, options.theta_clamp);
    return fit;
}

SampleResult mh_sample(const Graph& start, const Model& model, std::span<const double> theta,
                       const SamplerConfig& config, const SampleObserver& observer) {
    check_model_graph(start, model);
    const std::int32_t p = model.dimension();
    if (static_cast<std::int32_t>(theta.size()) != p)
        throw precondition_error("theta size does not match the model dimension");
    if (config.thin == 0) throw precondition_error("thin must be positive");
    const std::int32_t n = start.node_count();
    if (n < 2) throw precondition_error("sampling requires at least two nodes");

    auto dyads = dyad_list(n);
    Graph g = start;
    std::vector<double> current = compute_stats(g, model);
    std::vector<double> delta(static_cast<std::size_t>(p));

    SampleResult result;
    result.columns = static_cast<std::size_t>(p);
    const std::uint64_t total = config.burn_in + config.iterations;
    result.stats.reserve((config.iterations / config.thin) * static_cast<std::size_t>(p));

    Rng rng(config.seed);
    std::uint64_t accepted = 0;
    for (std::uint64_t step = 1; step <= total; ++step) {
        auto [i, j] = dyads[rng.below(dyads.size())];
        change_stats_into(g, model, i, j, delta.data());
        const double sign = g.has_edge(i, j) ? -1.0 : 1.0;
        double log_ratio = 0.0;
        for (std::int32_t k = 0; k < p; ++k)
            log_ratio += theta[static_cast<std::size_t>(k)] * delta[static_cast<std::size_t>(k)];
        log_ratio *= sign;
        // The uniform draw happens unconditionally so runs with different
        // theta share one proposal/decision stream (common random numbers).
        const double u = rng.uniform01();
        if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
            g.toggle_edge(i, j);
            for (std::int32_t k = 0; k < p; ++k)
                current[static_cast<std::size_t>(k)] += sign * delta[static_cast<std::size_t>(k)];
            ++accepted;
        }
        if (step > config.burn_in && (step - config.burn_in) % config.thin == 0) {
            result.stats.insert(result.stats.end(), current.begin(), current.end());
            ++result.rows;
            if (observer) observer(g, std::span<const double>(current.data(), current.size()));
        }
    }
    result.acceptance_rate = total > 0 ? static_cast<double>(accepted) / static_cast<double>(total) : 0.0;
    return result;
}

namespace {

// Smallest per-statistic effective sample size from lag-1 autocorrelation.
double effective_samples_proxy(const SampleResult& sample) {
    if (sample.rows < 4) return static_cast<double>(sample.rows);
    const auto s = static_cast<Eigen::Index>(sample.rows);
    const auto p = static_cast<Eigen::Index>(sample.columns);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        sample.stats.data(), s, p);
    double worst = static_cast<double>(sample.rows);
    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::VectorXd col = m.col(k);
        double mean = col.mean();
        Eigen::VectorXd centered = col.array() - mean;
        double denom = centered.squaredNorm();
        if (denom <= 0.0) continue;
        double num = centered.head(s - 1).dot(centered.tail(s - 1));
        double rho = std::clamp(num / denom, -0.999, 0.999);
        double ess = static_cast<double>(sample.rows) * (1.0 - rho) / (1.0 + rho);
        worst = std::min(worst, ess);
    }
    return worst;
}

} // namespace

Fit mcmc_mle(const Graph& graph, const Model& model, const McmcOptions& options) {
    check_model_graph(graph, model);
    Fit fit = mple(graph, model, options.initial);
    fit.method = FitMethod::McmcMle;
    fit.converged = false;

    // Coordinates without a finite pseudo-likelihood estimate stay pinned;
    // the sampler iteration only updates the well-behaved ones.
    std::vector<std::int32_t> active;
    for (std::size_t k = 0; k < fit.status.size(); ++k) {
        if (fit.status[k] == CoefStatus::Ok) active.push_back(static_cast<std::int32_t>(k));
        if (fit.status[k] == CoefStatus::NonEstimable) fit.theta[k] = 0.0; // pinned, reported NaN below
    }
    const auto pa = static_cast<Eigen::Index>(active.size());
    if (pa == 0) {
        for (std::size_t k = 0; k < fit.status.size(); ++k) {
            if (fit.status[k] == CoefStatus::NonEstimable)
                fit.theta[k] = std::numeric_limits<double>::quiet_NaN();
        }
        return fit;
    }

    std::vector<double> observed_full = compute_stats(graph, model);
    Eigen::VectorXd observed(pa);
    for (Eigen::Index a = 0; a < pa; ++a)
        observed(a) = observed_full[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];

    std::vector<double> theta_full = fit.theta;
    for (std::size_t k = 0; k < theta_full.size(); ++k) {
        if (!std::isfinite(theta_full[k])) theta_full[k] = 0.0;
    }

    Eigen::MatrixXd weighted_cov = Eigen::MatrixXd::Zero(pa, pa);
    SampleResult last_sample;
    std::int32_t rounds = 0;
    bool converged = false;

    auto extract_active = [&](const SampleResult& sample) {
        const auto s = static_cast<Eigen::Index>(sample.rows);
        Eigen::MatrixXd stats(s, pa);
        for (Eigen::Index r = 0; r < s; ++r) {
            auto row = sample.row(static_cast<std::size_t>(r));
            for (Eigen::Index a = 0; a < pa; ++a)
                stats(r, a) = row[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
        }
        return stats;
    };

    // Degeneracy: the chain at the current estimate cannot reproduce the
    // observed statistics at all.
    auto drifted_from_observed = [&](const Eigen::MatrixXd& stats) {
        const auto s = static_cast<double>(stats.rows());
        Eigen::VectorXd mean = stats.colwise().mean();
        for (Eigen::Index a = 0; a < pa; ++a) {
            double sd = std::sqrt((stats.col(a).array() - mean(a)).square().sum() / (s - 1.0));
            if (std::abs(mean(a) - observed(a)) > options.degeneracy_sds * std::max(sd, 1e-9)) return true;
        }
        return false;
    };

    // Maximize the sampled likelihood-ratio approximation around the theta
    // the sample was drawn at; fills weighted_cov as a side effect.
    auto solve_step = [&](const Eigen::MatrixXd& stats) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(pa);
        Eigen::VectorXd log_weights(stats.rows());
        for (std::int32_t inner = 0; inner < 100; ++inner) {
            log_weights = stats * d;
            double max_lw = log_weights.maxCoeff();
            Eigen::VectorXd w = (log_weights.array() - max_lw).exp();
            w /= w.sum();
            Eigen::VectorXd wmean = stats.transpose() * w;
            Eigen::MatrixXd centered = stats.rowwise() - wmean.transpose();
            weighted_cov = centered.transpose() * w.asDiagonal() * centered;
            weighted_cov.diagonal().array() += 1e-12;
            Eigen::VectorXd gradient = observed - wmean;
            double scale = std::max(1.0, observed.cwiseAbs().maxCoeff());
            if (gradient.cwiseAbs().maxCoeff() < 1e-9 * scale) break;
            d += weighted_cov.ldlt().solve(gradient);
            d = d.cwiseMax(-options.trust_radius).cwiseMin(options.trust_radius);
        }
        return d;
    };

    auto apply_step = [&](const Eigen::VectorXd& d) {
        for (Eigen::Index a = 0; a < pa; ++a)
            theta_full[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])] += d(a);
    };

    for (std::int32_t round = 0; round < options.max_rounds && !converged; ++round) {
        rounds = round + 1;
        // Same seed each round: the outer loop is a deterministic
        // fixed-point iteration under common random numbers.
        last_sample = mh_sample(graph, model, theta_full, options.sampler);
        if (last_sample.rows < 2)
            throw precondition_error("sampler emitted fewer than two states; increase iterations");
        Eigen::MatrixXd stats = extract_active(last_sample);

        if (drifted_from_observed(stats)) {
            fit.degenerate = true;
            break;
        }

        Eigen::VectorXd d = solve_step(stats);
        apply_step(d);

        // The sampled moment equation carries Monte Carlo noise of roughly
        // sqrt(inverse Fisher / effective sample size) per coordinate; a step
        // inside three such standard errors is indistinguishable from zero,
        // and the raw tolerance alone would chase that noise forever.
        double ess = std::max(1.0, effective_samples_proxy(last_sample));
        Eigen::MatrixXd cov_inv = weighted_cov.ldlt().solve(Eigen::MatrixXd::Identity(pa, pa));
        converged = true;
        for (Eigen::Index a = 0; a < pa; ++a) {
            double band = 0.0;
            double var = cov_inv(a, a);
            if (std::isfinite(var) && var > 0.0) band = 3.0 * std::sqrt(var / ess);
            if (std::abs(d(a)) >= std::max(options.tolerance, band)) converged = false;
        }
    }

    // The fixed point above is only accurate to the per-round Monte Carlo
    // noise.  Re-solving once on a longer chain tightens the returned
    // estimate (and its standard errors) by the square root of the scale.
    if (converged && !fit.degenerate && options.final_sample_scale > 1) {
        SamplerConfig final_config = options.sampler;
        final_config.iterations *= static_cast<std::uint64_t>(options.final_sample_scale);
        SampleResult sample = mh_sample(graph, model, theta_full, final_config);
        Eigen::MatrixXd stats = extract_active(sample);
        if (drifted_from_observed(stats)) {
            fit.degenerate = true;
        } else {
            apply_step(solve_step(stats));
            last_sample = std::move(sample);
        }
    }

    // Standard errors from the estimated Fisher information (the statistic
    // covariance under the fitted model).
    Eigen::MatrixXd fisher = weighted_cov;
    if (fisher.rows() == pa && fisher.cols() == pa && last_sample.rows >= 2) {
        Eigen::MatrixXd cov_inv = fisher.ldlt().solve(Eigen::MatrixXd::Identity(pa, pa));
        for (Eigen::Index a = 0; a < pa; ++a) {
            std::size_t k = static_cast<std::size_t>(active[static_cast<std::size_t>(a)]);
            fit.std_error[k] = std::sqrt(std::max(cov_inv(a, a), 0.0));
        }
    }

    for (Eigen::Index a = 0; a < pa; ++a) {
        std::size_t k = static_cast<std::size_t>(active[static_cast<std::size_t>(a)]);
        fit.theta[k] = theta_full[k];
    }
    for (std::size_t k = 0; k < fit.status.size(); ++k) {
        if (fit.status[k] == CoefStatus::NonEstimable) fit.theta[k] = std::numeric_limits<double>::quiet_NaN();
    }
    fit.converged = converged && !fit.degenerate;
    for (CoefStatus s : fit.status) {
        if (s == CoefStatus::Separated) fit.converged = false;
    }
    fit.iterations = rounds;
    fit.acceptance_rate = last_sample.acceptance_rate;
    fit.effective_samples = effective_samples_proxy(last_sample);
    return fit;
}

Fit exact_mle(const Graph& graph, const Model& model, const ExactOptions& options) {
    check_model_graph(graph, model);
    const std::int32_t n = graph.node_count();
    if (n < 2) throw precondition_error("estimation requires at least two nodes");
    if (n > 5) throw precondition_error("exact likelihood enumeration is limited to 5 nodes");
    const std::int32_t p = model.dimension();
    auto dyads = dyad_list(n);
    const std::size_t d = dyads.size();
    const std::size_t count = std::size_t{1} << d;

    // Statistics of every graph on the node set.
    Eigen::MatrixXd all_stats(static_cast<Eigen::Index>(count), p);
    {
        std::vector<double> stats;
        for (std::size_t mask = 0; mask < count; ++mask) {
            Graph tmp(graph.node_ids());
            for (std::size_t b = 0; b < d; ++b) {
                if (mask & (std::size_t{1} << b)) tmp.add_edge(dyads[b].first, dyads[b].second, 1.0);
            }
            stats = compute_stats(tmp, model);
            for (std::int32_t k = 0; k < p; ++k)
                all_stats(static_cast<Eigen::Index>(mask), k) = stats[static_cast<std::size_t>(k)];
        }
    }

    std::vector<double> observed_vec = compute_stats(graph, model);
    Eigen::Map<const Eigen::VectorXd> observed(observed_vec.data(), p);

    // Statistics constant over the whole sample space carry no information.
    ActiveSet active;
    active.active.assign(static_cast<std::size_t>(p), false);
    for (Eigen::Index k = 0; k < p; ++k) {
        if (all_stats.col(k).maxCoeff() > all_stats.col(k).minCoeff()) {
            active.active[static_cast<std::size_t>(k)] = true;
            active.index.push_back(static_cast<std::int32_t>(k));
        }
    }

    Fit fit = make_fit_shell(model, FitMethod::Exact);
    fill_inactive(fit, active);
    const auto pa = static_cast<Eigen::Index>(active.index.size());
    if (pa == 0) {
        fit.converged = false;
        return fit;
    }

    Eigen::MatrixXd stats(static_cast<Eigen::Index>(count), pa);
    Eigen::VectorXd obs(pa);
    for (Eigen::Index a = 0; a < pa; ++a) {
        stats.col(a) = all_stats.col(active.index[static_cast<std::size_t>(a)]);
        obs(a) = observed(active.index[static_cast<std::size_t>(a)]);
    }

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(pa);
    Eigen::MatrixXd covariance(pa, pa);
    bool gradient_ok = false;
    std::int32_t used = 0;
    for (std::int32_t it = 0; it < options.max_iterations; ++it) {
        used = it + 1;
        Eigen::VectorXd lw = stats * theta;
        double max_lw = lw.maxCoeff();
        Eigen::VectorXd w = (lw.array() - max_lw).exp();
        w /= w.sum();
        Eigen::VectorXd mean = stats.transpose() * w;
        Eigen::VectorXd gradient = obs - mean;
        if (gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
            gradient_ok = true;
            used = it;
            break;
        }
        Eigen::MatrixXd centered = stats.rowwise() - mean.transpose();
        covariance = centered.transpose() * w.asDiagonal() * centered;
        covariance.diagonal().array() += 1e-12;
        theta += covariance.ldlt().solve(gradient);
        theta = theta.cwiseMax(-options.theta_clamp).cwiseMin(options.theta_clamp);
    }

    // Fisher information at the final estimate.
    {
        Eigen::VectorXd lw = stats * theta;
        double max_lw = lw.maxCoeff();
        Eigen::VectorXd w = (lw.array() - max_lw).exp();
        w /= w.sum();
        Eigen::VectorXd mean = stats.transpose() * w;
        Eigen::MatrixXd centered = stats.rowwise() - mean.transpose();
        covariance = centered.transpose() * w.asDiagonal() * centered;
        covariance.diagonal().array() += 1e-12;
    }
    Eigen::MatrixXd cov_inv = covariance.ldlt().solve(Eigen::MatrixXd::Identity(pa, pa));

    fit.converged = gradient_ok;
    fit.iterations = used;
    for (Eigen::Index a = 0; a < pa; ++a) {
        std::size_t k = static_cast<std::size_t>(active.index[static_cast<std::size_t>(a)]);
        fit.theta[k] = theta(a);
        fit.std_error[k] = std::sqrt(std::max(cov_inv(a, a), 0.0));
    }
    flag_separated(fit, active, theta, options.theta_clamp);
    return fit;
}

// ---------------------------------------------------------------------------
// Per-roll-call production fit

namespace {

Model build_rollcall_model(const VoteMatrix& matrix, const Graph* retweets, const RollcallTermSpec& spec) {
    AttributeTable attrs = AttributeTable::from_members(matrix.members(), matrix.groups());
    std::vector<Term> terms;
    if (spec.edges) terms.push_back(EdgesTerm{});
    if (spec.nodematch_country) terms.push_back(NodematchTerm{"country"});
    if (spec.nodematch_party) terms.push_back(NodematchTerm{"national_party"});
    if (spec.nodemix_group)
        terms.push_back(NodemixTerm{"group", all_category_pairs(attrs, "group", spec.ordered_group_pairs)});
    if (spec.edgecov_retweets && retweets != nullptr) {
        EdgeCovTerm cov;
        cov.name = "retweets";
        cov.n = matrix.member_count();
        cov.values.assign(static_cast<std::size_t>(cov.n) * static_cast<std::size_t>(cov.n), 0.0);
        std::vector<std::int32_t> node_of(static_cast<std::size_t>(cov.n), -1);
        for (std::int32_t i = 0; i < cov.n; ++i) {
            auto node = retweets->find_node(matrix.member(i).id);
            node_of[static_cast<std::size_t>(i)] = node ? *node : -1;
        }
        for (std::int32_t i = 0; i < cov.n; ++i) {
            if (node_of[static_cast<std::size_t>(i)] < 0) continue;
            for (std::int32_t j = i + 1; j < cov.n; ++j) {
                if (node_of[static_cast<std::size_t>(j)] < 0) continue;
                double w = retweets->edge_weight(node_of[static_cast<std::size_t>(i)],
                                                 node_of[static_cast<std::size_t>(j)]);
                cov.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(cov.n) +
                           static_cast<std::size_t>(j)] = w;
                cov.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(cov.n) +
                           static_cast<std::size_t>(i)] = w;
            }
        }
        terms.push_back(std::move(cov));
    }
    if (terms.empty()) throw validation_error("roll-call term selection is empty");
    return Model(std::move(terms), std::move(attrs));
}

} // namespace

Fit fit_rollcall(const VoteMatrix& matrix, std::int32_t rollcall, const Graph* retweets,
                 const FitRollcallConfig& config) {
    if (rollcall < 0 || rollcall >= matrix.rollcall_count())
        throw not_found_error("roll-call index out of range");
    Model model = build_rollcall_model(matrix, retweets, config.terms);

    if (matrix.cast_count_at(rollcall) == 0) {
        Fit fit = make_fit_shell(model, FitMethod::Mple);
        fit.empty_network = true;
        fit.converged = false;
        for (std::size_t k = 0; k < fit.status.size(); ++k) {
            fit.theta[k] = std::numeric_limits<double>::quiet_NaN();
            fit.std_error[k] = std::numeric_limits<double>::infinity();
            fit.status[k] = CoefStatus::NonEstimable;
        }
        return fit;
    }

    Graph covote = build_covote_network(matrix, rollcall);
    if (!model.dyad_independent() || config.force_mcmc) {
        McmcOptions options = config.mcmc;
        options.sampler.seed = derive_seed(config.seed, matrix.rollcall(rollcall).id);
        return mcmc_mle(covote, model, options);
    }
    return mple(covote, model, config.mple);
}

// ---------------------------------------------------------------------------
// Fit dump records

std::vector<FitRecord> fit_records(const std::string& rollcall_id, const std::string& policy_area,
                                   const Fit& fit) {
    std::vector<FitRecord> records;
    records.reserve(fit.stat_names.size());
    for (std::size_t k = 0; k < fit.stat_names.size(); ++k) {
        FitRecord rec;
        rec.rollcall_id = rollcall_id;
        rec.policy_area = policy_area;
        rec.term = fit.stat_names[k];
        rec.estimate = fit.theta[k];
        rec.std_error = fit.std_error[k];
        rec.converged = fit.converged;
        if (fit.empty_network) rec.flag = "empty";
        else if (fit.status[k] == CoefStatus::NonEstimable) rec.flag = "non_estimable";
        else if (fit.status[k] == CoefStatus::Separated) rec.flag = "separated";
        else if (fit.degenerate) rec.flag = "degenerate";
        else rec.flag = "ok";
        records.push_back(std::move(rec));
    }
    return records;
}

void write_fit_records_csv(const std::string& path, std::span<const FitRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << "rollcall_id,policy_area,term,estimate,std_error,converged,flag\n";
    for (const FitRecord& rec : records) {
        std::vector<std::string> fields = {rec.rollcall_id,
                                           rec.policy_area,
                                           rec.term,
                                           detail::format_double(rec.estimate),
                                           detail::format_double(rec.std_error),
                                           rec.converged ? "true" : "false",
                                           rec.flag};
        detail::write_csv_row(out, fields);
    }
}

std::vector<FitRecord> read_fit_records_csv(const std::string& path) {
    static constexpr std::string_view header[] = {"rollcall_id", "policy_area", "term",
                                                  "estimate",    "std_error",   "converged", "flag"};
    auto reader = detail::open_csv_with_header(path, header);
    std::vector<FitRecord> records;
    while (auto row = reader.next()) {
        if (row->size() != 7)
            throw parse_error(path, reader.record_line(), 1, "expected 7 fields");
        FitRecord rec;
        rec.rollcall_id = (*row)[0];
        rec.policy_area = (*row)[1];
        rec.term = (*row)[2];
        rec.estimate = detail::parse_double_field(reader, (*row)[3], "estimate");
        rec.std_error = detail::parse_double_field(reader, (*row)[4], "std_error");
        if ((*row)[5] == "true") rec.converged = true;
        else if ((*row)[5] == "false") rec.converged = false;
        else throw parse_error(path, reader.record_line(), 1, "invalid converged flag '" + (*row)[5] + "'");
        rec.flag = (*row)[6];
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace covote::ergm
