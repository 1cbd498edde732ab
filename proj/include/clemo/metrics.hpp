#pragma once

// Evaluation harness: per-method accuracy/incoherence tables, feature
// contribution rankings, and stability of explanations under dataset
// resampling (standard deviation of top contributions and the feature
// stability index).

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "clemo/regression_tree.hpp"
#include "clemo/surrogate.hpp"

namespace clemo {

/// A named model that predicts the explained components at a parameter
/// vector; adapts linear surrogates and tree benchmarks to one shape.
struct MethodPredictor {
    std::string method;
    std::vector<std::string> component_labels;
    std::function<Vec(const Vec&)> predict_components;
};

inline MethodPredictor make_predictor(const SurrogateModel& model, std::string name) {
    return {std::move(name), model.component_labels, [model](const Vec& theta) { return predict(model, theta); }};
}

inline MethodPredictor make_predictor(const DtrModel& model, std::string name) {
    return {std::move(name), model.component_labels, [model](const Vec& theta) { return model.predict_components(theta); }};
}

struct MethodEvaluation {
    std::string method;
    double accuracy_objective = 0.0;
    double accuracy_decisions = 0.0;
    double incoherence_objective = 0.0;
    double incoherence_feasibility = 0.0;
};

struct EvaluationReport {
    std::vector<MethodEvaluation> rows;
};

/// Computes the four raw (lambda-free) loss columns per method.
inline EvaluationReport evaluate(const std::vector<MethodPredictor>& methods, const FitContext& ctx) {
    EvaluationReport report;
    for (const auto& m : methods) {
        require(m.component_labels == ctx.component_labels, "model layout does not match dataset");
        const RawLossTerms t = accumulate_raw_terms(ctx, [&](int i, Vec& preds) {
            const auto th = ctx.theta_row(i);
            preds = m.predict_components(Vec(th.begin() + 1, th.end()));
        });
        report.rows.push_back({m.method, t.sq_objective + t.log_objective, t.sq_decisions + t.log_decisions,
                               t.incoherence_objective, t.incoherence_feasibility});
    }
    return report;
}

inline EvaluationReport evaluate(const std::vector<MethodPredictor>& methods, const ExplainDataset& ds,
                                 const ProblemSpec& spec) {
    return evaluate(methods, make_fit_context(ds, spec));
}

// ---- feature contributions ------------------------------------------------

struct Contribution {
    int feature = 0;  // index into theta (the intercept is excluded)
    double value = 0.0;
};

enum class ContributionKind {
    effect,       // beta_{c,j} * theta0_j, the effect at the present problem
    coefficient,  // raw beta_{c,j}
};

/// Nonzero contributions per component, ranked by magnitude (ties break
/// toward the lower feature index).
inline std::vector<std::vector<Contribution>> feature_contributions(const SurrogateModel& model, const Vec& theta0,
                                                                    ContributionKind kind = ContributionKind::effect) {
    require(static_cast<int>(theta0.size()) + 1 == model.features(), "parameter dimension does not match model");
    std::vector<std::vector<Contribution>> out(model.components());
    for (int c = 0; c < model.components(); ++c) {
        for (size_t j = 0; j < theta0.size(); ++j) {
            const double v = kind == ContributionKind::effect ? model.beta.at(c, static_cast<int>(j) + 1) * theta0[j]
                                                              : model.beta.at(c, static_cast<int>(j) + 1);
            if (v != 0.0) out[c].push_back({static_cast<int>(j), v});
        }
        std::sort(out[c].begin(), out[c].end(), [](const Contribution& a, const Contribution& b) {
            if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
            return a.feature < b.feature;
        });
    }
    return out;
}

/// Tree analogue used when stability runs include the tree benchmark:
/// each feature contributes its total weighted variance reduction.
inline std::vector<std::vector<Contribution>> feature_contributions(const DtrModel& model) {
    std::vector<std::vector<Contribution>> out(model.trees.size());
    for (size_t c = 0; c < model.trees.size(); ++c) {
        const Vec& imp = model.trees[c].importance;
        for (size_t j = 0; j < imp.size(); ++j)
            if (imp[j] != 0.0) out[c].push_back({static_cast<int>(j), imp[j]});
        std::sort(out[c].begin(), out[c].end(), [](const Contribution& a, const Contribution& b) {
            if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
            return a.feature < b.feature;
        });
    }
    return out;
}

// ---- stability --------------------------------------------------------------

struct StabilityReport {
    double std_dev = 0.0;         // mean std of top-5 contributions across resamples
    double normalized_std = 0.0;  // std divided by the mean absolute contribution
    double fsi = 0.0;             // feature stability index, in [0, 5]
};

inline constexpr int kTopFeatures = 5;

/// Stability across resampled fits, from per-model ranked contribution
/// lists (models x components x ranked contributions).
inline StabilityReport stability_from_contributions(
    const std::vector<std::vector<std::vector<Contribution>>>& per_model) {
    require(per_model.size() >= 2, "stability needs at least two resampled models");
    const size_t n_models = per_model.size();
    const size_t n_comp = per_model[0].size();
    for (const auto& m : per_model) require(m.size() == n_comp, "models disagree on component layout");

    StabilityReport report;

    // spread of the union of top-5 contributions
    double std_acc = 0.0, nstd_acc = 0.0;
    for (size_t c = 0; c < n_comp; ++c) {
        std::set<int> pool;
        std::vector<std::map<int, double>> lookup(n_models);
        for (size_t m = 0; m < n_models; ++m) {
            const auto& ranked = per_model[m][c];
            for (size_t k = 0; k < ranked.size() && k < kTopFeatures; ++k) pool.insert(ranked[k].feature);
            for (const auto& con : ranked) lookup[m][con.feature] = con.value;
        }
        if (pool.empty()) continue;
        double comp_std = 0.0, comp_abs = 0.0;
        for (int f : pool) {
            double mean = 0.0;
            for (size_t m = 0; m < n_models; ++m) {
                const auto it = lookup[m].find(f);
                mean += it == lookup[m].end() ? 0.0 : it->second;
            }
            mean /= static_cast<double>(n_models);
            double var = 0.0;
            for (size_t m = 0; m < n_models; ++m) {
                const auto it = lookup[m].find(f);
                const double v = it == lookup[m].end() ? 0.0 : it->second;
                var += (v - mean) * (v - mean);
                comp_abs += std::abs(v);
            }
            comp_std += std::sqrt(var / static_cast<double>(n_models));
        }
        comp_std /= static_cast<double>(pool.size());
        comp_abs /= static_cast<double>(pool.size() * n_models);
        std_acc += comp_std;
        nstd_acc += comp_abs > 0.0 ? comp_std / comp_abs : 0.0;
    }
    report.std_dev = std_acc / static_cast<double>(n_comp);
    report.normalized_std = nstd_acc / static_cast<double>(n_comp);

    // feature stability index: sum over k of the mean top-k overlap over
    // all model pairs and components, each divided by the maximum
    // potential overlap min(k, available features)
    double fsi = 0.0;
    for (int k = 1; k <= kTopFeatures; ++k) {
        double acc = 0.0;
        int terms = 0;
        for (size_t m1 = 0; m1 < n_models; ++m1) {
            for (size_t m2 = m1 + 1; m2 < n_models; ++m2) {
                for (size_t c = 0; c < n_comp; ++c) {
                    const auto& r1 = per_model[m1][c];
                    const auto& r2 = per_model[m2][c];
                    const int k1 = std::min<int>(k, static_cast<int>(r1.size()));
                    const int k2 = std::min<int>(k, static_cast<int>(r2.size()));
                    const int denom = std::min(k1, k2);
                    ++terms;
                    if (denom == 0) {
                        acc += (k1 == k2) ? 1.0 : 0.0;  // both empty counts as full agreement
                        continue;
                    }
                    std::set<int> s1;
                    for (int t = 0; t < k1; ++t) s1.insert(r1[t].feature);
                    int overlap = 0;
                    for (int t = 0; t < k2; ++t) overlap += s1.count(r2[t].feature);
                    acc += static_cast<double>(overlap) / denom;
                }
            }
        }
        fsi += acc / terms;
    }
    report.fsi = fsi;
    return report;
}

inline StabilityReport stability(const std::vector<SurrogateModel>& models, const Vec& theta0,
                                 ContributionKind kind = ContributionKind::effect) {
    require(models.size() >= 2, "stability needs at least two resampled models");
    std::vector<std::vector<std::vector<Contribution>>> per_model;
    per_model.reserve(models.size());
    for (const auto& m : models) per_model.push_back(feature_contributions(m, theta0, kind));
    return stability_from_contributions(per_model);
}

// ---- misc -------------------------------------------------------------------

/// Weighted coefficient of determination of predictions against targets.
inline double weighted_r2(const Vec& pred, const Vec& target, const Vec& w) {
    require(pred.size() == target.size() && pred.size() == w.size(), "weighted r2 inputs must align");
    double wsum = 0.0, mean = 0.0;
    for (size_t i = 0; i < target.size(); ++i) {
        wsum += w[i];
        mean += w[i] * target[i];
    }
    require(wsum > 0.0, "weighted r2 needs positive total weight");
    mean /= wsum;
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < target.size(); ++i) {
        ss_res += w[i] * (pred[i] - target[i]) * (pred[i] - target[i]);
        ss_tot += w[i] * (target[i] - mean) * (target[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace clemo
