#pragma once

// Explanation models over the sensitive parameters: a linear/logistic
// surrogate per explained component, fitted either independently
// (weighted least squares / weighted logistic regression) or jointly
// with coherence regularizers that tie the predicted objective to the
// objective of the predicted decisions and penalize constraint slack of
// the predicted decisions.
//
// All fits operate on theta augmented with a leading constant-1
// intercept feature.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "clemo/lbfgs.hpp"
#include "clemo/linalg.hpp"
#include "clemo/problem.hpp"
#include "clemo/sampling.hpp"

namespace clemo {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline constexpr double kProbClamp = 1e-12;

inline double clamp_probability(double p) { return std::min(std::max(p, kProbClamp), 1.0 - kProbClamp); }

/// Linear surrogate coefficients, one row per explained component
/// (objective first, then decisions by index). Binary components are
/// read through a sigmoid.
struct SurrogateModel {
    std::vector<std::string> component_labels;
    std::vector<std::string> feature_names;  // "intercept" first
    std::vector<bool> binary_mask;           // per component
    Mat beta;                                // components x features

    int components() const { return beta.rows; }
    int features() const { return beta.cols; }
};

/// Per-component surrogate prediction at theta. Continuous components
/// are affine in theta; binary components pass through the sigmoid.
inline Vec predict(const SurrogateModel& model, const Vec& theta) {
    require(static_cast<int>(theta.size()) + 1 == model.features(), "parameter dimension does not match model");
    Vec out(model.components());
    for (int c = 0; c < model.components(); ++c) {
        const auto row = model.beta.row(c);
        double z = row[0];
        for (size_t j = 0; j < theta.size(); ++j) z += row[j + 1] * theta[j];
        out[c] = model.binary_mask[c] ? sigmoid(z) : z;
    }
    return out;
}

struct LambdaWeights {
    double a1 = 1.0;  // squared accuracy
    double a2 = 1.0;  // log-loss accuracy
    double c1 = 1.0;  // objective incoherence
    double c2 = 1.0;  // feasibility incoherence
};

struct LossBreakdown {
    double accuracy_squared = 0.0;         // weighted squared error, continuous components
    double accuracy_logloss = 0.0;         // weighted log-loss, binary components
    double incoherence_objective = 0.0;    // weighted squared gap between predicted objective
                                           // and objective of predicted decisions
    double incoherence_feasibility = 0.0;  // weighted constraint slack of predicted decisions
    LambdaWeights lambda;
    double total = 0.0;
};

// ---- fitting context ------------------------------------------------------
//
// Precomputed per-sample structure shared by the loss, gradient and
// evaluation paths. Decision components that are not explained are folded
// into constants using the solver's values for that sample.

struct FitContext {
    int n_features = 0;  // q + 1
    std::vector<std::string> component_labels;
    std::vector<bool> component_binary;
    std::vector<std::string> feature_names;

    int n_rows = 0;
    Vec theta_aug;  // n_rows x n_features
    Vec weights;    // n_rows
    Vec targets;    // n_rows x n_components
    Vec obj_coeff;  // n_rows x (n_components - 1), objective coefficient per explained decision
    Vec obj_const;  // n_rows

    struct ConstraintRow {
        int offset = 0;  // into entry_comp / entry_coeff
        int len = 0;
        double constant = 0.0;
    };
    std::vector<ConstraintRow> rows;
    std::vector<int> row_begin;  // per sample, size n_rows + 1
    std::vector<int> entry_comp;
    Vec entry_coeff;

    int components() const { return static_cast<int>(component_labels.size()); }
    std::span<const double> theta_row(int i) const {
        return {theta_aug.data() + static_cast<size_t>(i) * n_features, static_cast<size_t>(n_features)};
    }
    std::span<const double> target_row(int i) const {
        return {targets.data() + static_cast<size_t>(i) * components(), static_cast<size_t>(components())};
    }
};

inline FitContext make_fit_context(const ExplainDataset& ds, const ProblemSpec& spec) {
    require(!ds.rows.empty(), "dataset has no rows");
    require(ds.q() == spec.q() && ds.p() == spec.p, "dataset layout does not match problem");

    std::vector<int> explained = spec.explained_decisions;
    std::sort(explained.begin(), explained.end());
    explained.erase(std::unique(explained.begin(), explained.end()), explained.end());

    FitContext ctx;
    ctx.n_features = spec.q() + 1;
    ctx.feature_names.push_back("intercept");
    for (const auto& name : spec.theta_names) ctx.feature_names.push_back(name);
    ctx.component_labels.push_back("f");
    ctx.component_binary.push_back(false);
    for (int idx : explained) {
        require(idx >= 0 && idx < spec.p, "explained decision index out of range");
        ctx.component_labels.push_back(spec.decision_labels[idx]);
        ctx.component_binary.push_back(spec.binary_mask[idx]);
    }

    const int n_comp = ctx.components();
    const int n_dec = n_comp - 1;
    ctx.n_rows = ds.size();
    ctx.theta_aug.resize(static_cast<size_t>(ctx.n_rows) * ctx.n_features);
    ctx.weights.resize(ctx.n_rows);
    ctx.targets.resize(static_cast<size_t>(ctx.n_rows) * n_comp);
    ctx.obj_coeff.resize(static_cast<size_t>(ctx.n_rows) * n_dec);
    ctx.obj_const.resize(ctx.n_rows);
    ctx.row_begin.assign(ctx.n_rows + 1, 0);

    std::vector<int> comp_of(spec.p, -1);
    for (int s = 0; s < n_dec; ++s) comp_of[explained[s]] = s + 1;

    ParamVector theta;
    theta.names = spec.theta_names;
    for (int i = 0; i < ctx.n_rows; ++i) {
        const auto& row = ds.rows[i];
        require(static_cast<int>(row.theta.size()) == spec.q(), "row parameter dimension mismatch");
        require(row.record.decision.size() == spec.p, "row decision dimension mismatch");
        theta.values = row.theta;

        ctx.theta_aug[static_cast<size_t>(i) * ctx.n_features] = 1.0;
        for (int j = 0; j < spec.q(); ++j)
            ctx.theta_aug[static_cast<size_t>(i) * ctx.n_features + 1 + j] = row.theta[j];
        ctx.weights[i] = row.weight;

        ctx.targets[static_cast<size_t>(i) * n_comp] = row.record.objective_value;
        for (int s = 0; s < n_dec; ++s)
            ctx.targets[static_cast<size_t>(i) * n_comp + 1 + s] = row.record.decision.values[explained[s]];

        const AffineExpr obj = spec.objective(theta);
        double k = obj.constant;
        for (int j = 0; j < spec.p; ++j) {
            if (comp_of[j] < 0)
                k += obj.coeffs[j] * row.record.decision.values[j];
            else
                ctx.obj_coeff[static_cast<size_t>(i) * n_dec + comp_of[j] - 1] = obj.coeffs[j];
        }
        ctx.obj_const[i] = k;

        for (const auto& con : spec.constraints(theta)) {
            FitContext::ConstraintRow r;
            r.constant = con.constant;
            r.offset = static_cast<int>(ctx.entry_comp.size());
            for (size_t e = 0; e < con.index.size(); ++e) {
                const int var = con.index[e];
                if (comp_of[var] < 0) {
                    r.constant += con.coeff[e] * row.record.decision.values[var];
                } else {
                    ctx.entry_comp.push_back(comp_of[var]);
                    ctx.entry_coeff.push_back(con.coeff[e]);
                }
            }
            r.len = static_cast<int>(ctx.entry_comp.size()) - r.offset;
            if (r.len == 0 && r.constant <= kFeasibilityTolerance) {
                // constant and satisfied for this sample; can never contribute
                continue;
            }
            ctx.rows.push_back(r);
        }
        ctx.row_begin[i + 1] = static_cast<int>(ctx.rows.size());
    }
    return ctx;
}

// ---- raw loss terms -------------------------------------------------------

struct RawLossTerms {
    double sq_objective = 0.0;
    double log_objective = 0.0;
    double sq_decisions = 0.0;
    double log_decisions = 0.0;
    double incoherence_objective = 0.0;
    double incoherence_feasibility = 0.0;

    double accuracy_squared() const { return sq_objective + sq_decisions; }
    double accuracy_logloss() const { return log_objective + log_decisions; }
};

/// Accumulates the unweighted-by-lambda loss terms over the dataset.
/// `predict_row(i, preds)` must fill one prediction per component
/// (binary components as probabilities).
template <class PredictRow>
inline RawLossTerms accumulate_raw_terms(const FitContext& ctx, PredictRow&& predict_row) {
    const int n_comp = ctx.components();
    RawLossTerms t;
    Vec preds(n_comp);
    for (int i = 0; i < ctx.n_rows; ++i) {
        predict_row(i, preds);
        const double w = ctx.weights[i];
        const auto y = ctx.target_row(i);

        for (int c = 0; c < n_comp; ++c) {
            if (ctx.component_binary[c]) {
                const double p = clamp_probability(preds[c]);
                const double ll = -(y[c] * std::log(p) + (1.0 - y[c]) * std::log(1.0 - p));
                (c == 0 ? t.log_objective : t.log_decisions) += w * ll;
            } else {
                const double e = preds[c] - y[c];
                (c == 0 ? t.sq_objective : t.sq_decisions) += w * e * e;
            }
        }

        double fx = ctx.obj_const[i];
        for (int s = 1; s < n_comp; ++s) fx += ctx.obj_coeff[static_cast<size_t>(i) * (n_comp - 1) + s - 1] * preds[s];
        const double e = preds[0] - fx;
        t.incoherence_objective += w * e * e;

        for (int r = ctx.row_begin[i]; r < ctx.row_begin[i + 1]; ++r) {
            const auto& row = ctx.rows[r];
            double v = row.constant;
            for (int e2 = row.offset; e2 < row.offset + row.len; ++e2)
                v += ctx.entry_coeff[e2] * preds[ctx.entry_comp[e2]];
            if (v > kFeasibilityTolerance) t.incoherence_feasibility += w * v;
        }
    }
    return t;
}

inline void predict_from_beta(const FitContext& ctx, const Mat& beta, int i, Vec& preds) {
    const auto th = ctx.theta_row(i);
    for (int c = 0; c < beta.rows; ++c) {
        const double z = dot(beta.row(c), th);
        preds[c] = ctx.component_binary[c] ? sigmoid(z) : z;
    }
}

inline LossBreakdown assemble_breakdown(const RawLossTerms& t, const LambdaWeights& lambda) {
    LossBreakdown out;
    out.accuracy_squared = t.accuracy_squared();
    out.accuracy_logloss = t.accuracy_logloss();
    out.incoherence_objective = t.incoherence_objective;
    out.incoherence_feasibility = t.incoherence_feasibility;
    out.lambda = lambda;
    out.total = lambda.a1 * out.accuracy_squared + lambda.a2 * out.accuracy_logloss +
                lambda.c1 * out.incoherence_objective + lambda.c2 * out.incoherence_feasibility;
    return out;
}

inline LossBreakdown total_loss(const Mat& beta, const FitContext& ctx, const LambdaWeights& lambda) {
    require(beta.rows == ctx.components() && beta.cols == ctx.n_features, "coefficient matrix shape mismatch");
    const auto terms =
        accumulate_raw_terms(ctx, [&](int i, Vec& preds) { predict_from_beta(ctx, beta, i, preds); });
    return assemble_breakdown(terms, lambda);
}

inline LossBreakdown total_loss(const SurrogateModel& model, const ExplainDataset& ds, const ProblemSpec& spec,
                                const LambdaWeights& lambda) {
    const FitContext ctx = make_fit_context(ds, spec);
    require(model.component_labels == ctx.component_labels, "model layout does not match problem");
    return total_loss(model.beta, ctx, lambda);
}

/// Analytic gradient of the lambda-weighted total loss with respect to
/// every coefficient. At hinge kinks of the feasibility term the
/// subgradient 0 is used; saturated log-loss terms keep the unclamped
/// sigmoid derivative.
inline Mat loss_gradient(const Mat& beta, const FitContext& ctx, const LambdaWeights& lambda) {
    require(beta.rows == ctx.components() && beta.cols == ctx.n_features, "coefficient matrix shape mismatch");
    const int n_comp = ctx.components();
    Mat grad(n_comp, ctx.n_features, 0.0);
    Vec z(n_comp), preds(n_comp), dpred(n_comp), coeff(n_comp);

    for (int i = 0; i < ctx.n_rows; ++i) {
        const auto th = ctx.theta_row(i);
        const auto y = ctx.target_row(i);
        const double w = ctx.weights[i];

        for (int c = 0; c < n_comp; ++c) {
            z[c] = dot(beta.row(c), th);
            if (ctx.component_binary[c]) {
                preds[c] = sigmoid(z[c]);
                dpred[c] = preds[c] * (1.0 - preds[c]);
            } else {
                preds[c] = z[c];
                dpred[c] = 1.0;
            }
        }

        // accumulated d(loss)/d(z_c) per component, then one axpy per component
        std::fill(coeff.begin(), coeff.end(), 0.0);
        for (int c = 0; c < n_comp; ++c) {
            if (ctx.component_binary[c]) {
                coeff[c] += lambda.a2 * w * (preds[c] - y[c]);
            } else {
                coeff[c] += lambda.a1 * w * 2.0 * (preds[c] - y[c]);
            }
        }

        double fx = ctx.obj_const[i];
        for (int s = 1; s < n_comp; ++s) fx += ctx.obj_coeff[static_cast<size_t>(i) * (n_comp - 1) + s - 1] * preds[s];
        const double e = preds[0] - fx;
        coeff[0] += lambda.c1 * w * 2.0 * e * dpred[0];
        for (int s = 1; s < n_comp; ++s)
            coeff[s] -= lambda.c1 * w * 2.0 * e * ctx.obj_coeff[static_cast<size_t>(i) * (n_comp - 1) + s - 1] * dpred[s];

        for (int r = ctx.row_begin[i]; r < ctx.row_begin[i + 1]; ++r) {
            const auto& row = ctx.rows[r];
            double v = row.constant;
            for (int e2 = row.offset; e2 < row.offset + row.len; ++e2)
                v += ctx.entry_coeff[e2] * preds[ctx.entry_comp[e2]];
            if (v > kFeasibilityTolerance) {
                for (int e2 = row.offset; e2 < row.offset + row.len; ++e2) {
                    const int s = ctx.entry_comp[e2];
                    coeff[s] += lambda.c2 * w * ctx.entry_coeff[e2] * dpred[s];
                }
            }
        }

        for (int c = 0; c < n_comp; ++c)
            if (coeff[c] != 0.0) axpy(coeff[c], th, grad.row(c));
    }
    return grad;
}

inline Mat loss_gradient(const SurrogateModel& model, const ExplainDataset& ds, const ProblemSpec& spec,
                         const LambdaWeights& lambda) {
    const FitContext ctx = make_fit_context(ds, spec);
    require(model.component_labels == ctx.component_labels, "model layout does not match problem");
    return loss_gradient(model.beta, ctx, lambda);
}

// ---- independent benchmark fit --------------------------------------------

struct LrFitConfig {
    double ridge_wls_fallback = 1e-8;  // applied only when the normal equations are singular
    double ridge_logistic = 1e-6;      // always applied to the logistic fits
    double logistic_grad_tol = 1e-8;
    int logistic_max_iter = 500;
};

namespace detail {

inline Vec fit_weighted_logistic(const FitContext& ctx, int comp, const LrFitConfig& cfg) {
    const int nf = ctx.n_features;
    Vec beta(nf, 0.0);

    auto loss_at = [&](const Vec& b) {
        double loss = 0.0;
        for (int i = 0; i < ctx.n_rows; ++i) {
            const double z = dot(b, ctx.theta_row(i));
            const double p = clamp_probability(sigmoid(z));
            const double y = ctx.target_row(i)[comp];
            loss -= ctx.weights[i] * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
        for (double v : b) loss += 0.5 * cfg.ridge_logistic * v * v;
        return loss;
    };

    double loss = loss_at(beta);
    Vec grad(nf), step(nf), cand(nf);
    for (int it = 0; it < cfg.logistic_max_iter; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        Mat hess(nf, nf, 0.0);
        for (int i = 0; i < ctx.n_rows; ++i) {
            const auto th = ctx.theta_row(i);
            const double p = sigmoid(dot(beta, th));
            const double y = ctx.target_row(i)[comp];
            const double w = ctx.weights[i];
            axpy(w * (p - y), th, grad);
            const double h = w * p * (1.0 - p);
            for (int a = 0; a < nf; ++a)
                for (int b = a; b < nf; ++b) hess.at(a, b) += h * th[a] * th[b];
        }
        for (int a = 0; a < nf; ++a) {
            grad[a] += cfg.ridge_logistic * beta[a];
            hess.at(a, a) += cfg.ridge_logistic;
            for (int b = 0; b < a; ++b) hess.at(a, b) = hess.at(b, a);
        }
        if (norm2(grad) <= cfg.logistic_grad_tol) break;

        Mat chol = hess;
        if (!cholesky(chol)) {
            chol = hess;
            for (int a = 0; a < nf; ++a) chol.at(a, a) += cfg.ridge_logistic;
            if (!cholesky(chol)) throw contract_error("logistic normal equations not factorizable");
        }
        step = cholesky_solve(chol, grad);

        double t = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int a = 0; a < nf; ++a) cand[a] = beta[a] - t * step[a];
            const double cand_loss = loss_at(cand);
            if (cand_loss <= loss) {
                beta = cand;
                loss = cand_loss;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    return beta;
}

}  // namespace detail

/// Independent per-component fit: weighted least squares for continuous
/// components (ridge fallback on singular normal equations), damped
/// Newton weighted logistic regression for binary components.
inline SurrogateModel fit_benchmark_lr(const FitContext& ctx, const LrFitConfig& cfg = {}) {
    const int nf = ctx.n_features;
    const int n_comp = ctx.components();

    double total_weight = 0.0;
    for (double w : ctx.weights) total_weight += w;
    require(total_weight > 0.0, "dataset has zero total weight");

    SurrogateModel model;
    model.component_labels = ctx.component_labels;
    model.feature_names = ctx.feature_names;
    model.binary_mask = ctx.component_binary;
    model.beta = Mat(n_comp, nf, 0.0);

    bool need_wls = false;
    for (bool b : ctx.component_binary) need_wls |= !b;
    if (need_wls) {
        Mat gram(nf, nf, 0.0);
        for (int i = 0; i < ctx.n_rows; ++i) {
            const auto th = ctx.theta_row(i);
            const double w = ctx.weights[i];
            for (int a = 0; a < nf; ++a)
                for (int b = a; b < nf; ++b) gram.at(a, b) += w * th[a] * th[b];
        }
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < a; ++b) gram.at(a, b) = gram.at(b, a);
        const SpdFactor factor = factor_spd(gram, cfg.ridge_wls_fallback);

        Vec rhs(nf);
        for (int c = 0; c < n_comp; ++c) {
            if (ctx.component_binary[c]) continue;
            std::fill(rhs.begin(), rhs.end(), 0.0);
            for (int i = 0; i < ctx.n_rows; ++i)
                axpy(ctx.weights[i] * ctx.target_row(i)[c], ctx.theta_row(i), rhs);
            const Vec b = cholesky_solve(factor.chol, rhs);
            for (int a = 0; a < nf; ++a) model.beta.at(c, a) = b[a];
        }
    }
    for (int c = 0; c < n_comp; ++c) {
        if (!ctx.component_binary[c]) continue;
        const Vec b = detail::fit_weighted_logistic(ctx, c, cfg);
        for (int a = 0; a < nf; ++a) model.beta.at(c, a) = b[a];
    }
    return model;
}

inline SurrogateModel fit_benchmark_lr(const ExplainDataset& ds, const ProblemSpec& spec,
                                       const LrFitConfig& cfg = {}) {
    return fit_benchmark_lr(make_fit_context(ds, spec), cfg);
}

// ---- loss balancing -------------------------------------------------------

/// Loss-balancing rule: with L_max the largest of the four raw terms,
/// lambda_j = 1 when L_j is the maximum or zero, else 0.5 * L_max / L_j.
inline LambdaWeights balance_rule(double l_a1, double l_a2, double l_c1, double l_c2) {
    const double l_max = std::max(std::max(l_a1, l_a2), std::max(l_c1, l_c2));
    auto rule = [l_max](double l) { return (l == l_max || l == 0.0) ? 1.0 : 0.5 * l_max / l; };
    return {rule(l_a1), rule(l_a2), rule(l_c1), rule(l_c2)};
}

/// Evaluates the four raw loss terms at the benchmark fit and applies
/// the balancing rule.
inline LambdaWeights auto_balance_lambdas(const FitContext& ctx, const SurrogateModel& benchmark) {
    const LossBreakdown raw = total_loss(benchmark.beta, ctx, LambdaWeights{});
    return balance_rule(raw.accuracy_squared, raw.accuracy_logloss, raw.incoherence_objective,
                        raw.incoherence_feasibility);
}

inline LambdaWeights auto_balance_lambdas(const ExplainDataset& ds, const ProblemSpec& spec,
                                          const SurrogateModel& benchmark) {
    return auto_balance_lambdas(make_fit_context(ds, spec), benchmark);
}

// ---- coherent fit ---------------------------------------------------------

namespace detail {

inline Vec wls_fit_row(const FitContext& ctx, const Vec& targets, double ridge_fallback) {
    const int nf = ctx.n_features;
    Mat gram(nf, nf, 0.0);
    Vec rhs(nf, 0.0);
    for (int i = 0; i < ctx.n_rows; ++i) {
        const auto th = ctx.theta_row(i);
        const double w = ctx.weights[i];
        for (int a = 0; a < nf; ++a)
            for (int b = a; b < nf; ++b) gram.at(a, b) += w * th[a] * th[b];
        axpy(w * targets[i], th, rhs);
    }
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < a; ++b) gram.at(a, b) = gram.at(b, a);
    return cholesky_solve(factor_spd(gram, ridge_fallback).chol, rhs);
}

/// Second starting point for the composite minimization: every explained
/// decision predicts its weighted mean regardless of theta, and the
/// objective row is the least-squares fit to the objective of those
/// constant decisions. Constant decisions inherit the feasibility of the
/// sampled solutions under affine constraints, so both coherence terms
/// start near zero.
inline SurrogateModel coherent_anchor(const FitContext& ctx) {
    const int n_comp = ctx.components();
    SurrogateModel model;
    model.component_labels = ctx.component_labels;
    model.feature_names = ctx.feature_names;
    model.binary_mask = ctx.component_binary;
    model.beta = Mat(n_comp, ctx.n_features, 0.0);

    double wsum = 0.0;
    Vec mean(n_comp, 0.0);
    for (int i = 0; i < ctx.n_rows; ++i) {
        wsum += ctx.weights[i];
        for (int c = 1; c < n_comp; ++c) mean[c] += ctx.weights[i] * ctx.target_row(i)[c];
    }
    for (int c = 1; c < n_comp; ++c) {
        const double m = mean[c] / wsum;
        if (ctx.component_binary[c]) {
            const double p = clamp_probability(m);
            model.beta.at(c, 0) = std::log(p / (1.0 - p));
        } else {
            model.beta.at(c, 0) = m;
        }
    }

    Vec anchored_objective(ctx.n_rows);
    Vec preds(n_comp);
    for (int i = 0; i < ctx.n_rows; ++i) {
        predict_from_beta(ctx, model.beta, i, preds);
        double fx = ctx.obj_const[i];
        for (int s = 1; s < n_comp; ++s) fx += ctx.obj_coeff[static_cast<size_t>(i) * (n_comp - 1) + s - 1] * preds[s];
        anchored_objective[i] = fx;
    }
    const Vec beta_f = wls_fit_row(ctx, anchored_objective, 1e-8);
    for (int a = 0; a < ctx.n_features; ++a) model.beta.at(0, a) = beta_f[a];
    return model;
}

}  // namespace detail

struct FitOptions {
    int max_iter = 1000;
    double tol = 1e-8;
    int lbfgs_history = 10;
};

struct FitReport {
    SurrogateModel model;
    int iterations = 0;
    bool converged = false;
    Vec loss_trace;  // total loss at the warm start and every accepted iterate
};

/// Minimizes the lambda-weighted composite loss from the given warm
/// start. A second descent from the coherent-anchor start is accepted
/// only when it strictly beats the warm-start path, so the returned
/// total loss never exceeds the warm start's and the recorded trace of
/// accepted iterates is non-increasing. With binary components the
/// composite is nonconvex and the anchor basin is frequently the better
/// one.
inline FitReport fit_clemo(const FitContext& ctx, const LambdaWeights& lambda, const SurrogateModel& init,
                           const FitOptions& opts = {}) {
    require(init.component_labels == ctx.component_labels, "warm start layout does not match problem");
    require(init.beta.rows == ctx.components() && init.beta.cols == ctx.n_features,
            "warm start shape does not match problem");

    const int n_comp = ctx.components();
    const int nf = ctx.n_features;

    Mat scratch(n_comp, nf);
    auto value = [&](const Vec& x) {
        scratch.a = x;
        return total_loss(scratch, ctx, lambda).total;
    };
    auto gradient = [&](const Vec& x, Vec& grad_out) {
        scratch.a = x;
        grad_out = loss_gradient(scratch, ctx, lambda).a;
    };

    MinimizeOptions mopts;
    mopts.max_iter = opts.max_iter;
    mopts.tol = opts.tol;
    mopts.history = opts.lbfgs_history;
    const MinimizeResult res = minimize_lbfgs(value, gradient, init.beta.a, mopts);

    FitReport report;
    report.model = init;
    report.model.beta.a = res.x;
    report.iterations = res.iterations;
    report.converged = res.converged;
    report.loss_trace = res.trace;

    const MinimizeResult alt = minimize_lbfgs(value, gradient, detail::coherent_anchor(ctx).beta.a, mopts);
    const double current = report.loss_trace.back();
    if (alt.trace.back() < current - 1e-9 * std::max(1.0, std::abs(current))) {
        report.model.beta.a = alt.x;
        report.iterations += alt.iterations + 1;
        report.converged = alt.converged;
        report.loss_trace.push_back(alt.trace.back());
    }
    return report;
}

inline FitReport fit_clemo(const ExplainDataset& ds, const ProblemSpec& spec, const LambdaWeights& lambda,
                           const SurrogateModel& init, const FitOptions& opts = {}) {
    return fit_clemo(make_fit_context(ds, spec), lambda, init, opts);
}

}  // namespace clemo
