#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clemo/clemo.hpp"
#include "test_helpers.hpp"

using namespace clemo;
using Catch::Approx;

namespace {

/// One continuous (or binary) decision, objective = x_1, no constraints.
/// Rows are filled by hand in the tests.
Testbed make_line_testbed(bool binary) {
    Testbed tb;
    tb.kind = "custom";
    ProblemSpec spec;
    spec.p = 1;
    spec.sense = Sense::minimize;
    spec.binary_mask = {binary};
    spec.decision_labels = {"x_1"};
    spec.explained_decisions = {0};
    spec.theta_names = {"t"};
    spec.objective = [](const ParamVector&) { return AffineExpr{{1.0}, 0.0}; };
    spec.constraints = [](const ParamVector&) { return std::vector<SparseAffineExpr>{}; };
    spec.feasible_and_bounded = [](const ParamVector&) { return true; };
    tb.spec = std::move(spec);
    tb.theta0 = {{0.0}, {"t"}};
    tb.solve = [](const ParamVector& theta) {
        SolverRecord rec;
        rec.objective_value = theta.values[0];
        rec.decision.values = {theta.values[0]};
        rec.decision.binary_mask = {false};
        return rec;
    };
    return tb;
}

ExplainDataset hand_dataset(const Testbed& tb, const std::vector<std::pair<Vec, SolverRecord>>& rows,
                            double weight = 1.0) {
    ExplainDataset ds;
    ds.theta_names = tb.spec.theta_names;
    ds.decision_labels = tb.spec.decision_labels;
    ds.binary_mask = tb.spec.binary_mask;
    for (const auto& [theta, rec] : rows) ds.rows.push_back({theta, rec, weight});
    return ds;
}

SolverRecord scalar_record(double f, Vec x, std::vector<bool> mask) {
    SolverRecord rec;
    rec.objective_value = f;
    rec.decision.values = std::move(x);
    rec.decision.binary_mask = std::move(mask);
    return rec;
}

ExplainDataset kp_dataset(int p, int samples, uint64_t seed, const Testbed& tb) {
    SamplerConfig cfg;
    cfg.samples = samples;
    cfg.seed = seed;
    return sample_dataset(tb.spec, tb.solve, tb.theta0, cfg);
}

/// Weight range scaled so the capacity binds for small item counts.
KpGenConfig binding_kp_cfg(int type, int p, uint64_t seed) {
    KpGenConfig cfg;
    cfg.type = type;
    cfg.p = p;
    cfg.seed = seed;
    cfg.w_lo = 1.2 / p;
    cfg.w_hi = 2.0 / p;
    return cfg;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

}  // namespace

TEST_CASE("prediction applies the sigmoid to binary components only") {
    SurrogateModel model;
    model.component_labels = {"f", "x_1"};
    model.feature_names = {"intercept", "t"};
    model.binary_mask = {false, true};
    model.beta = Mat(2, 2, 0.0);

    CHECK(predict(model, {1.0}) == Vec{0.0, 0.5});  // zero rows: affine 0, sigmoid(0)

    model.beta.at(0, 0) = 3.0;
    model.beta.at(0, 1) = 2.0;
    model.beta.at(1, 1) = 10.0;
    const Vec out = predict(model, {1.0});
    CHECK(out[0] == 5.0);
    CHECK(out[1] == Approx(0.9999546).epsilon(1e-5));
    CHECK(out[1] > 0.0);
    CHECK(out[1] < 1.0);
}

TEST_CASE("weighted least squares recovers noiseless linear data exactly") {
    const Testbed tb = make_line_testbed(false);
    const ExplainDataset ds = hand_dataset(tb, {{{1.0}, scalar_record(2.0, {2.0}, {false})},
                                                {{2.0}, scalar_record(4.0, {4.0}, {false})},
                                                {{3.0}, scalar_record(6.0, {6.0}, {false})}});
    const SurrogateModel model = fit_benchmark_lr(ds, tb.spec);
    for (int c = 0; c < 2; ++c) {
        CHECK(model.beta.at(c, 0) == Approx(0.0).margin(1e-9));
        CHECK(model.beta.at(c, 1) == Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("logistic fit with constant-zero targets stays finite and near zero") {
    const Testbed tb = make_line_testbed(true);
    std::vector<std::pair<Vec, SolverRecord>> rows;
    for (int i = 0; i < 40; ++i) rows.push_back({{0.1 * i}, scalar_record(0.0, {0.0}, {true})});
    const ExplainDataset ds = hand_dataset(tb, rows);
    const SurrogateModel model = fit_benchmark_lr(ds, tb.spec);
    for (const auto& row : ds.rows) {
        const double prob = predict(model, row.theta)[1];
        CHECK(std::isfinite(prob));
        CHECK(prob < 0.01);
    }
}

TEST_CASE("duplicated feature columns fall back to the ridge path") {
    Testbed tb = make_line_testbed(false);
    tb.spec.theta_names = {"t", "t_copy"};
    tb.theta0 = {{0.0, 0.0}, {"t", "t_copy"}};
    std::vector<std::pair<Vec, SolverRecord>> rows;
    for (int i = 0; i < 10; ++i) {
        const double t = 0.5 * i;
        rows.push_back({{t, t}, scalar_record(2.0 * t, {2.0 * t}, {false})});
    }
    const ExplainDataset ds = hand_dataset(tb, rows);
    const SurrogateModel model = fit_benchmark_lr(ds, tb.spec);
    for (double b : model.beta.a) CHECK(std::isfinite(b));
    // the unregularized optimum interpolates, so the fitted residual must too
    double sse = 0.0;
    for (const auto& row : ds.rows) {
        const double e = predict(model, row.theta)[0] - row.record.objective_value;
        sse += e * e;
    }
    CHECK(sse <= 1e-6);
}

TEST_CASE("the balancing rule maps raw losses to weights") {
    const LambdaWeights a = balance_rule(10.0, 5.0, 0.0, 2.0);
    CHECK(a.a1 == 1.0);
    CHECK(a.a2 == 1.0);
    CHECK(a.c1 == 1.0);
    CHECK(a.c2 == 2.5);

    const LambdaWeights b = balance_rule(3.0, 3.0, 3.0, 3.0);
    CHECK((b.a1 == 1.0 && b.a2 == 1.0 && b.c1 == 1.0 && b.c2 == 1.0));

    const LambdaWeights c = balance_rule(8.0, 0.0, 0.0, 0.0);
    CHECK((c.a1 == 1.0 && c.a2 == 1.0 && c.c1 == 1.0 && c.c2 == 1.0));
}

TEST_CASE("auto balancing evaluates the raw terms at the benchmark fit") {
    const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(1, 5, 8)));
    const ExplainDataset ds = kp_dataset(5, 120, 3, tb);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    const SurrogateModel bm = fit_benchmark_lr(ctx);
    const LossBreakdown raw = total_loss(bm.beta, ctx, LambdaWeights{});
    const LambdaWeights lambda = auto_balance_lambdas(ctx, bm);
    const LambdaWeights expected = balance_rule(raw.accuracy_squared, raw.accuracy_logloss,
                                                raw.incoherence_objective, raw.incoherence_feasibility);
    CHECK(lambda.a1 == expected.a1);
    CHECK(lambda.a2 == expected.a2);
    CHECK(lambda.c1 == expected.c1);
    CHECK(lambda.c2 == expected.c2);
}

TEST_CASE("an interpolating coherent model has zero loss and zero gradient") {
    const Testbed tb = make_line_testbed(false);
    std::vector<std::pair<Vec, SolverRecord>> rows;
    for (int i = 0; i < 8; ++i) rows.push_back({{0.3 * i}, scalar_record(0.3 * i, {0.3 * i}, {false})});
    const ExplainDataset ds = hand_dataset(tb, rows);
    const FitContext ctx = make_fit_context(ds, tb.spec);

    Mat beta(2, 2, 0.0);  // f = t, x_1 = t
    beta.at(0, 1) = 1.0;
    beta.at(1, 1) = 1.0;
    const LossBreakdown loss = total_loss(beta, ctx, LambdaWeights{});
    CHECK(loss.accuracy_squared == 0.0);
    CHECK(loss.accuracy_logloss == 0.0);
    CHECK(loss.incoherence_objective == 0.0);
    CHECK(loss.incoherence_feasibility == 0.0);
    CHECK(loss.total == 0.0);

    const Mat grad = loss_gradient(beta, ctx, LambdaWeights{});
    for (double g : grad.a) CHECK(g == 0.0);
}

TEST_CASE("feasibility incoherence reproduces the toy constraint violation") {
    const Testbed tb = testing::make_intro_testbed();
    const ExplainDataset ds = hand_dataset(tb, {{{4.1}, tb.solve(tb.theta0)}});
    const FitContext ctx = make_fit_context(ds, tb.spec);

    Mat beta(3, 2, 0.0);     // rows: f, x_1, x_2
    beta.at(1, 1) = 0.11;    // x_1 = 0.11 a
    beta.at(2, 1) = 0.59;    // x_2 = 0.59 a
    const LossBreakdown loss = total_loss(beta, ctx, LambdaWeights{});
    CHECK(loss.incoherence_feasibility == Approx(1.7219).epsilon(1e-9));
}

TEST_CASE("log-loss of an indifferent prediction is ln 2") {
    const Testbed tb = make_line_testbed(true);
    const ExplainDataset ds = hand_dataset(tb, {{{1.0}, scalar_record(1.0, {1.0}, {true})}});
    const FitContext ctx = make_fit_context(ds, tb.spec);
    const Mat beta(2, 2, 0.0);  // sigma(0) = 0.5 for the binary component
    const LossBreakdown loss = total_loss(beta, ctx, LambdaWeights{});
    CHECK(loss.accuracy_logloss == Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("the stored total matches the lambda-weighted sum of terms") {
    const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(2, 4, 5)));
    const ExplainDataset ds = kp_dataset(4, 60, 9, tb);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        Mat beta(ctx.components(), ctx.n_features);
        for (auto& b : beta.a) b = rng.uniform(-0.5, 0.5);
        const LambdaWeights lambda{rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0),
                                   rng.uniform(0.0, 3.0)};
        const LossBreakdown loss = total_loss(beta, ctx, lambda);
        const double recomputed = lambda.a1 * loss.accuracy_squared + lambda.a2 * loss.accuracy_logloss +
                                  lambda.c1 * loss.incoherence_objective + lambda.c2 * loss.incoherence_feasibility;
        CHECK(loss.total == Approx(recomputed).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        const int p = 2 + static_cast<int>(rng.next_u64() % 2);  // 2..3
        const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(1, p, 1000 + rep)));
        const ExplainDataset ds = kp_dataset(p, 10, 50 + rep, tb);
        const FitContext ctx = make_fit_context(ds, tb.spec);
        const LambdaWeights lambda{rng.uniform(0.2, 2.0), 0.0, rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)};

        // keep the probe away from hinge kinks so the finite differences
        // see a smooth function
        Mat beta(ctx.components(), ctx.n_features);
        bool safe = false;
        for (int attempt = 0; attempt < 100 && !safe; ++attempt) {
            for (auto& b : beta.a) b = rng.uniform(-0.4, 0.4);
            safe = true;
            Vec preds(ctx.components());
            for (int i = 0; i < ctx.n_rows && safe; ++i) {
                predict_from_beta(ctx, beta, i, preds);
                for (int r = ctx.row_begin[i]; r < ctx.row_begin[i + 1] && safe; ++r) {
                    double v = ctx.rows[r].constant;
                    for (int e = ctx.rows[r].offset; e < ctx.rows[r].offset + ctx.rows[r].len; ++e)
                        v += ctx.entry_coeff[e] * preds[ctx.entry_comp[e]];
                    if (std::abs(v) < 1e-4) safe = false;
                }
            }
        }
        REQUIRE(safe);

        const Mat analytic = loss_gradient(beta, ctx, lambda);
        const double h = 1e-6;
        double worst = 0.0;
        for (size_t k = 0; k < beta.a.size(); ++k) {
            Mat lo = beta, hi = beta;
            lo.a[k] -= h;
            hi.a[k] += h;
            const double fd = (total_loss(hi, ctx, lambda).total - total_loss(lo, ctx, lambda).total) / (2.0 * h);
            worst = std::max(worst, std::abs(analytic.a[k] - fd) / (1.0 + std::abs(fd)));
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("pure squared-accuracy gradient matches the hand formula") {
    const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(1, 3, 77)));
    const ExplainDataset ds = kp_dataset(3, 15, 4, tb);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    Rng rng(7);
    Mat beta(ctx.components(), ctx.n_features);
    for (auto& b : beta.a) b = rng.uniform(-0.3, 0.3);

    const Mat grad = loss_gradient(beta, ctx, LambdaWeights{1.0, 0.0, 0.0, 0.0});
    Mat expected(ctx.components(), ctx.n_features, 0.0);
    for (int i = 0; i < ctx.n_rows; ++i) {
        const auto th = ctx.theta_row(i);
        for (int c = 0; c < ctx.components(); ++c) {
            const double resid = dot(beta.row(c), th) - ctx.target_row(i)[c];
            for (int a = 0; a < ctx.n_features; ++a)
                expected.at(c, a) += ctx.weights[i] * 2.0 * resid * th[a];
        }
    }
    CHECK(max_abs_diff(grad, expected) <= 1e-12);
}

TEST_CASE("pure accuracy minimization reproduces the closed-form fit") {
    const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(1, 4, 12)));
    const ExplainDataset ds = kp_dataset(4, 80, 6, tb);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    const SurrogateModel wls = fit_benchmark_lr(ctx);
    const LambdaWeights lambda{1.0, 0.0, 0.0, 0.0};
    const double closed_form = total_loss(wls.beta, ctx, lambda).total;

    SurrogateModel init = wls;
    for (auto& b : init.beta.a) b += 0.05;  // start somewhere off the optimum
    const FitReport report = fit_clemo(ctx, lambda, init);
    const double fitted = total_loss(report.model.beta, ctx, lambda).total;
    CHECK(fitted <= closed_form * (1.0 + 1e-6) + 1e-12);
    CHECK(fitted >= closed_form * (1.0 - 1e-6) - 1e-12);
}

TEST_CASE("a stationary warm start terminates immediately") {
    Testbed tb = testing::make_intro_testbed();
    SamplerConfig cfg;
    cfg.samples = 5;
    cfg.spread = 0.0;
    const ExplainDataset ds = sample_dataset(tb.spec, tb.solve, tb.theta0, cfg);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    const SurrogateModel init = fit_benchmark_lr(ctx);
    const FitReport report = fit_clemo(ctx, LambdaWeights{}, init);
    CHECK(report.iterations <= 2);
    CHECK(report.converged);
    CHECK(max_abs_diff(report.model.beta, init.beta) <= 1e-4);
}

TEST_CASE("the coherent fit reduces feasibility incoherence on a knapsack run") {
    const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(1, 8, 20)));
    const ExplainDataset ds = kp_dataset(8, 250, 21, tb);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    const SurrogateModel bm = fit_benchmark_lr(ctx);
    const LambdaWeights lambda = auto_balance_lambdas(ctx, bm);
    const FitReport report = fit_clemo(ctx, lambda, bm);

    const LossBreakdown before = total_loss(bm.beta, ctx, lambda);
    const LossBreakdown after = total_loss(report.model.beta, ctx, lambda);
    CHECK(after.total <= before.total);
    CHECK(after.incoherence_feasibility < before.incoherence_feasibility);
}

TEST_CASE("warm-start dominance and a non-increasing trace hold on every testbed") {
    const auto check = [](const Testbed& tb, const ExplainDataset& ds) {
        const FitContext ctx = make_fit_context(ds, tb.spec);
        const SurrogateModel bm = fit_benchmark_lr(ctx);
        const LambdaWeights lambda = auto_balance_lambdas(ctx, bm);
        const FitReport report = fit_clemo(ctx, lambda, bm, {.max_iter = 200});
        CHECK(total_loss(report.model.beta, ctx, lambda).total <= total_loss(bm.beta, ctx, lambda).total);
        REQUIRE(!report.loss_trace.empty());
        for (size_t k = 1; k < report.loss_trace.size(); ++k)
            CHECK(report.loss_trace[k] <= report.loss_trace[k - 1]);
        CHECK(report.loss_trace.front() == Approx(total_loss(bm.beta, ctx, lambda).total).epsilon(1e-12));
        CHECK(report.loss_trace.back() == Approx(total_loss(report.model.beta, ctx, lambda).total).epsilon(1e-12));
    };

    const Testbed kp = make_kp_testbed(gen_kp(binding_kp_cfg(3, 5, 2)));
    check(kp, kp_dataset(5, 120, 13, kp));

    const Testbed spp = make_spp_testbed(default_spp_instance());
    SamplerConfig cfg;
    cfg.samples = 100;
    cfg.seed = 19;
    cfg.distribution = SamplerConfig::Distribution::uniform_interval;
    check(spp, sample_dataset(spp.spec, spp.solve, spp.theta0, cfg));
}

TEST_CASE("continuous composite losses are midpoint convex") {
    const Testbed tb = make_kp_testbed(gen_kp(binding_kp_cfg(1, 4, 30)));
    const ExplainDataset ds = kp_dataset(4, 50, 31, tb);
    const FitContext ctx = make_fit_context(ds, tb.spec);
    Rng rng(71);
    for (int rep = 0; rep < 1000; ++rep) {
        Mat b1(ctx.components(), ctx.n_features), b2(ctx.components(), ctx.n_features),
            mid(ctx.components(), ctx.n_features);
        const double t = rng.uniform01();
        const LambdaWeights lambda{rng.uniform(0.0, 2.0), 0.0, rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
        for (size_t k = 0; k < b1.a.size(); ++k) {
            b1.a[k] = rng.uniform(-1.0, 1.0);
            b2.a[k] = rng.uniform(-1.0, 1.0);
            mid.a[k] = t * b1.a[k] + (1.0 - t) * b2.a[k];
        }
        const double lhs = total_loss(mid, ctx, lambda).total;
        const double rhs = t * total_loss(b1, ctx, lambda).total + (1.0 - t) * total_loss(b2, ctx, lambda).total;
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_CASE("independent fits are objective-coherent when the objective is fixed") {
    Rng rng(91);
    for (int rep = 0; rep < 5; ++rep) {
        const KpInstance inst = gen_kp(binding_kp_cfg(1, 8, 400 + rep));
        const Testbed tb = make_kp_testbed(inst, KpThetaMode::weights_only);
        SamplerConfig cfg;
        cfg.samples = 60;
        cfg.seed = 500 + rep;
        const ExplainDataset ds = sample_dataset(tb.spec, tb.solve, tb.theta0, cfg);
        const SurrogateModel model = fit_benchmark_lr(ds, tb.spec);

        for (int probe = 0; probe < 100; ++probe) {
            Vec theta(tb.theta0.values);
            for (auto& t : theta) t *= 1.0 + rng.uniform(-0.25, 0.25);
            const Vec preds = predict(model, theta);
            double combined = 0.0;
            for (int j = 0; j < inst.p(); ++j) combined += inst.values[j] * preds[j + 1];
            CHECK(std::abs(preds[0] - combined) / (1.0 + std::abs(preds[0])) <= 1e-8);
        }
    }
}
