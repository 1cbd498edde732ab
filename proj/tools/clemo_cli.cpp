// Command-line harness: explain a single instance, reproduce the
// knapsack benchmark table, run stability studies over resampled
// datasets, and measure fitting runtimes. All artifacts are
// reproducible from (config, seed); only the timing columns of the
// runtime command vary between runs.

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "clemo/clemo.hpp"

namespace fs = std::filesystem;
using namespace clemo;

namespace {

struct Options {
    std::string problem = "kp";
    std::string instance_path;
    std::string methods_csv = "lr,clemo";
    std::string out = "clemo-out";
    int samples = 1000;
    uint64_t seed = 0;
    int jobs = 1;
    double tol = 1e-8;
    int max_iter = 1000;

    std::string sampling = "auto";  // auto | gaussian | uniform
    double spread = 0.2;
    double uniform_lo = -1.0;
    double uniform_hi = 1.0;

    int kp_type = 1;
    int kp_items = 25;
    double kp_w_lo = 0.02;
    double kp_w_hi = 0.14;

    int cvrp_clients = 16;
    int cvrp_vehicles = 4;
    double cvrp_capacity = 25.0;
    bool cvrp_asymmetric = false;
    int budget = 1000;

    std::optional<double> lambda_a1, lambda_a2, lambda_c1, lambda_c2;

    int resamples = 10;
    int seed_stride = 1;
    int instances_per_type = 10;
    std::string contribution = "auto";  // auto | effect | coefficient
};

std::vector<std::string> parse_methods(const std::string& csv) {
    std::vector<std::string> methods;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item != "lr" && item != "dtr" && item != "clemo")
            throw contract_error("unknown method '" + item + "', expected lr, dtr or clemo");
        if (std::find(methods.begin(), methods.end(), item) == methods.end()) methods.push_back(item);
    }
    require(!methods.empty(), "at least one method is required");
    return methods;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct LoadedProblem {
    Testbed tb;
    json instance_json;
    json generator_manifest;
};

LoadedProblem load_problem(const Options& opt) {
    LoadedProblem lp;
    if (!opt.instance_path.empty()) {
        const json j = load_json_file(opt.instance_path);
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "kp") {
            lp.tb = make_kp_testbed(kp_from_json(j));
        } else if (kind == "spp") {
            lp.tb = make_spp_testbed(spp_from_json(j));
        } else if (kind == "cvrp") {
            lp.tb = make_cvrp_testbed(cvrp_from_json(j), opt.budget, !opt.cvrp_asymmetric);
        } else {
            throw contract_error("unknown instance kind '" + kind + "'");
        }
        lp.instance_json = j;
        lp.generator_manifest = {{"source", "file"}, {"path", opt.instance_path}};
        return lp;
    }

    if (opt.problem == "kp") {
        const KpGenConfig cfg{opt.kp_type, opt.kp_items, opt.seed, opt.kp_w_lo, opt.kp_w_hi, 0.02};
        const KpInstance inst = gen_kp(cfg);
        lp.tb = make_kp_testbed(inst);
        lp.instance_json = to_json(inst);
        lp.generator_manifest = {{"source", "generated"},
                                 {"kp_type", cfg.type},
                                 {"items", cfg.p},
                                 {"seed", cfg.seed},
                                 {"w_lo", cfg.w_lo},
                                 {"w_hi", cfg.w_hi}};
    } else if (opt.problem == "spp") {
        const SppInstance inst = default_spp_instance();
        lp.tb = make_spp_testbed(inst);
        lp.instance_json = to_json(inst);
        lp.generator_manifest = {{"source", "builtin-default"}};
    } else if (opt.problem == "cvrp") {
        CvrpGenConfig cfg;
        cfg.clients = opt.cvrp_clients;
        cfg.vehicles = opt.cvrp_vehicles;
        cfg.capacity = opt.cvrp_capacity;
        cfg.seed = opt.seed;
        const CvrpInstance inst = gen_cvrp(cfg);
        lp.tb = make_cvrp_testbed(inst, opt.budget, !opt.cvrp_asymmetric);
        lp.instance_json = to_json(inst);
        lp.generator_manifest = {{"source", "generated"}, {"clients", cfg.clients}, {"vehicles", cfg.vehicles},
                                 {"capacity", cfg.capacity}, {"seed", cfg.seed}};
    } else {
        throw contract_error("unknown problem '" + opt.problem + "', expected spp, kp or cvrp");
    }
    return lp;
}

SamplerConfig make_sampler_config(const Options& opt, const std::string& kind, uint64_t seed) {
    SamplerConfig cfg;
    cfg.samples = opt.samples;
    cfg.seed = seed;
    cfg.spread = opt.spread;
    cfg.uniform_lo = opt.uniform_lo;
    cfg.uniform_hi = opt.uniform_hi;
    const bool uniform = opt.sampling == "uniform" || (opt.sampling == "auto" && kind == "spp");
    cfg.distribution =
        uniform ? SamplerConfig::Distribution::uniform_interval : SamplerConfig::Distribution::gaussian;
    return cfg;
}

ContributionKind pick_contribution_kind(const Options& opt, const Vec& theta0) {
    if (opt.contribution == "effect") return ContributionKind::effect;
    if (opt.contribution == "coefficient") return ContributionKind::coefficient;
    // auto: effects degenerate to an empty ranking when theta0 is all zero
    for (double t : theta0)
        if (t != 0.0) return ContributionKind::effect;
    return ContributionKind::coefficient;
}

struct FittedMethods {
    std::optional<SurrogateModel> lr;
    std::optional<DtrModel> dtr;
    std::optional<FitReport> clemo;
    LambdaWeights lambda;
};

FittedMethods fit_methods(const FitContext& ctx, const std::vector<std::string>& methods, const Options& opt) {
    FittedMethods out;
    const bool want_clemo = std::find(methods.begin(), methods.end(), "clemo") != methods.end();
    const bool want_lr = std::find(methods.begin(), methods.end(), "lr") != methods.end();
    const bool want_dtr = std::find(methods.begin(), methods.end(), "dtr") != methods.end();

    if (want_lr || want_clemo) out.lr = fit_benchmark_lr(ctx);
    if (want_dtr) out.dtr = fit_benchmark_dtr(ctx);
    if (want_clemo) {
        out.lambda = auto_balance_lambdas(ctx, *out.lr);
        if (opt.lambda_a1) out.lambda.a1 = *opt.lambda_a1;
        if (opt.lambda_a2) out.lambda.a2 = *opt.lambda_a2;
        if (opt.lambda_c1) out.lambda.c1 = *opt.lambda_c1;
        if (opt.lambda_c2) out.lambda.c2 = *opt.lambda_c2;
        FitOptions fopts;
        fopts.max_iter = opt.max_iter;
        fopts.tol = opt.tol;
        out.clemo = fit_clemo(ctx, out.lambda, *out.lr, fopts);
    }
    return out;
}

std::vector<MethodPredictor> predictors_in_order(const FittedMethods& fitted,
                                                 const std::vector<std::string>& methods) {
    std::vector<MethodPredictor> out;
    for (const auto& m : methods) {
        if (m == "lr") out.push_back(make_predictor(*fitted.lr, "lr"));
        if (m == "dtr") out.push_back(make_predictor(*fitted.dtr, "dtr"));
        if (m == "clemo") out.push_back(make_predictor(fitted.clemo->model, "clemo"));
    }
    return out;
}

json sampler_manifest(const SamplerConfig& cfg) {
    return {{"samples", cfg.samples},
            {"seed", cfg.seed},
            {"distribution",
             cfg.distribution == SamplerConfig::Distribution::gaussian ? "gaussian" : "uniform_interval"},
            {"spread", cfg.spread},
            {"uniform_lo", cfg.uniform_lo},
            {"uniform_hi", cfg.uniform_hi}};
}

json options_manifest(const Options& opt, const std::vector<std::string>& methods) {
    json j{{"methods", methods}, {"seed", opt.seed},       {"samples", opt.samples},
           {"tol", opt.tol},     {"max_iter", opt.max_iter}};
    if (opt.lambda_a1) j["lambda_a1"] = *opt.lambda_a1;
    if (opt.lambda_a2) j["lambda_a2"] = *opt.lambda_a2;
    if (opt.lambda_c1) j["lambda_c1"] = *opt.lambda_c1;
    if (opt.lambda_c2) j["lambda_c2"] = *opt.lambda_c2;
    return j;
}

void write_contributions(const fs::path& out, const std::string& method, const FitContext& ctx,
                         const std::vector<std::vector<Contribution>>& contributions) {
    const std::vector<std::string> theta_names(ctx.feature_names.begin() + 1, ctx.feature_names.end());
    save_json_file((out / ("contributions_" + method + ".json")).string(),
                   contributions_to_json(ctx.component_labels, theta_names, contributions));
}

int cmd_explain(const Options& opt) {
    const std::vector<std::string> methods = parse_methods(opt.methods_csv);
    const LoadedProblem lp = load_problem(opt);
    const fs::path out(opt.out);
    fs::create_directories(out);

    const SamplerConfig scfg = make_sampler_config(opt, lp.tb.kind, opt.seed);
    const ExplainDataset ds = sample_dataset(lp.tb.spec, lp.tb.solve, lp.tb.theta0, scfg);

    save_json_file((out / "instance.json").string(), lp.instance_json);
    json manifest = options_manifest(opt, methods);
    manifest["command"] = "explain";
    manifest["problem"] = lp.tb.kind;
    manifest["instance"] = lp.generator_manifest;
    manifest["sampling"] = sampler_manifest(scfg);
    save_json_file((out / "manifest.json").string(), manifest);
    save_dataset_csv(ds, (out / "dataset.csv").string());

    // present-problem solution with a readable route sidecar for routing
    json solution{{"objective", ds.rows[0].record.objective_value}};
    if (lp.tb.kind == "cvrp") {
        const int n = lp.instance_json.at("clients").get<int>();
        solution["routes"] = cvrp_decode_routes(n, ds.rows[0].record.decision);
    }
    save_json_file((out / "solution.json").string(), solution);

    const FitContext ctx = make_fit_context(ds, lp.tb.spec);
    const FittedMethods fitted = fit_methods(ctx, methods, opt);
    const ContributionKind ckind = pick_contribution_kind(opt, lp.tb.theta0.values);

    for (const auto& m : methods) {
        if (m == "lr") {
            save_json_file((out / "model_lr.json").string(), to_json(*fitted.lr));
            write_contributions(out, "lr", ctx, feature_contributions(*fitted.lr, lp.tb.theta0.values, ckind));
        } else if (m == "dtr") {
            save_json_file((out / "model_dtr.json").string(), to_json(*fitted.dtr));
            write_contributions(out, "dtr", ctx, feature_contributions(*fitted.dtr));
        } else {
            save_json_file((out / "model_clemo.json").string(), to_json(fitted.clemo->model));
            write_contributions(out, "clemo", ctx,
                                feature_contributions(fitted.clemo->model, lp.tb.theta0.values, ckind));
            write_text_file((out / "clemo_trace.csv").string(), loss_trace_csv(fitted.clemo->loss_trace));
            json loss = to_json(total_loss(fitted.clemo->model.beta, ctx, fitted.lambda));
            loss["iterations"] = fitted.clemo->iterations;
            loss["converged"] = fitted.clemo->converged;
            save_json_file((out / "clemo_loss.json").string(), loss);
        }
    }

    const EvaluationReport report = evaluate(predictors_in_order(fitted, methods), ctx);
    write_text_file((out / "report.csv").string(), evaluation_report_csv(report));
    save_json_file((out / "report.json").string(), to_json(report));
    return 0;
}

int cmd_benchmark_kp(const Options& opt) {
    const std::vector<std::string> methods = parse_methods(opt.methods_csv);
    const fs::path out(opt.out);
    fs::create_directories(out);

    std::vector<int> types;
    if (opt.kp_type == 0) {
        types = {1, 2, 3, 4};
    } else {
        types = {opt.kp_type};
    }
    const int per_type = opt.instances_per_type;
    const int n_tasks = static_cast<int>(types.size()) * per_type;
    std::vector<EvaluationReport> reports(n_tasks);

    parallel_for(n_tasks, opt.jobs, [&](int task) {
        const int type = types[task / per_type];
        const int index = task % per_type;
        const uint64_t inst_seed = opt.seed + 1000ULL * type + index;
        const KpGenConfig gcfg{type, opt.kp_items, inst_seed, opt.kp_w_lo, opt.kp_w_hi, 0.02};
        const Testbed tb = make_kp_testbed(gen_kp(gcfg));
        const SamplerConfig scfg = make_sampler_config(opt, tb.kind, inst_seed + 777);
        const ExplainDataset ds = sample_dataset(tb.spec, tb.solve, tb.theta0, scfg);
        const FitContext ctx = make_fit_context(ds, tb.spec);
        const FittedMethods fitted = fit_methods(ctx, methods, opt);
        reports[task] = evaluate(predictors_in_order(fitted, methods), ctx);
    });

    // per-instance audit rows plus the aggregated table
    std::string detail = "type,instance,method,accuracy_objective,accuracy_decisions,incoherence_objective,"
                         "incoherence_feasibility\n";
    std::string summary = "type,method,accuracy_mu,accuracy_sigma,accuracy_objective_mu,accuracy_objective_sigma,"
                          "accuracy_decisions_mu,accuracy_decisions_sigma,incoherence_objective_mu,"
                          "incoherence_objective_sigma,incoherence_feasibility_mu,incoherence_feasibility_sigma\n";
    for (size_t t = 0; t < types.size(); ++t) {
        for (size_t m = 0; m < methods.size(); ++m) {
            Vec acc, acc_obj, acc_dec, inc_obj, inc_feas;
            for (int k = 0; k < per_type; ++k) {
                const auto& row = reports[t * per_type + k].rows[m];
                detail += std::to_string(types[t]) + "," + std::to_string(k) + "," + row.method + "," +
                          format_double(row.accuracy_objective) + "," + format_double(row.accuracy_decisions) + "," +
                          format_double(row.incoherence_objective) + "," +
                          format_double(row.incoherence_feasibility) + "\n";
                acc.push_back(row.accuracy_objective + row.accuracy_decisions);
                acc_obj.push_back(row.accuracy_objective);
                acc_dec.push_back(row.accuracy_decisions);
                inc_obj.push_back(row.incoherence_objective);
                inc_feas.push_back(row.incoherence_feasibility);
            }
            const auto stats = [](const Vec& v) {
                double mu = 0.0;
                for (double x : v) mu += x;
                mu /= static_cast<double>(v.size());
                double var = 0.0;
                for (double x : v) var += (x - mu) * (x - mu);
                return std::make_pair(mu, std::sqrt(var / static_cast<double>(v.size())));
            };
            const auto [acc_mu, acc_sd] = stats(acc);
            const auto [ao_mu, ao_sd] = stats(acc_obj);
            const auto [ad_mu, ad_sd] = stats(acc_dec);
            const auto [io_mu, io_sd] = stats(inc_obj);
            const auto [if_mu, if_sd] = stats(inc_feas);
            summary += std::to_string(types[t]) + "," + methods[m] + "," + format_double(acc_mu) + "," +
                       format_double(acc_sd) + "," + format_double(ao_mu) + "," + format_double(ao_sd) + "," +
                       format_double(ad_mu) + "," + format_double(ad_sd) + "," + format_double(io_mu) + "," +
                       format_double(io_sd) + "," + format_double(if_mu) + "," + format_double(if_sd) + "\n";
        }
    }
    write_text_file((out / "benchmark_kp.csv").string(), summary);
    write_text_file((out / "benchmark_kp_instances.csv").string(), detail);

    json manifest = options_manifest(opt, methods);
    manifest["command"] = "benchmark-kp";
    manifest["types"] = types;
    manifest["instances_per_type"] = per_type;
    manifest["items"] = opt.kp_items;
    manifest["w_lo"] = opt.kp_w_lo;
    manifest["w_hi"] = opt.kp_w_hi;
    save_json_file((out / "manifest.json").string(), manifest);
    return 0;
}

int cmd_stability(const Options& opt) {
    require(opt.resamples >= 2, "stability needs at least two resamples");
    const std::vector<std::string> methods = parse_methods(opt.methods_csv);
    const LoadedProblem lp = load_problem(opt);
    const fs::path out(opt.out);
    fs::create_directories(out / "models");

    const int R = opt.resamples;
    std::vector<FittedMethods> fits(R);
    parallel_for(R, opt.jobs, [&](int r) {
        const uint64_t data_seed = opt.seed + 1 + static_cast<uint64_t>(r) * opt.seed_stride;
        const SamplerConfig scfg = make_sampler_config(opt, lp.tb.kind, data_seed);
        const ExplainDataset ds = sample_dataset(lp.tb.spec, lp.tb.solve, lp.tb.theta0, scfg);
        const FitContext ctx = make_fit_context(ds, lp.tb.spec);
        fits[r] = fit_methods(ctx, methods, opt);
    });

    const ContributionKind ckind = pick_contribution_kind(opt, lp.tb.theta0.values);
    std::string csv = "method,std,normalized_std,fsi\n";
    json all = json::object();
    for (const auto& m : methods) {
        std::vector<std::vector<std::vector<Contribution>>> contributions;
        for (int r = 0; r < R; ++r) {
            if (m == "lr") {
                contributions.push_back(feature_contributions(*fits[r].lr, lp.tb.theta0.values, ckind));
                save_json_file((out / "models" / ("lr_r" + std::to_string(r) + ".json")).string(),
                               to_json(*fits[r].lr));
            } else if (m == "dtr") {
                contributions.push_back(feature_contributions(*fits[r].dtr));
                save_json_file((out / "models" / ("dtr_r" + std::to_string(r) + ".json")).string(),
                               to_json(*fits[r].dtr));
            } else {
                contributions.push_back(feature_contributions(fits[r].clemo->model, lp.tb.theta0.values, ckind));
                save_json_file((out / "models" / ("clemo_r" + std::to_string(r) + ".json")).string(),
                               to_json(fits[r].clemo->model));
            }
        }
        const StabilityReport report = stability_from_contributions(contributions);
        csv += m + "," + format_double(report.std_dev) + "," + format_double(report.normalized_std) + "," +
               format_double(report.fsi) + "\n";
        all[m] = to_json(report);
    }
    write_text_file((out / "stability.csv").string(), csv);
    save_json_file((out / "stability.json").string(), all);

    json manifest = options_manifest(opt, methods);
    manifest["command"] = "stability";
    manifest["problem"] = lp.tb.kind;
    manifest["instance"] = lp.generator_manifest;
    manifest["resamples"] = R;
    manifest["seed_stride"] = opt.seed_stride;
    save_json_file((out / "manifest.json").string(), manifest);
    return 0;
}

int cmd_runtime(const Options& opt) {
    const fs::path out(opt.out);
    fs::create_directories(out);

    const std::vector<int> sizes{5, 10, 20, 40};
    std::string csv = "items,features,dtr_seconds,lr_seconds,clemo_seconds,clemo_iterations\n";
    using clock = std::chrono::steady_clock;
    const auto seconds = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };

    for (int p : sizes) {
        // weight range scaled so the capacity stays active at every size
        const KpGenConfig gcfg{opt.kp_type, p, opt.seed + static_cast<uint64_t>(p), 1.2 / p, 2.0 / p, 0.02};
        const Testbed tb = make_kp_testbed(gen_kp(gcfg));
        const SamplerConfig scfg = make_sampler_config(opt, tb.kind, opt.seed + 91);
        const ExplainDataset ds = sample_dataset(tb.spec, tb.solve, tb.theta0, scfg);
        const FitContext ctx = make_fit_context(ds, tb.spec);

        const auto t0 = clock::now();
        const DtrModel dtr = fit_benchmark_dtr(ctx);
        const auto t1 = clock::now();
        const SurrogateModel lr = fit_benchmark_lr(ctx);
        const auto t2 = clock::now();
        const LambdaWeights lambda = auto_balance_lambdas(ctx, lr);
        FitOptions fopts;
        fopts.max_iter = opt.max_iter;
        fopts.tol = opt.tol;
        const FitReport clemo = fit_clemo(ctx, lambda, lr, fopts);
        const auto t3 = clock::now();
        (void)dtr;

        csv += std::to_string(p) + "," + std::to_string(2 * p) + "," + format_double(seconds(t0, t1)) + "," +
               format_double(seconds(t1, t2)) + "," + format_double(seconds(t2, t3)) + "," +
               std::to_string(clemo.iterations) + "\n";
        write_text_file((out / ("trace_kp" + std::to_string(p) + ".csv")).string(),
                        loss_trace_csv(clemo.loss_trace));
    }
    write_text_file((out / "runtime.csv").string(), csv);

    json manifest = options_manifest(opt, {"dtr", "lr", "clemo"});
    manifest["command"] = "runtime";
    manifest["sizes"] = sizes;
    save_json_file((out / "manifest.json").string(), manifest);
    return 0;
}

void add_common_options(CLI::App* cmd, Options& opt, bool with_problem = true) {
    if (with_problem) {
        cmd->add_option("--problem", opt.problem, "problem family: spp, kp or cvrp")
            ->check(CLI::IsMember({"spp", "kp", "cvrp"}));
        cmd->add_option("--instance", opt.instance_path, "instance JSON file (overrides the generator)");
    }
    cmd->add_option("--samples", opt.samples, "perturbations per dataset");
    cmd->add_option("--seed", opt.seed, "base RNG seed");
    cmd->add_option("--methods", opt.methods_csv, "comma-separated subset of lr,dtr,clemo");
    cmd->add_option("--out", opt.out, "output directory");
    cmd->add_option("--jobs", opt.jobs, "worker cap for parallel sections")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", opt.tol, "relative improvement stopping threshold");
    cmd->add_option("--max-iter", opt.max_iter, "iteration cap for the coherent fit");
    cmd->add_option("--lambda-a1", opt.lambda_a1, "override the squared-accuracy weight");
    cmd->add_option("--lambda-a2", opt.lambda_a2, "override the log-loss accuracy weight");
    cmd->add_option("--lambda-c1", opt.lambda_c1, "override the objective-coherence weight");
    cmd->add_option("--lambda-c2", opt.lambda_c2, "override the feasibility-coherence weight");
    cmd->add_option("--sampling", opt.sampling, "sampling distribution: auto, gaussian or uniform")
        ->check(CLI::IsMember({"auto", "gaussian", "uniform"}));
    cmd->add_option("--spread", opt.spread, "gaussian spread factor");
    cmd->add_option("--uniform-lo", opt.uniform_lo, "uniform sampling lower bound");
    cmd->add_option("--uniform-hi", opt.uniform_hi, "uniform sampling upper bound");
    cmd->add_option("--kp-type", opt.kp_type, "knapsack family 1..4 (0 = all, benchmark only)")
        ->check(CLI::Range(0, 4));
    cmd->add_option("--kp-items", opt.kp_items, "knapsack item count");
    cmd->add_option("--kp-w-lo", opt.kp_w_lo, "knapsack weight range lower bound");
    cmd->add_option("--kp-w-hi", opt.kp_w_hi, "knapsack weight range upper bound");
    cmd->add_option("--cvrp-clients", opt.cvrp_clients, "routing client count");
    cmd->add_option("--cvrp-vehicles", opt.cvrp_vehicles, "routing vehicle count");
    cmd->add_option("--cvrp-capacity", opt.cvrp_capacity, "routing vehicle capacity");
    cmd->add_flag("--cvrp-asymmetric", opt.cvrp_asymmetric,
                  "perturb only client-to-depot arcs instead of both directions");
    cmd->add_option("--budget", opt.budget, "routing local-search sweep budget");
    cmd->add_option("--contribution", opt.contribution, "feature contribution definition")
        ->check(CLI::IsMember({"auto", "effect", "coefficient"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent local explanations for optimization solvers"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* explain = app.add_subcommand("explain", "fit and evaluate explanations for one instance");
    add_common_options(explain, opt);

    Options bench_opt;
    bench_opt.methods_csv = "dtr,lr,clemo";
    bench_opt.kp_type = 0;
    CLI::App* bench = app.add_subcommand("benchmark-kp", "aggregate explanation quality over knapsack instances");
    add_common_options(bench, bench_opt, false);
    bench->add_option("--instances-per-type", bench_opt.instances_per_type, "instances per knapsack family")
        ->check(CLI::PositiveNumber);

    Options stab_opt;
    CLI::App* stab = app.add_subcommand("stability", "stability of explanations over resampled datasets");
    add_common_options(stab, stab_opt);
    stab->add_option("--resamples", stab_opt.resamples, "number of resampled datasets");
    stab->add_option("--seed-stride", stab_opt.seed_stride,
                     "stride between resample seeds (0 repeats one dataset)");

    Options rt_opt;
    CLI::App* rt = app.add_subcommand("runtime", "fitting runtimes over growing knapsack sizes");
    add_common_options(rt, rt_opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (explain->parsed()) return cmd_explain(opt);
        if (bench->parsed()) return cmd_benchmark_kp(bench_opt);
        if (stab->parsed()) return cmd_stability(stab_opt);
        if (rt->parsed()) return cmd_runtime(rt_opt);
        return 1;
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
