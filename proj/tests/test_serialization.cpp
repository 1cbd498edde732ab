#include <catch2/catch_amalgamated.hpp>

#include "clemo/clemo.hpp"
#include "test_helpers.hpp"

using namespace clemo;
using Catch::Approx;

TEST_CASE("knapsack instances round-trip through JSON") {
    const KpInstance inst = gen_kp({.type = 2, .p = 25, .seed = 77});
    const json j = to_json(inst);
    CHECK(j.at("kind") == "kp");
    CHECK(j.at("p") == 25);
    CHECK(j.at("binary_mask").size() == 25);
    const KpInstance back = kp_from_json(json::parse(j.dump()));
    CHECK(back.values == inst.values);
    CHECK(back.weights == inst.weights);
}

TEST_CASE("shortest-path instances round-trip through JSON") {
    const SppInstance inst = default_spp_instance();
    const json j = to_json(inst);
    CHECK(j.at("kind") == "spp");
    CHECK(j.at("p") == inst.num_edges());
    const SppInstance back = spp_from_json(json::parse(j.dump()));
    CHECK(back.edges == inst.edges);
    CHECK(back.base_cost == inst.base_cost);
    CHECK(back.perturb_cost == inst.perturb_cost);
    CHECK(back.num_nodes == inst.num_nodes);
    CHECK(back.source == inst.source);
    CHECK(back.terminal == inst.terminal);
}

TEST_CASE("routing instances round-trip through JSON") {
    const CvrpInstance inst = gen_cvrp({.clients = 6, .vehicles = 2, .capacity = 20.0, .seed = 3});
    const json j = to_json(inst);
    CHECK(j.at("kind") == "cvrp");
    CHECK(j.at("p") == cvrp_decision_size(6));
    const CvrpInstance back = cvrp_from_json(json::parse(j.dump()));
    CHECK(back.clients == inst.clients);
    CHECK(back.vehicles == inst.vehicles);
    CHECK(back.capacity == inst.capacity);
    CHECK(back.demands == inst.demands);
    CHECK(back.costs == inst.costs);
}

TEST_CASE("surrogate models round-trip through JSON") {
    const Testbed tb = make_spp_testbed(default_spp_instance());
    SamplerConfig cfg;
    cfg.samples = 80;
    cfg.seed = 8;
    cfg.distribution = SamplerConfig::Distribution::uniform_interval;
    const ExplainDataset ds = sample_dataset(tb.spec, tb.solve, tb.theta0, cfg);
    const SurrogateModel model = fit_benchmark_lr(ds, tb.spec);

    const SurrogateModel back = surrogate_from_json(json::parse(to_json(model).dump()));
    CHECK(back.component_labels == model.component_labels);
    CHECK(back.feature_names == model.feature_names);
    CHECK(back.binary_mask == model.binary_mask);
    CHECK(back.beta.a == model.beta.a);
    CHECK(predict(back, {0.3}) == predict(model, {0.3}));
}

TEST_CASE("loss breakdown serializes with its weights") {
    LossBreakdown loss;
    loss.accuracy_squared = 1.5;
    loss.accuracy_logloss = 0.25;
    loss.incoherence_objective = 2.0;
    loss.incoherence_feasibility = 0.125;
    loss.lambda = {1.0, 2.0, 0.5, 4.0};
    loss.total = 1.5 + 0.5 + 1.0 + 0.5;
    const json j = to_json(loss);
    CHECK(j.at("accuracy_squared") == 1.5);
    CHECK(j.at("lambda").at("c2") == 4.0);
    CHECK(j.at("total") == loss.total);
}

TEST_CASE("evaluation reports emit one CSV row per method") {
    EvaluationReport report;
    report.rows.push_back({"lr", 1.0, 2.0, 3.0, 4.0});
    report.rows.push_back({"clemo", 1.5, 2.5, 0.5, 0.25});
    const std::string csv = evaluation_report_csv(report);
    CHECK(csv.find("method,accuracy_objective,accuracy_decisions,incoherence_objective,incoherence_feasibility\n") ==
          0);
    CHECK(csv.find("\nlr,1,2,3,4\n") != std::string::npos);
    CHECK(csv.find("\nclemo,1.5,2.5,0.5,0.25\n") != std::string::npos);
}

TEST_CASE("contribution rankings are capped at the top ten") {
    SurrogateModel model;
    model.component_labels = {"f"};
    model.binary_mask = {false};
    model.feature_names = {"intercept"};
    Vec theta0;
    for (int j = 0; j < 15; ++j) {
        model.feature_names.push_back("t" + std::to_string(j));
        theta0.push_back(1.0);
    }
    model.beta = Mat(1, 16, 0.0);
    for (int j = 0; j < 15; ++j) model.beta.at(0, j + 1) = j + 1.0;

    const auto contributions = feature_contributions(model, theta0);
    const json j = contributions_to_json(model.component_labels, {model.feature_names.begin() + 1,
                                                                  model.feature_names.end()},
                                         contributions);
    REQUIRE(j.size() == 1);
    CHECK(j[0].at("component") == "f");
    CHECK(j[0].at("top_contributions").size() == 10);
    CHECK(j[0].at("top_contributions")[0].at("feature") == "t14");
    CHECK(j[0].at("top_contributions")[0].at("value") == 15.0);
}

TEST_CASE("tree models serialize their structure") {
    const Testbed tb = make_spp_testbed(default_spp_instance());
    SamplerConfig cfg;
    cfg.samples = 150;
    cfg.seed = 14;
    cfg.distribution = SamplerConfig::Distribution::uniform_interval;
    const ExplainDataset ds = sample_dataset(tb.spec, tb.solve, tb.theta0, cfg);
    const DtrModel model = fit_benchmark_dtr(ds, tb.spec);
    const json j = to_json(model);
    CHECK(j.at("component_labels").size() == model.trees.size());
    CHECK(j.at("trees").size() == model.trees.size());
    CHECK(j.at("trees")[0].at("nodes").size() == model.trees[0].nodes.size());
}

TEST_CASE("loss traces write one row per iterate") {
    const std::string csv = loss_trace_csv({3.0, 2.0, 1.5});
    CHECK(csv == "iteration,total_loss\n0,3\n1,2\n2,1.5\n");
}
