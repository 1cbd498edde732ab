#pragma once

// JSON schemas for problem instances, fitted models and reports, plus
// the CSV report writers. Instance JSON carries {"kind", "p",
// "binary_mask", <payload>} and round-trips exactly.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clemo/cvrp.hpp"
#include "clemo/instances.hpp"
#include "clemo/knapsack.hpp"
#include "clemo/metrics.hpp"
#include "clemo/regression_tree.hpp"
#include "clemo/sampling.hpp"
#include "clemo/shortest_path.hpp"
#include "clemo/surrogate.hpp"

namespace clemo {

using json = nlohmann::json;

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    require(out.good(), "cannot open file for writing: " + path);
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline json load_json_file(const std::string& path) { return json::parse(read_text_file(path)); }

inline void save_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---- instances --------------------------------------------------------------

inline json to_json(const KpInstance& inst) {
    return {{"kind", "kp"},
            {"p", inst.p()},
            {"binary_mask", std::vector<bool>(inst.p(), false)},
            {"values", inst.values},
            {"weights", inst.weights},
            {"capacity", 1.0}};
}

inline KpInstance kp_from_json(const json& j) {
    require(j.at("kind") == "kp", "expected a knapsack instance");
    KpInstance inst;
    inst.values = j.at("values").get<Vec>();
    inst.weights = j.at("weights").get<Vec>();
    require(inst.values.size() == inst.weights.size(), "values/weights length mismatch");
    return inst;
}

inline json to_json(const SppInstance& inst) {
    std::vector<std::vector<int>> edges;
    for (const auto& [a, b] : inst.edges) edges.push_back({a, b});
    return {{"kind", "spp"},
            {"p", inst.num_edges()},
            {"binary_mask", std::vector<bool>(inst.num_edges(), true)},
            {"nodes", inst.num_nodes},
            {"source", inst.source},
            {"terminal", inst.terminal},
            {"edges", edges},
            {"base_costs", inst.base_cost},
            {"perturbation_costs", inst.perturb_cost}};
}

inline SppInstance spp_from_json(const json& j) {
    require(j.at("kind") == "spp", "expected a shortest-path instance");
    SppInstance inst;
    inst.num_nodes = j.at("nodes").get<int>();
    inst.source = j.at("source").get<int>();
    inst.terminal = j.at("terminal").get<int>();
    for (const auto& e : j.at("edges")) inst.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    inst.base_cost = j.at("base_costs").get<Vec>();
    inst.perturb_cost = j.at("perturbation_costs").get<Vec>();
    require(inst.base_cost.size() == inst.edges.size() && inst.perturb_cost.size() == inst.edges.size(),
            "edge cost vectors must match the edge list");
    return inst;
}

inline json to_json(const CvrpInstance& inst) {
    std::vector<bool> mask(cvrp_decision_size(inst.clients), false);
    for (int a = 0; a < cvrp_num_arcs(inst.clients); ++a) mask[a] = true;
    return {{"kind", "cvrp"},
            {"p", cvrp_decision_size(inst.clients)},
            {"binary_mask", mask},
            {"clients", inst.clients},
            {"vehicles", inst.vehicles},
            {"capacity", inst.capacity},
            {"demands", inst.demands},
            {"costs", inst.costs}};
}

inline CvrpInstance cvrp_from_json(const json& j) {
    require(j.at("kind") == "cvrp", "expected a vehicle routing instance");
    CvrpInstance inst;
    inst.clients = j.at("clients").get<int>();
    inst.vehicles = j.at("vehicles").get<int>();
    inst.capacity = j.at("capacity").get<double>();
    inst.demands = j.at("demands").get<Vec>();
    inst.costs = j.at("costs").get<Vec>();
    require(static_cast<int>(inst.demands.size()) == inst.clients, "demand vector length mismatch");
    require(inst.costs.size() == static_cast<size_t>(inst.clients + 1) * (inst.clients + 1),
            "cost matrix must be (n+1) x (n+1) row-major");
    return inst;
}

// ---- models and reports -------------------------------------------------------

inline json to_json(const SurrogateModel& model) {
    std::vector<Vec> beta(model.components());
    for (int c = 0; c < model.components(); ++c) beta[c].assign(model.beta.row(c).begin(), model.beta.row(c).end());
    return {{"component_labels", model.component_labels},
            {"feature_names", model.feature_names},
            {"binary_mask", model.binary_mask},
            {"beta", beta}};
}

inline SurrogateModel surrogate_from_json(const json& j) {
    SurrogateModel model;
    model.component_labels = j.at("component_labels").get<std::vector<std::string>>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.binary_mask = j.at("binary_mask").get<std::vector<bool>>();
    const auto beta = j.at("beta").get<std::vector<Vec>>();
    require(!beta.empty(), "coefficient matrix is empty");
    model.beta = Mat(static_cast<int>(beta.size()), static_cast<int>(beta[0].size()));
    for (size_t c = 0; c < beta.size(); ++c) {
        require(beta[c].size() == beta[0].size(), "ragged coefficient matrix");
        for (size_t a = 0; a < beta[c].size(); ++a) model.beta.at(static_cast<int>(c), static_cast<int>(a)) = beta[c][a];
    }
    return model;
}

inline json to_json(const LambdaWeights& lambda) {
    return {{"a1", lambda.a1}, {"a2", lambda.a2}, {"c1", lambda.c1}, {"c2", lambda.c2}};
}

inline json to_json(const LossBreakdown& loss) {
    return {{"accuracy_squared", loss.accuracy_squared},
            {"accuracy_logloss", loss.accuracy_logloss},
            {"incoherence_objective", loss.incoherence_objective},
            {"incoherence_feasibility", loss.incoherence_feasibility},
            {"lambda", to_json(loss.lambda)},
            {"total", loss.total}};
}

inline json to_json(const EvaluationReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"method", r.method},
                        {"accuracy_objective", r.accuracy_objective},
                        {"accuracy_decisions", r.accuracy_decisions},
                        {"incoherence_objective", r.incoherence_objective},
                        {"incoherence_feasibility", r.incoherence_feasibility}});
    }
    return {{"rows", rows}};
}

inline std::string evaluation_report_csv(const EvaluationReport& report) {
    std::string out = "method,accuracy_objective,accuracy_decisions,incoherence_objective,incoherence_feasibility\n";
    for (const auto& r : report.rows) {
        out += r.method + "," + format_double(r.accuracy_objective) + "," + format_double(r.accuracy_decisions) + "," +
               format_double(r.incoherence_objective) + "," + format_double(r.incoherence_feasibility) + "\n";
    }
    return out;
}

inline json to_json(const StabilityReport& report) {
    return {{"std", report.std_dev}, {"normalized_std", report.normalized_std}, {"fsi", report.fsi}};
}

inline json contributions_to_json(const std::vector<std::string>& component_labels,
                                  const std::vector<std::string>& theta_names,
                                  const std::vector<std::vector<Contribution>>& contributions, int top_k = 10) {
    json out = json::array();
    for (size_t c = 0; c < contributions.size(); ++c) {
        json ranked = json::array();
        for (size_t k = 0; k < contributions[c].size() && k < static_cast<size_t>(top_k); ++k) {
            const auto& con = contributions[c][k];
            ranked.push_back({{"feature", theta_names[con.feature]}, {"value", con.value}});
        }
        out.push_back({{"component", component_labels[c]}, {"top_contributions", ranked}});
    }
    return out;
}

inline json to_json(const RegressionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value},
                         {"count", n.count}});
    }
    return {{"nodes", nodes}, {"importance", tree.importance}};
}

inline json to_json(const DtrModel& model) {
    json trees = json::array();
    for (const auto& t : model.trees) trees.push_back(to_json(t));
    return {{"component_labels", model.component_labels},
            {"binary_mask", model.component_binary},
            {"trees", trees}};
}

inline std::string loss_trace_csv(const Vec& trace) {
    std::string out = "iteration,total_loss\n";
    for (size_t i = 0; i < trace.size(); ++i) out += std::to_string(i) + "," + format_double(trace[i]) + "\n";
    return out;
}

}  // namespace clemo
