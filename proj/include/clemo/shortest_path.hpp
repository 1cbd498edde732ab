#pragma once

// Parametric shortest path testbed: a directed graph with edge costs
// c + theta * c_tilde and a single sensitive scalar theta. Solved with
// Dijkstra (costs must stay nonnegative); the oracle enumerates all
// simple s-t paths.

#include <algorithm>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "clemo/linalg.hpp"
#include "clemo/problem.hpp"

namespace clemo {

struct SppInstance {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // directed (from, to)
    Vec base_cost;                           // c
    Vec perturb_cost;                        // c_tilde
    int source = 0;
    int terminal = 0;

    int num_edges() const { return static_cast<int>(edges.size()); }
};

inline Vec spp_edge_costs(const SppInstance& inst, double theta) {
    Vec c(inst.edges.size());
    for (size_t e = 0; e < c.size(); ++e) c[e] = inst.base_cost[e] + theta * inst.perturb_cost[e];
    return c;
}

/// Dijkstra over edge costs c + theta*c_tilde. Cost ties during
/// relaxation keep the predecessor edge with the lower index, which
/// makes the returned path deterministic.
inline SolverRecord solve_spp(const SppInstance& inst, double theta) {
    const int n = inst.num_nodes;
    const int m = inst.num_edges();
    const Vec cost = spp_edge_costs(inst, theta);
    for (double c : cost)
        if (c < 0.0) throw contract_error("negative edge cost: Dijkstra precondition violated");

    std::vector<std::vector<int>> out(n);
    for (int e = 0; e < m; ++e) out[inst.edges[e].first].push_back(e);

    constexpr double inf = std::numeric_limits<double>::infinity();
    Vec dist(n, inf);
    std::vector<int> pred_edge(n, -1);
    dist[inst.source] = 0.0;

    using Item = std::pair<double, int>;  // (dist, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, inst.source});
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (int e : out[u]) {
            const int v = inst.edges[e].second;
            const double nd = d + cost[e];
            if (nd < dist[v] || (nd == dist[v] && pred_edge[v] >= 0 && e < pred_edge[v])) {
                dist[v] = nd;
                pred_edge[v] = e;
                pq.push({nd, v});
            }
        }
    }
    if (dist[inst.terminal] == inf) throw infeasible_error("terminal unreachable from source");

    SolverRecord rec;
    rec.decision.values.assign(m, 0.0);
    rec.decision.binary_mask.assign(m, true);
    for (int v = inst.terminal; v != inst.source;) {
        const int e = pred_edge[v];
        rec.decision.values[e] = 1.0;
        v = inst.edges[e].first;
    }
    rec.objective_value = dot(cost, rec.decision.values);
    return rec;
}

/// Enumerates every simple s-t path (guarded to 8 nodes) and returns the
/// cheapest; ties keep the lexicographically smaller edge sequence.
inline SolverRecord spp_brute_force(const SppInstance& inst, double theta) {
    require(inst.num_nodes <= 8, "path enumeration size guard exceeded (nodes <= 8)");
    const Vec cost = spp_edge_costs(inst, theta);
    const int m = inst.num_edges();

    std::vector<std::vector<int>> out(inst.num_nodes);
    for (int e = 0; e < m; ++e) out[inst.edges[e].first].push_back(e);

    std::vector<int> path, best_path;
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> visited(inst.num_nodes, false);

    auto dfs = [&](auto&& self, int u, double acc) -> void {
        if (u == inst.terminal) {
            if (acc < best || (acc == best && path < best_path)) {
                best = acc;
                best_path = path;
            }
            return;
        }
        visited[u] = true;
        for (int e : out[u]) {
            const int v = inst.edges[e].second;
            if (visited[v]) continue;
            path.push_back(e);
            self(self, v, acc + cost[e]);
            path.pop_back();
        }
        visited[u] = false;
    };
    dfs(dfs, inst.source, 0.0);
    if (!std::isfinite(best)) throw infeasible_error("terminal unreachable from source");

    SolverRecord rec;
    rec.decision.values.assign(m, 0.0);
    rec.decision.binary_mask.assign(m, true);
    for (int e : best_path) rec.decision.values[e] = 1.0;
    rec.objective_value = dot(cost, rec.decision.values);
    return rec;
}

inline Testbed make_spp_testbed(const SppInstance& inst) {
    const int m = inst.num_edges();
    Testbed tb;
    tb.kind = "spp";

    ProblemSpec spec;
    spec.p = m;
    spec.sense = Sense::minimize;
    spec.binary_mask.assign(m, true);
    for (int e = 0; e < m; ++e) {
        spec.decision_labels.push_back("x_" + std::to_string(inst.edges[e].first) + "_" +
                                       std::to_string(inst.edges[e].second));
    }
    spec.explained_decisions.resize(m);
    for (int e = 0; e < m; ++e) spec.explained_decisions[e] = e;
    spec.theta_names = {"theta"};

    spec.objective = [inst](const ParamVector& theta) {
        AffineExpr f;
        f.coeffs = spp_edge_costs(inst, theta.values[0]);
        return f;
    };
    spec.constraints = [inst, m](const ParamVector&) {
        // Path flow balance: +1 at the source, +1 into the terminal, zero
        // elsewhere; each equality contributes two one-sided rows.
        std::vector<SparseAffineExpr> cons;
        for (int node = 0; node < inst.num_nodes; ++node) {
            SparseAffineExpr bal;  // (out - in) at source, (in - out) at terminal, (in - out) elsewhere
            for (int e = 0; e < m; ++e) {
                double s = 0.0;
                if (inst.edges[e].first == node) s += (node == inst.source) ? 1.0 : -1.0;
                if (inst.edges[e].second == node) s += (node == inst.source) ? -1.0 : 1.0;
                if (s != 0.0) {
                    bal.index.push_back(e);
                    bal.coeff.push_back(s);
                }
            }
            const double rhs = (node == inst.source || node == inst.terminal) ? 1.0 : 0.0;
            SparseAffineExpr le = bal, ge = bal;
            le.constant = -rhs;
            for (auto& c : ge.coeff) c = -c;
            ge.constant = rhs;
            cons.push_back(std::move(le));
            cons.push_back(std::move(ge));
        }
        for (int e = 0; e < m; ++e) {
            cons.push_back({{e}, {1.0}, -1.0});
            cons.push_back({{e}, {-1.0}, 0.0});
        }
        return cons;
    };
    spec.feasible_and_bounded = [inst](const ParamVector& theta) {
        const Vec c = spp_edge_costs(inst, theta.values[0]);
        for (double v : c)
            if (v < 0.0) return false;
        // reachability is theta-independent; check it on the fly (graphs are tiny)
        std::vector<bool> seen(inst.num_nodes, false);
        std::vector<int> stack = {inst.source};
        seen[inst.source] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [a, b] : inst.edges)
                if (a == u && !seen[b]) {
                    seen[b] = true;
                    stack.push_back(b);
                }
        }
        return static_cast<bool>(seen[inst.terminal]);
    };

    tb.spec = std::move(spec);
    tb.theta0 = {{0.0}, {"theta"}};
    tb.solve = [inst](const ParamVector& theta) { return solve_spp(inst, theta.values[0]); };
    tb.oracle = [inst](const ParamVector& theta) { return spp_brute_force(inst, theta.values[0]); };
    return tb;
}

}  // namespace clemo
