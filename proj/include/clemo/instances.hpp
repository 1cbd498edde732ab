#pragma once

// Deterministic instance generators for the experiment testbeds.

#include <cmath>
#include <string>

#include "clemo/cvrp.hpp"
#include "clemo/knapsack.hpp"
#include "clemo/rng.hpp"
#include "clemo/shortest_path.hpp"

namespace clemo {

/// Knapsack generator families, by value/weight correlation:
/// 1 uncorrelated, 2 weakly correlated, 3 strongly correlated,
/// 4 inversely strongly correlated. Ranges are normalized to the
/// unit-capacity formulation.
struct KpGenConfig {
    int type = 1;
    int p = 25;
    uint64_t seed = 0;
    double w_lo = 0.02;
    double w_hi = 0.14;
    double corr = 0.02;
};

inline KpInstance gen_kp(const KpGenConfig& cfg) {
    require(cfg.type >= 1 && cfg.type <= 4, "knapsack family must be 1..4");
    require(cfg.p >= 1, "knapsack needs at least one item");
    require(cfg.w_lo > 0.0 && cfg.w_lo < cfg.w_hi, "weight range must satisfy 0 < lo < hi");
    require(cfg.corr > 0.0, "correlation band must be positive");

    Rng rng(cfg.seed);
    KpInstance inst;
    inst.values.resize(cfg.p);
    inst.weights.resize(cfg.p);
    for (int j = 0; j < cfg.p; ++j) {
        switch (cfg.type) {
            case 1:
                inst.weights[j] = rng.uniform(cfg.w_lo, cfg.w_hi);
                inst.values[j] = rng.uniform(cfg.w_lo, cfg.w_hi);
                break;
            case 2:
                inst.weights[j] = rng.uniform(cfg.w_lo, cfg.w_hi);
                inst.values[j] = std::max(rng.uniform(inst.weights[j] - cfg.corr, inst.weights[j] + cfg.corr), 1e-6);
                break;
            case 3:
                inst.weights[j] = rng.uniform(cfg.w_lo, cfg.w_hi);
                inst.values[j] = inst.weights[j] + cfg.corr;
                break;
            case 4:
                inst.values[j] = rng.uniform(cfg.w_lo, cfg.w_hi);
                inst.weights[j] = inst.values[j] + cfg.corr;
                break;
        }
    }
    return inst;
}

/// Fixed 6-node, 9-edge parametric shortest-path instance. The optimal
/// value over theta in [-1, 1] is min(4+3t, 5, 6-2t): the optimal path
/// switches at t=1/3 and t=1/2, the optimum at t=0 is unique, and every
/// edge cost stays nonnegative on the whole interval.
inline SppInstance default_spp_instance() {
    SppInstance inst;
    inst.num_nodes = 6;
    inst.source = 0;
    inst.terminal = 5;
    inst.edges = {{0, 1}, {1, 5}, {0, 2}, {2, 5}, {0, 3}, {3, 5}, {0, 4}, {4, 5}, {4, 2}};
    inst.base_cost = {1.0, 3.0, 2.0, 3.0, 3.0, 3.0, 2.5, 4.0, 0.5};
    inst.perturb_cost = {1.0, 2.0, 0.0, 0.0, -1.0, -1.0, 1.5, 0.0, 0.0};
    return inst;
}

struct CvrpGenConfig {
    int clients = 16;
    int vehicles = 4;
    double capacity = 25.0;
    int demand_lo = 1;
    int demand_hi = 9;
    double coord_lo = 0.0;
    double coord_hi = 100.0;
    uint64_t seed = 0;
};

/// Clients at uniform planar coordinates with Euclidean costs; integer
/// demands redrawn until the fleet capacity covers them. The config must
/// leave at least 10% slack between expected total demand and fleet
/// capacity.
inline CvrpInstance gen_cvrp(const CvrpGenConfig& cfg) {
    require(cfg.clients >= 1 && cfg.vehicles >= 1, "need at least one client and one vehicle");
    require(cfg.demand_lo >= 1 && cfg.demand_lo <= cfg.demand_hi, "bad demand range");
    require(cfg.demand_hi <= cfg.capacity, "max demand exceeds vehicle capacity");
    const double mean_demand = 0.5 * (cfg.demand_lo + cfg.demand_hi);
    require(1.1 * cfg.clients * mean_demand <= cfg.vehicles * cfg.capacity,
            "fleet capacity margin below 1.1x expected demand");

    Rng rng(cfg.seed);
    const int n = cfg.clients;
    std::vector<std::pair<double, double>> pts(n + 1);
    for (auto& [x, y] : pts) {
        x = rng.uniform(cfg.coord_lo, cfg.coord_hi);
        y = rng.uniform(cfg.coord_lo, cfg.coord_hi);
    }

    CvrpInstance inst;
    inst.clients = n;
    inst.vehicles = cfg.vehicles;
    inst.capacity = cfg.capacity;
    inst.costs.assign(static_cast<size_t>(n + 1) * (n + 1), 0.0);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k)
            inst.costs[static_cast<size_t>(j) * (n + 1) + k] =
                std::hypot(pts[j].first - pts[k].first, pts[j].second - pts[k].second);

    while (true) {
        inst.demands.resize(n);
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            inst.demands[j] = rng.uniform_int(cfg.demand_lo, cfg.demand_hi);
            total += inst.demands[j];
        }
        if (total <= cfg.vehicles * cfg.capacity && ffd_pack(inst.demands, cfg.capacity, cfg.vehicles)) break;
    }
    return inst;
}

}  // namespace clemo
