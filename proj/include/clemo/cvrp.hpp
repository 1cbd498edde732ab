#pragma once

// Capacitated vehicle routing testbed. Feasibility structure follows the
// Miller-Tucker-Zemlin formulation over arc variables x_jk plus load
// variables u_j; the u_j are auxiliary (never explained) and solvers set
// them to cumulative route demand, which certifies the MTZ rows exactly.
// Sensitive parameters are theta = (demands, depot arc costs).
//
// The solution algorithm is Clarke-Wright savings construction followed
// by first-improvement local search (intra-route 2-opt and inter-route
// relocate), budgeted in improvement sweeps so results are reproducible
// across machines.

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "clemo/problem.hpp"

namespace clemo {

struct CvrpInstance {
    int clients = 0;   // n, nodes 1..n; depot is node 0
    int vehicles = 0;  // m
    double capacity = 0.0;
    Vec demands;       // length n, d_j > 0
    Vec costs;         // (n+1) x (n+1) row-major; diagonal unused

    double base_cost(int j, int k) const { return costs[static_cast<size_t>(j) * (clients + 1) + k]; }
};

/// Index of arc (j,k), j != k, within the lexicographic arc block.
inline int cvrp_arc_index(int n, int j, int k) { return j * n + (k < j ? k : k - 1); }

inline int cvrp_num_arcs(int n) { return (n + 1) * n; }

/// Total decision length: all arcs followed by u_1..u_n.
inline int cvrp_decision_size(int n) { return cvrp_num_arcs(n) + n; }

/// Arc costs with the depot row/column taken from theta. In symmetric
/// mode the perturbed client<->depot cost applies to both directions;
/// otherwise only client->depot arcs move and 0->k keeps the base cost.
struct CvrpCosts {
    const CvrpInstance* inst;
    const Vec* theta;
    bool symmetric;

    double operator()(int j, int k) const {
        const int n = inst->clients;
        if (j == 0 && k != 0) return symmetric ? (*theta)[n + k - 1] : inst->base_cost(0, k);
        if (k == 0 && j != 0) return (*theta)[n + j - 1];
        return inst->base_cost(j, k);
    }
};

inline std::optional<std::vector<std::vector<int>>> ffd_pack(const Vec& demands, double capacity, int bins) {
    std::vector<int> order(demands.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (demands[a] != demands[b]) return demands[a] > demands[b];
        return a < b;
    });
    std::vector<std::vector<int>> packs;
    std::vector<double> load;
    for (int idx : order) {
        bool placed = false;
        for (size_t b = 0; b < packs.size(); ++b) {
            if (load[b] + demands[idx] <= capacity) {
                packs[b].push_back(idx);
                load[b] += demands[idx];
                placed = true;
                break;
            }
        }
        if (!placed) {
            if (static_cast<int>(packs.size()) == bins) return std::nullopt;
            packs.push_back({idx});
            load.push_back(demands[idx]);
        }
    }
    return packs;
}

namespace detail {

inline double route_cost(const std::vector<int>& route, const CvrpCosts& cost) {
    if (route.empty()) return 0.0;
    double c = cost(0, route.front());
    for (size_t i = 0; i + 1 < route.size(); ++i) c += cost(route[i], route[i + 1]);
    c += cost(route.back(), 0);
    return c;
}

inline SolverRecord routes_to_record(const CvrpInstance& inst, const Vec& demands, const CvrpCosts& cost,
                                     const std::vector<std::vector<int>>& routes) {
    const int n = inst.clients;
    SolverRecord rec;
    rec.decision.values.assign(cvrp_decision_size(n), 0.0);
    rec.decision.binary_mask.assign(cvrp_decision_size(n), false);
    for (int a = 0; a < cvrp_num_arcs(n); ++a) rec.decision.binary_mask[a] = true;

    double total = 0.0;
    for (const auto& route : routes) {
        if (route.empty()) continue;
        int prev = 0;
        double load = 0.0;
        for (int c : route) {
            rec.decision.values[cvrp_arc_index(n, prev, c)] = 1.0;
            load += demands[c - 1];
            rec.decision.values[cvrp_num_arcs(n) + c - 1] = load;  // u_c
            prev = c;
        }
        rec.decision.values[cvrp_arc_index(n, prev, 0)] = 1.0;
        total += route_cost(route, cost);
    }
    rec.objective_value = total;
    return rec;
}

}  // namespace detail

/// Savings construction plus first-improvement local search. `budget`
/// bounds the number of improvement sweeps.
inline SolverRecord solve_cvrp_parametrized(const CvrpInstance& inst, const Vec& demands, const CvrpCosts& cost,
                                            int budget = 1000) {
    const int n = inst.clients;
    const int m = inst.vehicles;
    const double cap = inst.capacity;
    require(n >= 1 && static_cast<int>(demands.size()) == n, "vehicle routing instance malformed");

    double total_demand = 0.0;
    for (double d : demands) {
        if (d > cap) throw infeasible_error("client demand exceeds vehicle capacity");
        total_demand += d;
    }
    if (total_demand > m * cap) throw infeasible_error("total demand exceeds fleet capacity");

    std::vector<std::vector<int>> routes(n);
    std::vector<double> load(n);
    std::vector<int> route_of(n + 1, -1);
    for (int j = 1; j <= n; ++j) {
        routes[j - 1] = {j};
        load[j - 1] = demands[j - 1];
        route_of[j] = j - 1;
    }
    int route_count = n;

    struct Saving {
        double value;
        int i, j;
    };
    std::vector<Saving> savings;
    savings.reserve(static_cast<size_t>(n) * (n - 1));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) savings.push_back({cost(i, 0) + cost(0, j) - cost(i, j), i, j});
    std::sort(savings.begin(), savings.end(), [](const Saving& a, const Saving& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    auto merge = [&](int ri, int rj) {
        for (int c : routes[rj]) route_of[c] = ri;
        routes[ri].insert(routes[ri].end(), routes[rj].begin(), routes[rj].end());
        load[ri] += load[rj];
        routes[rj].clear();
        load[rj] = 0.0;
        --route_count;
    };

    for (const auto& s : savings) {
        const int ri = route_of[s.i], rj = route_of[s.j];
        if (ri == rj) continue;
        if (routes[ri].back() != s.i || routes[rj].front() != s.j) continue;
        if (load[ri] + load[rj] > cap) continue;
        merge(ri, rj);
    }

    // Force down to the fleet size with the cheapest feasible tail-to-head
    // merges; fall back to a bin-packing reassignment if merging stalls.
    while (route_count > m) {
        double best_delta = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (size_t a = 0; a < routes.size(); ++a) {
            if (routes[a].empty()) continue;
            for (size_t b = 0; b < routes.size(); ++b) {
                if (a == b || routes[b].empty() || load[a] + load[b] > cap) continue;
                const double delta =
                    cost(routes[a].back(), routes[b].front()) - cost(routes[a].back(), 0) - cost(0, routes[b].front());
                if (delta < best_delta) {
                    best_delta = delta;
                    bi = static_cast<int>(a);
                    bj = static_cast<int>(b);
                }
            }
        }
        if (bi < 0) {
            auto packs = ffd_pack(demands, cap, m);
            if (!packs) throw infeasible_error("no assignment of clients to vehicles fits the capacity");
            routes.assign(packs->size(), {});
            load.assign(packs->size(), 0.0);
            for (size_t b = 0; b < packs->size(); ++b) {
                for (int idx : (*packs)[b]) {
                    routes[b].push_back(idx + 1);
                    load[b] += demands[idx];
                }
            }
            route_count = static_cast<int>(routes.size());
            break;
        }
        merge(bi, bj);
    }

    routes.erase(std::remove_if(routes.begin(), routes.end(), [](const auto& r) { return r.empty(); }), routes.end());
    load.resize(routes.size());
    for (size_t r = 0; r < routes.size(); ++r) {
        load[r] = 0.0;
        for (int c : routes[r]) load[r] += demands[c - 1];
    }

    constexpr double kImprove = 1e-12;
    for (int sweep = 0; sweep < budget; ++sweep) {
        bool improved = false;

        // relocate: move one client to the best first-improving position
        for (int c = 1; c <= n; ++c) {
            int src = -1, pos = -1;
            for (size_t r = 0; r < routes.size() && src < 0; ++r)
                for (size_t i = 0; i < routes[r].size(); ++i)
                    if (routes[r][i] == c) {
                        src = static_cast<int>(r);
                        pos = static_cast<int>(i);
                        break;
                    }
            const double src_before = detail::route_cost(routes[src], cost);
            std::vector<int> src_removed = routes[src];
            src_removed.erase(src_removed.begin() + pos);
            const double src_after = detail::route_cost(src_removed, cost);

            bool moved = false;
            for (size_t r = 0; r < routes.size() && !moved; ++r) {
                if (static_cast<int>(r) != src && load[r] + demands[c - 1] > cap) continue;
                const auto& base = (static_cast<int>(r) == src) ? src_removed : routes[r];
                const double before = (static_cast<int>(r) == src) ? src_after : detail::route_cost(routes[r], cost);
                for (size_t at = 0; at <= base.size(); ++at) {
                    if (static_cast<int>(r) == src && static_cast<int>(at) == pos) continue;
                    std::vector<int> cand = base;
                    cand.insert(cand.begin() + at, c);
                    const double delta = (static_cast<int>(r) == src)
                                             ? detail::route_cost(cand, cost) - src_before
                                             : (src_after - src_before) + (detail::route_cost(cand, cost) - before);
                    if (delta < -kImprove) {
                        if (static_cast<int>(r) == src) {
                            routes[src] = cand;
                        } else {
                            routes[src] = src_removed;
                            load[src] -= demands[c - 1];
                            routes[r] = cand;
                            load[r] += demands[c - 1];
                        }
                        moved = true;
                        improved = true;
                        break;
                    }
                }
            }
            if (moved) {
                routes.erase(std::remove_if(routes.begin(), routes.end(), [](const auto& r) { return r.empty(); }),
                             routes.end());
                load.resize(routes.size());
                for (size_t r = 0; r < routes.size(); ++r) {
                    load[r] = 0.0;
                    for (int cc : routes[r]) load[r] += demands[cc - 1];
                }
            }
        }

        // 2-opt: first-improving segment reversal within each route
        for (auto& route : routes) {
            const int len = static_cast<int>(route.size());
            bool applied = true;
            while (applied) {
                applied = false;
                const double before = detail::route_cost(route, cost);
                for (int i = 0; i < len - 1 && !applied; ++i) {
                    for (int j = i + 1; j < len; ++j) {
                        std::vector<int> cand = route;
                        std::reverse(cand.begin() + i, cand.begin() + j + 1);
                        if (detail::route_cost(cand, cost) < before - kImprove) {
                            route = cand;
                            applied = true;
                            improved = true;
                            break;
                        }
                    }
                }
            }
        }

        if (!improved) break;
    }

    return detail::routes_to_record(inst, demands, cost, routes);
}

inline SolverRecord solve_cvrp(const CvrpInstance& inst, int budget = 1000) {
    // asymmetric mode reproduces the base matrix verbatim
    Vec theta(inst.clients * 2);
    for (int j = 1; j <= inst.clients; ++j) {
        theta[j - 1] = inst.demands[j - 1];
        theta[inst.clients + j - 1] = inst.base_cost(j, 0);
    }
    CvrpCosts cost{&inst, &theta, false};
    return solve_cvrp_parametrized(inst, inst.demands, cost, budget);
}

/// Exhaustive oracle: enumerates all partitions of the clients into at
/// most m capacity-feasible groups and all visit orders within each
/// group. Guarded to 5 clients.
inline SolverRecord cvrp_brute_force_parametrized(const CvrpInstance& inst, const Vec& demands,
                                                  const CvrpCosts& cost) {
    const int n = inst.clients;
    require(n <= 5, "route enumeration size guard exceeded (clients <= 5)");

    for (double d : demands)
        if (d > inst.capacity) throw infeasible_error("client demand exceeds vehicle capacity");

    std::vector<int> group(n, 0);
    std::vector<std::vector<int>> best_routes;
    double best = std::numeric_limits<double>::infinity();

    auto group_cost = [&](const std::vector<int>& members) {
        std::vector<int> perm = members;
        std::sort(perm.begin(), perm.end());
        double best_g = std::numeric_limits<double>::infinity();
        std::vector<int> best_perm;
        do {
            const double c = detail::route_cost(perm, cost);
            if (c < best_g) {
                best_g = c;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return std::make_pair(best_g, best_perm);
    };

    // restricted growth strings enumerate set partitions once each
    auto enumerate = [&](auto&& self, int idx, int max_used) -> void {
        if (idx == n) {
            const int groups = max_used + 1;
            if (groups > inst.vehicles) return;
            std::vector<std::vector<int>> members(groups);
            std::vector<double> loads(groups, 0.0);
            for (int j = 0; j < n; ++j) {
                members[group[j]].push_back(j + 1);
                loads[group[j]] += demands[j];
            }
            for (double l : loads)
                if (l > inst.capacity) return;
            double total = 0.0;
            std::vector<std::vector<int>> routes;
            for (const auto& mem : members) {
                auto [c, perm] = group_cost(mem);
                total += c;
                routes.push_back(perm);
            }
            if (total < best) {
                best = total;
                best_routes = routes;
            }
            return;
        }
        for (int g = 0; g <= std::min(max_used + 1, inst.vehicles - 1); ++g) {
            group[idx] = g;
            self(self, idx + 1, std::max(max_used, g));
        }
    };
    enumerate(enumerate, 0, -1);
    if (!std::isfinite(best)) throw infeasible_error("no assignment of clients to vehicles fits the capacity");

    return detail::routes_to_record(inst, demands, cost, best_routes);
}

inline SolverRecord cvrp_brute_force(const CvrpInstance& inst) {
    Vec theta(inst.clients * 2);
    for (int j = 1; j <= inst.clients; ++j) {
        theta[j - 1] = inst.demands[j - 1];
        theta[inst.clients + j - 1] = inst.base_cost(j, 0);
    }
    CvrpCosts cost{&inst, &theta, false};
    return cvrp_brute_force_parametrized(inst, inst.demands, cost);
}

/// Reads the successor structure of an arc-incidence decision back into
/// depot-rooted routes (for human-readable reports).
inline std::vector<std::vector<int>> cvrp_decode_routes(int n, const DecisionVector& decision) {
    std::vector<int> succ(n + 1, -1);
    std::vector<std::vector<int>> routes;
    std::vector<int> starts;
    for (int k = 1; k <= n; ++k)
        if (decision.values[cvrp_arc_index(n, 0, k)] > 0.5) starts.push_back(k);
    for (int j = 1; j <= n; ++j) {
        for (int k = 0; k <= n; ++k) {
            if (k != j && decision.values[cvrp_arc_index(n, j, k)] > 0.5) {
                succ[j] = k;
                break;
            }
        }
    }
    for (int s : starts) {
        std::vector<int> route;
        for (int c = s; c != 0 && c != -1 && route.size() <= static_cast<size_t>(n); c = succ[c]) route.push_back(c);
        routes.push_back(route);
    }
    return routes;
}

inline Testbed make_cvrp_testbed(const CvrpInstance& inst, int budget = 1000, bool symmetric_depot_costs = true) {
    const int n = inst.clients;
    const int n_arcs = cvrp_num_arcs(n);
    Testbed tb;
    tb.kind = "cvrp";

    ProblemSpec spec;
    spec.p = cvrp_decision_size(n);
    spec.sense = Sense::minimize;
    spec.binary_mask.assign(spec.p, false);
    for (int a = 0; a < n_arcs; ++a) spec.binary_mask[a] = true;
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k)
            if (j != k) spec.decision_labels.push_back("x_" + std::to_string(j) + "_" + std::to_string(k));
    for (int j = 1; j <= n; ++j) spec.decision_labels.push_back("u_" + std::to_string(j));
    for (int j = 1; j <= n; ++j) spec.explained_decisions.push_back(cvrp_arc_index(n, j, 0));

    ParamVector theta0;
    for (int j = 1; j <= n; ++j) theta0.names.push_back("d_" + std::to_string(j));
    for (int j = 1; j <= n; ++j) theta0.names.push_back("c0_" + std::to_string(j));
    for (int j = 1; j <= n; ++j) theta0.values.push_back(inst.demands[j - 1]);
    for (int j = 1; j <= n; ++j) theta0.values.push_back(inst.base_cost(j, 0));
    spec.theta_names = theta0.names;

    const double cap = inst.capacity;
    const int m = inst.vehicles;

    spec.objective = [inst, n, n_arcs, symmetric_depot_costs](const ParamVector& theta) {
        CvrpCosts cost{&inst, &theta.values, symmetric_depot_costs};
        AffineExpr f;
        f.coeffs.assign(cvrp_decision_size(n), 0.0);
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k)
                if (j != k) f.coeffs[cvrp_arc_index(n, j, k)] = cost(j, k);
        (void)n_arcs;
        return f;
    };

    spec.constraints = [n, n_arcs, cap, m](const ParamVector& theta) {
        std::vector<SparseAffineExpr> cons;
        const auto u_index = [&](int j) { return n_arcs + j - 1; };

        SparseAffineExpr depot_out, depot_in;
        for (int k = 1; k <= n; ++k) {
            depot_out.index.push_back(cvrp_arc_index(n, 0, k));
            depot_out.coeff.push_back(1.0);
            depot_in.index.push_back(cvrp_arc_index(n, k, 0));
            depot_in.coeff.push_back(1.0);
        }
        auto bounded = [&](SparseAffineExpr row) {
            SparseAffineExpr le = row, ge = row;
            le.constant = -static_cast<double>(m);  // sum <= m
            for (auto& c : ge.coeff) c = -c;
            ge.constant = 1.0;  // sum >= 1
            cons.push_back(std::move(le));
            cons.push_back(std::move(ge));
        };
        bounded(depot_out);
        bounded(depot_in);

        for (int j = 1; j <= n; ++j) {  // out-degree of each client is 1
            SparseAffineExpr row;
            for (int k = 0; k <= n; ++k)
                if (k != j) {
                    row.index.push_back(cvrp_arc_index(n, j, k));
                    row.coeff.push_back(1.0);
                }
            SparseAffineExpr le = row, ge = row;
            le.constant = -1.0;
            for (auto& c : ge.coeff) c = -c;
            ge.constant = 1.0;
            cons.push_back(std::move(le));
            cons.push_back(std::move(ge));
        }
        for (int k = 1; k <= n; ++k) {  // in-degree of each client is 1
            SparseAffineExpr row;
            for (int j = 0; j <= n; ++j)
                if (j != k) {
                    row.index.push_back(cvrp_arc_index(n, j, k));
                    row.coeff.push_back(1.0);
                }
            SparseAffineExpr le = row, ge = row;
            le.constant = -1.0;
            for (auto& c : ge.coeff) c = -c;
            ge.constant = 1.0;
            cons.push_back(std::move(le));
            cons.push_back(std::move(ge));
        }
        for (int j = 1; j <= n; ++j) {  // subtour elimination via loads
            for (int k = 1; k <= n; ++k) {
                if (j == k) continue;
                SparseAffineExpr row;
                row.index = {u_index(j), u_index(k), cvrp_arc_index(n, j, k)};
                row.coeff = {1.0, -1.0, cap};
                row.constant = -cap + theta.values[k - 1];
                cons.push_back(std::move(row));
            }
        }
        for (int j = 1; j <= n; ++j) {  // d_j <= u_j <= M
            cons.push_back({{u_index(j)}, {-1.0}, theta.values[j - 1]});
            cons.push_back({{u_index(j)}, {1.0}, -cap});
        }
        for (int a = 0; a < n_arcs; ++a) {
            cons.push_back({{a}, {1.0}, -1.0});
            cons.push_back({{a}, {-1.0}, 0.0});
        }
        return cons;
    };

    spec.feasible_and_bounded = [n, cap, m](const ParamVector& theta) {
        Vec d(theta.values.begin(), theta.values.begin() + n);
        double total = 0.0;
        for (double dj : d) {
            if (dj <= 0.0 || dj > cap) return false;
            total += dj;
        }
        if (total > m * cap) return false;
        return ffd_pack(d, cap, m).has_value();
    };

    tb.spec = std::move(spec);
    tb.theta0 = std::move(theta0);
    tb.solve = [inst, n, budget, symmetric_depot_costs](const ParamVector& theta) {
        Vec d(theta.values.begin(), theta.values.begin() + n);
        CvrpCosts cost{&inst, &theta.values, symmetric_depot_costs};
        return solve_cvrp_parametrized(inst, d, cost, budget);
    };
    tb.oracle = [inst, n, symmetric_depot_costs](const ParamVector& theta) {
        Vec d(theta.values.begin(), theta.values.begin() + n);
        CvrpCosts cost{&inst, &theta.values, symmetric_depot_costs};
        return cvrp_brute_force_parametrized(inst, d, cost);
    };
    return tb;
}

}  // namespace clemo
