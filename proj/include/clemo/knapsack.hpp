#pragma once

// Continuous knapsack testbed: max { v'x : w'x <= 1, x in [0,1]^p }.
// Sensitive parameters are theta = (v, w), or theta = w with v held
// fixed. The greedy density fill is an exact solver for the continuous
// relaxation; the oracle enumerates LP vertex candidates independently.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "clemo/problem.hpp"

namespace clemo {

struct KpInstance {
    Vec values;
    Vec weights;  // capacity is normalized to 1

    int p() const { return static_cast<int>(values.size()); }
};

/// Exact optimum of the continuous knapsack. Nonpositive-weight items
/// start at 1 (free value and extra capacity); substituting 1-x for them
/// turns jointly-negative items into ordinary positive-density
/// candidates, so one greedy density fill over all candidates is
/// LP-optimal with at most one fractional coordinate. Equal densities
/// break toward the lower index.
inline SolverRecord solve_kp(const KpInstance& inst) {
    const int p = inst.p();
    require(p >= 1 && static_cast<int>(inst.weights.size()) == p, "knapsack instance malformed");

    DecisionVector x;
    x.values.assign(p, 0.0);
    x.binary_mask.assign(p, false);

    struct Candidate {
        int item;
        double gain;  // > 0
        double use;   // > 0 capacity consumed per unit
        bool refund;  // moves x from 1 toward 0
    };
    double capacity = 1.0;
    std::vector<Candidate> cands;
    for (int j = 0; j < p; ++j) {
        const double v = inst.values[j], w = inst.weights[j];
        if (w < 0.0) {
            x.values[j] = 1.0;
            capacity -= w;
            if (v < 0.0) cands.push_back({j, -v, -w, true});
        } else if (w == 0.0) {
            if (v >= 0.0) x.values[j] = 1.0;
        } else if (v > 0.0) {
            cands.push_back({j, v, w, false});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        const double lhs = a.gain * b.use;
        const double rhs = b.gain * a.use;
        if (lhs != rhs) return lhs > rhs;
        return a.item < b.item;
    });
    for (const auto& c : cands) {
        if (capacity <= 0.0) break;
        const double take = std::min(1.0, capacity / c.use);
        x.values[c.item] = c.refund ? 1.0 - take : take;
        capacity -= take * c.use;
        if (take < 1.0) break;  // capacity exhausted at the break item
    }

    SolverRecord rec;
    rec.decision = std::move(x);
    rec.objective_value = std::inner_product(inst.values.begin(), inst.values.end(), rec.decision.values.begin(), 0.0);
    return rec;
}

/// Exhaustive LP-vertex oracle: every optimum of the continuous knapsack
/// has at most one fractional positive-weight item, so enumerating
/// (fully-taken subset, fractional candidate) pairs covers an optimum.
/// Refuses instances with more than 6 items.
inline SolverRecord kp_brute_force(const KpInstance& inst) {
    const int p = inst.p();
    require(p <= 6, "knapsack oracle size guard exceeded (p <= 6)");

    double best = 0.0;
    Vec best_x(p, 0.0);
    for (int mask = 0; mask < (1 << p); ++mask) {
        Vec x(p, 0.0);
        double used = 0.0, value = 0.0;
        for (int j = 0; j < p; ++j) {
            if (mask & (1 << j)) {
                x[j] = 1.0;
                used += inst.weights[j];
                value += inst.values[j];
            }
        }
        if (used <= 1.0 + 1e-12 && value > best) {
            best = value;
            best_x = x;
        }
        // one fractional coordinate saturating the capacity covers every
        // remaining LP vertex, including fractional negative-weight items
        for (int j = 0; j < p; ++j) {
            if ((mask & (1 << j)) || inst.weights[j] == 0.0) continue;
            const double frac = std::min(1.0, std::max(0.0, (1.0 - used) / inst.weights[j]));
            if (used + frac * inst.weights[j] > 1.0 + 1e-12) continue;
            const double v2 = value + frac * inst.values[j];
            if (v2 > best) {
                best = v2;
                best_x = x;
                best_x[j] = frac;
            }
        }
    }

    SolverRecord rec;
    rec.objective_value = best;
    rec.decision.values = std::move(best_x);
    rec.decision.binary_mask.assign(p, false);
    return rec;
}

enum class KpThetaMode { values_and_weights, weights_only };

inline KpInstance kp_from_theta(const KpInstance& base, const ParamVector& theta, KpThetaMode mode) {
    KpInstance inst = base;
    const int p = base.p();
    if (mode == KpThetaMode::values_and_weights) {
        inst.values.assign(theta.values.begin(), theta.values.begin() + p);
        inst.weights.assign(theta.values.begin() + p, theta.values.end());
    } else {
        inst.weights = theta.values;
    }
    return inst;
}

inline Testbed make_kp_testbed(const KpInstance& inst, KpThetaMode mode = KpThetaMode::values_and_weights) {
    const int p = inst.p();
    Testbed tb;
    tb.kind = "kp";

    ProblemSpec spec;
    spec.p = p;
    spec.sense = Sense::maximize;
    spec.binary_mask.assign(p, false);
    for (int j = 0; j < p; ++j) spec.decision_labels.push_back("x_" + std::to_string(j + 1));
    spec.explained_decisions.resize(p);
    std::iota(spec.explained_decisions.begin(), spec.explained_decisions.end(), 0);

    ParamVector theta0;
    if (mode == KpThetaMode::values_and_weights) {
        for (int j = 0; j < p; ++j) theta0.names.push_back("v_" + std::to_string(j + 1));
        for (int j = 0; j < p; ++j) theta0.names.push_back("w_" + std::to_string(j + 1));
        theta0.values = inst.values;
        theta0.values.insert(theta0.values.end(), inst.weights.begin(), inst.weights.end());
    } else {
        for (int j = 0; j < p; ++j) theta0.names.push_back("w_" + std::to_string(j + 1));
        theta0.values = inst.weights;
    }
    spec.theta_names = theta0.names;

    spec.objective = [inst, mode, p](const ParamVector& theta) {
        AffineExpr f;
        f.coeffs = (mode == KpThetaMode::values_and_weights)
                       ? Vec(theta.values.begin(), theta.values.begin() + p)
                       : inst.values;
        return f;
    };
    spec.constraints = [mode, p](const ParamVector& theta) {
        std::vector<SparseAffineExpr> cons;
        cons.reserve(1 + 2 * p);
        SparseAffineExpr cap;
        cap.constant = -1.0;
        for (int j = 0; j < p; ++j) {
            cap.index.push_back(j);
            cap.coeff.push_back(mode == KpThetaMode::values_and_weights ? theta.values[p + j] : theta.values[j]);
        }
        cons.push_back(std::move(cap));
        for (int j = 0; j < p; ++j) {
            cons.push_back({{j}, {1.0}, -1.0});   // x_j <= 1
            cons.push_back({{j}, {-1.0}, 0.0});   // x_j >= 0
        }
        return cons;
    };
    // The box keeps the feasible set compact, so every theta is acceptable.
    spec.feasible_and_bounded = [](const ParamVector&) { return true; };

    tb.spec = std::move(spec);
    tb.theta0 = std::move(theta0);
    tb.solve = [inst, mode](const ParamVector& theta) { return solve_kp(kp_from_theta(inst, theta, mode)); };
    tb.oracle = [inst, mode](const ParamVector& theta) { return kp_brute_force(kp_from_theta(inst, theta, mode)); };
    return tb;
}

}  // namespace clemo
