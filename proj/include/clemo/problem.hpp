#pragma once

// Parametrized optimization problems: min/max f(x; theta) over
// X(theta) = { x : gamma_t(x, theta) <= 0 }. Each testbed materializes
// its objective and constraints as affine expressions in x at a given
// theta, which also serves as the hand-coded gradient structure used by
// the surrogate fitting code.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "clemo/common.hpp"

namespace clemo {

enum class Sense { minimize, maximize };

/// Sensitive parameter vector theta with one label per entry.
struct ParamVector {
    Vec values;
    std::vector<std::string> names;

    int size() const { return static_cast<int>(values.size()); }
};

/// Decision vector of length p; binary positions hold exact 0/1 values
/// when produced by a solver.
struct DecisionVector {
    Vec values;
    std::vector<bool> binary_mask;

    int size() const { return static_cast<int>(values.size()); }
};

/// Solver output h(theta): objective value plus decision vector.
struct SolverRecord {
    double objective_value = 0.0;
    DecisionVector decision;
};

/// Dense affine form a'x + b.
struct AffineExpr {
    Vec coeffs;
    double constant = 0.0;

    double eval(const Vec& x) const {
        double s = constant;
        for (size_t j = 0; j < coeffs.size(); ++j) s += coeffs[j] * x[j];
        return s;
    }
};

/// Sparse affine constraint gamma(x; theta) = sum coeff_k * x[index_k] + constant <= 0.
struct SparseAffineExpr {
    std::vector<int> index;
    Vec coeff;
    double constant = 0.0;

    double eval(const Vec& x) const {
        double s = constant;
        for (size_t k = 0; k < index.size(); ++k) s += coeff[k] * x[index[k]];
        return s;
    }
};

// A constraint term counts as violated only beyond this slack.
inline constexpr double kFeasibilityTolerance = 1e-12;

struct ProblemSpec {
    int p = 0;
    Sense sense = Sense::minimize;
    std::vector<bool> binary_mask;              // per decision variable
    std::vector<std::string> theta_names;       // parameter labels, length q
    std::vector<std::string> decision_labels;   // length p
    std::vector<int> explained_decisions;       // x indices to explain; f is always explained

    /// Objective in the problem's natural sense, materialized at theta.
    std::function<AffineExpr(const ParamVector&)> objective;
    /// Ordered constraint list gamma_t(x; theta) <= 0, materialized at theta.
    std::function<std::vector<SparseAffineExpr>(const ParamVector&)> constraints;
    /// True iff the instance at theta has a feasible, bounded optimum and
    /// the registered solver's preconditions hold.
    std::function<bool(const ParamVector&)> feasible_and_bounded;

    int q() const { return static_cast<int>(theta_names.size()); }
};

inline void check_dimensions(const ProblemSpec& spec, const DecisionVector& x, const ParamVector& theta) {
    require(x.size() == spec.p, "decision vector length does not match problem");
    require(theta.size() == spec.q(), "parameter vector length does not match problem");
}

/// f(x; theta) in the problem's natural sense.
inline double evaluate_objective(const ProblemSpec& spec, const DecisionVector& x, const ParamVector& theta) {
    check_dimensions(spec, x, theta);
    return spec.objective(theta).eval(x.values);
}

/// Constraint-slack distance to the feasible set:
/// delta(x, X(theta)) = sum_t max{0, gamma_t(x, theta)}.
inline double constraint_violation(const ProblemSpec& spec, const DecisionVector& x, const ParamVector& theta) {
    check_dimensions(spec, x, theta);
    double total = 0.0;
    for (const auto& g : spec.constraints(theta)) {
        const double v = g.eval(x.values);
        if (v > kFeasibilityTolerance) total += v;
    }
    return total;
}

inline bool is_feasible_and_bounded(const ProblemSpec& spec, const ParamVector& theta) {
    return spec.feasible_and_bounded(theta);
}

/// A problem spec bundled with its present parameters, solution algorithm,
/// and (when the instance is small enough) an exhaustive oracle.
struct Testbed {
    std::string kind;   // "spp" | "kp" | "cvrp" | "custom"
    ProblemSpec spec;
    ParamVector theta0;
    std::function<SolverRecord(const ParamVector&)> solve;
    std::function<SolverRecord(const ParamVector&)> oracle;  // may be empty
};

}  // namespace clemo
