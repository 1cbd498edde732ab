#include <catch2/catch_amalgamated.hpp>

#include "clemo/clemo.hpp"
#include "test_helpers.hpp"

using namespace clemo;
using Catch::Approx;

TEST_CASE("objective evaluation on the toy program") {
    const Testbed tb = testing::make_intro_testbed();
    const ParamVector theta = tb.theta0;

    DecisionVector zero{{0.0, 0.0}, {false, false}};
    CHECK(evaluate_objective(tb.spec, zero, theta) == 0.0);

    DecisionVector vertex{{2.5, 0.0}, {false, false}};
    CHECK(evaluate_objective(tb.spec, vertex, theta) == Approx(2.5).epsilon(1e-12));

    const SolverRecord rec = tb.solve(theta);
    CHECK(rec.objective_value == Approx(evaluate_objective(tb.spec, rec.decision, theta)).epsilon(1e-9));
}

TEST_CASE("objective evaluation matches the exhaustive oracle on a tiny knapsack") {
    const KpInstance inst{{2.0, 1.0}, {0.6, 0.8}};
    const Testbed tb = make_kp_testbed(inst);

    DecisionVector x{{1.0, 0.5}, {false, false}};
    CHECK(evaluate_objective(tb.spec, x, tb.theta0) == Approx(2.5).epsilon(1e-12));

    const SolverRecord oracle = kp_brute_force(inst);
    CHECK(oracle.objective_value == Approx(2.5).epsilon(1e-12));
    CHECK(evaluate_objective(tb.spec, oracle.decision, tb.theta0) == Approx(oracle.objective_value).epsilon(1e-12));
}

TEST_CASE("objective evaluation rejects dimension mismatches") {
    const Testbed tb = testing::make_intro_testbed();
    DecisionVector bad{{1.0}, {false}};
    CHECK_THROWS_AS(evaluate_objective(tb.spec, bad, tb.theta0), contract_error);
    DecisionVector ok{{0.0, 0.0}, {false, false}};
    ParamVector bad_theta{{1.0, 2.0}, {"a", "b"}};
    CHECK_THROWS_AS(constraint_violation(tb.spec, ok, bad_theta), contract_error);
}

TEST_CASE("constraint slack of the incoherent toy prediction") {
    const Testbed tb = testing::make_intro_testbed();
    // independently fitted slopes 0.11 and 0.59 applied at a = 4.1
    DecisionVector pred{{0.11 * 4.1, 0.59 * 4.1}, {false, false}};
    const double slack = constraint_violation(tb.spec, pred, tb.theta0);
    CHECK(slack == Approx(4.0 * 0.451 + 4.1 * 2.419 - 10.0).epsilon(1e-12));
    CHECK(slack == Approx(1.7219).epsilon(1e-9));
    CHECK(slack > 0.17 * 10.0);  // more than 17% of the capacity
}

TEST_CASE("feasible points have zero slack") {
    const Testbed tb = testing::make_intro_testbed();
    const SolverRecord rec = tb.solve(tb.theta0);
    CHECK(constraint_violation(tb.spec, rec.decision, tb.theta0) == 0.0);

    DecisionVector interior{{0.5, 0.5}, {false, false}};
    CHECK(constraint_violation(tb.spec, interior, tb.theta0) == 0.0);
}

TEST_CASE("knapsack slack sums violated terms only") {
    const KpInstance inst{{1.0, 1.0}, {0.6, 0.8}};
    const Testbed tb = make_kp_testbed(inst);
    DecisionVector x{{1.0, 1.0}, {false, false}};

    // hand sum: capacity slack 0.4, box terms inactive; cross-check by
    // evaluating every constraint directly
    double by_loop = 0.0;
    for (const auto& con : tb.spec.constraints(tb.theta0)) {
        const double v = con.eval(x.values);
        if (v > kFeasibilityTolerance) by_loop += v;
    }
    CHECK(constraint_violation(tb.spec, x, tb.theta0) == Approx(0.4).epsilon(1e-12));
    CHECK(constraint_violation(tb.spec, x, tb.theta0) == Approx(by_loop).epsilon(1e-15));
}

TEST_CASE("slack is nonnegative and vanishes exactly on tolerant feasibility") {
    const Testbed tb = testing::make_intro_testbed();
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        DecisionVector x{{rng.uniform(-2.0, 4.0), rng.uniform(-2.0, 4.0)}, {false, false}};
        const double slack = constraint_violation(tb.spec, x, tb.theta0);
        CHECK(slack >= 0.0);
        bool feasible = true;
        for (const auto& con : tb.spec.constraints(tb.theta0))
            feasible &= con.eval(x.values) <= kFeasibilityTolerance;
        CHECK((slack == 0.0) == feasible);
    }
}

TEST_CASE("slack is convex in the decisions for affine constraint sets") {
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const int p = 2 + static_cast<int>(rng.next_u64() % 3);
        KpInstance inst;
        for (int j = 0; j < p; ++j) {
            inst.values.push_back(rng.uniform(0.1, 1.0));
            inst.weights.push_back(rng.uniform(0.05, 0.5));
        }
        const Testbed tb = make_kp_testbed(inst);
        for (int rep = 0; rep < 4; ++rep) {
            DecisionVector x1, x2, mid;
            x1.binary_mask.assign(p, false);
            x2.binary_mask.assign(p, false);
            mid.binary_mask.assign(p, false);
            const double lam = rng.uniform01();
            for (int j = 0; j < p; ++j) {
                x1.values.push_back(rng.uniform(-1.5, 2.5));
                x2.values.push_back(rng.uniform(-1.5, 2.5));
                mid.values.push_back(lam * x1.values[j] + (1.0 - lam) * x2.values[j]);
            }
            const double lhs = constraint_violation(tb.spec, mid, tb.theta0);
            const double rhs = lam * constraint_violation(tb.spec, x1, tb.theta0) +
                               (1.0 - lam) * constraint_violation(tb.spec, x2, tb.theta0);
            CHECK(lhs <= rhs + 1e-9);
        }
    }
}

TEST_CASE("testbed objectives are linear in the decisions") {
    const auto check_linear = [](const Testbed& tb, Rng& rng) {
        const int p = tb.spec.p;
        DecisionVector x1, x2, sum, zero;
        x1.binary_mask.assign(p, false);
        x2.binary_mask = x1.binary_mask;
        sum.binary_mask = x1.binary_mask;
        zero.binary_mask = x1.binary_mask;
        zero.values.assign(p, 0.0);
        for (int j = 0; j < p; ++j) {
            x1.values.push_back(rng.uniform(-1.0, 1.0));
            x2.values.push_back(rng.uniform(-1.0, 1.0));
            sum.values.push_back(x1.values[j] + x2.values[j]);
        }
        const double lhs = evaluate_objective(tb.spec, sum, tb.theta0);
        const double rhs = evaluate_objective(tb.spec, x1, tb.theta0) + evaluate_objective(tb.spec, x2, tb.theta0) -
                           evaluate_objective(tb.spec, zero, tb.theta0);
        CHECK(lhs == Approx(rhs).margin(1e-9));
    };

    Rng rng(5);
    const Testbed kp = make_kp_testbed(gen_kp({.type = 1, .p = 6, .seed = 3}));
    const Testbed spp = make_spp_testbed(default_spp_instance());
    const Testbed cvrp = make_cvrp_testbed(gen_cvrp({.clients = 4, .vehicles = 2, .capacity = 12.0, .seed = 9}));
    for (int rep = 0; rep < 20; ++rep) {
        check_linear(kp, rng);
        check_linear(spp, rng);
        check_linear(cvrp, rng);
    }
}

TEST_CASE("feasibility filter folds in solver preconditions") {
    const Testbed kp = make_kp_testbed(gen_kp({.type = 2, .p = 5, .seed = 1}));
    CHECK(is_feasible_and_bounded(kp.spec, kp.theta0));
    CHECK(is_feasible_and_bounded(kp.spec, testing::theta_of(kp, Vec(kp.theta0.values.size(), -0.3))));

    const Testbed spp = make_spp_testbed(default_spp_instance());
    CHECK(is_feasible_and_bounded(spp.spec, testing::theta_of(spp, {0.0})));
    // theta = -2 drives the cost of the first edge to 1 - 2 = -1
    const ParamVector bad = testing::theta_of(spp, {-2.0});
    CHECK_FALSE(is_feasible_and_bounded(spp.spec, bad));
    double min_cost = 0.0;
    for (double c : spp_edge_costs(default_spp_instance(), -2.0)) min_cost = std::min(min_cost, c);
    CHECK(min_cost < 0.0);

    const CvrpInstance cinst = gen_cvrp({.clients = 3, .vehicles = 2, .capacity = 10.0, .seed = 2});
    const Testbed cvrp = make_cvrp_testbed(cinst);
    CHECK(is_feasible_and_bounded(cvrp.spec, cvrp.theta0));
    ParamVector overload = cvrp.theta0;
    overload.values[0] = cinst.capacity + 1.0;  // one demand above the vehicle capacity
    CHECK_FALSE(is_feasible_and_bounded(cvrp.spec, overload));
}
