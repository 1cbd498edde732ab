#pragma once

// CART-style regression trees used as an independent per-component
// benchmark: greedy weighted-variance-reduction splits, depth- and
// leaf-size-bounded, leaves predicting the weighted target mean.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "clemo/surrogate.hpp"

namespace clemo {

struct TreeConfig {
    int max_depth = 5;
    int min_samples_leaf = 50;
};

struct RegressionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
        int count = 0;
        int depth = 0;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    Vec importance;           // per feature: total weighted variance reduction

    double predict(const Vec& x) const {
        int id = 0;
        while (nodes[id].feature >= 0) id = x[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
        return nodes[id].value;
    }

    int depth() const {
        int d = 0;
        for (const auto& n : nodes) d = std::max(d, n.depth);
        return d;
    }

    int min_leaf_count() const {
        int c = std::numeric_limits<int>::max();
        for (const auto& n : nodes)
            if (n.feature < 0) c = std::min(c, n.count);
        return c;
    }
};

/// Fits one tree on (X, y, w) with X row-major n x q. Split ties break
/// toward the lowest feature index, then the lowest threshold.
inline RegressionTree fit_regression_tree(const Vec& X, int q, const Vec& y, const Vec& w, const TreeConfig& cfg = {}) {
    const int n = static_cast<int>(y.size());
    require(q >= 1 && static_cast<int>(X.size()) == n * q && w.size() == y.size(), "tree training data malformed");
    require(n >= 2 * cfg.min_samples_leaf, "dataset too small for the leaf-size bound");

    RegressionTree tree;
    tree.importance.assign(q, 0.0);

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);

    auto stats = [&](const std::vector<int>& members) {
        double W = 0.0, Sy = 0.0, Syy = 0.0;
        for (int i : members) {
            W += w[i];
            Sy += w[i] * y[i];
            Syy += w[i] * y[i] * y[i];
        }
        const double mean = W > 0.0 ? Sy / W : 0.0;
        const double sse = std::max(0.0, Syy - (W > 0.0 ? Sy * Sy / W : 0.0));
        return std::tuple{W, mean, sse};
    };

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double reduction = 0.0;
    };

    auto grow = [&](auto&& self, std::vector<int> members, int depth) -> int {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        auto [W, mean, sse] = stats(members);
        tree.nodes[id].value = mean;
        tree.nodes[id].count = static_cast<int>(members.size());
        tree.nodes[id].depth = depth;

        const int count = static_cast<int>(members.size());
        if (depth >= cfg.max_depth || count < 2 * cfg.min_samples_leaf || sse <= 1e-12) return id;

        Split best;
        std::vector<int> sorted = members;
        for (int f = 0; f < q; ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
                const double xa = X[static_cast<size_t>(a) * q + f], xb = X[static_cast<size_t>(b) * q + f];
                if (xa != xb) return xa < xb;
                return a < b;
            });
            double Wl = 0.0, Syl = 0.0, Syyl = 0.0;
            for (int k = 0; k + 1 < count; ++k) {
                const int i = sorted[k];
                Wl += w[i];
                Syl += w[i] * y[i];
                Syyl += w[i] * y[i] * y[i];
                const int left_count = k + 1;
                if (left_count < cfg.min_samples_leaf || count - left_count < cfg.min_samples_leaf) continue;
                const double xk = X[static_cast<size_t>(sorted[k]) * q + f];
                const double xn = X[static_cast<size_t>(sorted[k + 1]) * q + f];
                if (xk == xn) continue;
                const double Wr = W - Wl;
                const double sse_l = std::max(0.0, Syyl - (Wl > 0.0 ? Syl * Syl / Wl : 0.0));
                const double Sy_r = W * mean - Syl;
                const double Syy_r = (sse + W * mean * mean) - Syyl;  // total Syy minus left part
                const double sse_r = std::max(0.0, Syy_r - (Wr > 0.0 ? Sy_r * Sy_r / Wr : 0.0));
                const double reduction = sse - sse_l - sse_r;
                if (reduction > best.reduction + 1e-15 && reduction > 1e-12) {
                    best = {f, 0.5 * (xk + xn), reduction};
                }
            }
        }
        if (best.feature < 0) return id;

        tree.importance[best.feature] += best.reduction;
        std::vector<int> left, right;
        for (int i : members) {
            (X[static_cast<size_t>(i) * q + best.feature] <= best.threshold ? left : right).push_back(i);
        }
        tree.nodes[id].feature = best.feature;
        tree.nodes[id].threshold = best.threshold;
        const int l = self(self, std::move(left), depth + 1);
        tree.nodes[id].left = l;
        const int r = self(self, std::move(right), depth + 1);
        tree.nodes[id].right = r;
        return id;
    };
    grow(grow, idx, 0);
    return tree;
}

/// Per-component tree benchmark. Binary components are fitted as
/// regression on 0/1 targets; predictions are clamped to [0,1].
struct DtrModel {
    std::vector<std::string> component_labels;
    std::vector<bool> component_binary;
    std::vector<RegressionTree> trees;

    Vec predict_components(const Vec& theta) const {
        Vec out(trees.size());
        for (size_t c = 0; c < trees.size(); ++c) {
            double v = trees[c].predict(theta);
            if (component_binary[c]) v = std::min(std::max(v, 0.0), 1.0);
            out[c] = v;
        }
        return out;
    }
};

inline DtrModel fit_benchmark_dtr(const FitContext& ctx, const TreeConfig& cfg = {}) {
    require(ctx.n_rows >= 2 * cfg.min_samples_leaf, "dataset too small for the leaf-size bound");
    const int q = ctx.n_features - 1;
    Vec X(static_cast<size_t>(ctx.n_rows) * q);
    for (int i = 0; i < ctx.n_rows; ++i) {
        const auto th = ctx.theta_row(i);
        for (int j = 0; j < q; ++j) X[static_cast<size_t>(i) * q + j] = th[j + 1];
    }

    DtrModel model;
    model.component_labels = ctx.component_labels;
    model.component_binary = ctx.component_binary;
    Vec y(ctx.n_rows);
    for (int c = 0; c < ctx.components(); ++c) {
        for (int i = 0; i < ctx.n_rows; ++i) y[i] = ctx.target_row(i)[c];
        model.trees.push_back(fit_regression_tree(X, q, y, ctx.weights, cfg));
    }
    return model;
}

inline DtrModel fit_benchmark_dtr(const ExplainDataset& ds, const ProblemSpec& spec, const TreeConfig& cfg = {}) {
    return fit_benchmark_dtr(make_fit_context(ds, spec), cfg);
}

}  // namespace clemo
