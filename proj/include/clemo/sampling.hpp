#pragma once

// Training-set construction: perturb the present parameters, keep only
// feasible/bounded draws, solve each accepted instance, and attach RBF
// proximity weights.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "clemo/problem.hpp"
#include "clemo/rng.hpp"

namespace clemo {

struct SamplerConfig {
    enum class Distribution { gaussian, uniform_interval };

    int samples = 1000;  // accepted perturbations; the dataset adds the present row
    double spread = 0.2;
    uint64_t seed = 0;
    Distribution distribution = Distribution::gaussian;
    double uniform_lo = -1.0;
    double uniform_hi = 1.0;
};

struct DatasetRow {
    Vec theta;
    SolverRecord record;
    double weight = 1.0;
};

struct ExplainDataset {
    std::vector<std::string> theta_names;
    std::vector<std::string> decision_labels;
    std::vector<bool> binary_mask;  // per decision variable
    std::vector<DatasetRow> rows;   // rows[0] is the present problem
    double kernel_width = 0.0;      // nu

    static constexpr int present_index = 0;

    int q() const { return static_cast<int>(theta_names.size()); }
    int p() const { return static_cast<int>(decision_labels.size()); }
    int size() const { return static_cast<int>(rows.size()); }
};

inline double euclidean_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Sets w_i = exp(-d(theta_i, theta0)^2 / nu^2) with nu the mean distance
/// over the whole dataset (the present row contributes distance 0). When
/// every distance is zero the kernel width is undefined; all weights
/// become 1 and a warning is emitted.
inline void rbf_weights(ExplainDataset& ds, const Vec& theta0) {
    require(!ds.rows.empty(), "dataset has no rows");
    Vec dist(ds.rows.size());
    double mean = 0.0;
    for (size_t i = 0; i < ds.rows.size(); ++i) {
        dist[i] = euclidean_distance(ds.rows[i].theta, theta0);
        mean += dist[i];
    }
    mean /= static_cast<double>(ds.rows.size());
    ds.kernel_width = mean;
    if (mean == 0.0) {
        std::cerr << "warning: all samples coincide with the present parameters; "
                     "kernel width undefined, using unit weights\n";
        for (auto& row : ds.rows) row.weight = 1.0;
        return;
    }
    for (size_t i = 0; i < ds.rows.size(); ++i) ds.rows[i].weight = std::exp(-dist[i] * dist[i] / (mean * mean));
}

/// Builds the explanation dataset: row 0 is the present problem, followed
/// by cfg.samples accepted perturbations, each solved by `solve`.
/// Rejected draws (infeasible/unbounded or outside the solver's domain)
/// are redrawn; a guard trips if the acceptance rate stays below 0.1%
/// after a million draws.
inline ExplainDataset sample_dataset(const ProblemSpec& spec,
                                     const std::function<SolverRecord(const ParamVector&)>& solve,
                                     const ParamVector& theta0, const SamplerConfig& cfg) {
    require(cfg.samples >= 1, "sample count must be at least 1");
    require(cfg.spread >= 0.0, "spread must be nonnegative");
    require(theta0.size() == spec.q(), "present parameter dimension mismatch");
    if (!is_feasible_and_bounded(spec, theta0))
        throw infeasible_error("present problem is infeasible or unbounded");

    ExplainDataset ds;
    ds.theta_names = spec.theta_names;
    ds.decision_labels = spec.decision_labels;
    ds.binary_mask = spec.binary_mask;
    ds.rows.push_back({theta0.values, solve(theta0), 1.0});

    Rng rng(cfg.seed);
    const int q = spec.q();
    ParamVector cand;
    cand.names = theta0.names;
    cand.values.resize(q);

    long draws = 0;
    int accepted = 0;
    while (accepted < cfg.samples) {
        ++draws;
        if (draws >= 1000000 && accepted < 0.001 * static_cast<double>(draws))
            throw starvation_error("sampler acceptance rate below 0.1% after 1e6 draws");
        for (int j = 0; j < q; ++j) {
            if (cfg.distribution == SamplerConfig::Distribution::gaussian) {
                cand.values[j] = theta0.values[j] + cfg.spread * std::abs(theta0.values[j]) * rng.gaussian();
            } else {
                cand.values[j] = rng.uniform(cfg.uniform_lo, cfg.uniform_hi);
            }
        }
        if (!is_feasible_and_bounded(spec, cand)) continue;
        ds.rows.push_back({cand.values, solve(cand), 1.0});
        ++accepted;
    }
    rbf_weights(ds, theta0.values);
    return ds;
}

// ---- CSV persistence ----------------------------------------------------

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void save_dataset_csv(const ExplainDataset& ds, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "cannot open dataset file for writing: " + path);
    for (const auto& name : ds.theta_names) out << name << ",";
    out << "f";
    for (const auto& name : ds.decision_labels) out << "," << name;
    out << ",weight\n";
    for (const auto& row : ds.rows) {
        for (double v : row.theta) out << format_double(v) << ",";
        out << format_double(row.record.objective_value);
        for (double v : row.record.decision.values) out << "," << format_double(v);
        out << "," << format_double(row.weight) << "\n";
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc(), "malformed numeric field in CSV: " + s);
    return v;
}

/// Reloads a dataset written by save_dataset_csv. The decision mask is
/// not part of the tabular schema; pass it when the spec is at hand.
/// The kernel width is recomputed from the stored rows (row 0 is the
/// present problem by construction).
inline ExplainDataset load_dataset_csv(const std::string& path, const std::vector<bool>& binary_mask = {}) {
    std::ifstream in(path);
    require(in.good(), "cannot open dataset file: " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "empty dataset file: " + path);

    const auto header = split_csv_line(line);
    int f_col = -1;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == "f") {
            f_col = static_cast<int>(i);
            break;
        }
    require(f_col > 0 && header.back() == "weight", "dataset header must be theta columns, f, decisions, weight");

    ExplainDataset ds;
    ds.theta_names.assign(header.begin(), header.begin() + f_col);
    ds.decision_labels.assign(header.begin() + f_col + 1, header.end() - 1);
    ds.binary_mask = binary_mask.empty() ? std::vector<bool>(ds.decision_labels.size(), false) : binary_mask;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        require(fields.size() == header.size(), "CSV row width does not match header");
        DatasetRow row;
        for (int j = 0; j < f_col; ++j) row.theta.push_back(parse_double(fields[j]));
        row.record.objective_value = parse_double(fields[f_col]);
        for (size_t j = f_col + 1; j + 1 < fields.size(); ++j)
            row.record.decision.values.push_back(parse_double(fields[j]));
        row.record.decision.binary_mask = ds.binary_mask;
        row.weight = parse_double(fields.back());
        ds.rows.push_back(std::move(row));
    }
    require(!ds.rows.empty(), "dataset file has no rows: " + path);

    double mean = 0.0;
    for (const auto& row : ds.rows) mean += euclidean_distance(row.theta, ds.rows[0].theta);
    ds.kernel_width = mean / static_cast<double>(ds.rows.size());
    return ds;
}

}  // namespace clemo
