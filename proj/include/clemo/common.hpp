#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace clemo {

using Vec = std::vector<double>;

/// Caller broke an interface contract (dimension mismatch, bad config).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The problem instance admits no feasible solution, or a solver
/// precondition does not hold for the given parameters.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The rejection sampler's acceptance rate fell below the guard threshold.
class starvation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw contract_error(msg);
}

}  // namespace clemo
