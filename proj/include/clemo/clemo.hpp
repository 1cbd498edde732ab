#pragma once

#include "clemo/common.hpp"
#include "clemo/cvrp.hpp"
#include "clemo/instances.hpp"
#include "clemo/knapsack.hpp"
#include "clemo/lbfgs.hpp"
#include "clemo/linalg.hpp"
#include "clemo/metrics.hpp"
#include "clemo/problem.hpp"
#include "clemo/regression_tree.hpp"
#include "clemo/rng.hpp"
#include "clemo/sampling.hpp"
#include "clemo/serialization.hpp"
#include "clemo/shortest_path.hpp"
#include "clemo/surrogate.hpp"
