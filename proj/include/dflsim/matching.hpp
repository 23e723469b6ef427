#pragma once

#include <vector>

namespace dflsim {

// Minimum-cost assignment of every left node to exactly one right node, where
// right node j can host at most capacity[j] left nodes. cost is row-major
// num_left x num_right; non-finite entries are clamped to a large finite
// sentinel so a full assignment always exists when sum(capacity) >= num_left.
//
// Successive shortest augmenting paths with Bellman-Ford on the residual
// graph. Left nodes are augmented in ascending index order and relaxation
// scans edges in ascending (left, right) order with strict improvement, so
// ties resolve to the lowest indices and the result is deterministic.
//
// Returns the right index per left node. Throws contract_error if
// sum(capacity) < num_left.
std::vector<int> min_cost_assignment(int num_left, int num_right,
                                     const std::vector<double>& cost,
                                     const std::vector<int>& capacity);

} // namespace dflsim
