#pragma once

#include <vector>

#include "dflsim/allocation.hpp"
#include "dflsim/link_metrics.hpp"
#include "dflsim/scenario.hpp"

namespace dflsim {

struct SolverConfig {
    double mu = 1e-4;          // proximal penalty constant
    double epsilon = 1e-3;     // relative-change stopping tolerance
    int max_outer_iters = 50;
    int inner_pgd_iters = 100;
    double pgd_step_init = 1.0;  // halved on non-improving steps
    CostWeights weights{};

    void validate() const; // throws validation_error
};

struct BlockRecord {
    int iteration = 0;   // outer iteration, 1-based
    char block = '?';    // 'A', 'X' or 'P'
    double cost_after = 0.0;
};

struct SolverTrace {
    std::vector<BlockRecord> block_records;
    std::vector<CostBreakdown> iteration_costs;  // [0] = initial allocation
    bool converged = false;
    int iterations_used = 0;
};

struct SolveResult {
    Allocation allocation;
    CostBreakdown cost;
    SolverTrace trace;
};

// Nearest-RSU association respecting capacity, identity car->RB matching,
// equal power min(P_m, P_max / N).
Allocation initial_allocation(const Scenario& s);

// Exact minimizer of the proximal upper bound over full associations
// (every car gets exactly one RSU, RSU m hosts at most Delta_m cars),
// with X and P fixed at `current`. The quadratic penalty on a binary block is
// mu/2 times the Hamming distance to the previous iterate, folded into the
// matching edge costs as a switching surcharge.
Allocation block_update_assoc(const Scenario& s, const Allocation& current, const SolverConfig& cfg);

// Same machinery over one-to-one car->RB matchings with A and P fixed.
Allocation block_update_rb(const Scenario& s, const Allocation& current, const SolverConfig& cfg);

// Monotone projected gradient descent on the proximal power objective
// g(P) = C(A, X, P) + mu/2 |P - P_prev|^2 over the box-capped simplex
// {0 <= p_n <= P_m, sum p_n <= P_max}. Only objective-decreasing steps are
// accepted, so g(result) <= g(P_prev).
Allocation block_update_power(const Scenario& s, const Allocation& current, const SolverConfig& cfg);

// Analytic gradient of the global cost with respect to the power vector.
// Cars without a full (RSU, RB) link contribute zero.
std::vector<double> power_gradient(const Scenario& s, const Allocation& alloc,
                                   const CostWeights& weights);

// Euclidean projection onto {0 <= p_i <= per_car_cap, sum p_i <= budget}.
void project_power(std::vector<double>& p, double per_car_cap_w, double budget_w);

// Cyclic BSUM over (A, X, P) with the relative-change stopping rule.
// `init`, when given, must pass check_feasibility and be fully associated.
SolveResult solve(const Scenario& s, const SolverConfig& cfg, const Allocation* init = nullptr);

} // namespace dflsim
