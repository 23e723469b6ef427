#include "dflsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"

namespace dflsim {

namespace {

// Distinct sub-stream per baseline kind so schemes sharing a seed draw
// independent randomness.
std::uint64_t kind_stream(std::uint64_t seed, BaselineKind kind) {
    return mix64(seed ^ mix64(0xb5a1u + static_cast<std::uint64_t>(kind)));
}

} // namespace

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::BaselineA: return "baseline_a";
        case BaselineKind::BaselineP: return "baseline_p";
        case BaselineKind::BaselineR: return "baseline_r";
        case BaselineKind::EqualPower: return "equal_power";
        case BaselineKind::Random: return "random";
    }
    return "?";
}

BaselineKind baseline_from_string(const std::string& name) {
    if (name == "baseline_a") return BaselineKind::BaselineA;
    if (name == "baseline_p") return BaselineKind::BaselineP;
    if (name == "baseline_r") return BaselineKind::BaselineR;
    if (name == "equal_power") return BaselineKind::EqualPower;
    if (name == "random") return BaselineKind::Random;
    throw validation_error("unknown baseline scheme '" + name + "'");
}

Allocation random_feasible_allocation(const Scenario& s, std::uint64_t seed) {
    const int n_cars = s.config.num_cars;
    const int n_rsus = s.config.num_rsus;
    const int n_rbs = s.config.num_rbs;
    Rng rng(mix64(seed));

    Allocation a = Allocation::zeros(n_cars, n_rsus, n_rbs);

    // Perfect car->RB matching: shuffle the RB ids and hand out the first N.
    std::vector<int> rbs(n_rbs);
    std::iota(rbs.begin(), rbs.end(), 0);
    rng.shuffle(rbs);
    for (int n = 0; n < n_cars; ++n) a.set_rb(n, rbs[n]);

    std::vector<int> remaining(n_rsus, s.rsu_capacity);
    for (int n = 0; n < n_cars; ++n) {
        int pick = rng.uniform_int(0, n_rsus - 1);
        while (remaining[pick] <= 0) pick = (pick + 1) % n_rsus;
        a.set_rsu(n, pick);
        remaining[pick] -= 1;
    }

    const double cap = s.config.car_max_power_w();
    double sum = 0.0;
    for (int n = 0; n < n_cars; ++n) {
        a.power_w[n] = rng.uniform_pos(cap);
        sum += a.power_w[n];
    }
    const double budget = s.config.total_power_budget_w();
    if (sum > budget) {
        const double scale = budget / sum; // scales down, so the box still holds
        for (double& p : a.power_w) p *= scale;
    }
    return a;
}

SolveResult run_baseline(const Scenario& s, BaselineKind kind, const SolverConfig& cfg,
                         std::uint64_t seed) {
    cfg.validate();

    Allocation current;
    if (kind == BaselineKind::EqualPower) {
        current = initial_allocation(s); // association/RBs get optimized below
    } else {
        current = random_feasible_allocation(s, kind_stream(seed, kind));
    }

    SolverTrace trace;
    trace.iteration_costs.push_back(global_cost(s, current, cfg.weights));

    const bool update_a = kind == BaselineKind::BaselineA || kind == BaselineKind::EqualPower;
    const bool update_x = kind == BaselineKind::BaselineR || kind == BaselineKind::EqualPower;
    const bool update_p = kind == BaselineKind::BaselineP;

    if (kind != BaselineKind::Random) {
        for (int k = 1; k <= cfg.max_outer_iters; ++k) {
            const double before = trace.iteration_costs.back().total;

            if (update_a) {
                current = block_update_assoc(s, current, cfg);
                trace.block_records.push_back({k, 'A', global_cost(s, current, cfg.weights).total});
            }
            if (update_x) {
                current = block_update_rb(s, current, cfg);
                trace.block_records.push_back({k, 'X', global_cost(s, current, cfg.weights).total});
            }
            if (update_p) {
                current = block_update_power(s, current, cfg);
                trace.block_records.push_back({k, 'P', global_cost(s, current, cfg.weights).total});
            }

            const CostBreakdown after = global_cost(s, current, cfg.weights);
            trace.iteration_costs.push_back(after);
            trace.iterations_used = k;

            if (before == 0.0 || std::abs((before - after.total) / before) <= cfg.epsilon) {
                trace.converged = true;
                break;
            }
        }
    } else {
        trace.converged = true;
    }

    SolveResult result;
    result.cost = trace.iteration_costs.back();
    result.allocation = std::move(current);
    result.trace = std::move(trace);
    return result;
}

} // namespace dflsim
