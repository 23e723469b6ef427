#pragma once

#include <string>
#include <vector>

#include "dflsim/allocation.hpp"
#include "dflsim/scenario.hpp"

namespace dflsim {

// PER and transmission latency a car would see on a hypothetical link
// (rsu, rb, power). This is the one place the closed-form link math lives;
// the public per-car operations and the solver's edge costs both go through it.
struct LinkCostTerms {
    double per_prob = 0.0;   // 1 - exp(-theta * I / (p h)); 1 at p = 0
    double latency_s = 0.0;  // Q / (Omega log2(1 + p h / I)); +inf at p = 0
};

LinkCostTerms link_cost_terms(const Scenario& s, int car, int rsu, int rb, double power_w);

// SINR of `car` transmitting to `rsu` on `rb`. Requires a_{n,m} = x_{n,r} = 1.
double sinr(const Scenario& s, const Allocation& alloc, int car, int rsu, int rb);

// Achievable uplink rate in bit/s for a given SINR.
double rate(const Scenario& s, double gamma);

// Per-car PER under the waterfall model; 0 if the car is unassociated or has
// no RB, 1 if it is connected with zero power.
double packet_error_rate(const Scenario& s, const Allocation& alloc, int car);

// Per-car uplink delay in seconds; 0 on a zero mask, +inf if connected with
// zero rate.
double transmission_latency(const Scenario& s, const Allocation& alloc, int car);

// alpha * sum(q_n) + beta * sum(T_n), with per-car terms retained.
CostBreakdown global_cost(const Scenario& s, const Allocation& alloc, const CostWeights& weights);

struct Violation {
    std::string constraint;  // "21a" .. "21i"
    int index = -1;          // offending car / RSU / RB, or -1 for aggregates
    std::string detail;
};

// Empty iff all nine constraints of the joint problem hold. Power bounds are
// checked with 1e-9 relative slack so exactly-saturated budgets pass.
std::vector<Violation> check_feasibility(const Scenario& s, const Allocation& alloc);

} // namespace dflsim
