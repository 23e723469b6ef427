#pragma once

#include <cstdint>
#include <string>

#include "dflsim/bsum.hpp"

namespace dflsim {

// Comparison schemes: each keeps exactly one BSUM block and randomizes (or
// freezes) the other decisions.
enum class BaselineKind {
    BaselineA,   // BSUM association, random RBs, random powers
    BaselineP,   // BSUM power, random association, random RBs
    BaselineR,   // BSUM RBs, random association, random powers
    EqualPower,  // BSUM association + RBs, power frozen at the equal split
    Random,      // everything randomized (oracle floor in tests)
};

std::string to_string(BaselineKind kind);
BaselineKind baseline_from_string(const std::string& name); // throws validation_error

// Uniform random perfect car->RB matching, random association respecting the
// RSU capacity, powers uniform on (0, P_m] rescaled into the budget.
// Reproducible per seed.
Allocation random_feasible_allocation(const Scenario& s, std::uint64_t seed);

// Iterates the scheme's BSUM block with the solver's stopping rule; frozen
// blocks keep their random (or equal-power) values throughout. The trace has
// the same shape as a full solve so schemes plot on a common iteration axis.
SolveResult run_baseline(const Scenario& s, BaselineKind kind, const SolverConfig& cfg,
                         std::uint64_t seed);

} // namespace dflsim
