#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dflsim/baselines.hpp"
#include "dflsim/bsum.hpp"
#include "dflsim/dfl.hpp"
#include "dflsim/scenario.hpp"

namespace dflsim {

enum class SweepAxis { None, Mu, AlphaBeta, NumCars, NumRsus };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name); // throws validation_error

// One experiment: a scheme set evaluated over seeds, optionally swept along
// one axis, optionally followed by the toy training stage.
struct ExperimentSpec {
    ScenarioConfig scenario;
    SolverConfig solver;
    std::vector<std::string> schemes = {"proposed"};
    SweepAxis axis = SweepAxis::None;
    std::vector<double> sweep_values;
    int num_seeds = 30;
    std::optional<FLConfig> fl;
    std::string output_dir = "out";

    void validate() const; // throws validation_error
};

// Strict JSON: unknown keys anywhere are rejected, all fields optional with
// the defaults above.
ExperimentSpec parse_spec(const std::string& json_text);
ExperimentSpec load_spec(const std::string& path);

// Sweep application: mu -> solver.mu, alpha_beta -> (alpha, beta = 1 - alpha),
// num_cars -> N (R and Y follow so R >= N and Y = R stay valid),
// num_rsus -> M.
void apply_sweep(SweepAxis axis, double value, ScenarioConfig& scenario, SolverConfig& solver);

struct ResultRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    std::string scheme;
    std::string seed;        // seed number, or "mean"/"std" for summary rows
    int iteration = 0;       // 0 = initial allocation; -1 on summary rows
    double per_sum = 0.0;
    double latency_sum = 0.0;
    double c_global = 0.0;
    double converged = 0.0;  // 0/1 on data rows, converged fraction on "mean"
    double iters_used = 0.0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct FlLossRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    std::string scheme;
    std::string seed;
    int round = 0;
    double global_loss = 0.0;
};

struct ErrorRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    std::string scheme;
    std::string seed;
    std::string message;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<FlLossRow> fl_rows;
    std::vector<ErrorRow> errors;
};

// Runs every (sweep value, scheme, seed) cell; scenario seed is base_seed +
// seed index, so any subset of seeds reproduces in isolation. Cells are
// independent and can run on `jobs` threads; rows merge in canonical order
// (sweep value, scheme, seed, iteration) regardless of schedule. Per-cell
// failures become error records and the run continues.
ExperimentResult run_experiment(const ExperimentSpec& spec, int jobs = 1);

inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,scheme,seed,iteration,per_sum,latency_sum,c_global,converged,iters_used";

std::string format_csv(const std::vector<ResultRow>& rows); // throws contract_error if empty
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

std::vector<ResultRow> parse_csv_text(const std::string& text);
std::vector<ResultRow> parse_csv(const std::string& path);

void emit_fl_csv(const std::vector<FlLossRow>& rows, const std::string& path);
void emit_errors_csv(const std::vector<ErrorRow>& rows, const std::string& path);

} // namespace dflsim
