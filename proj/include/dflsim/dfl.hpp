#pragma once

#include <cstdint>
#include <vector>

#include "dflsim/allocation.hpp"
#include "dflsim/scenario.hpp"

namespace dflsim {

// One device's local linear-regression data: row k is a feature vector with
// scalar target outputs[k].
struct DeviceDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> outputs;
    int size() const { return static_cast<int>(outputs.size()); }
};

using ModelWeights = std::vector<double>;

struct FLConfig {
    int global_rounds = 10;
    int subglobal_iters = 2;
    int local_iters = 2;
    double learning_rate = 0.05;
    int devices_per_car = 3;
    int samples_min = 10;  // per-device dataset size range, inclusive
    int samples_max = 20;
    int feature_dim = 5;
    double label_noise_std = 0.0;
    std::uint64_t seed = 1;

    void validate() const; // throws validation_error
};

// All devices of all cars plus the generating ground truth. Per-device data
// comes from streams derived from (seed, car, device), so datasets are stable
// under any execution order.
struct FleetData {
    std::vector<std::vector<DeviceDataset>> cars;
    ModelWeights true_weights;
};

FleetData generate_fleet_data(int num_cars, const FLConfig& cfg);

// `iters` full-batch gradient steps on the mean of 1/2 (d.w - theta)^2 over
// the device's samples. Throws if the weights go non-finite.
ModelWeights local_update(const ModelWeights& w, const DeviceDataset& data, double learning_rate,
                          int iters);

struct MaskedModel {
    ModelWeights weights;
    double size = 0.0;  // dataset size behind this model
    bool ok = true;     // false = dropped by a packet error
};

struct AggregateResult {
    ModelWeights weights;
    bool no_survivors = false;
};

// Size-weighted mean over the unmasked models. With every mask down the mean
// is undefined, so the previous model is returned with no_survivors set.
AggregateResult weighted_aggregate(const std::vector<MaskedModel>& models,
                                   const ModelWeights& previous);

// Mean of 1/2 (d.w - theta)^2 over the union of all device samples.
double global_loss(const ModelWeights& w, const FleetData& data);

struct DflResult {
    ModelWeights global;
    std::vector<double> loss_curve;   // [0] = loss of the initial model
    std::vector<double> per_car_per;  // the PERs the masks were sampled from
};

// Two-tier training loop: per global round, every car runs subglobal_iters
// rounds of {local updates on each device, size-weighted aggregation within
// the car}, then each car's sub-global model survives the uplink with
// probability 1 - q_n and the survivors aggregate into the global model.
// Intra-car links are error-free; a round with no survivors keeps the
// previous global model.
DflResult run_dfl_with_per(const std::vector<double>& per_car_per, const FLConfig& cfg);

// Same loop with the PERs evaluated from a solved allocation.
DflResult run_dfl(const Scenario& s, const Allocation& alloc, const FLConfig& cfg);

} // namespace dflsim
