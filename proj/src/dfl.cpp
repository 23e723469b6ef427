#include "dflsim/dfl.hpp"

#include <cmath>
#include <sstream>

#include "dflsim/errors.hpp"
#include "dflsim/link_metrics.hpp"
#include "dflsim/rng.hpp"

namespace dflsim {

namespace {

std::vector<double> loss_gradient(const ModelWeights& w, const DeviceDataset& data) {
    std::vector<double> grad(w.size(), 0.0);
    const double inv_k = 1.0 / data.size();
    for (int k = 0; k < data.size(); ++k) {
        const auto& d = data.inputs[k];
        double pred = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) pred += d[j] * w[j];
        const double residual = pred - data.outputs[k];
        for (std::size_t j = 0; j < w.size(); ++j) grad[j] += inv_k * residual * d[j];
    }
    return grad;
}

} // namespace

void FLConfig::validate() const {
    std::ostringstream os;
    auto fail = [&os](const char* bound) {
        throw validation_error(std::string(bound) + " violated" + os.str());
    };
    os << " (global_rounds=" << global_rounds << ", subglobal_iters=" << subglobal_iters
       << ", local_iters=" << local_iters << ", learning_rate=" << learning_rate
       << ", devices_per_car=" << devices_per_car << ", samples=[" << samples_min << ","
       << samples_max << "], feature_dim=" << feature_dim << ", label_noise_std="
       << label_noise_std << ")";
    if (global_rounds < 1) fail("global_rounds >= 1");
    if (subglobal_iters < 1) fail("subglobal_iters >= 1");
    if (local_iters < 1) fail("local_iters >= 1");
    if (!(learning_rate > 0.0)) fail("learning_rate > 0");
    if (devices_per_car < 1) fail("devices_per_car >= 1");
    if (samples_min < 1 || samples_max < samples_min) fail("1 <= samples_min <= samples_max");
    if (feature_dim < 1) fail("feature_dim >= 1");
    if (!(label_noise_std >= 0.0)) fail("label_noise_std >= 0");
}

FleetData generate_fleet_data(int num_cars, const FLConfig& cfg) {
    cfg.validate();
    FleetData fleet;

    Rng truth_rng(mix64(cfg.seed ^ 0x7247757468ULL));
    fleet.true_weights.resize(cfg.feature_dim);
    for (double& w : fleet.true_weights) w = truth_rng.normal();

    fleet.cars.resize(num_cars);
    for (int n = 0; n < num_cars; ++n) {
        fleet.cars[n].resize(cfg.devices_per_car);
        for (int u = 0; u < cfg.devices_per_car; ++u) {
            Rng rng(mix64(cfg.seed) ^ mix64((static_cast<std::uint64_t>(n) << 20) + u + 1));
            DeviceDataset& ds = fleet.cars[n][u];
            const int k = rng.uniform_int(cfg.samples_min, cfg.samples_max);
            ds.inputs.resize(k);
            ds.outputs.resize(k);
            for (int i = 0; i < k; ++i) {
                ds.inputs[i].resize(cfg.feature_dim);
                double y = 0.0;
                for (int j = 0; j < cfg.feature_dim; ++j) {
                    ds.inputs[i][j] = rng.normal();
                    y += ds.inputs[i][j] * fleet.true_weights[j];
                }
                if (cfg.label_noise_std > 0.0) y += cfg.label_noise_std * rng.normal();
                ds.outputs[i] = y;
            }
        }
    }
    return fleet;
}

ModelWeights local_update(const ModelWeights& w, const DeviceDataset& data, double learning_rate,
                          int iters) {
    if (data.size() < 1) throw contract_error("local_update: empty dataset");
    for (const auto& d : data.inputs) {
        if (d.size() != w.size()) throw contract_error("local_update: feature/weight dimension mismatch");
    }
    ModelWeights out = w;
    for (int it = 0; it < iters; ++it) {
        const std::vector<double> grad = loss_gradient(out, data);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] -= learning_rate * grad[j];
    }
    for (double v : out) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "local_update diverged (non-finite weights) with learning_rate=" << learning_rate;
            throw validation_error(os.str());
        }
    }
    return out;
}

AggregateResult weighted_aggregate(const std::vector<MaskedModel>& models,
                                   const ModelWeights& previous) {
    AggregateResult out;
    double total = 0.0;
    for (const MaskedModel& m : models) {
        if (!m.ok) continue;
        if (out.weights.empty()) {
            out.weights.assign(m.weights.size(), 0.0);
        } else if (m.weights.size() != out.weights.size()) {
            throw contract_error("weighted_aggregate: weight dimension mismatch");
        }
        for (std::size_t j = 0; j < m.weights.size(); ++j) out.weights[j] += m.size * m.weights[j];
        total += m.size;
    }
    if (total <= 0.0) {
        out.weights = previous;
        out.no_survivors = true;
        return out;
    }
    for (double& v : out.weights) v /= total;
    return out;
}

double global_loss(const ModelWeights& w, const FleetData& data) {
    double acc = 0.0;
    long long count = 0;
    for (const auto& car : data.cars) {
        for (const DeviceDataset& ds : car) {
            for (int k = 0; k < ds.size(); ++k) {
                double pred = 0.0;
                for (std::size_t j = 0; j < w.size(); ++j) pred += ds.inputs[k][j] * w[j];
                const double r = pred - ds.outputs[k];
                acc += 0.5 * r * r;
            }
            count += ds.size();
        }
    }
    return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

DflResult run_dfl_with_per(const std::vector<double>& per_car_per, const FLConfig& cfg) {
    cfg.validate();
    const int num_cars = static_cast<int>(per_car_per.size());
    const FleetData fleet = generate_fleet_data(num_cars, cfg);

    DflResult result;
    result.per_car_per = per_car_per;

    ModelWeights global(cfg.feature_dim, 0.0);
    result.loss_curve.push_back(global_loss(global, fleet));

    // One mask stream per car, advanced once per global round.
    std::vector<Rng> mask_rng;
    mask_rng.reserve(num_cars);
    for (int n = 0; n < num_cars; ++n) {
        mask_rng.emplace_back(mix64(cfg.seed ^ 0x6d61736bULL) ^ mix64(n + 1));
    }

    std::vector<double> car_sizes(num_cars, 0.0);
    for (int n = 0; n < num_cars; ++n) {
        for (const DeviceDataset& ds : fleet.cars[n]) car_sizes[n] += ds.size();
    }

    for (int round = 0; round < cfg.global_rounds; ++round) {
        std::vector<MaskedModel> subglobals(num_cars);
        for (int n = 0; n < num_cars; ++n) {
            ModelWeights car_model = global;
            for (int s = 0; s < cfg.subglobal_iters; ++s) {
                std::vector<MaskedModel> locals;
                locals.reserve(fleet.cars[n].size());
                for (const DeviceDataset& ds : fleet.cars[n]) {
                    locals.push_back({local_update(car_model, ds, cfg.learning_rate, cfg.local_iters),
                                      static_cast<double>(ds.size()), true});
                }
                car_model = weighted_aggregate(locals, car_model).weights;
            }
            subglobals[n] = {std::move(car_model), car_sizes[n],
                             mask_rng[n].uniform01() >= per_car_per[n]};
        }
        global = weighted_aggregate(subglobals, global).weights;
        result.loss_curve.push_back(global_loss(global, fleet));
    }

    result.global = std::move(global);
    return result;
}

DflResult run_dfl(const Scenario& s, const Allocation& alloc, const FLConfig& cfg) {
    if (!check_feasibility(s, alloc).empty()) {
        throw contract_error("run_dfl: allocation is infeasible");
    }
    std::vector<double> per(alloc.num_cars, 0.0);
    for (int n = 0; n < alloc.num_cars; ++n) {
        if (alloc.rsu_of(n) < 0 || alloc.rb_of(n) < 0) {
            throw contract_error("run_dfl: allocation must be fully associated");
        }
        per[n] = packet_error_rate(s, alloc, n);
    }
    return run_dfl_with_per(per, cfg);
}

} // namespace dflsim
