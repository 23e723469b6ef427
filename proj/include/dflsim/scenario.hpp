#pragma once

#include <cstdint>
#include <vector>

#include "dflsim/units.hpp"

namespace dflsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Network configuration. Powers and the noise PSD are in dBm at this boundary
// and converted to watts exactly once, inside generate_scenario.
struct ScenarioConfig {
    double area_side_m = 1000.0;
    int num_cars = 30;                     // N
    int num_rsus = 6;                      // M
    int num_cellular = 30;                 // Y, must equal num_rbs
    int num_rbs = 30;                      // R
    double rb_bandwidth_hz = 180e3;        // Omega
    double noise_psd_dbm_hz = -174.0;
    double car_max_power_dbm = 24.0;       // per-car cap
    double total_power_budget_dbm = 30.0;  // fleet-wide cap
    double cellular_power_dbm = -40.0;     // interferer transmit power (power-controlled uplink)
    double waterfall_threshold = 1.0;      // theta in the PER curve
    double model_size_bits = 40e3;         // uplink payload per round
    int rsu_capacity = 0;                  // cars per RSU; 0 = ceil(N/M)
    std::uint64_t seed = 1;

    int effective_rsu_capacity() const {
        return rsu_capacity > 0 ? rsu_capacity : (num_cars + num_rsus - 1) / num_rsus;
    }
    double car_max_power_w() const { return dbm_to_watt(car_max_power_dbm); }
    double total_power_budget_w() const { return dbm_to_watt(total_power_budget_dbm); }
    double cellular_power_w() const { return dbm_to_watt(cellular_power_dbm); }

    // Throws validation_error naming the violated bound.
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Immutable network snapshot. Gains are linear power gains in (0, 1], flat
// across resource blocks: one fading draw per link.
struct Scenario {
    ScenarioConfig config;
    std::vector<Vec2> car_positions;
    std::vector<Vec2> rsu_positions;
    std::vector<Vec2> cellular_positions;
    std::vector<double> gain_car_rsu;   // N x M, row-major
    std::vector<double> gain_cell_rsu;  // Y x M, row-major
    std::vector<int> rb_owner;          // RB r -> cellular user occupying it
    double noise_power_w = 0.0;         // over one RB bandwidth
    int rsu_capacity = 0;               // resolved Delta_m

    double car_gain(int car, int rsu) const {
        return gain_car_rsu[static_cast<std::size_t>(car) * config.num_rsus + rsu];
    }
    double cell_gain(int user, int rsu) const {
        return gain_cell_rsu[static_cast<std::size_t>(user) * config.num_rsus + rsu];
    }
    // Interference-plus-noise power (watts) seen at `rsu` on resource block `rb`.
    double interference_noise_w(int rb, int rsu) const {
        return cell_gain(rb_owner[static_cast<std::size_t>(rb)], rsu) * config.cellular_power_w() +
               noise_power_w;
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// LTE-style path loss 128.1 + 37.6 log10(d_km) with an externally supplied
// unit-mean exponential (Rayleigh power) fading draw. Distance is floored at
// 1 m, fading at 1e-6, and the result is capped at 1, so the gain is always
// in (0, 1].
double gain_model(double distance_m, double fading_draw);

// Deterministic for a fixed config (positions, jitter and fading all come from
// config.seed). RSUs sit on a jittered grid; cars and cellular users are
// uniform in the area; RB r is owned by cellular user r.
Scenario generate_scenario(const ScenarioConfig& config);

} // namespace dflsim
