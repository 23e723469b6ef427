#include "dflsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"

namespace dflsim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw validation_error(msg); }

double distance(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

} // namespace

void ScenarioConfig::validate() const {
    std::ostringstream os;
    if (num_cars < 1) {
        os << "N >= 1 violated (N=" << num_cars << ")";
        fail(os.str());
    }
    if (num_rsus < 1) {
        os << "M >= 1 violated (M=" << num_rsus << ")";
        fail(os.str());
    }
    if (num_rbs < num_cars) {
        os << "R >= N violated (R=" << num_rbs << ", N=" << num_cars << ")";
        fail(os.str());
    }
    if (num_cellular != num_rbs) {
        os << "Y == R violated (Y=" << num_cellular << ", R=" << num_rbs << ")";
        fail(os.str());
    }
    if (rsu_capacity < 0) {
        os << "rsu_capacity >= 0 violated (rsu_capacity=" << rsu_capacity << ")";
        fail(os.str());
    }
    const long long cap = static_cast<long long>(effective_rsu_capacity()) * num_rsus;
    if (cap < num_cars) {
        os << "Delta_m * M >= N violated (Delta_m=" << effective_rsu_capacity()
           << ", M=" << num_rsus << ", N=" << num_cars << ")";
        fail(os.str());
    }
    if (!(area_side_m > 0.0)) {
        os << "area_side_m > 0 violated (area_side_m=" << area_side_m << ")";
        fail(os.str());
    }
    if (!(rb_bandwidth_hz > 0.0)) {
        os << "rb_bandwidth_hz > 0 violated (rb_bandwidth_hz=" << rb_bandwidth_hz << ")";
        fail(os.str());
    }
    if (!(waterfall_threshold > 0.0)) {
        os << "waterfall_threshold > 0 violated (waterfall_threshold=" << waterfall_threshold << ")";
        fail(os.str());
    }
    if (!(model_size_bits > 0.0)) {
        os << "model_size_bits > 0 violated (model_size_bits=" << model_size_bits << ")";
        fail(os.str());
    }
    // dBm -> W conversion is positive for any finite dBm; reject non-finite inputs.
    for (const auto& [name, dbm] : {std::pair<const char*, double>{"car_max_power_dbm", car_max_power_dbm},
                                    {"total_power_budget_dbm", total_power_budget_dbm},
                                    {"cellular_power_dbm", cellular_power_dbm},
                                    {"noise_psd_dbm_hz", noise_psd_dbm_hz}}) {
        if (!std::isfinite(dbm)) {
            os << name << " finite violated (" << name << "=" << dbm << ")";
            fail(os.str());
        }
    }
}

double gain_model(double distance_m, double fading_draw) {
    const double d = std::max(distance_m, 1.0);
    const double f = std::max(fading_draw, 1e-6);
    const double path_loss_db = 128.1 + 37.6 * std::log10(d / 1000.0);
    return std::min(1.0, std::pow(10.0, -path_loss_db / 10.0) * f);
}

Scenario generate_scenario(const ScenarioConfig& config) {
    config.validate();

    const int n = config.num_cars;
    const int m = config.num_rsus;
    const int y = config.num_cellular;
    const int r = config.num_rbs;
    const double side = config.area_side_m;

    Scenario s;
    s.config = config;
    s.rsu_capacity = config.effective_rsu_capacity();
    s.noise_power_w = dbm_to_watt(config.noise_psd_dbm_hz) * config.rb_bandwidth_hz;

    Rng rng(config.seed);

    s.car_positions.reserve(n);
    for (int i = 0; i < n; ++i) {
        s.car_positions.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
    }
    s.cellular_positions.reserve(y);
    for (int i = 0; i < y; ++i) {
        s.cellular_positions.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
    }

    // Jittered grid: cols x rows cells covering the area, one RSU per cell.
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
    const int rows = (m + cols - 1) / cols;
    const double cell_w = side / cols;
    const double cell_h = side / rows;
    s.rsu_positions.reserve(m);
    for (int j = 0; j < m; ++j) {
        const int cx = j % cols;
        const int cy = j / cols;
        s.rsu_positions.push_back(
            {cx * cell_w + rng.uniform(0.0, cell_w), cy * cell_h + rng.uniform(0.0, cell_h)});
    }

    s.gain_car_rsu.resize(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            s.gain_car_rsu[static_cast<std::size_t>(i) * m + j] =
                gain_model(distance(s.car_positions[i], s.rsu_positions[j]), rng.exponential());
        }
    }
    s.gain_cell_rsu.resize(static_cast<std::size_t>(y) * m);
    for (int i = 0; i < y; ++i) {
        for (int j = 0; j < m; ++j) {
            s.gain_cell_rsu[static_cast<std::size_t>(i) * m + j] =
                gain_model(distance(s.cellular_positions[i], s.rsu_positions[j]), rng.exponential());
        }
    }

    s.rb_owner.resize(r);
    for (int i = 0; i < r; ++i) s.rb_owner[i] = i;

    return s;
}

} // namespace dflsim
