#include <doctest.h>

#include <cmath>

#include "dflsim/errors.hpp"
#include "dflsim/scenario.hpp"

using namespace dflsim;

TEST_CASE("gain model evaluates the LTE path-loss curve") {
    // PL(1 km) = 128.1 dB
    CHECK(gain_model(1000.0, 1.0) == doctest::Approx(std::pow(10.0, -12.81)).epsilon(1e-12));
    // PL difference over a decade of distance is 37.6 dB
    const double ratio = gain_model(100.0, 0.7) / gain_model(1000.0, 0.7);
    CHECK(ratio == doctest::Approx(std::pow(10.0, 3.76)).epsilon(1e-9));
}

TEST_CASE("gain model clamps fading and distance") {
    CHECK(gain_model(1000.0, 0.0) > 0.0); // fading floored at 1e-6
    CHECK(gain_model(0.0, 1.0) == gain_model(1.0, 1.0));
    CHECK(gain_model(0.5, 1.0) == gain_model(1.0, 1.0));
    CHECK(gain_model(1.0, 1e9) == 1.0); // capped
}

TEST_CASE("gain model is strictly decreasing in distance at fixed fading") {
    double prev = gain_model(1.0, 1.0);
    for (double d = 2.0; d <= 3000.0; d *= 1.3) {
        const double g = gain_model(d, 1.0);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("generate_scenario is deterministic per seed") {
    ScenarioConfig cfg;
    cfg.seed = 42;
    const Scenario a = generate_scenario(cfg);
    const Scenario b = generate_scenario(cfg);
    CHECK(a == b); // field-by-field, bit-identical

    cfg.seed = 43;
    const Scenario c = generate_scenario(cfg);
    CHECK(a.car_positions != c.car_positions);
}

TEST_CASE("table-scale scenario has the advertised shape") {
    ScenarioConfig cfg; // defaults: N=30, R=30, Y=30, 1000 m
    const Scenario s = generate_scenario(cfg);
    CHECK(s.car_positions.size() == 30);
    CHECK(s.rsu_positions.size() == 6);
    CHECK(s.cellular_positions.size() == 30);
    CHECK(s.rb_owner.size() == 30);

    // rb_owner is a bijection onto the cellular users
    std::vector<bool> seen(30, false);
    for (int owner : s.rb_owner) {
        CHECK(owner >= 0);
        CHECK(owner < 30);
        CHECK(!seen[owner]);
        seen[owner] = true;
    }

    for (const Vec2& p : s.car_positions) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= cfg.area_side_m);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= cfg.area_side_m);
    }
    for (const Vec2& p : s.rsu_positions) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= cfg.area_side_m);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= cfg.area_side_m);
    }

    for (double g : s.gain_car_rsu) {
        CHECK(g > 0.0);
        CHECK(g <= 1.0);
    }
    for (double g : s.gain_cell_rsu) {
        CHECK(g > 0.0);
        CHECK(g <= 1.0);
    }

    // sigma^2 = PSD(W/Hz) * Omega
    CHECK(s.noise_power_w ==
          doctest::Approx(std::pow(10.0, (cfg.noise_psd_dbm_hz - 30.0) / 10.0) * 180e3));
    CHECK(s.noise_power_w > 0.0);
}

TEST_CASE("config validation names the violated bound") {
    ScenarioConfig cfg;
    cfg.num_rbs = cfg.num_cars - 1;
    cfg.num_cellular = cfg.num_rbs;
    CHECK_THROWS_WITH_AS(generate_scenario(cfg), doctest::Contains("R >= N violated"),
                         validation_error);

    cfg = ScenarioConfig{};
    cfg.num_cars = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("N >= 1"), validation_error);

    cfg = ScenarioConfig{};
    cfg.num_cellular = 29;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("Y == R"), validation_error);

    cfg = ScenarioConfig{};
    cfg.rsu_capacity = 2; // 2 * 6 < 30
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("Delta_m * M >= N"), validation_error);

    cfg = ScenarioConfig{};
    cfg.waterfall_threshold = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("waterfall_threshold > 0"),
                         validation_error);
}

TEST_CASE("capacity defaults to ceil(N/M)") {
    ScenarioConfig cfg;
    CHECK(cfg.effective_rsu_capacity() == 5); // 30 / 6
    cfg.num_cars = 31;
    CHECK(cfg.effective_rsu_capacity() == 6);
    cfg.rsu_capacity = 9;
    CHECK(cfg.effective_rsu_capacity() == 9);
}
