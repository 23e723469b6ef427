#pragma once

#include <cstdint>
#include <vector>

namespace dflsim {

// Decision variables of the cost-minimization problem: binary car->RSU
// association A, binary car->RB assignment X, per-car transmit power P.
struct Allocation {
    int num_cars = 0;
    int num_rsus = 0;
    int num_rbs = 0;
    std::vector<std::uint8_t> assoc;  // N x M, row-major
    std::vector<std::uint8_t> rb;     // N x R, row-major
    std::vector<double> power_w;      // N

    static Allocation zeros(int n, int m, int r) {
        Allocation a;
        a.num_cars = n;
        a.num_rsus = m;
        a.num_rbs = r;
        a.assoc.assign(static_cast<std::size_t>(n) * m, 0);
        a.rb.assign(static_cast<std::size_t>(n) * r, 0);
        a.power_w.assign(static_cast<std::size_t>(n), 0.0);
        return a;
    }

    std::uint8_t& assoc_at(int n, int m) { return assoc[static_cast<std::size_t>(n) * num_rsus + m]; }
    std::uint8_t assoc_at(int n, int m) const { return assoc[static_cast<std::size_t>(n) * num_rsus + m]; }
    std::uint8_t& rb_at(int n, int r) { return rb[static_cast<std::size_t>(n) * num_rbs + r]; }
    std::uint8_t rb_at(int n, int r) const { return rb[static_cast<std::size_t>(n) * num_rbs + r]; }

    // Index of the RSU / RB the car holds, or -1 if none.
    int rsu_of(int n) const {
        for (int m = 0; m < num_rsus; ++m)
            if (assoc_at(n, m)) return m;
        return -1;
    }
    int rb_of(int n) const {
        for (int r = 0; r < num_rbs; ++r)
            if (rb_at(n, r)) return r;
        return -1;
    }

    void set_rsu(int n, int m) {
        for (int j = 0; j < num_rsus; ++j) assoc_at(n, j) = 0;
        if (m >= 0) assoc_at(n, m) = 1;
    }
    void set_rb(int n, int r) {
        for (int j = 0; j < num_rbs; ++j) rb_at(n, j) = 0;
        if (r >= 0) rb_at(n, r) = 1;
    }

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

// alpha weighs the PER sum, beta the latency sum; they must sum to 1.
struct CostWeights {
    double alpha = 0.5;
    double beta = 0.5;
    void validate() const; // throws validation_error
};

struct CostBreakdown {
    std::vector<double> per_car_per;      // q_n
    std::vector<double> per_car_latency;  // T_n, may be +inf
    double per_sum = 0.0;
    double latency_sum = 0.0;
    double total = 0.0;  // alpha * per_sum + beta * latency_sum
};

} // namespace dflsim
