#include "dflsim/link_metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dflsim/errors.hpp"

namespace dflsim {

namespace {

constexpr double kFeasTolRel = 1e-9;
constexpr double kLn2 = 0.6931471805599453;

// log2(1 + x) without the precision loss of forming 1 + x for tiny x.
double log2_1p(double x) { return std::log1p(x) / kLn2; }

// 0 * inf would poison the blend when one weight is switched off entirely.
double weighted(double w, double v) { return w > 0.0 ? w * v : 0.0; }

} // namespace

void CostWeights::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0) ||
        std::abs(alpha + beta - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "alpha + beta = 1 violated (alpha=" << alpha << ", beta=" << beta << ")";
        throw validation_error(os.str());
    }
}

LinkCostTerms link_cost_terms(const Scenario& s, int car, int rsu, int rb, double power_w) {
    const double interference = s.interference_noise_w(rb, rsu);
    const double received = power_w * s.car_gain(car, rsu);

    LinkCostTerms t;
    // p = 0: exponent -> -inf, exp -> 0, q -> 1 (the limit value).
    t.per_prob = 1.0 - std::exp(-s.config.waterfall_threshold * interference / received);

    const double gamma = received / interference;
    const double rate_bps = s.config.rb_bandwidth_hz * log2_1p(gamma);
    t.latency_s = s.config.model_size_bits / rate_bps; // +inf when rate is 0
    return t;
}

double sinr(const Scenario& s, const Allocation& alloc, int car, int rsu, int rb) {
    if (!alloc.assoc_at(car, rsu) || !alloc.rb_at(car, rb)) {
        std::ostringstream os;
        os << "sinr requires a_{n,m} = x_{n,r} = 1 (car=" << car << ", rsu=" << rsu
           << ", rb=" << rb << ")";
        throw contract_error(os.str());
    }
    return alloc.power_w[car] * s.car_gain(car, rsu) / s.interference_noise_w(rb, rsu);
}

double rate(const Scenario& s, double gamma) {
    return s.config.rb_bandwidth_hz * log2_1p(gamma);
}

double packet_error_rate(const Scenario& s, const Allocation& alloc, int car) {
    const int m = alloc.rsu_of(car);
    const int r = alloc.rb_of(car);
    if (m < 0 || r < 0) return 0.0;
    return link_cost_terms(s, car, m, r, alloc.power_w[car]).per_prob;
}

double transmission_latency(const Scenario& s, const Allocation& alloc, int car) {
    const int m = alloc.rsu_of(car);
    const int r = alloc.rb_of(car);
    if (m < 0 || r < 0) return 0.0;
    return link_cost_terms(s, car, m, r, alloc.power_w[car]).latency_s;
}

CostBreakdown global_cost(const Scenario& s, const Allocation& alloc, const CostWeights& weights) {
    weights.validate();
    CostBreakdown out;
    out.per_car_per.resize(alloc.num_cars, 0.0);
    out.per_car_latency.resize(alloc.num_cars, 0.0);
    for (int n = 0; n < alloc.num_cars; ++n) {
        const int m = alloc.rsu_of(n);
        const int r = alloc.rb_of(n);
        if (m < 0 || r < 0) continue;
        const LinkCostTerms t = link_cost_terms(s, n, m, r, alloc.power_w[n]);
        out.per_car_per[n] = t.per_prob;
        out.per_car_latency[n] = t.latency_s;
        out.per_sum += t.per_prob;
        out.latency_sum += t.latency_s;
    }
    out.total = weighted(weights.alpha, out.per_sum) + weighted(weights.beta, out.latency_sum);
    return out;
}

std::vector<Violation> check_feasibility(const Scenario& s, const Allocation& alloc) {
    std::vector<Violation> v;
    const int n_cars = alloc.num_cars;
    const int n_rsus = alloc.num_rsus;
    const int n_rbs = alloc.num_rbs;
    const double p_cap = s.config.car_max_power_w();
    const double budget = s.config.total_power_budget_w();

    auto add = [&v](const char* label, int index, std::string detail) {
        v.push_back({label, index, std::move(detail)});
    };

    // (21h)/(21i) binary domains first; sums below assume 0/1 entries.
    for (std::size_t i = 0; i < alloc.assoc.size(); ++i) {
        if (alloc.assoc[i] > 1) {
            add("21h", static_cast<int>(i / n_rsus), "a_{n,m} not binary");
        }
    }
    for (std::size_t i = 0; i < alloc.rb.size(); ++i) {
        if (alloc.rb[i] > 1) {
            add("21i", static_cast<int>(i / n_rbs), "x_{n,r} not binary");
        }
    }

    double power_sum = 0.0;
    for (int n = 0; n < n_cars; ++n) {
        const double p = alloc.power_w[n];
        if (!(p >= 0.0) || p > p_cap * (1.0 + kFeasTolRel)) {
            std::ostringstream os;
            os << "p_n out of [0, P_m] (p=" << p << ", P_m=" << p_cap << ")";
            add("21a", n, os.str());
        }
        power_sum += p;
    }
    if (power_sum > budget * (1.0 + kFeasTolRel)) {
        std::ostringstream os;
        os << "sum p_n exceeds P_max^trans (sum=" << power_sum << ", budget=" << budget << ")";
        add("21b", -1, os.str());
    }

    for (int r = 0; r < n_rbs; ++r) {
        int col = 0;
        for (int n = 0; n < n_cars; ++n) col += alloc.rb_at(n, r);
        if (col > 1) add("21c", r, "RB assigned to " + std::to_string(col) + " cars");
    }
    int rb_total = 0;
    for (int n = 0; n < n_cars; ++n) {
        int row = 0;
        for (int r = 0; r < n_rbs; ++r) row += alloc.rb_at(n, r);
        rb_total += row;
        if (row > 1) add("21e", n, "car holds " + std::to_string(row) + " RBs");

        int assoc_row = 0;
        for (int m = 0; m < n_rsus; ++m) assoc_row += alloc.assoc_at(n, m);
        if (assoc_row > 1) add("21d", n, "car associated with " + std::to_string(assoc_row) + " RSUs");
    }
    if (rb_total > n_rbs) {
        add("21f", -1, "total RB assignments " + std::to_string(rb_total) + " > R");
    }
    for (int m = 0; m < n_rsus; ++m) {
        int col = 0;
        for (int n = 0; n < n_cars; ++n) col += alloc.assoc_at(n, m);
        if (col > s.rsu_capacity) {
            add("21g", m, "RSU hosts " + std::to_string(col) + " > Delta_m = " +
                              std::to_string(s.rsu_capacity));
        }
    }
    return v;
}

} // namespace dflsim
