#include "dflsim/bsum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dflsim/errors.hpp"
#include "dflsim/matching.hpp"

namespace dflsim {

namespace {

constexpr double kL2 = 0.6931471805599453; // ln 2

double blended(const CostWeights& w, const LinkCostTerms& t) {
    const double a = w.alpha > 0.0 ? w.alpha * t.per_prob : 0.0;
    const double b = w.beta > 0.0 ? w.beta * t.latency_s : 0.0;
    return a + b;
}

// mu/2 * Hamming distance between the candidate one-hot row and the previous
// row: 0 if unchanged, mu/2 if the car was unset, mu if it moves.
double switch_surcharge(double mu, int previous, int candidate) {
    if (previous == candidate) return 0.0;
    return previous < 0 ? mu * 0.5 : mu;
}

bool fully_connected(const Allocation& a) {
    for (int n = 0; n < a.num_cars; ++n) {
        if (a.rsu_of(n) < 0 || a.rb_of(n) < 0) return false;
    }
    return true;
}

// Objective of the power block at fixed (A, X): true cost plus the proximal
// anchor term.
double power_objective(const Scenario& s, const Allocation& alloc,
                       const std::vector<double>& p, const std::vector<double>& anchor,
                       const SolverConfig& cfg) {
    double val = 0.0;
    for (int n = 0; n < alloc.num_cars; ++n) {
        const int m = alloc.rsu_of(n);
        const int r = alloc.rb_of(n);
        if (m < 0 || r < 0) continue;
        val += blended(cfg.weights, link_cost_terms(s, n, m, r, p[n]));
    }
    double prox = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - anchor[i];
        prox += d * d;
    }
    return val + 0.5 * cfg.mu * prox;
}

} // namespace

void SolverConfig::validate() const {
    std::ostringstream os;
    if (!(mu > 0.0)) {
        os << "mu > 0 violated (mu=" << mu << ")";
        throw validation_error(os.str());
    }
    if (!(epsilon > 0.0)) {
        os << "epsilon > 0 violated (epsilon=" << epsilon << ")";
        throw validation_error(os.str());
    }
    if (max_outer_iters < 1) {
        os << "max_outer_iters >= 1 violated (max_outer_iters=" << max_outer_iters << ")";
        throw validation_error(os.str());
    }
    if (inner_pgd_iters < 1) {
        os << "inner_pgd_iters >= 1 violated (inner_pgd_iters=" << inner_pgd_iters << ")";
        throw validation_error(os.str());
    }
    if (!(pgd_step_init > 0.0)) {
        os << "pgd_step_init > 0 violated (pgd_step_init=" << pgd_step_init << ")";
        throw validation_error(os.str());
    }
    weights.validate();
}

Allocation initial_allocation(const Scenario& s) {
    const int n_cars = s.config.num_cars;
    const int n_rsus = s.config.num_rsus;
    Allocation a = Allocation::zeros(n_cars, n_rsus, s.config.num_rbs);

    std::vector<int> remaining(n_rsus, s.rsu_capacity);
    for (int n = 0; n < n_cars; ++n) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int m = 0; m < n_rsus; ++m) {
            if (remaining[m] <= 0) continue;
            const double d = std::hypot(s.car_positions[n].x - s.rsu_positions[m].x,
                                        s.car_positions[n].y - s.rsu_positions[m].y);
            if (d < best_d) {
                best_d = d;
                best = m;
            }
        }
        if (best < 0) throw contract_error("initial_allocation: RSU capacity exhausted");
        a.set_rsu(n, best);
        remaining[best] -= 1;
        a.set_rb(n, n); // R >= N
    }

    const double equal = std::min(s.config.car_max_power_w(),
                                  s.config.total_power_budget_w() / n_cars);
    std::fill(a.power_w.begin(), a.power_w.end(), equal);
    return a;
}

Allocation block_update_assoc(const Scenario& s, const Allocation& current, const SolverConfig& cfg) {
    const int n_cars = current.num_cars;
    const int n_rsus = current.num_rsus;
    std::vector<double> edge(static_cast<std::size_t>(n_cars) * n_rsus, 0.0);
    for (int n = 0; n < n_cars; ++n) {
        const int prev_m = current.rsu_of(n);
        const int r = current.rb_of(n);
        for (int m = 0; m < n_rsus; ++m) {
            double c = switch_surcharge(cfg.mu, prev_m, m);
            if (r >= 0) c += blended(cfg.weights, link_cost_terms(s, n, m, r, current.power_w[n]));
            edge[static_cast<std::size_t>(n) * n_rsus + m] = c;
        }
    }
    const std::vector<int> caps(n_rsus, s.rsu_capacity);
    const std::vector<int> pick = min_cost_assignment(n_cars, n_rsus, edge, caps);

    Allocation next = current;
    for (int n = 0; n < n_cars; ++n) next.set_rsu(n, pick[n]);
    return next;
}

Allocation block_update_rb(const Scenario& s, const Allocation& current, const SolverConfig& cfg) {
    const int n_cars = current.num_cars;
    const int n_rbs = current.num_rbs;
    std::vector<double> edge(static_cast<std::size_t>(n_cars) * n_rbs, 0.0);
    for (int n = 0; n < n_cars; ++n) {
        const int m = current.rsu_of(n);
        const int prev_r = current.rb_of(n);
        for (int r = 0; r < n_rbs; ++r) {
            double c = switch_surcharge(cfg.mu, prev_r, r);
            if (m >= 0) c += blended(cfg.weights, link_cost_terms(s, n, m, r, current.power_w[n]));
            edge[static_cast<std::size_t>(n) * n_rbs + r] = c;
        }
    }
    const std::vector<int> caps(n_rbs, 1);
    const std::vector<int> pick = min_cost_assignment(n_cars, n_rbs, edge, caps);

    Allocation next = current;
    for (int n = 0; n < n_cars; ++n) next.set_rb(n, pick[n]);
    return next;
}

std::vector<double> power_gradient(const Scenario& s, const Allocation& alloc,
                                   const CostWeights& weights) {
    std::vector<double> grad(alloc.num_cars, 0.0);
    const double theta = s.config.waterfall_threshold;
    const double omega = s.config.rb_bandwidth_hz;
    const double bits = s.config.model_size_bits;
    for (int n = 0; n < alloc.num_cars; ++n) {
        const int m = alloc.rsu_of(n);
        const int r = alloc.rb_of(n);
        if (m < 0 || r < 0) continue;
        const double p = alloc.power_w[n];
        const double h = s.car_gain(n, m);
        const double interference = s.interference_noise_w(r, m);

        // q(p) = 1 - exp(-c/p) with c = theta * I / h
        const double c = theta * interference / h;
        const double dq = -(c / (p * p)) * std::exp(-c / p);

        // T(p) = Q / (Omega * log2(1 + p h / I))
        const double gamma = p * h / interference;
        const double eta = omega * std::log1p(gamma) / kL2;
        const double deta = omega * (h / interference) / ((1.0 + gamma) * kL2);
        const double dT = -bits * deta / (eta * eta);

        double g = 0.0;
        if (weights.alpha > 0.0) g += weights.alpha * dq;
        if (weights.beta > 0.0) g += weights.beta * dT;
        grad[n] = g;
    }
    return grad;
}

void project_power(std::vector<double>& p, double per_car_cap_w, double budget_w) {
    double sum = 0.0;
    for (double& v : p) {
        v = std::clamp(v, 0.0, per_car_cap_w);
        sum += v;
    }
    if (sum <= budget_w) return;

    // Find tau >= 0 with sum_i clamp(p_i - tau, 0, cap) = budget. The map is
    // continuous and non-increasing in tau, so bisection converges.
    double lo = 0.0;
    double hi = *std::max_element(p.begin(), p.end());
    auto shifted_sum = [&](double tau) {
        double acc = 0.0;
        for (double v : p) acc += std::clamp(v - tau, 0.0, per_car_cap_w);
        return acc;
    };
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shifted_sum(mid) > budget_w) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for (double& v : p) v = std::clamp(v - hi, 0.0, per_car_cap_w);

    // Bisection leaves the sum within one ulp of the budget; rescale the
    // residual so check_feasibility's exact bound holds.
    sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (sum > budget_w && sum > 0.0) {
        const double scale = budget_w / sum;
        for (double& v : p) v *= scale;
    }
}

Allocation block_update_power(const Scenario& s, const Allocation& current, const SolverConfig& cfg) {
    const std::vector<double> anchor = current.power_w;
    const double cap = s.config.car_max_power_w();
    const double budget = s.config.total_power_budget_w();

    Allocation work = current;
    double best_val = power_objective(s, work, work.power_w, anchor, cfg);

    // A user-supplied iterate can sit at p = 0 on a live link, where the cost
    // is +inf; any finite point beats it, so try a small uniform lift first.
    if (!std::isfinite(best_val)) {
        std::vector<double> lifted = work.power_w;
        for (double& v : lifted) v = std::max(v, cap * 1e-6);
        project_power(lifted, cap, budget);
        const double lifted_val = power_objective(s, work, lifted, anchor, cfg);
        if (lifted_val < best_val) {
            work.power_w = lifted;
            best_val = lifted_val;
        }
    }

    double step = cfg.pgd_step_init;
    for (int it = 0; it < cfg.inner_pgd_iters && step > 1e-18; ++it) {
        std::vector<double> grad = power_gradient(s, work, cfg.weights);
        for (int n = 0; n < work.num_cars; ++n) grad[n] += cfg.mu * (work.power_w[n] - anchor[n]);

        std::vector<double> candidate = work.power_w;
        for (int n = 0; n < work.num_cars; ++n) candidate[n] -= step * grad[n];
        project_power(candidate, cap, budget);

        const double val = power_objective(s, work, candidate, anchor, cfg);
        if (val < best_val) {
            work.power_w = std::move(candidate);
            best_val = val;
        } else {
            step *= 0.5;
        }
    }
    return work;
}

SolveResult solve(const Scenario& s, const SolverConfig& cfg, const Allocation* init) {
    cfg.validate();

    Allocation current;
    if (init != nullptr) {
        if (!check_feasibility(s, *init).empty()) {
            throw contract_error("solve: init allocation is infeasible");
        }
        if (!fully_connected(*init)) {
            throw contract_error("solve: init allocation must be fully associated");
        }
        current = *init;
    } else {
        current = initial_allocation(s);
    }

    SolverTrace trace;
    trace.iteration_costs.push_back(global_cost(s, current, cfg.weights));

    for (int k = 1; k <= cfg.max_outer_iters; ++k) {
        const double before = trace.iteration_costs.back().total;

        current = block_update_assoc(s, current, cfg);
        trace.block_records.push_back({k, 'A', global_cost(s, current, cfg.weights).total});
        current = block_update_rb(s, current, cfg);
        trace.block_records.push_back({k, 'X', global_cost(s, current, cfg.weights).total});
        current = block_update_power(s, current, cfg);

        const CostBreakdown after = global_cost(s, current, cfg.weights);
        trace.block_records.push_back({k, 'P', after.total});
        trace.iteration_costs.push_back(after);
        trace.iterations_used = k;

        if (before == 0.0 || std::abs((before - after.total) / before) <= cfg.epsilon) {
            trace.converged = true;
            break;
        }
    }

    SolveResult result;
    result.cost = trace.iteration_costs.back();
    result.allocation = std::move(current);
    result.trace = std::move(trace);
    return result;
}

} // namespace dflsim
