#include <doctest.h>

#include <limits>
#include <vector>

#include "dflsim/errors.hpp"
#include "dflsim/matching.hpp"
#include "dflsim/rng.hpp"
#include "oracles.hpp"

using namespace dflsim;

namespace {

double total_cost(const std::vector<int>& pick, const std::vector<double>& cost, int num_right) {
    double t = 0.0;
    for (std::size_t i = 0; i < pick.size(); ++i) t += cost[i * num_right + pick[i]];
    return t;
}

} // namespace

TEST_CASE("single-row assignment picks the argmin") {
    const std::vector<double> cost = {3.0, 1.0, 2.0};
    const auto pick = min_cost_assignment(1, 3, cost, {1, 1, 1});
    CHECK(pick == std::vector<int>{1});
}

TEST_CASE("hand-built 3x2 capacity-2 case matches the enumeration oracle") {
    // cars x RSUs, capacity 2 each
    const std::vector<double> cost = {1.0, 4.0, 2.0, 1.5, 5.0, 1.0};
    const std::vector<int> caps = {2, 2};
    const auto pick = min_cost_assignment(3, 2, cost, caps);
    CHECK(total_cost(pick, cost, 2) ==
          doctest::Approx(oracles::assignment_min_cost(3, 2, cost, caps)));
    // capacities respected
    std::vector<int> load(2, 0);
    for (int p : pick) load[p] += 1;
    CHECK(load[0] <= 2);
    CHECK(load[1] <= 2);
}

TEST_CASE("random instances match the enumeration oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int left = rng.uniform_int(1, 5);
        const int right = rng.uniform_int(1, 5);
        std::vector<int> caps(right);
        int total = 0;
        for (int& c : caps) {
            c = rng.uniform_int(0, 3);
            total += c;
        }
        if (total < left) caps[rng.uniform_int(0, right - 1)] += left - total;
        std::vector<double> cost(static_cast<std::size_t>(left) * right);
        for (double& c : cost) c = rng.uniform(0.0, 10.0);

        const auto pick = min_cost_assignment(left, right, cost, caps);
        std::vector<int> load(right, 0);
        for (int p : pick) {
            REQUIRE(p >= 0);
            REQUIRE(p < right);
            load[p] += 1;
        }
        for (int j = 0; j < right; ++j) CHECK(load[j] <= caps[j]);
        CHECK(total_cost(pick, cost, right) ==
              doctest::Approx(oracles::assignment_min_cost(left, right, cost, caps)).epsilon(1e-12));
    }
}

TEST_CASE("non-finite edges are avoided when possible") {
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> cost = {inf, 2.0, 5.0, inf};
    const auto pick = min_cost_assignment(2, 2, cost, {1, 1});
    CHECK(pick == std::vector<int>{1, 0});
}

TEST_CASE("insufficient capacity is a contract error") {
    CHECK_THROWS_AS(min_cost_assignment(3, 2, std::vector<double>(6, 1.0), {1, 1}), contract_error);
}

TEST_CASE("assignment is deterministic under cost ties") {
    const std::vector<double> cost(9, 1.0);
    const auto a = min_cost_assignment(3, 3, cost, {1, 1, 1});
    const auto b = min_cost_assignment(3, 3, cost, {1, 1, 1});
    CHECK(a == b);
    // lowest indices win ties: identity matching
    CHECK(a == std::vector<int>{0, 1, 2});
}
