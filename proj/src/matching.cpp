#include "dflsim/matching.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dflsim/errors.hpp"

namespace dflsim {

namespace {

constexpr double kLargeCost = 1e30;

struct Edge {
    int to;
    int cap;
    double cost;
    int rev;  // index of the reverse edge in graph[to]
};

class FlowGraph {
public:
    explicit FlowGraph(int nodes) : adj_(nodes) {}

    void add_edge(int from, int to, int cap, double cost) {
        adj_[from].push_back({to, cap, cost, static_cast<int>(adj_[to].size())});
        adj_[to].push_back({from, 0, -cost, static_cast<int>(adj_[from].size()) - 1});
    }

    // One Bellman-Ford shortest path from s to t in the residual graph,
    // then augment by one unit. Returns false if t is unreachable.
    bool augment_unit(int s, int t) {
        const int n = static_cast<int>(adj_.size());
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        std::vector<int> prev_node(n, -1);
        std::vector<int> prev_edge(n, -1);
        dist[s] = 0.0;
        for (int pass = 0; pass < n; ++pass) {
            bool changed = false;
            for (int u = 0; u < n; ++u) {
                if (!std::isfinite(dist[u])) continue;
                for (int k = 0; k < static_cast<int>(adj_[u].size()); ++k) {
                    const Edge& e = adj_[u][k];
                    if (e.cap <= 0) continue;
                    const double nd = dist[u] + e.cost;
                    if (nd < dist[e.to]) {
                        dist[e.to] = nd;
                        prev_node[e.to] = u;
                        prev_edge[e.to] = k;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        if (!std::isfinite(dist[t])) return false;
        for (int v = t; v != s; v = prev_node[v]) {
            Edge& e = adj_[prev_node[v]][prev_edge[v]];
            e.cap -= 1;
            adj_[e.to][e.rev].cap += 1;
        }
        return true;
    }

    const std::vector<Edge>& edges_from(int node) const { return adj_[node]; }

private:
    std::vector<std::vector<Edge>> adj_;
};

} // namespace

std::vector<int> min_cost_assignment(int num_left, int num_right,
                                     const std::vector<double>& cost,
                                     const std::vector<int>& capacity) {
    long long total_cap = 0;
    for (int c : capacity) total_cap += c;
    if (total_cap < num_left) {
        throw contract_error("min_cost_assignment: total capacity " + std::to_string(total_cap) +
                             " < " + std::to_string(num_left) + " left nodes");
    }

    const int source = 0;
    const int sink = 1 + num_left + num_right;
    FlowGraph g(sink + 1);
    for (int i = 0; i < num_left; ++i) g.add_edge(source, 1 + i, 1, 0.0);
    for (int i = 0; i < num_left; ++i) {
        for (int j = 0; j < num_right; ++j) {
            double c = cost[static_cast<std::size_t>(i) * num_right + j];
            if (!std::isfinite(c) || c > kLargeCost) c = kLargeCost;
            g.add_edge(1 + i, 1 + num_left + j, 1, c);
        }
    }
    for (int j = 0; j < num_right; ++j) g.add_edge(1 + num_left + j, sink, capacity[j], 0.0);

    for (int i = 0; i < num_left; ++i) {
        if (!g.augment_unit(source, sink)) {
            throw contract_error("min_cost_assignment: augmentation failed"); // unreachable by construction
        }
    }

    std::vector<int> assignment(num_left, -1);
    for (int i = 0; i < num_left; ++i) {
        for (const Edge& e : g.edges_from(1 + i)) {
            if (e.to != source && e.cap == 0) { // forward edge fully used
                assignment[i] = e.to - 1 - num_left;
                break;
            }
        }
    }
    return assignment;
}

} // namespace dflsim
