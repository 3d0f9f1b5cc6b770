#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace groundnav {

/// Dijkstra over an adjacency map. Equal-cost paths resolve to the one whose
/// node-id sequence is lexicographically smallest, which makes planning
/// reproducible regardless of edge insertion order. Throws when `to` is
/// unreachable from `from`.
template <typename Id>
std::vector<Id> shortest_path(const std::map<Id, std::vector<std::pair<Id, double>>>& adj,
                              const Id& from, const Id& to) {
    if (adj.find(from) == adj.end() || adj.find(to) == adj.end()) {
        throw std::out_of_range("shortest_path: unknown endpoint");
    }

    struct Best {
        double cost = std::numeric_limits<double>::infinity();
        std::vector<Id> path;
        bool settled = false;
    };
    std::map<Id, Best> best;
    best[from] = {0.0, {from}, false};

    auto pick_next = [&]() {
        const Id* next = nullptr;
        const Best* next_best = nullptr;
        for (const auto& [id, b] : best) {
            if (b.settled) continue;
            if (!next || b.cost < next_best->cost ||
                (b.cost == next_best->cost && b.path < next_best->path)) {
                next = &id;
                next_best = &b;
            }
        }
        return next;
    };

    while (const Id* u = pick_next()) {
        Best& bu = best[*u];
        bu.settled = true;
        if (*u == to) return bu.path;
        auto it = adj.find(*u);
        if (it == adj.end()) continue;
        for (const auto& [v, w] : it->second) {
            double cost = bu.cost + w;
            auto& bv = best[v];
            std::vector<Id> path = bu.path;
            path.push_back(v);
            if (cost < bv.cost || (cost == bv.cost && path < bv.path)) {
                bv.cost = cost;
                bv.path = std::move(path);
            }
        }
    }
    throw std::runtime_error("shortest_path: target unreachable");
}

template <typename Id>
double path_cost(const std::map<Id, std::vector<std::pair<Id, double>>>& adj,
                 const std::vector<Id>& path) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const auto& nbrs = adj.at(path[i]);
        bool found = false;
        for (const auto& [v, w] : nbrs) {
            if (v == path[i + 1]) {
                total += w;
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("path_cost: path uses a missing edge");
    }
    return total;
}

}  // namespace groundnav
