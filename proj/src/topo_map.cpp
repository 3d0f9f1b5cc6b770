#include "groundnav/topo_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "groundnav/geometry.hpp"

namespace groundnav {

namespace {

std::pair<int, int> edge_key(int a, int b) {
    return {std::min(a, b), std::max(a, b)};
}

int removal_rank(NodeKind kind) {
    switch (kind) {
        case NodeKind::Ghost: return 0;
        case NodeKind::Visited: return 1;
        case NodeKind::Current: return 2;
    }
    return 2;
}

}  // namespace

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Visited: return "visited";
        case NodeKind::Current: return "current";
        case NodeKind::Ghost: return "ghost";
    }
    return "?";
}

TopoMap::TopoMap(double epsilon, double localize_radius)
    : epsilon_(epsilon), localize_radius_(localize_radius) {
    if (!(epsilon > 0.0) || !(localize_radius > 0.0)) {
        throw std::invalid_argument("topo map: epsilon and localize_radius must be positive");
    }
}

const TopoNode& TopoMap::node(int id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw std::out_of_range("topo map: unknown node " + std::to_string(id));
    }
    return it->second;
}

int TopoMap::start(const Vec3& position, const PanoObservation& panorama) {
    if (!nodes_.empty()) {
        throw std::logic_error("topo map: already started");
    }
    TopoNode n;
    n.id = next_id_++;
    n.kind = NodeKind::Current;
    n.position = position;
    n.panorama = panorama;
    current_id_ = n.id;
    nodes_.emplace(n.id, std::move(n));
    return current_id_;
}

bool TopoMap::add_edge(int a, int b) {
    if (a == b) return false;
    auto key = edge_key(a, b);
    double w = (nodes_.at(a).position - nodes_.at(b).position).norm();
    auto [it, inserted] = edges_.emplace(key, w);
    if (!inserted) it->second = w;
    return inserted;
}

void TopoMap::reweight_edges(int id) {
    for (auto& [key, w] : edges_) {
        if (key.first == id || key.second == id) {
            w = (nodes_.at(key.first).position - nodes_.at(key.second).position).norm();
        }
    }
}

UpdateLog TopoMap::update(const Pose& current_pose, const std::vector<WaypointInput>& waypoints) {
    if (current_id_ < 0) {
        throw std::logic_error("topo map: update before start");
    }
    const TopoNode& cur = nodes_.at(current_id_);
    if (planar_distance(cur.position, Vec3(current_pose.x, current_pose.y, 0.0)) > 1e-6) {
        throw std::invalid_argument("topo map: current node is not at the given pose");
    }

    UpdateLog log;
    for (const auto& wp : waypoints) {
        if (!wp.position.allFinite() || !is_finite(wp.feature)) {
            log.entries.push_back({UpdateEntry::Outcome::Rejected, -1,
                                   "waypoint has non-finite values"});
            continue;
        }

        int best_id = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        bool best_is_ghost = false;
        for (const auto& [id, n] : nodes_) {
            double d = (n.position - wp.position).norm();
            if (d > localize_radius_) continue;
            bool is_ghost = n.kind == NodeKind::Ghost;
            if (d < best_dist ||
                (d == best_dist && (!is_ghost && best_is_ghost))) {
                best_id = id;
                best_dist = d;
                best_is_ghost = is_ghost;
            }
        }

        if (best_id < 0) {
            int ghost_id = next_id_++;
            TopoNode n;
            n.id = ghost_id;
            n.kind = NodeKind::Ghost;
            n.position = wp.position;
            n.observations.push_back({wp.feature, current_id_, wp.source_heading});
            nodes_.emplace(ghost_id, std::move(n));
            if (add_edge(current_id_, ghost_id)) {
                log.edges_added.push_back(edge_key(current_id_, ghost_id));
            }
            log.entries.push_back({UpdateEntry::Outcome::NewGhost, ghost_id, {}});
        } else if (nodes_.at(best_id).kind == NodeKind::Ghost) {
            TopoNode& g = nodes_.at(best_id);
            g.position = (g.position * g.position_samples + wp.position) /
                         (g.position_samples + 1);
            g.position_samples += 1;
            g.observations.push_back({wp.feature, current_id_, wp.source_heading});
            reweight_edges(best_id);
            // The ghost is now reachable from here too.
            if (add_edge(current_id_, best_id)) {
                log.edges_added.push_back(edge_key(current_id_, best_id));
            }
            log.entries.push_back({UpdateEntry::Outcome::LocalizedGhost, best_id, {}});
        } else {
            if (best_id != current_id_ && add_edge(current_id_, best_id)) {
                log.edges_added.push_back(edge_key(current_id_, best_id));
            }
            log.entries.push_back({UpdateEntry::Outcome::LocalizedVisited, best_id, {}});
        }
    }
    return log;
}

void TopoMap::promote(int ghost_id, const PanoObservation& panorama, const Pose& pose) {
    auto it = nodes_.find(ghost_id);
    if (it == nodes_.end()) {
        throw std::logic_error("topo map: promote of unknown node " + std::to_string(ghost_id));
    }
    if (it->second.kind != NodeKind::Ghost) {
        throw std::logic_error("topo map: promote of non-ghost node " + std::to_string(ghost_id));
    }
    if (planar_distance(it->second.position, Vec3(pose.x, pose.y, 0.0)) > 1e-6) {
        throw std::invalid_argument("topo map: promote pose is not at the ghost position");
    }
    nodes_.at(current_id_).kind = NodeKind::Visited;
    it->second.kind = NodeKind::Current;
    it->second.observations.clear();
    it->second.panorama = panorama;
    current_id_ = ghost_id;
}

void TopoMap::set_current(int node_id) {
    auto it = nodes_.find(node_id);
    if (it == nodes_.end()) {
        throw std::logic_error("topo map: set_current of unknown node " + std::to_string(node_id));
    }
    if (node_id == current_id_) return;
    if (it->second.kind != NodeKind::Visited) {
        throw std::logic_error("topo map: set_current requires a visited node");
    }
    nodes_.at(current_id_).kind = NodeKind::Visited;
    it->second.kind = NodeKind::Current;
    current_id_ = node_id;
}

int TopoMap::prune() {
    int removed_count = 0;
    while (true) {
        int remove_id = -1, keep_id = -1;
        for (auto i = nodes_.begin(); i != nodes_.end() && remove_id < 0; ++i) {
            auto j = i;
            for (++j; j != nodes_.end(); ++j) {
                if ((i->second.position - j->second.position).norm() >= epsilon_) continue;
                int ri = removal_rank(i->second.kind);
                int rj = removal_rank(j->second.kind);
                if (ri < rj || (ri == rj && i->first > j->first)) {
                    remove_id = i->first;
                    keep_id = j->first;
                } else {
                    remove_id = j->first;
                    keep_id = i->first;
                }
                break;
            }
        }
        if (remove_id < 0) break;

        TopoNode& keep = nodes_.at(keep_id);
        TopoNode& dead = nodes_.at(remove_id);
        if (keep.kind == NodeKind::Ghost && dead.kind == NodeKind::Ghost) {
            for (auto& obs : dead.observations) {
                keep.observations.push_back(std::move(obs));
            }
        }
        std::vector<int> inherited;
        for (auto it = edges_.begin(); it != edges_.end();) {
            if (it->first.first == remove_id || it->first.second == remove_id) {
                int other = it->first.first == remove_id ? it->first.second : it->first.first;
                if (other != keep_id) inherited.push_back(other);
                it = edges_.erase(it);
            } else {
                ++it;
            }
        }
        nodes_.erase(remove_id);
        for (int other : inherited) add_edge(keep_id, other);
        ++removed_count;
    }
    return removed_count;
}

FeatureVec TopoMap::node_representation(int node_id, AggregationMode mode,
                                        const EncoderParams& params) const {
    const TopoNode& n = node(node_id);
    if (n.kind == NodeKind::Ghost) {
        if (n.observations.empty()) {
            throw std::logic_error("topo map: ghost node has no observations");
        }
        std::vector<FeatureVec> views;
        views.reserve(n.observations.size());
        for (const auto& o : n.observations) views.push_back(o.feature);
        return aggregate_views(views, mode, params);
    }
    if (!n.panorama.has_value()) {
        throw std::logic_error("topo map: node has no panorama");
    }
    FeatureVec sum = FeatureVec::Zero(n.panorama->views[0].feature.size());
    for (const auto& view : n.panorama->views) sum += view.feature;
    return sum / static_cast<double>(kPanoViews);
}

std::string TopoMap::snapshot_json() const {
    nlohmann::ordered_json j;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& [id, n] : nodes_) {
        int n_obs = n.kind == NodeKind::Ghost
                        ? static_cast<int>(n.observations.size())
                        : (n.panorama.has_value() ? kPanoViews : 0);
        nodes.push_back({{"id", id},
                         {"kind", to_string(n.kind)},
                         {"pos", {n.position.x(), n.position.y(), n.position.z()}},
                         {"n_obs", n_obs}});
    }
    j["nodes"] = std::move(nodes);
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [key, w] : edges_) {
        edges.push_back({key.first, key.second, w});
    }
    j["edges"] = std::move(edges);
    return j.dump();
}

}  // namespace groundnav
