#include "groundnav/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "groundnav/angles.hpp"
#include "groundnav/geometry.hpp"
#include "groundnav/planner.hpp"
#include "groundnav/rng.hpp"

namespace groundnav {

namespace {

// Moves shorter than this count as "no progress" for stuck detection.
constexpr double kProgressEps = 1e-6;

double planar(const Pose& a, const Vec2& b) {
    return std::hypot(a.x - b.x(), a.y - b.y());
}

std::map<int, std::vector<std::pair<int, double>>> map_adjacency(const TopoMap& map) {
    std::map<int, std::vector<std::pair<int, double>>> adj;
    for (const auto& [id, n] : map.nodes()) adj[id];
    for (const auto& [key, w] : map.edges()) {
        adj[key.first].push_back({key.second, w});
        adj[key.second].push_back({key.first, w});
    }
    return adj;
}

std::string nearest_graph_node(const NavGraph& g, const Pose& pose) {
    const std::string* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& [id, pos] : g.nodes) {
        double d = std::hypot(pos.x() - pose.x, pos.y() - pose.y);
        if (d < best_dist) {
            best_dist = d;
            best = &id;
        }
    }
    if (!best) throw std::runtime_error("scenario graph has no nodes");
    return *best;
}

}  // namespace

PanoObservation capture_panorama(const Scenario& sc, const Pose& pose) {
    if (!sc.grid.contains(pose.x, pose.y)) {
        throw std::out_of_range("capture_panorama: pose outside grid");
    }
    PanoObservation obs;
    std::array<FeatureVec, kPanoViews> sums;
    for (auto& s : sums) s = FeatureVec::Zero(sc.feature_dim);

    for (const auto& lm : sc.landmarks) {
        if (std::hypot(lm.position.x() - pose.x, lm.position.y() - pose.y) == 0.0) continue;
        PolarOffset rel = relative_polar(pose, lm.position);
        if (rel.distance > sc.sensor_range) continue;
        if (!ray_visible(sc.grid, pose, lm.position)) continue;
        sums[pano_sector(rel.heading)] += sc.feature_of(lm.id);
    }

    for (int k = 0; k < kPanoViews; ++k) {
        double n = sums[k].norm();
        obs.views[k].feature = n > 0.0 ? FeatureVec(sums[k] / n) : sums[k];
        obs.views[k].min_depth = first_block_distance(
            sc.grid, Vec2(pose.x, pose.y), pose.heading + k * kSectorWidth, pose.z);
    }
    return obs;
}

MoveResult goto_point(const Scenario& sc, const Pose& from, const Vec2& target) {
    if (!sc.grid.contains(target.x(), target.y())) {
        throw std::out_of_range("goto_point: target outside grid");
    }
    if (planar(from, target) == 0.0) {
        return {from, false};
    }
    MotionResult m = trace_motion(sc.grid, Vec2(from.x, from.y), target);
    double heading = wrap_pi(std::atan2(target.y() - from.y, target.x() - from.x));
    return {Pose{m.stop.x(), m.stop.y(), from.z, heading}, m.blocked};
}

std::vector<int> plan_path(const TopoMap& map, int from_id, int to_id) {
    return shortest_path(map_adjacency(map), from_id, to_id);
}

double cosine_similarity(const FeatureVec& a, const FeatureVec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine_similarity: dimension mismatch");
    }
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

Policy make_nearest_to_goal_policy(const Vec2& goal) {
    return [goal](const TopoMap& map, const Pose&) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& [id, n] : map.nodes()) {
            double d = std::hypot(n.position.x() - goal.x(), n.position.y() - goal.y());
            if (d < best_dist) {
                best_dist = d;
                best = id;
            }
        }
        if (best == map.current_id()) {
            return PolicyDecision{true, best, best_dist};
        }
        return PolicyDecision{false, best, best_dist};
    };
}

Policy make_feature_match_policy(const FeatureVec& target, AggregationMode mode,
                                 const EncoderParams& params) {
    return [target, mode, params](const TopoMap& map, const Pose&) {
        double current_score =
            cosine_similarity(map.node_representation(map.current_id(), mode, params), target);
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const auto& [id, n] : map.nodes()) {
            if (n.kind != NodeKind::Ghost) continue;
            double s = cosine_similarity(map.node_representation(id, mode, params), target);
            if (s > best_score) {
                best_score = s;
                best = id;
            }
        }
        if (best < 0 || best_score < current_score) {
            return PolicyDecision{true, map.current_id(), current_score};
        }
        return PolicyDecision{false, best, best_score};
    };
}

const char* to_string(TerminalReason r) {
    switch (r) {
        case TerminalReason::GoalDeclared: return "goal_declared";
        case TerminalReason::StepLimit: return "step_limit";
        case TerminalReason::Stuck: return "stuck";
        case TerminalReason::ProtocolError: return "protocol_error";
    }
    return "?";
}

TerminalReason terminal_from_string(const std::string& s) {
    if (s == "goal_declared") return TerminalReason::GoalDeclared;
    if (s == "step_limit") return TerminalReason::StepLimit;
    if (s == "stuck") return TerminalReason::Stuck;
    if (s == "protocol_error") return TerminalReason::ProtocolError;
    throw std::invalid_argument("unknown terminal reason: " + s);
}

std::string trajectory_to_json(const Trajectory& traj) {
    nlohmann::ordered_json j;
    j["episode"] = traj.episode_id;
    j["scan"] = traj.scan_id;
    auto poses = nlohmann::ordered_json::array();
    for (const auto& p : traj.poses) {
        poses.push_back({p.x, p.y, p.z, p.heading});
    }
    j["poses"] = std::move(poses);
    auto actions = nlohmann::ordered_json::array();
    for (const auto& a : traj.actions) {
        actions.push_back({{"target", a.target},
                           {"hop", a.hop},
                           {"path", a.path},
                           {"score", a.score}});
    }
    j["actions"] = std::move(actions);
    j["terminal"] = to_string(traj.terminal);
    return j.dump();
}

Trajectory trajectory_from_json(const std::string& line, const std::string& source_name) {
    try {
        nlohmann::json j = nlohmann::json::parse(line);
        Trajectory traj;
        traj.episode_id = j.at("episode").get<int>();
        traj.scan_id = j.at("scan").get<std::string>();
        for (const auto& jp : j.at("poses")) {
            traj.poses.push_back(Pose{jp.at(0).get<double>(), jp.at(1).get<double>(),
                                      jp.at(2).get<double>(), jp.at(3).get<double>()});
        }
        for (const auto& ja : j.at("actions")) {
            TrajectoryAction a;
            a.target = ja.at("target").get<int>();
            a.hop = ja.at("hop").get<int>();
            a.path = ja.at("path").get<std::vector<int>>();
            a.score = ja.at("score").get<double>();
            traj.actions.push_back(std::move(a));
        }
        traj.terminal = terminal_from_string(j.at("terminal").get<std::string>());
        return traj;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    }
}

EpisodeResult run_episode(const Scenario& sc, const Policy& policy, const EpisodeOptions& opt,
                          int episode_id, std::uint64_t seed) {
    if (opt.max_steps < 1) {
        throw std::invalid_argument("run_episode: max_steps must be >= 1");
    }
    const std::uint64_t ep_seed = mix_seed(seed, static_cast<std::uint64_t>(episode_id));

    EpisodeResult result{Trajectory{}, TopoMap(opt.epsilon, opt.localize_radius)};
    Trajectory& traj = result.trajectory;
    TopoMap& map = result.map;
    traj.episode_id = episode_id;
    traj.scan_id = sc.scan_id;
    traj.terminal = TerminalReason::StepLimit;

    const Vec3& start_pos = sc.graph.position(sc.start_node);
    Pose pose{start_pos.x(), start_pos.y(), sc.agent_height, wrap_pi(sc.start_heading)};
    traj.poses.push_back(pose);
    map.start(start_pos, capture_panorama(sc, pose));

    int strikes = 0;
    bool done = false;
    for (int step = 0; step < opt.max_steps && !done; ++step) {
        PanoObservation pano = capture_panorama(sc, pose);

        // Predicted waypoints become world positions paired with the view
        // feature seen in their direction.
        std::vector<WaypointInput> waypoints;
        const std::uint64_t step_seed = mix_seed(ep_seed, static_cast<std::uint64_t>(step));
        std::vector<Vec3> positions;
        if (opt.predictor == PredictorKind::Oracle) {
            const std::string anchor = nearest_graph_node(sc.graph, pose);
            const Vec3& apos = sc.graph.position(anchor);
            for (const auto& off : oracle_predict(sc.graph, anchor, opt.noise, step_seed)) {
                positions.emplace_back(apos.x() + off.distance * std::cos(off.heading),
                                       apos.y() + off.distance * std::sin(off.heading),
                                       apos.z());
            }
        } else {
            for (const auto& off : depth_heuristic_predict(pano, opt.disc)) {
                double h = pose.heading + off.heading;
                positions.emplace_back(pose.x + off.distance * std::cos(h),
                                       pose.y + off.distance * std::sin(h), 0.0);
            }
        }
        for (const auto& wp : positions) {
            if (!sc.grid.contains(wp.x(), wp.y())) continue;
            if (std::hypot(wp.x() - pose.x, wp.y() - pose.y) == 0.0) continue;
            PolarOffset rel = relative_polar(pose, wp);
            int sector = pano_sector(rel.heading);
            waypoints.push_back({wp, pano.views[sector].feature,
                                 wrap_pi(pose.heading + sector_center(sector))});
        }
        map.update(pose, waypoints);
        map.prune();

        PolicyDecision decision = policy(map, pose);
        if (decision.stop || decision.node_id == map.current_id()) {
            traj.terminal = TerminalReason::GoalDeclared;
            break;
        }
        if (!map.has_node(decision.node_id)) {
            traj.terminal = TerminalReason::ProtocolError;
            break;
        }
        std::vector<int> path;
        try {
            path = plan_path(map, map.current_id(), decision.node_id);
        } catch (const std::runtime_error&) {
            traj.terminal = TerminalReason::ProtocolError;
            break;
        }

        for (size_t h = 1; h < path.size() && !done; ++h) {
            const int hop = path[h];
            const Vec3 hop_pos = map.node(hop).position;
            MoveResult mv = goto_point(sc, pose, Vec2(hop_pos.x(), hop_pos.y()));
            bool progressed = planar(mv.pose, Vec2(pose.x, pose.y)) >= kProgressEps;
            traj.actions.push_back({decision.node_id, hop, path, decision.score});
            pose = mv.pose;
            traj.poses.push_back(pose);

            if (!mv.blocked) {
                strikes = 0;
                const TopoNode& reached = map.node(hop);
                if (reached.kind == NodeKind::Ghost) {
                    map.promote(hop, capture_panorama(sc, pose), pose);
                } else if (hop != map.current_id()) {
                    map.set_current(hop);
                }
                continue;
            }

            if (!progressed && ++strikes >= 2) {
                traj.terminal = TerminalReason::Stuck;
                done = true;
                break;
            }
            if (progressed) strikes = 0;

            // Return to the current node so the next perception step starts
            // from a map node again.
            const Vec3 cur_pos = map.node(map.current_id()).position;
            if (planar(pose, Vec2(cur_pos.x(), cur_pos.y())) > 0.0) {
                MoveResult back = goto_point(sc, pose, Vec2(cur_pos.x(), cur_pos.y()));
                traj.actions.push_back(
                    {decision.node_id, map.current_id(), path, decision.score});
                pose = back.pose;
                traj.poses.push_back(pose);
                if (back.blocked) {
                    traj.terminal = TerminalReason::Stuck;
                    done = true;
                }
            }
            break;  // replan from fresh perception
        }
    }
    return result;
}

}  // namespace groundnav
