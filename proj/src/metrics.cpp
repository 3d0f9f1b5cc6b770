#include "groundnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "groundnav/planner.hpp"

namespace groundnav {

namespace {

double round4(double v) {
    return std::round(v * 1e4) / 1e4;
}

std::map<std::string, std::vector<std::pair<std::string, double>>> graph_adjacency(
    const NavGraph& g) {
    std::map<std::string, std::vector<std::pair<std::string, double>>> adj;
    for (const auto& [id, pos] : g.nodes) adj[id];
    for (const auto& e : g.edges) {
        adj[e.a].push_back({e.b, e.weight});
        adj[e.b].push_back({e.a, e.weight});
    }
    return adj;
}

std::vector<std::string> goal_geodesic(const Scenario& sc) {
    return shortest_path(graph_adjacency(sc.graph), sc.start_node, resolve_goal_node(sc));
}

}  // namespace

double ndtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r, double d_th) {
    if (p.empty() || r.empty()) {
        throw std::invalid_argument("ndtw: paths must be nonempty");
    }
    if (!(d_th > 0.0)) {
        throw std::invalid_argument("ndtw: d_th must be positive");
    }
    const size_t n = p.size(), m = r.size();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = kInf;
        for (size_t j = 1; j <= m; ++j) {
            double cost = (p[i - 1] - r[j - 1]).norm();
            cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return std::exp(-prev[m] / (static_cast<double>(m) * d_th));
}

MetricsRecord compute_metrics(const Trajectory& traj, const Vec2& goal, double geodesic_length,
                              const std::vector<Vec2>& reference, double d_th) {
    if (traj.poses.empty()) {
        throw std::invalid_argument("compute_metrics: trajectory has no poses");
    }
    if (geodesic_length < 0.0) {
        throw std::invalid_argument("compute_metrics: negative geodesic length");
    }
    MetricsRecord rec;
    rec.episode_id = traj.episode_id;

    double min_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.poses.size(); ++i) {
        const Pose& a = traj.poses[i];
        if (i + 1 < traj.poses.size()) {
            const Pose& b = traj.poses[i + 1];
            rec.tl += std::hypot(b.x - a.x, b.y - a.y);
        }
        min_dist = std::min(min_dist, std::hypot(a.x - goal.x(), a.y - goal.y()));
    }
    const Pose& last = traj.poses.back();
    rec.ne = std::hypot(last.x - goal.x(), last.y - goal.y());
    rec.sr = rec.ne <= d_th ? 1 : 0;
    rec.osr = min_dist <= d_th ? 1 : 0;
    if (geodesic_length == 0.0) {
        rec.spl = rec.sr;
    } else {
        rec.spl = rec.sr * geodesic_length / std::max(rec.tl, geodesic_length);
    }

    std::vector<Vec2> path;
    path.reserve(traj.poses.size());
    for (const auto& pz : traj.poses) path.emplace_back(pz.x, pz.y);
    rec.ndtw = ndtw(path, reference, d_th);
    return rec;
}

MetricsSummary aggregate_report(const std::vector<MetricsRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("aggregate_report: no records");
    }
    MetricsSummary s;
    s.episodes = static_cast<int>(records.size());
    for (const auto& r : records) {
        s.tl += r.tl;
        s.ne += r.ne;
        s.sr += r.sr;
        s.osr += r.osr;
        s.spl += r.spl;
        s.ndtw += r.ndtw;
    }
    const double n = static_cast<double>(records.size());
    s.tl /= n;
    s.ne /= n;
    s.sr /= n;
    s.osr /= n;
    s.spl /= n;
    s.ndtw /= n;
    return s;
}

std::string report_to_json(const std::vector<MetricsRecord>& records,
                           const MetricsSummary& summary) {
    nlohmann::ordered_json j;
    auto per_episode = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        per_episode.push_back({{"episode", r.episode_id},
                               {"tl", round4(r.tl)},
                               {"ne", round4(r.ne)},
                               {"sr", r.sr},
                               {"osr", r.osr},
                               {"spl", round4(r.spl)},
                               {"ndtw", round4(r.ndtw)}});
    }
    j["per_episode"] = std::move(per_episode);
    j["summary"] = {{"episodes", summary.episodes}, {"tl", round4(summary.tl)},
                    {"ne", round4(summary.ne)},     {"sr", round4(summary.sr)},
                    {"osr", round4(summary.osr)},   {"spl", round4(summary.spl)},
                    {"ndtw", round4(summary.ndtw)}};
    return j.dump(2);
}

std::string resolve_goal_node(const Scenario& sc) {
    if (sc.goal_node) return *sc.goal_node;
    const std::string* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& [id, pos] : sc.graph.nodes) {
        double d = std::hypot(pos.x() - sc.goal.x(), pos.y() - sc.goal.y());
        if (d < best_dist) {
            best_dist = d;
            best = &id;
        }
    }
    if (!best) throw std::runtime_error("scenario graph has no nodes");
    return *best;
}

std::vector<Vec2> reference_path(const Scenario& sc) {
    std::vector<Vec2> out;
    for (const auto& id : goal_geodesic(sc)) {
        const Vec3& p = sc.graph.position(id);
        out.emplace_back(p.x(), p.y());
    }
    return out;
}

double geodesic_length(const Scenario& sc) {
    return path_cost(graph_adjacency(sc.graph), goal_geodesic(sc));
}

}  // namespace groundnav
