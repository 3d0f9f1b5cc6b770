#pragma once

#include <string>
#include <vector>

#include "groundnav/scenario.hpp"
#include "groundnav/sim.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

struct MetricsRecord {
    int episode_id = 0;
    double tl = 0.0;    // trajectory length, meters
    double ne = 0.0;    // final distance to goal, meters
    int sr = 0;         // success: final pose within d_th
    int osr = 0;        // oracle success: any pose within d_th
    double spl = 0.0;   // sr * geodesic / max(tl, geodesic)
    double ndtw = 0.0;
};

/// exp(-DTW(p, r) / (|r| * d_th)) with the usual monotone three-step
/// alignment and planar Euclidean pairwise cost.
double ndtw(const std::vector<Vec2>& p, const std::vector<Vec2>& r, double d_th = 3.0);

/// geodesic_length may be 0 (start at goal); SPL then equals SR.
MetricsRecord compute_metrics(const Trajectory& traj, const Vec2& goal, double geodesic_length,
                              const std::vector<Vec2>& reference, double d_th = 3.0);

struct MetricsSummary {
    double tl = 0.0, ne = 0.0, sr = 0.0, osr = 0.0, spl = 0.0, ndtw = 0.0;
    int episodes = 0;
};

MetricsSummary aggregate_report(const std::vector<MetricsRecord>& records);

/// {"per_episode":[...], "summary":{...}} with values rounded to 4 decimals
/// at serialization time only.
std::string report_to_json(const std::vector<MetricsRecord>& records,
                           const MetricsSummary& summary);

/// The scenario's goal node: explicit if set, otherwise the graph node
/// nearest to the goal point (ties to the smaller id).
std::string resolve_goal_node(const Scenario& sc);

/// Geodesic node sequence start -> goal node, as planar points.
std::vector<Vec2> reference_path(const Scenario& sc);

double geodesic_length(const Scenario& sc);

}  // namespace groundnav
