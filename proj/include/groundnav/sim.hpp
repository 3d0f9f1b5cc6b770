#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "groundnav/encoder.hpp"
#include "groundnav/heatmap.hpp"
#include "groundnav/predictors.hpp"
#include "groundnav/scenario.hpp"
#include "groundnav/topo_map.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

/// Panorama at a pose: per 30-degree sector, the normalized sum of features
/// of landmarks that fall in the sector, are within sensor range, and are
/// visible by raycast from the pose (the pose's own z is the camera height).
/// min_depth is measured along the sector-center ray against cells at least
/// as tall as the camera.
PanoObservation capture_panorama(const Scenario& sc, const Pose& pose);

struct MoveResult {
    Pose pose;
    bool blocked = false;
};

/// Straight move toward a target; stops short of the first cell with any
/// obstacle height. Heading becomes the motion direction. A zero-length move
/// returns the input pose unchanged.
MoveResult goto_point(const Scenario& sc, const Pose& from, const Vec2& target);

/// Minimum-weight path over the map's edges, inclusive of both endpoints.
std::vector<int> plan_path(const TopoMap& map, int from_id, int to_id);

struct PolicyDecision {
    bool stop = false;
    int node_id = -1;
    double score = 0.0;
};

using Policy = std::function<PolicyDecision(const TopoMap&, const Pose&)>;

/// Greedy on straight-line node-to-goal distance; stops when the current
/// node is already the closest. score = that distance.
Policy make_nearest_to_goal_policy(const Vec2& goal);

/// Scores ghost nodes by cosine similarity between their aggregated
/// representation and a target feature; stops when no ghost beats the
/// current node. score = the winning cosine.
Policy make_feature_match_policy(const FeatureVec& target, AggregationMode mode,
                                 const EncoderParams& params);

double cosine_similarity(const FeatureVec& a, const FeatureVec& b);

enum class TerminalReason { GoalDeclared, StepLimit, Stuck, ProtocolError };
const char* to_string(TerminalReason r);
TerminalReason terminal_from_string(const std::string& s);

struct TrajectoryAction {
    int target = -1;            // node the policy selected this step
    int hop = -1;               // node this move headed toward
    std::vector<int> path;      // full planned path for the step
    double score = 0.0;
};

struct Trajectory {
    int episode_id = 0;
    std::string scan_id;
    std::vector<Pose> poses;
    std::vector<TrajectoryAction> actions;
    TerminalReason terminal = TerminalReason::StepLimit;
};

std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& line, const std::string& source_name);

enum class PredictorKind { Oracle, DepthHeuristic };

struct EpisodeOptions {
    PredictorKind predictor = PredictorKind::Oracle;
    PredictorNoise noise;
    Discretization disc;
    int max_steps = 15;
    double epsilon = 0.5;
    double localize_radius = 0.5;
};

struct EpisodeResult {
    Trajectory trajectory;
    TopoMap map;
};

/// One full perceive-update-decide-move loop, deterministic for a given
/// (seed, episode_id): the working stream is derived from both.
EpisodeResult run_episode(const Scenario& sc, const Policy& policy, const EpisodeOptions& opt,
                          int episode_id, std::uint64_t seed);

}  // namespace groundnav
