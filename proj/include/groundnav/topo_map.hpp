#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groundnav/encoder.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

enum class NodeKind { Visited, Current, Ghost };

const char* to_string(NodeKind kind);

/// A single accumulated view of a ghost node: the feature seen from
/// source_node looking along source_heading (world frame).
struct ViewObservation {
    FeatureVec feature;
    int source_node = -1;
    double source_heading = 0.0;
};

struct TopoNode {
    int id = -1;
    NodeKind kind = NodeKind::Ghost;
    Vec3 position = Vec3::Zero();
    std::vector<ViewObservation> observations;   // ghost accumulation
    std::optional<PanoObservation> panorama;     // visited/current capture
    int position_samples = 1;
};

struct WaypointInput {
    Vec3 position = Vec3::Zero();
    FeatureVec feature;
    double source_heading = 0.0;
};

struct UpdateEntry {
    enum class Outcome { LocalizedVisited, LocalizedGhost, NewGhost, Rejected };
    Outcome outcome;
    int node_id = -1;
    std::string error;
};

struct UpdateLog {
    std::vector<UpdateEntry> entries;  // one per input waypoint, in order
    std::vector<std::pair<int, int>> edges_added;
};

/// Online topological map: one Current node (the agent), Visited nodes with
/// stored panoramas, Ghost nodes accumulating waypoint observations. Edge
/// weights always equal the Euclidean distance between endpoint positions.
class TopoMap {
public:
    explicit TopoMap(double epsilon = 0.5, double localize_radius = 0.5);

    /// Creates the initial Current node; must be called exactly once, first.
    int start(const Vec3& position, const PanoObservation& panorama);

    /// Localizes each waypoint against the map: a match to a Visited/Current
    /// node discards the waypoint (adding a Current edge), a match to a Ghost
    /// folds position and observation into it, otherwise a new Ghost is born
    /// with an edge from Current. Non-finite waypoints are rejected per item.
    UpdateLog update(const Pose& current_pose, const std::vector<WaypointInput>& waypoints);

    /// Agent arrival at a ghost: previous Current becomes Visited, the ghost
    /// becomes Current with the freshly captured panorama.
    void promote(int ghost_id, const PanoObservation& panorama, const Pose& pose);

    /// Agent return to an already-visited node.
    void set_current(int node_id);

    /// Collapses node pairs closer than epsilon until none remain. Ghosts die
    /// before Visited nodes, younger before older, Current never. The survivor
    /// inherits edges (reweighted) and, for ghost-ghost merges, observations.
    int prune();

    /// Visited/Current: mean of the 12 panorama views (mode-independent).
    /// Ghost: mean of accumulated observations, or their attention aggregate.
    FeatureVec node_representation(int node_id, AggregationMode mode,
                                   const EncoderParams& params) const;

    const std::map<int, TopoNode>& nodes() const { return nodes_; }
    const TopoNode& node(int id) const;
    bool has_node(int id) const { return nodes_.count(id) > 0; }
    /// Keys are normalized (low id, high id) pairs.
    const std::map<std::pair<int, int>, double>& edges() const { return edges_; }
    int current_id() const { return current_id_; }
    double epsilon() const { return epsilon_; }
    double localize_radius() const { return localize_radius_; }

    std::string snapshot_json() const;

private:
    bool add_edge(int a, int b);
    void reweight_edges(int id);

    std::map<int, TopoNode> nodes_;
    std::map<std::pair<int, int>, double> edges_;
    int next_id_ = 0;
    int current_id_ = -1;
    double epsilon_;
    double localize_radius_;
};

}  // namespace groundnav
