#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "groundnav/connectivity.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

/// Waypoint supervision for one graph node: polar offsets to every neighbor,
/// stored world-aligned (observer heading 0).
struct WaypointSample {
    struct Target {
        std::string neighbor_id;
        double distance = 0.0;
        double heading = 0.0;
    };

    std::string scan_id;
    std::string node_id;
    double camera_height = 0.0;
    std::vector<Target> targets;
};

struct DatasetManifest {
    std::map<std::string, int> per_scan;
    int total_samples = 0;
    double camera_height = 0.0;
    int skipped_isolated = 0;
};

struct AnnotationResult {
    std::vector<WaypointSample> samples;
    int skipped_isolated = 0;
};

/// One sample per node with degree >= 1, targets ordered by neighbor id.
/// Isolated nodes are skipped and counted.
AnnotationResult annotate_waypoint_targets(const NavGraph& graph, double camera_height);

/// Writes one JSON line per sample in input order and returns the tallies.
/// Throws on sink failure.
DatasetManifest emit_dataset(const std::vector<WaypointSample>& samples, std::ostream& out);

}  // namespace groundnav
