#pragma once

#include <vector>

#include <Eigen/Dense>

#include "groundnav/dataset.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

/// Polar binning for waypoint heatmaps. Distance bin b covers
/// (b*dist_step, (b+1)*dist_step]; angle bin 0 starts at heading 0.
struct Discretization {
    int angle_bins = 120;
    int dist_bins = 12;
    double dist_step = 0.25;

    double max_range() const { return dist_bins * dist_step; }
    double angle_step() const;
    void validate() const;
};

struct Heatmap {
    Discretization disc;
    Eigen::MatrixXd grid;  // angle_bins x dist_bins

    Heatmap() = default;
    explicit Heatmap(const Discretization& d)
        : disc(d), grid(Eigen::MatrixXd::Zero(d.angle_bins, d.dist_bins)) {}
};

struct RasterizeResult {
    Heatmap heatmap;
    int dropped = 0;
};

/// Rotates each target into the agent frame and marks its bin with 1.0.
/// Targets beyond max range are dropped and counted.
RasterizeResult rasterize_targets(const WaypointSample& sample, double agent_heading,
                                  const Discretization& disc);

int distance_bin(double distance, const Discretization& disc);
int angle_bin(double heading, const Discretization& disc);

/// Greedy non-maximum suppression: repeatedly take the global max cell
/// (ties to the lexicographically smallest (angle_bin, dist_bin)), emit its
/// bin-center offset, and zero the surrounding window (circular in angle).
std::vector<PolarOffset> extract_candidates(const Heatmap& h, int k_max, int angle_suppress,
                                            int dist_suppress);

}  // namespace groundnav
