#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groundnav/connectivity.hpp"
#include "groundnav/heatmap.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

struct PredictorNoise {
    double pos_sigma = 0.0;
    double drop_prob = 0.0;
};

/// Ground-truth waypoint stand-in: the node's graph-neighbor offsets
/// (world-aligned frame), optionally jittered with Gaussian positional noise
/// and independently dropped. Deterministic for a given seed.
std::vector<PolarOffset> oracle_predict(const NavGraph& graph, const std::string& node_id,
                                        const PredictorNoise& noise, std::uint64_t rng_seed);

/// Depth-only baseline: one candidate per open-enough view, placed short of
/// the first obstacle (or at max range when the view is open).
std::vector<PolarOffset> depth_heuristic_predict(const PanoObservation& obs,
                                                 const Discretization& disc);

}  // namespace groundnav
