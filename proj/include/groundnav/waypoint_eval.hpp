#pragma once

#include <optional>
#include <vector>

#include "groundnav/height_grid.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

/// Predictions and ground-truth targets for one node, as planar world points.
struct NodeEval {
    std::vector<Vec2> preds;
    std::vector<Vec2> targets;
};

struct WaypointEvalReport {
    double delta = 0.0;                    // mean | #targets - #preds |
    std::optional<double> pct_open;        // % of preds on cells below agent height
    std::optional<double> d_chamfer;       // mean over nodes with >= 1 pred
    std::optional<double> d_hausdorff;
    int n_nodes = 0;
};

/// A prediction is "open" when its grid cell height is below agent_height;
/// predictions outside the grid count as open. Nodes without predictions
/// still contribute to delta but are excluded from the distance means; the
/// optional fields stay empty when no node has predictions.
WaypointEvalReport eval_waypoints(const std::vector<NodeEval>& nodes, const HeightGrid& grid,
                                  double agent_height);

}  // namespace groundnav
