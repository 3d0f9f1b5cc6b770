#include "groundnav/waypoint_eval.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "groundnav/point_metrics.hpp"

namespace groundnav {

WaypointEvalReport eval_waypoints(const std::vector<NodeEval>& nodes, const HeightGrid& grid,
                                  double agent_height) {
    if (nodes.empty()) {
        throw std::invalid_argument("eval_waypoints: no nodes");
    }
    WaypointEvalReport report;
    report.n_nodes = static_cast<int>(nodes.size());

    double delta_sum = 0.0;
    long total_preds = 0, open_preds = 0;
    double chamfer_sum = 0.0, hausdorff_sum = 0.0;
    int nodes_with_preds = 0;

    for (const auto& node : nodes) {
        if (node.targets.empty()) {
            throw std::invalid_argument("eval_waypoints: node with empty target set");
        }
        delta_sum += std::abs(static_cast<double>(node.targets.size()) -
                              static_cast<double>(node.preds.size()));
        for (const auto& p : node.preds) {
            ++total_preds;
            if (!grid.contains(p.x(), p.y()) ||
                grid.cell_height(grid.cell_x(p.x()), grid.cell_y(p.y())) < agent_height) {
                ++open_preds;
            }
        }
        if (!node.preds.empty()) {
            ++nodes_with_preds;
            chamfer_sum += chamfer(node.preds, node.targets);
            hausdorff_sum += hausdorff(node.preds, node.targets);
        }
    }

    report.delta = delta_sum / nodes.size();
    if (total_preds > 0) {
        report.pct_open = 100.0 * static_cast<double>(open_preds) / total_preds;
    }
    if (nodes_with_preds > 0) {
        report.d_chamfer = chamfer_sum / nodes_with_preds;
        report.d_hausdorff = hausdorff_sum / nodes_with_preds;
    }
    return report;
}

}  // namespace groundnav
