#include "groundnav/predictors.hpp"

#include <algorithm>

#include "groundnav/angles.hpp"
#include "groundnav/geometry.hpp"
#include "groundnav/rng.hpp"

namespace groundnav {

std::vector<PolarOffset> oracle_predict(const NavGraph& graph, const std::string& node_id,
                                        const PredictorNoise& noise, std::uint64_t rng_seed) {
    const Vec3& origin = graph.position(node_id);
    Pose observer{origin.x(), origin.y(), 0.0, 0.0};
    SplitRng rng(rng_seed);
    std::vector<PolarOffset> out;
    for (const auto& nid : graph.neighbors(node_id)) {
        double u = rng.uniform01();
        if (u < noise.drop_prob) continue;
        Vec3 target = graph.position(nid);
        if (noise.pos_sigma > 0.0) {
            target.x() += noise.pos_sigma * rng.gaussian();
            target.y() += noise.pos_sigma * rng.gaussian();
        }
        out.push_back(relative_polar(observer, target));
    }
    return out;
}

std::vector<PolarOffset> depth_heuristic_predict(const PanoObservation& obs,
                                                 const Discretization& disc) {
    disc.validate();
    const double max_range = disc.max_range();
    std::vector<PolarOffset> out;
    for (int k = 0; k < kPanoViews; ++k) {
        const auto& view = obs.views[k];
        if (!view.min_depth.has_value()) {
            out.push_back(PolarOffset{max_range, sector_center(k)});
            continue;
        }
        double depth = *view.min_depth;
        if (depth < 0.5) continue;
        double dist = std::clamp(depth - 0.25, disc.dist_step, max_range);
        out.push_back(PolarOffset{dist, sector_center(k)});
    }
    return out;
}

}  // namespace groundnav
