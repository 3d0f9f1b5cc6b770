#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "groundnav/connectivity.hpp"
#include "groundnav/height_grid.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

struct Landmark {
    std::string id;
    Vec3 position = Vec3::Zero();
    std::uint64_t feature_seed = 0;
};

/// Desk-scale world: a navigation graph laid over a height grid, plus point
/// landmarks whose features stand in for visual content.
struct Scenario {
    std::string scan_id;
    NavGraph graph;
    HeightGrid grid = HeightGrid(1.0, Vec2::Zero(), 1, 1, {0.0});
    std::vector<Landmark> landmarks;
    double agent_height = 0.3;
    int feature_dim = 32;
    double sensor_range = 5.0;
    std::string start_node;
    double start_heading = 0.0;
    Vec2 goal = Vec2::Zero();
    std::optional<std::string> goal_node;
    std::optional<std::string> target_landmark;

    /// Cached unit feature per landmark, derived from its seed.
    std::map<std::string, FeatureVec> landmark_features;

    const FeatureVec& feature_of(const std::string& landmark_id) const;
    const Landmark& landmark(const std::string& landmark_id) const;
    void validate() const;
};

/// Deterministic unit-norm feature for a landmark seed.
FeatureVec landmark_feature(std::uint64_t seed, int dim);

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text, const std::string& source_name,
                        const std::filesystem::path& base_dir);

}  // namespace groundnav
