#include "groundnav/dataset.hpp"

#include <stdexcept>

#include <json.hpp>

#include "groundnav/geometry.hpp"

namespace groundnav {

AnnotationResult annotate_waypoint_targets(const NavGraph& graph, double camera_height) {
    if (!(camera_height > 0.0)) {
        throw std::invalid_argument("annotate_waypoint_targets: camera height must be positive");
    }
    AnnotationResult result;
    for (const auto& [id, pos] : graph.nodes) {
        auto neighbor_ids = graph.neighbors(id);
        if (neighbor_ids.empty()) {
            ++result.skipped_isolated;
            continue;
        }
        WaypointSample sample;
        sample.scan_id = graph.scan_id;
        sample.node_id = id;
        sample.camera_height = camera_height;
        Pose observer{pos.x(), pos.y(), camera_height, 0.0};
        for (const auto& nid : neighbor_ids) {
            PolarOffset off = relative_polar(observer, graph.position(nid));
            sample.targets.push_back({nid, off.distance, off.heading});
        }
        result.samples.push_back(std::move(sample));
    }
    return result;
}

DatasetManifest emit_dataset(const std::vector<WaypointSample>& samples, std::ostream& out) {
    if (samples.empty()) {
        throw std::invalid_argument("emit_dataset: no samples");
    }
    DatasetManifest manifest;
    manifest.camera_height = samples.front().camera_height;
    for (const auto& s : samples) {
        nlohmann::ordered_json line;
        line["scan"] = s.scan_id;
        line["node"] = s.node_id;
        line["height"] = s.camera_height;
        auto targets = nlohmann::ordered_json::array();
        for (const auto& t : s.targets) {
            targets.push_back({{"neighbor", t.neighbor_id},
                               {"dist", t.distance},
                               {"heading", t.heading}});
        }
        line["targets"] = std::move(targets);
        out << line.dump() << "\n";
        if (!out) {
            throw std::runtime_error("emit_dataset: write failed");
        }
        ++manifest.per_scan[s.scan_id];
        ++manifest.total_samples;
    }
    return manifest;
}

}  // namespace groundnav
