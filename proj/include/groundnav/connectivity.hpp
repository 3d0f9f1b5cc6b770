#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "groundnav/types.hpp"

namespace groundnav {

/// One panorama node as it appears in a connectivity scan file.
struct ScanEntry {
    std::string node_id;
    Vec3 position = Vec3::Zero();
    bool included = true;
    std::vector<bool> unobstructed;
};

struct ScanGraph {
    std::string scan_id;
    std::vector<ScanEntry> entries;
};

/// Undirected navigation graph over the included nodes of one scan.
struct NavGraph {
    struct Edge {
        std::string a;
        std::string b;
        double weight = 0.0;
    };

    std::string scan_id;
    std::map<std::string, Vec3> nodes;
    std::vector<Edge> edges;

    bool has_node(const std::string& id) const { return nodes.count(id) > 0; }
    const Vec3& position(const std::string& id) const;
    std::vector<std::string> neighbors(const std::string& id) const;
    int degree(const std::string& id) const;
};

/// Parses one scan's connectivity JSON: an array of
/// {"image_id", "pose" (16 numbers, row-major 4x4), "included", "unobstructed"}.
/// Excluded entries are retained; filtering happens in build_nav_graph.
ScanGraph parse_connectivity(const std::string& scan_id, const std::string& json_text,
                             const std::string& source_name);

ScanGraph load_connectivity(const std::string& scan_id, const std::filesystem::path& path);

/// Keeps included entries only; an edge exists iff either directed
/// unobstructed flag is set; weight = Euclidean distance between endpoints.
NavGraph build_nav_graph(const ScanGraph& scan);

/// Multi-scan graphs file: {"scans":[{"scan", "nodes":[{"id","pos"}], "edges":[[a,b,w]]}]}.
std::string nav_graphs_to_json(const std::vector<NavGraph>& graphs);
std::vector<NavGraph> load_nav_graphs(const std::filesystem::path& path);

}  // namespace groundnav
