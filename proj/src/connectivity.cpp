#include "groundnav/connectivity.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace groundnav {

const Vec3& NavGraph::position(const std::string& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) {
        throw std::out_of_range("nav graph: unknown node " + id);
    }
    return it->second;
}

std::vector<std::string> NavGraph::neighbors(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& e : edges) {
        if (e.a == id) out.push_back(e.b);
        else if (e.b == id) out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int NavGraph::degree(const std::string& id) const {
    int n = 0;
    for (const auto& e : edges) {
        if (e.a == id || e.b == id) ++n;
    }
    return n;
}

ScanGraph parse_connectivity(const std::string& scan_id, const std::string& json_text,
                             const std::string& source_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    }
    if (!j.is_array()) {
        throw std::runtime_error(source_name + ": expected a top-level array of entries");
    }

    ScanGraph scan;
    scan.scan_id = scan_id;
    const size_t n = j.size();
    std::set<std::string> seen;
    for (size_t i = 0; i < n; ++i) {
        const auto& item = j[i];
        ScanEntry entry;
        try {
            entry.node_id = item.at("image_id").get<std::string>();
            const auto& pose = item.at("pose");
            if (!pose.is_array() || pose.size() != 16) {
                throw std::runtime_error(source_name + ": entry " + std::to_string(i) +
                                         " (" + entry.node_id + "): pose must have 16 numbers");
            }
            entry.position = Vec3(pose.at(3).get<double>(), pose.at(7).get<double>(),
                                  pose.at(11).get<double>());
            entry.included = item.at("included").get<bool>();
            entry.unobstructed = item.at("unobstructed").get<std::vector<bool>>();
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(source_name + ": entry " + std::to_string(i) + ": " +
                                     e.what());
        }
        if (entry.unobstructed.size() != n) {
            throw std::runtime_error(source_name + ": entry " + std::to_string(i) + " (" +
                                     entry.node_id + "): unobstructed list has " +
                                     std::to_string(entry.unobstructed.size()) +
                                     " entries, expected " + std::to_string(n));
        }
        if (!seen.insert(entry.node_id).second) {
            throw std::runtime_error(source_name + ": entry " + std::to_string(i) +
                                     ": duplicate node id " + entry.node_id);
        }
        scan.entries.push_back(std::move(entry));
    }
    return scan;
}

ScanGraph load_connectivity(const std::string& scan_id, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open connectivity file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_connectivity(scan_id, buf.str(), path.string());
}

NavGraph build_nav_graph(const ScanGraph& scan) {
    NavGraph g;
    g.scan_id = scan.scan_id;
    for (const auto& e : scan.entries) {
        if (e.included) g.nodes[e.node_id] = e.position;
    }
    const size_t n = scan.entries.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const auto& a = scan.entries[i];
            const auto& b = scan.entries[j];
            if (!a.included || !b.included) continue;
            if (!a.unobstructed[j] && !b.unobstructed[i]) continue;
            g.edges.push_back({a.node_id, b.node_id, (a.position - b.position).norm()});
        }
    }
    return g;
}

std::string nav_graphs_to_json(const std::vector<NavGraph>& graphs) {
    nlohmann::ordered_json j;
    auto scans = nlohmann::ordered_json::array();
    for (const auto& g : graphs) {
        nlohmann::ordered_json jg;
        jg["scan"] = g.scan_id;
        auto nodes = nlohmann::ordered_json::array();
        for (const auto& [id, pos] : g.nodes) {
            nodes.push_back({{"id", id}, {"pos", {pos.x(), pos.y(), pos.z()}}});
        }
        jg["nodes"] = std::move(nodes);
        auto edges = nlohmann::ordered_json::array();
        for (const auto& e : g.edges) {
            edges.push_back({e.a, e.b, e.weight});
        }
        jg["edges"] = std::move(edges);
        scans.push_back(std::move(jg));
    }
    j["scans"] = std::move(scans);
    return j.dump(2);
}

std::vector<NavGraph> load_nav_graphs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open graphs file: " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    std::vector<NavGraph> graphs;
    try {
        for (const auto& jg : j.at("scans")) {
            NavGraph g;
            g.scan_id = jg.at("scan").get<std::string>();
            for (const auto& jn : jg.at("nodes")) {
                const auto& p = jn.at("pos");
                g.nodes[jn.at("id").get<std::string>()] =
                    Vec3(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
            }
            for (const auto& je : jg.at("edges")) {
                NavGraph::Edge e{je.at(0).get<std::string>(), je.at(1).get<std::string>(),
                                 je.at(2).get<double>()};
                if (!g.has_node(e.a) || !g.has_node(e.b)) {
                    throw std::runtime_error(path.string() + ": edge references unknown node in scan " +
                                             g.scan_id);
                }
                g.edges.push_back(std::move(e));
            }
            graphs.push_back(std::move(g));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return graphs;
}

}  // namespace groundnav
