#include "groundnav/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "groundnav/rng.hpp"

namespace groundnav {

FeatureVec landmark_feature(std::uint64_t seed, int dim) {
    if (dim < 1) throw std::invalid_argument("landmark_feature: dim must be >= 1");
    SplitRng rng(seed);
    FeatureVec f(dim);
    for (int i = 0; i < dim; ++i) f(i) = rng.gaussian();
    double n = f.norm();
    if (n == 0.0) {
        f.setZero();
        f(0) = 1.0;
        return f;
    }
    return f / n;
}

const FeatureVec& Scenario::feature_of(const std::string& landmark_id) const {
    auto it = landmark_features.find(landmark_id);
    if (it == landmark_features.end()) {
        throw std::out_of_range("scenario: unknown landmark " + landmark_id);
    }
    return it->second;
}

const Landmark& Scenario::landmark(const std::string& landmark_id) const {
    for (const auto& lm : landmarks) {
        if (lm.id == landmark_id) return lm;
    }
    throw std::out_of_range("scenario: unknown landmark " + landmark_id);
}

void Scenario::validate() const {
    if (!(agent_height > 0.0)) {
        throw std::invalid_argument("scenario: agent_height must be positive");
    }
    if (feature_dim < 1) {
        throw std::invalid_argument("scenario: feature_dim must be >= 1");
    }
    if (!(sensor_range > 0.0)) {
        throw std::invalid_argument("scenario: sensor_range must be positive");
    }
    if (!graph.has_node(start_node)) {
        throw std::invalid_argument("scenario: start node " + start_node + " not in graph");
    }
    const Vec3& s = graph.position(start_node);
    if (!grid.contains(s.x(), s.y())) {
        throw std::invalid_argument("scenario: start node outside grid");
    }
    if (!grid.contains(goal.x(), goal.y())) {
        throw std::invalid_argument("scenario: goal outside grid");
    }
    if (goal_node && !graph.has_node(*goal_node)) {
        throw std::invalid_argument("scenario: goal node " + *goal_node + " not in graph");
    }
    if (target_landmark) {
        landmark(*target_landmark);
    }
    for (const auto& [id, pos] : graph.nodes) {
        if (!grid.contains(pos.x(), pos.y())) {
            throw std::invalid_argument("scenario: graph node " + id + " outside grid");
        }
    }
    for (const auto& lm : landmarks) {
        if (!grid.contains(lm.position.x(), lm.position.y())) {
            throw std::invalid_argument("scenario: landmark " + lm.id + " outside grid");
        }
    }
}

Scenario parse_scenario(const std::string& json_text, const std::string& source_name,
                        const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    }
    try {
        Scenario sc;
        sc.scan_id = j.at("scan").get<std::string>();

        const auto& jg = j.at("graph");
        sc.graph.scan_id = sc.scan_id;
        for (const auto& jn : jg.at("nodes")) {
            std::string id = jn.at("id").get<std::string>();
            const auto& p = jn.at("pos");
            if (!sc.graph.nodes
                     .emplace(id, Vec3(p.at(0).get<double>(), p.at(1).get<double>(),
                                       p.at(2).get<double>()))
                     .second) {
                throw std::runtime_error(source_name + ": duplicate graph node " + id);
            }
        }
        std::set<std::pair<std::string, std::string>> seen_edges;
        for (const auto& je : jg.at("edges")) {
            std::string a = je.at(0).get<std::string>();
            std::string b = je.at(1).get<std::string>();
            if (a == b) {
                throw std::runtime_error(source_name + ": self-loop edge on " + a);
            }
            if (!sc.graph.has_node(a) || !sc.graph.has_node(b)) {
                throw std::runtime_error(source_name + ": edge references unknown node");
            }
            if (!seen_edges.insert({std::min(a, b), std::max(a, b)}).second) continue;
            sc.graph.edges.push_back(
                {a, b, (sc.graph.position(a) - sc.graph.position(b)).norm()});
        }

        if (j.contains("grid_file")) {
            sc.grid = HeightGrid::load(base_dir / j.at("grid_file").get<std::string>());
        } else {
            sc.grid = HeightGrid::from_json_text(j.at("grid").dump(), source_name + "#grid");
        }

        for (const auto& jl : j.value("landmarks", nlohmann::json::array())) {
            Landmark lm;
            lm.id = jl.at("id").get<std::string>();
            const auto& p = jl.at("pos");
            lm.position = Vec3(p.at(0).get<double>(), p.at(1).get<double>(),
                               p.at(2).get<double>());
            lm.feature_seed = jl.at("feature_seed").get<std::uint64_t>();
            sc.landmarks.push_back(std::move(lm));
        }

        sc.agent_height = j.at("agent_height").get<double>();
        sc.feature_dim = j.at("feature_dim").get<int>();
        sc.sensor_range = j.value("sensor_range", 5.0);

        const auto& js = j.at("start");
        sc.start_node = js.at("node").get<std::string>();
        sc.start_heading = js.value("heading", 0.0);

        const auto& jgoal = j.at("goal");
        const auto& gp = jgoal.at("pos");
        sc.goal = Vec2(gp.at(0).get<double>(), gp.at(1).get<double>());
        if (jgoal.contains("node")) {
            sc.goal_node = jgoal.at("node").get<std::string>();
        }
        if (j.contains("target_landmark")) {
            sc.target_landmark = j.at("target_landmark").get<std::string>();
        }

        for (const auto& lm : sc.landmarks) {
            sc.landmark_features[lm.id] = landmark_feature(lm.feature_seed, sc.feature_dim);
        }
        sc.validate();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string(), path.parent_path());
}

}  // namespace groundnav
