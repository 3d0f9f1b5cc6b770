#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "groundnav/connectivity.hpp"
#include "groundnav/dataset.hpp"
#include "groundnav/encoder.hpp"
#include "groundnav/geometry.hpp"
#include "groundnav/heatmap.hpp"
#include "groundnav/metrics.hpp"
#include "groundnav/parallel.hpp"
#include "groundnav/scenario.hpp"
#include "groundnav/sim.hpp"
#include "groundnav/waypoint_eval.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int g_log_level = 1;  // 0 debug, 1 info, 2 warn, 3 error

void log_info(const std::string& msg) {
    if (g_log_level <= 1) std::cerr << "[info] " << msg << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Every producing command drops a sibling <out>.config.json so runs can be
/// replayed from their outputs alone.
void write_config_echo(const fs::path& out_path, const ordered_json& config) {
    fs::path echo = out_path;
    echo += ".config.json";
    write_text(echo, config.dump(2) + "\n");
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    return in;
}

struct PolarLine {
    std::string scan;
    std::string node;
    std::vector<groundnav::PolarOffset> offsets;
};

std::vector<PolarLine> read_offset_jsonl(const fs::path& path, const char* list_key,
                                         const char* dist_key, const char* heading_key) {
    std::ifstream in = open_input(path);
    std::vector<PolarLine> lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            PolarLine pl;
            pl.scan = j.at("scan").get<std::string>();
            pl.node = j.at("node").get<std::string>();
            for (const auto& jt : j.at(list_key)) {
                pl.offsets.push_back({jt.at(dist_key).get<double>(),
                                      jt.at(heading_key).get<double>()});
            }
            lines.push_back(std::move(pl));
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return lines;
}

int run_ingest(const fs::path& dir, const fs::path& out, int threads, ordered_json config) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("connectivity directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("no .json connectivity files in " + dir.string());
    }

    std::vector<groundnav::NavGraph> graphs(files.size());
    groundnav::parallel_for(static_cast<int>(files.size()), threads, [&](int i) {
        auto scan = groundnav::load_connectivity(files[i].stem().string(), files[i]);
        graphs[i] = groundnav::build_nav_graph(scan);
    });

    write_text(out, groundnav::nav_graphs_to_json(graphs) + "\n");
    write_config_echo(out, config);
    log_info("ingested " + std::to_string(graphs.size()) + " scans -> " + out.string());
    return 0;
}

int run_build_dataset(const fs::path& graphs_file, double height, const fs::path& out,
                      const groundnav::Discretization& disc, int threads, ordered_json config) {
    auto graphs = groundnav::load_nav_graphs(graphs_file);
    std::vector<groundnav::AnnotationResult> results(graphs.size());
    groundnav::parallel_for(static_cast<int>(graphs.size()), threads, [&](int i) {
        results[i] = groundnav::annotate_waypoint_targets(graphs[i], height);
    });

    std::vector<groundnav::WaypointSample> samples;
    int skipped = 0;
    for (const auto& r : results) {
        samples.insert(samples.end(), r.samples.begin(), r.samples.end());
        skipped += r.skipped_isolated;
    }
    if (samples.empty()) {
        throw std::runtime_error("no samples produced (all nodes isolated?) from " +
                                 graphs_file.string());
    }

    std::ostringstream body;
    groundnav::DatasetManifest manifest = groundnav::emit_dataset(samples, body);
    manifest.skipped_isolated = skipped;
    write_text(out, body.str());

    ordered_json jm;
    jm["per_scan"] = manifest.per_scan;
    jm["total_samples"] = manifest.total_samples;
    jm["camera_height"] = manifest.camera_height;
    jm["skipped_isolated"] = manifest.skipped_isolated;
    jm["discretization"] = {{"angle_bins", disc.angle_bins},
                            {"dist_bins", disc.dist_bins},
                            {"dist_step", disc.dist_step}};
    fs::path manifest_path = out;
    manifest_path += ".manifest.json";
    write_text(manifest_path, jm.dump(2) + "\n");
    write_config_echo(out, config);
    log_info("wrote " + std::to_string(manifest.total_samples) + " samples -> " + out.string());
    return 0;
}

int run_eval_waypoints(const fs::path& pred_path, const fs::path& truth_path,
                       const fs::path& graphs_file, const fs::path& grid_dir,
                       double agent_height, const fs::path& out, ordered_json config) {
    auto graphs = groundnav::load_nav_graphs(graphs_file);
    std::map<std::string, const groundnav::NavGraph*> by_scan;
    for (const auto& g : graphs) by_scan[g.scan_id] = &g;

    auto truth = read_offset_jsonl(truth_path, "targets", "dist", "heading");
    auto preds = read_offset_jsonl(pred_path, "preds", "dist", "heading");

    std::map<std::pair<std::string, std::string>, std::vector<groundnav::PolarOffset>> pred_map;
    for (auto& pl : preds) pred_map[{pl.scan, pl.node}] = std::move(pl.offsets);

    auto world_points = [&](const std::string& scan, const std::string& node,
                            const std::vector<groundnav::PolarOffset>& offsets) {
        auto it = by_scan.find(scan);
        if (it == by_scan.end()) {
            throw std::runtime_error(graphs_file.string() + ": scan " + scan +
                                     " referenced by samples is missing");
        }
        const groundnav::Vec3& base = it->second->position(node);
        std::vector<groundnav::Vec2> pts;
        for (const auto& off : offsets) {
            pts.emplace_back(base.x() + off.distance * std::cos(off.heading),
                             base.y() + off.distance * std::sin(off.heading));
        }
        return pts;
    };

    // Group truth nodes per scan, attach matching predictions.
    std::map<std::string, std::vector<groundnav::NodeEval>> per_scan;
    std::set<std::pair<std::string, std::string>> truth_keys;
    for (const auto& tl : truth) {
        truth_keys.insert({tl.scan, tl.node});
        groundnav::NodeEval ne;
        ne.targets = world_points(tl.scan, tl.node, tl.offsets);
        auto it = pred_map.find({tl.scan, tl.node});
        if (it != pred_map.end()) {
            ne.preds = world_points(tl.scan, tl.node, it->second);
        }
        per_scan[tl.scan].push_back(std::move(ne));
    }
    for (const auto& [key, offs] : pred_map) {
        if (!truth_keys.count(key)) {
            throw std::runtime_error(pred_path.string() + ": prediction for unknown node " +
                                     key.first + "/" + key.second);
        }
    }
    if (per_scan.empty()) {
        throw std::runtime_error(truth_path.string() + ": no samples");
    }

    // Count-weighted merge of the per-scan reports.
    double delta_sum = 0.0;
    long total_preds = 0, open_preds = 0;
    double chamfer_sum = 0.0, hausdorff_sum = 0.0;
    int n_nodes = 0, nodes_with_preds = 0;
    for (const auto& [scan, nodes] : per_scan) {
        fs::path grid_path = grid_dir / (scan + ".json");
        groundnav::HeightGrid grid = groundnav::HeightGrid::load(grid_path);
        auto report = groundnav::eval_waypoints(nodes, grid, agent_height);
        n_nodes += report.n_nodes;
        delta_sum += report.delta * report.n_nodes;
        long scan_preds = 0;
        int scan_nodes_with_preds = 0;
        for (const auto& ne : nodes) {
            scan_preds += static_cast<long>(ne.preds.size());
            if (!ne.preds.empty()) ++scan_nodes_with_preds;
        }
        total_preds += scan_preds;
        if (report.pct_open) {
            open_preds += std::lround(*report.pct_open * scan_preds / 100.0);
        }
        if (report.d_chamfer) {
            chamfer_sum += *report.d_chamfer * scan_nodes_with_preds;
            hausdorff_sum += *report.d_hausdorff * scan_nodes_with_preds;
            nodes_with_preds += scan_nodes_with_preds;
        }
    }

    ordered_json jr;
    jr["delta"] = delta_sum / n_nodes;
    jr["pct_open"] = total_preds > 0
                         ? ordered_json(100.0 * static_cast<double>(open_preds) / total_preds)
                         : ordered_json(nullptr);
    jr["d_chamfer"] =
        nodes_with_preds > 0 ? ordered_json(chamfer_sum / nodes_with_preds) : ordered_json(nullptr);
    jr["d_hausdorff"] = nodes_with_preds > 0 ? ordered_json(hausdorff_sum / nodes_with_preds)
                                             : ordered_json(nullptr);
    jr["n_nodes"] = n_nodes;
    write_text(out, jr.dump(2) + "\n");
    write_config_echo(out, config);
    log_info("evaluated " + std::to_string(n_nodes) + " nodes -> " + out.string());
    return 0;
}

int run_simulate(const fs::path& scenario_path, int episodes, std::uint64_t seed,
                 const std::string& aggregation, const std::string& policy_name,
                 std::optional<double> agent_height, const std::string& predictor_name,
                 double pos_sigma, double drop_prob, const std::optional<fs::path>& params_path,
                 int max_steps, double epsilon, double localize_radius, const fs::path& out,
                 const std::optional<fs::path>& dump_map, int threads, ordered_json config) {
    groundnav::Scenario sc = groundnav::load_scenario(scenario_path);
    if (agent_height) {
        sc.agent_height = *agent_height;
        sc.validate();
    }

    groundnav::AggregationMode mode = aggregation == "average"
                                          ? groundnav::AggregationMode::Average
                                          : groundnav::AggregationMode::Attention;
    groundnav::EncoderParams params =
        params_path ? groundnav::load_params(*params_path)
                    : groundnav::EncoderParams::seeded(sc.feature_dim, 1, seed);
    if (params.d != sc.feature_dim) {
        throw std::runtime_error("parameter width " + std::to_string(params.d) +
                                 " does not match scenario feature_dim " +
                                 std::to_string(sc.feature_dim));
    }

    groundnav::Policy policy;
    if (policy_name == "nearest") {
        policy = groundnav::make_nearest_to_goal_policy(sc.goal);
    } else {
        if (!sc.target_landmark) {
            throw std::runtime_error(scenario_path.string() +
                                     ": feature policy needs a target_landmark");
        }
        policy = groundnav::make_feature_match_policy(sc.feature_of(*sc.target_landmark), mode,
                                                      params);
    }

    groundnav::EpisodeOptions opt;
    opt.predictor = predictor_name == "depth" ? groundnav::PredictorKind::DepthHeuristic
                                              : groundnav::PredictorKind::Oracle;
    opt.noise = {pos_sigma, drop_prob};
    opt.max_steps = max_steps;
    opt.epsilon = epsilon;
    opt.localize_radius = localize_radius;

    std::vector<groundnav::EpisodeResult> results;
    results.reserve(episodes);
    for (int i = 0; i < episodes; ++i) {
        results.push_back(groundnav::EpisodeResult{{}, groundnav::TopoMap(epsilon, localize_radius)});
    }
    groundnav::parallel_for(episodes, threads, [&](int i) {
        results[i] = groundnav::run_episode(sc, policy, opt, i, seed);
    });

    std::ostringstream body;
    for (const auto& r : results) body << groundnav::trajectory_to_json(r.trajectory) << "\n";
    write_text(out, body.str());
    if (dump_map) {
        std::ostringstream maps;
        for (int i = 0; i < episodes; ++i) {
            ordered_json line;
            line["episode"] = i;
            line["map"] = nlohmann::ordered_json::parse(results[i].map.snapshot_json());
            maps << line.dump() << "\n";
        }
        write_text(*dump_map, maps.str());
    }
    write_config_echo(out, config);
    log_info("simulated " + std::to_string(episodes) + " episodes -> " + out.string());
    return 0;
}

int run_metrics(const fs::path& traj_path, const fs::path& scenario_path, double success_radius,
                const fs::path& out, ordered_json config) {
    groundnav::Scenario sc = groundnav::load_scenario(scenario_path);
    std::vector<groundnav::Vec2> reference = groundnav::reference_path(sc);
    double geodesic = groundnav::geodesic_length(sc);

    std::ifstream in = open_input(traj_path);
    std::vector<groundnav::MetricsRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto traj = groundnav::trajectory_from_json(
            line, traj_path.string() + ":" + std::to_string(line_no));
        records.push_back(
            groundnav::compute_metrics(traj, sc.goal, geodesic, reference, success_radius));
    }
    if (records.empty()) {
        throw std::runtime_error(traj_path.string() + ": no trajectories");
    }
    auto summary = groundnav::aggregate_report(records);
    write_text(out, groundnav::report_to_json(records, summary) + "\n");
    write_config_echo(out, config);
    log_info("scored " + std::to_string(records.size()) + " episodes -> " + out.string());
    return 0;
}

int run_dump_params(const fs::path& params_path) {
    groundnav::EncoderParams p = groundnav::load_params(params_path);
    ordered_json j;
    j["d"] = p.d;
    j["heads"] = p.heads;
    j["fusion_b"] = p.fusion_b;
    j["fusion_w_norm"] = p.fusion_w.norm();
    j["wq_norm"] = p.wq.norm();
    j["ff_w1_norm"] = p.ff_w1.norm();
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ground-level navigation toolkit: graphs, waypoints, topo maps, simulation"};
    app.require_subcommand(0, 1);

    std::uint64_t seed = 0;
    int threads = 0;
    std::string log_level = "info";
    app.add_option("--seed", seed, "global random seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--log-level", log_level, "debug|info|warn|error")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}))
        ->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "parse connectivity scans into a graphs file");
    fs::path ingest_dir, ingest_out;
    ingest->add_option("--connectivity", ingest_dir, "directory of per-scan .json files")
        ->required();
    ingest->add_option("--out", ingest_out, "output graphs.json")->required();

    auto* build = app.add_subcommand("build-dataset", "annotate waypoint targets per node");
    fs::path build_graphs, build_out;
    double build_height = 0.0;
    groundnav::Discretization build_disc;
    build->add_option("--graphs", build_graphs, "graphs.json from ingest")->required();
    build->add_option("--height", build_height, "camera height in meters")->required();
    build->add_option("--out", build_out, "output dataset .jsonl")->required();
    build->add_option("--angle-bins", build_disc.angle_bins, "heatmap angle bins")
        ->capture_default_str();
    build->add_option("--dist-bins", build_disc.dist_bins, "heatmap distance bins")
        ->capture_default_str();
    build->add_option("--dist-step", build_disc.dist_step, "distance bin size, meters")
        ->capture_default_str();

    auto* evalw = app.add_subcommand("eval-waypoints", "score predictions against a dataset");
    fs::path evalw_pred, evalw_truth, evalw_graphs, evalw_grid, evalw_out;
    double evalw_height = 0.0;
    evalw->add_option("--pred", evalw_pred, "predictions .jsonl")->required();
    evalw->add_option("--truth", evalw_truth, "dataset .jsonl from build-dataset")->required();
    evalw->add_option("--graphs", evalw_graphs, "graphs.json anchoring node positions")
        ->required();
    evalw->add_option("--grid", evalw_grid, "directory of per-scan height grids <scan>.json")
        ->required();
    evalw->add_option("--agent-height", evalw_height, "height for the open-space test")
        ->required();
    evalw->add_option("--out", evalw_out, "output report.json")->required();

    auto* simulate = app.add_subcommand("simulate", "run navigation episodes in a scenario");
    fs::path sim_scenario, sim_out;
    int sim_episodes = 1;
    std::string sim_aggregation = "attention";
    std::string sim_policy = "nearest";
    std::string sim_predictor = "oracle";
    double sim_pos_sigma = 0.0, sim_drop_prob = 0.0;
    double sim_epsilon = 0.5, sim_localize = 0.5;
    int sim_max_steps = 15;
    std::optional<double> sim_agent_height;
    std::optional<fs::path> sim_params, sim_dump_map;
    simulate->add_option("--scenario", sim_scenario, "scenario .json")->required();
    simulate->add_option("--episodes", sim_episodes, "episode count")->capture_default_str();
    simulate->add_option("--aggregation", sim_aggregation, "ghost feature aggregation")
        ->check(CLI::IsMember({"attention", "average"}))
        ->capture_default_str();
    simulate->add_option("--policy", sim_policy, "node selection policy")
        ->check(CLI::IsMember({"nearest", "feature"}))
        ->capture_default_str();
    simulate->add_option("--predictor", sim_predictor, "waypoint predictor")
        ->check(CLI::IsMember({"oracle", "depth"}))
        ->capture_default_str();
    simulate->add_option("--agent-height", sim_agent_height,
                         "override the scenario's agent height");
    simulate->add_option("--pos-sigma", sim_pos_sigma, "oracle positional noise sigma")
        ->capture_default_str();
    simulate->add_option("--drop-prob", sim_drop_prob, "oracle per-waypoint drop probability")
        ->capture_default_str();
    simulate->add_option("--params", sim_params, "encoder parameter file (default: seeded)");
    simulate->add_option("--max-steps", sim_max_steps, "step budget per episode")
        ->capture_default_str();
    simulate->add_option("--epsilon", sim_epsilon, "map pruning radius")->capture_default_str();
    simulate->add_option("--localize-radius", sim_localize, "waypoint localization radius")
        ->capture_default_str();
    simulate->add_option("--out", sim_out, "output trajectories .jsonl")->required();
    simulate->add_option("--dump-map", sim_dump_map, "write final map snapshots .jsonl");

    auto* metrics = app.add_subcommand("metrics", "score trajectories against a scenario");
    fs::path met_traj, met_scenario, met_out;
    double met_radius = 3.0;
    metrics->add_option("--traj", met_traj, "trajectories .jsonl")->required();
    metrics->add_option("--scenario", met_scenario, "scenario .json")->required();
    metrics->add_option("--success-radius", met_radius, "success distance, meters")
        ->capture_default_str();
    metrics->add_option("--out", met_out, "output metrics.json")->required();

    auto* dump = app.add_subcommand("dump-params", "print a parameter file header");
    fs::path dump_path;
    dump->add_option("--params", dump_path, "parameter file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (log_level == "debug") g_log_level = 0;
    else if (log_level == "info") g_log_level = 1;
    else if (log_level == "warn") g_log_level = 2;
    else g_log_level = 3;

    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 1;
    }

    try {
        if (*ingest) {
            ordered_json cfg{{"command", "ingest"},
                             {"connectivity", ingest_dir.string()},
                             {"out", ingest_out.string()},
                             {"seed", seed},
                             {"threads", threads}};
            return run_ingest(ingest_dir, ingest_out, threads, cfg);
        }
        if (*build) {
            ordered_json cfg{{"command", "build-dataset"},
                             {"graphs", build_graphs.string()},
                             {"height", build_height},
                             {"out", build_out.string()},
                             {"angle_bins", build_disc.angle_bins},
                             {"dist_bins", build_disc.dist_bins},
                             {"dist_step", build_disc.dist_step},
                             {"seed", seed},
                             {"threads", threads}};
            return run_build_dataset(build_graphs, build_height, build_out, build_disc, threads,
                                     cfg);
        }
        if (*evalw) {
            ordered_json cfg{{"command", "eval-waypoints"},
                             {"pred", evalw_pred.string()},
                             {"truth", evalw_truth.string()},
                             {"graphs", evalw_graphs.string()},
                             {"grid", evalw_grid.string()},
                             {"agent_height", evalw_height},
                             {"out", evalw_out.string()}};
            return run_eval_waypoints(evalw_pred, evalw_truth, evalw_graphs, evalw_grid,
                                      evalw_height, evalw_out, cfg);
        }
        if (*simulate) {
            ordered_json cfg{{"command", "simulate"},
                             {"scenario", sim_scenario.string()},
                             {"episodes", sim_episodes},
                             {"seed", seed},
                             {"aggregation", sim_aggregation},
                             {"policy", sim_policy},
                             {"predictor", sim_predictor},
                             {"pos_sigma", sim_pos_sigma},
                             {"drop_prob", sim_drop_prob},
                             {"max_steps", sim_max_steps},
                             {"epsilon", sim_epsilon},
                             {"localize_radius", sim_localize},
                             {"out", sim_out.string()},
                             {"threads", threads}};
            if (sim_agent_height) cfg["agent_height"] = *sim_agent_height;
            if (sim_params) cfg["params"] = sim_params->string();
            if (sim_dump_map) cfg["dump_map"] = sim_dump_map->string();
            return run_simulate(sim_scenario, sim_episodes, seed, sim_aggregation, sim_policy,
                                sim_agent_height, sim_predictor, sim_pos_sigma, sim_drop_prob,
                                sim_params, sim_max_steps, sim_epsilon, sim_localize, sim_out,
                                sim_dump_map, threads, cfg);
        }
        if (*metrics) {
            ordered_json cfg{{"command", "metrics"},
                             {"traj", met_traj.string()},
                             {"scenario", met_scenario.string()},
                             {"success_radius", met_radius},
                             {"out", met_out.string()}};
            return run_metrics(met_traj, met_scenario, met_radius, met_out, cfg);
        }
        if (*dump) {
            return run_dump_params(dump_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
