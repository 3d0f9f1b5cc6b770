#include "groundnav/height_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace groundnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

HeightGrid::HeightGrid(double resolution, Vec2 origin, int width, int height,
                       std::vector<double> cells)
    : resolution_(resolution),
      origin_(origin),
      width_(width),
      height_(height),
      cells_(std::move(cells)) {
    if (!(resolution_ > 0.0)) {
        throw std::invalid_argument("height grid: resolution must be positive");
    }
    if (width_ <= 0 || height_ <= 0) {
        throw std::invalid_argument("height grid: width and height must be positive");
    }
    if (cells_.size() != static_cast<size_t>(width_) * static_cast<size_t>(height_)) {
        throw std::invalid_argument("height grid: cell count does not match width*height");
    }
    for (double h : cells_) {
        if (!std::isfinite(h) || h < 0.0) {
            throw std::invalid_argument("height grid: cell heights must be finite and >= 0");
        }
    }
}

HeightGrid HeightGrid::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open height grid file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path.string());
}

HeightGrid HeightGrid::from_json_text(const std::string& text, const std::string& source_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    }
    try {
        double res = j.at("resolution").get<double>();
        auto org = j.at("origin");
        int w = j.at("width").get<int>();
        int h = j.at("height").get<int>();
        std::vector<double> cells = j.at("cells").get<std::vector<double>>();
        return HeightGrid(res, Vec2(org.at(0).get<double>(), org.at(1).get<double>()), w, h,
                          std::move(cells));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source_name + ": " + e.what());
    }
}

std::string HeightGrid::to_json_text() const {
    nlohmann::ordered_json j;
    j["resolution"] = resolution_;
    j["origin"] = {origin_.x(), origin_.y()};
    j["width"] = width_;
    j["height"] = height_;
    j["cells"] = cells_;
    return j.dump();
}

void HeightGrid::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write height grid file: " + path.string());
    }
    out << to_json_text() << "\n";
}

bool HeightGrid::contains(double x, double y) const {
    return x >= origin_.x() && x < origin_.x() + width_ * resolution_ &&
           y >= origin_.y() && y < origin_.y() + height_ * resolution_;
}

int HeightGrid::cell_x(double x) const {
    return static_cast<int>(std::floor((x - origin_.x()) / resolution_));
}

int HeightGrid::cell_y(double y) const {
    return static_cast<int>(std::floor((y - origin_.y()) / resolution_));
}

double HeightGrid::cell_height(int ix, int iy) const {
    if (ix < 0 || ix >= width_ || iy < 0 || iy >= height_) {
        throw std::out_of_range("height grid: cell index out of range");
    }
    return cells_[static_cast<size_t>(iy) * width_ + ix];
}

void HeightGrid::set_cell(int ix, int iy, double h) {
    if (ix < 0 || ix >= width_ || iy < 0 || iy >= height_) {
        throw std::out_of_range("height grid: cell index out of range");
    }
    cells_[static_cast<size_t>(iy) * width_ + ix] = h;
}

std::vector<GridCell> HeightGrid::walk(const Vec2& o, const Vec2& d, double t_end) const {
    std::vector<GridCell> out;
    int ix = cell_x(o.x());
    int iy = cell_y(o.y());
    int step_x = d.x() > 0.0 ? 1 : (d.x() < 0.0 ? -1 : 0);
    int step_y = d.y() > 0.0 ? 1 : (d.y() < 0.0 ? -1 : 0);

    double t_max_x = kInf, t_delta_x = kInf;
    if (step_x != 0) {
        double boundary = origin_.x() + (ix + (step_x > 0 ? 1 : 0)) * resolution_;
        t_max_x = (boundary - o.x()) / d.x();
        t_delta_x = resolution_ / std::abs(d.x());
    }
    double t_max_y = kInf, t_delta_y = kInf;
    if (step_y != 0) {
        double boundary = origin_.y() + (iy + (step_y > 0 ? 1 : 0)) * resolution_;
        t_max_y = (boundary - o.y()) / d.y();
        t_delta_y = resolution_ / std::abs(d.y());
    }

    double t = 0.0;
    while (true) {
        double t_next = std::min({t_max_x, t_max_y, t_end});
        out.push_back(GridCell{ix, iy, t, t_next});
        if (t_next >= t_end) break;
        if (t_max_x == t_next) {
            ix += step_x;
            t_max_x += t_delta_x;
        }
        if (t_max_y == t_next) {
            iy += step_y;
            t_max_y += t_delta_y;
        }
        t = t_next;
        if (ix < 0 || ix >= width_ || iy < 0 || iy >= height_) break;
    }
    return out;
}

std::vector<GridCell> HeightGrid::walk_segment(const Vec2& a, const Vec2& b) const {
    return walk(a, b - a, 1.0);
}

std::vector<GridCell> HeightGrid::walk_ray(const Vec2& from, double world_heading) const {
    Vec2 dir(std::cos(world_heading), std::sin(world_heading));
    return walk(from, dir, kInf);
}

bool ray_visible(const HeightGrid& grid, const Pose& from, const Vec3& to) {
    if (!grid.contains(from.x, from.y)) {
        throw std::out_of_range("ray_visible: observer outside grid");
    }
    if (!grid.contains(to.x(), to.y())) {
        throw std::out_of_range("ray_visible: target outside grid");
    }
    auto cells = grid.walk_segment(Vec2(from.x, from.y), Vec2(to.x(), to.y()));
    double dz = to.z() - from.z;
    for (size_t i = 1; i + 1 < cells.size(); ++i) {
        double z_a = from.z + dz * cells[i].t_enter;
        double z_b = from.z + dz * cells[i].t_exit;
        if (grid.cell_height(cells[i].ix, cells[i].iy) >= std::min(z_a, z_b)) {
            return false;
        }
    }
    return true;
}

std::optional<double> first_block_distance(const HeightGrid& grid, const Vec2& from,
                                           double world_heading, double min_height) {
    if (!grid.contains(from.x(), from.y())) {
        throw std::out_of_range("first_block_distance: origin outside grid");
    }
    auto cells = grid.walk_ray(from, world_heading);
    for (size_t i = 1; i < cells.size(); ++i) {
        if (grid.cell_height(cells[i].ix, cells[i].iy) >= min_height) {
            return cells[i].t_enter;
        }
    }
    return std::nullopt;
}

MotionResult trace_motion(const HeightGrid& grid, const Vec2& from, const Vec2& to) {
    if (!grid.contains(from.x(), from.y())) {
        throw std::out_of_range("trace_motion: start outside grid");
    }
    if (!grid.contains(to.x(), to.y())) {
        throw std::out_of_range("trace_motion: target outside grid");
    }
    auto cells = grid.walk_segment(from, to);
    for (size_t i = 1; i < cells.size(); ++i) {
        if (grid.cell_height(cells[i].ix, cells[i].iy) > 0.0) {
            double t = std::max(cells[i].t_enter - 1e-9, 0.0);
            return MotionResult{from + t * (to - from), true};
        }
    }
    return MotionResult{to, false};
}

}  // namespace groundnav
