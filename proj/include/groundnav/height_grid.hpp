#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "groundnav/types.hpp"

namespace groundnav {

/// One cell visited by a grid walk, with the parameter interval the segment
/// spends inside it. For walk_segment the parameter is normalized to [0, 1];
/// for walk_ray it is meters along the ray.
struct GridCell {
    int ix = 0;
    int iy = 0;
    double t_enter = 0.0;
    double t_exit = 0.0;
};

/// 2.5D occupancy grid: per-cell obstacle heights in meters, 0.0 = free floor.
class HeightGrid {
public:
    HeightGrid(double resolution, Vec2 origin, int width, int height,
               std::vector<double> cells);

    static HeightGrid load(const std::filesystem::path& path);
    static HeightGrid from_json_text(const std::string& text, const std::string& source_name);
    std::string to_json_text() const;
    void save(const std::filesystem::path& path) const;

    double resolution() const { return resolution_; }
    const Vec2& origin() const { return origin_; }
    int width() const { return width_; }
    int height() const { return height_; }

    /// Half-open bounds [origin, origin + extent).
    bool contains(double x, double y) const;

    int cell_x(double x) const;
    int cell_y(double y) const;
    double cell_height(int ix, int iy) const;
    void set_cell(int ix, int iy, double h);

    /// Every cell the segment a->b crosses, in order, with normalized
    /// parameter intervals. Crossing a cell corner steps diagonally.
    std::vector<GridCell> walk_segment(const Vec2& a, const Vec2& b) const;

    /// Cells along a ray from `from` until it leaves the grid; parameter is
    /// distance in meters.
    std::vector<GridCell> walk_ray(const Vec2& from, double world_heading) const;

private:
    std::vector<GridCell> walk(const Vec2& origin, const Vec2& delta, double t_end) const;

    double resolution_;
    Vec2 origin_;
    int width_;
    int height_;
    std::vector<double> cells_;
};

/// True iff no traversed cell between the endpoints (endpoint cells excluded)
/// reaches the ray's interpolated height over that cell. Throws std::out_of_range
/// if either endpoint is outside the grid.
bool ray_visible(const HeightGrid& grid, const Pose& from, const Vec3& to);

/// Distance to the entry of the first cell with height >= min_height along the
/// ray (start cell excluded), or nullopt if the ray leaves the grid first.
std::optional<double> first_block_distance(const HeightGrid& grid, const Vec2& from,
                                           double world_heading, double min_height);

struct MotionResult {
    Vec2 stop;
    bool blocked = false;
};

/// Straight floor-level move. Any crossed cell with height > 0 stops the agent
/// just before that cell's boundary; the start cell never blocks.
MotionResult trace_motion(const HeightGrid& grid, const Vec2& from, const Vec2& to);

}  // namespace groundnav
