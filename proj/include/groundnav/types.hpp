#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "groundnav/angles.hpp"

namespace groundnav {

using Scalar = double;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Per-view visual feature; width is fixed per run (default 32).
using FeatureVec = Eigen::VectorXd;

/// Agent or camera pose. z is the camera height above the floor.
/// heading is counterclockwise-positive radians in (-pi, pi], 0 = +x axis.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double heading = 0.0;

    Pose() = default;
    Pose(double x_, double y_, double z_, double heading_)
        : x(x_), y(y_), z(z_), heading(heading_) {}

    Vec2 xy() const { return Vec2(x, y); }
};

/// Offset from an observer: planar distance (> 0) and heading relative to
/// the observer's forward axis, in (-pi, pi].
struct PolarOffset {
    double distance = 0.0;
    double heading = 0.0;

    PolarOffset() = default;
    PolarOffset(double d, double h) : distance(d), heading(h) {}
};

/// One of the 12 panoramic views: an aggregated feature plus the distance to
/// the first obstruction along the sector center, or nullopt when open.
struct PanoView {
    FeatureVec feature;
    std::optional<double> min_depth;
};

struct PanoObservation {
    std::array<PanoView, kPanoViews> views;
};

inline bool is_finite(const FeatureVec& v) {
    return v.allFinite();
}

}  // namespace groundnav
