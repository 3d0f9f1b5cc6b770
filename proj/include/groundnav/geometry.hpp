#pragma once

#include <cmath>
#include <stdexcept>

#include "groundnav/angles.hpp"
#include "groundnav/types.hpp"

namespace groundnav {

/// Planar polar offset of `target` as seen from `observer`: distance in the
/// xy plane, heading relative to the observer's facing direction, wrapped to
/// (-pi, pi]. Throws if the two points coincide in the plane.
inline PolarOffset relative_polar(const Pose& observer, const Vec3& target) {
    double dx = target.x() - observer.x;
    double dy = target.y() - observer.y;
    double dist = std::hypot(dx, dy);
    if (dist == 0.0) {
        throw std::invalid_argument("relative_polar: target coincides with observer");
    }
    double heading = wrap_pi(std::atan2(dy, dx) - observer.heading);
    return PolarOffset{dist, heading};
}

inline double planar_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(a.x() - b.x(), a.y() - b.y());
}

}  // namespace groundnav
