#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "groundnav/types.hpp"

namespace groundnav {

namespace detail {

inline double min_distance_to(const Vec2& p, const std::vector<Vec2>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : set) {
        best = std::min(best, (p - q).norm());
    }
    return best;
}

}  // namespace detail

/// Symmetric Chamfer distance: half the sum of the two directed
/// mean-nearest-neighbor distances.
inline double chamfer(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("chamfer: point sets must be nonempty");
    }
    double ab = 0.0, ba = 0.0;
    for (const auto& p : a) ab += detail::min_distance_to(p, b);
    for (const auto& q : b) ba += detail::min_distance_to(q, a);
    return 0.5 * (ab / a.size() + ba / b.size());
}

inline double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff: point sets must be nonempty");
    }
    double ab = 0.0, ba = 0.0;
    for (const auto& p : a) ab = std::max(ab, detail::min_distance_to(p, b));
    for (const auto& q : b) ba = std::max(ba, detail::min_distance_to(q, a));
    return std::max(ab, ba);
}

}  // namespace groundnav
