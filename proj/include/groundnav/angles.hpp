#pragma once

#include <cmath>

namespace groundnav {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Panoramic observations always cover 360 degrees with 12 sectors of 30 degrees.
inline constexpr int kPanoViews = 12;
inline constexpr double kSectorWidth = kTwoPi / kPanoViews;

/// Wrap an angle into (-pi, pi].
inline double wrap_pi(double a) {
    double w = std::fmod(a + kPi, kTwoPi);
    if (w <= 0.0) w += kTwoPi;
    return w - kPi;
}

/// Wrap an angle into [0, 2*pi).
inline double wrap_two_pi(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod can return exactly 2*pi after the correction when a is a tiny negative.
    if (w >= kTwoPi) w = 0.0;
    return w;
}

/// Sector index for a heading relative to the observer's forward axis.
/// Sector k spans [k*30deg - 15deg, k*30deg + 15deg); sector 0 looks forward.
inline int pano_sector(double relative_heading) {
    int k = static_cast<int>(std::floor((relative_heading + kSectorWidth / 2.0) / kSectorWidth));
    k %= kPanoViews;
    if (k < 0) k += kPanoViews;
    return k;
}

/// Center heading of a sector, wrapped into (-pi, pi].
inline double sector_center(int sector) {
    return wrap_pi(sector * kSectorWidth);
}

}  // namespace groundnav
