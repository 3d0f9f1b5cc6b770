#include "groundnav/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "groundnav/angles.hpp"

namespace groundnav {

double Discretization::angle_step() const {
    return kTwoPi / angle_bins;
}

void Discretization::validate() const {
    if (angle_bins < 4) throw std::invalid_argument("discretization: angle_bins must be >= 4");
    if (dist_bins < 1) throw std::invalid_argument("discretization: dist_bins must be >= 1");
    if (!(dist_step > 0.0)) throw std::invalid_argument("discretization: dist_step must be > 0");
}

int distance_bin(double distance, const Discretization& disc) {
    int bin = static_cast<int>(std::ceil(distance / disc.dist_step)) - 1;
    return std::max(bin, 0);
}

int angle_bin(double heading, const Discretization& disc) {
    int bin = static_cast<int>(std::floor(wrap_two_pi(heading) / disc.angle_step()));
    return std::clamp(bin, 0, disc.angle_bins - 1);
}

RasterizeResult rasterize_targets(const WaypointSample& sample, double agent_heading,
                                  const Discretization& disc) {
    disc.validate();
    RasterizeResult result;
    result.heatmap = Heatmap(disc);
    for (const auto& t : sample.targets) {
        if (t.distance > disc.max_range()) {
            ++result.dropped;
            continue;
        }
        int a = angle_bin(t.heading - agent_heading, disc);
        int d = distance_bin(t.distance, disc);
        result.heatmap.grid(a, d) = 1.0;
    }
    return result;
}

std::vector<PolarOffset> extract_candidates(const Heatmap& h, int k_max, int angle_suppress,
                                            int dist_suppress) {
    if (k_max < 1) throw std::invalid_argument("extract_candidates: k_max must be >= 1");
    const int A = h.disc.angle_bins;
    const int D = h.disc.dist_bins;
    Eigen::MatrixXd grid = h.grid;
    std::vector<PolarOffset> out;
    while (static_cast<int>(out.size()) < k_max) {
        int best_a = -1, best_d = -1;
        double best = 0.0;
        for (int a = 0; a < A; ++a) {
            for (int d = 0; d < D; ++d) {
                if (grid(a, d) > best) {
                    best = grid(a, d);
                    best_a = a;
                    best_d = d;
                }
            }
        }
        if (best_a < 0) break;
        out.push_back(PolarOffset{(best_d + 0.5) * h.disc.dist_step,
                                  wrap_pi((best_a + 0.5) * h.disc.angle_step())});
        for (int da = -angle_suppress; da <= angle_suppress; ++da) {
            int a = ((best_a + da) % A + A) % A;
            for (int dd = -dist_suppress; dd <= dist_suppress; ++dd) {
                int d = best_d + dd;
                if (d >= 0 && d < D) grid(a, d) = 0.0;
            }
        }
    }
    return out;
}

}  // namespace groundnav
