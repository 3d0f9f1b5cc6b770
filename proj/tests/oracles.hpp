#pragma once

// Reference implementations used only by tests. Everything here is written
// with plain loops and explicit arithmetic so a bug in the library's Eigen or
// traversal code cannot hide in a shared helper.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "groundnav/connectivity.hpp"
#include "groundnav/encoder.hpp"
#include "groundnav/heatmap.hpp"
#include "groundnav/height_grid.hpp"
#include "groundnav/sim.hpp"
#include "groundnav/topo_map.hpp"
#include "groundnav/types.hpp"

namespace refimpl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic generator for test inputs.
struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    double uni() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
    double uni(double a, double b) { return a + (b - a) * uni(); }
    int pick(int a, int b) { return a + static_cast<int>(g() % static_cast<std::uint64_t>(b - a + 1)); }
    bool coin(double p) { return uni() < p; }
    double gauss() {
        double u1 = 1.0 - uni();
        double u2 = uni();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * groundnav::kPi * u2);
    }
};

// ---------------------------------------------------------------- angles ---

inline double wrap_angle(double a) {
    while (a > groundnav::kPi) a -= 2.0 * groundnav::kPi;
    while (a <= -groundnav::kPi) a += 2.0 * groundnav::kPi;
    return a;
}

inline groundnav::PolarOffset polar(const groundnav::Pose& o, double tx, double ty) {
    double dx = tx - o.x;
    double dy = ty - o.y;
    return {std::sqrt(dx * dx + dy * dy), wrap_angle(std::atan2(dy, dx) - o.heading)};
}

// Sector by direct comparison against each sector's angular interval.
inline int sector_of(double relative_heading) {
    double half = groundnav::kSectorWidth / 2.0;
    for (int k = 0; k < groundnav::kPanoViews; ++k) {
        double diff = wrap_angle(relative_heading - k * groundnav::kSectorWidth);
        if (diff >= -half && diff < half) return k;
    }
    return 0;  // unreachable for finite input
}

// ----------------------------------------------------------- point metrics ---

inline double point_min(const groundnav::Vec2& p, const std::vector<groundnav::Vec2>& set) {
    double best = kInf;
    for (const auto& q : set) {
        best = std::min(best, std::hypot(p.x() - q.x(), p.y() - q.y()));
    }
    return best;
}

inline double chamfer(const std::vector<groundnav::Vec2>& a,
                      const std::vector<groundnav::Vec2>& b) {
    double ab = 0.0, ba = 0.0;
    for (const auto& p : a) ab += point_min(p, b);
    for (const auto& q : b) ba += point_min(q, a);
    return 0.5 * (ab / static_cast<double>(a.size()) + ba / static_cast<double>(b.size()));
}

inline double hausdorff(const std::vector<groundnav::Vec2>& a,
                        const std::vector<groundnav::Vec2>& b) {
    double ab = 0.0, ba = 0.0;
    for (const auto& p : a) ab = std::max(ab, point_min(p, b));
    for (const auto& q : b) ba = std::max(ba, point_min(q, a));
    return std::max(ab, ba);
}

// ------------------------------------------------------------------- nDTW ---

// Memoized recursion straight off the alignment recurrence.
inline double dtw_cost(const std::vector<groundnav::Vec2>& p,
                       const std::vector<groundnav::Vec2>& r) {
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(r.size());
    std::vector<double> memo(static_cast<size_t>(n) * m, -1.0);
    std::function<double(int, int)> rec = [&](int i, int j) -> double {
        if (i < 0 || j < 0) return (i == -1 && j == -1) ? 0.0 : kInf;
        double& slot = memo[static_cast<size_t>(i) * m + j];
        if (slot >= 0.0) return slot;
        double c = std::hypot(p[i].x() - r[j].x(), p[i].y() - r[j].y());
        slot = c + std::min({rec(i - 1, j - 1), rec(i - 1, j), rec(i, j - 1)});
        return slot;
    };
    return rec(n - 1, m - 1);
}

// Literal enumeration of every monotone alignment path; exponential, so only
// for small inputs. Cross-checks the memoized version.
inline double dtw_cost_enumerated(const std::vector<groundnav::Vec2>& p,
                                  const std::vector<groundnav::Vec2>& r) {
    const int n = static_cast<int>(p.size());
    const int m = static_cast<int>(r.size());
    double best = kInf;
    std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
        acc += std::hypot(p[i].x() - r[j].x(), p[i].y() - r[j].y());
        if (acc >= best) return;
        if (i == n - 1 && j == m - 1) {
            best = acc;
            return;
        }
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
        if (i + 1 < n) walk(i + 1, j, acc);
        if (j + 1 < m) walk(i, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

inline double ndtw(const std::vector<groundnav::Vec2>& p, const std::vector<groundnav::Vec2>& r,
                   double d_th) {
    return std::exp(-dtw_cost(p, r) / (static_cast<double>(r.size()) * d_th));
}

// ------------------------------------------------------------ trajectory ---

struct Metrics {
    double tl = 0.0, ne = 0.0, spl = 0.0, ndtw = 0.0;
    int sr = 0, osr = 0;
};

inline Metrics metrics(const std::vector<groundnav::Pose>& poses, const groundnav::Vec2& goal,
                       double geo, const std::vector<groundnav::Vec2>& reference, double d_th) {
    Metrics m;
    for (size_t i = 1; i < poses.size(); ++i) {
        m.tl += std::hypot(poses[i].x - poses[i - 1].x, poses[i].y - poses[i - 1].y);
    }
    double closest = kInf;
    for (const auto& p : poses) {
        closest = std::min(closest, std::hypot(p.x - goal.x(), p.y - goal.y()));
    }
    m.ne = std::hypot(poses.back().x - goal.x(), poses.back().y - goal.y());
    m.sr = m.ne <= d_th ? 1 : 0;
    m.osr = closest <= d_th ? 1 : 0;
    m.spl = geo == 0.0 ? m.sr : m.sr * geo / std::max(m.tl, geo);
    std::vector<groundnav::Vec2> path;
    for (const auto& p : poses) path.emplace_back(p.x, p.y);
    m.ndtw = ndtw(path, reference, d_th);
    return m;
}

// ---------------------------------------------------------------- encoder ---

using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(const Eigen::MatrixXd& m) {
    Mat out(m.rows(), std::vector<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    }
    return out;
}

inline std::vector<double> to_vec(const Eigen::VectorXd& v) {
    std::vector<double> out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
    return out;
}

inline Mat layer_norm(const Mat& x, const std::vector<double>& gain,
                      const std::vector<double>& bias) {
    const size_t n = x.size(), d = x[0].size();
    Mat out(n, std::vector<double>(d));
    for (size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (size_t j = 0; j < d; ++j) mean += x[i][j];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (size_t j = 0; j < d; ++j) var += (x[i][j] - mean) * (x[i][j] - mean);
        var /= static_cast<double>(d);
        double denom = std::sqrt(std::max(var, 1e-5));
        for (size_t j = 0; j < d; ++j) {
            out[i][j] = (x[i][j] - mean) / denom * gain[j] + bias[j];
        }
    }
    return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    const size_t n = a.size(), k = b.size(), m = b[0].size();
    Mat out(n, std::vector<double>(m, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t t = 0; t < k; ++t) {
            for (size_t j = 0; j < m; ++j) out[i][j] += a[i][t] * b[t][j];
        }
    }
    return out;
}

inline std::vector<double> softmax(const std::vector<double>& s) {
    double mx = -kInf;
    for (double v : s) mx = std::max(mx, v);
    std::vector<double> e(s.size());
    double sum = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
        e[i] = std::exp(s[i] - mx);
        sum += e[i];
    }
    for (double& v : e) v /= sum;
    return e;
}

inline Mat encoder_forward(const Mat& v, const groundnav::EncoderParams& p) {
    const size_t n = v.size();
    const size_t d = static_cast<size_t>(p.d);
    const size_t dh = d / static_cast<size_t>(p.heads);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Mat n1 = layer_norm(v, to_vec(p.norm1_gain), to_vec(p.norm1_bias));
    Mat q = matmul(n1, to_mat(p.wq));
    Mat key = matmul(n1, to_mat(p.wk));
    Mat val = matmul(n1, to_mat(p.wv));

    Mat ctx(n, std::vector<double>(d, 0.0));
    for (int h = 0; h < p.heads; ++h) {
        const size_t off = static_cast<size_t>(h) * dh;
        for (size_t i = 0; i < n; ++i) {
            std::vector<double> scores(n, 0.0);
            for (size_t j = 0; j < n; ++j) {
                for (size_t k = 0; k < dh; ++k) scores[j] += q[i][off + k] * key[j][off + k];
                scores[j] *= scale;
            }
            std::vector<double> w = softmax(scores);
            for (size_t j = 0; j < n; ++j) {
                for (size_t k = 0; k < dh; ++k) ctx[i][off + k] += w[j] * val[j][off + k];
            }
        }
    }

    Mat attn = matmul(ctx, to_mat(p.wo));
    Mat x1(n, std::vector<double>(d));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) x1[i][j] = v[i][j] + attn[i][j];
    }

    Mat n2 = layer_norm(x1, to_vec(p.norm2_gain), to_vec(p.norm2_bias));
    Mat w1 = to_mat(p.ff_w1);
    Mat w2 = to_mat(p.ff_w2);
    std::vector<double> b1 = to_vec(p.ff_b1), b2 = to_vec(p.ff_b2);
    Mat hidden(n, std::vector<double>(4 * d, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < 4 * d; ++k) {
            double acc = b1[k];
            for (size_t j = 0; j < d; ++j) acc += n2[i][j] * w1[j][k];
            hidden[i][k] = acc > 0.0 ? acc : 0.0;
        }
    }
    Mat out(n, std::vector<double>(d));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) {
            double acc = b2[j];
            for (size_t k = 0; k < 4 * d; ++k) acc += hidden[i][k] * w2[k][j];
            out[i][j] = x1[i][j] + acc;
        }
    }
    return out;
}

inline std::vector<double> attention_weights(const Mat& v_prime,
                                             const groundnav::EncoderParams& p) {
    std::vector<double> fw = to_vec(p.fusion_w);
    std::vector<double> scores(v_prime.size(), p.fusion_b);
    for (size_t i = 0; i < v_prime.size(); ++i) {
        for (size_t j = 0; j < fw.size(); ++j) scores[i] += v_prime[i][j] * fw[j];
    }
    return softmax(scores);
}

inline std::vector<double> aggregate_attention(const Mat& views,
                                               const groundnav::EncoderParams& p) {
    Mat vp = encoder_forward(views, p);
    std::vector<double> w = attention_weights(vp, p);
    std::vector<double> out(vp[0].size(), 0.0);
    for (size_t i = 0; i < vp.size(); ++i) {
        for (size_t j = 0; j < out.size(); ++j) out[j] += w[i] * vp[i][j];
    }
    return out;
}

// ------------------------------------------------------------- grid rays ---

struct CellHit {
    int ix = 0, iy = 0;
    double t0 = 0.0, t1 = 0.0;
};

// Every cell a segment crosses, found by solving for grid-line crossings
// directly and sampling interval midpoints (no incremental stepping).
inline std::vector<CellHit> segment_cells(const groundnav::HeightGrid& g,
                                          const groundnav::Vec2& a, const groundnav::Vec2& b,
                                          double t_lo = 0.0, double t_hi = 1.0) {
    const double dx = b.x() - a.x();
    const double dy = b.y() - a.y();
    std::vector<double> ts{t_lo, t_hi};
    auto add_crossings = [&](double a0, double delta, double origin, int count) {
        if (delta == 0.0) return;
        for (int line = 0; line <= count; ++line) {
            double coord = origin + line * g.resolution();
            double t = (coord - a0) / delta;
            if (t > t_lo && t < t_hi) ts.push_back(t);
        }
    };
    add_crossings(a.x(), dx, g.origin().x(), g.width());
    add_crossings(a.y(), dy, g.origin().y(), g.height());
    std::sort(ts.begin(), ts.end());

    std::vector<CellHit> out;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        if (ts[i + 1] - ts[i] < 1e-12) continue;
        double mid = 0.5 * (ts[i] + ts[i + 1]);
        double mx = a.x() + mid * dx;
        double my = a.y() + mid * dy;
        int ix = static_cast<int>(std::floor((mx - g.origin().x()) / g.resolution()));
        int iy = static_cast<int>(std::floor((my - g.origin().y()) / g.resolution()));
        out.push_back({ix, iy, ts[i], ts[i + 1]});
    }
    return out;
}

inline bool ray_visible(const groundnav::HeightGrid& g, const groundnav::Pose& from,
                        const groundnav::Vec3& to) {
    auto cells = segment_cells(g, groundnav::Vec2(from.x, from.y),
                               groundnav::Vec2(to.x(), to.y()));
    double dz = to.z() - from.z;
    for (size_t i = 1; i + 1 < cells.size(); ++i) {
        double za = from.z + dz * cells[i].t0;
        double zb = from.z + dz * cells[i].t1;
        if (g.cell_height(cells[i].ix, cells[i].iy) >= std::min(za, zb)) return false;
    }
    return true;
}

// Parameter at which a ray starting inside the grid leaves it.
inline double ray_exit(const groundnav::HeightGrid& g, const groundnav::Vec2& from,
                       double heading) {
    double dx = std::cos(heading), dy = std::sin(heading);
    double t = kInf;
    auto bound = [&](double p, double d, double lo, double hi) {
        if (d > 0.0) t = std::min(t, (hi - p) / d);
        if (d < 0.0) t = std::min(t, (lo - p) / d);
    };
    bound(from.x(), dx, g.origin().x(), g.origin().x() + g.width() * g.resolution());
    bound(from.y(), dy, g.origin().y(), g.origin().y() + g.height() * g.resolution());
    return t;
}

inline std::optional<double> first_block(const groundnav::HeightGrid& g,
                                         const groundnav::Vec2& from, double heading,
                                         double min_height) {
    double exit = ray_exit(g, from, heading);
    groundnav::Vec2 end(from.x() + exit * std::cos(heading), from.y() + exit * std::sin(heading));
    auto cells = segment_cells(g, from, end, 0.0, 1.0);
    for (size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].ix < 0 || cells[i].ix >= g.width() || cells[i].iy < 0 ||
            cells[i].iy >= g.height()) {
            break;
        }
        if (g.cell_height(cells[i].ix, cells[i].iy) >= min_height) return cells[i].t0 * exit;
    }
    return std::nullopt;
}

// First obstructed cell along a floor move, as (entry parameter, found).
inline std::optional<double> motion_block(const groundnav::HeightGrid& g,
                                          const groundnav::Vec2& from,
                                          const groundnav::Vec2& to) {
    auto cells = segment_cells(g, from, to);
    for (size_t i = 1; i < cells.size(); ++i) {
        if (g.cell_height(cells[i].ix, cells[i].iy) > 0.0) return cells[i].t0;
    }
    return std::nullopt;
}

// ------------------------------------------------------------ nav graphs ---

inline std::set<std::pair<std::string, std::string>> nav_edges(const groundnav::ScanGraph& s) {
    std::set<std::pair<std::string, std::string>> out;
    const size_t n = s.entries.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& a = s.entries[i];
            const auto& b = s.entries[j];
            if (!a.included || !b.included) continue;
            if (!a.unobstructed[j] && !b.unobstructed[i]) continue;
            out.insert({std::min(a.node_id, b.node_id), std::max(a.node_id, b.node_id)});
        }
    }
    return out;
}

// All simple paths, minimum cost, lexicographically smallest on ties.
template <typename Id>
inline std::pair<double, std::vector<Id>> best_path(
    const std::map<Id, std::vector<std::pair<Id, double>>>& adj, const Id& from, const Id& to) {
    double best_cost = kInf;
    std::vector<Id> best;
    std::vector<Id> stack{from};
    std::set<Id> visited{from};
    std::function<void(const Id&, double)> dfs = [&](const Id& u, double cost) {
        if (u == to) {
            if (cost < best_cost || (cost == best_cost && stack < best)) {
                best_cost = cost;
                best = stack;
            }
            return;
        }
        auto it = adj.find(u);
        if (it == adj.end()) return;
        for (const auto& [v, w] : it->second) {
            if (visited.count(v)) continue;
            visited.insert(v);
            stack.push_back(v);
            dfs(v, cost + w);
            stack.pop_back();
            visited.erase(v);
        }
    };
    dfs(from, 0.0);
    return {best_cost, best};
}

// --------------------------------------------------------- topo map rules ---

struct MapObs {
    Eigen::VectorXd feature;
    int source = -1;
    double heading = 0.0;
};

struct MapNode {
    int id = -1;
    int kind = 0;  // 0 visited, 1 current, 2 ghost
    double x = 0.0, y = 0.0, z = 0.0;
    std::vector<MapObs> obs;
    int samples = 1;
};

struct MapState {
    double eps;
    double radius;
    std::vector<MapNode> nodes;  // ascending id
    std::set<std::pair<int, int>> edges;
    int next_id = 0;
    int current = -1;

    MapState(double e, double r) : eps(e), radius(r) {}

    MapNode* find(int id) {
        for (auto& n : nodes) {
            if (n.id == id) return &n;
        }
        return nullptr;
    }

    void link(int a, int b) {
        if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
    }

    void start(double x, double y, double z) {
        MapNode n;
        n.id = next_id++;
        n.kind = 1;
        n.x = x;
        n.y = y;
        n.z = z;
        current = n.id;
        nodes.push_back(std::move(n));
    }

    // Per-waypoint outcome mirroring UpdateEntry: (code, node id) with
    // 0 localized-visited, 1 localized-ghost, 2 new-ghost, 3 rejected.
    std::vector<std::pair<int, int>> update(const std::vector<groundnav::WaypointInput>& wps) {
        std::vector<std::pair<int, int>> outcomes;
        for (const auto& wp : wps) {
            if (!wp.position.allFinite() || !wp.feature.allFinite()) {
                outcomes.push_back({3, -1});
                continue;
            }
            double wx = wp.position.x(), wy = wp.position.y(), wz = wp.position.z();
            const MapNode* found = nullptr;
            double found_dist = kInf;
            for (const auto& n : nodes) {
                double d = std::sqrt((n.x - wx) * (n.x - wx) + (n.y - wy) * (n.y - wy) +
                                     (n.z - wz) * (n.z - wz));
                if (d > radius) continue;
                bool better = d < found_dist ||
                              (d == found_dist && n.kind != 2 && found && found->kind == 2);
                if (!found || better) {
                    found = &n;
                    found_dist = d;
                }
            }
            if (!found) {
                MapNode n;
                n.id = next_id++;
                n.kind = 2;
                n.x = wx;
                n.y = wy;
                n.z = wz;
                n.obs.push_back({wp.feature, current, wp.source_heading});
                link(current, n.id);
                outcomes.push_back({2, n.id});
                nodes.push_back(std::move(n));
            } else if (found->kind == 2) {
                MapNode* g = find(found->id);
                g->x = (g->x * g->samples + wx) / (g->samples + 1);
                g->y = (g->y * g->samples + wy) / (g->samples + 1);
                g->z = (g->z * g->samples + wz) / (g->samples + 1);
                g->samples += 1;
                g->obs.push_back({wp.feature, current, wp.source_heading});
                link(current, g->id);
                outcomes.push_back({1, g->id});
            } else {
                link(current, found->id);
                outcomes.push_back({0, found->id});
            }
        }
        return outcomes;
    }

    void promote(int ghost_id) {
        find(current)->kind = 0;
        MapNode* g = find(ghost_id);
        g->kind = 1;
        g->obs.clear();
        current = ghost_id;
    }

    void set_current(int id) {
        if (id == current) return;
        find(current)->kind = 0;
        find(id)->kind = 1;
        current = id;
    }

    int prune() {
        auto rank = [](int kind) { return kind == 2 ? 0 : (kind == 0 ? 1 : 2); };
        int removed = 0;
        while (true) {
            int dead = -1, keep = -1;
            for (size_t i = 0; i < nodes.size() && dead < 0; ++i) {
                for (size_t j = i + 1; j < nodes.size(); ++j) {
                    const MapNode& a = nodes[i];
                    const MapNode& b = nodes[j];
                    double d = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                                         (a.z - b.z) * (a.z - b.z));
                    if (d >= eps) continue;
                    if (rank(a.kind) < rank(b.kind)) {
                        dead = a.id;
                        keep = b.id;
                    } else {
                        dead = b.id;
                        keep = a.id;
                    }
                    break;
                }
            }
            if (dead < 0) break;
            MapNode* d = find(dead);
            MapNode* k = find(keep);
            if (d->kind == 2 && k->kind == 2) {
                for (auto& o : d->obs) k->obs.push_back(std::move(o));
            }
            std::set<std::pair<int, int>> rebuilt;
            for (const auto& e : edges) {
                int a = e.first == dead ? keep : e.first;
                int b = e.second == dead ? keep : e.second;
                if (a != b) rebuilt.insert({std::min(a, b), std::max(a, b)});
            }
            edges = std::move(rebuilt);
            for (size_t i = 0; i < nodes.size(); ++i) {
                if (nodes[i].id == dead) {
                    nodes.erase(nodes.begin() + static_cast<long>(i));
                    break;
                }
            }
            ++removed;
        }
        return removed;
    }
};

// Structural equality between the reference state and the library map.
inline bool same_state(const MapState& ref, const groundnav::TopoMap& map, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<size_t>(map.nodes().size()) != ref.nodes.size()) {
        return fail("node count mismatch");
    }
    for (const auto& rn : ref.nodes) {
        if (!map.has_node(rn.id)) return fail("missing node " + std::to_string(rn.id));
        const groundnav::TopoNode& mn = map.node(rn.id);
        int kind = mn.kind == groundnav::NodeKind::Visited
                       ? 0
                       : (mn.kind == groundnav::NodeKind::Current ? 1 : 2);
        if (kind != rn.kind) return fail("kind mismatch at node " + std::to_string(rn.id));
        double dx = mn.position.x() - rn.x;
        double dy = mn.position.y() - rn.y;
        double dz = mn.position.z() - rn.z;
        if (std::sqrt(dx * dx + dy * dy + dz * dz) > 1e-9) {
            return fail("position mismatch at node " + std::to_string(rn.id));
        }
        if (rn.kind == 2) {
            if (mn.observations.size() != rn.obs.size()) {
                return fail("observation count mismatch at node " + std::to_string(rn.id));
            }
            for (size_t i = 0; i < rn.obs.size(); ++i) {
                if ((mn.observations[i].feature - rn.obs[i].feature).norm() > 1e-12 ||
                    mn.observations[i].source_node != rn.obs[i].source) {
                    return fail("observation mismatch at node " + std::to_string(rn.id));
                }
            }
            if (mn.position_samples != rn.samples) {
                return fail("sample count mismatch at node " + std::to_string(rn.id));
            }
        }
    }
    if (map.current_id() != ref.current) return fail("current id mismatch");

    std::set<std::pair<int, int>> impl_edges;
    for (const auto& [key, w] : map.edges()) {
        impl_edges.insert(key);
        const auto& a = map.node(key.first).position;
        const auto& b = map.node(key.second).position;
        if (std::abs(w - (a - b).norm()) > 1e-9) {
            return fail("edge weight mismatch at (" + std::to_string(key.first) + "," +
                        std::to_string(key.second) + ")");
        }
    }
    if (impl_edges != ref.edges) return fail("edge set mismatch");
    return true;
}

// ----------------------------------------------------------------- binning ---

inline int distance_bin(double d, const groundnav::Discretization& disc) {
    for (int b = 0; b < disc.dist_bins; ++b) {
        if (d <= (b + 1) * disc.dist_step) return b;
    }
    return disc.dist_bins - 1;
}

inline int angle_bin(double heading, const groundnav::Discretization& disc) {
    double a = heading;
    while (a < 0.0) a += 2.0 * groundnav::kPi;
    while (a >= 2.0 * groundnav::kPi) a -= 2.0 * groundnav::kPi;
    double step = 2.0 * groundnav::kPi / disc.angle_bins;
    for (int b = 0; b < disc.angle_bins; ++b) {
        if (a < (b + 1) * step) return b;
    }
    return disc.angle_bins - 1;
}

}  // namespace refimpl
