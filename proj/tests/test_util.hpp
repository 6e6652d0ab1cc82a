#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <vector>

#include "logsob/common.hpp"

namespace testutil {

// Least-squares slope of log(err) against log(n); used by the convergence
// order checks.
inline double loglog_slope(const std::vector<double>& n, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double x = std::log(n[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Graph-shortest-path distance on the cone metric du^2 + beta^2 u^2 dv^2,
// independent of any unrolling argument. Nodes on a (u, v) grid, edges to a
// local stencil with metric segment lengths, Dijkstra from the source.
// Accuracy is limited by the stencil (a few percent), enough to separate
// candidate geodesics.
inline double cone_distance_dijkstra(double beta, double u_src, double v_src, double u_dst,
                                     double v_dst, double u_max = 3.0, int nu = 121,
                                     int nv = 240) {
    const double du = u_max / (nu - 1);
    const double dv = 2.0 * logsob::kPi / nv;
    auto id = [&](int iu, int iv) { return iu * nv + ((iv % nv) + nv) % nv; };
    auto metric_len = [&](int iu1, int iv1, int iu2, int iv2) {
        const double u1 = iu1 * du, u2 = iu2 * du;
        const double um = 0.5 * (u1 + u2);
        double dvv = (iv2 - iv1) * dv;
        if (dvv > logsob::kPi) dvv -= 2.0 * logsob::kPi;
        if (dvv < -logsob::kPi) dvv += 2.0 * logsob::kPi;
        const double dl_u = u2 - u1;
        return std::sqrt(dl_u * dl_u + beta * beta * um * um * dvv * dvv);
    };
    const int n = nu * nv;
    std::vector<double> dist(n, 1e300);
    auto snap = [&](double u, double v) {
        const int iu = static_cast<int>(std::lround(u / du));
        const int iv = static_cast<int>(std::lround(v / dv));
        return std::pair<int, int>{std::clamp(iu, 0, nu - 1), iv};
    };
    const auto [su, sv] = snap(u_src, v_src);
    const auto [tu, tv] = snap(u_dst, v_dst);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[id(su, sv)] = 0.0;
    pq.push({0.0, id(su, sv)});
    // stencil of knight-like moves for better angular resolution
    const int moves[][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1},
                            {-1, 1}, {-1, -1}, {1, 2}, {1, -2}, {-1, 2}, {-1, -2},
                            {2, 1}, {2, -1}, {-2, 1}, {-2, -1}};
    while (!pq.empty()) {
        const auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        const int iu = v / nv, iv = v % nv;
        for (const auto& mv : moves) {
            const int ju = iu + mv[0];
            if (ju < 0 || ju >= nu) continue;
            const int jv = iv + mv[1];
            const double nd = d + metric_len(iu, iv, ju, jv);
            const int w = id(ju, jv);
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
        // apex shortcut: every node at u = 0 is the same point
        if (iu == 0)
            for (int jv = 0; jv < nv; ++jv) {
                const int w = id(0, jv);
                if (d < dist[w]) {
                    dist[w] = d;
                    pq.push({d, w});
                }
            }
    }
    return dist[id(tu, tv)];
}

struct Rot2 {
    double c, s;
    logsob::Vec2 shift;
    logsob::Vec2 apply(logsob::Vec2 p) const {
        return {c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y};
    }
};

inline Rot2 random_rigid_motion_2d(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double a = unif(rng) * logsob::kPi;
    return {std::cos(a), std::sin(a), {3.0 * unif(rng), 3.0 * unif(rng)}};
}

// Rotation matrix from a random unit quaternion.
inline std::array<std::array<double, 3>, 3> random_rotation_3d(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    double q[4] = {g(rng), g(rng), g(rng), g(rng)};
    double nn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (double& x : q) x /= nn;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

// Smooth positive random field on a closed curve parameter grid.
inline std::vector<double> random_positive_field(std::uint64_t seed, std::size_t n,
                                                 double amplitude = 0.6) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double a[3], b[3];
    for (int k = 0; k < 3; ++k) {
        a[k] = unif(rng) * amplitude / (k + 1.0);
        b[k] = unif(rng) * amplitude / (k + 1.0);
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * logsob::kPi * static_cast<double>(i) / static_cast<double>(n);
        double g = 0.0;
        for (int k = 0; k < 3; ++k)
            g += a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t);
        f[i] = std::exp(g);
    }
    return f;
}

}  // namespace testutil
