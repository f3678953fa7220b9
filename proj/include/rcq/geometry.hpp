#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>

#include "rcq/core.hpp"

namespace rcq {

// ---------------------------------------------------------------------------
// Distances. Squared Euclidean distances are exact in int64 for W <= 30, d <= 3.

template <int D>
inline std::int64_t dist2_sq(const Coords<D>& a, const Coords<D>& b) {
    std::int64_t s = 0;
    for (int d = 0; d < D; ++d) {
        std::int64_t t = a[d] - b[d];
        s += t * t;
    }
    return s;
}

template <int D>
inline double lp_distance(const Coords<D>& a, const Coords<D>& b, Norm norm) {
    switch (norm) {
        case Norm::L1: {
            std::int64_t s = 0;
            for (int d = 0; d < D; ++d) s += iabs(a[d] - b[d]);
            return double(s);
        }
        case Norm::L2:
            return std::sqrt(double(dist2_sq<D>(a, b)));
        case Norm::Linf: {
            std::int64_t m = 0;
            for (int d = 0; d < D; ++d) m = std::max(m, iabs(a[d] - b[d]));
            return double(m);
        }
    }
    return 0.0;
}

template <int D>
inline double linf_dist_real(const RealVec<D>& a, const Coords<D>& b) {
    double m = 0;
    for (int d = 0; d < D; ++d) m = std::max(m, std::fabs(a[d] - double(b[d])));
    return m;
}

template <int D>
inline double l2_dist_real(const RealVec<D>& a, const Coords<D>& b) {
    double s = 0;
    for (int d = 0; d < D; ++d) {
        double t = a[d] - double(b[d]);
        s += t * t;
    }
    return std::sqrt(s);
}

// Max pairwise Euclidean distance, by definition (quadratic scan).
template <int D>
inline double euclidean_diameter(const PointSet<D>& ps, std::span<const std::uint32_t> ids) {
    RCQ_REQUIRE(!ids.empty(), "euclidean_diameter: empty subset");
    std::int64_t best = 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            best = std::max(best, dist2_sq<D>(ps[ids[i]], ps[ids[j]]));
    return std::sqrt(double(best));
}

// ---------------------------------------------------------------------------
// Minimum enclosing balls.

template <int D>
struct Ball {
    RealVec<D> center{};
    double radius = 0.0;
};

// L-inf minimum enclosing cube: half the largest per-dimension extent.
template <int D>
inline Ball<D> enclosing_cube_linf(const PointSet<D>& ps, std::span<const std::uint32_t> ids) {
    RCQ_REQUIRE(!ids.empty(), "enclosing_radius: empty subset");
    Coords<D> lo = ps[ids[0]], hi = ps[ids[0]];
    for (auto id : ids)
        for (int d = 0; d < D; ++d) {
            lo[d] = std::min(lo[d], ps[id][d]);
            hi[d] = std::max(hi[d], ps[id][d]);
        }
    Ball<D> b;
    coord_t ext = 0;
    for (int d = 0; d < D; ++d) {
        b.center[d] = 0.5 * double(lo[d] + hi[d]);
        ext = std::max(ext, hi[d] - lo[d]);
    }
    b.radius = 0.5 * double(ext);
    return b;
}

namespace detail {

// Circumball of 1..D+1 affinely independent support points; returns false if
// the support is degenerate (the caller then ignores the candidate).
template <int D>
inline bool circumball(std::span<const Coords<D>> sup, Ball<D>& out) {
    const int m = int(sup.size());
    if (m == 1) {
        for (int d = 0; d < D; ++d) out.center[d] = double(sup[0][d]);
        out.radius = 0.0;
        return true;
    }
    if (m == 2) {
        for (int d = 0; d < D; ++d) out.center[d] = 0.5 * double(sup[0][d] + sup[1][d]);
        out.radius = 0.5 * std::sqrt(double(dist2_sq<D>(sup[0], sup[1])));
        return true;
    }
    // With c = p_0 + sum_j t_j u_j and u_i = p_{i+1} - p_0, equidistance gives
    // 2 sum_j t_j (u_j . u_i) = |u_i|^2 for i = 1..m-1.
    constexpr int M = D + 1;
    double A[M][M + 1] = {};
    const int k = m - 1;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            double dot = 0;
            for (int d = 0; d < D; ++d)
                dot += double(sup[i + 1][d] - sup[0][d]) * double(sup[j + 1][d] - sup[0][d]);
            A[i][j] = 2.0 * dot;
        }
        A[i][k] = 0;
        for (int d = 0; d < D; ++d) {
            double ui = double(sup[i + 1][d] - sup[0][d]);
            A[i][k] += ui * ui;
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (std::fabs(A[piv][col]) < 1e-12) return false;
        for (int j = 0; j <= k; ++j) std::swap(A[col][j], A[piv][j]);
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int j = col; j <= k; ++j) A[r][j] -= f * A[col][j];
        }
    }
    for (int d = 0; d < D; ++d) out.center[d] = double(sup[0][d]);
    for (int j = 0; j < k; ++j) {
        double t = A[j][k] / A[j][j];
        for (int d = 0; d < D; ++d) out.center[d] += t * double(sup[j + 1][d] - sup[0][d]);
    }
    out.radius = l2_dist_real<D>(out.center, sup[0]);
    return true;
}

template <int D>
inline bool in_ball(const Ball<D>& b, const Coords<D>& p, double slack) {
    return l2_dist_real<D>(b.center, p) <= b.radius + slack;
}

// Smallest ball containing a support set of <= D+1 points. Falls back to
// subset enumeration when the full support is affinely degenerate.
template <int D>
inline Ball<D> ball_of_support(std::span<const Coords<D>> sup) {
    Ball<D> full;
    if (circumball<D>(sup, full)) return full;
    const int m = int(sup.size());
    Ball<D> best;
    best.radius = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << m); ++mask) {
        std::vector<Coords<D>> sub;
        for (int i = 0; i < m; ++i)
            if (mask & (1 << i)) sub.push_back(sup[i]);
        Ball<D> c;
        if (!circumball<D>(std::span<const Coords<D>>(sub), c)) continue;
        bool ok = true;
        for (int i = 0; i < m && ok; ++i)
            ok = in_ball<D>(c, sup[i], 1e-9 * std::max(1.0, c.radius));
        if (ok && c.radius < best.radius) best = c;
    }
    return best;
}

// Welzl move-to-front over a fixed processing order.
template <int D>
inline Ball<D> welzl(const PointSet<D>& ps, std::vector<std::uint32_t>& order, std::size_t n,
                     std::vector<Coords<D>>& sup) {
    Ball<D> ball;
    if (sup.size() > 0) {
        ball = ball_of_support<D>(std::span<const Coords<D>>(sup));
    } else {
        ball.radius = -1.0;  // empty ball: contains nothing
    }
    if (sup.size() == std::size_t(D) + 1) return ball;
    for (std::size_t i = 0; i < n; ++i) {
        const Coords<D>& p = ps[order[i]];
        const double slack = 1e-9 * std::max(1.0, ball.radius);
        if (ball.radius < 0 || !in_ball<D>(ball, p, slack)) {
            sup.push_back(p);
            ball = welzl<D>(ps, order, i, sup);
            sup.pop_back();
            // move-to-front
            auto id = order[i];
            for (std::size_t j = i; j > 0; --j) order[j] = order[j - 1];
            order[0] = id;
        }
    }
    return ball;
}

}  // namespace detail

// L2 minimum enclosing ball (Welzl). Deterministic: fixed-seed shuffle.
template <int D>
inline Ball<D> enclosing_ball_l2(const PointSet<D>& ps, std::span<const std::uint32_t> ids) {
    RCQ_REQUIRE(!ids.empty(), "enclosing_radius: empty subset");
    std::vector<std::uint32_t> order(ids.begin(), ids.end());
    std::mt19937 rng(0x9e3779b9u);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Coords<D>> sup;
    sup.reserve(D + 1);
    return detail::welzl<D>(ps, order, order.size(), sup);
}

template <int D>
inline Ball<D> enclosing_radius(const PointSet<D>& ps, std::span<const std::uint32_t> ids, Norm norm) {
    RCQ_REQUIRE(norm == Norm::L2 || norm == Norm::Linf, "enclosing_radius: norm must be L2 or Linf");
    return norm == Norm::Linf ? enclosing_cube_linf<D>(ps, ids) : enclosing_ball_l2<D>(ps, ids);
}

// ---------------------------------------------------------------------------
// Canonical cubes: cells of the origin-anchored grid G_s, half-open
// [anchor, anchor + 2^s).

template <int D>
struct CanonicalCube {
    int level = 0;
    Coords<D> anchor{};

    coord_t size() const { return coord_t(1) << level; }
    bool contains(const Coords<D>& p) const {
        for (int d = 0; d < D; ++d) {
            coord_t off = p[d] - anchor[d];
            if (off < 0 || off >= size()) return false;
        }
        return true;
    }
    // Closed box fully inside the half-open cube.
    bool contains_box(const AxisBox<D>& b) const {
        for (int d = 0; d < D; ++d) {
            if (b.lo[d] < anchor[d] || b.hi[d] > anchor[d] + size() - 1) return false;
        }
        return true;
    }
    bool inside_box(const AxisBox<D>& b) const {
        for (int d = 0; d < D; ++d)
            if (anchor[d] < b.lo[d] || anchor[d] + size() - 1 > b.hi[d]) return false;
        return true;
    }
    AxisBox<D> as_box() const {
        AxisBox<D> b;
        for (int d = 0; d < D; ++d) {
            b.lo[d] = anchor[d];
            b.hi[d] = anchor[d] + size() - 1;
        }
        return b;
    }
    bool operator==(const CanonicalCube& o) const { return level == o.level && anchor == o.anchor; }
};

// Minimal-level canonical cube containing both points (their unit cell when equal).
template <int D>
inline CanonicalCube<D> smallest_canonical_cube(const Coords<D>& p, const Coords<D>& q) {
    int s = 0;
    for (int d = 0; d < D; ++d) s = std::max(s, bit_width64(std::uint64_t(p[d] ^ q[d])));
    CanonicalCube<D> c;
    c.level = s;
    for (int d = 0; d < D; ++d) c.anchor[d] = (p[d] >> s) << s;
    return c;
}

// ---------------------------------------------------------------------------
// Convex hull perimeter (d = 2), used by the perimeter-sum cost model.
// Degenerate hulls: a single point has perimeter 0, a segment 2*|pq|.

inline double hull_perimeter(const PointSet<2>& ps, std::span<const std::uint32_t> ids) {
    RCQ_REQUIRE(!ids.empty(), "hull_perimeter: empty subset");
    std::vector<Coords<2>> v;
    v.reserve(ids.size());
    for (auto id : ids) v.push_back(ps[id]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    const std::size_t n = v.size();
    if (n == 1) return 0.0;
    auto cross = [](const Coords<2>& o, const Coords<2>& a, const Coords<2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Coords<2>> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], v[i]) <= 0) --k;
        h[k++] = v[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], v[i]) <= 0) --k;
        h[k++] = v[i];
    }
    h.resize(k - 1);
    double per = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
        per += std::sqrt(double(dist2_sq<2>(h[i], h[(i + 1) % h.size()])));
    return per;
}

// Axis-aligned square with real-valued placement (anchored solver output).
struct SquareR {
    double x0 = 0, y0 = 0, edge = 0;
    double x1() const { return x0 + edge; }
    double y1() const { return y0 + edge; }
    bool contains(const Coords<2>& p, double tol = 0.0) const {
        return double(p[0]) >= x0 - tol && double(p[0]) <= x1() + tol && double(p[1]) >= y0 - tol &&
               double(p[1]) <= y1() + tol;
    }
    SquareR expand(double r) const { return SquareR{x0 - r, y0 - r, edge + 2 * r}; }
};

// ---------------------------------------------------------------------------
// Geometric covers attached to clusters.

enum class CoverKind { LinfCube, L2Ball, Interval, Polygon };

template <int D>
struct Cover {
    CoverKind kind = CoverKind::LinfCube;
    RealVec<D> center{};                  // cube/ball/interval center
    double radius = 0.0;                  // Linf radius, L2 radius, or half-length
    std::vector<RealVec<D>> vertices;     // polygon hull vertices (kind == Polygon)
    double offset = 0.0;                  // polygon Minkowski offset

    bool contains(const Coords<D>& p, double tol) const {
        switch (kind) {
            case CoverKind::LinfCube:
            case CoverKind::Interval:
                return linf_dist_real<D>(center, p) <= radius + tol;
            case CoverKind::L2Ball:
                return l2_dist_real<D>(center, p) <= radius + tol;
            case CoverKind::Polygon: {
                // distance from p to the hull (inside -> 0) must be <= offset
                return polygon_distance(p) <= offset + tol;
            }
        }
        return false;
    }

    double polygon_distance(const Coords<D>& p) const {
        static_assert(D >= 1);
        if constexpr (D == 2) {
            if (vertices.empty()) return std::numeric_limits<double>::infinity();
            if (vertices.size() == 1)
                return std::hypot(vertices[0][0] - double(p[0]), vertices[0][1] - double(p[1]));
            double px = double(p[0]), py = double(p[1]);
            bool inside = vertices.size() >= 3;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < vertices.size(); ++i) {
                auto a = vertices[i];
                auto b = vertices[(i + 1) % vertices.size()];
                double ax = a[0], ay = a[1], bx = b[0], by = b[1];
                double vx = bx - ax, vy = by - ay;
                double wx = px - ax, wy = py - ay;
                double t = (vx * vx + vy * vy) > 0 ? (wx * vx + wy * vy) / (vx * vx + vy * vy) : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                best = std::min(best, std::hypot(wx - t * vx, wy - t * vy));
                if (vx * wy - vy * wx < 0) inside = false;  // hull is CCW
            }
            return inside ? 0.0 : best;
        } else {
            return std::numeric_limits<double>::infinity();
        }
    }
};

}  // namespace rcq
