#pragma once

#include <map>
#include <optional>

#include "rcq/range_index.hpp"

namespace rcq {

// Exact planar rectilinear 2- and 3-center queries: query-box shrinking,
// L-inf bisector region decomposition with 45-degree cone structures, and
// nested binary searches for k = 3. All internal arithmetic runs on doubled
// coordinates so that box midpoints and bisector junctions stay integral.

// ---------------------------------------------------------------------------
// Signed coordinate permutation with translation: p' = s * p[perm] + t.
struct PlaneMap {
    int ix = 0, iy = 1;
    coord_t sx = 1, sy = 1;
    coord_t tx = 0, ty = 0;

    static PlaneMap identity() { return {}; }
    static PlaneMap swap_axes() { return {1, 0, 1, 1, 0, 0}; }
    static PlaneMap mirror_x(coord_t about2) { return {0, 1, -1, 1, about2, 0}; }  // x -> about2 - x
    static PlaneMap mirror_y(coord_t about2) { return {0, 1, 1, -1, 0, about2}; }
    static PlaneMap point_reflect(coord_t ax2, coord_t ay2) { return {0, 1, -1, -1, ax2, ay2}; }

    Coords<2> apply(const Coords<2>& p) const {
        return {sx * p[std::size_t(ix)] + tx, sy * p[std::size_t(iy)] + ty};
    }
    Coords<2> dir(const Coords<2>& d) const {  // linear part only
        return {sx * d[std::size_t(ix)], sy * d[std::size_t(iy)]};
    }
    AxisBox<2> apply_box(const AxisBox<2>& b) const {
        Coords<2> a = apply(b.lo), c = apply(b.hi);
        AxisBox<2> out;
        for (int d = 0; d < 2; ++d) {
            out.lo[d] = std::min(a[d], c[d]);
            out.hi[d] = std::max(a[d], c[d]);
        }
        return out;
    }
    PlaneMap compose(const PlaneMap& o) const {  // this ∘ other
        PlaneMap r;
        r.ix = (ix == 0) ? o.ix : o.iy;
        r.sx = sx * ((ix == 0) ? o.sx : o.sy);
        r.tx = sx * ((ix == 0) ? o.tx : o.ty) + tx;
        r.iy = (iy == 0) ? o.ix : o.iy;
        r.sy = sy * ((iy == 0) ? o.sx : o.sy);
        r.ty = sy * ((iy == 0) ? o.tx : o.ty) + ty;
        return r;
    }
    PlaneMap inverse() const {
        PlaneMap r;
        if (ix == 0) {  // x' = sx * x + tx
            r.ix = 0;
            r.sx = sx;
            r.tx = -sx * tx;
        } else {  // x' = sx * y + tx  =>  y = sx * (x' - tx)
            r.iy = 0;
            r.sy = sx;
            r.ty = -sx * tx;
        }
        if (iy == 1) {
            r.iy = 1;
            r.sy = sy;
            r.ty = -sy * ty;
        } else {
            r.ix = 1;
            r.sx = sy;
            r.tx = -sy * ty;
        }
        return r;
    }
};

// Eight 45-degree sectors; sector k spans directions [45k, 45(k+1)] degrees.
// Membership is a two-sided dominance after the per-sector (u, v) transform,
// and the reported extreme minimizes val = u + v.
struct SectorOps {
    static std::int64_t u_of(int s, coord_t x, coord_t y) {
        switch (s) {
            case 0: return x - y;
            case 1: return x;
            case 2: return -x;
            case 3: return y;
            case 4: return -y;
            case 5: return -x;
            case 6: return x;
            default: return -y;
        }
    }
    static std::int64_t v_of(int s, coord_t x, coord_t y) {
        switch (s) {
            case 0: return y;
            case 1: return y - x;
            case 2: return x + y;
            case 3: return -(x + y);
            case 4: return y - x;
            case 5: return x - y;
            case 6: return -(x + y);
            default: return x + y;
        }
    }
    static const std::array<Coords<2>, 8>& boundary_dirs() {
        static const std::array<Coords<2>, 8> dirs{
            {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
        return dirs;
    }
    // image of a sector under the linear part of a plane map
    static int map_sector(int s, const PlaneMap& m) {
        const auto& dirs = boundary_dirs();
        Coords<2> a = m.dir(dirs[std::size_t(s)]);
        Coords<2> b = m.dir(dirs[std::size_t((s + 1) % 8)]);
        for (int t = 0; t < 8; ++t) {
            const auto& da = dirs[std::size_t(t)];
            const auto& db = dirs[std::size_t((t + 1) % 8)];
            if ((a == da && b == db) || (a == db && b == da)) return t;
        }
        RCQ_INVARIANT(false, "sector image must exist");
        return 0;
    }
};

// ---------------------------------------------------------------------------
// Per-orientation extreme-point structure. Queries are dominance-argmin in
// the (u, v) transform; a staircase sweep at build time counts the faces of
// the subdivision obtained by adding inverted cones right-to-left.
class ConeIndex {
public:
    ConeIndex() = default;

    ConeIndex(const PointSet<2>& ps, int sector) : ps_(&ps), sector_(sector) {
        const std::size_t n = ps.size();
        ids_.resize(n);
        std::iota(ids_.begin(), ids_.end(), 0u);
        u_.resize(n);
        v_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            u_[i] = SectorOps::u_of(sector, ps[i][0], ps[i][1]);
            v_[i] = SectorOps::v_of(sector, ps[i][0], ps[i][1]);
        }
        if (n > 0) root_ = build(0, std::uint32_t(n));
        count_faces();
    }

    int sector() const { return sector_; }
    std::size_t face_count() const { return faces_; }
    std::size_t staircase_vertices() const { return vertices_; }

    bool in_cone(const Coords<2>& apex, std::uint32_t id) const {
        return u_[id] >= SectorOps::u_of(sector_, apex[0], apex[1]) &&
               v_[id] >= SectorOps::v_of(sector_, apex[0], apex[1]);
    }

    // Extreme point inside the closed cone at the apex, optionally restricted
    // to an axis-aligned clip box. Ties resolve to the lowest id.
    std::optional<std::uint32_t> extreme(const Coords<2>& apex, const AxisBox<2>* clip = nullptr) const {
        if (root_ < 0) return std::nullopt;
        const std::int64_t ua = SectorOps::u_of(sector_, apex[0], apex[1]);
        const std::int64_t va = SectorOps::v_of(sector_, apex[0], apex[1]);
        std::optional<std::uint32_t> best;
        search(root_, ua, va, clip, best);
        return best;
    }

private:
    struct Node {
        std::int64_t ulo, uhi, vlo, vhi;
        AxisBox<2> bbox;
        std::uint32_t begin, end;
        std::int32_t left = -1, right = -1;
        std::uint32_t best = 0;  // subtree argmin of (val, id)
    };

    std::int64_t val(std::uint32_t id) const { return u_[id] + v_[id]; }
    bool better(std::uint32_t a, std::uint32_t b) const {
        return val(a) != val(b) ? val(a) < val(b) : a < b;
    }

    std::int32_t build(std::uint32_t lo, std::uint32_t hi) {
        Node n;
        n.begin = lo;
        n.end = hi;
        n.ulo = n.uhi = u_[ids_[lo]];
        n.vlo = n.vhi = v_[ids_[lo]];
        n.bbox.lo = n.bbox.hi = (*ps_)[ids_[lo]];
        n.best = ids_[lo];
        for (std::uint32_t i = lo; i < hi; ++i) {
            std::uint32_t id = ids_[i];
            n.ulo = std::min(n.ulo, u_[id]);
            n.uhi = std::max(n.uhi, u_[id]);
            n.vlo = std::min(n.vlo, v_[id]);
            n.vhi = std::max(n.vhi, v_[id]);
            for (int d = 0; d < 2; ++d) {
                n.bbox.lo[d] = std::min(n.bbox.lo[d], (*ps_)[id][d]);
                n.bbox.hi[d] = std::max(n.bbox.hi[d], (*ps_)[id][d]);
            }
            if (better(id, n.best)) n.best = id;
        }
        std::int32_t me = std::int32_t(nodes_.size());
        nodes_.push_back(n);
        if (hi - lo <= 8 || (n.ulo == n.uhi && n.vlo == n.vhi)) return me;
        const bool by_u = (n.uhi - n.ulo) >= (n.vhi - n.vlo);
        std::uint32_t mid = (lo + hi) / 2;
        std::nth_element(ids_.begin() + lo, ids_.begin() + mid, ids_.begin() + hi,
                         [&](std::uint32_t a, std::uint32_t b) {
                             std::int64_t ka = by_u ? u_[a] : v_[a];
                             std::int64_t kb = by_u ? u_[b] : v_[b];
                             return ka != kb ? ka < kb : a < b;
                         });
        std::int32_t l = build(lo, mid);
        std::int32_t r = build(mid, hi);
        nodes_[me].left = l;
        nodes_[me].right = r;
        return me;
    }

    void search(std::int32_t i, std::int64_t ua, std::int64_t va, const AxisBox<2>* clip,
                std::optional<std::uint32_t>& best) const {
        const Node& n = nodes_[i];
        if (n.uhi < ua || n.vhi < va) return;
        if (clip) {
            for (int d = 0; d < 2; ++d)
                if (n.bbox.hi[d] < clip->lo[d] || n.bbox.lo[d] > clip->hi[d]) return;
        }
        if (best && n.ulo + n.vlo > val(*best)) return;
        if (n.ulo >= ua && n.vlo >= va && (!clip || clip->contains_box(n.bbox))) {
            if (!best || better(n.best, *best)) best = n.best;
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t t = n.begin; t < n.end; ++t) {
                std::uint32_t id = ids_[t];
                if (u_[id] < ua || v_[id] < va) continue;
                if (clip && !clip->contains((*ps_)[id])) continue;
                if (!best || better(id, *best)) best = id;
            }
            return;
        }
        std::int32_t a = n.left, b = n.right;
        if (nodes_[b].ulo + nodes_[b].vlo < nodes_[a].ulo + nodes_[a].vlo) std::swap(a, b);
        search(a, ua, va, clip, best);
        search(b, ua, va, clip, best);
    }

    // Insert inverted cones (quadrants in (u, v)) in increasing val order,
    // counting nonempty cells and staircase vertex events of the overlay.
    void count_faces() {
        std::vector<std::uint32_t> order(ids_);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return better(a, b); });
        std::map<std::int64_t, std::int64_t> stair;  // u -> v over inserted corners (Pareto frontier)
        std::size_t cells = 0, events = 0;
        for (auto id : order) {
            auto it = stair.lower_bound(u_[id]);
            if (it != stair.end() && it->second >= v_[id]) continue;  // covered: empty cell
            ++cells;
            ++events;
            while (it != stair.begin()) {
                auto prev = std::prev(it);
                if (prev->second > v_[id]) break;
                ++events;
                it = stair.erase(prev);
            }
            stair[u_[id]] = v_[id];
        }
        faces_ = cells + 1;  // plus the outer face
        vertices_ = events;
    }

    const PointSet<2>* ps_ = nullptr;
    int sector_ = 0;
    std::vector<std::uint32_t> ids_;
    std::vector<std::int64_t> u_, v_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
    std::size_t faces_ = 1;
    std::size_t vertices_ = 0;
};

// ---------------------------------------------------------------------------

struct TwoCenterAnswer {
    bool empty = true;
    double size = 0.0;  // common square edge length
    std::array<SquareR, 2> squares{};
    std::int32_t witness_a = -1, witness_b = -1;  // farthest point per corner
};

struct ThreeCenterAnswer {
    bool empty = true;
    double size = 0.0;
    std::array<SquareR, 3> squares{};
};

class Exact2D {
public:
    explicit Exact2D(const PointSet<2>& ps) {
        ps2_.pts.reserve(ps.size());
        for (const auto& p : ps.pts) ps2_.pts.push_back({2 * p[0], 2 * p[1]});
        rindex_ = RangeIndex<2>(ps2_);
        for (int s = 0; s < 8; ++s) cones_[std::size_t(s)] = ConeIndex(ps2_, s);
    }

    const ConeIndex& cone(int sector) const { return cones_[std::size_t(sector)]; }
    const PointSet<2>& doubled_points() const { return ps2_; }

    // Extreme P-point inside the closed cone at the apex (original coords).
    std::optional<std::uint32_t> cone_extreme(const Coords<2>& apex, int sector) const {
        return cones_[std::size_t(sector)].extreme({2 * apex[0], 2 * apex[1]});
    }

    // Minimal box spanned by S_Q, in original coordinates.
    std::optional<AxisBox<2>> shrink_box(const AxisBox<2>& q) const {
        auto bb2 = rindex_.bounding_box(double_box(q));
        if (!bb2) return std::nullopt;
        AxisBox<2> out;
        for (int d = 0; d < 2; ++d) {
            out.lo[d] = bb2->lo[d] / 2;
            out.hi[d] = bb2->hi[d] / 2;
        }
        return out;
    }

    TwoCenterAnswer two_center_query(const AxisBox<2>& q) const {
        TwoCenterAnswer ans;
        auto bb = rindex_.bounding_box(double_box(q));
        if (!bb) return ans;
        ans.empty = false;
        auto best = two_center_core(*bb, std::nullopt);
        ans.size = double(best.edge) / 2.0;
        ans.witness_a = best.witness_a;
        ans.witness_b = best.witness_b;
        ans.squares[0] = to_square(best.anchor_a, best.edge);
        ans.squares[1] = to_square(best.anchor_b, best.edge);
        return ans;
    }

    ThreeCenterAnswer three_center_query(const AxisBox<2>& q) const {
        ThreeCenterAnswer ans;
        auto bb = rindex_.bounding_box(double_box(q));
        if (!bb) return ans;
        ans.empty = false;
        const AxisBox<2> box = *bb;
        if (rindex_.range_count(box) <= 3) {
            auto pts = rindex_.range_report(box);
            std::sort(pts.begin(), pts.end());
            for (std::size_t i = 0; i < 3; ++i) {
                auto id = pts[std::min(i, pts.size() - 1)];
                ans.squares[i] = SquareR{double(ps2_[id][0]) / 2, double(ps2_[id][1]) / 2, 0.0};
            }
            return ans;
        }

        coord_t best_edge = std::numeric_limits<coord_t>::max();
        for (int corner = 0; corner < 4; ++corner)
            for (int axis = 0; axis < 2; ++axis) {
                PlaneMap frame = corner_frame(box, corner, axis == 1);
                best_edge = std::min(best_edge, anchored_search(frame.apply_box(box), frame));
            }
        ans.size = double(best_edge) / 2.0;

        // materialize witness squares: find a corner whose anchored square of
        // the optimal edge leaves a remainder 2-coverable at that edge
        for (int corner = 0; corner < 4; ++corner) {
            PlaneMap frame = corner_frame(box, corner, false);
            AxisBox<2> cb = frame.apply_box(box);
            TwoCenterResult sub;
            coord_t g = anchored_remainder(cb, frame, best_edge, &sub);
            if (g > best_edge) continue;
            PlaneMap inv = frame.inverse();
            AnchorCorner sigma{inv.apply({cb.lo[0], cb.lo[1]}), inv.dir({1, 1})};
            ans.squares[0] = to_square(sigma, best_edge);
            if (sub.edge >= 0 && sub.has_points) {
                ans.squares[1] = to_square(sub.anchor_a, best_edge);
                ans.squares[2] = to_square(sub.anchor_b, best_edge);
            } else {
                ans.squares[1] = ans.squares[0];
                ans.squares[2] = ans.squares[0];
            }
            return ans;
        }
        RCQ_INVARIANT(false, "three-center witness must exist at the optimal size");
        return ans;
    }

    // Tests: classify a point of the (doubled) shrunk box into the bisector
    // side and tile, per the same closed-tile definitions the query uses.
    struct RegionTag {
        int side;  // 0 = near corner c (canonical topleft), 1 = near c'
        int tile;  // 1..4, first-match
    };
    RegionTag classify(const AxisBox<2>& shrunk_doubled, const Coords<2>& p_doubled, int config) const {
        PlaneMap frame = two_center_frame(shrunk_doubled, config);
        AxisBox<2> cb = frame.apply_box(shrunk_doubled);
        Coords<2> cp = frame.apply(p_doubled);
        const coord_t dc = corner_dist(cb, cp, true);
        const coord_t dc2 = corner_dist(cb, cp, false);
        int side = dc <= dc2 ? 0 : 1;
        Coords<2> q = cp;
        if (side == 1) q = PlaneMap::point_reflect(cb.lo[0] + cb.hi[0], cb.lo[1] + cb.hi[1]).apply(cp);
        return RegionTag{side, tile_of(cb, q)};
    }

    // Exposed for tests: exact farthest-from-corner over one bisector side.
    std::optional<std::pair<std::uint32_t, double>> farthest_in_region(const AxisBox<2>& shrunk,
                                                                       int config, int side) const {
        AxisBox<2> box = double_box(shrunk);
        PlaneMap frame = two_center_frame(box, config);
        AxisBox<2> cb = frame.apply_box(box);
        if (side == 1) frame = PlaneMap::point_reflect(cb.lo[0] + cb.hi[0], cb.lo[1] + cb.hi[1]).compose(frame);
        auto far = farthest_from_corner(frame, cb, std::nullopt);
        if (!far) return std::nullopt;
        return std::make_pair(far->id, double(far->dist) / 2.0);
    }

private:
    struct AnchorCorner {
        Coords<2> at{};   // corner position (doubled)
        Coords<2> grow{};  // growth direction into the box, components ±1
    };

    struct TwoCenterResult {
        coord_t edge = 0;
        bool has_points = false;
        std::int32_t witness_a = -1, witness_b = -1;
        AnchorCorner anchor_a{}, anchor_b{};
    };

    static AxisBox<2> double_box(const AxisBox<2>& q) {
        return AxisBox<2>{{2 * q.lo[0], 2 * q.lo[1]}, {2 * q.hi[0], 2 * q.hi[1]}};
    }

    static SquareR to_square(const AnchorCorner& a, coord_t edge) {
        const double e = double(edge) / 2.0;
        const double x = double(a.at[0]) / 2.0, y = double(a.at[1]) / 2.0;
        return SquareR{a.grow[0] > 0 ? x : x - e, a.grow[1] > 0 ? y : y - e, e};
    }

    static coord_t corner_dist(const AxisBox<2>& b, const Coords<2>& p, bool topleft) {
        if (topleft) return std::max(p[0] - b.lo[0], b.hi[1] - p[1]);
        return std::max(b.hi[0] - p[0], p[1] - b.lo[1]);
    }

    // Frame sending the box to a w >= h layout; config 1 mirrors x (the
    // topright/bottomleft diagonal case).
    static PlaneMap two_center_frame(const AxisBox<2>& b, int config) {
        PlaneMap m = PlaneMap::identity();
        if (b.hi[0] - b.lo[0] < b.hi[1] - b.lo[1]) m = PlaneMap::swap_axes();
        if (config == 1) {
            AxisBox<2> nb = m.apply_box(b);
            m = PlaneMap::mirror_x(nb.lo[0] + nb.hi[0]).compose(m);
        }
        return m;
    }

    // Frame sending the chosen corner of the box to the canonical bottomleft,
    // optionally with the binary-search axis swapped onto x.
    static PlaneMap corner_frame(const AxisBox<2>& b, int corner, bool swap_axis) {
        PlaneMap m = PlaneMap::identity();
        if (corner & 1) m = PlaneMap::mirror_x(b.lo[0] + b.hi[0]).compose(m);
        if (corner & 2) m = PlaneMap::mirror_y(b.lo[1] + b.hi[1]).compose(m);
        if (swap_axis) m = PlaneMap::swap_axes().compose(m);
        return m;
    }

    // --- canonical tiles (corner = topleft, w >= h) --------------------------

    static int tile_of(const AxisBox<2>& cb, const Coords<2>& p) {
        const coord_t X0 = cb.lo[0], X1 = cb.hi[0], Y0 = cb.lo[1], Y1 = cb.hi[1];
        const coord_t w = X1 - X0, h = Y1 - Y0;
        const coord_t xm = X0 + w / 2, ya = Y0 + h - w / 2;
        if (p[0] <= xm && p[1] >= std::max(Y0, ya)) return 1;
        if (p[0] <= X0 + (w - h) && p[1] <= ya) return 2;
        if (p[0] >= X0 + (w - h) && p[0] - p[1] <= X0 + (w - h) - Y0 && p[1] <= ya) return 3;
        return 4;
    }

    struct ConePiece {
        Coords<2> apex;  // S1-space: cone = {x >= apex.x, y >= x - (apex.x - apex.y)}
        coord_t ymax;    // discard clip (min-y objective opposes it)
    };

    // cone ∩ {y >= c}: a full-width rectangle strip plus a shifted cone
    static void restrict_above(const ConePiece& p, coord_t c, std::vector<ConePiece>& cones,
                               std::vector<AxisBox<2>>& rects) {
        if (c <= p.apex[1]) {
            cones.push_back(p);
            return;
        }
        if (c > p.ymax) return;  // empty
        const coord_t d = p.apex[0] - p.apex[1];
        rects.push_back(AxisBox<2>{{p.apex[0], c}, {c + d, p.ymax}});
        cones.push_back(ConePiece{{c + d, c}, p.ymax});
    }

    static ConePiece restrict_x_ge(const ConePiece& p, coord_t x0) {
        if (x0 <= p.apex[0]) return p;
        const coord_t d = p.apex[0] - p.apex[1];
        return ConePiece{{x0, x0 - d}, p.ymax};
    }

    // cone ∩ {x <= x1}: a rectangle above the diagonal plus a clipped cone
    static void restrict_x_le(const ConePiece& p, coord_t x1, std::vector<ConePiece>& cones,
                              std::vector<AxisBox<2>>& rects) {
        if (x1 < p.apex[0]) return;  // empty
        const coord_t d = p.apex[0] - p.apex[1];
        const coord_t yc = x1 - d;  // yc >= apex.y since x1 >= apex.x
        if (yc <= p.ymax) rects.push_back(AxisBox<2>{{p.apex[0], yc}, {x1, p.ymax}});
        ConePiece low = p;
        low.ymax = std::min(p.ymax, yc);
        if (low.ymax >= low.apex[1]) cones.push_back(low);
    }

    static void subtract_box(const ConePiece& p, const AxisBox<2>& f, std::vector<ConePiece>& cones,
                             std::vector<AxisBox<2>>& rects) {
        restrict_above(p, f.hi[1] + 1, cones, rects);  // strictly above F
        ConePiece below = p;                           // strictly below F
        below.ymax = std::min(p.ymax, f.lo[1] - 1);
        if (below.ymax >= below.apex[1]) cones.push_back(below);
        const coord_t band_lo = f.lo[1];
        const coord_t band_hi = std::min(f.hi[1], p.ymax);
        if (band_lo > band_hi) return;
        {  // within F's y-band, strictly right of F
            ConePiece shifted = restrict_x_ge(p, f.hi[0] + 1);
            shifted.ymax = std::min(shifted.ymax, band_hi);
            if (shifted.ymax >= shifted.apex[1]) {
                std::vector<ConePiece> tc;
                std::vector<AxisBox<2>> tr;
                restrict_above(shifted, band_lo, tc, tr);
                for (auto& c : tc) cones.push_back(c);
                for (auto& r : tr)
                    if (r.valid()) rects.push_back(r);
            }
        }
        {  // within F's y-band, strictly left of F
            std::vector<ConePiece> tc;
            std::vector<AxisBox<2>> tr;
            restrict_x_le(p, f.lo[0] - 1, tc, tr);
            for (auto& c : tc) {
                c.ymax = std::min(c.ymax, band_hi);
                if (c.ymax < c.apex[1]) continue;
                std::vector<ConePiece> tc2;
                std::vector<AxisBox<2>> tr2;
                restrict_above(c, band_lo, tc2, tr2);
                for (auto& cc : tc2) cones.push_back(cc);
                for (auto& rr : tr2)
                    if (rr.valid()) rects.push_back(rr);
            }
            for (auto& r : tr) {
                r.lo[1] = std::max(r.lo[1], band_lo);
                r.hi[1] = std::min(r.hi[1], band_hi);
                if (r.valid()) rects.push_back(r);
            }
        }
    }

    struct Candidate {
        std::uint32_t id;
        coord_t dist;
    };

    // farthest S_Q point from the canonical topleft corner within A \ F
    std::optional<Candidate> farthest_from_corner(const PlaneMap& frame, const AxisBox<2>& cb,
                                                  const std::optional<AxisBox<2>>& f) const {
        const coord_t X0 = cb.lo[0], X1 = cb.hi[0], Y0 = cb.lo[1], Y1 = cb.hi[1];
        const coord_t w = X1 - X0, h = Y1 - Y0;
        const coord_t xm = X0 + w / 2;
        const coord_t ya = Y0 + h - w / 2;  // below Y0 for thin boxes
        const PlaneMap inv = frame.inverse();
        const AxisBox<2> clip_orig = inv.apply_box(cb);

        std::optional<Candidate> best;
        auto consider = [&](std::uint32_t id) {
            Coords<2> cp = frame.apply(ps2_[id]);
            coord_t dist = corner_dist(cb, cp, true);
            if (!best || dist > best->dist || (dist == best->dist && id < best->id))
                best = Candidate{id, dist};
        };
        auto query_canon_rect = [&](AxisBox<2> rect) {
            rect = rect.intersect(cb);
            if (!rect.valid()) return;
            AxisBox<2> orig = inv.apply_box(rect);
            if (auto id = canon_extreme(orig, frame, 0, Extreme::Max)) consider(*id);
            if (auto id = canon_extreme(orig, frame, 1, Extreme::Min)) consider(*id);
        };
        auto query_rect_minus_f = [&](const AxisBox<2>& rect0) {
            AxisBox<2> rect = rect0.intersect(cb);
            if (!rect.valid()) return;
            if (!f || !f->valid() || !rect.intersect(*f).valid()) {
                query_canon_rect(rect);
                return;
            }
            const AxisBox<2>& ff = *f;
            if (ff.lo[0] > rect.lo[0])
                query_canon_rect(AxisBox<2>{rect.lo, {ff.lo[0] - 1, rect.hi[1]}});
            if (ff.hi[0] < rect.hi[0])
                query_canon_rect(AxisBox<2>{{ff.hi[0] + 1, rect.lo[1]}, rect.hi});
            AxisBox<2> mid{{std::max(rect.lo[0], ff.lo[0]), rect.lo[1]},
                           {std::min(rect.hi[0], ff.hi[0]), rect.hi[1]}};
            if (ff.lo[1] > rect.lo[1])
                query_canon_rect(AxisBox<2>{mid.lo, {mid.hi[0], ff.lo[1] - 1}});
            if (ff.hi[1] < rect.hi[1])
                query_canon_rect(AxisBox<2>{{mid.lo[0], ff.hi[1] + 1}, mid.hi});
        };

        query_rect_minus_f(AxisBox<2>{{X0, std::max(Y0, ya)}, {xm, Y1}});      // A1
        if (ya >= Y0) query_rect_minus_f(AxisBox<2>{{X0, Y0}, {X0 + (w - h), ya}});  // A2

        if (ya >= Y0) {  // A3: S1 cone at z, clipped at the junction height
            ConePiece a3{{X0 + (w - h), Y0}, ya};
            run_cone_tile(a3, f, frame, PlaneMap::identity(), clip_orig, consider);
        }
        {  // A4: S4 cone at z' -> S1 via (x, y) -> (-y, -x)
            PlaneMap lambda{1, 0, -1, -1, 0, 0};
            ConePiece a4{lambda.apply({X0 + h, Y1}), std::numeric_limits<coord_t>::max() / 4};
            std::optional<AxisBox<2>> f_l;
            if (f && f->valid()) f_l = lambda.apply_box(*f);
            run_cone_tile(a4, f_l, frame, lambda, clip_orig, consider);
        }
        return best;
    }

    template <typename Consider>
    void run_cone_tile(const ConePiece& tile, const std::optional<AxisBox<2>>& f_in_s1,
                       const PlaneMap& frame, const PlaneMap& lambda, const AxisBox<2>& clip_orig,
                       Consider&& consider) const {
        std::vector<ConePiece> cones;
        std::vector<AxisBox<2>> rects;
        if (f_in_s1 && f_in_s1->valid())
            subtract_box(tile, *f_in_s1, cones, rects);
        else
            cones.push_back(tile);

        const PlaneMap inv_frame = frame.inverse();
        const PlaneMap inv_lambda = lambda.inverse();
        const PlaneMap s1_to_orig = inv_frame.compose(inv_lambda);
        const PlaneMap orig_to_s1 = lambda.compose(frame);
        const int orig_sector = SectorOps::map_sector(1, s1_to_orig);

        for (const auto& piece : cones) {
            if (piece.ymax < piece.apex[1]) continue;
            Coords<2> apex_orig = s1_to_orig.apply(piece.apex);
            auto hit = cones_[std::size_t(orig_sector)].extreme(apex_orig, &clip_orig);
            if (!hit) continue;
            if (orig_to_s1.apply(ps2_[*hit])[1] > piece.ymax) continue;  // discard clip
            consider(*hit);
        }
        for (const auto& rect : rects) {
            if (!rect.valid()) continue;
            AxisBox<2> orig = inv_frame.apply_box(inv_lambda.apply_box(rect)).intersect(clip_orig);
            if (!orig.valid()) continue;
            if (auto id = canon_extreme(orig, frame, 0, Extreme::Max)) consider(*id);
            if (auto id = canon_extreme(orig, frame, 1, Extreme::Min)) consider(*id);
        }
    }

    // extreme point of an original-coords box along a canonical-frame axis
    std::optional<std::uint32_t> canon_extreme(const AxisBox<2>& orig_box, const PlaneMap& frame,
                                               int canon_dim, Extreme dir) const {
        int odim = canon_dim == 0 ? frame.ix : frame.iy;
        coord_t sign = canon_dim == 0 ? frame.sx : frame.sy;
        Extreme odir = sign < 0 ? (dir == Extreme::Min ? Extreme::Max : Extreme::Min) : dir;
        return rindex_.extreme_point(orig_box, odim, odir);
    }

    // two-center over a doubled, shrunk box, optionally excluding a box
    TwoCenterResult two_center_core(const AxisBox<2>& box, const std::optional<AxisBox<2>>& excl) const {
        TwoCenterResult best;
        best.edge = std::numeric_limits<coord_t>::max();
        for (int config = 0; config < 2; ++config) {
            PlaneMap frame = two_center_frame(box, config);
            AxisBox<2> cb = frame.apply_box(box);
            std::optional<AxisBox<2>> f;
            if (excl && excl->valid()) f = frame.apply_box(*excl);
            auto far_a = farthest_from_corner(frame, cb, f);
            PlaneMap refl = PlaneMap::point_reflect(cb.lo[0] + cb.hi[0], cb.lo[1] + cb.hi[1]);
            PlaneMap frame2 = refl.compose(frame);
            std::optional<AxisBox<2>> f2;
            if (f) f2 = refl.apply_box(*f);
            auto far_b = farthest_from_corner(frame2, cb, f2);
            coord_t edge = std::max(far_a ? far_a->dist : 0, far_b ? far_b->dist : 0);
            if (edge < best.edge) {
                best.edge = edge;
                best.has_points = far_a.has_value() || far_b.has_value();
                best.witness_a = far_a ? std::int32_t(far_a->id) : -1;
                best.witness_b = far_b ? std::int32_t(far_b->id) : -1;
                PlaneMap inv = frame.inverse();
                best.anchor_a = AnchorCorner{inv.apply({cb.lo[0], cb.hi[1]}), inv.dir({1, -1})};
                best.anchor_b = AnchorCorner{inv.apply({cb.hi[0], cb.lo[1]}), inv.dir({-1, 1})};
            }
        }
        return best;
    }

    // remainder two-center value for a bottomleft-anchored square, in the
    // canonical corner frame
    coord_t anchored_remainder(const AxisBox<2>& cb, const PlaneMap& frame, coord_t edge,
                               TwoCenterResult* out) const {
        const PlaneMap inv = frame.inverse();
        AxisBox<2> ra{{cb.lo[0] + edge + 1, cb.lo[1]}, {cb.hi[0], cb.hi[1]}};
        AxisBox<2> rb{{cb.lo[0], cb.lo[1] + edge + 1}, {std::min(cb.hi[0], cb.lo[0] + edge), cb.hi[1]}};
        std::optional<AxisBox<2>> bb;
        for (const AxisBox<2>& r : {ra, rb}) {
            if (!r.valid()) continue;
            auto sub = rindex_.bounding_box(inv.apply_box(r));
            if (!sub) continue;
            if (!bb)
                bb = *sub;
            else
                for (int d = 0; d < 2; ++d) {
                    bb->lo[d] = std::min(bb->lo[d], sub->lo[d]);
                    bb->hi[d] = std::max(bb->hi[d], sub->hi[d]);
                }
        }
        if (!bb) {
            if (out) *out = TwoCenterResult{};
            return 0;
        }
        AxisBox<2> sigma_canon{{cb.lo[0], cb.lo[1]}, {cb.lo[0] + edge, cb.lo[1] + edge}};
        AxisBox<2> f = frame.apply_box(*bb).intersect(sigma_canon);
        std::optional<AxisBox<2>> excl;
        if (f.valid()) excl = inv.apply_box(f);
        auto res = two_center_core(*bb, excl);
        if (out) *out = res;
        return res.edge;
    }

    // V-shaped search over anchored-square edges aligned with point x-coords
    coord_t anchored_search(const AxisBox<2>& cb, const PlaneMap& frame) const {
        const PlaneMap inv = frame.inverse();
        const coord_t X0 = cb.lo[0];
        auto snap_down = [&](coord_t v) -> coord_t {
            AxisBox<2> r{{X0, cb.lo[1]}, {std::min(X0 + v, cb.hi[0]), cb.hi[1]}};
            if (!r.valid()) return 0;
            auto id = canon_extreme(inv.apply_box(r), frame, 0, Extreme::Max);
            if (!id) return 0;
            return frame.apply(ps2_[*id])[0] - X0;
        };
        coord_t lo = 0, hi = cb.hi[0] - cb.lo[0];
        coord_t best = std::numeric_limits<coord_t>::max();
        while (lo <= hi) {
            coord_t mid = lo + (hi - lo) / 2;
            coord_t s = snap_down(mid);
            coord_t g = anchored_remainder(cb, frame, s, nullptr);
            best = std::min(best, std::max(s, g));
            if (g <= s) {
                if (s == 0) break;
                hi = s - 1;
            } else {
                lo = mid + 1;
            }
        }
        return best;
    }

    PointSet<2> ps2_;
    RangeIndex<2> rindex_;
    std::array<ConeIndex, 8> cones_;
};

}  // namespace rcq
