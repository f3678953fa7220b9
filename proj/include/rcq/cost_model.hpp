#pragma once

#include <numbers>

#include "rcq/geometry.hpp"

namespace rcq {

enum class CostModelId { LinfKCenter, L2KCenter, SumRadii, RssRadii, PerimeterSum };
enum class Aggregate { Max, Sum, Rss };

template <int D>
struct Clustering {
    std::vector<std::vector<std::uint32_t>> clusters;  // disjoint id sets
    std::vector<Cover<D>> covers;
    double cost = 0.0;

    std::size_t member_count() const {
        std::size_t s = 0;
        for (auto& c : clusters) s += c.size();
        return s;
    }
};

// A (c, f(k))-regular cost function: per-cluster cost, aggregation rule,
// diameter-sensitivity constant c, expansion factor f(k), and the rule by
// which a cover grows by r.
template <int D>
struct CostModel {
    CostModelId id = CostModelId::LinfKCenter;
    const char* name = "linf-kcenter";
    Norm norm = Norm::Linf;
    Aggregate agg = Aggregate::Max;
    double c = 0.0;

    double f(int k) const {
        switch (id) {
            case CostModelId::LinfKCenter:
            case CostModelId::L2KCenter:
                return 1.0;
            case CostModelId::SumRadii:
                return double(k);
            case CostModelId::RssRadii:
                return std::sqrt(double(k));
            case CostModelId::PerimeterSum:
                return 2.0 * std::numbers::pi * double(k);
        }
        return 1.0;
    }

    bool center_type() const { return id != CostModelId::PerimeterSum; }

    double cluster_cost(const PointSet<D>& ps, std::span<const std::uint32_t> ids) const {
        if (ids.size() <= 1 && center_type()) return 0.0;
        switch (id) {
            case CostModelId::LinfKCenter:
                return enclosing_cube_linf<D>(ps, ids).radius;
            case CostModelId::L2KCenter:
            case CostModelId::SumRadii:
            case CostModelId::RssRadii:
                return enclosing_ball_l2<D>(ps, ids).radius;
            case CostModelId::PerimeterSum:
                if constexpr (D == 2) return hull_perimeter(ps, ids);
                RCQ_REQUIRE(false, "perimeter-sum requires d = 2");
        }
        return 0.0;
    }

    Cover<D> make_cover(const PointSet<D>& ps, std::span<const std::uint32_t> ids) const {
        Cover<D> cov;
        switch (id) {
            case CostModelId::LinfKCenter: {
                auto b = enclosing_cube_linf<D>(ps, ids);
                cov.kind = D == 1 ? CoverKind::Interval : CoverKind::LinfCube;
                cov.center = b.center;
                cov.radius = b.radius;
                break;
            }
            case CostModelId::L2KCenter:
            case CostModelId::SumRadii:
            case CostModelId::RssRadii: {
                auto b = enclosing_ball_l2<D>(ps, ids);
                cov.kind = D == 1 ? CoverKind::Interval : CoverKind::L2Ball;
                cov.center = b.center;
                cov.radius = b.radius;
                break;
            }
            case CostModelId::PerimeterSum: {
                if constexpr (D == 2) {
                    cov.kind = CoverKind::Polygon;
                    cov.vertices = hull_vertices(ps, ids);
                    cov.offset = 0.0;
                } else {
                    RCQ_REQUIRE(false, "perimeter-sum requires d = 2");
                }
                break;
            }
        }
        return cov;
    }

    // The expansion rule: covers grow by r (additive radius, or Minkowski sum
    // with a disk of radius r for hulls).
    Cover<D> expand_cover(Cover<D> cov, double r) const {
        if (cov.kind == CoverKind::Polygon)
            cov.offset += r;
        else
            cov.radius += r;
        return cov;
    }

    double aggregate(std::span<const double> cluster_costs) const {
        double out = 0.0;
        for (double v : cluster_costs) {
            switch (agg) {
                case Aggregate::Max: out = std::max(out, v); break;
                case Aggregate::Sum: out += v; break;
                case Aggregate::Rss: out += v * v; break;
            }
        }
        return agg == Aggregate::Rss ? std::sqrt(out) : out;
    }

    double clustering_cost(const PointSet<D>& ps, const std::vector<std::vector<std::uint32_t>>& parts) const {
        std::vector<double> costs;
        costs.reserve(parts.size());
        for (auto& part : parts)
            if (!part.empty()) costs.push_back(cluster_cost(ps, part));
        return aggregate(costs);
    }

    Clustering<D> finish(const PointSet<D>& ps, std::vector<std::vector<std::uint32_t>> parts) const {
        Clustering<D> out;
        for (auto& part : parts) {
            if (part.empty()) continue;
            std::sort(part.begin(), part.end());
            out.covers.push_back(make_cover(ps, part));
            out.clusters.push_back(std::move(part));
        }
        out.cost = clustering_cost(ps, out.clusters);
        return out;
    }

    static std::vector<RealVec<D>> hull_vertices(const PointSet<D>& ps, std::span<const std::uint32_t> ids)
        requires(D == 2)
    {
        std::vector<Coords<2>> v;
        for (auto id : ids) v.push_back(ps[id]);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        const std::size_t n = v.size();
        auto cross = [](const Coords<2>& o, const Coords<2>& a, const Coords<2>& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        std::vector<Coords<2>> h;
        if (n == 1) {
            h = v;
        } else {
            h.resize(2 * n);
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
        }
        std::vector<RealVec<2>> out;
        out.reserve(h.size());
        for (auto& p : h) out.push_back({double(p[0]), double(p[1])});
        return out;
    }
};

template <int D>
inline CostModel<D> cost_model(CostModelId id) {
    CostModel<D> m;
    m.id = id;
    const double sqrt_d = std::sqrt(double(D));
    switch (id) {
        case CostModelId::LinfKCenter:
            m = {id, "linf-kcenter", Norm::Linf, Aggregate::Max, 1.0 / (2.0 * sqrt_d)};
            break;
        case CostModelId::L2KCenter:
            m = {id, "l2-kcenter", Norm::L2, Aggregate::Max, 0.5};
            break;
        case CostModelId::SumRadii:
            m = {id, "sum-radii", Norm::L2, Aggregate::Sum, 0.5};
            break;
        case CostModelId::RssRadii:
            m = {id, "rss-radii", Norm::L2, Aggregate::Rss, 1.0 / (2.0 * sqrt_d)};
            break;
        case CostModelId::PerimeterSum:
            m = {id, "perimeter-sum", Norm::L2, Aggregate::Sum, 2.0};
            break;
    }
    return m;
}

inline const char* cost_model_names() { return "linf-kcenter, l2-kcenter, sum-radii, rss-radii, perimeter-sum"; }

inline bool parse_cost_model(const std::string& s, CostModelId& out) {
    if (s == "linf-kcenter") out = CostModelId::LinfKCenter;
    else if (s == "l2-kcenter") out = CostModelId::L2KCenter;
    else if (s == "sum-radii") out = CostModelId::SumRadii;
    else if (s == "rss-radii") out = CostModelId::RssRadii;
    else if (s == "perimeter-sum") out = CostModelId::PerimeterSum;
    else return false;
    return true;
}

}  // namespace rcq
