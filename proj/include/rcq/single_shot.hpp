#pragma once

#include "rcq/cost_model.hpp"

namespace rcq {

struct SingleShotOptions {
    std::size_t dp_limit = 16;      // subset-DP budget (any cost model)
    std::size_t enum_limit = 400;   // exact k-center budget for k <= 3
    std::uint64_t search_budget = 8'000'000;  // branch-and-bound node budget
    bool allow_greedy = false;      // opt-in 2-approx fallback, voids (1+eps)
};

template <int D>
struct SingleShotResult {
    Clustering<D> clustering;
    bool exact = true;
    const char* method = "";
};

namespace detail {

// ---------------------------------------------------------------------------
// Exact clustering over subsets: Opt_j(S) = min over T ⊆ S containing the
// lowest point of S of agg(cost(T), Opt_{j-1}(S \ T)).
template <int D>
inline std::vector<std::vector<std::uint32_t>> subset_dp_parts(const PointSet<D>& ps,
                                                               std::span<const std::uint32_t> ids,
                                                               int k, const CostModel<D>& model) {
    const int m = int(ids.size());
    RCQ_REQUIRE(m <= 20, "subset_dp: too many points");
    const std::uint32_t full = (m >= 32) ? 0xffffffffu : ((1u << m) - 1);
    std::vector<double> cmask(full + 1, 0.0);
    {
        std::vector<std::uint32_t> members;
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            if ((mask & (mask - 1)) == 0) {
                cmask[mask] = model.cluster_cost(ps, std::span<const std::uint32_t>(&ids[bit_width64(mask) - 1], 1));
                continue;
            }
            members.clear();
            for (int i = 0; i < m; ++i)
                if (mask & (1u << i)) members.push_back(ids[i]);
            cmask[mask] = model.cluster_cost(ps, members);
        }
    }
    auto combine = [&](double a, double b) {
        switch (model.agg) {
            case Aggregate::Max: return std::max(a, b);
            case Aggregate::Sum: return a + b;
            case Aggregate::Rss: return std::sqrt(a * a + b * b);
        }
        return 0.0;
    };
    const int kk = std::min(k, m);
    std::vector<std::vector<double>> opt(kk + 1, std::vector<double>(full + 1, 0.0));
    std::vector<std::vector<std::uint32_t>> choice(kk + 1, std::vector<std::uint32_t>(full + 1, 0));
    opt[1] = cmask;
    for (int j = 2; j <= kk; ++j) {
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            const std::uint32_t low = mask & (~mask + 1);
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t bestT = mask;
            // the cluster holding the lowest point, against the rest
            for (std::uint32_t t = mask; t; t = (t - 1) & mask) {
                if (!(t & low)) continue;
                double v = combine(cmask[t], opt[j - 1][mask ^ t]);
                if (v < best) {
                    best = v;
                    bestT = t;
                }
            }
            opt[j][mask] = best;
            choice[j][mask] = bestT;
        }
    }
    std::vector<std::vector<std::uint32_t>> parts;
    std::uint32_t mask = full;
    int j = kk;
    while (mask) {
        std::uint32_t t = (j <= 1) ? mask : choice[j][mask];
        std::vector<std::uint32_t> part;
        for (int i = 0; i < m; ++i)
            if (t & (1u << i)) part.push_back(ids[i]);
        parts.push_back(std::move(part));
        mask ^= t;
        --j;
    }
    return parts;
}

// ---------------------------------------------------------------------------
// Exact rectilinear k-center for k <= 3 in the plane, via corner-anchored
// squares. Returns the minimal common edge length and a witness partition.

inline double corner_dist_linf(const Coords<2>& p, coord_t cx, coord_t cy) {
    return double(std::max(iabs(p[0] - cx), iabs(p[1] - cy)));
}

struct AnchoredTwo {
    double edge = 0.0;
    int config = 0;  // 0: topleft/bottomright, 1: topright/bottomleft
};

template <typename GetPt>
inline AnchoredTwo linf_two_value(GetPt&& pt, std::size_t n) {
    coord_t x0 = pt(0)[0], x1 = x0, y0 = pt(0)[1], y1 = y0;
    for (std::size_t i = 1; i < n; ++i) {
        x0 = std::min(x0, pt(i)[0]);
        x1 = std::max(x1, pt(i)[0]);
        y0 = std::min(y0, pt(i)[1]);
        y1 = std::max(y1, pt(i)[1]);
    }
    double e0 = 0, e1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = pt(i);
        e0 = std::max(e0, std::min(corner_dist_linf(p, x0, y1), corner_dist_linf(p, x1, y0)));
        e1 = std::max(e1, std::min(corner_dist_linf(p, x1, y1), corner_dist_linf(p, x0, y0)));
    }
    return e0 <= e1 ? AnchoredTwo{e0, 0} : AnchoredTwo{e1, 1};
}

template <int D>
inline std::vector<std::vector<std::uint32_t>> linf_two_parts(const PointSet<D>& ps,
                                                              std::span<const std::uint32_t> ids)
    requires(D == 2)
{
    auto pt = [&](std::size_t i) -> const Coords<2>& { return ps[ids[i]]; };
    AnchoredTwo best = linf_two_value(pt, ids.size());
    coord_t x0 = pt(0)[0], x1 = x0, y0 = pt(0)[1], y1 = y0;
    for (std::size_t i = 1; i < ids.size(); ++i) {
        x0 = std::min(x0, pt(i)[0]);
        x1 = std::max(x1, pt(i)[0]);
        y0 = std::min(y0, pt(i)[1]);
        y1 = std::max(y1, pt(i)[1]);
    }
    coord_t ax = best.config == 0 ? x0 : x1, ay = y1;
    coord_t bx = best.config == 0 ? x1 : x0, by = y0;
    std::vector<std::vector<std::uint32_t>> parts(2);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        double da = corner_dist_linf(pt(i), ax, ay);
        double db = corner_dist_linf(pt(i), bx, by);
        parts[da <= db ? 0 : 1].push_back(ids[i]);
    }
    if (parts[0].empty() || parts[1].empty()) parts.erase(std::remove_if(parts.begin(), parts.end(), [](auto& p) { return p.empty(); }), parts.end());
    return parts;
}

template <int D>
inline std::vector<std::vector<std::uint32_t>> linf_three_parts(const PointSet<D>& ps,
                                                                std::span<const std::uint32_t> ids)
    requires(D == 2)
{
    // candidate edges: pairwise coordinate differences
    std::vector<coord_t> cand{0};
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            cand.push_back(iabs(ps[ids[i]][0] - ps[ids[j]][0]));
            cand.push_back(iabs(ps[ids[i]][1] - ps[ids[j]][1]));
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    coord_t x0 = ps[ids[0]][0], x1 = x0, y0 = ps[ids[0]][1], y1 = y0;
    for (auto id : ids) {
        x0 = std::min(x0, ps[id][0]);
        x1 = std::max(x1, ps[id][0]);
        y0 = std::min(y0, ps[id][1]);
        y1 = std::max(y1, ps[id][1]);
    }
    const std::array<std::pair<coord_t, coord_t>, 4> corners{{{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}}};

    std::vector<std::uint32_t> rem;
    auto feasible = [&](coord_t edge, int* which_corner) {
        for (int c = 0; c < 4; ++c) {
            rem.clear();
            for (auto id : ids)
                if (corner_dist_linf(ps[id], corners[c].first, corners[c].second) > double(edge))
                    rem.push_back(id);
            bool ok;
            if (rem.size() <= 1) {
                ok = true;
            } else {
                auto pt = [&](std::size_t i) -> const Coords<2>& { return ps[rem[i]]; };
                ok = linf_two_value(pt, rem.size()).edge <= double(edge);
            }
            if (ok) {
                if (which_corner) *which_corner = c;
                return true;
            }
        }
        return false;
    };

    std::size_t lo = 0, hi = cand.size() - 1;  // cand.back() always feasible (one square spans all)
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(cand[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    int corner = 0;
    feasible(cand[lo], &corner);
    const coord_t edge = cand[lo];

    std::vector<std::vector<std::uint32_t>> parts(1);
    rem.clear();
    for (auto id : ids) {
        if (corner_dist_linf(ps[id], corners[corner].first, corners[corner].second) <= double(edge))
            parts[0].push_back(id);
        else
            rem.push_back(id);
    }
    if (!rem.empty()) {
        if (rem.size() == 1) {
            parts.push_back(rem);
        } else {
            auto sub = linf_two_parts<D>(ps, rem);
            for (auto& s : sub) parts.push_back(std::move(s));
        }
    }
    return parts;
}

// ---------------------------------------------------------------------------
// Exact Euclidean k-center for k <= 3 via branch-and-bound over partitions
// with incremental minimum-enclosing-ball pruning.
template <int D>
class L2BranchBound {
public:
    L2BranchBound(const PointSet<D>& ps, std::span<const std::uint32_t> ids, int k, std::uint64_t budget)
        : ps_(ps), k_(k), budget_(budget) {
        order_.assign(ids.begin(), ids.end());
        gonzalez_order();
        // greedy upper bound: first k of the order as centers
        best_ = greedy_value();
        best_parts_ = greedy_parts_;
    }

    std::vector<std::vector<std::uint32_t>> solve() {
        members_.assign(k_, {});
        balls_.assign(k_, Ball<D>{});
        dfs(0, 0, 0.0);
        std::vector<std::vector<std::uint32_t>> out;
        for (auto& p : best_parts_)
            if (!p.empty()) out.push_back(p);
        return out;
    }

private:
    void gonzalez_order() {
        const std::size_t n = order_.size();
        std::vector<std::int64_t> d(n, std::numeric_limits<std::int64_t>::max());
        for (std::size_t i = 0; i + 1 < n; ++i) {
            // order_[i] fixed; update distances and pick farthest
            std::size_t far = i + 1;
            for (std::size_t j = i + 1; j < n; ++j) {
                d[j] = std::min(d[j], dist2_sq<D>(ps_[order_[i]], ps_[order_[j]]));
                if (d[j] > d[far]) far = j;
            }
            std::swap(order_[i + 1], order_[far]);
            std::swap(d[i + 1], d[far]);
        }
    }

    double greedy_value() {
        const std::size_t n = order_.size();
        greedy_parts_.assign(k_, {});
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = i < std::size_t(k_) ? i : 0;
            if (i >= std::size_t(k_)) {
                std::int64_t bd = std::numeric_limits<std::int64_t>::max();
                for (std::size_t c = 0; c < std::size_t(k_) && c < n; ++c) {
                    auto v = dist2_sq<D>(ps_[order_[c]], ps_[order_[i]]);
                    if (v < bd) {
                        bd = v;
                        j = c;
                    }
                }
            }
            greedy_parts_[std::min(j, greedy_parts_.size() - 1)].push_back(order_[i]);
        }
        double worst = 0;
        for (auto& part : greedy_parts_)
            if (!part.empty()) worst = std::max(worst, enclosing_ball_l2<D>(ps_, part).radius);
        return worst;
    }

    void dfs(std::size_t i, int open, double cur) {
        if (++nodes_ > budget_) throw BudgetError("single_shot: branch-and-bound budget exceeded");
        if (i == order_.size()) {
            if (cur < best_) {
                best_ = cur;
                best_parts_ = members_;
            }
            return;
        }
        const auto& p = ps_[order_[i]];
        for (int j = 0; j < std::min(open + 1, k_); ++j) {
            double saved_r = balls_[j].radius;
            auto saved_c = balls_[j].center;
            double r;
            if (members_[j].empty()) {
                balls_[j] = Ball<D>{};
                for (int d = 0; d < D; ++d) balls_[j].center[d] = double(p[d]);
                r = 0.0;
            } else if (l2_dist_real<D>(balls_[j].center, p) <= balls_[j].radius + 1e-12 * std::max(1.0, balls_[j].radius)) {
                r = balls_[j].radius;
            } else {
                members_[j].push_back(order_[i]);
                balls_[j] = enclosing_ball_l2<D>(ps_, members_[j]);
                members_[j].pop_back();
                r = balls_[j].radius;
            }
            double nxt = std::max(cur, r);
            if (nxt < best_) {
                members_[j].push_back(order_[i]);
                dfs(i + 1, std::max(open, j + 1), nxt);
                members_[j].pop_back();
            }
            balls_[j].radius = saved_r;
            balls_[j].center = saved_c;
        }
    }

    const PointSet<D>& ps_;
    int k_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<std::uint32_t> order_;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::uint32_t>> best_parts_, greedy_parts_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::vector<Ball<D>> balls_;
};

// 1D exact k-center (max aggregate): binary search over pairwise gaps with a
// greedy interval cover.
template <int D>
inline std::vector<std::vector<std::uint32_t>> one_d_parts(const PointSet<D>& ps,
                                                           std::span<const std::uint32_t> ids, int k)
    requires(D == 1)
{
    std::vector<std::uint32_t> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end(),
              [&](std::uint32_t a, std::uint32_t b) { return ps[a][0] != ps[b][0] ? ps[a][0] < ps[b][0] : a < b; });
    std::vector<coord_t> cand{0};
    for (std::size_t i = 0; i < sorted.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.size(); ++j)
            cand.push_back(ps[sorted[j]][0] - ps[sorted[i]][0]);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    auto intervals_needed = [&](coord_t len) {
        int used = 0;
        std::size_t i = 0;
        while (i < sorted.size()) {
            ++used;
            coord_t end = ps[sorted[i]][0] + len;
            while (i < sorted.size() && ps[sorted[i]][0] <= end) ++i;
        }
        return used;
    };
    std::size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (intervals_needed(cand[mid]) <= k)
            hi = mid;
        else
            lo = mid + 1;
    }
    const coord_t len = cand[lo];
    std::vector<std::vector<std::uint32_t>> parts;
    std::size_t i = 0;
    while (i < sorted.size()) {
        coord_t end = ps[sorted[i]][0] + len;
        parts.emplace_back();
        while (i < sorted.size() && ps[sorted[i]][0] <= end) parts.back().push_back(sorted[i++]);
    }
    return parts;
}

// Gonzalez farthest-first traversal: 2-approximation for center-type costs.
template <int D>
inline std::vector<std::vector<std::uint32_t>> gonzalez_parts(const PointSet<D>& ps,
                                                              std::span<const std::uint32_t> ids, int k,
                                                              Norm norm) {
    std::vector<std::uint32_t> centers{ids[0]};
    std::vector<double> d(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) d[i] = lp_distance<D>(ps[ids[i]], ps[centers[0]], norm);
    while (int(centers.size()) < k) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < ids.size(); ++i)
            if (d[i] > d[far]) far = i;
        if (d[far] == 0.0) break;
        centers.push_back(ids[far]);
        for (std::size_t i = 0; i < ids.size(); ++i)
            d[i] = std::min(d[i], lp_distance<D>(ps[ids[i]], ps[centers.back()], norm));
    }
    std::vector<std::vector<std::uint32_t>> parts(centers.size());
    for (auto id : ids) {
        std::size_t best = 0;
        double bd = lp_distance<D>(ps[id], ps[centers[0]], norm);
        for (std::size_t c = 1; c < centers.size(); ++c) {
            double v = lp_distance<D>(ps[id], ps[centers[c]], norm);
            if (v < bd) {
                bd = v;
                best = c;
            }
        }
        parts[best].push_back(id);
    }
    return parts;
}

}  // namespace detail

// Optimal (or flagged-approximate) k-clustering of the given points under the
// cost model. Exactness policy: subset DP up to dp_limit points for every
// model; corner-anchored enumeration (L-inf) or branch-and-bound (L2) up to
// enum_limit points for k <= 3 center costs; Gonzalez greedy only when opted
// in, which voids the (1+eps) guarantee.
template <int D>
inline SingleShotResult<D> single_shot_solve(const PointSet<D>& ps, std::span<const std::uint32_t> ids,
                                             int k, const CostModel<D>& model,
                                             const SingleShotOptions& opt = {}) {
    RCQ_REQUIRE(!ids.empty(), "single_shot_solve: empty input");
    RCQ_REQUIRE(k >= 1, "single_shot_solve: k must be >= 1");
    SingleShotResult<D> res;
    if (ids.size() <= std::size_t(k)) {
        std::vector<std::vector<std::uint32_t>> parts;
        for (auto id : ids) parts.push_back({id});
        res.clustering = model.finish(ps, std::move(parts));
        res.method = "singletons";
        return res;
    }
    if (ids.size() <= opt.dp_limit) {
        res.clustering = model.finish(ps, detail::subset_dp_parts<D>(ps, ids, k, model));
        res.method = "dp";
        return res;
    }
    if constexpr (D == 1) {
        if (model.agg == Aggregate::Max && model.center_type()) {
            res.clustering = model.finish(ps, detail::one_d_parts<D>(ps, ids, k));
            res.method = "1d-exact";
            return res;
        }
    }
    if constexpr (D == 2) {
        if (model.id == CostModelId::LinfKCenter && k <= 3 && ids.size() <= opt.enum_limit) {
            auto parts = k == 1 ? std::vector<std::vector<std::uint32_t>>{{ids.begin(), ids.end()}}
                       : k == 2 ? detail::linf_two_parts<D>(ps, ids)
                                : detail::linf_three_parts<D>(ps, ids);
            res.clustering = model.finish(ps, std::move(parts));
            res.method = "linf-anchored";
            return res;
        }
    }
    if (model.id == CostModelId::L2KCenter && k <= 3 && ids.size() <= opt.enum_limit) {
        detail::L2BranchBound<D> bb(ps, ids, k, opt.search_budget);
        res.clustering = model.finish(ps, bb.solve());
        res.method = "l2-bb";
        return res;
    }
    if (opt.allow_greedy && model.center_type() && model.agg == Aggregate::Max) {
        res.clustering = model.finish(ps, detail::gonzalez_parts<D>(ps, ids, k, model.norm));
        res.exact = false;
        res.method = "gonzalez";
        return res;
    }
    throw BudgetError("single_shot_solve: instance exceeds exact-solver budget and no fallback permitted");
}

}  // namespace rcq
