#pragma once

#include <bit>
#include <chrono>
#include <functional>
#include <unordered_map>

#include "rcq/cost_model.hpp"

// Brute-force reference implementations and verifiers, implemented from the
// definitions only. They share nothing with the query engine beyond the
// geometry primitives, and are allowed to be exponentially slow within their
// stated budgets.
namespace rcq::oracle {

template <int D>
struct OracleReport {
    double opt = 0.0;
    std::vector<std::vector<std::uint32_t>> witness;
    std::uint64_t instance_hash = 0;
    double runtime_sec = 0.0;
};

template <int D>
inline std::uint64_t instance_hash(const PointSet<D>& ps, std::span<const std::uint32_t> ids, int k,
                                   int model_tag) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(std::uint64_t(k));
    mix(std::uint64_t(model_tag));
    for (auto id : ids)
        for (int d = 0; d < D; ++d) mix(std::uint64_t(ps[id][d]) + 0x9e37u);
    return h;
}

// ---------------------------------------------------------------------------
// Set-partition enumeration (tiny inputs). Calls fn on every partition of the
// ids into at most k nonempty blocks.
template <int D, typename Fn>
inline void for_each_partition(std::span<const std::uint32_t> ids, int k, Fn&& fn) {
    const std::size_t m = ids.size();
    std::vector<int> assign(m, 0);
    std::vector<std::vector<std::uint32_t>> blocks;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
        if (i == m) {
            blocks.assign(used, {});
            for (std::size_t j = 0; j < m; ++j) blocks[assign[j]].push_back(ids[j]);
            fn(blocks);
            return;
        }
        for (int b = 0; b < std::min(used + 1, k); ++b) {
            assign[i] = b;
            rec(i + 1, std::max(used, b + 1));
        }
    };
    rec(0, 0);
}

template <int D>
inline OracleReport<D> brute_force_partitions(const PointSet<D>& ps, std::span<const std::uint32_t> ids,
                                              int k, const CostModel<D>& model) {
    RCQ_REQUIRE(ids.size() <= 11, "brute_force_partitions: too many points");
    OracleReport<D> rep;
    rep.opt = std::numeric_limits<double>::infinity();
    for_each_partition<D>(ids, k, [&](const std::vector<std::vector<std::uint32_t>>& blocks) {
        double v = model.clustering_cost(ps, blocks);
        if (v < rep.opt) {
            rep.opt = v;
            rep.witness = blocks;
        }
    });
    return rep;
}

// ---------------------------------------------------------------------------
// Opt_k(S) = min_T cost(T) + Opt_{k-1}(S \ T), memoized top-down.
template <int D>
class SubsetRecursion {
public:
    SubsetRecursion(const PointSet<D>& ps, std::span<const std::uint32_t> ids, const CostModel<D>& model)
        : ps_(ps), ids_(ids.begin(), ids.end()), model_(model) {
        RCQ_REQUIRE(ids.size() <= 16, "brute_kcenter: subset recursion limited to 16 points");
        const std::size_t words = (std::size_t(1) << ids_.size());
        ccost_.assign(words, -1.0);
    }

    double opt(int k, std::uint32_t mask, std::vector<std::vector<std::uint32_t>>* witness = nullptr) {
        if (mask == 0) return 0.0;
        if (k <= 1) {
            if (witness) witness->push_back(members(mask));
            return cluster(mask);
        }
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_t = mask;
        auto it = memo_.find(encode(k, mask));
        if (it != memo_.end() && !witness) return it->second.first;
        const std::uint32_t low = mask & (~mask + 1);
        for (std::uint32_t t = mask; t; t = (t - 1) & mask) {
            if (!(t & low)) continue;
            double v = combine(cluster(t), opt(k - 1, mask ^ t));
            if (v < best) {
                best = v;
                best_t = t;
            }
        }
        memo_[encode(k, mask)] = {best, best_t};
        if (witness) {
            witness->push_back(members(best_t));
            opt(k - 1, mask ^ best_t, witness);
        }
        return best;
    }

private:
    std::uint64_t encode(int k, std::uint32_t mask) const { return (std::uint64_t(k) << 32) | mask; }

    double combine(double a, double b) const {
        switch (model_.agg) {
            case Aggregate::Max: return std::max(a, b);
            case Aggregate::Sum: return a + b;
            case Aggregate::Rss: return std::sqrt(a * a + b * b);
        }
        return 0.0;
    }

    std::vector<std::uint32_t> members(std::uint32_t mask) const {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < ids_.size(); ++i)
            if (mask & (1u << i)) out.push_back(ids_[i]);
        return out;
    }

    double cluster(std::uint32_t mask) {
        if (ccost_[mask] >= 0) return ccost_[mask];
        auto mem = members(mask);
        return ccost_[mask] = model_.cluster_cost(ps_, mem);
    }

    const PointSet<D>& ps_;
    std::vector<std::uint32_t> ids_;
    const CostModel<D>& model_;
    std::vector<double> ccost_;
    std::unordered_map<std::uint64_t, std::pair<double, std::uint32_t>> memo_;
};

// ---------------------------------------------------------------------------
// Exact rectilinear k-center (k <= 3) in the plane: binary search on the
// sorted pairwise coordinate differences with a recursive corner-anchored
// coverage check.

inline double linf_corner_dist(const Coords<2>& p, coord_t cx, coord_t cy) {
    return double(std::max(iabs(p[0] - cx), iabs(p[1] - cy)));
}

template <int D>
inline bool linf_cover_feasible(const PointSet<D>& ps, std::vector<std::uint32_t> pts, int k, coord_t edge)
    requires(D == 2)
{
    if (pts.empty()) return true;
    if (k == 0) return false;
    coord_t x0 = ps[pts[0]][0], x1 = x0, y0 = ps[pts[0]][1], y1 = y0;
    for (auto id : pts) {
        x0 = std::min(x0, ps[id][0]);
        x1 = std::max(x1, ps[id][0]);
        y0 = std::min(y0, ps[id][1]);
        y1 = std::max(y1, ps[id][1]);
    }
    const std::array<std::pair<coord_t, coord_t>, 4> corners{{{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}}};
    for (auto [cx, cy] : corners) {
        std::vector<std::uint32_t> rem;
        for (auto id : pts)
            if (linf_corner_dist(ps[id], cx, cy) > double(edge)) rem.push_back(id);
        if (rem.size() == pts.size()) continue;  // no progress at this corner
        if (linf_cover_feasible<D>(ps, std::move(rem), k - 1, edge)) return true;
    }
    return false;
}

template <int D>
inline double brute_linf_kcenter_radius(const PointSet<D>& ps, std::span<const std::uint32_t> ids, int k)
    requires(D == 2)
{
    RCQ_REQUIRE(k >= 1 && k <= 3, "brute_linf_kcenter: k <= 3");
    if (ids.size() <= std::size_t(k)) return 0.0;
    std::vector<coord_t> cand{0};
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            cand.push_back(iabs(ps[ids[i]][0] - ps[ids[j]][0]));
            cand.push_back(iabs(ps[ids[i]][1] - ps[ids[j]][1]));
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<std::uint32_t> pts(ids.begin(), ids.end());
    std::size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (linf_cover_feasible<D>(ps, pts, k, cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return double(cand[lo]) / 2.0;
}

// ---------------------------------------------------------------------------
// Exact Euclidean 2-center: the optimal partition is separable by the
// perpendicular bisector of the two centers, so enumerate direction-sorted
// prefix/suffix splits over all point-pair directions.
template <int D>
inline double brute_l2_twocenter_radius(const PointSet<D>& ps, std::span<const std::uint32_t> ids)
    requires(D == 2)
{
    const std::size_t m = ids.size();
    if (m <= 2) return 0.0;
    RCQ_REQUIRE(m <= 80, "brute_l2_twocenter: too many points");
    double best = enclosing_ball_l2<D>(ps, ids).radius;  // 1 cluster
    std::vector<std::uint32_t> order(ids.begin(), ids.end());
    std::vector<std::uint32_t> side(m);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            if (a == b) continue;
            const auto pa = ps[ids[a]], pb = ps[ids[b]];
            const double vx = double(pb[0] - pa[0]), vy = double(pb[1] - pa[1]);
            for (int tilt = 0; tilt < 2; ++tilt) {
                std::sort(order.begin(), order.end(), [&](std::uint32_t u, std::uint32_t w) {
                    double pu = vx * double(ps[u][0]) + vy * double(ps[u][1]);
                    double pw = vx * double(ps[w][0]) + vy * double(ps[w][1]);
                    if (pu != pw) return pu < pw;
                    double su = -vy * double(ps[u][0]) + vx * double(ps[u][1]);
                    double sw = -vy * double(ps[w][0]) + vx * double(ps[w][1]);
                    if (su != sw) return tilt ? su < sw : su > sw;
                    return u < w;
                });
                // forward prefix radii via incremental recomputation
                std::vector<double> pre(m + 1, 0.0), suf(m + 1, 0.0);
                {
                    std::vector<std::uint32_t> acc;
                    Ball<D> ball{};
                    ball.radius = -1;
                    for (std::size_t i = 0; i < m; ++i) {
                        acc.push_back(order[i]);
                        const auto& p = ps[order[i]];
                        if (ball.radius < 0 || l2_dist_real<D>(ball.center, p) > ball.radius + 1e-12)
                            ball = enclosing_ball_l2<D>(ps, acc);
                        pre[i + 1] = ball.radius;
                    }
                }
                {
                    std::vector<std::uint32_t> acc;
                    Ball<D> ball{};
                    ball.radius = -1;
                    for (std::size_t i = m; i-- > 0;) {
                        acc.push_back(order[i]);
                        const auto& p = ps[order[i]];
                        if (ball.radius < 0 || l2_dist_real<D>(ball.center, p) > ball.radius + 1e-12)
                            ball = enclosing_ball_l2<D>(ps, acc);
                        suf[i] = ball.radius;
                    }
                }
                for (std::size_t t = 1; t < m; ++t) best = std::min(best, std::max(pre[t], suf[t]));
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// brute_kcenter: exact optimum by subset recursion (any cost model, <= 16
// points) or candidate-size enumeration (center costs, k <= 3).
template <int D>
inline OracleReport<D> brute_kcenter(const PointSet<D>& ps, std::span<const std::uint32_t> ids, int k,
                                     const CostModel<D>& model, std::size_t enum_limit = 400) {
    auto t0 = std::chrono::steady_clock::now();
    OracleReport<D> rep;
    rep.instance_hash = instance_hash<D>(ps, ids, k, int(model.id));
    if (ids.size() <= std::size_t(k)) {
        rep.opt = 0.0;
        for (auto id : ids) rep.witness.push_back({id});
    } else if (ids.size() <= 16) {
        SubsetRecursion<D> rec(ps, ids, model);
        const std::uint32_t full = std::uint32_t((1u << ids.size()) - 1);
        rep.opt = rec.opt(std::min<int>(k, int(ids.size())), full, &rep.witness);
    } else if constexpr (D == 2) {
        RCQ_REQUIRE(k <= 3 && model.center_type() && model.agg == Aggregate::Max,
                    "brute_kcenter: enumeration mode needs a center-type max cost, k <= 3");
        RCQ_REQUIRE(ids.size() <= enum_limit, "brute_kcenter: budget exceeded");
        if (model.id == CostModelId::LinfKCenter) {
            rep.opt = brute_linf_kcenter_radius<D>(ps, ids, k);
        } else if (k == 1) {
            rep.opt = enclosing_ball_l2<D>(ps, ids).radius;
        } else {
            RCQ_REQUIRE(k == 2, "brute_kcenter: Euclidean enumeration supports k <= 2 beyond 16 points");
            rep.opt = brute_l2_twocenter_radius<D>(ps, ids);
        }
    } else {
        throw BudgetError("brute_kcenter: budget exceeded");
    }
    rep.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// dp_1d: exact 1D k-center length, by binary search on the answer with a
// greedy feasibility check, plus an interval-DP formulation for mutual checks.

inline bool greedy_1d_feasible(std::span<const coord_t> xs, int k, coord_t len) {
    int used = 0;
    std::size_t i = 0;
    while (i < xs.size()) {
        if (++used > k) return false;
        coord_t end = xs[i] + len;
        while (i < xs.size() && xs[i] <= end) ++i;
    }
    return true;
}

inline coord_t dp_1d(std::span<const coord_t> xs_sorted, int k) {
    if (xs_sorted.size() <= std::size_t(k)) return 0;
    std::vector<coord_t> cand{0};
    for (std::size_t i = 0; i < xs_sorted.size(); ++i)
        for (std::size_t j = i + 1; j < xs_sorted.size(); ++j)
            cand.push_back(xs_sorted[j] - xs_sorted[i]);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (greedy_1d_feasible(xs_sorted, k, cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return cand[lo];
}

inline coord_t dp_1d_interval_dp(std::span<const coord_t> xs, int k) {
    const std::size_t n = xs.size();
    if (n <= std::size_t(k)) return 0;
    const coord_t inf = std::numeric_limits<coord_t>::max();
    std::vector<coord_t> prev(n + 1, inf), cur(n + 1, inf);
    prev[0] = 0;  // dp[j][i] = min length covering the first i points with j intervals
    for (int j = 1; j <= k; ++j) {
        cur.assign(n + 1, inf);
        cur[0] = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t t = 0; t < i; ++t) {
                if (prev[t] == inf) continue;
                coord_t v = std::max(prev[t], xs[i - 1] - xs[t]);
                cur[i] = std::min(cur[i], v);
            }
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

// ---------------------------------------------------------------------------
// Literal definition checks.

// Every point of the subset has a packing point within Euclidean distance r.
template <int D>
inline bool verify_weak_packing(const PointSet<D>& ps, std::span<const std::uint32_t> subset,
                                std::span<const std::uint32_t> packing, double r) {
    if (subset.empty()) return true;
    if (packing.empty()) return false;
    const long double r2 = (long double)(r) * (long double)(r);
    for (auto p : subset) {
        bool ok = false;
        for (auto q : packing)
            if ((long double)dist2_sq<D>(ps[p], ps[q]) <= r2) {
                ok = true;
                break;
            }
        if (!ok) return false;
    }
    return true;
}

// Exact delta-approximation check over all combinatorially distinct closed
// rectangles: y-bands over distinct ranks, max-subarray over x for the signed
// measure |P-share - A-share|.
inline bool verify_delta_approx_2d(const PointSet<2>& ps, std::span<const std::uint32_t> subset,
                                   std::span<const std::uint32_t> sample, double delta,
                                   double* max_discrepancy = nullptr) {
    if (sample.empty()) return false;
    RCQ_REQUIRE(subset.size() <= 2048, "verify_delta_approx: exact mode budget");
    std::vector<std::uint32_t> order(subset.begin(), subset.end());
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return ps[a][0] != ps[b][0] ? ps[a][0] < ps[b][0] : a < b;
    });
    std::vector<char> is_a(order.size(), 0);
    {
        std::vector<std::uint32_t> smp(sample.begin(), sample.end());
        std::sort(smp.begin(), smp.end());
        for (std::size_t i = 0; i < order.size(); ++i)
            is_a[i] = std::binary_search(smp.begin(), smp.end(), order[i]);
    }
    std::vector<coord_t> ys;
    for (auto id : subset) ys.push_back(ps[id][1]);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    const double wp = 1.0 / double(subset.size());
    const double wa = 1.0 / double(sample.size());
    double worst = 0.0;
    std::vector<double> weight(order.size());
    for (std::size_t a = 0; a < ys.size(); ++a) {
        for (std::size_t b = a; b < ys.size(); ++b) {
            const coord_t ylo = ys[a], yhi = ys[b];
            // signed weight per x-ordered point inside the band
            for (std::size_t i = 0; i < order.size(); ++i) {
                coord_t y = ps[order[i]][1];
                weight[i] = (y >= ylo && y <= yhi) ? (wp - (is_a[i] ? wa : 0.0)) : 0.0;
            }
            // max and min subarray over x runs (split between distinct x values)
            double run_max = 0, run_min = 0;
            double cur_max = 0, cur_min = 0;
            for (std::size_t i = 0; i < order.size();) {
                std::size_t j = i;
                double grp = 0;
                while (j < order.size() && ps[order[j]][0] == ps[order[i]][0]) grp += weight[j++];
                cur_max = std::max(grp, cur_max + grp);
                cur_min = std::min(grp, cur_min + grp);
                run_max = std::max(run_max, cur_max);
                run_min = std::min(run_min, cur_min);
                i = j;
            }
            worst = std::max({worst, run_max, -run_min});
        }
    }
    if (max_discrepancy) *max_discrepancy = worst;
    return worst <= delta;
}

inline bool verify_delta_approx_1d(const PointSet<1>& ps, std::span<const std::uint32_t> subset,
                                   std::span<const std::uint32_t> sample, double delta,
                                   double* max_discrepancy = nullptr) {
    if (sample.empty()) return false;
    std::vector<std::uint32_t> order(subset.begin(), subset.end());
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return ps[a][0] < ps[b][0]; });
    std::vector<char> is_a(order.size(), 0);
    std::vector<std::uint32_t> smp(sample.begin(), sample.end());
    std::sort(smp.begin(), smp.end());
    for (std::size_t i = 0; i < order.size(); ++i)
        is_a[i] = std::binary_search(smp.begin(), smp.end(), order[i]);
    const double wp = 1.0 / double(subset.size());
    const double wa = 1.0 / double(sample.size());
    double worst = 0, cur_max = 0, cur_min = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        double grp = 0;
        while (j < order.size() && ps[order[j]][0] == ps[order[i]][0]) grp += wp - (is_a[j++] ? wa : 0.0);
        cur_max = std::max(grp, cur_max + grp);
        cur_min = std::min(grp, cur_min + grp);
        worst = std::max({worst, cur_max, -cur_min});
        i = j;
    }
    if (max_discrepancy) *max_discrepancy = worst;
    return worst <= delta;
}

template <int D>
inline bool verify_delta_approx(const PointSet<D>& ps, std::span<const std::uint32_t> subset,
                                std::span<const std::uint32_t> sample, double delta,
                                double* max_discrepancy = nullptr) {
    if constexpr (D == 2)
        return verify_delta_approx_2d(ps, subset, sample, delta, max_discrepancy);
    else if constexpr (D == 1)
        return verify_delta_approx_1d(ps, subset, sample, delta, max_discrepancy);
    else
        RCQ_REQUIRE(false, "verify_delta_approx: implemented for d in {1, 2}");
    return false;
}

// ---------------------------------------------------------------------------
// Exhaustive assignment search: can every point be assigned to a containing
// square with at most cap points per square (counting only weighted points)?
struct OracleSquare {
    double x0, y0, edge;
    bool contains(const Coords<2>& p) const {
        return double(p[0]) >= x0 && double(p[0]) <= x0 + edge && double(p[1]) >= y0 &&
               double(p[1]) <= y0 + edge;
    }
};

inline bool assignment_search(const PointSet<2>& ps, std::span<const std::uint32_t> pts,
                              std::span<const char> counted, std::span<const OracleSquare> squares,
                              std::int64_t cap) {
    const std::size_t m = pts.size();
    const std::size_t k = squares.size();
    std::vector<std::vector<int>> options(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t s = 0; s < k; ++s)
            if (squares[s].contains(ps[pts[i]])) options[i].push_back(int(s));
        if (options[i].empty()) return false;
    }
    // order by fewest options first
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return options[a].size() < options[b].size(); });
    std::vector<std::int64_t> load(k, 0);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == m) return true;
        const std::size_t idx = order[i];
        if (!counted[idx]) return rec(i + 1);  // weight-0 points never violate capacity
        for (int s : options[idx]) {
            if (load[s] + 1 > cap) continue;
            ++load[s];
            if (rec(i + 1)) return true;
            --load[s];
        }
        return false;
    };
    return rec(0);
}

// ---------------------------------------------------------------------------
// Exhaustive capacitated rectilinear k-center (k <= 2): sizes from pairwise
// coordinate differences, anchored placements, counting-based assignment.
struct CapacitatedOracleResult {
    double edge = 0.0;
    bool feasible = true;
};

inline CapacitatedOracleResult brute_capacitated(const PointSet<2>& ps, std::span<const std::uint32_t> ids,
                                                 int k, double capacity) {
    RCQ_REQUIRE(k >= 1 && k <= 2, "brute_capacitated: k <= 2");
    RCQ_REQUIRE(ids.size() <= 24, "brute_capacitated: budget exceeded");
    const std::int64_t cap = std::int64_t(std::floor(capacity + 1e-12));
    const std::int64_t m = std::int64_t(ids.size());
    if (m > k * cap) return {0.0, false};

    std::vector<coord_t> xs, ys, cand{0};
    for (auto id : ids) {
        xs.push_back(ps[id][0]);
        ys.push_back(ps[id][1]);
    }
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            cand.push_back(iabs(ps[ids[i]][0] - ps[ids[j]][0]));
            cand.push_back(iabs(ps[ids[i]][1] - ps[ids[j]][1]));
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    auto masks_for = [&](coord_t edge) {
        std::vector<std::uint64_t> masks;
        for (auto ax : xs)
            for (auto ay : ys) {
                std::uint64_t msk = 0;
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    const auto& p = ps[ids[i]];
                    if (p[0] >= ax && p[0] <= ax + edge && p[1] >= ay && p[1] <= ay + edge)
                        msk |= (1ull << i);
                }
                masks.push_back(msk);
            }
        std::sort(masks.begin(), masks.end());
        masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
        return masks;
    };
    const std::uint64_t full = (ids.size() == 64) ? ~0ull : ((1ull << ids.size()) - 1);
    auto feasible = [&](coord_t edge) {
        auto masks = masks_for(edge);
        if (k == 1) {
            for (auto a : masks)
                if (a == full && std::int64_t(std::popcount(a)) <= cap) return true;
            return false;
        }
        for (std::size_t i = 0; i < masks.size(); ++i)
            for (std::size_t j = i; j < masks.size(); ++j) {
                if ((masks[i] | masks[j]) != full) continue;
                std::int64_t only1 = std::popcount(masks[i] & ~masks[j]);
                std::int64_t only2 = std::popcount(masks[j] & ~masks[i]);
                if (only1 <= cap && only2 <= cap && m <= 2 * cap) return true;
            }
        return false;
    };
    std::size_t lo = 0, hi = cand.size() - 1;
    if (!feasible(cand[hi])) return {0.0, false};
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return {double(cand[lo]), true};
}

// 0/1-weighted variant: covers R ∪ A, only A-points count against U.
inline CapacitatedOracleResult brute_pckc(const PointSet<2>& ps, std::span<const std::uint32_t> r_ids,
                                          std::span<const std::uint32_t> a_ids, int k, std::int64_t u) {
    RCQ_REQUIRE(k >= 1 && k <= 2, "brute_pckc: k <= 2");
    std::vector<std::uint32_t> all(r_ids.begin(), r_ids.end());
    std::vector<char> counted(r_ids.size(), 0);
    for (auto id : a_ids) {
        auto it = std::find(all.begin(), all.end(), id);
        if (it == all.end()) {
            all.push_back(id);
            counted.push_back(1);
        } else {
            counted[std::size_t(it - all.begin())] = 1;
        }
    }
    RCQ_REQUIRE(all.size() <= 16, "brute_pckc: budget exceeded");
    std::int64_t n_a = std::count(counted.begin(), counted.end(), char(1));
    if (n_a > std::int64_t(k) * u) return {0.0, false};

    std::vector<coord_t> cand{0};
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            cand.push_back(iabs(ps[all[i]][0] - ps[all[j]][0]));
            cand.push_back(iabs(ps[all[i]][1] - ps[all[j]][1]));
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    auto feasible = [&](coord_t edge) {
        std::vector<OracleSquare> sqs;
        for (auto a : all)
            for (auto b : all)
                sqs.push_back(OracleSquare{double(ps[a][0]), double(ps[b][1]), double(edge)});
        const std::size_t s = sqs.size();
        if (k == 1) {
            for (std::size_t i = 0; i < s; ++i) {
                std::array<OracleSquare, 1> pick{sqs[i]};
                if (assignment_search(ps, all, counted, pick, u)) return true;
            }
            return false;
        }
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = i; j < s; ++j) {
                std::array<OracleSquare, 2> pick{sqs[i], sqs[j]};
                if (assignment_search(ps, all, counted, pick, u)) return true;
            }
        return false;
    };
    std::size_t lo = 0, hi = cand.size() - 1;
    if (!feasible(cand[hi])) return {0.0, false};
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return {double(cand[lo]), true};
}

// ---------------------------------------------------------------------------
// Anchored-pair brute force for planar rectilinear 2-center (edge length).
inline double brute_two_center_edge(const PointSet<2>& ps, std::span<const std::uint32_t> ids) {
    if (ids.empty()) return 0.0;
    coord_t x0 = ps[ids[0]][0], x1 = x0, y0 = ps[ids[0]][1], y1 = y0;
    for (auto id : ids) {
        x0 = std::min(x0, ps[id][0]);
        x1 = std::max(x1, ps[id][0]);
        y0 = std::min(y0, ps[id][1]);
        y1 = std::max(y1, ps[id][1]);
    }
    double e0 = 0, e1 = 0;
    for (auto id : ids) {
        const auto& p = ps[id];
        e0 = std::max(e0, std::min(linf_corner_dist(p, x0, y1), linf_corner_dist(p, x1, y0)));
        e1 = std::max(e1, std::min(linf_corner_dist(p, x1, y1), linf_corner_dist(p, x0, y0)));
    }
    return std::min(e0, e1);
}

// Exhaustive 3-center: candidate sizes from pairwise coordinate differences,
// coverage checked with one square anchored at a corner of the bounding box
// and the anchored-pair rule on the remainder.
inline double brute_three_center_edge(const PointSet<2>& ps, std::span<const std::uint32_t> ids) {
    if (ids.size() <= 3) return 0.0;
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
    auto feasible = [&](coord_t edge) {
        for (auto [cx, cy] : corners) {
            rem.clear();
            for (auto id : ids)
                if (linf_corner_dist(ps[id], cx, cy) > double(edge)) rem.push_back(id);
            if (rem.empty()) return true;
            if (brute_two_center_edge(ps, rem) <= double(edge)) return true;
        }
        return false;
    };
    std::size_t lo = 0, hi = cand.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return double(cand[lo]);
}

}  // namespace rcq::oracle
