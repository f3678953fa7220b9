#pragma once

#include <bit>
#include <functional>
#include <unordered_map>

#include "rcq/approx_cluster.hpp"

namespace rcq {

// Planar capacitated rectilinear k-center queries (d = 2).

struct CapacitatedSpec {
    AxisBox<2> box;
    int k = 2;
    double alpha = 1.2;  // capacity factor, > 1
    double eps = 0.25;
    double delta = 0.25;

    double delta_q() const { return delta / (16.0 * double(k) * double(k) * double(k)); }
    double capacity_uq(std::size_t sq_count) const { return alpha * double(sq_count) / double(k); }
    double capacity_u(std::size_t aq_count) const {
        return (1.0 + delta / 2.0) * alpha * double(aq_count) / double(k);
    }
};

struct CapacitatedBudget {
    std::size_t max_points = 40;  // |R ∪ A| cap for the enumeration solver
    int max_k = 3;
    std::uint64_t max_decision_nodes = 20'000'000;
};

struct DeltaApprox {
    std::vector<std::uint32_t> sample;  // A_Q ⊆ S_Q, sorted ids
    double delta_q = 0.0;
    int ladder_level = 0;
    std::size_t intermediate_size = 0;  // |A_i ∩ Q|
};

// DeltaSample(Q, delta_q): restrict the right ladder level to Q, then
// re-sample it down to a (delta_q/2)-approximation. A delta'-approximation of
// a delta''-approximation is a (delta'+delta'')-approximation.
inline DeltaApprox delta_sample(const Index<2>& ix, const AxisBox<2>& box, double delta_q) {
    RCQ_REQUIRE(delta_q > 0 && delta_q <= 1.0, "delta_sample: delta_q in (0, 1]");
    const std::size_t n = ix.points().size();
    const std::size_t n_q = ix.rindex().range_count(box);
    RCQ_REQUIRE(n_q >= 1, "delta_sample: empty range");

    // smallest i with 1/2^i <= (delta_q / 4) * (|P_Q| / |P|)
    const double target = (delta_q / 4.0) * (double(n_q) / double(n));
    int i = 1;
    while (std::ldexp(1.0, -i) > target && i < 64) ++i;
    DeltaApprox out;
    out.delta_q = delta_q;
    out.ladder_level = std::min(i, ix.ladder().top_level());

    std::vector<std::uint32_t> a = ix.ladder().level_report(out.ladder_level, box);
    if (a.empty() || i > ix.ladder().top_level()) {
        // resolution beyond the ladder: fall back to the exact subset
        a = ix.rindex().range_report(box);
        std::sort(a.begin(), a.end());
    }
    out.intermediate_size = a.size();

    const std::size_t m2 = delta_sample_size(delta_q / 2.0);
    if (m2 >= a.size()) {
        out.sample = std::move(a);
        return out;
    }
    std::uint64_t salt = ix.ladder().seed() ^ (0x5bd1e995ull * (a.size() + 0x1000ull * out.ladder_level));
    auto pick = ApproxLadder<2>::sample_ids(a.size(), m2, salt);
    out.sample.reserve(m2);
    for (auto idx : pick) out.sample.push_back(a[idx]);
    std::sort(out.sample.begin(), out.sample.end());
    return out;
}

// ---------------------------------------------------------------------------
// Assignment feasibility as a flow problem (Ford-Fulkerson augmenting paths):
// source -> point (cap 1), point -> containing square (cap 1),
// square -> sink (cap U).
struct FlowResult {
    bool feasible = false;
    std::vector<std::int32_t> assignment;  // square index per counted point
};

inline FlowResult flow_feasible(const PointSet<2>& ps, std::span<const SquareR> squares,
                                std::span<const std::uint32_t> counted_points, std::int64_t capacity) {
    const std::size_t m = counted_points.size();
    const std::size_t k = squares.size();
    FlowResult res;
    res.assignment.assign(m, -1);
    if (capacity < 0) capacity = 0;
    if (m == 0) {
        res.feasible = true;
        return res;
    }
    std::vector<std::vector<std::int32_t>> options(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t s = 0; s < k; ++s)
            if (squares[s].contains(ps[counted_points[i]], 1e-9)) options[i].push_back(std::int32_t(s));
    std::vector<std::int64_t> load(k, 0);
    // process points with fewest containing squares first, then augment
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return options[a].size() < options[b].size(); });
    std::vector<std::vector<std::uint32_t>> users(k);  // points currently on a square
    std::vector<char> seen(k, 0);

    std::function<bool(std::uint32_t)> augment = [&](std::uint32_t p) -> bool {
        for (auto s : options[p]) {
            if (seen[s]) continue;
            seen[s] = 1;
            if (load[s] < capacity) {
                ++load[s];
                res.assignment[p] = s;
                users[s].push_back(p);
                return true;
            }
            for (std::size_t t = 0; t < users[s].size(); ++t) {
                std::uint32_t q = users[s][t];
                if (augment(q)) {
                    // q moved elsewhere; reuse its slot
                    users[s][t] = users[s].back();
                    users[s].pop_back();
                    res.assignment[p] = s;
                    users[s].push_back(p);
                    return true;
                }
            }
        }
        return false;
    };

    for (auto p : order) {
        if (options[p].empty()) return res;
        std::fill(seen.begin(), seen.end(), 0);
        if (!augment(p)) return res;
    }
    res.feasible = true;
    return res;
}

// ---------------------------------------------------------------------------
// 0/1-weighted capacitated rectilinear k-center: cover R ∪ A with k congruent
// squares of minimum size, where only A-points count against the capacity.
struct PckcResult {
    double edge = 0.0;
    std::vector<SquareR> squares;
    std::vector<std::int32_t> a_assignment;  // square index per element of a_ids
    std::vector<std::uint32_t> a_ids;
    std::uint64_t decision_nodes = 0;
};

namespace detail {

struct PckcInstance {
    const PointSet<2>& ps;
    std::vector<std::uint32_t> all;   // R ∪ A, deduplicated ids
    std::vector<char> counted;        // weight-1 flag per element of all
    std::vector<std::uint32_t> a_pts; // counted ids
    int k;
    std::int64_t cap;
    std::uint64_t node_budget;
    std::uint64_t nodes = 0;

    struct CandidateSquare {
        std::uint64_t mask;
        coord_t ax, ay;
    };

    std::vector<CandidateSquare> candidates(coord_t edge) const {
        std::vector<CandidateSquare> out;
        std::vector<coord_t> xs, ys;
        for (auto id : all) {
            xs.push_back(ps[id][0]);
            ys.push_back(ps[id][1]);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        for (auto ax : xs)
            for (auto ay : ys) {
                std::uint64_t msk = 0;
                for (std::size_t i = 0; i < all.size(); ++i) {
                    const auto& p = ps[all[i]];
                    if (p[0] >= ax && p[0] <= ax + edge && p[1] >= ay && p[1] <= ay + edge)
                        msk |= (1ull << i);
                }
                if (msk) out.push_back({msk, ax, ay});
            }
        // dominance: keep only maximal coverage masks (a larger mask can only
        // help both coverage and the flow)
        std::sort(out.begin(), out.end(), [](const CandidateSquare& a, const CandidateSquare& b) {
            return std::popcount(a.mask) > std::popcount(b.mask);
        });
        std::vector<CandidateSquare> keep;
        for (const auto& c : out) {
            bool dominated = false;
            for (const auto& kc : keep)
                if ((c.mask | kc.mask) == kc.mask) {
                    dominated = true;
                    break;
                }
            if (!dominated) keep.push_back(c);
        }
        return keep;
    }

    bool decide(coord_t edge, PckcResult* witness) {
        auto cands = candidates(edge);
        const std::uint64_t full = all.size() >= 64 ? ~0ull : ((1ull << all.size()) - 1);
        std::vector<std::size_t> chosen;
        return branch(cands, full, 0, chosen, 0, edge, witness);
    }

    bool try_flow(const std::vector<CandidateSquare>& cands, std::span<const std::size_t> chosen,
                  coord_t edge, PckcResult* witness) {
        std::vector<SquareR> sqs;
        for (auto ci : chosen) sqs.push_back(SquareR{double(cands[ci].ax), double(cands[ci].ay), double(edge)});
        auto flow = flow_feasible(ps, sqs, a_pts, cap);
        if (!flow.feasible) return false;
        if (witness) {
            while (sqs.size() < std::size_t(k)) sqs.push_back(sqs.front());  // report k congruent squares
            witness->edge = double(edge);
            witness->squares = sqs;
            witness->a_assignment = flow.assignment;
            witness->a_ids = a_pts;
        }
        return true;
    }

    // Choose up to k anchored candidate squares: first cover the points (each
    // new square must contain the lowest uncovered one), then, if the flow is
    // still capacity-infeasible, add helper squares that only share load.
    bool branch(const std::vector<CandidateSquare>& cands, std::uint64_t full, std::uint64_t covered,
                std::vector<std::size_t>& chosen, std::size_t helper_start, coord_t edge,
                PckcResult* witness) {
        if (++nodes > node_budget) throw BudgetError("pckc: decision budget exceeded");
        if (covered == full) {
            if (try_flow(cands, chosen, edge, witness)) return true;
            if (chosen.size() == std::size_t(k)) return false;
            for (std::size_t ci = helper_start; ci < cands.size(); ++ci) {
                chosen.push_back(ci);
                if (branch(cands, full, covered, chosen, ci, edge, witness)) return true;
                chosen.pop_back();
            }
            return false;
        }
        if (chosen.size() == std::size_t(k)) return false;
        const int low = std::countr_zero(full & ~covered);
        for (std::size_t ci = 0; ci < cands.size(); ++ci) {
            if (!(cands[ci].mask & (1ull << low))) continue;
            chosen.push_back(ci);
            if (branch(cands, full, covered | cands[ci].mask, chosen, 0, edge, witness)) return true;
            chosen.pop_back();
        }
        return false;
    }
};

}  // namespace detail

inline PckcResult pckc(const PointSet<2>& ps, std::span<const std::uint32_t> r_ids,
                       std::span<const std::uint32_t> a_ids, int k, std::int64_t capacity,
                       const CapacitatedBudget& budget = {}) {
    RCQ_REQUIRE(k >= 1, "pckc: k >= 1");
    if (k > budget.max_k) throw BudgetError("pckc: k exceeds the enumeration budget");

    detail::PckcInstance inst{ps, {}, {}, {}, k, capacity, budget.max_decision_nodes};
    inst.all.assign(r_ids.begin(), r_ids.end());
    std::sort(inst.all.begin(), inst.all.end());
    inst.all.erase(std::unique(inst.all.begin(), inst.all.end()), inst.all.end());
    inst.counted.assign(inst.all.size(), 0);
    for (auto id : a_ids) {
        auto it = std::lower_bound(inst.all.begin(), inst.all.end(), id);
        const std::size_t off = std::size_t(it - inst.all.begin());
        if (it != inst.all.end() && *it == id) {
            inst.counted[off] = 1;
        } else {
            inst.all.insert(inst.all.begin() + std::ptrdiff_t(off), id);
            inst.counted.insert(inst.counted.begin() + std::ptrdiff_t(off), 1);
        }
    }
    RCQ_REQUIRE(!inst.all.empty(), "pckc: empty input");
    if (inst.all.size() > budget.max_points)
        throw BudgetError("pckc: point count exceeds the enumeration budget");
    for (std::size_t i = 0; i < inst.all.size(); ++i)
        if (inst.counted[i]) inst.a_pts.push_back(inst.all[i]);
    if (std::int64_t(inst.a_pts.size()) > std::int64_t(k) * capacity)
        throw InfeasibleError("pckc: more weighted points than total capacity");

    std::vector<coord_t> cand{0};
    for (std::size_t i = 0; i < inst.all.size(); ++i)
        for (std::size_t j = i + 1; j < inst.all.size(); ++j) {
            cand.push_back(iabs(ps[inst.all[i]][0] - ps[inst.all[j]][0]));
            cand.push_back(iabs(ps[inst.all[i]][1] - ps[inst.all[j]][1]));
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::size_t lo = 0, hi = cand.size() - 1;
    RCQ_INVARIANT(inst.decide(cand[hi], nullptr), "pckc: largest candidate size must be feasible");
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (inst.decide(cand[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    PckcResult out;
    RCQ_INVARIANT(inst.decide(cand[lo], &out), "pckc: optimum must stay feasible");
    out.decision_nodes = inst.nodes;
    return out;
}

// ---------------------------------------------------------------------------
// Grid-and-chunk assignment: split the plane by the square edge lines, then
// split each cell into rank-chunks matching the A-partition counts.
inline std::vector<std::vector<std::uint32_t>> assign_points(const PointSet<2>& ps,
                                                             std::span<const SquareR> squares,
                                                             std::span<const std::uint32_t> a_ids,
                                                             std::span<const std::int32_t> a_assignment,
                                                             std::span<const std::uint32_t> all_ids) {
    const std::size_t k = squares.size();
    // The grid is drawn from slightly enlarged squares so that every covered
    // point is strictly interior to its squares' line intervals; quantized
    // points never land in the margin, so each cell lies inside exactly the
    // squares that contain its points.
    const double eta = 1e-7;
    std::vector<double> xs, ys;
    for (const auto& s : squares) {
        xs.push_back(s.x0 - eta);
        xs.push_back(s.x1() + eta);
        ys.push_back(s.y0 - eta);
        ys.push_back(s.y1() + eta);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    auto interval_of = [](const std::vector<double>& lines, double v) {
        return std::size_t(std::upper_bound(lines.begin(), lines.end(), v) - lines.begin());
    };
    auto cell_of = [&](const Coords<2>& p) {
        return interval_of(xs, double(p[0])) * (ys.size() + 2) + interval_of(ys, double(p[1]));
    };

    std::vector<std::int32_t> square_of_a(ps.size(), -1);
    for (std::size_t i = 0; i < a_ids.size(); ++i) square_of_a[a_ids[i]] = a_assignment[i];

    // group S_Q by cell
    std::unordered_map<std::size_t, std::vector<std::uint32_t>> cells;
    for (auto id : all_ids) cells[cell_of(ps[id])].push_back(id);

    std::vector<std::vector<std::uint32_t>> parts(k);
    std::vector<std::int64_t> load(k, 0);
    for (auto& [ck, members] : cells) {
        // squares containing this cell (cells never straddle an edge line)
        const std::size_t ix = ck / (ys.size() + 2), iy = ck % (ys.size() + 2);
        std::vector<std::size_t> in_cell;
        if (ix > 0 && ix < xs.size() + 1 && iy > 0 && iy < ys.size() + 1) {
            const double cx0 = xs[ix - 1], cx1 = ix <= xs.size() - 1 ? xs[ix] : xs.back();
            const double cy0 = ys[iy - 1], cy1 = iy <= ys.size() - 1 ? ys[iy] : ys.back();
            for (std::size_t s = 0; s < k; ++s)
                if (squares[s].x0 - eta <= cx0 && cx1 <= squares[s].x1() + eta &&
                    squares[s].y0 - eta <= cy0 && cy1 <= squares[s].y1() + eta)
                    in_cell.push_back(s);
        }
        // topmost first; stable ties by x then id (degenerate-subcell rule)
        std::sort(members.begin(), members.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (ps[a][1] != ps[b][1]) return ps[a][1] > ps[b][1];
            if (ps[a][0] != ps[b][0]) return ps[a][0] < ps[b][0];
            return a < b;
        });
        // A-counts per containing square, in square order
        std::vector<std::int64_t> quota(in_cell.size(), 0);
        std::int64_t total_a = 0;
        for (auto id : members)
            if (square_of_a[id] >= 0) {
                for (std::size_t t = 0; t < in_cell.size(); ++t)
                    if (std::int32_t(in_cell[t]) == square_of_a[id]) {
                        ++quota[t];
                        ++total_a;
                        break;
                    }
            }
        std::size_t t = 0;
        std::int64_t used = 0;
        auto advance = [&]() {
            while (t + 1 < in_cell.size() && used >= quota[t]) {
                ++t;
                used = 0;
            }
        };
        for (auto id : members) {
            std::int32_t target;
            if (in_cell.empty()) {
                target = -1;
            } else {
                advance();
                target = std::int32_t(in_cell[t]);
                if (square_of_a[id] >= 0) ++used;
            }
            // boundary-degenerate fallback: pick the least-loaded containing square
            if (target < 0 || !squares[std::size_t(target)].contains(ps[id], 1e-9)) {
                target = -1;
                for (std::size_t s = 0; s < k; ++s)
                    if (squares[s].contains(ps[id], 1e-9) && (target < 0 || load[s] < load[target]))
                        target = std::int32_t(s);
                RCQ_INVARIANT(target >= 0, "assign_points: expanded squares must cover every point");
            }
            parts[std::size_t(target)].push_back(id);
            ++load[std::size_t(target)];
        }
        (void)total_a;
    }
    for (auto& part : parts) std::sort(part.begin(), part.end());
    return parts;
}

// ---------------------------------------------------------------------------

struct CapacitatedSolution {
    std::vector<SquareR> squares;
    std::vector<std::vector<std::uint32_t>> clusters;  // aligned with squares
    double size = 0.0;                                 // common square edge
    double lb = 0.0;
    double r = 0.0;
    DeltaApprox sample;
    std::size_t sq_count = 0;
    std::size_t packing_size = 0;
    std::uint32_t nodes_visited = 0;
};

// CapacitatedClusterQuery(k, Q, alpha, eps, delta).
inline CapacitatedSolution capacitated_cluster_query(const Index<2>& ix, const CapacitatedSpec& spec,
                                                     const CapacitatedBudget& budget = {}) {
    RCQ_REQUIRE(spec.k >= 2, "capacitated_cluster_query: k >= 2");
    RCQ_REQUIRE(spec.alpha > 1.0, "capacitated_cluster_query: alpha > 1");
    RCQ_REQUIRE(spec.eps > 0 && spec.delta > 0, "capacitated_cluster_query: eps, delta > 0");
    CapacitatedSolution sol;
    sol.sq_count = ix.rindex().range_count(spec.box);
    if (sol.sq_count == 0) return sol;
    RCQ_REQUIRE(spec.capacity_uq(sol.sq_count) >= 1.0,
                "capacitated_cluster_query: capacity below one point per cluster");

    const auto& ps = ix.points();
    if (sol.sq_count <= std::size_t(spec.k)) {
        auto ids = ix.rindex().range_report(spec.box);
        std::sort(ids.begin(), ids.end());
        for (auto id : ids) {
            sol.squares.push_back(SquareR{double(ps[id][0]), double(ps[id][1]), 0.0});
            sol.clusters.push_back({id});
        }
        return sol;
    }

    QuerySpec<2> qs{spec.box, spec.k, spec.eps, cost_model<2>(CostModelId::LinfKCenter)};
    auto packing = lower_bound_and_packing(ix, qs);
    sol.lb = packing.lb;
    sol.r = packing.r;
    sol.packing_size = packing.packing.size();
    sol.nodes_visited = packing.nodes_visited;

    sol.sample = delta_sample(ix, spec.box, spec.delta_q());
    const std::int64_t cap = std::int64_t(std::floor(spec.capacity_u(sol.sample.sample.size()) + 1e-9));
    auto solved = pckc(ps, packing.packing, sol.sample.sample, spec.k, cap, budget);

    sol.squares.reserve(solved.squares.size());
    for (const auto& sq : solved.squares) sol.squares.push_back(sq.expand(sol.r));
    sol.size = solved.squares.empty() ? 0.0 : sol.squares[0].edge;

    auto all_ids = ix.rindex().range_report(spec.box);
    std::sort(all_ids.begin(), all_ids.end());
    sol.clusters = assign_points(ps, sol.squares, solved.a_ids, solved.a_assignment, all_ids);
    // drop unused squares' empty clusters only in tandem (keep alignment)
    return sol;
}

}  // namespace rcq
