#pragma once

#include <map>
#include <optional>

#include "rcq/core.hpp"

namespace rcq {

// Exact rectilinear k-center queries on a sorted 1D array: a Decider-based
// algorithm (binary searches, good for large k) and a fair-split recursion
// (good for small k). Both return the optimal common interval length.

struct IntervalSolution {
    coord_t length = 0;
    std::vector<std::pair<coord_t, coord_t>> intervals;        // closed, common length
    std::vector<std::vector<std::uint32_t>> members;           // ids per interval
    bool empty = true;
    const char* algorithm = "";
};

struct Exact1DStats {
    std::uint64_t probes = 0;           // binary-search loop iterations
    std::uint64_t decider_calls = 0;
    std::uint64_t decider_probes_max = 0;  // worst single decider call
    std::uint64_t subproblems = 0;         // small-k recursive calls
};

class Exact1D {
public:
    explicit Exact1D(const PointSet<1>& ps) : ps_(&ps) {
        order_.resize(ps.size());
        std::iota(order_.begin(), order_.end(), 0u);
        std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
            return ps[a][0] != ps[b][0] ? ps[a][0] < ps[b][0] : a < b;
        });
    }

    std::size_t size() const { return order_.size(); }
    coord_t x(std::size_t i) const { return (*ps_)[order_[i]][0]; }

    // Indices [i, j] of the shrunk interval [successor(lo), predecessor(hi)].
    std::optional<std::pair<std::size_t, std::size_t>> shrink_interval(coord_t lo, coord_t hi,
                                                                       Exact1DStats* st = nullptr) const {
        if (order_.empty() || lo > hi) return std::nullopt;
        std::size_t i = lower_idx(lo, st);           // first x >= lo
        std::size_t j = upper_idx(hi, st);           // first x > hi
        if (i >= j) return std::nullopt;
        return std::make_pair(i, j - 1);
    }

    // Can points[i..j] be covered by at most ell intervals of length len?
    bool decider(std::size_t i, std::size_t j, int ell, coord_t len, Exact1DStats* st = nullptr) const {
        std::uint64_t before = st ? st->probes : 0;
        if (st) ++st->decider_calls;
        int used = 0;
        std::size_t pos = i;
        bool ok = true;
        while (pos <= j) {
            if (++used > ell) {
                ok = false;
                break;
            }
            pos = first_above(pos, j, x(pos) + len, st);
        }
        if (st) st->decider_probes_max = std::max(st->decider_probes_max, st->probes - before);
        return ok;
    }

    coord_t largek_length(std::size_t i, std::size_t j, int k, Exact1DStats* st = nullptr) const {
        if (i >= j) return 0;
        if (k <= 1) return x(j) - x(i);
        // smallest t with points[i..j] coverable by k intervals of length x(t) - x(i)
        std::size_t lo = i, hi = j;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (decider(i, j, k, x(mid) - x(i), st))
                hi = mid;
            else
                lo = mid + 1;
        }
        if (x(lo) == x(i)) return 0;  // zero-length intervals suffice
        // x(lo) - x(i) brackets the optimum from above; when the first interval
        // ends strictly before p_lo the rest is a (k-1)-cover of the suffix
        return std::min(x(lo) - x(i), largek_length(lo, j, k - 1, st));
    }

    coord_t smallk_length(std::size_t i, std::size_t j, int k, Exact1DStats* st = nullptr,
                          bool memoize = false) const {
        std::map<std::tuple<std::size_t, std::size_t, int>, coord_t> memo;
        return smallk_rec(i, j, k, st, memoize ? &memo : nullptr);
    }

    IntervalSolution query(coord_t lo, coord_t hi, int k, Exact1DStats* st = nullptr) const {
        RCQ_REQUIRE(k >= 1, "kcenter_query_1d: k >= 1");
        IntervalSolution sol;
        auto rng = shrink_interval(lo, hi, st);
        if (!rng) return sol;
        auto [i, j] = *rng;
        // O(min(3^k log n, k^2 log^2 n)): pick the cheaper algorithm
        const double log_n = std::log2(double(std::max<std::size_t>(order_.size(), 2)));
        const bool small = std::pow(3.0, k) * log_n < double(k) * double(k) * log_n * log_n;
        sol.algorithm = small ? "small-k" : "large-k";
        sol.length = small ? smallk_rec(i, j, k, st, nullptr) : largek_length(i, j, k, st);
        sol.empty = false;
        build_intervals(i, j, k, sol);
        return sol;
    }

    // Greedy construction of a witness at a known optimal length.
    void build_intervals(std::size_t i, std::size_t j, int k, IntervalSolution& sol) const {
        std::size_t pos = i;
        while (pos <= j) {
            coord_t start = x(pos);
            sol.intervals.emplace_back(start, start + sol.length);
            sol.members.emplace_back();
            while (pos <= j && x(pos) <= start + sol.length) sol.members.back().push_back(order_[pos++]);
        }
        RCQ_INVARIANT(int(sol.intervals.size()) <= k, "witness must use at most k intervals");
    }

private:
    coord_t smallk_rec(std::size_t i, std::size_t j, int k, Exact1DStats* st,
                       std::map<std::tuple<std::size_t, std::size_t, int>, coord_t>* memo) const {
        if (st) ++st->subproblems;
        if (memo) {
            auto it = memo->find({i, j, k});
            if (it != memo->end()) return it->second;
        }
        coord_t res;
        if (k <= 1 || i >= j) {
            res = x(j) - x(i);
        } else {
            const coord_t xi = x(i), span = x(j) - x(i);
            res = std::numeric_limits<coord_t>::max();
            for (int m = 1; m < k; ++m) {
                // split point s_m = xi + m * span / k, handled in exact arithmetic:
                // x <= s_m  <=>  k * (x - xi) <= m * span
                std::size_t left_end = last_at_most_frac(i, j, xi, span, m, k);
                std::size_t right_begin = first_at_least_frac(i, j, xi, span, m, k);
                coord_t left = smallk_rec(i, left_end, m, st, memo);
                coord_t right = smallk_rec(right_begin, j, k - m, st, memo);
                res = std::min(res, std::max(left, right));
            }
        }
        if (memo) (*memo)[{i, j, k}] = res;
        return res;
    }

    // last index in [i, j] with k*(x - xi) <= m*span (nonempty: holds at i)
    std::size_t last_at_most_frac(std::size_t i, std::size_t j, coord_t xi, coord_t span, int m,
                                  int k) const {
        std::size_t lo = i, hi = j;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo + 1) / 2;
            if (coord_t(k) * (x(mid) - xi) <= coord_t(m) * span)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    // first index in [i, j] with k*(x - xi) >= m*span (nonempty: holds at j)
    std::size_t first_at_least_frac(std::size_t i, std::size_t j, coord_t xi, coord_t span, int m,
                                    int k) const {
        std::size_t lo = i, hi = j;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (coord_t(k) * (x(mid) - xi) >= coord_t(m) * span)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    // first index in (pos, j] with x > bound, else j + 1; counted probes
    std::size_t first_above(std::size_t pos, std::size_t j, coord_t bound, Exact1DStats* st) const {
        std::size_t lo = pos, hi = j + 1;
        while (lo < hi) {
            if (st) ++st->probes;
            std::size_t mid = lo + (hi - lo) / 2;
            if (x(mid) > bound)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    std::size_t lower_idx(coord_t v, Exact1DStats* st) const {
        std::size_t lo = 0, hi = order_.size();
        while (lo < hi) {
            if (st) ++st->probes;
            std::size_t mid = lo + (hi - lo) / 2;
            if (x(mid) >= v)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    std::size_t upper_idx(coord_t v, Exact1DStats* st) const {
        std::size_t lo = 0, hi = order_.size();
        while (lo < hi) {
            if (st) ++st->probes;
            std::size_t mid = lo + (hi - lo) / 2;
            if (x(mid) > v)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    const PointSet<1>* ps_;
    std::vector<std::uint32_t> order_;
};

}  // namespace rcq
