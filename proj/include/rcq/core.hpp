#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcq {

// Quantized coordinates live in [0, 2^W) with W <= kMaxUniverseBits.
using coord_t = std::int64_t;
constexpr int kMaxUniverseBits = 30;

template <int D>
using Coords = std::array<coord_t, D>;

template <int D>
using RealVec = std::array<double, D>;

enum class Norm { L1, L2, Linf };

// Thrown when an instance exceeds a configured enumeration budget.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a capacitated instance admits no feasible assignment.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

#define RCQ_REQUIRE(cond, msg)                         \
    do {                                               \
        if (!(cond)) throw std::invalid_argument(msg); \
    } while (0)

#define RCQ_INVARIANT(cond, msg)                    \
    do {                                            \
        if (!(cond)) throw std::logic_error(msg);   \
    } while (0)

// Points are id-indexed: id of pts[i] is i.
template <int D>
struct PointSet {
    std::vector<Coords<D>> pts;

    std::size_t size() const { return pts.size(); }
    bool empty() const { return pts.empty(); }
    const Coords<D>& operator[](std::size_t i) const { return pts[i]; }
};

template <int D>
struct AxisBox {
    Coords<D> lo{};
    Coords<D> hi{};  // closed box [lo, hi]

    bool contains(const Coords<D>& p) const {
        for (int d = 0; d < D; ++d)
            if (p[d] < lo[d] || p[d] > hi[d]) return false;
        return true;
    }
    bool contains_box(const AxisBox& b) const {
        for (int d = 0; d < D; ++d)
            if (b.lo[d] < lo[d] || b.hi[d] > hi[d]) return false;
        return true;
    }
    bool valid() const {
        for (int d = 0; d < D; ++d)
            if (lo[d] > hi[d]) return false;
        return true;
    }
    // Intersection may be invalid (empty); callers check valid().
    AxisBox intersect(const AxisBox& b) const {
        AxisBox r;
        for (int d = 0; d < D; ++d) {
            r.lo[d] = std::max(lo[d], b.lo[d]);
            r.hi[d] = std::min(hi[d], b.hi[d]);
        }
        return r;
    }
    bool operator==(const AxisBox& b) const { return lo == b.lo && hi == b.hi; }
};

template <int D>
AxisBox<D> universe_box(int universe_bits) {
    AxisBox<D> b;
    for (int d = 0; d < D; ++d) {
        b.lo[d] = 0;
        b.hi[d] = (coord_t(1) << universe_bits) - 1;
    }
    return b;
}

inline coord_t iabs(coord_t v) { return v < 0 ? -v : v; }

inline int bit_width64(std::uint64_t x) {
    int w = 0;
    while (x) {
        ++w;
        x >>= 1;
    }
    return w;
}

}  // namespace rcq
