#include <gtest/gtest.h>

#include <random>

#include "rcq/geometry.hpp"

using namespace rcq;

namespace {

PointSet<2> make_points(std::initializer_list<Coords<2>> pts) {
    PointSet<2> ps;
    ps.pts.assign(pts.begin(), pts.end());
    return ps;
}

std::vector<std::uint32_t> all_ids(const auto& ps) {
    std::vector<std::uint32_t> ids(ps.size());
    std::iota(ids.begin(), ids.end(), 0u);
    return ids;
}

}  // namespace

TEST(LpDistance, KnownValues) {
    Coords<2> a{0, 0}, b{3, 4}, c{1, 1};
    EXPECT_DOUBLE_EQ(lp_distance<2>(a, b, Norm::L2), 5.0);       // 3-4-5 triangle
    EXPECT_DOUBLE_EQ(lp_distance<2>(a, b, Norm::Linf), 4.0);     // max component
    EXPECT_DOUBLE_EQ(lp_distance<2>(c, c, Norm::L1), 0.0);       // identity
    EXPECT_DOUBLE_EQ(lp_distance<2>(a, b, Norm::L1), 7.0);
    EXPECT_DOUBLE_EQ(lp_distance<2>(b, a, Norm::L2), lp_distance<2>(a, b, Norm::L2));
}

TEST(EnclosingRadius, LinfIsHalfMaxExtent) {
    auto ps = make_points({{0, 0}, {4, 2}});
    auto ids = all_ids(ps);
    auto b = enclosing_radius<2>(ps, ids, Norm::Linf);
    EXPECT_DOUBLE_EQ(b.radius, 2.0);
    EXPECT_DOUBLE_EQ(b.center[0], 2.0);
    EXPECT_DOUBLE_EQ(b.center[1], 1.0);
}

TEST(EnclosingRadius, TwoPointDiameter) {
    auto ps = make_points({{0, 0}, {2, 0}});
    auto ids = all_ids(ps);
    auto b = enclosing_radius<2>(ps, ids, Norm::L2);
    EXPECT_NEAR(b.radius, 1.0, 1e-12);
    EXPECT_NEAR(b.center[0], 1.0, 1e-12);
    EXPECT_NEAR(b.center[1], 0.0, 1e-12);
}

TEST(EnclosingRadius, ObtuseTriangleUsesDiametralPair) {
    // brute-force oracle: the minimal ball of {(0,0),(2,0),(1,1)} is the
    // diametral ball of (0,0)-(2,0), checked against a grid search
    auto ps = make_points({{0, 0}, {2, 0}, {1, 1}});
    auto ids = all_ids(ps);
    auto b = enclosing_radius<2>(ps, ids, Norm::L2);
    double best = std::numeric_limits<double>::infinity();
    for (double cx = -1; cx <= 3; cx += 1.0 / 64)
        for (double cy = -1; cy <= 3; cy += 1.0 / 64) {
            double worst = 0;
            for (auto id : ids)
                worst = std::max(worst, std::hypot(cx - double(ps[id][0]), cy - double(ps[id][1])));
            best = std::min(best, worst);
        }
    EXPECT_NEAR(b.radius, 1.0, 1e-9);
    EXPECT_LE(std::fabs(b.radius - best), 1e-2);  // grid resolution
    EXPECT_NEAR(b.center[0], 1.0, 1e-9);
    EXPECT_NEAR(b.center[1], 0.0, 1e-9);
}

TEST(EnclosingRadius, RandomBallProperties) {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 200; ++it) {
        PointSet<2> ps;
        std::uniform_int_distribution<coord_t> coord(0, 1000);
        int n = 1 + int(rng() % 24);
        for (int i = 0; i < n; ++i) ps.pts.push_back({coord(rng), coord(rng)});
        auto ids = all_ids(ps);
        auto ball = enclosing_ball_l2<2>(ps, ids);
        double diam = euclidean_diameter<2>(ps, ids);
        EXPECT_GE(ball.radius + 1e-9, diam / 2.0);
        for (auto id : ids)
            EXPECT_LE(l2_dist_real<2>(ball.center, ps[id]), ball.radius + 1e-9 * std::max(1.0, ball.radius));
        // minimality within 1e-6 against all 2- and 3-point candidate balls
        double cand_best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i; j < ids.size(); ++j)
                for (std::size_t k = j; k < ids.size(); ++k) {
                    std::vector<Coords<2>> sup{ps[ids[i]]};
                    if (j != i) sup.push_back(ps[ids[j]]);
                    if (k != j && k != i) sup.push_back(ps[ids[k]]);
                    auto b = detail::ball_of_support<2>(std::span<const Coords<2>>(sup));
                    bool ok = true;
                    for (auto id : ids)
                        ok = ok && l2_dist_real<2>(b.center, ps[id]) <= b.radius + 1e-9 * std::max(1.0, b.radius);
                    if (ok) cand_best = std::min(cand_best, b.radius);
                }
        EXPECT_NEAR(ball.radius, cand_best, 1e-6 * std::max(1.0, cand_best));
    }
}

TEST(EnclosingRadius, EmptySubsetThrows) {
    auto ps = make_points({{0, 0}});
    std::vector<std::uint32_t> none;
    EXPECT_THROW(enclosing_radius<2>(ps, none, Norm::L2), std::invalid_argument);
}

TEST(Diameter, MatchesDefinition) {
    auto single = make_points({{0, 0}});
    auto ids1 = all_ids(single);
    EXPECT_DOUBLE_EQ(euclidean_diameter<2>(single, ids1), 0.0);

    auto two = make_points({{0, 0}, {3, 4}});
    auto ids2 = all_ids(two);
    EXPECT_DOUBLE_EQ(euclidean_diameter<2>(two, ids2), 5.0);

    std::mt19937_64 rng(11);
    PointSet<2> ps;
    for (int i = 0; i < 10; ++i) ps.pts.push_back({coord_t(rng() % 512), coord_t(rng() % 512)});
    auto ids = all_ids(ps);
    double best = 0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = i + 1; j < 10; ++j)
            best = std::max(best, lp_distance<2>(ps[i], ps[j], Norm::L2));
    EXPECT_DOUBLE_EQ(euclidean_diameter<2>(ps, ids), best);
}

TEST(CanonicalCube, SmallestCubeExamples) {
    // cells of G_1 separate (1,1) and (2,2): level 2 anchored at the origin
    auto c = smallest_canonical_cube<2>({1, 1}, {2, 2});
    EXPECT_EQ(c.level, 2);
    EXPECT_EQ(c.anchor[0], 0);
    EXPECT_EQ(c.anchor[1], 0);

    auto unit = smallest_canonical_cube<2>({0, 0}, {0, 0});
    EXPECT_EQ(unit.level, 0);
    EXPECT_EQ(unit.anchor[0], 0);

    constexpr int W = 8;
    auto full = smallest_canonical_cube<1>({0}, {(coord_t(1) << W) - 1});
    EXPECT_EQ(full.level, W);
    EXPECT_EQ(full.anchor[0], 0);
}

TEST(CanonicalCube, HalfOpenCellsPartition) {
    // every point lies in exactly one cell of each grid level (W = 4)
    for (int level = 0; level <= 4; ++level) {
        for (coord_t x = 0; x < 16; ++x)
            for (coord_t y = 0; y < 16; ++y) {
                int holders = 0;
                for (coord_t ax = 0; ax < 16; ax += coord_t(1) << level)
                    for (coord_t ay = 0; ay < 16; ay += coord_t(1) << level) {
                        CanonicalCube<2> cell{level, {ax, ay}};
                        holders += cell.contains({x, y});
                    }
                EXPECT_EQ(holders, 1);
            }
    }
}

TEST(CanonicalCube, SmallestCubeIsMinimal) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 500; ++it) {
        Coords<2> p{coord_t(rng() % 256), coord_t(rng() % 256)};
        Coords<2> q{coord_t(rng() % 256), coord_t(rng() % 256)};
        auto c = smallest_canonical_cube<2>(p, q);
        EXPECT_TRUE(c.contains(p));
        EXPECT_TRUE(c.contains(q));
        if (!(p == q)) {
            // linear scan over levels: one level lower no longer contains both
            int s = c.level - 1;
            CanonicalCube<2> lower{s, {(p[0] >> s) << s, (p[1] >> s) << s}};
            EXPECT_TRUE(lower.contains(p));
            EXPECT_FALSE(lower.contains(q));
        } else {
            EXPECT_EQ(c.level, 0);
        }
    }
}

TEST(HullPerimeter, DegenerateAndSquare) {
    auto seg = make_points({{0, 0}, {3, 4}});
    EXPECT_DOUBLE_EQ(hull_perimeter(seg, all_ids(seg)), 10.0);  // closed walk along a segment

    auto square = make_points({{0, 0}, {10, 0}, {10, 10}, {0, 10}, {5, 5}});
    EXPECT_DOUBLE_EQ(hull_perimeter(square, all_ids(square)), 40.0);

    auto one = make_points({{7, 7}});
    EXPECT_DOUBLE_EQ(hull_perimeter(one, all_ids(one)), 0.0);
}

TEST(Cover, ContainsByKind) {
    Cover<2> cube;
    cube.kind = CoverKind::LinfCube;
    cube.center = {5, 5};
    cube.radius = 2;
    EXPECT_TRUE(cube.contains({7, 3}, 1e-9));
    EXPECT_FALSE(cube.contains({8, 5}, 1e-9));

    Cover<2> poly;
    poly.kind = CoverKind::Polygon;
    poly.vertices = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    poly.offset = 1.0;
    EXPECT_TRUE(poly.contains({5, 5}, 1e-9));
    EXPECT_TRUE(poly.contains({11, 5}, 1e-9));
    EXPECT_FALSE(poly.contains({12, 5}, 1e-9));
}
