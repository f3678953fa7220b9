#include <gtest/gtest.h>

#include <random>

#include "rcq/approx_cluster.hpp"
#include "rcq/capacitated.hpp"
#include "rcq/oracle.hpp"

using namespace rcq;

namespace {

PointSet<2> random_points(std::size_t n, coord_t limit, std::uint64_t seed) {
    PointSet<2> ps;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<coord_t> coord(0, limit - 1);
    for (std::size_t i = 0; i < n; ++i) ps.pts.push_back({coord(rng), coord(rng)});
    return ps;
}

std::vector<std::uint32_t> all_ids(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0u);
    return v;
}

constexpr std::array<CostModelId, 5> kAllModels{CostModelId::LinfKCenter, CostModelId::L2KCenter,
                                                CostModelId::SumRadii, CostModelId::RssRadii,
                                                CostModelId::PerimeterSum};

}  // namespace

TEST(CostModel, RegistryConstants) {
    auto linf = cost_model<2>(CostModelId::LinfKCenter);
    EXPECT_DOUBLE_EQ(linf.c, 1.0 / (2.0 * std::sqrt(2.0)));
    EXPECT_DOUBLE_EQ(linf.f(7), 1.0);
    auto l2 = cost_model<2>(CostModelId::L2KCenter);
    EXPECT_DOUBLE_EQ(l2.c, 0.5);
    EXPECT_DOUBLE_EQ(l2.f(7), 1.0);
    auto sum = cost_model<2>(CostModelId::SumRadii);
    EXPECT_DOUBLE_EQ(sum.f(7), 7.0);
    auto rss = cost_model<2>(CostModelId::RssRadii);
    EXPECT_DOUBLE_EQ(rss.c, 1.0 / (2.0 * std::sqrt(2.0)));
    EXPECT_DOUBLE_EQ(rss.f(4), 2.0);
    auto per = cost_model<2>(CostModelId::PerimeterSum);
    EXPECT_DOUBLE_EQ(per.c, 2.0);
    EXPECT_DOUBLE_EQ(per.f(3), 6.0 * std::numbers::pi);
    // 3D constants follow the dimension
    auto linf3 = cost_model<3>(CostModelId::LinfKCenter);
    EXPECT_DOUBLE_EQ(linf3.c, 1.0 / (2.0 * std::sqrt(3.0)));
}

TEST(CostModel, DiameterSensitivity) {
    // aggregate >= c * max cluster diameter, for random clusterings
    std::mt19937_64 rng(5);
    for (auto mid : kAllModels) {
        auto model = cost_model<2>(mid);
        for (int it = 0; it < 40; ++it) {
            auto ps = random_points(20, 400, 1000 + it);
            std::vector<std::vector<std::uint32_t>> parts(1 + rng() % 4);
            for (std::uint32_t i = 0; i < 20; ++i) parts[rng() % parts.size()].push_back(i);
            parts.erase(std::remove_if(parts.begin(), parts.end(), [](auto& p) { return p.empty(); }),
                        parts.end());
            double cost = model.clustering_cost(ps, parts);
            double max_diam = 0;
            for (auto& p : parts) max_diam = std::max(max_diam, euclidean_diameter<2>(ps, p));
            EXPECT_GE(cost + 1e-9, model.c * max_diam) << model.name;
        }
    }
}

TEST(CostModel, AdditiveExpansionRule) {
    auto model = cost_model<2>(CostModelId::LinfKCenter);
    Cover<2> cover;
    cover.kind = CoverKind::LinfCube;
    cover.center = {10, 10};
    cover.radius = 2.0;
    EXPECT_DOUBLE_EQ(model.expand_cover(cover, 0.5).radius, 2.5);
    auto per = cost_model<2>(CostModelId::PerimeterSum);
    Cover<2> hull;
    hull.kind = CoverKind::Polygon;
    hull.vertices = {{0, 0}, {4, 0}, {4, 4}};
    EXPECT_DOUBLE_EQ(per.expand_cover(hull, 0.5).offset, 0.5);
}

TEST(CostModel, SingletonCostZero) {
    PointSet<2> ps;
    ps.pts.push_back({17, 23});
    std::vector<std::uint32_t> one{0};
    for (auto mid : kAllModels) EXPECT_DOUBLE_EQ(cost_model<2>(mid).cluster_cost(ps, one), 0.0);
}

TEST(SingleShot, SingletonsWhenKCoversAll) {
    auto ps = random_points(4, 100, 1);
    auto model = cost_model<2>(CostModelId::LinfKCenter);
    auto res = single_shot_solve<2>(ps, all_ids(4), 7, model);
    EXPECT_DOUBLE_EQ(res.clustering.cost, 0.0);
    EXPECT_EQ(res.clustering.member_count(), 4u);
}

TEST(SingleShot, SquareCornersLinf) {
    PointSet<2> ps;
    ps.pts = {{0, 0}, {10, 0}, {0, 10}, {10, 10}};
    auto model = cost_model<2>(CostModelId::LinfKCenter);
    auto res = single_shot_solve<2>(ps, all_ids(4), 2, model);
    EXPECT_DOUBLE_EQ(res.clustering.cost, 5.0);
    auto dp = oracle::brute_kcenter<2>(ps, all_ids(4), 2, model);
    EXPECT_DOUBLE_EQ(dp.opt, 5.0);
}

TEST(SingleShot, DpMatchesOracleAllModels) {
    for (int it = 0; it < 25; ++it) {
        auto ps = random_points(12, 256, 40 + it);
        auto ids = all_ids(12);
        for (auto mid : kAllModels) {
            auto model = cost_model<2>(mid);
            auto res = single_shot_solve<2>(ps, ids, 3, model);
            auto ref = oracle::brute_kcenter<2>(ps, ids, 3, model);
            EXPECT_NEAR(res.clustering.cost, ref.opt, 1e-9 * std::max(1.0, ref.opt)) << model.name;
            EXPECT_EQ(res.clustering.member_count(), ids.size());
        }
    }
}

TEST(SingleShot, AnchoredLinfMatchesOracleMedium) {
    for (int it = 0; it < 10; ++it) {
        auto ps = random_points(60, 1 << 10, 70 + it);
        auto ids = all_ids(60);
        auto model = cost_model<2>(CostModelId::LinfKCenter);
        for (int k : {2, 3}) {
            auto res = single_shot_solve<2>(ps, ids, k, model);
            EXPECT_STREQ(res.method, "linf-anchored");
            double ref = oracle::brute_linf_kcenter_radius<2>(ps, ids, k);
            EXPECT_NEAR(res.clustering.cost, ref, 1e-9);
        }
    }
}

TEST(SingleShot, L2BranchBoundMatchesOracles) {
    for (int it = 0; it < 8; ++it) {
        auto ps = random_points(40, 1 << 10, 90 + it);
        auto ids = all_ids(40);
        auto model = cost_model<2>(CostModelId::L2KCenter);
        auto res2 = single_shot_solve<2>(ps, ids, 2, model);
        EXPECT_STREQ(res2.method, "l2-bb");
        double ref2 = oracle::brute_l2_twocenter_radius<2>(ps, ids);
        EXPECT_NEAR(res2.clustering.cost, ref2, 1e-7 * std::max(1.0, ref2));
    }
    // k = 3 against the subset recursion on small instances
    for (int it = 0; it < 10; ++it) {
        auto ps = random_points(14, 512, 200 + it);
        auto ids = all_ids(14);
        auto model = cost_model<2>(CostModelId::L2KCenter);
        detail::L2BranchBound<2> bb(ps, ids, 3, 1'000'000);
        auto parts = bb.solve();
        auto ref = oracle::brute_kcenter<2>(ps, ids, 3, model);
        EXPECT_NEAR(model.clustering_cost(ps, parts), ref.opt, 1e-7 * std::max(1.0, ref.opt));
    }
}

TEST(SingleShot, BudgetErrorsAndGreedy) {
    auto ps = random_points(60, 1 << 10, 3);
    auto ids = all_ids(60);
    auto sum = cost_model<2>(CostModelId::SumRadii);
    EXPECT_THROW(single_shot_solve<2>(ps, ids, 3, sum), BudgetError);  // beyond DP, no route
    auto linf = cost_model<2>(CostModelId::LinfKCenter);
    EXPECT_THROW(single_shot_solve<2>(ps, ids, 5, linf), BudgetError);  // k > 3, no fallback
    SingleShotOptions opt;
    opt.allow_greedy = true;
    auto res = single_shot_solve<2>(ps, ids, 5, linf, opt);
    EXPECT_FALSE(res.exact);
    EXPECT_STREQ(res.method, "gonzalez");
    double ref = res.clustering.cost;
    EXPECT_GT(ref, 0.0);
}

// ---------------------------------------------------------------------------

class ApproxQuery : public ::testing::Test {
protected:
    static AxisBox<2> whole() { return universe_box<2>(12); }
};

TEST_F(ApproxQuery, GridLowerBoundAndPacking) {
    // 8x8 unit grid scaled: LB <= Opt and the packing verifies
    PointSet<2> ps;
    for (coord_t x = 0; x < 8; ++x)
        for (coord_t y = 0; y < 8; ++y) ps.pts.push_back({x * 16, y * 16});
    Index<2> ix(std::move(ps), 12, 1);
    QuerySpec<2> spec{whole(), 2, 0.5, cost_model<2>(CostModelId::LinfKCenter)};
    auto pk = lower_bound_and_packing(ix, spec);
    auto ids = all_ids(ix.points().size());
    auto opt = oracle::brute_linf_kcenter_radius<2>(ix.points(), ids, 2);
    EXPECT_LE(pk.lb, opt + 1e-9);
    EXPECT_GT(pk.lb, 0.0);
    EXPECT_TRUE(oracle::verify_weak_packing<2>(ix.points(), ids, pk.packing, pk.r));
}

TEST_F(ApproxQuery, FourPointsExactMode) {
    PointSet<2> ps;
    ps.pts = {{0, 0}, {100, 3}, {7, 200}, {150, 150}};
    Index<2> ix(std::move(ps), 12, 1);
    QuerySpec<2> spec{whole(), 2, 0.5, cost_model<2>(CostModelId::LinfKCenter)};
    auto pk = lower_bound_and_packing(ix, spec);
    EXPECT_TRUE(pk.exact);
    EXPECT_DOUBLE_EQ(pk.r, 0.0);
    std::vector<std::uint32_t> sorted = pk.packing;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, all_ids(4));  // R = S_Q
}

TEST_F(ApproxQuery, PackingSizeBound) {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 10; ++it) {
        auto ps = random_points(400, 1 << 12, 600 + it);
        Index<2> ix(std::move(ps), 12, 1);
        int k = 2 + int(rng() % 2);
        double eps = it % 2 ? 0.25 : 0.1;
        for (auto mid : {CostModelId::LinfKCenter, CostModelId::SumRadii}) {
            QuerySpec<2> spec{whole(), k, eps, cost_model<2>(mid)};
            auto pk = lower_bound_and_packing(ix, spec);
            const auto& m = spec.model;
            double per_cube = std::ceil(2.0 * std::sqrt(2.0) * m.f(k) / (m.c * eps));
            double bound = (double(k) * 16.0 + 4.0) * per_cube * per_cube;
            EXPECT_LE(double(pk.packing.size()), bound);
            auto ids = all_ids(ix.points().size());
            EXPECT_TRUE(oracle::verify_weak_packing<2>(ix.points(), ids, pk.packing, pk.r));
            // locality: work counters bounded by threshold + refinement
            double node_bound = 5.0 * (double(k) * 16.0 + 4.0) * (1.0 + 2.0 * per_cube * per_cube);
            EXPECT_LE(double(pk.nodes_visited), node_bound);
        }
    }
}

TEST_F(ApproxQuery, CornersSandwich) {
    PointSet<2> ps;
    ps.pts = {{0, 0}, {1000, 0}, {0, 1000}, {1000, 1000}};
    Index<2> ix(std::move(ps), 12, 1);
    QuerySpec<2> spec{whole(), 2, 0.1, cost_model<2>(CostModelId::LinfKCenter)};
    auto res = cluster_query(ix, spec);
    EXPECT_GE(res.clustering.cost, 500.0 - 1e-9);
    EXPECT_LE(res.clustering.cost, 550.0 + 1e-9);
}

TEST_F(ApproxQuery, TrivialCounts) {
    auto ps = random_points(50, 1 << 12, 77);
    Index<2> ix(std::move(ps), 12, 1);
    QuerySpec<2> spec{AxisBox<2>{{0, 0}, {0, 0}}, 2, 0.1, cost_model<2>(CostModelId::LinfKCenter)};
    auto res = cluster_query(ix, spec);  // likely empty box
    EXPECT_LE(res.sq_count, 1u);
    EXPECT_DOUBLE_EQ(res.clustering.cost, 0.0);

    QuerySpec<2> all{whole(), 60, 0.1, cost_model<2>(CostModelId::LinfKCenter)};
    auto res2 = cluster_query(ix, all);  // k >= |S_Q|
    EXPECT_DOUBLE_EQ(res2.clustering.cost, 0.0);
    EXPECT_EQ(res2.clustering.member_count(), 50u);
}

TEST_F(ApproxQuery, ExpandProperties) {
    auto ps = random_points(200, 1 << 12, 123);
    auto model = cost_model<2>(CostModelId::SumRadii);
    auto ids = all_ids(200);
    // cluster a packing-like subsample, then expand by r
    std::vector<std::uint32_t> sub;
    for (std::uint32_t i = 0; i < 200; i += 13) sub.push_back(i);
    auto solved = single_shot_solve<2>(ps, sub, 3, model);
    double r = 0;
    for (auto id : ids) {
        double best = std::numeric_limits<double>::infinity();
        for (auto q : sub) best = std::min(best, lp_distance<2>(ps[id], ps[q], Norm::L2));
        r = std::max(r, best);
    }
    auto grown = expand_clustering<2>(ps, solved.clustering, r, model, ids);
    EXPECT_EQ(grown.member_count(), ids.size());
    EXPECT_LE(grown.cost, solved.clustering.cost + r * model.f(3) + 1e-9);
    // r = 0 keeps the clustering's cost and covers
    auto same = expand_clustering<2>(ps, solved.clustering, 0.0, model, sub);
    EXPECT_NEAR(same.cost, solved.clustering.cost, 1e-9);
}

TEST_F(ApproxQuery, RandomSandwichAllModels) {
    std::mt19937_64 rng(999);
    int checked = 0;
    for (int it = 0; it < 60; ++it) {
        auto ps = random_points(300, 1 << 12, 4000 + it);
        Index<2> ix(std::move(ps), 12, 1);
        double eps = (it % 2) ? 0.25 : 0.05;
        CostModelId mid = kAllModels[it % 5];
        auto model = cost_model<2>(mid);
        const bool center_enum = mid == CostModelId::LinfKCenter || mid == CostModelId::L2KCenter;
        int k = center_enum ? 2 + int(rng() % 2) : 3;
        if (mid == CostModelId::L2KCenter && k == 3) k = 2;
        // query boxes sized to keep the oracle exact
        std::size_t budget = center_enum ? (mid == CostModelId::L2KCenter ? 60 : 300) : 13;
        AxisBox<2> box{};
        std::size_t count = 0;
        for (int tries = 0; tries < 200; ++tries) {
            coord_t cx = coord_t(rng() % (1 << 12)), cy = coord_t(rng() % (1 << 12));
            coord_t half = coord_t(1) << (4 + rng() % 7);
            box = AxisBox<2>{{std::max<coord_t>(0, cx - half), std::max<coord_t>(0, cy - half)},
                             {std::min<coord_t>((1 << 12) - 1, cx + half),
                              std::min<coord_t>((1 << 12) - 1, cy + half)}};
            count = ix.rindex().range_count(box);
            if (count > std::size_t(k) + 1 && count <= budget) break;
            count = 0;
        }
        if (count == 0) continue;
        QuerySpec<2> spec{box, k, eps, model};
        auto res = cluster_query(ix, spec);
        ASSERT_TRUE(res.exact_solver);
        auto sq = ix.rindex().range_report(box);
        auto ref = oracle::brute_kcenter<2>(ix.points(), sq, k, model);
        EXPECT_GE(res.clustering.cost, ref.opt * (1 - 1e-9)) << model.name;
        EXPECT_LE(res.clustering.cost, (1 + eps) * ref.opt * (1 + 1e-9)) << model.name;
        EXPECT_LE(res.packing.lb, ref.opt + 1e-9) << model.name;
        ++checked;
    }
    EXPECT_GE(checked, 40);
}

TEST_F(ApproxQuery, CoversOnlyModeStillSandwiched) {
    auto ps = random_points(300, 1 << 12, 555);
    Index<2> ix(std::move(ps), 12, 1);
    AxisBox<2> box{{100, 100}, {2100, 2100}};
    auto sq = ix.rindex().range_count(box);
    ASSERT_GT(sq, 3u);
    QuerySpec<2> spec{box, 2, 0.25, cost_model<2>(CostModelId::LinfKCenter)};
    auto with = cluster_query(ix, spec, {}, true);
    auto without = cluster_query(ix, spec, {}, false);
    EXPECT_FALSE(without.members);
    auto ids = ix.rindex().range_report(box);
    auto ref = oracle::brute_kcenter<2>(ix.points(), ids, 2, spec.model);
    for (double cost : {with.clustering.cost, without.clustering.cost}) {
        EXPECT_GE(cost, ref.opt * (1 - 1e-9));
        EXPECT_LE(cost, 1.25 * ref.opt * (1 + 1e-9));
    }
}
