#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rcq/io.hpp"
#include "rcq/single_shot.hpp"

using namespace rcq;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path outfile = fs::temp_directory_path() / ("rcq_cli_out_" + std::to_string(counter++) + ".txt");
    std::string cmd = std::string(RCQ_CLI_PATH) + " " + args + " > " + outfile.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream in(outfile);
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    fs::remove(outfile);
    return RunResult{WEXITSTATUS(rc), out};
}

fs::path tmp_path(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST(Csv, RoundTrip) {
    RawDataset<2> data;
    data.rows = {{0.5, 1.25}, {100.0, -3.5}, {42.0, 42.0}};
    auto p = tmp_path("rcq_csv_rt.csv");
    write_csv<2>(p.string(), data);
    EXPECT_EQ(csv_dimension(p.string()), 2);
    auto back = read_csv<2>(p.string());
    ASSERT_EQ(back.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        for (int d = 0; d < 2; ++d) EXPECT_DOUBLE_EQ(back.rows[i][d], data.rows[i][d]);
}

TEST(Quantize, MapsIntoUniverse) {
    RawDataset<2> data;
    data.rows = {{-5.0, 10.0}, {5.0, 20.0}, {0.0, 15.0}};
    auto [ps, q] = quantize<2>(data, 10);
    const coord_t limit = (1 << 10) - 1;
    for (auto& p : ps.pts)
        for (int d = 0; d < 2; ++d) {
            EXPECT_GE(p[d], 0);
            EXPECT_LE(p[d], limit);
        }
    // isotropic: the widest dimension spans the full universe
    EXPECT_EQ(ps.pts[0][0], 0);
    EXPECT_EQ(ps.pts[1][0], limit);
    // distances scale uniformly
    double orig = std::hypot(data.rows[0][0] - data.rows[1][0], data.rows[0][1] - data.rows[1][1]);
    double quant = lp_distance<2>(ps.pts[0], ps.pts[1], Norm::L2);
    EXPECT_NEAR(quant / q.scale, orig, 2.0 / q.scale + 1e-9);
}

TEST(IndexBlob, RoundTripIdempotent) {
    RawDataset<2> data;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i)
        data.rows.push_back({double(rng() % 10000) / 7.0, double(rng() % 10000) / 7.0});
    auto [ps, q] = quantize<2>(data, 16);
    Index<2> ix(std::move(ps), 16, 99);
    auto blob = serialize_index<2>(ix, q);
    auto [loaded, q2] = load_index<2>(blob);
    EXPECT_EQ(loaded->tree().node_count(), ix.tree().node_count());
    EXPECT_EQ(loaded->points().size(), ix.points().size());
    EXPECT_DOUBLE_EQ(q2.scale, q.scale);
    auto blob2 = serialize_index<2>(*loaded, q2);
    EXPECT_EQ(blob, blob2);  // byte-identical round trip
}

TEST(IndexBlob, CorruptMagicRejected) {
    RawDataset<1> data;
    data.rows = {{1.0}, {2.0}, {3.0}};
    auto [ps, q] = quantize<1>(data, 8);
    Index<1> ix(std::move(ps), 8, 1);
    auto blob = serialize_index<1>(ix, q);
    blob[0] = 'X';
    EXPECT_THROW(load_index<1>(blob), FormatError);
    auto truncated = serialize_index<1>(ix, q).substr(0, 20);
    EXPECT_THROW(load_index<1>(truncated), FormatError);
}

TEST(IndexBlob, GoldenTinyFile) {
    RawDataset<2> data;
    data.rows = {{0.0, 0.0}, {3.0, 1.0}, {1.0, 3.0}};
    auto [ps, q] = quantize<2>(data, 4);
    Index<2> ix(std::move(ps), 4, 7);
    auto blob = serialize_index<2>(ix, q);
    std::string hex;
    for (unsigned char c : blob) {
        char b[3];
        std::snprintf(b, sizeof b, "%02x", c);
        hex += b;
    }
    const std::string expected =
        "52435131010000000400000002000000030000000000000000000000000014400000000000000000"
        "00000000000000000000000000000000"
        "0f00000005000000050000000f000000"
        "0400000000000000"
        "0403000000000300000000000000000001000000000002000000010000000000010000000100"
        "00000700000000000000020000000101";
    EXPECT_EQ(hex, expected);
}

// ---------------------------------------------------------------------------
// CLI subprocess tests

TEST(Cli, GenDeterministicAndSchema) {
    auto a = tmp_path("rcq_gen_a.csv"), b = tmp_path("rcq_gen_b.csv");
    ASSERT_EQ(run_cli("gen --n 50 --d 2 --dist uniform --seed 9 --out " + a.string()).exit_code, 0);
    ASSERT_EQ(run_cli("gen --n 50 --d 2 --dist uniform --seed 9 --out " + b.string()).exit_code, 0);
    EXPECT_EQ(read_file(a.string()), read_file(b.string()));  // byte-identical
    std::ifstream in(a.string());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "id,x0,x1");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 50u);
}

TEST(Cli, GenGridCount) {
    auto p = tmp_path("rcq_gen_grid.csv");
    ASSERT_EQ(run_cli("gen --n 4 --d 2 --dist grid --seed 1 --out " + p.string()).exit_code, 0);
    auto data = read_csv<2>(p.string());
    EXPECT_EQ(data.rows.size(), 4u);
}

TEST(Cli, ClusteredModeShowsClusters) {
    auto p = tmp_path("rcq_gen_cl.csv");
    ASSERT_EQ(
        run_cli("gen --n 300 --d 2 --dist clustered --clusters 4 --seed 3 --out " + p.string()).exit_code,
        0);
    auto data = read_csv<2>(p.string());
    auto [ps, q] = quantize<2>(data, 16);
    std::vector<std::uint32_t> ids(ps.size());
    std::iota(ids.begin(), ids.end(), 0u);
    // silhouette-style sanity: within-cluster scatter of a 4-clustering is a
    // small fraction of the total scatter
    auto parts4 = rcq::detail::gonzalez_parts<2>(ps, ids, 4, Norm::L2);
    for (int lloyd = 0; lloyd < 3; ++lloyd) {
        std::vector<RealVec<2>> means(parts4.size(), RealVec<2>{});
        for (std::size_t c = 0; c < parts4.size(); ++c) {
            for (auto id : parts4[c])
                for (int d = 0; d < 2; ++d) means[c][d] += double(ps[id][d]);
            for (int d = 0; d < 2; ++d) means[c][d] /= std::max<std::size_t>(parts4[c].size(), 1);
        }
        std::vector<std::vector<std::uint32_t>> next(parts4.size());
        for (auto id : ids) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < means.size(); ++c) {
                double v = l2_dist_real<2>(means[c], ps[id]);
                if (v < bd) {
                    bd = v;
                    best = c;
                }
            }
            next[best].push_back(id);
        }
        parts4 = std::move(next);
    }
    RealVec<2> grand{};
    for (auto id : ids)
        for (int d = 0; d < 2; ++d) grand[d] += double(ps[id][d]);
    for (int d = 0; d < 2; ++d) grand[d] /= double(ids.size());
    double total_ss = 0, within_ss = 0;
    for (auto id : ids) total_ss += std::pow(l2_dist_real<2>(grand, ps[id]), 2);
    for (auto& part : parts4) {
        if (part.empty()) continue;
        RealVec<2> mean{};
        for (auto id : part)
            for (int d = 0; d < 2; ++d) mean[d] += double(ps[id][d]);
        for (int d = 0; d < 2; ++d) mean[d] /= double(part.size());
        for (auto id : part) within_ss += std::pow(l2_dist_real<2>(mean, ps[id]), 2);
    }
    EXPECT_LT(within_ss, 0.2 * total_ss);
}

TEST(Cli, BuildQueryRoundTrip) {
    auto csv = tmp_path("rcq_e2e.csv"), idx = tmp_path("rcq_e2e.idx");
    ASSERT_EQ(run_cli("gen --n 150 --d 2 --dist uniform --seed 4 --out " + csv.string()).exit_code, 0);
    ASSERT_EQ(
        run_cli("build --in " + csv.string() + " --out " + idx.string() + " --universe-bits 18").exit_code,
        0);
    auto res = run_cli("query --index " + idx.string() +
                       " --box 100,100:900,900 --mode approx --k 2 --eps 0.25 --cost linf-kcenter");
    ASSERT_EQ(res.exit_code, 0) << res.out;
    for (const char* field : {"\"mode\"", "\"cost\"", "\"lb\"", "\"covers\"", "\"clusters\"",
                              "\"packing_size\"", "\"nodes_visited\"", "\"quantization_scale\"",
                              "\"exact_flag\""})
        EXPECT_NE(res.out.find(field), std::string::npos) << field;
}

TEST(Cli, EmptyBoxAndLargeK) {
    auto csv = tmp_path("rcq_e2e2.csv"), idx = tmp_path("rcq_e2e2.idx");
    ASSERT_EQ(run_cli("gen --n 40 --d 2 --dist uniform --seed 5 --out " + csv.string()).exit_code, 0);
    ASSERT_EQ(run_cli("build --in " + csv.string() + " --out " + idx.string()).exit_code, 0);
    auto res = run_cli("query --index " + idx.string() + " --box 1,1:2,2 --mode approx --k 2 --eps 0.1");
    ASSERT_EQ(res.exit_code, 0);
    EXPECT_NE(res.out.find("\"cost\": 0.0"), std::string::npos);
    auto res2 = run_cli("query --index " + idx.string() + " --box 0,0:1000,1000 --mode approx --k 50 --eps 0.1");
    ASSERT_EQ(res2.exit_code, 0);
    EXPECT_NE(res2.out.find("\"cost\": 0.0"), std::string::npos);
}

TEST(Cli, CornerSquareSandwich) {
    // four corners of a 10x10 square: 2-center cost must land in [5, 5.5]
    auto csv = tmp_path("rcq_corners.csv"), idx = tmp_path("rcq_corners.idx");
    RawDataset<2> data;
    data.rows = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}, {10.0, 10.0}};
    write_csv<2>(csv.string(), data);
    ASSERT_EQ(run_cli("build --in " + csv.string() + " --out " + idx.string()).exit_code, 0);
    auto res = run_cli("query --index " + idx.string() +
                       " --box -1,-1:11,11 --mode approx --k 2 --eps 0.1 --cost linf-kcenter");
    ASSERT_EQ(res.exit_code, 0) << res.out;
    auto pos = res.out.find("\"cost\":");
    ASSERT_NE(pos, std::string::npos);
    double cost = std::stod(res.out.substr(pos + 8));
    EXPECT_GE(cost, 5.0 - 1e-6);
    EXPECT_LE(cost, 5.5 + 1e-6);
}

TEST(Cli, ExitCodes) {
    // usage error: bad flag value
    EXPECT_EQ(run_cli("gen --n 10 --d 9 --out /tmp/x.csv").exit_code, 2);
    // format error: corrupt index magic
    auto bad = tmp_path("rcq_bad.idx");
    write_file(bad.string(), "NOTANIDX________________");
    EXPECT_EQ(run_cli("query --index " + bad.string() + " --box 0,0:1,1").exit_code, 3);
    // budget error: too many points for the exact L2 solver at k <= 3
    auto csv = tmp_path("rcq_budget.csv"), idx = tmp_path("rcq_budget.idx");
    ASSERT_EQ(run_cli("gen --n 600 --d 2 --dist uniform --seed 6 --out " + csv.string()).exit_code, 0);
    ASSERT_EQ(run_cli("build --in " + csv.string() + " --out " + idx.string()).exit_code, 0);
    auto res = run_cli("query --index " + idx.string() +
                       " --box 0,0:1000,1000 --mode approx --k 2 --eps 0.01 --cost l2-kcenter");
    EXPECT_EQ(res.exit_code, 4);
    EXPECT_NE(res.out.find("\"error\""), std::string::npos);
    EXPECT_NE(res.out.find("budget"), std::string::npos);
}

TEST(Cli, Exact1dMode) {
    auto csv = tmp_path("rcq_1d.csv"), idx = tmp_path("rcq_1d.idx");
    ASSERT_EQ(run_cli("gen --n 100 --d 1 --dist uniform --seed 8 --out " + csv.string()).exit_code, 0);
    ASSERT_EQ(run_cli("build --in " + csv.string() + " --out " + idx.string()).exit_code, 0);
    auto res = run_cli("query --index " + idx.string() + " --box 100:900 --mode exact1d --k 3");
    ASSERT_EQ(res.exit_code, 0) << res.out;
    EXPECT_NE(res.out.find("\"algorithm\""), std::string::npos);
}

TEST(Cli, BenchSchemaAndEmptyWorkload) {
    auto csv = tmp_path("rcq_bench.csv"), wl = tmp_path("rcq_wl.json"), out = tmp_path("rcq_bench_out.csv");
    ASSERT_EQ(run_cli("gen --n 200 --d 2 --dist uniform --seed 10 --out " + csv.string()).exit_code, 0);
    write_file(wl.string(), std::string("{\"dataset\": \"") + csv.string() +
                                "\", \"universe_bits\": 18, \"queries\": ["
                                "{\"box\": [[100,100],[900,900]], \"k\": 2, \"eps\": 0.2, "
                                "\"cost\": \"linf-kcenter\", \"mode\": \"approx\"}]}");
    auto plot = tmp_path("rcq_bench.svg");
    ASSERT_EQ(run_cli("bench --workload " + wl.string() + " --out " + out.string() + " --plot " +
                      plot.string())
                  .exit_code,
              0);
    auto text = read_file(out.string());
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "seq,n,mode,k,eps,query_ns,packing_size,nodes_visited,cost,opt_or_baseline_cost,ratio");
    EXPECT_NE(read_file(plot.string()).find("<svg"), std::string::npos);

    // empty workload: header-only CSV
    auto wl2 = tmp_path("rcq_wl_empty.json");
    write_file(wl2.string(),
               std::string("{\"dataset\": \"") + csv.string() + "\", \"queries\": []}");
    ASSERT_EQ(run_cli("bench --workload " + wl2.string() + " --out " + out.string()).exit_code, 0);
    auto text2 = read_file(out.string());
    EXPECT_EQ(std::count(text2.begin(), text2.end(), '\n'), 1);
}

TEST(Cli, BuildIsIdempotentOnNodeCounts) {
    auto csv = tmp_path("rcq_idem.csv"), idx1 = tmp_path("rcq_idem1.idx"), idx2 = tmp_path("rcq_idem2.idx");
    ASSERT_EQ(run_cli("gen --n 120 --d 2 --dist clustered --seed 12 --out " + csv.string()).exit_code, 0);
    ASSERT_EQ(run_cli("build --in " + csv.string() + " --out " + idx1.string()).exit_code, 0);
    ASSERT_EQ(run_cli("build --in " + csv.string() + " --out " + idx2.string()).exit_code, 0);
    EXPECT_EQ(read_file(idx1.string()), read_file(idx2.string()));
}
