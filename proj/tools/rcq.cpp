// rcq: dataset generation, index build, range-clustering queries, benchmarks.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcq/capacitated.hpp"
#include "rcq/exact1d.hpp"
#include "rcq/exact2d.hpp"
#include "rcq/io.hpp"
#include "rcq/single_shot.hpp"

using json = nlohmann::json;
using namespace rcq;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitBudget = 4;

double unit_real(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1p-53; }

// Box-Muller, deterministic across platforms
double unit_normal(std::mt19937_64& rng) {
    double u1 = std::max(unit_real(rng), 1e-300);
    double u2 = unit_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <int D>
RawDataset<D> generate(std::size_t n, const std::string& dist, std::uint64_t seed, int n_clusters) {
    RawDataset<D> out;
    out.rows.reserve(n);
    std::mt19937_64 rng(seed);
    const double span = 1000.0;
    if (dist == "uniform") {
        for (std::size_t i = 0; i < n; ++i) {
            std::array<double, D> r{};
            for (int d = 0; d < D; ++d) r[d] = unit_real(rng) * span;
            out.rows.push_back(r);
        }
    } else if (dist == "clustered") {
        std::vector<std::array<double, D>> centers;
        for (int c = 0; c < n_clusters; ++c) {
            std::array<double, D> r{};
            for (int d = 0; d < D; ++d) r[d] = unit_real(rng) * span;
            centers.push_back(r);
        }
        const double sigma = span / (6.0 * double(n_clusters));
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = centers[i % centers.size()];
            std::array<double, D> r{};
            for (int d = 0; d < D; ++d) r[d] = std::clamp(c[d] + sigma * unit_normal(rng), 0.0, span);
            out.rows.push_back(r);
        }
    } else if (dist == "grid") {
        std::size_t side = std::max<std::size_t>(std::size_t(std::ceil(std::pow(double(n), 1.0 / D))), 1);
        std::array<std::size_t, D> idx{};
        for (std::size_t i = 0; i < n; ++i) {
            std::array<double, D> r{};
            for (int d = 0; d < D; ++d)
                r[d] = span * double(idx[d]) / double(std::max<std::size_t>(side - 1, 1));
            out.rows.push_back(r);
            for (int d = 0; d < D; ++d) {
                if (++idx[d] < side) break;
                idx[d] = 0;
            }
        }
    } else {
        throw CLI::ValidationError("--dist", "must be uniform, clustered, or grid");
    }
    return out;
}

template <int D>
AxisBox<D> parse_box(const std::string& text, const Quantization<D>& q, int universe_bits) {
    // "lo0,lo1,..:hi0,hi1,.." in original coordinates
    auto colon = text.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--box", "must be lo0,..:hi0,..");
    auto parse_tuple = [&](const std::string& s) {
        std::array<double, D> vals{};
        std::stringstream ss(s);
        std::string cell;
        for (int d = 0; d < D; ++d) {
            if (!std::getline(ss, cell, ','))
                throw CLI::ValidationError("--box", "needs " + std::to_string(D) + " values per corner");
            vals[d] = std::stod(cell);
        }
        return vals;
    };
    auto lo = parse_tuple(text.substr(0, colon));
    auto hi = parse_tuple(text.substr(colon + 1));
    AxisBox<D> box;
    const coord_t max_coord = (coord_t(1) << universe_bits) - 1;
    for (int d = 0; d < D; ++d) {
        box.lo[d] = std::clamp<coord_t>(q.quantize_coord(std::min(lo[d], hi[d]), d), 0, max_coord);
        box.hi[d] = std::clamp<coord_t>(q.quantize_coord(std::max(lo[d], hi[d]), d), 0, max_coord);
    }
    return box;
}

template <int D>
json cover_json(const Cover<D>& cov, const Quantization<D>& q) {
    json j;
    switch (cov.kind) {
        case CoverKind::LinfCube: j["kind"] = "linf-cube"; break;
        case CoverKind::L2Ball: j["kind"] = "l2-ball"; break;
        case CoverKind::Interval: j["kind"] = "interval"; break;
        case CoverKind::Polygon: j["kind"] = "polygon"; break;
    }
    if (cov.kind == CoverKind::Polygon) {
        json verts = json::array();
        for (const auto& v : cov.vertices) {
            auto o = q.point_to_original(v);
            verts.push_back(std::vector<double>(o.begin(), o.end()));
        }
        j["vertices"] = verts;
        j["offset"] = q.to_original(cov.offset);
    } else {
        auto o = q.point_to_original(cov.center);
        j["center"] = std::vector<double>(o.begin(), o.end());
        j["radius"] = q.to_original(cov.radius);
    }
    return j;
}

json square_json(const SquareR& sq, const Quantization<2>& q) {
    return json{{"kind", "square"},
                {"x0", sq.x0 / q.scale + q.offset[0]},
                {"y0", sq.y0 / q.scale + q.offset[1]},
                {"edge", q.to_original(sq.edge)}};
}

SingleShotOptions solver_options(bool allow_greedy) {
    SingleShotOptions opt;
    opt.allow_greedy = allow_greedy;
    if (const char* env = std::getenv("RCQ_BUDGET")) {
        opt.enum_limit = std::size_t(std::strtoull(env, nullptr, 10));
        opt.dp_limit = std::min<std::size_t>(opt.dp_limit, opt.enum_limit);
    }
    return opt;
}

CapacitatedBudget capacitated_budget() {
    CapacitatedBudget b;
    if (const char* env = std::getenv("RCQ_BUDGET"))
        b.max_points = std::size_t(std::strtoull(env, nullptr, 10));
    return b;
}

template <int D>
struct EngineCache {
    std::unique_ptr<Exact1D> exact1d;
    std::unique_ptr<Exact2D> exact2d;
};

struct QueryArgs {
    std::string index_path;
    std::string box_text;
    std::string mode = "approx";
    std::string cost = "linf-kcenter";
    int k = 2;
    double eps = 0.1;
    double alpha = 1.2;
    double delta = 0.25;
    bool allow_greedy = false;
    bool covers_only = false;
};

template <int D>
json run_query(const Index<D>& ix, const Quantization<D>& q, const QueryArgs& args,
               EngineCache<D>& cache) {
    AxisBox<D> box = parse_box<D>(args.box_text, q, ix.universe_bits());
    json out;
    out["mode"] = args.mode;
    out["quantization_scale"] = q.scale;
    out["k"] = args.k;

    if (args.mode == "approx") {
        CostModelId mid;
        if (!parse_cost_model(args.cost, mid))
            throw CLI::ValidationError("--cost", "use one of: " + std::string(cost_model_names()));
        QuerySpec<D> spec{box, args.k, args.eps, cost_model<D>(mid)};
        auto res = cluster_query(ix, spec, solver_options(args.allow_greedy), !args.covers_only);
        out["cost_model"] = args.cost;
        out["eps"] = args.eps;
        out["cost"] = q.to_original(res.clustering.cost);
        out["lb"] = q.to_original(res.packing.lb);
        out["packing_size"] = res.packing.packing.size();
        out["nodes_visited"] = res.packing.nodes_visited;
        out["exact_flag"] = res.exact_solver;
        out["method"] = res.method;
        out["sq_count"] = res.sq_count;
        json covers = json::array();
        for (const auto& c : res.clustering.covers) covers.push_back(cover_json<D>(c, q));
        out["covers"] = covers;
        out["clusters"] = res.clustering.clusters;
        return out;
    }
    if (args.mode == "exact1d") {
        if constexpr (D == 1) {
            if (!cache.exact1d) cache.exact1d = std::make_unique<Exact1D>(ix.points());
            Exact1D& engine = *cache.exact1d;
            Exact1DStats st;
            auto sol = engine.query(box.lo[0], box.hi[0], args.k, &st);
            out["cost"] = sol.empty ? 0.0 : q.to_original(double(sol.length));
            out["lb"] = out["cost"];
            out["packing_size"] = 0;
            out["nodes_visited"] = st.probes;
            out["exact_flag"] = true;
            out["algorithm"] = sol.algorithm;
            json covers = json::array();
            for (auto [lo, hi] : sol.intervals)
                covers.push_back(json{{"kind", "interval"},
                                      {"lo", double(lo) / q.scale + q.offset[0]},
                                      {"hi", double(hi) / q.scale + q.offset[0]}});
            out["covers"] = covers;
            out["clusters"] = sol.members;
            return out;
        } else {
            throw CLI::ValidationError("--mode", "exact1d requires a 1-dimensional index");
        }
    }
    if (args.mode == "exact2d") {
        if constexpr (D == 2) {
            if (args.k != 2 && args.k != 3)
                throw CLI::ValidationError("--k", "exact2d supports k = 2 or 3");
            if (!cache.exact2d) cache.exact2d = std::make_unique<Exact2D>(ix.points());
            Exact2D& engine = *cache.exact2d;
            json covers = json::array();
            double size = 0.0;
            std::vector<SquareR> squares;
            if (args.k == 2) {
                auto ans = engine.two_center_query(box);
                size = ans.empty ? 0.0 : ans.size;
                if (!ans.empty) squares.assign(ans.squares.begin(), ans.squares.end());
            } else {
                auto ans = engine.three_center_query(box);
                size = ans.empty ? 0.0 : ans.size;
                if (!ans.empty) squares.assign(ans.squares.begin(), ans.squares.end());
            }
            for (const auto& sq : squares) covers.push_back(square_json(sq, q));
            out["cost"] = q.to_original(size);
            out["lb"] = out["cost"];
            out["packing_size"] = 0;
            out["nodes_visited"] = 0;
            out["exact_flag"] = true;
            out["covers"] = covers;
            auto ids = ix.rindex().range_report(box);
            std::sort(ids.begin(), ids.end());
            std::vector<std::vector<std::uint32_t>> clusters(squares.size());
            for (auto id : ids)
                for (std::size_t s = 0; s < squares.size(); ++s)
                    if (squares[s].contains(ix.points()[id], 1e-9)) {
                        clusters[s].push_back(id);
                        break;
                    }
            out["clusters"] = clusters;
            return out;
        } else {
            throw CLI::ValidationError("--mode", "exact2d requires a 2-dimensional index");
        }
    }
    if (args.mode == "capacitated") {
        if constexpr (D == 2) {
            CapacitatedSpec spec{box, args.k, args.alpha, args.eps, args.delta};
            auto sol = capacitated_cluster_query(ix, spec, capacitated_budget());
            out["eps"] = args.eps;
            out["alpha"] = args.alpha;
            out["delta"] = args.delta;
            out["cost"] = q.to_original(sol.size);
            out["lb"] = q.to_original(sol.lb);
            out["packing_size"] = sol.packing_size;
            out["nodes_visited"] = sol.nodes_visited;
            out["exact_flag"] = false;
            out["sample_size"] = sol.sample.sample.size();
            json covers = json::array();
            for (const auto& sq : sol.squares) covers.push_back(square_json(sq, q));
            out["covers"] = covers;
            out["clusters"] = sol.clusters;
            return out;
        } else {
            throw CLI::ValidationError("--mode", "capacitated requires a 2-dimensional index");
        }
    }
    throw CLI::ValidationError("--mode", "unknown mode " + args.mode);
}

// ---------------------------------------------------------------------------

template <int D>
int do_build(const std::string& in, const std::string& out, int universe_bits, std::uint64_t seed) {
    auto raw = read_csv<D>(in);
    auto [ps, q] = quantize<D>(raw, universe_bits);
    Index<D> ix(std::move(ps), universe_bits, seed);
    write_file(out, serialize_index<D>(ix, q));
    std::cerr << "built index: n=" << ix.points().size() << " d=" << D << " W=" << universe_bits
              << " nodes=" << ix.tree().node_count() << "\n";
    return 0;
}

template <int D>
int do_query(const QueryArgs& args) {
    auto blob = read_file(args.index_path);
    auto [ix, q] = load_index<D>(blob);
    EngineCache<D> cache;
    json out = run_query<D>(*ix, q, args, cache);
    std::cout << out.dump(2) << "\n";
    return 0;
}

template <int D>
int do_bench(const json& workload, const std::string& out_csv, const std::string& plot_path) {
    const std::string dataset = workload.at("dataset").get<std::string>();
    const int universe_bits = workload.value("universe_bits", 24);
    const std::uint64_t seed = workload.value("seed", std::uint64_t(1));
    auto raw = read_csv<D>(dataset);
    auto [ps, q] = quantize<D>(raw, universe_bits);
    Index<D> ix(std::move(ps), universe_bits, seed);
    const std::size_t n = ix.points().size();

    std::ofstream csv(out_csv);
    if (!csv) throw FormatError("cannot open " + out_csv);
    csv << "seq,n,mode,k,eps,query_ns,packing_size,nodes_visited,cost,opt_or_baseline_cost,ratio\n";
    std::vector<std::pair<double, double>> plot_points;  // (seq, ns)
    EngineCache<D> cache;

    std::size_t seq = 0;
    for (const auto& entry : workload.value("queries", json::array())) {
        QueryArgs args;
        args.mode = entry.value("mode", "approx");
        args.k = entry.value("k", 2);
        args.eps = entry.value("eps", 0.1);
        args.cost = entry.value("cost", "linf-kcenter");
        args.alpha = entry.value("alpha", 1.2);
        args.delta = entry.value("delta", 0.25);
        args.covers_only = true;
        args.allow_greedy = true;  // benchmarks measure the query path at any scale
        auto b = entry.at("box");
        std::string box_text;
        for (int d = 0; d < D; ++d) box_text += (d ? "," : "") + std::to_string(b[0][d].get<double>());
        box_text += ":";
        for (int d = 0; d < D; ++d) box_text += (d ? "," : "") + std::to_string(b[1][d].get<double>());
        args.box_text = box_text;

        auto t0 = std::chrono::steady_clock::now();
        json res = run_query<D>(ix, q, args, cache);
        auto ns =
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
                .count();

        // report-then-cluster baseline: fetch all of S_Q, then cluster it
        double baseline_cost = 0.0;
        {
            AxisBox<D> box = parse_box<D>(args.box_text, q, universe_bits);
            auto ids = ix.rindex().range_report(box);
            CostModelId mid = CostModelId::LinfKCenter;
            if (!ids.empty() && args.mode == "approx" && parse_cost_model(args.cost, mid)) {
                auto model = cost_model<D>(mid);
                if (model.center_type() && model.agg == Aggregate::Max) {
                    auto parts = rcq::detail::gonzalez_parts<D>(ix.points(), ids, args.k, model.norm);
                    baseline_cost = q.to_original(model.clustering_cost(ix.points(), parts));
                }
            }
        }
        const double cost = res.value("cost", 0.0);
        csv << seq << ',' << n << ',' << args.mode << ',' << args.k << ',' << args.eps << ',' << ns << ','
            << res.value("packing_size", std::size_t(0)) << ',' << res.value("nodes_visited", std::uint64_t(0))
            << ',' << cost << ',' << baseline_cost << ','
            << (baseline_cost > 0 ? cost / baseline_cost : 0.0) << "\n";
        plot_points.emplace_back(double(seq), double(ns));
        ++seq;
    }
    if (!plot_path.empty()) {
        std::ofstream svg(plot_path);
        svg << "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='360'>\n"
            << "<rect width='640' height='360' fill='white'/>\n";
        double max_ns = 1;
        for (auto& [s, v] : plot_points) max_ns = std::max(max_ns, v);
        for (auto& [s, v] : plot_points) {
            double x = 40 + 560 * s / std::max(double(plot_points.size()) - 1, 1.0);
            double y = 330 - 300 * v / max_ns;
            svg << "<circle cx='" << x << "' cy='" << y << "' r='3' fill='steelblue'/>\n";
        }
        svg << "<text x='20' y='20' font-size='12'>query time (ns), max=" << std::int64_t(max_ns)
            << "</text>\n</svg>\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"range-clustering query engine"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a dataset CSV");
    std::size_t gen_n = 100;
    int gen_d = 2, gen_clusters = 5;
    std::string gen_dist = "uniform", gen_out;
    std::uint64_t gen_seed = 1;
    gen->add_option("--n", gen_n, "number of points")->required();
    gen->add_option("--d", gen_d, "dimension (1-3)")->check(CLI::Range(1, 3));
    gen->add_option("--dist", gen_dist, "uniform | clustered | grid");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--clusters", gen_clusters, "cluster count for clustered mode");
    gen->add_option("--out", gen_out, "output CSV")->required();

    auto* build = app.add_subcommand("build", "build an index from a CSV");
    std::string build_in, build_out;
    int build_bits = 24;
    std::uint64_t build_seed = 1;
    build->add_option("--in", build_in, "input CSV")->required();
    build->add_option("--out", build_out, "output index file")->required();
    build->add_option("--universe-bits", build_bits, "quantized universe bits")->check(CLI::Range(1, 30));
    build->add_option("--seed", build_seed, "ladder sampling seed");

    auto* query = app.add_subcommand("query", "run one range-clustering query");
    QueryArgs qa;
    query->add_option("--index", qa.index_path, "index file")->required();
    query->add_option("--box", qa.box_text, "query box lo0,..:hi0,..")->required();
    query->add_option("--mode", qa.mode, "approx | exact1d | exact2d | capacitated");
    query->add_option("--k", qa.k, "number of clusters");
    query->add_option("--eps", qa.eps, "approximation parameter");
    query->add_option("--alpha", qa.alpha, "capacity factor (capacitated)");
    query->add_option("--delta", qa.delta, "capacity violation parameter (capacitated)");
    query->add_option("--cost", qa.cost, cost_model_names());
    query->add_flag("--allow-greedy", qa.allow_greedy, "permit the 2-approx fallback (voids 1+eps)");
    query->add_flag("--covers-only", qa.covers_only, "skip cluster membership reporting");

    auto* bench = app.add_subcommand("bench", "run a workload and emit CSV");
    std::string bench_workload, bench_out = "bench.csv", bench_plot;
    bench->add_option("--workload", bench_workload, "workload JSON")->required();
    bench->add_option("--out", bench_out, "output CSV");
    bench->add_option("--plot", bench_plot, "optional SVG chart path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            if (gen_d == 1) write_csv<1>(gen_out, generate<1>(gen_n, gen_dist, gen_seed, gen_clusters));
            if (gen_d == 2) write_csv<2>(gen_out, generate<2>(gen_n, gen_dist, gen_seed, gen_clusters));
            if (gen_d == 3) write_csv<3>(gen_out, generate<3>(gen_n, gen_dist, gen_seed, gen_clusters));
            return 0;
        }
        if (*build) {
            int d = csv_dimension(build_in);
            if (d == 1) return do_build<1>(build_in, build_out, build_bits, build_seed);
            if (d == 2) return do_build<2>(build_in, build_out, build_bits, build_seed);
            if (d == 3) return do_build<3>(build_in, build_out, build_bits, build_seed);
            throw FormatError("unsupported dimension " + std::to_string(d));
        }
        if (*query) {
            auto blob = read_file(qa.index_path);
            if (blob.size() < 16 || std::memcmp(blob.data(), kIndexMagic, 4) != 0)
                throw FormatError("bad index magic");
            std::uint32_t d = 0;
            std::memcpy(&d, blob.data() + 12, 4);
            if (d == 1) return do_query<1>(qa);
            if (d == 2) return do_query<2>(qa);
            if (d == 3) return do_query<3>(qa);
            throw FormatError("unsupported index dimension");
        }
        if (*bench) {
            json wl = json::parse(read_file(bench_workload));
            int d = csv_dimension(wl.at("dataset").get<std::string>());
            if (d == 1) return do_bench<1>(wl, bench_out, bench_plot);
            if (d == 2) return do_bench<2>(wl, bench_out, bench_plot);
            if (d == 3) return do_bench<3>(wl, bench_out, bench_plot);
            throw FormatError("unsupported dimension");
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BudgetError& e) {
        std::cout << json{{"error", {{"type", "budget"}, {"message", e.what()}}}}.dump(2) << "\n";
        return kExitBudget;
    } catch (const InfeasibleError& e) {
        std::cout << json{{"error", {{"type", "infeasible"}, {"message", e.what()}}}}.dump(2) << "\n";
        return kExitBudget;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
