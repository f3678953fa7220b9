#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "rcq/index.hpp"

namespace rcq {

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

template <int D>
struct RawDataset {
    std::vector<std::array<double, D>> rows;
};

// Affine map into the quantized universe: quant = round((orig - offset) * scale).
template <int D>
struct Quantization {
    double scale = 1.0;
    std::array<double, D> offset{};

    double to_original(double quant_value) const { return quant_value / scale; }  // lengths
    std::array<double, D> point_to_original(const RealVec<D>& q) const {
        std::array<double, D> out{};
        for (int d = 0; d < D; ++d) out[d] = q[d] / scale + offset[d];
        return out;
    }
    coord_t quantize_coord(double v, int dim) const {
        return coord_t(std::llround((v - offset[dim]) * scale));
    }
};

// ---------------------------------------------------------------------------
// CSV: header `id,x0,..,x{d-1}`, one row per point, ids dense 0..n-1.

inline int csv_dimension(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::string header;
    std::getline(in, header);
    int commas = int(std::count(header.begin(), header.end(), ','));
    if (header.rfind("id,", 0) != 0 || commas < 1) throw FormatError("bad CSV header in " + path);
    return commas;
}

template <int D>
inline RawDataset<D> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    RawDataset<D> out;
    std::size_t expect = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        if (std::stoull(cell) != expect) throw FormatError("ids must be dense 0..n-1 in " + path);
        std::array<double, D> row{};
        for (int d = 0; d < D; ++d) {
            if (!std::getline(ss, cell, ',')) throw FormatError("short row in " + path);
            row[d] = std::stod(cell);
            if (!std::isfinite(row[d])) throw FormatError("non-finite coordinate in " + path);
        }
        out.rows.push_back(row);
        ++expect;
    }
    return out;
}

template <int D>
inline void write_csv(const std::string& path, const RawDataset<D>& data) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << "id";
    for (int d = 0; d < D; ++d) out << ",x" << d;
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        out << i;
        for (int d = 0; d < D; ++d) {
            std::snprintf(buf, sizeof buf, "%.10g", data.rows[i][d]);
            out << ',' << buf;
        }
        out << "\n";
    }
}

template <int D>
inline std::pair<PointSet<D>, Quantization<D>> quantize(const RawDataset<D>& data, int universe_bits) {
    RCQ_REQUIRE(!data.rows.empty(), "quantize: empty dataset");
    RCQ_REQUIRE(universe_bits >= 1 && universe_bits <= kMaxUniverseBits, "quantize: bad universe_bits");
    Quantization<D> q;
    double extent = 0.0;
    for (int d = 0; d < D; ++d) {
        double lo = data.rows[0][d], hi = lo;
        for (const auto& r : data.rows) {
            lo = std::min(lo, r[d]);
            hi = std::max(hi, r[d]);
        }
        q.offset[d] = lo;
        extent = std::max(extent, hi - lo);
    }
    const double limit = double((coord_t(1) << universe_bits) - 1);
    q.scale = extent > 0 ? limit / extent : 1.0;
    PointSet<D> ps;
    ps.pts.reserve(data.rows.size());
    const coord_t max_coord = (coord_t(1) << universe_bits) - 1;
    for (const auto& r : data.rows) {
        Coords<D> c{};
        for (int d = 0; d < D; ++d) {
            c[d] = q.quantize_coord(r[d], d);
            if (c[d] < 0 || c[d] > max_coord) throw FormatError("coordinate overflow after quantization");
        }
        ps.pts.push_back(c);
    }
    return {std::move(ps), q};
}

// ---------------------------------------------------------------------------
// Index blob: magic "RCQ1", version, W, d, n, quantization, points, octree
// nodes in preorder, ladder levels. Bit-exact round trips within one build.

namespace detail {

struct Writer {
    std::string buf;
    void u8(std::uint8_t v) { buf.push_back(char(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    std::uint8_t u8() {
        if (pos + 1 > buf.size()) throw FormatError("truncated index blob");
        return std::uint8_t(buf[pos++]);
    }
    std::uint32_t u32() {
        if (pos + 4 > buf.size()) throw FormatError("truncated index blob");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[pos++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        if (pos + 8 > buf.size()) throw FormatError("truncated index blob");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf[pos++])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

template <int D>
inline void write_preorder(const CompressedOctree<D>& t, std::uint32_t v, Writer& w) {
    const auto& n = t.node(v);
    w.u8(std::uint8_t(n.cube.level));
    w.u8(n.n_children);
    w.u32(n.representative);
    w.u32(n.subtree_count);
    for (auto c : t.children(v)) write_preorder(t, c, w);
}

template <int D>
inline void check_preorder(const CompressedOctree<D>& t, std::uint32_t v, Reader& r) {
    const auto& n = t.node(v);
    if (r.u8() != std::uint8_t(n.cube.level) || r.u8() != n.n_children ||
        r.u32() != n.representative || r.u32() != n.subtree_count)
        throw FormatError("index blob octree mismatch");
    for (auto c : t.children(v)) check_preorder(t, c, r);
}

}  // namespace detail

inline constexpr char kIndexMagic[4] = {'R', 'C', 'Q', '1'};
inline constexpr std::uint32_t kIndexVersion = 1;

template <int D>
inline std::string serialize_index(const Index<D>& ix, const Quantization<D>& q) {
    detail::Writer w;
    w.buf.append(kIndexMagic, 4);
    w.u32(kIndexVersion);
    w.u32(std::uint32_t(ix.universe_bits()));
    w.u32(std::uint32_t(D));
    w.u64(ix.points().size());
    w.f64(q.scale);
    for (int d = 0; d < D; ++d) w.f64(q.offset[d]);
    for (const auto& p : ix.points().pts)
        for (int d = 0; d < D; ++d) w.u32(std::uint32_t(p[d]));
    w.u64(ix.tree().node_count());
    detail::write_preorder<D>(ix.tree(), ix.tree().root(), w);
    w.u64(ix.ladder().seed());
    w.u32(std::uint32_t(ix.ladder().top_level()));
    for (int i = 1; i <= ix.ladder().top_level(); ++i) {
        const auto& lv = ix.ladder().level(i);
        w.u8(lv.full ? 1 : 0);
        if (!lv.full) {
            w.u64(lv.ids.size());
            for (auto id : lv.ids) w.u32(id);
        }
    }
    return std::move(w.buf);
}

template <int D>
inline std::pair<std::unique_ptr<Index<D>>, Quantization<D>> load_index(const std::string& blob) {
    detail::Reader r{blob};
    if (blob.size() < 4 || std::memcmp(blob.data(), kIndexMagic, 4) != 0)
        throw FormatError("bad index magic");
    r.pos = 4;
    if (r.u32() != kIndexVersion) throw FormatError("unsupported index version");
    const int w_bits = int(r.u32());
    if (r.u32() != std::uint32_t(D)) throw FormatError("index dimension mismatch");
    const std::uint64_t n = r.u64();
    Quantization<D> q;
    q.scale = r.f64();
    for (int d = 0; d < D; ++d) q.offset[d] = r.f64();
    PointSet<D> ps;
    ps.pts.resize(n);
    for (std::uint64_t i = 0; i < n; ++i)
        for (int d = 0; d < D; ++d) ps.pts[i][d] = coord_t(r.u32());
    const std::uint64_t nodes = r.u64();
    detail::Reader octree_at = r;
    // skip the stored node array, then validate it against the rebuild
    r.pos += nodes * 10;
    if (r.pos > blob.size()) throw FormatError("truncated index blob");
    const std::uint64_t seed = [&]() mutable {
        detail::Reader tail = r;
        return tail.u64();
    }();
    auto ix = std::make_unique<Index<D>>(std::move(ps), w_bits, seed);
    if (ix->tree().node_count() != nodes) throw FormatError("index blob octree mismatch");
    detail::check_preorder<D>(ix->tree(), ix->tree().root(), octree_at);
    r.u64();  // seed, already consumed
    const int top = int(r.u32());
    if (top != ix->ladder().top_level()) throw FormatError("index blob ladder mismatch");
    for (int i = 1; i <= top; ++i) {
        const auto& lv = ix->ladder().level(i);
        bool full = r.u8() != 0;
        if (full != lv.full) throw FormatError("index blob ladder mismatch");
        if (!full) {
            std::uint64_t m = r.u64();
            if (m != lv.ids.size()) throw FormatError("index blob ladder mismatch");
            for (std::uint64_t j = 0; j < m; ++j)
                if (r.u32() != lv.ids[j]) throw FormatError("index blob ladder mismatch");
        }
    }
    return {std::move(ix), q};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.write(data.data(), std::streamsize(data.size()));
}

}  // namespace rcq
