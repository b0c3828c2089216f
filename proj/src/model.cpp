#include "plandscape/model.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "plandscape/errors.hpp"
#include "plandscape/rng.hpp"

namespace plandscape {

Graph::Graph(std::size_t n) : n_(n), stride_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

void Graph::set_edge(Vertex u, Vertex v, bool present) {
    if (u >= n_ || v >= n_) throw ParameterError("set_edge: vertex out of range");
    if (u == v) throw ParameterError("set_edge: self loops are not allowed");
    const std::uint64_t bu = std::uint64_t{1} << (u & 63);
    const std::uint64_t bv = std::uint64_t{1} << (v & 63);
    if (present) {
        bits_[u * stride_ + (v >> 6)] |= bv;
        bits_[v * stride_ + (u >> 6)] |= bu;
    } else {
        bits_[u * stride_ + (v >> 6)] &= ~bv;
        bits_[v * stride_ + (u >> 6)] &= ~bu;
    }
}

std::size_t Graph::degree(Vertex v) const noexcept {
    std::size_t d = 0;
    for (auto w : row(v)) d += static_cast<std::size_t>(std::popcount(w));
    return d;
}

std::size_t Graph::degree_into(Vertex v, const VertexMask& mask) const noexcept {
    const auto r = row(v);
    const auto m = mask.words();
    std::size_t d = 0;
    for (std::size_t i = 0; i < stride_; ++i) d += static_cast<std::size_t>(std::popcount(r[i] & m[i]));
    return d;
}

std::size_t Graph::edge_count() const noexcept {
    std::size_t twice = 0;
    for (auto w : bits_) twice += static_cast<std::size_t>(std::popcount(w));
    return twice / 2;
}

VertexSubset::VertexSubset(std::vector<Vertex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
        throw ParameterError("VertexSubset: duplicate vertex");
}

bool VertexSubset::contains(Vertex v) const noexcept {
    return std::binary_search(members_.begin(), members_.end(), v);
}

VertexMask VertexSubset::mask(std::size_t n) const {
    VertexMask m(n);
    for (auto v : members_) {
        if (v >= n) throw ParameterError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")");
        m.set(v);
    }
    return m;
}

void ModelParams::validate() const {
    if (!(1 <= k && k <= kbar && kbar <= n))
        throw ParameterError("model parameters must satisfy 1 <= k <= kbar <= n (got n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ", kbar=" + std::to_string(kbar) + ")");
}

PlantedGraph::PlantedGraph(Graph graph, VertexSubset planted, std::uint64_t seed)
    : graph_(std::move(graph)), planted_(std::move(planted)), seed_(seed) {
    planted_mask_ = planted_.mask(graph_.order());
    const auto& p = planted_.members();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (!graph_.has_edge(p[i], p[j])) throw ParameterError("planted set is not a clique");
}

PlantedGraph PlantedGraph::with_edge(Vertex u, Vertex v) const {
    Graph g = graph_;
    g.set_edge(u, v);
    return PlantedGraph(std::move(g), planted_, seed_);
}

namespace {

void fill_half_edges(Graph& g, Rng& rng) {
    const std::size_t n = g.order();
    std::uint64_t word = 0;
    int left = 0;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = i + 1; j < n; ++j) {
            if (left == 0) {
                word = rng.next();
                left = 64;
            }
            if (word & 1U) g.set_edge(i, j);
            word >>= 1;
            --left;
        }
    }
}

}  // namespace

PlantedGraph sample_planted(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (n == 0) throw ParameterError("sample_planted: n must be positive");
    if (k < 1 || k > n) throw ParameterError("sample_planted: need 1 <= k <= n");
    Rng rng(seed);
    std::vector<Vertex> perm(n);
    std::iota(perm.begin(), perm.end(), Vertex{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.below(n - i);
        std::swap(perm[i], perm[j]);
    }
    VertexSubset planted(std::vector<Vertex>(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)));

    Graph g(n);
    fill_half_edges(g, rng);
    const auto& p = planted.members();
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = a + 1; b < p.size(); ++b) g.set_edge(p[a], p[b]);
    return PlantedGraph(std::move(g), std::move(planted), seed);
}

Graph sample_gnp_half(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Graph g(n);
    fill_half_edges(g, rng);
    return g;
}

std::size_t edge_count(const Graph& g, const VertexSubset& s) {
    const VertexMask m = s.mask(g.order());
    std::size_t twice = 0;
    for (auto v : s) twice += g.degree_into(v, m);
    return twice / 2;
}

std::size_t edge_count(const PlantedGraph& g, const VertexSubset& s) { return edge_count(g.graph(), s); }

std::size_t overlap(const PlantedGraph& g, const VertexSubset& s) {
    std::size_t c = 0;
    for (auto v : s) {
        if (v >= g.n()) throw ParameterError("overlap: vertex out of range");
        c += g.is_planted(v) ? 1 : 0;
    }
    return c;
}

// ---- text format ----

namespace {

constexpr char kHex[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::size_t row_digits(std::size_t i) { return std::max<std::size_t>(1, (i + 3) / 4); }

}  // namespace

void write_graph(std::ostream& out, const PlantedGraph& g) {
    out << "pcg v1 " << g.n() << ' ' << g.k() << ' ' << g.seed() << '\n';
    bool first = true;
    for (auto v : g.planted()) {
        if (!first) out << ' ';
        out << v;
        first = false;
    }
    out << '\n';
    std::string line;
    for (Vertex i = 0; i < g.n(); ++i) {
        const std::size_t digits = row_digits(i);
        line.assign(digits, '0');
        for (Vertex j = 0; j < i; ++j) {
            if (!g.graph().has_edge(i, j)) continue;
            const std::size_t nibble = j / 4;
            char& c = line[digits - 1 - nibble];
            c = kHex[hex_value(c) | (1 << (j % 4))];
        }
        out << line << '\n';
    }
}

std::string to_graph_text(const PlantedGraph& g) {
    std::ostringstream os;
    write_graph(os, g);
    return os.str();
}

PlantedGraph read_graph(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParameterError("graph file: missing header");
    std::istringstream header(line);
    std::string magic, version;
    std::size_t n = 0, k = 0;
    std::uint64_t seed = 0;
    if (!(header >> magic >> version >> n >> k >> seed) || magic != "pcg" || version != "v1")
        throw ParameterError("graph file: bad header '" + line + "'");
    if (!std::getline(in, line)) throw ParameterError("graph file: missing planted line");
    std::istringstream pl(line);
    std::vector<Vertex> planted;
    for (Vertex v; pl >> v;) planted.push_back(v);
    if (planted.size() != k) throw ParameterError("graph file: planted line has wrong size");

    Graph g(n);
    for (Vertex i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ParameterError("graph file: truncated at row " + std::to_string(i));
        const std::size_t digits = row_digits(i);
        if (line.size() != digits) throw ParameterError("graph file: row " + std::to_string(i) + " has wrong width");
        for (std::size_t d = 0; d < digits; ++d) {
            const int val = hex_value(line[digits - 1 - d]);
            if (val < 0) throw ParameterError("graph file: bad hex digit in row " + std::to_string(i));
            for (int b = 0; b < 4; ++b) {
                if (!((val >> b) & 1)) continue;
                const std::size_t j = d * 4 + static_cast<std::size_t>(b);
                if (j >= i) throw ParameterError("graph file: bit above the diagonal in row " + std::to_string(i));
                g.set_edge(i, static_cast<Vertex>(j));
            }
        }
    }
    return PlantedGraph(std::move(g), VertexSubset(std::move(planted)), seed);
}

}  // namespace plandscape
