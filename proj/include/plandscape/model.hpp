#pragma once

// Planted clique instances G(n, k, 1/2) and the subset primitives every other
// module builds on. Adjacency is stored as packed bit rows so edge counts of a
// subset reduce to popcounts of row & mask.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace plandscape {

using Vertex = std::uint32_t;

/// Bit set over [0, n), word-aligned with Graph rows.
class VertexMask {
public:
    VertexMask() = default;
    explicit VertexMask(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    std::size_t universe() const noexcept { return n_; }
    bool test(Vertex v) const noexcept { return (words_[v >> 6] >> (v & 63)) & 1U; }
    void set(Vertex v) noexcept { words_[v >> 6] |= (std::uint64_t{1} << (v & 63)); }
    void reset(Vertex v) noexcept { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Simple undirected graph on [0, n) with symmetric packed adjacency rows and
/// an empty diagonal.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n);

    std::size_t order() const noexcept { return n_; }
    std::size_t words_per_row() const noexcept { return stride_; }

    bool has_edge(Vertex u, Vertex v) const noexcept {
        return (bits_[u * stride_ + (v >> 6)] >> (v & 63)) & 1U;
    }
    /// Sets or clears {u, v}; u == v is rejected.
    void set_edge(Vertex u, Vertex v, bool present = true);

    std::span<const std::uint64_t> row(Vertex v) const noexcept {
        return {bits_.data() + v * stride_, stride_};
    }

    std::size_t degree(Vertex v) const noexcept;
    /// |N(v) ∩ mask|.
    std::size_t degree_into(Vertex v, const VertexMask& mask) const noexcept;
    std::size_t edge_count() const noexcept;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Strictly increasing vertex list. Construction canonicalizes input order;
/// duplicates are a ParameterError. Range is checked against a graph at use.
class VertexSubset {
public:
    VertexSubset() = default;
    explicit VertexSubset(std::vector<Vertex> members);
    VertexSubset(std::initializer_list<Vertex> members)
        : VertexSubset(std::vector<Vertex>(members)) {}

    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    const std::vector<Vertex>& members() const noexcept { return members_; }
    bool contains(Vertex v) const noexcept;
    VertexMask mask(std::size_t n) const;

    auto begin() const noexcept { return members_.begin(); }
    auto end() const noexcept { return members_.end(); }

    friend bool operator==(const VertexSubset&, const VertexSubset&) = default;
    friend auto operator<=>(const VertexSubset&, const VertexSubset&) = default;

private:
    std::vector<Vertex> members_;
};

/// (n, k, kbar) with 1 <= k <= kbar <= n.
struct ModelParams {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t kbar = 0;

    void validate() const;
    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// G(n, k, 1/2) realization. Immutable once built; the constructor enforces
/// the planted clique invariant.
class PlantedGraph {
public:
    PlantedGraph(Graph graph, VertexSubset planted, std::uint64_t seed);

    std::size_t n() const noexcept { return graph_.order(); }
    std::size_t k() const noexcept { return planted_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    const Graph& graph() const noexcept { return graph_; }
    const VertexSubset& planted() const noexcept { return planted_; }
    const VertexMask& planted_mask() const noexcept { return planted_mask_; }
    bool is_planted(Vertex v) const noexcept { return planted_mask_.test(v); }

    /// Copy with {u, v} added.
    PlantedGraph with_edge(Vertex u, Vertex v) const;

    friend bool operator==(const PlantedGraph& a, const PlantedGraph& b) {
        return a.seed_ == b.seed_ && a.planted_ == b.planted_ && a.graph_ == b.graph_;
    }

private:
    Graph graph_;
    VertexSubset planted_;
    VertexMask planted_mask_;
    std::uint64_t seed_ = 0;
};

/// Planted set: seeded partial Fisher-Yates over [0, n). Edges: one random
/// bit per pair (i < j) in row-major order, then the clique is forced.
PlantedGraph sample_planted(std::size_t n, std::size_t k, std::uint64_t seed);

/// G(n, 1/2) without a planted structure (drawn with the same bit stream).
Graph sample_gnp_half(std::size_t n, std::uint64_t seed);

std::size_t edge_count(const Graph& g, const VertexSubset& s);
std::size_t edge_count(const PlantedGraph& g, const VertexSubset& s);
/// |s ∩ planted|.
std::size_t overlap(const PlantedGraph& g, const VertexSubset& s);

/// Text format:
///   line 1: `pcg v1 <n> <k> <seed>`
///   line 2: planted vertices, space separated
///   then n lines, line i holding the lower-triangular row of vertex i as the
///   big-endian hex of sum_{j<i} A[i][j] 2^j, zero-padded to max(1, ceil(i/4))
///   digits. Reading then writing reproduces the input bytes.
void write_graph(std::ostream& out, const PlantedGraph& g);
PlantedGraph read_graph(std::istream& in);
std::string to_graph_text(const PlantedGraph& g);

}  // namespace plandscape
