#pragma once

#include "sawrec/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sawrec {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;  // first < second

/// Undirected simple graph on vertices 0..n-1. Immutable after construction.
class Graph {
public:
    Graph() = default;
    /// Edges may come in any order and orientation; self-loops and duplicates throw.
    Graph(std::size_t n, std::vector<Edge> edges);

    std::size_t n() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
    std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
    std::size_t max_degree() const noexcept;
    bool has_edge(Vertex u, Vertex v) const;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n() == b.n() && a.edges_ == b.edges_;
    }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
};

/// Planted labels in {-1, +1}.
class CommunityVector {
public:
    CommunityVector() = default;
    explicit CommunityVector(std::vector<int> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    Vector as_vector() const;

    friend bool operator==(const CommunityVector&, const CommunityVector&) = default;

private:
    std::vector<int> labels_;
};

struct SbmParams {
    std::size_t n = 0;
    double d = 0.0;
    double epsilon = 1.0;
    std::uint64_t seed = 0;

    double p_same() const { return (1.0 + epsilon / 2.0) * d / static_cast<double>(n); }
    double p_cross() const { return (1.0 - epsilon / 2.0) * d / static_cast<double>(n); }
    /// Throws std::invalid_argument when an edge probability leaves [0, 1].
    void validate() const;
};

/// Truncation threshold, either from the asymptotic closed form or given directly.
struct TruncationParams {
    enum class Mode { PaperFormula, Explicit };

    Mode mode = Mode::Explicit;
    double a = 0.0;       // PaperFormula only
    unsigned s = 0;       // PaperFormula only
    std::uint64_t resolved_delta = 1;
    double tau = 0.0;     // PaperFormula only

    /// ceil(max{128 e^4 d^4, 40 A s d, 2 log(2As) + 12 A tau s^2 log 2 + 8 A^2 tau^2 s^2 log^2(6/eps)}),
    /// tau = A s log(6/eps).
    static TruncationParams paper_formula(double a, unsigned s, double d, double epsilon);
    static TruncationParams explicit_delta(std::uint64_t delta);
    /// ceil(10 d).
    static TruncationParams desk_default(double d);
};

struct SbmSample {
    CommunityVector x;
    Graph graph;
};

SbmSample sample_sbm(const SbmParams& params);
/// G(n, d/n) with labels drawn independently of the edges.
SbmSample sample_erdos_renyi(std::size_t n, double d, std::uint64_t seed);
CommunityVector sample_labels(std::size_t n, std::uint64_t seed);

/// Y_ab = 1 - d/n on edges, -d/n on non-edges, 0 on the diagonal.
DenseSymMatrix centered_adjacency(const Graph& g, double d);

/// Drops every edge incident to a vertex whose degree in `g` exceeds delta.
Graph truncate(const Graph& g, std::uint64_t delta);
inline Graph truncate(const Graph& g, const TruncationParams& t) { return truncate(g, t.resolved_delta); }

std::size_t edit_distance(const Graph& a, const Graph& b);

/// "n m" then m lines "u v" with u < v in ascending order.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);
/// One "+1" / "-1" per line.
void write_communities(std::ostream& os, const CommunityVector& x);
CommunityVector read_communities(std::istream& is);

}  // namespace sawrec
