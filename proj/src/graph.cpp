#include "sawrec/graph.hpp"

#include "sawrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sawrec {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : edges_(std::move(edges)), adjacency_(n) {
    for (auto& [u, v] : edges_) {
        if (u == v) throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(u));
        if (u >= n || v >= n) throw std::invalid_argument("Graph: endpoint out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("Graph: duplicate edge");
    for (const auto& [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

std::size_t Graph::max_degree() const noexcept {
    std::size_t best = 0;
    for (const auto& list : adjacency_) best = std::max(best, list.size());
    return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    if (u >= n() || v >= n()) return false;
    const auto& list = adjacency_[u];
    return std::binary_search(list.begin(), list.end(), v);
}

CommunityVector::CommunityVector(std::vector<int> labels) : labels_(std::move(labels)) {
    for (int l : labels_)
        if (l != 1 && l != -1) throw std::invalid_argument("CommunityVector: label outside {-1, +1}");
}

Vector CommunityVector::as_vector() const {
    Vector v(static_cast<Eigen::Index>(labels_.size()));
    for (std::size_t i = 0; i < labels_.size(); ++i) v(static_cast<Eigen::Index>(i)) = labels_[i];
    return v;
}

void SbmParams::validate() const {
    if (n < 2) throw std::invalid_argument("SbmParams: n must be at least 2");
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("SbmParams: d must be non-negative");
    if (!(epsilon > 0.0 && epsilon <= 2.0)) throw std::invalid_argument("SbmParams: epsilon must lie in (0, 2]");
    if (p_same() > 1.0 || p_cross() < 0.0)
        throw std::invalid_argument("SbmParams: edge probability outside [0, 1]");
}

TruncationParams TruncationParams::paper_formula(double a, unsigned s, double d, double epsilon) {
    if (a < 1.0) throw std::invalid_argument("TruncationParams: A must be >= 1");
    if (s < 1) throw std::invalid_argument("TruncationParams: s must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("TruncationParams: epsilon must be positive");
    const double sd = s;
    const double log6e = std::log(6.0 / epsilon);
    const double tau = a * sd * log6e;
    const double e4 = std::pow(std::numbers::e, 4.0);
    const double t1 = 128.0 * e4 * std::pow(d, 4.0);
    const double t2 = 40.0 * a * sd * d;
    const double t3 = 2.0 * std::log(2.0 * a * sd) + 12.0 * a * tau * sd * sd * std::numbers::ln2 +
                      8.0 * a * a * tau * tau * sd * sd * log6e * log6e;
    const double delta = std::ceil(std::max({t1, t2, t3}));
    if (!(delta < 1.8e19)) throw std::overflow_error("TruncationParams: threshold exceeds 64 bits");
    TruncationParams p;
    p.mode = Mode::PaperFormula;
    p.a = a;
    p.s = s;
    p.tau = tau;
    p.resolved_delta = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(delta));
    return p;
}

TruncationParams TruncationParams::explicit_delta(std::uint64_t delta) {
    if (delta < 1) throw std::invalid_argument("TruncationParams: delta must be >= 1");
    TruncationParams p;
    p.mode = Mode::Explicit;
    p.resolved_delta = delta;
    return p;
}

TruncationParams TruncationParams::desk_default(double d) {
    return explicit_delta(std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(10.0 * d))));
}

CommunityVector sample_labels(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, "labels");
    std::vector<int> labels(n);
    for (auto& l : labels) l = (rng.next() >> 63) ? 1 : -1;
    return CommunityVector(std::move(labels));
}

SbmSample sample_sbm(const SbmParams& params) {
    params.validate();
    CommunityVector x = sample_labels(params.n, params.seed);
    CounterRng rng(params.seed, "edges");
    const double same = params.p_same();
    const double cross = params.p_cross();
    std::vector<Edge> edges;
    for (Vertex i = 0; i < params.n; ++i)
        for (Vertex j = i + 1; j < params.n; ++j) {
            const double p = x[i] == x[j] ? same : cross;
            if (rng.bernoulli(p)) edges.emplace_back(i, j);
        }
    return {std::move(x), Graph(params.n, std::move(edges))};
}

SbmSample sample_erdos_renyi(std::size_t n, double d, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample_erdos_renyi: n must be at least 2");
    const double p = d / static_cast<double>(n);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_erdos_renyi: d/n outside [0, 1]");
    CommunityVector x = sample_labels(n, derive_stream(seed, "null-labels"));
    CounterRng rng(seed, "null-edges");
    std::vector<Edge> edges;
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) edges.emplace_back(i, j);
    return {std::move(x), Graph(n, std::move(edges))};
}

DenseSymMatrix centered_adjacency(const Graph& g, double d) {
    const auto n = static_cast<Eigen::Index>(g.n());
    const double q = d / static_cast<double>(n);
    if (!(q < 1.0)) throw std::invalid_argument("centered_adjacency: requires d/n < 1");
    Matrix y = Matrix::Constant(n, n, -q);
    y.diagonal().setZero();
    for (const auto& [u, v] : g.edges()) {
        y(u, v) = 1.0 - q;
        y(v, u) = 1.0 - q;
    }
    return DenseSymMatrix(std::move(y));
}

Graph truncate(const Graph& g, std::uint64_t delta) {
    std::vector<Edge> kept;
    kept.reserve(g.edge_count());
    for (const auto& [u, v] : g.edges())
        if (g.degree(u) <= delta && g.degree(v) <= delta) kept.emplace_back(u, v);
    return Graph(g.n(), std::move(kept));
}

std::size_t edit_distance(const Graph& a, const Graph& b) {
    if (a.n() != b.n()) throw std::invalid_argument("edit_distance: vertex counts differ");
    const auto& ea = a.edges();
    const auto& eb = b.edges();
    std::size_t i = 0, j = 0, diff = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i] == eb[j]) {
            ++i;
            ++j;
        } else if (ea[i] < eb[j]) {
            ++i;
            ++diff;
        } else {
            ++j;
            ++diff;
        }
    }
    return diff + (ea.size() - i) + (eb.size() - j);
}

void write_edge_list(std::ostream& os, const Graph& g) {
    os << g.n() << ' ' << g.edge_count() << '\n';
    for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& is) {
    long long n = -1, m = -1;
    if (!(is >> n >> m) || n < 0 || m < 0) throw std::runtime_error("read_edge_list: bad header");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long k = 0; k < m; ++k) {
        long long u, v;
        if (!(is >> u >> v)) throw std::runtime_error("read_edge_list: truncated edge list");
        if (u < 0 || v < 0 || u >= n || v >= n) throw std::runtime_error("read_edge_list: endpoint out of range");
        if (u >= v) throw std::runtime_error("read_edge_list: expected u < v");
        if (!edges.empty() && Edge(static_cast<Vertex>(u), static_cast<Vertex>(v)) <= edges.back())
            throw std::runtime_error("read_edge_list: edges not in ascending order");
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return Graph(static_cast<std::size_t>(n), std::move(edges));
}

void write_communities(std::ostream& os, const CommunityVector& x) {
    for (int l : x.labels()) os << (l > 0 ? "+1" : "-1") << '\n';
}

CommunityVector read_communities(std::istream& is) {
    std::vector<int> labels;
    std::string token;
    while (is >> token) {
        if (token == "+1" || token == "1")
            labels.push_back(1);
        else if (token == "-1")
            labels.push_back(-1);
        else
            throw std::runtime_error("read_communities: bad label '" + token + "'");
    }
    return CommunityVector(std::move(labels));
}

}  // namespace sawrec
