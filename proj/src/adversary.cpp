#include "sawrec/adversary.hpp"

#include "sawrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sawrec {

namespace {

Edge ordered(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }

std::uint64_t pair_count(std::size_t n) { return static_cast<std::uint64_t>(n) * (n - 1) / 2; }

// Inverse of the row-major enumeration of pairs u < v.
Edge pair_from_index(std::size_t n, std::uint64_t idx) {
    Vertex u = 0;
    std::uint64_t row = n - 1;
    while (idx >= row) {
        idx -= row;
        ++u;
        --row;
    }
    return {u, static_cast<Vertex>(u + 1 + idx)};
}

Edge random_pair(std::size_t n, CounterRng& rng) {
    while (true) {
        const auto u = static_cast<Vertex>(rng.uniform_index(n));
        const auto v = static_cast<Vertex>(rng.uniform_index(n));
        if (u != v) return ordered(u, v);
    }
}

Graph apply_flips(const Graph& g, const std::set<Edge>& flips) {
    std::vector<Edge> edges;
    edges.reserve(g.edge_count() + flips.size());
    std::set_symmetric_difference(g.edges().begin(), g.edges().end(), flips.begin(), flips.end(),
                                  std::back_inserter(edges));
    return Graph(g.n(), std::move(edges));
}

// Chooses `count` distinct items uniformly from the pool, by partial Fisher-Yates.
template <class T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t count, CounterRng& rng) {
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

std::set<Edge> random_flip(const Graph& g, std::size_t budget, CounterRng& rng) {
    const std::uint64_t total = pair_count(g.n());
    const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(budget, total));
    std::set<Edge> flips;
    if (want * 2 > total) {
        std::vector<std::uint64_t> all(total);
        std::iota(all.begin(), all.end(), std::uint64_t{0});
        for (auto idx : sample_without_replacement(std::move(all), want, rng))
            flips.insert(pair_from_index(g.n(), idx));
        return flips;
    }
    while (flips.size() < want) flips.insert(random_pair(g.n(), rng));
    return flips;
}

std::set<Edge> hub_plant(const Graph& g, std::size_t hubs, std::size_t budget, CounterRng& rng) {
    const std::size_t n = g.n();
    hubs = std::min(hubs, n);
    std::vector<std::size_t> degree(n);
    for (Vertex v = 0; v < n; ++v) degree[v] = g.degree(v);
    std::set<Edge> added;
    auto adjacent = [&](Vertex u, Vertex v) { return g.has_edge(u, v) || added.count(ordered(u, v)) > 0; };

    std::size_t saturated_in_a_row = 0;
    for (std::size_t step = 0; added.size() < budget && saturated_in_a_row < hubs; ++step) {
        const auto hub = static_cast<Vertex>(step % hubs);
        if (degree[hub] + 1 >= n) {
            ++saturated_in_a_row;
            continue;
        }
        saturated_in_a_row = 0;
        // Free targets are plentiful unless the hub is nearly saturated; fall back to a scan then.
        Vertex target = hub;
        for (int attempt = 0; attempt < 64; ++attempt) {
            const auto v = static_cast<Vertex>(rng.uniform_index(n));
            if (v != hub && !adjacent(hub, v)) {
                target = v;
                break;
            }
        }
        if (target == hub) {
            std::vector<Vertex> free;
            for (Vertex v = 0; v < n; ++v)
                if (v != hub && !adjacent(hub, v)) free.push_back(v);
            target = free[rng.uniform_index(free.size())];
        }
        added.insert(ordered(hub, target));
        ++degree[hub];
        ++degree[target];
    }
    return added;
}

std::set<Edge> clique_plant(const Graph& g, const CommunityVector* x, std::size_t size, std::size_t budget,
                            CounterRng& rng, bool& truncated) {
    std::vector<Vertex> candidates;
    for (Vertex v = 0; v < g.n(); ++v)
        if (x == nullptr || (*x)[v] == 1) candidates.push_back(v);
    auto members = sample_without_replacement(std::move(candidates), size, rng);
    std::sort(members.begin(), members.end());
    std::vector<Edge> missing;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            if (!g.has_edge(members[a], members[b])) missing.emplace_back(members[a], members[b]);
    truncated = size * (size - 1) / 2 > budget;
    if (missing.size() > budget) missing.resize(budget);
    return {missing.begin(), missing.end()};
}

bool monotone_legal(const Graph& g, const CommunityVector& x, Edge e) {
    const bool same = x[e.first] == x[e.second];
    return same != g.has_edge(e.first, e.second);
}

std::set<Edge> monotone(const Graph& g, const CommunityVector& x, std::size_t budget, CounterRng& rng) {
    const std::size_t n = g.n();
    std::uint64_t plus = 0;
    for (int l : x.labels()) plus += l == 1;
    const std::uint64_t minus = n - plus;
    std::uint64_t same_edges = 0;
    for (const auto& [u, v] : g.edges()) same_edges += x[u] == x[v];
    const std::uint64_t cross_edges = g.edge_count() - same_edges;
    const std::uint64_t same_pairs = plus * (plus - (plus > 0)) / 2 + minus * (minus - (minus > 0)) / 2;
    const std::uint64_t pool = (same_pairs - same_edges) + cross_edges;

    std::set<Edge> moves;
    if (pool == 0 || budget == 0) return moves;
    if (pool <= 2 * budget || pool * 64 < pair_count(n)) {
        std::vector<Edge> legal;
        legal.reserve(static_cast<std::size_t>(pool));
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (monotone_legal(g, x, {u, v})) legal.emplace_back(u, v);
        for (const auto& e : sample_without_replacement(std::move(legal), budget, rng)) moves.insert(e);
        return moves;
    }
    while (moves.size() < budget) {
        const Edge e = random_pair(n, rng);
        if (monotone_legal(g, x, e)) moves.insert(e);
    }
    return moves;
}

}  // namespace

std::string to_string(CorruptionModel m) {
    switch (m) {
        case CorruptionModel::RandomFlip: return "random_flip";
        case CorruptionModel::HubPlant: return "hub_plant";
        case CorruptionModel::CliquePlant: return "clique_plant";
        case CorruptionModel::Monotone: return "monotone";
    }
    return "unknown";
}

CorruptionModel corruption_model_from_string(const std::string& s) {
    if (s == "random_flip") return CorruptionModel::RandomFlip;
    if (s == "hub_plant") return CorruptionModel::HubPlant;
    if (s == "clique_plant") return CorruptionModel::CliquePlant;
    if (s == "monotone") return CorruptionModel::Monotone;
    throw std::invalid_argument("unknown corruption model '" + s + "'");
}

std::size_t CorruptionSpec::budget(std::size_t n) const {
    // The 1e-9 guards decimal inputs such as 0.29 * 100 = 28.999999999999996.
    return static_cast<std::size_t>(std::floor(rho * static_cast<double>(n) + 1e-9));
}

void CorruptionSpec::validate() const {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("CorruptionSpec: rho must be >= 0");
    if (model == CorruptionModel::HubPlant && hub_count < 1)
        throw std::invalid_argument("CorruptionSpec: hub_count must be positive");
    if (model == CorruptionModel::CliquePlant && clique_size < 1)
        throw std::invalid_argument("CorruptionSpec: clique_size must be positive");
}

CorruptionResult corrupt(const Graph& g, const CommunityVector* x, const CorruptionSpec& spec) {
    spec.validate();
    if (x != nullptr && x->size() != g.n()) throw std::invalid_argument("corrupt: label vector length mismatch");
    if (spec.model == CorruptionModel::Monotone && x == nullptr)
        throw std::invalid_argument("corrupt: the monotone model needs the planted labels");

    CorruptionResult result;
    result.budget = spec.budget(g.n());
    if (result.budget == 0 || g.n() < 2) {
        result.graph = g;
        return result;
    }
    CounterRng rng(spec.seed, "corrupt", static_cast<std::uint64_t>(spec.model));
    std::set<Edge> flips;
    switch (spec.model) {
        case CorruptionModel::RandomFlip: flips = random_flip(g, result.budget, rng); break;
        case CorruptionModel::HubPlant: flips = hub_plant(g, spec.hub_count, result.budget, rng); break;
        case CorruptionModel::CliquePlant:
            flips = clique_plant(g, x, spec.clique_size, result.budget, rng, result.budget_truncated);
            break;
        case CorruptionModel::Monotone: flips = monotone(g, *x, result.budget, rng); break;
    }
    result.edits_used = flips.size();
    result.graph = apply_flips(g, flips);
    return result;
}

void to_json(nlohmann::json& j, const CorruptionSpec& spec) {
    j = nlohmann::json{{"rho", spec.rho}, {"model", to_string(spec.model)}, {"seed", spec.seed}};
    nlohmann::json params = nlohmann::json::object();
    if (spec.model == CorruptionModel::HubPlant) params["hub_count"] = spec.hub_count;
    if (spec.model == CorruptionModel::CliquePlant) params["clique_size"] = spec.clique_size;
    j["model_params"] = params;
}

void from_json(const nlohmann::json& j, CorruptionSpec& spec) {
    spec = CorruptionSpec{};
    spec.rho = j.value("rho", 0.0);
    spec.model = corruption_model_from_string(j.value("model", std::string("random_flip")));
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("model_params")) {
        const auto& p = j.at("model_params");
        spec.hub_count = p.value("hub_count", spec.hub_count);
        spec.clique_size = p.value("clique_size", spec.clique_size);
    }
    spec.validate();
}

}  // namespace sawrec
