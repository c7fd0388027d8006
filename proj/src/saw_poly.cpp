#include "sawrec/saw_poly.hpp"

#include "path_sum_program.hpp"
#include "sawrec/rng.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sawrec {

void SawConfig::validate() const {
    if (n < 2) throw std::invalid_argument("SawConfig: n must be at least 2");
    if (s < 1 || s > n - 1) throw std::invalid_argument("SawConfig: need 1 <= s <= n - 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("SawConfig: epsilon must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("SawConfig: d must be positive");
    if (s >= 2 && n - 2 < s - 1) throw std::invalid_argument("SawConfig: no self-avoiding walks of this length");
}

double SawConfig::normalization() const {
    const double base = 2.0 * static_cast<double>(n) / (epsilon * d);
    return std::pow(base, static_cast<double>(s)) / static_cast<double>(saw_count(n, s));
}

std::uint64_t saw_count(std::size_t n, unsigned s) {
    if (s < 1 || n < 2 || s > n - 1) throw std::invalid_argument("saw_count: need 1 <= s <= n - 1");
    std::uint64_t count = 1;
    for (unsigned k = 2; k <= s; ++k) {
        const std::uint64_t factor = n - k;  // (n-2), (n-3), ..., (n-s)
        if (factor != 0 && count > std::numeric_limits<std::uint64_t>::max() / factor)
            throw std::overflow_error("saw_count: exceeds 64 bits");
        count *= factor;
    }
    return count;
}

Matrix path_sum_enumerate(const DenseSymMatrix& y, unsigned s) {
    const Eigen::Index n = y.n();
    if (s < 1 || s >= static_cast<unsigned>(std::max<Eigen::Index>(n, 1)))
        throw std::invalid_argument("path_sum_enumerate: need 1 <= s <= n - 1");
    const Matrix& w = y.mat();
    Matrix out = Matrix::Zero(n, n);
    std::vector<Eigen::Index> stack(s + 1);
    std::vector<double> partial(s + 1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);

    auto dfs = [&](auto&& self, unsigned depth) -> void {
        const Eigen::Index here = stack[depth];
        if (depth == s) {
            out(stack[0], here) += partial[depth];
            return;
        }
        for (Eigen::Index next = 0; next < n; ++next) {
            if (used[static_cast<std::size_t>(next)]) continue;
            const double weight = w(here, next);
            if (weight == 0.0) continue;
            used[static_cast<std::size_t>(next)] = true;
            stack[depth + 1] = next;
            partial[depth + 1] = partial[depth] * weight;
            self(self, depth + 1);
            used[static_cast<std::size_t>(next)] = false;
        }
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        stack[0] = i;
        partial[0] = 1.0;
        used[static_cast<std::size_t>(i)] = true;
        dfs(dfs, 0);
        used[static_cast<std::size_t>(i)] = false;
    }
    out.diagonal().setZero();
    return out;
}

DenseSymMatrix q_oracle(const DenseSymMatrix& y, const SawConfig& cfg) {
    cfg.validate();
    if (static_cast<std::size_t>(y.n()) != cfg.n) throw std::invalid_argument("q_oracle: dimension mismatch");
    Matrix sums = path_sum_enumerate(y, cfg.s);
    return DenseSymMatrix::symmetric_part(cfg.normalization() * sums);
}

namespace {

void require_zero_diagonal(const DenseSymMatrix& y) {
    for (Eigen::Index i = 0; i < y.n(); ++i)
        if (y(i, i) != 0.0) throw std::invalid_argument("path_sums: input must have a zero diagonal");
}

}  // namespace

DenseSymMatrix path_sum(const DenseSymMatrix& y, unsigned k) {
    if (k < 1 || k > kMaxFastWalkLength) throw std::invalid_argument("path_sum: walk length must be in 1..5");
    require_zero_diagonal(y);
    return DenseSymMatrix::symmetric_part(detail::path_sum_program(k).evaluate(y.mat()));
}

PathSumStack path_sums(const DenseSymMatrix& y, unsigned s_max) {
    if (s_max < 1 || s_max > kMaxFastWalkLength)
        throw std::invalid_argument("path_sums: s_max must be in 1..5");
    PathSumStack stack;
    for (unsigned k = 1; k <= s_max; ++k) stack.matrices.push_back(path_sum(y, k));
    return stack;
}

std::string path_sum_formula(unsigned k) { return detail::path_sum_program(k).describe(); }

DenseSymMatrix q_matrix(const DenseSymMatrix& y, const SawConfig& cfg) {
    cfg.validate();
    if (static_cast<std::size_t>(y.n()) != cfg.n) throw std::invalid_argument("q_matrix: dimension mismatch");
    if (cfg.s <= kMaxFastWalkLength) return path_sum(y, cfg.s).scaled(cfg.normalization());
    if (cfg.n <= 24) return q_oracle(y, cfg);
    throw std::invalid_argument("q_matrix: s > 5 is only supported by enumeration for n <= 24");
}

bool SensitivityReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

double SensitivityReport::max_ratio() const {
    double best = 0.0;
    for (const auto& r : rows) best = std::max(best, r.delta_l1 / r.bound);
    return best;
}

SensitivityReport sensitivity_probe(const Graph& g, const TruncationParams& t, const SawConfig& cfg,
                                    std::size_t edits, std::uint64_t seed) {
    cfg.validate();
    if (g.n() != cfg.n) throw std::invalid_argument("sensitivity_probe: dimension mismatch");
    const std::size_t delta = t.resolved_delta;
    const std::size_t n = g.n();
    const double bound = static_cast<double>(n) * std::pow(static_cast<double>(delta), cfg.s);

    Graph current = truncate(g, t);
    std::vector<std::size_t> degree(n);
    for (Vertex v = 0; v < n; ++v) degree[v] = current.degree(v);
    DenseSymMatrix q_prev = q_matrix(centered_adjacency(current, cfg.d), cfg);

    SensitivityReport report;
    report.delta = delta;
    CounterRng rng(seed, "sensitivity");
    for (std::size_t e = 0; e < edits; ++e) {
        Vertex u = 0, v = 0;
        bool present = false;
        while (true) {
            u = static_cast<Vertex>(rng.uniform_index(n));
            v = static_cast<Vertex>(rng.uniform_index(n));
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            present = current.has_edge(u, v);
            if (present || (degree[u] < delta && degree[v] < delta)) break;
        }
        std::vector<Edge> edges = current.edges();
        if (present) {
            std::erase(edges, Edge{u, v});
            --degree[u];
            --degree[v];
        } else {
            edges.emplace_back(u, v);
            ++degree[u];
            ++degree[v];
        }
        current = Graph(n, std::move(edges));
        DenseSymMatrix q_next = q_matrix(centered_adjacency(current, cfg.d), cfg);
        SensitivityRow row;
        row.index = e;
        row.edge = {u, v};
        row.added = !present;
        row.delta_l1 = entry_l1(q_next.mat() - q_prev.mat());
        row.bound = bound;
        row.pass = row.delta_l1 <= bound;
        report.rows.push_back(row);
        q_prev = std::move(q_next);
    }
    return report;
}

void write_sensitivity_csv(std::ostream& os, const SensitivityReport& report) {
    os << "edit_index,edge,added_or_removed,delta_l1,bound,pass\n";
    char buf[64];
    for (const auto& r : report.rows) {
        os << r.index << ',' << r.edge.first << '-' << r.edge.second << ',' << (r.added ? "added" : "removed") << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.delta_l1);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.bound);
        os << buf << ',' << (r.pass ? "true" : "false") << '\n';
    }
}

}  // namespace sawrec
