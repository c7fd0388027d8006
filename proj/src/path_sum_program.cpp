#include "path_sum_program.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace sawrec::detail {

namespace {

long long factorial(int m) {
    long long f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// Calls fn(rgs, block_count) for every restricted growth string of length len.
template <class Fn>
void for_each_partition(int len, Fn&& fn) {
    std::vector<int> rgs(static_cast<std::size_t>(len), 0);
    std::vector<int> prefix_max(static_cast<std::size_t>(len), 0);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == len) {
            fn(rgs, prefix_max[static_cast<std::size_t>(len - 1)] + 1);
            return;
        }
        const int limit = prefix_max[static_cast<std::size_t>(pos - 1)] + 1;
        for (int b = 0; b <= limit; ++b) {
            rgs[static_cast<std::size_t>(pos)] = b;
            prefix_max[static_cast<std::size_t>(pos)] = std::max(prefix_max[static_cast<std::size_t>(pos - 1)], b);
            self(self, pos + 1);
        }
    };
    rgs[0] = 0;
    prefix_max[0] = 0;
    if (len == 1) {
        fn(rgs, 1);
        return;
    }
    rec(rec, 1);
}

}  // namespace

PathSumProgram::PathSumProgram(unsigned k) : k_(k) {
    if (k < 1 || k > 5) throw std::invalid_argument("PathSumProgram: supported lengths are 1..5");
    std::map<int, long long> merged;
    const int positions = static_cast<int>(k) + 1;
    for_each_partition(positions, [&](const std::vector<int>& rgs, int block_count) {
        if (rgs.front() == rgs.back()) return;  // endpoints coincide: only diagonal entries
        for (int t = 0; t + 1 < positions; ++t)
            if (rgs[static_cast<std::size_t>(t)] == rgs[static_cast<std::size_t>(t + 1)]) return;  // y_vv = 0
        std::vector<int> sizes(static_cast<std::size_t>(block_count), 0);
        for (int b : rgs) ++sizes[static_cast<std::size_t>(b)];
        long long mu = 1;
        for (int sz : sizes) mu *= ((sz - 1) % 2 ? -1 : 1) * factorial(sz - 1);
        merged[reduce_partition(rgs, block_count)] += mu;
    });
    for (const auto& [root, coeff] : merged)
        if (coeff != 0) terms_.push_back({coeff, root});
}

int PathSumProgram::intern(Node node) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i] == node) return static_cast<int>(i);
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
}

int PathSumProgram::leaf(int power) { return intern({Kind::Leaf, -1, -1, -1, power}); }

int PathSumProgram::ones() { return intern({Kind::Ones}); }

int PathSumProgram::transpose(int id) {
    const Node n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
        case Kind::Leaf: return id;
        case Kind::Hadamard: return hadamard(transpose(n.a), transpose(n.b));
        case Kind::Product: return product(transpose(n.b), n.c, transpose(n.a));
        case Kind::Scale: return scale(transpose(n.a), n.c, n.b);
        default: throw std::logic_error("PathSumProgram: transpose of a vector");
    }
}

int PathSumProgram::hadamard(int x, int y) {
    const Node& nx = nodes_[static_cast<std::size_t>(x)];
    const Node& ny = nodes_[static_cast<std::size_t>(y)];
    if (nx.kind == Kind::Leaf && ny.kind == Kind::Leaf) return leaf(nx.param + ny.param);
    if (x > y) std::swap(x, y);
    return intern({Kind::Hadamard, x, y});
}

int PathSumProgram::product(int left, int weight, int right) {
    return intern({Kind::Product, left, right, weight});
}

int PathSumProgram::scale(int m, int row_weight, int col_weight) {
    const int one = ones();
    if (row_weight == one && col_weight == one) return m;
    return intern({Kind::Scale, m, row_weight, col_weight});
}

int PathSumProgram::matvec(int m, int w) { return intern({Kind::MatVec, m, w}); }

int PathSumProgram::vec_hadamard(int x, int y) {
    const int one = ones();
    if (x == one) return y;
    if (y == one) return x;
    if (x > y) std::swap(x, y);
    return intern({Kind::VecHad, -1, x, y});
}

int PathSumProgram::reduce_partition(const std::vector<int>& blocks, int block_count) {
    struct Arc {
        int u, v, expr;  // expr is the u -> v orientation
    };
    const int t0 = blocks.front();
    const int t1 = blocks.back();
    std::vector<Arc> arcs;
    for (std::size_t t = 0; t + 1 < blocks.size(); ++t) arcs.push_back({blocks[t], blocks[t + 1], leaf(1)});
    std::vector<int> weight(static_cast<std::size_t>(block_count), ones());
    std::vector<bool> alive(static_cast<std::size_t>(block_count), true);

    auto oriented = [&](const Arc& a, int from) { return a.u == from ? a.expr : transpose(a.expr); };

    while (true) {
        // Parallel edges collapse into a Hadamard product.
        std::map<std::pair<int, int>, int> bundle;
        for (const Arc& a : arcs) {
            const int lo = std::min(a.u, a.v);
            const int hi = std::max(a.u, a.v);
            const int e = oriented(a, lo);
            auto [it, inserted] = bundle.try_emplace({lo, hi}, e);
            if (!inserted) it->second = hadamard(it->second, e);
        }
        arcs.clear();
        for (const auto& [key, e] : bundle) arcs.push_back({key.first, key.second, e});

        int victim = -1;
        int victim_degree = 0;
        bool pending = false;
        for (int x = 0; x < block_count; ++x) {
            if (!alive[static_cast<std::size_t>(x)] || x == t0 || x == t1) continue;
            pending = true;
            int deg = 0;
            for (const Arc& a : arcs) deg += (a.u == x) + (a.v == x);
            if (deg <= 2 && (victim < 0 || deg < victim_degree)) {
                victim = x;
                victim_degree = deg;
            }
        }
        if (!pending) break;
        if (victim < 0) throw std::logic_error("PathSumProgram: quotient graph is not series-parallel");

        std::vector<Arc> rest;
        std::vector<Arc> incident;
        for (const Arc& a : arcs) (a.u == victim || a.v == victim ? incident : rest).push_back(a);
        const int wx = weight[static_cast<std::size_t>(victim)];
        if (incident.size() == 1) {
            const Arc& a = incident[0];
            const int other = a.u == victim ? a.v : a.u;
            weight[static_cast<std::size_t>(other)] =
                vec_hadamard(weight[static_cast<std::size_t>(other)], matvec(oriented(a, other), wx));
        } else if (incident.size() == 2) {
            const int a = incident[0].u == victim ? incident[0].v : incident[0].u;
            const int b = incident[1].u == victim ? incident[1].v : incident[1].u;
            const int left = oriented(incident[0], a);
            const int right = oriented(incident[1], victim);
            rest.push_back({a, b, product(left, wx, right)});
        } else {
            throw std::logic_error("PathSumProgram: isolated interior block");
        }
        alive[static_cast<std::size_t>(victim)] = false;
        arcs = std::move(rest);
    }

    if (arcs.size() != 1) throw std::logic_error("PathSumProgram: terminals not joined by a single bundle");
    const int e = oriented(arcs[0], t0);
    return scale(e, weight[static_cast<std::size_t>(t0)], weight[static_cast<std::size_t>(t1)]);
}

std::size_t PathSumProgram::product_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == Kind::Product; }));
}

Matrix PathSumProgram::evaluate(const Matrix& y) const {
    const Eigen::Index n = y.rows();
    const std::size_t count = nodes_.size();

    // Reference counts over the DAG reachable from the roots, so intermediates
    // are released as soon as their last consumer has run.
    std::vector<int> uses(count, 0);
    std::vector<bool> needed(count, false);
    for (const Term& t : terms_) needed[static_cast<std::size_t>(t.root)] = true;
    for (std::size_t id = count; id-- > 0;) {
        if (!needed[id]) continue;
        for (int child : {nodes_[id].a, nodes_[id].b, nodes_[id].c}) {
            if (child < 0) continue;
            needed[static_cast<std::size_t>(child)] = true;
            ++uses[static_cast<std::size_t>(child)];
        }
    }
    std::vector<int> root_coeff(count, 0);
    for (const Term& t : terms_) root_coeff[static_cast<std::size_t>(t.root)] += static_cast<int>(t.coefficient);

    std::vector<Matrix> mats(count);
    std::vector<Vector> vecs(count);
    auto release = [&](int child) {
        if (child < 0) return;
        if (--uses[static_cast<std::size_t>(child)] == 0) {
            mats[static_cast<std::size_t>(child)].resize(0, 0);
            vecs[static_cast<std::size_t>(child)].resize(0);
        }
    };

    Matrix total = Matrix::Zero(n, n);
    for (std::size_t id = 0; id < count; ++id) {
        if (!needed[id]) continue;
        const Node& nd = nodes_[id];
        const auto A = [&](int i) -> const Matrix& { return mats[static_cast<std::size_t>(i)]; };
        const auto V = [&](int i) -> const Vector& { return vecs[static_cast<std::size_t>(i)]; };
        switch (nd.kind) {
            case Kind::Leaf: {
                Matrix m = y;
                for (int p = 1; p < nd.param; ++p) m = m.cwiseProduct(y);
                mats[id] = std::move(m);
                break;
            }
            case Kind::Hadamard: mats[id] = A(nd.a).cwiseProduct(A(nd.b)); break;
            case Kind::Product: {
                if (nodes_[static_cast<std::size_t>(nd.c)].kind == Kind::Ones) {
                    mats[id] = mat_mul(A(nd.a), A(nd.b));
                } else {
                    const Matrix left = A(nd.a) * V(nd.c).asDiagonal();
                    mats[id] = mat_mul(left, A(nd.b));
                }
                break;
            }
            case Kind::Scale: mats[id] = V(nd.b).asDiagonal() * A(nd.a) * V(nd.c).asDiagonal(); break;
            case Kind::Ones: vecs[id] = Vector::Ones(n); break;
            case Kind::MatVec: vecs[id] = A(nd.a) * V(nd.b); break;
            case Kind::VecHad: vecs[id] = V(nd.b).cwiseProduct(V(nd.c)); break;
        }
        if (root_coeff[id] != 0) total += static_cast<double>(root_coeff[id]) * mats[id];
        release(nd.a);
        release(nd.b);
        release(nd.c);
        if (uses[id] == 0) {
            mats[id].resize(0, 0);
            vecs[id].resize(0);
        }
    }
    total.diagonal().setZero();
    return total;
}

std::string PathSumProgram::render(int id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
        case Kind::Leaf: return n.param == 1 ? "Y" : "Y^o" + std::to_string(n.param);
        case Kind::Hadamard: return "(" + render(n.a) + " o " + render(n.b) + ")";
        case Kind::Product:
            if (nodes_[static_cast<std::size_t>(n.c)].kind == Kind::Ones) return render(n.a) + "*" + render(n.b);
            return render(n.a) + "*diag" + render(n.c) + "*" + render(n.b);
        case Kind::Scale: return "diag" + render(n.b) + "*[" + render(n.a) + "]*diag" + render(n.c);
        case Kind::Ones: return "1";
        case Kind::MatVec: return "(" + render(n.a) + "*" + render(n.b) + ")";
        case Kind::VecHad: return "(" + render(n.b) + " o " + render(n.c) + ")";
    }
    return "?";
}

std::string PathSumProgram::describe() const {
    std::ostringstream os;
    for (const Term& t : terms_) os << (t.coefficient > 0 ? "+" : "") << t.coefficient << " * " << render(t.root) << '\n';
    return os.str();
}

const PathSumProgram& path_sum_program(unsigned k) {
    static std::array<std::unique_ptr<PathSumProgram>, 6> cache;
    static std::mutex mutex;
    if (k < 1 || k > 5) throw std::invalid_argument("path_sum_program: supported lengths are 1..5");
    std::lock_guard lock(mutex);
    auto& slot = cache[k];
    if (!slot) slot = std::make_unique<PathSumProgram>(k);
    return *slot;
}

}  // namespace sawrec::detail
