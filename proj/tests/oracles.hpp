#pragma once

// Slow, obviously-correct reference implementations used by the unit tests.

#include "sawrec/graph.hpp"
#include "sawrec/numerics.hpp"
#include "sawrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using sawrec::Matrix;
using sawrec::Vector;

inline Matrix triple_loop_mul(const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            long double acc = 0.0L;
            for (Eigen::Index k = 0; k < a.cols(); ++k) acc += static_cast<long double>(a(i, k)) * b(k, j);
            c(i, j) = static_cast<double>(acc);
        }
    return c;
}

inline Matrix naive_power(const Matrix& m, unsigned k) {
    Matrix r = Matrix::Identity(m.rows(), m.cols());
    for (unsigned i = 0; i < k; ++i) r = triple_loop_mul(r, m);
    return r;
}

/// Cyclic Jacobi eigenvalue iteration; eigenvalues returned descending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

inline double naive_trace_power(const Matrix& m, unsigned p) { return naive_power(m, p).trace(); }

inline double naive_max_row_l1(const Matrix& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
        best = std::max(best, row);
    }
    return best;
}

inline std::size_t set_edit_distance(const sawrec::Graph& a, const sawrec::Graph& b) {
    std::set<sawrec::Edge> sa(a.edges().begin(), a.edges().end());
    std::set<sawrec::Edge> sb(b.edges().begin(), b.edges().end());
    std::size_t diff = 0;
    for (const auto& e : sa) diff += sb.count(e) ? 0 : 1;
    for (const auto& e : sb) diff += sa.count(e) ? 0 : 1;
    return diff;
}

/// Number of ordered sequences of s-1 distinct vertices avoiding two fixed vertices,
/// counted by brute force over all tuples.
inline std::uint64_t brute_saw_count(std::size_t n, unsigned s) {
    if (s == 1) return 1;
    const unsigned len = s - 1;
    std::vector<std::size_t> tuple(len, 2);  // vertices 0 and 1 are the endpoints
    std::uint64_t count = 0;
    while (true) {
        std::set<std::size_t> distinct(tuple.begin(), tuple.end());
        if (distinct.size() == len) ++count;
        unsigned pos = 0;
        while (pos < len && ++tuple[pos] == n) tuple[pos++] = 2;
        if (pos == len) break;
    }
    return count;
}

/// Path sum over length-s self-avoiding walks by odometer over all (s+1)-tuples.
inline Matrix odometer_path_sum(const Matrix& y, unsigned s) {
    const auto n = static_cast<std::size_t>(y.rows());
    Matrix out = Matrix::Zero(y.rows(), y.cols());
    std::vector<std::size_t> walk(s + 1, 0);
    while (true) {
        std::set<std::size_t> distinct(walk.begin(), walk.end());
        if (distinct.size() == walk.size()) {
            double w = 1.0;
            for (unsigned k = 0; k < s; ++k)
                w *= y(static_cast<Eigen::Index>(walk[k]), static_cast<Eigen::Index>(walk[k + 1]));
            out(static_cast<Eigen::Index>(walk.front()), static_cast<Eigen::Index>(walk.back())) += w;
        }
        std::size_t pos = 0;
        while (pos < walk.size() && ++walk[pos] == n) walk[pos++] = 0;
        if (pos == walk.size()) break;
    }
    return out;
}

inline sawrec::DenseSymMatrix random_symmetric(std::size_t n, std::uint64_t seed, bool zero_diagonal = true) {
    sawrec::CounterRng rng(seed);
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j) m(i, j) = m(j, i) = 2.0 * rng.uniform() - 1.0;
    if (zero_diagonal) m.diagonal().setZero();
    return sawrec::DenseSymMatrix(m);
}

inline sawrec::DenseSymMatrix random_psd(std::size_t n, std::size_t rank, std::uint64_t seed) {
    sawrec::CounterRng rng(seed);
    Matrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal();
    return sawrec::DenseSymMatrix::symmetric_part(g * g.transpose());
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace oracle
