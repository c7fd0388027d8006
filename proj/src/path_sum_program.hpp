#pragma once

#include "sawrec/numerics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sawrec::detail {

/// A compiled correction polynomial for the length-k self-avoiding path sum.
///
/// The injective sum over vertex sequences is expanded by Moebius inversion on
/// the partition lattice of walk positions. Each partition contributes a
/// two-terminal homomorphism sum over its quotient multigraph, which is reduced
/// to matrix products, Hadamard products and row sums by series/parallel
/// elimination. Identical subexpressions are interned and evaluated once.
class PathSumProgram {
public:
    explicit PathSumProgram(unsigned k);

    unsigned length() const noexcept { return k_; }
    std::size_t term_count() const noexcept { return terms_.size(); }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t product_count() const;

    /// Off-diagonal path sums; the diagonal of the result is zero.
    Matrix evaluate(const Matrix& y) const;

    /// Human-readable listing of the terms, e.g. "+1 * (Y*Y*Y)".
    std::string describe() const;

private:
    enum class Kind : std::uint8_t {
        Leaf,      // Hadamard power y^{o param}
        Hadamard,  // a o b
        Product,   // a * diag(w) * b, w = c (or ones when c < 0)
        Scale,     // diag(b) * a * diag(c)
        Ones,      // vector of ones
        MatVec,    // a * w
        VecHad,    // b o c
    };

    struct Node {
        Kind kind;
        int a = -1;
        int b = -1;
        int c = -1;
        int param = 0;
        bool operator==(const Node&) const = default;
    };

    struct Term {
        long long coefficient;
        int root;
    };

    int intern(Node node);
    int leaf(int power);
    int ones();
    int transpose(int id);
    int hadamard(int x, int y);
    int product(int left, int weight, int right);
    int scale(int m, int row_weight, int col_weight);
    int matvec(int m, int w);
    int vec_hadamard(int x, int y);

    int reduce_partition(const std::vector<int>& blocks, int block_count);
    std::string render(int id) const;

    unsigned k_;
    std::vector<Node> nodes_;
    std::vector<Term> terms_;
};

/// Shared, lazily built program for length k (1 <= k <= 5).
const PathSumProgram& path_sum_program(unsigned k);

}  // namespace sawrec::detail
