#pragma once

#include "sawrec/graph.hpp"
#include "sawrec/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sawrec {

/// Walk length s and the model parameters entering the normalization
/// (2n / (eps d))^s / |SAW_ij^s|.
struct SawConfig {
    unsigned s = 1;
    double epsilon = 1.0;
    double d = 1.0;
    std::size_t n = 2;

    void validate() const;
    double normalization() const;
};

/// Number of length-s self-avoiding walks between two fixed distinct vertices
/// of K_n: (n-2)(n-3)...(n-s), and 1 for s = 1.
std::uint64_t saw_count(std::size_t n, unsigned s);

/// P^(k)_ij = sum over length-k self-avoiding walks i -> j in K_n of the
/// product of y along the walk; P^(k)_ii = 0. matrices[k-1] holds P^(k).
struct PathSumStack {
    std::vector<DenseSymMatrix> matrices;
    const DenseSymMatrix& operator[](unsigned k) const { return matrices.at(k - 1); }
};

/// Largest walk length handled by the matrix-formula backend.
inline constexpr unsigned kMaxFastWalkLength = 5;

/// Unnormalized path sum by depth-first enumeration (cost ~ n^(s+1)).
Matrix path_sum_enumerate(const DenseSymMatrix& y, unsigned s);
/// Q by explicit enumeration of every self-avoiding vertex sequence.
DenseSymMatrix q_oracle(const DenseSymMatrix& y, const SawConfig& cfg);

/// Exact path sums from correction polynomials in y. Requires a zero diagonal.
PathSumStack path_sums(const DenseSymMatrix& y, unsigned s_max);
/// Same as path_sums(y, k)[k] without materializing shorter lengths.
DenseSymMatrix path_sum(const DenseSymMatrix& y, unsigned k);
/// Term listing of the correction polynomial used for length k.
std::string path_sum_formula(unsigned k);

/// Q^(s)(y). Uses the matrix backend for s <= 5, enumeration for larger s when n <= 24.
DenseSymMatrix q_matrix(const DenseSymMatrix& y, const SawConfig& cfg);

struct SensitivityRow {
    std::size_t index = 0;
    Edge edge{};
    bool added = false;
    double delta_l1 = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct SensitivityReport {
    std::size_t delta = 0;
    std::vector<SensitivityRow> rows;
    bool all_pass() const;
    double max_ratio() const;  // max delta_l1 / bound
};

/// Applies `edits` random single-edge edits to the truncated graph, keeping
/// every degree <= delta, and records ||Q_after - Q_before||_1 against n * delta^s.
SensitivityReport sensitivity_probe(const Graph& g, const TruncationParams& t, const SawConfig& cfg,
                                    std::size_t edits, std::uint64_t seed);

void write_sensitivity_csv(std::ostream& os, const SensitivityReport& report);

}  // namespace sawrec
