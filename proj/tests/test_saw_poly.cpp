#include "oracles.hpp"

#include "sawrec/saw_poly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace sawrec;

namespace {

double rel_err(const Matrix& got, const Matrix& want) {
    return oracle::max_abs_diff(got, want) / std::max(want.cwiseAbs().maxCoeff(), 1e-300);
}

DenseSymMatrix permuted(const DenseSymMatrix& y, const std::vector<Eigen::Index>& perm) {
    Matrix out(y.n(), y.n());
    for (Eigen::Index i = 0; i < y.n(); ++i)
        for (Eigen::Index j = 0; j < y.n(); ++j) out(perm[i], perm[j]) = y(i, j);
    return DenseSymMatrix(out);
}

}  // namespace

TEST(SawCount, MatchesBruteForce) {
    for (std::size_t n = 2; n <= 8; ++n)
        for (unsigned s = 1; s < n && s <= 5; ++s) EXPECT_EQ(saw_count(n, s), oracle::brute_saw_count(n, s)) << n << "," << s;
    EXPECT_EQ(saw_count(100, 1), 1u);
    EXPECT_EQ(saw_count(100, 3), 98u * 97u);
}

TEST(SawCount, RejectsImpossibleAndOverflow) {
    EXPECT_THROW(saw_count(4, 4), std::invalid_argument);  // needs s + 1 distinct vertices
    EXPECT_THROW(saw_count(4, 0), std::invalid_argument);
    EXPECT_THROW(saw_count(std::size_t{1} << 40, 3), std::overflow_error);
}

TEST(SawConfig, Normalization) {
    const SawConfig c{3, 0.5, 4.0, 20};
    EXPECT_DOUBLE_EQ(c.normalization(), std::pow(2.0 * 20 / (0.5 * 4.0), 3) / (18.0 * 17.0));
    EXPECT_THROW((SawConfig{0, 1.0, 1.0, 10}.validate()), std::invalid_argument);
    EXPECT_THROW((SawConfig{3, 0.0, 1.0, 10}.validate()), std::invalid_argument);
    EXPECT_THROW((SawConfig{3, 1.0, 1.0, 3}.validate()), std::invalid_argument);
}

TEST(PathSumEnumerate, MatchesOdometer) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const DenseSymMatrix y = oracle::random_symmetric(7, seed);
        for (unsigned s = 1; s <= 4; ++s)
            EXPECT_LT(rel_err(path_sum_enumerate(y, s), oracle::odometer_path_sum(y.mat(), s)), 1e-12);
    }
}

TEST(PathSums, MatchEnumerationAllLengths) {
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
        const DenseSymMatrix y = oracle::random_symmetric(9, seed);
        const PathSumStack stack = path_sums(y, kMaxFastWalkLength);
        for (unsigned k = 1; k <= kMaxFastWalkLength; ++k) {
            const Matrix want = path_sum_enumerate(y, k);
            EXPECT_LT(rel_err(stack[k].mat(), want), 1e-10) << "k=" << k;
            EXPECT_LT(rel_err(path_sum(y, k).mat(), want), 1e-10) << "k=" << k;
            EXPECT_EQ(stack[k].mat().diagonal().cwiseAbs().maxCoeff(), 0.0);
        }
    }
}

TEST(PathSums, LengthThreeClosedForm) {
    // P3 = Y^3 - diag(Y^2) Y - Y diag(Y^2) + Y o Y o Y off the diagonal.
    const DenseSymMatrix y = oracle::random_symmetric(10, 33);
    const Matrix& m = y.mat();
    const Vector d2 = (m * m).diagonal();
    Matrix want = m * m * m - d2.asDiagonal() * m - m * d2.asDiagonal() + m.cwiseProduct(m).cwiseProduct(m);
    want.diagonal().setZero();
    EXPECT_LT(rel_err(path_sum(y, 3).mat(), want), 1e-12);
}

TEST(PathSums, RequireZeroDiagonal) {
    const DenseSymMatrix y = oracle::random_symmetric(6, 1, false);
    EXPECT_THROW(path_sums(y, 3), std::invalid_argument);
    EXPECT_THROW(q_matrix(y, SawConfig{2, 1.0, 1.0, 6}), std::invalid_argument);
}

TEST(PathSumFormula, ListsTerms) {
    EXPECT_NE(path_sum_formula(1).find("Y"), std::string::npos);
    EXPECT_FALSE(path_sum_formula(4).empty());
    EXPECT_THROW(path_sum_formula(6), std::invalid_argument);
}

TEST(QMatrix, MatchesOracleAndNormalization) {
    const DenseSymMatrix y = oracle::random_symmetric(8, 44);
    for (unsigned s = 1; s <= 5; ++s) {
        const SawConfig cfg{s, 1.3, 2.5, 8};
        const Matrix want = cfg.normalization() * oracle::odometer_path_sum(y.mat(), s);
        EXPECT_LT(rel_err(q_matrix(y, cfg).mat(), want), 1e-10) << "s=" << s;
        EXPECT_LT(rel_err(q_oracle(y, cfg).mat(), want), 1e-12) << "s=" << s;
    }
}

TEST(QMatrix, LongWalksFallBackOnSmallGraphsOnly) {
    const DenseSymMatrix y = oracle::random_symmetric(9, 45);
    const SawConfig cfg{6, 1.0, 2.0, 9};
    EXPECT_LT(rel_err(q_matrix(y, cfg).mat(), q_oracle(y, cfg).mat()), 1e-12);
    const DenseSymMatrix big = oracle::random_symmetric(30, 46);
    EXPECT_THROW(q_matrix(big, SawConfig{6, 1.0, 2.0, 30}), std::invalid_argument);
    EXPECT_THROW(q_matrix(y, SawConfig{3, 1.0, 2.0, 10}), std::invalid_argument);  // n mismatch
}

TEST(QMatrix, EquivariantUnderVertexRelabeling) {
    const DenseSymMatrix y = oracle::random_symmetric(11, 47);
    std::vector<Eigen::Index> perm(11);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin() + 2, perm.end());
    std::swap(perm[0], perm[5]);
    for (unsigned s = 2; s <= 4; ++s) {
        const SawConfig cfg{s, 1.0, 3.0, 11};
        const DenseSymMatrix a = permuted(q_matrix(y, cfg), perm);
        const DenseSymMatrix b = q_matrix(permuted(y, perm), cfg);
        EXPECT_LT(rel_err(a.mat(), b.mat()), 1e-12);
    }
}

TEST(QMatrix, SbmInputsMatchOracle) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SbmSample s = sample_sbm(SbmParams{12, 3.0, 1.0, seed});
        const DenseSymMatrix y = centered_adjacency(s.graph, 3.0);
        for (unsigned k = 1; k <= 5; ++k) {
            const SawConfig cfg{k, 1.0, 3.0, 12};
            EXPECT_LT(rel_err(q_matrix(y, cfg).mat(), q_oracle(y, cfg).mat()), 1e-9);
        }
    }
}

TEST(SensitivityProbe, EditsStayWithinCapAndBound) {
    const SbmSample s = sample_sbm(SbmParams{120, 4.0, 1.0, 8});
    const SensitivityReport r =
        sensitivity_probe(s.graph, TruncationParams::explicit_delta(12), SawConfig{3, 1.0, 4.0, 120}, 30, 5);
    ASSERT_EQ(r.rows.size(), 30u);
    EXPECT_EQ(r.delta, 12u);
    EXPECT_TRUE(r.all_pass());
    for (const auto& row : r.rows) {
        EXPECT_DOUBLE_EQ(row.bound, 120.0 * 12.0 * 12.0 * 12.0);
        EXPECT_GT(row.delta_l1, 0.0);
    }
    EXPECT_LT(r.max_ratio(), 1.0);
    std::ostringstream os;
    write_sensitivity_csv(os, r);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "edit_index,edge,added_or_removed,delta_l1,bound,pass");
}

TEST(SensitivityProbe, SingleEditMatchesDirectDifference) {
    // Replays the first recorded edit independently.
    const SbmSample s = sample_sbm(SbmParams{60, 4.0, 1.0, 9});
    const TruncationParams t = TruncationParams::explicit_delta(10);
    const SawConfig cfg{3, 1.0, 4.0, 60};
    const SensitivityReport r = sensitivity_probe(s.graph, t, cfg, 1, 3);
    ASSERT_EQ(r.rows.size(), 1u);
    const Graph base = truncate(s.graph, t);
    std::vector<Edge> edges = base.edges();
    const Edge e = r.rows[0].edge;
    if (r.rows[0].added) {
        EXPECT_FALSE(base.has_edge(e.first, e.second));
        edges.push_back(e);
    } else {
        EXPECT_TRUE(base.has_edge(e.first, e.second));
        edges.erase(std::find(edges.begin(), edges.end(), e));
    }
    const Graph edited(60, edges);
    const Matrix diff = q_oracle(centered_adjacency(edited, 4.0), cfg).mat() - q_oracle(centered_adjacency(base, 4.0), cfg).mat();
    EXPECT_NEAR(r.rows[0].delta_l1, diff.cwiseAbs().sum(), 1e-8 * diff.cwiseAbs().sum());
}
