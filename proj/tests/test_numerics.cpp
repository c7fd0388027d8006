#include "oracles.hpp"

#include "sawrec/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace sawrec;

namespace {

Matrix random_rect(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    CounterRng rng(seed);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

class KernelThreadsGuard {
public:
    ~KernelThreadsGuard() { set_kernel_threads(1); }
};

}  // namespace

TEST(DenseSymMatrix, RejectsAsymmetricNonSquareAndNonFinite) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = 1.0;
    EXPECT_THROW(DenseSymMatrix{m}, std::invalid_argument);
    EXPECT_THROW(DenseSymMatrix{Matrix::Zero(2, 3)}, std::invalid_argument);
    Matrix bad = Matrix::Zero(2, 2);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(DenseSymMatrix{bad}, std::invalid_argument);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(DenseSymMatrix{bad}, std::invalid_argument);
}

TEST(DenseSymMatrix, SymmetricPartAveragesTranspose) {
    const Matrix m = random_rect(5, 5, 1);
    const DenseSymMatrix s = DenseSymMatrix::symmetric_part(m);
    EXPECT_LT(oracle::max_abs_diff(s.mat(), 0.5 * (m + m.transpose())), 1e-15);
    EXPECT_EQ(s.mat(), s.mat().transpose());
}

TEST(MatMul, MatchesTripleLoop) {
    const Matrix a = random_rect(37, 19, 2);
    const Matrix b = random_rect(19, 300, 3);
    EXPECT_LT(oracle::max_abs_diff(mat_mul(a, b), oracle::triple_loop_mul(a, b)), 1e-12);
}

TEST(MatMul, BitIdenticalAcrossThreadCounts) {
    KernelThreadsGuard guard;
    const Matrix a = random_rect(300, 300, 4);
    const Matrix b = random_rect(300, 700, 5);
    set_kernel_threads(1);
    const Matrix one = mat_mul(a, b);
    for (unsigned t : {2u, 3u, 8u}) {
        set_kernel_threads(t);
        EXPECT_TRUE(mat_mul(a, b) == one) << "threads=" << t;
    }
}

TEST(MatMul, RejectsShapeMismatch) {
    EXPECT_THROW(mat_mul(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST(MatPower, MatchesRepeatedMultiplication) {
    const DenseSymMatrix m = oracle::random_symmetric(12, 6, false);
    for (unsigned k : {0u, 1u, 2u, 3u, 5u, 8u}) {
        const Matrix want = oracle::naive_power(m.mat(), k);
        const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
        EXPECT_LT(oracle::max_abs_diff(mat_power(m, k).mat(), want) / scale, 1e-12) << "k=" << k;
    }
}

TEST(TopEigs, DenseMatchesJacobi) {
    const DenseSymMatrix m = oracle::random_symmetric(25, 7, false);
    const auto want = oracle::jacobi_eigenvalues(m.mat());
    const Spectrum s = top_eigs(m, 25);
    ASSERT_EQ(s.eigenvalues.size(), 25u);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s.eigenvalues[i], want[i], 1e-10);
    for (Eigen::Index i = 0; i < 25; ++i) {
        const Vector v = s.eigenvectors.col(i);
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        EXPECT_LT((m.mat() * v - s.eigenvalues[static_cast<std::size_t>(i)] * v).norm(), 1e-9);
    }
}

TEST(TopEigs, LanczosMatchesJacobi) {
    const DenseSymMatrix m = oracle::random_symmetric(160, 8, false);
    const auto want = oracle::jacobi_eigenvalues(m.mat());
    EigOptions opts;
    opts.dense_limit = 10;  // force the iterative path
    const Spectrum s = top_eigs(m, 6, opts);
    EXPECT_TRUE(s.converged);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(s.eigenvalues[i], want[i], 1e-8);
    for (Eigen::Index i = 0; i < 6; ++i) {
        const Vector v = s.eigenvectors.col(i);
        EXPECT_LT((m.mat() * v - s.eigenvalues[static_cast<std::size_t>(i)] * v).norm(), 1e-6);
    }
}

TEST(TopEigs, DiagonalTiesKeepIndexOrderAndSignNormalized) {
    Matrix d = Matrix::Zero(4, 4);
    d.diagonal() << 1.0, 3.0, 3.0, -2.0;
    const Spectrum s = top_eigs(DenseSymMatrix(d), 3);
    EXPECT_DOUBLE_EQ(s.eigenvalues[0], 3.0);
    EXPECT_DOUBLE_EQ(s.eigenvalues[1], 3.0);
    EXPECT_DOUBLE_EQ(s.eigenvalues[2], 1.0);
    for (Eigen::Index c = 0; c < 3; ++c) {
        Eigen::Index first = 0;
        while (std::abs(s.eigenvectors(first, c)) <= 1e-12) ++first;
        EXPECT_GT(s.eigenvectors(first, c), 0.0);
    }
}

TEST(TopEigs, RejectsBadK) {
    const DenseSymMatrix m = DenseSymMatrix::identity(3);
    EXPECT_THROW(top_eigs(m, 0), std::invalid_argument);
    EXPECT_THROW(top_eigs(m, 4), std::invalid_argument);
}

TEST(Norms, MatchNaiveDefinitions) {
    const DenseSymMatrix m = oracle::random_symmetric(15, 9, false);
    const NormSummary s = norms(m);
    double l1 = 0.0;
    for (Eigen::Index i = 0; i < 15; ++i)
        for (Eigen::Index j = 0; j < 15; ++j) l1 += std::abs(m(i, j));
    EXPECT_NEAR(s.entry_l1, l1, 1e-12);
    EXPECT_NEAR(s.max_row_l1, oracle::naive_max_row_l1(m.mat()), 1e-12);
    EXPECT_NEAR(s.frobenius, std::sqrt(oracle::naive_trace_power(m.mat(), 2)), 1e-12);
    double nuclear = 0.0;
    for (double ev : oracle::jacobi_eigenvalues(m.mat())) nuclear += std::abs(ev);
    EXPECT_NEAR(s.nuclear, nuclear, 1e-9);
}

TEST(Schatten, MatchesTracePowerOracle) {
    const DenseSymMatrix m = oracle::random_symmetric(14, 10, false);
    for (int p : {2, 4, 6, 8}) {
        const double want = std::pow(oracle::naive_trace_power(m.mat(), static_cast<unsigned>(p)), 1.0 / p);
        EXPECT_NEAR(schatten(m, p), want, 1e-10 * want) << "p=" << p;
        EXPECT_NEAR(trace_power(m, p), oracle::naive_trace_power(m.mat(), static_cast<unsigned>(p)),
                    1e-10 * std::pow(want, p));
    }
}

TEST(Schatten, HandlesHugeAndTinyScales) {
    const DenseSymMatrix m = oracle::random_symmetric(8, 11, false);
    const double base = schatten(m, 4);
    EXPECT_NEAR(schatten(m.scaled(1e200), 4) / 1e200, base, 1e-12 * base);
    EXPECT_NEAR(schatten(m.scaled(1e-200), 4) / 1e-200, base, 1e-12 * base);
    EXPECT_EQ(schatten(DenseSymMatrix::zero(4), 4), 0.0);
}

TEST(Schatten, RejectsOddOrSmallExponent) {
    const DenseSymMatrix m = DenseSymMatrix::identity(3);
    EXPECT_THROW(schatten(m, 3), std::invalid_argument);
    EXPECT_THROW(schatten(m, 0), std::invalid_argument);
    EXPECT_THROW(trace_power(m, 5), std::invalid_argument);
}

TEST(SignNormalize, FlipsToFirstNonzeroPositive) {
    Vector v(4);
    v << 0.0, 1e-13, -0.5, 0.2;
    sign_normalize(v);
    EXPECT_GT(v(2), 0.0);
    EXPECT_LT(v(3), 0.0);
}

TEST(MatrixIo, RoundTripIsExact) {
    const Matrix m = random_rect(6, 6, 12);
    std::stringstream ss;
    write_matrix(ss, m);
    EXPECT_TRUE(read_matrix(ss) == m);
}

TEST(MatrixIo, RejectsTruncatedInput) {
    std::stringstream ss("3\n1 2 3\n4 5\n");
    EXPECT_THROW(read_matrix(ss), std::runtime_error);
}
