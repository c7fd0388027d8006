#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sawrec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense n x n symmetric matrix with finite entries. Symmetry is exact
/// (bitwise), enforced at construction.
class DenseSymMatrix {
public:
    DenseSymMatrix() = default;
    explicit DenseSymMatrix(Matrix m);

    static DenseSymMatrix zero(Eigen::Index n);
    static DenseSymMatrix identity(Eigen::Index n);
    /// (m + m^T) / 2. Use for products that are symmetric only up to rounding.
    static DenseSymMatrix symmetric_part(const Matrix& m);

    Eigen::Index n() const noexcept { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const Matrix& mat() const noexcept { return m_; }

    DenseSymMatrix scaled(double c) const;

    friend bool operator==(const DenseSymMatrix& a, const DenseSymMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    Matrix m_;
};

/// Descending eigenpairs. Ties keep the order of the underlying solver,
/// which is ascending index for diagonal inputs.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;  // column i pairs with eigenvalues[i]
    bool converged = true;
    std::size_t iterations = 0;
};

struct EigOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 0;  // 0 -> 10 * n matrix-vector products
    Eigen::Index dense_limit = 512;
    std::uint64_t start_seed = 0x5EEDULL;
};

struct NormSummary {
    double entry_l1 = 0.0;
    double max_row_l1 = 0.0;
    double frobenius = 0.0;
    double nuclear = 0.0;
};

/// Number of worker threads used inside matrix kernels (default 1).
/// Results do not depend on this value.
void set_kernel_threads(unsigned threads);
unsigned kernel_threads();

/// General product with a fixed column-chunk decomposition, so the result is
/// bit-identical for every thread count.
Matrix mat_mul(const Matrix& a, const Matrix& b);
DenseSymMatrix mat_power(const DenseSymMatrix& m, unsigned k);

Spectrum top_eigs(const DenseSymMatrix& m, Eigen::Index k, const EigOptions& opts = {});
/// All eigenvalues, descending.
std::vector<double> eigenvalues(const DenseSymMatrix& m);

NormSummary norms(const DenseSymMatrix& m);
double entry_l1(const Matrix& m);
double max_row_l1(const Matrix& m);
/// (sum |lambda_i|^p)^(1/p) from the eigenvalues; p even and >= 2.
double schatten(const DenseSymMatrix& m, int p);
/// Tr(m^p) for even p >= 2 by matrix powers: ||m^(p/2)||_F^2.
double trace_power(const DenseSymMatrix& m, int p);

/// Flip sign so the first coordinate with |x_i| > 1e-12 is positive.
void sign_normalize(Eigen::Ref<Vector> v);

/// Plain-text dump: "n" then n rows of 17-significant-digit values.
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

}  // namespace sawrec
