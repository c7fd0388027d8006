#include "sawrec/numerics.hpp"

#include "sawrec/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace sawrec {

namespace {

std::atomic<unsigned> g_kernel_threads{1};

constexpr Eigen::Index kColumnChunk = 256;

void check_finite(const Matrix& m) {
    if (!m.allFinite()) throw std::invalid_argument("DenseSymMatrix: non-finite entry");
}

// Descending order of `values`, ties by ascending position.
std::vector<Eigen::Index> descending_order(const Vector& values) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
    return idx;
}

Spectrum dense_top_eigs(const DenseSymMatrix& m, Eigen::Index k) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
    if (solver.info() != Eigen::Success) throw std::runtime_error("top_eigs: dense solver failed");
    const auto order = descending_order(solver.eigenvalues());
    Spectrum out;
    out.eigenvectors.resize(m.n(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto src = order[static_cast<std::size_t>(c)];
        out.eigenvalues.push_back(solver.eigenvalues()(src));
        out.eigenvectors.col(c) = solver.eigenvectors().col(src).normalized();
        sign_normalize(out.eigenvectors.col(c));
    }
    out.iterations = 1;
    return out;
}

// Orthogonalize r against the first `cols` columns of basis, twice.
void reorthogonalize(const Matrix& basis, Eigen::Index cols, Vector& r) {
    for (int pass = 0; pass < 2; ++pass) {
        const Vector coeff = basis.leftCols(cols).transpose() * r;
        r.noalias() -= basis.leftCols(cols) * coeff;
    }
}

Vector random_unit(Eigen::Index n, CounterRng& rng) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v.normalized();
}

// Thick-restart Lanczos with full reorthogonalization. The projected matrix is
// formed explicitly as V^T (M V), which keeps restarts simple.
Spectrum lanczos_top_eigs(const DenseSymMatrix& m, Eigen::Index k, const EigOptions& opts) {
    const Eigen::Index n = m.n();
    const Matrix& a = m.mat();
    const double fro = a.norm();
    const double target = opts.tol * fro;
    const std::size_t cap =
        opts.max_iterations > 0 ? opts.max_iterations : static_cast<std::size_t>(10 * n);

    const Eigen::Index max_basis = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k + 40, 80));
    const Eigen::Index keep = std::min<Eigen::Index>(max_basis - 2, 2 * k + 10);

    CounterRng rng(opts.start_seed, "lanczos-start");
    Matrix basis(n, max_basis);
    Matrix image(n, max_basis);
    basis.col(0) = random_unit(n, rng);
    Eigen::Index size = 1;   // columns of `basis` filled
    Eigen::Index imaged = 0; // columns of `image` filled
    std::size_t matvecs = 0;

    Spectrum out;
    while (true) {
        // Extend the Krylov basis to max_basis columns.
        while (imaged < size && matvecs < cap) {
            image.col(imaged) = a * basis.col(imaged);
            ++matvecs;
            ++imaged;
            if (imaged < size || size == max_basis) continue;
            Vector r = image.col(imaged - 1);
            reorthogonalize(basis, size, r);
            double beta = r.norm();
            if (beta <= 1e-13 * std::max(fro, 1e-300)) {
                // Invariant subspace found: continue from a fresh random direction.
                r = random_unit(n, rng);
                reorthogonalize(basis, size, r);
                beta = r.norm();
                if (beta <= 1e-10) break;
            }
            basis.col(size++) = r / beta;
        }

        const Eigen::Index msz = imaged;
        Matrix projected = basis.leftCols(msz).transpose() * image.leftCols(msz);
        projected = (0.5 * (projected + projected.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> small(projected);
        const auto order = descending_order(small.eigenvalues());
        const Eigen::Index want = std::min(k, msz);

        Matrix ritz(n, want);
        std::vector<double> values;
        bool all_ok = true;
        for (Eigen::Index c = 0; c < want; ++c) {
            const auto src = order[static_cast<std::size_t>(c)];
            const double theta = small.eigenvalues()(src);
            const Vector y = small.eigenvectors().col(src);
            ritz.col(c) = basis.leftCols(msz) * y;
            const Vector resid = image.leftCols(msz) * y - theta * ritz.col(c);
            if (resid.norm() > target) all_ok = false;
            values.push_back(theta);
        }
        const bool exhausted = msz >= n;
        if ((all_ok && want == k) || exhausted || matvecs >= cap) {
            out.eigenvalues = std::move(values);
            out.eigenvectors = std::move(ritz);
            for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
                out.eigenvectors.col(c).normalize();
                sign_normalize(out.eigenvectors.col(c));
            }
            out.converged = (all_ok && want == k) || exhausted;
            out.iterations = matvecs;
            return out;
        }

        // Thick restart: keep the leading Ritz vectors plus the continuation vector.
        const Eigen::Index l = std::min(keep, msz - 1);
        Matrix y(msz, l);
        for (Eigen::Index c = 0; c < l; ++c) y.col(c) = small.eigenvectors().col(order[static_cast<std::size_t>(c)]);
        Vector cont;
        if (size > msz) {
            cont = basis.col(msz);
        } else {
            cont = image.col(msz - 1);
            reorthogonalize(basis, msz, cont);
        }
        Matrix new_basis = basis.leftCols(msz) * y;
        Matrix new_image = image.leftCols(msz) * y;
        basis.leftCols(l) = new_basis;
        image.leftCols(l) = new_image;
        size = l;
        imaged = l;
        reorthogonalize(basis, size, cont);
        if (cont.norm() <= 1e-10) {
            cont = random_unit(n, rng);
            reorthogonalize(basis, size, cont);
        }
        basis.col(size++) = cont.normalized();
    }
}

}  // namespace

DenseSymMatrix::DenseSymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("DenseSymMatrix: matrix is not square");
    check_finite(m_);
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
        for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
            if (m_(i, j) != m_(j, i)) throw std::invalid_argument("DenseSymMatrix: matrix is not symmetric");
}

DenseSymMatrix DenseSymMatrix::zero(Eigen::Index n) { return DenseSymMatrix(Matrix::Zero(n, n)); }

DenseSymMatrix DenseSymMatrix::identity(Eigen::Index n) { return DenseSymMatrix(Matrix::Identity(n, n)); }

DenseSymMatrix DenseSymMatrix::symmetric_part(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("symmetric_part: matrix is not square");
    Matrix s = m;
    for (Eigen::Index j = 0; j < s.cols(); ++j)
        for (Eigen::Index i = j + 1; i < s.rows(); ++i) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    return DenseSymMatrix(std::move(s));
}

DenseSymMatrix DenseSymMatrix::scaled(double c) const { return DenseSymMatrix(Matrix(c * m_)); }

void set_kernel_threads(unsigned threads) { g_kernel_threads.store(std::max(1u, threads)); }

unsigned kernel_threads() { return g_kernel_threads.load(); }

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    const Eigen::Index chunks = (b.cols() + kColumnChunk - 1) / kColumnChunk;
    auto run_chunk = [&](Eigen::Index chunk) {
        const Eigen::Index start = chunk * kColumnChunk;
        const Eigen::Index width = std::min(kColumnChunk, b.cols() - start);
        c.middleCols(start, width).noalias() = a * b.middleCols(start, width);
    };
    const unsigned threads = std::min<unsigned>(kernel_threads(), static_cast<unsigned>(std::max<Eigen::Index>(chunks, 1)));
    if (threads <= 1) {
        for (Eigen::Index ch = 0; ch < chunks; ++ch) run_chunk(ch);
        return c;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (Eigen::Index ch = t; ch < chunks; ch += threads) run_chunk(ch);
        });
    for (auto& th : pool) th.join();
    return c;
}

DenseSymMatrix mat_power(const DenseSymMatrix& m, unsigned k) {
    DenseSymMatrix result = DenseSymMatrix::identity(m.n());
    if (k == 0) return result;
    DenseSymMatrix base = m;
    bool have_result = false;
    while (true) {
        if (k & 1u) {
            result = have_result ? DenseSymMatrix::symmetric_part(mat_mul(result.mat(), base.mat())) : base;
            have_result = true;
        }
        k >>= 1u;
        if (k == 0) break;
        base = DenseSymMatrix::symmetric_part(mat_mul(base.mat(), base.mat()));
    }
    return result;
}

Spectrum top_eigs(const DenseSymMatrix& m, Eigen::Index k, const EigOptions& opts) {
    if (k < 1 || k > m.n()) throw std::invalid_argument("top_eigs: need 1 <= k <= n");
    if (m.n() <= opts.dense_limit) return dense_top_eigs(m, k);
    return lanczos_top_eigs(m, k, opts);
}

std::vector<double> eigenvalues(const DenseSymMatrix& m) {
    if (m.n() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalues: solver failed");
    std::vector<double> values(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(values.begin(), values.end(), std::greater<>());
    return values;
}

double entry_l1(const Matrix& m) { return m.cwiseAbs().sum(); }

double max_row_l1(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

NormSummary norms(const DenseSymMatrix& m) {
    NormSummary s;
    s.entry_l1 = entry_l1(m.mat());
    s.max_row_l1 = max_row_l1(m.mat());
    s.frobenius = m.mat().norm();
    for (double l : eigenvalues(m)) s.nuclear += std::abs(l);
    return s;
}

double schatten(const DenseSymMatrix& m, int p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("schatten: p must be even and >= 2");
    const auto values = eigenvalues(m);
    if (values.empty()) return 0.0;
    // Factor out the spectral radius to avoid overflow for large p.
    double radius = 0.0;
    for (double l : values) radius = std::max(radius, std::abs(l));
    if (radius == 0.0) return 0.0;
    double acc = 0.0;
    for (double l : values) acc += std::pow(std::abs(l) / radius, p);
    return radius * std::pow(acc, 1.0 / p);
}

double trace_power(const DenseSymMatrix& m, int p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("trace_power: p must be even and >= 2");
    const DenseSymMatrix half = mat_power(m, static_cast<unsigned>(p / 2));
    return half.mat().squaredNorm();
}

void sign_normalize(Eigen::Ref<Vector> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

void write_matrix(std::ostream& os, const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("write_matrix: matrix is not square");
    os << m.rows() << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) os << ' ';
            os << buf;
        }
        os << '\n';
    }
}

Matrix read_matrix(std::istream& is) {
    long long n = -1;
    if (!(is >> n) || n < 0) throw std::runtime_error("read_matrix: bad header");
    Matrix m(n, n);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j)
            if (!(is >> m(i, j))) throw std::runtime_error("read_matrix: truncated data");
    return m;
}

}  // namespace sawrec
