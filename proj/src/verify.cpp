#include "sawrec/verify.hpp"

#include "sawrec/graph.hpp"
#include "sawrec/recovery.hpp"
#include "sawrec/rng.hpp"
#include "sawrec/saw_poly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

namespace sawrec {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format(const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

DenseSymMatrix random_zero_diagonal(std::size_t n, CounterRng& rng) {
    const double density = 0.2 + 0.8 * rng.uniform();
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (rng.uniform() < density) m(i, j) = m(j, i) = 2.0 * rng.uniform() - 1.0;
    return DenseSymMatrix(m);
}

DenseSymMatrix random_psd(std::size_t n, std::size_t rank, CounterRng& rng) {
    Matrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal();
    return DenseSymMatrix::symmetric_part(g * g.transpose());
}

// Tr m^t from the spectrum; valid for any positive integer t.
double trace_of_power(const DenseSymMatrix& m, unsigned t) {
    double total = 0.0;
    for (double lambda : eigenvalues(m)) total += std::pow(lambda, static_cast<double>(t));
    return total;
}

// Largest entrywise deviation relative to the largest oracle entry. When the exact
// sum vanishes (no self-avoiding walk survives), the size of one normalized walk
// term, norm * max|y|^s, is used instead: the matrix formulas cancel terms of that
// magnitude, so round-off is measured against it.
double relative_error(const DenseSymMatrix& got, const DenseSymMatrix& want, const DenseSymMatrix& y,
                      const SawConfig& cfg) {
    const double term = cfg.normalization() * std::pow(y.mat().cwiseAbs().maxCoeff(), cfg.s);
    const double scale = std::max({want.mat().cwiseAbs().maxCoeff(), term, 1e-300});
    return (got.mat() - want.mat()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

SuiteResult verify_oracle_equivalence(const OracleSuiteOptions& o) {
    Stopwatch clock;
    SuiteResult r{"oracle-equivalence", true, "", 0.0};
    CounterRng rng(o.seed, "verify-oracle");
    double worst = 0.0;
    std::size_t comparisons = 0;
    auto check = [&](const DenseSymMatrix& y, double d, double eps) {
        const std::size_t n = static_cast<std::size_t>(y.n());
        const unsigned s_max = n <= o.max_n_s5 ? 5 : 4;
        for (unsigned s = 1; s <= s_max && s + 1 <= n; ++s) {
            const SawConfig cfg{s, eps, d, n};
            const double err = relative_error(q_matrix(y, cfg), q_oracle(y, cfg), y, cfg);
            worst = std::max(worst, err);
            ++comparisons;
            if (!(err <= o.rel_tol)) r.pass = false;
        }
    };
    for (std::size_t i = 0; i < o.random_inputs; ++i) {
        const std::size_t n = 3 + rng.uniform_index(o.max_n - 2);
        check(random_zero_diagonal(n, rng), 2.0, 1.0);
    }
    for (std::size_t i = 0; i < o.sbm_inputs; ++i) {
        // n >= 8 and d <= 3 keep the within-community edge probability at most 3/4.
        const std::size_t n = 8 + rng.uniform_index(o.max_n - 7);
        const double d = 1.0 + 2.0 * rng.uniform();
        const double eps = 0.5 + 1.5 * rng.uniform();
        const SbmSample sample = sample_sbm(SbmParams{n, d, eps, rng.next()});
        check(centered_adjacency(sample.graph, d), d, eps);
    }
    r.detail = format("%.0f comparisons, max relative error %.3g (tol %.1g)", static_cast<double>(comparisons), worst,
                      o.rel_tol);
    r.seconds = clock.seconds();
    return r;
}

SuiteResult verify_unbiasedness(const UnbiasednessOptions& o) {
    Stopwatch clock;
    SuiteResult r{"unbiasedness", false, "", 0.0};
    const SawConfig cfg{o.s, o.epsilon, o.d, o.n};
    const double pairs = static_cast<double>(o.n) * static_cast<double>(o.n - 1);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t draw = 0; draw < o.draws; ++draw) {
        const SbmSample sample = sample_sbm(SbmParams{o.n, o.d, o.epsilon, derive_stream(o.seed, "unbiased", draw)});
        const DenseSymMatrix q = q_matrix(centered_adjacency(sample.graph, o.d), cfg);
        const Vector x = sample.x.as_vector();
        // The diagonal of Q is zero, so the full quadratic form equals the off-diagonal sum.
        const double stat = x.dot(q.mat() * x) / pairs;
        sum += stat;
        sum_sq += stat * stat;
    }
    const double count = static_cast<double>(o.draws);
    const double mean = sum / count;
    const double se = std::sqrt(std::max(0.0, sum_sq / count - mean * mean) / count);
    r.pass = mean >= o.lo && mean <= o.hi;
    r.detail = format("mean %.4f (se %.4f) over draws, window [%.2f, ", mean, se, o.lo) + format("%.2f]", o.hi);
    r.seconds = clock.seconds();
    return r;
}

SuiteResult verify_trace_monotonicity(const TraceMonotonicityOptions& o) {
    Stopwatch clock;
    SuiteResult r{"trace-monotonicity", true, "", 0.0};
    CounterRng rng(o.seed, "verify-trace");
    std::size_t violations = 0, checks = 0;
    double worst = -1.0;
    for (std::size_t inst = 0; inst < o.instances; ++inst) {
        const std::size_t rank = 1 + rng.uniform_index(o.n);
        const DenseSymMatrix z_star = random_psd(o.n, rank, rng);
        std::vector<std::size_t> columns;
        const double keep = rng.uniform();
        for (std::size_t i = 0; i < o.n; ++i)
            if (rng.uniform() < keep * 0.5) columns.push_back(i);
        const DenseSymMatrix z = project_out_columns(z_star, columns);
        for (unsigned t = 1; t <= o.max_t; ++t) {
            const double before = trace_of_power(z_star, t);
            const double after = trace_of_power(z, t);
            const double excess = (after - before) / std::max(std::abs(before), 1e-300);
            worst = std::max(worst, excess);
            ++checks;
            if (excess > o.slack) ++violations;
        }
    }
    r.pass = violations == 0;
    r.detail = format("%.0f violations in %.0f checks, max relative excess %.3g", static_cast<double>(violations),
                      static_cast<double>(checks), worst);
    r.seconds = clock.seconds();
    return r;
}

SuiteResult verify_rounding(const RoundingOptions& o) {
    Stopwatch clock;
    SuiteResult r{"rounding", true, "", 0.0};
    CounterRng rng(o.seed, "verify-rounding");
    double worst_margin = 1e300;
    for (double delta_star : o.delta_stars) {
        MetaParams meta;
        meta.delta_star = delta_star;
        for (std::size_t m_idx = 0; m_idx < o.matrices; ++m_idx) {
            // M = delta* v v^T + (1 - delta*) R / ||R||_*, R a random low-rank PSD matrix
            // whose competing directions can outrank v: ||M||_* = 1 and <M, v v^T> >= delta*.
            Vector v(static_cast<Eigen::Index>(o.n));
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
            v.normalize();
            const std::size_t rank = 1 + rng.uniform_index(2 * meta.rounding_candidates());
            const DenseSymMatrix noise = random_psd(o.n, std::min(rank, o.n), rng);
            const double nuclear = noise.mat().trace();
            const Matrix m = delta_star * v * v.transpose() + (1.0 - delta_star) / nuclear * noise.mat();
            const RoundingResult base = round_to_vector(DenseSymMatrix::symmetric_part(m), meta, 0);
            const auto k = static_cast<std::size_t>(base.candidates.cols());
            std::vector<double> overlap(k);
            for (std::size_t c = 0; c < k; ++c) {
                const double dot = base.candidates.col(static_cast<Eigen::Index>(c)).dot(v);
                overlap[c] = dot * dot;
            }
            double sum = 0.0, sum_sq = 0.0;
            for (std::size_t seed = 0; seed < o.seeds; ++seed) {
                const double val = overlap[rounding_choice(derive_stream(o.seed, "rounding-seed", seed), k)];
                sum += val;
                sum_sq += val * val;
            }
            const double count = static_cast<double>(o.seeds);
            const double mean = sum / count;
            const double se = std::sqrt(std::max(0.0, sum_sq / count - mean * mean) / count);
            const double target = delta_star * delta_star * delta_star / 8.0;
            worst_margin = std::min(worst_margin, mean - (target - 3.0 * se));
            if (mean < target - 3.0 * se) r.pass = false;
        }
    }
    r.detail = format("min margin over target %.4f across %.0f matrices", worst_margin,
                      static_cast<double>(o.matrices * o.delta_stars.size()));
    r.seconds = clock.seconds();
    return r;
}

SuiteResult verify_sensitivity(const SensitivitySuiteOptions& o) {
    Stopwatch clock;
    SuiteResult r{"sensitivity", false, "", 0.0};
    const SbmSample sample = sample_sbm(SbmParams{o.n, o.d, o.epsilon, derive_stream(o.seed, "sensitivity", 0)});
    const SensitivityReport report = sensitivity_probe(sample.graph, TruncationParams::explicit_delta(o.delta),
                                                       SawConfig{o.s, o.epsilon, o.d, o.n}, o.edits,
                                                       derive_stream(o.seed, "sensitivity", 1));
    r.pass = report.all_pass() && report.rows.size() == o.edits;
    r.detail = format("%.0f edits, max ||dQ||_1 / (n Delta^s) = %.3g", static_cast<double>(report.rows.size()),
                      report.max_ratio());
    r.seconds = clock.seconds();
    return r;
}

std::vector<SuiteResult> run_quick_verification(std::uint64_t seed) {
    OracleSuiteOptions oracle;
    oracle.random_inputs = 10;
    oracle.sbm_inputs = 10;
    oracle.max_n = 11;
    oracle.max_n_s5 = 9;
    oracle.seed = seed;
    UnbiasednessOptions unbiased;
    unbiased.draws = 400;
    unbiased.lo = 0.85;
    unbiased.hi = 1.15;
    unbiased.seed = seed;
    TraceMonotonicityOptions trace;
    trace.instances = 40;
    trace.seed = seed;
    RoundingOptions rounding;
    rounding.matrices = 4;
    rounding.seeds = 2000;
    rounding.seed = seed;
    SensitivitySuiteOptions sensitivity;
    sensitivity.n = 80;
    sensitivity.edits = 20;
    sensitivity.seed = seed;
    return {verify_oracle_equivalence(oracle), verify_unbiasedness(unbiased), verify_trace_monotonicity(trace),
            verify_rounding(rounding), verify_sensitivity(sensitivity)};
}

}  // namespace sawrec
