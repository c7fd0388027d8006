#include "sawrec/recovery.hpp"

#include "sawrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sawrec {

void MetaParams::validate() const {
    if (!(c_star > 0.0)) throw std::invalid_argument("MetaParams: C* must be positive");
    if (t < 2) throw std::invalid_argument("MetaParams: t must be at least 2");
    if (!(gamma > 0.0)) throw std::invalid_argument("MetaParams: gamma must be positive");
    if (!(delta_star > 0.0 && delta_star <= 1.0)) throw std::invalid_argument("MetaParams: delta* must lie in (0, 1]");
}

std::size_t MetaParams::rounding_candidates() const {
    return static_cast<std::size_t>(std::ceil(2.0 / delta_star - 1e-12));
}

unsigned MetaParams::desk_t(std::size_t n, double c_star) {
    if (!(c_star > 0.0)) throw std::invalid_argument("desk_t: C* must be positive");
    const double t = std::round(std::log(static_cast<double>(n)) / c_star);
    return static_cast<unsigned>(std::max(2.0, t));
}

std::vector<std::size_t> large_diagonal_indices(const DenseSymMatrix& z, double cap) {
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < z.n(); ++i)
        if (z(i, i) > cap) out.push_back(static_cast<std::size_t>(i));
    return out;
}

DenseSymMatrix project_out_columns(const DenseSymMatrix& z, const std::vector<std::size_t>& columns) {
    if (columns.empty()) return z;
    const Eigen::Index n = z.n();
    Matrix block(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) block.col(static_cast<Eigen::Index>(c)) = z.mat().col(static_cast<Eigen::Index>(columns[c]));
    Eigen::ColPivHouseholderQR<Matrix> qr(block);
    const Eigen::Index rank = qr.rank();
    if (rank == 0) return z;
    const Matrix basis = qr.householderQ() * Matrix::Identity(n, rank);
    const Matrix zu = z.mat() * basis;          // n x r
    const Matrix core = basis.transpose() * zu;  // r x r
    Matrix projected = z.mat() - basis * zu.transpose() - zu * basis.transpose() + basis * core * basis.transpose();
    return DenseSymMatrix::symmetric_part(projected);
}

ScaleEstimate estimate_scale(const SbmParams& params, const TruncationParams& t, const SawConfig& cfg,
                             const MetaParams& meta, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("estimate_scale: need at least one trial");
    meta.validate();
    const int p = static_cast<int>(2 * meta.t);
    ScaleEstimate est;
    double trace_sum = 0.0;
    for (std::size_t r = 0; r < trials; ++r) {
        SbmParams trial = params;
        trial.seed = derive_stream(seed, "scale-trial", r);
        const SbmSample sample = sample_sbm(trial);
        const DenseSymMatrix q = q_matrix(centered_adjacency(truncate(sample.graph, t), params.d), cfg);
        const double tr = trace_power(q, p);
        trace_sum += tr;
        est.trial_norms.push_back(std::pow(tr, 1.0 / p));
    }
    est.scale = std::pow(trace_sum / static_cast<double>(trials), 1.0 / p);
    est.below_half_n = est.scale < 0.5 * static_cast<double>(params.n);
    return est;
}

RecoveryOutput scale_free_recover(const DenseSymMatrix& q_tilde_scaled, const MetaParams& meta) {
    meta.validate();
    const Eigen::Index n = q_tilde_scaled.n();
    const DenseSymMatrix zstar = mat_power(q_tilde_scaled, 2 * meta.t - 2);

    RecoveryOutput out;
    out.diag_cap = meta.gamma * meta.gamma / static_cast<double>(n);
    out.projected_indices = large_diagonal_indices(zstar, out.diag_cap);
    if (n > 0 && out.projected_indices.size() == static_cast<std::size_t>(n))
        throw DegenerateInputError("scale_free_recover: every diagonal entry exceeds the cap");

    const DenseSymMatrix z = project_out_columns(zstar, out.projected_indices);
    out.max_z_diagonal = n > 0 ? z.mat().diagonal().maxCoeff() : 0.0;
    out.diag_cap_violated = out.max_z_diagonal > out.diag_cap + 1e-9;

    const Matrix zq = mat_mul(z.mat(), q_tilde_scaled.mat());
    out.m_matrix = DenseSymMatrix(Matrix(zq + zq.transpose()));
    if (n <= 512) {
        double nuclear = 0.0;
        for (double l : eigenvalues(out.m_matrix)) nuclear += std::abs(l);
        out.m_nuclear = nuclear;
    }
    return out;
}

std::size_t rounding_choice(std::uint64_t seed, std::size_t candidates) {
    if (candidates == 0) throw std::invalid_argument("rounding_choice: no candidates");
    CounterRng rng(seed, "round");
    return static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(candidates)));
}

RoundingResult round_to_vector(const DenseSymMatrix& m, const MetaParams& meta, std::uint64_t seed) {
    meta.validate();
    if (m.n() == 0 || m.mat().cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateInputError("round_to_vector: matrix is zero");
    const auto k = static_cast<Eigen::Index>(std::min<std::size_t>(meta.rounding_candidates(), static_cast<std::size_t>(m.n())));
    const Spectrum spectrum = top_eigs(m, k);
    RoundingResult result;
    result.chosen_index = rounding_choice(seed, static_cast<std::size_t>(k));
    result.vector = spectrum.eigenvectors.col(static_cast<Eigen::Index>(result.chosen_index));
    result.candidate_eigenvalues = spectrum.eigenvalues;
    result.candidates = spectrum.eigenvectors;
    return result;
}

RecoveryOutput sbm_recover(const Graph& g_corrupted, const SbmParams& params, const TruncationParams& t,
                           const SawConfig& cfg, const MetaParams& meta, double scale, std::uint64_t seed) {
    if (!(scale > 0.0)) throw std::invalid_argument("sbm_recover: scale must be positive");
    const Graph truncated = truncate(g_corrupted, t);
    if (truncated.edge_count() == 0) throw DegenerateInputError("sbm_recover: no edges survive truncation");
    const DenseSymMatrix q = q_matrix(centered_adjacency(truncated, params.d), cfg);
    RecoveryOutput out = scale_free_recover(q.scaled(1.0 / scale), meta);
    out.scale = scale;
    RoundingResult rounded = round_to_vector(out.m_matrix, meta, seed);
    out.x_hat = std::move(rounded.vector);
    out.chosen_index = rounded.chosen_index;
    out.eigenvalues_inspected = std::move(rounded.candidate_eigenvalues);
    return out;
}

Vector baseline_spectral(const DenseSymMatrix& y, std::uint64_t seed) {
    if (y.n() == 0 || y.mat().cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateInputError("baseline_spectral: matrix is zero");
    EigOptions opts;
    opts.start_seed = seed;
    const Spectrum s = top_eigs(y, 1, opts);
    Vector v = s.eigenvectors.col(0);
    sign_normalize(v);
    return v;
}

double shifted_trace_power(const DenseSymMatrix& q, const Vector& v, double alpha, int p, double trace_qp) {
    if (p < 1 || p > 24) throw std::invalid_argument("shifted_trace_power: exponent out of range");
    // moments[a] = v^T q^a v
    std::vector<double> moments(static_cast<std::size_t>(p));
    Vector u = v;
    for (int a = 0; a < p; ++a) {
        moments[static_cast<std::size_t>(a)] = v.dot(u);
        if (a + 1 < p) u = q.mat() * u;
    }
    // Expand Tr (q - alpha P)^p over words in {q, P}; a word with P at positions
    // i_1 < ... < i_j contributes prod of moments over the cyclic gaps.
    double total = trace_qp;
    for (unsigned mask = 1; mask < (1u << p); ++mask) {
        std::vector<int> pos;
        for (int i = 0; i < p; ++i)
            if (mask & (1u << i)) pos.push_back(i);
        double term = std::pow(-alpha, static_cast<double>(pos.size()));
        for (std::size_t a = 0; a < pos.size(); ++a) {
            const int next = a + 1 < pos.size() ? pos[a + 1] : pos[0] + p;
            term *= moments[static_cast<std::size_t>(next - pos[a] - 1)];
        }
        total += term;
    }
    return total;
}

ConditionReport check_conditions(const DenseSymMatrix& q, const DenseSymMatrix& q_tilde, const Vector& v,
                                 const MetaParams& meta) {
    meta.validate();
    if (q.n() != q_tilde.n() || q.n() != v.size()) throw std::invalid_argument("check_conditions: dimension mismatch");
    const auto n = static_cast<double>(q.n());
    const int p = static_cast<int>(2 * meta.t);
    ConditionReport r;

    const DenseSymMatrix h = mat_power(q, meta.t - 1);  // q^(t-1); (q^(2t-2))_ii = ||row i of h||^2
    const DenseSymMatrix qt = DenseSymMatrix::symmetric_part(mat_mul(h.mat(), q.mat()));
    r.trace_2t = qt.mat().squaredNorm();
    const Vector diag = h.mat().rowwise().squaredNorm();
    r.trace_2t_minus_2 = diag.sum();
    r.sensitivity_sum = diag.squaredNorm();
    r.gamma_emp = r.trace_2t_minus_2 > 0.0 ? n * r.sensitivity_sum / (r.trace_2t_minus_2 * r.trace_2t_minus_2)
                                           : std::numeric_limits<double>::infinity();

    r.min_shifted_trace = std::numeric_limits<double>::infinity();
    for (int step = 1; step <= 20; ++step) {
        const double alpha = 0.1 * step;
        const double tr = shifted_trace_power(q, v, alpha, p, r.trace_2t);
        if (tr < r.min_shifted_trace) {
            r.min_shifted_trace = tr;
            r.alpha = alpha;
        }
    }
    if (r.trace_2t > 0.0) {
        const double ratio = std::max(0.0, r.min_shifted_trace) / r.trace_2t;
        r.delta_star_emp = std::clamp(1.0 - std::pow(ratio, 1.0 / p), 0.0, 1.0);
    }

    r.zeta_q = max_row_l1(q.mat());
    r.zeta_qtilde = max_row_l1(q_tilde.mat());
    r.beta = entry_l1(q.mat() - q_tilde.mat()) / n;
    const double zeta = std::max(r.zeta_q, r.zeta_qtilde);

    r.correlation_lhs = r.min_shifted_trace;
    r.correlation_rhs = std::pow(1.0 - meta.delta_star, p) * r.trace_2t;
    r.correlation_ok = r.correlation_lhs <= r.correlation_rhs;
    r.sensitivity_lhs = r.sensitivity_sum;
    r.sensitivity_rhs = meta.gamma / n * r.trace_2t_minus_2 * r.trace_2t_minus_2;
    r.sensitivity_ok = r.sensitivity_lhs <= r.sensitivity_rhs;
    r.approximability_lhs = std::exp(2.0 * meta.c_star) * zeta * zeta / std::sqrt(r.gamma_emp);
    r.approximability_rhs = r.delta_star_emp / 4.0;
    r.approximability_ok = r.approximability_lhs <= r.approximability_rhs;
    r.perturbation_lhs = 8.0 * zeta * r.gamma_emp * r.gamma_emp * r.beta;
    r.perturbation_rhs = r.delta_star_emp / 4.0;
    r.perturbation_ok = r.perturbation_lhs <= r.perturbation_rhs;
    return r;
}

double correlation(const CommunityVector& x, const Vector& x_hat) {
    if (x.size() != static_cast<std::size_t>(x_hat.size())) throw std::invalid_argument("correlation: length mismatch");
    if (x.size() == 0) return 0.0;
    const double c = std::abs(x.as_vector().dot(x_hat)) / std::sqrt(static_cast<double>(x.size()));
    return std::min(1.0, c);
}

SeparationReport schatten_separation_diag(const SbmParams& params, const TruncationParams& t,
                                          const SawConfig& cfg, const MetaParams& meta, std::size_t trials,
                                          std::uint64_t seed) {
    meta.validate();
    const int p = static_cast<int>(2 * meta.t);
    SeparationReport rep;
    for (std::size_t r = 0; r < trials; ++r) {
        SbmParams trial = params;
        trial.seed = derive_stream(seed, "separation-trial", r);
        const SbmSample sample = sample_sbm(trial);
        const DenseSymMatrix q = q_matrix(centered_adjacency(truncate(sample.graph, t), params.d), cfg);
        const Vector x = sample.x.as_vector();
        const DenseSymMatrix centered(Matrix(q.mat() - x * x.transpose()));
        rep.norm_q.push_back(std::pow(trace_power(q, p), 1.0 / p));
        rep.norm_centered.push_back(std::pow(trace_power(centered, p), 1.0 / p));
    }
    if (trials > 0) {
        for (std::size_t r = 0; r < trials; ++r) {
            rep.mean_norm_q += rep.norm_q[r];
            rep.mean_norm_centered += rep.norm_centered[r];
        }
        rep.mean_norm_q /= static_cast<double>(trials);
        rep.mean_norm_centered /= static_cast<double>(trials);
        rep.ratio = rep.mean_norm_centered / rep.mean_norm_q;
    }
    return rep;
}

void to_json(nlohmann::json& j, const RecoveryOutput& r) {
    j = nlohmann::json{{"scale", r.scale},
                       {"diag_cap", r.diag_cap},
                       {"max_z_diagonal", r.max_z_diagonal},
                       {"diag_cap_violated", r.diag_cap_violated},
                       {"projected_indices", r.projected_indices},
                       {"eigenvalues_inspected", r.eigenvalues_inspected},
                       {"chosen_index", r.chosen_index},
                       {"x_hat", std::vector<double>(r.x_hat.data(), r.x_hat.data() + r.x_hat.size())}};
    j["m_nuclear"] = r.m_nuclear ? nlohmann::json(*r.m_nuclear) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const ConditionReport& r) {
    j = nlohmann::json{{"trace_2t", r.trace_2t},
                       {"alpha", r.alpha},
                       {"min_shifted_trace", r.min_shifted_trace},
                       {"delta_star_emp", r.delta_star_emp},
                       {"sensitivity_sum", r.sensitivity_sum},
                       {"trace_2t_minus_2", r.trace_2t_minus_2},
                       {"gamma_emp", r.gamma_emp},
                       {"zeta_q", r.zeta_q},
                       {"zeta_qtilde", r.zeta_qtilde},
                       {"beta", r.beta},
                       {"correlation_lhs", r.correlation_lhs},
                       {"correlation_rhs", r.correlation_rhs},
                       {"sensitivity_lhs", r.sensitivity_lhs},
                       {"sensitivity_rhs", r.sensitivity_rhs},
                       {"approximability_lhs", r.approximability_lhs},
                       {"approximability_rhs", r.approximability_rhs},
                       {"perturbation_lhs", r.perturbation_lhs},
                       {"perturbation_rhs", r.perturbation_rhs},
                       {"satisfied",
                        {{"correlation", r.correlation_ok},
                         {"sensitivity", r.sensitivity_ok},
                         {"approximability", r.approximability_ok},
                         {"perturbation", r.perturbation_ok}}}};
}

}  // namespace sawrec
