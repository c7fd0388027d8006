#pragma once

#include "sawrec/graph.hpp"
#include "sawrec/numerics.hpp"
#include "sawrec/saw_poly.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sawrec {

/// Input that carries no usable signal (all indices projected, zero matrix, no edges).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters of the scale-free recovery program.
struct MetaParams {
    double c_star = 1.0;      // C*
    unsigned t = 2;           // Schatten half-exponent; Z* = q^(2t-2)
    double gamma = 10.0;      // diagonal cap gamma^2 / n
    double delta_star = 0.25; // rounding picks among the top ceil(2 / delta_star) eigenvectors

    void validate() const;
    /// t* = (1 - 1/t)^(-1).
    double t_star() const { return 1.0 / (1.0 - 1.0 / static_cast<double>(t)); }
    std::size_t rounding_candidates() const;
    /// max(2, round(ln n / C*)).
    static unsigned desk_t(std::size_t n, double c_star);
};

struct RecoveryOutput {
    DenseSymMatrix m_matrix;
    Vector x_hat;                              // empty until rounded
    std::vector<std::size_t> projected_indices;  // S, ascending
    double scale = 1.0;
    double diag_cap = 0.0;       // gamma^2 / n
    double max_z_diagonal = 0.0; // max_i Z_ii after projection
    bool diag_cap_violated = false;
    std::optional<double> m_nuclear;
    std::vector<double> eigenvalues_inspected;
    std::size_t chosen_index = 0;
};

struct ConditionReport {
    double trace_2t = 0.0;            // Tr q^(2t)
    double alpha = 0.0;               // grid minimizer
    double min_shifted_trace = 0.0;   // min_alpha Tr (q - alpha v v^T)^(2t)
    double delta_star_emp = 0.0;
    double sensitivity_sum = 0.0;     // sum_i (q^(2t-2))_ii^2
    double trace_2t_minus_2 = 0.0;    // Tr q^(2t-2)
    double gamma_emp = 0.0;
    double zeta_q = 0.0;
    double zeta_qtilde = 0.0;
    double beta = 0.0;
    double correlation_lhs = 0.0, correlation_rhs = 0.0;
    double sensitivity_lhs = 0.0, sensitivity_rhs = 0.0;
    double approximability_lhs = 0.0, approximability_rhs = 0.0;
    double perturbation_lhs = 0.0, perturbation_rhs = 0.0;
    bool correlation_ok = false;
    bool sensitivity_ok = false;
    bool approximability_ok = false;
    bool perturbation_ok = false;
};

struct ScaleEstimate {
    double scale = 0.0;               // (mean of Tr Q^(2t))^(1/(2t))
    std::vector<double> trial_norms;  // per-trial Schatten-2t norms
    bool below_half_n = false;        // scale < n/2 (soft warning)
};

struct SeparationReport {
    std::vector<double> norm_q;         // ||Q||_2t per trial
    std::vector<double> norm_centered;  // ||Q - x x^T||_2t per trial
    double mean_norm_q = 0.0;
    double mean_norm_centered = 0.0;
    double ratio = 0.0;                 // mean_norm_centered / mean_norm_q
};

/// Sorted indices i with z(i, i) > cap.
std::vector<std::size_t> large_diagonal_indices(const DenseSymMatrix& z, double cap);
/// (I - P) z (I - P), P the orthogonal projector onto span{z e_i : i in columns}.
DenseSymMatrix project_out_columns(const DenseSymMatrix& z, const std::vector<std::size_t>& columns);

ScaleEstimate estimate_scale(const SbmParams& params, const TruncationParams& t, const SawConfig& cfg,
                             const MetaParams& meta, std::size_t trials, std::uint64_t seed);

/// Near-optimal solution of the capped Schatten program, then M = Z q + q Z.
RecoveryOutput scale_free_recover(const DenseSymMatrix& q_tilde_scaled, const MetaParams& meta);

struct RoundingResult {
    Vector vector;
    std::size_t chosen_index = 0;
    std::vector<double> candidate_eigenvalues;
    Matrix candidates;
};

/// Index in [0, candidates) drawn from the rounding stream of `seed`.
std::size_t rounding_choice(std::uint64_t seed, std::size_t candidates);

/// Uniform choice among the top ceil(2 / delta_star) eigenvectors.
RoundingResult round_to_vector(const DenseSymMatrix& m, const MetaParams& meta, std::uint64_t seed);

/// Truncate, build Q, rescale, recover and round.
RecoveryOutput sbm_recover(const Graph& g_corrupted, const SbmParams& params, const TruncationParams& t,
                           const SawConfig& cfg, const MetaParams& meta, double scale, std::uint64_t seed);

/// Top eigenvector of y with the first nonzero coordinate positive.
Vector baseline_spectral(const DenseSymMatrix& y, std::uint64_t seed);

/// Empirical condition parameters; q is expected at unit Schatten-2t scale.
ConditionReport check_conditions(const DenseSymMatrix& q, const DenseSymMatrix& q_tilde, const Vector& v,
                                 const MetaParams& meta);

/// |<x, x_hat>| / sqrt(n).
double correlation(const CommunityVector& x, const Vector& x_hat);

SeparationReport schatten_separation_diag(const SbmParams& params, const TruncationParams& t,
                                          const SawConfig& cfg, const MetaParams& meta, std::size_t trials,
                                          std::uint64_t seed);

/// Tr (q - alpha v v^T)^p for even p, via Krylov moments v^T q^a v.
double shifted_trace_power(const DenseSymMatrix& q, const Vector& v, double alpha, int p, double trace_qp);

void to_json(nlohmann::json& j, const RecoveryOutput& r);
void to_json(nlohmann::json& j, const ConditionReport& r);

}  // namespace sawrec
