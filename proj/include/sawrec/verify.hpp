#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sawrec {

/// Outcome of one self-check suite.
struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct OracleSuiteOptions {
    std::size_t random_inputs = 50;
    std::size_t sbm_inputs = 50;
    std::size_t max_n = 14;
    std::size_t max_n_s5 = 12;
    double rel_tol = 1e-9;
    std::uint64_t seed = 1;
};
/// q_matrix against q_oracle on random and SBM-derived inputs, s = 1..4 (and 5 on small n).
SuiteResult verify_oracle_equivalence(const OracleSuiteOptions& o = {});

struct UnbiasednessOptions {
    std::size_t n = 40;
    double d = 5.0;
    double epsilon = 0.8;
    unsigned s = 3;
    std::size_t draws = 2000;
    double lo = 0.95, hi = 1.05;
    std::uint64_t seed = 2;
};
/// Mean over SBM draws of (1 / (n (n-1))) sum_{i != j} x_i x_j Q_ij lies in [lo, hi].
SuiteResult verify_unbiasedness(const UnbiasednessOptions& o = {});

struct TraceMonotonicityOptions {
    std::size_t instances = 200;
    std::size_t n = 30;
    unsigned max_t = 5;
    double slack = 1e-9;
    std::uint64_t seed = 3;
};
/// Tr(Z*^t) >= Tr(((I - P) Z* (I - P))^t) for random PSD Z* and random column sets.
SuiteResult verify_trace_monotonicity(const TraceMonotonicityOptions& o = {});

struct RoundingOptions {
    std::size_t matrices = 20;
    std::size_t n = 40;
    std::vector<double> delta_stars{0.1, 0.25, 0.5};
    std::size_t seeds = 10000;
    std::uint64_t seed = 4;
};
/// Mean <v_hat, v>^2 >= delta*^3 / 8 - 3 SE on matrices with nuclear norm 1 and <M, v v^T> >= delta*.
SuiteResult verify_rounding(const RoundingOptions& o = {});

struct SensitivitySuiteOptions {
    std::size_t n = 200;
    double d = 4.0;
    double epsilon = 1.0;
    std::uint64_t delta = 40;
    unsigned s = 3;
    std::size_t edits = 100;
    std::uint64_t seed = 5;
};
/// Every single-edge edit of a truncated graph moves Q by at most n * delta^s in entrywise l1.
SuiteResult verify_sensitivity(const SensitivitySuiteOptions& o = {});

/// Reduced-size versions of all suites, for the `verify` command.
std::vector<SuiteResult> run_quick_verification(std::uint64_t seed);

}  // namespace sawrec
