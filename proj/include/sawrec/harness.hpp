#pragma once

#include "sawrec/adversary.hpp"
#include "sawrec/graph.hpp"
#include "sawrec/recovery.hpp"
#include "sawrec/saw_poly.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sawrec {

inline constexpr int kCsvSchemaVersion = 1;

struct TruncationConfig {
    TruncationParams::Mode mode = TruncationParams::Mode::Explicit;
    std::optional<std::uint64_t> delta;  // Explicit; absent -> ceil(10 d)
    double a = 1000.0;                   // PaperFormula

    TruncationParams resolve(double d, double epsilon, unsigned s) const;
};

struct MetaConfig {
    double c_star = 1.0;
    std::optional<unsigned> t;  // absent -> max(2, round(ln n / C*))
    double gamma = 10.0;
    double delta_star = 0.25;

    MetaParams resolve(std::size_t n) const;
};

/// Attack template; rho and seed are filled per grid point.
struct AttackTemplate {
    CorruptionModel model = CorruptionModel::RandomFlip;
    std::size_t hub_count = 1;
    std::size_t clique_size = 2;
};

struct ExperimentConfig {
    std::vector<std::size_t> n;
    std::vector<double> d;
    std::vector<double> epsilon;
    std::vector<unsigned> s;
    std::vector<double> rho{0.0};
    std::vector<AttackTemplate> attacks{AttackTemplate{}};
    TruncationConfig truncation;
    MetaConfig meta;
    std::size_t trials_per_point = 1;
    std::size_t scale_trials = 3;
    std::uint64_t master_seed = 0;
    std::string output_dir = "sweep_out";
    unsigned threads = 1;  // 0 -> hardware concurrency
    bool report_conditions = true;

    /// Rejects any grid point that violates a module precondition.
    void validate() const;
};

void from_json(const nlohmann::json& j, ExperimentConfig& c);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

struct GridPoint {
    std::size_t index = 0;
    SbmParams sbm;  // seed unused
    SawConfig saw;
    TruncationParams truncation;
    MetaParams meta;
    double rho = 0.0;
    AttackTemplate attack;
    std::size_t scale_key = 0;  // index into the distinct (n, d, eps, s, delta, t) tuples
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

struct TrialResult {
    std::size_t point = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    std::size_t edit_count = 0;
    std::size_t edge_count = 0;
    double correlation_saw = 0.0;
    double correlation_baseline = 0.0;
    bool degenerate = false;
    double scale = 0.0;
    std::size_t projected_count = 0;
    bool diag_cap_violated = false;
    std::optional<ConditionReport> conditions;
    double wall_time_ms = 0.0;
};

struct SweepResult {
    std::vector<GridPoint> points;
    std::vector<ScaleEstimate> scales;  // by scale_key
    std::vector<TrialResult> trials;    // point-major, trial-minor
};

/// Thread count after applying the SAWRECOVER_THREADS cap (0 or unset -> no cap).
unsigned resolve_threads(unsigned requested);

SweepResult run_sweep(const ExperimentConfig& config, unsigned threads);
/// Runs the sweep and writes results.csv, summary.json, summary.dat and timings.csv.
SweepResult run_sweep_to_dir(const ExperimentConfig& config);

void write_results_csv(std::ostream& os, const SweepResult& result);
void write_timings_csv(std::ostream& os, const SweepResult& result);
nlohmann::json summarize(const SweepResult& result);
void write_gnuplot_dat(std::ostream& os, const SweepResult& result);

struct SummaryStats {
    double mean = 0.0;
    double stderr_ = 0.0;
    double median = 0.0;
};
SummaryStats summary_stats(std::vector<double> values);

}  // namespace sawrec
