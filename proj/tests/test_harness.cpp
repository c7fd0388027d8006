#include "sawrec/harness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace sawrec;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.n = {120};
    c.d = {5.0};
    c.epsilon = {1.5};
    c.s = {3};
    c.rho = {0.0, 0.05};
    c.attacks = {AttackTemplate{CorruptionModel::RandomFlip, 1, 2}, AttackTemplate{CorruptionModel::HubPlant, 2, 2}};
    c.meta.t = 2;
    c.meta.delta_star = 1.0;
    c.trials_per_point = 3;
    c.scale_trials = 2;
    c.master_seed = 99;
    return c;
}

std::string csv_of(const SweepResult& r) {
    std::ostringstream os;
    write_results_csv(os, r);
    return os.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(ExperimentConfig, ParsesDocumentedSchema) {
    const auto j = nlohmann::json::parse(R"({
        "grid": {"n": [100, 200], "d": [4], "epsilon": [1.0], "s": [2, 3]},
        "truncation": {"mode": "explicit", "delta": 40},
        "meta": {"c_star": 2.0, "t": 3, "gamma": 5, "delta_star": 0.5},
        "corruption": {"rho": [0, 0.01], "models": [{"model": "clique_plant", "model_params": {"clique_size": 6}}]},
        "trials_per_point": 4, "scale_trials": 2, "master_seed": 7, "output_dir": "out", "threads": 2,
        "report_conditions": false})");
    const ExperimentConfig c = j.get<ExperimentConfig>();
    EXPECT_EQ(c.n, (std::vector<std::size_t>{100, 200}));
    EXPECT_EQ(c.truncation.delta, 40u);
    EXPECT_EQ(c.meta.t, 3u);
    EXPECT_EQ(c.attacks.at(0).model, CorruptionModel::CliquePlant);
    EXPECT_EQ(c.attacks.at(0).clique_size, 6u);
    EXPECT_FALSE(c.report_conditions);
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(expand_grid(c).size(), 2u * 2u * 2u);

    const nlohmann::json back = c;
    const ExperimentConfig again = back.get<ExperimentConfig>();
    EXPECT_EQ(nlohmann::json(again), back);
}

TEST(ExperimentConfig, RejectsUnknownKeysAndBadPoints) {
    EXPECT_THROW(nlohmann::json::parse(R"({"grid": {"n": [10], "d": [1], "epsilon": [1], "s": [2]}, "bogus": 1})")
                     .get<ExperimentConfig>(),
                 std::invalid_argument);
    ExperimentConfig c = small_config();
    c.epsilon = {1.0, 2.5};  // second value is invalid
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_THROW(run_sweep(c, 1), std::invalid_argument);
    c = small_config();
    c.s = {7};  // no fast backend at n = 120
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.rho = {-0.1};
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunSweep, EmptyGridGivesHeaderOnlyCsv) {
    ExperimentConfig c = small_config();
    c.n.clear();
    const SweepResult r = run_sweep(c, 1);
    const std::string csv = csv_of(r);
    EXPECT_EQ(line_count(csv), 1u);
    EXPECT_EQ(csv.rfind("schema_version,", 0), 0u);
}

TEST(RunSweep, SinglePointSingleTrialIsReproducible) {
    ExperimentConfig c = small_config();
    c.rho = {0.0};
    c.attacks.resize(1);
    c.trials_per_point = 1;
    const std::string first = csv_of(run_sweep(c, 1));
    EXPECT_EQ(line_count(first), 2u);
    EXPECT_EQ(csv_of(run_sweep(c, 1)), first);
}

TEST(RunSweep, ThreadCountDoesNotChangeOutput) {
    const ExperimentConfig c = small_config();
    const SweepResult one = run_sweep(c, 1);
    EXPECT_EQ(csv_of(run_sweep(c, 3)), csv_of(one));
    EXPECT_EQ(csv_of(run_sweep(c, 8)), csv_of(one));
    EXPECT_EQ(summarize(run_sweep(c, 4)), summarize(one));
}

TEST(RunSweep, RowsRespectBudgetAndRanges) {
    const SweepResult r = run_sweep(small_config(), 2);
    ASSERT_EQ(r.trials.size(), 4u * 3u);
    for (const auto& t : r.trials) {
        const GridPoint& p = r.points[t.point];
        EXPECT_LE(t.edit_count, static_cast<std::size_t>(p.rho * 120 + 1e-9));
        EXPECT_GE(t.correlation_saw, 0.0);
        EXPECT_LE(t.correlation_saw, 1.0);
        EXPECT_GE(t.correlation_baseline, 0.0);
        EXPECT_LE(t.correlation_baseline, 1.0);
        EXPECT_TRUE(t.conditions.has_value());
    }
    // Uncorrupted samples are shared across attacks at the same point.
    EXPECT_EQ(r.trials[0].seed, r.trials[3].seed);
    EXPECT_EQ(r.trials[0].correlation_saw, r.trials[3].correlation_saw);
}

TEST(RunSweep, SummaryMatchesRows) {
    const SweepResult r = run_sweep(small_config(), 1);
    const nlohmann::json s = summarize(r);
    ASSERT_EQ(s.at("points").size(), 4u);
    std::vector<double> vals;
    for (const auto& t : r.trials)
        if (t.point == 2) vals.push_back(t.correlation_saw);
    const SummaryStats st = summary_stats(vals);
    EXPECT_DOUBLE_EQ(s.at("points")[2].at("correlation_saw").at("mean").get<double>(), st.mean);
    std::ostringstream dat;
    write_gnuplot_dat(dat, r);
    EXPECT_EQ(line_count(dat.str()), 5u);
}

TEST(SummaryStats, MeanStderrMedian) {
    const SummaryStats s = summary_stats({4.0, 1.0, 3.0, 2.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_NEAR(s.stderr_, std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0 / 4.0), 1e-15);
    EXPECT_DOUBLE_EQ(summary_stats({5.0, 1.0, 3.0}).median, 3.0);
    EXPECT_EQ(summary_stats({}).mean, 0.0);
}

TEST(ResolveThreads, EnvironmentCap) {
    ::setenv("SAWRECOVER_THREADS", "2", 1);
    EXPECT_EQ(resolve_threads(8), 2u);
    EXPECT_EQ(resolve_threads(1), 1u);
    ::setenv("SAWRECOVER_THREADS", "0", 1);
    EXPECT_EQ(resolve_threads(8), 8u);
    ::unsetenv("SAWRECOVER_THREADS");
    EXPECT_GE(resolve_threads(0), 1u);
}
