#include "sawrec/harness.hpp"

#include "sawrec/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace sawrec {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string attack_param(const AttackTemplate& a) {
    switch (a.model) {
        case CorruptionModel::HubPlant: return std::to_string(a.hub_count);
        case CorruptionModel::CliquePlant: return std::to_string(a.clique_size);
        default: return "";
    }
}

// Identifies the uncorrupted sample stream of a point, independent of rho and attack.
std::string sample_key(const GridPoint& p) {
    return "n=" + std::to_string(p.sbm.n) + ";d=" + fmt_double(p.sbm.d) + ";eps=" + fmt_double(p.sbm.epsilon);
}

std::string corruption_key(const GridPoint& p) {
    return sample_key(p) + ";rho=" + fmt_double(p.rho) + ";model=" + to_string(p.attack.model) + ";param=" +
           attack_param(p.attack);
}

// Runs fn(i) for i in [0, count) on `threads` workers; each index runs exactly once.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

TrialResult run_trial(const ExperimentConfig& config, const GridPoint& p, double scale, std::size_t trial) {
    const auto start = std::chrono::steady_clock::now();
    TrialResult r;
    r.point = p.index;
    r.trial = trial;
    r.scale = scale;

    SbmParams sbm = p.sbm;
    sbm.seed = derive_stream(config.master_seed, "sample|" + sample_key(p), trial);
    r.seed = sbm.seed;
    const SbmSample sample = sample_sbm(sbm);

    CorruptionSpec spec;
    spec.rho = p.rho;
    spec.model = p.attack.model;
    spec.hub_count = p.attack.hub_count;
    spec.clique_size = p.attack.clique_size;
    spec.seed = derive_stream(config.master_seed, "corrupt|" + corruption_key(p), trial);
    const CorruptionResult corrupted = corrupt(sample.graph, &sample.x, spec);
    r.budget = corrupted.budget;
    r.edit_count = edit_distance(sample.graph, corrupted.graph);
    r.edge_count = sample.graph.edge_count();

    const std::uint64_t round_seed = derive_stream(config.master_seed, "round|" + sample_key(p), trial);
    try {
        const RecoveryOutput out =
            sbm_recover(corrupted.graph, p.sbm, p.truncation, p.saw, p.meta, scale, round_seed);
        r.correlation_saw = correlation(sample.x, out.x_hat);
        r.projected_count = out.projected_indices.size();
        r.diag_cap_violated = out.diag_cap_violated;
    } catch (const DegenerateInputError&) {
        r.degenerate = true;
    }
    try {
        r.correlation_baseline =
            correlation(sample.x, baseline_spectral(centered_adjacency(corrupted.graph, p.sbm.d), round_seed));
    } catch (const DegenerateInputError&) {
        r.correlation_baseline = 0.0;
    }

    if (config.report_conditions) {
        const int power = static_cast<int>(2 * p.meta.t);
        const DenseSymMatrix q_clean =
            q_matrix(centered_adjacency(truncate(sample.graph, p.truncation), p.sbm.d), p.saw);
        const DenseSymMatrix q_seen =
            q_matrix(centered_adjacency(truncate(corrupted.graph, p.truncation), p.sbm.d), p.saw);
        const double own = std::pow(trace_power(q_clean, power), 1.0 / power);
        if (own > 0.0) {
            const Vector v = sample.x.as_vector() / std::sqrt(static_cast<double>(p.sbm.n));
            r.conditions = check_conditions(q_clean.scaled(1.0 / own), q_seen.scaled(1.0 / scale), v, p.meta);
        }
    }
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

TruncationParams TruncationConfig::resolve(double d, double epsilon, unsigned s) const {
    if (mode == TruncationParams::Mode::PaperFormula) return TruncationParams::paper_formula(a, s, d, epsilon);
    if (delta) return TruncationParams::explicit_delta(*delta);
    return TruncationParams::desk_default(d);
}

MetaParams MetaConfig::resolve(std::size_t n) const {
    MetaParams m;
    m.c_star = c_star;
    m.t = t ? *t : MetaParams::desk_t(n, c_star);
    m.gamma = gamma;
    m.delta_star = delta_star;
    m.validate();
    return m;
}

void ExperimentConfig::validate() const {
    if (trials_per_point < 1) throw std::invalid_argument("config: trials_per_point must be >= 1");
    if (scale_trials < 1) throw std::invalid_argument("config: scale_trials must be >= 1");
    for (double r : rho)
        if (!(r >= 0.0)) throw std::invalid_argument("config: rho must be >= 0");
    for (std::size_t nn : n)
        for (double dd : d)
            for (double ee : epsilon) {
                SbmParams sbm{nn, dd, ee, 0};
                sbm.validate();
                if (!(dd / static_cast<double>(nn) < 1.0)) throw std::invalid_argument("config: need d / n < 1");
                if (!(dd > 0.0)) throw std::invalid_argument("config: d must be positive");
                meta.resolve(nn);
                for (unsigned ss : s) {
                    SawConfig{ss, ee, dd, nn}.validate();
                    if (ss > kMaxFastWalkLength && nn > 24)
                        throw std::invalid_argument("config: s > 5 needs n <= 24");
                    truncation.resolve(dd, ee, ss);
                }
            }
    for (const auto& a : attacks) {
        CorruptionSpec spec;
        spec.model = a.model;
        spec.hub_count = a.hub_count;
        spec.clique_size = a.clique_size;
        spec.validate();
    }
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    static const std::vector<std::string> known = {"grid",        "truncation",      "meta",
                                                   "corruption",  "trials_per_point", "scale_trials",
                                                   "master_seed", "output_dir",      "threads",
                                                   "report_conditions"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "'");

    c = ExperimentConfig{};
    const auto& grid = j.at("grid");
    c.n = grid.at("n").get<std::vector<std::size_t>>();
    c.d = grid.at("d").get<std::vector<double>>();
    c.epsilon = grid.at("epsilon").get<std::vector<double>>();
    c.s = grid.at("s").get<std::vector<unsigned>>();

    if (j.contains("truncation")) {
        const auto& t = j.at("truncation");
        const std::string mode = t.value("mode", std::string("explicit"));
        if (mode == "explicit") {
            c.truncation.mode = TruncationParams::Mode::Explicit;
            if (t.contains("delta") && !t.at("delta").is_null()) c.truncation.delta = t.at("delta").get<std::uint64_t>();
        } else if (mode == "paper") {
            c.truncation.mode = TruncationParams::Mode::PaperFormula;
            c.truncation.a = t.value("A", c.truncation.a);
        } else {
            throw std::invalid_argument("config: truncation.mode must be 'explicit' or 'paper'");
        }
    }
    if (j.contains("meta")) {
        const auto& m = j.at("meta");
        c.meta.c_star = m.value("c_star", c.meta.c_star);
        if (m.contains("t") && !m.at("t").is_null()) c.meta.t = m.at("t").get<unsigned>();
        c.meta.gamma = m.value("gamma", c.meta.gamma);
        c.meta.delta_star = m.value("delta_star", c.meta.delta_star);
    }
    if (j.contains("corruption")) {
        const auto& k = j.at("corruption");
        if (k.contains("rho")) c.rho = k.at("rho").get<std::vector<double>>();
        if (k.contains("models")) {
            c.attacks.clear();
            for (const auto& m : k.at("models")) {
                AttackTemplate a;
                a.model = corruption_model_from_string(m.at("model").get<std::string>());
                if (m.contains("model_params")) {
                    a.hub_count = m.at("model_params").value("hub_count", a.hub_count);
                    a.clique_size = m.at("model_params").value("clique_size", a.clique_size);
                }
                c.attacks.push_back(a);
            }
        }
    }
    c.trials_per_point = j.value("trials_per_point", c.trials_per_point);
    c.scale_trials = j.value("scale_trials", c.scale_trials);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.threads = j.value("threads", c.threads);
    c.report_conditions = j.value("report_conditions", c.report_conditions);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    nlohmann::json trunc;
    if (c.truncation.mode == TruncationParams::Mode::PaperFormula) {
        trunc = {{"mode", "paper"}, {"A", c.truncation.a}};
    } else {
        trunc = {{"mode", "explicit"}};
        trunc["delta"] = c.truncation.delta ? nlohmann::json(*c.truncation.delta) : nlohmann::json(nullptr);
    }
    nlohmann::json meta = {{"c_star", c.meta.c_star}, {"gamma", c.meta.gamma}, {"delta_star", c.meta.delta_star}};
    meta["t"] = c.meta.t ? nlohmann::json(*c.meta.t) : nlohmann::json(nullptr);
    nlohmann::json models = nlohmann::json::array();
    for (const auto& a : c.attacks) {
        nlohmann::json m = {{"model", to_string(a.model)}};
        if (a.model == CorruptionModel::HubPlant) m["model_params"] = {{"hub_count", a.hub_count}};
        if (a.model == CorruptionModel::CliquePlant) m["model_params"] = {{"clique_size", a.clique_size}};
        models.push_back(m);
    }
    j = nlohmann::json{{"grid", {{"n", c.n}, {"d", c.d}, {"epsilon", c.epsilon}, {"s", c.s}}},
                       {"truncation", trunc},
                       {"meta", meta},
                       {"corruption", {{"rho", c.rho}, {"models", models}}},
                       {"trials_per_point", c.trials_per_point},
                       {"scale_trials", c.scale_trials},
                       {"master_seed", c.master_seed},
                       {"output_dir", c.output_dir},
                       {"threads", c.threads},
                       {"report_conditions", c.report_conditions}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c = j.get<ExperimentConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return c;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
    std::vector<GridPoint> points;
    std::map<std::tuple<std::size_t, std::string, std::string, unsigned, std::uint64_t, unsigned>, std::size_t> keys;
    for (std::size_t nn : config.n)
        for (double dd : config.d)
            for (double ee : config.epsilon)
                for (unsigned ss : config.s)
                    for (double rr : config.rho)
                        for (const auto& attack : config.attacks) {
                            GridPoint p;
                            p.index = points.size();
                            p.sbm = SbmParams{nn, dd, ee, 0};
                            p.saw = SawConfig{ss, ee, dd, nn};
                            p.truncation = config.truncation.resolve(dd, ee, ss);
                            p.meta = config.meta.resolve(nn);
                            p.rho = rr;
                            p.attack = attack;
                            const auto key = std::make_tuple(nn, fmt_double(dd), fmt_double(ee), ss,
                                                             p.truncation.resolved_delta, p.meta.t);
                            p.scale_key = keys.try_emplace(key, keys.size()).first->second;
                            points.push_back(p);
                        }
    return points;
}

unsigned resolve_threads(unsigned requested) {
    unsigned threads = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (const char* env = std::getenv("SAWRECOVER_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
    }
    return std::max(1u, threads);
}

SweepResult run_sweep(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    SweepResult result;
    result.points = expand_grid(config);

    std::vector<const GridPoint*> representative;
    for (const auto& p : result.points) {
        if (p.scale_key >= representative.size()) representative.resize(p.scale_key + 1, nullptr);
        if (!representative[p.scale_key]) representative[p.scale_key] = &p;
    }
    result.scales.resize(representative.size());
    parallel_for(representative.size(), threads, [&](std::size_t key) {
        const GridPoint& p = *representative[key];
        const std::uint64_t seed = derive_stream(config.master_seed, "scale|" + sample_key(p), p.saw.s);
        result.scales[key] = estimate_scale(p.sbm, p.truncation, p.saw, p.meta, config.scale_trials, seed);
    });

    const std::size_t per_point = config.trials_per_point;
    result.trials.resize(result.points.size() * per_point);
    parallel_for(result.trials.size(), threads, [&](std::size_t idx) {
        const GridPoint& p = result.points[idx / per_point];
        result.trials[idx] = run_trial(config, p, result.scales[p.scale_key].scale, idx % per_point);
    });
    return result;
}

SweepResult run_sweep_to_dir(const ExperimentConfig& config) {
    SweepResult result = run_sweep(config, resolve_threads(config.threads));
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream os(dir / name);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        return os;
    };
    {
        auto os = open("results.csv");
        write_results_csv(os, result);
    }
    {
        auto os = open("timings.csv");
        write_timings_csv(os, result);
    }
    {
        auto os = open("summary.json");
        os << summarize(result).dump(2) << '\n';
    }
    {
        auto os = open("summary.dat");
        write_gnuplot_dat(os, result);
    }
    return result;
}

void write_results_csv(std::ostream& os, const SweepResult& result) {
    os << "schema_version,point,n,d,epsilon,s,delta_cap,t,rho,model,model_param,trial,seed,budget,edit_count,"
          "edge_count,edit_fraction_edges,correlation_saw,correlation_baseline,degenerate,scale,projected_count,"
          "diag_cap_violated,delta_star_emp,gamma_emp,beta,zeta\n";
    for (const auto& r : result.trials) {
        const GridPoint& p = result.points[r.point];
        const double frac =
            r.edge_count > 0 ? static_cast<double>(r.edit_count) / static_cast<double>(r.edge_count) : 0.0;
        os << kCsvSchemaVersion << ',' << p.index << ',' << p.sbm.n << ',' << fmt_double(p.sbm.d) << ','
           << fmt_double(p.sbm.epsilon) << ',' << p.saw.s << ',' << p.truncation.resolved_delta << ',' << p.meta.t
           << ',' << fmt_double(p.rho) << ',' << to_string(p.attack.model) << ',' << attack_param(p.attack) << ','
           << r.trial << ',' << r.seed << ',' << r.budget << ',' << r.edit_count << ',' << r.edge_count << ','
           << fmt_double(frac) << ',' << fmt_double(r.correlation_saw) << ',' << fmt_double(r.correlation_baseline)
           << ',' << (r.degenerate ? 1 : 0) << ',' << fmt_double(r.scale) << ',' << r.projected_count << ','
           << (r.diag_cap_violated ? 1 : 0) << ',';
        if (r.conditions) {
            const auto& c = *r.conditions;
            os << fmt_double(c.delta_star_emp) << ',' << fmt_double(c.gamma_emp) << ',' << fmt_double(c.beta) << ','
               << fmt_double(std::max(c.zeta_q, c.zeta_qtilde));
        } else {
            os << ",,,";
        }
        os << '\n';
    }
}

void write_timings_csv(std::ostream& os, const SweepResult& result) {
    os << "point,trial,wall_time_ms\n";
    for (const auto& r : result.trials) os << r.point << ',' << r.trial << ',' << fmt_double(r.wall_time_ms) << '\n';
}

SummaryStats summary_stats(std::vector<double> values) {
    SummaryStats s;
    if (values.empty()) return s;
    const auto count = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stderr_ = std::sqrt(ss / (count - 1.0) / count);
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return s;
}

nlohmann::json summarize(const SweepResult& result) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : result.points) {
        std::vector<double> saw, base;
        double edits = 0.0;
        std::size_t count = 0;
        for (const auto& r : result.trials)
            if (r.point == p.index) {
                saw.push_back(r.correlation_saw);
                base.push_back(r.correlation_baseline);
                edits += static_cast<double>(r.edit_count);
                ++count;
            }
        const auto s1 = summary_stats(saw);
        const auto s2 = summary_stats(base);
        const auto& scale = result.scales[p.scale_key];
        points.push_back({{"point", p.index},
                          {"n", p.sbm.n},
                          {"d", p.sbm.d},
                          {"epsilon", p.sbm.epsilon},
                          {"s", p.saw.s},
                          {"delta_cap", p.truncation.resolved_delta},
                          {"t", p.meta.t},
                          {"rho", p.rho},
                          {"model", to_string(p.attack.model)},
                          {"model_param", attack_param(p.attack)},
                          {"budget_edits", static_cast<std::size_t>(std::floor(p.rho * static_cast<double>(p.sbm.n) + 1e-9))},
                          {"scale", scale.scale},
                          {"scale_below_half_n", scale.below_half_n},
                          {"trials", count},
                          {"mean_edit_count", count ? edits / static_cast<double>(count) : 0.0},
                          {"correlation_saw", {{"mean", s1.mean}, {"stderr", s1.stderr_}, {"median", s1.median}}},
                          {"correlation_baseline", {{"mean", s2.mean}, {"stderr", s2.stderr_}, {"median", s2.median}}}});
    }
    return {{"schema_version", kCsvSchemaVersion}, {"points", points}};
}

void write_gnuplot_dat(std::ostream& os, const SweepResult& result) {
    os << "# point n d epsilon s rho model mean_saw se_saw median_saw mean_baseline se_baseline\n";
    const auto summary = summarize(result);
    for (const auto& p : summary.at("points")) {
        os << p.at("point").get<std::size_t>() << ' ' << p.at("n").get<std::size_t>() << ' '
           << fmt_double(p.at("d").get<double>()) << ' ' << fmt_double(p.at("epsilon").get<double>()) << ' '
           << p.at("s").get<unsigned>() << ' ' << fmt_double(p.at("rho").get<double>()) << ' '
           << p.at("model").get<std::string>() << ' '
           << fmt_double(p.at("correlation_saw").at("mean").get<double>()) << ' '
           << fmt_double(p.at("correlation_saw").at("stderr").get<double>()) << ' '
           << fmt_double(p.at("correlation_saw").at("median").get<double>()) << ' '
           << fmt_double(p.at("correlation_baseline").at("mean").get<double>()) << ' '
           << fmt_double(p.at("correlation_baseline").at("stderr").get<double>()) << '\n';
    }
}

}  // namespace sawrec
