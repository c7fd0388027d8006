// Command-line front end: sampling, corruption, Q matrices, single recoveries,
// sweeps, self-verification and condition reports.

#include "sawrec/adversary.hpp"
#include "sawrec/graph.hpp"
#include "sawrec/harness.hpp"
#include "sawrec/recovery.hpp"
#include "sawrec/saw_poly.hpp"
#include "sawrec/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fs = std::filesystem;
using namespace sawrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerifyFailed = 2;

// Model parameters shared by the subcommands; a --config file supplies the
// first grid value of each list, explicit flags override it.
struct Params {
    std::string config;
    std::size_t n = 200;
    double d = 3.0;
    double eps = 1.0;
    unsigned s = 3;
    double rho = 0.0;
    std::optional<std::uint64_t> delta_cap;
    std::optional<unsigned> t;
    double c_star = 1.0;
    double gamma = 10.0;
    double delta_star = 0.25;
    std::uint64_t seed = 0;
    std::string out;


    void apply_config(const CLI::App& cmd) {
        if (config.empty()) return;
        const ExperimentConfig c = load_config(config);
        auto given = [&](const char* flag) {
            const CLI::Option* opt = cmd.get_option_no_throw(flag);
            return opt && opt->count() > 0;
        };
        auto first = [](const auto& list, const char* name) {
            if (list.empty()) throw std::invalid_argument(std::string("config: grid.") + name + " is empty");
            return list.front();
        };
        if (!given("--n")) n = first(c.n, "n");
        if (!given("--d")) d = first(c.d, "d");
        if (!given("--eps")) eps = first(c.epsilon, "epsilon");
        if (!given("--s")) s = first(c.s, "s");
        if (!given("--rho") && !c.rho.empty()) rho = c.rho.front();
        if (!given("--delta-cap") && c.truncation.mode == TruncationParams::Mode::Explicit) delta_cap = c.truncation.delta;
        if (!given("--t")) t = c.meta.t;
        if (!given("--cstar")) c_star = c.meta.c_star;
        if (!given("--gamma")) gamma = c.meta.gamma;
        if (!given("--delta-star")) delta_star = c.meta.delta_star;
        if (!given("--seed")) seed = c.master_seed;
    }

    SbmParams sbm() const {
        SbmParams p{n, d, eps, seed};
        p.validate();
        return p;
    }
    SawConfig saw() const {
        SawConfig c{s, eps, d, n};
        c.validate();
        return c;
    }
    TruncationParams truncation() const {
        return delta_cap ? TruncationParams::explicit_delta(*delta_cap) : TruncationParams::desk_default(d);
    }
    MetaParams meta() const {
        MetaConfig m;
        m.c_star = c_star;
        m.t = t;
        m.gamma = gamma;
        m.delta_star = delta_star;
        return m.resolve(n);
    }
};

void add_model_flags(CLI::App* app, Params& p) {
    app->add_option("--n", p.n, "number of vertices");
    app->add_option("--d", p.d, "average degree");
    app->add_option("--eps", p.eps, "bias epsilon in (0, 2]");
    app->add_option("--s", p.s, "self-avoiding walk length");
}

void add_meta_flags(CLI::App* app, Params& p) {
    app->add_option("--delta-cap", p.delta_cap, "truncation degree cap (default ceil(10 d))");
    app->add_option("--t", p.t, "Schatten half-exponent (default max(2, round(ln n / C*)))");
    app->add_option("--cstar", p.c_star, "constant C*");
    app->add_option("--gamma", p.gamma, "diagonal cap gamma");
    app->add_option("--delta-star", p.delta_star, "rounding parameter delta*");
}

void add_common_flags(CLI::App* app, Params& p) {
    app->add_option("--config", p.config, "JSON experiment config supplying defaults")->check(CLI::ExistingFile);
    app->add_option("--seed", p.seed, "64-bit seed");
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_edge_list(in);
}

CommunityVector load_communities(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_communities(in);
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        auto os = open_out(out);
        os << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust community recovery via self-avoiding walk statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sawrecover 1.0");

    Params p;
    std::string graph_path, communities_path, model = "random_flip";
    std::size_t hub_count = 1, clique_size = 2, scale_trials = 3, threads = 0;
    std::optional<double> scale;

    auto* sample = app.add_subcommand("sample", "sample an SBM graph; writes <out>/graph.edges and <out>/communities.txt");
    add_common_flags(sample, p);
    add_model_flags(sample, p);
    sample->add_option("--out", p.out, "output directory")->required();

    auto* corrupt_cmd = app.add_subcommand("corrupt", "apply a budgeted adversarial corruption to an edge list");
    add_common_flags(corrupt_cmd, p);
    corrupt_cmd->add_option("--graph", graph_path, "input edge list")->required()->check(CLI::ExistingFile);
    corrupt_cmd->add_option("--communities", communities_path, "community file (required by monotone)");
    corrupt_cmd->add_option("--rho", p.rho, "edit budget fraction: floor(rho n) edits");
    corrupt_cmd->add_option("--model", model, "random_flip | hub_plant | clique_plant | monotone");
    corrupt_cmd->add_option("--hub-count", hub_count, "hub_plant: number of hubs");
    corrupt_cmd->add_option("--clique-size", clique_size, "clique_plant: clique size");
    corrupt_cmd->add_option("--out", p.out, "output edge list")->required();

    auto* qmatrix = app.add_subcommand("qmatrix", "write the normalized self-avoiding walk matrix Q");
    add_common_flags(qmatrix, p);
    qmatrix->add_option("--graph", graph_path, "input edge list")->required()->check(CLI::ExistingFile);
    qmatrix->add_option("--d", p.d, "average degree");
    qmatrix->add_option("--eps", p.eps, "bias epsilon");
    qmatrix->add_option("--s", p.s, "walk length");
    qmatrix->add_option("--delta-cap", p.delta_cap, "truncate at this degree first");
    qmatrix->add_option("--out", p.out, "output matrix file ('-' for stdout)");

    auto* recover = app.add_subcommand("recover", "single recovery run; JSON on output");
    add_common_flags(recover, p);
    recover->add_option("--graph", graph_path, "observed edge list")->required()->check(CLI::ExistingFile);
    recover->add_option("--communities", communities_path, "planted labels, for the correlation field");
    recover->add_option("--d", p.d, "average degree");
    recover->add_option("--eps", p.eps, "bias epsilon");
    recover->add_option("--s", p.s, "walk length");
    add_meta_flags(recover, p);
    recover->add_option("--scale", scale, "normalization scale (default: estimated)");
    recover->add_option("--scale-trials", scale_trials, "uncorrupted samples for the scale estimate");
    recover->add_option("--out", p.out, "output JSON file ('-' for stdout)");

    auto* sweep = app.add_subcommand("sweep", "run a configured sweep; writes CSV, JSON and .dat files");
    sweep->add_option("--config", p.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sweep->add_option("--seed", p.seed, "override master_seed");
    sweep->add_option("--out", p.out, "override output_dir");
    sweep->add_option("--threads", threads, "worker threads (0 = auto)");

    auto* verify = app.add_subcommand("verify", "run the self-check suites");
    verify->add_option("--seed", p.seed, "seed for the suites");

    auto* conditions = app.add_subcommand("conditions", "empirical condition report on a sampled instance");
    add_common_flags(conditions, p);
    add_model_flags(conditions, p);
    add_meta_flags(conditions, p);
    conditions->add_option("--rho", p.rho, "random_flip corruption fraction");
    conditions->add_option("--out", p.out, "output JSON file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitInvalid;
    }

    try {
        if (*sample) {
            p.apply_config(*sample);
            const SbmSample s = sample_sbm(p.sbm());
            auto g = open_out(fs::path(p.out) / "graph.edges");
            write_edge_list(g, s.graph);
            auto x = open_out(fs::path(p.out) / "communities.txt");
            write_communities(x, s.x);
            return kExitOk;
        }
        if (*corrupt_cmd) {
            p.apply_config(*corrupt_cmd);
            const Graph g = load_graph(graph_path);
            std::optional<CommunityVector> x;
            if (!communities_path.empty()) x = load_communities(communities_path);
            CorruptionSpec spec;
            spec.rho = p.rho;
            spec.model = corruption_model_from_string(model);
            spec.hub_count = hub_count;
            spec.clique_size = clique_size;
            spec.seed = p.seed;
            const CorruptionResult res = corrupt(g, x ? &*x : nullptr, spec);
            auto os = open_out(p.out);
            write_edge_list(os, res.graph);
            std::cerr << "edits " << res.edits_used << " / budget " << res.budget
                      << (res.budget_truncated ? " (pattern truncated to budget)" : "") << '\n';
            return kExitOk;
        }
        if (*qmatrix) {
            p.apply_config(*qmatrix);
            Graph g = load_graph(graph_path);
            p.n = g.n();
            if (p.delta_cap) g = truncate(g, *p.delta_cap);
            const DenseSymMatrix q = q_matrix(centered_adjacency(g, p.d), p.saw());
            std::ostringstream os;
            write_matrix(os, q.mat());
            emit(p.out, os.str());
            return kExitOk;
        }
        if (*recover) {
            p.apply_config(*recover);
            const Graph g = load_graph(graph_path);
            p.n = g.n();
            const SbmParams sbm = p.sbm();
            const TruncationParams trunc = p.truncation();
            const SawConfig cfg = p.saw();
            const MetaParams meta = p.meta();
            const double used_scale =
                scale ? *scale : estimate_scale(sbm, trunc, cfg, meta, scale_trials, p.seed).scale;
            const RecoveryOutput out = sbm_recover(g, sbm, trunc, cfg, meta, used_scale, p.seed);
            nlohmann::json j = out;
            j["delta_cap"] = trunc.resolved_delta;
            j["t"] = meta.t;
            j["correlation"] = nullptr;
            if (!communities_path.empty()) {
                const CommunityVector x = load_communities(communities_path);
                if (static_cast<std::size_t>(x.as_vector().size()) != g.n()) throw std::invalid_argument("communities and graph disagree on n");
                j["correlation"] = correlation(x, out.x_hat);
            }
            emit(p.out, j.dump(2) + "\n");
            return kExitOk;
        }
        if (*sweep) {
            ExperimentConfig c = load_config(p.config);
            if (sweep->count("--seed")) c.master_seed = p.seed;
            if (!p.out.empty()) c.output_dir = p.out;
            if (sweep->count("--threads")) c.threads = static_cast<unsigned>(threads);
            c.validate();
            const SweepResult r = run_sweep_to_dir(c);
            std::cerr << "wrote " << r.trials.size() << " trial rows to " << c.output_dir << '\n';
            return kExitOk;
        }
        if (*verify) {
            bool all = true;
            for (const SuiteResult& r : run_quick_verification(p.seed)) {
                std::printf("%s %-20s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
                            r.seconds);
                all = all && r.pass;
            }
            return all ? kExitOk : kExitVerifyFailed;
        }
        if (*conditions) {
            p.apply_config(*conditions);
            const SbmParams sbm = p.sbm();
            const TruncationParams trunc = p.truncation();
            const SawConfig cfg = p.saw();
            const MetaParams meta = p.meta();
            const SbmSample s = sample_sbm(sbm);
            CorruptionSpec spec;
            spec.rho = p.rho;
            spec.seed = p.seed;
            const Graph seen = corrupt(s.graph, &s.x, spec).graph;
            const int power = static_cast<int>(2 * meta.t);
            const DenseSymMatrix q = q_matrix(centered_adjacency(truncate(s.graph, trunc), sbm.d), cfg);
            const DenseSymMatrix qt = q_matrix(centered_adjacency(truncate(seen, trunc), sbm.d), cfg);
            const double norm = std::pow(trace_power(q, power), 1.0 / power);
            if (!(norm > 0.0)) throw DegenerateInputError("conditions: Q vanishes on this sample");
            const Vector v = s.x.as_vector() / std::sqrt(static_cast<double>(sbm.n));
            nlohmann::json j = check_conditions(q.scaled(1.0 / norm), qt.scaled(1.0 / norm), v, meta);
            j["delta_cap"] = trunc.resolved_delta;
            j["t"] = meta.t;
            emit(p.out, j.dump(2) + "\n");
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
