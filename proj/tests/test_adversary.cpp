#include "oracles.hpp"

#include "sawrec/adversary.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace sawrec;

namespace {

SbmSample base_sample() { return sample_sbm(SbmParams{400, 5.0, 1.0, 21}); }

CorruptionSpec make_spec(double rho, CorruptionModel model, std::uint64_t seed = 1) {
    CorruptionSpec s;
    s.rho = rho;
    s.model = model;
    s.seed = seed;
    return s;
}

}  // namespace

TEST(CorruptionSpec, BudgetIsFloorWithExactDecimals) {
    EXPECT_EQ(make_spec(0.005, CorruptionModel::RandomFlip).budget(2000), 10u);
    EXPECT_EQ(make_spec(0.01, CorruptionModel::RandomFlip).budget(300), 3u);
    EXPECT_EQ(make_spec(0.0, CorruptionModel::RandomFlip).budget(300), 0u);
    EXPECT_EQ(make_spec(0.019, CorruptionModel::RandomFlip).budget(100), 1u);
    EXPECT_THROW(make_spec(-0.1, CorruptionModel::RandomFlip).validate(), std::invalid_argument);
}

TEST(Corrupt, EveryModelRespectsBudget) {
    const SbmSample s = base_sample();
    for (auto model : {CorruptionModel::RandomFlip, CorruptionModel::HubPlant, CorruptionModel::CliquePlant,
                       CorruptionModel::Monotone})
        for (double rho : {0.0, 0.01, 0.05, 0.2}) {
            CorruptionSpec spec = make_spec(rho, model);
            spec.clique_size = 12;
            spec.hub_count = 3;
            const CorruptionResult r = corrupt(s.graph, &s.x, spec);
            const std::size_t dist = oracle::set_edit_distance(s.graph, r.graph);
            EXPECT_LE(dist, spec.budget(400)) << to_string(model) << " rho=" << rho;
            EXPECT_EQ(dist, r.edits_used);
            EXPECT_EQ(r.budget, spec.budget(400));
        }
}

TEST(Corrupt, ZeroBudgetIsIdentity) {
    const SbmSample s = base_sample();
    EXPECT_EQ(corrupt(s.graph, &s.x, make_spec(0.0, CorruptionModel::HubPlant)).graph, s.graph);
}

TEST(Corrupt, RandomFlipSpendsWholeBudgetDeterministically) {
    const SbmSample s = base_sample();
    const auto spec = make_spec(0.05, CorruptionModel::RandomFlip, 9);
    const CorruptionResult a = corrupt(s.graph, nullptr, spec);
    EXPECT_EQ(a.edits_used, 20u);
    EXPECT_EQ(corrupt(s.graph, nullptr, spec).graph, a.graph);
    EXPECT_FALSE(corrupt(s.graph, nullptr, make_spec(0.05, CorruptionModel::RandomFlip, 10)).graph == a.graph);
}

TEST(Corrupt, RandomFlipCanExhaustTinyGraph) {
    const Graph g(4, {{0, 1}});
    const CorruptionResult r = corrupt(g, nullptr, make_spec(10.0, CorruptionModel::RandomFlip));
    EXPECT_EQ(r.edits_used, 6u);  // every pair flipped
    EXPECT_EQ(r.graph.edge_count(), 5u);
}

TEST(Corrupt, HubPlantOnlyAddsEdgesAtHubs) {
    const SbmSample s = base_sample();
    CorruptionSpec spec = make_spec(0.1, CorruptionModel::HubPlant);
    spec.hub_count = 2;
    const CorruptionResult r = corrupt(s.graph, nullptr, spec);
    EXPECT_EQ(r.edits_used, 40u);
    for (const auto& [u, v] : r.graph.edges())
        if (!s.graph.has_edge(u, v)) EXPECT_TRUE(u < 2 || v < 2);
    EXPECT_GE(r.graph.degree(0) + r.graph.degree(1), s.graph.degree(0) + s.graph.degree(1) + 39);
}

TEST(Corrupt, CliquePlantBuildsSameCommunityClique) {
    const SbmSample s = base_sample();
    CorruptionSpec spec = make_spec(1.0, CorruptionModel::CliquePlant);
    spec.clique_size = 10;
    const CorruptionResult r = corrupt(s.graph, &s.x, spec);
    EXPECT_FALSE(r.budget_truncated);
    std::set<Vertex> members;
    for (const auto& [u, v] : r.graph.edges())
        if (!s.graph.has_edge(u, v)) {
            members.insert(u);
            members.insert(v);
            EXPECT_EQ(s.x[u], 1);
            EXPECT_EQ(s.x[v], 1);
        }
    for (Vertex a : members)
        for (Vertex b : members)
            if (a < b) EXPECT_TRUE(r.graph.has_edge(a, b));
}

TEST(Corrupt, CliquePlantFlagsPartialClique) {
    const SbmSample s = base_sample();
    CorruptionSpec spec = make_spec(0.01, CorruptionModel::CliquePlant);  // budget 4
    spec.clique_size = 10;                                                // needs up to 45
    const CorruptionResult r = corrupt(s.graph, &s.x, spec);
    EXPECT_TRUE(r.budget_truncated);
    EXPECT_LE(r.edits_used, 4u);
}

TEST(Corrupt, MonotoneOnlyHelpsCommunityStructure) {
    const SbmSample s = base_sample();
    const CorruptionResult r = corrupt(s.graph, &s.x, make_spec(0.1, CorruptionModel::Monotone));
    EXPECT_EQ(r.edits_used, 40u);
    for (const auto& [u, v] : r.graph.edges())
        if (!s.graph.has_edge(u, v)) EXPECT_EQ(s.x[u], s.x[v]);
    for (const auto& [u, v] : s.graph.edges())
        if (!r.graph.has_edge(u, v)) EXPECT_NE(s.x[u], s.x[v]);
    EXPECT_THROW(corrupt(s.graph, nullptr, make_spec(0.1, CorruptionModel::Monotone)), std::invalid_argument);
}

TEST(Corrupt, RejectsLabelSizeMismatch) {
    const SbmSample s = base_sample();
    const CommunityVector wrong({1, -1});
    EXPECT_THROW(corrupt(s.graph, &wrong, make_spec(0.1, CorruptionModel::Monotone)), std::invalid_argument);
}

TEST(CorruptionModel, StringRoundTrip) {
    for (auto m : {CorruptionModel::RandomFlip, CorruptionModel::HubPlant, CorruptionModel::CliquePlant,
                   CorruptionModel::Monotone})
        EXPECT_EQ(corruption_model_from_string(to_string(m)), m);
    EXPECT_THROW(corruption_model_from_string("sybil"), std::invalid_argument);
}

TEST(CorruptionSpec, JsonRoundTrip) {
    CorruptionSpec spec = make_spec(0.02, CorruptionModel::HubPlant, 77);
    spec.hub_count = 4;
    const nlohmann::json j = spec;
    EXPECT_EQ(j.at("model"), "hub_plant");
    EXPECT_EQ(j.at("model_params").at("hub_count"), 4);
    const CorruptionSpec back = j.get<CorruptionSpec>();
    EXPECT_EQ(back.rho, spec.rho);
    EXPECT_EQ(back.model, spec.model);
    EXPECT_EQ(back.hub_count, 4u);
    EXPECT_EQ(back.seed, 77u);
}
