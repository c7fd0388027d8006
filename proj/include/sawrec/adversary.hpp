#pragma once

#include "sawrec/graph.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace sawrec {

enum class CorruptionModel { RandomFlip, HubPlant, CliquePlant, Monotone };

std::string to_string(CorruptionModel m);
CorruptionModel corruption_model_from_string(const std::string& s);

/// Edit budget floor(rho * n) and the attack used to spend it.
struct CorruptionSpec {
    double rho = 0.0;
    CorruptionModel model = CorruptionModel::RandomFlip;
    std::size_t hub_count = 1;    // HubPlant
    std::size_t clique_size = 2;  // CliquePlant
    std::uint64_t seed = 0;

    std::size_t budget(std::size_t n) const;
    void validate() const;
};

struct CorruptionResult {
    Graph graph;
    std::size_t edits_used = 0;
    std::size_t budget = 0;
    /// CliquePlant needed more than the budget; the clique was left partial.
    bool budget_truncated = false;
};

/// Returns G' with edit_distance(g, G') <= floor(rho * n). Monotone requires x.
CorruptionResult corrupt(const Graph& g, const CommunityVector* x, const CorruptionSpec& spec);

void to_json(nlohmann::json& j, const CorruptionSpec& spec);
void from_json(const nlohmann::json& j, CorruptionSpec& spec);

}  // namespace sawrec
