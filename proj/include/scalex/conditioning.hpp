#pragma once

#include <string>
#include <vector>

#include "scalex/backend.hpp"
#include "scalex/store.hpp"

namespace scalex {

// Signed, weighted combination of stored vectors or cluster means.
struct DirectionTerm {
    std::string ref;     // "<record id>" or "cluster:<n>" (resolved by caller maps)
    double weight = 1.0;
};

struct DirectionExpr {
    std::vector<DirectionTerm> terms;
    HVector resolved;  // sum of weight_k * vector_k
};

// Resolves refs through the store; "cluster:<n>" refs look up cluster_means.
// Throws UnknownId / ShapeMismatch / EmptyInput.
DirectionExpr compose_direction(
    std::span<const DirectionTerm> terms, const VectorStore& store,
    const std::map<int, HVector>& cluster_means = {});

// Composition over already-resolved vectors (no store).
HVector compose_vectors(std::span<const std::pair<HVector, double>> weighted);

enum class ConditioningMode { lcm, ldm_transfer };

struct ConditioningRun {
    PromptSpec base_prompt;
    DirectionExpr direction;
    double scale = 1.0;
    ConditioningMode mode = ConditioningMode::lcm;
    int num_steps = 4;            // lcm default; ldm_transfer defaults to 20
    std::vector<int> inject_steps;  // empty = all steps
    std::string output_image_path;
};

// Runs generation with the resolved direction injected at the middle block.
// scale == 0 bypasses injection entirely, reproducing the baseline bitwise.
// In ldm_transfer mode the offset (obtained under lcm) is applied to a
// standard multi-step pass on an ldm-mode handle of the same model.
GeneratedImage conditioned_generate(const ConditioningRun& run,
                                    const BackendHandle& backend);

}  // namespace scalex
