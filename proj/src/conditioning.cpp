#include "scalex/conditioning.hpp"

#include <cmath>

#include "scalex/kernels.hpp"
#include "scalex/util.hpp"

namespace scalex {

HVector compose_vectors(std::span<const std::pair<HVector, double>> weighted) {
    if (weighted.empty()) raise(ErrorCode::EmptyInput, "direction needs at least one term");
    const TensorShape shape = weighted.front().first.shape;
    const std::size_t n = shape.size();
    std::vector<double> acc(n, 0.0);
    const auto& ops = kernels::active();
    for (const auto& [vec, weight] : weighted) {
        if (vec.shape != shape) {
            raise(ErrorCode::ShapeMismatch,
                  "direction term " + vec.shape.str() + " vs " + shape.str());
        }
        if (!std::isfinite(weight)) {
            raise(ErrorCode::ConfigError, "direction weight must be finite");
        }
        ops.axpy_f32_acc(acc.data(), vec.values.data(), n, weight);
    }
    HVector out;
    out.shape = shape;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = static_cast<float>(acc[i]);
    out.model_id = weighted.front().first.model_id;
    out.timestep_mode = weighted.front().first.timestep_mode;
    out.prompt.text = "composed direction (" + std::to_string(weighted.size()) + " terms)";
    out.prompt.guidance_scale = 0.0;
    return out;
}

DirectionExpr compose_direction(std::span<const DirectionTerm> terms,
                                const VectorStore& store,
                                const std::map<int, HVector>& cluster_means) {
    if (terms.empty()) raise(ErrorCode::EmptyInput, "direction needs at least one term");
    std::vector<std::pair<HVector, double>> weighted;
    weighted.reserve(terms.size());
    for (const DirectionTerm& term : terms) {
        if (term.ref.rfind("cluster:", 0) == 0) {
            int cluster = -1;
            try {
                cluster = std::stoi(term.ref.substr(8));
            } catch (const std::exception&) {
                raise(ErrorCode::UnknownId, "bad cluster reference: " + term.ref);
            }
            const auto it = cluster_means.find(cluster);
            if (it == cluster_means.end()) {
                raise(ErrorCode::UnknownId, "no mean for " + term.ref);
            }
            weighted.emplace_back(it->second, term.weight);
        } else {
            auto record = store.get(term.ref);
            if (!record) raise(ErrorCode::UnknownId, "no record with id " + term.ref);
            weighted.emplace_back(std::move(record->hvector), term.weight);
        }
    }
    DirectionExpr expr;
    expr.terms.assign(terms.begin(), terms.end());
    expr.resolved = compose_vectors(weighted);
    return expr;
}

GeneratedImage conditioned_generate(const ConditioningRun& run,
                                    const BackendHandle& backend) {
    if (!backend) raise(ErrorCode::BackendUnavailable, "null backend handle");
    run.base_prompt.validate();
    if (!std::isfinite(run.scale)) {
        raise(ErrorCode::ConfigError, "conditioning scale must be finite");
    }
    if (run.mode == ConditioningMode::ldm_transfer &&
        backend->mode() != BackendMode::ldm) {
        // Only the offset vector crosses modes: the generation pass itself
        // must run on a plain ldm handle, never with the lcm adapter loaded.
        raise(ErrorCode::ConfigError,
              "ldm_transfer requires a backend declared in ldm mode");
    }
    if (run.num_steps < 1) raise(ErrorCode::ConfigError, "num_steps must be >= 1");

    if (run.scale == 0.0 || run.direction.resolved.values.empty()) {
        // Zero offset: baseline generation, bitwise.
        return backend->generate(run.base_prompt, run.num_steps, nullptr);
    }
    if (run.direction.resolved.shape != backend->middle_block_shape()) {
        raise(ErrorCode::ShapeMismatch,
              "direction " + run.direction.resolved.shape.str() +
                  " does not match middle block " +
                  backend->middle_block_shape().str());
    }
    InjectionPlan plan;
    plan.offset = run.direction.resolved.values;
    plan.scale = run.scale;
    plan.steps = run.inject_steps;
    return backend->generate(run.base_prompt, run.num_steps, &plan);
}

}  // namespace scalex
