#include "scalex/backend.hpp"

#include <cstdlib>
#include <map>

namespace scalex {

const char* backend_mode_name(BackendMode mode) {
    return mode == BackendMode::lcm ? "lcm" : "ldm";
}

BackendMode backend_mode_from_name(const std::string& name) {
    if (name == "lcm") return BackendMode::lcm;
    if (name == "ldm" || name == "ldm-transfer" || name == "ldm_transfer") {
        return BackendMode::ldm;
    }
    raise(ErrorCode::ConfigError, "unknown backend mode: " + name);
}

namespace {

struct BackendDecl {
    enum class Kind { mock, remote } kind;
    TensorShape shape;
    double latency_budget_s;
};

// Known middle-block geometries. Remote entries require an inference endpoint
// at extraction time; declaring them only needs the registry.
const std::map<std::string, BackendDecl>& registry() {
    static const std::map<std::string, BackendDecl> reg = {
        {"mock", {BackendDecl::Kind::mock, {16, 4, 4}, 0.0}},
        {"mock-8d", {BackendDecl::Kind::mock, {8, 1, 1}, 0.0}},
        {"sd15", {BackendDecl::Kind::remote, {1280, 8, 8}, 1.1}},
        {"sdxl", {BackendDecl::Kind::remote, {1280, 32, 32}, 6.3}},
    };
    return reg;
}

}  // namespace

BackendHandle declare_backend(const std::string& model_id, BackendMode mode,
                              const BackendOptions& options) {
    const auto it = registry().find(model_id);
    if (it == registry().end()) {
        raise(ErrorCode::UnknownModel, "model id not in registry: " + model_id);
    }
    const BackendDecl& decl = it->second;
    if (decl.shape.size() == 0) {
        raise(ErrorCode::IncompatibleArchitecture,
              "no bottleneck block declared for " + model_id);
    }
    if (decl.kind == BackendDecl::Kind::mock) {
        MockBackendOptions mock;
        mock.model_id = model_id;
        mock.shape = decl.shape;
        mock.mode = mode;
        if (!options.capture_layer.empty()) {
            if (options.capture_layer != mock.capture_layer) {
                raise(ErrorCode::IncompatibleArchitecture,
                      "capture layer not present in " + model_id + ": " +
                          options.capture_layer);
            }
        }
        return std::make_shared<MockBackend>(mock);
    }

    std::string endpoint = options.endpoint;
    if (endpoint.empty()) {
        if (const char* env = std::getenv("SCALEX_BACKEND_ENDPOINT")) {
            endpoint = env;
        }
    }
    const std::string layer =
        options.capture_layer.empty() ? "mid_block.output" : options.capture_layer;
    return std::make_shared<RemoteBackend>(model_id, mode, decl.shape,
                                           decl.latency_budget_s, endpoint, layer);
}

HVector extract_hvector(const PromptSpec& prompt, const ExtractionConfig& config,
                        const BackendHandle& backend) {
    if (!backend) raise(ErrorCode::BackendUnavailable, "null backend handle");
    prompt.validate();
    config.validate();
    if (!config.capture_layer.empty() &&
        config.capture_layer != backend->capture_layer()) {
        raise(ErrorCode::IncompatibleArchitecture,
              "capture layer not present: " + config.capture_layer);
    }
    HVector h = backend->extract(prompt, config);
    if (h.shape != backend->middle_block_shape()) {
        raise(ErrorCode::ShapeMismatch,
              "captured " + h.shape.str() + ", backend declares " +
                  backend->middle_block_shape().str());
    }
    h.validate();
    return h;
}

std::vector<HVector> extract_batch(std::span<const PromptSpec> prompts,
                                   const ExtractionConfig& config,
                                   const BackendHandle& backend) {
    if (prompts.empty()) raise(ErrorCode::EmptyBatch, "no prompts to extract");
    std::vector<HVector> out;
    out.reserve(prompts.size());
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        try {
            out.push_back(extract_hvector(prompts[i], config, backend));
        } catch (const Error& e) {
            throw Error(e.code(), "batch element " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

std::vector<PromptSpec> expand_over_seeds(std::span<const PromptSpec> prompts,
                                          std::span<const std::uint64_t> seeds) {
    std::vector<PromptSpec> out;
    out.reserve(prompts.size() * seeds.size());
    for (const PromptSpec& p : prompts) {
        for (std::uint64_t seed : seeds) {
            PromptSpec expanded = p;
            expanded.seed = seed;
            out.push_back(std::move(expanded));
        }
    }
    return out;
}

}  // namespace scalex
