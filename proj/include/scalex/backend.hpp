#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalex/hvector.hpp"

namespace scalex {

enum class BackendMode { lcm, ldm };

const char* backend_mode_name(BackendMode mode);
BackendMode backend_mode_from_name(const std::string& name);

// Additive middle-block edit applied during generation.
struct InjectionPlan {
    std::vector<float> offset;   // same shape as the backend's middle block
    double scale = 1.0;
    std::vector<int> steps;      // empty = inject at every denoising step
};

struct GeneratedImage {
    std::vector<std::uint8_t> png;
    int width = 0;
    int height = 0;
};

// One loaded diffusion backend. Handles serialize device access internally:
// concurrent callers observe the same results as any sequential interleaving.
class ModelBackend {
  public:
    virtual ~ModelBackend() = default;

    virtual const std::string& model_id() const = 0;
    virtual BackendMode mode() const = 0;
    virtual TensorShape middle_block_shape() const = 0;
    virtual std::string capture_layer() const = 0;
    // Per-prompt extraction latency budget, seconds.
    virtual double latency_budget_seconds() const = 0;

    // Run the sampler and capture the middle-block activation of the first
    // prediction (conditional pass); refinement steps run but are not captured.
    virtual HVector extract(const PromptSpec& prompt, const ExtractionConfig& config) = 0;

    // Full generation. When inject is non-null, offset*scale is added to the
    // middle-block activation on the planned steps before the decoder half runs.
    virtual GeneratedImage generate(const PromptSpec& prompt, int num_steps,
                                    const InjectionPlan* inject) = 0;
};

using BackendHandle = std::shared_ptr<ModelBackend>;

struct BackendOptions {
    // Remote inference endpoint, e.g. "http://host:port". Falls back to the
    // SCALEX_BACKEND_ENDPOINT environment variable. Mock backends ignore it.
    std::string endpoint;
    std::string capture_layer;  // empty = backend default
};

// Resolve a model id ("mock", "mock-8d", "sd15", "sdxl") against the registry.
// Throws UnknownModel / IncompatibleArchitecture.
BackendHandle declare_backend(const std::string& model_id, BackendMode mode,
                              const BackendOptions& options = {});

// --- adapter operations ---

HVector extract_hvector(const PromptSpec& prompt, const ExtractionConfig& config,
                        const BackendHandle& backend);

// Element-wise extract_hvector over the list; the first failure is reported
// with its index. Throws EmptyBatch on an empty list.
std::vector<HVector> extract_batch(std::span<const PromptSpec> prompts,
                                   const ExtractionConfig& config,
                                   const BackendHandle& backend);

// Cartesian expansion, prompt-major: every prompt repeated once per seed.
std::vector<PromptSpec> expand_over_seeds(std::span<const PromptSpec> prompts,
                                          std::span<const std::uint64_t> seeds);

// --- mock backend (first-class; the whole analysis suite runs on it) ---

struct MockBackendOptions {
    std::string model_id = "mock";
    TensorShape shape{16, 4, 4};
    BackendMode mode = BackendMode::lcm;
    std::string capture_layer = "mid_block.output";

    enum class Activation {
        hashed,         // deterministic hash-to-vector map
        constant_unit,  // every element 1/sqrt(C*H*W)
        nan_poison,     // emits a NaN (error-path tests)
        wrong_shape,    // captures one element short (error-path tests)
    };
    Activation activation = Activation::hashed;
};

struct InjectionRecord {
    int step = 0;
    std::vector<float> offset;  // scale already applied
};

class MockBackend final : public ModelBackend {
  public:
    explicit MockBackend(MockBackendOptions options = {});

    const std::string& model_id() const override { return options_.model_id; }
    BackendMode mode() const override { return options_.mode; }
    TensorShape middle_block_shape() const override { return options_.shape; }
    std::string capture_layer() const override { return options_.capture_layer; }
    double latency_budget_seconds() const override { return 0.0; }

    HVector extract(const PromptSpec& prompt, const ExtractionConfig& config) override;
    GeneratedImage generate(const PromptSpec& prompt, int num_steps,
                            const InjectionPlan* inject) override;

    // --- instrumentation for contract tests ---
    std::int64_t capture_events() const { return capture_events_.load(); }
    std::int64_t forward_passes() const { return forward_passes_.load(); }
    std::vector<InjectionRecord> injection_log() const;
    void reset_instrumentation();

  private:
    std::vector<float> middle_activation(const PromptSpec& prompt, int step) const;

    MockBackendOptions options_;
    mutable std::mutex device_mutex_;
    mutable std::mutex log_mutex_;
    std::atomic<std::int64_t> capture_events_{0};
    std::atomic<std::int64_t> forward_passes_{0};
    std::vector<InjectionRecord> injection_log_;
};

// HTTP-backed adapter for real diffusion backends (see docs/backend-protocol.md).
class RemoteBackend final : public ModelBackend {
  public:
    RemoteBackend(std::string model_id, BackendMode mode, TensorShape shape,
                  double latency_budget_s, std::string endpoint,
                  std::string capture_layer);

    const std::string& model_id() const override { return model_id_; }
    BackendMode mode() const override { return mode_; }
    TensorShape middle_block_shape() const override { return shape_; }
    std::string capture_layer() const override { return capture_layer_; }
    double latency_budget_seconds() const override { return latency_budget_s_; }

    HVector extract(const PromptSpec& prompt, const ExtractionConfig& config) override;
    GeneratedImage generate(const PromptSpec& prompt, int num_steps,
                            const InjectionPlan* inject) override;

  private:
    std::string model_id_;
    BackendMode mode_;
    TensorShape shape_;
    double latency_budget_s_;
    std::string endpoint_;
    std::string capture_layer_;
    std::mutex device_mutex_;
};

}  // namespace scalex
