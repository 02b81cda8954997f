#include <algorithm>
#include <cmath>
#include <limits>

#include "scalex/backend.hpp"
#include "scalex/png.hpp"
#include "scalex/util.hpp"

// Deterministic stand-in for a diffusion backend. Activations come from a
// counter-based hash of (model, mode, layer, prompt text, seed, step), so the
// whole analysis suite runs without model weights while keeping the real
// backend's contract: a consistency-style sampler that predicts, re-noises,
// and refines, with the capture hook firing on the conditional pass of the
// first prediction only.

namespace scalex {

namespace {

constexpr int kMockLatentSize = 24 * 24;  // grayscale working latent
constexpr int kMockImageSide = 24;

std::uint64_t tuple_hash(const MockBackendOptions& options,
                         const std::string& prompt_text, std::uint64_t seed,
                         std::string_view stream) {
    std::uint64_t h = util::fnv1a64(options.model_id);
    h = util::fnv1a64(backend_mode_name(options.mode), h);
    h = util::fnv1a64(options.capture_layer, h);
    h = util::fnv1a64(prompt_text, h);
    h = util::fnv1a64_u64(seed, h);
    h = util::fnv1a64(stream, h);
    return h;
}

// Uniform in [-1, 1).
double hashed_value(std::uint64_t base, std::uint64_t index) {
    return 2.0 * util::u64_unit(util::splitmix64(base ^ (index * 0x9e3779b97f4a7c15ull))) - 1.0;
}

}  // namespace

MockBackend::MockBackend(MockBackendOptions options) : options_(std::move(options)) {
    if (options_.shape.size() == 0) {
        raise(ErrorCode::IncompatibleArchitecture, "mock backend with empty shape");
    }
}

std::vector<float> MockBackend::middle_activation(const PromptSpec& prompt,
                                                  int step) const {
    const std::size_t n = options_.shape.size();
    std::vector<float> values(n);
    switch (options_.activation) {
        case MockBackendOptions::Activation::constant_unit: {
            const float v = static_cast<float>(1.0 / std::sqrt(static_cast<double>(n)));
            std::fill(values.begin(), values.end(), v);
            break;
        }
        case MockBackendOptions::Activation::nan_poison: {
            std::fill(values.begin(), values.end(), 1.0f);
            values[n / 2] = std::numeric_limits<float>::quiet_NaN();
            break;
        }
        case MockBackendOptions::Activation::hashed:
        case MockBackendOptions::Activation::wrong_shape: {
            // The conditional-pass activation is independent of guidance scale
            // and negative prompt: those only mix predictions after the
            // forward pass.
            std::uint64_t base = tuple_hash(options_, prompt.text, prompt.seed, "h");
            base = util::fnv1a64_u64(static_cast<std::uint64_t>(step), base);
            for (std::size_t i = 0; i < n; ++i) {
                values[i] = static_cast<float>(hashed_value(base, i));
            }
            break;
        }
    }
    if (options_.activation == MockBackendOptions::Activation::wrong_shape &&
        !values.empty()) {
        values.pop_back();
    }
    return values;
}

HVector MockBackend::extract(const PromptSpec& prompt, const ExtractionConfig& config) {
    std::lock_guard<std::mutex> lock(device_mutex_);

    HVector captured;
    bool capture_armed = true;

    const bool cfg_enabled = prompt.guidance_scale > 1.0;
    const int predictions = 1 + config.num_refinement_steps_discarded;
    for (int step = 0; step < predictions; ++step) {
        if (cfg_enabled) {
            // Unconditional pass; carries no prompt signal, never captured.
            forward_passes_.fetch_add(1);
        }
        forward_passes_.fetch_add(1);  // conditional pass
        std::vector<float> h = middle_activation(prompt, step);
        if (capture_armed) {
            capture_armed = false;
            capture_events_.fetch_add(1);
            captured.values = std::move(h);
        }
        // Refinement continues: the sampler re-noises and predicts again, but
        // nothing past the first prediction is retained for capture.
    }

    captured.shape = options_.shape;
    captured.prompt = prompt;
    captured.model_id = options_.model_id;
    captured.timestep_mode = options_.mode == BackendMode::lcm
                                 ? TimestepMode::lcm_single_step
                                 : TimestepMode::ldm_step;
    captured.created_at = std::chrono::system_clock::now();
    return captured;
}

GeneratedImage MockBackend::generate(const PromptSpec& prompt, int num_steps,
                                     const InjectionPlan* inject) {
    std::lock_guard<std::mutex> lock(device_mutex_);
    if (num_steps < 1) raise(ErrorCode::ConfigError, "num_steps must be >= 1");
    if (inject && inject->offset.size() != options_.shape.size()) {
        raise(ErrorCode::ShapeMismatch, "injection offset does not match middle block");
    }

    const std::size_t hd = options_.shape.size();
    const std::uint64_t noise_base = tuple_hash(options_, prompt.text, prompt.seed, "x0");

    std::vector<double> x(kMockLatentSize);
    for (int i = 0; i < kMockLatentSize; ++i) {
        x[i] = hashed_value(noise_base, static_cast<std::uint64_t>(i));
    }

    for (int step = 0; step < num_steps; ++step) {
        forward_passes_.fetch_add(1);
        std::vector<float> h = middle_activation(prompt, step);

        const bool planned = inject && (inject->steps.empty() ||
                                        std::find(inject->steps.begin(), inject->steps.end(),
                                                  step) != inject->steps.end());
        if (planned) {
            std::vector<float> applied(hd);
            for (std::size_t i = 0; i < hd; ++i) {
                applied[i] = static_cast<float>(inject->scale * inject->offset[i]);
                h[i] += applied[i];
            }
            std::lock_guard<std::mutex> log_lock(log_mutex_);
            injection_log_.push_back({step, std::move(applied)});
        }

        // Decoder half: prediction mixes the latent with the (possibly
        // edited) middle-block activation.
        for (int i = 0; i < kMockLatentSize; ++i) {
            const double hv = h[static_cast<std::size_t>(i * 31 + 7) % hd];
            x[i] = std::clamp(0.55 * x[i] + 0.45 * hv, -4.0, 4.0);
        }

        const bool last = step + 1 == num_steps;
        if (!last && options_.mode == BackendMode::lcm) {
            // LCM-style refinement: add noise back before the next prediction.
            const double sigma = 0.4 / (step + 1);
            std::uint64_t rebase = util::fnv1a64_u64(static_cast<std::uint64_t>(step + 1),
                                                     noise_base);
            for (int i = 0; i < kMockLatentSize; ++i) {
                x[i] += sigma * hashed_value(rebase, static_cast<std::uint64_t>(i));
            }
        }
    }

    // Map the final latent to grayscale-ish RGB pixels.
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(kMockImageSide) *
                                  kMockImageSide * 3);
    for (int i = 0; i < kMockLatentSize; ++i) {
        const double unit = std::clamp((x[i] + 4.0) / 8.0, 0.0, 1.0);
        const auto lum = static_cast<std::uint8_t>(std::lround(unit * 255.0));
        rgb[3 * i + 0] = lum;
        rgb[3 * i + 1] = static_cast<std::uint8_t>(255 - lum);
        rgb[3 * i + 2] = static_cast<std::uint8_t>((lum * 37) & 0xff);
    }

    GeneratedImage image;
    image.width = kMockImageSide;
    image.height = kMockImageSide;
    image.png = png::encode_rgb8(rgb, kMockImageSide, kMockImageSide);
    return image;
}

std::vector<InjectionRecord> MockBackend::injection_log() const {
    std::lock_guard<std::mutex> lock(log_mutex_);
    return injection_log_;
}

void MockBackend::reset_instrumentation() {
    std::lock_guard<std::mutex> lock(log_mutex_);
    injection_log_.clear();
    capture_events_.store(0);
    forward_passes_.store(0);
}

}  // namespace scalex
