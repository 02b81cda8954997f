#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scalex/errors.hpp"

namespace scalex {

// Text conditioning for one extraction or generation.
struct PromptSpec {
    std::string text;
    std::string negative_text;       // empty = no negative prompt
    double guidance_scale = 7.5;
    std::uint64_t seed = 0;

    // Throws InvalidPrompt when text is whitespace-only or guidance < 0.
    void validate() const;
};

struct TensorShape {
    int channels = 0;
    int height = 0;
    int width = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(channels) * height * width;
    }
    bool operator==(const TensorShape&) const = default;
    std::string str() const;
};

enum class TimestepMode {
    lcm_single_step,
    ldm_step,
};

const char* timestep_mode_name(TimestepMode mode);
TimestepMode timestep_mode_from_name(const std::string& name);

// One flattened middle-block activation plus its provenance. Values are
// row-major (channel, height, width) float32.
struct HVector {
    std::vector<float> values;
    TensorShape shape;
    PromptSpec prompt;
    std::string model_id;
    TimestepMode timestep_mode = TimestepMode::lcm_single_step;
    int ldm_timestep = 0;  // meaningful only for TimestepMode::ldm_step
    std::chrono::system_clock::time_point created_at{};

    std::span<const float> data() const { return values; }

    // ShapeMismatch when length != shape volume, NonFiniteActivation on NaN/Inf.
    void validate() const;
};

struct ExtractionConfig {
    std::vector<std::uint64_t> seeds;
    int batch_size = 8;
    std::string capture_layer;  // empty = backend's declared middle block
    int num_refinement_steps_discarded = 3;

    void validate() const;  // seeds non-empty, no duplicates
};

}  // namespace scalex
