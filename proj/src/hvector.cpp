#include "scalex/hvector.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace scalex {

namespace {

bool whitespace_only(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

void PromptSpec::validate() const {
    if (text.empty() || whitespace_only(text)) {
        raise(ErrorCode::InvalidPrompt, "prompt text is empty");
    }
    if (!(guidance_scale >= 0.0)) {
        raise(ErrorCode::InvalidPrompt, "guidance_scale must be >= 0");
    }
}

std::string TensorShape::str() const {
    return "(" + std::to_string(channels) + ", " + std::to_string(height) +
           ", " + std::to_string(width) + ")";
}

const char* timestep_mode_name(TimestepMode mode) {
    return mode == TimestepMode::lcm_single_step ? "lcm_single_step" : "ldm_step";
}

TimestepMode timestep_mode_from_name(const std::string& name) {
    if (name == "lcm_single_step") return TimestepMode::lcm_single_step;
    if (name == "ldm_step") return TimestepMode::ldm_step;
    raise(ErrorCode::ConfigError, "unknown timestep mode: " + name);
}

void HVector::validate() const {
    if (values.size() != shape.size()) {
        raise(ErrorCode::ShapeMismatch,
              "value count " + std::to_string(values.size()) +
                  " does not match shape " + shape.str());
    }
    for (float v : values) {
        if (!std::isfinite(v)) {
            raise(ErrorCode::NonFiniteActivation, "activation contains NaN/Inf");
        }
    }
}

void ExtractionConfig::validate() const {
    if (seeds.empty()) {
        raise(ErrorCode::ConfigError, "extraction requires at least one seed");
    }
    std::unordered_set<std::uint64_t> seen(seeds.begin(), seeds.end());
    if (seen.size() != seeds.size()) {
        raise(ErrorCode::ConfigError, "duplicate seeds in extraction config");
    }
    if (batch_size < 1) {
        raise(ErrorCode::ConfigError, "batch_size must be positive");
    }
    if (num_refinement_steps_discarded < 0) {
        raise(ErrorCode::ConfigError, "refinement step count must be >= 0");
    }
}

}  // namespace scalex
