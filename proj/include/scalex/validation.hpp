#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scalex/clients.hpp"
#include "scalex/compare.hpp"

namespace scalex {

struct ClassificationProtocol {
    std::vector<std::string> class_prompts{"a photo of a man", "a photo of a woman"};

    void validate() const;  // >= 2 distinct prompts
};

// argmax over similarity(image, class_prompt_k); ties break to the lowest
// index. Throws UndecodableImage / EndpointUnavailable.
std::size_t classify_image(std::span<const std::uint8_t> image_png,
                           const ClassificationProtocol& protocol,
                           ClassifierClient& classifier);

// 100 * count(class == target)/N over the images. Fan-out is bounded by
// max_concurrent.
double percent_attribute(std::span<const std::vector<std::uint8_t>> images,
                         const ClassificationProtocol& protocol,
                         ClassifierClient& classifier, std::size_t target_class,
                         int max_concurrent = 4);

struct ValidationRow {
    std::string prompt_id;
    double percent_class = 0.0;
    double mean_delta = 0.0;
};

struct ValidationReport {
    std::vector<ValidationRow> per_prompt;
    Correlation correlation;
    int n_images = 0;
};

// Pairs each prompt's delta with its image percentage (aligned by prompt id)
// and correlates the two columns across prompts.
ValidationReport validate_bias(std::span<const std::string> prompt_ids,
                               std::span<const double> deltas,
                               std::span<const double> image_percentages,
                               int n_images = 0);

}  // namespace scalex
