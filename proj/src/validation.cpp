#include "scalex/validation.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "scalex/png.hpp"

namespace scalex {

void ClassificationProtocol::validate() const {
    if (class_prompts.size() < 2) {
        raise(ErrorCode::ConfigError, "protocol needs at least 2 class prompts");
    }
    std::set<std::string> distinct(class_prompts.begin(), class_prompts.end());
    if (distinct.size() != class_prompts.size()) {
        raise(ErrorCode::ConfigError, "class prompts must be distinct");
    }
}

std::size_t classify_image(std::span<const std::uint8_t> image_png,
                           const ClassificationProtocol& protocol,
                           ClassifierClient& classifier) {
    protocol.validate();
    if (!png::looks_like_png(image_png)) {
        raise(ErrorCode::UndecodableImage, "image is not a decodable PNG");
    }
    const std::vector<double> sims =
        classifier.similarities(image_png, protocol.class_prompts);
    std::size_t best = 0;
    for (std::size_t k = 1; k < sims.size(); ++k) {
        if (sims[k] > sims[best]) best = k;  // strict: ties keep the lowest index
    }
    return best;
}

double percent_attribute(std::span<const std::vector<std::uint8_t>> images,
                         const ClassificationProtocol& protocol,
                         ClassifierClient& classifier, std::size_t target_class,
                         int max_concurrent) {
    protocol.validate();
    if (images.empty()) raise(ErrorCode::EmptyInput, "no images to classify");
    if (target_class >= protocol.class_prompts.size()) {
        raise(ErrorCode::BadIndex, "target class out of range");
    }
    std::vector<std::size_t> classes(images.size());
    const int bound = std::max(1, max_concurrent);
    for (std::size_t start = 0; start < images.size();
         start += static_cast<std::size_t>(bound)) {
        const std::size_t stop =
            std::min(images.size(), start + static_cast<std::size_t>(bound));
        std::vector<std::future<void>> batch;
        for (std::size_t i = start; i < stop; ++i) {
            batch.push_back(std::async(std::launch::async, [&, i] {
                classes[i] = classify_image(images[i], protocol, classifier);
            }));
        }
        for (auto& f : batch) f.get();
    }
    const auto hits = static_cast<double>(
        std::count(classes.begin(), classes.end(), target_class));
    return 100.0 * hits / static_cast<double>(images.size());
}

ValidationReport validate_bias(std::span<const std::string> prompt_ids,
                               std::span<const double> deltas,
                               std::span<const double> image_percentages,
                               int n_images) {
    if (prompt_ids.size() != deltas.size() ||
        prompt_ids.size() != image_percentages.size()) {
        raise(ErrorCode::LengthMismatch,
              "prompt ids, deltas and percentages must be aligned");
    }
    ValidationReport report;
    report.n_images = n_images;
    report.per_prompt.reserve(prompt_ids.size());
    for (std::size_t i = 0; i < prompt_ids.size(); ++i) {
        report.per_prompt.push_back({prompt_ids[i], image_percentages[i], deltas[i]});
    }
    report.correlation = variant_correlation(deltas, image_percentages);
    return report;
}

}  // namespace scalex
