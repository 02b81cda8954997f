#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalex/hvector.hpp"
#include "scalex/store.hpp"

namespace scalex {

// 1 - a.b/(|a||b|), accumulated in 64-bit, clamped to [0, 2].
// Throws ZeroVector / ShapeMismatch.
double cosine_distance(const HVector& a, const HVector& b);
double cosine_distance(std::span<const float> a, std::span<const float> b);
double cosine_distance(std::span<const double> a, std::span<const double> b);

// d(attr_a, neutral) - d(attr_b, neutral). Positive: neutral sits closer to
// attr_b.
double default_delta(const HVector& h_neutral, const HVector& h_attr_a,
                     const HVector& h_attr_b);

struct DefaultDeltaResult {
    std::string label;  // grouping key, e.g. the profession
    std::string neutral_id;
    std::string attr_a_id;
    std::string attr_b_id;
    double delta = 0.0;
    // One entry per (neutral prompt, seed) pair, prompt-major. delta is their
    // mean.
    std::vector<double> per_seed_deltas;
};

// One aggregated row per profession, sorted by delta ascending. attr_pair =
// {tag value a, tag value b}, matched against the "gender" tag; neutral rows
// carry gender=neutral. Gendered records tagged with a "variant" are kept
// only when it equals `variant` (untagged records always participate).
// Throws MissingVariant naming the absent (profession, prompt, seed) triple.
std::vector<DefaultDeltaResult> profession_delta_table(
    const VectorStore& store, const TagMap& profession_tagset,
    const std::pair<std::string, std::string>& attr_pair,
    std::span<const std::uint64_t> seeds, const std::string& variant = {});

std::vector<DefaultDeltaResult> profession_delta_table(
    std::span<const VectorRecord> records,
    const std::pair<std::string, std::string>& attr_pair,
    std::span<const std::uint64_t> seeds, const std::string& variant = {});

enum class Normalization { raw, mean_centered, std_scaled, pca_projected };
const char* normalization_name(Normalization n);

enum class StdAxis { per_descriptor, per_concept };

struct PcaProjector {
    // components: M x D, rows orthonormal.
    std::vector<double> components;
    std::size_t dims = 0;
    std::size_t rank = 0;  // M
    std::vector<double> center;  // global concept mean (uncentered mode: unused)

    std::span<const double> component(std::size_t m) const {
        return {components.data() + m * dims, dims};
    }
};

struct DistanceMatrix {
    std::vector<double> values;  // row-major, rows = descriptors
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::string> descriptor_ids;
    std::vector<std::string> concept_ids;
    Normalization normalization = Normalization::raw;

    // Normalization parameters, population statistics.
    std::vector<double> mu;
    std::vector<double> sigma;
    std::optional<StdAxis> std_axis;
    std::optional<PcaProjector> projector;
    bool centered_per_seed = false;

    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

// values[i][j] = cosine_distance(descriptor_i, concept_j); normalization=raw.
// Requires n >= 2 concepts and matching shapes.
DistanceMatrix distance_matrix(std::span<const HVector> descriptors,
                               std::span<const HVector> concepts,
                               std::span<const std::string> descriptor_ids = {},
                               std::span<const std::string> concept_ids = {});

// d'_{i,j} = d_{i,j} - row_mean_i. Rows sum to zero.
DistanceMatrix normalize_mean(const DistanceMatrix& raw);

// d'_{i,j} = (d_{i,j} - mu)/sigma over the chosen axis (population std).
// ZeroVariance names the degenerate row/column.
DistanceMatrix normalize_std(const DistanceMatrix& raw, StdAxis axis);

// Projects descriptors and concepts into the principal subspace of the
// (optionally per-seed-centered) concept vectors, then recomputes cosine
// distances there. seed_labels groups concepts for centering; when empty the
// concepts' own prompt seeds are used.
DistanceMatrix normalize_pca(std::span<const HVector> descriptors,
                             std::span<const HVector> concepts, std::size_t rank,
                             bool center_per_seed,
                             std::span<const std::uint64_t> seed_labels = {},
                             std::span<const std::string> descriptor_ids = {},
                             std::span<const std::string> concept_ids = {});

struct RankingResult {
    struct Row {
        std::string descriptor_id;
        double score = 0.0;
    };
    std::vector<Row> rows;  // most aligned with the target first
    std::string concept_id;
    std::size_t concept_index = 0;
    Normalization normalization = Normalization::raw;
    // True when score is the pairwise difference d(other) - d(target)
    // (two-concept raw/mean convention); otherwise score is the normalized
    // distance to the target itself.
    bool pairwise_score = false;
};

// Sorts descriptors ascending by normalized distance to the target concept
// (ties by descriptor id). Raw matrices are only accepted for n = 2.
RankingResult rank_descriptors(const DistanceMatrix& normalized,
                               std::size_t target_concept_index);

struct Correlation {
    double pearson = 0.0;
    double spearman = 0.0;
};

// Pearson product-moment and Spearman rank (average ranks on ties).
// Requires equal lengths >= 3 and nonzero variance on both sides.
Correlation variant_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace scalex
