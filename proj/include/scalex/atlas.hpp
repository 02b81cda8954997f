#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scalex/clients.hpp"
#include "scalex/errors.hpp"

namespace scalex {

struct AtlasConfig {
    double embed_perplexity = 30.0;
    std::uint64_t embed_seed = 0;
    int cluster_min_size = 5;
    int cluster_min_samples = 5;
};

struct Point2d {
    double x = 0.0;
    double y = 0.0;
};

// Pluggable 2-D embedding engine. Implementations must be deterministic for a
// fixed seed.
class Embedder2d {
  public:
    virtual ~Embedder2d() = default;
    virtual std::vector<Point2d> embed(std::span<const std::vector<double>> vectors,
                                       double perplexity, std::uint64_t seed) const = 0;
    virtual std::string name() const = 0;
};

// Pluggable density-based clusterer. Labels: -1 noise, otherwise contiguous
// ids from 0, canonically numbered by first occurrence.
class DensityClusterer {
  public:
    virtual ~DensityClusterer() = default;
    virtual std::vector<int> cluster(std::span<const std::vector<double>> vectors,
                                     int min_cluster_size, int min_samples) const = 0;
    virtual std::string name() const = 0;
};

std::unique_ptr<Embedder2d> make_tsne_embedder();
std::unique_ptr<DensityClusterer> make_density_clusterer();

struct ConceptAtlas {
    std::vector<Point2d> points;
    std::vector<int> labels;
    std::vector<std::string> record_ids;
    std::map<int, std::string> summaries;
    std::map<int, std::string> summary_errors;
    // overlap[c][g]: fraction of cluster c's members carrying category g.
    std::vector<std::vector<double>> overlap;
    std::vector<std::string> overlap_categories;
    // Symmetric centroid cosine distances, zero diagonal.
    std::vector<std::vector<double>> inter_cluster;
    std::string clustered_on;  // "vectors" or "embedding"
    AtlasConfig config;
};

// --- operations ---

// One 2-D point per vector; >= 3 vectors, perplexity < point count.
std::vector<Point2d> embed_2d(std::span<const std::vector<double>> vectors,
                              const AtlasConfig& config,
                              const Embedder2d& engine);

std::vector<int> cluster_vectors(std::span<const std::vector<double>> vectors,
                                 const AtlasConfig& config,
                                 const DensityClusterer& engine);

// overlap[c][g] over parallel label lists; categories ordered by first
// occurrence of each category string.
std::vector<std::vector<double>> cluster_overlap(
    std::span<const int> labels, std::span<const std::string> category_labels,
    std::vector<std::string>& categories_out);

enum class InterClusterMetric { centroid_cosine };

std::vector<std::vector<double>> inter_cluster_distance(
    std::span<const std::vector<double>> vectors, std::span<const int> labels,
    InterClusterMetric metric = InterClusterMetric::centroid_cosine);

struct ClusterSummaryOutcome {
    std::map<int, std::string> summaries;
    std::map<int, std::string> errors;     // per-cluster failures, isolated
    std::vector<LlmExchange> transcript;   // raw request/response audit trail
};

// One summary per non-noise cluster; per-cluster endpoint failures are
// recorded without aborting the rest. max_concurrent bounds the fan-out.
ClusterSummaryOutcome summarize_clusters(
    std::span<const int> labels,
    const std::map<std::string, std::string>& captions_by_record,
    std::span<const std::string> record_ids, SummarizerClient& endpoint,
    int max_concurrent = 4, std::size_t chunk_char_limit = 8000);

}  // namespace scalex
