#include "scalex/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "scalex/compare.hpp"
#include "scalex/kernels.hpp"

namespace scalex {

std::vector<Point2d> embed_2d(std::span<const std::vector<double>> vectors,
                              const AtlasConfig& config, const Embedder2d& engine) {
    if (vectors.size() < 3) {
        raise(ErrorCode::TooFewPoints, "embedding needs at least 3 vectors");
    }
    if (!(config.embed_perplexity > 0.0) ||
        config.embed_perplexity >= static_cast<double>(vectors.size())) {
        raise(ErrorCode::ConfigError,
              "perplexity must be positive and below the number of points");
    }
    return engine.embed(vectors, config.embed_perplexity, config.embed_seed);
}

std::vector<int> cluster_vectors(std::span<const std::vector<double>> vectors,
                                 const AtlasConfig& config,
                                 const DensityClusterer& engine) {
    if (config.cluster_min_size < 1 || config.cluster_min_samples < 1) {
        raise(ErrorCode::ConfigError, "cluster parameters must be positive");
    }
    if (vectors.size() < static_cast<std::size_t>(config.cluster_min_size)) {
        raise(ErrorCode::TooFewPoints,
              std::to_string(vectors.size()) + " points < min_cluster_size " +
                  std::to_string(config.cluster_min_size));
    }
    return engine.cluster(vectors, config.cluster_min_size, config.cluster_min_samples);
}

std::vector<std::vector<double>> cluster_overlap(
    std::span<const int> labels, std::span<const std::string> category_labels,
    std::vector<std::string>& categories_out) {
    if (labels.size() != category_labels.size()) {
        raise(ErrorCode::LengthMismatch, "labels and categories differ in length");
    }
    categories_out.clear();
    std::map<std::string, std::size_t> category_index;
    for (const std::string& c : category_labels) {
        if (category_index.try_emplace(c, categories_out.size()).second) {
            categories_out.push_back(c);
        }
    }
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    std::vector<std::vector<double>> overlap(
        static_cast<std::size_t>(max_label + 1),
        std::vector<double>(categories_out.size(), 0.0));
    std::vector<double> totals(static_cast<std::size_t>(max_label + 1), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        overlap[labels[i]][category_index[category_labels[i]]] += 1.0;
        totals[labels[i]] += 1.0;
    }
    for (std::size_t c = 0; c < overlap.size(); ++c) {
        if (totals[c] == 0.0) continue;
        for (double& v : overlap[c]) v /= totals[c];
    }
    return overlap;
}

std::vector<std::vector<double>> inter_cluster_distance(
    std::span<const std::vector<double>> vectors, std::span<const int> labels,
    InterClusterMetric metric) {
    (void)metric;  // centroid_cosine is the only metric
    if (vectors.size() != labels.size()) {
        raise(ErrorCode::LengthMismatch, "vectors and labels differ in length");
    }
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    const std::size_t k = static_cast<std::size_t>(max_label + 1);
    if (k < 2) raise(ErrorCode::SingleCluster, "need at least 2 clusters");

    const std::size_t dims = vectors.empty() ? 0 : vectors.front().size();
    const auto& ops = kernels::active();
    std::vector<std::vector<double>> centroids(k, std::vector<double>(dims, 0.0));
    std::vector<double> counts(k, 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (labels[i] < 0) continue;
        ops.axpy_f64(centroids[labels[i]].data(), vectors[i].data(), dims, 1.0);
        counts[labels[i]] += 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0.0) {
            raise(ErrorCode::EmptyInput, "cluster " + std::to_string(c) + " has no members");
        }
        for (double& v : centroids[c]) v /= counts[c];
    }

    std::vector<std::vector<double>> out(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double d = cosine_distance(std::span<const double>(centroids[a]),
                                             std::span<const double>(centroids[b]));
            out[a][b] = d;
            out[b][a] = d;
        }
    }
    return out;
}

namespace {

std::vector<std::string> chunk_captions(const std::vector<std::string>& captions,
                                        std::size_t char_limit) {
    std::vector<std::string> chunks;
    std::string current;
    for (const std::string& cap : captions) {
        if (!current.empty() && current.size() + cap.size() + 1 > char_limit) {
            chunks.push_back(current);
            current.clear();
        }
        if (!current.empty()) current += "\n";
        current += cap;
    }
    if (!current.empty()) chunks.push_back(current);
    return chunks;
}

}  // namespace

ClusterSummaryOutcome summarize_clusters(
    std::span<const int> labels,
    const std::map<std::string, std::string>& captions_by_record,
    std::span<const std::string> record_ids, SummarizerClient& endpoint,
    int max_concurrent, std::size_t chunk_char_limit) {
    if (labels.size() != record_ids.size()) {
        raise(ErrorCode::LengthMismatch, "labels and record ids differ in length");
    }
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);

    std::vector<std::vector<std::string>> member_captions(
        static_cast<std::size_t>(max_label + 1));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        const auto it = captions_by_record.find(record_ids[i]);
        member_captions[labels[i]].push_back(it != captions_by_record.end()
                                                 ? it->second
                                                 : record_ids[i]);
    }

    struct PerCluster {
        std::string summary;
        std::string error;
        std::vector<LlmExchange> exchanges;
    };
    std::vector<PerCluster> results(member_captions.size());

    auto run_one = [&](int cluster) {
        PerCluster& r = results[cluster];
        const auto chunks = chunk_captions(member_captions[cluster], chunk_char_limit);
        try {
            for (const std::string& chunk : chunks) {
                const std::string request =
                    "Summarize the common characteristics of cluster " +
                    std::to_string(cluster) + " given these captions:\n" + chunk;
                const std::string response = endpoint.complete(request);
                if (!r.summary.empty()) r.summary += "\n";
                r.summary += response;
                r.exchanges.push_back({request, response});
            }
        } catch (const Error& e) {
            r.error = e.what();
        }
    };

    const int bound = std::max(1, max_concurrent);
    for (std::size_t start = 0; start < results.size();
         start += static_cast<std::size_t>(bound)) {
        std::vector<std::future<void>> batch;
        const std::size_t stop = std::min(results.size(), start + bound);
        for (std::size_t c = start; c < stop; ++c) {
            batch.push_back(std::async(std::launch::async, run_one, static_cast<int>(c)));
        }
        for (auto& f : batch) f.get();
    }

    ClusterSummaryOutcome outcome;
    for (std::size_t c = 0; c < results.size(); ++c) {
        if (!results[c].error.empty()) {
            outcome.errors[static_cast<int>(c)] = results[c].error;
        } else {
            outcome.summaries[static_cast<int>(c)] = results[c].summary;
        }
        for (LlmExchange& ex : results[c].exchanges) {
            outcome.transcript.push_back(std::move(ex));
        }
    }
    return outcome;
}

}  // namespace scalex
