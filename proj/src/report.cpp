#include "scalex/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace scalex::report {

using nlohmann::json;

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
}

}  // namespace

std::string fixed4(double v) { return fixed(v, 4); }

std::string deltas_csv(std::span<const DefaultDeltaResult> table) {
    std::string out = "label,delta,n_samples\n";
    for (const auto& row : table) {
        out += csv_escape(row.label) + "," + fixed4(row.delta) + "," +
               std::to_string(row.per_seed_deltas.size()) + "\n";
    }
    return out;
}

std::string ranking_csv(const RankingResult& ranking) {
    std::string out = "descriptor_id,score\n";
    for (const auto& row : ranking.rows) {
        out += csv_escape(row.descriptor_id) + "," + fixed(row.score, 5) + "\n";
    }
    return out;
}

std::string deltas_json(std::span<const DefaultDeltaResult> table,
                        const std::map<std::string, Correlation>& variant_correlations) {
    json rows = json::array();
    for (const auto& row : table) {
        rows.push_back({
            {"label", row.label},
            {"delta", row.delta},
            {"per_seed_deltas", row.per_seed_deltas},
            {"neutral_id", row.neutral_id},
            {"attr_a_id", row.attr_a_id},
            {"attr_b_id", row.attr_b_id},
        });
    }
    json correlations = json::object();
    for (const auto& [variant, corr] : variant_correlations) {
        correlations[variant] = {{"pearson", corr.pearson}, {"spearman", corr.spearman}};
    }
    json doc = {{"rows", std::move(rows)},
                {"variant_correlations", std::move(correlations)}};
    return doc.dump(2) + "\n";
}

std::string ranking_json(const RankingResult& ranking,
                         const std::vector<LlmExchange>& summary_exchanges,
                         const std::string& summary_text,
                         const std::string& summary_error) {
    json rows = json::array();
    for (const auto& row : ranking.rows) {
        rows.push_back({{"descriptor_id", row.descriptor_id}, {"score", row.score}});
    }
    json doc = {
        {"target_concept", ranking.concept_id},
        {"normalization", normalization_name(ranking.normalization)},
        {"pairwise_score", ranking.pairwise_score},
        {"rows", std::move(rows)},
    };
    if (!summary_text.empty() || !summary_exchanges.empty()) {
        json exchanges = json::array();
        for (const auto& ex : summary_exchanges) {
            exchanges.push_back({{"request", ex.request}, {"response", ex.response}});
        }
        doc["summary"] = {{"text", summary_text}, {"exchanges", std::move(exchanges)}};
    }
    if (!summary_error.empty()) doc["summary_error"] = summary_error;
    return doc.dump(2) + "\n";
}

std::string atlas_json(const ConceptAtlas& atlas) {
    json points = json::array();
    for (const auto& p : atlas.points) points.push_back({p.x, p.y});
    json summaries = json::object();
    for (const auto& [cluster, text] : atlas.summaries) {
        summaries[std::to_string(cluster)] = text;
    }
    json summary_errors = json::object();
    for (const auto& [cluster, text] : atlas.summary_errors) {
        summary_errors[std::to_string(cluster)] = text;
    }
    json doc = {
        {"points", std::move(points)},
        {"labels", atlas.labels},
        {"record_ids", atlas.record_ids},
        {"summaries", std::move(summaries)},
        {"summary_errors", std::move(summary_errors)},
        {"overlap", atlas.overlap},
        {"overlap_categories", atlas.overlap_categories},
        {"inter_cluster", atlas.inter_cluster},
        {"clustered_on", atlas.clustered_on},
        {"config",
         {{"embed_perplexity", atlas.config.embed_perplexity},
          {"embed_seed", atlas.config.embed_seed},
          {"cluster_min_size", atlas.config.cluster_min_size},
          {"cluster_min_samples", atlas.config.cluster_min_samples}}},
    };
    return doc.dump(2) + "\n";
}

std::string validation_json(const ValidationReport& report) {
    json rows = json::array();
    for (const auto& row : report.per_prompt) {
        rows.push_back({
            {"prompt_id", row.prompt_id},
            {"percent_class", row.percent_class},
            {"mean_delta", row.mean_delta},
        });
    }
    json doc = {
        {"per_prompt", std::move(rows)},
        {"correlation",
         {{"pearson", report.correlation.pearson},
          {"spearman", report.correlation.spearman}}},
        {"n_images", report.n_images},
    };
    return doc.dump(2) + "\n";
}

}  // namespace scalex::report
