#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scalex/commands.hpp"
#include "scalex/kernels.hpp"

// scalex: prompt-aligned H-space extraction and bias analysis over diffusion
// backends. Subcommands mirror the pipeline: extract -> defaults/rank/atlas ->
// condition/validate -> report.

namespace {

using scalex::RunConfig;

scalex::TagMap parse_tags(const std::vector<std::string>& kvs) {
    scalex::TagMap tags;
    for (const std::string& kv : kvs) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw scalex::Error(scalex::ErrorCode::ConfigError,
                                "expected key=value, got '" + kv + "'");
        }
        tags[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return tags;
}

std::vector<std::uint64_t> seeds_from(const std::vector<std::uint64_t>& listed,
                                      int seed_count) {
    if (!listed.empty()) return listed;
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < seed_count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    return seeds;
}

// Config file values fill in anything the flags left at defaults.
template <typename T>
void config_fill(const RunConfig& cfg, const std::string& section, const std::string& key,
                 T& value, const T& built_in_default) {
    if (value == built_in_default && cfg.has(section, key)) {
        if constexpr (std::is_same_v<T, std::string>) {
            value = cfg.get_string(section, key, value);
        } else if constexpr (std::is_same_v<T, bool>) {
            value = cfg.get_bool(section, key, value);
        } else if constexpr (std::is_floating_point_v<T>) {
            value = cfg.get_double(section, key, value);
        } else {
            value = static_cast<T>(cfg.get_int(section, key, value));
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prompt-aligned H-space bias analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Run configuration file (TOML-style)");

    // Common knobs shared by several subcommands.
    std::string store_dir = "store";
    std::string model = "mock";
    std::string mode = "lcm";
    std::vector<std::uint64_t> seed_list;
    int seed_count = 3;
    std::string endpoint;

    auto add_common = [&](CLI::App* cmd, bool with_backend) {
        cmd->add_option("--store", store_dir, "Vector store directory");
        if (with_backend) {
            cmd->add_option("--model", model, "Backend model id (mock, mock-8d, sd15, sdxl)");
            cmd->add_option("--mode", mode, "Backend mode: lcm|ldm");
            cmd->add_option("--backend-endpoint", endpoint,
                            "Remote inference endpoint (or SCALEX_BACKEND_ENDPOINT)");
        }
    };

    // --- extract ---
    auto* extract = app.add_subcommand("extract", "Extract H-space vectors for a corpus");
    std::string corpus, corpus_name, prefix, negative, capture_layer;
    bool gender_variants = false;
    std::vector<std::string> variants;
    std::string surnames;
    double guidance = 7.5;
    int refinement_steps = 3;
    add_common(extract, true);
    extract->add_option("--corpus", corpus, "Prompt corpus file (one per line)")->required();
    extract->add_option("--corpus-name", corpus_name, "Tag value (default: file stem)");
    extract->add_option("--seeds", seed_list, "Explicit seed list");
    extract->add_option("--seed-count", seed_count, "Number of seeds 0..N-1");
    extract->add_flag("--gender-variants", gender_variants,
                      "Also extract female/male rewrites of each prompt");
    extract->add_option("--variants", variants,
                        "Gendered phrasings (female_male woman_man relative_clause "
                        "pronoun first_name honorific)");
    extract->add_option("--surnames", surnames, "Surname fixture for honorifics");
    extract->add_option("--prefix", prefix, "Text prepended to every corpus line");
    extract->add_option("--guidance", guidance, "Guidance scale");
    extract->add_option("--negative", negative, "Negative prompt");
    extract->add_option("--capture-layer", capture_layer, "Capture layer override");
    extract->add_option("--refinement-steps", refinement_steps,
                        "Sampler refinement steps discarded after capture");

    // --- defaults ---
    auto* defaults = app.add_subcommand("defaults", "Per-profession default deltas");
    std::vector<std::string> tagset_kvs{"corpus=professions"};
    std::string pair = "female,male";
    std::string variant = "female_male";
    std::vector<std::string> correlate_variants;
    std::string out_dir = "out";
    add_common(defaults, false);
    defaults->add_option("--tagset", tagset_kvs, "Record filter tags (key=value)");
    defaults->add_option("--pair", pair, "Attribute tag pair, e.g. female,male");
    defaults->add_option("--seeds", seed_list, "Explicit seed list");
    defaults->add_option("--seed-count", seed_count, "Number of seeds 0..N-1");
    defaults->add_option("--variant", variant, "Gendered phrasing to evaluate");
    defaults->add_option("--correlate-variants", correlate_variants,
                         "Other phrasings to correlate against");
    defaults->add_option("--out", out_dir, "Output directory");

    // --- rank ---
    auto* rank = app.add_subcommand("rank", "Rank descriptors against target concepts");
    std::vector<std::string> descriptor_kvs, concept_kvs;
    std::string norm = "mean", std_axis = "per_concept", target_concept;
    int pca_rank = 0;
    bool no_center = false, summarize = false;
    std::string llm_endpoint;
    add_common(rank, false);
    rank->add_option("--descriptors", descriptor_kvs, "Descriptor filter tags")->required();
    rank->add_option("--concepts", concept_kvs, "Concept filter tags")->required();
    rank->add_option("--norm", norm, "Normalization: mean|std|pca|raw");
    rank->add_option("--axis", std_axis, "std axis: per_concept|per_descriptor");
    rank->add_option("--pca-rank", pca_rank, "PCA rank M (default: n_concepts-1)");
    rank->add_flag("--no-center", no_center, "Disable per-seed centering for PCA");
    rank->add_option("--target", target_concept, "Target concept id (default: first)");
    rank->add_flag("--summarize", summarize, "Summarize the ranking with the LLM endpoint");
    rank->add_option("--llm-endpoint", llm_endpoint,
                     "echo: | replay:<dir> | http URL (or SCALEX_LLM_ENDPOINT)");
    rank->add_option("--out", out_dir, "Output directory");

    // --- atlas ---
    auto* atlas = app.add_subcommand("atlas", "Embed, cluster and summarize vectors");
    std::vector<std::string> input_kvs;
    double perplexity = 30.0;
    std::uint64_t embed_seed = 0;
    int min_cluster_size = 5, min_samples = 5;
    std::string cluster_on = "vectors", category_tag, out_json = "atlas.json", out_plot;
    add_common(atlas, false);
    atlas->add_option("--input", input_kvs, "Record filter tags");
    atlas->add_option("--perplexity", perplexity, "Embedding perplexity");
    atlas->add_option("--embed-seed", embed_seed, "Embedding seed");
    atlas->add_option("--min-cluster-size", min_cluster_size, "Minimum cluster size");
    atlas->add_option("--min-samples", min_samples, "Core distance neighbor count");
    atlas->add_option("--cluster-on", cluster_on, "Cluster space: vectors|embedding");
    atlas->add_option("--category-tag", category_tag, "Tag supplying overlap categories");
    atlas->add_flag("--summarize", summarize, "Summarize clusters with the LLM endpoint");
    atlas->add_option("--llm-endpoint", llm_endpoint, "Summarizer endpoint");
    atlas->add_option("--out", out_json, "Atlas JSON output path");
    atlas->add_option("--plot", out_plot, "Atlas SVG plot path");

    // --- condition ---
    auto* condition = app.add_subcommand("condition", "Generate with H-space edits");
    std::string prompt, out_image = "img.png", atlas_json_path;
    std::vector<std::string> plus, minus;
    double scale = 1.0;
    std::uint64_t gen_seed = 0;
    int num_steps = 0;
    std::vector<int> inject_steps;
    add_common(condition, true);
    condition->add_option("--prompt", prompt, "Base prompt")->required();
    condition->add_option("--seed", gen_seed, "Generation seed");
    condition->add_option("--plus", plus, "Added vectors: record id or cluster:<n>");
    condition->add_option("--minus", minus, "Subtracted vectors");
    condition->add_option("--scale", scale, "Injection scale");
    condition->add_option("--steps", num_steps, "Denoising steps (0 = mode default)");
    condition->add_option("--inject-steps", inject_steps,
                          "Steps to inject at (default: all)");
    condition->add_option("--atlas", atlas_json_path, "Atlas JSON for cluster:<n> refs");
    condition->add_option("--guidance", guidance, "Guidance scale");
    condition->add_option("--out", out_image, "Output PNG path");

    // --- validate ---
    auto* validate = app.add_subcommand("validate", "Classifier-based bias validation");
    std::string images_dir, protocol = "gender", deltas_csv, clip_endpoint,
                out_report = "report.json";
    std::vector<std::string> class_prompts;
    std::size_t target_class = 1;
    validate->add_option("--images", images_dir, "Directory of <label>/*.png")->required();
    validate->add_option("--protocol", protocol, "gender | custom");
    validate->add_option("--class-prompts", class_prompts, "Prompts for custom protocol");
    validate->add_option("--target-class", target_class, "Index of the reported class");
    validate->add_option("--deltas", deltas_csv, "deltas.csv to pair against")->required();
    validate->add_option("--clip-endpoint", clip_endpoint,
                         "replay:<dir> | http URL (or SCALEX_CLIP_ENDPOINT)");
    validate->add_option("--out", out_report, "Report JSON path");

    // --- report ---
    auto* report_cmd = app.add_subcommand("report", "Render tables and figures");
    std::string deltas_json, validation_json, atlas_json_in;
    report_cmd->add_option("--deltas-json", deltas_json, "deltas.json analysis");
    report_cmd->add_option("--validation-json", validation_json, "report.json analysis");
    report_cmd->add_option("--atlas-json", atlas_json_in, "atlas.json analysis");
    report_cmd->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::load(config_path);
        config_fill(cfg, "common", "store", store_dir, std::string("store"));
        config_fill(cfg, "common", "model", model, std::string("mock"));
        config_fill(cfg, "common", "mode", mode, std::string("lcm"));
        if (seed_list.empty() && cfg.has("common", "seeds")) {
            for (std::int64_t s : cfg.get_int_list("common", "seeds")) {
                seed_list.push_back(static_cast<std::uint64_t>(s));
            }
        }

        if (extract->parsed()) {
            scalex::ExtractArgs args;
            args.store_dir = store_dir;
            args.model_id = model;
            args.mode = mode;
            args.corpus_path = corpus;
            args.corpus_name = corpus_name;
            args.seeds = seeds_from(seed_list, seed_count);
            args.gender_variants = gender_variants;
            if (!variants.empty()) args.variants = variants;
            if (!surnames.empty()) args.surnames_path = surnames;
            args.prefix = prefix;
            args.guidance = guidance;
            args.negative = negative;
            args.capture_layer = capture_layer;
            args.endpoint = endpoint;
            args.refinement_steps = refinement_steps;
            const auto outcome = scalex::cmd_extract(args);
            std::cout << "prompts: " << outcome.prompts << "\nstored: " << outcome.stored
                      << "\nskipped_blank: " << outcome.skipped_blank << "\n";
        } else if (defaults->parsed()) {
            scalex::DefaultsArgs args;
            args.store_dir = store_dir;
            args.tagset = parse_tags(tagset_kvs);
            const std::size_t comma = pair.find(',');
            if (comma == std::string::npos) {
                throw scalex::Error(scalex::ErrorCode::ConfigError,
                                    "--pair expects a,b");
            }
            args.attr_pair = {pair.substr(0, comma), pair.substr(comma + 1)};
            args.seeds = seeds_from(seed_list, seed_count);
            args.variant = variant;
            args.correlate_variants = correlate_variants;
            args.out_dir = out_dir;
            const auto outcome = scalex::cmd_defaults(args);
            for (const auto& row : outcome.table) {
                std::printf("%-24s % .4f\n", row.label.c_str(), row.delta);
            }
            for (const auto& [name, corr] : outcome.correlations) {
                std::printf("correlation[%s]: pearson %.4f spearman %.4f\n", name.c_str(),
                            corr.pearson, corr.spearman);
            }
        } else if (rank->parsed()) {
            scalex::RankArgs args;
            args.store_dir = store_dir;
            args.descriptor_filter = parse_tags(descriptor_kvs);
            args.concept_filter = parse_tags(concept_kvs);
            args.norm = norm;
            args.std_axis = std_axis;
            if (pca_rank > 0) args.pca_rank = static_cast<std::size_t>(pca_rank);
            args.pca_center_per_seed = !no_center;
            args.target_concept = target_concept;
            args.summarize = summarize;
            args.summarizer_endpoint = llm_endpoint;
            args.out_dir = out_dir;
            const auto outcome = scalex::cmd_rank(args);
            for (const auto& row : outcome.ranking.rows) {
                std::printf("%+.5f  %s\n", row.score, row.descriptor_id.c_str());
            }
            if (!outcome.summary_text.empty()) {
                std::cout << "--- summary ---\n" << outcome.summary_text << "\n";
            }
        } else if (atlas->parsed()) {
            scalex::AtlasArgs args;
            args.store_dir = store_dir;
            args.input_filter = parse_tags(input_kvs);
            args.config.embed_perplexity = perplexity;
            args.config.embed_seed = embed_seed;
            args.config.cluster_min_size = min_cluster_size;
            args.config.cluster_min_samples = min_samples;
            args.cluster_on = cluster_on;
            args.category_tag = category_tag;
            args.summarize = summarize;
            args.summarizer_endpoint = llm_endpoint;
            args.out_json = out_json;
            args.out_plot = out_plot;
            const auto result = scalex::cmd_atlas(args);
            int clusters = 0;
            for (int l : result.labels) clusters = std::max(clusters, l + 1);
            std::cout << "points: " << result.points.size()
                      << "\nclusters: " << clusters << "\n";
        } else if (condition->parsed()) {
            scalex::ConditionArgs args;
            args.store_dir = store_dir;
            args.model_id = model;
            args.mode = mode;
            args.prompt = prompt;
            args.seed = gen_seed;
            args.guidance = guidance;
            args.plus = plus;
            args.minus = minus;
            args.scale = scale;
            args.num_steps = num_steps;
            args.inject_steps = inject_steps;
            args.atlas_json = atlas_json_path;
            args.endpoint = endpoint;
            args.out_image = out_image;
            const auto image = scalex::cmd_condition(args);
            std::cout << "image: " << out_image << " (" << image.width << "x"
                      << image.height << ", " << image.png.size() << " bytes)\n";
        } else if (validate->parsed()) {
            scalex::ValidateArgs args;
            args.images_dir = images_dir;
            args.protocol = protocol;
            args.class_prompts = class_prompts;
            args.target_class = target_class;
            args.deltas_csv = deltas_csv;
            args.classifier_endpoint = clip_endpoint;
            args.out_json = out_report;
            const auto report = scalex::cmd_validate(args);
            std::printf("prompts: %zu  images: %d\npearson % .4f  spearman % .4f\n",
                        report.per_prompt.size(), report.n_images,
                        report.correlation.pearson, report.correlation.spearman);
        } else if (report_cmd->parsed()) {
            scalex::ReportArgs args;
            args.deltas_json = deltas_json;
            args.validation_json = validation_json;
            args.atlas_json = atlas_json_in;
            args.out_dir = out_dir;
            for (const auto& path : scalex::cmd_report(args)) {
                std::cout << path.string() << "\n";
            }
        }
    } catch (const scalex::Error& e) {
        const nlohmann::json err = {
            {"error",
             {{"code", scalex::error_code_name(e.code())}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        const nlohmann::json err = {
            {"error", {{"code", "Internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
