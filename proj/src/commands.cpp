#include "scalex/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "scalex/prompts.hpp"
#include "scalex/report.hpp"
#include "scalex/summarize.hpp"
#include "scalex/svg.hpp"
#include "scalex/util.hpp"

namespace scalex {

using nlohmann::json;

void write_resolved_config(const RunConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    config.save(out_dir / "run_config.toml");
}

namespace {

std::string scenario_tag(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03zu", index);
    return buf;
}

std::vector<std::string> tagmap_to_list(const TagMap& tags) {
    std::vector<std::string> out;
    for (const auto& [k, v] : tags) out.push_back(k + "=" + v);
    return out;
}

}  // namespace

ExtractOutcome cmd_extract(const ExtractArgs& args) {
    if (args.corpus_path.empty()) raise(ErrorCode::ConfigError, "no corpus file given");
    const CorpusLoadResult corpus = load_corpus(args.corpus_path);
    if (corpus.lines.empty()) raise(ErrorCode::EmptyBatch, "corpus has no prompts");
    if (corpus.skipped_blank > 0) {
        std::cerr << "warning: skipped " << corpus.skipped_blank << " blank line(s) in "
                  << args.corpus_path.string() << "\n";
    }

    const std::string corpus_name = args.corpus_name.empty()
                                        ? args.corpus_path.stem().string()
                                        : args.corpus_name;

    BackendOptions backend_options;
    backend_options.endpoint = args.endpoint;
    backend_options.capture_layer = args.capture_layer;
    BackendHandle backend =
        declare_backend(args.model_id, backend_mode_from_name(args.mode), backend_options);

    ExtractionConfig config;
    config.seeds = args.seeds;
    config.capture_layer = args.capture_layer;
    config.num_refinement_steps_discarded = args.refinement_steps;
    config.validate();

    std::vector<std::string> surnames;
    if (args.gender_variants) {
        const std::filesystem::path surname_path =
            args.surnames_path.empty() ? std::filesystem::path("fixtures/surnames.txt")
                                       : args.surnames_path;
        if (std::filesystem::exists(surname_path)) {
            for (const CorpusLine& line : load_corpus(surname_path).lines) {
                surnames.push_back(line.text);
            }
        }
        if (surnames.empty()) surnames = {"Smith"};
    }

    VectorStore store(args.store_dir);
    const std::size_t before = store.size();

    auto store_prompt = [&](const std::string& text, TagMap tags) {
        for (std::uint64_t seed : args.seeds) {
            PromptSpec prompt;
            prompt.text = text;
            prompt.negative_text = args.negative;
            prompt.guidance_scale = args.guidance;
            prompt.seed = seed;
            VectorRecord record;
            record.hvector = extract_hvector(prompt, config, backend);
            record.tags = tags;
            store.put(record);
        }
    };

    ExtractOutcome outcome;
    outcome.skipped_blank = corpus.skipped_blank;
    for (std::size_t i = 0; i < corpus.lines.size(); ++i) {
        const std::string text = args.prefix + corpus.lines[i].text;
        const std::string scenario = scenario_tag(i);
        TagMap base{{"corpus", corpus_name}, {"scenario", scenario}};

        if (!args.gender_variants) {
            store_prompt(text, base);
            ++outcome.prompts;
            continue;
        }

        const auto profession = detect_profession(text, default_professions());
        if (!profession) {
            std::cerr << "warning: no known profession in corpus line "
                      << corpus.lines[i].line_number << "; skipped\n";
            continue;
        }
        base["profession"] = *profession;

        TagMap neutral = base;
        neutral["gender"] = "neutral";
        store_prompt(text, neutral);
        ++outcome.prompts;

        const std::string& surname = surnames[i % surnames.size()];
        for (const std::string& variant_name : args.variants) {
            const GenderVariant variant = gender_variant_from_name(variant_name);
            const auto pair = gendered_variants(text, *profession, variant, surname);
            if (!pair) continue;
            TagMap female = base;
            female["gender"] = "female";
            female["variant"] = variant_name;
            store_prompt(pair->female, female);
            TagMap male = base;
            male["gender"] = "male";
            male["variant"] = variant_name;
            store_prompt(pair->male, male);
        }
    }
    outcome.stored = store.size() - before;

    RunConfig resolved;
    resolved.set_string("extract", "store", args.store_dir.string());
    resolved.set_string("extract", "model", args.model_id);
    resolved.set_string("extract", "mode", args.mode);
    resolved.set_string("extract", "corpus", args.corpus_path.string());
    resolved.set_string("extract", "corpus_name", corpus_name);
    resolved.set_int_list("extract", "seeds",
                          std::vector<std::int64_t>(args.seeds.begin(), args.seeds.end()));
    resolved.set_bool("extract", "gender_variants", args.gender_variants);
    resolved.set_string_list("extract", "variants", args.variants);
    resolved.set_string("extract", "prefix", args.prefix);
    resolved.set_double("extract", "guidance", args.guidance);
    resolved.set_string("extract", "negative", args.negative);
    resolved.set_int("extract", "refinement_steps", args.refinement_steps);
    write_resolved_config(resolved, args.store_dir);
    return outcome;
}

DefaultsOutcome cmd_defaults(const DefaultsArgs& args) {
    VectorStore store(args.store_dir);

    DefaultsOutcome outcome;
    outcome.table = profession_delta_table(store, args.tagset, args.attr_pair,
                                           args.seeds, args.variant);

    // Correlations against the primary variant, aligned by label.
    if (!args.correlate_variants.empty()) {
        std::map<std::string, double> primary;
        for (const auto& row : outcome.table) primary[row.label] = row.delta;
        for (const std::string& other : args.correlate_variants) {
            if (other == args.variant) continue;
            const auto other_table =
                profession_delta_table(store, args.tagset, args.attr_pair,
                                       args.seeds, other);
            std::vector<double> xs, ys;
            for (const auto& row : other_table) {
                const auto it = primary.find(row.label);
                if (it == primary.end()) continue;
                xs.push_back(it->second);
                ys.push_back(row.delta);
            }
            outcome.correlations[other] = variant_correlation(xs, ys);
        }
    }

    if (!args.out_dir.empty()) {
        std::filesystem::create_directories(args.out_dir);
        util::write_file_atomic(args.out_dir / "deltas.csv",
                                report::deltas_csv(outcome.table));
        util::write_file_atomic(args.out_dir / "deltas.json",
                                report::deltas_json(outcome.table, outcome.correlations));
        RunConfig resolved;
        resolved.set_string("defaults", "store", args.store_dir.string());
        resolved.set_string_list("defaults", "tagset", tagmap_to_list(args.tagset));
        resolved.set_string("defaults", "pair",
                            args.attr_pair.first + "," + args.attr_pair.second);
        resolved.set_int_list("defaults", "seeds",
                              std::vector<std::int64_t>(args.seeds.begin(),
                                                        args.seeds.end()));
        resolved.set_string("defaults", "variant", args.variant);
        resolved.set_string_list("defaults", "correlate_variants",
                                 args.correlate_variants);
        write_resolved_config(resolved, args.out_dir);
    }
    return outcome;
}

namespace {

struct PromptGroup {
    std::string id;  // display id (prompt text)
    std::map<std::uint64_t, HVector> by_seed;
};

std::vector<PromptGroup> group_records(std::vector<VectorRecord> records) {
    std::map<std::string, PromptGroup> groups;  // key: scenario tag or text
    for (VectorRecord& r : records) {
        const auto scenario = r.tags.find("scenario");
        const std::string key =
            scenario != r.tags.end() ? scenario->second : r.hvector.prompt.text;
        PromptGroup& g = groups[key];
        if (g.id.empty()) g.id = r.hvector.prompt.text;
        g.by_seed[r.hvector.prompt.seed] = std::move(r.hvector);
    }
    std::vector<PromptGroup> out;
    out.reserve(groups.size());
    for (auto& [key, g] : groups) out.push_back(std::move(g));
    return out;
}

std::vector<std::uint64_t> common_seeds(const std::vector<PromptGroup>& a,
                                        const std::vector<PromptGroup>& b) {
    std::map<std::uint64_t, std::size_t> counts;
    const std::size_t total = a.size() + b.size();
    for (const auto* side : {&a, &b}) {
        for (const PromptGroup& g : *side) {
            for (const auto& [seed, _] : g.by_seed) counts[seed] += 1;
        }
    }
    std::vector<std::uint64_t> seeds;
    for (const auto& [seed, count] : counts) {
        if (count == total) seeds.push_back(seed);
    }
    if (seeds.empty()) {
        raise(ErrorCode::MissingVariant,
              "descriptors and concepts share no common extraction seed");
    }
    return seeds;
}

}  // namespace

RankOutcome cmd_rank(const RankArgs& args) {
    VectorStore store(args.store_dir);
    std::vector<PromptGroup> descriptors = group_records(store.query(args.descriptor_filter));
    std::vector<PromptGroup> concepts = group_records(store.query(args.concept_filter));
    if (descriptors.empty()) raise(ErrorCode::EmptyInput, "descriptor filter matched nothing");
    if (concepts.size() < 2) {
        raise(ErrorCode::EmptyInput, "concept filter must match at least 2 concepts");
    }
    const std::vector<std::uint64_t> seeds = common_seeds(descriptors, concepts);

    std::vector<std::string> descriptor_ids, concept_ids;
    for (const auto& g : descriptors) descriptor_ids.push_back(g.id);
    for (const auto& g : concepts) concept_ids.push_back(g.id);

    DistanceMatrix averaged;
    if (args.norm == "pca") {
        // Pool per-seed records; the projector centers concepts within each
        // seed group and descriptors with their own seed's center.
        std::vector<HVector> desc_all, conc_all;
        std::vector<std::string> desc_all_ids, conc_all_ids;
        for (const auto& g : descriptors) {
            for (std::uint64_t s : seeds) {
                desc_all.push_back(g.by_seed.at(s));
                desc_all_ids.push_back(g.id);
            }
        }
        for (const auto& g : concepts) {
            for (std::uint64_t s : seeds) {
                conc_all.push_back(g.by_seed.at(s));
                conc_all_ids.push_back(g.id);
            }
        }
        const std::size_t rank = args.pca_rank.value_or(concepts.size() - 1);
        const DistanceMatrix pooled =
            normalize_pca(desc_all, conc_all, rank, args.pca_center_per_seed, {},
                          desc_all_ids, conc_all_ids);

        averaged.rows = descriptors.size();
        averaged.cols = concepts.size();
        averaged.values.assign(averaged.rows * averaged.cols, 0.0);
        const std::size_t n_seeds = seeds.size();
        for (std::size_t i = 0; i < averaged.rows; ++i) {
            for (std::size_t j = 0; j < averaged.cols; ++j) {
                double sum = 0.0;
                for (std::size_t s = 0; s < n_seeds; ++s) {
                    sum += pooled.at(i * n_seeds + s, j * n_seeds + s);
                }
                averaged.at(i, j) = sum / static_cast<double>(n_seeds);
            }
        }
        averaged.descriptor_ids = descriptor_ids;
        averaged.concept_ids = concept_ids;
        averaged.normalization = Normalization::pca_projected;
        averaged.projector = pooled.projector;
        averaged.centered_per_seed = pooled.centered_per_seed;
    } else {
        // Average the raw per-seed distance matrices, then normalize.
        averaged.rows = descriptors.size();
        averaged.cols = concepts.size();
        averaged.values.assign(averaged.rows * averaged.cols, 0.0);
        for (std::uint64_t s : seeds) {
            std::vector<HVector> desc, conc;
            for (const auto& g : descriptors) desc.push_back(g.by_seed.at(s));
            for (const auto& g : concepts) conc.push_back(g.by_seed.at(s));
            const DistanceMatrix per_seed =
                distance_matrix(desc, conc, descriptor_ids, concept_ids);
            for (std::size_t k = 0; k < averaged.values.size(); ++k) {
                averaged.values[k] += per_seed.values[k];
            }
        }
        for (double& v : averaged.values) v /= static_cast<double>(seeds.size());
        averaged.descriptor_ids = descriptor_ids;
        averaged.concept_ids = concept_ids;

        if (args.norm == "mean") {
            averaged = normalize_mean(averaged);
        } else if (args.norm == "std") {
            averaged = normalize_std(averaged, args.std_axis == "per_descriptor"
                                                   ? StdAxis::per_descriptor
                                                   : StdAxis::per_concept);
        } else if (args.norm != "raw") {
            raise(ErrorCode::ConfigError, "unknown normalization: " + args.norm);
        }
    }

    std::size_t target = 0;
    if (!args.target_concept.empty()) {
        const auto it = std::find(averaged.concept_ids.begin(),
                                  averaged.concept_ids.end(), args.target_concept);
        if (it == averaged.concept_ids.end()) {
            raise(ErrorCode::BadIndex, "no concept named " + args.target_concept);
        }
        target = static_cast<std::size_t>(it - averaged.concept_ids.begin());
    }

    RankOutcome outcome;
    outcome.ranking = rank_descriptors(averaged, target);

    if (!args.out_dir.empty()) {
        std::filesystem::create_directories(args.out_dir);
        // Persist the ranking before any summarization attempt.
        util::write_file_atomic(args.out_dir / "rank.csv",
                                report::ranking_csv(outcome.ranking));
    }

    std::vector<LlmExchange> exchanges;
    if (args.summarize) {
        try {
            auto client = make_summarizer(args.summarizer_endpoint);
            const RankingSummary summary =
                llm_summarize_ranking(outcome.ranking, *client);
            outcome.summary_text = summary.response;
            exchanges.push_back({summary.request, summary.response});
        } catch (const Error& e) {
            outcome.summary_error = e.what();
            std::cerr << "warning: summarization failed: " << e.what() << "\n";
        }
    }

    if (!args.out_dir.empty()) {
        util::write_file_atomic(
            args.out_dir / "rank.json",
            report::ranking_json(outcome.ranking, exchanges, outcome.summary_text,
                                 outcome.summary_error));
        RunConfig resolved;
        resolved.set_string("rank", "store", args.store_dir.string());
        resolved.set_string_list("rank", "descriptors", tagmap_to_list(args.descriptor_filter));
        resolved.set_string_list("rank", "concepts", tagmap_to_list(args.concept_filter));
        resolved.set_string("rank", "norm", args.norm);
        resolved.set_string("rank", "std_axis", args.std_axis);
        if (args.pca_rank) {
            resolved.set_int("rank", "pca_rank", static_cast<std::int64_t>(*args.pca_rank));
        }
        resolved.set_bool("rank", "pca_center_per_seed", args.pca_center_per_seed);
        resolved.set_string("rank", "target_concept", averaged.concept_ids[target]);
        resolved.set_bool("rank", "summarize", args.summarize);
        write_resolved_config(resolved, args.out_dir);
    }
    return outcome;
}

ConceptAtlas cmd_atlas(const AtlasArgs& args) {
    VectorStore store(args.store_dir);
    const std::vector<VectorRecord> records = store.query(args.input_filter);
    if (records.size() < 3) {
        raise(ErrorCode::TooFewPoints, "atlas needs at least 3 matching records");
    }

    std::vector<std::vector<double>> vectors;
    std::vector<std::string> record_ids;
    std::map<std::string, std::string> captions;
    std::vector<std::string> categories;
    bool all_categorized = !args.category_tag.empty();
    for (const VectorRecord& r : records) {
        vectors.emplace_back(r.hvector.values.begin(), r.hvector.values.end());
        record_ids.push_back(r.id);
        captions[r.id] = r.hvector.prompt.text;
        if (!args.category_tag.empty()) {
            const auto it = r.tags.find(args.category_tag);
            if (it == r.tags.end()) {
                all_categorized = false;
            } else {
                categories.push_back(it->second);
            }
        }
    }

    AtlasConfig config = args.config;
    config.embed_perplexity = std::min(config.embed_perplexity,
                                       static_cast<double>(vectors.size() - 1));

    ConceptAtlas atlas;
    atlas.config = config;
    atlas.record_ids = record_ids;

    const auto embedder = make_tsne_embedder();
    atlas.points = embed_2d(vectors, config, *embedder);

    const auto clusterer = make_density_clusterer();
    if (args.cluster_on == "embedding") {
        std::vector<std::vector<double>> embedded;
        embedded.reserve(atlas.points.size());
        for (const Point2d& p : atlas.points) embedded.push_back({p.x, p.y});
        atlas.labels = cluster_vectors(embedded, config, *clusterer);
        atlas.clustered_on = "embedding";
    } else {
        atlas.labels = cluster_vectors(vectors, config, *clusterer);
        atlas.clustered_on = "vectors";
    }

    if (all_categorized && !categories.empty()) {
        atlas.overlap = cluster_overlap(atlas.labels, categories, atlas.overlap_categories);
    }

    int max_label = -1;
    for (int l : atlas.labels) max_label = std::max(max_label, l);
    if (max_label >= 1) {
        atlas.inter_cluster = inter_cluster_distance(vectors, atlas.labels);
    }

    if (args.summarize) {
        auto client = make_summarizer(args.summarizer_endpoint);
        const ClusterSummaryOutcome outcome =
            summarize_clusters(atlas.labels, captions, record_ids, *client);
        atlas.summaries = outcome.summaries;
        atlas.summary_errors = outcome.errors;
    }

    if (!args.out_json.empty()) {
        std::filesystem::create_directories(args.out_json.parent_path().empty()
                                                ? "."
                                                : args.out_json.parent_path());
        util::write_file_atomic(args.out_json, report::atlas_json(atlas));
        RunConfig resolved;
        resolved.set_string("atlas", "store", args.store_dir.string());
        resolved.set_string_list("atlas", "input", tagmap_to_list(args.input_filter));
        resolved.set_double("atlas", "perplexity", config.embed_perplexity);
        resolved.set_int("atlas", "embed_seed",
                         static_cast<std::int64_t>(config.embed_seed));
        resolved.set_int("atlas", "min_cluster_size", config.cluster_min_size);
        resolved.set_int("atlas", "min_samples", config.cluster_min_samples);
        resolved.set_string("atlas", "cluster_on", atlas.clustered_on);
        resolved.set_string("atlas", "category_tag", args.category_tag);
        const auto config_dir = args.out_json.parent_path();
        write_resolved_config(resolved, config_dir.empty() ? "." : config_dir);
    }
    if (!args.out_plot.empty()) {
        std::vector<svg::AtlasPoint> plot_points;
        plot_points.reserve(atlas.points.size());
        for (std::size_t i = 0; i < atlas.points.size(); ++i) {
            plot_points.push_back({atlas.points[i].x, atlas.points[i].y, atlas.labels[i]});
        }
        util::write_file_atomic(args.out_plot,
                                svg::atlas_plot(plot_points, "H-space concept atlas"));
    }
    return atlas;
}

namespace {

std::map<int, HVector> cluster_means_from_atlas(const std::filesystem::path& atlas_json,
                                                const VectorStore& store,
                                                const std::set<int>& wanted) {
    if (atlas_json.empty()) {
        raise(ErrorCode::ConfigError,
              "cluster:<n> direction terms need --atlas <atlas.json>");
    }
    json doc = json::parse(util::read_file(atlas_json), nullptr, false);
    if (doc.is_discarded() || !doc.contains("labels") || !doc.contains("record_ids")) {
        raise(ErrorCode::IoError, "not an atlas json: " + atlas_json.string());
    }
    const auto labels = doc["labels"].get<std::vector<int>>();
    const auto ids = doc["record_ids"].get<std::vector<std::string>>();
    if (labels.size() != ids.size()) {
        raise(ErrorCode::LengthMismatch, "atlas labels and record ids differ");
    }
    std::map<int, std::vector<VectorRecord>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || !wanted.count(labels[i])) continue;
        auto record = store.get(ids[i]);
        if (!record) raise(ErrorCode::UnknownId, "atlas record missing from store: " + ids[i]);
        members[labels[i]].push_back(std::move(*record));
    }
    std::map<int, HVector> means;
    for (const int cluster : wanted) {
        const auto it = members.find(cluster);
        if (it == members.end()) {
            raise(ErrorCode::UnknownId,
                  "cluster:" + std::to_string(cluster) + " has no members in the atlas");
        }
        means[cluster] = average_records(it->second);
    }
    return means;
}

}  // namespace

GeneratedImage cmd_condition(const ConditionArgs& args) {
    if (args.prompt.empty()) raise(ErrorCode::ConfigError, "no base prompt given");
    VectorStore store(args.store_dir);

    std::vector<DirectionTerm> terms;
    for (const std::string& ref : args.plus) terms.push_back({ref, +1.0});
    for (const std::string& ref : args.minus) terms.push_back({ref, -1.0});

    std::set<int> wanted_clusters;
    for (const DirectionTerm& t : terms) {
        if (t.ref.rfind("cluster:", 0) == 0) {
            wanted_clusters.insert(std::stoi(t.ref.substr(8)));
        }
    }
    std::map<int, HVector> means;
    if (!wanted_clusters.empty()) {
        means = cluster_means_from_atlas(args.atlas_json, store, wanted_clusters);
    }

    const ConditioningMode mode = (args.mode == "ldm-transfer" || args.mode == "ldm_transfer")
                                      ? ConditioningMode::ldm_transfer
                                      : ConditioningMode::lcm;
    BackendOptions backend_options;
    backend_options.endpoint = args.endpoint;
    BackendHandle backend = declare_backend(
        args.model_id,
        mode == ConditioningMode::ldm_transfer ? BackendMode::ldm : BackendMode::lcm,
        backend_options);

    ConditioningRun run;
    run.base_prompt.text = args.prompt;
    run.base_prompt.guidance_scale = args.guidance;
    run.base_prompt.seed = args.seed;
    if (!terms.empty()) {
        run.direction = compose_direction(terms, store, means);
    }
    run.scale = args.scale;
    run.mode = mode;
    run.num_steps = args.num_steps > 0
                        ? args.num_steps
                        : (mode == ConditioningMode::ldm_transfer ? 20 : 4);
    run.inject_steps = args.inject_steps;
    run.output_image_path = args.out_image.string();

    const GeneratedImage image = conditioned_generate(run, backend);
    if (!args.out_image.empty()) {
        const auto parent = args.out_image.parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        util::write_file_atomic(
            args.out_image,
            std::string_view(reinterpret_cast<const char*>(image.png.data()),
                             image.png.size()));
        RunConfig resolved;
        resolved.set_string("condition", "store", args.store_dir.string());
        resolved.set_string("condition", "model", args.model_id);
        resolved.set_string("condition", "mode", args.mode);
        resolved.set_string("condition", "prompt", args.prompt);
        resolved.set_int("condition", "seed", static_cast<std::int64_t>(args.seed));
        resolved.set_string_list("condition", "plus", args.plus);
        resolved.set_string_list("condition", "minus", args.minus);
        resolved.set_double("condition", "scale", args.scale);
        resolved.set_int("condition", "steps", run.num_steps);
        write_resolved_config(resolved, parent.empty() ? "." : parent);
    }
    return image;
}

ValidationReport cmd_validate(const ValidateArgs& args) {
    ClassificationProtocol protocol;
    if (args.protocol == "gender") {
        // Defaults already hold the gender prompts.
    } else if (args.protocol == "custom") {
        protocol.class_prompts = args.class_prompts;
    } else {
        raise(ErrorCode::ConfigError, "unknown protocol: " + args.protocol);
    }
    protocol.validate();
    if (args.target_class >= protocol.class_prompts.size()) {
        raise(ErrorCode::BadIndex, "target class out of range for protocol");
    }

    // deltas.csv: label,delta[,...] with a header row.
    std::map<std::string, double> deltas_by_label;
    {
        std::istringstream in(util::read_file(args.deltas_csv));
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (header) {
                header = false;
                continue;
            }
            if (line.empty()) continue;
            const std::size_t c1 = line.find(',');
            if (c1 == std::string::npos) continue;
            const std::size_t c2 = line.find(',', c1 + 1);
            const std::string label = line.substr(0, c1);
            const std::string value = c2 == std::string::npos
                                          ? line.substr(c1 + 1)
                                          : line.substr(c1 + 1, c2 - c1 - 1);
            deltas_by_label[label] = std::stod(value);
        }
    }
    if (deltas_by_label.empty()) {
        raise(ErrorCode::MissingAnalysis, "no delta rows in " + args.deltas_csv.string());
    }

    auto classifier = make_classifier(args.classifier_endpoint);

    std::vector<std::string> prompt_ids;
    std::vector<double> deltas, percents;
    int n_images = 0;
    std::vector<std::filesystem::path> label_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(args.images_dir)) {
        if (entry.is_directory()) label_dirs.push_back(entry.path());
    }
    std::sort(label_dirs.begin(), label_dirs.end());
    if (label_dirs.empty()) {
        raise(ErrorCode::EmptyInput, "no per-label image directories in " +
                                         args.images_dir.string());
    }
    for (const auto& dir : label_dirs) {
        const std::string label = dir.filename().string();
        const auto it = deltas_by_label.find(label);
        if (it == deltas_by_label.end()) {
            raise(ErrorCode::LengthMismatch,
                  "image directory '" + label + "' has no delta row");
        }
        std::vector<std::filesystem::path> files;
        for (const auto& f : std::filesystem::directory_iterator(dir)) {
            if (f.path().extension() == ".png") files.push_back(f.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            raise(ErrorCode::EmptyInput, "no PNG images under " + dir.string());
        }
        std::vector<std::vector<std::uint8_t>> images;
        for (const auto& f : files) {
            const std::string bytes = util::read_file(f);
            images.emplace_back(bytes.begin(), bytes.end());
        }
        n_images += static_cast<int>(images.size());
        percents.push_back(
            percent_attribute(images, protocol, *classifier, args.target_class));
        prompt_ids.push_back(label);
        deltas.push_back(it->second);
    }

    ValidationReport report = validate_bias(prompt_ids, deltas, percents, n_images);
    if (!args.out_json.empty()) {
        const auto parent = args.out_json.parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        util::write_file_atomic(args.out_json, report::validation_json(report));
        RunConfig resolved;
        resolved.set_string("validate", "images", args.images_dir.string());
        resolved.set_string("validate", "protocol", args.protocol);
        resolved.set_string_list("validate", "class_prompts", protocol.class_prompts);
        resolved.set_int("validate", "target_class",
                         static_cast<std::int64_t>(args.target_class));
        resolved.set_string("validate", "deltas", args.deltas_csv.string());
        write_resolved_config(resolved, parent.empty() ? "." : parent);
    }
    return report;
}

std::vector<std::filesystem::path> cmd_report(const ReportArgs& args) {
    struct Pending {
        std::filesystem::path path;
        std::string content;
    };
    std::vector<Pending> pending;

    if (!args.deltas_json.empty()) {
        json doc = json::parse(util::read_file(args.deltas_json), nullptr, false);
        if (doc.is_discarded() || !doc.contains("rows")) {
            raise(ErrorCode::MissingAnalysis,
                  "not a deltas analysis: " + args.deltas_json.string());
        }
        std::string csv = "label,delta,n_samples\n";
        std::vector<svg::LabeledValue> bars;
        for (const auto& row : doc["rows"]) {
            const std::string label = row.at("label").get<std::string>();
            const double delta = row.at("delta").get<double>();
            const std::size_t n = row.at("per_seed_deltas").size();
            csv += label + "," + report::fixed4(delta) + "," + std::to_string(n) + "\n";
            bars.push_back({label, delta});
        }
        pending.push_back({args.out_dir / "deltas_table.csv", std::move(csv)});
        pending.push_back({args.out_dir / "deltas_bar.svg",
                           svg::bar_chart(bars, "Default gender delta by profession")});
    }
    if (!args.validation_json.empty()) {
        json doc = json::parse(util::read_file(args.validation_json), nullptr, false);
        if (doc.is_discarded() || !doc.contains("per_prompt")) {
            raise(ErrorCode::MissingAnalysis,
                  "not a validation analysis: " + args.validation_json.string());
        }
        std::vector<svg::ScatterPoint> points;
        for (const auto& row : doc["per_prompt"]) {
            points.push_back({row.at("mean_delta").get<double>(),
                              row.at("percent_class").get<double>(),
                              row.at("prompt_id").get<std::string>()});
        }
        pending.push_back({args.out_dir / "validation_scatter.svg",
                           svg::scatter(points, "Classifier agreement",
                                        "cosine distance delta", "% target class")});
    }
    if (!args.atlas_json.empty()) {
        json doc = json::parse(util::read_file(args.atlas_json), nullptr, false);
        if (doc.is_discarded() || !doc.contains("points")) {
            raise(ErrorCode::MissingAnalysis,
                  "not an atlas analysis: " + args.atlas_json.string());
        }
        std::vector<svg::AtlasPoint> points;
        const auto& labels = doc["labels"];
        std::size_t i = 0;
        for (const auto& p : doc["points"]) {
            points.push_back({p[0].get<double>(), p[1].get<double>(),
                              labels[i].get<int>()});
            ++i;
        }
        pending.push_back({args.out_dir / "atlas.svg",
                           svg::atlas_plot(points, "H-space concept atlas")});
    }

    if (pending.empty()) {
        raise(ErrorCode::MissingAnalysis, "report needs at least one analysis input");
    }

    // Everything rendered; only now touch the filesystem.
    std::filesystem::create_directories(args.out_dir);
    std::vector<std::filesystem::path> written;
    for (const Pending& p : pending) {
        util::write_file_atomic(p.path, p.content);
        written.push_back(p.path);
    }
    RunConfig resolved;
    resolved.set_string("report", "deltas_json", args.deltas_json.string());
    resolved.set_string("report", "validation_json", args.validation_json.string());
    resolved.set_string("report", "atlas_json", args.atlas_json.string());
    write_resolved_config(resolved, args.out_dir);
    return written;
}

}  // namespace scalex
