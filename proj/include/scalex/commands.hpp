#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scalex/atlas.hpp"
#include "scalex/backend.hpp"
#include "scalex/compare.hpp"
#include "scalex/conditioning.hpp"
#include "scalex/runconfig.hpp"
#include "scalex/store.hpp"
#include "scalex/validation.hpp"

// Command layer shared by the CLI and the integration tests: each cmd_* is a
// full subcommand (config resolution, module calls, file emission). Every
// command writes its resolved run config beside its outputs.

namespace scalex {

struct ExtractArgs {
    std::filesystem::path store_dir;
    std::string model_id = "mock";
    std::string mode = "lcm";
    std::filesystem::path corpus_path;
    std::string corpus_name;  // tag value; default: corpus file stem
    std::vector<std::uint64_t> seeds{0, 1, 2};
    // Gender-bias workflow: also store female/male rewrites of each prompt.
    bool gender_variants = false;
    std::vector<std::string> variants{"female_male"};
    std::filesystem::path surnames_path;
    std::string prefix;  // prepended to every corpus line
    double guidance = 7.5;
    std::string negative;
    std::string capture_layer;
    std::string endpoint;
    int refinement_steps = 3;
};

struct ExtractOutcome {
    std::size_t prompts = 0;
    std::size_t stored = 0;
    std::size_t skipped_blank = 0;
};

ExtractOutcome cmd_extract(const ExtractArgs& args);

struct DefaultsArgs {
    std::filesystem::path store_dir;
    TagMap tagset;  // e.g. {corpus: professions}
    std::pair<std::string, std::string> attr_pair{"female", "male"};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    std::string variant = "female_male";
    // Additional variants to re-run and correlate against the primary one.
    std::vector<std::string> correlate_variants;
    std::filesystem::path out_dir;
};

struct DefaultsOutcome {
    std::vector<DefaultDeltaResult> table;
    std::map<std::string, Correlation> correlations;
};

DefaultsOutcome cmd_defaults(const DefaultsArgs& args);

struct RankArgs {
    std::filesystem::path store_dir;
    TagMap descriptor_filter;
    TagMap concept_filter;
    std::string norm = "mean";  // mean|std|pca|raw
    std::string std_axis = "per_concept";
    std::optional<std::size_t> pca_rank;  // default n-1
    bool pca_center_per_seed = true;
    std::string target_concept;  // concept id (prompt text); default: first
    bool summarize = false;
    std::string summarizer_endpoint;  // echo: | replay:<dir> | http url
    std::filesystem::path out_dir;
};

struct RankOutcome {
    RankingResult ranking;
    std::string summary_text;
    std::string summary_error;
};

RankOutcome cmd_rank(const RankArgs& args);

struct AtlasArgs {
    std::filesystem::path store_dir;
    TagMap input_filter;
    AtlasConfig config;
    std::string cluster_on = "vectors";  // vectors|embedding
    std::string category_tag;            // overlap column source; optional
    bool summarize = false;
    std::string summarizer_endpoint;
    std::filesystem::path out_json;
    std::filesystem::path out_plot;  // optional svg
};

ConceptAtlas cmd_atlas(const AtlasArgs& args);

struct ConditionArgs {
    std::filesystem::path store_dir;
    std::string model_id = "mock";
    std::string mode = "lcm";  // lcm|ldm-transfer
    std::string prompt;
    std::uint64_t seed = 0;
    double guidance = 7.5;
    std::vector<std::string> plus;   // record ids or cluster:<n>
    std::vector<std::string> minus;
    double scale = 1.0;
    int num_steps = 0;  // 0 = mode default (lcm 4, ldm 20)
    std::vector<int> inject_steps;
    std::filesystem::path atlas_json;  // needed for cluster:<n> refs
    std::string endpoint;
    std::filesystem::path out_image;
};

GeneratedImage cmd_condition(const ConditionArgs& args);

struct ValidateArgs {
    std::filesystem::path images_dir;  // <prompt label>/<image>.png
    std::string protocol = "gender";   // gender | custom (prompts in class_prompts)
    std::vector<std::string> class_prompts;
    std::size_t target_class = 1;  // "a photo of a woman" under the gender protocol
    std::filesystem::path deltas_csv;  // label,delta rows to pair against
    std::string classifier_endpoint;
    std::filesystem::path out_json;
};

ValidationReport cmd_validate(const ValidateArgs& args);

struct ReportArgs {
    std::filesystem::path deltas_json;      // any subset may be set,
    std::filesystem::path validation_json;  // but not none
    std::filesystem::path atlas_json;
    std::filesystem::path out_dir;
};

std::vector<std::filesystem::path> cmd_report(const ReportArgs& args);

// Shared helper: resolved-config emission.
void write_resolved_config(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace scalex
