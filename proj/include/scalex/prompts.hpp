#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scalex {

struct CorpusLine {
    std::string text;
    std::size_t line_number = 0;  // 1-based, in the source file
};

struct CorpusLoadResult {
    std::vector<CorpusLine> lines;
    std::size_t skipped_blank = 0;
};

// One prompt per line; blank lines are skipped and counted.
CorpusLoadResult load_corpus(const std::filesystem::path& path);

// The six gendered phrasings applied to a neutral profession prompt.
enum class GenderVariant {
    female_male,      // "a female doctor" / "a male doctor"
    woman_man,        // "a woman doctor" / "a man doctor"
    relative_clause,  // "a doctor who is a woman/man ..."
    pronoun,          // "She/He is a doctor ..."
    first_name,       // "Sarah/John, a doctor ..."
    honorific,        // "Ms./Mr. <surname>, a doctor ..."
};

const char* gender_variant_name(GenderVariant v);
GenderVariant gender_variant_from_name(const std::string& name);
std::vector<GenderVariant> all_gender_variants();

struct GenderedPrompts {
    std::string female;
    std::string male;
};

// Rewrites a neutral prompt that mentions `profession` (case-insensitive
// match, article-aware) into its female/male variant pair. The surname feeds
// the honorific template only. Returns nullopt when the profession phrase is
// not present in the prompt.
std::optional<GenderedPrompts> gendered_variants(const std::string& neutral_prompt,
                                                 const std::string& profession,
                                                 GenderVariant variant,
                                                 const std::string& surname = "Smith");

// Longest profession (from the list) that occurs in the prompt.
std::optional<std::string> detect_profession(
    const std::string& prompt, const std::vector<std::string>& professions);

// The ten professions the default-bias workflow ships fixtures for.
const std::vector<std::string>& default_professions();

}  // namespace scalex
