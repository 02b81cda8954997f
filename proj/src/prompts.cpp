#include "scalex/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "scalex/errors.hpp"
#include "scalex/util.hpp"

namespace scalex {

CorpusLoadResult load_corpus(const std::filesystem::path& path) {
    CorpusLoadResult result;
    std::istringstream in(util::read_file(path));
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const bool blank = std::all_of(line.begin(), line.end(), [](unsigned char c) {
            return std::isspace(c) != 0;
        });
        if (blank) {
            ++result.skipped_blank;
            continue;
        }
        result.lines.push_back({line, number});
    }
    return result;
}

const char* gender_variant_name(GenderVariant v) {
    switch (v) {
        case GenderVariant::female_male: return "female_male";
        case GenderVariant::woman_man: return "woman_man";
        case GenderVariant::relative_clause: return "relative_clause";
        case GenderVariant::pronoun: return "pronoun";
        case GenderVariant::first_name: return "first_name";
        case GenderVariant::honorific: return "honorific";
    }
    return "unknown";
}

GenderVariant gender_variant_from_name(const std::string& name) {
    for (GenderVariant v : all_gender_variants()) {
        if (name == gender_variant_name(v)) return v;
    }
    raise(ErrorCode::ConfigError, "unknown gender variant: " + name);
}

std::vector<GenderVariant> all_gender_variants() {
    return {GenderVariant::female_male,     GenderVariant::woman_man,
            GenderVariant::relative_clause, GenderVariant::pronoun,
            GenderVariant::first_name,      GenderVariant::honorific};
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool word_boundary(const std::string& s, std::size_t pos, std::size_t len) {
    const bool left_ok =
        pos == 0 || !std::isalnum(static_cast<unsigned char>(s[pos - 1]));
    const std::size_t end = pos + len;
    const bool right_ok =
        end >= s.size() || !std::isalnum(static_cast<unsigned char>(s[end]));
    return left_ok && right_ok;
}

// Case-insensitive whole-word search.
std::size_t find_word(const std::string& haystack, const std::string& needle) {
    const std::string h = lower(haystack);
    const std::string n = lower(needle);
    std::size_t pos = h.find(n);
    while (pos != std::string::npos) {
        if (word_boundary(h, pos, n.size())) return pos;
        pos = h.find(n, pos + 1);
    }
    return std::string::npos;
}

std::string decapitalize(std::string s) {
    if (s.size() >= 2 && std::isupper(static_cast<unsigned char>(s[0])) &&
        std::islower(static_cast<unsigned char>(s[1]))) {
        s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    } else if (s.size() == 1) {
        s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    }
    return s;
}

// Inserts a marker word between the article and the profession:
// "An engineer ..." -> "A female engineer ...". The marker words all start
// with consonants, so the corrected article is "a"/"A".
std::string insert_marker(const std::string& prompt, std::size_t prof_pos,
                          const std::string& marker) {
    std::size_t article_start = std::string::npos;
    bool article_capitalized = false;
    if (prof_pos >= 2) {
        // Look back over one space for "a"/"an".
        std::size_t back = prof_pos;
        while (back > 0 && prompt[back - 1] == ' ') --back;
        std::size_t word_end = back;
        std::size_t word_start = word_end;
        while (word_start > 0 &&
               std::isalpha(static_cast<unsigned char>(prompt[word_start - 1]))) {
            --word_start;
        }
        const std::string word = lower(prompt.substr(word_start, word_end - word_start));
        if (word == "a" || word == "an") {
            article_start = word_start;
            article_capitalized =
                std::isupper(static_cast<unsigned char>(prompt[word_start])) != 0;
        }
    }
    if (article_start == std::string::npos) {
        return prompt.substr(0, prof_pos) + marker + " " + prompt.substr(prof_pos);
    }
    const std::string article = article_capitalized ? "A" : "a";
    return prompt.substr(0, article_start) + article + " " + marker + " " +
           prompt.substr(prof_pos);
}

std::string insert_after_profession(const std::string& prompt, std::size_t prof_end,
                                    const std::string& clause) {
    return prompt.substr(0, prof_end) + " " + clause + prompt.substr(prof_end);
}

}  // namespace

std::optional<GenderedPrompts> gendered_variants(const std::string& neutral_prompt,
                                                 const std::string& profession,
                                                 GenderVariant variant,
                                                 const std::string& surname) {
    const std::size_t pos = find_word(neutral_prompt, profession);
    if (pos == std::string::npos) return std::nullopt;
    const std::size_t end = pos + profession.size();

    GenderedPrompts out;
    switch (variant) {
        case GenderVariant::female_male:
            out.female = insert_marker(neutral_prompt, pos, "female");
            out.male = insert_marker(neutral_prompt, pos, "male");
            break;
        case GenderVariant::woman_man:
            out.female = insert_marker(neutral_prompt, pos, "woman");
            out.male = insert_marker(neutral_prompt, pos, "man");
            break;
        case GenderVariant::relative_clause:
            out.female = insert_after_profession(neutral_prompt, end, "who is a woman");
            out.male = insert_after_profession(neutral_prompt, end, "who is a man");
            break;
        case GenderVariant::pronoun:
            out.female = "She is " + decapitalize(neutral_prompt);
            out.male = "He is " + decapitalize(neutral_prompt);
            break;
        case GenderVariant::first_name:
            out.female = "Sarah, " + decapitalize(neutral_prompt);
            out.male = "John, " + decapitalize(neutral_prompt);
            break;
        case GenderVariant::honorific:
            out.female = "Ms. " + surname + ", " + decapitalize(neutral_prompt);
            out.male = "Mr. " + surname + ", " + decapitalize(neutral_prompt);
            break;
    }
    return out;
}

std::optional<std::string> detect_profession(
    const std::string& prompt, const std::vector<std::string>& professions) {
    std::optional<std::string> best;
    for (const std::string& p : professions) {
        if (find_word(prompt, p) == std::string::npos) continue;
        if (!best || p.size() > best->size()) best = p;
    }
    return best;
}

const std::vector<std::string>& default_professions() {
    static const std::vector<std::string> list = {
        "doctor",   "engineer",       "teacher",             "lawyer", "chef",
        "scientist", "police officer", "construction worker", "pilot",  "farmer",
    };
    return list;
}

}  // namespace scalex
