#include "scalex/runconfig.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "scalex/errors.hpp"
#include "scalex/util.hpp"

namespace scalex {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

RunConfig::Scalar parse_scalar(const std::string& token, std::size_t line_no) {
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < token.size(); ++i) {
            if (token[i] == '\\' && i + 2 < token.size()) {
                ++i;
                switch (token[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: out += token[i];
                }
            } else {
                out += token[i];
            }
        }
        return out;
    }
    if (token == "true") return true;
    if (token == "false") return false;
    if (token.find_first_of(".eE") != std::string::npos &&
        token.find_first_not_of("+-0123456789.eE") == std::string::npos) {
        try {
            return std::stod(token);
        } catch (const std::exception&) {
        }
    }
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(token, &used);
        if (used == token.size()) return v;
    } catch (const std::exception&) {
    }
    raise(ErrorCode::ConfigError,
          "cannot parse value '" + token + "' on line " + std::to_string(line_no));
}

// Splits an array body on commas that sit outside quotes.
std::vector<std::string> split_array(const std::string& body) {
    std::vector<std::string> parts;
    std::string current;
    bool in_string = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
        if (c == ',' && !in_string) {
            parts.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!trim(current).empty()) parts.push_back(trim(current));
    return parts;
}

std::string emit_scalar(const RunConfig::Scalar& s) {
    if (std::holds_alternative<std::string>(s)) {
        std::string out = "\"";
        for (char c : std::get<std::string>(s)) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out += c;
            }
        }
        return out + "\"";
    }
    if (std::holds_alternative<std::int64_t>(s)) {
        return std::to_string(std::get<std::int64_t>(s));
    }
    if (std::holds_alternative<double>(s)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(s));
        std::string out = buf;
        // Keep floats recognizable as floats on re-parse.
        if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
        return out;
    }
    return std::get<bool>(s) ? "true" : "false";
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments outside strings.
        bool in_string = false;
        std::string stripped;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (c == '#' && !in_string) break;
            stripped += c;
        }
        stripped = trim(stripped);
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                raise(ErrorCode::ConfigError,
                      "unterminated section header on line " + std::to_string(line_no));
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            raise(ErrorCode::ConfigError,
                  "expected key = value on line " + std::to_string(line_no));
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            raise(ErrorCode::ConfigError,
                  "empty key or value on line " + std::to_string(line_no));
        }
        if (value.front() == '[') {
            if (value.back() != ']') {
                raise(ErrorCode::ConfigError,
                      "unterminated array on line " + std::to_string(line_no));
            }
            std::vector<Scalar> items;
            for (const std::string& part :
                 split_array(value.substr(1, value.size() - 2))) {
                items.push_back(parse_scalar(part, line_no));
            }
            config.sections_[section][key] = std::move(items);
        } else {
            config.sections_[section][key] = parse_scalar(value, line_no);
        }
    }
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    return parse(util::read_file(path));
}

const RunConfig::Value* RunConfig::find(const std::string& section,
                                        const std::string& key) const {
    const auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    return &kit->second;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    const Value* v = find(section, key);
    if (!v || !std::holds_alternative<Scalar>(*v)) return fallback;
    const Scalar& s = std::get<Scalar>(*v);
    if (std::holds_alternative<std::string>(s)) return std::get<std::string>(s);
    return fallback;
}

std::int64_t RunConfig::get_int(const std::string& section, const std::string& key,
                                std::int64_t fallback) const {
    const Value* v = find(section, key);
    if (!v || !std::holds_alternative<Scalar>(*v)) return fallback;
    const Scalar& s = std::get<Scalar>(*v);
    if (std::holds_alternative<std::int64_t>(s)) return std::get<std::int64_t>(s);
    if (std::holds_alternative<double>(s)) {
        return static_cast<std::int64_t>(std::llround(std::get<double>(s)));
    }
    return fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    const Value* v = find(section, key);
    if (!v || !std::holds_alternative<Scalar>(*v)) return fallback;
    const Scalar& s = std::get<Scalar>(*v);
    if (std::holds_alternative<double>(s)) return std::get<double>(s);
    if (std::holds_alternative<std::int64_t>(s)) {
        return static_cast<double>(std::get<std::int64_t>(s));
    }
    return fallback;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
    const Value* v = find(section, key);
    if (!v || !std::holds_alternative<Scalar>(*v)) return fallback;
    const Scalar& s = std::get<Scalar>(*v);
    if (std::holds_alternative<bool>(s)) return std::get<bool>(s);
    return fallback;
}

std::vector<std::string> RunConfig::get_string_list(const std::string& section,
                                                    const std::string& key) const {
    const Value* v = find(section, key);
    std::vector<std::string> out;
    if (!v || !std::holds_alternative<std::vector<Scalar>>(*v)) return out;
    for (const Scalar& s : std::get<std::vector<Scalar>>(*v)) {
        if (std::holds_alternative<std::string>(s)) out.push_back(std::get<std::string>(s));
    }
    return out;
}

std::vector<std::int64_t> RunConfig::get_int_list(const std::string& section,
                                                  const std::string& key) const {
    const Value* v = find(section, key);
    std::vector<std::int64_t> out;
    if (!v || !std::holds_alternative<std::vector<Scalar>>(*v)) return out;
    for (const Scalar& s : std::get<std::vector<Scalar>>(*v)) {
        if (std::holds_alternative<std::int64_t>(s)) out.push_back(std::get<std::int64_t>(s));
    }
    return out;
}

void RunConfig::set(const std::string& section, const std::string& key, Value value) {
    sections_[section][key] = std::move(value);
}
void RunConfig::set_string(const std::string& section, const std::string& key,
                           const std::string& value) {
    set(section, key, Scalar(value));
}
void RunConfig::set_int(const std::string& section, const std::string& key,
                        std::int64_t value) {
    set(section, key, Scalar(value));
}
void RunConfig::set_double(const std::string& section, const std::string& key,
                           double value) {
    set(section, key, Scalar(value));
}
void RunConfig::set_bool(const std::string& section, const std::string& key, bool value) {
    set(section, key, Scalar(value));
}
void RunConfig::set_string_list(const std::string& section, const std::string& key,
                                const std::vector<std::string>& values) {
    std::vector<Scalar> items(values.begin(), values.end());
    set(section, key, std::move(items));
}
void RunConfig::set_int_list(const std::string& section, const std::string& key,
                             const std::vector<std::int64_t>& values) {
    std::vector<Scalar> items(values.begin(), values.end());
    set(section, key, std::move(items));
}

std::string RunConfig::emit() const {
    std::string out;
    for (const auto& [section, keys] : sections_) {
        if (!section.empty()) {
            if (!out.empty()) out += "\n";
            out += "[" + section + "]\n";
        }
        for (const auto& [key, value] : keys) {
            out += key + " = ";
            if (std::holds_alternative<Scalar>(value)) {
                out += emit_scalar(std::get<Scalar>(value));
            } else {
                out += "[";
                const auto& items = std::get<std::vector<Scalar>>(value);
                for (std::size_t i = 0; i < items.size(); ++i) {
                    if (i) out += ", ";
                    out += emit_scalar(items[i]);
                }
                out += "]";
            }
            out += "\n";
        }
    }
    return out;
}

void RunConfig::save(const std::filesystem::path& path) const {
    util::write_file_atomic(path, emit());
}

}  // namespace scalex
