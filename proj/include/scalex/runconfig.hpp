#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace scalex {

// Minimal TOML-style run configuration: [sections], key = value, where value
// is a quoted string, integer, float, boolean, or a flat array of those.
// Every command writes its resolved config beside its outputs in the same
// format, deterministically (sections and keys sorted).
class RunConfig {
  public:
    using Scalar = std::variant<std::string, std::int64_t, double, bool>;
    using Value = std::variant<Scalar, std::vector<Scalar>>;

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback = {}) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback = 0) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback = 0.0) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback = false) const;
    std::vector<std::string> get_string_list(const std::string& section,
                                             const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& section,
                                           const std::string& key) const;

    void set(const std::string& section, const std::string& key, Value value);
    void set_string(const std::string& section, const std::string& key,
                    const std::string& value);
    void set_int(const std::string& section, const std::string& key, std::int64_t value);
    void set_double(const std::string& section, const std::string& key, double value);
    void set_bool(const std::string& section, const std::string& key, bool value);
    void set_string_list(const std::string& section, const std::string& key,
                         const std::vector<std::string>& values);
    void set_int_list(const std::string& section, const std::string& key,
                      const std::vector<std::int64_t>& values);

    std::string emit() const;
    void save(const std::filesystem::path& path) const;

  private:
    const Value* find(const std::string& section, const std::string& key) const;

    std::map<std::string, std::map<std::string, Value>> sections_;
};

}  // namespace scalex
