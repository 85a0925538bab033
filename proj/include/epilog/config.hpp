#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "epilog/errors.hpp"

namespace epilog {

// Flat "section.key" -> value configuration. Sources layer as
// file < environment < explicit sets (CLI flags), later wins.
class Config {
public:
    Config() = default;

    // INI-style text: [section] headers, key = value pairs, '#'/';'
    // comments. Throws ConfigError with the offending line.
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text, const std::string& origin = "<string>");

    // EPILOG_<SECTION>_<KEY>=value overrides, e.g. EPILOG_RUN_MAX_STEPS=60
    // becomes run.max_steps. Only the known section names are scanned.
    void apply_environment();

    void set(const std::string& dotted_key, std::string value);

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    // Full resolved view, for the report's config echo.
    nlohmann::json to_json() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace epilog
