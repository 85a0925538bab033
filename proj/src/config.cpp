#include "epilog/config.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace epilog {

namespace {

const char* kSections[] = {"run", "weights", "windows", "backend", "env", "memory"};

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return s.substr(begin, end - begin);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
    Config config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') {
            continue;
        }
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section");
            }
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        config.values_[section.empty() ? key : section + "." + key] = value;
    }
    return config;
}

void Config::apply_environment() {
    for (char** env = environ; *env != nullptr; ++env) {
        const std::string entry = *env;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        const std::string name = entry.substr(0, eq);
        const std::string value = entry.substr(eq + 1);
        const std::string prefix = "EPILOG_";
        if (name.rfind(prefix, 0) != 0) {
            continue;
        }
        const std::string rest = lower(name.substr(prefix.size()));
        for (const char* section : kSections) {
            const std::string lead = std::string(section) + "_";
            if (rest.rfind(lead, 0) == 0 && rest.size() > lead.size()) {
                values_[std::string(section) + "." + rest.substr(lead.size())] = value;
                break;
            }
        }
    }
}

void Config::set(const std::string& dotted_key, std::string value) {
    values_[dotted_key] = std::move(value);
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

int Config::get_int(const std::string& key, int fallback) const {
    auto value = get(key);
    if (!value) {
        return fallback;
    }
    try {
        return std::stoi(*value);
    } catch (const std::exception&) {
        throw ConfigError(key + " must be an integer, got '" + *value + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    auto value = get(key);
    if (!value) {
        return fallback;
    }
    try {
        return std::stod(*value);
    } catch (const std::exception&) {
        throw ConfigError(key + " must be a number, got '" + *value + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto value = get(key);
    if (!value) {
        return fallback;
    }
    const std::string v = lower(*value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError(key + " must be a boolean, got '" + *value + "'");
}

nlohmann::json Config::to_json() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : values_) {
        out[key] = value;
    }
    return out;
}

}  // namespace epilog
