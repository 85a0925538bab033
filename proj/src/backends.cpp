#include "epilog/backends.hpp"

#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

namespace epilog {

using nlohmann::json;

namespace {

bool has_regex_metachar(const std::string& s) {
    return s.find_first_of("\\^$.|?*+()[]{}") != std::string::npos;
}

// Splits "A[\s\S]*B[\s\S]*C" into {A, B, C} when every piece is a plain
// literal; such patterns reduce to an ordered substring scan, which is
// exactly equivalent to regex_search here and far cheaper.
std::optional<std::vector<std::string>> literal_chain(const std::string& pattern) {
    static const std::string kGap = "[\\s\\S]*";
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t gap = pattern.find(kGap, pos);
        if (gap == std::string::npos) {
            parts.push_back(pattern.substr(pos));
            break;
        }
        parts.push_back(pattern.substr(pos, gap - pos));
        pos = gap + kGap.size();
    }
    for (const std::string& part : parts) {
        if (has_regex_metachar(part)) {
            return std::nullopt;
        }
    }
    return parts;
}

bool chain_matches(const std::vector<std::string>& parts, const std::string& text) {
    std::size_t pos = 0;
    for (const std::string& part : parts) {
        const std::size_t found = text.find(part, pos);
        if (found == std::string::npos) {
            return false;
        }
        pos = found + part.size();
    }
    return true;
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::string id, std::vector<ScriptedRule> rules,
                                 std::string default_response, bool strict)
    : id_(std::move(id)),
      rules_(std::move(rules)),
      default_response_(std::move(default_response)),
      strict_(strict) {
    matchers_.reserve(rules_.size());
    for (const ScriptedRule& rule : rules_) {
        Matcher m;
        if (rule.match == MatchKind::pattern) {
            if (auto parts = literal_chain(rule.pattern)) {
                m.literal_chain = true;
                m.parts = std::move(*parts);
            } else {
                m.regex = std::regex(rule.pattern, std::regex::ECMAScript);
            }
        }
        matchers_.push_back(std::move(m));
    }
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
    int best_priority = 0;
    std::size_t best_index = rules_.size();  // = no match
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const ScriptedRule& rule = rules_[i];
        bool hit = false;
        if (rule.match == MatchKind::substring) {
            hit = request.prompt.find(rule.pattern) != std::string::npos;
        } else if (matchers_[i].literal_chain) {
            hit = chain_matches(matchers_[i].parts, request.prompt);
        } else {
            hit = std::regex_search(request.prompt, matchers_[i].regex);
        }
        if (hit && (best_index == rules_.size() || rule.priority > best_priority)) {
            best_priority = rule.priority;
            best_index = i;
        }
    }
    if (best_index == rules_.size()) {
        if (strict_) {
            throw NoRouteMatched("no scripted rule matched the prompt");
        }
        return default_response_;
    }
    return rules_[best_index].response;
}

std::vector<ScriptedRule> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open script: " + path);
    }
    std::vector<ScriptedRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        ScriptedRule rule;
        const std::string kind = j.value("match", std::string("substring"));
        if (kind == "substring") {
            rule.match = MatchKind::substring;
        } else if (kind == "pattern") {
            rule.match = MatchKind::pattern;
        } else {
            throw ParseError(line_no, "unknown match kind: " + kind);
        }
        if (!j.contains("pattern") || !j.contains("response")) {
            throw ParseError(line_no, "rule needs pattern and response");
        }
        rule.pattern = j.at("pattern").get<std::string>();
        rule.response = j.at("response").get<std::string>();
        rule.priority = j.value("priority", 0);
        if (rule.match == MatchKind::pattern) {
            try {
                std::regex probe(rule.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw ParseError(line_no, std::string("bad pattern: ") + e.what());
            }
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

}  // namespace epilog
