#pragma once

#include <memory>
#include <regex>
#include <string>
#include <vector>

#include "epilog/errors.hpp"

namespace epilog {

struct CompletionRequest {
    std::string prompt;
    double temperature = 0.0;  // deterministic by default
    int max_tokens = 256;
    std::vector<std::string> stop;
};

// LLM completion backend. Implementations must be safe for concurrent
// complete() calls.
class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;

    // Identifier recorded in log provenance (e.g. "scripted-demo").
    virtual std::string backend_id() const = 0;

    virtual std::string complete(const CompletionRequest& request) = 0;
};

enum class MatchKind { substring, pattern };

// One prompt-matching rule. `pattern` is a literal substring or an
// ECMAScript regex searched anywhere in the rendered prompt. Among matching
// rules the highest priority wins, then the first declared.
struct ScriptedRule {
    MatchKind match = MatchKind::substring;
    std::string pattern;
    std::string response;
    int priority = 0;
};

// Deterministic rule-based completions: a pure function of (rules, prompt).
// Matching happens on the rendered prompt, never on hidden state, which
// forces prompts to carry all decision-relevant context.
class ScriptedBackend final : public CompletionBackend {
public:
    ScriptedBackend(std::string id, std::vector<ScriptedRule> rules,
                    std::string default_response = "", bool strict = false);

    std::string backend_id() const override { return id_; }

    // Winning rule's response, else the default. Throws NoRouteMatched in
    // strict mode when nothing matches.
    std::string complete(const CompletionRequest& request) override;

    std::size_t rule_count() const { return rules_.size(); }

private:
    // Patterns shaped "lit[\s\S]*lit..." (ordered literals, the common case
    // in rule files) match via plain substring scans; anything else falls
    // back to std::regex.
    struct Matcher {
        bool literal_chain = false;
        std::vector<std::string> parts;
        std::regex regex;
    };

    std::string id_;
    std::vector<ScriptedRule> rules_;
    std::vector<Matcher> matchers_;
    std::string default_response_;
    bool strict_;
};

// Rule files are line-delimited JSON objects
//   {"match": "substring"|"pattern", "pattern": "...", "response": "...", "priority": 0}
// with blank lines and '#' comments skipped. Declaration order is
// preserved. Throws ParseError with the offending line number.
std::vector<ScriptedRule> load_script(const std::string& path);

}  // namespace epilog
