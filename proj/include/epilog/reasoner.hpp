#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "epilog/backends.hpp"
#include "epilog/memory.hpp"
#include "epilog/retrieval.hpp"

namespace epilog {

// Prompt body with {slot} placeholders. Rendering fails if a referenced
// slot has no value; unused values are fine.
struct PromptTemplate {
    std::string name;
    std::string body;

    std::string render(const std::map<std::string, std::string>& slots) const;

    static PromptTemplate load(const std::string& path, std::string name);
};

// Parses one key line: "search: X" selects observation matching, "action:
// Y" selects action matching. Tolerant to a leading ">" and whitespace;
// prefixes are case-insensitive; the payload is lower-cased and trimmed.
// Throws UnparseableKey when neither prefix is found or the payload is
// empty.
RetrievalKey parse_key_line(const std::string& line);

// Inverse of parse_key_line for the text key kinds.
std::string format_key(const RetrievalKey& key);

// Shipped prompt bodies (plan generation and key generation).
PromptTemplate default_plan_template();
PromptTemplate default_key_template();

// Generates overall plans and retrieval keys from the current situation.
// Stateless apart from the backend handle; never touches memory. The
// backend must outlive the reasoner.
class Reasoner {
public:
    explicit Reasoner(CompletionBackend& backend);
    Reasoner(CompletionBackend& backend, PromptTemplate plan_template,
             PromptTemplate key_template);

    // One-paragraph plan for the task, with "> think:"-style markers
    // stripped. Throws EmptyCompletion when the backend returns nothing
    // usable.
    std::string generate_overall_plan(const TaskSpec& task,
                                      const std::vector<std::string>& exemplars) const;

    // Key parsed from the last non-empty completion line. Earlier lines may
    // hold chain-of-thought. Throws UnparseableKey; callers fall back to
    // keyless retrieval.
    RetrievalKey generate_retrieval_key(const std::string& action_plan) const;

private:
    CompletionBackend* backend_;
    PromptTemplate plan_template_;
    PromptTemplate key_template_;
};

}  // namespace epilog
