#include "epilog/reasoner.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace epilog {

namespace {

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

// Strips any leading ">" markers and surrounding whitespace.
std::string strip_markers(std::string s) {
    s = trim(s);
    while (!s.empty() && s.front() == '>') {
        s.erase(s.begin());
        s = trim(s);
    }
    return s;
}

bool strip_prefix_ci(std::string& s, const std::string& prefix) {
    if (s.size() < prefix.size()) {
        return false;
    }
    if (lower(s.substr(0, prefix.size())) != prefix) {
        return false;
    }
    s.erase(0, prefix.size());
    s = trim(s);
    return true;
}

std::string first_line(const std::string& s) {
    const std::size_t pos = s.find('\n');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

std::string last_nonempty_line(const std::string& s) {
    std::istringstream in(s);
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            last = line;
        }
    }
    return last;
}

}  // namespace

std::string PromptTemplate::render(const std::map<std::string, std::string>& slots) const {
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        const char c = body[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        const std::size_t close = body.find('}', i + 1);
        if (close == std::string::npos) {
            throw ConfigError("template " + name + ": unterminated slot");
        }
        const std::string slot = body.substr(i + 1, close - i - 1);
        auto it = slots.find(slot);
        if (it == slots.end()) {
            throw ConfigError("template " + name + ": no value for slot {" + slot + "}");
        }
        out += it->second;
        i = close + 1;
    }
    return out;
}

PromptTemplate PromptTemplate::load(const std::string& path, std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open template: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return PromptTemplate{std::move(name), buf.str()};
}

RetrievalKey parse_key_line(const std::string& line) {
    std::string s = strip_markers(line);
    const std::size_t colon = s.find(':');
    if (colon == std::string::npos) {
        throw UnparseableKey("no key prefix in: " + line);
    }
    const std::string prefix = lower(trim(s.substr(0, colon)));
    const std::string payload = lower(trim(s.substr(colon + 1)));
    if (payload.empty()) {
        throw UnparseableKey("empty key payload in: " + line);
    }
    if (prefix == "search") {
        return RetrievalKey::search(payload);
    }
    if (prefix == "action") {
        return RetrievalKey::action(payload);
    }
    throw UnparseableKey("unknown key prefix '" + prefix + "' in: " + line);
}

std::string format_key(const RetrievalKey& key) {
    switch (key.kind) {
        case KeyKind::observation_search:
            return "search: " + key.text;
        case KeyKind::action_match:
            return "action: " + key.text;
        case KeyKind::visual:
            break;
    }
    throw Error("visual keys have no text form");
}

PromptTemplate default_plan_template() {
    return PromptTemplate{
        "plan",
        "{examples}"
        "Here is the task. Please make a plan from the examples.\n"
        "\n"
        "Your task is to: {task}\n"
        "\n"
        "> think: To solve the task,"};
}

PromptTemplate default_key_template() {
    return PromptTemplate{
        "key",
        "Here are examples.\n"
        "\n"
        "think: First I need to find a spraybottle. I can check the likely "
        "receptacles one by one.\n"
        "> search: spraybottle\n"
        "\n"
        "think: Now I put the first creditcard in dresser. Next, I need to find the "
        "second creditcard.\n"
        "> search: creditcard\n"
        "\n"
        "think: Now I take a pen (2). Next, I need to find a desklamp.\n"
        "> search: desklamp\n"
        "\n"
        "think: Now I find a lettuce (1). Next, I need to take it.\n"
        "> action: take\n"
        "\n"
        "think: Now I heat an egg (2). Next, I need to put it in/on diningtable 1.\n"
        "> action: put\n"
        "\n"
        "think: Now I take an apple (1). Next, I need to go to a microwave (1) and "
        "heat it.\n"
        "> action: heat\n"
        "\n"
        "think: Now I take a mug (3). Next, I need to go to a fridge (1) and cool "
        "it.\n"
        "> action: cool\n"
        "\n"
        "think: Now I find a desklamp (1). Next, I need to use it.\n"
        "> action: use\n"
        "\n"
        "Here is the task. Please make a plan from the examples.\n"
        "\n"
        "think: {plan}\n"
        "\n"
        "> "};
}

Reasoner::Reasoner(CompletionBackend& backend)
    : Reasoner(backend, default_plan_template(), default_key_template()) {}

Reasoner::Reasoner(CompletionBackend& backend, PromptTemplate plan_template,
                   PromptTemplate key_template)
    : backend_(&backend),
      plan_template_(std::move(plan_template)),
      key_template_(std::move(key_template)) {}

std::string Reasoner::generate_overall_plan(const TaskSpec& task,
                                            const std::vector<std::string>& exemplars) const {
    std::string examples;
    if (!exemplars.empty()) {
        examples = "Here are examples.\n\n";
        for (const std::string& exemplar : exemplars) {
            examples += exemplar;
            examples += "\n\n";
        }
    }
    const std::string prompt =
        plan_template_.render({{"examples", examples}, {"task", task.description}});

    CompletionRequest request;
    request.prompt = prompt;
    std::string completion = backend_->complete(request);

    std::string plan = strip_markers(completion);
    strip_prefix_ci(plan, "think:");
    plan = trim(first_line(plan));
    if (plan.empty()) {
        throw EmptyCompletion("backend produced no plan");
    }
    return plan;
}

RetrievalKey Reasoner::generate_retrieval_key(const std::string& action_plan) const {
    if (action_plan.empty()) {
        throw UnparseableKey("empty action plan");
    }
    const std::string prompt = key_template_.render({{"plan", action_plan}});

    CompletionRequest request;
    request.prompt = prompt;
    const std::string completion = backend_->complete(request);

    // The key sits on the last non-empty line; earlier lines may be
    // chain-of-thought.
    const std::string line = last_nonempty_line(completion);
    if (line.empty()) {
        throw UnparseableKey("empty completion");
    }
    return parse_key_line(line);
}

}  // namespace epilog
