#include "epilog/executor.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace epilog {

namespace {

constexpr const char* kInfoHeader = "Here is the task information.";
constexpr const char* kExamplesHeader = "Here are examples.";
constexpr const char* kTaskHeader = "Here is the task. Please make an action from the examples.";
constexpr const char* kCue = "> ";

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

std::string render_step(const Step& step) {
    return "> " + step.action + "\n" + render_observation(step.observation) + "\n";
}

std::string render_block(const RetrievedExperience& exp, bool intra_task) {
    std::string block;
    if (intra_task) {
        // "A is to B as C is to D": show whose task these actions solved.
        block += "Task: " + exp.source_task_text + "\n";
    }
    block += "Plan: " + exp.overall_plan + "\n";
    for (const Step& step : exp.window) {
        block += render_step(step);
    }
    block += "\n";
    return block;
}

}  // namespace

std::string render_observation(const Observation& obs) {
    if (obs.kind == ObservationKind::vector) {
        return "[observation vector]";
    }
    return obs.text;
}

std::string build_prompt(const TaskSpec& task, const std::string& overall_plan,
                         const std::vector<RetrievedExperience>& experiences,
                         const std::vector<Step>& trajectory, const PromptBudget& budget,
                         bool intra_task, const std::string& context) {
    std::string header = std::string(kInfoHeader) + "\n";
    if (!context.empty()) {
        header += context + "\n";
    }
    header += "Your task is to: " + task.description + "\n";
    if (!overall_plan.empty()) {
        header += "Plan: " + overall_plan + "\n";
    }
    header += "\n";

    const std::string tail = std::string(kTaskHeader) + "\n";
    const std::size_t skeleton =
        header.size() + tail.size() + std::string(kCue).size();
    if (skeleton > static_cast<std::size_t>(budget.max_chars)) {
        throw BudgetTooSmall("prompt skeleton is " + std::to_string(skeleton) +
                             " chars, budget " + std::to_string(budget.max_chars));
    }

    // Ascending score: the strongest exemplar lands nearest the cue.
    std::vector<const RetrievedExperience*> ordered;
    ordered.reserve(experiences.size());
    for (const RetrievedExperience& exp : experiences) {
        ordered.push_back(&exp);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const RetrievedExperience* a, const RetrievedExperience* b) {
                         return a->score < b->score;
                     });

    std::vector<std::string> blocks;
    blocks.reserve(ordered.size());
    for (const RetrievedExperience* exp : ordered) {
        blocks.push_back(render_block(*exp, intra_task));
    }

    // Last max_current_steps of the running episode.
    const std::size_t keep = std::min<std::size_t>(
        trajectory.size(), static_cast<std::size_t>(std::max(1, budget.max_current_steps)));
    std::vector<std::string> tail_steps;
    tail_steps.reserve(keep);
    for (std::size_t i = trajectory.size() - keep; i < trajectory.size(); ++i) {
        tail_steps.push_back(render_step(trajectory[i]));
    }

    auto total_size = [&](std::size_t first_block, std::size_t first_step) {
        std::size_t total = skeleton;
        for (std::size_t i = first_block; i < blocks.size(); ++i) {
            total += blocks[i].size();
        }
        if (first_block < blocks.size()) {
            total += std::string(kExamplesHeader).size() + 2;  // header + blank line
        }
        for (std::size_t i = first_step; i < tail_steps.size(); ++i) {
            total += tail_steps[i].size();
        }
        return total;
    };

    // Trim the weakest experience blocks first, then the oldest steps.
    std::size_t first_block = 0;
    std::size_t first_step = 0;
    while (first_block < blocks.size() &&
           total_size(first_block, first_step) > static_cast<std::size_t>(budget.max_chars)) {
        ++first_block;
    }
    while (first_step < tail_steps.size() &&
           total_size(first_block, first_step) > static_cast<std::size_t>(budget.max_chars)) {
        ++first_step;
    }

    std::string prompt = header;
    if (first_block < blocks.size()) {
        prompt += std::string(kExamplesHeader) + "\n\n";
        for (std::size_t i = first_block; i < blocks.size(); ++i) {
            prompt += blocks[i];
        }
    }
    prompt += tail;
    for (std::size_t i = first_step; i < tail_steps.size(); ++i) {
        prompt += tail_steps[i];
    }
    prompt += kCue;
    return prompt;
}

AgentOutput parse_agent_output(const std::string& completion) {
    std::string line = trim(completion);
    const std::size_t newline = line.find('\n');
    if (newline != std::string::npos) {
        line = trim(line.substr(0, newline));
    }
    while (!line.empty() && line.front() == '>') {
        line.erase(line.begin());
        line = trim(line);
    }
    if (line.empty()) {
        throw EmptyCompletion("backend returned an empty completion");
    }
    static constexpr const char* kThink = "think:";
    std::string lowered = line.substr(0, 6);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == kThink) {
        const std::string text = trim(line.substr(6));
        if (text.empty()) {
            throw EmptyCompletion("think step with no content");
        }
        return AgentOutput{OutputKind::action_plan, text};
    }
    return AgentOutput{OutputKind::env_action, line};
}

AgentOutput next_output(const std::string& prompt, CompletionBackend& backend) {
    CompletionRequest request;
    request.prompt = prompt;
    return parse_agent_output(backend.complete(request));
}

}  // namespace epilog
