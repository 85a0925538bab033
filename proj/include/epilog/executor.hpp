#pragma once

#include <string>
#include <vector>

#include "epilog/backends.hpp"
#include "epilog/memory.hpp"
#include "epilog/retrieval.hpp"

namespace epilog {

enum class OutputKind { env_action, action_plan };

// One executor decision: either an environment command or a think step.
struct AgentOutput {
    OutputKind kind = OutputKind::env_action;
    std::string text;  // non-empty, single line
};

// Caps on how much of the current episode enters the prompt: at most
// max_current_steps trailing trajectory steps, and max_chars characters
// overall.
struct PromptBudget {
    int max_current_steps = 20;  // >= 1
    int max_chars = 16000;
};

// Assembles the in-context prompt: task header, retrieved experience
// blocks in ascending score order (strongest nearest the cue), the tail of
// the current trajectory, and a completion cue. When the budget is
// exceeded, the weakest experience blocks are dropped first, then the
// oldest trajectory steps. With intra_task set, each block is prefixed by
// its own task line so the model can pair memory tasks with memory
// actions. Throws BudgetTooSmall when even the fixed skeleton exceeds
// max_chars.
std::string build_prompt(const TaskSpec& task, const std::string& overall_plan,
                         const std::vector<RetrievedExperience>& experiences,
                         const std::vector<Step>& trajectory, const PromptBudget& budget,
                         bool intra_task, const std::string& context = "");

// Classifies a completion: "think: ..." (after an optional "> " marker)
// becomes an action plan, anything else an environment action. Only the
// first line is kept. Throws EmptyCompletion when nothing usable remains.
AgentOutput parse_agent_output(const std::string& completion);

// Runs the backend on an assembled prompt and classifies the completion.
AgentOutput next_output(const std::string& prompt, CompletionBackend& backend);

// How an observation appears inside a prompt.
std::string render_observation(const Observation& obs);

}  // namespace epilog
