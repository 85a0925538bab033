#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "epilog/backends.hpp"
#include "epilog/embedding.hpp"
#include "epilog/envs.hpp"
#include "epilog/executor.hpp"
#include "epilog/memory.hpp"
#include "epilog/reasoner.hpp"
#include "epilog/retrieval.hpp"

namespace epilog {

// Everything a run needs beyond its fixtures: horizon, trial depth,
// scoring weights, window profiles, and the prompt budget.
struct RunConfig {
    int max_steps = 50;  // environment-step horizon per episode
    int d_max = 3;       // trial depth
    ScoreWeights weights{};
    WindowPolicy window_action = kActionWindow;
    WindowPolicy window_observation = kObservationWindow;
    PromptBudget budget{};
    bool intra_task = false;
    bool filter_by_task_type = false;
    std::uint64_t seed = 0;
};

// One retrieval, as it happened: which executor iteration triggered it,
// the key used ("" for keyless), and what came back.
struct RetrievalEvent {
    int iteration = 0;
    std::string key;
    std::vector<std::string> log_ids;
};

// Audit record of one episode.
struct EpisodeResult {
    std::string task_id;
    bool success = false;
    double reward = 0.0;
    int steps_taken = 0;  // environment steps; think steps excluded
    std::vector<Step> trajectory;
    int trial_index = 1;
    std::vector<RetrievalEvent> retrieval_trace;
    std::string overall_plan;
    std::string failure_reason;  // empty on clean termination
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

// Runs one episode: plan generation, keyless pre-loop retrieval, then the
// think/act loop. Think steps regenerate the key and re-retrieve without
// consuming an environment step; a total-iteration cap of 4 * max_steps
// guards against backends that never act. Backend and environment errors
// end the episode as a failure with the cause recorded.
EpisodeResult run_episode(Environment& env, const TaskSpec& task, Snapshot memory,
                          const RunConfig& config, CompletionBackend& backend,
                          const EmbeddingProvider& provider, int trial_index = 1,
                          const std::vector<std::string>& plan_exemplars = {});

struct TrialRow {
    int trial = 0;
    double success_rate = 0.0;  // cumulative over trials <= this one
    double mean_reward = 0.0;   // mean over tasks of best reward so far
};

struct TrialsResult {
    std::vector<TrialRow> per_trial;
    std::vector<EpisodeResult> episodes;  // all trials, task order within each
};

// Multi-trial self-improvement: trial 1 runs every task; successful
// episodes are inserted into the store at the trial barrier; later trials
// rerun only the still-failed tasks against the grown memory. Episodes
// within a trial may run on `workers` threads; insertion happens serially
// in task order, so the worker count never changes the outcome.
TrialsResult run_trials(const std::vector<TaskSpec>& tasks, const EnvFactory& make_env,
                        const RunConfig& config, MemoryStore& store,
                        CompletionBackend& backend, const EmbeddingProvider& provider,
                        int workers = 1,
                        const std::vector<std::string>& plan_exemplars = {});

// Builds a store by running training tasks with empty-memory prompts and
// keeping the successes. Training ids must be disjoint from the evaluation
// ids (OverlapError otherwise). The consuming model never needs to match
// provenance.backend_id: logs are plain text.
MemoryStore build_memory_from_training(const std::vector<TaskSpec>& training_tasks,
                                       const std::vector<std::string>& eval_task_ids,
                                       const EnvFactory& make_env, const RunConfig& config,
                                       CompletionBackend& backend,
                                       const EmbeddingProvider& provider, int embedding_dim,
                                       int* attempted_out = nullptr,
                                       int workers = 1);

// Turns a successful episode into its memory log.
EpisodeLog log_from_episode(const TaskSpec& task, const EpisodeResult& episode,
                            const std::string& backend_id);

}  // namespace epilog
