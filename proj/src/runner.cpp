#include "epilog/runner.hpp"

#include <atomic>
#include <set>
#include <thread>

namespace epilog {

namespace {

// Inserting at the trial barrier in task order keeps runs reproducible no
// matter how many workers executed the episodes.
void run_batch(const std::vector<const TaskSpec*>& tasks, const EnvFactory& make_env,
               const RunConfig& config, Snapshot memory, CompletionBackend& backend,
               const EmbeddingProvider& provider, int trial_index, int workers,
               const std::vector<std::string>& plan_exemplars,
               std::vector<EpisodeResult>& results) {
    results.assign(tasks.size(), EpisodeResult{});
    if (tasks.empty()) {
        return;
    }
    const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) {
                return;
            }
            auto env = make_env();
            results[i] = run_episode(*env, *tasks[i], memory, config, backend, provider,
                                     trial_index, plan_exemplars);
        }
    };
    if (n_workers == 1) {
        worker();
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) {
        threads.emplace_back(worker);
    }
    for (std::thread& t : threads) {
        t.join();
    }
}

std::string key_label(const std::optional<RetrievalKey>& key) {
    if (!key) {
        return "";
    }
    if (key->kind == KeyKind::visual) {
        return "visual";
    }
    return format_key(*key);
}

std::vector<std::string> ids_of(const std::vector<RetrievedExperience>& experiences) {
    std::vector<std::string> ids;
    ids.reserve(experiences.size());
    for (const RetrievedExperience& exp : experiences) {
        ids.push_back(exp.log_id);
    }
    return ids;
}

}  // namespace

EpisodeResult run_episode(Environment& env, const TaskSpec& task, Snapshot memory,
                          const RunConfig& config, CompletionBackend& backend,
                          const EmbeddingProvider& provider, int trial_index,
                          const std::vector<std::string>& plan_exemplars) {
    EpisodeResult result;
    result.task_id = task.id;
    result.trial_index = trial_index;

    Reasoner reasoner(backend);

    Observation initial;
    try {
        initial = env.reset(task);
    } catch (const Error& e) {
        result.failure_reason = std::string("env: ") + e.what();
        return result;
    }
    const std::string context = render_observation(initial);

    try {
        result.overall_plan = reasoner.generate_overall_plan(task, plan_exemplars);
    } catch (const Error& e) {
        result.failure_reason = std::string("reasoner: ") + e.what();
        return result;
    }

    QueryState query;
    query.task_text = task.description;
    query.overall_plan = result.overall_plan;
    if (config.filter_by_task_type && !task.task_type.empty()) {
        LogFilter filter;
        filter.task_type = task.task_type;
        query.filter = filter;
    }

    // Keyless retrieval before the loop; keys only exist once a think step
    // produces one.
    std::vector<RetrievedExperience> experiences;
    try {
        experiences = retrieve(query, memory, config.weights, config.window_action, provider);
    } catch (const Error& e) {
        result.failure_reason = std::string("retriever: ") + e.what();
        return result;
    }
    result.retrieval_trace.push_back(RetrievalEvent{0, "", ids_of(experiences)});

    Observation last_observation = initial;
    const int max_iterations = 4 * config.max_steps;  // think steps cannot spin forever
    int iteration = 0;

    while (iteration < max_iterations) {
        ++iteration;
        AgentOutput output;
        try {
            const std::string prompt =
                build_prompt(task, result.overall_plan, experiences, result.trajectory,
                             config.budget, config.intra_task, context);
            output = next_output(prompt, backend);
        } catch (const Error& e) {
            result.failure_reason = std::string("executor: ") + e.what();
            return result;
        }

        if (output.kind == OutputKind::action_plan) {
            Step step;
            step.action_plan = output.text;
            step.action = "think: " + output.text;
            step.observation = Observation::from_text("OK.");
            result.trajectory.push_back(std::move(step));

            // Visual environments key on the current observation embedding;
            // text environments ask the reasoner. An unparseable key
            // degrades to keyless retrieval rather than ending the episode.
            std::optional<RetrievalKey> key;
            if (last_observation.kind == ObservationKind::vector) {
                key = RetrievalKey::visual(Embedding{last_observation.vector});
            } else {
                try {
                    key = reasoner.generate_retrieval_key(output.text);
                } catch (const UnparseableKey&) {
                    key = std::nullopt;
                } catch (const Error& e) {
                    result.failure_reason = std::string("reasoner: ") + e.what();
                    return result;
                }
            }
            query.key = key;
            const WindowPolicy& policy =
                (key && key->kind == KeyKind::action_match) ? config.window_action
                                                            : config.window_observation;
            try {
                experiences = retrieve(query, memory, config.weights, policy, provider);
            } catch (const Error& e) {
                result.failure_reason = std::string("retriever: ") + e.what();
                return result;
            }
            result.retrieval_trace.push_back(
                RetrievalEvent{iteration, key_label(key), ids_of(experiences)});
            continue;
        }

        EnvStep env_step;
        try {
            env_step = env.step(output.text);
        } catch (const std::exception& e) {
            result.failure_reason = std::string("env: ") + e.what();
            return result;
        }
        Step step;
        step.action = output.text;
        step.observation = env_step.observation;
        result.trajectory.push_back(std::move(step));
        last_observation = env_step.observation;
        ++result.steps_taken;
        result.reward = env_step.reward;

        if (env_step.done && env_step.reward >= 1.0) {
            result.success = true;
            return result;
        }
        if (env_step.done) {
            result.failure_reason = "episode ended without full reward";
            return result;
        }
        if (result.steps_taken >= config.max_steps) {
            result.failure_reason = "horizon reached";
            return result;
        }
    }
    result.failure_reason = "iteration cap reached";
    return result;
}

EpisodeLog log_from_episode(const TaskSpec& task, const EpisodeResult& episode,
                            const std::string& backend_id) {
    EpisodeLog log;
    log.log_id = task.id + ".t" + std::to_string(episode.trial_index);
    log.task = task;
    log.overall_plan = episode.overall_plan;
    log.steps = episode.trajectory;
    log.reward = episode.reward;
    log.success = episode.success;
    log.provenance.backend_id = backend_id;
    log.provenance.trial_index = episode.trial_index;
    log.provenance.created_at = now_iso8601();
    return log;
}

TrialsResult run_trials(const std::vector<TaskSpec>& tasks, const EnvFactory& make_env,
                        const RunConfig& config, MemoryStore& store,
                        CompletionBackend& backend, const EmbeddingProvider& provider,
                        int workers, const std::vector<std::string>& plan_exemplars) {
    TrialsResult out;
    std::vector<bool> solved(tasks.size(), false);
    std::vector<double> best_reward(tasks.size(), 0.0);

    for (int trial = 1; trial <= config.d_max; ++trial) {
        std::vector<const TaskSpec*> pending;
        std::vector<std::size_t> pending_index;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (trial == 1 || !solved[i]) {
                pending.push_back(&tasks[i]);
                pending_index.push_back(i);
            }
        }

        std::vector<EpisodeResult> results;
        run_batch(pending, make_env, config, store.snapshot(), backend, provider, trial,
                  workers, plan_exemplars, results);

        // Trial barrier: grow memory from this trial's successes, serially
        // and in task order.
        for (std::size_t i = 0; i < results.size(); ++i) {
            const EpisodeResult& episode = results[i];
            const std::size_t task_index = pending_index[i];
            best_reward[task_index] = std::max(best_reward[task_index], episode.reward);
            if (episode.success) {
                solved[task_index] = true;
                store.insert(log_from_episode(tasks[task_index], episode,
                                              backend.backend_id()));
            }
            out.episodes.push_back(episode);
        }

        TrialRow row;
        row.trial = trial;
        if (!tasks.empty()) {
            int solved_count = 0;
            double reward_sum = 0.0;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                solved_count += solved[i] ? 1 : 0;
                reward_sum += best_reward[i];
            }
            row.success_rate = static_cast<double>(solved_count) /
                               static_cast<double>(tasks.size());
            row.mean_reward = reward_sum / static_cast<double>(tasks.size());
        }
        out.per_trial.push_back(row);
    }
    return out;
}

MemoryStore build_memory_from_training(const std::vector<TaskSpec>& training_tasks,
                                       const std::vector<std::string>& eval_task_ids,
                                       const EnvFactory& make_env, const RunConfig& config,
                                       CompletionBackend& backend,
                                       const EmbeddingProvider& provider, int embedding_dim,
                                       int* attempted_out, int workers) {
    const std::set<std::string> eval_ids(eval_task_ids.begin(), eval_task_ids.end());
    for (const TaskSpec& task : training_tasks) {
        if (eval_ids.count(task.id) > 0) {
            throw OverlapError("training task also in the evaluation set: " + task.id);
        }
    }

    MemoryStore store(embedding_dim);
    const Snapshot empty = store.snapshot();

    std::vector<const TaskSpec*> pending;
    pending.reserve(training_tasks.size());
    for (const TaskSpec& task : training_tasks) {
        pending.push_back(&task);
    }
    std::vector<EpisodeResult> results;
    run_batch(pending, make_env, config, empty, backend, provider, 1, workers, {}, results);

    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].success) {
            store.insert(log_from_episode(training_tasks[i], results[i],
                                          backend.backend_id()));
        }
    }
    if (attempted_out != nullptr) {
        *attempted_out = static_cast<int>(training_tasks.size());
    }
    return store;
}

}  // namespace epilog
