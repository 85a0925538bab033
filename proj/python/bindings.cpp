#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "epilog/backends.hpp"
#include "epilog/embedding.hpp"
#include "epilog/envs.hpp"
#include "epilog/executor.hpp"
#include "epilog/harness.hpp"
#include "epilog/memory.hpp"
#include "epilog/reasoner.hpp"
#include "epilog/retrieval.hpp"
#include "epilog/runner.hpp"

namespace py = pybind11;
using namespace epilog;

PYBIND11_MODULE(_core, m) {
    m.doc() = "episodic memory retrieval and planning for LLM agents";

    py::register_exception<Error>(m, "EpilogError");

    // --- embedding ---
    py::class_<Embedding>(m, "Embedding")
        .def(py::init([](std::vector<double> values) { return Embedding{std::move(values)}; }))
        .def_readonly("values", &Embedding::values)
        .def_property_readonly("dim", &Embedding::dim);

    py::class_<EmbeddingProvider, std::shared_ptr<EmbeddingProvider>>(m, "EmbeddingProvider")
        .def("embed", &EmbeddingProvider::embed)
        .def_property_readonly("dim", &EmbeddingProvider::dim)
        .def_property_readonly("provider_id", &EmbeddingProvider::provider_id);

    py::class_<HashingProvider, EmbeddingProvider, std::shared_ptr<HashingProvider>>(
        m, "HashingProvider")
        .def(py::init<int, std::uint64_t>(), py::arg("dim") = kDefaultEmbeddingDim,
             py::arg("seed") = 0);

    m.def("cosine", &cosine, py::arg("a"), py::arg("b"));

    // --- memory ---
    py::class_<TaskSpec>(m, "TaskSpec")
        .def(py::init([](std::string id, std::string description, std::string task_type,
                         std::map<std::string, std::string> metadata) {
                 return TaskSpec{std::move(id), std::move(description), std::move(task_type),
                                 std::move(metadata)};
             }),
             py::arg("id"), py::arg("description"), py::arg("task_type") = "",
             py::arg("metadata") = std::map<std::string, std::string>{})
        .def_readwrite("id", &TaskSpec::id)
        .def_readwrite("description", &TaskSpec::description)
        .def_readwrite("task_type", &TaskSpec::task_type)
        .def_readwrite("metadata", &TaskSpec::metadata);

    py::class_<Observation>(m, "Observation")
        .def_static("from_text", &Observation::from_text)
        .def_static("from_vector", &Observation::from_vector)
        .def_property_readonly("is_text",
                               [](const Observation& o) {
                                   return o.kind == ObservationKind::text;
                               })
        .def_readonly("text", &Observation::text)
        .def_readonly("vector", &Observation::vector);

    py::class_<Step>(m, "Step")
        .def(py::init([](std::string action, Observation observation,
                         std::optional<std::string> action_plan) {
                 Step s;
                 s.action = std::move(action);
                 s.observation = std::move(observation);
                 s.action_plan = std::move(action_plan);
                 return s;
             }),
             py::arg("action"), py::arg("observation"),
             py::arg("action_plan") = std::nullopt)
        .def_readwrite("action", &Step::action)
        .def_readwrite("observation", &Step::observation)
        .def_readwrite("action_plan", &Step::action_plan);

    py::class_<Provenance>(m, "Provenance")
        .def(py::init([](std::string backend_id, int trial_index, std::string created_at) {
                 return Provenance{std::move(backend_id), trial_index, std::move(created_at)};
             }),
             py::arg("backend_id"), py::arg("trial_index") = 1, py::arg("created_at") = "")
        .def_readwrite("backend_id", &Provenance::backend_id)
        .def_readwrite("trial_index", &Provenance::trial_index)
        .def_readwrite("created_at", &Provenance::created_at);

    py::class_<EpisodeLog>(m, "EpisodeLog")
        .def(py::init([](std::string log_id, TaskSpec task, std::string overall_plan,
                         std::vector<Step> steps, double reward, bool success,
                         Provenance provenance) {
                 return EpisodeLog{std::move(log_id), std::move(task),
                                   std::move(overall_plan), std::move(steps), reward, success,
                                   std::move(provenance)};
             }),
             py::arg("log_id"), py::arg("task"), py::arg("overall_plan"), py::arg("steps"),
             py::arg("reward") = 1.0, py::arg("success") = true,
             py::arg("provenance") = Provenance{"unknown", 1, ""})
        .def_readwrite("log_id", &EpisodeLog::log_id)
        .def_readwrite("task", &EpisodeLog::task)
        .def_readwrite("overall_plan", &EpisodeLog::overall_plan)
        .def_readwrite("steps", &EpisodeLog::steps)
        .def_readwrite("reward", &EpisodeLog::reward)
        .def_readwrite("success", &EpisodeLog::success)
        .def_readwrite("provenance", &EpisodeLog::provenance);

    py::class_<LogFilter>(m, "LogFilter")
        .def(py::init([](std::optional<std::string> task_type,
                         std::map<std::string, std::string> metadata_equals) {
                 return LogFilter{std::move(task_type), std::move(metadata_equals)};
             }),
             py::arg("task_type") = std::nullopt,
             py::arg("metadata_equals") = std::map<std::string, std::string>{})
        .def("matches", &LogFilter::matches);

    py::class_<MemoryStore>(m, "MemoryStore")
        .def(py::init<int>(), py::arg("embedding_dim") = kDefaultEmbeddingDim)
        .def("insert", &MemoryStore::insert)
        .def("__len__", &MemoryStore::size)
        .def_property_readonly("embedding_dim", &MemoryStore::embedding_dim)
        .def("filter",
             [](const MemoryStore& store, const LogFilter& predicate) {
                 std::vector<EpisodeLog> out;
                 for (const LogPtr& log : store.filter(predicate)) {
                     out.push_back(*log);
                 }
                 return out;
             })
        .def("logs",
             [](const MemoryStore& store) {
                 std::vector<EpisodeLog> out;
                 for (const LogPtr& log : *store.snapshot()) {
                     out.push_back(*log);
                 }
                 return out;
             })
        .def("save", &MemoryStore::save)
        .def_static("load", &MemoryStore::load);

    // --- retrieval ---
    py::class_<ScoreWeights>(m, "ScoreWeights")
        .def(py::init([](double task, double plan, double key) {
                 return ScoreWeights{task, plan, key};
             }),
             py::arg("task") = 0.5, py::arg("plan") = 0.25, py::arg("key") = 0.25)
        .def_readwrite("task", &ScoreWeights::task)
        .def_readwrite("plan", &ScoreWeights::plan)
        .def_readwrite("key", &ScoreWeights::key);

    py::class_<RetrievalKey>(m, "RetrievalKey")
        .def_static("search", &RetrievalKey::search)
        .def_static("action", &RetrievalKey::action)
        .def_static("visual", &RetrievalKey::visual)
        .def_readonly("text", &RetrievalKey::text)
        .def_property_readonly("kind", [](const RetrievalKey& k) {
            switch (k.kind) {
                case KeyKind::observation_search: return "observation_search";
                case KeyKind::action_match: return "action_match";
                case KeyKind::visual: return "visual";
            }
            return "?";
        });

    py::class_<QueryState>(m, "QueryState")
        .def(py::init([](std::string task_text, std::optional<std::string> overall_plan,
                         std::optional<RetrievalKey> key, std::optional<LogFilter> filter) {
                 return QueryState{std::move(task_text), std::move(overall_plan),
                                   std::move(key), std::move(filter)};
             }),
             py::arg("task_text"), py::arg("overall_plan") = std::nullopt,
             py::arg("key") = std::nullopt, py::arg("filter") = std::nullopt);

    py::class_<WindowPolicy>(m, "WindowPolicy")
        .def(py::init([](int num_experiences, int steps_before, int steps_after) {
                 return WindowPolicy{num_experiences, steps_before, steps_after};
             }),
             py::arg("num_experiences") = 4, py::arg("steps_before") = 10,
             py::arg("steps_after") = 10)
        .def_readwrite("num_experiences", &WindowPolicy::num_experiences)
        .def_readwrite("steps_before", &WindowPolicy::steps_before)
        .def_readwrite("steps_after", &WindowPolicy::steps_after);

    py::class_<RetrievedExperience>(m, "RetrievedExperience")
        .def_readonly("log_id", &RetrievedExperience::log_id)
        .def_readonly("score", &RetrievedExperience::score)
        .def_readonly("anchor_index", &RetrievedExperience::anchor_index)
        .def_readonly("window", &RetrievedExperience::window)
        .def_readonly("source_task_text", &RetrievedExperience::source_task_text);

    m.def(
        "key_similarity",
        [](const RetrievalKey& key, const EpisodeLog& log,
           const std::shared_ptr<EmbeddingProvider>& provider) {
            const KeyMatch match = key_similarity(key, log, *provider);
            return py::make_tuple(match.score, match.anchor_index);
        },
        py::arg("key"), py::arg("log"), py::arg("provider"));

    m.def(
        "score_log",
        [](const QueryState& query, const EpisodeLog& log, const ScoreWeights& weights,
           const std::shared_ptr<EmbeddingProvider>& provider) {
            return score_log(query, log, weights, *provider);
        },
        py::arg("query"), py::arg("log"), py::arg("weights"), py::arg("provider"));

    m.def("extract_window", &extract_window, py::arg("log"), py::arg("anchor_index"),
          py::arg("policy"));

    m.def(
        "retrieve",
        [](const QueryState& query, const MemoryStore& store, const ScoreWeights& weights,
           const WindowPolicy& policy, const std::shared_ptr<EmbeddingProvider>& provider) {
            return retrieve(query, store.snapshot(), weights, policy, *provider);
        },
        py::arg("query"), py::arg("store"), py::arg("weights"), py::arg("policy"),
        py::arg("provider"));

    // --- reasoner / executor surface ---
    m.def("parse_key_line", &parse_key_line);
    m.def("format_key", &format_key);
    m.def(
        "build_prompt",
        [](const TaskSpec& task, const std::string& overall_plan,
           const std::vector<RetrievedExperience>& experiences,
           const std::vector<Step>& trajectory, int max_current_steps, int max_chars,
           bool intra_task, const std::string& context) {
            return build_prompt(task, overall_plan, experiences, trajectory,
                                PromptBudget{max_current_steps, max_chars}, intra_task,
                                context);
        },
        py::arg("task"), py::arg("overall_plan"), py::arg("experiences"),
        py::arg("trajectory"), py::arg("max_current_steps") = 20,
        py::arg("max_chars") = 16000, py::arg("intra_task") = false, py::arg("context") = "");
    m.def("parse_agent_output", [](const std::string& completion) {
        const AgentOutput out = parse_agent_output(completion);
        return py::make_tuple(out.kind == OutputKind::action_plan ? "action_plan"
                                                                  : "env_action",
                              out.text);
    });

    // --- backends ---
    py::class_<CompletionBackend, std::shared_ptr<CompletionBackend>>(m, "CompletionBackend")
        .def("complete",
             [](CompletionBackend& backend, const std::string& prompt) {
                 CompletionRequest request;
                 request.prompt = prompt;
                 return backend.complete(request);
             })
        .def_property_readonly("backend_id", &CompletionBackend::backend_id);

    py::class_<ScriptedRule>(m, "ScriptedRule")
        .def(py::init([](std::string pattern, std::string response, int priority,
                         bool regex) {
                 ScriptedRule rule;
                 rule.match = regex ? MatchKind::pattern : MatchKind::substring;
                 rule.pattern = std::move(pattern);
                 rule.response = std::move(response);
                 rule.priority = priority;
                 return rule;
             }),
             py::arg("pattern"), py::arg("response"), py::arg("priority") = 0,
             py::arg("regex") = false);

    py::class_<ScriptedBackend, CompletionBackend, std::shared_ptr<ScriptedBackend>>(
        m, "ScriptedBackend")
        .def(py::init<std::string, std::vector<ScriptedRule>, std::string, bool>(),
             py::arg("id"), py::arg("rules"), py::arg("default_response") = "",
             py::arg("strict") = false);

    m.def("load_script", &load_script);

    // --- environments ---
    py::class_<EnvStep>(m, "EnvStep")
        .def_readonly("observation", &EnvStep::observation)
        .def_readonly("reward", &EnvStep::reward)
        .def_readonly("done", &EnvStep::done);

    py::class_<Environment, std::shared_ptr<Environment>>(m, "Environment")
        .def("reset", &Environment::reset)
        .def("step", &Environment::step);

    py::class_<MiniHouseEnv, Environment, std::shared_ptr<MiniHouseEnv>>(m, "MiniHouseEnv")
        .def(py::init([](const std::string& fixtures_path) {
                 return std::make_shared<MiniHouseEnv>(load_house_fixtures(fixtures_path));
             }),
             py::arg("fixtures_path"));

    m.def("load_house_tasks", [](const std::string& path) {
        std::vector<TaskSpec> tasks;
        for (const HouseFixture& f : load_house_fixtures(path)) {
            tasks.push_back(f.task);
        }
        return tasks;
    });

    // --- runner ---
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("max_steps", &RunConfig::max_steps)
        .def_readwrite("d_max", &RunConfig::d_max)
        .def_readwrite("weights", &RunConfig::weights)
        .def_readwrite("window_action", &RunConfig::window_action)
        .def_readwrite("window_observation", &RunConfig::window_observation)
        .def_readwrite("intra_task", &RunConfig::intra_task)
        .def_readwrite("filter_by_task_type", &RunConfig::filter_by_task_type)
        .def_readwrite("seed", &RunConfig::seed);

    py::class_<RetrievalEvent>(m, "RetrievalEvent")
        .def_readonly("iteration", &RetrievalEvent::iteration)
        .def_readonly("key", &RetrievalEvent::key)
        .def_readonly("log_ids", &RetrievalEvent::log_ids);

    py::class_<EpisodeResult>(m, "EpisodeResult")
        .def_readonly("task_id", &EpisodeResult::task_id)
        .def_readonly("success", &EpisodeResult::success)
        .def_readonly("reward", &EpisodeResult::reward)
        .def_readonly("steps_taken", &EpisodeResult::steps_taken)
        .def_readonly("trajectory", &EpisodeResult::trajectory)
        .def_readonly("trial_index", &EpisodeResult::trial_index)
        .def_readonly("retrieval_trace", &EpisodeResult::retrieval_trace)
        .def_readonly("overall_plan", &EpisodeResult::overall_plan)
        .def_readonly("failure_reason", &EpisodeResult::failure_reason);

    m.def(
        "run_episode",
        [](const std::shared_ptr<Environment>& env, const TaskSpec& task,
           const MemoryStore& store, const RunConfig& config,
           const std::shared_ptr<CompletionBackend>& backend,
           const std::shared_ptr<EmbeddingProvider>& provider, int trial_index) {
            return run_episode(*env, task, store.snapshot(), config, *backend, *provider,
                               trial_index);
        },
        py::arg("env"), py::arg("task"), py::arg("store"), py::arg("config"),
        py::arg("backend"), py::arg("provider"), py::arg("trial_index") = 1);

    m.def(
        "run_trials",
        [](const std::vector<TaskSpec>& tasks, const std::string& fixtures_path,
           const RunConfig& config, MemoryStore& store,
           const std::shared_ptr<CompletionBackend>& backend,
           const std::shared_ptr<EmbeddingProvider>& provider, int workers) {
            auto fixtures =
                std::make_shared<std::vector<HouseFixture>>(load_house_fixtures(fixtures_path));
            EnvFactory factory = [fixtures]() -> std::unique_ptr<Environment> {
                return std::make_unique<MiniHouseEnv>(*fixtures);
            };
            const TrialsResult result =
                run_trials(tasks, factory, config, store, *backend, *provider, workers);
            py::list rows;
            for (const TrialRow& row : result.per_trial) {
                rows.append(py::make_tuple(row.trial, row.success_rate, row.mean_reward));
            }
            return py::make_tuple(rows, result.episodes);
        },
        py::arg("tasks"), py::arg("fixtures_path"), py::arg("config"), py::arg("store"),
        py::arg("backend"), py::arg("provider"), py::arg("workers") = 1);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
