#include "epilog/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "epilog/http_backend.hpp"

namespace epilog {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig resolve_run_config(const Config& config) {
    RunConfig run;
    run.max_steps = config.get_int("run.max_steps", 50);
    run.d_max = config.get_int("run.d_max", 3);
    run.seed = static_cast<std::uint64_t>(config.get_int("run.seed", 0));
    run.intra_task = config.get_bool("run.intra_task", false);
    run.filter_by_task_type = config.get_bool("run.filter_by_task_type", false);
    run.budget.max_current_steps = config.get_int("run.max_current_steps", 20);
    run.budget.max_chars = config.get_int("run.max_chars", 16000);

    run.weights.task = config.get_double("weights.task", 0.5);
    run.weights.plan = config.get_double("weights.plan", 0.25);
    run.weights.key = config.get_double("weights.key", 0.25);

    run.window_action.num_experiences =
        config.get_int("windows.action_experiences", kActionWindow.num_experiences);
    run.window_action.steps_before =
        config.get_int("windows.action_before", kActionWindow.steps_before);
    run.window_action.steps_after =
        config.get_int("windows.action_after", kActionWindow.steps_after);
    run.window_observation.num_experiences =
        config.get_int("windows.observation_experiences", kObservationWindow.num_experiences);
    run.window_observation.steps_before =
        config.get_int("windows.observation_before", kObservationWindow.steps_before);
    run.window_observation.steps_after =
        config.get_int("windows.observation_after", kObservationWindow.steps_after);

    if (run.max_steps < 1 || run.d_max < 1) {
        throw ConfigError("run.max_steps and run.d_max must be >= 1");
    }
    if (run.weights.task < 0 || run.weights.plan < 0 || run.weights.key < 0 ||
        run.weights.task + run.weights.plan + run.weights.key <= 0) {
        throw ConfigError("weights must be non-negative with a positive sum");
    }
    return run;
}

std::shared_ptr<CompletionBackend> make_backend(const Config& config) {
    const std::string type = config.get_or("backend.type", "scripted");
    if (type == "scripted") {
        const std::string script = config.get_or("backend.script", "");
        std::vector<ScriptedRule> rules;
        if (!script.empty()) {
            try {
                rules = load_script(script);
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
        }
        return std::make_shared<ScriptedBackend>(
            config.get_or("backend.id", "scripted"), std::move(rules),
            config.get_or("backend.default_response", "look"),
            config.get_bool("backend.strict", false));
    }
    if (type == "http") {
        HttpBackendConfig http;
        http.base_url = config.get_or("backend.base_url", http.base_url);
        http.path = config.get_or("backend.path", http.path);
        http.model = config.get_or("backend.model", http.model);
        http.api_key_env = config.get_or("backend.api_key_env", "");
        http.timeout_ms = config.get_int("backend.timeout_ms", http.timeout_ms);
        http.max_retries = config.get_int("backend.retries", http.max_retries);
        http.max_in_flight = config.get_int("backend.max_in_flight", http.max_in_flight);
        http.id = config.get_or("backend.id", "http");
        return std::make_shared<HttpBackend>(std::move(http));
    }
    throw ConfigError("unknown backend.type: " + type);
}

std::shared_ptr<const EmbeddingProvider> make_provider(const Config& config) {
    const std::string kind = config.get_or("memory.provider", "hashing");
    const int dim = config.get_int("memory.embedding_dim", kDefaultEmbeddingDim);
    std::shared_ptr<const EmbeddingProvider> inner;
    if (kind == "hashing") {
        inner = std::make_shared<HashingProvider>(
            dim, static_cast<std::uint64_t>(config.get_int("memory.provider_seed", 0)));
    } else if (kind == "remote") {
        RemoteProviderConfig remote;
        remote.base_url = config.get_or("memory.provider_url", remote.base_url);
        remote.path = config.get_or("memory.provider_path", remote.path);
        remote.dim = dim;
        remote.timeout_ms = config.get_int("memory.provider_timeout_ms", remote.timeout_ms);
        remote.max_retries = config.get_int("memory.provider_retries", remote.max_retries);
        inner = std::make_shared<RemoteProvider>(std::move(remote));
    } else {
        throw ConfigError("unknown memory.provider: " + kind);
    }
    return std::make_shared<CachedProvider>(std::move(inner));
}

namespace {

// Fixture files hold either household worlds or vector corridors; sniff
// the first entry.
bool fixtures_are_corridor(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open fixtures: " + path);
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("fixtures " + path + ": " + e.what());
    }
    if (!root.contains("fixtures") || !root.at("fixtures").is_array() ||
        root.at("fixtures").empty()) {
        throw ConfigError("fixtures " + path + ": expected a non-empty fixtures array");
    }
    return root.at("fixtures").at(0).contains("positions");
}

json resolved_echo(const Config& config, const RunConfig& run) {
    json echo;
    echo["run"] = {{"max_steps", run.max_steps},
                   {"d_max", run.d_max},
                   {"seed", run.seed},
                   {"intra_task", run.intra_task},
                   {"filter_by_task_type", run.filter_by_task_type},
                   {"max_current_steps", run.budget.max_current_steps},
                   {"max_chars", run.budget.max_chars},
                   {"workers", config.get_int("run.workers", 1)}};
    echo["weights"] = {{"task", run.weights.task},
                       {"plan", run.weights.plan},
                       {"key", run.weights.key}};
    echo["windows"] = {{"action_experiences", run.window_action.num_experiences},
                       {"action_before", run.window_action.steps_before},
                       {"action_after", run.window_action.steps_after},
                       {"observation_experiences", run.window_observation.num_experiences},
                       {"observation_before", run.window_observation.steps_before},
                       {"observation_after", run.window_observation.steps_after}};
    echo["backend"] = {{"type", config.get_or("backend.type", "scripted")},
                       {"id", config.get_or("backend.id", "scripted")},
                       {"script", config.get_or("backend.script", "")},
                       {"default_response", config.get_or("backend.default_response", "look")},
                       {"strict", config.get_bool("backend.strict", false)}};
    echo["env"] = {{"fixtures", config.get_or("env.fixtures", "")},
                   {"training_fixtures", config.get_or("env.training_fixtures", "")}};
    echo["memory"] = {{"provider", config.get_or("memory.provider", "hashing")},
                      {"embedding_dim", config.get_int("memory.embedding_dim",
                                                       kDefaultEmbeddingDim)},
                      {"provider_seed", config.get_int("memory.provider_seed", 0)},
                      {"path", config.get_or("memory.path", "")}};
    return echo;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

void write_report_files(const Report& report, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path dir(out_dir);
    write_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_file(dir / "report.txt", render_table(report));
    write_file(dir / "trials.csv", render_csv(report));
}

// Probes connectivity so a dead endpoint fails fast with its own exit code
// instead of surfacing as a wall of failed episodes.
void probe_backend(const Config& config, CompletionBackend& backend) {
    if (config.get_or("backend.type", "scripted") != "http") {
        return;
    }
    CompletionRequest probe;
    probe.prompt = "ping";
    probe.max_tokens = 1;
    backend.complete(probe);
}

json provenance_block(const MemoryStore& store) {
    std::map<std::string, int> by_backend;
    for (const LogPtr& log : *store.snapshot()) {
        by_backend[log->provenance.backend_id] += 1;
    }
    return json{{"logs", store.size()},
                {"embedding_dim", store.embedding_dim()},
                {"built_by", by_backend}};
}

int run_eval(const Config& config, const EvalOptions& options, std::ostream& out,
             Report* report_out, json memory_provenance) {
    const RunConfig run = resolve_run_config(config);
    auto backend = make_backend(config);
    auto provider = make_provider(config);
    const EnvSetup setup = load_env_setup(config);

    std::string memory_path = options.memory_path;
    if (memory_path.empty()) {
        memory_path = config.get_or("memory.path", "");
    }
    MemoryStore store(provider->dim());
    if (!memory_path.empty()) {
        store = MemoryStore::load(memory_path);
        if (store.embedding_dim() != provider->dim()) {
            throw ConfigError("memory file dim " + std::to_string(store.embedding_dim()) +
                              " does not match provider dim " +
                              std::to_string(provider->dim()));
        }
        if (memory_provenance.is_null()) {
            memory_provenance = provenance_block(store);
        }
    }

    probe_backend(config, *backend);

    const TrialsResult trials =
        run_trials(setup.tasks, setup.make_env, run, store, *backend, *provider,
                   config.get_int("run.workers", 1));

    Report report = make_report(trials, setup.tasks, resolved_echo(config, run));
    report.memory_provenance = std::move(memory_provenance);
    write_report_files(report, options.out_dir);

    if (!options.save_memory_path.empty()) {
        store.save(options.save_memory_path);
    }
    out << render_table(report);
    if (report_out != nullptr) {
        *report_out = std::move(report);
    }
    return kExitOk;
}

}  // namespace

EnvSetup load_env_setup(const Config& config, const std::string& fixtures_key) {
    const std::string path = config.get_or(fixtures_key, "");
    if (path.empty()) {
        throw ConfigError("missing " + fixtures_key);
    }
    EnvSetup setup;
    if (fixtures_are_corridor(path)) {
        auto fixtures = std::make_shared<std::vector<CorridorFixture>>(
            load_corridor_fixtures(path));
        for (const CorridorFixture& f : *fixtures) {
            setup.tasks.push_back(f.task);
        }
        setup.make_env = [fixtures]() -> std::unique_ptr<Environment> {
            return std::make_unique<VectorCorridorEnv>(*fixtures);
        };
    } else {
        auto fixtures = std::make_shared<std::vector<HouseFixture>>(
            load_house_fixtures(path));
        for (const HouseFixture& f : *fixtures) {
            setup.tasks.push_back(f.task);
        }
        setup.make_env = [fixtures]() -> std::unique_ptr<Environment> {
            return std::make_unique<MiniHouseEnv>(*fixtures);
        };
    }
    return setup;
}

std::vector<InspectRow> inspect_memory(const MemoryStore& store, const QueryState& query,
                                       int k, const ScoreWeights& weights,
                                       const EmbeddingProvider& provider) {
    const Snapshot snap = store.snapshot();
    struct Row {
        ScoreBreakdown breakdown;
        std::size_t index;
        const EpisodeLog* log;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < snap->size(); ++i) {
        const EpisodeLog& log = *(*snap)[i];
        if (query.filter && !query.filter->matches(log)) {
            continue;
        }
        rows.push_back(Row{score_breakdown(query, log, weights, provider), i, &log});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.breakdown.total != b.breakdown.total) {
            return a.breakdown.total > b.breakdown.total;
        }
        if (a.index != b.index) {
            return a.index > b.index;
        }
        return a.log->log_id < b.log->log_id;
    });
    if (k > 0 && rows.size() > static_cast<std::size_t>(k)) {
        rows.resize(static_cast<std::size_t>(k));
    }
    std::vector<InspectRow> out;
    out.reserve(rows.size());
    for (const Row& row : rows) {
        out.push_back(InspectRow{row.log->log_id, row.log->task.description, row.breakdown});
    }
    return out;
}

int cmd_eval(const Config& config, const EvalOptions& options, std::ostream& out,
             Report* report_out) {
    try {
        return run_eval(config, options, out, report_out, json());
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CorruptRecord& e) {
        out << "memory error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaVersionUnsupported& e) {
        out << "memory error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BackendError& e) {
        out << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_build_memory(const Config& config, const std::string& output_path,
                     std::ostream& out) {
    try {
        const RunConfig run = resolve_run_config(config);
        auto backend = make_backend(config);
        auto provider = make_provider(config);
        const EnvSetup training = load_env_setup(config, "env.training_fixtures");

        std::vector<std::string> eval_ids;
        if (config.get("env.fixtures")) {
            const EnvSetup eval = load_env_setup(config);
            for (const TaskSpec& task : eval.tasks) {
                eval_ids.push_back(task.id);
            }
        }

        probe_backend(config, *backend);

        int attempted = 0;
        MemoryStore store = build_memory_from_training(
            training.tasks, eval_ids, training.make_env, run, *backend, *provider,
            provider->dim(), &attempted, config.get_int("run.workers", 1));
        store.save(output_path);
        out << "stored " << store.size() << " / attempted " << attempted << "\n";
        return kExitOk;
    } catch (const OverlapError& e) {
        out << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BackendError& e) {
        out << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_transfer(const Config& config, const std::string& memory_path,
                 const EvalOptions& options, std::ostream& out, Report* report_out) {
    try {
        MemoryStore store = MemoryStore::load(memory_path);
        EvalOptions forwarded = options;
        forwarded.memory_path = memory_path;
        return run_eval(config, forwarded, out, report_out, provenance_block(store));
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CorruptRecord& e) {
        out << "memory error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaVersionUnsupported& e) {
        out << "memory error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BackendError& e) {
        out << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_inspect(const std::string& memory_path, const InspectOptions& options,
                std::ostream& out) {
    try {
        const MemoryStore store = MemoryStore::load(memory_path);
        if (store.size() == 0) {
            out << "no logs\n";
            return kExitOk;
        }
        CachedProvider provider(std::make_shared<HashingProvider>(
            store.embedding_dim(), static_cast<std::uint64_t>(options.provider_seed)));

        QueryState query;
        query.task_text = options.query_text;
        if (!options.plan.empty()) {
            query.overall_plan = options.plan;
        }
        if (!options.key_line.empty()) {
            query.key = parse_key_line(options.key_line);
        }

        const std::vector<InspectRow> rows =
            inspect_memory(store, query, options.top_k, options.weights, provider);
        char line[256];
        out << "log_id                         task_sim  plan_sim   key_sim  anchor     "
               "total\n";
        for (const InspectRow& row : rows) {
            std::snprintf(line, sizeof(line), "%-30s %9.6f %9.6f %9.6f %7d %9.6f\n",
                          row.log_id.c_str(), row.breakdown.task_sim, row.breakdown.plan_sim,
                          row.breakdown.key_sim, row.breakdown.anchor_index,
                          row.breakdown.total);
            out << line;
        }
        return kExitOk;
    } catch (const UnparseableKey& e) {
        out << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CorruptRecord& e) {
        out << "memory error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaVersionUnsupported& e) {
        out << "memory error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_list_fixtures(const std::string& fixtures_path, std::ostream& out) {
    try {
        if (fixtures_are_corridor(fixtures_path)) {
            const auto fixtures = load_corridor_fixtures(fixtures_path);
            out << "kind      id              positions  start  goal  description\n";
            for (const CorridorFixture& f : fixtures) {
                char line[512];
                std::snprintf(line, sizeof(line), "corridor  %-14s %10zu %6d %5d  %s\n",
                              f.task.id.c_str(), f.position_vectors.size(), f.start, f.goal,
                              f.task.description.c_str());
                out << line;
            }
            out << fixtures.size() << " fixtures ok\n";
        } else {
            const auto fixtures = load_house_fixtures(fixtures_path);
            out << "kind   id              task_type  goal   description\n";
            for (const HouseFixture& f : fixtures) {
                char line[512];
                std::snprintf(line, sizeof(line), "house  %-14s %-10s %-6s %s\n",
                              f.task.id.c_str(), f.task.task_type.c_str(),
                              to_string(f.world.goal.kind).c_str(),
                              f.task.description.c_str());
                out << line;
            }
            out << fixtures.size() << " fixtures ok\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        out << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace epilog
