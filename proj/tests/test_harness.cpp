#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "epilog/harness.hpp"
#include "generators.hpp"

using namespace epilog;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Config demo_config() {
    Config config = Config::from_file("fixtures/configs/demo.cfg");
    return config;
}

}  // namespace

TEST_CASE("ini parsing, sections and comments") {
    const Config config = Config::from_string(
        "# comment\n[run]\nmax_steps = 9\nd_max=2\n[weights]\ntask = 0.7\n; another\n");
    CHECK(config.get_int("run.max_steps", 0) == 9);
    CHECK(config.get_int("run.d_max", 0) == 2);
    CHECK(config.get_double("weights.task", 0) == doctest::Approx(0.7));
    CHECK(config.get("run.missing") == std::nullopt);
}

TEST_CASE("malformed config lines raise ConfigError") {
    CHECK_THROWS_AS(Config::from_string("[run\nmax_steps = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("[run]\njust a dangling line\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("[run]\n= 3\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_file("no/such/file.cfg"), ConfigError);
}

TEST_CASE("layering: file, then environment, then explicit sets") {
    setenv("EPILOG_RUN_MAX_STEPS", "33", 1);
    Config config = Config::from_string("[run]\nmax_steps = 9\nd_max = 2\n");
    config.apply_environment();
    CHECK(config.get_int("run.max_steps", 0) == 33);
    config.set("run.max_steps", "44");
    CHECK(config.get_int("run.max_steps", 0) == 44);
    CHECK(config.get_int("run.d_max", 0) == 2);
    unsetenv("EPILOG_RUN_MAX_STEPS");
}

TEST_CASE("resolved defaults match the shipped profiles") {
    const RunConfig run = resolve_run_config(Config{});
    CHECK(run.max_steps == 50);
    CHECK(run.d_max == 3);
    CHECK(run.weights.task == doctest::Approx(0.5));
    CHECK(run.weights.plan == doctest::Approx(0.25));
    CHECK(run.weights.key == doctest::Approx(0.25));
    CHECK(run.window_action.num_experiences == 4);
    CHECK(run.window_action.steps_before == 10);
    CHECK(run.window_action.steps_after == 10);
    CHECK(run.window_observation.num_experiences == 8);
    CHECK(run.window_observation.steps_before == 5);
    CHECK(run.window_observation.steps_after == 5);
    CHECK_FALSE(run.intra_task);
}

TEST_CASE("bad run values raise ConfigError") {
    CHECK_THROWS_AS(resolve_run_config(Config::from_string("[run]\nmax_steps = 0\n")),
                    ConfigError);
    CHECK_THROWS_AS(resolve_run_config(Config::from_string("[run]\nmax_steps = soon\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        resolve_run_config(Config::from_string("[weights]\ntask = -1\nplan = 0\nkey = 0\n")),
        ConfigError);
}

TEST_CASE("inspect breakdown sums match the totals") {
    MemoryStore store(32);
    std::mt19937 rng(31);
    for (int i = 0; i < 30; ++i) {
        store.insert(gen::random_log(rng, i, 12, 0));
    }
    CachedProvider provider(std::make_shared<HashingProvider>(32, 0));

    for (int round = 0; round < 100; ++round) {
        QueryState query;
        query.task_text = gen::random_text(rng, 2, 5);
        if (round % 2 == 0) {
            query.overall_plan = gen::random_text(rng, 2, 6);
        }
        if (round % 3 == 0) {
            query.key = RetrievalKey::action(gen::random_text(rng, 1, 2));
        }
        const auto rows = inspect_memory(store, query, 5, ScoreWeights{}, provider);
        REQUIRE(!rows.empty());
        for (const InspectRow& row : rows) {
            const ScoreBreakdown& b = row.breakdown;
            const double reconstructed = b.task_weight * b.task_sim +
                                         b.plan_weight * b.plan_sim +
                                         b.key_weight * b.key_sim;
            CHECK(std::abs(reconstructed - b.total) < 1e-9);
            const double weight_total = b.task_weight + b.plan_weight + b.key_weight;
            CHECK(std::abs(weight_total - 1.0) < 1e-9);
        }
        // Row order agrees with retrieve() on the same query.
        const auto retrieved = retrieve(query, store.snapshot(), ScoreWeights{},
                                        WindowPolicy{5, 2, 2}, provider);
        REQUIRE(retrieved.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(rows[i].log_id == retrieved[i].log_id);
        }
    }
}

TEST_CASE("eval writes agreeing report artifacts") {
    const fs::path out = fresh_dir("epilog_eval_out");
    EvalOptions options;
    options.out_dir = out.string();
    std::ostringstream sink;
    Report report;
    const int code = cmd_eval(demo_config(), options, sink, &report);
    CHECK(code == kExitOk);
    REQUIRE(fs::exists(out / "report.json"));
    REQUIRE(fs::exists(out / "report.txt"));
    REQUIRE(fs::exists(out / "trials.csv"));

    REQUIRE(report.per_trial.size() == 3);
    CHECK(report.per_trial[2].success_rate >= report.per_trial[0].success_rate);

    // The three renderings agree on every number at printed precision.
    std::ifstream jf(out / "report.json");
    const json parsed = json::parse(jf);
    std::ifstream cf(out / "trials.csv");
    std::string line;
    std::getline(cf, line);
    CHECK(line == "trial,success_rate,mean_reward");
    for (std::size_t i = 0; i < report.per_trial.size(); ++i) {
        REQUIRE(std::getline(cf, line));
        char expected[64];
        std::snprintf(expected, sizeof(expected), "%d,%.4f,%.4f",
                      report.per_trial[i].trial,
                      parsed["per_trial"][i]["success_rate"].get<double>(),
                      parsed["per_trial"][i]["mean_reward"].get<double>());
        CHECK(line == expected);
    }
    std::ifstream tf(out / "report.txt");
    std::stringstream table;
    table << tf.rdbuf();
    CHECK(table.str() == render_table(report));

    // The echo reproduces resolved values, so a run can be re-created.
    CHECK(report.config_echo["run"]["max_steps"].get<int>() == 12);
    CHECK(report.config_echo["weights"]["task"].get<double>() == doctest::Approx(0.5));
    CHECK(report.config_echo["windows"]["action_experiences"].get<int>() == 4);
}

TEST_CASE("eval exit codes for config problems") {
    std::ostringstream sink;
    Config missing = demo_config();
    missing.set("env.fixtures", "no/such/fixtures.json");
    CHECK(cmd_eval(missing, EvalOptions{fresh_dir("epilog_badfix").string()}, sink) ==
          kExitConfig);

    Config one_trial = demo_config();
    one_trial.set("run.d_max", "1");
    Report report;
    CHECK(cmd_eval(one_trial, EvalOptions{fresh_dir("epilog_one").string()}, sink,
                   &report) == kExitOk);
    CHECK(report.per_trial.size() == 1);
}

TEST_CASE("build-memory stores the solvable subset") {
    const fs::path out = fresh_dir("epilog_buildmem");
    const fs::path store_path = out / "memory.jsonl";
    std::ostringstream sink;
    const int code =
        cmd_build_memory(Config::from_file("fixtures/configs/transfer_build.cfg"),
                         store_path.string(), sink);
    CHECK(code == kExitOk);
    CHECK(sink.str() == "stored 2 / attempted 2\n");
    const MemoryStore store = MemoryStore::load(store_path.string());
    CHECK(store.size() == 2);
}

TEST_CASE("build-memory with an unsolvable suite writes a valid empty store") {
    const fs::path out = fresh_dir("epilog_buildmem_zero");
    // Backend B has no rules for the training tasks, so nothing is solved.
    Config config = Config::from_file("fixtures/configs/transfer_build.cfg");
    config.set("backend.script", "fixtures/scripts/transfer_b.rules");
    std::ostringstream sink;
    const int code = cmd_build_memory(config, (out / "empty.jsonl").string(), sink);
    CHECK(code == kExitOk);
    CHECK(sink.str() == "stored 0 / attempted 2\n");
    const MemoryStore store = MemoryStore::load((out / "empty.jsonl").string());
    CHECK(store.size() == 0);
    CHECK(store.embedding_dim() == 64);
}

TEST_CASE("build-memory propagates unwritable outputs as exit 4") {
    std::ostringstream sink;
    const int code = cmd_build_memory(Config::from_file("fixtures/configs/transfer_build.cfg"),
                                      "/no-such-dir/never/memory.jsonl", sink);
    CHECK(code == kExitIo);
}

TEST_CASE("transfer outperforms the empty-memory baseline and echoes provenance") {
    const fs::path out = fresh_dir("epilog_transfer");
    std::ostringstream sink;
    const fs::path store_path = out / "memory.jsonl";
    REQUIRE(cmd_build_memory(Config::from_file("fixtures/configs/transfer_build.cfg"),
                             store_path.string(), sink) == kExitOk);

    const Config eval_config = Config::from_file("fixtures/configs/transfer_eval.cfg");
    Report with_memory;
    EvalOptions options;
    options.out_dir = (out / "with").string();
    REQUIRE(cmd_transfer(eval_config, store_path.string(), options, sink, &with_memory) ==
            kExitOk);

    Report baseline;
    EvalOptions baseline_options;
    baseline_options.out_dir = (out / "without").string();
    REQUIRE(cmd_eval(eval_config, baseline_options, sink, &baseline) == kExitOk);

    CHECK(with_memory.per_trial.back().success_rate >
          baseline.per_trial.back().success_rate);
    CHECK(with_memory.memory_provenance["built_by"].contains("scripted-a"));
    CHECK(with_memory.memory_provenance["logs"].get<int>() == 2);
}

TEST_CASE("transfer with a corrupt memory file exits 2") {
    const fs::path out = fresh_dir("epilog_transfer_bad");
    const fs::path bad = out / "bad.jsonl";
    {
        std::ofstream f(bad);
        f << R"({"schema_version":1,"embedding_dim":64})" << "\n";
        f << "{ mangled\n";
    }
    std::ostringstream sink;
    const int code = cmd_transfer(Config::from_file("fixtures/configs/transfer_eval.cfg"),
                                  bad.string(), EvalOptions{(out / "o").string()}, sink);
    CHECK(code == kExitConfig);
    CHECK(sink.str().find("corrupt record at line 2") != std::string::npos);
}

TEST_CASE("inspect prints a breakdown whose columns sum to the total") {
    const fs::path out = fresh_dir("epilog_inspect");
    MemoryStore store(64);
    std::mt19937 rng(5);
    store.insert(gen::random_log(rng, 1, 8, 0));
    const fs::path path = out / "one.jsonl";
    store.save(path.string());

    InspectOptions options;
    options.query_text = "find the mug";
    options.key_line = "search: mug";
    options.top_k = 1;
    std::ostringstream sink;
    CHECK(cmd_inspect(path.string(), options, sink) == kExitOk);
    CHECK(sink.str().find("log-1") != std::string::npos);
    CHECK(sink.str().find("task_sim") != std::string::npos);
}

TEST_CASE("inspect on an empty store") {
    const fs::path out = fresh_dir("epilog_inspect_empty");
    MemoryStore store(64);
    const fs::path path = out / "empty.jsonl";
    store.save(path.string());
    InspectOptions options;
    options.query_text = "anything";
    std::ostringstream sink;
    CHECK(cmd_inspect(path.string(), options, sink) == kExitOk);
    CHECK(sink.str() == "no logs\n");
}

TEST_CASE("list-fixtures validates and enumerates") {
    std::ostringstream sink;
    CHECK(cmd_list_fixtures("fixtures/worlds/demo_suite.json", sink) == kExitOk);
    CHECK(sink.str().find("20 fixtures ok") != std::string::npos);
    CHECK(sink.str().find("mh-t01") != std::string::npos);

    std::ostringstream corridor_sink;
    CHECK(cmd_list_fixtures("fixtures/worlds/vector_corridor.json", corridor_sink) ==
          kExitOk);
    CHECK(corridor_sink.str().find("corridor") != std::string::npos);

    std::ostringstream bad_sink;
    CHECK(cmd_list_fixtures("no/such/file.json", bad_sink) == kExitConfig);
}

TEST_CASE("eval accepts an initial memory and grows from it") {
    const fs::path out = fresh_dir("epilog_eval_seeded");
    // Build the teacher memory once, then run only the dependents with it.
    MemoryStore teacher_store(64);
    {
        auto backend = std::make_shared<ScriptedBackend>(
            "scripted-demo", load_script("fixtures/scripts/demo.rules"), "look");
        CachedProvider provider(std::make_shared<HashingProvider>(64, 0));
        const auto fixtures = load_house_fixtures("fixtures/worlds/demo_suite.json");
        std::vector<TaskSpec> teachers;
        for (const auto& f : fixtures) {
            if (f.task.id[3] == 't') {
                teachers.push_back(f.task);
            }
        }
        RunConfig run;
        run.max_steps = 12;
        run.d_max = 1;
        run.budget.max_chars = 40000;
        run_trials(teachers, [&]() { return std::make_unique<MiniHouseEnv>(fixtures); },
                   run, teacher_store, *backend, provider);
    }
    const fs::path memory_path = out / "teachers.jsonl";
    teacher_store.save(memory_path.string());

    Config config = demo_config();
    config.set("run.d_max", "1");
    EvalOptions options;
    options.out_dir = (out / "seeded").string();
    options.memory_path = memory_path.string();
    options.save_memory_path = (out / "final.jsonl").string();
    Report report;
    std::ostringstream sink;
    REQUIRE(cmd_eval(config, options, sink, &report) == kExitOk);
    // Teachers plus first-generation dependents succeed in a single trial.
    CHECK(report.per_trial[0].success_rate == doctest::Approx(0.85));
    const MemoryStore final_store = MemoryStore::load((out / "final.jsonl").string());
    CHECK(final_store.size() == teacher_store.size() + 5);
}
