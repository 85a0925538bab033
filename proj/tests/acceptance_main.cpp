// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run from the repository root; optionally pass the CLI binary as argv[1]
// so the determinism criterion exercises the real executable.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "epilog/harness.hpp"
#include "epilog/runner.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace epilog;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;
int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << index << "  " << name;
    if (!detail.empty()) {
        std::cout << "  (" << detail << ")";
    }
    std::cout << "\n";
    if (!ok) {
        ++g_failures;
    }
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. retrieve() against the independently coded brute-force oracle.
void criterion_oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(424242);
    auto base = std::make_shared<HashingProvider>(32, 9);
    CachedProvider provider(base);

    int checked = 0;
    for (int round = 0; round < 1000; ++round) {
        const gen::RandomInstance inst = gen::random_instance(rng, 200, 50, 32);
        auto snapshot = std::make_shared<std::vector<LogPtr>>();
        for (const EpisodeLog& log : inst.logs) {
            snapshot->push_back(std::make_shared<const EpisodeLog>(log));
        }
        const auto got =
            retrieve(inst.query, snapshot, inst.weights, inst.policy, provider);
        const auto want = oracle::retrieve_ref(inst.query, inst.logs, inst.weights,
                                               inst.policy.num_experiences, provider);
        if (got.size() != want.size()) {
            report(1, "retriever-oracle-equivalence", false,
                   "size mismatch in round " + std::to_string(round));
            return;
        }
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (got[i].log_id != want[i].log_id || got[i].anchor_index != want[i].anchor ||
                std::abs(got[i].score - want[i].score) >= 1e-9) {
                report(1, "retriever-oracle-equivalence", false,
                       "mismatch in round " + std::to_string(round) + " rank " +
                           std::to_string(i));
                return;
            }
        }
        ++checked;
    }
    const double elapsed = seconds_since(start);
    report(1, "retriever-oracle-equivalence", elapsed < 60.0,
           std::to_string(checked) + " instances in " + std::to_string(elapsed) + "s");
}

// 2. Component breakdowns recombine to the total; renormalization exact.
void criterion_score_arithmetic() {
    std::mt19937 rng(777);
    MemoryStore store(32);
    for (int i = 0; i < 40; ++i) {
        store.insert(gen::random_log(rng, i, 16, 0));
    }
    CachedProvider provider(std::make_shared<HashingProvider>(32, 0));

    for (int round = 0; round < 100; ++round) {
        QueryState query;
        query.task_text = gen::random_text(rng, 2, 5);
        if (round % 2 == 0) {
            query.overall_plan = gen::random_text(rng, 2, 6);
        }
        if (round % 3 == 0) {
            query.key = round % 2 == 0 ? RetrievalKey::search(gen::random_text(rng, 1, 2))
                                       : RetrievalKey::action(gen::random_text(rng, 1, 2));
        }
        ScoreWeights weights;
        weights.task = 0.1 + (rng() % 100) / 50.0;
        weights.plan = (rng() % 100) / 50.0;
        weights.key = (rng() % 100) / 50.0;
        const auto rows = inspect_memory(store, query, 10, weights, provider);
        for (const InspectRow& row : rows) {
            const ScoreBreakdown& b = row.breakdown;
            const double sum = b.task_weight * b.task_sim + b.plan_weight * b.plan_sim +
                               b.key_weight * b.key_sim;
            if (std::abs(sum - b.total) >= 1e-9) {
                report(2, "score-breakdown-arithmetic", false,
                       "sum " + std::to_string(sum) + " vs " + std::to_string(b.total));
                return;
            }
        }
    }

    // Missing-component renormalization on prescribed similarities:
    // (0.5*0.8 + 0.25*0.4) / 0.75 when the key is absent.
    class Fixed final : public EmbeddingProvider {
    public:
        std::string provider_id() const override { return "fixed"; }
        int dim() const override { return 2; }
        Embedding embed(const std::string& text) const override {
            if (text == "qt") return Embedding{{1.0, 0.0}};
            if (text == "lt") return Embedding{{0.8, 0.6}};
            if (text == "qp") return Embedding{{1.0, 0.0}};
            return Embedding{{0.4, std::sqrt(1.0 - 0.16)}};
        }
    } fixed;
    EpisodeLog log;
    log.log_id = "renorm";
    log.task.description = "lt";
    log.overall_plan = "lp";
    Step step;
    step.action = "noop";
    step.observation = Observation::from_text("unused");
    log.steps.push_back(step);
    QueryState query;
    query.task_text = "qt";
    query.overall_plan = "qp";
    const double total = score_log(query, log, ScoreWeights{0.5, 0.25, 0.25}, fixed);
    const double expected = (0.5 * 0.8 + 0.25 * 0.4) / 0.75;
    const bool ok = std::abs(total - expected) < 1e-9;
    report(2, "score-breakdown-arithmetic", ok,
           ok ? "100 queries + renormalization" : "renormalization off");
}

// 3. Window containment, clipping and length bounds, exactly.
void criterion_window_law() {
    std::mt19937 rng(31337);
    for (int round = 0; round < 10000; ++round) {
        const int length = 1 + static_cast<int>(rng() % 50);
        EpisodeLog log;
        log.log_id = "w";
        log.task.description = "t";
        for (int i = 0; i < length; ++i) {
            Step step;
            step.action = std::to_string(i);
            step.observation = Observation::from_text("o");
            log.steps.push_back(std::move(step));
        }
        const WindowPolicy policy{1, static_cast<int>(rng() % 13),
                                  static_cast<int>(rng() % 13)};
        const int anchor = static_cast<int>(rng() % (length + 1)) - 1;
        const auto window = extract_window(log, anchor, policy);

        int begin = 0;
        int end = 0;
        if (anchor < 0) {
            begin = 0;
            end = std::min(length - 1, policy.steps_before + policy.steps_after);
        } else {
            begin = std::max(0, anchor - policy.steps_before);
            end = std::min(length - 1, anchor + policy.steps_after);
        }
        bool ok = static_cast<int>(window.size()) == end - begin + 1 &&
                  static_cast<int>(window.size()) <=
                      policy.steps_before + policy.steps_after + 1;
        for (int i = 0; ok && i <= end - begin; ++i) {
            ok = window[static_cast<std::size_t>(i)].action == std::to_string(begin + i);
        }
        if (anchor >= 0) {
            ok = ok && begin <= anchor && anchor <= end;
        }
        if (!ok) {
            report(3, "window-law", false,
                   "len " + std::to_string(length) + " anchor " + std::to_string(anchor));
            return;
        }
    }
    report(3, "window-law", true, "10000 cases");
}

// 4. The published key-line corpus parses; format/parse round-trips.
void criterion_key_corpus() {
    const std::vector<std::pair<std::string, std::pair<KeyKind, std::string>>> corpus = {
        {"> search: spraybottle", {KeyKind::observation_search, "spraybottle"}},
        {"> search: creditcard", {KeyKind::observation_search, "creditcard"}},
        {"> search: desklamp", {KeyKind::observation_search, "desklamp"}},
        {"> action: take", {KeyKind::action_match, "take"}},
        {"> action: take", {KeyKind::action_match, "take"}},
        {"> action: take", {KeyKind::action_match, "take"}},
        {"> action: put", {KeyKind::action_match, "put"}},
        {"> action: put", {KeyKind::action_match, "put"}},
        {"> action: heat", {KeyKind::action_match, "heat"}},
        {"> action: heat", {KeyKind::action_match, "heat"}},
        {"> action: cool", {KeyKind::action_match, "cool"}},
        {"> action: cool", {KeyKind::action_match, "cool"}},
        {"> action: use", {KeyKind::action_match, "use"}},
        {"> action: use", {KeyKind::action_match, "use"}},
    };
    for (const auto& [line, expected] : corpus) {
        try {
            const RetrievalKey key = parse_key_line(line);
            if (key.kind != expected.first || key.text != expected.second) {
                report(4, "key-parsing-corpus", false, "wrong parse for: " + line);
                return;
            }
        } catch (const Error& e) {
            report(4, "key-parsing-corpus", false, "threw on: " + line);
            return;
        }
    }

    std::mt19937 rng(4);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    for (int i = 0; i < 1000; ++i) {
        std::string payload;
        const int len = 1 + static_cast<int>(rng() % 10);
        for (int c = 0; c < len; ++c) {
            payload.push_back(alphabet[rng() % alphabet.size()]);
        }
        const RetrievalKey key = (i % 2 == 0) ? RetrievalKey::search(payload)
                                              : RetrievalKey::action(payload);
        const RetrievalKey round = parse_key_line(format_key(key));
        if (round.kind != key.kind || round.text != key.text) {
            report(4, "key-parsing-corpus", false, "round-trip broke for " + payload);
            return;
        }
    }
    report(4, "key-parsing-corpus", true, "14 corpus lines + 1000 round-trips");
}

int run_demo_eval(const fs::path& out_dir) {
    if (!g_cli_path.empty()) {
        const std::string cmd = g_cli_path + " -c fixtures/configs/demo.cfg eval -o " +
                                out_dir.string() + " > " + (out_dir / "stdout.txt").string();
        fs::create_directories(out_dir);
        return std::system(cmd.c_str());
    }
    std::ostringstream sink;
    EvalOptions options;
    options.out_dir = out_dir.string();
    return cmd_eval(Config::from_file("fixtures/configs/demo.cfg"), options, sink);
}

// 5. The demo run is byte-identical across two executions.
void criterion_determinism() {
    const fs::path a = fresh_dir("epilog_accept_det_a");
    const fs::path b = fresh_dir("epilog_accept_det_b");
    if (run_demo_eval(a) != 0 || run_demo_eval(b) != 0) {
        report(5, "end-to-end-determinism", false, "eval did not exit cleanly");
        return;
    }
    for (const char* name : {"report.json", "report.txt", "trials.csv"}) {
        if (slurp(a / name) != slurp(b / name) || slurp(a / name).empty()) {
            report(5, "end-to-end-determinism", false, std::string("differs: ") + name);
            return;
        }
    }
    report(5, "end-to-end-determinism", true,
           g_cli_path.empty() ? "in-process" : "via the CLI binary");
}

// 6. Trial curve on the shipped 20-task suite.
void criterion_trial_curve() {
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream sink;
    Report report_data;
    EvalOptions options;
    options.out_dir = fresh_dir("epilog_accept_curve").string();
    const int code =
        cmd_eval(Config::from_file("fixtures/configs/demo.cfg"), options, sink, &report_data);
    const double elapsed = seconds_since(start);
    if (code != kExitOk || report_data.per_trial.size() != 3) {
        report(6, "trial-curve-direction", false, "run failed");
        return;
    }
    const double trial1 = report_data.per_trial[0].success_rate;
    const double trial3 = report_data.per_trial[2].success_rate;
    const bool ok = trial1 <= 0.60 + 1e-12 && trial3 >= trial1 + 0.20 - 1e-12 &&
                    elapsed < 30.0;
    std::ostringstream detail;
    detail << "trial1 " << trial1 << ", trial3 " << trial3 << ", " << elapsed << "s";
    report(6, "trial-curve-direction", ok, detail.str());
}

// 7. Foreign-built memory strictly beats the empty-memory baseline.
void criterion_transfer() {
    const fs::path dir = fresh_dir("epilog_accept_transfer");
    std::ostringstream sink;
    const fs::path memory = dir / "memory.jsonl";
    if (cmd_build_memory(Config::from_file("fixtures/configs/transfer_build.cfg"),
                         memory.string(), sink) != kExitOk) {
        report(7, "transfer-direction", false, "memory build failed");
        return;
    }
    const Config eval_config = Config::from_file("fixtures/configs/transfer_eval.cfg");

    Report with_memory;
    EvalOptions with_options;
    with_options.out_dir = (dir / "with").string();
    Report baseline;
    EvalOptions base_options;
    base_options.out_dir = (dir / "without").string();
    if (cmd_transfer(eval_config, memory.string(), with_options, sink, &with_memory) !=
            kExitOk ||
        cmd_eval(eval_config, base_options, sink, &baseline) != kExitOk) {
        report(7, "transfer-direction", false, "eval failed");
        return;
    }
    const double with_rate = with_memory.per_trial.back().success_rate;
    const double without_rate = baseline.per_trial.back().success_rate;

    // Determinism of the transfer path: run it again.
    Report again;
    EvalOptions again_options;
    again_options.out_dir = (dir / "with2").string();
    cmd_transfer(eval_config, memory.string(), again_options, sink, &again);
    const bool deterministic =
        slurp(dir / "with" / "report.json") == slurp(dir / "with2" / "report.json");

    std::ostringstream detail;
    detail << "with " << with_rate << " vs empty " << without_rate;
    report(7, "transfer-direction", with_rate > without_rate && deterministic, detail.str());
}

// 8. Empty memory degenerates to a no-experience baseline run.
void criterion_empty_memory() {
    std::ostringstream sink;
    Report report_data;
    Config config = Config::from_file("fixtures/configs/demo.cfg");
    config.set("run.d_max", "1");
    EvalOptions options;
    options.out_dir = fresh_dir("epilog_accept_empty").string();
    if (cmd_eval(config, options, sink, &report_data) != kExitOk) {
        report(8, "empty-memory-degeneracy", false, "run failed");
        return;
    }
    if (report_data.episodes.size() != 20) {
        report(8, "empty-memory-degeneracy", false, "episodes missing");
        return;
    }
    for (const EpisodeResult& episode : report_data.episodes) {
        for (const RetrievalEvent& event : episode.retrieval_trace) {
            if (!event.log_ids.empty()) {
                report(8, "empty-memory-degeneracy", false,
                       "retrieval returned logs for " + episode.task_id);
                return;
            }
        }
    }
    report(8, "empty-memory-degeneracy", true, "all traces empty across 20 episodes");
}

// 9. Persistence: retrieval is identical across a save/load cycle.
void criterion_persistence() {
    std::mt19937 rng(909);
    CachedProvider provider(std::make_shared<HashingProvider>(16, 2));
    const fs::path dir = fresh_dir("epilog_accept_persist");

    for (int round = 0; round < 100; ++round) {
        const int n = 1 + static_cast<int>(rng() % 20);
        MemoryStore store(16);
        for (int i = 0; i < n; ++i) {
            store.insert(gen::random_log(rng, round * 100 + i, 12, 16));
        }
        const fs::path path = dir / ("store_" + std::to_string(round) + ".jsonl");
        store.save(path.string());
        const MemoryStore loaded = MemoryStore::load(path.string());

        QueryState query;
        query.task_text = gen::random_text(rng, 2, 5);
        query.overall_plan = gen::random_text(rng, 2, 5);
        query.key = RetrievalKey::action(gen::random_text(rng, 1, 2));
        const auto before = retrieve(query, store.snapshot(), ScoreWeights{},
                                     WindowPolicy{5, 3, 3}, provider);
        const auto after = retrieve(query, loaded.snapshot(), ScoreWeights{},
                                    WindowPolicy{5, 3, 3}, provider);
        if (before.size() != after.size()) {
            report(9, "persistence-round-trip", false, "result sizes differ");
            return;
        }
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (before[i].log_id != after[i].log_id || before[i].score != after[i].score ||
                before[i].anchor_index != after[i].anchor_index) {
                report(9, "persistence-round-trip", false,
                       "round " + std::to_string(round) + " rank " + std::to_string(i));
                return;
            }
        }
    }

    // Error surfacing.
    const fs::path bad_version = dir / "version.jsonl";
    {
        std::ofstream out(bad_version);
        out << R"({"schema_version":999,"embedding_dim":16})" << "\n";
    }
    bool version_ok = false;
    try {
        MemoryStore::load(bad_version.string());
    } catch (const SchemaVersionUnsupported&) {
        version_ok = true;
    }
    const fs::path corrupt = dir / "corrupt.jsonl";
    {
        std::ofstream out(corrupt);
        out << R"({"schema_version":1,"embedding_dim":16})" << "\n";
        out << "{ nope\n";
    }
    bool corrupt_ok = false;
    try {
        MemoryStore::load(corrupt.string());
    } catch (const CorruptRecord& e) {
        corrupt_ok = e.line() == 2;
    }
    report(9, "persistence-round-trip", version_ok && corrupt_ok,
           "100 stores + error surfacing");
}

// 10. Fuzzed environments and degraded backends never kill the loop.
void criterion_robustness() {
    const auto fixtures = load_house_fixtures("fixtures/worlds/demo_suite.json");
    MiniHouseEnv env(fixtures);
    env.reset(fixtures[0].task);
    std::mt19937 rng(606);
    for (int i = 0; i < 10000; ++i) {
        std::string action;
        const int len = static_cast<int>(rng() % 48);
        for (int c = 0; c < len; ++c) {
            action.push_back(static_cast<char>(rng() % 256));
        }
        try {
            env.step(action);
        } catch (...) {
            report(10, "robustness", false, "env aborted on fuzz input " + std::to_string(i));
            return;
        }
    }

    // Degraded backend: key prompts answer nonsense (UnparseableKey) and
    // one task's executor prompt answers nothing (EmptyCompletion). The
    // trial loop must still visit every task.
    auto rules = load_script("fixtures/scripts/demo.rules");
    for (ScriptedRule& rule : rules) {
        if (rule.response == "> search: mug") {
            rule.response = "gibberish with no key";
        }
    }
    // Make the watch teacher return empty completions at the executor.
    rules.push_back(ScriptedRule{MatchKind::pattern,
                                 "Your task is to: put a watch on sidetable[\\s\\S]*make an "
                                 "action from the examples",
                                 "", 99});
    ScriptedBackend backend("degraded", rules, "look");
    CachedProvider provider(std::make_shared<HashingProvider>(64, 0));

    std::vector<TaskSpec> tasks;
    for (const auto& f : fixtures) {
        if (f.task.id == "mh-t01" || f.task.id == "mh-t02" || f.task.id == "mh-t03") {
            tasks.push_back(f.task);
        }
    }
    RunConfig config;
    config.max_steps = 12;
    config.d_max = 1;
    config.budget.max_chars = 40000;
    MemoryStore store(64);
    const TrialsResult result = run_trials(
        tasks, [&]() { return std::make_unique<MiniHouseEnv>(fixtures); }, config, store,
        backend, provider);
    if (result.episodes.size() != 3) {
        report(10, "robustness", false, "trial loop did not visit every task");
        return;
    }
    bool mug_ok = false;
    bool watch_failed_cleanly = false;
    bool cloth_ok = false;
    for (const EpisodeResult& episode : result.episodes) {
        if (episode.task_id == "mh-t01") {
            mug_ok = episode.success;  // survived the unparseable key
        }
        if (episode.task_id == "mh-t02") {
            watch_failed_cleanly = !episode.success &&
                                   episode.failure_reason.find("executor:") == 0;
        }
        if (episode.task_id == "mh-t03") {
            cloth_ok = episode.success;  // unaffected neighbor
        }
    }
    report(10, "robustness", mug_ok && watch_failed_cleanly && cloth_ok,
           "10000 fuzz actions; degraded key and completion paths");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        g_cli_path = argv[1];
    }
    criterion_oracle_equivalence();
    criterion_score_arithmetic();
    criterion_window_law();
    criterion_key_corpus();
    criterion_determinism();
    criterion_trial_curve();
    criterion_transfer();
    criterion_empty_memory();
    criterion_persistence();
    criterion_robustness();
    if (g_failures > 0) {
        std::cout << g_failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
