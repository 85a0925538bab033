#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "epilog/config.hpp"
#include "epilog/report.hpp"
#include "epilog/runner.hpp"

namespace epilog {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitIo = 4;

// --- config resolution ---

RunConfig resolve_run_config(const Config& config);
std::shared_ptr<CompletionBackend> make_backend(const Config& config);
std::shared_ptr<const EmbeddingProvider> make_provider(const Config& config);

// Evaluation tasks plus an environment factory, from the [env] section.
struct EnvSetup {
    std::vector<TaskSpec> tasks;
    EnvFactory make_env;
};
EnvSetup load_env_setup(const Config& config, const std::string& fixtures_key = "env.fixtures");

// --- inspect ---

struct InspectRow {
    std::string log_id;
    std::string task_text;
    ScoreBreakdown breakdown;
};

// Top-k logs for a query with the exact component arithmetic used by
// retrieval; rows come back in retrieval order.
std::vector<InspectRow> inspect_memory(const MemoryStore& store, const QueryState& query,
                                       int k, const ScoreWeights& weights,
                                       const EmbeddingProvider& provider);

// --- subcommands ---

struct EvalOptions {
    std::string out_dir = "out";
    std::string memory_path;       // optional initial store
    std::string save_memory_path;  // optional final-store dump
};

// Runs the configured evaluation and writes report.json, report.txt and
// trials.csv under out_dir. Returns kExitOk even when tasks fail; nonzero
// only for config / backend / I/O problems.
int cmd_eval(const Config& config, const EvalOptions& options, std::ostream& out,
             Report* report_out = nullptr);

// Builds memory from the training fixtures and saves it. Prints
// "stored N / attempted M".
int cmd_build_memory(const Config& config, const std::string& output_path, std::ostream& out);

// Evaluates with a memory built elsewhere (possibly by a different
// backend); the report carries the memory's provenance block.
int cmd_transfer(const Config& config, const std::string& memory_path,
                 const EvalOptions& options, std::ostream& out, Report* report_out = nullptr);

struct InspectOptions {
    std::string query_text;
    std::string plan;      // optional plan component
    std::string key_line;  // optional "search: x" / "action: y"
    int top_k = 5;
    ScoreWeights weights{};
    int provider_seed = 0;
};

int cmd_inspect(const std::string& memory_path, const InspectOptions& options,
                std::ostream& out);

int cmd_list_fixtures(const std::string& fixtures_path, std::ostream& out);

}  // namespace epilog
