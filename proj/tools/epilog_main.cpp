#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epilog/harness.hpp"

namespace {

// file < environment < --set flags, later wins.
epilog::Config layered_config(const std::string& config_path,
                              const std::vector<std::string>& sets) {
    epilog::Config config;
    if (!config_path.empty()) {
        config = epilog::Config::from_file(config_path);
    }
    config.apply_environment();
    for (const std::string& entry : sets) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw epilog::ConfigError("--set expects key=value, got '" + entry + "'");
        }
        config.set(entry.substr(0, eq), entry.substr(eq + 1));
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"episodic-memory agent runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    app.add_option("-c,--config", config_path, "config file (INI sections)");
    app.add_option("--set", sets, "override a config key, e.g. --set run.d_max=1");

    auto* eval = app.add_subcommand("eval", "run the configured evaluation");
    epilog::EvalOptions eval_options;
    eval->add_option("-o,--out", eval_options.out_dir, "report directory");
    eval->add_option("-m,--memory", eval_options.memory_path, "initial memory store");
    eval->add_option("--save-memory", eval_options.save_memory_path,
                     "write the final store here");

    auto* build = app.add_subcommand("build-memory", "build a store from training tasks");
    std::string build_output = "memory.jsonl";
    build->add_option("-o,--out", build_output, "store output path");

    auto* transfer = app.add_subcommand("transfer", "evaluate with a foreign-built memory");
    epilog::EvalOptions transfer_options;
    std::string transfer_memory;
    transfer->add_option("-m,--memory", transfer_memory, "memory store to consume")
        ->required();
    transfer->add_option("-o,--out", transfer_options.out_dir, "report directory");

    auto* inspect = app.add_subcommand("inspect-memory", "score a query against a store");
    epilog::InspectOptions inspect_options;
    std::string inspect_memory_path;
    inspect->add_option("-m,--memory", inspect_memory_path, "memory store")->required();
    inspect->add_option("-q,--query", inspect_options.query_text, "task text")->required();
    inspect->add_option("--plan", inspect_options.plan, "overall plan component");
    inspect->add_option("--key", inspect_options.key_line,
                        "retrieval key line, e.g. 'search: mug'");
    inspect->add_option("-k,--top", inspect_options.top_k, "rows to print");
    inspect->add_option("--w-task", inspect_options.weights.task, "task weight");
    inspect->add_option("--w-plan", inspect_options.weights.plan, "plan weight");
    inspect->add_option("--w-key", inspect_options.weights.key, "key weight");
    inspect->add_option("--provider-seed", inspect_options.provider_seed, "hashing seed");

    auto* list = app.add_subcommand("list-fixtures", "list and validate a fixture file");
    std::string fixtures_path;
    list->add_option("fixtures", fixtures_path, "fixture file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) {
            return epilog::cmd_eval(layered_config(config_path, sets), eval_options,
                                    std::cout);
        }
        if (build->parsed()) {
            return epilog::cmd_build_memory(layered_config(config_path, sets), build_output,
                                            std::cout);
        }
        if (transfer->parsed()) {
            return epilog::cmd_transfer(layered_config(config_path, sets), transfer_memory,
                                        transfer_options, std::cout);
        }
        if (inspect->parsed()) {
            return epilog::cmd_inspect(inspect_memory_path, inspect_options, std::cout);
        }
        if (list->parsed()) {
            return epilog::cmd_list_fixtures(fixtures_path, std::cout);
        }
    } catch (const epilog::ConfigError& e) {
        std::cout << "config error: " << e.what() << "\n";
        return epilog::kExitConfig;
    } catch (const epilog::Error& e) {
        std::cout << "error: " << e.what() << "\n";
        return epilog::kExitIo;
    }
    return epilog::kExitOk;
}
