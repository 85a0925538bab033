#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epilog/runner.hpp"

namespace epilog {

// Everything one evaluation run produced. Success rates are cumulative
// ("solved in any trial so far"), which makes the per-trial curve
// monotone.
struct Report {
    std::vector<TrialRow> per_trial;
    std::map<std::string, double> per_task_type;  // final cumulative rate per type
    std::vector<EpisodeResult> episodes;
    nlohmann::json config_echo;
    nlohmann::json memory_provenance;  // present on transfer runs
};

Report make_report(const TrialsResult& trials, const std::vector<TaskSpec>& tasks,
                   nlohmann::json config_echo);

nlohmann::json report_to_json(const Report& report);

// Aligned text tables: per-trial rates plus the per-task-type block.
std::string render_table(const Report& report);

// "trial,success_rate,mean_reward" rows.
std::string render_csv(const Report& report);

}  // namespace epilog
