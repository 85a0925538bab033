#include "epilog/report.hpp"

#include <cstdio>
#include <sstream>

namespace epilog {

using nlohmann::json;

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

json step_to_json(const Step& step) {
    json s;
    if (step.action_plan) {
        s["action_plan"] = *step.action_plan;
    }
    s["action"] = step.action;
    if (step.observation.kind == ObservationKind::text) {
        s["observation"] = step.observation.text;
    } else {
        s["observation"] = step.observation.vector;
    }
    return s;
}

json episode_to_json(const EpisodeResult& episode) {
    json trace = json::array();
    for (const RetrievalEvent& event : episode.retrieval_trace) {
        trace.push_back(json{{"iteration", event.iteration},
                             {"key", event.key},
                             {"log_ids", event.log_ids}});
    }
    json steps = json::array();
    for (const Step& step : episode.trajectory) {
        steps.push_back(step_to_json(step));
    }
    return json{{"task_id", episode.task_id},
                {"trial", episode.trial_index},
                {"success", episode.success},
                {"reward", episode.reward},
                {"steps_taken", episode.steps_taken},
                {"overall_plan", episode.overall_plan},
                {"failure_reason", episode.failure_reason},
                {"trajectory", std::move(steps)},
                {"retrieval_trace", std::move(trace)}};
}

}  // namespace

Report make_report(const TrialsResult& trials, const std::vector<TaskSpec>& tasks,
                   json config_echo) {
    Report report;
    report.per_trial = trials.per_trial;
    report.episodes = trials.episodes;
    report.config_echo = std::move(config_echo);

    // Final cumulative success per task type.
    std::map<std::string, int> type_total;
    std::map<std::string, int> type_solved;
    std::map<std::string, bool> solved_by_id;
    for (const EpisodeResult& episode : trials.episodes) {
        if (episode.success) {
            solved_by_id[episode.task_id] = true;
        }
    }
    for (const TaskSpec& task : tasks) {
        const std::string type = task.task_type.empty() ? "(untyped)" : task.task_type;
        type_total[type] += 1;
        if (solved_by_id.count(task.id) > 0) {
            type_solved[type] += 1;
        }
    }
    for (const auto& [type, total] : type_total) {
        report.per_task_type[type] =
            total > 0 ? static_cast<double>(type_solved[type]) / total : 0.0;
    }
    return report;
}

json report_to_json(const Report& report) {
    json per_trial = json::array();
    for (const TrialRow& row : report.per_trial) {
        per_trial.push_back(json{{"trial", row.trial},
                                 {"success_rate", row.success_rate},
                                 {"mean_reward", row.mean_reward}});
    }
    json episodes = json::array();
    for (const EpisodeResult& episode : report.episodes) {
        episodes.push_back(episode_to_json(episode));
    }
    json out{{"per_trial", std::move(per_trial)},
             {"per_task_type", report.per_task_type},
             {"episodes", std::move(episodes)},
             {"config_echo", report.config_echo}};
    if (!report.memory_provenance.is_null()) {
        out["memory_provenance"] = report.memory_provenance;
    }
    return out;
}

std::string render_table(const Report& report) {
    std::ostringstream out;
    out << "trial  success_rate  mean_reward\n";
    for (const TrialRow& row : report.per_trial) {
        char line[64];
        std::snprintf(line, sizeof(line), "%5d  %12s  %11s\n", row.trial,
                      fixed4(row.success_rate).c_str(), fixed4(row.mean_reward).c_str());
        out << line;
    }
    if (!report.per_task_type.empty()) {
        out << "\ntask_type  success_rate\n";
        std::size_t width = 9;
        for (const auto& [type, rate] : report.per_task_type) {
            width = std::max(width, type.size());
        }
        for (const auto& [type, rate] : report.per_task_type) {
            out << type << std::string(width - type.size(), ' ') << "  " << fixed4(rate)
                << "\n";
        }
    }
    return out.str();
}

std::string render_csv(const Report& report) {
    std::ostringstream out;
    out << "trial,success_rate,mean_reward\n";
    for (const TrialRow& row : report.per_trial) {
        out << row.trial << ',' << fixed4(row.success_rate) << ',' << fixed4(row.mean_reward)
            << "\n";
    }
    return out.str();
}

}  // namespace epilog
