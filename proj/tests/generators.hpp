#pragma once

// Deterministic random-instance generators shared by the property tests
// and the acceptance suite.

#include <random>
#include <string>
#include <vector>

#include "epilog/memory.hpp"
#include "epilog/retrieval.hpp"

namespace gen {

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words = {
        "find",  "take",   "put",    "go",     "open",  "clean",  "heat",   "cool",
        "use",   "search", "mug",    "watch",  "egg",   "bread",  "tomato", "cloth",
        "lamp",  "shelf",  "drawer", "desk",   "safe",  "fridge", "sink",   "table",
        "first", "next",   "need",   "the",    "a",     "to",     "with",   "on",
        "in",    "room",   "look",   "around", "stove", "plate",  "knife",  "bowl"};
    return words;
}

inline std::string random_text(std::mt19937& rng, int min_words = 1, int max_words = 8) {
    std::uniform_int_distribution<int> n_words(min_words, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary().size() - 1);
    const int n = n_words(rng);
    std::string text;
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            text += ' ';
        }
        text += vocabulary()[pick(rng)];
    }
    return text;
}

// A log with text observations (and optionally vector observations when
// `vector_dim` > 0 and the coin says so).
inline epilog::EpisodeLog random_log(std::mt19937& rng, int index, int max_steps = 50,
                                     int vector_dim = 0) {
    std::uniform_int_distribution<int> n_steps(1, max_steps);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::bernoulli_distribution use_vectors(0.3);

    epilog::EpisodeLog log;
    log.log_id = "log-" + std::to_string(index);
    log.task.id = "task-" + std::to_string(index);
    log.task.description = random_text(rng, 2, 6);
    static const char* kTypes[] = {"pick", "clean", "heat", "cool", "look", "pick2"};
    log.task.task_type = kTypes[std::uniform_int_distribution<int>(0, 5)(rng)];
    log.overall_plan = random_text(rng, 0, 8);  // occasionally empty
    const bool vectors = vector_dim > 0 && use_vectors(rng);
    const int steps = n_steps(rng);
    for (int s = 0; s < steps; ++s) {
        epilog::Step step;
        step.action = random_text(rng, 1, 5);
        if (vectors) {
            std::vector<double> v(static_cast<std::size_t>(vector_dim));
            for (double& x : v) {
                x = unit(rng);
            }
            step.observation = epilog::Observation::from_vector(std::move(v));
        } else {
            step.observation = epilog::Observation::from_text(random_text(rng, 1, 7));
        }
        log.steps.push_back(std::move(step));
    }
    log.reward = 1.0;
    log.success = true;
    log.provenance.backend_id = "gen";
    log.provenance.trial_index = 1;
    log.provenance.created_at = "2000-01-01T00:00:00Z";
    return log;
}

struct RandomInstance {
    std::vector<epilog::EpisodeLog> logs;
    epilog::QueryState query;
    epilog::ScoreWeights weights;
    epilog::WindowPolicy policy;
    bool all_vector_observations = false;
};

// A full retrieval instance: store contents, query, weights and window
// policy. Vector observations only appear together with visual keys (and
// vice versa) so modality stays compatible.
inline RandomInstance random_instance(std::mt19937& rng, int max_logs = 200,
                                      int max_steps = 50, int dim = 32) {
    RandomInstance inst;
    std::uniform_int_distribution<int> n_logs(0, max_logs);
    std::uniform_real_distribution<double> weight(0.0, 2.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> key_kind(0, 3);
    std::bernoulli_distribution coin(0.5);

    const int kind = key_kind(rng);  // 0 none, 1 search, 2 action, 3 visual
    inst.all_vector_observations = kind == 3;

    const int count = n_logs(rng);
    for (int i = 0; i < count; ++i) {
        epilog::EpisodeLog log = random_log(rng, i, max_steps, 0);
        if (inst.all_vector_observations) {
            for (epilog::Step& step : log.steps) {
                std::vector<double> v(static_cast<std::size_t>(dim));
                for (double& x : v) {
                    x = unit(rng);
                }
                step.observation = epilog::Observation::from_vector(std::move(v));
            }
        }
        inst.logs.push_back(std::move(log));
    }

    inst.query.task_text = random_text(rng, 2, 6);
    if (coin(rng)) {
        inst.query.overall_plan = random_text(rng, 1, 8);
    }
    if (kind == 1) {
        inst.query.key = epilog::RetrievalKey::search(random_text(rng, 1, 3));
    } else if (kind == 2) {
        inst.query.key = epilog::RetrievalKey::action(random_text(rng, 1, 3));
    } else if (kind == 3) {
        epilog::Embedding v = epilog::Embedding::zeros(dim);
        for (double& x : v.values) {
            x = unit(rng);
        }
        inst.query.key = epilog::RetrievalKey::visual(std::move(v));
    }
    if (coin(rng) && coin(rng)) {
        epilog::LogFilter filter;
        static const char* kTypes[] = {"pick", "clean", "heat", "cool", "look", "pick2"};
        filter.task_type = kTypes[std::uniform_int_distribution<int>(0, 5)(rng)];
        inst.query.filter = filter;
    }

    inst.weights.task = weight(rng);
    inst.weights.plan = weight(rng);
    inst.weights.key = weight(rng);
    if (inst.weights.task + inst.weights.plan + inst.weights.key == 0.0) {
        inst.weights.task = 1.0;
    }

    inst.policy.num_experiences = std::uniform_int_distribution<int>(1, 8)(rng);
    inst.policy.steps_before = std::uniform_int_distribution<int>(0, 12)(rng);
    inst.policy.steps_after = std::uniform_int_distribution<int>(0, 12)(rng);
    return inst;
}

}  // namespace gen
