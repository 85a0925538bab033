#include "epilog/retrieval.hpp"

#include <algorithm>
#include <cctype>

namespace epilog {

namespace {

bool is_blank(const std::string& text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

// Log-side texts may be degenerate (all punctuation, empty plan). They
// score 0 instead of aborting the episode.
Embedding embed_or_zero(const EmbeddingProvider& provider, const std::string& text) {
    if (text.empty() || is_blank(text)) {
        return Embedding::zeros(provider.dim());
    }
    return provider.embed(text);
}

Embedding key_embedding(const RetrievalKey& key, const EmbeddingProvider& provider) {
    if (key.kind == KeyKind::visual) {
        return key.vector;
    }
    return embed_or_zero(provider, key.text);
}

// The element a key is compared against, with its modality. Text
// observations go through the provider; vector observations are already
// embeddings.
Embedding observation_embedding(const Observation& obs, const EmbeddingProvider& provider) {
    if (obs.kind == ObservationKind::vector) {
        return Embedding{obs.vector};
    }
    return embed_or_zero(provider, obs.text);
}

void check_modality(const RetrievalKey& key, const Observation& obs,
                    const EmbeddingProvider& provider) {
    const bool key_is_vector = key.kind == KeyKind::visual;
    const bool obs_is_vector = obs.kind == ObservationKind::vector;
    if (key_is_vector != obs_is_vector && !provider.cross_modal()) {
        throw ModalityMismatch(std::string("cannot compare a ") +
                               (key_is_vector ? "visual" : "text") + " key against a " +
                               (obs_is_vector ? "vector" : "text") +
                               " observation without a cross-modal provider");
    }
}

}  // namespace

KeyMatch key_similarity(const RetrievalKey& key, const EpisodeLog& log,
                        const EmbeddingProvider& provider) {
    const Embedding query = key_embedding(key, provider);
    KeyMatch best{0.0, 0};
    bool first = true;
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
        const Step& step = log.steps[i];
        Embedding element;
        if (key.kind == KeyKind::action_match) {
            element = embed_or_zero(provider, step.action);
        } else {
            check_modality(key, step.observation, provider);
            element = observation_embedding(step.observation, provider);
        }
        const double sim = cosine(query, element);
        if (first || sim > best.score) {
            best = KeyMatch{sim, static_cast<int>(i)};
            first = false;
        }
    }
    return best;
}

ScoreBreakdown score_breakdown(const QueryState& query, const EpisodeLog& log,
                               const ScoreWeights& weights,
                               const EmbeddingProvider& provider) {
    if (query.task_text.empty() || is_blank(query.task_text)) {
        throw EmptyInput("query task_text must be non-empty");
    }

    ScoreBreakdown out;
    out.task_sim = cosine(provider.embed(query.task_text),
                          embed_or_zero(provider, log.task.description));

    out.has_plan = query.overall_plan.has_value() && !is_blank(*query.overall_plan) &&
                   !query.overall_plan->empty();
    if (out.has_plan) {
        out.plan_sim = cosine(provider.embed(*query.overall_plan),
                              embed_or_zero(provider, log.overall_plan));
    }

    out.has_key = query.key.has_value();
    if (out.has_key && query.key->kind != KeyKind::visual &&
        (query.key->text.empty() || is_blank(query.key->text))) {
        out.has_key = false;  // degenerate key: fall back to keyless scoring
    }
    if (out.has_key) {
        const KeyMatch match = key_similarity(*query.key, log, provider);
        out.key_sim = match.score;
        out.anchor_index = match.anchor_index;
    }

    // Weights renormalize over the components the query carries. A query
    // whose present components all weigh zero scores every log at 0 and
    // leaves ranking to the tie-break.
    double weight_sum = weights.task;
    if (out.has_plan) {
        weight_sum += weights.plan;
    }
    if (out.has_key) {
        weight_sum += weights.key;
    }
    double total = 0.0;
    if (weight_sum > 0.0) {
        out.task_weight = weights.task / weight_sum;
        total += out.task_weight * out.task_sim;
        if (out.has_plan) {
            out.plan_weight = weights.plan / weight_sum;
            total += out.plan_weight * out.plan_sim;
        }
        if (out.has_key) {
            out.key_weight = weights.key / weight_sum;
            total += out.key_weight * out.key_sim;
        }
    }
    out.total = total;
    return out;
}

double score_log(const QueryState& query, const EpisodeLog& log, const ScoreWeights& weights,
                 const EmbeddingProvider& provider) {
    return score_breakdown(query, log, weights, provider).total;
}

std::vector<Step> extract_window(const EpisodeLog& log, int anchor_index,
                                 const WindowPolicy& policy) {
    const int length = static_cast<int>(log.steps.size());
    if (anchor_index < -1 || anchor_index >= length) {
        throw IndexOutOfRange("anchor " + std::to_string(anchor_index) + " outside [-1, " +
                              std::to_string(length) + ")");
    }
    int begin = 0;
    int end = 0;  // inclusive
    if (anchor_index < 0) {
        // Keyless retrieval: no anchor to center on, take the head.
        begin = 0;
        end = std::min(length - 1, policy.steps_before + policy.steps_after);
    } else {
        begin = std::max(0, anchor_index - policy.steps_before);
        end = std::min(length - 1, anchor_index + policy.steps_after);
    }
    return std::vector<Step>(log.steps.begin() + begin, log.steps.begin() + end + 1);
}

std::vector<RetrievedExperience> retrieve(const QueryState& query, const Snapshot& memory,
                                          const ScoreWeights& weights,
                                          const WindowPolicy& policy,
                                          const EmbeddingProvider& provider) {
    struct Scored {
        double score;
        int anchor;
        std::size_t index;  // insertion order
        const EpisodeLog* log;
    };

    std::vector<Scored> scored;
    if (memory) {
        scored.reserve(memory->size());
        for (std::size_t i = 0; i < memory->size(); ++i) {
            const EpisodeLog& log = *(*memory)[i];
            if (query.filter && !query.filter->matches(log)) {
                continue;
            }
            const ScoreBreakdown breakdown = score_breakdown(query, log, weights, provider);
            scored.push_back(Scored{breakdown.total, breakdown.anchor_index, i, &log});
        }
    }

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.index != b.index) {
            return a.index > b.index;  // fresher experience first
        }
        return a.log->log_id < b.log->log_id;
    });

    const std::size_t k = std::min<std::size_t>(scored.size(),
                                                static_cast<std::size_t>(
                                                    std::max(1, policy.num_experiences)));
    std::vector<RetrievedExperience> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const Scored& s = scored[i];
        RetrievedExperience exp;
        exp.log_id = s.log->log_id;
        exp.score = s.score;
        exp.anchor_index = s.anchor;
        exp.window = extract_window(*s.log, s.anchor, policy);
        exp.source_task_text = s.log->task.description;
        exp.overall_plan = s.log->overall_plan;
        out.push_back(std::move(exp));
    }
    return out;
}

}  // namespace epilog
