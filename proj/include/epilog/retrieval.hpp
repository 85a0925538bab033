#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epilog/embedding.hpp"
#include "epilog/memory.hpp"

namespace epilog {

// Non-negative component weights for task / plan / key similarity. They are
// renormalized at scoring time over the components actually present in the
// query, so only ratios matter.
struct ScoreWeights {
    double task = 0.5;
    double plan = 0.25;
    double key = 0.25;
};

enum class KeyKind { observation_search, action_match, visual };

// Typed retrieval key: what part of a logged trajectory the key similarity
// is computed against. Search keys match observations, action keys match
// actions, visual keys match vector observations directly.
struct RetrievalKey {
    KeyKind kind = KeyKind::observation_search;
    std::string text;   // observation_search / action_match
    Embedding vector;   // visual

    static RetrievalKey search(std::string payload) {
        return RetrievalKey{KeyKind::observation_search, std::move(payload), {}};
    }
    static RetrievalKey action(std::string payload) {
        return RetrievalKey{KeyKind::action_match, std::move(payload), {}};
    }
    static RetrievalKey visual(Embedding v) {
        return RetrievalKey{KeyKind::visual, {}, std::move(v)};
    }
};

// The current situation scored against every memory log.
struct QueryState {
    std::string task_text;  // non-empty
    std::optional<std::string> overall_plan;
    std::optional<RetrievalKey> key;
    std::optional<LogFilter> filter;
};

// How much of each retrieved trajectory reaches the prompt: top-k logs,
// then a window of steps around the anchor.
struct WindowPolicy {
    int num_experiences = 4;  // >= 1
    int steps_before = 10;
    int steps_after = 10;
};

// Profiles: action-keyed, observation-keyed, and the compact profile used
// for instruction-heavy shop-style tasks.
inline constexpr WindowPolicy kActionWindow{4, 10, 10};
inline constexpr WindowPolicy kObservationWindow{8, 5, 5};
inline constexpr WindowPolicy kCompactWindow{3, 5, 5};

// A scored log reference plus the step window handed to the executor.
// anchor_index is the step maximizing key similarity, -1 when the query had
// no key. source_task_text is the memory log's own task, kept for
// intra-task pairing in the prompt.
struct RetrievedExperience {
    std::string log_id;
    double score = 0.0;
    int anchor_index = -1;
    std::vector<Step> window;
    std::string source_task_text;
    std::string overall_plan;
};

struct KeyMatch {
    double score = 0.0;
    int anchor_index = 0;
};

// Max cosine between the key and the relevant trajectory sequence
// (observations for search/visual keys, actions for action keys); ties go
// to the earliest step. Throws ModalityMismatch when key and observation
// modalities are incompatible under `provider`.
KeyMatch key_similarity(const RetrievalKey& key, const EpisodeLog& log,
                        const EmbeddingProvider& provider);

// Component-wise scoring record; what `inspect-memory` prints. Effective
// weights are the renormalized ones actually applied (0 for components the
// query does not carry); total is their inner product with the sims.
struct ScoreBreakdown {
    double task_sim = 0.0;
    double plan_sim = 0.0;
    double key_sim = 0.0;
    bool has_plan = false;
    bool has_key = false;
    double task_weight = 0.0;
    double plan_weight = 0.0;
    double key_weight = 0.0;
    double total = 0.0;
    int anchor_index = -1;
};

ScoreBreakdown score_breakdown(const QueryState& query, const EpisodeLog& log,
                               const ScoreWeights& weights,
                               const EmbeddingProvider& provider);

// Weighted average of the component similarities over the components
// present in the query.
double score_log(const QueryState& query, const EpisodeLog& log,
                 const ScoreWeights& weights, const EmbeddingProvider& provider);

// Steps [anchor - before, anchor + after] clipped to the log. An anchor of
// -1 (keyless retrieval) returns the first before+after+1 steps. Throws
// IndexOutOfRange outside [-1, len).
std::vector<Step> extract_window(const EpisodeLog& log, int anchor_index,
                                 const WindowPolicy& policy);

// Scores every log surviving the query filter and returns the top
// policy.num_experiences by score; ties prefer later-inserted logs, then
// ascending log_id. Pure over the snapshot: safe to call concurrently.
std::vector<RetrievedExperience> retrieve(const QueryState& query,
                                          const Snapshot& memory,
                                          const ScoreWeights& weights,
                                          const WindowPolicy& policy,
                                          const EmbeddingProvider& provider);

}  // namespace epilog
