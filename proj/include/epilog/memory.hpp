#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "epilog/embedding.hpp"
#include "epilog/errors.hpp"

namespace epilog {

// Task identity and text. `task_type` is the category label used by the
// retriever's same-type filter ("pick", "clean", ...); metadata carries
// free-form tags such as a product category.
struct TaskSpec {
    std::string id;
    std::string description;
    std::string task_type;  // empty = untyped
    std::map<std::string, std::string> metadata;
};

enum class ObservationKind { text, vector };

// Either a textual world description or a precomputed embedding of a
// visual observation. Exactly one payload is populated.
struct Observation {
    ObservationKind kind = ObservationKind::text;
    std::string text;
    std::vector<double> vector;

    static Observation from_text(std::string t) {
        Observation o;
        o.kind = ObservationKind::text;
        o.text = std::move(t);
        return o;
    }
    static Observation from_vector(std::vector<double> v) {
        Observation o;
        o.kind = ObservationKind::vector;
        o.vector = std::move(v);
        return o;
    }
};

// One trajectory element. Think steps carry the action plan text and a
// synthetic "OK." observation; environment steps carry the raw action and
// whatever the environment returned.
struct Step {
    std::optional<std::string> action_plan;
    std::string action;  // non-empty
    Observation observation;
};

struct Provenance {
    std::string backend_id;  // model that produced this log
    int trial_index = 1;
    std::string created_at;  // ISO-8601 UTC
};

// Record of one successful task execution: the memory unit.
struct EpisodeLog {
    std::string log_id;
    TaskSpec task;
    std::string overall_plan;
    std::vector<Step> steps;
    double reward = 1.0;
    bool success = true;
    Provenance provenance;
};

// Metadata predicate for retrieval-time narrowing. An empty predicate
// matches everything.
struct LogFilter {
    std::optional<std::string> task_type;
    std::map<std::string, std::string> metadata_equals;

    bool matches(const EpisodeLog& log) const;
};

using LogPtr = std::shared_ptr<const EpisodeLog>;

// Immutable view of the store at one point in time; iteration order is
// insertion order.
using Snapshot = std::shared_ptr<const std::vector<LogPtr>>;

// Append-only store of successful episodes. Writers are serialized and
// publish a fresh snapshot; readers hold snapshots and never observe a
// partial insert.
class MemoryStore {
public:
    static constexpr int kSchemaVersion = 1;

    explicit MemoryStore(int embedding_dim = kDefaultEmbeddingDim);
    MemoryStore(const MemoryStore& other);
    MemoryStore& operator=(const MemoryStore& other);

    // Appends a log. Returns false (and stores nothing) when a log with the
    // same task description and action sequence is already present.
    // Throws RejectedLog for unsuccessful or empty logs, DimensionMismatch
    // when a vector observation does not match embedding_dim.
    bool insert(EpisodeLog log);

    Snapshot snapshot() const;

    // Logs matching the predicate, in insertion order.
    std::vector<LogPtr> filter(const LogFilter& predicate) const;

    std::size_t size() const;
    int embedding_dim() const { return embedding_dim_; }

    // Line-delimited JSON: a header record {schema_version, embedding_dim}
    // followed by one log per line.
    void save(const std::string& path) const;
    static MemoryStore load(const std::string& path);

private:
    int embedding_dim_;
    mutable std::mutex mutex_;
    Snapshot logs_;
    std::set<std::string> dedup_keys_;
    std::set<std::string> log_ids_;
};

// Identity under which repeated successes are deduplicated.
std::string duplicate_identity(const EpisodeLog& log);

std::string now_iso8601();

}  // namespace epilog
