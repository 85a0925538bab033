#include "epilog/memory.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace epilog {

using nlohmann::json;

bool LogFilter::matches(const EpisodeLog& log) const {
    if (task_type && log.task.task_type != *task_type) {
        return false;
    }
    for (const auto& [key, value] : metadata_equals) {
        auto it = log.task.metadata.find(key);
        if (it == log.task.metadata.end() || it->second != value) {
            return false;
        }
    }
    return true;
}

std::string duplicate_identity(const EpisodeLog& log) {
    std::string key = log.task.description;
    for (const Step& step : log.steps) {
        key.push_back('\x1f');
        key += step.action;
    }
    return key;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

MemoryStore::MemoryStore(int embedding_dim)
    : embedding_dim_(embedding_dim),
      logs_(std::make_shared<const std::vector<LogPtr>>()) {}

MemoryStore::MemoryStore(const MemoryStore& other) : embedding_dim_(other.embedding_dim_) {
    std::lock_guard lock(other.mutex_);
    logs_ = other.logs_;
    dedup_keys_ = other.dedup_keys_;
    log_ids_ = other.log_ids_;
}

MemoryStore& MemoryStore::operator=(const MemoryStore& other) {
    if (this == &other) {
        return *this;
    }
    MemoryStore copy(other);
    std::lock_guard lock(mutex_);
    embedding_dim_ = copy.embedding_dim_;
    logs_ = copy.logs_;
    dedup_keys_ = std::move(copy.dedup_keys_);
    log_ids_ = std::move(copy.log_ids_);
    return *this;
}

namespace {

void validate_log(const EpisodeLog& log, int embedding_dim) {
    if (!log.success) {
        throw RejectedLog("only successful episodes are stored (log " + log.log_id + ")");
    }
    if (log.steps.empty()) {
        throw RejectedLog("log " + log.log_id + " has no steps");
    }
    if (log.task.description.empty()) {
        throw RejectedLog("log " + log.log_id + " has an empty task description");
    }
    if (log.provenance.backend_id.empty()) {
        throw RejectedLog("log " + log.log_id + " has no provenance backend_id");
    }
    for (const Step& step : log.steps) {
        if (step.action.empty()) {
            throw RejectedLog("log " + log.log_id + " has an empty action");
        }
        if (step.observation.kind == ObservationKind::vector &&
            static_cast<int>(step.observation.vector.size()) != embedding_dim) {
            throw DimensionMismatch("log " + log.log_id + " has a vector observation of dim " +
                                    std::to_string(step.observation.vector.size()) +
                                    ", store dim is " + std::to_string(embedding_dim));
        }
    }
}

}  // namespace

bool MemoryStore::insert(EpisodeLog log) {
    validate_log(log, embedding_dim_);
    const std::string identity = duplicate_identity(log);

    std::lock_guard lock(mutex_);
    if (dedup_keys_.count(identity) > 0) {
        return false;  // duplicate: no-op
    }
    if (log_ids_.count(log.log_id) > 0) {
        throw RejectedLog("log_id already present: " + log.log_id);
    }
    auto next = std::make_shared<std::vector<LogPtr>>(*logs_);
    next->push_back(std::make_shared<const EpisodeLog>(std::move(log)));
    dedup_keys_.insert(identity);
    log_ids_.insert(next->back()->log_id);
    logs_ = std::move(next);
    return true;
}

Snapshot MemoryStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return logs_;
}

std::vector<LogPtr> MemoryStore::filter(const LogFilter& predicate) const {
    Snapshot snap = snapshot();
    std::vector<LogPtr> out;
    for (const LogPtr& log : *snap) {
        if (predicate.matches(*log)) {
            out.push_back(log);
        }
    }
    return out;
}

std::size_t MemoryStore::size() const {
    std::lock_guard lock(mutex_);
    return logs_->size();
}

// --- serialization ---

namespace {

struct RecordError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json observation_to_json(const Observation& obs) {
    json j;
    if (obs.kind == ObservationKind::text) {
        j["kind"] = "text";
        j["text"] = obs.text;
    } else {
        j["kind"] = "vector";
        j["vector"] = obs.vector;
    }
    return j;
}

Observation observation_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "text") {
        return Observation::from_text(j.at("text").get<std::string>());
    }
    if (kind == "vector") {
        return Observation::from_vector(j.at("vector").get<std::vector<double>>());
    }
    throw RecordError("unknown observation kind: " + kind);
}

json log_to_json(const EpisodeLog& log) {
    json steps = json::array();
    for (const Step& step : log.steps) {
        json s;
        if (step.action_plan) {
            s["action_plan"] = *step.action_plan;
        }
        s["action"] = step.action;
        s["observation"] = observation_to_json(step.observation);
        steps.push_back(std::move(s));
    }
    return json{{"log_id", log.log_id},
                {"task",
                 {{"id", log.task.id},
                  {"description", log.task.description},
                  {"task_type", log.task.task_type},
                  {"metadata", log.task.metadata}}},
                {"overall_plan", log.overall_plan},
                {"steps", std::move(steps)},
                {"reward", log.reward},
                {"success", log.success},
                {"provenance",
                 {{"backend_id", log.provenance.backend_id},
                  {"trial_index", log.provenance.trial_index},
                  {"created_at", log.provenance.created_at}}}};
}

EpisodeLog log_from_json(const json& j) {
    EpisodeLog log;
    log.log_id = j.at("log_id").get<std::string>();
    const json& task = j.at("task");
    log.task.id = task.at("id").get<std::string>();
    log.task.description = task.at("description").get<std::string>();
    log.task.task_type = task.value("task_type", std::string{});
    if (task.contains("metadata")) {
        log.task.metadata = task.at("metadata").get<std::map<std::string, std::string>>();
    }
    log.overall_plan = j.at("overall_plan").get<std::string>();
    for (const json& s : j.at("steps")) {
        Step step;
        if (s.contains("action_plan")) {
            step.action_plan = s.at("action_plan").get<std::string>();
        }
        step.action = s.at("action").get<std::string>();
        step.observation = observation_from_json(s.at("observation"));
        log.steps.push_back(std::move(step));
    }
    log.reward = j.at("reward").get<double>();
    log.success = j.at("success").get<bool>();
    const json& prov = j.at("provenance");
    log.provenance.backend_id = prov.at("backend_id").get<std::string>();
    log.provenance.trial_index = prov.at("trial_index").get<int>();
    log.provenance.created_at = prov.at("created_at").get<std::string>();
    return log;
}

}  // namespace

void MemoryStore::save(const std::string& path) const {
    Snapshot snap = snapshot();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open for writing: " + path);
    }
    out << json{{"schema_version", kSchemaVersion}, {"embedding_dim", embedding_dim_}}.dump()
        << '\n';
    for (const LogPtr& log : *snap) {
        out << log_to_json(*log).dump() << '\n';
    }
    if (!out) {
        throw Error("write failed: " + path);
    }
}

MemoryStore MemoryStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw CorruptRecord(1, "missing header record");
    }
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw CorruptRecord(1, e.what());
    }
    if (!header.contains("schema_version") || !header.contains("embedding_dim")) {
        throw CorruptRecord(1, "header must carry schema_version and embedding_dim");
    }
    const int version = header.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw SchemaVersionUnsupported("schema_version " + std::to_string(version) +
                                       " unsupported (expected " +
                                       std::to_string(kSchemaVersion) + ")");
    }

    MemoryStore store(header.at("embedding_dim").get<int>());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            throw CorruptRecord(line_no, "empty record line");
        }
        EpisodeLog log;
        try {
            log = log_from_json(json::parse(line));
        } catch (const json::exception& e) {
            throw CorruptRecord(line_no, e.what());
        } catch (const RecordError& e) {
            throw CorruptRecord(line_no, e.what());
        }
        try {
            if (!store.insert(std::move(log))) {
                throw CorruptRecord(line_no, "duplicate log in file");
            }
        } catch (const RejectedLog& e) {
            throw CorruptRecord(line_no, e.what());
        } catch (const DimensionMismatch& e) {
            throw CorruptRecord(line_no, e.what());
        }
    }
    return store;
}

}  // namespace epilog
