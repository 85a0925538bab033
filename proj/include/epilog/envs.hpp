#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epilog/memory.hpp"

namespace epilog {

struct EnvStep {
    Observation observation;
    double reward = 0.0;  // in [0, 1]
    bool done = false;    // always true when reward == 1
};

// Episodic environment. One instance serves one episode at a time;
// instances are independent and may run in parallel.
class Environment {
public:
    virtual ~Environment() = default;

    // Deterministic initial observation. Throws UnknownTask when the task
    // id maps to no registered fixture.
    virtual Observation reset(const TaskSpec& task) = 0;

    // Executes one text command. Invalid or inapplicable commands return
    // "Nothing happens." with reward 0 -- never an exception.
    virtual EnvStep step(const std::string& action) = 0;
};

// ---------------------------------------------------------------------------
// MiniHouse: a deterministic household fixture in the ALFWorld idiom.
// Small enough that a breadth-first search over the action grammar can
// certify every fixture's solution, which is what the test oracles do.
// ---------------------------------------------------------------------------

struct Receptacle {
    std::string name;  // "shelf 1", "drawer 2", ...
    bool openable = false;
    bool open = true;  // closed containers hide their contents
    std::vector<std::string> contents;
};

struct WorldObject {
    std::string name;
    bool usable = false;  // lamps and similar devices
    bool clean = false;
    bool hot = false;
    bool cold = false;
    bool examined = false;
};

enum class GoalKind { pick, clean, heat, cool, look, pick2 };

// Goals name object and receptacle *types* ("mug", "desk"): any instance
// of the type satisfies the predicate.
struct Goal {
    GoalKind kind = GoalKind::pick;
    std::string object_type;
    std::string target_type;
};

struct MiniHouseWorld {
    std::vector<Receptacle> receptacles;
    std::vector<WorldObject> objects;
    Goal goal;
};

struct HouseFixture {
    TaskSpec task;
    MiniHouseWorld world;
};

GoalKind goal_kind_from_string(const std::string& s);
std::string to_string(GoalKind kind);

// "mug 2" -> "mug"; the instance index is dropped.
std::string type_of(const std::string& name);

// Grammar: go to R | open R | take O from R | put O in/on R |
// clean O with sinkbasin N | heat O with microwave N |
// cool O with fridge N | use D.
class MiniHouseEnv final : public Environment {
public:
    explicit MiniHouseEnv(std::vector<HouseFixture> fixtures);

    Observation reset(const TaskSpec& task) override;
    EnvStep step(const std::string& action) override;

    // World state for independent goal evaluation in tests.
    const MiniHouseWorld& world() const { return world_; }
    const std::string& agent_location() const { return location_; }
    const std::string& carried() const { return carried_; }

private:
    std::vector<HouseFixture> fixtures_;
    MiniHouseWorld world_;
    std::string location_;  // empty until the first "go to"
    std::string carried_;   // empty-handed when empty
    bool done_ = false;

    Receptacle* find_receptacle(const std::string& name);
    WorldObject* find_object(const std::string& name);
    Receptacle* location_of(const std::string& object_name);
    bool goal_reached() const;
    std::string describe_contents(const Receptacle& r) const;
};

// Fixture files are JSON: {"fixtures": [{"task": {...}, "world": {...}}]}.
// Validates names, unique object locations, and goal references; throws
// ConfigError on any violation.
std::vector<HouseFixture> load_house_fixtures(const std::string& path);

// ---------------------------------------------------------------------------
// VectorCorridor: a line of positions with precomputed observation
// embeddings. Exercises visual-key retrieval without any image stack.
// ---------------------------------------------------------------------------

struct CorridorFixture {
    TaskSpec task;
    std::vector<std::vector<double>> position_vectors;
    int start = 0;
    int goal = 0;
};

class VectorCorridorEnv final : public Environment {
public:
    explicit VectorCorridorEnv(std::vector<CorridorFixture> fixtures);

    Observation reset(const TaskSpec& task) override;
    EnvStep step(const std::string& action) override;  // "move left" | "move right"

    int position() const { return position_; }

private:
    std::vector<CorridorFixture> fixtures_;
    CorridorFixture current_;
    int position_ = 0;
    bool done_ = false;
};

std::vector<CorridorFixture> load_corridor_fixtures(const std::string& path);

}  // namespace epilog
