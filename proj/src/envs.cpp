#include "epilog/envs.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "epilog/errors.hpp"

namespace epilog {

using nlohmann::json;

GoalKind goal_kind_from_string(const std::string& s) {
    if (s == "pick") return GoalKind::pick;
    if (s == "clean") return GoalKind::clean;
    if (s == "heat") return GoalKind::heat;
    if (s == "cool") return GoalKind::cool;
    if (s == "look") return GoalKind::look;
    if (s == "pick2") return GoalKind::pick2;
    throw ConfigError("unknown goal kind: " + s);
}

std::string to_string(GoalKind kind) {
    switch (kind) {
        case GoalKind::pick: return "pick";
        case GoalKind::clean: return "clean";
        case GoalKind::heat: return "heat";
        case GoalKind::cool: return "cool";
        case GoalKind::look: return "look";
        case GoalKind::pick2: return "pick2";
    }
    return "?";
}

std::string type_of(const std::string& name) {
    const std::size_t space = name.rfind(' ');
    if (space == std::string::npos) {
        return name;
    }
    const std::string suffix = name.substr(space + 1);
    const bool numeric = !suffix.empty() &&
                         std::all_of(suffix.begin(), suffix.end(),
                                     [](unsigned char c) { return std::isdigit(c) != 0; });
    return numeric ? name.substr(0, space) : name;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return s.substr(begin, end - begin);
}

// "a shelf 1, a desk 2, and a safe 1"
std::string enumerate(const std::vector<std::string>& names) {
    if (names.empty()) {
        return "nothing";
    }
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out += (i + 1 == names.size()) ? ", and " : ", ";
        }
        out += "a " + names[i];
    }
    return out;
}

const std::string kNothing = "Nothing happens.";

}  // namespace

MiniHouseEnv::MiniHouseEnv(std::vector<HouseFixture> fixtures)
    : fixtures_(std::move(fixtures)) {}

Receptacle* MiniHouseEnv::find_receptacle(const std::string& name) {
    for (Receptacle& r : world_.receptacles) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

WorldObject* MiniHouseEnv::find_object(const std::string& name) {
    for (WorldObject& o : world_.objects) {
        if (o.name == name) {
            return &o;
        }
    }
    return nullptr;
}

Receptacle* MiniHouseEnv::location_of(const std::string& object_name) {
    for (Receptacle& r : world_.receptacles) {
        if (std::find(r.contents.begin(), r.contents.end(), object_name) != r.contents.end()) {
            return &r;
        }
    }
    return nullptr;
}

std::string MiniHouseEnv::describe_contents(const Receptacle& r) const {
    std::vector<std::string> names(r.contents.begin(), r.contents.end());
    if (r.openable) {
        return "The " + r.name + " is open. In it, you see " + enumerate(names) + ".";
    }
    return "On the " + r.name + ", you see " + enumerate(names) + ".";
}

Observation MiniHouseEnv::reset(const TaskSpec& task) {
    const HouseFixture* fixture = nullptr;
    for (const HouseFixture& f : fixtures_) {
        if (f.task.id == task.id) {
            fixture = &f;
            break;
        }
    }
    if (fixture == nullptr) {
        throw UnknownTask("no fixture registered for task id: " + task.id);
    }
    world_ = fixture->world;
    location_.clear();
    carried_.clear();
    done_ = false;

    std::vector<std::string> names;
    names.reserve(world_.receptacles.size());
    for (const Receptacle& r : world_.receptacles) {
        names.push_back(r.name);
    }
    return Observation::from_text(
        "You are in the middle of a room. Looking quickly around you, you see " +
        enumerate(names) + ".");
}

bool MiniHouseEnv::goal_reached() const {
    const Goal& goal = world_.goal;
    auto object_state = [&](const std::string& name) -> const WorldObject* {
        for (const WorldObject& o : world_.objects) {
            if (o.name == name) {
                return &o;
            }
        }
        return nullptr;
    };

    if (goal.kind == GoalKind::look) {
        for (const WorldObject& o : world_.objects) {
            if (type_of(o.name) == goal.object_type && o.examined) {
                return true;
            }
        }
        return false;
    }

    int placed = 0;
    for (const Receptacle& r : world_.receptacles) {
        if (type_of(r.name) != goal.target_type) {
            continue;
        }
        for (const std::string& name : r.contents) {
            if (type_of(name) != goal.object_type) {
                continue;
            }
            const WorldObject* o = object_state(name);
            switch (goal.kind) {
                case GoalKind::pick:
                case GoalKind::pick2:
                    ++placed;
                    break;
                case GoalKind::clean:
                    if (o != nullptr && o->clean) ++placed;
                    break;
                case GoalKind::heat:
                    if (o != nullptr && o->hot) ++placed;
                    break;
                case GoalKind::cool:
                    if (o != nullptr && o->cold) ++placed;
                    break;
                case GoalKind::look:
                    break;
            }
        }
    }
    return goal.kind == GoalKind::pick2 ? placed >= 2 : placed >= 1;
}

EnvStep MiniHouseEnv::step(const std::string& raw_action) {
    if (done_) {
        return EnvStep{Observation::from_text(kNothing), 0.0, true};
    }
    const std::string action = trim(raw_action);
    std::string text = kNothing;

    auto applies = [&](const std::string& prefix, std::string* rest) {
        if (action.size() > prefix.size() && action.compare(0, prefix.size(), prefix) == 0) {
            *rest = action.substr(prefix.size());
            return true;
        }
        return false;
    };

    std::string rest;
    if (applies("go to ", &rest)) {
        Receptacle* r = find_receptacle(rest);
        if (r != nullptr && location_ != r->name) {
            location_ = r->name;
            if (r->openable && !r->open) {
                text = "The " + r->name + " is closed.";
            } else {
                text = describe_contents(*r);
            }
        }
    } else if (applies("open ", &rest)) {
        Receptacle* r = find_receptacle(rest);
        if (r != nullptr && location_ == r->name && r->openable && !r->open) {
            r->open = true;
            text = "You open the " + r->name + ". " + describe_contents(*r);
        }
    } else if (applies("take ", &rest)) {
        const std::size_t sep = rest.find(" from ");
        if (sep != std::string::npos && carried_.empty()) {
            const std::string obj = rest.substr(0, sep);
            const std::string from = rest.substr(sep + 6);
            Receptacle* r = find_receptacle(from);
            if (r != nullptr && location_ == r->name && (!r->openable || r->open)) {
                auto it = std::find(r->contents.begin(), r->contents.end(), obj);
                if (it != r->contents.end()) {
                    r->contents.erase(it);
                    carried_ = obj;
                    text = "You pick up the " + obj + " from the " + r->name + ".";
                }
            }
        }
    } else if (applies("put ", &rest)) {
        const std::size_t sep = rest.find(" in/on ");
        if (sep != std::string::npos) {
            const std::string obj = rest.substr(0, sep);
            const std::string onto = rest.substr(sep + 7);
            Receptacle* r = find_receptacle(onto);
            if (r != nullptr && location_ == r->name && carried_ == obj && !obj.empty() &&
                (!r->openable || r->open)) {
                r->contents.push_back(obj);
                carried_.clear();
                text = "You put the " + obj + " in/on the " + r->name + ".";
            }
        }
    } else if (applies("clean ", &rest)) {
        const std::size_t sep = rest.find(" with ");
        if (sep != std::string::npos) {
            const std::string obj = rest.substr(0, sep);
            const std::string with = rest.substr(sep + 6);
            Receptacle* r = find_receptacle(with);
            WorldObject* o = find_object(obj);
            if (r != nullptr && o != nullptr && location_ == r->name && carried_ == obj &&
                type_of(r->name) == "sinkbasin") {
                o->clean = true;
                text = "You clean the " + obj + " using the " + r->name + ".";
            }
        }
    } else if (applies("heat ", &rest)) {
        const std::size_t sep = rest.find(" with ");
        if (sep != std::string::npos) {
            const std::string obj = rest.substr(0, sep);
            const std::string with = rest.substr(sep + 6);
            Receptacle* r = find_receptacle(with);
            WorldObject* o = find_object(obj);
            if (r != nullptr && o != nullptr && location_ == r->name && carried_ == obj &&
                type_of(r->name) == "microwave") {
                o->hot = true;
                o->cold = false;
                text = "You heat the " + obj + " using the " + r->name + ".";
            }
        }
    } else if (applies("cool ", &rest)) {
        const std::size_t sep = rest.find(" with ");
        if (sep != std::string::npos) {
            const std::string obj = rest.substr(0, sep);
            const std::string with = rest.substr(sep + 6);
            Receptacle* r = find_receptacle(with);
            WorldObject* o = find_object(obj);
            if (r != nullptr && o != nullptr && location_ == r->name && carried_ == obj &&
                type_of(r->name) == "fridge") {
                o->cold = true;
                o->hot = false;
                text = "You cool the " + obj + " using the " + r->name + ".";
            }
        }
    } else if (applies("use ", &rest)) {
        WorldObject* device = find_object(rest);
        Receptacle* at = device != nullptr ? location_of(rest) : nullptr;
        if (device != nullptr && device->usable && at != nullptr && location_ == at->name) {
            if (!carried_.empty()) {
                WorldObject* held = find_object(carried_);
                if (held != nullptr) {
                    held->examined = true;
                }
            }
            text = "You turn on the " + rest + ".";
        }
    }

    const bool success = goal_reached();
    if (success) {
        done_ = true;
    }
    return EnvStep{Observation::from_text(text), success ? 1.0 : 0.0, success};
}

// --- fixtures ---

namespace {

TaskSpec task_from_json(const json& j) {
    TaskSpec task;
    task.id = j.at("id").get<std::string>();
    task.description = j.at("description").get<std::string>();
    task.task_type = j.value("task_type", std::string{});
    if (j.contains("metadata")) {
        task.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    }
    if (task.id.empty() || task.description.empty()) {
        throw ConfigError("fixture task needs id and description");
    }
    return task;
}

}  // namespace

std::vector<HouseFixture> load_house_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open fixtures: " + path);
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("fixtures " + path + ": " + e.what());
    }

    std::vector<HouseFixture> fixtures;
    std::set<std::string> ids;
    for (const json& f : root.at("fixtures")) {
        HouseFixture fixture;
        fixture.task = task_from_json(f.at("task"));
        if (!ids.insert(fixture.task.id).second) {
            throw ConfigError("duplicate fixture task id: " + fixture.task.id);
        }

        const json& world = f.at("world");
        std::set<std::string> placed;
        for (const json& rj : world.at("receptacles")) {
            Receptacle r;
            r.name = rj.at("name").get<std::string>();
            r.openable = rj.value("openable", false);
            r.open = rj.value("open", !r.openable);
            if (rj.contains("contents")) {
                r.contents = rj.at("contents").get<std::vector<std::string>>();
            }
            for (const std::string& obj : r.contents) {
                if (!placed.insert(obj).second) {
                    throw ConfigError("object in two places: " + obj + " (task " +
                                      fixture.task.id + ")");
                }
            }
            fixture.world.receptacles.push_back(std::move(r));
        }

        std::set<std::string> declared;
        if (world.contains("objects")) {
            for (const json& oj : world.at("objects")) {
                WorldObject o;
                o.name = oj.at("name").get<std::string>();
                o.usable = oj.value("usable", false);
                declared.insert(o.name);
                fixture.world.objects.push_back(std::move(o));
            }
        }
        // Objects only mentioned in contents get default state.
        for (const std::string& name : placed) {
            if (declared.count(name) == 0) {
                fixture.world.objects.push_back(WorldObject{name});
            }
        }

        const json& gj = world.at("goal");
        fixture.world.goal.kind = goal_kind_from_string(gj.at("kind").get<std::string>());
        fixture.world.goal.object_type = gj.at("object").get<std::string>();
        fixture.world.goal.target_type = gj.at("target").get<std::string>();

        bool object_exists = false;
        for (const WorldObject& o : fixture.world.objects) {
            if (type_of(o.name) == fixture.world.goal.object_type) {
                object_exists = true;
            }
        }
        bool target_exists = false;
        if (fixture.world.goal.kind == GoalKind::look) {
            for (const WorldObject& o : fixture.world.objects) {
                if (type_of(o.name) == fixture.world.goal.target_type && o.usable) {
                    target_exists = true;
                }
            }
        } else {
            for (const Receptacle& r : fixture.world.receptacles) {
                if (type_of(r.name) == fixture.world.goal.target_type) {
                    target_exists = true;
                }
            }
        }
        if (!object_exists || !target_exists) {
            throw ConfigError("goal references missing object or target (task " +
                              fixture.task.id + ")");
        }
        fixtures.push_back(std::move(fixture));
    }
    return fixtures;
}

// --- vector corridor ---

VectorCorridorEnv::VectorCorridorEnv(std::vector<CorridorFixture> fixtures)
    : fixtures_(std::move(fixtures)) {}

Observation VectorCorridorEnv::reset(const TaskSpec& task) {
    const CorridorFixture* fixture = nullptr;
    for (const CorridorFixture& f : fixtures_) {
        if (f.task.id == task.id) {
            fixture = &f;
            break;
        }
    }
    if (fixture == nullptr) {
        throw UnknownTask("no corridor fixture for task id: " + task.id);
    }
    current_ = *fixture;
    position_ = current_.start;
    done_ = false;
    return Observation::from_vector(current_.position_vectors[position_]);
}

EnvStep VectorCorridorEnv::step(const std::string& action) {
    if (done_) {
        return EnvStep{Observation::from_vector(current_.position_vectors[position_]), 0.0,
                       true};
    }
    const std::string a = trim(action);
    if (a == "move left" && position_ > 0) {
        --position_;
    } else if (a == "move right" &&
               position_ + 1 < static_cast<int>(current_.position_vectors.size())) {
        ++position_;
    }
    const bool success = position_ == current_.goal;
    if (success) {
        done_ = true;
    }
    return EnvStep{Observation::from_vector(current_.position_vectors[position_]),
                   success ? 1.0 : 0.0, success};
}

std::vector<CorridorFixture> load_corridor_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open fixtures: " + path);
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("fixtures " + path + ": " + e.what());
    }
    std::vector<CorridorFixture> fixtures;
    for (const json& f : root.at("fixtures")) {
        CorridorFixture fixture;
        fixture.task = task_from_json(f.at("task"));
        fixture.position_vectors =
            f.at("positions").get<std::vector<std::vector<double>>>();
        fixture.start = f.at("start").get<int>();
        fixture.goal = f.at("goal").get<int>();
        const int n = static_cast<int>(fixture.position_vectors.size());
        if (n == 0 || fixture.start < 0 || fixture.start >= n || fixture.goal < 0 ||
            fixture.goal >= n) {
            throw ConfigError("corridor fixture out of range (task " + fixture.task.id + ")");
        }
        fixtures.push_back(std::move(fixture));
    }
    return fixtures;
}

}  // namespace epilog
