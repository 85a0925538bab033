#!/usr/bin/env python3
"""Regenerates the shipped fixture suites under fixtures/.

The scripted rule files encode per-task stage machines keyed on the exact
observation strings the household environment emits, so they are generated
rather than hand-maintained. Run from the repository root:

    python3 tools/make_demo_fixtures.py
"""

import json
import os

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
WORLDS = os.path.join(ROOT, "fixtures", "worlds")
SCRIPTS = os.path.join(ROOT, "fixtures", "scripts")

PLAN_PRIORITY = 100


def rule(pattern, response, priority=0, regex=False):
    return {
        "match": "pattern" if regex else "substring",
        "pattern": pattern,
        "response": response,
        "priority": priority,
    }


def plan_rule(desc, plan):
    # Plan prompts carry "make a plan" + the task line; executor prompts say
    # "make an action", key prompts have no task line.
    return rule(
        "make a plan from the examples[\\s\\S]*Your task is to: " + desc,
        "> think: " + plan,
        PLAN_PRIORITY,
        regex=True,
    )


def key_rule(action_plan, key_line):
    # The key prompt ends "...make a plan from the examples.\n\nthink: {plan}".
    return rule(
        "make a plan from the examples.\n\nthink: " + action_plan,
        "> " + key_line,
        PLAN_PRIORITY,
    )


# Executor prompts render retrieved experiences first, then this header,
# then the running trajectory. Stage markers are anchored past it so text
# inside a retrieved experience can never advance a task's own stage
# machine; gate markers do the opposite on purpose. Kept free of regex
# metacharacters so the backend's ordered-literal fast path applies.
ACTION_HEADER = "make an action from the examples"


def stage_rule(desc, marker, response, priority):
    return rule(
        "Your task is to: " + desc + "[\\s\\S]*" + ACTION_HEADER + "[\\s\\S]*" + marker,
        response,
        priority,
        regex=True,
    )


def staged(desc, stages, gate=None, base_priority=2):
    """Stage machine for one task: each stage fires once its marker shows up
    in the running trajectory; priorities make the latest stage win. A gated
    task has no marker-free opener, so it stalls until `gate` (text that only
    a retrieved experience can contribute) appears anywhere in the prompt."""
    anchor = "Your task is to: " + desc
    rules = []
    priority = base_priority
    if gate is None:
        rules.append(rule(anchor, stages[0][1], priority))
    else:
        rules.append(
            rule(anchor + "[\\s\\S]*" + gate, stages[0][1], priority, regex=True)
        )
    for marker, response in stages[1:]:
        priority += 2
        rules.append(stage_rule(desc, marker, response, priority))
    return rules


def world(receptacles, goal, objects=None):
    w = {"receptacles": receptacles, "goal": goal}
    if objects:
        w["objects"] = objects
    return w


def recep(name, contents=(), openable=False, open_=None):
    r = {"name": name, "contents": list(contents)}
    if openable:
        r["openable"] = True
        if open_ is not None:
            r["open"] = open_
    return r


def task(tid, desc, task_type):
    return {"id": tid, "description": desc, "task_type": task_type, "metadata": {}}


# --- stage helpers (markers mirror MiniHouseEnv observation text) ---


def seen(receptacle, obj):
    return "On the " + receptacle + ", you see a " + obj


def picked(obj):
    return "You pick up the " + obj


def at(receptacle):
    return "On the " + receptacle + ","


def pick_stages(obj, src, dst):
    return [
        (None, "go to " + src),
        (seen(src, obj), "take " + obj + " from " + src),
        (picked(obj), "go to " + dst),
        (at(dst), "put " + obj + " in/on " + dst),
    ]


def treat_stages(obj, src, appliance, verb, done_marker, dst):
    return [
        (None, "go to " + src),
        (seen(src, obj), "take " + obj + " from " + src),
        (picked(obj), "go to " + appliance),
        (at(appliance), verb + " " + obj + " with " + appliance),
        (done_marker, "go to " + dst),
        (at(dst), "put " + obj + " in/on " + dst),
    ]


def look_stages(obj, src, lamp, lamp_loc):
    return [
        (None, "go to " + src),
        (seen(src, obj), "take " + obj + " from " + src),
        (picked(obj), "go to " + lamp_loc),
        (at(lamp_loc), "use " + lamp),
    ]


def pick2_stages(obj1, src1, obj2, src2, dst):
    return [
        (None, "go to " + src1),
        (seen(src1, obj1), "take " + obj1 + " from " + src1),
        (picked(obj1), "go to " + dst),
        ("On the " + dst + ", you see nothing", "put " + obj1 + " in/on " + dst),
        ("You put the " + obj1, "go to " + src2),
        (seen(src2, obj2), "take " + obj2 + " from " + src2),
        (picked(obj2), "go to " + dst),
        (seen(dst, obj1), "put " + obj2 + " in/on " + dst),
    ]


def emit(fixtures_path, fixtures, script_path, rules):
    os.makedirs(os.path.dirname(fixtures_path), exist_ok=True)
    with open(fixtures_path, "w") as f:
        json.dump({"fixtures": fixtures}, f, indent=2)
        f.write("\n")
    os.makedirs(os.path.dirname(script_path), exist_ok=True)
    with open(script_path, "w") as f:
        f.write("# generated by tools/make_demo_fixtures.py\n")
        for r in rules:
            f.write(json.dumps(r) + "\n")


def demo_suite():
    fixtures = []
    rules = []

    def add(tid, desc, ttype, w, plan, stages, gate=None):
        fixtures.append({"task": task(tid, desc, ttype), "world": w})
        rules.append(plan_rule(desc, plan))
        rules.extend(staged(desc, stages, gate=gate))

    # Teachers: solvable with an empty memory. mh-t01 exercises the full
    # think -> retrieval-key -> re-retrieve path; the rest act directly.
    desc = "put a mug in desk"
    fixtures.append({"task": task("mh-t01", desc, "pick"), "world": world(
        [recep("shelf 1", ["mug 2"]), recep("desk 1"),
         recep("drawer 1", ["pen 1"], openable=True)],
        {"kind": "pick", "object": "mug", "target": "desk"})})
    rules.append(plan_rule(desc, "To solve the task, I need to find and take a mug, then put it in desk."))
    rules.append(key_rule("First I need to find a mug", "search: mug"))
    think = "First I need to find a mug"
    rules.append(rule("Your task is to: " + desc, "think: " + think, 2))
    rules.append(stage_rule(desc, think, "go to shelf 1", 4))
    rules.append(stage_rule(desc, seen("shelf 1", "mug 2"), "take mug 2 from shelf 1", 6))
    rules.append(stage_rule(desc, picked("mug 2"), "go to desk 1", 8))
    rules.append(stage_rule(desc, at("desk 1"), "put mug 2 in/on desk 1", 10))

    add("mh-t02", "put a watch on sidetable", "pick",
        world([recep("shelf 2", ["watch 3"]), recep("sidetable 1")],
              {"kind": "pick", "object": "watch", "target": "sidetable"}),
        "To solve the task, I need to find and take a watch, then put it on sidetable.",
        pick_stages("watch 3", "shelf 2", "sidetable 1"))

    add("mh-t03", "clean a cloth and put it on countertop", "clean",
        world([recep("shelf 3", ["cloth 1"]), recep("sinkbasin 1"), recep("countertop 1")],
              {"kind": "clean", "object": "cloth", "target": "countertop"}),
        "To solve the task, I need to take a cloth, clean it with sinkbasin, then put it on countertop.",
        treat_stages("cloth 1", "shelf 3", "sinkbasin 1", "clean",
                     "You clean the cloth 1", "countertop 1"))

    add("mh-t04", "clean a soapbar and put it on shelf", "clean",
        world([recep("dresser 1", ["soapbar 2"]), recep("sinkbasin 2"), recep("shelf 4")],
              {"kind": "clean", "object": "soapbar", "target": "shelf"}),
        "To solve the task, I need to take a soapbar, clean it with sinkbasin, then put it on shelf.",
        treat_stages("soapbar 2", "dresser 1", "sinkbasin 2", "clean",
                     "You clean the soapbar 2", "shelf 4"))

    add("mh-t05", "heat an egg and put it on diningtable", "heat",
        world([recep("countertop 2", ["egg 2"]), recep("microwave 1"), recep("diningtable 1")],
              {"kind": "heat", "object": "egg", "target": "diningtable"}),
        "To solve the task, I need to take an egg, heat it with microwave, then put it on diningtable.",
        treat_stages("egg 2", "countertop 2", "microwave 1", "heat",
                     "You heat the egg 2", "diningtable 1"))

    add("mh-t06", "heat some bread and put it on countertop", "heat",
        world([recep("shelf 5", ["bread 1"]), recep("microwave 2"), recep("countertop 3")],
              {"kind": "heat", "object": "bread", "target": "countertop"}),
        "To solve the task, I need to take bread, heat it with microwave, then put it on countertop.",
        treat_stages("bread 1", "shelf 5", "microwave 2", "heat",
                     "You heat the bread 1", "countertop 3"))

    add("mh-t07", "cool a tomato and put it on sidetable", "cool",
        world([recep("shelf 6", ["tomato 1"]), recep("fridge 1"), recep("sidetable 2")],
              {"kind": "cool", "object": "tomato", "target": "sidetable"}),
        "To solve the task, I need to take a tomato, cool it with fridge, then put it on sidetable.",
        treat_stages("tomato 1", "shelf 6", "fridge 1", "cool",
                     "You cool the tomato 1", "sidetable 2"))

    add("mh-t08", "cool a winebottle and put it on shelf", "cool",
        world([recep("shelf 8", ["winebottle 1"]), recep("fridge 2"), recep("shelf 7")],
              {"kind": "cool", "object": "winebottle", "target": "shelf"}),
        "To solve the task, I need to take a winebottle, cool it with fridge, then put it on shelf.",
        treat_stages("winebottle 1", "shelf 8", "fridge 2", "cool",
                     "You cool the winebottle 1", "shelf 7"))

    add("mh-t09", "examine a keychain with the desklamp", "look",
        world([recep("shelf 9", ["keychain 2"]), recep("dresser 2", ["desklamp 1"])],
              {"kind": "look", "object": "keychain", "target": "desklamp"},
              objects=[{"name": "desklamp 1", "usable": True}]),
        "To solve the task, I need to take a keychain, then use the desklamp to examine it.",
        look_stages("keychain 2", "shelf 9", "desklamp 1", "dresser 2"))

    add("mh-t10", "examine a creditcard with the desklamp", "look",
        world([recep("shelf 10", ["creditcard 3"]), recep("sidetable 3", ["desklamp 2"])],
              {"kind": "look", "object": "creditcard", "target": "desklamp"},
              objects=[{"name": "desklamp 2", "usable": True}]),
        "To solve the task, I need to take a creditcard, then use the desklamp to examine it.",
        look_stages("creditcard 3", "shelf 10", "desklamp 2", "sidetable 3"))

    add("mh-t11", "put two saltshaker on dresser", "pick2",
        world([recep("shelf 11", ["saltshaker 1"]), recep("shelf 12", ["saltshaker 2"]),
               recep("dresser 3")],
              {"kind": "pick2", "object": "saltshaker", "target": "dresser"}),
        "To solve the task, I need to find and take the first saltshaker, put it on dresser, then do the same with the second saltshaker.",
        pick2_stages("saltshaker 1", "shelf 11", "saltshaker 2", "shelf 12", "dresser 3"))

    # mh-t12 exercises the open/closed container path.
    desc = "put two cd in drawer"
    fixtures.append({"task": task("mh-t12", desc, "pick2"), "world": world(
        [recep("shelf 13", ["cd 1"]), recep("shelf 14", ["cd 3"]),
         recep("drawer 3", openable=True)],
        {"kind": "pick2", "object": "cd", "target": "drawer"})})
    rules.append(plan_rule(desc, "To solve the task, I need to find and take the first cd, put it in drawer, then do the same with the second cd."))
    rules.append(rule("Your task is to: " + desc, "go to shelf 13", 2))
    steps = [
        (seen("shelf 13", "cd 1"), "take cd 1 from shelf 13"),
        (picked("cd 1"), "go to drawer 3"),
        ("The drawer 3 is closed", "open drawer 3"),
        ("You open the drawer 3", "put cd 1 in/on drawer 3"),
        ("You put the cd 1", "go to shelf 14"),
        (seen("shelf 14", "cd 3"), "take cd 3 from shelf 14"),
        (picked("cd 3"), "go to drawer 3"),
        ("In it, you see a cd 1", "put cd 3 in/on drawer 3"),
    ]
    priority = 2
    for marker, response in steps:
        priority += 2
        rules.append(stage_rule(desc, marker, response, priority))

    # First-generation dependents: the opening move is gated on text that
    # only a retrieved teacher log can put into the prompt, so they fail
    # while memory is empty and succeed from trial 2 on.
    add("mh-d01", "put a mug in safe", "pick",
        world([recep("shelf 15", ["mug 5"]), recep("safe 1")],
              {"kind": "pick", "object": "mug", "target": "safe"}),
        "To solve the task, I need to find and take a mug, then put it in safe.",
        pick_stages("mug 5", "shelf 15", "safe 1"),
        gate=picked("mug 2"))

    add("mh-d02", "put a watch in dresser", "pick",
        world([recep("shelf 16", ["watch 4"]), recep("dresser 4")],
              {"kind": "pick", "object": "watch", "target": "dresser"}),
        "To solve the task, I need to find and take a watch, then put it in dresser.",
        pick_stages("watch 4", "shelf 16", "dresser 4"),
        gate=picked("watch 3"))

    add("mh-d03", "heat an egg and put it on dresser", "heat",
        world([recep("shelf 17", ["egg 4"]), recep("microwave 3"), recep("dresser 5")],
              {"kind": "heat", "object": "egg", "target": "dresser"}),
        "To solve the task, I need to take an egg, heat it with microwave, then put it on dresser.",
        treat_stages("egg 4", "shelf 17", "microwave 3", "heat",
                     "You heat the egg 4", "dresser 5"),
        gate="You heat the egg 2")

    add("mh-d04", "cool a tomato and put it on shelf", "cool",
        world([recep("shelf 19", ["tomato 4"]), recep("fridge 3"), recep("shelf 18")],
              {"kind": "cool", "object": "tomato", "target": "shelf"}),
        "To solve the task, I need to take a tomato, cool it with fridge, then put it on shelf.",
        treat_stages("tomato 4", "shelf 19", "fridge 3", "cool",
                     "You cool the tomato 4", "shelf 18"),
        gate="You cool the tomato 1")

    add("mh-d05", "put two saltshaker in cabinet", "pick2",
        world([recep("shelf 20", ["saltshaker 4"]), recep("shelf 21", ["saltshaker 5"]),
               recep("cabinet 1")],
              {"kind": "pick2", "object": "saltshaker", "target": "cabinet"}),
        "To solve the task, I need to find and take the first saltshaker, put it in cabinet, then do the same with the second saltshaker.",
        pick2_stages("saltshaker 4", "shelf 20", "saltshaker 5", "shelf 21", "cabinet 1"),
        gate="You put the saltshaker 1 in/on the dresser 3")

    # Second-generation dependents: gated on first-generation logs, so they
    # need a further trial. Their target receptacles are unique within the
    # suite to keep the parent log safely inside the retrieval top-k.
    add("mh-e01", "put a mug on armchair", "pick",
        world([recep("shelf 22", ["mug 6"]), recep("armchair 3")],
              {"kind": "pick", "object": "mug", "target": "armchair"}),
        "To solve the task, I need to find and take a mug, then put it on armchair.",
        pick_stages("mug 6", "shelf 22", "armchair 3"),
        gate=picked("mug 5"))

    add("mh-e02", "put a watch on bed", "pick",
        world([recep("shelf 23", ["watch 6"]), recep("bed 2")],
              {"kind": "pick", "object": "watch", "target": "bed"}),
        "To solve the task, I need to find and take a watch, then put it on bed.",
        pick_stages("watch 6", "shelf 23", "bed 2"),
        gate=picked("watch 4"))

    add("mh-e03", "heat an egg and put it on laundryhamper", "heat",
        world([recep("shelf 24", ["egg 5"]), recep("microwave 4"), recep("laundryhamper 1")],
              {"kind": "heat", "object": "egg", "target": "laundryhamper"}),
        "To solve the task, I need to take an egg, heat it with microwave, then put it on laundryhamper.",
        treat_stages("egg 5", "shelf 24", "microwave 4", "heat",
                     "You heat the egg 5", "laundryhamper 1"),
        gate="You heat the egg 4")

    emit(os.path.join(WORLDS, "demo_suite.json"), fixtures,
         os.path.join(SCRIPTS, "demo.rules"), rules)


def transfer_suite():
    # Training side: backend A solves these; build-memory stores them.
    training = []
    rules_a = []

    def add_a(tid, desc, ttype, w, plan, stages):
        training.append({"task": task(tid, desc, ttype), "world": w})
        rules_a.append(plan_rule(desc, plan))
        rules_a.extend(staged(desc, stages))

    add_a("tf-t01", "put a vase on shelf", "pick",
          world([recep("shelf 30", ["vase 2"]), recep("shelf 31")],
                {"kind": "pick", "object": "vase", "target": "shelf"}),
          "To solve the task, I need to find and take a vase, then put it on shelf.",
          [(None, "go to shelf 30"),
           (seen("shelf 30", "vase 2"), "take vase 2 from shelf 30"),
           (picked("vase 2"), "go to shelf 31"),
           (at("shelf 31"), "put vase 2 in/on shelf 31")])

    add_a("tf-t02", "put a pillow on sofa", "pick",
          world([recep("armchair 1", ["pillow 1"]), recep("sofa 1")],
                {"kind": "pick", "object": "pillow", "target": "sofa"}),
          "To solve the task, I need to find and take a pillow, then put it on sofa.",
          pick_stages("pillow 1", "armchair 1", "sofa 1"))

    # Evaluation side: backend B only knows the gated continuations, so it
    # needs A-built memory to move at all.
    evaluation = []
    rules_b = []

    def add_b(tid, desc, ttype, w, plan, stages, gate):
        evaluation.append({"task": task(tid, desc, ttype), "world": w})
        rules_b.append(plan_rule(desc, plan))
        rules_b.extend(staged(desc, stages, gate=gate))

    add_b("tf-v01", "put a vase on dresser", "pick",
          world([recep("shelf 32", ["vase 3"]), recep("dresser 10")],
                {"kind": "pick", "object": "vase", "target": "dresser"}),
          "To solve the task, I need to find and take a vase, then put it on dresser.",
          pick_stages("vase 3", "shelf 32", "dresser 10"),
          gate=picked("vase 2"))

    add_b("tf-v02", "put a pillow on bed", "pick",
          world([recep("armchair 2", ["pillow 3"]), recep("bed 1")],
                {"kind": "pick", "object": "pillow", "target": "bed"}),
          "To solve the task, I need to find and take a pillow, then put it on bed.",
          pick_stages("pillow 3", "armchair 2", "bed 1"),
          gate=picked("pillow 1"))

    emit(os.path.join(WORLDS, "transfer_training.json"), training,
         os.path.join(SCRIPTS, "transfer_a.rules"), rules_a)
    emit(os.path.join(WORLDS, "transfer_eval.json"), evaluation,
         os.path.join(SCRIPTS, "transfer_b.rules"), rules_b)


def corridor_suite():
    positions = [[1.0 if i == j else 0.0 for j in range(8)] for i in range(4)]
    fixtures = [{
        "task": task("vc-01", "reach the end of the corridor", "navigate"),
        "positions": positions,
        "start": 0,
        "goal": 3,
    }]
    desc = "reach the end of the corridor"
    think = "I should recall which direction worked here before"
    rules = [
        plan_rule(desc, "To solve the task, I need to walk to the far end."),
        rule("Your task is to: " + desc, "think: " + think, 2),
        rule(think + "\nOK.", "move right", 4),
    ]
    os.makedirs(WORLDS, exist_ok=True)
    with open(os.path.join(WORLDS, "vector_corridor.json"), "w") as f:
        json.dump({"fixtures": fixtures}, f, indent=2)
        f.write("\n")
    os.makedirs(SCRIPTS, exist_ok=True)
    with open(os.path.join(SCRIPTS, "corridor.rules"), "w") as f:
        f.write("# generated by tools/make_demo_fixtures.py\n")
        for r in rules:
            f.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    demo_suite()
    transfer_suite()
    corridor_suite()
    print("fixtures written under", os.path.normpath(WORLDS))
