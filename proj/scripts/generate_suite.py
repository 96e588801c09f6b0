#!/usr/bin/env python3
"""Regenerates the benchmark problems under data/domains/*/problems.

Twenty instances per domain, growing in object count. Each problem gets a
`.nl.json` companion with the natural-language scenario used in prompts.
Output is fully determined by the seed.
"""

import argparse
import json
import random
from pathlib import Path

TASKS = 20


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_nl(path: Path, description: str, goal: str) -> None:
    write(path, json.dumps({"description": description, "goal": goal}, indent=2) + "\n")


def problem_text(name, domain, objects, init, goal):
    lines = [f"(define (problem {name})", f"  (:domain {domain})", "  (:objects"]
    lines += [f"    {o}" for o in objects]
    lines.append("  )")
    lines.append("  (:init")
    lines += [f"    {a}" for a in init]
    lines.append("  )")
    lines.append("  (:goal (and")
    lines += [f"    {g}" for g in goal]
    lines.append("  ))")
    lines.append(")")
    return "\n".join(lines) + "\n"


# blocksworld ---------------------------------------------------------------

def random_towers(rng, blocks):
    towers = []
    for b in rng.sample(blocks, len(blocks)):
        if towers and rng.random() < 0.6:
            rng.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def tower_facts(towers):
    on, table, clear = [], [], []
    for t in towers:
        table.append(t[0])
        for below, above in zip(t, t[1:]):
            on.append((above, below))
        clear.append(t[-1])
    return on, table, clear


def blocksworld(out: Path, rng):
    for i in range(TASKS):
        n = 3 + i // 4
        blocks = [f"b{k}" for k in range(1, n + 1)]
        start = random_towers(rng, blocks)
        while True:
            target = random_towers(rng, blocks)
            if tower_facts(target)[0] and tower_facts(target)[0] != tower_facts(start)[0]:
                break
        on, table, clear = tower_facts(start)
        init = ["(arm-empty)"] + [f"(on-table {b})" for b in table]
        init += [f"(on {a} {b})" for a, b in on] + [f"(clear {b})" for b in clear]
        goal_on = tower_facts(target)[0]
        goal = [f"(on {a} {b})" for a, b in goal_on]
        name = f"blocksworld-{i + 1:02d}"
        write(out / f"p{i + 1:02d}.pddl",
              problem_text(name, "blocksworld-4ops", [" ".join(blocks)], init, goal))
        desc = [f"You have {n} blocks."]
        desc += [f"{a} is on top of {b}." for a, b in on]
        desc += [f"{b} is on the table." for b in table]
        desc += [f"{b} is clear." for b in clear]
        desc.append("Your arm is empty.")
        goal_nl = ["Your goal is to move the blocks."]
        goal_nl += [f"{a} should be on top of {b}." for a, b in goal_on]
        write_nl(out / f"p{i + 1:02d}.nl.json", "\n".join(desc + goal_nl), "\n".join(goal_nl))


# gripper -------------------------------------------------------------------

def gripper(out: Path, rng):
    for i in range(TASKS):
        rooms_n = 2 + i // 7
        balls_n = 2 + i // 4
        rooms = [f"room{k}" for k in range(1, rooms_n + 1)]
        balls = [f"ball{k}" for k in range(1, balls_n + 1)]
        start = rng.choice(rooms)
        where = {b: rng.choice(rooms) for b in balls}
        dest = {}
        for b in balls:
            choices = [r for r in rooms if r != where[b]]
            dest[b] = rng.choice(choices)
        objects = ["robot1 - robot", "lgripper1 rgripper1 - gripper",
                   " ".join(rooms) + " - room", " ".join(balls) + " - object"]
        init = [f"(at-robby robot1 {start})", "(free robot1 lgripper1)",
                "(free robot1 rgripper1)"]
        init += [f"(at {b} {where[b]})" for b in balls]
        goal = [f"(at {b} {dest[b]})" for b in balls]
        name = f"gripper-{i + 1:02d}"
        write(out / f"p{i + 1:02d}.pddl",
              problem_text(name, "gripper-strips", objects, init, goal))
        desc = ["You control 1 robot, each robot has a left gripper and a right gripper.",
                f"There are {rooms_n} rooms and {balls_n} balls.",
                f"robot1 is in {start}.",
                " ".join(f"{b} is in {where[b]}." for b in balls),
                "The robots' grippers are free."]
        goal_nl = ["Your goal is to transport the balls to their destinations."]
        goal_nl += [f"{b} should be in {dest[b]}." for b in balls]
        write_nl(out / f"p{i + 1:02d}.nl.json", "\n".join(desc + goal_nl), "\n".join(goal_nl))


# barman --------------------------------------------------------------------

def barman(out: Path, rng):
    for i in range(TASKS):
        cocktails_n = 1 + i // 7
        shots_n = cocktails_n + 1 + (i % 2)
        ingredients = ["ingredient1", "ingredient2", "ingredient3"]
        cocktails = [f"cocktail{k}" for k in range(1, cocktails_n + 1)]
        shots = [f"shot{k}" for k in range(1, shots_n + 1)]
        shakers = ["shaker1", "shaker2", "shaker3"]
        recipes = {c: rng.sample(ingredients, 2) for c in cocktails}
        objects = [" ".join(shakers) + " - shaker", "left right - hand",
                   " ".join(shots) + " - shot", " ".join(ingredients) + " - ingredient",
                   " ".join(cocktails) + " - cocktail",
                   "dispenser1 dispenser2 dispenser3 - dispenser", "l0 l1 l2 - level"]
        init = [f"(ontable {c})" for c in shakers + shots]
        init += [f"(dispenses dispenser{k} ingredient{k})" for k in (1, 2, 3)]
        init += [f"(clean {c})" for c in shakers + shots]
        init += [f"(empty {c})" for c in shakers + shots]
        init += ["(handempty left)", "(handempty right)"]
        for s in shakers:
            init += [f"(shaker-empty-level {s} l0)", f"(shaker-level {s} l0)"]
        init += ["(next l0 l1)", "(next l1 l2)"]
        for c in cocktails:
            init += [f"(cocktail-part1 {c} {recipes[c][0]})",
                     f"(cocktail-part2 {c} {recipes[c][1]})"]
        goal = [f"(contains shot{k + 1} {c})" for k, c in enumerate(cocktails)]
        name = f"barman-{i + 1:02d}"
        write(out / f"p{i + 1:02d}.pddl", problem_text(name, "barman", objects, init, goal))
        desc = [f"You have 3 shakers with 3 levels, {shots_n} shot glasses, "
                "3 dispensers for 3 ingredients.",
                "The shakers and shot glasses are clean, empty, and on the table. "
                "Your left and right hands are empty."]
        for c in cocktails:
            desc.append(f"The first ingredient of {c} is {recipes[c][0]}. "
                        f"The second ingredient of {c} is {recipes[c][1]}.")
        plural = "cocktail" if cocktails_n == 1 else "cocktails"
        goal_nl = [f"Your goal is to make {cocktails_n} {plural}.",
                   " ".join(f"shot{k + 1} contains {c}." for k, c in enumerate(cocktails))]
        write_nl(out / f"p{i + 1:02d}.nl.json", "\n".join(desc + goal_nl), "\n".join(goal_nl))


# tyreworld -----------------------------------------------------------------

def tyreworld_problem(name, hubs_n):
    hubs = [f"the-hub{k}" for k in range(1, hubs_n + 1)]
    nuts = [f"nuts{k}" for k in range(1, hubs_n + 1)]
    intact = [f"r{k}" for k in range(1, hubs_n + 1)]
    flat = [f"w{k}" for k in range(1, hubs_n + 1)]
    objects = ["wrench jack pump - tool", " ".join(hubs) + " - hub",
               " ".join(nuts) + " - nut", "boot - container",
               " ".join(intact + flat) + " - wheel"]
    init = ["(in jack boot)", "(in pump boot)", "(in wrench boot)", "(unlocked boot)",
            "(closed boot)"]
    for k in range(hubs_n):
        init += [f"(intact {intact[k]})", f"(in {intact[k]} boot)",
                 f"(not-inflated {intact[k]})", f"(on {flat[k]} {hubs[k]})",
                 f"(on-ground {hubs[k]})", f"(tight {nuts[k]} {hubs[k]})",
                 f"(fastened {hubs[k]})"]
    goal = []
    for k in range(hubs_n):
        goal += [f"(on {intact[k]} {hubs[k]})", f"(inflated {intact[k]})",
                 f"(tight {nuts[k]} {hubs[k]})", f"(in {flat[k]} boot)"]
    goal += ["(in wrench boot)", "(in jack boot)", "(in pump boot)", "(closed boot)"]
    text = problem_text(name, "tyreworld", objects, init, goal)
    desc = [f"You have a jack, a pump, a wrench, a boot, {hubs_n} hubs, {hubs_n} nuts, "
            f"{hubs_n} flat tyres, and {hubs_n} intact tyres.",
            "The jack, pump, wrench, and intact tyres are in the boot.",
            "The boot is unlocked but is closed.",
            "The intact tyres are not inflated.",
            "The flat tyres are on the hubs.",
            "The hubs are on the ground.",
            "The nuts are tight on the hubs.",
            "The hubs are fastened."]
    goal_nl = ["Your goal is to replace flat tyres with intact tyres on the hubs. "
               "Intact tyres should be inflated. The nuts should be tight on the hubs. "
               "The flat tyres, wrench, jack, and pump should be in the boot. "
               "The boot should be closed."]
    return text, "\n".join(desc + goal_nl), "\n".join(goal_nl)


def tyreworld(out: Path, rng):
    del rng  # instances differ only in size
    for i in range(TASKS):
        hubs_n = 1 + i // 5
        text, desc, goal = tyreworld_problem(f"tyreworld-{i + 1:02d}", hubs_n)
        write(out / f"p{i + 1:02d}.pddl", text)
        write_nl(out / f"p{i + 1:02d}.nl.json", desc, goal)


# termes --------------------------------------------------------------------

def termes_problem(name, rows, cols, max_height, depot, robot, targets):
    positions = [f"pos-{r}-{c}" for r in range(rows) for c in range(cols)]
    numbs = [f"n{k}" for k in range(max_height + 1)]
    objects = [f"{n} - numb" for n in numbs] + [f"{p} - position" for p in positions]
    init = [f"(height {p} n0)" for p in positions] + [f"(at {robot})"]
    init += [f"(succ n{k + 1} n{k})" for k in range(max_height)]
    for r in range(rows):
        for c in range(cols):
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols:
                    init.append(f"(neighbor pos-{r}-{c} pos-{rr}-{cc})")
    init.append(f"(is-depot {depot})")
    goal = [f"(height {p} n{targets.get(p, 0)})" for p in positions]
    goal.append("(not (has-block))")
    text = problem_text(name, "termes", objects, init, goal)
    desc = [f"The robot is on a grid with {rows} rows and {cols} columns."]
    for r in range(rows):
        desc.append(" ".join(f"pos-{r}-{c}" for c in range(cols)))
    desc += [f"The robot is at {robot}.", f"The depot for new blocks is at {depot}.",
             f"The maximum height of blocks is {max_height}."]
    towers = " and ".join(f"the height at {p} is {h}" for p, h in sorted(targets.items()))
    goal_nl = [f"Your goal is to build blocks so that {towers}.",
               "You cannot have an unplaced block at the end."]
    return text, "\n".join(desc + goal_nl), "\n".join(goal_nl)


def termes(out: Path, rng):
    for i in range(TASKS):
        rows, cols = (3, 3) if i < 10 else (4, 3)
        max_height = 2 if i < 14 else 3
        depot = f"pos-{rows - 1}-0"
        candidates = [f"pos-{r}-{c}" for r in range(rows) for c in range(cols)
                      if f"pos-{r}-{c}" != depot and not (r == rows - 1 and c == 1)
                      and not (r == rows - 2 and c == 0)]
        towers_n = 1 if i % 3 else 2
        chosen = rng.sample(candidates, towers_n)
        targets = {p: rng.randint(1, max_height) for p in chosen}
        text, desc, goal = termes_problem(f"termes-{i + 1:02d}", rows, cols, max_height,
                                          depot, depot, targets)
        write(out / f"p{i + 1:02d}.pddl", text)
        write_nl(out / f"p{i + 1:02d}.nl.json", desc, goal)


# appendix instances --------------------------------------------------------

def appendix(out: Path):
    # The three-block problem used by both prompt examples.
    write(out / "bw-rand-3.pddl", problem_text(
        "bw-rand-3", "blocksworld-4ops", ["b1 b2 b3"],
        ["(arm-empty)", "(on-table b1)", "(on b2 b3)", "(on b3 b1)", "(clear b2)"],
        ["(on b3 b2)", "(on b1 b3)"]))
    write_nl(out / "bw-rand-3.nl.json",
             "You have 3 blocks.\nb2 is on top of b3.\nb3 is on top of b1.\n"
             "b1 is on the table.\nb2 is clear.\nYour arm is empty.\n"
             "Your goal is to move the blocks.\nb3 should be on top of b2.\n"
             "b1 should be on top of b3.",
             "Your goal is to move the blocks.\nb3 should be on top of b2.\n"
             "b1 should be on top of b3.")
    write(out / "blocksworld-5.pddl", problem_text(
        "blocksworld-5", "blocksworld-4ops", ["b1 b2 b3 b4 b5"],
        ["(arm-empty)", "(on b2 b5)", "(on b5 b1)", "(on b1 b4)", "(on b3 b2)",
         "(on-table b4)", "(clear b3)"],
        ["(on b4 b3)"]))
    write(out / "blocksworld-5.plan", "\n".join([
        "(unstack b3 b2)", "(putdown b3)", "(unstack b2 b5)", "(putdown b2)",
        "(unstack b5 b1)", "(putdown b5)", "(unstack b1 b4)", "(putdown b1)",
        "(pickup b4)", "(stack b4 b3)"]) + "\n")

    write(out / "barman-1.pddl", problem_text(
        "barman-1", "barman",
        ["shaker1 - shaker", "left right - hand", "shot1 shot2 shot3 - shot",
         "ingredient1 ingredient2 ingredient3 - ingredient", "cocktail1 - cocktail",
         "dispenser1 dispenser2 dispenser3 - dispenser", "l0 l1 l2 - level"],
        ["(ontable shaker1)", "(ontable shot1)", "(ontable shot2)", "(ontable shot3)",
         "(dispenses dispenser1 ingredient1)", "(dispenses dispenser2 ingredient2)",
         "(dispenses dispenser3 ingredient3)", "(clean shaker1)", "(clean shot1)",
         "(clean shot2)", "(clean shot3)", "(empty shaker1)", "(empty shot1)",
         "(empty shot2)", "(empty shot3)", "(handempty left)", "(handempty right)",
         "(shaker-empty-level shaker1 l0)", "(shaker-level shaker1 l0)",
         "(next l0 l1)", "(next l1 l2)",
         "(cocktail-part1 cocktail1 ingredient3)", "(cocktail-part2 cocktail1 ingredient1)"],
        ["(contains shot1 cocktail1)"]))
    write(out / "barman-1.plan", "\n".join([
        "(grasp right shot2)",
        "(fill-shot shot2 ingredient1 right left dispenser1)",
        "(pour-shot-to-clean-shaker shot2 ingredient1 shaker1 right l0 l1)",
        "(clean-shot shot2 ingredient1 right left)",
        "(fill-shot shot2 ingredient3 right left dispenser3)",
        "(grasp left shaker1)",
        "(pour-shot-to-used-shaker shot2 ingredient3 shaker1 right l1 l2)",
        "(leave right shot2)",
        "(shake cocktail1 ingredient3 ingredient1 shaker1 left right)",
        "(pour-shaker-to-shot cocktail1 shot1 left shaker1 l2 l1)"]) + "\n")

    write(out / "gripper-4-6.pddl", problem_text(
        "gripper-4-6", "gripper-strips",
        ["robot1 - robot", "lgripper2 rgripper2 - gripper",
         "room1 room2 room3 room4 - room",
         "ball1 ball2 ball3 ball4 ball5 ball6 - object"],
        ["(at-robby robot1 room3)", "(free robot1 lgripper2)", "(free robot1 rgripper2)",
         "(at ball1 room3)", "(at ball2 room1)", "(at ball3 room3)", "(at ball4 room2)",
         "(at ball5 room4)", "(at ball6 room4)"],
        ["(at ball1 room4)", "(at ball2 room1)", "(at ball3 room1)", "(at ball4 room2)",
         "(at ball5 room1)", "(at ball6 room1)"]))
    write(out / "gripper-4-6.plan", "\n".join([
        "(pick robot1 ball1 room3 lgripper2)", "(move robot1 room3 room1)",
        "(move robot1 room1 room4)", "(pick robot1 ball5 room4 rgripper2)",
        "(drop robot1 ball1 room4 lgripper2)", "(pick robot1 ball6 room4 lgripper2)",
        "(move robot1 room4 room1)", "(drop robot1 ball6 room1 lgripper2)",
        "(drop robot1 ball5 room1 rgripper2)", "(move robot1 room1 room3)",
        "(pick robot1 ball3 room3 lgripper2)", "(move robot1 room3 room1)",
        "(drop robot1 ball3 room1 lgripper2)"]) + "\n")

    write(out / "gripper-2-2-2.pddl", problem_text(
        "gripper-2-2-2", "gripper-strips",
        ["robot1 - robot", "rgripper1 lgripper1 - gripper", "room1 room2 - room",
         "ball1 ball2 - object"],
        ["(at-robby robot1 room1)", "(free robot1 rgripper1)", "(free robot1 lgripper1)",
         "(at ball1 room1)", "(at ball2 room1)"],
        ["(at ball1 room2)", "(at ball2 room2)"]))
    write_nl(out / "gripper-2-2-2.nl.json",
             "You control 1 robots, each robot has a left gripper and a right gripper.\n"
             "There are 2 rooms and 2 balls.\nrobot1 is in room1.\n"
             "ball2 is in room1. ball1 is in room1.\nThe robots' grippers are free.\n"
             "Your goal is to transport the balls to their destinations.\n"
             "ball1 should be in room2.\nball2 should be in room2.",
             "Your goal is to transport the balls to their destinations.\n"
             "ball1 should be in room2.\nball2 should be in room2.")

    text, desc, goal = tyreworld_problem("tyreworld-1", 1)
    write(out / "tyreworld-1.pddl", text)
    write_nl(out / "tyreworld-1.nl.json", desc, goal)
    text, _, _ = tyreworld_problem("tyreworld-2", 2)
    write(out / "tyreworld-2.pddl", text)
    write(out / "tyreworld-2.plan", "\n".join([
        "(loosen nuts2 the-hub2)", "(jack-up the-hub2)", "(undo nuts2 the-hub2)",
        "(remove-wheel w2 the-hub2)", "(loosen nuts1 the-hub1)", "(jack-up the-hub1)",
        "(undo nuts1 the-hub1)", "(remove-wheel w1 the-hub1)", "(inflate r2)",
        "(inflate r1)", "(open boot)", "(fetch r1 boot)", "(put-on-wheel r1 the-hub1)",
        "(do-up nuts1 the-hub1)", "(jack-down the-hub1)", "(tighten nuts1 the-hub1)",
        "(fetch r2 boot)", "(put-on-wheel r2 the-hub2)", "(do-up nuts2 the-hub2)",
        "(jack-down the-hub2)", "(tighten nuts2 the-hub2)", "(put-away w1 boot)",
        "(put-away w2 boot)", "(close boot)"]) + "\n")

    text, desc, goal = termes_problem("termes-3x3", 3, 3, 2, "pos-2-0", "pos-2-0",
                                      {"pos-1-1": 2})
    write(out / "termes-3x3.pddl", text)
    write_nl(out / "termes-3x3.nl.json", desc, goal)
    write(out / "termes-3x3.plan", "\n".join([
        "(create-block pos-2-0)", "(place-block pos-2-0 pos-1-0 n0 n1)",
        "(create-block pos-2-0)", "(move pos-2-0 pos-2-1 n0)",
        "(place-block pos-2-1 pos-1-1 n0 n1)", "(move pos-2-1 pos-2-0 n0)",
        "(create-block pos-2-0)", "(move-up pos-2-0 n0 pos-1-0 n1)",
        "(place-block pos-1-0 pos-1-1 n1 n2)", "(move-down pos-1-0 n1 pos-2-0 n0)",
        "(remove-block pos-2-0 pos-1-0 n1 n0)", "(destroy-block pos-2-0)"]) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", type=Path,
                        default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()
    generators = {"blocksworld": blocksworld, "gripper": gripper, "barman": barman,
                  "tyreworld": tyreworld, "termes": termes}
    for name, generate in generators.items():
        out = args.data / "domains" / name / "problems"
        for old in out.glob("p*"):
            old.unlink()
        generate(out, random.Random(f"{args.seed}-{name}"))
    appendix(args.data / "appendix")


if __name__ == "__main__":
    main()
