"""Built-in benchmark families and the native JSON model format.

Families:
  * the three-state paper-writing example with its recognition/effort query,
  * layered exponentially-branching models,
  * deterministic and probabilistic deep sea treasure,
  * puddle-world racetracks driven from an ASCII map.

All generators are pure functions of their parameters and emit models that
pass `validate_mdp`; every absorbing state carries an explicit self-loop so
models stay deadlock-free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import Action, Direction, Kind, Mdp, Objective, validate_mdp

FORMAT_NAME = "mosmc-model"
FORMAT_VERSION = 1


@dataclass
class ModelBundle:
    mdp: Mdp
    queries: dict[str, tuple[Objective, ...]]

    def query(self, name: str = "default") -> tuple[Objective, ...]:
        return self.queries[name]


class ModelFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Paper-writing example: write a paper or stop; submit or archive.

def model_mr() -> ModelBundle:
    """Three-state example: maximise recognition, minimise effort.

    init --write(+10 effort)--> paper (0.85) | done (0.15); init --stop--> done.
    paper --subm(+24 effort)--> done (0.2, +4 recognition) | paper (0.8);
    paper --arch(+1 recognition)--> done. done self-loops.
    """
    init, paper, done = 0, 1, 2
    actions = (
        (
            Action("write", ((paper, 0.85), (done, 0.15))),
            Action("stop", ((done, 1.0),)),
        ),
        (
            Action("subm", ((done, 0.2), (paper, 0.8))),
            Action("arch", ((done, 1.0),)),
        ),
        (Action("tau", ((done, 1.0),)),),
    )
    rewards = {
        "rec": {(paper, 0, done): 4.0, (paper, 1, done): 1.0},
        "eff": {(init, 0, paper): 10.0, (init, 0, done): 10.0,
                (paper, 0, done): 24.0, (paper, 0, paper): 24.0},
    }
    mdp = Mdp(init, actions, rewards, ("init", "paper", "done"), name="mr")
    query = (
        Objective(Kind.EXP_REWARD, Direction.MAX, frozenset({done}), "rec"),
        Objective(Kind.EXP_REWARD, Direction.MIN, frozenset({done}), "eff"),
    )
    return ModelBundle(mdp, {"default": query})


# ---------------------------------------------------------------------------
# Exponential model: layered binary branching, rewards on final branches.

def gen_exponential(depth: int) -> ModelBundle:
    """Layered model with states numbered 1..2^(depth+1)-1.

    Internal layers 1..depth; layer-`depth` actions branch into the final
    layer. State s has actions alpha (0.8 -> 2s, 0.2 -> 2s+1) and beta
    (0.1 -> 2s, 0.9 -> 2s+1). A branch entering final state s_f carries the
    two rewards s_f / 2^depth and 1 - ((s_f - 2^(depth-1)) / 2^depth)^2.
    Both objectives maximise; per-run value bounds are declared so the model
    works with fixed-precision sampling.
    """
    if not 1 <= depth <= 30:
        raise ValueError("depth must be in 1..30")
    first_final = 1 << depth
    n_numbered = (1 << (depth + 1)) - 1  # states 1 .. 2^(depth+1) - 1

    def sid(s):  # numbered states are 1-based
        return s - 1

    def r1(s_f):
        return s_f / 2 ** depth

    def r2(s_f):
        return 1.0 - ((s_f - 2 ** (depth - 1)) / 2 ** depth) ** 2

    actions = []
    rewards = {"r1": {}, "r2": {}}
    for s in range(1, n_numbered + 1):
        if s < first_final:
            lo, hi = 2 * s, 2 * s + 1
            acts = (
                Action("alpha", ((sid(lo), 0.8), (sid(hi), 0.2))),
                Action("beta", ((sid(lo), 0.1), (sid(hi), 0.9))),
            )
            for ai in (0, 1):
                for t in (lo, hi):
                    if t >= first_final:
                        rewards["r1"][(sid(s), ai, sid(t))] = r1(t)
                        rewards["r2"][(sid(s), ai, sid(t))] = r2(t)
        else:
            acts = (Action("tau", ((sid(s), 1.0),)),)
        actions.append(acts)
    labels = tuple(str(s) for s in range(1, n_numbered + 1))
    mdp = Mdp(sid(1), tuple(actions), rewards, labels, name=f"exponential-{depth}")
    finals = frozenset(sid(s) for s in range(first_final, n_numbered + 1))
    r1_vals = [r1(s) for s in range(first_final, n_numbered + 1)]
    r2_vals = [r2(s) for s in range(first_final, n_numbered + 1)]
    query = (
        Objective(Kind.EXP_REWARD, Direction.MAX, finals, "r1",
                  bounds=(min(r1_vals), max(r1_vals))),
        Objective(Kind.EXP_REWARD, Direction.MAX, finals, "r2",
                  bounds=(min(r2_vals), max(r2_vals))),
    )
    return ModelBundle(mdp, {"default": query})


# ---------------------------------------------------------------------------
# Deep sea treasure.

@dataclass(frozen=True)
class DeepSeaGrid:
    """Column spec: treasure depth and value per column.

    Depths must be non-decreasing and values strictly increasing, so deeper
    treasures are worth more.
    """

    depths: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.depths) != len(self.values) or not self.depths:
            raise ValueError("need one (depth, value) pair per column")
        if any(d < 1 for d in self.depths):
            raise ValueError("treasure depths must be >= 1")
        if any(b < a for a, b in zip(self.depths, self.depths[1:])):
            raise ValueError("treasure depths must be non-decreasing")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("treasure values must be strictly increasing")


CLASSIC_GRID = DeepSeaGrid(
    depths=(1, 2, 3, 4, 4, 4, 7, 7, 9, 10),
    values=(1.0, 2.0, 3.0, 5.0, 8.0, 16.0, 24.0, 50.0, 74.0, 124.0),
)
TOY_GRID = DeepSeaGrid(depths=(1, 2, 3), values=(1.0, 3.0, 4.0))
TINY_GRID = DeepSeaGrid(depths=(1, 1), values=(1.0, 2.0))


def gen_deep_sea(variant: str = "deterministic", grid: DeepSeaGrid = TOY_GRID,
                 implosion_probability: float = 0.1) -> ModelBundle:
    """Submarine on a column grid: minimise fuel, maximise collected treasure.

    Moves: dive (down), search (right), surface (up-right). Leaving the grid
    wrecks the submarine with zero treasure; every move costs one fuel. Every
    move strictly increases 2*column + row, so all strategies terminate and
    both expected rewards are finite. In the probabilistic variant a second
    consecutive dive implodes the submarine with the given probability.
    """
    if variant not in ("deterministic", "probabilistic"):
        raise ValueError("variant must be 'deterministic' or 'probabilistic'")
    probabilistic = variant == "probabilistic"
    if probabilistic and not 0.0 < implosion_probability < 1.0:
        raise ValueError("implosion probability must be in (0, 1)")
    cols = len(grid.depths)
    dove_flags = (False, True) if probabilistic else (False,)
    ids: dict = {}
    labels = []

    def add(key, label):
        ids[key] = len(labels)
        labels.append(label)

    for c in range(cols):
        for r in range(grid.depths[c]):
            for dove in dove_flags:
                add(("water", r, c, dove), f"w{r}-{c}" + ("+d" if dove else ""))
    for c in range(cols):
        add(("treasure", c), f"treasure{c}")
    add(("wrecked",), "wrecked")
    if probabilistic:
        add(("imploded",), "imploded")

    fuel: dict = {}
    treasure: dict = {}
    actions: list = [None] * len(labels)

    def water_or_goal(r, c, dove):
        if c >= cols or r < 0:
            return ids[("wrecked",)]
        if r == grid.depths[c]:
            return ids[("treasure", c)]
        return ids[("water", r, c, dove if probabilistic else False)]

    for c in range(cols):
        for r in range(grid.depths[c]):
            for dove in dove_flags:
                s = ids[("water", r, c, dove)]
                dive_t = water_or_goal(r + 1, c, True)
                if probabilistic and dove:
                    dive = Action("dive", ((dive_t, 1.0 - implosion_probability),
                                           (ids[("imploded",)], implosion_probability)))
                else:
                    dive = Action("dive", ((dive_t, 1.0),))
                right = Action("search", ((water_or_goal(r, c + 1, False), 1.0),))
                surface = Action("surface", ((water_or_goal(r - 1, c + 1, False), 1.0),))
                acts = (dive, right, surface)
                actions[s] = acts
                for ai, act in enumerate(acts):
                    for t, _p in act.branches:
                        fuel[(s, ai, t)] = 1.0
                        if t == ids[("treasure", c)]:
                            treasure[(s, ai, t)] = grid.values[c]
    goal_states = {ids[("treasure", c)] for c in range(cols)} | {ids[("wrecked",)]}
    if probabilistic:
        goal_states.add(ids[("imploded",)])
    for key in list(ids):
        if key[0] in ("treasure", "wrecked", "imploded"):
            s = ids[key]
            actions[s] = (Action("tau", ((s, 1.0),)),)
    # Longest path through the move DAG bounds per-run fuel exactly.
    max_fuel = _deep_sea_longest_path(actions, ids, goal_states)
    mdp = Mdp(ids[("water", 0, 0, False)], tuple(actions),
              {"fuel": fuel, "treasure": treasure}, tuple(labels),
              name=f"deep-sea-{variant}-{cols}")
    query = (
        Objective(Kind.EXP_REWARD, Direction.MIN, frozenset(goal_states), "fuel",
                  bounds=(0.0, float(max_fuel))),
        Objective(Kind.EXP_REWARD, Direction.MAX, frozenset(goal_states), "treasure",
                  bounds=(0.0, max(grid.values))),
    )
    return ModelBundle(mdp, {"default": query})


def _deep_sea_longest_path(actions, ids, goal_states) -> int:
    import functools

    @functools.lru_cache(maxsize=None)
    def longest(s):
        if s in goal_states:
            return 0
        return 1 + max(longest(t) for act in actions[s] for t, _p in act.branches)

    return longest(ids[("water", 0, 0, False)])


# ---------------------------------------------------------------------------
# Puddle-world racetrack.

TRACK_CHARS = {"s", "f", ".", "x", "#"}


@dataclass(frozen=True)
class TrackMap:
    """ASCII racetrack: 's' start, 'f' finish, '.' track, 'x' puddle, '#' wall."""

    rows: tuple[str, ...]
    vmax: int = 2

    def __post_init__(self):
        if not self.rows:
            raise ValueError("empty map")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("map must be rectangular")
        chars = set("".join(self.rows))
        if not chars <= TRACK_CHARS:
            raise ValueError(f"invalid map characters: {sorted(chars - TRACK_CHARS)}")
        if "s" not in chars or "f" not in chars:
            raise ValueError("map needs at least one start and one finish cell")
        if self.vmax < 1:
            raise ValueError("vmax must be >= 1")

    @property
    def height(self):
        return len(self.rows)

    @property
    def width(self):
        return len(self.rows[0])

    def cell(self, r, c):
        if 0 <= r < self.height and 0 <= c < self.width:
            return self.rows[r][c]
        return "#"


CORRIDOR_TRACK = TrackMap(("s..f",), vmax=1)
# Straight through the puddle takes two moves; the clean detour through the
# bottom row needs three (a one-step velocity reversal is impossible), so
# fuel and puddle penalty genuinely trade off. The blocked corner keeps the
# reachable state space small enough for exact strategy enumeration.
SHORTCUT_TRACK = TrackMap(("sxf", "..#"), vmax=1)


def gen_racetrack_puddle(track: TrackMap, slip: float = 0.9,
                         crash_penalty: float | None = None) -> ModelBundle:
    """Racetrack with puddle-world rewards: minimise fuel and puddle penalty.

    State is (position, velocity); the nine acceleration actions apply with
    probability `slip`, otherwise the velocity is unchanged. Standing still
    is not enabled at zero velocity, so every strategy almost surely crashes
    or finishes (a run of failed accelerations drives the car straight into
    a wall), keeping both expected rewards finite. Crashing absorbs in a
    fail state and costs `crash_penalty` extra fuel (default: map area), so
    wrecking the car is never the cheap way to end a run. Both goal sets are
    finish-or-fail; the puddle penalty charges one unit per step spent on a
    puddle cell.
    """
    if not 0.0 < slip <= 1.0:
        raise ValueError("slip success probability must be in (0, 1]")
    if crash_penalty is None:
        crash_penalty = float(track.height * track.width * 2)
    vmax = track.vmax
    starts = [(r, c) for r in range(track.height) for c in range(track.width)
              if track.cell(r, c) == "s"]
    ids: dict = {}
    labels: list[str] = []

    def state_id(key, label):
        if key not in ids:
            ids[key] = len(labels)
            labels.append(label)
        return ids[key]

    crashed = state_id(("crashed",), "crashed")
    finished = state_id(("finished",), "finished")

    def move_outcome(r, c, vr, vc):
        """Destination after one step at velocity (vr, vc), walking cells."""
        steps = max(abs(vr), abs(vc))
        pr, pc = r, c
        for i in range(1, steps + 1):
            pr = r + round(vr * i / steps)
            pc = c + round(vc * i / steps)
            cell = track.cell(pr, pc)
            if cell == "#":
                return ("crashed",)
            if cell == "f":
                return ("finished",)
        return ("pos", pr, pc)

    # Explore reachable states breadth-first; absorbing states are shared.
    actions_by_state: dict = {}
    fuel: dict = {}
    puddle: dict = {}

    def accel_actions(r, c, vr, vc):
        acts = []
        for ar in (-1, 0, 1):
            for ac in (-1, 0, 1):
                if (vr, vc) == (0, 0) and (ar, ac) == (0, 0):
                    continue  # a permanent standstill would never terminate
                nvr = max(-vmax, min(vmax, vr + ar))
                nvc = max(-vmax, min(vmax, vc + ac))
                acts.append((f"a{ar:+d}{ac:+d}", (nvr, nvc)))
        return acts

    pending = []
    for i, (r, c) in enumerate(starts):
        key = ("pos+v", r, c, 0, 0)
        state_id(key, f"({r},{c})v(0,0)")
        pending.append(key)
    seen = set(pending)
    while pending:
        key = pending.pop()
        _tag, r, c, vr, vc = key
        s = ids[key]
        acts = []
        for name, (nvr, nvc) in accel_actions(r, c, vr, vc):
            outcomes = [(slip, nvr, nvc)]
            if slip < 1.0 and (nvr, nvc) != (vr, vc):
                outcomes.append((1.0 - slip, vr, vc))
            else:
                outcomes = [(1.0, nvr, nvc)]
            branches: dict[int, float] = {}
            for prob, uvr, uvc in outcomes:
                dest = move_outcome(r, c, uvr, uvc)
                if dest[0] == "pos":
                    tkey = ("pos+v", dest[1], dest[2], uvr, uvc)
                    t = state_id(tkey, f"({dest[1]},{dest[2]})v({uvr},{uvc})")
                    if tkey not in seen:
                        seen.add(tkey)
                        pending.append(tkey)
                else:
                    t = ids[dest]
                branches[t] = branches.get(t, 0.0) + prob
            acts.append(Action(name, tuple(sorted(branches.items()))))
        actions_by_state[s] = tuple(acts)
    n = len(labels)
    actions: list = [None] * n
    for key, s in ids.items():
        if key[0] in ("crashed", "finished"):
            actions[s] = (Action("tau", ((s, 1.0),)),)
        else:
            actions[s] = actions_by_state[s]
    # Rewards: 1 fuel per transition (+ penalty on crashing branches);
    # 1 puddle unit per step taken from a puddle cell.
    for key, s in ids.items():
        if key[0] != "pos+v":
            continue
        _tag, r, c, _vr, _vc = key
        on_puddle = track.cell(r, c) == "x"
        for ai, act in enumerate(actions[s]):
            for t, _p in act.branches:
                fuel[(s, ai, t)] = 1.0 + (crash_penalty if t == crashed else 0.0)
                if on_puddle:
                    puddle[(s, ai, t)] = 1.0
    if len(starts) > 1:
        # Single initial state dispatching uniformly over the start cells.
        init = state_id(("init",), "init")
        actions.append((Action("go", tuple(
            (ids[("pos+v", r, c, 0, 0)], 1.0 / len(starts)) for r, c in starts
        )),))
    else:
        init = ids[("pos+v", starts[0][0], starts[0][1], 0, 0)]
    mdp = Mdp(init, tuple(actions), {"fuel": fuel, "puddle": puddle},
              tuple(labels), name="racetrack")
    goal = frozenset({crashed, finished})
    query = (
        Objective(Kind.EXP_REWARD, Direction.MIN, goal, "fuel"),
        Objective(Kind.EXP_REWARD, Direction.MIN, goal, "puddle"),
    )
    return ModelBundle(mdp, {"default": query})


# ---------------------------------------------------------------------------
# JSON model files.

def _objective_to_json(obj: Objective) -> dict:
    return {
        "kind": obj.kind.value,
        "direction": obj.direction.value,
        "goal": sorted(obj.goal),
        "reward": obj.reward,
        "bounds": list(obj.bounds) if obj.bounds is not None else None,
    }


def _objective_from_json(data: dict, where: str) -> Objective:
    try:
        kind = Kind(data["kind"])
        direction = Direction(data["direction"])
        goal = frozenset(int(g) for g in data["goal"])
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"{where}: bad objective: {exc}") from None
    bounds = data.get("bounds")
    return Objective(kind, direction, goal, data.get("reward"),
                     tuple(bounds) if bounds is not None else None)


def save_model(bundle: ModelBundle, path) -> None:
    model = bundle.mdp
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "name": model.name,
        "states": model.n_states,
        "labels": list(model.state_labels) if model.state_labels else None,
        "initial": model.initial_state,
        "actions": [
            [
                {"name": act.name, "branches": [[t, p] for t, p in act.branches]}
                for act in acts
            ]
            for acts in model.actions
        ],
        "rewards": {
            name: [[s, ai, t, v] for (s, ai, t), v in sorted(entries.items())]
            for name, entries in model.rewards.items()
        },
        "queries": {
            qname: [_objective_to_json(o) for o in objs]
            for qname, objs in bundle.queries.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> ModelBundle:
    """Parse and validate a model file; raises ModelFormatError with the
    offending field on schema violations."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON: {exc}") from None
    if doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported format version {doc.get('version')}")
    try:
        n_states = int(doc["states"])
        initial = int(doc["initial"])
        raw_actions = doc["actions"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: missing or malformed field: {exc}") from None
    if len(raw_actions) != n_states:
        raise ModelFormatError(f"{path}: 'actions' lists {len(raw_actions)} states, header says {n_states}")
    actions = []
    for s, acts in enumerate(raw_actions):
        state_actions = []
        for ai, act in enumerate(acts):
            where = f"{path}: actions[{s}][{ai}]"
            try:
                name = act["name"]
                branches = tuple((int(t), float(p)) for t, p in act["branches"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ModelFormatError(f"{where}: {exc}") from None
            for bi, (t, p) in enumerate(branches):
                if p <= 0.0:
                    raise ModelFormatError(f"{where}.branches[{bi}]: probability {p} must be positive")
                if not 0 <= t < n_states:
                    raise ModelFormatError(f"{where}.branches[{bi}]: target {t} out of range")
            state_actions.append(Action(name, branches))
        actions.append(tuple(state_actions))
    rewards = {}
    for name, entries in doc.get("rewards", {}).items():
        table = {}
        for row in entries:
            try:
                s, ai, t, v = row
                table[(int(s), int(ai), int(t))] = float(v)
            except (TypeError, ValueError) as exc:
                raise ModelFormatError(f"{path}: rewards[{name}]: bad row {row}: {exc}") from None
        rewards[name] = table
    labels = doc.get("labels")
    mdp = Mdp(initial, tuple(actions), rewards,
              tuple(labels) if labels else None, name=doc.get("name", "model"))
    queries = {
        qname: tuple(_objective_from_json(o, f"{path}: queries[{qname}][{i}]")
                     for i, o in enumerate(objs))
        for qname, objs in doc.get("queries", {}).items()
    }
    bundle = ModelBundle(mdp, queries)
    report = validate_mdp(mdp, queries.get("default", ()))
    if not report.ok:
        raise ModelFormatError(f"{path}: " + "; ".join(report.violations))
    return bundle


BUILTIN_MODELS = {
    "mr": model_mr,
    "exponential": gen_exponential,
    "deep-sea-det": lambda grid=TOY_GRID: gen_deep_sea("deterministic", grid),
    "deep-sea-prob": lambda grid=TOY_GRID: gen_deep_sea("probabilistic", grid),
    "racetrack-corridor": lambda: gen_racetrack_puddle(CORRIDOR_TRACK),
    "racetrack-shortcut": lambda: gen_racetrack_puddle(SHORTCUT_TRACK),
}


def builtin_model(spec: str) -> ModelBundle:
    """Resolve builtin model specs like "mr", "exponential:3", or
    "deep-sea-det:tiny"."""
    name, _, arg = spec.partition(":")
    grids = {"toy": TOY_GRID, "tiny": TINY_GRID, "classic": CLASSIC_GRID}
    if name == "exponential":
        return gen_exponential(int(arg) if arg else 3)
    if name in ("deep-sea-det", "deep-sea-prob"):
        grid = grids[arg] if arg else TOY_GRID
        variant = "deterministic" if name.endswith("det") else "probabilistic"
        return gen_deep_sea(variant, grid)
    if name in BUILTIN_MODELS and not arg:
        return BUILTIN_MODELS[name]()
    raise ValueError(f"unknown builtin model {spec!r}; known: {sorted(BUILTIN_MODELS)}")
