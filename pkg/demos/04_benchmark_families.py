"""Tour of the built-in benchmark families and the model file format.

Each generator is a pure function of its parameters, emits a validated MDP
plus a default two-objective query, and round-trips through the JSON model
format. Small instances are solved exactly for reference.
"""

import pathlib

import mosmc

out_dir = pathlib.Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)


def describe(bundle, oracle_cap=None):
    model, query = bundle.mdp, bundle.query()
    kinds = ", ".join(f"{o.direction.value} {o.reward or 'reach'}" for o in query)
    print(f"{model.name}: {model.n_states} states, objectives ({kinds})")
    if oracle_cap:
        front = mosmc.exact_pareto_front(model, query, cap=oracle_cap)
        corners = [tuple(round(x, 4) for x in c) for c in front.corners]
        print(f"  exact front ({len(front.points)} strategy classes): {corners}")


# Exponentially branching layers: the state space doubles per layer while
# simulation paths stay linear in the depth.
for depth in (2, 3, 10):
    describe(mosmc.gen_exponential(depth), oracle_cap=10**6 if depth <= 3 else None)

# Deep sea treasure: deeper treasures are worth more but cost fuel; the
# probabilistic variant risks imploding on two consecutive dives.
describe(mosmc.gen_deep_sea("deterministic", mosmc.TOY_GRID), oracle_cap=10**5)
describe(mosmc.gen_deep_sea("probabilistic", mosmc.TOY_GRID), oracle_cap=10**5)
describe(mosmc.gen_deep_sea("deterministic", mosmc.CLASSIC_GRID))

# Puddle-world racetracks: reach the finish quickly while avoiding puddle
# cells; slipping keeps the old velocity with probability 0.1.
describe(mosmc.gen_racetrack_puddle(mosmc.CORRIDOR_TRACK), oracle_cap=10**5)
describe(mosmc.gen_racetrack_puddle(mosmc.SHORTCUT_TRACK), oracle_cap=10**5)

custom = mosmc.TrackMap(("s.xf", "...."), vmax=1)
describe(mosmc.gen_racetrack_puddle(custom), oracle_cap=10**6)

# Model files round-trip exactly, including the action order that strategy
# hashing depends on.
bundle = mosmc.gen_exponential(3)
path = out_dir / "exponential_3.json"
mosmc.save_model(bundle, path)
back = mosmc.load_model(path)
assert back.mdp.actions == bundle.mdp.actions
print(f"\nsaved and re-parsed {path.name}: "
      f"{path.stat().st_size} bytes, round-trip exact")
