"""The incremental scheme: a two-sided statistical band around the front.

Sampling batches of fresh strategies at a fixed precision while shrinking
each batch's error budget geometrically keeps the total error below alpha no
matter when we stop. The pessimistic corners give a sound underapproximation
at every interruption point; the optimistic corners converge to an
overapproximation in the long run.
"""

import pathlib

import mosmc

out_dir = pathlib.Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

bundle = mosmc.gen_deep_sea("deterministic", mosmc.TOY_GRID)
model, query = bundle.mdp, bundle.query()
exact = mosmc.exact_pareto_front(model, query)
print("true front (fuel, treasure):", [tuple(round(x, 2) for x in c) for c in exact.corners])

for budget in (20_000, 80_000, 320_000):
    config = mosmc.ExperimentConfig(
        algorithm="incremental", m=10, alpha=0.1, epsilon=0.1, batch_factor=0.1,
        max_runs=budget, strategy_seed=1, simulation_seed=0,
    )
    result = mosmc.run_experiment(config, model, query)
    under = [tuple(round(x, 2) for x in c) for c in result.under_front.corners]
    over = [tuple(round(x, 2) for x in c) for c in result.over_front.corners]
    print(f"\nafter {result.total_runs:>7} runs "
          f"({len(result.trajectory)} strategies, {result.batches} batches)")
    print("  under:", under)
    print("  over: ", over)
    if result.hypervolume_under is not None:
        print(f"  hypervolume: under {result.hypervolume_under:.3f}, "
              f"over {result.hypervolume_over:.3f} "
              f"(reference {tuple(round(x, 2) for x in result.reference_point)})")

# The per-strategy run counts grow batch by batch: later strategies carry a
# smaller error budget at the same precision target.
runs_per_strategy = [b - a for (a, _), (b, _) in
                     zip(result.trajectory, result.trajectory[1:])]
print("\nruns per strategy across the stream:",
      runs_per_strategy[:3], "...", runs_per_strategy[-3:])

with open(out_dir / "band_trajectory.csv", "w") as fh:
    fh.write("completed_strategies,cumulative_runs\n")
    for runs, count in result.trajectory:
        fh.write(f"{count},{runs}\n")
print(f"trajectory exported to {out_dir / 'band_trajectory.csv'}")
