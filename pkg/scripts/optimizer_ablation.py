"""Compare Adam with plain gradient steps for the learners and the planner.

Runs the no-planner baseline, the exact planner and the turn-off phase for
each combination, with ten seeds per cell.
"""

import argparse
import itertools

from mechdesign.config import ExperimentConfig, apply_overrides
from mechdesign.engine import aggregate, phase_rows, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--games", default="pd,chicken,stag_hunt")
    ap.add_argument("--seeds", default="0..9")
    args = ap.parse_args()
    for game, learner, planner in itertools.product(args.games.split(","), ("adam", "sgd"), ("adam", "sgd")):
        base = {"game.name": game, "learner.optimizer": learner, "planner.optimizer": planner, "seeds": args.seeds}
        off = aggregate(run_experiment(apply_overrides(ExperimentConfig(), {**base, "planner.enabled": "false"})))
        runs = run_experiment(apply_overrides(ExperimentConfig(), {**base, "episodes_phase2": "4000"}))
        on = aggregate([(s, phase_rows(r, 1)) for s, r in runs])
        after = aggregate(runs)
        print(f"{game:10s} learner={learner:4s} planner={planner:4s}  no planner {off.p_all_c.mean:.4f}"
              f"  planner {on.p_all_c.mean:.4f}  turn-off {after.p_all_c.mean:.4f} +- {after.p_all_c.std:.4f}")


if __name__ == "__main__":
    main()
