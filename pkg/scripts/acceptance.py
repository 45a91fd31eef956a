""" Long learning runs on the toy environments; writes a per-seed JSON report
"""
import json
import logging
from dataclasses import replace
from typing import Dict, List

from mgan.envs import brute_force_optimal, make_env
from mgan.learning import RunConfig, TrainConfig, train

# name: (environment, algorithm, env steps, greedy return that counts as solved)
CASES = {
    "matrix": ("matrix", "mgan", 20_000, 10.0),
    "two_step": ("two_step", "mgan", 50_000, 7.0),
    "two_step_vdn": ("two_step", "vdn", 50_000, 7.0),
    "skirmish": ("skirmish", "mgan", 100_000, None),
}
SEEDS = (0, 1, 2, 3, 4)
REQUIRED_PASSES = 4
SKIRMISH_WIN_RATE = 0.9


def run_case(name: str, seeds=SEEDS) -> Dict:
    """Train one case for every seed and report the final greedy evaluation"""
    env_name, algorithm, steps, threshold = CASES[name]
    optimum = None
    if env_name != "skirmish":
        optimum, _ = brute_force_optimal(make_env(env_name))
    per_seed: List[Dict] = []
    for seed in seeds:
        train_cfg = replace(TrainConfig(), total_env_steps=steps, seed=seed)
        result = train(RunConfig(env_name=env_name, algorithm=algorithm, train=train_cfg))
        final = result.metrics[-1]
        if threshold is None:
            passed = final["win_rate"] >= SKIRMISH_WIN_RATE
        else:
            passed = final["mean_return"] >= threshold
        per_seed.append({"seed": seed, "mean_return": final["mean_return"], "win_rate": final["win_rate"], "passed": passed})
    passes = sum(row["passed"] for row in per_seed)
    return {
        "case": name,
        "algorithm": algorithm,
        "env_steps": steps,
        "optimum": optimum,
        "seeds": per_seed,
        "passed": passes >= REQUIRED_PASSES,
    }


def _parse_args():
    import argparse

    parser = argparse.ArgumentParser(description="Run the pymgan learning acceptance cases")
    parser.add_argument("cases", nargs="*", default=list(CASES), help="cases to run; default all")
    parser.add_argument("--out", default="acceptance_report.json", help="report file")

    return parser.parse_args()


if __name__ == "__main__":
    args = _parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    report = [run_case(name) for name in args.cases]
    with open(args.out, "w", encoding="utf-8") as fobj:
        json.dump(report, fobj, indent=2)
    print(json.dumps([{"case": row["case"], "passed": row["passed"]} for row in report]))
