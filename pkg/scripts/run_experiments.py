#!/usr/bin/env python3
"""Run the desk-scale experiments and print their numbers.

    python3 scripts/run_experiments.py [truecaser|case-vectors|regimes|augmentation|all]

truecaser      train on the synthetic corpus and report held-out char F1
case-vectors   uncased tagging with none/predicted/gold case vectors, 3 seeds
regimes        frozen-truecaser bit-identity and joint-from-scratch training
augmentation   cased-only vs cased+lowercased-copy training
"""

import argparse
import sys
import time

from casetag.experiments import (
    augmentation_comparison,
    case_vector_comparison,
    regime_contracts,
    truecaser_desk_run,
)


def log(msg: str) -> None:
    print(f"  {msg}", file=sys.stderr)


def run_truecaser() -> None:
    t0 = time.time()
    _, score, _ = truecaser_desk_run(log=log)
    print(f"truecaser desk run: char F1 {100 * score.f1:.1f} "
          f"(P {100 * score.precision:.1f} / R {100 * score.recall:.1f}) "
          f"in {time.time() - t0:.0f}s")


def run_case_vectors() -> None:
    t0 = time.time()
    res = case_vector_comparison(log=log)
    print(f"uncased tagging, mean span F1 over 3 seeds "
          f"(pretrained truecaser char F1 {res.truecaser_f1:.1f}):")
    for mode in ("none", "predicted", "gold"):
        print(f"  {mode:10s} {res.mean(mode):5.1f}   runs: "
              + " ".join(f"{v:.1f}" for v in getattr(res, mode)))
    print(f"done in {time.time() - t0:.0f}s")


def run_regimes() -> None:
    t0 = time.time()
    res = regime_contracts(log=log)
    print(f"fixed regime leaves truecaser bit-identical: {res.fixed_params_identical}")
    print(f"joint from scratch: truecaser char F1 {res.scratch_f1_before:.1f} -> "
          f"{res.scratch_f1_after:.1f}, tagger span F1 {res.scratch_ner_f1:.1f}")
    print(f"done in {time.time() - t0:.0f}s")


def run_augmentation() -> None:
    t0 = time.time()
    res = augmentation_comparison(log=log)
    for row in res.detail:
        print(f"  seed {row['seed']}: cased-only C={row['cased_C']:.1f} "
              f"U={row['cased_U']:.1f} | augmented C={row['aug_C']:.1f} "
              f"U={row['aug_U']:.1f}")
    print(f"mean of (C+U)/2: cased-only {res.mean_cased():.1f}, "
          f"augmented {res.mean_augmented():.1f}")
    print(f"done in {time.time() - t0:.0f}s")


RUNNERS = {
    "truecaser": run_truecaser,
    "case-vectors": run_case_vectors,
    "regimes": run_regimes,
    "augmentation": run_augmentation,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("which", nargs="?", default="all",
                        choices=[*RUNNERS, "all"])
    args = parser.parse_args()
    for name, runner in RUNNERS.items():
        if args.which in (name, "all"):
            print(f"== {name}")
            runner()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
