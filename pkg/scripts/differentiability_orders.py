"""Minimal differentiability order of Rudakov modules R^W_0 on the line.

For each W the search runs over [1, N_rep + 2]; the table shows every verdict.
"""
import argparse
from dataclasses import dataclass

from avjets.avmod import RudakovModule, is_trace_twist, minimal_differentiable_order
from avjets.geometry import Chart, Point
from avjets.repn import builtin_rep

DEFAULT_REPS = ("rho(-1)", "rho(0)", "rho(2)", "sigma(-1)", "sigma(0)", "sigma(2)",
                "weight(-1)", "weight(0)", "weight(2)", "K_tr", "trivial")


@dataclass(frozen=True)
class Config:
    reps: tuple = DEFAULT_REPS
    samples: int = 20
    cutoff: int = 5
    seed: int = 0


def main(cfg: Config) -> None:
    P = Point(Chart("U0", ("x",)), (0,))
    print(f"{'W':<11}{'N_rep':>6}{'min N':>7}  D-module  verdicts")
    for name in cfg.reps:
        rep = builtin_rep(name)
        module = RudakovModule(rep, P)
        N, verdicts = minimal_differentiable_order(module, 1, max(rep.N_rep, 1) + 2, samples=cfg.samples,
                                                   seed=cfg.seed, cutoff=cfg.cutoff)
        shown = " ".join(f"{k}:{'y' if ok else 'n'}" for k, ok in verdicts.items())
        print(f"{name:<11}{rep.N_rep:>6}{str(N):>7}  {'yes' if is_trace_twist(rep) else 'no':<8}  {shown}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("reps", nargs="*", default=list(DEFAULT_REPS))
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--cutoff", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    main(Config(tuple(args.reps), args.samples, args.cutoff, args.seed))
