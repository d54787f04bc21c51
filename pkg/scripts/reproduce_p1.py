"""Print the glue matrices, section laws and transformation laws on the projective line.

    python3 scripts/reproduce_p1.py --m-range=-2..3
"""
import argparse
from dataclasses import dataclass

from avjets.algebra import QQ, linalg
from avjets.avmod import jet_glue_matrix, section_law
from avjets.cli.suites import parse_m_range
from avjets.geometry import p1_transition, transform_derivation, transform_partial
from avjets.jets import JetDerivation
from avjets.repn import builtin_rep


@dataclass(frozen=True)
class Config:
    m_range: tuple = (-2, 3)
    order: int = 5


def main(cfg: Config) -> None:
    t = p1_transition()
    ring = t.source_overlap
    lo, hi = cfg.m_range
    for family in ("rho", "sigma"):
        for m in range(lo, hi + 1):
            rep = builtin_rep(family, m)
            M = jet_glue_matrix(rep, t)
            print(f"{rep.name}: {linalg.render(M, ring)}")
            for line in section_law(M, ring):
                print(f"    {line}")
    print(f"\ntransformation laws, x = -1/y, N = {cfg.order}")
    for k in (1, 2, 3):
        d = JetDerivation.from_terms(QQ, 1, cfg.order, {((k,), 0): 1})
        print(f"    X^{k} d/dX -> {transform_derivation(t, d).to_str(['Y'])}")
    print(f"    d/dx -> {transform_partial(t, 0, cfg.order)}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m-range", default="-2..3")
    parser.add_argument("--order", type=int, default=5)
    args = parser.parse_args()
    main(Config(parse_m_range(args.m_range), args.order))
