from avjets.algebra.rings import QQ, FnElem, FnRing, Poly, laurent_ring, poly_ring
from avjets.algebra.series import (
    TruncSeries,
    graded_key,
    mi_degree,
    mi_factorial,
    monomials,
    taylor_shift,
    unit_index,
)

__all__ = [
    "QQ", "FnElem", "FnRing", "Poly", "laurent_ring", "poly_ring",
    "TruncSeries", "graded_key", "mi_degree", "mi_factorial", "monomials",
    "taylor_shift", "unit_index",
    "ring_eval", "ring_derive", "ts_mul", "ts_unit_invert", "ts_compose",
]


def ring_eval(f, point):
    return f.evaluate(point)


def ring_derive(f, j):
    return f.derive(j)


def ts_mul(a, b):
    if not isinstance(b, TruncSeries) or not a.same_context(b):
        from avjets.errors import MixedContext
        raise MixedContext("ts_mul needs series in the same context")
    return a * b


def ts_unit_invert(f):
    return f.unit_invert()


def ts_compose(f, g):
    return f.compose(tuple(g))
