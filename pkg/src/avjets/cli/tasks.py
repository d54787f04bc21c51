"""Single computations for ``avjets compute TASK.json``.

A task file is a JSON object with an ``operation`` and its inputs::

    {"operation": "glue-matrix", "rep": "rho(1)", "atlas": "p1"}
    {"operation": "jet-action", "rep": "sigma(0)", "coords": ["x"],
     "field": ["x^2"], "section": ["1", "x"]}
    {"operation": "rudakov-act", "rep": "rho(0)", "point": [0],
     "generator": {"field": ["x^2"]}, "element": [{"d": [1], "w": [1, 0]}]}
    {"operation": "transform", "atlas": "p1", "order": 4, "derivation": ["X^2"]}
    {"operation": "transform", "atlas": "p1", "order": 4, "partial": 0}
    {"operation": "exp", "parameters": ["alpha"], "order": 4, "derivation": ["alpha*X^2"]}
    {"operation": "log", "order": 4, "automorphism": ["X + X^2"]}

``rep`` is a built-in name, or ``{"fixture": "rho_m", "parameters": {"m": 1}}``,
or ``{"file": "my_rep.json", "parameters": {...}}`` (relative to the task
file), or an inline representation object whose parameter values go in a
top-level ``"rep_parameters"``.  ``atlas`` works the same way
("p1" names the bundled fixture).  Transitions default to the first one in
the atlas; ``"transition": ["U1", "U0"]`` picks a direction.
Series are written in the jet variables X (one variable) or X1..Xn; for
``transform`` they are named after the chart coordinates (x -> X, y -> Y).
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping

from avjets.algebra.rings import QQ, FnRing
from avjets.avmod import RudakovElement, jet_action, jet_glue_matrix, rudakov_act, section_law
from avjets.avmod.jet import JetModuleElement
from avjets.cli.formats import (
    FIXTURES,
    jet_names,
    parse_atlas,
    parse_rep,
    read_fixture,
    read_json,
)
from avjets.errors import ParseError
from avjets.expr import parse_function, parse_scalar, parse_series
from avjets.geometry import Atlas, Chart, Point, Transition, transform_derivation, transform_partial
from avjets.jets import JetAutomorphism, JetDerivation, aut_exp, aut_log
from avjets.repn import RepSpec, builtin_rep
from avjets.smash import VectorField

OPERATIONS = ("jet-action", "glue-matrix", "rudakov-act", "transform", "exp", "log")


class Task:
    def __init__(self, data: Mapping, source: str | None = None, base: Path | None = None):
        if not isinstance(data, Mapping):
            raise ParseError("a task file must hold a JSON object", None, None, source)
        self.data = data
        self.source = source
        self.base = base or Path(".")

    def get(self, key, default=None):
        return self.data.get(key, default)

    def need(self, key):
        if key not in self.data:
            raise ParseError(f"missing field {key!r}", None, None, self.source)
        return self.data[key]

    def error(self, message):
        return ParseError(message, None, None, self.source)

    def strings(self, key, length=None):
        value = self.need(key)
        if not isinstance(value, list) or not all(isinstance(v, (str, int)) for v in value):
            raise self.error(f"{key!r} must be a list of expressions")
        if length is not None and len(value) != length:
            raise self.error(f"{key!r} needs {length} entries, got {len(value)}")
        return [str(v) for v in value]

    def order(self, default=None) -> int:
        N = self.get("order", default)
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise self.error("'order' must be a positive integer")
        return N

    # -- referenced objects ------------------------------------------------
    def _load(self, ref, kind: str):
        if isinstance(ref, Mapping) and "fixture" in ref:
            return read_fixture(ref["fixture"]), ref.get("parameters"), f"fixture:{ref['fixture']}"
        if isinstance(ref, Mapping) and "file" in ref:
            path = self.base / ref["file"]
            return read_json(path), ref.get("parameters"), str(path)
        if isinstance(ref, Mapping):
            return ref, self.get("rep_parameters"), self.source
        raise self.error(f"bad {kind} reference {ref!r}")

    def rep(self) -> RepSpec:
        ref = self.need("rep")
        if isinstance(ref, str):
            return builtin_rep(ref)
        data, params, src = self._load(ref, "rep")
        return parse_rep(data, params, src)

    def atlas(self) -> Atlas:
        ref = self.get("atlas", "p1")
        if isinstance(ref, str):
            if ref not in FIXTURES:
                raise self.error(f"unknown atlas {ref!r}")
            return parse_atlas(read_fixture(ref), f"fixture:{ref}")
        data, _, src = self._load(ref, "atlas")
        return parse_atlas(data, src)

    def transition(self) -> Transition:
        atlas = self.atlas()
        pick = self.get("transition")
        if pick is None:
            if not atlas.transitions:
                raise self.error("the atlas has no transitions")
            return atlas.transitions[0]
        if not isinstance(pick, list) or len(pick) != 2:
            raise self.error("'transition' must be [source chart, target chart]")
        try:
            return atlas.transition(*pick)
        except KeyError as exc:
            raise self.error(str(exc.args[0])) from None

    def chart_ring(self) -> FnRing:
        coords = self.get("coords", ["x"])
        if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
            raise self.error("'coords' must be a list of names")
        ring = FnRing(tuple(coords))
        dens = [parse_function(d, ring, source=self.source).num for d in self.get("denominators", [])]
        return ring.with_denominators(dens)


def chart_jet_names(coords) -> list[str]:
    """Jet variables named after the chart, x -> X and y -> Y, when that is unambiguous."""
    upper = [c.upper() for c in coords]
    if len(set(upper)) == len(upper) and not set(upper) & set(coords):
        return upper
    return jet_names(len(coords))


def _matrix_lines(M, ring) -> list[str]:
    return ["[" + ", ".join(ring.render(c) for c in row) + "]" for row in M]


def op_glue_matrix(task: Task) -> dict:
    rep = task.rep()
    t = task.transition()
    N = task.order(max(rep.nilpotency_order, 1))
    M = jet_glue_matrix(rep, t, N)
    ring = t.source_overlap
    return {"rep": rep.name, "transition": t.name, "matrix": _matrix_lines(M, ring),
            "sections": section_law(M, ring)}


def op_jet_action(task: Task) -> dict:
    rep = task.rep()
    ring = task.chart_ring()
    field = VectorField(ring, [parse_function(f, ring, source=task.source) for f in task.strings("field", ring.n)])
    section = JetModuleElement(ring, [parse_function(s, ring, source=task.source)
                                      for s in task.strings("section", rep.dim)])
    out = jet_action(rep, field, section)
    return {"rep": rep.name, "field": str(field), "section": str(section), "result": str(out)}


def _rudakov_element(task: Task, n: int, dim: int) -> RudakovElement:
    terms = task.need("element")
    if not isinstance(terms, list):
        raise task.error("'element' must be a list of {\"d\": [...], \"w\": [...]} terms")
    elt = RudakovElement(dim, {})
    for term in terms:
        if not isinstance(term, Mapping) or "d" not in term or "w" not in term:
            raise task.error("each element term needs 'd' (multi-index) and 'w' (vector)")
        a, w = term["d"], term["w"]
        if not isinstance(a, list) or len(a) != n or not all(isinstance(k, int) and k >= 0 for k in a):
            raise task.error(f"'d' must be {n} nonnegative integers")
        if not isinstance(w, list) or len(w) != dim:
            raise task.error(f"'w' must have {dim} entries")
        elt = elt + RudakovElement(dim, {tuple(a): tuple(parse_scalar(c, source=task.source) for c in w)})
    return elt


def op_rudakov_act(task: Task) -> dict:
    rep = task.rep()
    coords = task.get("coords", ["x"] if rep.n == 1 else [f"x{i + 1}" for i in range(rep.n)])
    chart = Chart("U", tuple(coords))
    point = task.get("point", [0] * rep.n)
    if not isinstance(point, list) or len(point) != rep.n:
        raise task.error(f"'point' must have {rep.n} coordinates")
    P = Point(chart, tuple(parse_scalar(c, source=task.source) for c in point))
    ring = chart.ring
    gen = task.need("generator")
    if isinstance(gen, Mapping) and "field" in gen:
        coeffs = gen["field"]
        if not isinstance(coeffs, list) or len(coeffs) != rep.n:
            raise task.error(f"'field' must have {rep.n} coefficients")
        generator = VectorField(ring, [parse_function(str(c), ring, source=task.source) for c in coeffs])
    elif isinstance(gen, Mapping) and "function" in gen:
        generator = parse_function(str(gen["function"]), ring, source=task.source)
    else:
        raise task.error("'generator' must be {\"field\": [...]} or {\"function\": \"...\"}")
    elt = _rudakov_element(task, rep.n, rep.dim)
    out = rudakov_act(rep, P, generator, elt)
    return {"rep": rep.name, "point": [str(c) for c in P.coordinates], "generator": str(generator),
            "element": str(elt), "result": str(out)}


def op_transform(task: Task) -> dict:
    t = task.transition()
    N = task.order(4)
    n = t.n
    if "partial" in task.data:
        i = task.data["partial"]
        if not isinstance(i, int) or not 0 <= i < n:
            raise task.error(f"'partial' must be an index in 0..{n - 1}")
        return {"transition": t.name, "input": f"d/d{t.target.coords[i]}",
                "result": str(transform_partial(t, i, N))}
    x_names, y_names = chart_jet_names(t.target.coords), chart_jet_names(t.source.coords)
    comps = [parse_series(s, t.target_overlap, x_names, N, source=task.source) for s in task.strings("derivation", n)]
    d = JetDerivation(comps)
    return {"transition": t.name, "input": d.to_str(x_names), "result": transform_derivation(t, d).to_str(y_names)}


def _param_ring(task: Task):
    params = task.get("parameters", [])
    if not isinstance(params, list) or not all(isinstance(p, str) and p.isidentifier() for p in params):
        raise task.error("'parameters' must be a list of names")
    return FnRing(tuple(params)) if params else QQ


def _series_list(task: Task, key: str, ring, N: int):
    value = task.need(key)
    if not isinstance(value, list) or not value:
        raise task.error(f"{key!r} must be a nonempty list of series")
    names = jet_names(len(value))
    return [parse_series(str(s), ring, names, N, source=task.source) for s in value], names


def op_exp(task: Task) -> dict:
    ring = _param_ring(task)
    N = task.order(4)
    comps, names = _series_list(task, "derivation", ring, N)
    F = aut_exp(JetDerivation(comps))
    return {"input": JetDerivation(comps).to_str(names),
            "result": [f"{name} -> {img.to_str(names)}" for name, img in zip(names, F.images)]}


def op_log(task: Task) -> dict:
    ring = _param_ring(task)
    N = task.order(4)
    comps, names = _series_list(task, "automorphism", ring, N)
    d = aut_log(JetAutomorphism(comps))
    return {"input": [f"{name} -> {img.to_str(names)}" for name, img in zip(names, comps)],
            "result": d.to_str(names)}


RUNNERS = {
    "jet-action": op_jet_action,
    "glue-matrix": op_glue_matrix,
    "rudakov-act": op_rudakov_act,
    "transform": op_transform,
    "exp": op_exp,
    "log": op_log,
}


def run_task(data, source: str | None = None, base: Path | None = None) -> dict:
    task = Task(data, source, base)
    op = task.need("operation")
    if op not in RUNNERS:
        raise task.error(f"unknown operation {op!r}; known: {', '.join(OPERATIONS)}")
    return {"operation": op, **RUNNERS[op](task)}


def render_result(result: dict) -> str:
    lines = []
    for key, value in result.items():
        if isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(f"  {v}" for v in value)
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)
