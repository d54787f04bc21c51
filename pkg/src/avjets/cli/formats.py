"""JSON file formats for representations, atlases and compute tasks.

Numbers may be JSON integers or strings holding a rational expression
("-3/2", "m+1").  Functions are strings in the expression language of
``avjets.expr``, written in the declared coordinates.

Representation file::

    {
      "name": "rho",                     # optional
      "n": 1,                            # number of jet variables
      "dim": 2,
      "parameters": ["m"],               # optional; integer values supplied at load time
      "generators": {                    # keys "X^2 d/dX", or "X1*X2^2 d/dX2" when n > 1
        "X d/dX":   [["m+1", 0], [0, "m"]],
        "X^2 d/dX": [[0, 1], [0, 0]]
      },
      "weight_vectors": [[1, 0], [0, 1]],   # optional, default the standard basis
      "weights": [["m+1"], ["m"]]           # optional, read off the torus when omitted
    }

Monomials not listed act by zero.  Loading runs ``rep_validate``.

Atlas file::

    {
      "name": "P1",
      "charts": [{"name": "U0", "coords": ["x"], "denominators": []},
                 {"name": "U1", "coords": ["y"]}],
      "transitions": [{"name": "p1", "source": "U1", "target": "U0",
                       "G": ["-1/y"], "H": ["-1/x"],
                       "source_denominators": ["y"], "target_denominators": ["x"]}]
    }

G gives the target coordinates as functions of the source coordinates and H
the inverse.  The overlap denominators are inverted on top of the charts'
own.  Loading runs ``transition_validate`` on every transition.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping

from avjets.algebra import linalg
from avjets.algebra.rings import FnRing, Poly
from avjets.errors import ParseError, ValidationFailed
from avjets.expr import parse_function, parse_scalar
from avjets.geometry import Atlas, Chart, Transition, make_transition, transition_validate
from avjets.repn import RepSpec, make_rep, monomial_label, rep_validate

FIXTURES = ("p1", "rho_m", "sigma_m", "K_tr", "weight")

_KEY = re.compile(r"^\s*(?P<mono>\S+)\s+d/d(?P<var>X\d*)\s*$")
_FACTOR = re.compile(r"^(X\d*)(?:\^(\d+))?$")


def load_json(text: str, source: str | None = None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, source) from None


def read_json(path, source: str | None = None):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", None, None, str(path)) from None
    return load_json(text, source or str(path))


def fixture_path(name: str):
    if name not in FIXTURES:
        raise ParseError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return resources.files("avjets.cli") / "fixtures" / f"{name}.json"


def read_fixture(name: str):
    return load_json(fixture_path(name).read_text(), f"fixture:{name}")


def _require(data: Mapping, key: str, source):
    if not isinstance(data, Mapping):
        raise ParseError(f"expected a JSON object, got {type(data).__name__}", None, None, source)
    if key not in data:
        raise ParseError(f"missing field {key!r}", None, None, source)
    return data[key]


def _scalar(value, params, source, where):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ParseError(f"{where}: expected a number or a string, got {value!r}", None, None, source)
    try:
        return parse_scalar(value, params, source)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc.args[0]}", exc.line, exc.column, source) from None


def _matrix(rows, dim, params, source, where):
    if not isinstance(rows, list) or len(rows) != dim or any(not isinstance(r, list) or len(r) != dim for r in rows):
        raise ParseError(f"{where}: expected a {dim}x{dim} matrix", None, None, source)
    return tuple(tuple(_scalar(c, params, source, where) for c in row) for row in rows)


def jet_names(n: int) -> list[str]:
    return ["X"] if n == 1 else [f"X{i + 1}" for i in range(n)]


def parse_monomial_key(key: str, n: int, source=None) -> tuple[tuple, int]:
    """"X1^2*X2 d/dX1" -> ((2, 1), 0).  For n = 1 both X and X1 are accepted."""
    m = _KEY.match(key)
    if not m:
        raise ParseError(f"bad generator key {key!r}; expected e.g. 'X^2 d/dX'", None, None, source)
    names = jet_names(n)
    aliases = {name: k for k, name in enumerate(names)}
    if n == 1:
        aliases["X1"] = 0

    def index(name):
        if name not in aliases:
            raise ParseError(f"generator key {key!r}: unknown variable {name!r}", None, None, source)
        return aliases[name]

    s = [0] * n
    for factor in m.group("mono").split("*"):
        f = _FACTOR.match(factor)
        if not f:
            raise ParseError(f"generator key {key!r}: bad factor {factor!r}", None, None, source)
        s[index(f.group(1))] += int(f.group(2) or 1)
    return tuple(s), index(m.group("var"))


def _params(data, values: Mapping | None, source) -> dict:
    declared = data.get("parameters", [])
    if not isinstance(declared, list) or not all(isinstance(p, str) for p in declared):
        raise ParseError("'parameters' must be a list of names", None, None, source)
    values = dict(values or {})
    missing = [p for p in declared if p not in values]
    if missing:
        raise ParseError(f"no value given for parameter(s) {', '.join(missing)}", None, None, source)
    extra = [p for p in values if p not in declared]
    if extra:
        raise ParseError(f"unknown parameter(s) {', '.join(extra)}", None, None, source)
    out = {}
    for p in declared:
        v = Fraction(values[p]) if not isinstance(values[p], str) else parse_scalar(values[p], source=source)
        if v.denominator != 1:
            raise ParseError(f"parameter {p} must be an integer, got {v}", None, None, source)
        out[p] = int(v)
    return out


def parse_rep(data, params: Mapping | None = None, source: str | None = None, validate: bool = True) -> RepSpec:
    """A validated RepSpec; raises ParseError or ValidationFailed."""
    n = _require(data, "n", source)
    dim = _require(data, "dim", source)
    if not isinstance(n, int) or n < 1 or not isinstance(dim, int) or dim < 1:
        raise ParseError("'n' and 'dim' must be positive integers", None, None, source)
    values = _params(data, params, source)
    gens_in = _require(data, "generators", source)
    if not isinstance(gens_in, Mapping):
        raise ParseError("'generators' must be an object keyed by monomial", None, None, source)
    gens = {}
    for key, rows in gens_in.items():
        s, i = parse_monomial_key(key, n, source)
        if (s, i) in gens:
            raise ParseError(f"generator {key!r} given twice", None, None, source)
        gens[(s, i)] = _matrix(rows, dim, values, source, key)
    basis = None
    if "weight_vectors" in data:
        vecs = data["weight_vectors"]
        if not isinstance(vecs, list) or len(vecs) != dim or any(not isinstance(v, list) or len(v) != dim for v in vecs):
            raise ParseError(f"'weight_vectors' must be {dim} vectors of length {dim}", None, None, source)
        basis = linalg.transpose(tuple(tuple(_scalar(c, values, source, "weight_vectors") for c in v) for v in vecs))
    weights = None
    if "weights" in data:
        ws = data["weights"]
        if not isinstance(ws, list) or len(ws) != dim or any(not isinstance(w, list) or len(w) != n for w in ws):
            raise ParseError(f"'weights' must be {dim} lists of {n} integers", None, None, source)
        weights = [tuple(_scalar(c, values, source, "weights") for c in w) for w in ws]
    name = data.get("name", "")
    if values:
        name = f"{name}({', '.join(str(v) for v in values.values())})"
    rep = make_rep(n, dim, gens, basis, weights, name)
    if validate:
        report = rep_validate(rep)
        if not report.passed:
            raise ValidationFailed(f"representation {name or source or '?'} failed validation", report)
    return rep


def _render(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def serialize_rep(rep: RepSpec) -> dict:
    gens = {}
    for (s, i) in sorted(rep.generators, key=lambda k: (sum(k[0]), tuple(-x for x in k[0]), k[1])):
        gens[monomial_label(s, i)] = [[_render(c) for c in row] for row in rep.generators[(s, i)]]
    return {
        "name": rep.name,
        "n": rep.n,
        "dim": rep.dim,
        "generators": gens,
        "weight_vectors": [[_render(c) for c in col] for col in linalg.transpose(rep.torus_basis)],
        "weights": [[_render(w) for w in ws] for ws in rep.weights],
    }


def same_rep(a: RepSpec, b: RepSpec) -> bool:
    return (a.n == b.n and a.dim == b.dim and a.nilpotency_order == b.nilpotency_order
            and a.generators.keys() == b.generators.keys()
            and all(linalg.equal(a.generators[k], b.generators[k]) for k in a.generators)
            and linalg.equal(a.torus_basis, b.torus_basis)
            and [tuple(map(Fraction, w)) for w in a.weights] == [tuple(map(Fraction, w)) for w in b.weights])


def _polys(texts, coords, source, where) -> list[Poly]:
    if not isinstance(texts, list):
        raise ParseError(f"{where} must be a list of polynomials", None, None, source)
    ring = FnRing(tuple(coords))
    out = []
    for text in texts:
        elem = parse_function(text, ring, source=source)
        out.append(elem.num)
    return out


def _chart(data, source) -> Chart:
    name = _require(data, "name", source)
    coords = _require(data, "coords", source)
    if not isinstance(coords, list) or not coords or not all(isinstance(c, str) and c.isidentifier() for c in coords):
        raise ParseError(f"chart {name!r}: 'coords' must be a nonempty list of names", None, None, source)
    if len(set(coords)) != len(coords):
        raise ParseError(f"chart {name!r}: repeated coordinate", None, None, source)
    dens = _polys(data.get("denominators", []), coords, source, f"chart {name!r} denominators")
    return Chart(name, tuple(coords), tuple(dens))


def _transition(data, charts: dict, source) -> Transition:
    src_name = _require(data, "source", source)
    tgt_name = _require(data, "target", source)
    for c in (src_name, tgt_name):
        if c not in charts:
            raise ParseError(f"transition refers to unknown chart {c!r}", None, None, source)
    src, tgt = charts[src_name], charts[tgt_name]
    src_dens = _polys(data.get("source_denominators", []), src.coords, source, "source_denominators")
    tgt_dens = _polys(data.get("target_denominators", []), tgt.coords, source, "target_denominators")
    src_ring = src.ring.with_denominators(src_dens)
    tgt_ring = tgt.ring.with_denominators(tgt_dens)
    G = _require(data, "G", source)
    H = _require(data, "H", source)
    if not isinstance(G, list) or len(G) != tgt.n or not isinstance(H, list) or len(H) != src.n:
        raise ParseError("G must give every target coordinate and H every source coordinate", None, None, source)
    G = [parse_function(g, src_ring, source=source) for g in G]
    H = [parse_function(h, tgt_ring, source=source) for h in H]
    return make_transition(src, tgt, G, H, src_dens, tgt_dens, data.get("name", f"{src_name}->{tgt_name}"))


def parse_atlas(data, source: str | None = None, validate: bool = True) -> Atlas:
    """A validated Atlas; raises ParseError or ValidationFailed."""
    charts_in = _require(data, "charts", source)
    if not isinstance(charts_in, list) or not charts_in:
        raise ParseError("'charts' must be a nonempty list", None, None, source)
    charts = {}
    for c in charts_in:
        chart = _chart(c, source)
        if chart.name in charts:
            raise ParseError(f"chart {chart.name!r} defined twice", None, None, source)
        charts[chart.name] = chart
    transitions = [_transition(t, charts, source) for t in data.get("transitions", [])]
    if validate:
        for t in transitions:
            report = transition_validate(t)
            if not report.passed:
                raise ValidationFailed(f"transition {t.name} failed validation", report)
    return Atlas(charts, transitions, data.get("name", ""))


def _extra_denominators(ring: FnRing, chart: Chart) -> list[Poly]:
    return [d for d in ring.denominators if d not in chart.ring.denominators]


def serialize_atlas(atlas: Atlas) -> dict:
    charts = [{"name": c.name, "coords": list(c.coords),
               "denominators": [d.to_str(c.coords) for d in c.denominators]}
              for c in atlas.charts.values()]
    transitions = []
    for t in atlas.transitions:
        transitions.append({
            "name": t.name,
            "source": t.source.name,
            "target": t.target.name,
            "G": [str(g) for g in t.G],
            "H": [str(h) for h in t.H],
            "source_denominators": [d.to_str(t.source.coords) for d in _extra_denominators(t.source_overlap, t.source)],
            "target_denominators": [d.to_str(t.target.coords) for d in _extra_denominators(t.target_overlap, t.target)],
        })
    return {"name": atlas.name, "charts": charts, "transitions": transitions}


def same_atlas(a: Atlas, b: Atlas) -> bool:
    if a.charts != b.charts or len(a.transitions) != len(b.transitions):
        return False
    return all(s.source == t.source and s.target == t.target and s.G == t.G and s.H == t.H
               and s.source_overlap == t.source_overlap and s.target_overlap == t.target_overlap
               for s, t in zip(a.transitions, b.transitions))


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
