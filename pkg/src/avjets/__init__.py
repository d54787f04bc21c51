"""Exact jet machinery for AV-modules on charts of smooth varieties.

Subpackages, bottom-up: ``algebra`` (rings, truncated series, matrices),
``jets`` (derivations and automorphisms of K[[X]]), ``repn`` (representations
of L_+), ``smash`` (A#V and jets of vector fields), ``geometry`` (charts and
transitions), ``avmod`` (jet, Rudakov and delta modules with their checks)
and ``cli``.
"""

__version__ = "0.1.0"
