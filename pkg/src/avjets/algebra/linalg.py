"""Dense matrices over an exact coefficient ring.

Matrices are tuples of row tuples.  Every helper takes the ring explicitly so
that zeros and ones have the right type (Fraction vs FnElem).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Sequence

from avjets.algebra.rings import QQ
from avjets.errors import MixedContext, NonInvertibleLinearPart, NonUnit

Matrix = tuple


def mat(rows, ring=QQ) -> Matrix:
    return tuple(tuple(ring.coerce(x) for x in row) for row in rows)


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def zeros(r: int, c: int, ring=QQ) -> Matrix:
    z = ring.zero
    return tuple(tuple(z for _ in range(c)) for _ in range(r))


def identity(n: int, ring=QQ) -> Matrix:
    z, o = ring.zero, ring.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def unit_matrix(n: int, i: int, j: int, ring=QQ) -> Matrix:
    z, o = ring.zero, ring.one
    return tuple(tuple(o if (a, b) == (i, j) else z for b in range(n)) for a in range(n))


def convert(A: Matrix, ring) -> Matrix:
    return tuple(tuple(ring.coerce(x) for x in row) for row in A)


def add(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise MixedContext(f"shapes {shape(A)} and {shape(B)}")
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def sub(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise MixedContext(f"shapes {shape(A)} and {shape(B)}")
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    return tuple(tuple(c * a for a in row) for row in A)


def matmul(A: Matrix, B: Matrix, ring=QQ) -> Matrix:
    r, k = shape(A)
    k2, c = shape(B)
    if k != k2:
        raise MixedContext(f"cannot multiply {r}x{k} by {k2}x{c}")
    cols = list(zip(*B)) if B else [()] * c
    out = []
    for row in A:
        new = []
        for col in cols:
            acc = ring.zero
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def matvec(A: Matrix, v: Sequence, ring=QQ) -> tuple:
    out = []
    for row in A:
        acc = ring.zero
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return tuple(out)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def kron(A: Matrix, B: Matrix) -> Matrix:
    rows = []
    for ra in A:
        for rb in B:
            rows.append(tuple(a * b for a in ra for b in rb))
    return tuple(rows)


def commutator(A: Matrix, B: Matrix, ring=QQ) -> Matrix:
    return sub(matmul(A, B, ring), matmul(B, A, ring))


def is_zero(A: Matrix) -> bool:
    return all(not x for row in A for x in row)


def equal(A: Matrix, B: Matrix) -> bool:
    return shape(A) == shape(B) and all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_pow(A: Matrix, k: int, ring=QQ) -> Matrix:
    out = identity(len(A), ring)
    for _ in range(k):
        out = matmul(out, A, ring)
    return out


def is_nilpotent(A: Matrix, ring=QQ) -> bool:
    return is_zero(mat_pow(A, len(A), ring))


def det(A: Matrix, ring=QQ):
    """Leibniz expansion for small matrices; Bareiss elimination over Q beyond."""
    n = len(A)
    if n == 0:
        return ring.one
    if n <= 5 or ring != QQ:
        total = ring.zero
        for perm in permutations(range(n)):
            term = ring.one
            for i, j in enumerate(perm):
                term = term * A[i][j]
                if not term:
                    break
            if term:
                total = total + term if _perm_sign(perm) > 0 else total - term
        return total
    M = [list(r) for r in A]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((r for r in range(k + 1, n) if M[r][k]), None)
            if swap is None:
                return Fraction(0)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev
        prev = M[k][k]
    return M[n - 1][n - 1] * sign


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def inverse(A: Matrix, ring=QQ) -> Matrix:
    """Gauss-Jordan with unit pivots; raises NonInvertibleLinearPart if stuck."""
    n = len(A)
    M = [list(r) + list(e) for r, e in zip(A, identity(n, ring))]
    for k in range(n):
        pivot = next((r for r in range(k, n) if ring.is_unit(M[r][k])), None)
        if pivot is None:
            return _adjugate_inverse(A, ring)
        M[k], M[pivot] = M[pivot], M[k]
        inv = ring.inv(M[k][k])
        M[k] = [x * inv for x in M[k]]
        for r in range(n):
            if r != k and M[r][k]:
                f = M[r][k]
                M[r] = [a - f * b for a, b in zip(M[r], M[k])]
    return tuple(tuple(row[n:]) for row in M)


def _adjugate_inverse(A: Matrix, ring) -> Matrix:
    n = len(A)
    d = det(A, ring)
    try:
        dinv = ring.inv(d)
    except NonUnit as exc:
        raise NonInvertibleLinearPart(f"determinant {ring.render(d)} is not a unit") from exc

    def minor(i, j):
        return tuple(tuple(A[r][c] for c in range(n) if c != j) for r in range(n) if r != i)

    return tuple(tuple((det(minor(j, i), ring) * dinv) * (1 if (i + j) % 2 == 0 else -1)
                       for j in range(n)) for i in range(n))


def exp_nilpotent(A: Matrix, ring=QQ) -> Matrix:
    """exp(A) for nilpotent A as the finite series."""
    n = len(A)
    out = identity(n, ring)
    term = identity(n, ring)
    for k in range(1, n + 1):
        term = scale(Fraction(1, k), matmul(term, A, ring))
        if is_zero(term):
            break
        out = add(out, term)
    if not is_zero(matmul(term, A, ring)) and n:
        raise ValueError("matrix is not nilpotent")
    return out


def render(A: Matrix, ring=QQ) -> str:
    return "[" + ", ".join("[" + ", ".join(ring.render(x) for x in row) + "]" for row in A) + "]"
