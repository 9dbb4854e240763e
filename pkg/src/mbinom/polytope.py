"""The simplex fiber P(b) and its two distinguished points.

P(b) is the set of probability densities x on {0,1}^m whose parity averages
hit a prescribed target: <ell(0), x> = 1 and <ell(i), x> = b(i).  It is
nonempty exactly when every |b(i)| <= 1.  Two points can be written down
directly from b:

* the supervertex, a genuine vertex supported on a maximal chain, which
  simultaneously maximizes every truncated positive-parity objective, and
* the subvertex, a vector supported on the single-zero elements, which lower
  bounds every such objective and lies in P(b) exactly when
  sum(b) <= 2 - m (then it too is a vertex).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from ._rational import exact
from .lattice import (
    LatticeElement,
    LatticeVector,
    ell,
    elements,
    nu,
)


class EmptyPolytopeError(ValueError):
    """Raised when a construction needs a nonempty fiber (max |b(i)| <= 1)."""


@dataclass(frozen=True)
class PolytopeSpec:
    """The target vector b plus its two derived weight vectors.

    ``b_prime`` are the halved consecutive differences of (1, b, -1); they sum
    to 1 by telescoping and are the supervertex weights once b is sorted
    decreasingly.  ``b_dprime`` holds (b(i)+1)/2 for i >= 1 with the zeroth
    entry chosen to make the total 1; these are the subvertex weights (the
    zeroth may be negative, in which case the subvertex leaves the polytope).
    """

    m: int
    b: tuple[Fraction, ...]
    b_prime: tuple[Fraction, ...]
    b_dprime: tuple[Fraction, ...]

    @property
    def is_empty(self) -> bool:
        return any(abs(v) > 1 for v in self.b)

    def _require_nonempty(self) -> None:
        if self.is_empty:
            raise EmptyPolytopeError(
                f"P(b) is empty: max |b(i)| > 1 for b={tuple(map(str, self.b))}"
            )


def make_spec(b: Sequence) -> PolytopeSpec:
    """Build a PolytopeSpec from the m target values (emptiness is a state)."""
    values = tuple(exact(v) for v in b)
    m = len(values)
    if m < 1:
        raise ValueError("b must have at least one entry")
    ext = (Fraction(1),) + values + (Fraction(-1),)
    b_prime = tuple((ext[i] - ext[i + 1]) / 2 for i in range(m + 1))
    tail = [ (v + 1) / 2 for v in values ]
    b_dprime = (Fraction(1) - sum(tail),) + tuple(tail)
    return PolytopeSpec(m=m, b=values, b_prime=b_prime, b_dprime=b_dprime)


def contains(spec: PolytopeSpec, x: LatticeVector) -> bool:
    """Exact membership test: x >= 0, total mass 1 and all parity targets met."""
    if x.m != spec.m:
        raise ValueError("vector dimension does not match the spec")
    if not x.is_nonnegative():
        return False
    if ell(0, spec.m).dot(x) != 1:
        return False
    return all(ell(i, spec.m).dot(x) == spec.b[i - 1] for i in range(1, spec.m + 1))


@dataclass(frozen=True)
class VertexDensity:
    """A signed combination of standard basis vectors, listed by support.

    ``support`` holds the nonzero (element, weight) pairs.  Supervertices have
    all weights positive; a subvertex may carry one negative weight, in which
    case it is only a vector, not a density.
    """

    m: int
    kind: Literal["supervertex", "subvertex"]
    support: tuple[tuple[LatticeElement, Fraction], ...]

    def __post_init__(self) -> None:
        total = sum((w for _, w in self.support), Fraction(0))
        if total != 1:
            raise ValueError(f"weights must sum to 1, got {total}")

    def weight(self, element: LatticeElement) -> Fraction:
        for el, w in self.support:
            if el == element:
                return w
        return Fraction(0)

    def to_vector(self) -> LatticeVector:
        entries = [Fraction(0)] * (1 << self.m)
        for el, w in self.support:
            entries[el.index] += w
        return LatticeVector(self.m, tuple(entries))

    def is_density(self) -> bool:
        return all(w >= 0 for _, w in self.support)


def _decreasing_order(b: Sequence[Fraction]) -> list[int]:
    # Stable: descending by value, ascending by original coordinate among ties.
    return sorted(range(1, len(b) + 1), key=lambda i: (-b[i - 1], i))


def supervertex_chain(spec: PolytopeSpec) -> tuple[tuple[LatticeElement, Fraction], ...]:
    """All m+1 chain letters with their supervertex weights, zeros included.

    Sorting b(i_1) >= ... >= b(i_m), entry k pairs the indicator of
    {i_(k+1), ..., i_m} with the weight (b(i_k) - b(i_(k+1)))/2, under the
    conventions b(i_0) = 1 and b(i_(m+1)) = -1.  The fast expectation
    formulas sum over exactly these letters.
    """
    spec._require_nonempty()
    m = spec.m
    order = _decreasing_order(spec.b)
    ext = [Fraction(1)] + [spec.b[i - 1] for i in order] + [Fraction(-1)]
    chain = []
    mask = (1 << m) - 1  # full support to start
    for k in range(m + 1):
        chain.append((LatticeElement(m, mask), (ext[k] - ext[k + 1]) / 2))
        if k < m:
            mask &= ~(1 << (m - order[k]))
    return tuple(chain)


def supervertex(spec: PolytopeSpec) -> VertexDensity:
    """The chain-supported vertex of P(b).

    The result does not depend on how sorting ties are broken, satisfies
    every parity target of the spec, and has nonnegative weights summing
    to one.
    """
    support = tuple((el, w) for el, w in supervertex_chain(spec) if w != 0)
    return VertexDensity(m=spec.m, kind="supervertex", support=support)


def subvertex(spec: PolytopeSpec) -> VertexDensity:
    """The single-zero-supported vector of P(b); consult
    ``subvertex_in_polytope`` before treating it as a density."""
    spec._require_nonempty()
    support = tuple(
        (nu(i, spec.m), w)
        for i, w in enumerate(spec.b_dprime)
        if w != 0
    )
    return VertexDensity(m=spec.m, kind="subvertex", support=support)


def subvertex_in_polytope(spec: PolytopeSpec) -> bool:
    """Membership criterion for the subvertex: sum(b) <= 2 - m."""
    spec._require_nonempty()
    return sum(spec.b) <= 2 - spec.m


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [row[:] for row in rows]
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def is_vertex(spec: PolytopeSpec, x: LatticeVector) -> bool:
    """Whether x is a vertex of P(b), i.e. its support is minimal.

    Equivalent formulation used here: the parity equations restricted to the
    support columns determine x uniquely, i.e. those columns are linearly
    independent.
    """
    if not contains(spec, x):
        raise ValueError("x does not belong to the polytope")
    support = x.support()
    cols = [el.index for el in support]
    matrix = [
        [ell(i, spec.m).entries[c] for c in cols]
        for i in range(spec.m + 1)
    ]
    return _rank(matrix) == len(cols)
