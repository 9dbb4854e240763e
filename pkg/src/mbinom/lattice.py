"""The one-step sample space {0,1}^m, its parity bases and permutation action.

An element assigns a binary move to each of the m coordinates (assets).  Three
bases of the (m+1)-dimensional "parity" subspace of R^{2^m} are provided:

* ``ell(i)``        entry (-1)^(lambda(i)); ``ell(0)`` is the all-ones vector,
* ``ell_prime(i)``  successive differences (ell_i - ell_{i+1})/2, closing with
                    (ell_0 + ell_m)/2,
* ``ell_dprime(i)`` averages (ell_i + ell_0)/2, i.e. the indicator 1-lambda(i).

The chain elements ``mu(i)`` (zeros up to i, then ones) and the single-zero
elements ``nu(i)`` diagonalize the primed bases, which is what makes the
distinguished polytope vertices computable in closed form.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from ._rational import exact

#: Hard cap on the number of coordinates; vectors are dense with 2^m entries.
MAX_M = 16


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if m > MAX_M:
        raise ValueError(f"m={m} exceeds the supported maximum of {MAX_M}")


def _check_index(i: int, m: int) -> None:
    if not isinstance(i, int) or not 0 <= i <= m:
        raise ValueError(f"index must lie in 0..{m}, got {i!r}")


@dataclass(frozen=True)
class LatticeElement:
    """A point of {0,1}^m: one joint up/down move of all m coordinates.

    ``bits`` packs the coordinates big-endian, coordinate 1 being the most
    significant bit, so ``bits`` is also the lexicographic column index used
    throughout (``"0101"`` -> 5 for m=4).  Coordinates 0 and m+1 are virtual:
    accessors return the fixed boundary values 0 and 1, they are never stored.
    """

    m: int
    bits: int

    def __post_init__(self) -> None:
        _check_m(self.m)
        if not isinstance(self.bits, int) or not 0 <= self.bits < (1 << self.m):
            raise ValueError(f"bits must lie in 0..2^{self.m}-1, got {self.bits!r}")

    @classmethod
    def from_coords(cls, coords: Sequence[int]) -> "LatticeElement":
        m = len(coords)
        bits = 0
        for c in coords:
            if c not in (0, 1):
                raise ValueError(f"coordinates must be 0 or 1, got {c!r}")
            bits = (bits << 1) | c
        return cls(m, bits)

    @classmethod
    def from_string(cls, text: str) -> "LatticeElement":
        return cls.from_coords([int(ch) for ch in text])

    @property
    def index(self) -> int:
        """Canonical linear index: sum of lambda(i) * 2^(m-i)."""
        return self.bits

    def value(self, i: int) -> int:
        """Coordinate i; accepts the virtual boundary indices 0 and m+1."""
        if i == 0:
            return 0
        if i == self.m + 1:
            return 1
        if not 1 <= i <= self.m:
            raise ValueError(f"coordinate index out of range: {i}")
        return (self.bits >> (self.m - i)) & 1

    def coords(self) -> tuple[int, ...]:
        return tuple(self.value(i) for i in range(1, self.m + 1))

    def precedes(self, other: "LatticeElement") -> bool:
        """Partial order by support inclusion: self <= other."""
        if self.m != other.m:
            raise ValueError("elements of different m are incomparable")
        return self.bits & ~other.bits == 0

    def __str__(self) -> str:
        return format(self.bits, f"0{self.m}b")


def elements(m: int) -> Iterator[LatticeElement]:
    """All lattice elements in index (lexicographic) order."""
    _check_m(m)
    return (LatticeElement(m, bits) for bits in range(1 << m))


def bottom(m: int) -> LatticeElement:
    return LatticeElement(m, 0)


def top(m: int) -> LatticeElement:
    return LatticeElement(m, (1 << m) - 1)


@dataclass(frozen=True)
class LatticeVector:
    """A dense vector in R^{2^m}, with exact rational entries.

    Entries are indexed by the canonical element index.  Vectors are
    immutable; all arithmetic returns new vectors.
    """

    m: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        _check_m(self.m)
        coerced = tuple(exact(e) for e in self.entries)
        if len(coerced) != 1 << self.m:
            raise ValueError(
                f"expected {1 << self.m} entries for m={self.m}, got {len(coerced)}"
            )
        object.__setattr__(self, "entries", coerced)

    @classmethod
    def from_function(cls, m: int, fn: Callable[[LatticeElement], object]) -> "LatticeVector":
        return cls(m, tuple(exact(fn(el)) for el in elements(m)))

    @classmethod
    def zero(cls, m: int) -> "LatticeVector":
        return cls(m, (Fraction(0),) * (1 << m))

    @classmethod
    def basis(cls, element: LatticeElement) -> "LatticeVector":
        entries = [Fraction(0)] * (1 << element.m)
        entries[element.index] = Fraction(1)
        return cls(element.m, tuple(entries))

    def __getitem__(self, key) -> Fraction:
        if isinstance(key, LatticeElement):
            if key.m != self.m:
                raise ValueError("element and vector have different m")
            return self.entries[key.index]
        return self.entries[key]

    def _require_same_m(self, other: "LatticeVector") -> None:
        if not isinstance(other, LatticeVector) or other.m != self.m:
            raise ValueError("vectors live over different lattices")

    def dot(self, other: "LatticeVector") -> Fraction:
        self._require_same_m(other)
        return sum(a * b for a, b in zip(self.entries, other.entries))

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._require_same_m(other)
        return LatticeVector(self.m, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._require_same_m(other)
        return LatticeVector(self.m, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(self.m, tuple(-a for a in self.entries))

    def scaled(self, c) -> "LatticeVector":
        c = exact(c)
        return LatticeVector(self.m, tuple(c * a for a in self.entries))

    def support(self) -> tuple[LatticeElement, ...]:
        return tuple(
            LatticeElement(self.m, i) for i, e in enumerate(self.entries) if e != 0
        )

    def is_nonnegative(self) -> bool:
        return all(e >= 0 for e in self.entries)


@functools.lru_cache(maxsize=None)
def ell(i: int, m: int) -> LatticeVector:
    """The parity vector of coordinate i: entry (-1)^(lambda(i)).

    ``ell(0)`` is the constant-one vector.  The family is orthogonal with
    squared norm 2^m.
    """
    _check_m(m)
    _check_index(i, m)
    return LatticeVector.from_function(m, lambda el: Fraction((-1) ** el.value(i)))


@functools.lru_cache(maxsize=None)
def ell_prime(i: int, m: int) -> LatticeVector:
    """Difference basis: (ell_i - ell_{i+1})/2 for i < m, (ell_0 + ell_m)/2 at i=m.

    Entrywise this equals lambda(i+1) - lambda(i); evaluated on the chain
    element mu(j) it is the Kronecker delta, see ``c_vector``.
    """
    _check_m(m)
    _check_index(i, m)
    if i < m:
        diff = ell(i, m) - ell(i + 1, m)
    else:
        diff = ell(0, m) + ell(m, m)
    return diff.scaled(Fraction(1, 2))


@functools.lru_cache(maxsize=None)
def ell_dprime(i: int, m: int) -> LatticeVector:
    """Indicator basis: entry 1 - lambda(i); equals (ell_i + ell_0)/2 for i >= 1."""
    _check_m(m)
    _check_index(i, m)
    if i == 0:
        return ell(0, m)
    return (ell(i, m) + ell(0, m)).scaled(Fraction(1, 2))


def c_vector(element: LatticeElement) -> tuple[int, ...]:
    """Evaluations (ell_prime(i)(element))_{i=0..m} via the difference formula.

    Returns lambda(i+1) - lambda(i) for i = 0..m with the virtual boundary
    values; the nonzero entries always alternate 1, -1, ..., 1.
    """
    return tuple(
        element.value(i + 1) - element.value(i) for i in range(element.m + 1)
    )


@functools.lru_cache(maxsize=None)
def mu(i: int, m: int) -> LatticeElement:
    """Chain element: zeros in coordinates 1..i, ones in i+1..m.

    mu(0) is the top element 1...1 and mu(m) the bottom 0...0; the chain is
    strictly decreasing in the support order.
    """
    _check_m(m)
    _check_index(i, m)
    return LatticeElement(m, (1 << (m - i)) - 1)


@functools.lru_cache(maxsize=None)
def nu(i: int, m: int) -> LatticeElement:
    """Single-zero element: coordinate j holds 1 - delta_{ij}; nu(0) is 1...1."""
    _check_m(m)
    _check_index(i, m)
    bits = (1 << m) - 1
    if i >= 1:
        bits &= ~(1 << (m - i))
    return LatticeElement(m, bits)


@dataclass(frozen=True)
class Permutation:
    """A bijection of the coordinate set {1..m}; images[i-1] is the image of i."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        m = len(self.images)
        _check_m(m)
        if sorted(self.images) != list(range(1, m + 1)):
            raise ValueError(f"not a permutation of 1..{m}: {self.images!r}")
        object.__setattr__(self, "images", tuple(self.images))

    @property
    def m(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def transposition(cls, m: int, i: int, j: int) -> "Permutation":
        images = list(range(1, m + 1))
        images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
        return cls(tuple(images))

    def __call__(self, i: int) -> int:
        if not 1 <= i <= self.m:
            raise ValueError(f"coordinate index out of range: {i}")
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.m
        for i, image in enumerate(self.images, start=1):
            inv[image - 1] = i
        return Permutation(tuple(inv))


def permute_lattice(sigma: Permutation, element: LatticeElement) -> LatticeElement:
    """Push an element forward: the new coordinate sigma(i) holds the old i-th."""
    if sigma.m != element.m:
        raise ValueError("permutation and element have different m")
    m = element.m
    bits = 0
    for i in range(1, m + 1):
        if element.value(i):
            bits |= 1 << (m - sigma(i))
    return LatticeElement(m, bits)


def permute_vector(sigma: Permutation, x: LatticeVector) -> LatticeVector:
    """Push a vector forward: new entry at lambda is the old entry at lambda o sigma.

    This is the permutation-matrix action; it preserves inner products and
    maps ell(i) to ell(sigma(i)) while fixing ell(0).
    """
    if sigma.m != x.m:
        raise ValueError("permutation and vector have different m")
    m = x.m
    entries = []
    for el in elements(m):
        src = LatticeElement.from_coords(
            [el.value(sigma(i)) for i in range(1, m + 1)]
        )
        entries.append(x.entries[src.index])
    return LatticeVector(m, tuple(entries))


def permute_coordinates(sigma: Permutation, values: Sequence) -> tuple[Fraction, ...]:
    """Push an m-tuple forward: slot sigma(i) of the result holds values[i-1]."""
    if sigma.m != len(values):
        raise ValueError("permutation and tuple have different m")
    out = [Fraction(0)] * sigma.m
    for i, v in enumerate(values, start=1):
        out[sigma(i) - 1] = exact(v)
    return tuple(out)


def ell_matrix(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """Rows ell(0)..ell(m) as an (m+1) x 2^m matrix in column-index order."""
    return tuple(ell(i, m).entries for i in range(m + 1))


def ell_prime_matrix(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """Rows ell_prime(0)..ell_prime(m); its mu(i) columns are the standard basis."""
    return tuple(ell_prime(i, m).entries for i in range(m + 1))


def ell_prime_transition(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """The (m+1) x (m+1) matrix T with ell_prime rows = T . ell rows."""
    _check_m(m)
    half = Fraction(1, 2)
    rows = []
    for i in range(m):
        row = [Fraction(0)] * (m + 1)
        row[i] = half
        row[i + 1] = -half
        rows.append(tuple(row))
    last = [Fraction(0)] * (m + 1)
    last[0] = half
    last[m] = half
    rows.append(tuple(last))
    return tuple(rows)


def ell_prime_transition_inverse(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """Inverse of ``ell_prime_transition``: entry (k, i) is +1 if i >= k else -1."""
    _check_m(m)
    return tuple(
        tuple(Fraction(1 if i >= k else -1) for i in range(m + 1))
        for k in range(m + 1)
    )
