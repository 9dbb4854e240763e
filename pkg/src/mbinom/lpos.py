"""Positive-parity vectors, their truncations and the one-step market factors.

A vector u = sum a_i ell(i) with a_1..a_m all strictly positive is the basic
building block: its entrywise truncation u+ is exactly the kind of objective
the supervertex maximizes.  Classification is by exact reconstruction, never
by tolerance.  Vectors with some a_i = 0 (and none negative) sit on the
boundary of the cone; they are reported as not positive but carry a distinct
``borderline`` diagnostic, because sums of them with positive coefficients
re-enter the open cone and all the extremal results extend to the closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from ._rational import exact
from .lattice import LatticeElement, LatticeVector, ell, elements

Basis = Literal["ell", "ell_prime", "ell_dprime"]


def truncate(x: LatticeVector) -> LatticeVector:
    """Entrywise max with zero."""
    return LatticeVector(x.m, tuple(e if e > 0 else Fraction(0) for e in x.entries))


@dataclass(frozen=True)
class EllClassification:
    """Outcome of testing a vector against the positive-parity cone.

    ``coeffs`` always holds the orthogonal-projection coefficients
    a_i = <ell(i), x> / 2^m; they reconstruct x exactly iff ``in_span``.
    ``positive`` is the strict test (all a_1..a_m > 0); ``borderline`` flags
    vectors in the span with nonnegative coefficients of which at least one
    vanishes.  Truthiness is the strict test.
    """

    in_span: bool
    positive: bool
    borderline: bool
    coeffs: tuple[Fraction, ...]

    def __bool__(self) -> bool:
        return self.positive


def is_ell_positive(x: LatticeVector) -> EllClassification:
    """Classify x: recover parity coefficients and test strict positivity."""
    m = x.m
    scale = Fraction(1, 1 << m)
    coeffs = tuple(ell(i, m).dot(x) * scale for i in range(m + 1))
    rebuilt = LatticeVector.zero(m)
    for a, i in zip(coeffs, range(m + 1)):
        if a != 0:
            rebuilt = rebuilt + ell(i, m).scaled(a)
    in_span = rebuilt.entries == x.entries
    tail = coeffs[1:]
    positive = in_span and all(a > 0 for a in tail)
    borderline = (
        in_span and not positive and all(a >= 0 for a in tail) and any(a == 0 for a in tail)
    )
    return EllClassification(
        in_span=in_span, positive=positive, borderline=borderline, coeffs=coeffs
    )


def one_step_factor(i: int, down: object, up: object, m: int) -> LatticeVector:
    """The single-coordinate growth factor: value ``up`` where coordinate i
    is 0 and ``down`` where it is 1.

    Requires 0 < down < up.  Expanded in the parity basis this is
    ((up-down)/2) ell(i) + ((up+down)/2) ell(0): all values are positive, so
    the vector equals its own truncation.
    """
    d, u = exact(down), exact(up)
    if not 0 < d < u:
        raise ValueError(f"need 0 < down < up, got down={d}, up={u}")
    if not 1 <= i <= m:
        raise ValueError(f"coordinate index must lie in 1..{m}, got {i}")
    return LatticeVector.from_function(m, lambda el: d if el.value(i) else u)


def is_order_reversing(x: LatticeVector) -> bool:
    """True iff x never increases along the support order.

    Checked on covering pairs only (clear one bit at a time), which suffices
    by transitivity.  Every positive-parity vector passes.
    """
    m = x.m
    for bits in range(1 << m):
        v = x.entries[bits]
        rest = bits
        while rest:
            bit = rest & -rest
            if v > x.entries[bits & ~bit]:
                return False
            rest &= rest - 1
    return True


def _prefix_sums(values: Sequence[Fraction]) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for v in values:
        acc += v
        out.append(acc)
    return out


@dataclass(frozen=True)
class EllCoefficients:
    """A vector of the parity span given by its coefficients in one of the
    three bases; conversions between bases are exact and invertible."""

    m: int
    basis: Basis
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.basis not in ("ell", "ell_prime", "ell_dprime"):
            raise ValueError(f"unknown basis {self.basis!r}")
        coerced = tuple(exact(c) for c in self.coeffs)
        if len(coerced) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} coefficients")
        object.__setattr__(self, "coeffs", coerced)

    def _to_ell(self) -> tuple[Fraction, ...]:
        c = self.coeffs
        m = self.m
        if self.basis == "ell":
            return c
        if self.basis == "ell_prime":
            a = [(c[0] + c[m]) / 2]
            a.extend((c[i] - c[i - 1]) / 2 for i in range(1, m + 1))
            return tuple(a)
        # ell_dprime
        tail_half = sum(c[1:], Fraction(0)) / 2
        return (c[0] + tail_half,) + tuple(v / 2 for v in c[1:])

    def as_basis(self, basis: Basis) -> "EllCoefficients":
        if basis == self.basis:
            return self
        a = self._to_ell()
        m = self.m
        if basis == "ell":
            out = a
        elif basis == "ell_prime":
            # alpha_i = sum(a_k, k <= i) - sum(a_k, k > i)
            prefix = _prefix_sums(a)
            total = prefix[-1]
            out = tuple(2 * p - total for p in prefix)
        elif basis == "ell_dprime":
            out = (a[0] - sum(a[1:], Fraction(0)),) + tuple(2 * v for v in a[1:])
        else:
            raise ValueError(f"unknown basis {basis!r}")
        return EllCoefficients(self.m, basis, tuple(out))

    def to_vector(self) -> LatticeVector:
        from .lattice import ell_dprime, ell_prime

        builders = {"ell": ell, "ell_prime": ell_prime, "ell_dprime": ell_dprime}
        build = builders[self.basis]
        acc = LatticeVector.zero(self.m)
        for i, c in enumerate(self.coeffs):
            if c != 0:
                acc = acc + build(i, self.m).scaled(c)
        return acc


@dataclass(frozen=True)
class TruncatedSum:
    """A certified member of the truncated positive cone: the represented
    vector is the sum of the truncations of the (strictly positive) terms."""

    m: int
    terms: tuple[EllCoefficients, ...]

    def __post_init__(self) -> None:
        for term in self.terms:
            if term.m != self.m:
                raise ValueError("terms live over different lattices")
            if not is_ell_positive(term.to_vector()):
                raise ValueError("every term must be strictly ell-positive")

    def vector(self) -> LatticeVector:
        acc = LatticeVector.zero(self.m)
        for term in self.terms:
            acc = acc + truncate(term.to_vector())
        return acc


@dataclass(frozen=True)
class EuropeanCertificate:
    """Constructive data behind a payoff of truncated product form.

    The payoff on words of length n is
    (sum_j scales[j] * factors[j](letter_1) * ... * factors[j](letter_n)
    - strike)+.  Factors must be nonnegative vectors of the parity span with
    nonnegative parity coefficients (strict positivity is not required: the
    one-step market factors have zeros on the other coordinates).
    """

    m: int
    factors: tuple[LatticeVector, ...]
    scales: tuple[Fraction, ...]
    strike: Fraction

    def __post_init__(self) -> None:
        scales = tuple(exact(s) for s in self.scales)
        strike = exact(self.strike)
        if len(scales) != len(self.factors):
            raise ValueError("one scale per factor required")
        if any(s < 0 for s in scales) or strike < 0:
            raise ValueError("scales and strike must be nonnegative")
        for u in self.factors:
            if u.m != self.m:
                raise ValueError("factors live over different lattices")
            cls = is_ell_positive(u)
            if not cls.in_span:
                raise ValueError("factor is not in the parity span")
            if any(a < 0 for a in cls.coeffs[1:]):
                raise ValueError("factor has a negative parity coefficient")
            if not u.is_nonnegative():
                raise ValueError("factor must equal its own truncation")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "strike", strike)

    @property
    def r(self) -> int:
        return len(self.factors)

    def word_factor(self, j: int, letters: Sequence[LatticeElement]) -> Fraction:
        """Product of factor j over the letters of a word (1 on the empty word)."""
        out = Fraction(1)
        for el in letters:
            out *= self.factors[j][el]
        return out

    def leaf_value(self, letters: Sequence[LatticeElement]) -> Fraction:
        total = sum(
            (s * self.word_factor(j, letters) for j, s in enumerate(self.scales)),
            Fraction(0),
        )
        gain = total - self.strike
        return gain if gain > 0 else Fraction(0)

    def scaled_by_word(self, letters: Sequence[LatticeElement]) -> "EuropeanCertificate":
        """Certificate of the prefix restriction: scales absorb the factor
        products over the fixed prefix letters."""
        new_scales = tuple(
            s * self.word_factor(j, letters) for j, s in enumerate(self.scales)
        )
        return EuropeanCertificate(
            m=self.m, factors=self.factors, scales=new_scales, strike=self.strike
        )

    def one_step_vector(self) -> LatticeVector:
        """The un-truncated single-letter vector sum_j scales[j] factors[j]
        - strike * ell(0); its truncation is the payoff for n = 1."""
        acc = ell(0, self.m).scaled(-self.strike)
        for s, u in zip(self.scales, self.factors):
            if s != 0:
                acc = acc + u.scaled(s)
        return acc
