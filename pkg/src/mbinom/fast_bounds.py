"""Polynomial-complexity expectations: the multinomial collapse.

For a symmetric payoff, the expectation under a product measure supported on
m+1 letters collapses from 2^(m*k) summands to the C(k+m, m) compositions of
k into m+1 parts.  Three consumers share one engine:

* the supervertex expectation (the exact maximum over all tree policies),
* the subvertex expectation (the exact minimum, when the membership
  criterion sum(b) <= 2 - m holds),
* the minimizer lower bound, which survives even when the subvertex leaves
  the polytope.

When the payoff carries a European certificate the engine clears all
denominators up front and runs on plain integers, multiplying incremental
binomial factors and power-table lookups along a composition walk; a generic
fallback evaluates an arbitrary symmetric payoff on composition words.  The
two routes are exact and agree entry for entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .lattice import LatticeElement, nu
from .lpos import EuropeanCertificate
from .polytope import (
    EmptyPolytopeError,
    PolytopeSpec,
    subvertex_in_polytope,
    supervertex_chain,
)
from .tree_engine import Payoff, Word


class SubvertexCriterionError(ValueError):
    """The subvertex lies outside P(b); its expectation formula is refused."""


@dataclass
class SumStats:
    """Mutable tally of composition-sum work, for tests and benchmarks."""

    terms: int = 0
    evaluated: int = 0

    def tally(self, terms: int, evaluated: int) -> None:
        self.terms += terms
        self.evaluated += evaluated


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``.

    Yields exactly C(total + parts - 1, parts - 1) tuples, each once.
    """
    if parts < 1 or total < 0:
        raise ValueError("need parts >= 1 and total >= 0")
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


def multinomial(counts: Sequence[int]) -> int:
    """The multinomial coefficient (sum counts)! / prod(counts!)."""
    out, rem = 1, sum(counts)
    for c in counts:
        out *= math.comb(rem, c)
        rem -= c
    return out


def _lcm_denominator(values: Sequence[Fraction]) -> int:
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return den


def _collapsed_truncated_sum(
    k: int,
    weights: Sequence[Fraction],
    factor_rows: Sequence[Sequence[Fraction]],
    coeffs: Sequence[Fraction],
    strike: Fraction,
    stats: SumStats | None = None,
) -> Fraction:
    """sum over compositions i of k into len(weights) parts of
    multinomial(i) * prod weights^i * (sum_j coeffs_j prod factors_j^i - strike)+.

    All inputs must be nonnegative.  Denominators are cleared once so the
    composition walk runs on integers: weight numerators share one
    denominator W, each factor row shares d_j, and a global scale G makes
    the truncation argument integral.  Zero-weight letters prune their whole
    subtree (the 0^0 = 1 convention keeps the exponent-zero terms).
    """
    parts = len(weights)
    r = len(factor_rows)
    if any(w < 0 for w in weights) or strike < 0 or any(c < 0 for c in coeffs):
        raise ValueError("collapsed sum requires nonnegative data")
    for row in factor_rows:
        if len(row) != parts or any(v < 0 for v in row):
            raise ValueError("factor rows must be nonnegative, one value per letter")

    w_den = _lcm_denominator(weights)
    w_num = [int(w * w_den) for w in weights]
    row_den = [_lcm_denominator(row) for row in factor_rows]
    row_num = [
        [int(v * d) for v in row] for row, d in zip(factor_rows, row_den)
    ]
    scale = strike.denominator
    for c, d in zip(coeffs, row_den):
        need = c.denominator * d**k
        scale = scale * need // math.gcd(scale, need)
    coeff_int = []
    for c, d in zip(coeffs, row_den):
        lifted = c * scale / Fraction(d) ** k
        assert lifted.denominator == 1
        coeff_int.append(lifted.numerator)
    strike_int = int(strike * scale)

    wpow = [[wn**e for e in range(k + 1)] for wn in w_num]
    vpow = [
        [[vn**e for e in range(k + 1)] for vn in row] for row in row_num
    ]
    comb = [[math.comb(a, e) for e in range(a + 1)] for a in range(k + 1)]

    acc = 0
    evaluated = 0
    last = parts - 1

    def walk(t: int, rem: int, mult: int, wprod: int, aprods: list[int]) -> None:
        nonlocal acc, evaluated
        if t == last:
            if rem and not w_num[t]:
                return
            evaluated += 1
            inner = 0
            for j in range(r):
                cj = coeff_int[j]
                if cj:
                    inner += cj * aprods[j] * vpow[j][t][rem]
            gain = inner - strike_int
            if gain > 0:
                acc += mult * wprod * wpow[t][rem] * gain
            return
        if not w_num[t]:
            walk(t + 1, rem, mult, wprod, aprods)
            return
        crow = comb[rem]
        for e in range(rem + 1):
            walk(
                t + 1,
                rem - e,
                mult * crow[e],
                wprod * wpow[t][e],
                [ap * vpow[j][t][e] for j, ap in enumerate(aprods)],
            )

    walk(0, k, 1, 1, [1] * r)
    if stats is not None:
        stats.tally(terms=math.comb(k + parts - 1, parts - 1), evaluated=evaluated)
    return Fraction(acc, w_den**k * scale)


def _generic_symmetric_sum(
    payoff: Payoff,
    omega: Word,
    letters: Sequence[LatticeElement],
    weights: Sequence[Fraction],
    k: int,
    stats: SumStats | None = None,
) -> Fraction:
    """Composition sum for an arbitrary symmetric payoff, in rationals."""
    total = Fraction(0)
    evaluated = 0
    n_terms = 0
    for comp in compositions(k, len(weights)):
        n_terms += 1
        if any(c and not w for c, w in zip(comp, weights)):
            continue
        evaluated += 1
        weight = Fraction(multinomial(comp))
        suffix: list[LatticeElement] = []
        for letter, w, c in zip(letters, weights, comp):
            if c:
                weight *= w**c
                suffix.extend([letter] * c)
        total += weight * payoff.evaluate(omega.concat(Word(payoff.m, tuple(suffix))))
    if stats is not None:
        stats.tally(terms=n_terms, evaluated=evaluated)
    return total


def _resolve_node(payoff: Payoff, omega: Word | None, k: int | None) -> tuple[Word, int]:
    if omega is None:
        omega = Word.empty(payoff.m)
    if k is None:
        k = payoff.n - len(omega)
    if len(omega) + k != payoff.n or k < 0:
        raise ValueError(
            f"word length {len(omega)} and depth {k} do not fit horizon {payoff.n}"
        )
    return omega, k


def _product_expectation(
    payoff: Payoff,
    chain: Sequence[tuple[LatticeElement, Fraction]],
    omega: Word,
    k: int,
    stats: SumStats | None,
    use_certificate: bool,
) -> Fraction:
    letters = [el for el, _ in chain]
    weights = [w for _, w in chain]
    cert = payoff.certificate if use_certificate else None
    if cert is None:
        if not payoff.symmetric:
            raise ValueError("the multinomial collapse needs a symmetric payoff")
        return _generic_symmetric_sum(payoff, omega, letters, weights, k, stats)
    factor_rows = [[u[el] for el in letters] for u in cert.factors]
    coeffs = [
        s * cert.word_factor(j, omega.letters) for j, s in enumerate(cert.scales)
    ]
    return _collapsed_truncated_sum(k, weights, factor_rows, coeffs, cert.strike, stats)


def supervertex_expectation(
    payoff: Payoff,
    spec: PolytopeSpec,
    omega: Word | None = None,
    k: int | None = None,
    stats: SumStats | None = None,
    use_certificate: bool = True,
) -> Fraction:
    """Expectation of the prefix-restricted payoff under the supervertex
    product measure: the exact maximum over all policies valued in P(b).

    Unsorted b is handled internally: the chain letters returned by
    ``supervertex_chain`` already absorb the sorting permutation, so callers
    never pre-sort.  With k = 0 this is just the payoff at omega.
    """
    if payoff.m != spec.m:
        raise ValueError("payoff and spec disagree on m")
    omega, k = _resolve_node(payoff, omega, k)
    chain = supervertex_chain(spec)
    return _product_expectation(payoff, chain, omega, k, stats, use_certificate)


def subvertex_expectation(
    payoff: Payoff,
    spec: PolytopeSpec,
    omega: Word | None = None,
    k: int | None = None,
    stats: SumStats | None = None,
    use_certificate: bool = True,
) -> Fraction:
    """Expectation under the subvertex product measure: the exact minimum
    over all policies valued in P(b), available only when the subvertex
    belongs to the polytope."""
    if payoff.m != spec.m:
        raise ValueError("payoff and spec disagree on m")
    if spec.is_empty:
        raise EmptyPolytopeError("the fiber is empty")
    if not subvertex_in_polytope(spec):
        raise SubvertexCriterionError(
            f"criterion violated: sum(b) = {sum(spec.b)} > 2 - m = {2 - spec.m}"
        )
    omega, k = _resolve_node(payoff, omega, k)
    chain = tuple(
        (nu(i, spec.m), w) for i, w in enumerate(spec.b_dprime)
    )
    return _product_expectation(payoff, chain, omega, k, stats, use_certificate)


@dataclass(frozen=True)
class MinimizerData:
    """Per-letter data of the closed-form lower bound for a European payoff.

    ``beta`` holds 1 followed by the subvertex tail weights (b(i)+1)/2;
    ``alpha[j]`` holds factor j evaluated at the top element followed by the
    drops factor_j(single-zero i) - factor_j(top).  All entries are
    nonnegative whenever the fiber is nonempty, because the factors are
    nonnegative and order reversing.
    """

    m: int
    beta: tuple[Fraction, ...]
    alpha: tuple[tuple[Fraction, ...], ...]
    scales: tuple[Fraction, ...]
    strike: Fraction
    certificate: EuropeanCertificate

    @classmethod
    def from_certificate(cls, cert: EuropeanCertificate, spec: PolytopeSpec) -> "MinimizerData":
        if cert.m != spec.m:
            raise ValueError("certificate and spec disagree on m")
        if spec.is_empty:
            raise EmptyPolytopeError("the fiber is empty")
        m = spec.m
        beta = (Fraction(1),) + spec.b_dprime[1:]
        top_values = [u[nu(0, m)] for u in cert.factors]
        alpha = tuple(
            (tv,) + tuple(u[nu(i, m)] - tv for i in range(1, m + 1))
            for u, tv in zip(cert.factors, top_values)
        )
        for row in alpha:
            if any(v < 0 for v in row):
                raise ValueError("factors must be order reversing and nonnegative")
        return cls(
            m=m,
            beta=beta,
            alpha=alpha,
            scales=cert.scales,
            strike=cert.strike,
            certificate=cert,
        )


def minimizer_at_node(
    data: MinimizerData,
    omega: Word | None = None,
    k: int = 0,
    stats: SumStats | None = None,
) -> Fraction:
    """The depth-k minimizer value at a node: a pointwise lower bound for
    every policy's backward extension of the payoff there.

    At k = 0 this reduces to the payoff itself; the full-depth value at the
    root is the global lower bound of ``minimizer_bound``.
    """
    if omega is None:
        omega = Word.empty(data.m)
    if omega.m != data.m:
        raise ValueError("word and data disagree on m")
    if k < 0:
        raise ValueError("depth must be nonnegative")
    cert = data.certificate
    coeffs = [
        s * cert.word_factor(j, omega.letters) for j, s in enumerate(data.scales)
    ]
    return _collapsed_truncated_sum(k, data.beta, data.alpha, coeffs, data.strike, stats)


def minimizer_bound(
    data: MinimizerData, n: int, stats: SumStats | None = None
) -> Fraction:
    """The root lower bound on the minimal expectation over all policies."""
    return minimizer_at_node(data, Word.empty(data.m), n, stats)
