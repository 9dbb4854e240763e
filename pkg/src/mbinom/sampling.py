"""Seeded random instance generators for the verification suites.

Everything draws from a caller-supplied ``random.Random`` so runs are
reproducible; all outputs are exact rationals on small denominator grids.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .lattice import LatticeVector
from .lpos import EllCoefficients
from .lp_oracle import LpProblem, solve
from .polytope import PolytopeSpec, make_spec
from .pricing import Asset, MarketModel
from .tree_engine import TreePolicy, Word, words


def random_fraction(rng: random.Random, lo, hi, den: int = 8) -> Fraction:
    """A rational lo + j*(hi-lo)/den with j uniform in 0..den."""
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


def random_b(rng: random.Random, m: int, den: int = 8) -> tuple[Fraction, ...]:
    """A target vector with every entry in [-1, 1] (boundary included)."""
    return tuple(Fraction(rng.randint(-den, den), den) for _ in range(m))


def random_criterion_b(rng: random.Random, m: int, den: int = 8) -> tuple[Fraction, ...]:
    """A target vector in the subvertex region: each entry in (-1, 2/m - 1]."""
    step = Fraction(2, m)
    return tuple(
        Fraction(-1) + step * Fraction(rng.randint(1, den), den) for _ in range(m)
    )


def random_ell_positive(rng: random.Random, m: int, den: int = 6) -> EllCoefficients:
    """Strictly positive parity coefficients, with a free constant term sized
    so the truncation is usually nontrivial."""
    tail = [Fraction(rng.randint(1, 3 * den), den) for _ in range(m)]
    bound = sum(tail)
    a0 = random_fraction(rng, -bound, bound, den=2 * den)
    return EllCoefficients(m=m, basis="ell", coeffs=(a0, *tail))


def random_density(rng: random.Random, size: int, den: int = 12) -> tuple[Fraction, ...]:
    weights = [rng.randint(0, den) for _ in range(size)]
    if not any(weights):
        weights[rng.randrange(size)] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def random_polytope_point(
    rng: random.Random, spec: PolytopeSpec, mixes: int = 3
) -> LatticeVector:
    """An exact point of P(b): a random convex combination of vertices found
    by optimizing random objectives."""
    points = []
    for _ in range(mixes):
        objective = LatticeVector(
            spec.m,
            tuple(
                Fraction(rng.randint(-12, 12), rng.randint(1, 4))
                for _ in range(1 << spec.m)
            ),
        )
        direction = rng.choice(("max", "min"))
        sol = solve(LpProblem(spec=spec, objective=objective, direction=direction))
        if sol.status != "optimal":
            raise ValueError("cannot sample from an empty fiber")
        points.append(sol.argpoint)
    mix = random_density(rng, len(points))
    acc = LatticeVector.zero(spec.m)
    for weight, point in zip(mix, points):
        acc = acc + point.scaled(weight)
    return acc


def random_policy(
    rng: random.Random, spec: PolytopeSpec, n: int, mixes: int = 3
) -> TreePolicy:
    """A tree policy valued in P(b), tabulated over all internal words."""
    table = {}
    for length in range(n):
        for word in words(spec.m, length):
            table[word] = random_polytope_point(rng, spec, mixes).entries
    return TreePolicy.from_table(spec.m, n, table)


def market_from_b(
    b: Sequence[Fraction],
    rate,
    rel_spreads: Sequence[Fraction],
    spots: Sequence[Fraction],
    strike,
    n: int,
    weights: Sequence[Fraction] = (),
    discount: bool = False,
) -> MarketModel:
    """Build a market realizing a prescribed target vector b.

    With half-spread h_i = rate * rel_spreads[i] the factors
    U_i = R + h_i (1 - b_i) and D_i = R - h_i (1 + b_i) reproduce b exactly;
    any rel_spread in (0, 1/2) keeps 0 < D_i < R < U_i for |b_i| < 1.
    """
    rate = Fraction(rate)
    assets = []
    for b_i, rel, spot in zip(b, rel_spreads, spots):
        h = rate * Fraction(rel)
        assets.append(
            Asset(spot=spot, down=rate - h * (1 + b_i), up=rate + h * (1 - b_i))
        )
    return MarketModel(
        n=n,
        rate=rate,
        assets=tuple(assets),
        strike=strike,
        weights=tuple(weights),
        discount=discount,
    )


def random_market(
    rng: random.Random,
    m: int,
    n: int,
    force_criterion: bool = False,
    discount: bool = False,
) -> MarketModel:
    """A valid random market; optionally forced into the subvertex region."""
    rate = Fraction(1) + Fraction(rng.randint(0, 2), 20)
    den = 8
    if force_criterion:
        # Market factors need |b| < 1 strictly; only m=1 can touch the top.
        b = tuple(
            min(v, Fraction(den - 1, den)) for v in random_criterion_b(rng, m, den)
        )
    else:
        b = tuple(Fraction(rng.randint(-(den - 1), den - 1), den) for _ in range(m))
    rel_spreads = [Fraction(rng.randint(1, 8), 18) for _ in range(m)]
    spots = [Fraction(rng.randint(50, 150)) for _ in range(m)]
    total = sum(spots)
    strike = total * Fraction(rng.randint(0, 8), 4)
    return market_from_b(
        b, rate, rel_spreads, spots, strike, n=n, discount=discount
    )
