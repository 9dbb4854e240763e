"""The m-asset binomial market: model validation, payoff, price interval.

Each asset moves by a factor U_i (coordinate bit 0) or D_i (bit 1) per step,
with 0 < D_i < R < U_i around the per-step account growth R.  The one-step
martingale condition turns the market into a fiber P(b) with
b(i) = (2R - U_i - D_i) / (U_i - D_i), strictly inside the cube, and the
basket call payoff (sum w_i S_i(0) prod-of-factors - C)+ is symmetric with a
European certificate, so both interval endpoints come from the polynomial
formulas: the upper endpoint always, the lower one exactly when the
subvertex criterion holds and as a closed-form lower bound otherwise.

Values are reported undiscounted by default, matching the conditional
expectation of the terminal payoff; the optional discount flag divides by
R^(remaining steps).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, NamedTuple

from ._rational import exact
from .fast_bounds import (
    MinimizerData,
    minimizer_at_node,
    minimizer_bound,
    subvertex_expectation,
    supervertex_expectation,
)
from .lpos import EuropeanCertificate, one_step_factor
from .polytope import (
    PolytopeSpec,
    VertexDensity,
    make_spec,
    subvertex,
    subvertex_in_polytope,
    supervertex,
)
from .tree_engine import Payoff, Word


@dataclass(frozen=True)
class Asset:
    """One share: spot price and its per-step down/up factors."""

    spot: Fraction
    down: Fraction
    up: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "spot", exact(self.spot))
        object.__setattr__(self, "down", exact(self.down))
        object.__setattr__(self, "up", exact(self.up))
        if self.spot <= 0:
            raise ValueError(f"spot price must be positive, got {self.spot}")


@dataclass(frozen=True)
class MarketModel:
    """An m-asset binomial market over n steps with strike C.

    Requires 0 < D_i < R < U_i for every asset (which keeps every |b(i)|
    strictly below 1) and R >= 1.  ``weights`` are the portfolio holdings in
    the basket call; they default to one share of everything.
    """

    n: int
    rate: Fraction
    assets: tuple[Asset, ...]
    strike: Fraction
    weights: tuple[Fraction, ...] = ()
    discount: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", exact(self.rate))
        object.__setattr__(self, "strike", exact(self.strike))
        if not self.assets:
            raise ValueError("at least one asset is required")
        if self.n < 0:
            raise ValueError("the horizon must be nonnegative")
        if self.rate < 1:
            raise ValueError(f"the per-step growth R must be >= 1, got {self.rate}")
        if self.strike < 0:
            raise ValueError(f"the strike must be nonnegative, got {self.strike}")
        for idx, asset in enumerate(self.assets, start=1):
            if not 0 < asset.down < self.rate < asset.up:
                raise ValueError(
                    f"asset {idx}: requires 0 < D < R < U, got "
                    f"D={asset.down}, R={self.rate}, U={asset.up}"
                )
        weights = tuple(exact(w) for w in self.weights) or (Fraction(1),) * len(self.assets)
        if len(weights) != len(self.assets):
            raise ValueError("one weight per asset is required")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "weights", weights)

    @property
    def m(self) -> int:
        return len(self.assets)


def b_from_market(model: MarketModel) -> tuple[Fraction, ...]:
    """The fiber target: b(i) = (2R - U_i - D_i) / (U_i - D_i), each |b(i)| < 1."""
    return tuple(
        (2 * model.rate - a.up - a.down) / (a.up - a.down) for a in model.assets
    )


def market_spec(model: MarketModel) -> PolytopeSpec:
    return make_spec(b_from_market(model))


def payoff(model: MarketModel) -> Payoff:
    """The basket call payoff on leaf words, certificate attached.

    At the word letters lambda_1..lambda_n the value is
    (sum_i w_i S_i(0) prod_j factor_i(lambda_j) - C)+ where factor_i takes
    U_i on an up bit and D_i on a down bit.  The evaluation is symmetric in
    the letters because the per-asset products only see bit counts.
    """
    m, n = model.m, model.n
    factors = tuple(
        one_step_factor(i, asset.down, asset.up, m)
        for i, asset in enumerate(model.assets, start=1)
    )
    scales = tuple(w * a.spot for w, a in zip(model.weights, model.assets))
    cert = EuropeanCertificate(m=m, factors=factors, scales=scales, strike=model.strike)

    def evaluate(word: Word) -> Fraction:
        if len(word) != n:
            raise ValueError(f"expected a word of length {n}, got {len(word)}")
        total = Fraction(0)
        for i, (asset, scale) in enumerate(zip(model.assets, scales), start=1):
            downs = sum(el.value(i) for el in word.letters)
            total += scale * asset.down**downs * asset.up ** (n - downs)
        gain = total - model.strike
        return gain if gain > 0 else Fraction(0)

    return Payoff(m=m, n=n, evaluate=evaluate, symmetric=True, certificate=cert)


@dataclass(frozen=True)
class PriceInterval:
    """The closed interval of rational option prices at time zero.

    ``f_min`` is exact when ``criterion_met`` (the subvertex lies in the
    fiber); otherwise it is the closed-form lower bound and ``f_min_kind``
    says so.  ``discounted`` records whether R^-n was applied.
    """

    f_max: Fraction
    f_min: Fraction
    f_min_kind: Literal["exact", "lower_bound"]
    criterion_met: bool
    supervertex: VertexDensity
    subvertex: VertexDensity
    discounted: bool

    @property
    def width(self) -> Fraction:
        return self.f_max - self.f_min


def price_interval(model: MarketModel) -> PriceInterval:
    """Both endpoints of the rational price interval of the basket call."""
    spec = market_spec(model)
    pay = payoff(model)
    f_max = supervertex_expectation(pay, spec)
    criterion = subvertex_in_polytope(spec)
    if criterion:
        f_min = subvertex_expectation(pay, spec)
        kind = "exact"
    else:
        f_min = minimizer_bound(
            MinimizerData.from_certificate(pay.certificate, spec), model.n
        )
        kind = "lower_bound"
    if model.discount:
        deflator = Fraction(1) / model.rate**model.n
        f_max *= deflator
        f_min *= deflator
    return PriceInterval(
        f_max=f_max,
        f_min=f_min,
        f_min_kind=kind,
        criterion_met=criterion,
        supervertex=supervertex(spec),
        subvertex=subvertex(spec),
        discounted=model.discount,
    )


class NodeBounds(NamedTuple):
    upper: Fraction
    lower: Fraction
    lower_kind: str


def option_value_bounds(model: MarketModel, omega: Word) -> NodeBounds:
    """The envelope of rational option values at an interior node.

    ``omega`` is the path so far; the bounds apply to the conditional value
    of the terminal payoff given that path.  The upper bound is always
    exact; the lower one is exact under the subvertex criterion and the
    minimizer bound otherwise.  Nodes whose paths carry the same letter
    multiset get identical bounds.
    """
    spec = market_spec(model)
    pay = payoff(model)
    if omega.m != model.m or len(omega) > model.n:
        raise ValueError("node word does not fit the model")
    k = model.n - len(omega)
    upper = supervertex_expectation(pay, spec, omega, k)
    if subvertex_in_polytope(spec):
        lower = subvertex_expectation(pay, spec, omega, k)
        kind = "exact"
    else:
        data = MinimizerData.from_certificate(pay.certificate, spec)
        lower = minimizer_at_node(data, omega, k)
        kind = "lower_bound"
    if model.discount:
        deflator = Fraction(1) / model.rate**k
        upper *= deflator
        lower *= deflator
    return NodeBounds(upper=upper, lower=lower, lower_kind=kind)
