"""Words over the one-step alphabet, tree policies and backward induction.

A policy assigns a probability density on the alphabet to every internal word
of length < n; it induces a product-of-conditionals measure on the leaf words
of length n.  Backward induction extends a leaf payoff down the tree level by
level; plugging in a per-node exact LP turns the induction into the generic
(exponential) optimizer whose root value is the maximal or minimal
expectation over all policies valued in P(b).

Levels are materialized as dense arrays indexed by the big-endian word index
(first letter most significant); only two adjacent levels are live at a time
during induction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, Sequence

from ._rational import exact
from .lattice import LatticeElement, LatticeVector, elements
from .lpos import EuropeanCertificate
from .lp_oracle import LpProblem, solve
from .polytope import EmptyPolytopeError, PolytopeSpec

#: Default cap: the oracle path touches 2^(m*n) leaves.
DEFAULT_MAX_ORACLE_BITS = 20


@dataclass(frozen=True)
class Word:
    """A word over the one-step alphabet; the empty word is the tree root."""

    m: int
    letters: tuple[LatticeElement, ...] = ()

    def __post_init__(self) -> None:
        for el in self.letters:
            if el.m != self.m:
                raise ValueError("letters live over different lattices")

    @classmethod
    def empty(cls, m: int) -> "Word":
        return cls(m, ())

    @classmethod
    def from_indices(cls, m: int, indices: Sequence[int]) -> "Word":
        return cls(m, tuple(LatticeElement(m, i) for i in indices))

    @classmethod
    def from_strings(cls, m: int, texts: Sequence[str]) -> "Word":
        return cls(m, tuple(LatticeElement.from_string(t) for t in texts))

    def __len__(self) -> int:
        return len(self.letters)

    def append(self, letter: LatticeElement) -> "Word":
        return Word(self.m, self.letters + (letter,))

    def concat(self, other: "Word") -> "Word":
        if other.m != self.m:
            raise ValueError("words live over different lattices")
        return Word(self.m, self.letters + other.letters)

    def is_prefix_of(self, other: "Word") -> bool:
        return self.m == other.m and other.letters[: len(self.letters)] == self.letters

    @property
    def index(self) -> int:
        """Big-endian word index: sum of letter indices weighted by 2^m powers."""
        idx = 0
        for el in self.letters:
            idx = (idx << self.m) | el.index
        return idx

    def __str__(self) -> str:
        return ".".join(str(el) for el in self.letters) if self.letters else "()"


def words(m: int, length: int) -> Iterator[Word]:
    """All words of the given length in index order."""
    alphabet = tuple(elements(m))

    def rec(prefix: tuple[LatticeElement, ...], remaining: int):
        if remaining == 0:
            yield Word(m, prefix)
            return
        for el in alphabet:
            yield from rec(prefix + (el,), remaining - 1)

    return rec((), length)


@dataclass(frozen=True)
class Payoff:
    """A function on leaf words, with optional structure flags.

    ``symmetric`` promises invariance under letter reordering (spot-checked
    by the test suite, relied on by the fast formulas).  A European
    certificate, when attached, exposes the truncated product form used by
    the polynomial pricing paths.
    """

    m: int
    n: int
    evaluate: Callable[[Word], Fraction]
    symmetric: bool = False
    certificate: EuropeanCertificate | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("the horizon must be nonnegative")
        if self.certificate is not None and self.certificate.m != self.m:
            raise ValueError("certificate lives over a different lattice")


class TreePolicy:
    """An assignment of a one-step density to every internal word.

    Densities are validated on access: nonnegative entries summing to one.
    Policies may be lazily defined by a function, a constant density, or a
    table (with a uniform default for unlisted words).
    """

    def __init__(self, m: int, n: int, assign: Callable[[Word], Sequence[Fraction]]):
        self.m = m
        self.n = n
        self._assign = assign

    @classmethod
    def constant(cls, m: int, n: int, density) -> "TreePolicy":
        values = _density_entries(m, density)
        return cls(m, n, lambda _word: values)

    @classmethod
    def from_function(cls, m: int, n: int, fn: Callable[[Word], Sequence[Fraction]]) -> "TreePolicy":
        return cls(m, n, fn)

    @classmethod
    def from_table(cls, m: int, n: int, table: dict) -> "TreePolicy":
        uniform = (Fraction(1, 1 << m),) * (1 << m)

        def assign(word: Word):
            entry = table.get(word)
            return uniform if entry is None else entry

        return cls(m, n, assign)

    def density(self, word: Word) -> tuple[Fraction, ...]:
        if word.m != self.m or len(word) >= self.n:
            raise ValueError("policy is defined on internal words only")
        values = _density_entries(self.m, self._assign(word))
        return values


def _density_entries(m: int, density) -> tuple[Fraction, ...]:
    if isinstance(density, LatticeVector):
        entries = density.entries
        if density.m != m:
            raise ValueError("density lives over a different lattice")
    else:
        entries = tuple(exact(v) for v in density)
    if len(entries) != 1 << m:
        raise ValueError(f"a density on the alphabet needs {1 << m} entries")
    if any(v < 0 for v in entries):
        raise ValueError("density entries must be nonnegative")
    if sum(entries) != 1:
        raise ValueError("density entries must sum to 1")
    return entries


@dataclass(frozen=True)
class WordFunction:
    """A dense function on the words of one fixed length."""

    m: int
    length: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != 1 << (self.m * self.length):
            raise ValueError("dense level has the wrong size")

    def at(self, word: Word) -> Fraction:
        if word.m != self.m or len(word) != self.length:
            raise ValueError("word does not belong to this level")
        return self.values[word.index]

    def items(self) -> Iterator[tuple[Word, Fraction]]:
        for word, value in zip(words(self.m, self.length), self.values):
            yield word, value

    @property
    def root_value(self) -> Fraction:
        if self.length != 0:
            raise ValueError("only the root level has a single value")
        return self.values[0]


def _check_oracle_size(m: int, n: int, max_bits: int) -> None:
    if m * n > max_bits:
        raise ValueError(
            f"oracle size 2^{m * n} exceeds the cap 2^{max_bits}; "
            "raise the cap explicitly if you really want this"
        )


def measure_of_policy(
    policy: TreePolicy,
    omega: Word | None = None,
    max_bits: int = DEFAULT_MAX_ORACLE_BITS,
) -> WordFunction:
    """The conditional density on the completions of ``omega``.

    Entry at tau is the product of the one-step densities read along the path
    omega, omega+tau_1, ...; with ``omega`` empty this is the full measure
    induced by the policy on leaf words.  A constant policy yields the
    product measure.
    """
    m, n = policy.m, policy.n
    if omega is None:
        omega = Word.empty(m)
    k = n - len(omega)
    if k < 0:
        raise ValueError("omega is longer than the horizon")
    _check_oracle_size(m, k, max_bits)
    size = 1 << m
    values = [Fraction(0)] * (size ** k)
    # Depth-first over completions keeps prefix products incremental.
    def rec(word: Word, prob: Fraction, depth: int, base: int):
        if depth == k:
            values[base] = prob
            return
        dens = policy.density(word)
        for el in elements(m):
            p = dens[el.index]
            rec(word.append(el), prob * p, depth + 1, (base << m) | el.index)

    rec(omega, Fraction(1), 0, 0)
    return WordFunction(m=m, length=k, values=tuple(values))


def cylinder_probability(policy: TreePolicy, omega: Word) -> Fraction:
    """Probability that a path starts with ``omega`` under the policy."""
    prob = Fraction(1)
    prefix = Word.empty(policy.m)
    for el in omega.letters:
        prob *= policy.density(prefix)[el.index]
        prefix = prefix.append(el)
    return prob


def _leaf_values(payoff: Payoff, omega: Word, k: int) -> list[Fraction]:
    m = payoff.m
    values = []

    def rec(word: Word, depth: int):
        if depth == k:
            values.append(exact(payoff.evaluate(word)))
            return
        for el in elements(m):
            rec(word.append(el), depth + 1)

    rec(omega, 0)
    return values


def extend(
    payoff: Payoff,
    policy: TreePolicy,
    k: int,
    max_bits: int = DEFAULT_MAX_ORACLE_BITS,
) -> WordFunction:
    """The level-k backward extension of the payoff under the policy.

    Level 0 is the payoff itself; each step averages the successor values
    against the policy density at the node.  At level k the value at a word
    omega equals the conditional expectation of the payoff given the cylinder
    at omega whenever that cylinder has positive probability.
    """
    m, n = payoff.m, payoff.n
    if policy.m != m or policy.n != n:
        raise ValueError("policy and payoff disagree on shape")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}")
    _check_oracle_size(m, n, max_bits)
    level = _leaf_values(payoff, Word.empty(m), n)
    size = 1 << m
    for step in range(1, k + 1):
        length = n - step
        next_level = []
        for word_idx, word in enumerate(words(m, length)):
            dens = policy.density(word)
            base = word_idx << m
            next_level.append(
                sum(
                    (dens[c] * level[base | c] for c in range(size) if dens[c]),
                    Fraction(0),
                )
            )
        level = next_level
    return WordFunction(m=m, length=n - k, values=tuple(level))


class TreeExtremum(NamedTuple):
    value: Fraction
    policy: TreePolicy


def tree_extremum(
    payoff: Payoff,
    spec: PolytopeSpec,
    direction: str,
    max_bits: int = DEFAULT_MAX_ORACLE_BITS,
) -> TreeExtremum:
    """Exact optimum of the expectation over all policies valued in P(b).

    Backward induction with one LP per internal node: at each node the next
    level's values form the objective and the optimizing density is recorded.
    The returned policy attains the returned value, and no policy beats it at
    any node (in the chosen direction).
    """
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    m, n = payoff.m, payoff.n
    if spec.m != m:
        raise ValueError("spec and payoff disagree on m")
    if spec.is_empty:
        raise EmptyPolytopeError("cannot optimize over an empty fiber")
    _check_oracle_size(m, n, max_bits)
    level = _leaf_values(payoff, Word.empty(m), n)
    size = 1 << m
    chosen: dict[Word, tuple[Fraction, ...]] = {}
    for step in range(1, n + 1):
        length = n - step
        next_level = []
        for word_idx, word in enumerate(words(m, length)):
            base = word_idx << m
            objective = LatticeVector(m, tuple(level[base | c] for c in range(size)))
            sol = solve(LpProblem(spec=spec, objective=objective, direction=direction))
            chosen[word] = sol.argpoint.entries
            next_level.append(sol.value)
        level = next_level
    policy = TreePolicy.from_table(m, n, chosen)
    return TreeExtremum(value=level[0], policy=policy)


def restrict(payoff: Payoff, omega: Word) -> Payoff:
    """The payoff on completions of a fixed prefix.

    Symmetry survives restriction (reordering the completion reorders a
    letter multiset the original payoff cannot see), and a European
    certificate restricts by absorbing the prefix factors into the scales.
    """
    if omega.m != payoff.m:
        raise ValueError("word and payoff disagree on m")
    k = payoff.n - len(omega)
    if k < 0:
        raise ValueError("prefix is longer than the horizon")
    if len(omega) == 0:
        return payoff
    cert = payoff.certificate
    if cert is not None:
        cert = cert.scaled_by_word(omega.letters)
    return Payoff(
        m=payoff.m,
        n=k,
        evaluate=lambda tau: payoff.evaluate(omega.concat(tau)),
        symmetric=payoff.symmetric,
        certificate=cert,
    )


def policy_from_density(
    m: int,
    n: int,
    leaf_density: WordFunction,
) -> TreePolicy:
    """Reconstruct a policy whose induced measure is the given leaf density.

    One-step densities are the conditional probabilities of cylinders; nodes
    of probability zero get the uniform density, which cannot affect the
    induced measure.
    """
    if leaf_density.m != m or leaf_density.length != n:
        raise ValueError("leaf density has the wrong shape")
    if any(v < 0 for v in leaf_density.values) or sum(leaf_density.values) != 1:
        raise ValueError("leaf values do not form a density")
    size = 1 << m
    levels = [list(leaf_density.values)]
    for _ in range(n):
        prev = levels[-1]
        levels.append(
            [
                sum(prev[(w << m) | c] for c in range(size))
                for w in range(len(prev) >> m)
            ]
        )
    levels.reverse()  # levels[k] now holds cylinder masses at word length k
    uniform = (Fraction(1, size),) * size

    def assign(word: Word) -> tuple[Fraction, ...]:
        length = len(word)
        mass = levels[length][word.index]
        if mass == 0:
            return uniform
        base = word.index << m
        return tuple(levels[length + 1][base | c] / mass for c in range(size))

    return TreePolicy(m, n, assign)
