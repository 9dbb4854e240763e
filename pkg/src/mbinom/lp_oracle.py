"""Exact linear optimization over P(b): the brute-force ground truth.

A primal simplex on the standard-form system (m+1 parity equalities, 2^m
nonnegative variables) with all arithmetic in Fractions.  Bland's rule keeps
it finite despite the heavy degeneracy of these fibers (many zero weights),
and phase one uses artificial variables rather than big-M constants, which
sit awkwardly with exact arithmetic.  Every solve can bundle an exact dual
certificate: for a maximization the dual vector is a parity combination that
dominates the objective entrywise while matching its optimum on the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, NamedTuple, Sequence

from .lattice import LatticeVector, ell
from .lpos import is_ell_positive, truncate
from .polytope import PolytopeSpec, subvertex

#: Default cap on m; the tableau has 2^m columns.
DEFAULT_MAX_M = 8


@dataclass(frozen=True)
class LpProblem:
    spec: PolytopeSpec
    objective: LatticeVector
    direction: Literal["max", "min"]

    def __post_init__(self) -> None:
        if self.direction not in ("max", "min"):
            raise ValueError(f"direction must be 'max' or 'min', got {self.direction!r}")
        if self.objective.m != self.spec.m:
            raise ValueError("objective dimension does not match the spec")


@dataclass(frozen=True)
class LpSolution:
    """Exact optimum; when optimal, argpoint lies in P(b) and attains value.

    ``dual`` is the certificate y in R^(m+1): y . (1, b) equals the value,
    and the parity combination sum y_i ell(i) dominates the objective
    entrywise from above (max) or below (min), with equality on the support
    of argpoint.
    """

    status: Literal["optimal", "infeasible"]
    value: Fraction | None = None
    argpoint: LatticeVector | None = None
    dual: tuple[Fraction, ...] | None = None


class _SimplexOutcome(NamedTuple):
    status: str
    value: Fraction | None
    x: list[Fraction] | None
    dual: list[Fraction] | None


def _pivot(tableau, rhs, red, basis, row, col, n_total):
    piv = tableau[row][col]
    inv = 1 / piv
    prow = tableau[row] = [v * inv for v in tableau[row]]
    rhs[row] *= inv
    for r, trow in enumerate(tableau):
        if r != row and trow[col] != 0:
            f = trow[col]
            tableau[r] = [a - f * b for a, b in zip(trow, prow)]
            rhs[r] -= f * rhs[row]
    f = red[col]
    if f != 0:
        for j in range(n_total):
            red[j] -= f * prow[j]
    basis[row] = col


def _bland_min(tableau, rhs, red, basis, allowed, n_total):
    """Run Bland-rule pivots to optimality; allowed columns may enter."""
    while True:
        enter = next((j for j in allowed if red[j] < 0), None)
        if enter is None:
            return
        best = None
        for i, trow in enumerate(tableau):
            t = trow[enter]
            if t > 0:
                ratio = rhs[i] / t
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            # Cannot happen on a subset of a simplex, which is bounded.
            raise RuntimeError("unbounded linear program over a compact fiber")
        _pivot(tableau, rhs, red, basis, best[1], enter, n_total)


def simplex_min(
    rows: Sequence[Sequence[Fraction]],
    rhs_in: Sequence[Fraction],
    cost: Sequence[Fraction],
) -> _SimplexOutcome:
    """Minimize cost . x subject to rows . x = rhs, x >= 0, exactly.

    Two phases with artificial variables; artificial columns are carried
    through so the final tableau exposes the basis inverse, from which the
    dual vector is read off.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    signs = [1 if r >= 0 else -1 for r in rhs_in]
    tableau = [
        [Fraction(s * v) for v in row] + [Fraction(0)] * n_rows
        for s, row in zip(signs, rows)
    ]
    for i in range(n_rows):
        tableau[i][n_cols + i] = Fraction(1)
    rhs = [Fraction(s * r) for s, r in zip(signs, rhs_in)]
    n_total = n_cols + n_rows
    basis = [n_cols + i for i in range(n_rows)]

    # Phase 1: minimize the artificial total.
    red = [Fraction(0)] * n_total
    for j in range(n_cols):
        red[j] = -sum(tableau[i][j] for i in range(n_rows))
    _bland_min(tableau, rhs, red, basis, range(n_cols), n_total)
    if sum((rhs[i] for i in range(n_rows) if basis[i] >= n_cols), Fraction(0)) > 0:
        return _SimplexOutcome("infeasible", None, None, None)

    # Degenerate artificials left in the basis: pivot them out on any
    # nonzero real entry (the rows are at level zero, so feasibility holds).
    for i in range(n_rows):
        if basis[i] >= n_cols:
            col = next((j for j in range(n_cols) if tableau[i][j] != 0), None)
            if col is None:
                raise RuntimeError("rank-deficient parity system")
            _pivot(tableau, rhs, red, basis, i, col, n_total)

    # Phase 2: the real objective, artificial columns barred from entering.
    cost = [Fraction(c) for c in cost]
    red = list(cost) + [Fraction(0)] * n_rows
    for i, b in enumerate(basis):
        cb = cost[b]
        if cb != 0:
            for j in range(n_total):
                red[j] -= cb * tableau[i][j]
    _bland_min(tableau, rhs, red, basis, range(n_cols), n_total)

    x = [Fraction(0)] * n_cols
    for i, b in enumerate(basis):
        x[b] = rhs[i]
    value = sum((cost[j] * x[j] for j in range(n_cols) if x[j]), Fraction(0))
    # y = c_B . B^{-1}, read from the artificial block, then unflip row signs.
    dual = [
        signs[i]
        * sum(
            (cost[basis[k]] * tableau[k][n_cols + i] for k in range(n_rows)),
            Fraction(0),
        )
        for i in range(n_rows)
    ]
    return _SimplexOutcome("optimal", value, x, dual)


def _certify(problem: LpProblem, value, x, dual) -> None:
    spec, f = problem.spec, problem.objective
    m = spec.m
    targets = (Fraction(1),) + spec.b
    if sum(x) != 1 or any(v < 0 for v in x):
        raise RuntimeError("simplex returned a point outside the simplex")
    for i in range(m + 1):
        if ell(i, m).dot(LatticeVector(m, tuple(x))) != targets[i]:
            raise RuntimeError("simplex returned a point off the fiber")
    if sum(fv * xv for fv, xv in zip(f.entries, x)) != value:
        raise RuntimeError("reported value does not match the argpoint")
    if sum(y * t for y, t in zip(dual, targets)) != value:
        raise RuntimeError("strong duality violated")
    sense = 1 if problem.direction == "max" else -1
    for idx in range(1 << m):
        combo = sum(dual[i] * ell(i, m).entries[idx] for i in range(m + 1))
        gap = sense * (combo - f.entries[idx])
        if gap < 0:
            raise RuntimeError("dual certificate does not dominate the objective")
        if gap > 0 and x[idx] != 0:
            raise RuntimeError("complementary slackness violated")


def solve(problem: LpProblem, max_m: int = DEFAULT_MAX_M, check: bool = True) -> LpSolution:
    """Optimize the objective over P(b) exactly.

    Infeasibility is discovered by phase one, not assumed from the spec, so
    the solver independently confirms the emptiness criterion.
    """
    m = problem.spec.m
    if m > max_m:
        raise ValueError(f"m={m} exceeds the LP cap of {max_m} (2^m columns)")
    rows = [ell(i, m).entries for i in range(m + 1)]
    rhs = [Fraction(1), *problem.spec.b]
    if problem.direction == "max":
        cost = [-v for v in problem.objective.entries]
    else:
        cost = list(problem.objective.entries)
    outcome = simplex_min(rows, rhs, cost)
    if outcome.status == "infeasible":
        return LpSolution(status="infeasible")
    value = outcome.value
    dual = outcome.dual
    if problem.direction == "max":
        value = -value
        dual = [-y for y in dual]
    if check:
        _certify(problem, value, outcome.x, dual)
    return LpSolution(
        status="optimal",
        value=value,
        argpoint=LatticeVector(m, tuple(outcome.x)),
        dual=tuple(dual),
    )


class LowerGap(NamedTuple):
    lp_min: Fraction
    subvertex_bound: Fraction


def minimize_lower_gap(spec: PolytopeSpec, u: LatticeVector) -> LowerGap:
    """Both sides of the subvertex inequality for a positive-parity u.

    Returns the exact LP minimum of <u+, .> over P(b) together with the
    closed-form bound <u+, q_*>; the former always dominates the latter,
    which is itself nonnegative.  Violation would falsify the implementation
    and raises.
    """
    cls = is_ell_positive(u)
    if not (cls.positive or cls.borderline):
        raise ValueError("u must have nonnegative parity coefficients a_1..a_m")
    u_plus = truncate(u)
    sol = solve(LpProblem(spec=spec, objective=u_plus, direction="min"))
    if sol.status != "optimal":
        raise ValueError("the fiber is empty")
    bound = u_plus.dot(subvertex(spec).to_vector())
    if not sol.value >= bound >= 0:
        raise RuntimeError(
            f"subvertex bound violated: lp_min={sol.value}, bound={bound}"
        )
    return LowerGap(lp_min=sol.value, subvertex_bound=bound)
