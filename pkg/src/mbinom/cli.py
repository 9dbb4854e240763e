"""Command-line frontend: price, polytope, verify, expect.

All numeric I/O is exact: inputs are ints or fraction/decimal strings, and
every rational in the output is serialized as a fraction string, so results
round-trip bit for bit.  Binary floats are rejected at the door.  Exit codes:
0 success, 1 a verification counterexample, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import sampling
from ._rational import exact, frac_str
from .fast_bounds import MinimizerData, minimizer_bound, subvertex_expectation, supervertex_expectation
from .lattice import (
    LatticeVector,
    ell_matrix,
    ell_prime_matrix,
    ell_prime_transition,
    ell_prime_transition_inverse,
    c_vector,
    mu,
)
from .lpos import one_step_factor, truncate
from .lp_oracle import LpProblem, solve
from .polytope import (
    contains,
    make_spec,
    subvertex,
    subvertex_in_polytope,
    supervertex,
)
from .pricing import MarketModel, Asset, b_from_market, market_spec, payoff, price_interval
from .tree_engine import (
    DEFAULT_MAX_ORACLE_BITS,
    TreePolicy,
    extend,
    tree_extremum,
)

ENV_ORACLE_BITS = "MB_MAX_ORACLE_BITS"

#: Tree-backed verification is run per case only up to this many total bits.
VERIFY_TREE_BITS = 12


class CliError(Exception):
    """Invalid configuration or input; maps to exit code 2."""


def _oracle_bits() -> int:
    raw = os.environ.get(ENV_ORACLE_BITS)
    if raw is None:
        return DEFAULT_MAX_ORACLE_BITS
    try:
        bits = int(raw)
    except ValueError as exc:
        raise CliError(f"{ENV_ORACLE_BITS} must be an integer, got {raw!r}") from exc
    if bits < 1:
        raise CliError(f"{ENV_ORACLE_BITS} must be positive, got {bits}")
    return bits


def _rational(value, where: str) -> Fraction:
    try:
        return exact(value)
    except (TypeError, ValueError) as exc:
        raise CliError(f"{where}: {exc}") from exc


def _rational_list(text: str, where: str) -> list[Fraction]:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise CliError(f"{where}: expected a comma-separated list of rationals")
    return [_rational(piece, where) for piece in items]


def _load_model(path: str, discount: bool) -> MarketModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError("config must be a JSON object")
    try:
        raw_assets = doc["assets"]
        n = doc["n"]
    except KeyError as exc:
        raise CliError(f"config is missing the {exc.args[0]!r} field") from exc
    if not isinstance(raw_assets, list) or not raw_assets:
        raise CliError("config field 'assets' must be a nonempty list")
    if not isinstance(n, int) or isinstance(n, bool):
        raise CliError("config field 'n' must be an integer")
    assets = []
    for idx, entry in enumerate(raw_assets, start=1):
        if not isinstance(entry, dict):
            raise CliError(f"asset {idx} must be an object with S0, D, U")
        try:
            assets.append(
                Asset(
                    spot=_rational(entry["S0"], f"asset {idx} S0"),
                    down=_rational(entry["D"], f"asset {idx} D"),
                    up=_rational(entry["U"], f"asset {idx} U"),
                )
            )
        except KeyError as exc:
            raise CliError(f"asset {idx} is missing {exc.args[0]!r}") from exc
    weights = tuple(
        _rational(w, "weights") for w in doc.get("weights", ())
    )
    try:
        return MarketModel(
            n=n,
            rate=_rational(doc.get("R", 1), "R"),
            assets=tuple(assets),
            strike=_rational(doc.get("strike", 0), "strike"),
            weights=weights,
            discount=discount,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _vertex_doc(vd) -> dict:
    return {str(el): frac_str(w) for el, w in vd.support}


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_price(args) -> int:
    model = _load_model(args.config, discount=args.discount)
    interval = price_interval(model)
    spec = market_spec(model)
    doc = {
        "m": model.m,
        "n": model.n,
        "b": [frac_str(v) for v in spec.b],
        "b_prime": [frac_str(v) for v in spec.b_prime],
        "b_dprime": [frac_str(v) for v in spec.b_dprime],
        "supervertex": _vertex_doc(interval.supervertex),
        "subvertex": _vertex_doc(interval.subvertex),
        "criterion_met": interval.criterion_met,
        "f_max": frac_str(interval.f_max),
        "f_min": frac_str(interval.f_min),
        "f_min_kind": interval.f_min_kind,
        "discounted": interval.discounted,
    }
    _emit(doc, args.out)
    return 0


def cmd_polytope(args) -> int:
    b = _rational_list(args.b, "--b")
    spec = make_spec(b)
    doc = {
        "m": spec.m,
        "b": [frac_str(v) for v in spec.b],
        "empty": spec.is_empty,
    }
    if not spec.is_empty:
        doc.update(
            {
                "b_prime": [frac_str(v) for v in spec.b_prime],
                "b_dprime": [frac_str(v) for v in spec.b_dprime],
                "supervertex": _vertex_doc(supervertex(spec)),
                "subvertex": _vertex_doc(subvertex(spec)),
                "criterion_met": subvertex_in_polytope(spec),
            }
        )
    _emit(doc, args.out)
    return 0


def cmd_expect(args) -> int:
    model = _load_model(args.config, discount=False)
    density = _rational_list(args.density, "--density")
    if len(density) != 1 << model.m:
        raise CliError(
            f"--density needs {1 << model.m} entries for m={model.m}, got {len(density)}"
        )
    if any(v < 0 for v in density) or sum(density) != 1:
        raise CliError("--density must be nonnegative and sum to 1")
    bits = _oracle_bits()
    if model.m * model.n > bits:
        raise CliError(
            f"tree size 2^{model.m * model.n} exceeds the oracle cap 2^{bits}; "
            f"set {ENV_ORACLE_BITS} to raise it"
        )
    pay = payoff(model)
    policy = TreePolicy.constant(model.m, model.n, density)
    value = extend(pay, policy, model.n, max_bits=bits).root_value
    spec = market_spec(model)
    doc = {
        "m": model.m,
        "n": model.n,
        "density": [frac_str(v) for v in density],
        "in_polytope": contains(spec, LatticeVector(model.m, tuple(density))),
        "expectation": frac_str(value),
    }
    _emit(doc, args.out)
    return 0


def _golden_matrices_ok() -> bool:
    m = 4
    t = ell_prime_transition(m)
    t_inv = ell_prime_transition_inverse(m)
    identity = [
        [sum(t[i][k] * t_inv[k][j] for k in range(m + 1)) for j in range(m + 1)]
        for i in range(m + 1)
    ]
    if identity != [[1 if i == j else 0 for j in range(m + 1)] for i in range(m + 1)]:
        return False
    big_l = ell_matrix(m)
    prime = [
        [
            sum(t[i][k] * big_l[k][col] for k in range(m + 1))
            for col in range(1 << m)
        ]
        for i in range(m + 1)
    ]
    if tuple(tuple(row) for row in prime) != ell_prime_matrix(m):
        return False
    for i in range(m + 1):
        expected = [Fraction(1) if j == i else Fraction(0) for j in range(m + 1)]
        if list(c_vector(mu(i, m))) != expected:
            return False
    return True


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    bits = min(_oracle_bits(), VERIFY_TREE_BITS)
    names = [
        "max_at_supervertex",
        "min_vs_subvertex_bound",
        "min_at_subvertex_when_criterion",
        "martingale_factors",
        "fast_max_vs_tree",
        "fast_min_vs_tree",
        "minimizer_sandwich",
        "golden_matrices",
    ]
    checks = {name: {"instances": 0, "failures": 0} for name in names}
    counterexample = None

    def record(name: str, ok: bool, witness: dict) -> bool:
        nonlocal counterexample
        checks[name]["instances"] += 1
        if not ok:
            checks[name]["failures"] += 1
            if counterexample is None:
                counterexample = {"check": name, **witness}
        return ok

    for case in range(args.cases):
        if counterexample:
            break
        m = rng.randint(1, args.m)
        n = rng.randint(1, args.n)
        force_criterion = case % 4 == 3
        b = (
            sampling.random_criterion_b(rng, m)
            if force_criterion
            else sampling.random_b(rng, m)
        )
        spec = make_spec(b)
        u = sampling.random_ell_positive(rng, m)
        u_plus = truncate(u.to_vector())
        witness = {
            "m": m,
            "b": [frac_str(v) for v in b],
            "u_coeffs": [frac_str(v) for v in u.coeffs],
        }
        sv = supervertex(spec).to_vector()
        claimed = u_plus.dot(sv)
        if args.corrupt_supervertex:
            claimed += 1
        lp_max = solve(LpProblem(spec=spec, objective=u_plus, direction="max")).value
        if not record("max_at_supervertex", lp_max == claimed, witness):
            break
        lp_min = solve(LpProblem(spec=spec, objective=u_plus, direction="min")).value
        bound = u_plus.dot(subvertex(spec).to_vector())
        if not record(
            "min_vs_subvertex_bound", lp_min >= bound >= 0, witness
        ):
            break
        if subvertex_in_polytope(spec):
            if not record(
                "min_at_subvertex_when_criterion", lp_min == bound, witness
            ):
                break

        model = sampling.random_market(
            rng, m, n, force_criterion=force_criterion
        )
        mspec = market_spec(model)
        model_witness = {"model": _model_doc(model)}
        qs = supervertex(mspec).to_vector()
        martingale_ok = all(
            one_step_factor(i, a.down, a.up, m).dot(qs) == model.rate
            for i, a in enumerate(model.assets, start=1)
        )
        if subvertex_in_polytope(mspec):
            q_sub = subvertex(mspec).to_vector()
            martingale_ok = martingale_ok and all(
                one_step_factor(i, a.down, a.up, m).dot(q_sub) == model.rate
                for i, a in enumerate(model.assets, start=1)
            )
        if not record("martingale_factors", martingale_ok, model_witness):
            break

        if m * n <= bits:
            pay = payoff(model)
            fast_max = supervertex_expectation(pay, mspec)
            tree_max = tree_extremum(pay, mspec, "max", max_bits=bits).value
            if not record("fast_max_vs_tree", fast_max == tree_max, model_witness):
                break
            tree_min = tree_extremum(pay, mspec, "min", max_bits=bits).value
            if subvertex_in_polytope(mspec):
                fast_min = subvertex_expectation(pay, mspec)
                if not record(
                    "fast_min_vs_tree", fast_min == tree_min, model_witness
                ):
                    break
            data = MinimizerData.from_certificate(pay.certificate, mspec)
            lower = minimizer_bound(data, model.n)
            if not record(
                "minimizer_sandwich",
                lower <= tree_min <= tree_max,
                model_witness,
            ):
                break

    if args.cases > 0 and not counterexample:
        record("golden_matrices", _golden_matrices_ok(), {"m": 4})

    doc = {
        "seed": args.seed,
        "cases": args.cases,
        "max_m": args.m,
        "max_n": args.n,
        "checks": [
            {"name": name, **checks[name]} for name in names
        ],
        "ok": counterexample is None,
    }
    if counterexample:
        doc["counterexample"] = counterexample
    _emit(doc, args.out)
    return 0 if counterexample is None else 1


def _model_doc(model: MarketModel) -> dict:
    return {
        "n": model.n,
        "R": frac_str(model.rate),
        "assets": [
            {"S0": frac_str(a.spot), "D": frac_str(a.down), "U": frac_str(a.up)}
            for a in model.assets
        ],
        "strike": frac_str(model.strike),
        "weights": [frac_str(w) for w in model.weights],
        "b": [frac_str(v) for v in b_from_market(model)],
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbinom",
        description="Exact rational price intervals for European calls on m binomial assets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="price interval of a basket call")
    p_price.add_argument("--config", required=True, help="model JSON path")
    p_price.add_argument("--discount", action="store_true", help="apply R^-n")
    p_price.add_argument("--out", help="write JSON here instead of stdout")
    p_price.set_defaults(fn=cmd_price)

    p_poly = sub.add_parser("polytope", help="inspect the fiber of a raw b vector")
    p_poly.add_argument("--b", required=True, help='comma list, e.g. "1/2,-1/3,0"')
    p_poly.add_argument("--out", help="write JSON here instead of stdout")
    p_poly.set_defaults(fn=cmd_polytope)

    p_verify = sub.add_parser("verify", help="run the randomized oracle suite")
    p_verify.add_argument("--m", type=int, default=3, help="max number of assets")
    p_verify.add_argument("--n", type=int, default=4, help="max horizon")
    p_verify.add_argument("--cases", type=int, default=100, help="random instances")
    p_verify.add_argument("--seed", type=int, default=0, help="rng seed")
    p_verify.add_argument("--out", help="write JSON here instead of stdout")
    p_verify.add_argument(
        "--corrupt-supervertex",
        action="store_true",
        help=argparse.SUPPRESS,  # test hook: falsify the claimed optimum
    )
    p_verify.set_defaults(fn=cmd_verify)

    p_expect = sub.add_parser(
        "expect", help="expectation under a user-supplied constant policy"
    )
    p_expect.add_argument("--config", required=True, help="model JSON path")
    p_expect.add_argument(
        "--policy", choices=["constant"], default="constant", help="policy kind"
    )
    p_expect.add_argument(
        "--density", required=True, help="comma list of 2^m one-step probabilities"
    )
    p_expect.add_argument("--out", help="write JSON here instead of stdout")
    p_expect.set_defaults(fn=cmd_expect)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
