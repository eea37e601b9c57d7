"""Command line front end: ``toricweyl <command> --family SOURCE [options]``.

Exit status is 0 when every check run by the command passes, 1 when a
verification fails and 2 for configuration or parse errors.  ``--json``
prints one deterministic JSON document (sorted keys, no timings).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .dombrowski import check_kahler, kahler_at
from .errors import (FamilyParseError, Mismatch, NoConvergence, NonIntegral, ToricWeylError)
from .expfam import (FiniteExpFam, binomial, categorical, christoffel_alpha, family_from_dict,
                     family_to_dict, fisher, fisher_def, mean_params, prob_vector)
from .geometry import check_duality_identity, legendre_dual_point, legendre_roundtrip, theta_grid
from .polytope import (affine_symmetries, cross_validate, metric_symmetries, momentum_polytope,
                       symmetry_group_dict)
from .report import CheckReport, jsonable
from .torus import verify_normalizer_model
from .weyl import (check_group_table, check_isometry, check_probability_action, enumerate_weyl)

COMMANDS = ("describe", "fisher", "christoffel", "legendre", "kahler", "weyl", "polytope",
            "cross-validate", "torus", "verify")
BUILTINS = {"categorical": categorical, "binomial": binomial}


class ConfigError(Exception):
    pass


def load_family(source: str, backend: str | None = None) -> FiniteExpFam:
    """Builtin ``"categorical:3"`` / ``"binomial:4"`` or a path to a family JSON file."""
    name, sep, arg = source.partition(":")
    if sep and name in BUILTINS:
        try:
            size = int(arg)
        except ValueError:
            raise FamilyParseError(f"builtin {name!r} needs an integer size, got {arg!r}") from None
        return BUILTINS[name](size, backend or "rational")
    path = Path(source)
    if not path.is_file():
        raise FamilyParseError(f"{source!r} is neither a builtin family nor an existing file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FamilyParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return family_from_dict(data, backend)
    except FamilyParseError as exc:
        raise FamilyParseError(f"{path}: {exc}") from None


def _vector(text: str | None, n: int, what: str):
    if text is None:
        return None
    try:
        vals = [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"--{what}: cannot parse {text!r}") from None
    if len(vals) != n:
        raise ConfigError(f"--{what} needs {n} comma-separated values, got {len(vals)}")
    return vals


def _lattice(text: str | None, n: int):
    if text is None:
        return None
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != n:
        raise ConfigError(f"--lattice needs {n} rows separated by ';'")
    return [_vector(r, n, "lattice") for r in rows]


def _random_thetas(n: int, count: int, seed: int, radius: float = 1.0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.normal(size=n)
        out.append(v / np.linalg.norm(v) * radius * rng.uniform() ** (1 / n))
    return out


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


# ---------------------------------------------------------------------------
# commands: each returns (payload, checks)
# ---------------------------------------------------------------------------

def cmd_describe(fam, args):
    poly = momentum_polytope(fam)
    return {"family": family_to_dict(fam), "m": fam.m, "n": fam.n, "injective": fam.injective,
            "polytope": poly.to_dict()}, []


def cmd_fisher(fam, args):
    theta_in = args.theta_v or [Fraction(0)] * fam.n
    theta = [float(v) for v in theta_in]
    h = fisher(fam, theta)
    h_def = fisher_def(fam, theta)
    diff = float(np.abs(h.entries - h_def.entries).max())
    tol = _tol(args, 1e-9)
    payload = {"theta": theta, "hessian_route": h.entries, "score_route": h_def.entries,
               "eta": mean_params(fam, theta)}
    if fam.exact:
        try:
            payload["exact"] = fisher(fam, theta_in, exact=True).entries
        except ValueError:
            pass  # some weight exp(C_i + <theta, F_i>) is irrational
    return payload, [CheckReport("fisher two routes", diff <= tol, diff, tol)]


def cmd_christoffel(fam, args):
    theta = [float(v) for v in (args.theta_v or [0] * fam.n)]
    G = christoffel_alpha(fam, theta, args.alpha)
    return {"theta": theta, "alpha": args.alpha, "lowered": G.entries}, []


def cmd_legendre(fam, args):
    if args.eta_v is None:
        raise ConfigError("legendre needs --eta")
    dp = legendre_dual_point(fam, args.eta_v, tol=_tol(args, 1e-10))
    return {"eta": dp.eta, "theta": dp.theta, "phi": dp.phi, "k": dp.k,
            "iterations": dp.iterations, "residual": dp.residual}, []


def cmd_kahler(fam, args):
    grid = theta_grid(fam.n, args.grid)
    rep = check_kahler(fam, grid, tol=_tol(args, 1e-6))
    theta = [float(v) for v in (args.theta_v or [0] * fam.n)]
    data = kahler_at(fam, theta, np.full(fam.n, 0.5))
    return {"theta": theta, "g": data.g, "omega": data.omega, "J": data.J}, [rep]


def cmd_weyl(fam, args):
    report = enumerate_weyl(fam)
    return report.to_dict(), [check_group_table(report)]


def cmd_polytope(fam, args):
    poly = momentum_polytope(fam)
    rng = np.random.default_rng(args.seed)
    syms = affine_symmetries(poly)
    metric = metric_symmetries(fam, 7, _tol(args, 1e-7), rng, poly)
    return {"polytope": poly.to_dict(), "affine_group": symmetry_group_dict(syms),
            "metric_group": symmetry_group_dict(metric)}, []


def cmd_cross_validate(fam, args):
    try:
        rep = cross_validate(fam, tol=_tol(args, 1e-7), seed=args.seed)
    except Mismatch as exc:
        rep = exc.report
    return {}, [rep]


def cmd_torus(fam, args):
    report = enumerate_weyl(fam)
    basis = args.lattice_v
    try:
        rep = verify_normalizer_model(report, basis, trials=args.trials, seed=args.seed)
    except NonIntegral as exc:
        rep = CheckReport("normalizer model", False, 1.0, 0.0,
                          {"error": str(exc), "offending": exc.offending})
    return {"weyl_order": report.order}, [rep]


def cmd_verify(fam, args):
    checks = []
    n = fam.n
    thetas = _random_thetas(n, 5, args.seed)
    tol = _tol(args, 1e-9)

    worst = max(float(np.abs(fisher(fam, t).entries - fisher_def(fam, t).entries).max())
                for t in thetas)
    checks.append(CheckReport("fisher two routes", worst <= tol, worst, tol))
    worst = max(abs(float(prob_vector(fam, t).sum()) - 1.0) for t in thetas)
    checks.append(CheckReport("normalisation", worst <= 1e-12, worst, 1e-12))

    grid = theta_grid(n, args.grid)
    worst = max(float(np.abs(christoffel_alpha(fam, t, 1).entries).max()) for t in grid)
    checks.append(CheckReport("exponential flatness", worst <= 1e-10, worst, 1e-10))
    checks.append(check_duality_identity(fam, grid))
    rt_tol = _tol(args, 1e-8)
    errs = [legendre_roundtrip(fam, t) for t in thetas]
    worst = max(e for e, _ in errs)
    iters = max(dp.iterations for _, dp in errs)
    checks.append(CheckReport("legendre roundtrip", worst <= rt_tol and iters <= 30, worst, rt_tol,
                              {"max_iterations": iters}))
    checks.append(check_kahler(fam, grid))

    report = enumerate_weyl(fam)
    checks.append(check_group_table(report))
    checks.append(check_probability_action(fam, report, thetas, tol=_tol(args, 1e-10)))
    checks.append(check_isometry(fam, report, thetas, tol=_tol(args, 1e-8)))
    if fam.injective:
        try:
            checks.append(cross_validate(fam, report, seed=args.seed))
        except Mismatch as exc:
            checks.append(exc.report)
    try:
        checks.append(verify_normalizer_model(report, args.lattice_v, trials=args.trials,
                                              seed=args.seed))
    except NonIntegral as exc:
        checks.append(CheckReport("normalizer model", False, 1.0, 0.0,
                                  {"error": str(exc), "offending": exc.offending}))
    return {"weyl_order": report.order}, checks


HANDLERS = {
    "describe": cmd_describe, "fisher": cmd_fisher, "christoffel": cmd_christoffel,
    "legendre": cmd_legendre, "kahler": cmd_kahler, "weyl": cmd_weyl, "polytope": cmd_polytope,
    "cross-validate": cmd_cross_validate, "torus": cmd_torus, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricweyl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"toricweyl {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--family", required=True, help='builtin "categorical:3", "binomial:4" or a JSON file')
    p.add_argument("--backend", choices=("rational", "float"))
    p.add_argument("--theta", help="comma-separated natural parameters")
    p.add_argument("--eta", help="comma-separated expectation parameters")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=3, help="points per axis of the theta grid")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--lattice", help="lattice basis rows, e.g. '1,0;0,1'")
    p.add_argument("--json", action="store_true")
    return p


def _config_echo(args) -> dict:
    keys = ("command", "family", "backend", "theta", "eta", "alpha", "grid", "tol", "seed",
            "trials", "lattice")
    return {k: getattr(args, k) for k in keys}


def _emit_text(payload, checks, out):
    for c in checks:
        print(c.line(), file=out)
    for key in sorted(payload):
        value = jsonable(payload[key])
        text = json.dumps(value, sort_keys=True)
        if len(text) > 200:
            text = text[:197] + "..."
        print(f"{key}: {text}", file=out)


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.grid < 1 or args.trials < 1:
        print("error: --grid and --trials must be positive", file=sys.stderr)
        return 2
    try:
        fam = load_family(args.family, args.backend)
        args.theta_v = _vector(args.theta, fam.n, "theta")
        args.eta_v = _vector(args.eta, fam.n, "eta")
        args.lattice_v = _lattice(args.lattice, fam.n)
        payload, checks = HANDLERS[args.command](fam, args)
    except (ConfigError, FamilyParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoConvergence as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ToricWeylError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    passed = all(c.passed for c in checks)
    if args.json:
        doc = {
            "tool": {"name": "toricweyl", "version": __version__},
            "config": _config_echo(args),
            "result": jsonable(payload),
            "checks": [c.to_dict() for c in checks],
            "passed": passed,
        }
        print(json.dumps(doc, sort_keys=True, indent=2), file=out)
    else:
        _emit_text(payload, checks, out)
    return 0 if passed else 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
