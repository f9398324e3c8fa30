"""Command-line front end.

Subcommands: entropy, rree, converse, simulate, confront, check.
Exit codes: 0 success, 1 usage error, 2 inequality-check or bound failure,
3 numerical-validation failure (input state fails Hermiticity/PSD/trace).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import converse, entanglement, entropy, propcheck, protocols, qstate
from .errors import BoundViolation, RenyiConverseError, ValidationError

_PRESET_HELP = (
    "bell | phi(K) | ghz(N) | werner(P) | schmidt(p1,...,pk).  "
    "werner(p) = p*singlet + (1-p)*I/4; ghz(N) is split as the first qubit "
    "(A) versus the remaining N-1 qubits (B)."
)


class UsageError(RenyiConverseError):
    pass


# ---------------------------------------------------------------- state input

def _preset_state(spec: str):
    m = re.fullmatch(r"([a-z_]+)(?:\(([^)]*)\))?", spec.strip())
    if not m:
        raise UsageError(f"malformed preset {spec!r}")
    name, args = m.group(1), (m.group(2) or "")
    if name == "bell":
        return qstate.maximally_entangled(2)
    if name == "phi":
        k = int(args)
        if k < 2:
            raise UsageError("phi(K) needs K >= 2")
        return qstate.maximally_entangled(k)
    if name == "ghz":
        n = int(args)
        if n < 2:
            raise UsageError("ghz(N) needs N >= 2")
        d = qstate.dims(("A", 2), ("B", 2 ** (n - 1)))
        vec = np.zeros(2 ** n)
        vec[0] = vec[-1] = 1.0 / math.sqrt(2.0)
        return qstate.pure(vec, d)
    if name == "werner":
        p = float(args)
        if not 0.0 <= p <= 1.0:
            raise UsageError("werner(p) needs p in [0, 1]")
        d = qstate.dims(("A", 2), ("B", 2))
        singlet = np.zeros(4)
        singlet[1], singlet[2] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
        mat = p * np.outer(singlet, singlet) + (1.0 - p) * np.eye(4) / 4.0
        return qstate.validate(mat, d)
    if name == "schmidt":
        probs = [float(x) for x in args.split(",") if x.strip()]
        if len(probs) < 2 or any(x < 0 for x in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise UsageError("schmidt(p1,...,pk) needs k >= 2 probabilities summing to 1")
        k = len(probs)
        d = qstate.dims(("A", k), ("B", k))
        vec = np.zeros(k * k)
        for i, pi in enumerate(probs):
            vec[i * k + i] = math.sqrt(pi)
        return qstate.pure(vec, d)
    raise UsageError(f"unknown preset {name!r}; available: {_PRESET_HELP}")


def _entry(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _load_state_file(path: str):
    with open(path) as fh:
        doc = json.load(fh)
    try:
        factors = [(f["label"], int(f["dim"])) for f in doc["dims"]]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"state file {path}: bad 'dims' entry ({exc})")
    d = qstate.dims(*factors)
    if "vector" in doc:
        vec = np.array([_entry(x) for x in doc["vector"]])
        return qstate.pure(vec, d)
    if "matrix" in doc:
        mat = np.array([[_entry(x) for x in row] for row in doc["matrix"]])
        return qstate.validate(mat, d)
    raise UsageError(f"state file {path}: needs a 'vector' or 'matrix' field")


def _get_state(args):
    given = [x for x in (args.state, args.preset) if x]
    if len(given) != 1:
        raise UsageError("provide exactly one of --state/--preset")
    return _load_state_file(args.state) if args.state else _preset_state(args.preset)


def _as_density(state) -> qstate.DensityMatrix:
    return state.to_density() if isinstance(state, qstate.PureState) else state


def _as_pure(state) -> qstate.PureState:
    if not isinstance(state, qstate.PureState):
        raise UsageError("this command needs a pure state (vector input or pure preset)")
    return state


# ------------------------------------------------------------------- parsing

def _parse_range(text: str, cast):
    """'lo:hi:step' (inclusive of hi up to rounding) or a single value."""
    if ":" in text:
        lo, hi, step = (float(p) for p in text.split(":"))
        if step <= 0 or hi < lo:
            raise UsageError(f"bad range {text!r}")
        count = int(round((hi - lo) / step)) + 1
        return [cast(lo + i * step) for i in range(count) if lo + i * step <= hi + 1e-12]
    return [cast(float(text))]


def _default_seed() -> int:
    return int(os.environ.get("RENYI_CONVERSE_SEED", "0"))


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pmap(fn, items, jobs: int):
    """Order-preserving map; identical output for every --jobs value."""
    if jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------- subcommands

def _cmd_entropy(args) -> int:
    state = _as_density(_get_state(args))
    alphas = _parse_range(args.alpha, float)
    if args.sigma:
        sigma = _as_density(_load_state_file(args.sigma))
        rows = [{"alpha": a, "divergence": entropy.renyi_relative(state, sigma, a)}
                for a in alphas]
    else:
        rows = [{"alpha": a, "entropy": entropy.renyi_entropy(state, a)} for a in alphas]
    _emit(args, json.dumps(rows, indent=2) + "\n")
    return 0


def _cmd_rree(args) -> int:
    state = _get_state(args)
    rho = _as_density(state)
    labels = rho.dims.labels
    if args.split:
        left, right = (tuple(side.split(",")) for side in args.split.split(":"))
    else:
        left, right = (labels[0],), labels[1:]
    sp = qstate.split(left, right)
    cfg = entanglement.RreeConfig(terms_count=args.terms, restarts=args.restarts,
                                  max_iters=args.max_iters, seed=args.seed)
    est = entanglement.rree_estimate(rho, sp, args.alpha, cfg)
    doc = {
        "alpha": est.alpha,
        "upper_estimate": est.upper_estimate,
        "analytic_lower": est.analytic_lower,
        "analytic_upper": est.analytic_upper,
        "weak_regime": est.weak_regime,
        "iterations": len(est.optimizer_trace),
    }
    if args.witness_out:
        with open(args.witness_out, "w") as fh:
            json.dump(est.witness.to_json(), fh, indent=2)
        doc["witness_file"] = args.witness_out
    _emit(args, json.dumps(doc, indent=2) + "\n")
    return 0


_RATE_KEYS = {"merge_ent": ("log_K", "log_L"), "merge_cc": ("log_X",),
              "concentrate": ("log_L",), "schumacher": ("log_B",)}


def _rate_params(args, theorem: str, n: int) -> dict:
    flags = {"log_K": args.logK, "log_L": args.logL,
             "log_X": args.logX, "log_B": args.logB}
    params = {}
    for key in _RATE_KEYS[theorem]:
        if flags[key] is not None:
            params[key] = flags[key]
        elif args.rate is not None and key != "log_K":
            params[key] = args.rate * n
        else:
            raise UsageError(f"{theorem} needs --{key.replace('_', '')} or --rate")
    if theorem == "merge_ent" and "log_K" not in params:
        raise UsageError("merge_ent needs --logK")
    return params


def _converse_state(args, theorem):
    state = _get_state(args)
    return _as_density(state) if theorem == "schumacher" else _as_pure(state)


def _cmd_converse(args) -> int:
    theorem = args.theorem
    state = _converse_state(args, theorem)
    ns = _parse_range(args.n, int)

    def one(n: int):
        params = _rate_params(args, theorem, n)
        if args.optimize_alpha:
            return [converse.optimize_alpha(theorem, state, n, params)]
        return [converse.evaluate_bound(theorem, state, a, n, params)
                for a in _parse_range(args.alpha, float)]

    results = [r for chunk in _pmap(one, ns, args.jobs) for r in chunk]
    text = (converse.sweep_to_csv(results) if args.format == "csv"
            else converse.sweep_to_json(results))
    _emit(args, text)
    return 0


def _spectrum(args) -> list[float]:
    if args.probs:
        return [float(x) for x in args.probs.split(",")]
    state = _as_density(_get_state(args))
    if len(state.dims.labels) > 1:
        state = qstate.partial_trace(state, state.dims.labels[0])
    lam = np.clip(state.eigenvalues(), 0.0, None)
    return [float(x) for x in lam[lam > 1e-12]]


def _sim_rows(args) -> list[protocols.ProtocolRunResult]:
    probs = _spectrum(args)
    if args.rate is None:
        raise UsageError("simulate needs --rate")
    out = []
    for n in _parse_range(args.n, int):
        if args.protocol == "schumacher":
            if args.exact:
                state = _as_density(_get_state(args))
                out.append(protocols.schumacher_exact_small(state, n, args.rate))
            else:
                out.append(protocols.schumacher_mass(probs, n, args.rate))
        else:
            out.append(protocols.concentrate_simulate(probs, n, args.rate * n))
    return out


def _sim_dicts(rows) -> list[dict]:
    keep = ("n", "rate", "eta", "fidelity_lower", "fidelity_ceiling",
            "fidelity_exact", "success_prob")
    return [{k: getattr(r, k) for k in keep} for r in rows]


def _cmd_simulate(args) -> int:
    rows = _sim_dicts(_sim_rows(args))
    if args.format == "csv":
        import csv as _csv
        import io as _io
        buf = _io.StringIO()
        w = _csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _emit(args, buf.getvalue())
    else:
        _emit(args, json.dumps(rows, indent=2) + "\n")
    return 0


def _cmd_confront(args) -> int:
    theorem = args.theorem
    if theorem in ("merge_ent", "merge_cc"):
        state = _as_pure(_get_state(args))
        sims = []
    else:
        args.protocol = "schumacher" if theorem == "schumacher" else "concentrate"
        sims = _sim_rows(args)
        state = (_as_density(_get_state(args)) if theorem == "schumacher"
                 else _as_pure(_get_state(args)))

    def one(n: int):
        params = _rate_params(args, theorem, n)
        if args.optimize_alpha or args.alpha is None:
            return converse.optimize_alpha(theorem, state, n, params)
        return converse.evaluate_bound(theorem, state, float(args.alpha), n, params)

    bounds = _pmap(one, _parse_range(args.n, int), args.jobs)
    report = protocols.confront_bounds(theorem, sims, bounds)
    _emit(args, json.dumps({"theorem": report.theorem_id,
                            "bound_only": report.bound_only,
                            "rows": list(report.rows)}, indent=2) + "\n")
    return 0


def _cmd_check(args) -> int:
    ids = args.checks or None
    if ids:
        unknown = [i for i in ids
                   if i not in propcheck.CHECKS and i != "selftest_inverted"]
        if unknown:
            raise UsageError(f"unknown check ids {unknown}")

    def one(cid):
        return propcheck.run_checks([cid], trials=args.trials, seed=args.seed)[0]

    reports = _pmap(one, ids or list(propcheck.CHECKS), args.jobs)
    failed = False
    lines = []
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        failed = failed or not r.passed
        worst = "inf" if r.worst_margin == math.inf else f"{r.worst_margin:.3e}"
        lines.append(f"{r.check_id}: {status}  trials={r.trials}  worst_margin={worst}"
                     + (f"  failures={len(r.failures)}" if r.failures else ""))
    _emit(args, "\n".join(lines) + "\n")
    return 2 if failed else 0


# ------------------------------------------------------------------- parser

def _add_state_opts(p):
    p.add_argument("--state", help="JSON state file (dims + vector or matrix)")
    p.add_argument("--preset", help=_PRESET_HELP)


def _add_io_opts(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="renyi-converse")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="Renyi entropy or relative entropy")
    _add_state_opts(p)
    p.add_argument("--alpha", required=True, help="order, or lo:hi:step sweep")
    p.add_argument("--sigma", help="second state file: compute the divergence")
    _add_io_opts(p)
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("rree", help="relative entropy of entanglement estimate")
    _add_state_opts(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--split", help="LEFT:RIGHT labels, comma-separated sides")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--witness-out", help="dump the separable witness as JSON")
    _add_io_opts(p)
    p.set_defaults(fn=_cmd_rree)

    p = sub.add_parser("converse", help="strong-converse fidelity bounds")
    p.add_argument("theorem", choices=converse.THEOREM_IDS)
    _add_state_opts(p)
    p.add_argument("--alpha", help="order, or lo:hi:step sweep")
    p.add_argument("--optimize-alpha", action="store_true")
    p.add_argument("--n", required=True, help="copies, or lo:hi:step sweep")
    p.add_argument("--rate", type=float, help="per-copy rate (sets the log size)")
    p.add_argument("--logK", type=float)
    p.add_argument("--logL", type=float)
    p.add_argument("--logX", type=float)
    p.add_argument("--logB", type=float)
    p.add_argument("--jobs", type=int, default=1)
    _add_io_opts(p)
    p.set_defaults(fn=_cmd_converse)

    p = sub.add_parser("simulate", help="protocol simulators")
    p.add_argument("protocol", choices=("schumacher", "concentrate"))
    _add_state_opts(p)
    p.add_argument("--probs", help="comma-separated spectrum, bypasses --state")
    p.add_argument("--n", required=True, help="copies, or lo:hi:step sweep")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--exact", action="store_true",
                   help="schumacher only: exact small-n channel fidelity")
    _add_io_opts(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("confront", help="simulate and test against the bound")
    p.add_argument("theorem", choices=converse.THEOREM_IDS)
    _add_state_opts(p)
    p.add_argument("--probs", help="comma-separated spectrum for the simulator")
    p.add_argument("--alpha", type=float)
    p.add_argument("--optimize-alpha", action="store_true")
    p.add_argument("--n", required=True)
    p.add_argument("--rate", type=float)
    p.add_argument("--logK", type=float)
    p.add_argument("--logL", type=float)
    p.add_argument("--logX", type=float)
    p.add_argument("--logB", type=float)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    _add_io_opts(p)
    p.set_defaults(fn=_cmd_confront)

    p = sub.add_parser("check", help="randomized inequality audits")
    p.add_argument("checks", nargs="*",
                   help="check ids (default: all standard checks)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--jobs", type=int, default=1)
    _add_io_opts(p)
    p.set_defaults(fn=_cmd_check)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BoundViolation as exc:
        print(f"bound violated: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return 3
    except RenyiConverseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
