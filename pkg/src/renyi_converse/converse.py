"""Strong-converse log-fidelity bounds for state merging (entanglement rate
and classical communication), entanglement concentration and Schumacher
compression, plus a deterministic order-parameter optimizer.

Every bound is affine in the copy count n: it is evaluated from single-copy
marginals (Renyi additivity) and scaled, so log_fidelity_bound is exactly
n * exponent_per_copy.  Bounds with nonnegative exponent are returned with
the vacuous flag instead of being clamped.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .entropy import INF, renyi_entropy, von_neumann_entropy
from .errors import AlphaOutOfRange, MissingRegister, RenyiConverseError
from .qstate import BipartiteSplit, DensityMatrix, PureState, partial_trace

THEOREM_IDS = ("merge_ent", "merge_cc", "concentrate", "schumacher")

# open alpha intervals per theorem, inset to dodge the removable singularity
# at alpha = 1 and the conjugate-order blow-up at alpha = 0.5
ALPHA_EPS = 1e-6
ALPHA_INTERVALS = {
    "merge_ent": (1.0 + ALPHA_EPS, 2.0),
    "merge_cc": (0.5 + ALPHA_EPS, 1.0 - ALPHA_EPS),
    "concentrate": (1.0 + ALPHA_EPS, 2.0),
    "schumacher": (0.5 + ALPHA_EPS, 1.0 - ALPHA_EPS),
}


@dataclass(frozen=True)
class ConverseBoundResult:
    theorem_id: str
    alpha: float
    n: int
    rate_params: dict
    log_fidelity_bound: float
    exponent_per_copy: float
    term_breakdown: dict
    vacuous: bool


def _require_registers(psi: PureState, labels) -> None:
    missing = [l for l in labels if l not in psi.dims.labels]
    if missing:
        raise MissingRegister(f"state lacks registers {missing}; has {psi.dims.labels}")


def _result(theorem_id, alpha, n, rate_params, prefactor, bracket, terms) -> ConverseBoundResult:
    exponent = prefactor * bracket
    terms = dict(terms)
    terms["bracket"] = bracket
    terms["prefactor"] = prefactor
    return ConverseBoundResult(
        theorem_id=theorem_id,
        alpha=float(alpha),
        n=int(n),
        rate_params=dict(rate_params),
        log_fidelity_bound=n * exponent,
        exponent_per_copy=exponent,
        term_breakdown=terms,
        vacuous=exponent >= 0.0,
    )


def merge_ent_bound(psi: PureState, alpha, n: int, log_k: float, log_l: float) -> ConverseBoundResult:
    """Entanglement-rate converse for state merging of a tripartite pure
    state on registers A, B, R:

        log F <= n ((alpha-1)/(2 alpha)) [ (log K - log L)/n
                                           + S_{2-alpha}(B) - S_{1/(2-alpha)}(AB) ]
    """
    a = float(alpha)
    if not 1.0 < a <= 2.0:
        raise AlphaOutOfRange(f"alpha = {a} outside (1, 2]")
    _require_registers(psi, ("A", "B", "R"))
    if log_k < 0 or log_l < 0:
        raise RenyiConverseError("log K and log L must be nonnegative")
    order_high = INF if a == 2.0 else 1.0 / (2.0 - a)
    s_b = renyi_entropy(partial_trace(psi, "B"), 2.0 - a)
    s_ab = renyi_entropy(partial_trace(psi, ("A", "B")), order_high)
    rate = (log_k - log_l) / n
    bracket = rate + s_b - s_ab
    return _result("merge_ent", a, n, {"log_K": log_k, "log_L": log_l, "rate": rate},
                   (a - 1.0) / (2.0 * a), bracket,
                   {"S_{2-a}(B)": s_b, "S_{1/(2-a)}(AB)": s_ab})


def merge_ent_limit_bracket(psi: PureState, rate: float) -> float:
    """alpha -> 1 limit of the merge_ent bracket: rate - S(A|B)."""
    s_ab = von_neumann_entropy(partial_trace(psi, ("A", "B")))
    s_b = von_neumann_entropy(partial_trace(psi, "B"))
    return rate + s_b - s_ab


def merge_cc_bound(psi: PureState, alpha, n: int, log_x: float) -> ConverseBoundResult:
    """Classical-communication converse for one-way state merging:

        log F <= n ((1-alpha)/(4 alpha)) [ log|X|/n - S_beta(A) - S_beta(R)
                                           + S_alpha(AR) ],  beta = alpha/(2 alpha - 1)
    """
    a = float(alpha)
    if not 0.5 < a < 1.0:
        raise AlphaOutOfRange(f"alpha = {a} outside (0.5, 1)")
    _require_registers(psi, ("A", "B", "R"))
    if log_x < 0:
        raise RenyiConverseError("log|X| must be nonnegative")
    beta = a / (2.0 * a - 1.0)
    s_a = renyi_entropy(partial_trace(psi, "A"), beta)
    s_r = renyi_entropy(partial_trace(psi, "R"), beta)
    s_ar = renyi_entropy(partial_trace(psi, ("A", "R")), a)
    rate = log_x / n
    bracket = rate - s_a - s_r + s_ar
    return _result("merge_cc", a, n, {"log_X": log_x, "rate": rate},
                   (1.0 - a) / (4.0 * a), bracket,
                   {"S_b(A)": s_a, "S_b(R)": s_r, "S_a(AR)": s_ar})


def merge_cc_limit_bracket(psi: PureState, rate: float) -> float:
    """alpha -> 1 limit of the merge_cc bracket: rate - I(A:R)."""
    s_a = von_neumann_entropy(partial_trace(psi, "A"))
    s_r = von_neumann_entropy(partial_trace(psi, "R"))
    s_ar = von_neumann_entropy(partial_trace(psi, ("A", "R")))
    return rate - (s_a + s_r - s_ar)


def concentrate_bound(psi: PureState, alpha, n: int, log_l: float) -> ConverseBoundResult:
    """Entanglement-concentration converse for a bipartite pure state A, B:

        log F <= n ((alpha-1)/(2 alpha)) [ S_{2-alpha}(A) - log L/n ]
    """
    a = float(alpha)
    if not 1.0 < a <= 2.0:
        raise AlphaOutOfRange(f"alpha = {a} outside (1, 2]")
    _require_registers(psi, ("A", "B"))
    if log_l < 0:
        raise RenyiConverseError("log L must be nonnegative")
    s_a = renyi_entropy(partial_trace(psi, "A"), 2.0 - a)
    rate = log_l / n
    bracket = s_a - rate
    return _result("concentrate", a, n, {"log_L": log_l, "rate": rate},
                   (a - 1.0) / (2.0 * a), bracket, {"S_{2-a}(A)": s_a})


def concentrate_limit_bracket(psi: PureState, rate: float) -> float:
    return von_neumann_entropy(partial_trace(psi, "A")) - rate


def schumacher_bound(rho: DensityMatrix, alpha, n: int, log_b: float) -> ConverseBoundResult:
    """Schumacher-compression converse for a source state rho:

        log F <= n ((1-alpha)/(2 alpha)) [ log|B|/n - S_beta(A) ],
        beta = alpha/(2 alpha - 1)
    """
    a = float(alpha)
    if not 0.5 < a < 1.0:
        raise AlphaOutOfRange(f"alpha = {a} outside (0.5, 1)")
    if log_b < 0:
        raise RenyiConverseError("log|B| must be nonnegative")
    beta = a / (2.0 * a - 1.0)
    s_a = renyi_entropy(rho, beta)
    rate = log_b / n
    bracket = rate - s_a
    return _result("schumacher", a, n, {"log_B": log_b, "rate": rate},
                   (1.0 - a) / (2.0 * a), bracket, {"S_b(A)": s_a})


def schumacher_limit_bracket(rho: DensityMatrix, rate: float) -> float:
    return rate - von_neumann_entropy(rho)


def evaluate_bound(theorem_id: str, state, alpha, n: int, rate_params: dict) -> ConverseBoundResult:
    """Dispatch a single bound evaluation by theorem id."""
    if theorem_id == "merge_ent":
        return merge_ent_bound(state, alpha, n, rate_params["log_K"], rate_params["log_L"])
    if theorem_id == "merge_cc":
        return merge_cc_bound(state, alpha, n, rate_params["log_X"])
    if theorem_id == "concentrate":
        return concentrate_bound(state, alpha, n, rate_params["log_L"])
    if theorem_id == "schumacher":
        return schumacher_bound(state, alpha, n, rate_params["log_B"])
    raise RenyiConverseError(f"unknown theorem id {theorem_id!r}; use one of {THEOREM_IDS}")


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_alpha(theorem_id: str, state, n: int, rate_params: dict,
                   coarse_points: int = 33, tol: float = 1e-9) -> ConverseBoundResult:
    """Deterministic search for the order minimizing exponent_per_copy:
    a coarse grid to localize, then golden-section refinement.  Returns the
    (possibly vacuous) best bound."""
    lo, hi = ALPHA_INTERVALS[theorem_id]

    def exponent(a: float) -> float:
        return evaluate_bound(theorem_id, state, a, n, rate_params).exponent_per_copy

    grid = [lo + (hi - lo) * i / (coarse_points - 1) for i in range(coarse_points)]
    vals = [exponent(a) for a in grid]
    k = min(range(coarse_points), key=lambda i: vals[i])
    a_lo = grid[max(k - 1, 0)]
    a_hi = grid[min(k + 1, coarse_points - 1)]
    c = a_hi - _GOLDEN * (a_hi - a_lo)
    d = a_lo + _GOLDEN * (a_hi - a_lo)
    fc, fd = exponent(c), exponent(d)
    while a_hi - a_lo > tol:
        if fc <= fd:
            a_hi, d, fd = d, c, fc
            c = a_hi - _GOLDEN * (a_hi - a_lo)
            fc = exponent(c)
        else:
            a_lo, c, fc = c, d, fd
            d = a_lo + _GOLDEN * (a_hi - a_lo)
            fd = exponent(d)
    best_alpha = min((grid[k], c, d), key=exponent)
    return evaluate_bound(theorem_id, state, best_alpha, n, rate_params)


CSV_HEADER = ["theorem", "alpha", "n", "rate", "exponent_per_copy", "log_F_bound", "vacuous"]


def sweep_rows(results) -> list[dict]:
    rows = []
    for r in results:
        rows.append({
            "theorem": r.theorem_id,
            "alpha": r.alpha,
            "n": r.n,
            "rate": r.rate_params.get("rate"),
            "exponent_per_copy": r.exponent_per_copy,
            "log_F_bound": r.log_fidelity_bound,
            "vacuous": r.vacuous,
        })
    return rows


def sweep_to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in sweep_rows(results):
        writer.writerow(row)
    return buf.getvalue()


def sweep_to_json(results) -> str:
    return json.dumps(sweep_rows(results), indent=2) + "\n"
