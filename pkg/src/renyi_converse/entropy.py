"""Renyi entropies, relative entropies and coherent information.

All logarithms are base 2.  The order parameter lives in [0, 2] plus the
infinity point; the alpha = 1 values are computed by a dedicated von Neumann
branch, never by a numerical limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qstate
from .errors import AlphaOutOfRange, DimensionMismatch
from .qstate import BipartiteSplit, DensityMatrix, partial_trace, matrix_power, zero_cutoff

LOG2 = math.log(2.0)

INF = math.inf


@dataclass(frozen=True)
class RenyiOrder:
    """Validated order parameter with its regime flag."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if a != INF and not (0.0 <= a <= 2.0):
            raise AlphaOutOfRange(f"alpha = {a} outside [0, 2] and not infinity")
        object.__setattr__(self, "alpha", a)

    @property
    def regime(self) -> str:
        a = self.alpha
        if a == INF:
            return "infinity"
        if a < 1.0:
            return "below_one"
        if a == 1.0:
            return "exactly_one"
        return "above_one"

    def beta(self) -> float:
        """Conjugate order alpha/(2 alpha - 1), defined for alpha in [0.5, 1);
        infinite at alpha = 0.5."""
        a = self.alpha
        if not 0.5 <= a < 1.0:
            raise AlphaOutOfRange(f"beta() needs alpha in [0.5, 1); got {a}")
        if a == 0.5:
            return INF
        return a / (2.0 * a - 1.0)


def _order(alpha) -> float:
    if isinstance(alpha, RenyiOrder):
        return alpha.alpha
    return RenyiOrder(float(alpha)).alpha


def spectrum_renyi_entropy(probs, alpha) -> float:
    """Renyi entropy of a classical spectrum, any order >= 0 or infinity;
    numerically stable for large orders (the sum is factored around the
    largest probability)."""
    a = float(alpha) if not isinstance(alpha, RenyiOrder) else alpha.alpha
    if a != INF and a < 0.0:
        raise AlphaOutOfRange(f"entropy order must be >= 0; got {a}")
    p = np.asarray(probs, dtype=float)
    p = p[p > 0.0]
    if a == 1.0:
        return float(-np.sum(p * np.log2(p)))
    pmax = float(np.max(p))
    if a == INF:
        return -math.log2(pmax)
    if a == 0.0:
        return math.log2(len(p))
    logsum = math.log2(math.fsum((p / pmax) ** a)) + a * math.log2(pmax)
    return logsum / (1.0 - a)


def renyi_entropy(rho: DensityMatrix, alpha) -> float:
    """S_alpha(rho) = log Tr rho^alpha / (1 - alpha) for any order >= 0,
    with limit branches at 1 and infinity."""
    evals = rho.eigenvalues()
    cut = zero_cutoff(evals, rho.total_dim)
    return spectrum_renyi_entropy(evals[evals > cut], alpha)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return renyi_entropy(rho, 1.0)


def _support_weights(rho: DensityMatrix, sigma: DensityMatrix):
    """Eigendata and the cross overlap matrix |<u_i|v_j>|^2."""
    r_evals, r_evecs = np.linalg.eigh(rho.matrix)
    s_evals, s_evecs = np.linalg.eigh(sigma.matrix)
    overlap = np.abs(r_evecs.conj().T @ s_evecs) ** 2
    return r_evals, s_evals, overlap


def quasi_relative(rho: DensityMatrix, sigma: DensityMatrix, alpha) -> float:
    """sign(alpha - 1) Tr rho^alpha sigma^(1-alpha) with generalized powers
    restricted to supports.  Returns +-inf conventions via renyi_relative;
    here the trace functional itself (finite real, or +inf when alpha > 1 and
    supp(rho) leaks outside supp(sigma))."""
    a = _order(alpha)
    if a == 1.0:
        raise AlphaOutOfRange("quasi relative entropy is defined for alpha != 1")
    q = _q_trace(rho, sigma, a)
    if q == INF:
        return INF
    return math.copysign(1.0, a - 1.0) * q


def _q_trace(rho: DensityMatrix, sigma: DensityMatrix, a: float) -> float:
    """Tr rho^alpha sigma^(1-alpha) on supports; +inf on support violation
    for alpha > 1."""
    if rho.total_dim != sigma.total_dim:
        raise DimensionMismatch(f"{rho.total_dim} vs {sigma.total_dim}")
    d = rho.total_dim
    r_evals, s_evals, overlap = _support_weights(rho, sigma)
    r_cut = zero_cutoff(r_evals, d)
    s_cut = zero_cutoff(s_evals, d)
    r_supp = r_evals > r_cut
    s_supp = s_evals > s_cut
    if a > 1.0:
        # weight of rho outside supp(sigma)
        leak = float(r_evals[r_supp] @ overlap[np.ix_(r_supp, ~s_supp)].sum(axis=1))
        if leak > 1e-10:
            return INF
    ra = np.where(r_supp, np.where(r_supp, r_evals, 1.0) ** a, 0.0)
    sb = np.where(s_supp, np.where(s_supp, s_evals, 1.0) ** (1.0 - a), 0.0)
    return float(ra @ overlap @ sb)


def renyi_relative(rho: DensityMatrix, sigma: DensityMatrix, alpha) -> float:
    """Petz Renyi relative entropy S_alpha(rho||sigma) in bits; +inf on
    support violation (alpha >= 1) or disjoint supports (alpha < 1)."""
    a = _order(alpha)
    if a == 1.0:
        return relative_entropy(rho, sigma)
    q = _q_trace(rho, sigma, a)
    if q == INF:
        return INF
    if q <= 0.0:
        return INF if a < 1.0 else -INF
    return math.log2(q) / (a - 1.0)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho||sigma) = Tr rho (log rho - log sigma), +inf on support violation."""
    if rho.total_dim != sigma.total_dim:
        raise DimensionMismatch(f"{rho.total_dim} vs {sigma.total_dim}")
    d = rho.total_dim
    r_evals, s_evals, overlap = _support_weights(rho, sigma)
    r_supp = r_evals > zero_cutoff(r_evals, d)
    s_supp = s_evals > zero_cutoff(s_evals, d)
    leak = float(r_evals[r_supp] @ overlap[np.ix_(r_supp, ~s_supp)].sum(axis=1))
    if leak > 1e-10:
        return INF
    term_r = float(np.sum(r_evals[r_supp] * np.log2(r_evals[r_supp])))
    w = r_evals[r_supp] @ overlap[np.ix_(r_supp, s_supp)]
    term_s = float(w @ np.log2(s_evals[s_supp]))
    return term_r - term_s


def conditional_entropy(rho: DensityMatrix, bsplit: BipartiteSplit) -> float:
    """S(A|B) = S(AB) - S(B) for the split (A = left, B = right)."""
    s_ab = von_neumann_entropy(rho)
    s_b = von_neumann_entropy(partial_trace(rho, bsplit.right))
    return s_ab - s_b


def mutual_information(rho: DensityMatrix, bsplit: BipartiteSplit) -> float:
    """I(A:B) = S(A) + S(B) - S(AB)."""
    s_a = von_neumann_entropy(partial_trace(rho, bsplit.left))
    s_b = von_neumann_entropy(partial_trace(rho, bsplit.right))
    return s_a + s_b - von_neumann_entropy(rho)


def _reduced_power(rho: DensityMatrix, bsplit: BipartiteSplit, a: float) -> np.ndarray:
    """Tr_B (rho^alpha) as a plain PSD matrix on the left factor."""
    powered = matrix_power(rho.matrix, a)
    return partial_trace(DensityMatrix(rho.dims, powered), bsplit.left).matrix


def coherent_information_renyi(rho: DensityMatrix, bsplit: BipartiteSplit, alpha) -> float:
    """I_alpha(A>B) = (alpha/(alpha-1)) log Tr [Tr_B rho^alpha]^(1/alpha);
    the alpha -> 1 limit branch returns -S(A|B)."""
    a = _order(alpha)
    if a == 1.0:
        # limit of the closed form below: S(A) - S(AB) for A = bsplit.left
        return -conditional_entropy(rho, BipartiteSplit(bsplit.right, bsplit.left))
    if a == 0.0:
        raise AlphaOutOfRange("coherent information needs alpha in (0, 2] \\ {1}")
    reduced = _reduced_power(rho, bsplit, a)
    val = float(np.real(np.trace(matrix_power(reduced, 1.0 / a))))
    return (a / (a - 1.0)) * math.log2(val)


def sibson_minimizer(rho: DensityMatrix, bsplit: BipartiteSplit, alpha):
    """Closed-form minimizer of S_alpha(rho^{AB} || sigma^A x 1^B) over
    sigma^A: sigma* = [Tr_B rho^alpha]^(1/alpha) / norm, with the minimum
    value equal to I_alpha(A>B)."""
    a = _order(alpha)
    if a in (0.0, 1.0):
        raise AlphaOutOfRange("sibson minimizer needs alpha in (0, 2] \\ {1}")
    reduced = _reduced_power(rho, bsplit, a)
    tilted = matrix_power(reduced, 1.0 / a)
    norm = float(np.real(np.trace(tilted)))
    sigma_star = qstate.validate(tilted / norm, rho.dims.subset(bsplit.left))
    min_value = (a / (a - 1.0)) * math.log2(norm)
    return sigma_star, min_value
