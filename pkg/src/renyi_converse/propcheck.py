"""Randomized executable audits of the library's inequalities.

Each check draws a deterministic ensemble (per-trial seeds derived from the
master seed), evaluates the inequality margin in the direction that must be
nonnegative, and reports the worst margin.  Infinite margins on the correct
side count as passes and are excluded from the minimization.  Exact-formula
checks use tolerance 1e-9; estimator-mediated ones 1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import entanglement, entropy, qstate
from .entanglement import RreeConfig, pure_proximity_lower, rree_estimate, rree_lower, van_dam_hayden_gap
from .entropy import INF, renyi_relative, spectrum_renyi_entropy
from .errors import RenyiConverseError
from .qstate import dims, fidelity, partial_trace, random_channel, random_density, random_pure, split

EXACT_TOL = 1e-9
ESTIMATOR_TOL = 1e-6

ALPHA_GRID_FULL = (0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)
ALPHA_GRID_ABOVE = (1.25, 1.5, 2.0)
ALPHA_GRID_VDH = (0.5, 0.6, 0.75, 0.9)


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    trials: int
    worst_margin: float
    failures: tuple[tuple[int, float], ...]
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def _trial_rng_seed(seed: int, trial: int) -> list[int]:
    return [abs(int(seed)), trial, 0xC4EC]


def _finish(check_id, margins_by_trial, tolerance, config) -> CheckReport:
    worst = INF
    failures = []
    for trial, margin in margins_by_trial:
        if margin == INF:
            continue
        worst = min(worst, margin)
        if margin < -tolerance:
            failures.append((trial, margin))
    return CheckReport(check_id, len(margins_by_trial), worst, tuple(failures),
                       dict(config, tolerance=tolerance))


def _dpi_margin(seed, trial, invert=False) -> float:
    rng = np.random.default_rng(_trial_rng_seed(seed, trial))
    d_in = int(rng.integers(2, 5))
    d_out = int(rng.integers(2, 5))
    sys = dims(("A", d_in))
    rho = random_density(sys, seed=seed * 1_000_003 + 2 * trial)
    sigma = random_density(sys, seed=seed * 1_000_003 + 2 * trial + 1)
    k_min = -(-d_in // d_out)  # kraus_count * d_out must cover d_in
    chan = random_channel(sys, dims(("C", d_out)), kraus_count=int(rng.integers(k_min, k_min + 3)),
                          seed=seed * 999_983 + trial)
    out_r = qstate.apply_channel(chan, rho)
    out_s = qstate.apply_channel(chan, sigma)
    worst = INF
    for a in ALPHA_GRID_FULL:
        lhs = renyi_relative(rho, sigma, a)
        rhs = renyi_relative(out_r, out_s, a)
        if lhs == INF:
            continue
        margin = (rhs - lhs) if invert else (lhs - rhs)
        worst = min(worst, margin)
    return worst


def check_dpi(trials: int = 500, seed: int = 0) -> CheckReport:
    """Monotonicity of the Renyi relative entropy under CPTP maps on [0, 2]."""
    margins = [(t, _dpi_margin(seed, t)) for t in range(trials)]
    return _finish("dpi", margins, EXACT_TOL, {"seed": seed})


def check_selftest_inverted(trials: int = 50, seed: int = 0) -> CheckReport:
    """Harness sanity: the deliberately inverted inequality must fail."""
    margins = [(t, _dpi_margin(seed, t, invert=True)) for t in range(trials)]
    return _finish("selftest_inverted", margins, EXACT_TOL, {"seed": seed, "inverted": True})


def _random_cq(seed: int, trial: int):
    """Random cq state: spectra of the blocks plus the assembled matrix."""
    rng = np.random.default_rng(_trial_rng_seed(seed, trial))
    x_dim = int(rng.integers(2, 5))
    r_dim = int(rng.integers(2, 4))
    p = rng.dirichlet(np.ones(x_dim))
    blocks = [random_density(dims(("R", r_dim)), seed=seed * 7_001 + trial * 31 + x)
              for x in range(x_dim)]
    return p, blocks, r_dim, x_dim


def _cq_entropies(p, blocks, alpha):
    """(S_alpha(RX), S_alpha(R)) of sum_x p_x rho_x (x) |x><x|; the joint
    spectrum is the union of the scaled block spectra."""
    joint = np.concatenate([px * np.clip(b.eigenvalues(), 0.0, None) for px, b in zip(p, blocks)])
    joint = joint[joint > 1e-15]
    avg = sum(px * b.matrix for px, b in zip(p, blocks))
    avg_spec = np.clip(np.linalg.eigvalsh(avg), 0.0, None)
    return (spectrum_renyi_entropy(joint, alpha),
            spectrum_renyi_entropy(avg_spec[avg_spec > 1e-15], alpha))


def check_cq_register_bounds(trials: int = 500, seed: int = 0) -> CheckReport:
    """For a cq state on R (x) X:  log|X| >= S_a(RX) - S_a(R) >= 0."""
    margins = []
    for t in range(trials):
        p, blocks, _, x_dim = _random_cq(seed, t)
        worst = INF
        for a in ALPHA_GRID_FULL:
            if a == 1.0:
                continue
            s_rx, s_r = _cq_entropies(p, blocks, a)
            worst = min(worst, math.log2(x_dim) - (s_rx - s_r), s_rx - s_r)
        margins.append((t, worst))
    return _finish("cq_register_bounds", margins, EXACT_TOL, {"seed": seed})


def check_cq_conditional_bound(trials: int = 500, seed: int = 0) -> CheckReport:
    """For a cq state on R (x) X and alpha > 1:
    log|X| >= S_a(R) - S_a(R|X), with S_a(R|X) = -I_a(X>R)."""
    margins = []
    for t in range(trials):
        p, blocks, r_dim, x_dim = _random_cq(seed, t)
        worst = INF
        for a in ALPHA_GRID_ABOVE:
            _, s_r = _cq_entropies(p, blocks, a)
            # I_a(X>R) of the cq state closes to sum_x p_x (Tr rho_x^a)^(1/a)
            total = math.fsum(
                px * float(np.sum(np.clip(b.eigenvalues(), 0.0, None) ** a)) ** (1.0 / a)
                for px, b in zip(p, blocks))
            cond = -(a / (a - 1.0)) * math.log2(total)  # S_a(R|X)
            worst = min(worst, math.log2(x_dim) - (s_r - cond))
        margins.append((t, worst))
    return _finish("cq_conditional_bound", margins, EXACT_TOL, {"seed": seed})


def check_fidelity_product(trials: int = 1000, seed: int = 0) -> CheckReport:
    """F(rho^{AB}, tau^A (x) rho^B) >= F(rho^{AB}, tau^A (x) sigma^B)^2,
    audited both for a free tau^A and for tau^A = rho^A."""
    margins = []
    for t in range(trials):
        rng = np.random.default_rng(_trial_rng_seed(seed, t))
        db = int(rng.integers(2, 4))
        sys = dims(("A", 2), ("B", db))
        rho = random_density(sys, seed=seed * 11_003 + 3 * t)
        tau = random_density(dims(("A", 2)), seed=seed * 11_003 + 3 * t + 1)
        sig = random_density(dims(("B", db)), seed=seed * 11_003 + 3 * t + 2)
        rho_a = partial_trace(rho, "A")
        rho_b = partial_trace(rho, "B")
        worst = INF
        for left in (tau, rho_a):
            best = fidelity(rho, qstate.tensor(left, rho_b))
            probe = fidelity(rho, qstate.tensor(left, sig))
            worst = min(worst, best - probe * probe)
        margins.append((t, worst))
    return _finish("fidelity_product", margins, EXACT_TOL, {"seed": seed})


def check_vdh(trials: int = 1000, seed: int = 0) -> CheckReport:
    """van Dam-Hayden entropy/fidelity inequality on random pairs, dims <= 6."""
    margins = []
    for t in range(trials):
        rng = np.random.default_rng(_trial_rng_seed(seed, t))
        d = int(rng.integers(2, 7))
        sys = dims(("A", d))
        rho = random_density(sys, seed=seed * 13_007 + 2 * t)
        sigma = random_density(sys, seed=seed * 13_007 + 2 * t + 1)
        worst = min(van_dam_hayden_gap(rho, sigma, a) for a in ALPHA_GRID_VDH)
        margins.append((t, worst))
    return _finish("van_dam_hayden", margins, EXACT_TOL, {"seed": seed})


def _estimator_config() -> RreeConfig:
    return RreeConfig(restarts=1, max_iters=120)


def check_pure_sandwich(trials: int = 20, seed: int = 0) -> CheckReport:
    """Pure-state sandwich: S_{1/a}(A) <= estimate <= S_{2-a}(A)."""
    shapes = ((2, 2), (2, 3), (3, 3))
    margins = []
    for t in range(trials):
        da, db = shapes[t % len(shapes)]
        psi = random_pure(dims(("A", da), ("B", db)), seed=seed * 17_011 + t)
        sp = split("A", "B")
        worst = INF
        for a in ALPHA_GRID_ABOVE:
            lo, hi = entanglement.rree_bounds_pure(psi, sp, a)
            est = rree_estimate(psi.to_density(), sp, a, _estimator_config()).upper_estimate
            worst = min(worst, est - lo, hi - est)
        margins.append((t, worst))
    return _finish("pure_sandwich", margins, ESTIMATOR_TOL, {"seed": seed})


def check_fidelity_perturbation(trials: int = 200, seed: int = 0) -> CheckReport:
    """Intermediate step of the pure-reference lower bound:
    I_a(A>B)_rho >= (2a/(a-1)) log F + S_{1/(2-a)}(A)_psi whenever
    F(psi, rho) >= 0.5."""
    margins = []
    t = 0
    attempt = 0
    while t < trials and attempt < trials * 20:
        attempt += 1
        rng = np.random.default_rng(_trial_rng_seed(seed, 900_000 + attempt))
        da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        sys = dims(("A", da), ("B", db))
        psi = random_pure(sys, seed=seed * 19_013 + attempt)
        noise = random_density(sys, seed=seed * 19_013 + attempt + 500_000)
        p = float(rng.uniform(0.0, 0.4))
        rho = qstate.validate((1 - p) * psi.to_density().matrix + p * noise.matrix, sys)
        f = fidelity(psi.to_density(), rho)
        if f < 0.5:
            continue
        worst = INF
        for a in ALPHA_GRID_ABOVE:
            lhs = entropy.coherent_information_renyi(rho, split("A", "B"), a)
            rhs = pure_proximity_lower(psi, rho, a, f)
            worst = min(worst, lhs - rhs)
        margins.append((t, worst))
        t += 1
    return _finish("fidelity_perturbation", margins, EXACT_TOL, {"seed": seed})


def check_instrument_average(trials: int = 10, seed: int = 0) -> CheckReport:
    """Average-monotonicity surrogate: for a unilocal two-outcome instrument,
    sum_k p_k * lower(theta_k) cannot exceed the input's upper estimate."""
    margins = []
    sys = dims(("A", 2), ("B", 2))
    sp = split("A", "B")
    for t in range(trials):
        rho = random_density(sys, seed=seed * 23_017 + t)
        rng = np.random.default_rng(_trial_rng_seed(seed, 700_000 + t))
        # random two-outcome instrument on A: {sqrt(E), sqrt(1-E)} (x) 1_B
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        e = g @ g.conj().T
        e = e / (float(np.linalg.eigvalsh(e)[-1]) * 1.2)
        k0 = np.kron(qstate.matrix_power(e, 0.5), np.eye(2))
        k1 = np.kron(qstate.matrix_power(np.eye(2) - e, 0.5), np.eye(2))
        instrument = qstate.QuantumInstrument((
            qstate.QuantumChannel(sys, sys, (qstate._frozen_array(k0),)),
            qstate.QuantumChannel(sys, sys, (qstate._frozen_array(k1),)),
        ))
        outcomes = qstate.apply_instrument(instrument, rho)
        worst = INF
        for a in ALPHA_GRID_ABOVE:
            upper = rree_estimate(rho, sp, a, _estimator_config()).upper_estimate
            avg_lower = sum(p * max(rree_lower(th, sp, a), 0.0) for p, th in outcomes)
            worst = min(worst, upper - avg_lower)
        margins.append((t, worst))
    return _finish("instrument_average", margins, ESTIMATOR_TOL, {"seed": seed})


CHECKS = {
    "dpi": check_dpi,
    "cq_register_bounds": check_cq_register_bounds,
    "cq_conditional_bound": check_cq_conditional_bound,
    "fidelity_product": check_fidelity_product,
    "van_dam_hayden": check_vdh,
    "pure_sandwich": check_pure_sandwich,
    "fidelity_perturbation": check_fidelity_perturbation,
    "instrument_average": check_instrument_average,
}


def run_checks(check_ids=None, trials: int | None = None, seed: int = 0) -> list[CheckReport]:
    """Run the named checks (all by default, self-test excluded)."""
    ids = list(check_ids) if check_ids else list(CHECKS)
    unknown = [i for i in ids if i not in CHECKS and i != "selftest_inverted"]
    if unknown:
        raise RenyiConverseError(f"unknown check ids {unknown}; available: {sorted(CHECKS)}")
    out = []
    for cid in ids:
        fn = check_selftest_inverted if cid == "selftest_inverted" else CHECKS[cid]
        out.append(fn(trials, seed) if trials else fn(seed=seed))
    return out
