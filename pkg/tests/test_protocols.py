import math
from math import fsum

import numpy as np
import pytest

import renyi_converse as rc
from renyi_converse import protocols
from renyi_converse.errors import BoundViolation, RateOutOfRange, TooLarge


def test_type_classes_partition_probability():
    classes = rc.type_classes([0.5, 0.3, 0.2], 6)
    assert abs(fsum(c.mass for c in classes) - 1.0) < 1e-12
    assert sum(c.multiplicity for c in classes) == 3 ** 6


def test_type_class_multiplicities_exact():
    classes = {tuple(c.counts): c.multiplicity for c in rc.type_classes([0.5, 0.5], 4)}
    assert classes[(4, 0)] == 1
    assert classes[(2, 2)] == 6
    assert classes[(0, 4)] == 1


def test_type_classes_guard():
    with pytest.raises(TooLarge):
        rc.type_classes([0.1] * 10, 200)


def test_floor_pow2_exact():
    assert rc.floor_pow2(0.0) == 1
    assert rc.floor_pow2(10.0) == 1024
    assert rc.floor_pow2(100.0) == 2 ** 100
    # would overflow / lose precision in double arithmetic:
    # floor(2^100.5) = floor(sqrt(2^201)) computed in exact integers
    assert rc.floor_pow2(100.5) == math.isqrt(2 ** 201)
    with pytest.raises(RateOutOfRange):
        rc.floor_pow2(-1.0)


def test_schumacher_mass_small_oracle():
    # n = 3, spectrum (0.9, 0.1): keeping 1 string keeps 0.9^3;
    # keeping 4 strings adds the three 0.9^2*0.1 strings
    r1 = rc.schumacher_mass([0.9, 0.1], 3, 0.0)
    assert abs(r1.eta - 0.9 ** 3) < 1e-12
    r4 = rc.schumacher_mass([0.9, 0.1], 3, math.log2(4) / 3)
    assert abs(r4.eta - (0.9 ** 3 + 3 * 0.9 ** 2 * 0.1)) < 1e-12
    assert abs(r4.fidelity_ceiling - math.sqrt(r4.eta)) < 1e-15


def test_schumacher_mass_monotone_in_rate():
    vals = [rc.schumacher_mass([0.8, 0.2], 20, r).eta for r in (0.1, 0.3, 0.5, 0.8, 1.0)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] - 1.0) < 1e-12


def test_schumacher_rate_domain():
    with pytest.raises(RateOutOfRange):
        rc.schumacher_mass([0.9, 0.1], 5, 1.5)


def test_schumacher_exact_small_between_eta_and_ceiling():
    rho = rc.validate(np.diag([0.9, 0.1]), rc.dims(("A", 2)))
    r = rc.schumacher_exact_small(rho, 3, 1.0 / 3.0)
    assert r.fidelity_exact is not None
    assert r.eta - 1e-9 <= r.fidelity_exact <= r.fidelity_ceiling + 1e-9


def test_schumacher_exact_cap():
    rho = rc.maximally_mixed(rc.dims(("A", 4)))
    with pytest.raises(TooLarge):
        rc.schumacher_exact_small(rho, 6, 0.5)


def test_concentrate_bell_two_copies():
    # types of two Bell copies: (2,0),(0,2) give trivial yield; (1,1) gives
    # a 2-dimensional maximally entangled state with probability 1/2
    r = rc.concentrate_simulate([0.5, 0.5], 2, 1.0)
    assert abs(r.success_prob - 0.5) < 1e-12
    want = 0.5 + 0.5 * math.sqrt(1.0 / 2.0)
    assert abs(r.fidelity_lower - want) < 1e-12


def test_concentrate_trivial_target():
    r = rc.concentrate_simulate([0.8, 0.2], 5, 0.0)
    assert abs(r.fidelity_lower - 1.0) < 1e-12
    assert abs(r.success_prob - 1.0) < 1e-12


def test_concentrate_yield_distribution_normalized():
    r = rc.concentrate_simulate([0.8, 0.2], 30, 10.0)
    assert abs(fsum(p for _, p in r.yield_distribution) - 1.0) < 1e-12


def test_confront_passes_on_honest_series():
    probs = [0.9, 0.1]
    rho = rc.validate(np.diag(probs), rc.dims(("A", 2)))
    sims, bounds = [], []
    for n in (20, 60, 100):
        sims.append(rc.schumacher_mass(probs, n, 0.3))
        bounds.append(rc.optimize_alpha("schumacher", rho, n, {"log_B": 0.3 * n}))
    report = rc.confront_bounds("schumacher", sims, bounds)
    assert not report.violations
    assert all(row["ok"] for row in report.rows)


def test_confront_raises_on_fabricated_violation():
    probs = [0.9, 0.1]
    rho = rc.validate(np.diag(probs), rc.dims(("A", 2)))
    sim = rc.schumacher_mass(probs, 100, 0.3)
    fake = protocols.ProtocolRunResult(
        n=100, rate=0.3, eta=sim.eta, fidelity_lower=0.999, fidelity_ceiling=0.999)
    bound = rc.optimize_alpha("schumacher", rho, 100, {"log_B": 30.0})
    with pytest.raises(BoundViolation):
        rc.confront_bounds("schumacher", [fake], [bound])


def test_confront_bound_only_for_merging():
    psi = rc.tensor(rc.maximally_entangled(2, left="A", right="R"),
                    rc.pure(np.array([1.0, 0.0]), rc.dims(("B", 2))))
    bounds = [rc.merge_ent_bound(psi, 2.0, n, float(n), 0.0) for n in (1, 2)]
    report = rc.confront_bounds("merge_ent", [], bounds)
    assert report.bound_only
    assert len(report.rows) == 2
