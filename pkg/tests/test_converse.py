import math

import numpy as np
import pytest

import renyi_converse as rc
from renyi_converse import converse
from renyi_converse.errors import AlphaOutOfRange, MissingRegister, RenyiConverseError


def _merge_case():
    phi = rc.maximally_entangled(2, left="A", right="R")
    b0 = rc.pure(np.array([1.0, 0.0]), rc.dims(("B", 2)))
    return rc.tensor(phi, b0)


def test_merge_ent_worked_case():
    # maximally entangled A-R pair with a trivial B share, order 2, rate 1/2
    r = rc.merge_ent_bound(_merge_case(), 2.0, 2, log_k=1.0, log_l=0.0)
    assert abs(r.exponent_per_copy + 0.125) < 1e-12
    assert r.log_fidelity_bound == 2 * r.exponent_per_copy
    assert not r.vacuous


def test_merge_cc_worked_case():
    r = rc.merge_cc_bound(_merge_case(), 0.75, 1, log_x=1.0)
    assert abs(r.exponent_per_copy + 1.0 / 12.0) < 1e-12


def test_schumacher_worked_case():
    rho = rc.maximally_mixed(rc.dims(("A", 2)))
    r = rc.schumacher_bound(rho, 0.75, 2, log_b=1.0)
    assert abs(r.exponent_per_copy + 1.0 / 12.0) < 1e-12


def test_concentrate_bell_case():
    psi = rc.maximally_entangled(2)
    # rate 2 > 1 ebit: bracket = 1 - 2 = -1, prefactor 1/4 at order 2
    r = rc.concentrate_bound(psi, 2.0, 4, log_l=8.0)
    assert abs(r.exponent_per_copy + 0.25) < 1e-12


def test_alpha_domains():
    psi = _merge_case()
    for bad in (1.0, 0.9, 2.5):
        with pytest.raises(AlphaOutOfRange):
            rc.merge_ent_bound(psi, bad, 1, 1.0, 0.0)
    for bad in (0.5, 1.0, 1.5):
        with pytest.raises(AlphaOutOfRange):
            rc.merge_cc_bound(psi, bad, 1, 1.0)


def test_missing_registers_and_bad_rates():
    pair = rc.maximally_entangled(2)
    with pytest.raises(MissingRegister):
        rc.merge_ent_bound(pair, 2.0, 1, 1.0, 0.0)
    with pytest.raises(RenyiConverseError):
        rc.concentrate_bound(pair, 2.0, 1, -1.0)


def test_bound_is_affine_in_n():
    psi = _merge_case()
    r1 = rc.merge_ent_bound(psi, 1.5, 1, 1.0, 0.0)
    r10 = rc.merge_ent_bound(psi, 1.5, 10, 10.0, 0.0)
    assert abs(r10.log_fidelity_bound - 10 * r1.log_fidelity_bound) < 1e-12


def test_vacuous_flag_not_clamped():
    rho = rc.maximally_mixed(rc.dims(("A", 2)))
    # compressing a fully mixed qubit at rate 2 is free: bound must be vacuous
    r = rc.schumacher_bound(rho, 0.75, 5, log_b=10.0)
    assert r.vacuous
    assert r.exponent_per_copy > 0.0


def test_optimize_alpha_dominates_grid():
    rho = rc.validate(np.diag([0.9, 0.1]), rc.dims(("A", 2)))
    params = {"log_B": 0.3 * 50}
    best = rc.optimize_alpha("schumacher", rho, 50, params)
    lo, hi = converse.ALPHA_INTERVALS["schumacher"]
    for a in np.linspace(lo, hi, 21):
        probe = rc.evaluate_bound("schumacher", rho, float(a), 50, params)
        assert best.exponent_per_copy <= probe.exponent_per_copy + 1e-9


def test_limit_brackets_match_von_neumann():
    rho = rc.validate(np.diag([0.9, 0.1]), rc.dims(("A", 2)))
    near = rc.schumacher_bound(rho, 1.0 - 1e-5, 10, log_b=3.0)
    want = converse.schumacher_limit_bracket(rho, 0.3)
    assert abs(near.term_breakdown["bracket"] - want) < 1e-4


def test_sweep_csv_shape():
    psi = rc.maximally_entangled(2)
    results = [rc.concentrate_bound(psi, a, 10, 5.0) for a in (1.25, 1.5, 2.0)]
    text = converse.sweep_to_csv(results)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(converse.CSV_HEADER)
    assert len(lines) == 4
    again = converse.sweep_to_csv(results)
    assert text == again


def test_evaluate_bound_unknown_theorem():
    with pytest.raises(RenyiConverseError):
        rc.evaluate_bound("nonsense", rc.maximally_entangled(2), 1.5, 1, {})
