import math

import numpy as np
import pytest

import renyi_converse as rc
from renyi_converse import entanglement as en
from renyi_converse.entanglement import RreeConfig
from renyi_converse.errors import AlphaOutOfRange, FidelityPreconditionFailed
from renyi_converse.qstate import DensityMatrix, SubsystemDims

# frozen oracle values for the Schmidt-(0.8, 0.2) pure state at order 3/2:
# (entropy of order 2/3, entropy of order 1/2) of the reduced state
SANDWICH_LO_ORACLE = 0.8026759431540638
SANDWICH_HI_ORACLE = 0.8479969065549501


def _schmidt_state(probs):
    k = len(probs)
    vec = np.zeros(k * k)
    for i, p in enumerate(probs):
        vec[i * k + i] = math.sqrt(p)
    return rc.pure(vec, rc.dims(("A", k), ("B", k)))


def test_pure_sandwich_oracle_values():
    psi = _schmidt_state([0.8, 0.2])
    lo, hi = rc.rree_bounds_pure(psi, rc.split("A", "B"), 1.5)
    assert abs(lo - SANDWICH_LO_ORACLE) < 1e-9
    assert abs(hi - SANDWICH_HI_ORACLE) < 1e-9


def test_bell_estimate_is_one():
    rho = rc.maximally_entangled(2).to_density()
    est = rc.rree_estimate(rho, rc.split("A", "B"), 1.5,
                           RreeConfig(restarts=1, max_iters=100))
    assert abs(est.upper_estimate - 1.0) < 1e-4
    assert abs(est.analytic_lower - 1.0) < 1e-9
    assert est.analytic_upper is not None and abs(est.analytic_upper - 1.0) < 1e-9


def test_separable_input_estimates_near_zero():
    a = rc.random_density(rc.dims(("A", 2)), seed=21)
    b = rc.random_density(rc.dims(("B", 2)), seed=22)
    c = rc.random_density(rc.dims(("A", 2)), seed=23)
    d = rc.random_density(rc.dims(("B", 2)), seed=24)
    mix = rc.validate(0.6 * rc.tensor(a, b).matrix + 0.4 * rc.tensor(c, d).matrix,
                      rc.dims(("A", 2), ("B", 2)))
    est = rc.rree_estimate(mix, rc.split("A", "B"), 1.5,
                           RreeConfig(restarts=2, max_iters=400))
    assert est.upper_estimate <= 1e-6


def test_witness_is_feasible_and_matches_estimate():
    rho = rc.random_pure(rc.dims(("A", 2), ("B", 3)), seed=31).to_density()
    est = rc.rree_estimate(rho, rc.split("A", "B"), 1.25,
                           RreeConfig(restarts=1, max_iters=50))
    sigma = est.witness.assemble()
    assert abs(float(np.real(np.trace(sigma.matrix))) - 1.0) < 1e-7
    assert float(np.min(sigma.eigenvalues())) > -1e-10
    reeval = rc.renyi_relative(rho, sigma, 1.25)
    assert abs(reeval - est.upper_estimate) < 1e-9


def test_estimate_between_analytic_bounds():
    psi = rc.random_pure(rc.dims(("A", 3), ("B", 3)), seed=7)
    for a in (1.25, 1.5, 2.0):
        est = rc.rree_estimate(psi.to_density(), rc.split("A", "B"), a,
                               RreeConfig(restarts=1, max_iters=40))
        lo, hi = rc.rree_bounds_pure(psi, rc.split("A", "B"), a)
        assert lo - 1e-9 <= est.upper_estimate <= hi + 1e-6


def test_weak_regime_flag():
    rho = rc.maximally_entangled(2).to_density()
    est = rc.rree_estimate(rho, rc.split("A", "B"), 0.75,
                           RreeConfig(restarts=1, max_iters=30))
    assert est.weak_regime
    est2 = rc.rree_estimate(rho, rc.split("A", "B"), 1.5,
                            RreeConfig(restarts=1, max_iters=30))
    assert not est2.weak_regime


def test_objective_gradients_match_finite_differences():
    rng = np.random.default_rng(99)
    # enough terms to keep sigma full rank: off the clip floor the analytic
    # gradient is exact
    da, db, terms = 2, 3, 36
    rho = rc.random_density(rc.dims(("A", da), ("B", db)), seed=17)
    obj = en._Objective(np.asarray(rho.matrix), 1.6, da, db)
    v = np.abs(rng.standard_normal(terms)) + 0.3
    x = rng.standard_normal((terms, da)) + 1j * rng.standard_normal((terms, da))
    y = rng.standard_normal((terms, db)) + 1j * rng.standard_normal((terms, db))
    val, g_v, g_x, g_y = obj.value_and_grads(v, x, y)
    h = 1e-6
    for _ in range(5):
        ev = rng.standard_normal(terms)
        ex = rng.standard_normal((terms, da)) + 1j * rng.standard_normal((terms, da))
        ey = rng.standard_normal((terms, db)) + 1j * rng.standard_normal((terms, db))
        num = (obj.value(v + h * ev, x + h * ex, y + h * ey)
               - obj.value(v - h * ev, x - h * ex, y - h * ey)) / (2 * h)
        # real-parameter and Wirtinger (conjugate-gradient) inner products
        ana = (float(np.sum(ev * g_v))
               + 2.0 * float(np.real(np.sum(np.conj(ex) * g_x)))
               + 2.0 * float(np.real(np.sum(np.conj(ey) * g_y))))
        assert abs(num - ana) < 1e-5 * max(1.0, abs(num))


def test_rree_lower_matches_coherent_information():
    rho = rc.maximally_entangled(3).to_density()
    assert abs(rc.rree_lower(rho, rc.split("A", "B"), 2.0) - math.log2(3)) < 1e-9


def test_pure_proximity_lower_exact_reference():
    psi = _schmidt_state([0.8, 0.2])
    # F = 1: the bound reduces to the order-1/(2-a) entropy of the marginal
    val = rc.pure_proximity_lower(psi, psi.to_density(), 1.5, 1.0)
    want = rc.renyi_entropy(rc.partial_trace(psi, "A"), 2.0)
    assert abs(val - want) < 1e-10


def test_pure_proximity_precondition():
    psi = _schmidt_state([0.8, 0.2])
    far = rc.maximally_mixed(psi.dims)
    with pytest.raises(FidelityPreconditionFailed):
        rc.pure_proximity_lower(psi, far, 1.5, 0.99)
    with pytest.raises(AlphaOutOfRange):
        rc.pure_proximity_lower(psi, psi.to_density(), 0.5, 1.0)


def test_van_dam_hayden_nonnegative_and_domain():
    rho = rc.random_density(rc.dims(("A", 4)), seed=41)
    sig = rc.random_density(rc.dims(("A", 4)), seed=42)
    for a in (0.5, 0.75, 0.9):
        assert rc.van_dam_hayden_gap(rho, sig, a) >= -1e-9
    with pytest.raises(AlphaOutOfRange):
        rc.van_dam_hayden_gap(rho, sig, 1.5)


def test_witness_json_round_trip():
    rho = rc.maximally_entangled(2).to_density()
    est = rc.rree_estimate(rho, rc.split("A", "B"), 1.5,
                           RreeConfig(restarts=1, max_iters=20))
    doc = est.witness.to_json()
    assert len(doc) == len(est.witness.weights)
    assert abs(sum(term["weight"] for term in doc) - 1.0) < 1e-9


def test_estimator_deterministic():
    rho = rc.random_pure(rc.dims(("A", 2), ("B", 2)), seed=77).to_density()
    cfg = RreeConfig(restarts=2, max_iters=40, seed=5)
    a = rc.rree_estimate(rho, rc.split("A", "B"), 1.5, cfg)
    b = rc.rree_estimate(rho, rc.split("A", "B"), 1.5, cfg)
    assert a.upper_estimate == b.upper_estimate
    assert a.optimizer_trace == b.optimizer_trace
