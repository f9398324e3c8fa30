import math

import numpy as np
import pytest

import renyi_converse as rc
from renyi_converse.errors import (
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    NotTracePreserving,
    NotUnitTrace,
    UnknownLabel,
)


def test_validate_rejects_bad_inputs():
    d = rc.dims(("A", 2))
    with pytest.raises(NotHermitian):
        rc.validate(np.array([[0.5, 1.0], [0.0, 0.5]]), d)
    with pytest.raises(NotPSD):
        rc.validate(np.array([[1.5, 0.0], [0.0, -0.5]]), d)
    with pytest.raises(NotUnitTrace):
        rc.validate(np.eye(2), d)
    with pytest.raises(DimensionMismatch):
        rc.validate(np.eye(3) / 3.0, d)


def test_validate_clips_tiny_negatives():
    d = rc.dims(("A", 2))
    rho = rc.validate(np.diag([1.0 + 5e-10, -5e-10]), d)
    assert np.all(rho.eigenvalues() >= 0.0)
    assert abs(float(np.real(np.trace(rho.matrix))) - 1.0) < 1e-12


def test_arrays_are_frozen():
    rho = rc.maximally_mixed(rc.dims(("A", 2)))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 5.0


def test_tensor_and_partial_trace_roundtrip():
    a = rc.random_density(rc.dims(("A", 2)), seed=3)
    b = rc.random_density(rc.dims(("B", 3)), seed=4)
    joint = rc.tensor(a, b)
    assert joint.dims.labels == ("A", "B")
    back = rc.partial_trace(joint, "A")
    assert np.allclose(back.matrix, a.matrix, atol=1e-12)
    back_b = rc.partial_trace(joint, "B")
    assert np.allclose(back_b.matrix, b.matrix, atol=1e-12)


def test_partial_trace_unknown_label():
    rho = rc.maximally_mixed(rc.dims(("A", 2), ("B", 2)))
    with pytest.raises(UnknownLabel):
        rc.partial_trace(rho, "Z")


def test_bell_reduced_is_maximally_mixed():
    psi = rc.maximally_entangled(2)
    red = rc.partial_trace(psi, "A")
    assert np.allclose(red.matrix, np.eye(2) / 2.0, atol=1e-12)


def test_schmidt_of_bell():
    psi = rc.maximally_entangled(2)
    form = rc.schmidt(psi, rc.split("A", "B"))
    assert form.rank == 2
    assert np.allclose(form.coefficients, [1.0 / math.sqrt(2.0)] * 2, atol=1e-12)


def test_schmidt_reconstructs_state():
    psi = rc.random_pure(rc.dims(("A", 3), ("B", 2)), seed=11)
    form = rc.schmidt(psi, rc.split("A", "B"))
    rebuilt = sum(c * np.kron(u, v) for c, u, v in
                  zip(form.coefficients, form.left_basis, form.right_basis))
    # global phase was fixed during the decomposition
    overlap = abs(np.vdot(rebuilt, psi.amplitudes))
    assert abs(overlap - 1.0) < 1e-10


def test_purification_traces_back():
    rho = rc.random_density(rc.dims(("A", 3)), seed=5)
    psi = rc.purify(rho)
    assert "R" in psi.dims.labels
    back = rc.partial_trace(psi, "A")
    assert np.allclose(back.matrix, rho.matrix, atol=1e-10)


def test_fidelity_commuting_oracle():
    # sum_i sqrt(p_i q_i) = sqrt(0.28) + sqrt(0.18)
    d = rc.dims(("A", 2))
    rho = rc.validate(np.diag([0.7, 0.3]), d)
    sig = rc.validate(np.diag([0.4, 0.6]), d)
    want = math.sqrt(0.28) + math.sqrt(0.18)
    assert abs(rc.fidelity(rho, sig) - want) < 1e-12


def test_fidelity_pure_overlap():
    d = rc.dims(("A", 2))
    psi = rc.pure(np.array([1.0, 0.0]), d).to_density()
    phi = rc.pure(np.array([1.0, 1.0]) / math.sqrt(2.0), d).to_density()
    assert abs(rc.fidelity(psi, phi) - 1.0 / math.sqrt(2.0)) < 1e-12


def test_random_channel_trace_preserving():
    rho = rc.random_density(rc.dims(("A", 3)), seed=9)
    chan = rc.random_channel(rc.dims(("A", 3)), rc.dims(("B", 2)), kraus_count=3, seed=1)
    out = rc.apply_channel(chan, rho)
    assert abs(float(np.real(np.trace(out.matrix))) - 1.0) < 1e-10
    assert out.dims.labels == ("B",)


def test_instrument_probabilities_sum_to_one():
    d = rc.dims(("A", 2))
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    instr = rc.QuantumInstrument((
        rc.QuantumChannel(d, d, (p0,)),
        rc.QuantumChannel(d, d, (p1,)),
    ))
    rho = rc.validate(np.array([[0.7, 0.2], [0.2, 0.3]]), d)
    outcomes = rc.apply_instrument(instr, rho)
    probs = [p for p, _ in outcomes]
    assert abs(sum(probs) - 1.0) < 1e-12
    assert abs(probs[0] - 0.7) < 1e-12


def test_instrument_must_be_trace_preserving():
    d = rc.dims(("A", 2))
    p0 = np.diag([1.0, 0.0]).astype(complex)
    instr = rc.QuantumInstrument((rc.QuantumChannel(d, d, (p0,)),))
    rho = rc.maximally_mixed(d)
    with pytest.raises(NotTracePreserving):
        rc.apply_instrument(instr, rho)


def test_random_states_deterministic():
    a = rc.random_density(rc.dims(("A", 3)), seed=42)
    b = rc.random_density(rc.dims(("A", 3)), seed=42)
    assert np.array_equal(a.matrix, b.matrix)
    c = rc.random_density(rc.dims(("A", 3)), seed=43)
    assert not np.allclose(a.matrix, c.matrix)
