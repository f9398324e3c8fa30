"""Finite-dimensional quantum states, channels and matrix-analytic primitives.

States carry named subsystem labels so that every bipartite split downstream
is by-name, never by index arithmetic.  All values are immutable after
construction and all operations are pure functions of their inputs (plus
explicit seeds).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidRank,
    NegativeEigenvalue,
    NotHermitian,
    NotPSD,
    NotTracePreserving,
    NotUnitTrace,
    UnknownLabel,
)

DEFAULT_TOL = 1e-9

# Relative eigenvalue cutoff: eigenvalues below dim * 1e-12 * lambda_max are
# treated as exactly zero (generalized-inverse convention).
ZERO_CUTOFF_PER_DIM = 1e-12


def _frozen_array(a) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SubsystemDims:
    """Ordered list of (label, dim) register factors."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((str(l), int(d)) for l, d in self.factors))
        labels = [l for l, _ in self.factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate register labels: {labels}")
        if any(d < 1 for _, d in self.factors):
            raise ValueError("every register dimension must be >= 1")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    @property
    def total_dim(self) -> int:
        out = 1
        for _, d in self.factors:
            out *= d
        return out

    def dim_of(self, labels) -> int:
        out = 1
        for l in labels:
            out *= dict(self.factors)[l]
        return out

    def indices_of(self, labels) -> list[int]:
        all_labels = self.labels
        out = []
        for l in labels:
            if l not in all_labels:
                raise UnknownLabel(f"no register named {l!r}; have {all_labels}")
            out.append(all_labels.index(l))
        return out

    def subset(self, labels) -> "SubsystemDims":
        idx = self.indices_of(labels)
        return SubsystemDims(tuple(self.factors[i] for i in idx))


def dims(*factors) -> SubsystemDims:
    """Shorthand: dims(("A", 2), ("B", 3))."""
    return SubsystemDims(tuple(factors))


@dataclass(frozen=True)
class DensityMatrix:
    """Validated Hermitian PSD unit-trace operator with register metadata."""

    dims: SubsystemDims
    matrix: np.ndarray

    @property
    def total_dim(self) -> int:
        return self.dims.total_dim

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class PureState:
    """Unit vector over a tensor factorization."""

    dims: SubsystemDims
    amplitudes: np.ndarray

    @property
    def total_dim(self) -> int:
        return self.dims.total_dim

    def to_density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(self.dims, _frozen_array(np.outer(v, v.conj())))


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data of a bipartite pure state: nonincreasing coefficients
    (square roots of the reduced-state spectrum) and the matching orthonormal
    bases on each side."""

    coefficients: np.ndarray
    left_basis: np.ndarray   # rows are vectors
    right_basis: np.ndarray  # rows are vectors

    @property
    def rank(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map in Kraus form."""

    input_dims: SubsystemDims
    output_dims: SubsystemDims
    kraus_ops: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class QuantumInstrument:
    """Collection of CP branches whose Kraus operators sum to a TP map."""

    branches: tuple[QuantumChannel, ...]


def zero_cutoff(eigenvalues: np.ndarray, dim: int) -> float:
    """Eigenvalue threshold below which values count as exactly zero."""
    top = float(np.max(eigenvalues, initial=0.0))
    return dim * ZERO_CUTOFF_PER_DIM * max(top, 0.0)


def validate(matrix, dims: SubsystemDims, herm_tol: float = DEFAULT_TOL,
             psd_tol: float = DEFAULT_TOL, trace_tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check Hermiticity, positivity and unit trace; clip tiny negative
    eigenvalues (within psd_tol) to zero and renormalize.

    Raises NotHermitian / NotPSD / NotUnitTrace naming the violated invariant
    and its magnitude.
    """
    m = np.asarray(matrix, dtype=complex)
    d = dims.total_dim
    if m.shape != (d, d):
        raise DimensionMismatch(f"matrix shape {m.shape} does not match total dim {d}")
    herm_gap = float(np.max(np.abs(m - m.conj().T))) if d else 0.0
    if herm_gap > herm_tol:
        raise NotHermitian(f"max |M - M^dag| = {herm_gap:.3e} exceeds herm_tol {herm_tol:.1e}")
    m = (m + m.conj().T) / 2.0
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1.0) > trace_tol:
        raise NotUnitTrace(f"|Tr M - 1| = {abs(tr - 1.0):.3e} exceeds trace_tol {trace_tol:.1e}")
    evals, evecs = np.linalg.eigh(m)
    min_ev = float(evals[0])
    if min_ev < -psd_tol:
        raise NotPSD(f"min eigenvalue {min_ev:.3e} below -psd_tol {-psd_tol:.1e}")
    if min_ev < 0.0:
        evals = np.clip(evals, 0.0, None)
        m = (evecs * evals) @ evecs.conj().T
        m = m / np.real(np.trace(m))
    return DensityMatrix(dims, _frozen_array(m))


def pure(amplitudes, dims: SubsystemDims, trace_tol: float = DEFAULT_TOL) -> PureState:
    """Validate a unit vector as a PureState."""
    v = np.asarray(amplitudes, dtype=complex)
    if v.shape != (dims.total_dim,):
        raise DimensionMismatch(f"vector length {v.shape} does not match total dim {dims.total_dim}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > trace_tol:
        raise NotUnitTrace(f"| ||v|| - 1 | = {abs(norm - 1.0):.3e} exceeds trace_tol {trace_tol:.1e}")
    return PureState(dims, _frozen_array(v / norm))


def _merge_dims(a: SubsystemDims, b: SubsystemDims) -> SubsystemDims:
    # Colliding labels from the right factor get primes appended.
    taken = set(a.labels)
    factors = list(a.factors)
    for l, d in b.factors:
        new = l
        while new in taken:
            new = new + "'"
        taken.add(new)
        factors.append((new, d))
    return SubsystemDims(tuple(factors))


def tensor(a, b):
    """Kronecker product of two states of the same kind; register lists are
    concatenated (right-hand labels primed on collision)."""
    newdims = _merge_dims(a.dims, b.dims)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(newdims, _frozen_array(np.kron(a.amplitudes, b.amplitudes)))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(newdims, _frozen_array(np.kron(a.matrix, b.matrix)))
    raise TypeError("tensor arguments must be two PureStates or two DensityMatrices")


def partial_trace(state, keep) -> DensityMatrix:
    """Reduced state on the named registers, label order preserved as given."""
    rho = state.to_density() if isinstance(state, PureState) else state
    keep = [keep] if isinstance(keep, str) else list(keep)
    idx_keep = rho.dims.indices_of(keep)
    shape = rho.dims.dims
    nfac = len(shape)
    t = rho.matrix.reshape(shape + shape)
    idx_drop = [i for i in range(nfac) if i not in idx_keep]
    # contract each dropped factor's row index with its column index
    perm = idx_keep + idx_drop + [nfac + i for i in idx_keep] + [nfac + i for i in idx_drop]
    t = t.transpose(perm)
    dkeep = int(np.prod([shape[i] for i in idx_keep], initial=1))
    ddrop = int(np.prod([shape[i] for i in idx_drop], initial=1))
    t = t.reshape(dkeep, ddrop, dkeep, ddrop)
    reduced = np.trace(t, axis1=1, axis2=3)
    return DensityMatrix(rho.dims.subset(keep), _frozen_array(reduced))


def matrix_power(h, p: float, psd_tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD matrix power with the generalized-inverse convention:
    eigenvalues below the relative zero cutoff are treated as exactly 0 and
    0**p := 0 for every p."""
    h = np.asarray(h, dtype=complex)
    herm_gap = float(np.max(np.abs(h - h.conj().T)))
    if herm_gap > psd_tol:
        raise NotHermitian(f"max |H - H^dag| = {herm_gap:.3e}")
    evals, evecs = np.linalg.eigh(h)
    if float(evals[0]) < -psd_tol:
        raise NegativeEigenvalue(f"min eigenvalue {float(evals[0]):.3e} below -psd_tol")
    cut = zero_cutoff(evals, h.shape[0])
    out = np.zeros_like(evals)
    support = evals > cut
    out[support] = evals[support] ** p
    return (evecs * out) @ evecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1, via the spectrum of
    sqrt(sigma) rho sqrt(sigma)."""
    if rho.total_dim != sigma.total_dim:
        raise DimensionMismatch(f"{rho.total_dim} vs {sigma.total_dim}")
    sq = matrix_power(sigma.matrix, 0.5)
    evals = np.linalg.eigvalsh(sq @ rho.matrix @ sq)
    evals = np.clip(evals, 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(evals))))


@dataclass(frozen=True)
class BipartiteSplit:
    """Partition of a state's registers into two named groups."""

    left: tuple[str, ...]
    right: tuple[str, ...]

    def __post_init__(self):
        left = (self.left,) if isinstance(self.left, str) else tuple(self.left)
        right = (self.right,) if isinstance(self.right, str) else tuple(self.right)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        if not left or not right or set(left) & set(right):
            raise ValueError(f"invalid split {left} vs {right}")


def split(left, right) -> BipartiteSplit:
    return BipartiteSplit(left, right)


def schmidt(psi: PureState, bsplit: BipartiteSplit, coeff_cutoff: float | None = None) -> SchmidtForm:
    """Schmidt decomposition across the given split.

    Coefficients are sorted nonincreasing; each singular vector's phase is
    fixed by making its largest-magnitude component real positive, and exact
    degeneracies are broken by lexicographic order of the phase-fixed left
    vectors, so the output is reproducible across platforms.
    """
    idx = psi.dims.indices_of(list(bsplit.left) + list(bsplit.right))
    if set(idx) != set(range(len(psi.dims.factors))):
        raise UnknownLabel("split must cover every register of the state")
    shape = psi.dims.dims
    t = psi.amplitudes.reshape(shape).transpose(idx)
    dl = psi.dims.dim_of(bsplit.left)
    dr = psi.dims.dim_of(bsplit.right)
    u, s, vh = np.linalg.svd(t.reshape(dl, dr), full_matrices=False)
    if coeff_cutoff is None:
        coeff_cutoff = dl * dr * 1e-12 * (s[0] if len(s) else 0.0)
    keep = s > coeff_cutoff
    u, s, vh = u[:, keep], s[keep], vh[keep, :]
    # phase fix
    for k in range(len(s)):
        j = int(np.argmax(np.abs(u[:, k])))
        ph = u[j, k] / abs(u[j, k])
        u[:, k] *= ph.conjugate()
        vh[k, :] *= ph
    # deterministic tie break inside degenerate blocks
    order = sorted(range(len(s)), key=lambda k: (-s[k],) + tuple(
        np.round(np.concatenate([u[:, k].real, u[:, k].imag]), 10)))
    u, s, vh = u[:, order], s[order], vh[order, :]
    # rows of both bases are kets: amplitudes == sum_k c_k kron(left_k, right_k)
    return SchmidtForm(_frozen_array(s).real, _frozen_array(u.T), _frozen_array(vh))


def purify(rho: DensityMatrix, env_label: str = "R") -> PureState:
    """Canonical purification sum_i sqrt(l_i) |i>_R |v_i>_A with an
    environment of dimension rank(rho)."""
    evals, evecs = np.linalg.eigh(rho.matrix)
    cut = zero_cutoff(evals, rho.total_dim)
    order = np.argsort(-evals)
    evals, evecs = evals[order], evecs[:, order]
    keep = evals > cut
    evals, evecs = evals[keep], evecs[:, keep]
    rank = len(evals)
    amps = np.zeros(rank * rho.total_dim, dtype=complex)
    for i in range(rank):
        amps[i * rho.total_dim:(i + 1) * rho.total_dim] = np.sqrt(evals[i]) * evecs[:, i]
    env = env_label
    while env in rho.dims.labels:
        env = env + "'"
    newdims = SubsystemDims(((env, rank),) + rho.dims.factors)
    amps = amps / np.linalg.norm(amps)
    return PureState(newdims, _frozen_array(amps))


def apply_channel(channel: QuantumChannel, rho: DensityMatrix,
                  psd_tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Kraus action of a CPTP map."""
    if channel.input_dims.total_dim != rho.total_dim:
        raise DimensionMismatch(
            f"channel input dim {channel.input_dims.total_dim} vs state dim {rho.total_dim}")
    acc = np.zeros((channel.output_dims.total_dim,) * 2, dtype=complex)
    tp = np.zeros((rho.total_dim,) * 2, dtype=complex)
    for k in channel.kraus_ops:
        acc += k @ rho.matrix @ k.conj().T
        tp += k.conj().T @ k
    gap = float(np.max(np.abs(tp - np.eye(rho.total_dim))))
    if gap > max(psd_tol, 1e-9):
        raise NotTracePreserving(f"sum K^dag K deviates from identity by {gap:.3e}")
    return validate(acc, channel.output_dims, psd_tol=psd_tol)


def apply_instrument(instrument: QuantumInstrument, rho: DensityMatrix,
                     p_floor: float = 1e-12) -> list[tuple[float, DensityMatrix]]:
    """Apply a quantum instrument: returns (p_k, post-state) per branch.
    Branches with p_k < p_floor are dropped and the rest renormalized."""
    tp = np.zeros((rho.total_dim,) * 2, dtype=complex)
    outcomes = []
    for br in instrument.branches:
        if br.input_dims.total_dim != rho.total_dim:
            raise DimensionMismatch("instrument branch input dim does not match state")
        out = np.zeros((br.output_dims.total_dim,) * 2, dtype=complex)
        for k in br.kraus_ops:
            out += k @ rho.matrix @ k.conj().T
            tp += k.conj().T @ k
        p = float(np.real(np.trace(out)))
        outcomes.append((p, out, br.output_dims))
    gap = float(np.max(np.abs(tp - np.eye(rho.total_dim))))
    if gap > 1e-9:
        raise NotTracePreserving(f"instrument branches sum deviates from identity by {gap:.3e}")
    kept = [(p, m, d) for p, m, d in outcomes if p >= p_floor]
    total = sum(p for p, _, _ in kept)
    return [(p / total, validate(m / p, d)) for p, m, d in kept]


def random_density(dims: SubsystemDims, rank: int | None = None, seed: int = 0) -> DensityMatrix:
    """Ginibre-induced random state G G^dag / Tr, deterministic given seed."""
    d = dims.total_dim
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise InvalidRank(f"rank {rank} outside [1, {d}]")
    rng = np.random.default_rng([abs(int(seed)), 0x5EED])
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return validate(m / np.real(np.trace(m)), dims)


def random_pure(dims: SubsystemDims, seed: int = 0) -> PureState:
    """Haar-random pure state (normalized complex Gaussian), deterministic."""
    d = dims.total_dim
    rng = np.random.default_rng([abs(int(seed)), 0xFACE])
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(dims, _frozen_array(v / np.linalg.norm(v)))


def random_channel(dims_in: SubsystemDims, dims_out: SubsystemDims,
                   kraus_count: int = 2, seed: int = 0) -> QuantumChannel:
    """Random CPTP map via the Stinespring dilation of a Haar-ish isometry."""
    din, dout = dims_in.total_dim, dims_out.total_dim
    if kraus_count * dout < din:
        raise InvalidRank(f"need kraus_count*dout >= din ({kraus_count}*{dout} < {din})")
    rng = np.random.default_rng([abs(int(seed)), 0xC4A])
    g = rng.standard_normal((kraus_count * dout, din)) + 1j * rng.standard_normal((kraus_count * dout, din))
    q, r = np.linalg.qr(g)
    # fix column phases so the isometry is deterministic
    diag = np.diagonal(r)
    q = q * (diag.conj() / np.abs(diag))
    kraus = tuple(_frozen_array(q[j * dout:(j + 1) * dout, :]) for j in range(kraus_count))
    return QuantumChannel(dims_in, dims_out, kraus)


def identity_channel(dims: SubsystemDims) -> QuantumChannel:
    return QuantumChannel(dims, dims, (_frozen_array(np.eye(dims.total_dim)),))


def replace_channel(dims_in: SubsystemDims, target: DensityMatrix) -> QuantumChannel:
    """Trace-and-replace map X -> Tr(X) * target."""
    evals, evecs = np.linalg.eigh(target.matrix)
    kraus = []
    for i, ev in enumerate(evals):
        if ev <= 0:
            continue
        for j in range(dims_in.total_dim):
            op = np.sqrt(ev) * np.outer(evecs[:, i], np.eye(dims_in.total_dim)[j])
            kraus.append(_frozen_array(op))
    return QuantumChannel(dims_in, target.dims, tuple(kraus))


def extend_channel(channel: QuantumChannel, full_dims: SubsystemDims, acting_on) -> QuantumChannel:
    """Lift a channel acting on a subset of registers to the full system
    (identity elsewhere).  Output registers replace the acted-on ones in
    place; the acted-on group must be contiguous after reordering is not
    required since registers are permuted internally."""
    acting_on = [acting_on] if isinstance(acting_on, str) else list(acting_on)
    idx_act = full_dims.indices_of(acting_on)
    nfac = len(full_dims.factors)
    idx_rest = [i for i in range(nfac) if i not in idx_act]
    shape = full_dims.dims
    d_act = int(np.prod([shape[i] for i in idx_act], initial=1))
    d_rest = int(np.prod([shape[i] for i in idx_rest], initial=1))
    if channel.input_dims.total_dim != d_act:
        raise DimensionMismatch("channel input does not match the named registers")
    # permutation matrix: full space -> (acting, rest)
    perm = idx_act + idx_rest
    p = np.zeros((full_dims.total_dim, full_dims.total_dim))
    for basis_index in range(full_dims.total_dim):
        multi = np.unravel_index(basis_index, shape)
        new_multi = tuple(multi[i] for i in perm)
        new_index = np.ravel_multi_index(new_multi, tuple(shape[i] for i in perm))
        p[new_index, basis_index] = 1.0
    kraus = tuple(_frozen_array(np.kron(k, np.eye(d_rest)) @ p) for k in channel.kraus_ops)
    out_factors = list(channel.output_dims.factors) + [full_dims.factors[i] for i in idx_rest]
    # keep output labels unique
    out_dims = _merge_dims(channel.output_dims, SubsystemDims(tuple(full_dims.factors[i] for i in idx_rest)))
    del out_factors
    return QuantumChannel(full_dims, out_dims, kraus)


def maximally_entangled(k: int, left: str = "A", right: str = "B") -> PureState:
    """|Phi_K> = sum_i |ii> / sqrt(K)."""
    amps = np.zeros(k * k, dtype=complex)
    for i in range(k):
        amps[i * k + i] = 1.0 / np.sqrt(k)
    return PureState(dims((left, k), (right, k)), _frozen_array(amps))


def maximally_mixed(d: SubsystemDims) -> DensityMatrix:
    return DensityMatrix(d, _frozen_array(np.eye(d.total_dim) / d.total_dim))
