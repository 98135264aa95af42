"""Superselection-induced variance (SIV) of the local type-a count.

Two normalizations are in play. ``FACTOR_FOUR`` is four times the variance
of the local particle number, which gives 1 for (|01> + |10>)/sqrt(2).
``UNNORMALIZED`` is the bare variance and is the convention under which the
Werner closed form ``p**2 / (2 (1 + p))`` holds. Reports carry their
convention and convert with :meth:`SivReport.to`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .entanglement import werner_ppt_threshold
from .matcore import (
    STRUCTURE_TOL,
    QubitFactorization,
    as_matrix,
    hermitian_eigen,
    validate_density,
)
from .ssr import ChargeAssignment, is_ssr_pure

DECOMPOSITION_TOL = 1e-8
COHERENCE_TOL = 1e-10
RANK_TOL = 1e-14
# a trial move must gain max(IMPROVEMENT_TOL, SUFFICIENT_DECREASE * step**2);
# the floor absorbs round-off, the step term stops endless crawling in valleys
IMPROVEMENT_TOL = 1e-15
SUFFICIENT_DECREASE = 1e-4


class NoSsrDecompositionError(ValueError):
    """The state has coherence between different global charges."""


class Convention(str, enum.Enum):
    FACTOR_FOUR = "factor_four"
    UNNORMALIZED = "unnormalized"


class Method(str, enum.Enum):
    PURE_DIRECT = "pure_direct"
    CLOSED_FORM = "closed_form"
    MINIMIZER = "minimizer"


_SCALE = {Convention.FACTOR_FOUR: 4.0, Convention.UNNORMALIZED: 1.0}


@dataclass(frozen=True)
class MinimizerOptions:
    restarts: int = 32
    max_iterations: int = 2000
    seed: int = 42
    tol: float = 1e-8
    # isometry output size per block, as a multiple of the block dimension
    size_factor: int = 2
    initial_step: float = 0.5

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or self.size_factor < 1:
            raise ValueError("restarts, max_iterations and size_factor must be positive")
        if self.tol <= 0 or self.initial_step <= 0:
            raise ValueError("tol and initial_step must be positive")


@dataclass(frozen=True)
class BlockDiagnostics:
    global_charge: int
    dim: int
    rank: int
    value: float
    best_restart: Optional[int] = None
    iterations: int = 0
    objective_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class MinimizerDiagnostics:
    restarts: int
    seed: int
    blocks: tuple[BlockDiagnostics, ...]


@dataclass(frozen=True)
class DecompositionCandidate:
    weights: np.ndarray = field(repr=False)
    pure_states: tuple[np.ndarray, ...] = field(repr=False)

    def mixture(self) -> np.ndarray:
        d = self.pure_states[0].shape[0]
        out = np.zeros((d, d), dtype=complex)
        for w, psi in zip(self.weights, self.pure_states):
            out += w * np.outer(psi, psi.conj())
        return out

    def check(self, rho, charges: ChargeAssignment = ChargeAssignment()) -> None:
        if abs(float(np.sum(self.weights)) - 1.0) > COHERENCE_TOL:
            raise ValueError("decomposition weights do not sum to one")
        if np.max(np.abs(self.mixture() - rho)) > DECOMPOSITION_TOL:
            raise ValueError("decomposition does not reproduce the state")
        if not all(is_ssr_pure(psi, charges) for psi in self.pure_states):
            raise ValueError("decomposition contains a state violating the SSR")


@dataclass(frozen=True)
class SivReport:
    value: float
    convention: Convention
    method: Method
    diagnostics: Optional[MinimizerDiagnostics] = None
    decomposition: Optional[DecompositionCandidate] = None

    def to(self, convention) -> "SivReport":
        convention = Convention(convention)
        value = self.value * _SCALE[convention] / _SCALE[self.convention]
        return SivReport(value, convention, self.method, self.diagnostics, self.decomposition)


def _number_diagonal(n_a) -> np.ndarray:
    n_a = as_matrix(n_a)
    diag = np.diagonal(n_a)
    if np.max(np.abs(n_a - np.diag(diag))) > STRUCTURE_TOL:
        raise ValueError("local charge operator must be diagonal")
    return diag.real


def siv_pure(psi, n_a, convention=Convention.FACTOR_FOUR) -> float:
    """Scaled variance of the diagonal number operator ``n_a`` in ``psi``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    n = _number_diagonal(n_a)
    prob = np.abs(psi) ** 2
    support = n[prob > 0]
    if support.size == 0 or np.ptp(support) == 0:
        return 0.0
    mean = float(prob @ n) / float(prob.sum())
    var = float(prob @ (n - mean) ** 2) / float(prob.sum())
    return _SCALE[Convention(convention)] * max(var, 0.0)


def _weighted_variances(vecs: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Sum over columns of ``w_i * Var_i(n)`` for unnormalized columns.

    ``vecs`` has shape ``(..., d, m)``; the result has shape ``(...)``.
    """
    prob = np.abs(vecs) ** 2
    w = prob.sum(axis=-2)
    s1 = np.einsum("...dm,d->...m", prob, n)
    s2 = np.einsum("...dm,d->...m", prob, n**2)
    safe = np.where(w > 1e-300, w, 1.0)
    terms = np.where(w > 1e-300, s2 - s1**2 / safe, 0.0)
    return terms.sum(axis=-1)


def _orthonormalize(x: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the columns of a batch of ``(m, r)`` matrices.

    Leaves matrices whose columns are already orthonormal unchanged.
    """
    u = np.array(x, dtype=complex)
    for j in range(u.shape[-1]):
        col = u[..., j]
        for _ in range(2):
            for k in range(j):
                prev = u[..., k]
                col = col - prev * np.sum(prev.conj() * col, axis=-1, keepdims=True)
        u[..., j] = col / np.linalg.norm(col, axis=-1, keepdims=True)
    return u


def _objective(x: np.ndarray, amps: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Decomposition cost for a batch of raw parameter matrices ``x``.

    ``x`` has shape ``(B, m, r)``; its orthonormalized columns form the
    isometry ``U`` and the ensemble vectors are the columns of ``amps @ U.T``.
    """
    u = _orthonormalize(x)
    return _weighted_variances(amps @ np.swapaxes(u, -1, -2), n)


def _minimize_block(amps, n, opts: MinimizerOptions, seq: np.random.SeedSequence):
    """Coordinate-wise descent over isometries, all restarts advanced together."""
    d, r = amps.shape
    m = opts.size_factor * d
    b = opts.restarts
    x = np.empty((b, m, r), dtype=complex)
    for k, child in enumerate(seq.spawn(b)):
        rng = np.random.default_rng(child)
        x[k] = rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r))
    # restart 0 starts from the eigen-ensemble itself
    x[0] = np.eye(m, r)

    half = m * r

    def pack(xs):
        xs = _orthonormalize(xs)
        return np.concatenate([xs.real.reshape(b, -1), xs.imag.reshape(b, -1)], axis=1)

    def unpack(pr):
        return (pr[..., :half] + 1j * pr[..., half:]).reshape(pr.shape[:-1] + (m, r))

    params = pack(x)

    f = _objective(unpack(params), amps, n)
    step = np.full(b, opts.initial_step)
    active = np.ones(b, dtype=bool)
    traces = [[float(v)] for v in f]
    iterations = 0
    for iterations in range(1, opts.max_iterations + 1):
        improved = np.zeros(b, dtype=bool)
        gain = np.maximum(IMPROVEMENT_TOL, SUFFICIENT_DECREASE * step**2)
        for c in range(params.shape[1]):
            for sign in (1.0, -1.0):
                trial = params.copy()
                trial[:, c] += sign * step
                ft = _objective(unpack(trial), amps, n)
                better = active & (ft < f - gain)
                params[better] = trial[better]
                f = np.where(better, ft, f)
                improved |= better
        # drop the gauge drift X -> X R so the step keeps its meaning
        params = pack(unpack(params))
        for k in np.flatnonzero(active):
            traces[k].append(float(f[k]))
        step = np.where(active & ~improved, 0.5 * step, step)
        active &= step >= opts.tol
        # the cost is a sum of variances, so zero cannot be beaten
        if not active.any() or f.min() <= IMPROVEMENT_TOL:
            break

    best = int(np.argmin(f))
    u = _orthonormalize(unpack(params[best]))
    return float(f[best]), amps @ u.T, best, iterations, tuple(traces[best])


def siv_formation(
    rho,
    n_a,
    charges: ChargeAssignment = ChargeAssignment(),
    opts: MinimizerOptions = MinimizerOptions(),
    convention=Convention.FACTOR_FOUR,
) -> SivReport:
    """Convex-roof SIV over decompositions into states of fixed global charge.

    Each global-charge block is handled on its own: its eigen-ensemble is
    mixed by an isometry whose raw parameters are refined by coordinate
    descent from ``opts.restarts`` seeded starting points.
    """
    rho = validate_density(rho)
    convention = Convention(convention)
    fact = QubitFactorization.from_dim(rho.shape[0])
    n = _number_diagonal(n_a)
    q = charges.global_charges(fact)
    cross = q[:, None] != q[None, :]
    if np.max(np.abs(np.where(cross, rho, 0.0)), initial=0.0) > COHERENCE_TOL:
        raise NoSsrDecompositionError(
            "no SSR decomposition exists: state mixes different global charges"
        )

    charge_values = sorted(set(q.tolist()))
    block_seqs = np.random.SeedSequence(opts.seed).spawn(len(charge_values))
    total = 0.0
    weights, states, blocks = [], [], []
    for charge, seq in zip(charge_values, block_seqs):
        ix = np.flatnonzero(q == charge)
        block = rho[np.ix_(ix, ix)]
        lam, vecs = hermitian_eigen(block)
        keep = lam > RANK_TOL
        if not keep.any():
            continue
        amps = vecs[:, keep] * np.sqrt(lam[keep])
        nb = n[ix]
        if np.ptp(nb) == 0:
            value = 0.0
            vectors, diag = amps, BlockDiagnostics(charge, ix.size, int(keep.sum()), value)
        elif keep.sum() == 1:
            value = max(float(_weighted_variances(amps, nb)), 0.0)
            vectors, diag = amps, BlockDiagnostics(charge, ix.size, int(keep.sum()), value)
        else:
            value, vectors, best, its, trace = _minimize_block(amps, nb, opts, seq)
            diag = BlockDiagnostics(charge, ix.size, int(keep.sum()), value, best, its, trace)
        total += value
        blocks.append(diag)
        for col in vectors.T:
            w = float(np.vdot(col, col).real)
            if w > RANK_TOL:
                full = np.zeros(rho.shape[0], dtype=complex)
                full[ix] = col / np.sqrt(w)
                weights.append(w)
                states.append(full)

    decomposition = DecompositionCandidate(np.array(weights), tuple(states))
    return SivReport(
        _SCALE[convention] * max(total, 0.0),
        convention,
        Method.MINIMIZER,
        MinimizerDiagnostics(opts.restarts, opts.seed, tuple(blocks)),
        decomposition,
    )


def werner_siv_closed_form(p: float) -> SivReport:
    """Werner-frame SIV of formation, ``p**2 / (2 (1 + p))``, unnormalized."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter p must lie in [0, 1], got {p}")
    return SivReport(p * p / (2.0 * (1.0 + p)), Convention.UNNORMALIZED, Method.CLOSED_FORM)


def werner_siv_exact(p: Fraction) -> Fraction:
    """Closed form in exact rational arithmetic."""
    p = Fraction(p)
    return p * p / (2 * (1 + p))


def separability_siv_bound(tol: float = 1e-6) -> float:
    """Closed-form SIV at the Werner PPT threshold."""
    return werner_siv_closed_form(werner_ppt_threshold(tol)).value
