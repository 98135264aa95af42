"""Dense complex linear algebra for small multi-qubit matrices.

Matrices are plain ``numpy`` complex arrays. Qubit slots are big-endian:
slot 0 is the most significant bit of a basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

MAX_DIM = 64

STRUCTURE_TOL = 1e-12
SPECTRAL_TOL = 1e-10

# Jacobi stops once the off-diagonal Frobenius mass drops below this,
# measured relative to max(1, ||h||_F).
JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class QubitFactorization:
    """Splits a ``2**num_qubits`` dimensional space into qubit slots."""

    num_qubits: int

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError(f"num_qubits must be positive, got {self.num_qubits}")

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    @classmethod
    def from_dim(cls, dim: int) -> "QubitFactorization":
        n = int(dim).bit_length() - 1
        if dim < 2 or 2**n != dim:
            raise ValueError(f"dimension {dim} is not a power of two")
        return cls(n)

    def bits(self, index: int) -> tuple[int, ...]:
        """Slot values of basis state ``index``, slot 0 first."""
        n = self.num_qubits
        return tuple((index >> (n - 1 - s)) & 1 for s in range(n))

    def check_slots(self, slots: Iterable[int]) -> tuple[int, ...]:
        slots = tuple(sorted(set(int(s) for s in slots)))
        for s in slots:
            if not 0 <= s < self.num_qubits:
                raise ValueError(
                    f"slot {s} out of range for {self.num_qubits} qubits"
                )
        return slots

    def check_matrix(self, m: np.ndarray) -> None:
        if m.shape != (self.dim, self.dim):
            raise ValueError(
                f"matrix of shape {m.shape} does not match {self.num_qubits} qubits"
            )


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def ket(amplitudes) -> np.ndarray:
    """Normalized state vector; raises if the input is not normalized."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > STRUCTURE_TOL:
        raise ValueError(f"ket is not normalized (norm^2 = {norm!r})")
    return psi


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis ket from a bit string, e.g. ``basis_ket("0110")``."""
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def tensor(a, b) -> np.ndarray:
    """Kronecker product with index ``i_a * dim(b) + i_b``.

    Works on matrices and on kets alike.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise ValueError(
            f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def permute_slots(m, fact: QubitFactorization, order) -> np.ndarray:
    """Reorder qubit slots of a ket or matrix.

    Slot ``k`` of the result is slot ``order[k]`` of the input, so
    ``permute_slots(psi, fact, (0, 2, 1, 3))`` swaps the middle two qubits.
    """
    m = np.asarray(m, dtype=complex)
    n = fact.num_qubits
    order = tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of {n} slots")
    if m.ndim == 1:
        if m.shape != (fact.dim,):
            raise ValueError(f"ket of length {m.shape[0]} does not match {n} qubits")
        return m.reshape((2,) * n).transpose(order).reshape(fact.dim)
    fact.check_matrix(m)
    axes = order + tuple(n + k for k in order)
    return m.reshape((2,) * (2 * n)).transpose(axes).reshape(fact.dim, fact.dim)


def partial_transpose(rho, fact: QubitFactorization, slots) -> np.ndarray:
    """Swap bra and ket indices of the given slots."""
    rho = as_matrix(rho)
    fact.check_matrix(rho)
    slots = fact.check_slots(slots)
    n = fact.num_qubits
    axes = list(range(2 * n))
    for s in slots:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    t = rho.reshape((2,) * (2 * n)).transpose(axes)
    return t.reshape(fact.dim, fact.dim)


def partial_trace(rho, fact: QubitFactorization, slots) -> np.ndarray:
    """Trace out the given slots; the kept slots stay in their original order.

    Tracing every slot returns the 1x1 matrix ``[[tr(rho)]]``.
    """
    rho = as_matrix(rho)
    fact.check_matrix(rho)
    slots = fact.check_slots(slots)
    n = fact.num_qubits
    t = rho.reshape((2,) * (2 * n))
    # trace from the highest slot down so lower axis numbers stay valid
    remaining = n
    for s in sorted(slots, reverse=True):
        t = np.trace(t, axis1=s, axis2=s + remaining)
        remaining -= 1
    d = 2**remaining
    return t.reshape(d, d)


def is_hermitian(h, tol: float = STRUCTURE_TOL) -> bool:
    h = np.asarray(h)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol)


def _round_robin_pairs(n: int):
    """Disjoint index pairs per round; every pair appears once per sweep."""
    players = list(range(n)) + ([None] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a is not None and b is not None:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eigen(h, tol: float = SPECTRAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, Q)`` with ``w`` ascending and the eigenvectors in the columns
    of ``Q``, so that ``h = Q diag(w) Q^dagger``. Pairs are swept in
    round-robin order, so each round applies disjoint rotations at once.
    Order inside a degenerate cluster is unspecified.
    """
    a = as_matrix(h).copy()
    if not is_hermitian(a, tol):
        raise ValueError("hermitian_eigen needs a Hermitian matrix")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    q = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.diagonal().copy(), q

    scale = max(1.0, np.linalg.norm(a))
    rounds = _round_robin_pairs(n)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off < JACOBI_OFF_TOL * scale:
            break
        for pairs in rounds:
            g = np.eye(n, dtype=complex)
            for p, r in pairs:
                apr = a[p, r]
                mag = abs(apr)
                if mag < 1e-300:
                    continue
                phase = apr / mag
                theta = (a[r, r].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # diag(1, conj(phase)) makes the pair block real, then a real rotation
                g[p, p] = c
                g[p, r] = s
                g[r, p] = -s * phase.conjugate()
                g[r, r] = c * phase.conjugate()
            a = g.conj().T @ a @ g
            q = q @ g
    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order].copy(), q[:, order]


def eigvalsh(h) -> np.ndarray:
    return hermitian_eigen(h)[0]


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(m))))


def validate_density(rho, tol: float = STRUCTURE_TOL) -> np.ndarray:
    """Return ``rho`` as an array, raising ``ValueError`` unless it is a state."""
    rho = as_matrix(rho)
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix has trace {tr!r}")
    lo = eigvalsh(rho)[0]
    if lo < -SPECTRAL_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
    return rho


def is_density_matrix(rho, tol: float = STRUCTURE_TOL) -> bool:
    try:
        validate_density(rho, tol)
    except ValueError:
        return False
    return True


def _fmt_real(x: float) -> str:
    return f"{x + 0.0:.17g}"


def format_entry(z: complex) -> str:
    return f"{_fmt_real(z.real)}{'+' if z.imag + 0.0 >= 0 else '-'}{_fmt_real(abs(z.imag))}j"


def dump_matrix(m) -> str:
    """Plain-text dump, one row per line, entries as ``re+imj``."""
    m = np.asarray(m, dtype=complex)
    return "\n".join(" ".join(format_entry(z) for z in row) for row in m)
