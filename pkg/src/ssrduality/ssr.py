"""Particle-type superselection: local charges, twirling and charge sectors.

The tracked charge is the number of type-a particles. A charged slot holding
logical 0 carries one ``a``; logical 1 carries a ``b`` and no a-charge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .matcore import STRUCTURE_TOL, QubitFactorization, as_matrix
from .states import Party, PartyLayout


class UntwirledStateError(ValueError):
    """Raised when a sector decomposition is requested for a state with
    coherence between different local-charge sectors."""


@dataclass(frozen=True)
class ChargeAssignment:
    """Type-a count per slot value.

    ``slots`` restricts which slots carry a species register. ``None``
    means every slot does; slots left out (polarization, bare momentum)
    are neutral.
    """

    per_value: tuple[int, int] = (1, 0)
    slots: Optional[frozenset] = None

    def __post_init__(self):
        if any(int(q) != q or q < 0 for q in self.per_value):
            raise ValueError(f"charges must be nonnegative integers: {self.per_value}")
        if self.slots is not None:
            object.__setattr__(self, "slots", frozenset(self.slots))

    def is_charged(self, slot: int) -> bool:
        return self.slots is None or slot in self.slots

    def slot_charge(self, slot: int, value: int) -> int:
        return self.per_value[value] if self.is_charged(slot) else 0

    def charges(self, fact: QubitFactorization, slots) -> np.ndarray:
        """Summed charge over ``slots`` for every basis index."""
        out = np.zeros(fact.dim, dtype=int)
        n = fact.num_qubits
        idx = np.arange(fact.dim)
        for s in slots:
            bit = (idx >> (n - 1 - s)) & 1
            if self.is_charged(s):
                out += np.where(bit == 0, self.per_value[0], self.per_value[1])
        return out

    def global_charges(self, fact: QubitFactorization) -> np.ndarray:
        return self.charges(fact, range(fact.num_qubits))


NEUTRAL = ChargeAssignment(slots=frozenset())


def local_charges(fact, layout: PartyLayout, party, charges: ChargeAssignment):
    return charges.charges(fact, layout.slots(party))


def local_charge_operator(
    fact: QubitFactorization, layout: PartyLayout, party, charges: ChargeAssignment
) -> np.ndarray:
    """Diagonal operator counting type-a particles held by ``party``."""
    layout.check(fact)
    return np.diag(local_charges(fact, layout, party, charges).astype(complex))


def _sector_labels(fact, layout, charges):
    qa = local_charges(fact, layout, Party.ALICE, charges)
    qb = local_charges(fact, layout, Party.BOB, charges)
    return qa, qb


def allowed_mask(fact, layout, charges) -> np.ndarray:
    """Boolean mask of density-matrix entries that survive the twirl."""
    qa, qb = _sector_labels(fact, layout, charges)
    return (qa[:, None] == qa[None, :]) & (qb[:, None] == qb[None, :])


def twirl(rho, fact: QubitFactorization, layout: PartyLayout, charges: ChargeAssignment):
    """Effective state under local superselection.

    Keeps ``<i|rho|j>`` only when Alice's and Bob's local charges agree
    between ``i`` and ``j``.
    """
    rho = as_matrix(rho)
    fact.check_matrix(rho)
    layout.check(fact)
    return np.where(allowed_mask(fact, layout, charges), rho, 0.0)


@dataclass(frozen=True)
class Sector:
    charges: tuple[int, int]
    indices: tuple[int, ...]
    block: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SectorDecomposition:
    dim: int
    sectors: tuple[Sector, ...]

    def reassemble(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for sec in self.sectors:
            ix = np.array(sec.indices)
            out[np.ix_(ix, ix)] = sec.block
        return out

    def __iter__(self):
        return iter(self.sectors)

    def __len__(self):
        return len(self.sectors)

    def find(self, charges: tuple[int, int]) -> Sector:
        for sec in self.sectors:
            if sec.charges == tuple(charges):
                return sec
        raise KeyError(charges)


def sectors(rho, fact, layout, charges, tol: float = STRUCTURE_TOL) -> SectorDecomposition:
    """Split an already twirled matrix into its (q_Alice, q_Bob) blocks."""
    rho = as_matrix(rho)
    fact.check_matrix(rho)
    layout.check(fact)
    mask = allowed_mask(fact, layout, charges)
    leak = np.max(np.abs(np.where(mask, 0.0, rho)), initial=0.0)
    if leak > tol:
        raise UntwirledStateError(
            f"matrix has cross-sector coherence {leak:.3g}; twirl it first"
        )
    qa, qb = _sector_labels(fact, layout, charges)
    out = []
    for key in sorted(set(zip(qa.tolist(), qb.tolist()))):
        ix = np.flatnonzero((qa == key[0]) & (qb == key[1]))
        out.append(Sector(key, tuple(ix.tolist()), rho[np.ix_(ix, ix)].copy()))
    return SectorDecomposition(rho.shape[0], tuple(out))


def is_ssr_pure(psi, charges: ChargeAssignment = ChargeAssignment(), tol: float = STRUCTURE_TOL) -> bool:
    """True when every nonzero amplitude has the same global type-a count."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    fact = QubitFactorization.from_dim(psi.shape[0])
    q = charges.global_charges(fact)[np.abs(psi) > tol]
    return bool(np.unique(q).size <= 1)
