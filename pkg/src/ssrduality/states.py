"""Named states in the two-level encoding ``|0> = |k, a>``, ``|1> = |kbar, b>``.

Two-copy and frame states use the party slot order
``(A_sys, A_ref, B_sys, B_ref)``; the natural build order
``(A_sys, B_sys, A_ref, B_ref)`` is converted with :data:`BUILD_TO_PARTY`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .matcore import QubitFactorization, basis_ket, permute_slots, projector, tensor

# logical value -> (momentum, species)
ENCODING = {0: ("k", "a"), 1: ("kbar", "b")}

# party slot k takes build slot BUILD_TO_PARTY[k]
BUILD_TO_PARTY = (0, 2, 1, 3)

SQRT_HALF = 1.0 / np.sqrt(2.0)


class Party(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class PartyLayout:
    alice_slots: tuple[int, ...]
    bob_slots: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice_slots", tuple(self.alice_slots))
        object.__setattr__(self, "bob_slots", tuple(self.bob_slots))
        if set(self.alice_slots) & set(self.bob_slots):
            raise ValueError("Alice and Bob slots overlap")

    def slots(self, party: Party) -> tuple[int, ...]:
        return self.alice_slots if Party(party) is Party.ALICE else self.bob_slots

    def check(self, fact: QubitFactorization) -> None:
        covered = sorted(self.alice_slots + self.bob_slots)
        if covered != list(range(fact.num_qubits)):
            raise ValueError(
                f"layout {self} does not cover the {fact.num_qubits} slots exactly"
            )


def pair_layout() -> tuple[QubitFactorization, PartyLayout]:
    """Two slots, Alice on slot 0 and Bob on slot 1."""
    return QubitFactorization(2), PartyLayout((0,), (1,))


def party_layout() -> tuple[QubitFactorization, PartyLayout]:
    """Four slots in party order: Alice = (A_sys, A_ref), Bob = (B_sys, B_ref)."""
    return QubitFactorization(4), PartyLayout((0, 1), (2, 3))


def bell_psi() -> np.ndarray:
    """(|01> + |10>)/sqrt(2) on (A, B)."""
    return SQRT_HALF * (basis_ket("01") + basis_ket("10"))


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter p must lie in [0, 1], got {p}")
    return p


def werner(p: float) -> np.ndarray:
    """Werner frame ``(1-p)/4 * 1 + p |Psi><Psi|`` on (A_ref, B_ref)."""
    p = _check_p(p)
    identity = sum(projector(basis_ket(b)) for b in ("00", "01", "10", "11"))
    return (1.0 - p) / 4.0 * identity + p * projector(bell_psi())


def to_party_order(m) -> np.ndarray:
    """Reorder a 4-slot ket or matrix from build order to party order."""
    return permute_slots(m, QubitFactorization(4), BUILD_TO_PARTY)


def system_with_frame(p: float):
    """System Bell pair together with a Werner reference frame.

    Returns ``(rho, fact, layout)`` with ``rho = |Psi><Psi| (x) werner(p)``
    permuted into party order.
    """
    rho_s = projector(bell_psi())
    rho = to_party_order(tensor(rho_s, werner(p)))
    fact, layout = party_layout()
    return rho, fact, layout


def two_copies() -> np.ndarray:
    """|Psi> (x) |Psi> in party order (A_sys, A_ref, B_sys, B_ref)."""
    return to_party_order(tensor(bell_psi(), bell_psi()))


def hyper_state() -> np.ndarray:
    """Polarization-momentum hyper-entangled state on (pol1, pol2, mom1, mom2).

    H and k are encoded as 0, V and kbar as 1.
    """
    return tensor(bell_psi(), bell_psi())
