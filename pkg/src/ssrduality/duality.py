"""Two photons in polarization and momentum, labeled by either degree of freedom.

Amplitude tables are indexed ``[pol1, mom1, pol2, mom2]`` with ``H = k = 0``
and ``V = kbar = 1``. For distinguishable states particle 1 is species a
and particle 2 is species b.

Relabeling by one degree of freedom makes its value the party: Alice holds
the particle with ``k`` (or ``H``), Bob the one with ``kbar`` (or ``V``).
Each party keeps the other degree of freedom and, for distinguishable
particles, a species register (a = 0, b = 1) that carries the
superselection charge.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .entanglement import ENTANGLED_TOL, ppt_report
from .matcore import STRUCTURE_TOL, QubitFactorization, projector
from .ssr import NEUTRAL, ChargeAssignment, twirl
from .states import PartyLayout

H, V = 0, 1
K, KBAR = 0, 1


class LabelCollisionError(ValueError):
    """Both particles share the value of the labeling degree of freedom."""


class Statistics(str, enum.Enum):
    BOSONIC = "bosonic"
    DISTINGUISHABLE = "distinguishable"


class LabelDoF(str, enum.Enum):
    MOMENTUM = "momentum"
    POLARIZATION = "polarization"


@dataclass(frozen=True)
class TwoParticleState:
    statistics: Statistics
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(2, 2, 2, 2)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > STRUCTURE_TOL:
            raise ValueError(f"two-particle state is not normalized ({norm!r})")
        if self.statistics is Statistics.BOSONIC and not self.exchange_symmetric():
            raise ValueError("bosonic amplitudes must be exchange symmetric")

    @property
    def species(self):
        if self.statistics is Statistics.DISTINGUISHABLE:
            return ("a", "b")
        return None

    def exchange_symmetric(self, tol: float = STRUCTURE_TOL) -> bool:
        swapped = self.amplitudes.transpose(2, 3, 0, 1)
        return bool(np.max(np.abs(self.amplitudes - swapped)) <= tol)

    def terms(self):
        """Nonzero ``((pol1, mom1, pol2, mom2), amplitude)`` pairs."""
        for idx in itertools.product((0, 1), repeat=4):
            amp = self.amplitudes[idx]
            if abs(amp) > STRUCTURE_TOL:
                yield idx, amp

    def hyper_ket(self) -> np.ndarray:
        """Amplitudes as a ket on slots (pol1, pol2, mom1, mom2)."""
        return self.amplitudes.transpose(0, 2, 1, 3).reshape(16)


def _state(statistics, entries) -> TwoParticleState:
    amps = np.zeros((2, 2, 2, 2), dtype=complex)
    for idx, amp in entries.items():
        amps[idx] = amp
    return TwoParticleState(statistics, amps)


def pdc_bosonic() -> TwoParticleState:
    """Down-converted photon pair in first-quantized, symmetrized form."""
    return _state(
        Statistics.BOSONIC,
        {
            (H, K, V, KBAR): 0.5,
            (V, K, H, KBAR): 0.5,
            (H, KBAR, V, K): 0.5,
            (V, KBAR, H, K): 0.5,
        },
    )


def pdc_distinguishable() -> TwoParticleState:
    """Same pair with an a-particle at ``k`` and a b-particle at ``kbar``."""
    s = 1.0 / np.sqrt(2.0)
    return _state(Statistics.DISTINGUISHABLE, {(H, K, V, KBAR): s, (V, K, H, KBAR): s})


def symmetrized_distinguishable() -> TwoParticleState:
    """Distinguishable pair with the exchanged momentum branch added."""
    return _state(
        Statistics.DISTINGUISHABLE,
        {
            (H, K, V, KBAR): 0.5,
            (V, K, H, KBAR): 0.5,
            (V, KBAR, H, K): 0.5,
            (H, KBAR, V, K): 0.5,
        },
    )


@dataclass(frozen=True)
class LabeledBipartiteState:
    """A relabeled pair as a bipartite state on qubit slots.

    ``slot_names`` documents each slot, e.g. ``("A_pol", "A_species", ...)``.
    Only species slots carry charge in ``charges``.
    """

    label_dof: LabelDoF
    rho: np.ndarray = field(repr=False)
    fact: QubitFactorization
    layout: PartyLayout
    charges: ChargeAssignment
    slot_names: tuple[str, ...]

    def twirled(self) -> np.ndarray:
        return twirl(self.rho, self.fact, self.layout, self.charges)

    def ppt(self):
        """PPT report of the effective (twirled) state."""
        return ppt_report(self.twirled(), self.fact, self.layout, self.charges)


def relabel(state: TwoParticleState, label_dof) -> LabeledBipartiteState:
    label_dof = LabelDoF(label_dof)
    # position inside (pol, mom) of the label and of the kept degree of freedom
    lab, other = (1, 0) if label_dof is LabelDoF.MOMENTUM else (0, 1)
    other_name = "mom" if label_dof is LabelDoF.POLARIZATION else "pol"
    bosonic = state.statistics is Statistics.BOSONIC

    if bosonic:
        fact = QubitFactorization(2)
        layout = PartyLayout((0,), (1,))
        charges = NEUTRAL
        names = (f"A_{other_name}", f"B_{other_name}")
    else:
        fact = QubitFactorization(4)
        layout = PartyLayout((0, 1), (2, 3))
        charges = ChargeAssignment(slots=frozenset({1, 3}))
        names = (f"A_{other_name}", "A_species", f"B_{other_name}", "B_species")

    psi = np.zeros(fact.dim, dtype=complex)
    for (p1, m1, p2, m2), amp in state.terms():
        dof1, dof2 = (p1, m1), (p2, m2)
        if dof1[lab] == dof2[lab]:
            raise LabelCollisionError(
                f"both particles carry {label_dof.value} value {dof1[lab]}"
            )
        if bosonic:
            # the exchanged term describes the same configuration
            if dof1[lab] != 0:
                continue
            psi[2 * dof1[other] + dof2[other]] += amp
            continue
        # (value, species) for the particle at Alice and at Bob
        parts = [(dof1[other], 0), (dof2[other], 1)]
        if dof1[lab] == 1:
            parts.reverse()
        (oa, sa), (ob, sb) = parts
        psi[8 * oa + 4 * sa + 2 * ob + sb] += amp
    psi /= np.linalg.norm(psi)
    return LabeledBipartiteState(label_dof, projector(psi), fact, layout, charges, names)


def encode_species(labeled: LabeledBipartiteState) -> LabeledBipartiteState:
    """Merge each party's momentum and species slots into one qubit.

    Valid when every occupied configuration is ``(k, a)`` or ``(kbar, b)``,
    which then read as logical 0 and 1. The merged slots carry charge.
    """
    if labeled.label_dof is not LabelDoF.POLARIZATION or labeled.fact.num_qubits != 4:
        raise ValueError("only polarization-labeled distinguishable states can be encoded")
    diag = np.abs(np.diagonal(labeled.rho))
    keep = []
    for i in range(16):
        ma, sa, mb, sb = labeled.fact.bits(i)
        if ma == sa and mb == sb:
            keep.append(i)
        elif diag[i] > STRUCTURE_TOL:
            raise ValueError("momentum and species are not correlated as |k,a>, |kbar,b>")
    ix = np.array(keep)
    rho = labeled.rho[np.ix_(ix, ix)]
    return LabeledBipartiteState(
        labeled.label_dof,
        rho,
        QubitFactorization(2),
        PartyLayout((0,), (1,)),
        ChargeAssignment(),
        ("A_enc", "B_enc"),
    )


@dataclass(frozen=True)
class DualityResult:
    momentum_negativity: float
    polarization_negativity: float

    @property
    def passes(self) -> bool:
        return min(self.momentum_negativity, self.polarization_negativity) > ENTANGLED_TOL


def duality_test(state: TwoParticleState) -> DualityResult:
    """Effective negativity under both labelings."""
    return DualityResult(
        relabel(state, LabelDoF.MOMENTUM).ppt().negativity,
        relabel(state, LabelDoF.POLARIZATION).ppt().negativity,
    )
