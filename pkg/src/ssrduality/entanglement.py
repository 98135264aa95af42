"""Peres-Horodecki certification on (twirled) density matrices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .matcore import (
    SPECTRAL_TOL,
    STRUCTURE_TOL,
    QubitFactorization,
    hermitian_eigen,
    partial_transpose,
    validate_density,
)
from .ssr import ChargeAssignment, allowed_mask, local_charges, twirl
from .states import Party, PartyLayout, pair_layout, system_with_frame, werner

ENTANGLED_TOL = SPECTRAL_TOL


class NotOperationalWarning(UserWarning):
    """PPT evaluated on a state that still holds coherence forbidden by the
    superselection rule."""


@dataclass(frozen=True)
class BlockOrigin:
    """Irreducible block of the partial transpose holding the lowest eigenvalue."""

    indices: tuple[int, ...]
    charges: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class PptReport:
    min_eigenvalue: float
    negativity: float
    entangled: bool
    block_origin: Optional[BlockOrigin] = None


def irreducible_blocks(m, tol: float = STRUCTURE_TOL) -> list[tuple[int, ...]]:
    """Connected components of the nonzero pattern of ``m``."""
    m = np.asarray(m)
    linked = np.abs(m) > tol
    linked = linked | linked.T
    n = m.shape[0]
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(linked[i] & ~seen):
                seen[j] = True
                stack.append(int(j))
        blocks.append(tuple(sorted(comp)))
    return blocks


def ppt_report(
    rho,
    fact: QubitFactorization,
    layout: PartyLayout,
    charges: Optional[ChargeAssignment] = None,
) -> PptReport:
    """Partial transpose over Bob's slots and read off its spectrum.

    With ``charges`` the report also names the local-charge sector of the
    negative block, and warns if ``rho`` was not twirled first.
    """
    rho = validate_density(rho)
    fact.check_matrix(rho)
    layout.check(fact)
    if charges is not None:
        mask = allowed_mask(fact, layout, charges)
        if np.max(np.abs(np.where(mask, 0.0, rho)), initial=0.0) > STRUCTURE_TOL:
            warnings.warn(
                "PPT on an untwirled state is not operationally meaningful under SSR",
                NotOperationalWarning,
                stacklevel=2,
            )
    pt = partial_transpose(rho, fact, layout.bob_slots)
    w = hermitian_eigen(pt)[0]
    lo = float(w[0])
    neg = max(0.0, (float(np.sum(np.abs(w))) - 1.0) / 2.0)

    best_val, best_block = np.inf, None
    for block in irreducible_blocks(pt):
        ix = np.array(block)
        val = hermitian_eigen(pt[np.ix_(ix, ix)])[0][0]
        if val < best_val - STRUCTURE_TOL:
            best_val, best_block = val, block
    sector = None
    if charges is not None:
        i = best_block[0]
        sector = (
            int(local_charges(fact, layout, Party.ALICE, charges)[i]),
            int(local_charges(fact, layout, Party.BOB, charges)[i]),
        )
    return PptReport(
        min_eigenvalue=lo,
        negativity=neg,
        entangled=lo < -ENTANGLED_TOL,
        block_origin=BlockOrigin(best_block, sector),
    )


def negativity(rho, fact, layout) -> float:
    return ppt_report(rho, fact, layout).negativity


def werner_min_pt_eigenvalue(p: float) -> float:
    fact, layout = pair_layout()
    return ppt_report(werner(p), fact, layout).min_eigenvalue


def werner_ppt_threshold(tol: float = 1e-6) -> float:
    """Bisect for the p where the Werner frame stops being PPT."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if werner_min_pt_eigenvalue(mid) < 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def twirled_frame_state(p: float):
    """Twirled system-plus-frame state with its factorization and layout."""
    rho, fact, layout = system_with_frame(p)
    return twirl(rho, fact, layout, ChargeAssignment()), fact, layout


class DualityCertificate(NamedTuple):
    frame_separable: bool
    dual_entangled: bool


def duality_certificate(p: float) -> DualityCertificate:
    """Is the Werner frame separable, and is the twirled total state entangled?"""
    fact, layout = pair_layout()
    frame = ppt_report(werner(p), fact, layout)
    eff, fact4, layout4 = twirled_frame_state(p)
    total = ppt_report(eff, fact4, layout4, ChargeAssignment())
    return DualityCertificate(not frame.entangled, total.entangled)
