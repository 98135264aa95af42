import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssrduality.matcore import (
    basis_ket,
    eigvalsh,
    partial_transpose,
    projector,
)
from ssrduality.ssr import (
    NEUTRAL,
    ChargeAssignment,
    UntwirledStateError,
    is_ssr_pure,
    local_charge_operator,
    sectors,
    twirl,
)
from ssrduality.states import (
    Party,
    bell_psi,
    pair_layout,
    party_layout,
    system_with_frame,
    to_party_order,
    two_copies,
)

from helpers import random_density

CHARGES = ChargeAssignment()


def twirl_by_phase_average(rho, fact, layout, charges):
    """Average over local U(1) rotations exp(i (a N_A + b N_B)).

    A uniform K-point grid with K above the largest charge difference
    integrates the phases exactly.
    """
    n_a = np.diag(local_charge_operator(fact, layout, Party.ALICE, charges)).real
    n_b = np.diag(local_charge_operator(fact, layout, Party.BOB, charges)).real
    k = fact.num_qubits + 1
    out = np.zeros_like(rho)
    for a, b in itertools.product(range(k), repeat=2):
        u = np.exp(2j * np.pi * (a * n_a + b * n_b) / k)
        out += (u[:, None] * rho * u.conj()[None, :]) / k**2
    return out


class TestLocalChargeOperator:
    def test_pair(self):
        fact, layout = pair_layout()
        n_a = local_charge_operator(fact, layout, Party.ALICE, CHARGES)
        assert np.array_equal(n_a, np.diag([1, 1, 0, 0]))

    def test_party_layout_values(self):
        fact, layout = party_layout()
        n_a = np.diag(local_charge_operator(fact, layout, Party.ALICE, CHARGES)).real
        assert set(n_a) == {0, 1, 2}
        for i in range(16):
            a_sys, a_ref = fact.bits(i)[:2]
            assert n_a[i] == (a_sys == 0) + (a_ref == 0)

    def test_complementarity(self):
        fact, layout = party_layout()
        total = local_charge_operator(fact, layout, Party.ALICE, CHARGES) + local_charge_operator(
            fact, layout, Party.BOB, CHARGES
        )
        expected = [bin(i ^ 0b1111).count("1") for i in range(16)]
        assert np.array_equal(np.diag(total).real, expected)
        assert np.count_nonzero(total - np.diag(np.diag(total))) == 0

    def test_neutral_slots(self):
        fact, layout = party_layout()
        charges = ChargeAssignment(slots={1, 3})
        n_a = np.diag(local_charge_operator(fact, layout, Party.ALICE, charges)).real
        assert all(n_a[i] == (fact.bits(i)[1] == 0) for i in range(16))

    def test_rejects_bad_charges(self):
        with pytest.raises(ValueError):
            ChargeAssignment(per_value=(1, -1))


class TestTwirl:
    def test_two_copies_effective_state(self):
        fact, layout = party_layout()
        eff = twirl(projector(two_copies()), fact, layout, CHARGES)
        expected = np.zeros((16, 16))
        for a in ("0011", "1100", "0110", "1001"):
            expected[int(a, 2), int(a, 2)] = 0.25
        expected[int("0110", 2), int("1001", 2)] = 0.25
        expected[int("1001", 2), int("0110", 2)] = 0.25
        assert np.allclose(eff, expected, atol=1e-15)
        assert np.count_nonzero(np.abs(eff) > 1e-15) == 6

    def test_diagonal_unchanged(self):
        fact, layout = party_layout()
        d = np.diag(np.random.default_rng(0).random(16))
        assert np.array_equal(twirl(d, fact, layout, CHARGES), d)

    def test_single_copy_is_operationally_mixed(self):
        fact, layout = pair_layout()
        eff = twirl(projector(bell_psi()), fact, layout, CHARGES)
        expected = (projector(basis_ket("01")) + projector(basis_ket("10"))) / 2
        assert np.allclose(eff, expected, atol=1e-15)

    def test_matches_phase_average(self):
        fact, layout = party_layout()
        rho = random_density(np.random.default_rng(8), 16)
        assert np.allclose(
            twirl(rho, fact, layout, CHARGES), twirl_by_phase_average(rho, fact, layout, CHARGES), atol=1e-14
        )

    def test_neutral_charges_do_nothing(self):
        fact, layout = party_layout()
        rho = random_density(np.random.default_rng(9), 16)
        assert np.array_equal(twirl(rho, fact, layout, NEUTRAL), rho)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_channel_properties(self, seed):
        fact, layout = party_layout()
        rho = random_density(np.random.default_rng(seed), 16)
        eff = twirl(rho, fact, layout, CHARGES)
        assert np.array_equal(twirl(eff, fact, layout, CHARGES), eff)
        assert abs(np.trace(eff) - 1) < 1e-12
        assert np.allclose(eff, eff.conj().T, atol=1e-15)
        assert eigvalsh(eff)[0] >= -1e-12

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_commutes_with_bob_transpose(self, seed):
        fact, layout = party_layout()
        rho = random_density(np.random.default_rng(seed), 16)
        a = partial_transpose(twirl(rho, fact, layout, CHARGES), fact, layout.bob_slots)
        b = twirl(partial_transpose(rho, fact, layout.bob_slots), fact, layout, CHARGES)
        assert np.max(np.abs(a - b)) <= 1e-12

    def test_fixed_point_iff_sector_coherence_only(self):
        fact, layout = party_layout()
        eff = twirl(random_density(np.random.default_rng(1), 16), fact, layout, CHARGES)
        assert np.array_equal(twirl(eff, fact, layout, CHARGES), eff)
        rho = random_density(np.random.default_rng(1), 16)
        assert not np.allclose(twirl(rho, fact, layout, CHARGES), rho)

    @pytest.mark.parametrize("p", [0.0, 0.2, 0.6, 1.0])
    def test_white_noise_term_becomes_diagonal(self, p):
        fact, layout = party_layout()
        noise = (1 - p) / 4 * to_party_order(np.kron(projector(bell_psi()), np.eye(4)))
        eff = twirl(noise, fact, layout, CHARGES)
        assert np.count_nonzero(eff - np.diag(np.diag(eff))) == 0
        rho, _, _ = system_with_frame(p)
        signal = p * projector(two_copies())
        assert np.allclose(twirl(rho, fact, layout, CHARGES), eff + twirl(signal, fact, layout, CHARGES), atol=1e-15)


class TestSectors:
    def test_frame_block(self):
        p = 0.4
        rho, fact, layout = system_with_frame(p)
        dec = sectors(twirl(rho, fact, layout, CHARGES), fact, layout, CHARGES)
        sec = dec.find((1, 1))
        i, j = sec.indices.index(int("0110", 2)), sec.indices.index(int("1001", 2))
        assert abs(sec.block[i, j] - p / 4) < 1e-15
        assert abs(sec.block[j, i] - p / 4) < 1e-15

    def test_maximally_mixed(self):
        fact, layout = party_layout()
        dec = sectors(np.eye(16) / 16, fact, layout, CHARGES)
        for sec in dec:
            assert np.count_nonzero(sec.block - np.diag(np.diag(sec.block))) == 0

    def test_partition_and_reassembly(self):
        fact, layout = party_layout()
        eff = twirl(random_density(np.random.default_rng(2), 16), fact, layout, CHARGES)
        dec = sectors(eff, fact, layout, CHARGES)
        assert sum(sec.dim for sec in dec) == 16
        assert sorted(i for sec in dec for i in sec.indices) == list(range(16))
        assert np.array_equal(dec.reassemble(), eff)

    def test_untwirled_rejected(self):
        fact, layout = pair_layout()
        with pytest.raises(UntwirledStateError):
            sectors(projector(bell_psi()), fact, layout, CHARGES)


class TestIsSsrPure:
    def test_bell(self):
        assert is_ssr_pure(bell_psi(), CHARGES)

    def test_mixed_charges(self):
        phi = (basis_ket("00") + basis_ket("11")) / np.sqrt(2)
        assert not is_ssr_pure(phi, CHARGES)

    def test_basis_state(self):
        assert is_ssr_pure(basis_ket("00"), CHARGES)

    def test_two_copies_has_fixed_global_charge(self):
        # local counts vary between terms, the global count is always 2
        assert is_ssr_pure(two_copies(), CHARGES)
