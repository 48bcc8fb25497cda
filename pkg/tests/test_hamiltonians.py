import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import pauli_coefficients, taylor_cos

from scqsim.constants import E_CHARGE, HBAR
from scqsim.core import SIGMA_X, SIGMA_Y, SIGMA_Z
from scqsim.errors import DomainError, TruncationError
from scqsim.hamiltonians import (
    QubitParams,
    annihilation_operator,
    build_approximate,
    build_exact_two_level,
    build_fock,
    build_general,
    cosine_of,
    default_params,
    driven_hamiltonian,
    fock_convergence,
    induced_charge,
    number_phase_operators,
    zero_point_fluctuations,
)

positive_energy = st.floats(min_value=1e-25, max_value=1e-20)


class TestZeroPointFluctuations:
    def test_ratio_two(self):
        n_zpf, phi_zpf = zero_point_fluctuations(1e-23, 2e-23)
        assert phi_zpf == pytest.approx(1.0)
        assert n_zpf == pytest.approx(0.5)

    def test_ratio_thirtytwo(self):
        n_zpf, phi_zpf = zero_point_fluctuations(1e-23, 32e-23)
        assert n_zpf == pytest.approx(1.0)
        assert phi_zpf == pytest.approx(0.5)

    @given(positive_energy, positive_energy)
    def test_product_is_half(self, E_c, E_LJ0):
        n_zpf, phi_zpf = zero_point_fluctuations(E_c, E_LJ0)
        assert n_zpf * phi_zpf == pytest.approx(0.5, abs=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            zero_point_fluctuations(0.0, 1e-23)


class TestQubitParams:
    def test_phi_zpf_supplied_completes_n_zpf(self):
        p = QubitParams("phase", E_c=1e-27, E_J=1e-23, phi_zpf=0.0398)
        n_zpf, phi_zpf = p.zpf()
        assert phi_zpf == 0.0398
        assert n_zpf == pytest.approx(0.5 / 0.0398)

    def test_zpf_needs_some_input(self):
        p = QubitParams("charge", E_c=1e-23, E_J=1e-24)
        with pytest.raises(DomainError):
            p.zpf()

    def test_rejects_negative_energy(self):
        with pytest.raises(DomainError):
            QubitParams("charge", E_c=-1e-23, E_J=1e-24)

    def test_rejects_unknown_kind(self):
        with pytest.raises(DomainError):
            QubitParams("transmon", E_c=1e-23, E_J=1e-24)


class TestApproximate:
    def test_charge_sweet_spot(self):
        p = QubitParams("charge", E_c=1e-22, E_J=1e-24, n_g=0.5)
        H = build_approximate(p)
        assert np.allclose(H.matrix, 0.5 * p.E_J * SIGMA_X)

    def test_charge_reference_coefficients(self):
        p = default_params("charge")
        H = build_approximate(p)
        cx, cy, cz = pauli_coefficients(H.matrix)
        assert cz == pytest.approx(p.E_c * (0.5 - p.n_g), rel=1e-12)
        assert cx == pytest.approx(0.5 * p.E_J, rel=1e-12)
        assert cy == 0.0
        # gate charge n_g = C_g V_g / 2e with V_g = 1 mV
        assert p.n_g == pytest.approx(2.1221, rel=1e-3)
        assert cz == pytest.approx(-1.2247e-22, rel=1e-3)
        assert cx == pytest.approx(6.795e-25, rel=1e-12)

    def test_phase_drive_cancellation(self):
        p = default_params("phase")
        _, phi_zpf = p.zpf()
        I_g = p.E_J * E_CHARGE / (HBAR * phi_zpf)
        H = build_approximate(QubitParams("phase", E_c=p.E_c, E_J=p.E_J,
                                          I_g=I_g, phi_zpf=phi_zpf))
        cx, _, _ = pauli_coefficients(H.matrix)
        assert abs(cx) < 1e-37

    def test_lcjj_is_rejected(self):
        with pytest.raises(DomainError):
            build_approximate(default_params("lcjj"))

    def test_warns_outside_charge_regime(self):
        p = QubitParams("charge", E_c=1e-24, E_J=1e-23, E_LJ0=1e-23)
        with pytest.warns(UserWarning, match="E_c >> E_J"):
            build_approximate(p)


def substitution_oracle(p):
    """Literal matrix substitution n -> n_zpf sy, phi -> phi_zpf sx into the circuit Hamiltonian."""
    n_zpf, phi_zpf = p.zpf()
    n_op = n_zpf * SIGMA_Y
    phi_op = phi_zpf * SIGMA_X
    eye = np.eye(2)
    H = -p.E_J * taylor_cos(phi_op)
    if p.qubit_kind in ("charge", "lcjj"):
        H = H + p.E_c * (n_op - p.n_g * eye) @ (n_op - p.n_g * eye)
    else:
        H = H + p.E_c * n_op @ n_op
    if p.qubit_kind in ("phase", "lcjj"):
        H = H - HBAR / (2 * E_CHARGE) * p.I_g * phi_op
    if p.qubit_kind in ("flux", "lcjj"):
        H = H + 0.5 * p.E_L * (phi_op - p.phi_e * eye) @ (phi_op - p.phi_e * eye)
    return H


class TestExactTwoLevel:
    @pytest.mark.parametrize("kind,drives", [
        ("charge", dict(n_g=2.1)),
        ("phase", dict(I_g=1e-3)),
        ("flux", dict(phi_e=0.5)),
        ("lcjj", dict(n_g=0.7, I_g=1e-6, phi_e=0.2)),
    ])
    def test_matches_substitution_oracle(self, kind, drives):
        p = QubitParams(kind, E_c=7.55e-23, E_J=1.359e-24, E_L=6e-23,
                        C_g=0.68e-15, E_LJ0=1.359e-24, **drives)
        H = build_exact_two_level(p)
        oracle = substitution_oracle(p)
        scale = np.abs(oracle).max()
        assert np.abs(H.matrix - oracle).max() < 1e-12 * scale

    @pytest.mark.parametrize("kind", ["charge", "phase", "flux", "lcjj"])
    def test_zero_drives_freeze_the_state(self, kind):
        p = QubitParams(kind, E_c=7.55e-23, E_J=1.359e-24, E_L=6e-23,
                        C_g=0.68e-15, E_LJ0=1.359e-24)
        H = build_exact_two_level(p)
        assert np.abs(H.traceless()).max() < 1e-30

    def test_charge_drive_is_pure_sigma_y(self):
        p = default_params("charge")
        n_zpf, _ = p.zpf()
        H = build_exact_two_level(p)
        cx, cy, cz = pauli_coefficients(H.matrix)
        assert cx == 0.0 and cz == 0.0
        assert cy == pytest.approx(-2 * p.E_c * p.n_g * n_zpf, rel=1e-12)

    def test_pauli_channel_orthogonality(self):
        # approximate lives in span{sx, sz}; exact two-level drive in span{sy}
        p = default_params("charge")
        H_app = build_approximate(p).matrix
        H_ex = build_exact_two_level(p).matrix
        assert np.trace(SIGMA_Y @ H_app) == 0
        assert np.trace(SIGMA_X @ H_ex) == 0
        assert np.trace(SIGMA_Z @ H_ex) == 0


def fock_oracle(p, n_levels):
    """Direct ladder construction with a series cosine."""
    n_zpf, phi_zpf = p.zpf()
    a = np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    n_op = 1j * n_zpf * (a - ad)
    phi_op = phi_zpf * (a + ad)
    eye = np.eye(n_levels)
    H = -p.E_J * taylor_cos(phi_op, terms=60)
    if p.qubit_kind in ("charge", "lcjj"):
        H = H + p.E_c * (n_op - p.n_g * eye) @ (n_op - p.n_g * eye)
    else:
        H = H + p.E_c * n_op @ n_op
    if p.qubit_kind in ("phase", "lcjj"):
        H = H - HBAR / (2 * E_CHARGE) * p.I_g * phi_op
    if p.qubit_kind in ("flux", "lcjj"):
        H = H + 0.5 * p.E_L * (phi_op - p.phi_e * eye) @ (phi_op - p.phi_e * eye)
    return H


class TestFock:
    def test_matches_direct_construction(self):
        p = default_params("charge")
        H = build_fock(p, 8)
        oracle = fock_oracle(p, 8)
        assert np.abs(H.matrix - oracle).max() < 1e-12 * np.abs(oracle).max()

    @pytest.mark.parametrize("kind", ["charge", "phase", "flux", "lcjj"])
    def test_hermitian(self, kind):
        p = QubitParams(kind, E_c=7.55e-23, E_J=1.359e-24, E_L=6e-23,
                        C_g=0.68e-15, n_g=0.4, I_g=1e-6, phi_e=0.3,
                        E_LJ0=1.359e-24)
        H = build_fock(p, 12).matrix
        assert np.abs(H - H.conj().T).max() < 1e-12 * np.abs(H).max()

    def test_cosine_vacuum_expectation(self):
        # <0|cos(phi)|0> = exp(-phi_zpf^2 / 2) for the oscillator vacuum
        p = default_params("charge")
        _, phi_zpf = p.zpf()
        _, phi_op = number_phase_operators(p, 32)
        c = cosine_of(phi_op)
        assert c[0, 0].real == pytest.approx(np.exp(-phi_zpf**2 / 2), abs=1e-12)
        assert np.abs(c - taylor_cos(phi_op)).max() < 1e-12

    def test_charging_only_hamiltonian(self):
        # E_J = 0, no drives: H = E_c n^2 built on the truncated ladder
        p = QubitParams("charge", E_c=7.55e-23, E_J=0.0, E_LJ0=1.359e-24)
        H = build_fock(p, 4)
        n_zpf, _ = p.zpf()
        a = annihilation_operator(4)
        n_op = 1j * n_zpf * (a - a.conj().T)
        expected = p.E_c * n_op @ n_op
        assert np.abs(H.matrix - expected).max() < 1e-12 * np.abs(expected).max()
        # truncation makes the ground level two-fold degenerate; the vacuum
        # lives almost entirely inside that ground eigenspace
        vals, vecs = np.linalg.eigh(H.matrix)
        ground = np.abs(vals - vals[0]) < 1e-6 * np.abs(vals).max()
        assert (np.abs(vecs[0, ground]) ** 2).sum() > 0.8

    def test_truncation_floor(self):
        with pytest.raises(TruncationError):
            build_fock(default_params("charge"), 3)

    def test_convergence_in_deep_josephson_well(self):
        # single-well regime: the basis must not yet resolve the neighboring
        # cos wells, or near-degenerate well copies pollute the low spectrum
        E_c = 1e-24
        p = QubitParams("charge", E_c=E_c, E_J=200 * E_c, n_g=0.0, E_LJ0=200 * E_c)
        assert fock_convergence(p, 32) < 1e-6

    def test_large_gate_charge_not_converged_at_shallow_truncation(self):
        # the 1 mV gate offsets the charge operator by ~14 zero-point widths,
        # so the two lowest levels are nowhere near converged at N = 4 vs 8
        assert fock_convergence(default_params("charge"), 4) > 1e-2


class TestBuildGeneral:
    def test_zero_drives_freeze(self):
        H = build_general(default_params("lcjj"), 0.0, 0.0, 0.0)
        assert np.abs(H.traceless()).max() < 1e-30

    def test_voltage_drive_coefficient(self):
        p = default_params("lcjj")
        n_zpf, _ = p.zpf()
        H = build_general(p, 1e-6, 0.0, 0.0)
        cx, cy, cz = pauli_coefficients(H.traceless())
        assert cy == pytest.approx(-2 * p.E_c * n_zpf * induced_charge(p.C_g, 1e-6),
                                   rel=1e-12)
        assert cx == 0.0 and cz == 0.0

    def test_current_drive_coefficient(self):
        p = default_params("lcjj")
        _, phi_zpf = p.zpf()
        H = build_general(p, 0.0, 1e-9, 0.0)
        cx, cy, cz = pauli_coefficients(H.traceless())
        assert cx == pytest.approx(-HBAR / (2 * E_CHARGE) * phi_zpf * 1e-9, rel=1e-12)
        assert cy == 0.0 and cz == 0.0

    @pytest.mark.parametrize("slot,args", [
        ("V", (1e-6, 0.0, 0.0)),
        ("I", (0.0, 1e-9, 0.0)),
        ("phi_e", (0.0, 0.0, 0.1)),
    ])
    def test_drive_linearity(self, slot, args):
        p = QubitParams("lcjj", E_c=7.55e-23, E_J=1.359e-24, E_L=6e-23,
                        C_g=0.68e-15, E_LJ0=1.359e-24)
        H0 = build_general(p, 0.0, 0.0, 0.0)
        H1 = build_general(p, *args)
        delta = dict(zip(("V", "I", "phi_e"), args))[slot]
        finite_diff = (H1.traceless() - H0.traceless()) / delta
        assert np.allclose(finite_diff, H1.drive_dependence[slot], rtol=1e-9)

    def test_other_kinds_rejected(self):
        with pytest.raises(DomainError):
            build_general(default_params("charge"), 0.0, 0.0, 0.0)

    def test_fock_variant(self):
        p = default_params("lcjj")
        H = build_general(p, 1e-6, 0.0, 0.0, n_levels=8)
        assert H.matrix.shape == (8, 8)
        assert H.model == "fock"


class TestDrivenHamiltonian:
    def test_matches_static_rebuild(self):
        p = default_params("charge")
        h_of_t = driven_hamiltonian(p, "exact_two_level",
                                    {"V": lambda t: 2e-3 * np.sin(1e11 * t)})
        from dataclasses import replace
        for t in (0.0, 3e-13, 7e-13):
            V = 2e-3 * np.sin(1e11 * t)
            expected = build_exact_two_level(
                replace(p, n_g=induced_charge(p.C_g, V))).traceless()
            assert np.allclose(h_of_t(t), expected, atol=1e-40)

    def test_unknown_slot_rejected(self):
        with pytest.raises(DomainError):
            driven_hamiltonian(default_params("charge"), "exact_two_level",
                               {"I": lambda t: 0.0})
