import itertools

import numpy as np
import pytest

from pcrsynth import gate_logic as gl
from pcrsynth.enums import TargetName
from pcrsynth.exceptions import ConfigurationError


def _fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2


class TestIdealGates:
    def test_ccnot_truth_table(self):
        U = gl.ccnot_unitary()
        for q1, q2, q3 in itertools.product((0, 1), repeat=3):
            out = U @ gl.basis_state([q1, q2, q3])
            expected = gl.basis_state([q1, q2, q3 ^ (q1 & q2)])
            assert np.allclose(out, expected)

    def test_itoffoli_truth_table(self):
        U = gl.itoffoli_unitary()
        for q1, q2, q3 in itertools.product((0, 1), repeat=3):
            out = U @ gl.basis_state([q1, q2, q3])
            if q1 and q2:
                assert np.allclose(out, -1j * gl.basis_state([q1, q2, 1 - q3]))
            else:
                assert np.allclose(out, gl.basis_state([q1, q2, q3]))

    def test_hamiltonians_generate_the_gates(self):
        assert np.allclose(gl.ideal_unitary(gl.ccnot_hamiltonian()), gl.ccnot_unitary(), atol=1e-12)
        assert np.allclose(gl.ideal_unitary(gl.itoffoli_hamiltonian()), gl.itoffoli_unitary(), atol=1e-12)
        assert np.allclose(gl.ideal_unitary(gl.czz_hamiltonian()), gl.czz_unitary(), atol=1e-12)

    def test_ccnot_projector_form(self):
        assert np.allclose(gl.ccnot_hamiltonian(), gl.ccnot_projector_form())

    def test_m_coefficient(self):
        for q1, q2 in itertools.product((0, 1), repeat=2):
            assert gl.m_coefficient(q1, q2) == 4 * q1 * q2

    def test_czz_phases(self):
        U = gl.czz_unitary()
        assert np.allclose(np.diag(np.diag(U)), U)
        phases = np.diag(U)
        assert np.allclose(phases[:4], 1)
        # q1 = 1: +pi/2 for even parity of (q2, q3), -pi/2 for odd
        assert phases[0b100] == pytest.approx(1j)
        assert phases[0b111] == pytest.approx(1j)
        assert phases[0b101] == pytest.approx(-1j)
        assert phases[0b110] == pytest.approx(-1j)

    def test_czz_decomposition(self):
        assert gl.global_phase_distance(gl.czz_decomposition(), gl.czz_unitary()) < 1e-12

    def test_parity_check_is_two_cz(self):
        cz = np.diag([1, 1, 1, -1]).astype(complex)
        cz12 = np.kron(cz, np.eye(2))
        # CZ between qubit 1 and 3
        cz13 = np.diag([1, 1, 1, 1, 1, -1, 1, -1]).astype(complex)
        assert np.allclose(gl.parity_check_unitary(), cz12 @ cz13)

    def test_global_phase_distance(self):
        U = gl.ccnot_unitary()
        assert gl.global_phase_distance(np.exp(0.7j) * U, U) < 1e-12
        assert gl.global_phase_distance(gl.itoffoli_unitary(), U) > 0.5

    def test_on_qubit(self):
        X1 = gl.on_qubit(gl.X_GATE, 1)
        assert np.allclose(X1 @ gl.basis_state([0, 1, 1]), gl.basis_state([1, 1, 1]))
        with pytest.raises(ConfigurationError):
            gl.on_qubit(gl.X_GATE, 4)

    def test_rotations(self):
        assert np.allclose(gl.u_zzx(np.pi), -1j * gl.pauli_word("ZZX"))
        assert np.allclose(gl.rz(np.pi / 2) @ gl.rz(-np.pi / 2), np.eye(2))


class TestSequences:
    def test_ghz_sequence(self):
        psi = gl.ghz_sequence() @ gl.basis_state([0, 0, 0])
        assert _fidelity(psi, gl.ghz_state()) == pytest.approx(1.0)

    def test_bell_sequence(self):
        psi = gl.bell_sequence() @ gl.basis_state([0, 0])
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert _fidelity(psi, bell) == pytest.approx(1.0)

    def test_static_drift_and_correction(self):
        state, theta = gl.static_ghz_drift(0.1e6, (0.02e6, 0.03e6, 0.01e6), 200e-9)
        assert theta == pytest.approx(2 * np.pi * 0.1e6 * 200e-9)
        assert _fidelity(state, gl.ghz_state()) == pytest.approx(np.cos(theta) ** 2)
        for qubit in (1, 2, 3):
            fixed = gl.drift_correction(theta, qubit) @ state
            assert _fidelity(fixed, gl.ghz_state()) == pytest.approx(1.0)

    def test_two_body_terms_alone_do_not_drift(self):
        state, theta = gl.static_ghz_drift(0.0, (0.2e6, -0.1e6, 0.05e6), 1e-6)
        assert theta == 0
        assert _fidelity(state, gl.ghz_state()) == pytest.approx(1.0)


class TestTargets:
    def test_default_presets(self):
        for name in TargetName:
            target = gl.target_preset(name)
            assert target.name is name
            assert target.anchor == "ZZX"
            assert target.ideal_pattern()["ZZX"] == gl.ALPHA_OPT_HZ
            assert target.signs_consistent(target.ideal_pattern())

    def test_ghz_exclusive(self):
        target = gl.target_preset("ghz")
        assert target.ideal_pattern() == {"ZZX": 0.5e6}
        assert len(target.unwanted) == 14
        assert target.theta == pytest.approx(np.pi / 2)

    def test_itoffoli_patterns(self):
        hamiltonian = gl.target_preset("iToffoli").ideal_pattern()
        assert hamiltonian == {"ZZX": 0.5e6, "IIX": 0.5e6, "ZIX": -0.5e6, "IZX": -0.5e6}
        appendix = gl.target_preset("iToffoli", "appendix").ideal_pattern()
        assert appendix["IIX"] == -0.5e6
        # the Hamiltonian derived pattern is the one generating the gate
        H = gl.pauli_sum({w: v / 0.5e6 * np.pi / 8 for w, v in hamiltonian.items()})
        assert np.allclose(gl.ideal_unitary(H), gl.itoffoli_unitary(), atol=1e-12)

    def test_ccnot_compensated(self):
        target = gl.target_preset("CCNOT")
        assert target.compensated == ("ZII", "IZI")
        assert "ZII" not in target.unwanted
        assert len(target.unwanted) == 8
        assert target.sign_of("ZZI") == -1

    def test_czz(self):
        target = gl.target_preset("CZZ")
        assert target.ideal_pattern() == {"ZZX": 0.5e6, "IZX": -0.5e6}
        assert target.theta == pytest.approx(np.pi / 2)

    def test_parity_assisted_ghz(self):
        target = gl.target_preset("GHZ", "parity-assisted")
        pattern = target.ideal_pattern()
        assert pattern["ZIX"] == pattern["IZX"] == -pattern["IIX"]

    def test_signs_consistent(self):
        target = gl.target_preset("CZZ")
        assert not target.signs_consistent({"ZZX": -1.0, "IZX": 1.0})
        assert not target.signs_consistent({"ZZX": 1.0, "IZX": 1.0})
        assert target.signs_consistent({"ZZX": 2.0, "IZX": -0.1})

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            gl.target_preset("GHZ", "nope")
        with pytest.raises(ConfigurationError):
            gl.target_preset("SWAP")

    def test_contradictory_relations(self):
        with pytest.raises(ConfigurationError):
            gl.GateTarget(
                TargetName.GHZ,
                "broken",
                (
                    gl.Relation((("ZZX", 1), ("IIX", 1))),
                    gl.Relation((("ZZX", 1), ("IIX", -1))),
                ),
                np.pi / 2,
            )

    def test_logical_to_physical(self):
        target = gl.target_preset("CCNOT")
        assert target.logical_qubit("Q1") == 1
        assert target.logical_qubit("Q3") == 2
        assert target.logical_qubit("Q2") == 3

    def test_reference_unitaries(self):
        assert np.allclose(gl.reference_unitary("CZZ"), gl.parity_check_unitary())
        assert np.allclose(gl.reference_unitary("ccnot"), gl.ccnot_unitary())
        assert np.allclose(gl.reference_unitary(TargetName.GHZ), gl.ghz_sequence())
