import numpy as np
import pytest
import scipy.linalg

from pcrsynth import boson_algebra as ba
from pcrsynth.circuit_model import (
    CircuitSpec,
    DressedTable,
    DriveSpec,
    build_drive_hamiltonian,
    build_rwa_system_hamiltonian,
    build_system_hamiltonian,
    dressed_table,
    frame_frequency,
    numeric_exchange_coupling,
    rotating_frame_rwa,
    standard_basis,
)
from pcrsynth.exceptions import ConfigurationError, ResonanceError
from pcrsynth.testing.fixtures import dispersive_circuit, weak_pair_circuit


class TestCircuitSpec:
    def test_nearest_neighbour_layout(self):
        spec = dispersive_circuit()
        assert spec.g_qc(0, 0) == 20e6
        assert spec.g_qc(0, 1) == 0
        assert spec.g_qc(2, 1) == 20e6
        assert spec.g_qq(1, 0) == 3e6
        assert spec.g_qq(2, 0) == 3e6
        assert spec.diagnostics == ()

    def test_dispersive_advisory(self):
        spec = dispersive_circuit(coupler_freqs=(4.9e9, 5.7e9), g_qc=90e6)
        assert spec.diagnostics
        assert any("Q1-C12" in d for d in spec.diagnostics)

    def test_with_couplers(self, dispersive_spec):
        spec = dispersive_spec
        moved = spec.with_couplers((6.0e9, 6.1e9))
        assert moved.coupler_freqs == (6.0e9, 6.1e9)
        assert moved.qubit_freqs == spec.qubit_freqs
        assert spec.coupler_freqs == (5.6e9, 5.7e9)

    def test_invalid(self):
        with pytest.raises(ConfigurationError):
            dispersive_circuit(qubit_freqs=(4.7e9, 4.9e9))
        with pytest.raises(ConfigurationError):
            dispersive_circuit(anharmonicities=(-300e6, 0.0, -300e6))
        with pytest.raises(ConfigurationError):
            dispersive_circuit(coupler_freqs=(-1.0, 5.7e9))


class TestDriveSpec:
    def test_amplitudes(self):
        drive = DriveSpec((1.0, -0.5, 0.25), 40e6)
        assert drive.amplitudes == (40e6, -20e6, 10e6)
        assert drive.with_reference_amplitude(80e6).amplitudes == (80e6, -40e6, 20e6)

    def test_from_amplitudes(self):
        drive = DriveSpec.from_amplitudes((30e6, 0.0, -60e6))
        assert drive.reference_amplitude == 60e6
        assert drive.scale_factors == (0.5, 0.0, -1.0)

    def test_phase_calibration(self):
        assert DriveSpec((1, 0, 1), phases=(0.0, np.pi, -np.pi)).phase_calibrated()
        assert not DriveSpec((1, 0, 1), phases=(0.3, 0.0, 0.0)).phase_calibrated()


class TestHamiltonians:
    def test_system_hamiltonian_hermitian(self):
        H = build_system_hamiltonian(dispersive_circuit(), standard_basis(4))
        assert H.hermiticity_error() < 1e-12

    def test_rwa_conserves_excitations(self):
        basis = standard_basis(4)
        H = build_rwa_system_hamiltonian(dispersive_circuit(), basis).entries
        N = ba.total_number_op(basis).entries
        assert np.linalg.norm(H @ N - N @ H) <= 1e-12 * np.linalg.norm(H)

    def test_full_hamiltonian_breaks_excitation_number(self):
        basis = standard_basis(4)
        H = build_system_hamiltonian(dispersive_circuit(), basis).entries
        N = ba.total_number_op(basis).entries
        assert np.linalg.norm(H @ N - N @ H) > 1e-6 * np.linalg.norm(H)

    def test_rotating_frame_hermitian_and_static(self):
        spec = dispersive_circuit()
        drive = DriveSpec((1.0, 0.0, 1.0), 60e6)
        H = rotating_frame_rwa(spec, drive, standard_basis(4))
        assert isinstance(H, ba.OperatorMatrix)
        assert H.hermiticity_error() < 1e-12
        assert frame_frequency(spec, drive) == pytest.approx(dressed_table(spec).transitions[1, 0])
        assert frame_frequency(spec, DriveSpec((1.0, 0.0, 1.0), 60e6, drive_freq=5e9)) == 5e9

    def test_frame_follows_drive_frequency(self):
        spec = dispersive_circuit()
        basis = standard_basis(2)
        H_a = rotating_frame_rwa(spec, DriveSpec((0.0, 0.0, 0.0), 60e6, drive_freq=5.0e9), basis).entries
        H_b = rotating_frame_rwa(spec, DriveSpec((0.0, 0.0, 0.0), 60e6, drive_freq=5.1e9), basis).entries
        N = ba.total_number_op(basis).entries
        assert np.allclose(H_a - H_b, 2 * np.pi * 0.1e9 * N)

    def test_lab_frame_drive(self):
        basis = standard_basis(2)
        with pytest.raises(ConfigurationError):
            build_drive_hamiltonian(DriveSpec((1, 0, 0), 10e6), basis, 0.0)
        H = build_drive_hamiltonian(DriveSpec((1, 0, 0), 10e6, drive_freq=5e9), basis, 0.0)
        src = basis.index_of((0, 0, 0, 0, 0))
        dst = basis.index_of((1, 0, 0, 0, 0))
        assert H.entries[dst, src] == pytest.approx(2 * np.pi * 10e6)

    def test_wrong_mode_order(self):
        modes = [ba.ModeSpec(x, "coupler") for x in ("C12", "C23")] + [
            ba.ModeSpec(x, "qubit") for x in ("Q1", "Q2", "Q3")
        ]
        basis = ba.build_basis(modes, 2)
        with pytest.raises(ConfigurationError):
            build_system_hamiltonian(dispersive_circuit(), basis)


class TestDressedTable:
    def test_single_excitation_shift(self):
        # weak coupling: the closed form Lamb shift matches the exact single excitation level
        spec = CircuitSpec.nearest_neighbour(
            (4.70e9, 4.95e9, 5.20e9),
            (-300e6, -300e6, -300e6),
            (6.5e9, 6.8e9),
            g_qc=10e6,
            g_qq=0.0,
            g_13=0.0,
        )
        table = dressed_table(spec)
        basis = standard_basis(2)
        H = build_rwa_system_hamiltonian(spec, basis).entries
        evals, evecs = scipy.linalg.eigh(H)
        idx = basis.index_of((1, 0, 0, 0, 0))
        k = int(np.argmax(np.abs(evecs[idx, :]) ** 2))
        exact_shift = evals[k] / (2 * np.pi) - spec.qubit_freqs[0]
        closed_shift = table.energies[0, 1] - spec.qubit_freqs[0]
        assert closed_shift < 0
        assert exact_shift == pytest.approx(closed_shift, rel=0.01)

    def test_exchange_coupling_matches_avoided_crossing(self):
        spec = weak_pair_circuit()
        table = dressed_table(spec)
        half_gap, crossing = numeric_exchange_coupling(spec, 0, 1)
        J = table.coupling(0, 1, 0, 0)
        assert abs(half_gap) == pytest.approx(abs(J), rel=0.15)
        assert abs(crossing - spec.qubit_freqs[1]) < 100e6

    def test_coupling_formula(self):
        spec = dispersive_circuit()
        table = dressed_table(spec)
        d1 = spec.coupler_freqs[0] - spec.qubit_freqs[0]
        d2 = spec.coupler_freqs[0] - spec.qubit_freqs[1]
        expected = 3e6 - 20e6 * 20e6 / 2 * (1 / d1 + 1 / d2)
        assert table.coupling(0, 1, 0, 0) == pytest.approx(expected)
        # Q1 and Q3 share no coupler
        assert table.coupling(0, 2, 0, 0) == pytest.approx(3e6)

    def test_transitions(self):
        table = dressed_table(dispersive_circuit())
        assert table.transitions.shape == (3, 3)
        # anharmonicity lowers every next transition
        assert np.all(np.diff(table.transitions, axis=1) < 0)

    def test_resonance(self):
        with pytest.raises(ResonanceError):
            dressed_table(dispersive_circuit(coupler_freqs=(4.70e9, 5.7e9)))

    def test_parse_symbol(self):
        assert DressedTable.parse_symbol("J_12") == ("J", 0, 0, 1, 0)
        assert DressedTable.parse_symbol("J_1'2") == ("J", 0, 1, 1, 0)
        assert DressedTable.parse_symbol("J_12'") == ("J", 0, 0, 1, 1)
        assert DressedTable.parse_symbol("J_(13)'") == ("J", 0, 2, 2, 2)
        assert DressedTable.parse_symbol("D_1''2") == ("D", 0, 2, 1, 0)
        for bad in ("X_12", "J_11", "J_14", "D_(13)'", "J_1"):
            with pytest.raises(KeyError):
                DressedTable.parse_symbol(bad)

    def test_symbol_values(self):
        spec = dispersive_circuit()
        table = dressed_table(spec)
        assert table.symbol("D_12") == pytest.approx(table.transitions[0, 0] - table.transitions[1, 0])
        assert table.symbol("D_1'2") == pytest.approx(table.transitions[0, 1] - table.transitions[1, 0])
        assert table.symbol("J_32'") == pytest.approx(table.coupling(2, 1, 0, 1))
