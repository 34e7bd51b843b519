import json

import numpy as np
import pytest

from pcrsynth.circuit_model import DriveSpec, dressed_table
from pcrsynth.effective_hamiltonian import coefficients_for
from pcrsynth.exceptions import ConfigurationError, SeedingError
from pcrsynth.gate_logic import target_preset
from pcrsynth.optimizer import ParameterBounds
from pcrsynth.perturbative import (
    FORMULA_SYMBOLS,
    PERTURBATIVE_WORDS,
    PerturbativeInputs,
    curated_seed,
    load_seed_table,
    per_qubit_response,
    perturbative_coefficients,
    seed_parameters,
)
from pcrsynth.testing.fixtures import dispersive_circuit


class TestClosedForm:
    def test_symbols_are_finite(self):
        inputs = PerturbativeInputs.from_spec(dispersive_circuit(), DriveSpec((1, 0, 1), 60e6))
        symbols = inputs.symbols()
        assert set(symbols) == set(FORMULA_SYMBOLS)
        assert all(np.isfinite(v) for v in symbols.values())

    def test_no_drive_no_weights(self):
        inputs = PerturbativeInputs.from_spec(dispersive_circuit(), DriveSpec((0, 0, 0), 60e6))
        coeffs = perturbative_coefficients(inputs)
        assert set(coeffs.alpha) == set(PERTURBATIVE_WORDS)
        assert all(v == 0 for v in coeffs.alpha.values())

    def test_linear_in_scale_factors(self):
        spec = dispersive_circuit()
        table = dressed_table(spec)
        response = per_qubit_response(table, 60e6)
        A = (0.3, -0.05, 1.2)
        combined = perturbative_coefficients(PerturbativeInputs(table, DriveSpec(A, 60e6)))
        for w in PERTURBATIVE_WORDS:
            expected = sum(a * r.get(w) for a, r in zip(A, response))
            assert combined[w] == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_calibrated_phases_give_no_y(self):
        inputs = PerturbativeInputs.from_spec(dispersive_circuit(), DriveSpec((1, 0.1, 1), 60e6))
        coeffs = perturbative_coefficients(inputs)
        for w in ("ZIY", "IZY", "IIY", "ZZY"):
            assert coeffs[w] == 0

    def test_direct_drive_on_target(self):
        inputs = PerturbativeInputs.from_spec(dispersive_circuit(), DriveSpec((0, 1, 0), 20e6))
        assert perturbative_coefficients(inputs)["IIX"] == pytest.approx(10e6)

    def test_agrees_with_numeric_pipeline(self):
        # weak drive, well in the dispersive regime
        spec = dispersive_circuit()
        for scale, words in (((1.0, 0.0, 0.0), ("ZIX", "IIX")), ((0.0, 0.0, 1.0), ("IZX", "IIX"))):
            drive = DriveSpec(scale, 2e6)
            closed = perturbative_coefficients(PerturbativeInputs.from_spec(spec, drive))
            numeric = coefficients_for(spec, drive)
            for w in words:
                assert numeric[w] == pytest.approx(closed[w], rel=0.2)


class TestSeeds:
    def test_curated_seed(self):
        table = load_seed_table()
        seed = curated_seed(table, target_preset("GHZ").name, 2)
        assert seed == pytest.approx([5.321, 5.725, 0.060, -0.007, 1.500])
        assert curated_seed(table, target_preset("GHZ").name, 17) is None
        assert curated_seed(None, target_preset("GHZ").name, 2) is None

    def test_seed_parameters_prefers_curated(self):
        seed = seed_parameters(
            target_preset("CCNOT"), dispersive_circuit(), cell_index=3, seed_table=load_seed_table()
        )
        assert seed == pytest.approx([5.301, 5.003, 0.174, 0.010, -0.016])

    def test_nothing_dispersive_in_bounds(self):
        bounds = ParameterBounds(
            np.array([4.9, 4.9, -1.5, -0.1, -1.5]), np.array([4.95, 4.95, 1.5, 0.1, 1.5])
        )
        with pytest.raises(SeedingError) as e:
            seed_parameters(target_preset("GHZ"), dispersive_circuit(), bounds)
        assert e.value.diagnostics["evaluated"] == 0
        assert e.value.diagnostics["not_dispersive"] == 9

    def test_bounds_from_seed_table(self):
        bounds = ParameterBounds.from_seed_table(load_seed_table())
        assert bounds.lower == pytest.approx(ParameterBounds.default().lower)
        assert bounds.upper == pytest.approx(ParameterBounds.default().upper)

    def test_unknown_keys(self, dir_per_test):
        path = dir_per_test / "seeds.json"
        path.write_text(json.dumps({"bounds": {}, "seeds": [], "extra": 1}))
        with pytest.raises(ConfigurationError):
            load_seed_table(path)

    def test_missing_file(self, dir_per_test):
        with pytest.raises(ConfigurationError):
            load_seed_table(dir_per_test / "nope.json")
