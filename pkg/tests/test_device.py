import json

import pytest

from pcrsynth.device import SYNTHETIC_DEVICE_PATH, load_device
from pcrsynth.exceptions import CellValidationError, ConfigurationError, DeviceLoadError


def _write_modified(target_dir, modify):
    data = json.loads(SYNTHETIC_DEVICE_PATH.read_text())
    modify(data)
    path = target_dir / "device.json"
    path.write_text(json.dumps(data))
    return path


class TestSyntheticDevice:
    def test_counts(self, synthetic_device):
        assert len(synthetic_device.qubits) == 71
        assert len(synthetic_device.couplers) == 70
        assert len(synthetic_device.cells) == 69
        assert len(synthetic_device.candidate_triples()) == 69
        assert synthetic_device.fingerprint["size"] > 0

    def test_cell_two(self, synthetic_device):
        cell = synthetic_device.cell(2)
        assert cell.labels == ("Q1", "Q2", "Q3")
        assert cell.middle == "Q2"
        assert cell.couplers == ("C1_2", "C2_3")
        assert cell.spec.qubit_freqs == pytest.approx((4.80e9, 4.95e9, 4.87e9))
        assert cell.spec.g_qq(0, 1) == pytest.approx(9e6)
        # Q1 and Q3 share no coupler
        assert cell.spec.g_qq(0, 2) == pytest.approx(9e6)
        assert cell.spec.g_qc(0, 1) == 0
        assert cell.spec.t1[0] == pytest.approx(287e-6)

    def test_select(self, synthetic_device):
        assert [c.index for c in synthetic_device.select([3, 1])] == [3, 1]
        assert len(synthetic_device.select()) == 69
        with pytest.raises(CellValidationError):
            synthetic_device.cell(999)
        with pytest.raises(ConfigurationError):
            synthetic_device.select([0])

    def test_coupler_lookup(self, synthetic_device):
        assert synthetic_device.coupler_between("Q1", "Q2") == "C1_2"
        lo, hi = synthetic_device.coupler_bounds_ghz(synthetic_device.cell(2))
        assert lo < hi

    def test_as_dict(self, synthetic_device):
        d = synthetic_device.cell(2).as_dict()
        assert d["cell"] == 2
        assert d["qubits"] == ["Q1", "Q2", "Q3"]


class TestBrokenDevices:
    def test_missing_file(self, dir_per_test):
        with pytest.raises(DeviceLoadError):
            load_device(dir_per_test / "nope.json")

    def test_not_json(self, dir_per_test):
        path = dir_per_test / "device.json"
        path.write_text("{ nope")
        with pytest.raises(DeviceLoadError):
            load_device(path)

    def test_missing_qubit_key(self, dir_per_test):
        path = _write_modified(dir_per_test, lambda d: d["qubits"][5].pop("T1_us"))
        with pytest.raises(DeviceLoadError) as e:
            load_device(path)
        assert e.value.field == "T1_us"
        assert "T1_us" in str(e.value)

    def test_unknown_top_level_key(self, dir_per_test):
        path = _write_modified(dir_per_test, lambda d: d.update({"fridge": "cold"}))
        with pytest.raises(DeviceLoadError) as e:
            load_device(path)
        assert e.value.field == "fridge"

    def test_t2_above_limit(self, dir_per_test):
        def modify(d):
            d["qubits"][0]["T2_us"] = 3 * d["qubits"][0]["T1_us"]

        with pytest.raises(DeviceLoadError) as e:
            load_device(_write_modified(dir_per_test, modify))
        assert e.value.field == "T2_us"

    def test_non_adjacent_cell(self, dir_per_test):
        path = _write_modified(dir_per_test, lambda d: d["unit_cells"].append(["Q1", "Q2", "Q9"]))
        with pytest.raises(CellValidationError):
            load_device(path)

    def test_repeated_qubit_in_cell(self, dir_per_test):
        path = _write_modified(dir_per_test, lambda d: d["unit_cells"].append(["Q1", "Q2", "Q1"]))
        with pytest.raises(CellValidationError):
            load_device(path)

    def test_fingerprint_follows_content(self, dir_per_test):
        a = load_device(_write_modified(dir_per_test, lambda d: None)).fingerprint
        b = load_device(_write_modified(dir_per_test, lambda d: d.update({"name": "other"}))).fingerprint
        assert a != b
