"""Device description files: qubits, couplers, couplings and the unit cells cut from them.

Schema (JSON, unknown keys are rejected)::

    {
      "name": str, "description": str,                      (optional)
      "virtual_g13_MHz": float,                              (optional, default 9)
      "qubits":   [{"label", "freq_GHz", "anharm_MHz", "T1_us", "T2_us"}],
      "couplers": [{"label", "freq_GHz", "min_GHz", "max_GHz"}],
      "couplings": [{"a", "b", "g_MHz"}],      qubit-coupler or qubit-qubit
      "unit_cells": [["Q1", "Q2", "Q3"], ...]  Q2 is the middle qubit
    }
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import networkx

from .circuit_model import CircuitSpec
from .exceptions import CellValidationError, DeviceLoadError
from .hashers import hash_file
from .util import log_debug, log_info

SYNTHETIC_DEVICE_PATH = Path(__file__).parent / "data" / "synthetic_device.json"
VIRTUAL_G13_MHZ = 9.0

TOP_LEVEL_KEYS = {"name", "description", "virtual_g13_MHz", "qubits", "couplers", "couplings", "unit_cells"}
REQUIRED_TOP_LEVEL = ("qubits", "couplers", "couplings", "unit_cells")
QUBIT_KEYS = ("label", "freq_GHz", "anharm_MHz", "T1_us", "T2_us")
COUPLER_KEYS = ("label", "freq_GHz", "min_GHz", "max_GHz")
COUPLING_KEYS = ("a", "b", "g_MHz")


@dataclass(frozen=True)
class QubitRecord:
    label: str
    freq: float
    anharmonicity: float
    t1: float
    t2: float


@dataclass(frozen=True)
class CouplerRecord:
    label: str
    freq: float
    min_freq: float
    max_freq: float


@dataclass(frozen=True)
class UnitCell:
    index: int
    labels: Tuple[str, str, str]
    couplers: Tuple[str, str]
    spec: CircuitSpec

    @property
    def middle(self):
        return self.labels[1]

    def as_dict(self):
        return {
            "cell": self.index,
            "qubits": list(self.labels),
            "couplers": list(self.couplers),
            "qubit_freqs_ghz": [f / 1e9 for f in self.spec.qubit_freqs],
            "coupler_freqs_ghz": [f / 1e9 for f in self.spec.coupler_freqs],
        }


@dataclass
class Device:
    name: str
    path: Path
    qubits: Dict[str, QubitRecord]
    couplers: Dict[str, CouplerRecord]
    graph: networkx.Graph
    cells: List[UnitCell] = field(default_factory=list)
    fingerprint: Dict = field(default_factory=dict)
    virtual_g13: float = VIRTUAL_G13_MHZ * 1e6

    def cell(self, index):
        for c in self.cells:
            if c.index == index:
                return c
        raise CellValidationError(f"No unit cell {index} on {self.name} (1..{len(self.cells)})")

    def select(self, indices=None):
        if indices is None:
            return list(self.cells)
        return [self.cell(ii) for ii in indices]

    def coupler_between(self, a, b):
        return self.graph.edges[a, b].get("coupler")

    def candidate_triples(self):
        """Every path a - m - b through a middle qubit m, with a < b"""
        result = []
        for middle in sorted(self.graph.nodes):
            neighbours = sorted(self.graph.neighbors(middle))
            for ii, a in enumerate(neighbours):
                for b in neighbours[ii + 1:]:
                    result.append((a, middle, b))
        return result

    def coupler_bounds_ghz(self, cell):
        lo = max(self.couplers[c].min_freq for c in cell.couplers) / 1e9
        hi = min(self.couplers[c].max_freq for c in cell.couplers) / 1e9
        return lo, hi


def _require(record, keys, path, where):
    for key in keys:
        if key not in record:
            raise DeviceLoadError(f"Missing '{key}' in {where}", path, key)
    unknown = set(record) - set(keys)
    if unknown:
        raise DeviceLoadError(f"Unknown keys {sorted(unknown)} in {where}", path, sorted(unknown)[0])


def _number(record, key, path, where):
    try:
        return float(record[key])
    except (TypeError, ValueError):
        raise DeviceLoadError(f"'{key}' in {where} is not a number: {record[key]!r}", path, key)


def _parse_qubit(record, path, ii):
    where = f"qubits[{ii}]"
    _require(record, QUBIT_KEYS, path, where)
    t1 = _number(record, "T1_us", path, where) * 1e-6
    t2 = _number(record, "T2_us", path, where) * 1e-6
    if t1 <= 0 or t2 <= 0 or t2 > 2 * t1:
        raise DeviceLoadError(f"{where}: need 0 < T2 <= 2 T1", path, "T2_us")
    return QubitRecord(
        str(record["label"]),
        _number(record, "freq_GHz", path, where) * 1e9,
        _number(record, "anharm_MHz", path, where) * 1e6,
        t1,
        t2,
    )


def _parse_coupler(record, path, ii):
    where = f"couplers[{ii}]"
    _require(record, COUPLER_KEYS, path, where)
    c = CouplerRecord(
        str(record["label"]),
        _number(record, "freq_GHz", path, where) * 1e9,
        _number(record, "min_GHz", path, where) * 1e9,
        _number(record, "max_GHz", path, where) * 1e9,
    )
    if not c.min_freq <= c.freq <= c.max_freq:
        raise DeviceLoadError(f"{where}: freq_GHz outside [min_GHz, max_GHz]", path, "freq_GHz")
    return c


def _build_graph(qubits, couplers, couplings, path):
    """Qubit graph; qubits sharing a coupler get an edge carrying the coupler label"""
    graph = networkx.Graph()
    graph.add_nodes_from(qubits)
    g_qc = {}
    g_qq = {}
    for ii, record in enumerate(couplings):
        where = f"couplings[{ii}]"
        _require(record, COUPLING_KEYS, path, where)
        a, b = str(record["a"]), str(record["b"])
        g = _number(record, "g_MHz", path, where) * 1e6
        if a in qubits and b in qubits:
            g_qq[frozenset((a, b))] = g
        elif a in qubits and b in couplers:
            g_qc[a, b] = g
        elif b in qubits and a in couplers:
            g_qc[b, a] = g
        else:
            raise DeviceLoadError(f"{where}: unknown endpoint {a!r} or {b!r}", path, "a")
    by_coupler = {}
    for (q, c) in g_qc:
        by_coupler.setdefault(c, []).append(q)
    for c, members in by_coupler.items():
        if len(members) != 2:
            raise DeviceLoadError(
                f"Coupler {c} must couple exactly two qubits, got {sorted(members)}", path, "couplings"
            )
        a, b = sorted(members)
        graph.add_edge(a, b, coupler=c, g_qq=g_qq.get(frozenset((a, b)), 0.0))
    return graph, g_qc, g_qq


def _resolve_cell(index, labels, qubits, couplers, graph, g_qc, g_qq, virtual_g13):
    labels = tuple(str(x) for x in labels)
    if len(labels) != 3 or len(set(labels)) != 3:
        raise CellValidationError(f"Unit cell {index}: need three distinct qubits, got {labels}")
    for label in labels:
        if label not in qubits:
            raise CellValidationError(f"Unit cell {index}: unknown qubit {label}")
    q1, q2, q3 = labels
    for a, b in ((q1, q2), (q2, q3)):
        if not graph.has_edge(a, b):
            raise CellValidationError(f"Unit cell {index}: {a} and {b} are not adjacent")
    c12 = graph.edges[q1, q2]["coupler"]
    c23 = graph.edges[q2, q3]["coupler"]
    records = [qubits[x] for x in labels]
    g = tuple(
        (g_qc.get((q, c12), 0.0), g_qc.get((q, c23), 0.0)) for q in labels
    )
    direct = (
        g_qq.get(frozenset((q1, q2)), 0.0),
        g_qq.get(frozenset((q2, q3)), 0.0),
        g_qq.get(frozenset((q1, q3)), virtual_g13),
    )
    spec = CircuitSpec(
        tuple(r.freq for r in records),
        tuple(r.anharmonicity for r in records),
        (couplers[c12].freq, couplers[c23].freq),
        g,
        direct,
        t1=tuple(r.t1 for r in records),
        t2=tuple(r.t2 for r in records),
        labels=labels,
    )
    return UnitCell(index, labels, (c12, c23), spec)


def load_device(path=None) -> Device:
    """Parse and validate a device file, resolving every unit cell to a CircuitSpec.

    Q1 and Q3 share no coupler; unless the file lists a direct coupling for them
    they get the virtual g_13 (virtual_g13_MHz, 9 MHz by default)."""
    path = Path(path) if path is not None else SYNTHETIC_DEVICE_PATH
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise DeviceLoadError(f"Could not read device file: {e}", path)
    except ValueError as e:
        raise DeviceLoadError(f"Device file is not valid JSON: {e}", path)
    if not isinstance(data, dict):
        raise DeviceLoadError("Device file must hold a JSON object", path)
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise DeviceLoadError(f"Unknown top level keys {sorted(unknown)}", path, sorted(unknown)[0])
    for key in REQUIRED_TOP_LEVEL:
        if key not in data:
            raise DeviceLoadError(f"Missing '{key}'", path, key)

    qubits = {}
    for ii, record in enumerate(data["qubits"]):
        q = _parse_qubit(record, path, ii)
        if q.label in qubits:
            raise DeviceLoadError(f"Duplicate qubit label {q.label}", path, "label")
        qubits[q.label] = q
    couplers = {}
    for ii, record in enumerate(data["couplers"]):
        c = _parse_coupler(record, path, ii)
        if c.label in couplers or c.label in qubits:
            raise DeviceLoadError(f"Duplicate label {c.label}", path, "label")
        couplers[c.label] = c
    virtual_g13 = float(data.get("virtual_g13_MHz", VIRTUAL_G13_MHZ)) * 1e6
    graph, g_qc, g_qq = _build_graph(qubits, couplers, data["couplings"], path)

    cells = [
        _resolve_cell(ii + 1, labels, qubits, couplers, graph, g_qc, g_qq, virtual_g13)
        for ii, labels in enumerate(data["unit_cells"])
    ]
    device = Device(
        str(data.get("name", path.stem)),
        path,
        qubits,
        couplers,
        graph,
        cells,
        hash_file(path),
        virtual_g13,
    )
    log_info(f"Loaded {device.name}: {len(qubits)} qubits, {len(couplers)} couplers, {len(cells)} unit cells")
    log_debug(f"Device fingerprint {device.fingerprint}")
    return device
