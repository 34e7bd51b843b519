import os
import shutil
import sys
from pathlib import Path

import pytest

from ..circuit_model import CircuitSpec
from ..device import load_device

if "pytest" not in sys.modules:
    raise ValueError("fixtures can only be used together with pytest")


def dispersive_circuit(**kwargs):
    """Weakly coupled, well detuned cell where the closed forms hold"""
    params = dict(
        qubit_freqs=(4.70e9, 4.95e9, 5.20e9),
        anharmonicities=(-300e6, -300e6, -300e6),
        coupler_freqs=(5.6e9, 5.7e9),
        g_qc=20e6,
        g_qq=3e6,
        g_13=3e6,
    )
    params.update(kwargs)
    return CircuitSpec.nearest_neighbour(**params)


def weak_pair_circuit():
    """Q1 and Q2 close to resonance, couplers far away - for the exchange coupling"""
    return CircuitSpec.nearest_neighbour(
        (4.90e9, 4.91e9, 5.30e9),
        (-300e6, -300e6, -300e6),
        (5.5e9, 5.9e9),
        g_qc=30e6,
        g_qq=3e6,
        g_13=0.0,
    )


@pytest.fixture
def synthetic_device():
    return load_device()


@pytest.fixture
def dispersive_spec():
    return dispersive_circuit()


@pytest.fixture
def dir_per_test(request):
    """Separate directory per test, removed when the test passed"""
    if request.cls is None:
        target_path = Path(request.fspath).parent / "run" / ("." + request.node.name)
    else:
        target_path = (
            Path(request.fspath).parent
            / "run"
            / (request.cls.__name__ + "." + request.node.name)
        )
    if target_path.exists():  # pragma: no cover
        shutil.rmtree(target_path)
    target_path = target_path.absolute()
    target_path.mkdir(parents=True)
    old_dir = Path(os.getcwd()).absolute()
    os.chdir(target_path)

    def finalize():
        if hasattr(request.node, "rep_setup"):
            if request.node.rep_setup.passed and (
                request.node.rep_call.passed
                or request.node.rep_call.outcome == "skipped"
            ):
                try:
                    shutil.rmtree(target_path)
                except OSError:  # pragma: no cover
                    pass

    request.addfinalizer(finalize)
    try:
        yield target_path
    finally:
        os.chdir(old_dir)
