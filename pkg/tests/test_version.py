import pcrsynth


def test_version_is_correct():
    from pathlib import Path

    pyproject_toml = Path(__file__).parent.parent / "pyproject.toml"
    q = f'version = "{pcrsynth.__version__}"'
    print("searching for", repr(q))
    assert q in pyproject_toml.read_text()

    setup_cfg = Path(__file__).parent.parent / "setup.cfg"
    q2 = f"version = {pcrsynth.__version__}"
    assert q2 in setup_cfg.read_text()
