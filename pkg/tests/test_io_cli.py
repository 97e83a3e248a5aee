import json
import os

import numpy as np
import pytest

from rtp import io as rio
from rtp.cli import main
from rtp.errors import ValidationError
from rtp.families import random_corr_family, random_module_family


def test_module_family_roundtrip(tmp_path):
    F = random_module_family(np.random.default_rng([3, 0]), n_indices=3,
                             exceptional=(1,))
    doc = rio.module_family_to_json(F)
    path = tmp_path / "fam.json"
    rio.dump(doc, str(path))
    G = rio.family_from_json(rio.load(str(path)))
    assert G.base.exceptional == F.base.exceptional
    for v in range(F.size):
        assert np.abs(G.modules[v].gram - F.modules[v].gram).max() < 1e-15
        assert np.abs(G.vectors[v] - F.vectors[v]).max() < 1e-15


def test_corr_family_roundtrip(tmp_path):
    F = random_corr_family(np.random.default_rng([4, 0]), n_indices=2)
    path = tmp_path / "corr.json"
    rio.dump(rio.corr_family_to_json(F), str(path))
    G = rio.family_from_json(rio.load(str(path)))
    for v in range(F.size):
        assert np.abs(G.actions[v].alpha - F.actions[v].alpha).max() < 1e-15


def test_load_rejects_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        rio.load(str(path))


def test_cli_validate_fixture_ok(capsys):
    assert main(["family", "validate", "module_family_small.json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] is True


def test_cli_validate_corrupted_fixture_fails(capsys):
    assert main(["family", "validate",
                 "module_family_bad_projection.json"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] is False


def test_cli_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("{")
    assert main(["family", "validate", str(bad)]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["suite", "isometry", "--tol", "-1"]) == 2


def test_cli_level_build(capsys):
    assert main(["level", "build", "module_family_small.json",
                 "--S", "0,1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["S"] == [0, 1]
    assert "algebra" in out and "module" in out


def test_cli_check_commands(capsys):
    assert main(["check", "isometry", "--family", "module_family_small.json",
                 "--S", "0,1", "--Sprime", "0,1,2"]) == 0
    capsys.readouterr()
    assert main(["check", "coherence", "--family", "corr_family_small.json",
                 "--S", "0"]) == 0
    capsys.readouterr()
    assert main(["check", "coherence", "--family", "counterexample_m2.json",
                 "--S", "0"]) == 1


def test_cli_rtp_fixtures_env(tmp_path, monkeypatch, capsys):
    src = os.path.join(os.path.dirname(rio.__file__), "fixtures",
                       "module_family_small.json")
    dst = tmp_path / "alt.json"
    dst.write_text(open(src).read())
    monkeypatch.setenv("RTP_FIXTURES", str(tmp_path))
    assert main(["family", "validate", "alt.json"]) == 0


def test_cli_report_merges(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    assert main(["suite", "coherence", "--n", "2",
                 "--out", str(out1)]) == 0
    assert main(["report", str(out1)]) == 0
    merged = json.loads(capsys.readouterr().out)
    assert len(merged["summary"]) == 2
