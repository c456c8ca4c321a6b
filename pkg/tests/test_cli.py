import csv
import io
import math

import numpy as np
import pytest

from dho_dilation import cli
from dho_dilation.config import ScenarioConfig, parse_config
from dho_dilation.errors import InvalidArgument
from dho_dilation.phase_space import evolve_closed_form, make_generator, make_phase_space

FAST = """
[scenario]
dt = 0.01
t_samples = 0 0.5 1
energy_band = -5 5 41
"""


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "fast.ini"
    path.write_text(FAST)
    return str(path)


def test_evolve_stdout(capsys):
    assert cli.main(["evolve", "--omega", "1", "--gamma", "0.5"]) == 0
    out = rows(capsys.readouterr().out)
    assert [float(r["t"]) for r in out] == list(ScenarioConfig().t_samples)
    g = make_generator(make_phase_space(1), 1.0, 0.5)
    T = evolve_closed_form(g, 2.0).T
    row = out[4]
    assert float(row["T_0_1"]) == T[0, 1]
    assert float(row["residual"]) < 1e-9
    assert float(out[0]["sigma_max"]) == 1.0


def test_evolve_file_and_figure(tmp_path, capsys):
    out = tmp_path / "evolve.csv"
    assert cli.main(["evolve", "--out", str(out), "--n-modes", "2"]) == 0
    assert capsys.readouterr().out == ""
    header = out.read_text().splitlines()[0].split(",")
    assert len(header) == 1 + 16 + 2
    assert (tmp_path / "evolve.png").stat().st_size > 0


def test_no_figure_flag(tmp_path):
    out = tmp_path / "evolve.csv"
    assert cli.main(["evolve", "--out", str(out), "--no-figure"]) == 0
    assert not (tmp_path / "evolve.png").exists()


def test_explicit_figure_path(tmp_path, capsys):
    fig = tmp_path / "plot.png"
    assert cli.main(["evolve", "--figure", str(fig)]) == 0
    assert fig.exists()
    assert capsys.readouterr().out.startswith("t,")


def test_output_is_deterministic(tmp_path, fast_config):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["decay", "--config", fast_config, "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_decay_columns_agree(fast_config, capsys):
    assert cli.main(["decay", "--config", fast_config]) == 0
    out = rows(capsys.readouterr().out)
    assert len(out) == 3
    assert float(out[0]["one_particle"]) == pytest.approx(1.0)
    for r in out:
        assert abs(float(r["grid"]) - float(r["one_particle"])) < 1e-3
        assert abs(float(r["fock"]) - float(r["one_particle"])) < 1e-3
        assert r["reference"] == ""


def test_decay_critical_reference(fast_config, capsys):
    assert cli.main(["decay", "--config", fast_config, "--omega", "1", "--gamma", "1", "--dt", "0.001"]) == 0
    for r in rows(capsys.readouterr().out):
        expected = math.exp(-2 * float(r["t"]))
        assert float(r["reference"]) == pytest.approx(expected, rel=1e-15)
        assert abs(float(r["one_particle"]) - expected) < 1e-10
        assert abs(float(r["grid"]) - expected) < 1e-6
        assert abs(float(r["fock"]) - expected) < 1e-6


def test_spectrum_output(fast_config, capsys):
    assert cli.main(["spectrum", "--config", fast_config]) == 0
    captured = capsys.readouterr()
    out = rows(captured.out)
    assert len(out) == 41
    E = np.array([float(r["E"]) for r in out])
    assert E[0] == -5 and E[-1] == 5
    closed = np.array([float(r["closed_sq"]) for r in out])
    assert np.allclose(closed, closed[::-1], rtol=1e-12)
    assert max(float(r["deviation"]) for r in out) < 1e-3
    assert "band mass" in captured.err


def test_verify_passes(capsys, tmp_path):
    out = tmp_path / "report.txt"
    assert cli.main(["verify", "--out", str(out)]) == 0
    text = out.read_text()
    assert "FAIL" not in text
    assert text.rstrip().endswith("passed")
    assert (tmp_path / "report.png").exists()


def test_verify_without_damping_is_usage_error(capsys):
    assert cli.main(["verify", "--gamma", "0"]) == 2
    assert "gamma" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["evolve", "--omega", "-1"],
    ["evolve", "--dt", "0"],
    ["decay", "--gamma", "0"],
    ["evolve", "--config", "/nonexistent/scenario.ini"],
])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        cli.main(["explode"])
    assert info.value.code == 2


def test_bad_config_key(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\nomgea = 1\n")
    assert cli.main(["evolve", "--config", str(path)]) == 2
    assert "omgea" in capsys.readouterr().err


def test_flags_override_config(tmp_path, capsys):
    path = tmp_path / "c.ini"
    path.write_text("[scenario]\nomega = 3\ngamma = 0.1\nt_samples = 1\n")
    assert cli.main(["evolve", "--config", str(path), "--omega", "2"]) == 0
    T = evolve_closed_form(make_generator(make_phase_space(1), 2.0, 0.1), 1.0).T
    assert float(rows(capsys.readouterr().out)[0]["T_1_0"]) == T[1, 0]


def test_parse_config_values():
    cfg = parse_config("[scenario]\nt_max = auto  ; window rule\nvector = 1, 0\nfock = no\nenergy_band = -1 1 5\n")
    assert cfg.t_max is None and cfg.vector == (1.0, 0.0) and cfg.fock is False
    assert cfg.energy_band == (-1.0, 1.0, 5)


@pytest.mark.parametrize("text", [
    "[other]\nomega = 1\n",
    "[scenario]\nomega = fast\n",
    "[scenario]\nenergy_band = 1 2\n",
    "[scenario]\nfock = maybe\n",
    "omega = 1\n",
])
def test_parse_config_errors(text):
    with pytest.raises(InvalidArgument):
        parse_config(text)


@pytest.mark.parametrize("changes", [
    {"vector": (1.0, 0.0, 0.0)},
    {"vector": (0.0, 0.0)},
    {"t_samples": (-1.0,)},
    {"energy_band": (1.0, -1.0, 10)},
    {"n_modes": 0},
])
def test_config_validation(changes):
    with pytest.raises(InvalidArgument):
        ScenarioConfig(**changes).validate()
