import json

import numpy as np
import pytest

from atomcorr import io
from atomcorr.cli import main, run
from atomcorr.config import ConfigError, emit_config, parse_config
from atomcorr.quantum import Interaction, LevelScheme
from atomcorr.scanner import DEFAULT_FIELDS, AngleGrid, scan
from atomcorr.scenarios import SCENARIOS


def test_defaults_from_scenario():
    cfg = parse_config("", scenario="ddi_fig2")
    assert cfg.grid == 201
    assert cfg.fields == DEFAULT_FIELDS
    assert cfg.spec == SCENARIOS["ddi_fig2"].spec
    assert [c.filename() for c in cfg.contours] == [
        "C2_contour.txt",
        "C4_contour.txt",
        "C3_ratio10_contour.txt",
        "C4_ratio10_contour.txt",
    ]


def test_negative_rabi_frequency():
    with pytest.raises(ConfigError, match="system.omega_p"):
        parse_config("[run]\nscenario = ddi_fig2\n[system]\nomega_p = -0.1\n")


def test_unknown_scenario_lists_presets():
    with pytest.raises(ConfigError) as info:
        parse_config("[run]\nscenario = nope\n")
    for name in SCENARIOS:
        assert name in str(info.value)


def test_parse_error_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[run]\nscenario = ddi_fig2\nthis is not a key value pair\n")


def test_unknown_key():
    with pytest.raises(ConfigError, match="run.gird"):
        parse_config("[run]\nscenario = ddi_fig2\ngird = 5\n")


def test_inline_system():
    text = """
[run]
grid = 11
[system]
n_atoms = 2
scheme = three_level
spacings = 5.0
omega_p = 0.01
omega_c = 1.0
gamma_c = 0.05
interaction = rri
v_nn = 2.34
r_nn = 5.0
"""
    cfg = parse_config(text)
    assert cfg.spec.scheme is LevelScheme.THREE_LEVEL_LADDER
    assert cfg.spec.interaction is Interaction.RRI
    assert cfg.spec.coords[1, 0] == 5.0


def test_system_without_scenario_needs_fields():
    with pytest.raises(ConfigError, match="system."):
        parse_config("[system]\nomega_p = 0.01\n")


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_round_trip(name):
    cfg = parse_config("[run]\nworkers = 3\nheatmaps = yes\n", scenario=name, grid=77)
    assert parse_config(emit_config(cfg)) == cfg


def test_scan_inventory_and_values(tmp_path):
    out = tmp_path / "scan"
    assert main(["scan", "--scenario", "ddi_fig2", "--out", str(out), "--dump-rho"]) == 0
    files = {p.name for p in out.iterdir()}
    expected = {f"{f}.csv" for f in DEFAULT_FIELDS} | {
        "C2_contour.txt",
        "C4_contour.txt",
        "C3_ratio10_contour.txt",
        "C4_ratio10_contour.txt",
        "manifest.json",
        "rho.txt",
    }
    assert expected <= files
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert set(manifest["files"]) == files
    assert parse_config(manifest["config"]).spec == SCENARIOS["ddi_fig2"].spec

    ref = scan(SCENARIOS["ddi_fig2"].spec, AngleGrid(201), ("G2", "g2norm"))
    alphas, vals, mask = io.read_field_csv(out / "G2.csv")
    np.testing.assert_array_equal(alphas, ref.grid.alphas)
    np.testing.assert_array_equal(vals, ref.fields["G2"].values)
    assert not mask.any()
    _, g2n, g2n_mask = io.read_field_csv(out / "g2norm.csv")
    np.testing.assert_array_equal(g2n_mask, ref.fields["g2norm"].mask)
    np.testing.assert_array_equal(g2n[~g2n_mask], ref.fields["g2norm"].values[~g2n_mask])
    np.testing.assert_allclose(io.read_complex_matrix(out / "rho.txt"), ref.report.rho, rtol=0, atol=0)
    assert len(io.read_polylines(out / "C2_contour.txt")) == manifest["contours"]["C2_contour.txt"]["polylines"] > 0


def test_outputs_identical_across_workers(tmp_path):
    outs = []
    for tag, w in (("a", 1), ("b", 4), ("c", 8), ("d", 1)):
        d = tmp_path / tag
        assert main(["scan", "--scenario", "ddi_random", "--grid", "121", "--workers", str(w), "--out", str(d)]) == 0
        outs.append(d)
    names = sorted(p.name for p in outs[0].iterdir() if p.suffix in (".csv", ".txt"))
    assert names
    for d in outs[1:]:
        for n in names:
            assert (d / n).read_bytes() == (outs[0] / n).read_bytes(), n


def test_scaling_control_is_one(tmp_path):
    out = tmp_path / "s"
    assert main(["scaling", "--scenario", "scaling_fig8a", "--no-interaction", "--grid", "51", "--out", str(out)]) == 0
    _, vals, mask = io.read_field_csv(out / "ratio.csv")
    assert not mask.any()
    assert np.abs(vals - 1).max() <= 1e-10


def test_contours_command_writes_no_fields(tmp_path):
    out = tmp_path / "c"
    assert main(["contours", "--scenario", "ddi_fig2", "--grid", "51", "--out", str(out)]) == 0
    assert not list(out.glob("*.csv"))
    assert (out / "C2_contour.txt").exists()


def test_steady_state_dump_round_trip(tmp_path):
    out = tmp_path / "ss"
    assert main(["steady-state", "--scenario", "ddi_fig2", "--dump-liouvillian", "--dump-rho", "--out", str(out)]) == 0
    L = io.read_complex_matrix(out / "liouvillian.txt")
    rho = io.read_complex_matrix(out / "rho.txt")
    assert L.shape == (256, 256)
    vec = rho.reshape(-1, order="F")
    assert np.abs(L @ vec).max() <= 1e-10
    manifest = json.loads((out / "manifest.json").read_text())
    assert sum(manifest["populations"]) == pytest.approx(1.0, abs=1e-12)


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    text = capsys.readouterr().out
    for name in SCENARIOS:
        assert name in text


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[run]\nscenario = ddi_fig2\n[system]\nomega_p = -1\n")
    assert main(["scan", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    assert "omega_p" in capsys.readouterr().err


def test_missing_rabi_pair_exit_code(tmp_path):
    cfg = parse_config("", scenario="ddi_fig2", output=str(tmp_path / "r"))
    assert run(cfg, "rabi-ratio") == 2
    manifest = json.loads((tmp_path / "r" / "manifest.json").read_text())
    assert manifest["status"] == "error"


def test_heatmaps(tmp_path):
    out = tmp_path / "h"
    assert main(["scan", "--scenario", "ddi_fig2", "--grid", "41", "--fields", "G2,g2norm", "--heatmaps", "--out", str(out)]) == 0
    assert (out / "G2.png").stat().st_size > 0
    assert (out / "g2norm.png").exists()
