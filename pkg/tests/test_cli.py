import csv
import io
import json

import pytest

from donorqc.cli import main, parse_cell, parse_values
from donorqc.output import data_section
from donorqc.species import ConfigError


def run(argv, out=None):
    args = list(argv) + (["--out", str(out)] if out is not None else [])
    return main(args)


def read_rows(path):
    body = data_section(path.read_text())
    return list(csv.DictReader(io.StringIO(body)))


def test_value_parsing():
    assert parse_values("1,2, 3") == [1.0, 2.0, 3.0]
    assert parse_values("lin:0:1:3") == [0.0, 0.5, 1.0]
    assert parse_values("geom:1:100:3") == pytest.approx([1.0, 10.0, 100.0])
    with pytest.raises(ConfigError):
        parse_values("a,b")
    with pytest.raises(ConfigError):
        parse_values("")
    assert parse_cell("3,4") == (3, 4)
    with pytest.raises(ConfigError):
        parse_cell("3")


def test_metadata_header(tmp_path):
    assert run(["levels", "--B", "0,1", "--seed", "17"], tmp_path) == 0
    lines = (tmp_path / "levels.csv").read_text().splitlines()
    assert lines[0] == "# tool: donorqc"
    assert lines[1].startswith("# version: ")
    assert lines[3].startswith("# config_sha256: ")
    assert "# seed: 17" in lines
    assert lines[6] == "B_tesla,level_index,freq_hz,label"


def test_json_format(tmp_path):
    assert run(["tunnel", "--F", "1e7", "--format", "json"], tmp_path) == 0
    doc = json.loads((tmp_path / "tunnel.json").read_text())
    assert doc["meta"]["seed"] == 0
    assert [r["mass_label"] for r in doc["data"]] == ["m_t", "m_l"]


def test_stdout_when_no_out(capsys):
    assert run(["dephase"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# tool: donorqc")
    row = data_section(out).splitlines()[1].split(",")
    assert float(row[2]) == pytest.approx(0.0987, abs=5e-5)


def test_config_error_exit_code(tmp_path):
    assert run(["levels", "--config", str(tmp_path / "missing.toml")]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("[species.X]\nA = -1.0\n")
    assert run(["levels", "--config", str(bad), "--species", "X"]) == 2
    assert run(["levels", "--species", "Si:Nope"]) == 2
    assert run(["sweep", "bogus", "--param", "x=1"]) == 2


def test_config_species_and_hash(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[run]\nseed = 5\n\n[species.strained]\nstrain_factor = 0.5\n')
    assert run(["levels", "--config", str(cfg), "--species", "strained", "--B", "0"], tmp_path) == 0
    text = (tmp_path / "levels.csv").read_text()
    assert "# seed: 5" in text
    assert "e3b0c442" not in text.splitlines()[3]  # hash of the file, not of nothing
    rows = read_rows(tmp_path / "levels.csv")
    gap = float(rows[1]["freq_hz"]) - float(rows[0]["freq_hz"])
    assert gap == pytest.approx(60e6, rel=1e-9)


def test_physics_error_exit_code():
    assert run(["nuj", "--B", "1", "--J", "2e10"]) == 3
    assert run(["pulse", "--gate", "swap", "--B", "0"]) == 3


def test_unroutable_exit_code():
    assert run(["route", "--src", "2,2", "--dst", "0,0"]) == 4


def test_route_and_compile_with_defect(tmp_path):
    assert run(["route", "--src", "2,2", "--dst", "4,3"], tmp_path) == 0
    rows = read_rows(tmp_path / "route.csv")
    assert (int(rows[0]["row"]), int(rows[0]["col"])) == (2, 2)
    assert run(["compile", "--defect", "3,3"], tmp_path) == 0
    text = (tmp_path / "schedule.csv").read_text()
    assert "# violations: []" in text
    assert "3:3" not in data_section(text)


def test_compile_json_circuit(tmp_path):
    circ = tmp_path / "c.json"
    circ.write_text(json.dumps({"ops": [{"kind": "measure", "qubits": ["e"]}]}))
    assert run(["compile", "--circuit", str(circ), "--format", "json"], tmp_path) == 0
    doc = json.loads((tmp_path / "schedule.json").read_text())
    assert doc["meta"]["violations"] == []
    kinds = [a["kind"] for s in doc["data"]["steps"] for a in s]
    assert "readout" in kinds


def test_fig1b_zero_field_row(tmp_path):
    assert run(["figure", "fig1b"], tmp_path) == 0
    rows = [r for r in read_rows(tmp_path / "fig1b.csv") if float(r["B_tesla"]) == 0.0]
    gaps = sorted(float(r["gap_hz"]) for r in rows)
    assert gaps[-1] == pytest.approx(120e6, rel=1e-9)


def test_fig2_reference_cell(tmp_path):
    assert run(["figure", "fig2"], tmp_path) == 0
    rows = read_rows(tmp_path / "fig2.csv")
    cell = [r for r in rows if float(r["B_tesla"]) == pytest.approx(1.0)
            and float(r["T_kelvin"]) == pytest.approx(0.1)]
    assert len(cell) == 1 and float(cell[0]["polarization"]) > 0.999
    assert (tmp_path / "fig2_contours.csv").exists()


def test_fig6_alpha_ordering(tmp_path):
    assert run(["figure", "fig6"], tmp_path) == 0
    curves = [read_rows(tmp_path / f"fig6_alpha{k}.csv") for k in range(3)]
    # larger alpha decays faster: compare at the midpoint of the record
    mid = [float(c[len(c) // 2]["coherence"]) for c in curves]
    assert mid[0] > mid[1] > mid[2]


@pytest.mark.parametrize("name", ["fig1a", "fig1c", "fig5", "fig13"])
def test_other_figures_write(tmp_path, name):
    assert run(["figure", name], tmp_path) == 0
    assert read_rows(tmp_path / f"{name}.csv")


def test_single_point_sweep(tmp_path):
    assert run(["sweep", "polarization", "--param", "B=1", "--param", "T=0.1", "--quiet"],
               tmp_path) == 0
    rows = read_rows(tmp_path / "sweep_polarization.csv")
    assert len(rows) == 1 and float(rows[0]["polarization"]) > 0.999


def test_nuj_sweep_columns(tmp_path):
    assert run(["sweep", "nuj", "--param", "A=3e7", "--param", "B=2",
                "--param", "J=1e9,5e9", "--quiet"], tmp_path) == 0
    rows = read_rows(tmp_path / "sweep_nuj.csv")
    assert list(rows[0]) == ["A", "B", "J", "nu_J_hz", "nu_J_exact_hz", "rel_error"]
    for r in rows:
        rel = abs(float(r["nu_J_hz"]) - float(r["nu_J_exact_hz"])) / float(r["nu_J_exact_hz"])
        assert float(r["rel_error"]) == pytest.approx(rel, rel=1e-12)


def test_sweep_row_order_follows_parameters(tmp_path):
    assert run(["sweep", "dephasing_rate", "--param", "alpha=2e8,1e8", "--param", "S_white=1e-18",
                "--quiet"], tmp_path) == 0
    rows = read_rows(tmp_path / "sweep_dephasing_rate.csv")
    assert [float(r["alpha"]) for r in rows] == [2e8, 1e8]
    assert float(rows[0]["rate_per_s"]) == pytest.approx(4 * float(rows[1]["rate_per_s"]))


def test_sweep_missing_parameter():
    assert run(["sweep", "nuj", "--param", "A=3e7"]) == 2


def test_bad_timing_table_is_config_error(tmp_path):
    cfg = tmp_path / "t.toml"
    cfg.write_text("[timing]\nwarp = 1.0\n")
    assert run(["compile", "--config", str(cfg)]) == 2
