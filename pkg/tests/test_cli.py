import json
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from hsslice import cli, svgchart


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(["verify", "--list"], capsys)
    assert code == 0
    for suite in ("m1", "m2", "m3", "steenrod", "arithsq", "equivariant"):
        assert suite in out.split()
    assert "H_*tmf0(3) decomposition" in out


def test_usage_errors(capsys):
    assert run(["verify", "nosuch"], capsys)[0] == 2
    assert run(["compute", "--m", "7"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run([], capsys)[0] == 2
    assert run(["compute", "--threads", "0"], capsys)[0] == 2


def test_compute_unit(capsys, tmp_path):
    out = tmp_path / "p.json"
    code, _, _ = run(["compute", "--m", "1", "--max-stem", "0", "--out", str(out)], capsys)
    assert code == 0
    dump = json.loads(out.read_text())
    einf = dump["pages"][-1]["classes"]
    assert [(c["stem"], c["weight"], c["filtration"], c["dim"]) for c in einf] == [(0, 0, 0, 1)]
    assert einf[0]["basis"] == ["1"]


def test_compute_arithsq_tsv(capsys):
    code, out, _ = run(["compute", "--arithsq", "--max-degree", "20", "--format", "tsv"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "j\tdim" and len(lines) == 22
    assert lines[1:4] == ["0\t1", "1\t0", "2\t0"]


def test_verify_steenrod(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, text, _ = run(["verify", "steenrod", "--out", str(out)], capsys)
    assert code == 0
    assert text.count("PASS") == 3
    assert json.loads(out.read_text())["ok"] is True


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# height 1\nm = 1\nmax-stem = 6\nweight = 0\nformat = tsv\n")
    code, out, _ = run(["compute", "--config", str(cfg)], capsys)
    assert code == 0 and out.startswith("page\tstem")
    code, out2, _ = run(["compute", "--config", str(cfg), "--format", "json"], capsys)
    assert code == 0 and json.loads(out2)["box"]["max_stem"] == 6
    cfg.write_text("nonsense = 1\n")
    assert run(["compute", "--config", str(cfg)], capsys)[0] == 2


names = st.text("abcdefghij_./", min_size=1, max_size=8)


@given(st.builds(cli.RunConfig, m=st.none() | st.integers(1, 3), max_stem=st.none() | st.integers(0, 60),
                 weight=st.none() | st.sampled_from(["0", "-3:0", "-8:-2"]),
                 suite=st.none() | st.sampled_from(["m1", "m2"]), out=st.none() | names,
                 threads=st.none() | st.integers(1, 8), vanishing_lines=st.none() | st.booleans()))
def test_config_roundtrip(cfg):
    assert cli.RunConfig.from_text(cfg.to_text()) == cfg


def test_chart_pipeline(capsys, tmp_path):
    dump = tmp_path / "p.json"
    assert run(["compute", "--m", "1", "--max-stem", "12", "--out", str(dump)], capsys)[0] == 0
    svg1 = tmp_path / "a.svg"
    svg2 = tmp_path / "b.svg"
    args = ["chart", "--input", str(dump), "--page", "E2", "--weight", "0", "--vanishing-lines",
            "--structure-lines"]
    assert run(args + ["--out", str(svg1)], capsys)[0] == 0
    assert run(args + ["--out", str(svg2)], capsys)[0] == 0
    text = svg1.read_text()
    assert text == svg2.read_text()
    assert text.startswith("<svg") and "marker-end" in text
    # d3 leaves the zeta_1^2 and zeta_2 columns
    data = json.loads(dump.read_text())
    e2 = {(c["stem"], c["filtration"]): c for c in data["pages"][0]["classes"] if c["weight"] == 0}
    assert e2[(2, -2)]["d_rank"] >= 1 and e2[(3, -3)]["d_rank"] >= 1
    assert run(["chart", "--input", str(dump), "--page", "E99"], capsys)[0] == 2
    assert run(["chart", "--input", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_chart_dots_trace_to_classes(tmp_path):
    dump = {"pipeline": "hsss", "m": 1, "pages": [{"page": "E4", "r": None, "classes": [
        {"stem": 0, "weight": 0, "filtration": 0, "dim": 1},
        {"stem": 4, "weight": 0, "filtration": -4, "dim": 2},
        {"stem": 6, "weight": 0, "filtration": -6, "dim": 5}]}]}
    svg = svgchart.render(dump, svgchart.ChartSpec())
    assert svg.count("<circle") == 3
    assert svg.count('<text x') > 0 and ">5</text>" in svg
    assert svg.count('fill="white" stroke="black"') == 1


def test_empty_page_axes_only():
    dump = {"pages": [{"page": "E2", "r": 3, "classes": []}]}
    svg = svgchart.render(dump, svgchart.ChartSpec())
    assert "<circle" not in svg and "<rect x" not in svg and "<line" in svg


def test_export_formats(capsys, tmp_path):
    dump = tmp_path / "p.json"
    assert run(["compute", "--m", "1", "--max-stem", "8", "--out", str(dump)], capsys)[0] == 0
    for fmt in ("json", "tsv", "svg"):
        target = tmp_path / f"x.{fmt}"
        assert run(["export", "--input", str(dump), "--out", str(target)], capsys)[0] == 0
        assert target.stat().st_size > 0
    assert json.loads((tmp_path / "x.json").read_text()) == json.loads(dump.read_text())


def test_console_script_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hsslice.cli", "verify", "--list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0


@pytest.mark.parametrize("threads", ["1", "2"])
def test_compute_thread_independent(capsys, tmp_path, threads):
    out = tmp_path / "t.json"
    run(["compute", "--m", "2", "--max-stem", "14", "--threads", threads, "--out", str(out)], capsys)
    base = tmp_path / "base.json"
    run(["compute", "--m", "2", "--max-stem", "14", "--out", str(base)], capsys)
    assert out.read_bytes() == base.read_bytes()
