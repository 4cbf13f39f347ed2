"""Command-line interface: outputs, determinism, exit codes."""

import csv
import json

import numpy as np
import pytest

from cowalk.cli import EXIT_CONFIG, EXIT_GUARD, EXIT_OK, fmt, main


def run(*argv):
    return main(list(argv))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_float_formatting_roundtrips():
    for x in (1.0, -0.0, 1 / 3, 2.0 ** -52, -4.049515566048791e+00):
        assert float(fmt(x)) == x + 0.0
    assert fmt(-0.0) == "0"


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_row_count_and_gap(tmp_path):
    out = tmp_path / "strong"
    assert run("spectrum", "--Lt", "21", "--J", "1", "--V", "-4", "--stats", "boson",
               "--out", str(out)) == EXIT_OK
    rows = read_csv(out / "spectrum.csv")
    assert len(rows) == 231
    bound = [float(r["energy"]) for r in rows if r["label"] == "bound"]
    scattering = [float(r["energy"]) for r in rows if r["label"] == "scattering"]
    assert min(scattering) - max(bound) > 0  # two separated mini-bands
    meta = json.loads((out / "meta.json").read_text())
    assert meta["command"] == "spectrum" and meta["n_states"] == 231


def test_spectrum_deterministic(tmp_path):
    args = ("spectrum", "--Lt", "9", "--V", "-1.5", "--stats", "hcb")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(*args, "--out", str(a)) == EXIT_OK
    assert run(*args, "--out", str(b)) == EXIT_OK
    for name in ("spectrum.csv", "meta.json"):
        assert (a / name).read_bytes() != b""
        left = (a / name).read_bytes()
        right = (b / name).read_bytes()
        if name == "meta.json":
            left = left.replace(str(a).encode(), b"OUT")
            right = right.replace(str(b).encode(), b"OUT")
        assert left == right


def test_spectrum_json_format(tmp_path):
    out = tmp_path / "j"
    assert run("spectrum", "--Lt", "5", "--V", "-1", "--stats", "fermion",
               "--format", "json", "--out", str(out)) == EXIT_OK
    payload = json.loads((out / "spectrum.json").read_text())
    assert payload["columns"] == ["alpha", "K", "energy", "label"]
    assert len(payload["rows"]) == 10


def test_normalize_divides_energies(tmp_path):
    a, b = tmp_path / "abs", tmp_path / "norm"
    common = ("spectrum", "--Lt", "5", "--J", "2", "--V", "-4", "--stats", "fermion")
    assert run(*common, "--out", str(a)) == EXIT_OK
    assert run(*common, "--normalize", "--out", str(b)) == EXIT_OK
    absolute = [float(r["energy"]) for r in read_csv(a / "spectrum.csv")]
    scaled = [float(r["energy"]) for r in read_csv(b / "spectrum.csv")]
    np.testing.assert_allclose(np.array(absolute) / 2.0, scaled, atol=1e-15)


# ---------------------------------------------------------------------------
# walk
# ---------------------------------------------------------------------------

def test_walk_outputs(tmp_path):
    out = tmp_path / "walk"
    assert run("walk", "--Lt", "21", "--V", "0", "--stats", "fermion",
               "--t-end", "4", "--samples", "5", "--out", str(out)) == EXIT_OK
    momentum = read_csv(out / "momentum.csv")
    assert len(momentum) == 5 * 441
    for row in momentum:
        if row["alpha"] == row["beta"]:
            assert float(row["gamma"]) < 1e-20  # anti-bunching diagonal
    position = read_csv(out / "position.csv")
    sums = {}
    for row in position:
        sums[row["t"]] = sums.get(row["t"], 0.0) + float(row["gamma"])
    assert all(abs(total - 2.0) < 1e-10 for total in sums.values())


def test_walk_boundary_guard(tmp_path):
    base = ("walk", "--Lt", "21", "--V", "0", "--stats", "boson",
            "--t-end", "8", "--samples", "17")
    assert run(*base, "--out", str(tmp_path / "refused")) == EXIT_GUARD
    assert run(*base, "--allow-boundary", "--out", str(tmp_path / "forced")) == EXIT_OK
    assert (tmp_path / "forced" / "position.csv").exists()
    assert not (tmp_path / "refused" / "position.csv").exists()


def test_walk_invalid_initial(tmp_path):
    assert run("walk", "--Lt", "9", "--stats", "fermion", "--initial", "0", "0",
               "--out", str(tmp_path)) == EXIT_CONFIG


def test_invalid_config_rejected(tmp_path):
    assert run("spectrum", "--Lt", "20", "--out", str(tmp_path)) == EXIT_CONFIG
    assert run("spectrum", "--J", "-1", "--out", str(tmp_path)) == EXIT_CONFIG
    assert run("walk", "--t-end", "0", "--out", str(tmp_path)) == EXIT_CONFIG


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n_sites": 5, "V": -2.0, "statistics": "hcb"}))
    out = tmp_path / "out"
    assert run("spectrum", "--config", str(cfg), "--Lt", "7", "--out", str(out)) == EXIT_OK
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config"]["n_sites"] == 7        # flag wins
    assert meta["config"]["V"] == -2.0           # file value survives
    assert meta["config"]["statistics"] == "hcb"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"no_such_key": 1}))
    assert run("spectrum", "--config", str(bad), "--out", str(out)) == EXIT_CONFIG


# ---------------------------------------------------------------------------
# cowalk and effective
# ---------------------------------------------------------------------------

def test_cowalk_report(tmp_path):
    out = tmp_path / "cowalk"
    assert run("cowalk", "--Lt", "13", "--boson-Lt", "17", "--J", "1", "--V", "-80",
               "--out", str(out)) == EXIT_OK
    report = json.loads((out / "cowalk.json").read_text())
    assert 2.5 < report["speed_ratio_boson_over_fermion"] < 3.5
    assert report["fermion_hcb_relative_mismatch"] < 0.02
    fermion = report["per_statistics"]["fermion"]
    assert fermion["J_eff"] == pytest.approx(-0.0125)
    assert fermion["l1_distance_max"] < 0.1
    assert report["per_statistics"]["boson"]["J_eff"] == pytest.approx(-0.0375)


def test_cowalk_requires_separated_band(tmp_path):
    assert run("cowalk", "--Lt", "13", "--boson-Lt", "13", "--V", "-1",
               "--out", str(tmp_path)) == EXIT_GUARD


def test_effective_outputs(tmp_path):
    out = tmp_path / "eff"
    assert run("effective", "--Lt", "9", "--V", "-10", "--stats", "hcb",
               "--t-end", "50", "--samples", "6", "--out", str(out)) == EXIT_OK
    spectrum = read_csv(out / "effective_spectrum.csv")
    assert len(spectrum) == 9
    assert all(float(r["abs_err"]) < 2e-3 for r in spectrum)
    dynamics = read_csv(out / "effective_dynamics.csv")
    assert len(dynamics) == 9 * 6
    assert [r["q"] for r in dynamics[:6]] == ["-4"] * 6  # q-major ordering
    assert run("effective", "--V", "0", "--out", str(out)) == EXIT_CONFIG


# ---------------------------------------------------------------------------
# waveguide export
# ---------------------------------------------------------------------------

def test_waveguide_layouts(tmp_path):
    bos, frm = tmp_path / "b", tmp_path / "f"
    assert run("export-waveguide", "--Lt", "21", "--V", "-2", "--stats", "boson",
               "--format", "json", "--out", str(bos)) == EXIT_OK
    assert run("export-waveguide", "--Lt", "21", "--V", "-2", "--stats", "fermion",
               "--format", "json", "--out", str(frm)) == EXIT_OK
    boson = json.loads((bos / "waveguide.json").read_text())
    fermion = json.loads((frm / "waveguide.json").read_text())
    assert len(boson["sites"]) == 441
    assert len(boson["edges"]) == 2 * 441
    detuned = [s for s in boson["sites"] if s["detuning"] != 0.0]
    assert all(abs(s["l1"] - s["l2"]) in (1, 20) for s in detuned)
    boson_only = ({(s["l1"], s["l2"]) for s in boson["sites"]}
                  - {(s["l1"], s["l2"]) for s in fermion["sites"]})
    assert boson_only == {(l, l) for l in range(-10, 11)}


def test_waveguide_csv(tmp_path):
    out = tmp_path / "wg"
    assert run("export-waveguide", "--Lt", "5", "--V", "-1", "--stats", "hcb",
               "--out", str(out)) == EXIT_OK
    sites = read_csv(out / "waveguide_sites.csv")
    edges = read_csv(out / "waveguide_edges.csv")
    assert len(sites) == 20 and len(edges) == 30


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_subset(tmp_path, capsys):
    assert run("verify", "--criteria", "1,3,5", "--out", str(tmp_path)) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and all(line.startswith("[PASS]") for line in lines)
    report = json.loads((tmp_path / "verify.json").read_text())
    assert [r["criterion"] for r in report] == [1, 3, 5]


def test_walk_csv_roundtrip_is_exact(tmp_path):
    # printed precision reconstructs the computed matrices bit for bit
    import numpy as np
    from cowalk import LatticeSpec, Statistics, walk_series

    out = tmp_path / "rt"
    assert run("walk", "--Lt", "5", "--V", "-1.3", "--stats", "boson",
               "--t-end", "1.5", "--samples", "3", "--allow-boundary",
               "--out", str(out)) == EXIT_OK
    spec = LatticeSpec.from_site_count(5, 1.0, -1.3, Statistics.BOSON)
    series = walk_series(spec, (0, 1), np.linspace(0.0, 1.5, 3))
    want = series.position[-1].entries
    got = np.zeros_like(want)
    rows = [r for r in read_csv(out / "position.csv") if float(r["t"]) == 1.5]
    assert len(rows) == 25
    for r in rows:
        got[int(r["q"]) + 2, int(r["r"]) + 2] = float(r["gamma"])
    assert np.array_equal(got, want)
