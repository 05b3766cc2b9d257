import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from cbsduality import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_header(capsys):
    code, out, _ = run(capsys, "point", "--p", "0", "--channel", "linpar", "--n", "1,0,0")
    assert code == 0
    assert out.splitlines()[0] == ",".join(cli.CSV_FIELDS)


def test_point_singlet_helicity(capsys):
    code, out, _ = run(capsys, "point", "--p", "1", "--channel", "hpres", "--n", "1,0,0")
    (row,) = rows(out)
    assert float(row["d"]) == pytest.approx(1, abs=1e-12)
    assert float(row["v"]) == pytest.approx(0, abs=1e-12)


def test_point_mixed_parallel(capsys):
    _, out, _ = run(capsys, "point", "--p", "0", "--channel", "linpar", "--n", "1,0,0")
    (row,) = rows(out)
    assert float(row["d"]) == pytest.approx(0, abs=1e-12)
    assert float(row["v"]) == pytest.approx(1, abs=1e-12)
    assert (row["u"], row["uprime"]) == ("1.0", "1.0")


def test_point_explicit_jones(capsys):
    _, out, _ = run(
        capsys, "point", "--p", "0", "--jones", "1,0,0,0", "--jones-out", "0,0,1,0", "--n", "1,0,0"
    )
    (row,) = rows(out)
    assert float(row["d"]) == pytest.approx(0, abs=1e-12)
    assert float(row["v"]) == pytest.approx(0, abs=1e-12)


def test_point_json_has_closed_form(capsys):
    _, out, _ = run(capsys, "point", "--p", "0.4", "--jones", "0.3,0,0.2,0.5",
                    "--jones-out", "1,0,0,1", "--n=-2,0,0", "--format", "json")
    (rec,) = json.loads(out)["records"]
    assert rec["d"] == pytest.approx(rec["closed_form"]["d"], abs=1e-12)
    assert rec["v"] == pytest.approx(rec["closed_form"]["v"], abs=1e-12)
    assert rec["d"] == pytest.approx(4 * np.hypot(np.linalg.norm(rec["a"]), np.linalg.norm(rec["b"])))


def test_point_along_z_has_empty_u(capsys):
    _, out, _ = run(capsys, "point", "--p", "0", "--channel", "hflip", "--n", "0,0,1")
    (row,) = rows(out)
    assert row["u"] == "" and row["uprime"] == ""


def test_point_dark(capsys):
    code, out, err = run(capsys, "point", "--p", "1", "--jones", "0,0,1,0", "--jones-out", "1,0,0,0", "--n", "1,0,0")
    assert code == cli.EXIT_DARK
    assert "dark channel" in err
    assert out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ["point", "--p", "2", "--channel", "hpres", "--n", "1,0,0"],
        ["point", "--p", "0", "--channel", "hpres", "--n", "0,0,0"],
        ["point", "--p", "0", "--n", "1,0,0"],
        ["point", "--p", "0", "--channel", "hpres", "--jones", "1,0,0,0", "--n", "1,0,0"],
        ["point", "--p", "0", "--channel", "nope", "--n", "1,0,0"],
        ["sweep"],
        ["sweep", "--p", "0", "--p-grid", "3"],
        ["average", "--p", "0", "--channel", "hpres", "--resolution", "1"],
        ["--bogus"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert "usage" in err


def test_sweep_order_and_values(capsys):
    code, out, _ = run(capsys, "sweep", "--p", "0", "--u-grid", "3", "--uprime-grid", "3")
    assert code == 0
    table = rows(out)
    assert len(table) == 9
    assert [(r["u"], r["uprime"]) for r in table] == [
        (u, up) for u in ("-1.0", "0.0", "1.0") for up in ("-1.0", "0.0", "1.0")
    ]
    centre = table[4]
    assert float(centre["d"]) == pytest.approx(0.5, abs=1e-12)
    assert float(centre["v"]) == pytest.approx(0.5, abs=1e-12)


def test_sweep_p_outer(capsys):
    _, out, _ = run(capsys, "sweep", "--p", "0,0.5", "--u-grid", "2", "--uprime-grid", "2")
    assert [r["p"] for r in rows(out)] == ["0.0"] * 4 + ["0.5"] * 4


def test_sweep_singlet_saturates_and_marks_dark(capsys):
    _, out, _ = run(capsys, "sweep", "--p", "1", "--u-grid", "11", "--uprime-grid", "11")
    table = rows(out)
    dark = [r for r in table if r["duality_slack"] == "dark"]
    assert len(dark) == 11 and all(r["u"] == "-1.0" and r["d"] == "" and r["v"] == "" for r in dark)
    for r in table:
        if r["duality_slack"] != "dark":
            assert float(r["d"]) ** 2 + float(r["v"]) ** 2 == pytest.approx(1, abs=1e-10)


def test_sweep_triplet_obeys_bound(capsys):
    from cbsduality.duality import bound_check

    _, out, _ = run(capsys, "sweep", "--p", "-0.3333333333", "--u-grid", "21", "--uprime-grid", "21")
    for r in rows(out):
        assert bound_check(float(r["p"]), float(r["d"]), float(r["v"])) >= -1e-10
        assert float(r["duality_slack"]) >= -1e-10


def test_sweep_p_grid(capsys):
    _, out, _ = run(capsys, "sweep", "--p-grid", "3", "--u-grid", "2", "--uprime-grid", "2", "--format", "json")
    doc = json.loads(out)
    assert sorted({r["p"] for r in doc["records"]}) == pytest.approx([-1 / 3, 1 / 3, 1.0])


def test_average_helicity_preserving(capsys):
    code, out, _ = run(capsys, "average", "--p", "0", "--channel", "hpres")
    assert code == 0
    (row,) = rows(out)
    assert row["nx"] == "avg" and row["ny"] == "" and row["nz"] == ""
    assert float(row["d"]) == pytest.approx(0.5, abs=1e-3)
    assert float(row["v"]) == pytest.approx(0.4, abs=1e-3)


def test_average_resolution_convergence(capsys):
    _, coarse, _ = run(capsys, "average", "--p", "0", "--channel", "hpres", "--resolution", "8")
    _, fine, _ = run(capsys, "average", "--p", "0", "--channel", "hpres", "--resolution", "32")
    (a,), (b,) = rows(coarse), rows(fine)
    assert abs(float(a["d"]) - float(b["d"])) < 1e-6
    assert abs(float(a["v"]) - float(b["v"])) < 1e-6


def test_average_linear_parallel_below_half(capsys):
    _, out, _ = run(capsys, "average", "--p", "0", "--channel", "linpar")
    assert float(rows(out)[0]["d"]) <= 0.5 + 1e-3


def test_average_json_metadata(capsys):
    _, out, _ = run(capsys, "average", "--p", "0", "--channel", "hflip", "--resolution", "8", "--format", "json")
    doc = json.loads(out)
    assert doc["meta"]["n_nodes"] == 128
    assert doc["meta"]["skipped_dark"] == 0
    assert doc["meta"]["weighting"] == "event"
    assert doc["records"][0]["nx"] == "avg"


def test_average_monte_carlo(capsys):
    _, out, _ = run(capsys, "average", "--p", "0", "--channel", "hpres", "--scheme", "mc",
                    "--resolution", "20000", "--seed", "1")
    row = rows(out)[0]
    assert float(row["d"]) == pytest.approx(0.5, abs=0.02)


def test_average_all_dark(capsys, monkeypatch):
    from cbsduality import average

    poles = average.Quadrature(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), np.array([0.5, 0.5]))
    monkeypatch.setattr(cli, "build_quadrature", lambda *a, **k: poles)
    code, _, err = run(capsys, "average", "--p", "0", "--channel", "hpres")
    assert code == cli.EXIT_DARK
    assert "dark" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--p", "0,1,0.25", "--u-grid", "5", "--uprime-grid", "4"],
        ["point", "--p", "0.7", "--jones", "0.3,0.1,0.2,0.5", "--jones-out", "1,0,0,1", "--n", "0.3,-0.2,0.9"],
        ["average", "--p", "0.2", "--channel", "hflip", "--resolution", "8"],
    ],
)
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_output_deterministic(tmp_path, argv, fmt):
    outputs = []
    for k in range(2):
        path = tmp_path / f"out{k}.{fmt}"
        assert cli.main(argv + ["--format", fmt, "--out", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert b"\r" not in outputs[0]
    if fmt == "json":
        text = outputs[0].decode()
        assert json.dumps(json.loads(text), indent=2, allow_nan=False) + "\n" == text


def test_csv_numbers_round_trip(capsys):
    _, out, _ = run(capsys, "point", "--p", "0.7", "--jones", "0.3,0.1,0.2,0.5",
                    "--jones-out", "1,0,0,1", "--n", "0.3,-0.2,0.9")
    row = rows(out)[0]
    for key in ("w_sum", "d", "v", "duality_slack", "nx"):
        assert cli.fmt(float(row[key])) == row[key]
        assert len(row[key].lstrip("-").replace(".", "").lstrip("0").split("e")[0]) <= 17


def test_every_row_respects_duality(capsys):
    _, out, _ = run(capsys, "sweep", "--p-grid", "5", "--u-grid", "9", "--uprime-grid", "9")
    for r in rows(out):
        if r["duality_slack"] != "dark":
            assert float(r["duality_slack"]) >= -1e-10


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0


def test_conventions(capsys):
    code, out, _ = run(capsys, "--conventions")
    assert code == 0
    assert "hpres" in out and "basis order" in out


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    for name in ("eq9-oracle", "duality-eq1", "bound-eq10", "decomposition-eq8"):
        assert f"{name}: PASS" in out


def test_verify_negative_control(capsys, corrupted_projector):
    code, out, _ = run(capsys, "verify")
    assert code == cli.EXIT_VERIFY
    assert "eq9-oracle: FAIL" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cbsduality", "point", "--p", "0", "--channel", "hpres", "--n", "1,0,0"],
        capture_output=True, text=True, check=True,
    )
    assert rows(proc.stdout)[0]["d"] == "0.5"
