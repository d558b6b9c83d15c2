from fractions import Fraction

import pytest

from souvlaki.cli import main


def run(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out.read_text() if out.exists() else None


def test_build_edge_header(tmp_path):
    code, text = run(tmp_path, "e.txt", ["build", "--K", "3", "--export", "edges"])
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# souvlaki v")
    assert "# souvlaki v1 K=3 d=7" in lines
    body = lines[lines.index("# souvlaki v1 K=3 d=7") + 1:]
    assert body == sorted(body)


def test_census_row(tmp_path):
    code, text = run(tmp_path, "c.csv", ["census", "--n", "2", "--d", "7"])
    assert code == 0
    row1 = [ln for ln in text.splitlines() if ln.startswith("1,")][0]
    fields = row1.split(",")
    assert fields[1] == "14" and fields[2] == "14"
    assert Fraction(fields[3]) == Fraction(686, 6706)
    lo, hi = Fraction(fields[4]), Fraction(fields[5])
    assert 0 < lo <= hi < 1 and hi - lo < Fraction(1, 10 ** 6)


def test_flow_modes_agree(tmp_path):
    _, a = run(tmp_path, "fa.csv", ["flow", "--k", "2", "--mode", "analytic"])
    _, b = run(tmp_path, "fb.csv", ["flow", "--k", "2", "--mode", "exact"])
    ra = a.splitlines()[-1].split(",")
    rb = b.splitlines()[-1].split(",")
    assert ra[1:] == rb[1:]
    assert Fraction(ra[5]) == Fraction(18361, 486)


def test_resist_csv(tmp_path):
    code, text = run(tmp_path, "r.csv", ["resist", "--K", "2", "--tol", "1e-10"])
    assert code == 0
    rows = text.splitlines()
    header = rows[rows.index("K,k,R,residual,iters")]
    data = rows[rows.index(header) + 1:]
    assert len(data) == 1
    fields = data[0].split(",")
    assert fields[0] == "2" and fields[1] == "1"
    assert float(fields[2]) > 0
    assert float(format(float(fields[2]), ".17g")) == float(fields[2])


def test_walk_requires_seed():
    assert main(["walk", "--n", "2"]) == 2


def test_bad_branching_rejected():
    assert main(["census", "--n", "2", "--d", "6"]) == 2


def test_unknown_flag_exits_2():
    assert main(["build", "--bogus"]) == 2


def test_budget_exit_code(tmp_path):
    code = main(["build", "--K", "4", "--budget", "1000",
                 "--out", str(tmp_path / "x")])
    assert code == 3


def test_export_requires_out():
    assert main(["export", "--K", "2"]) == 2


@pytest.mark.parametrize("argv", [
    ["walk", "--n", "2", "--seed", "3", "--runs", "200", "--horizon", "2000"],
    ["mtp", "--n", "1", "--seed", "9", "--count", "4", "--r", "1"],
    ["lwc", "--n1", "1", "--n2", "1", "--seed", "4", "--r", "1"],
    ["delta", "--k", "1", "--mode", "sampled", "--seed", "2",
     "--quadruples", "500"],
    ["build", "--r", "1", "--seed", "17"],
])
def test_stochastic_determinism(tmp_path, argv):
    _, a = run(tmp_path, "a.out", argv)
    _, b = run(tmp_path, "b.out", argv)
    assert a is not None and a == b


def test_walk_output_parses(tmp_path):
    import csv
    code, text = run(tmp_path, "w.csv", ["walk", "--n", "2", "--seed", "3",
                                         "--runs", "300", "--horizon", "3000"])
    assert code == 0
    row = next(csv.reader([text.splitlines()[-1]]))
    assert row[0].startswith("e:") and int(row[1]) == 300
    assert int(row[3]) <= 300
    assert 0.0 <= float(row[4]) <= 1.0


def test_mtp_output_exact_equalities(tmp_path):
    code, text = run(tmp_path, "m.csv", ["mtp", "--n", "1", "--seed", "7",
                                         "--count", "5", "--r", "1"])
    assert code == 0
    rows = [ln for ln in text.splitlines() if ln and ln[0].isdigit()]
    assert len(rows) == 5
    for row in rows:
        idx, lhs, rhs, equal = row.split(",")
        assert Fraction(lhs) == Fraction(rhs) and equal == "1"
