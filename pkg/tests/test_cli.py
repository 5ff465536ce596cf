import json
import os

import pytest

from pachsel import io as pio
from pachsel.cli import main


def run(args):
    return main([str(a) for a in args])


@pytest.fixture
def workdir(tmp_path):
    return tmp_path


def test_gen_select_verify_roundtrip(workdir):
    pts = workdir / "pts.json"
    cert = workdir / "cert.json"
    assert run(["gen", "--dim", 2, "--shape", "uniform-ball", "--n", 8, "--seed", 2, "--out", pts]) == 0
    assert run(["select", "--in", pts, "--out", cert, "--seed", 5]) == 0
    assert run(["verify", "--in", pts, "--cert", cert, "--exhaustive"]) == 0
    assert run(["verify", "--in", pts, "--cert", cert, "--arrangement"]) == 0
    # round-trip: everything we wrote is re-parseable by the same build
    ps = pio.pointset_from_json_dict(pio.load_json(pts))
    assert ps.sizes() == (8, 8, 8)
    from pachsel.selection import PachCertificate

    parsed = PachCertificate.from_json_dict(pio.load_json(cert))
    assert parsed.verified == "exhaustive"
    assert parsed.input_sha256 == pio.pointset_sha256(ps)


def test_gen_grid_ball_writes_sandwich_summary(workdir, capsys):
    pts = workdir / "g.json"
    assert run(["gen", "--dim", 1, "--shape", "grid-ball", "--eps", "1/5", "--seed", 0, "--out", pts]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["n_per_color"] == [10, 10]
    assert summary["count_sandwich"]["holds"]


def test_gen_measure_file(workdir):
    measure = workdir / "m.json"
    pio.dump_json(
        {
            "dim": 1,
            "colors": [
                [{"point": ["0"], "weight": "1/2"}, {"point": ["1"], "weight": "1/2"}],
                [{"point": ["1/2"], "weight": "1"}],
            ],
        },
        measure,
    )
    pts = workdir / "m_pts.json"
    assert (
        run(
            [
                "gen", "--dim", 1, "--shape", "measure-file", "--measure-file", measure,
                "--spread", "1/64", "--seed", 1, "--out", pts,
            ]
        )
        == 0
    )
    ps = pio.pointset_from_json_dict(pio.load_json(pts))
    assert ps.sizes() == (2, 2)


def test_select_unequal_sizes_replicates_and_dedupes(workdir, capsys):
    pts = workdir / "uneq.json"
    pio.dump_json(
        {
            "dim": 1,
            "exact": True,
            "colors": [
                [["0"], ["1"], ["2"]],
                [["10"], ["11"]],
            ],
        },
        pts,
    )
    cert = workdir / "uneq_cert.json"
    assert run(["select", "--in", pts, "--out", cert, "--seed", 3]) == 0
    data = pio.load_json(cert)
    assert any(s.get("stage") == "deduplicate" for s in data["stages"])
    sizes = [3, 2]
    for ci, idxs in enumerate(data["Y"]):
        assert idxs and all(0 <= i < sizes[ci] for i in idxs)
    # the deduplicated certificate holds for the *original* points
    assert run(["verify", "--in", pts, "--cert", cert, "--exhaustive"]) == 0


def test_select_accepts_float_point_sets(workdir):
    pts = workdir / "float.json"
    pio.dump_json(
        {
            "dim": 1,
            "exact": False,
            "colors": [[[0.125], [1.5], [3.75]], [[0.5], [2.25], [5.0]]],
        },
        pts,
    )
    cert = workdir / "float_cert.json"
    assert run(["select", "--in", pts, "--out", cert, "--seed", 2]) == 0
    assert run(["verify", "--in", pts, "--cert", cert, "--exhaustive"]) == 0


def test_verify_detects_mutation(workdir):
    pts = workdir / "p.json"
    cert = workdir / "c.json"
    assert run(["gen", "--dim", 1, "--shape", "uniform-ball", "--n", 6, "--seed", 7, "--out", pts]) == 0
    assert run(["select", "--in", pts, "--out", cert, "--seed", 1]) == 0
    data = pio.load_json(cert)
    data["p"] = ["100"]
    bad = workdir / "bad.json"
    pio.dump_json(data, bad)
    assert run(["verify", "--in", pts, "--cert", bad]) == 5


def test_exit_codes(workdir):
    garbage = workdir / "garbage.json"
    garbage.write_text("{oops")
    assert run(["verify", "--in", garbage, "--cert", garbage]) == 2
    assert run(["bounds", "--dims", "zzz"]) == 2
    assert run(["nonsense-command"]) == 2
    # budget: a deep run over an instance too large for exhaustive enumeration
    big = workdir / "big.json"
    n, d = 300, 2
    colors = [[[i * 1.0 + ci * 0.1, (i * i) % 97 * 1.0] for i in range(n)] for ci in range(3)]
    pio.dump_json({"dim": d, "exact": False, "colors": colors}, big)
    assert run(["deep", "--in", big, "--seed", 0]) == 4
    # precondition: measure dimension mismatch
    m = workdir / "m.json"
    pio.dump_json({"dim": 2, "colors": [[], [], []]}, m)
    assert (
        run(
            ["gen", "--dim", 1, "--shape", "measure-file", "--measure-file", m, "--out", workdir / "x.json"]
        )
        == 3
    )


def test_bounds_csv(workdir, capsys):
    out = workdir / "bounds.csv"
    assert run(["bounds", "--dims", "1..6", "--out", out]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].split(",") == [
        "d", "u", "g", "lower_bound_exponent", "rho_d_asymptotic", "csup_exact",
    ]
    assert len(lines) == 7
    first = lines[1].split(",")
    assert first[0] == "1" and first[3] == "4" and first[5] == "1/2"
    d3 = lines[3].split(",")
    assert d3[0] == "3" and d3[3] == "18"
    assert abs(float(d3[1]) - 0.44127) < 1e-4


def test_angle_command(workdir, capsys):
    simplex = workdir / "s.json"
    pio.dump_json({"vertices": [[0, 0], [1, 0], [0, 1]]}, simplex)
    out = workdir / "angle.json"
    assert run(["angle", "--simplex", simplex, "--vertex", 0, "--samples", 50_000, "--seed", 4, "--out", out]) == 0
    data = pio.load_json(out)
    assert abs(data["mean"] - 0.25) < 0.01


def test_deep_command(workdir, capsys):
    pts = workdir / "p.json"
    assert run(["gen", "--dim", 1, "--shape", "uniform-ball", "--n", 6, "--seed", 8, "--out", pts]) == 0
    assert run(["deep", "--in", pts, "--seed", 2, "--random-candidates", 20]) == 0
    data = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert data["total"] == 36
    assert 0 <= data["depth"] <= 36


def test_bench_records_and_aggregate(workdir):
    out_dir = workdir / "bench"
    assert run(["bench", "--dims", "1", "--n", 6, "--instances", 2, "--seed", 3, "--out-dir", out_dir]) == 0
    files = sorted(os.listdir(out_dir))
    records = [f for f in files if f != "aggregate.csv"]
    assert len(records) == 2
    agg = (out_dir / "aggregate.csv").read_text().splitlines()
    assert agg[0].split(",")[0] == "dim"
    assert len(agg) == 3
    rec = pio.load_json(out_dir / records[0])
    assert rec["outputs"]["certificate"]["verified"] == "exhaustive"
    assert "timestamp" in rec


def _file_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_byte_identical_determinism(workdir):
    # one command per module: gen, select, deep, angle, bounds
    a, b = workdir / "a", workdir / "b"
    a.mkdir(), b.mkdir()
    for target in (a, b):
        assert run(["gen", "--dim", 2, "--shape", "grid-ball", "--eps", "1/2", "--seed", 11, "--out", target / "pts.json"]) == 0
        assert run(["select", "--in", target / "pts.json", "--out", target / "cert.json", "--seed", 11]) == 0
        assert run(["deep", "--in", target / "pts.json", "--seed", 11, "--out", target / "deep.json"]) == 0
        simplex = target / "s.json"
        pio.dump_json({"vertices": [[0, 0], [1, 0], [0, 1]]}, simplex)
        assert run(["angle", "--simplex", simplex, "--samples", 20_000, "--seed", 11, "--out", target / "angle.json"]) == 0
        assert run(["bounds", "--dims", "1..4", "--out", target / "bounds.csv"]) == 0
    for name in ("pts.json", "cert.json", "deep.json", "angle.json", "bounds.csv"):
        assert _file_bytes(a / name) == _file_bytes(b / name), name


def test_bench_record_hash_excludes_timestamp(workdir):
    d1, d2 = workdir / "r1", workdir / "r2"
    assert run(["bench", "--dims", "1", "--n", 5, "--instances", 1, "--seed", 9, "--out-dir", d1]) == 0
    assert run(["bench", "--dims", "1", "--n", 5, "--instances", 1, "--seed", 9, "--out-dir", d2]) == 0
    r1 = [f for f in os.listdir(d1) if f != "aggregate.csv"]
    r2 = [f for f in os.listdir(d2) if f != "aggregate.csv"]
    assert r1 == r2  # content-addressed names identical despite timestamps
