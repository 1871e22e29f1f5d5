import csv
import io
import json
import math

import pytest

from artifact.cli import COLUMNS, build_config, main, run_cells


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_rw_example_rows(capsys):
    code, out, _ = run(capsys, "teo", "--model", "rw", "--mode", "3,4,5", "--t", "1", "--methods", "model-exact,oracle")
    assert code == 0
    rows = rows_of(out)
    assert [r["method"] for r in rows] == ["model-exact", "oracle"]
    assert float(rows[0]["err_vs_ref"]) == 0
    assert float(rows[1]["err_vs_ref"]) <= 1e-8


def test_identity_row_at_start_time(capsys):
    code, out, _ = run(capsys, "teo", "--model", "stiff", "--tA", "0.5", "--mode", "1,2,3", "--t", "0.5", "--methods", "closed")
    row = rows_of(out)[0]
    assert (float(row["k11_re"]), float(row["k11_im"]), float(row["k12_re"]), float(row["k12_im"])) == (1, 0, 0, 0)
    assert float(row["defect"]) == 0


def test_header_and_roundtrip(capsys):
    _, out, _ = run(capsys, "teo", "--model", "kasner", "--mode", "0.3,0.4,2", "--t", "1.5", "--methods", "oracle")
    assert out.splitlines()[0] == ",".join(COLUMNS)
    row = rows_of(out)[0]
    # 17 significant digits round-trip bit-exactly through float()
    for key in ("k11_re", "k11_im", "k12_re", "k12_im"):
        assert repr(float(row[key])) == repr(float(f"{float(row[key]):.17g}"))
    assert row["wall_us"] == ""


def test_threads_are_byte_identical(capsys):
    args = ["sweep", "--model", "stiff", "--k1", "0.1:0.5:3", "--k2", "0.2", "--k3", "1:3:2", "--t", "0.5,1.5", "--methods", "oracle,closed"]
    _, one, _ = run(capsys, *args, "--threads", "1")
    _, four, _ = run(capsys, *args, "--threads", "4")
    assert one == four
    assert len(rows_of(one)) == 3 * 2 * 2 * 2


def test_seeded_random_sweep_reproducible(capsys):
    args = ["sweep", "--model", "rw", "--random", "4", "--k-max", "3", "--t", "1", "--methods", "model-exact", "--seed", "7"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b and len(rows_of(a)) == 4


def test_json_output(capsys):
    _, out, _ = run(capsys, "teo", "--model", "rw", "--mode", "1,1,1", "--t", "0.5,1", "--methods", "model-exact", "--format", "json")
    doc = json.loads(out)
    assert doc["columns"][: len(COLUMNS)] == list(COLUMNS)
    assert len(doc["rows"]) == 2


def test_schema_independent_of_values(capsys):
    _, a, _ = run(capsys, "teo", "--mu", "1", "--nu", "0.5", "--mode", "1,1,1", "--t", "1", "--methods", "closed")
    _, b, _ = run(capsys, "teo", "--mu", "1", "--nu", "0.5", "--mode", "1,1,0", "--t", "1", "--methods", "closed")
    assert a.splitlines()[0] == b.splitlines()[0]


def test_row_errors_do_not_abort(capsys):
    code, out, err = run(capsys, "teo", "--mu", "1", "--nu", "0.5", "--mode", "1,1,0", "--mode", "1,1,1", "--t", "1", "--methods", "closed")
    assert code == 0
    assert "row error" in err
    rows = rows_of(out)
    assert math.isnan(float(rows[0]["k11_re"])) and math.isfinite(float(rows[1]["k11_re"]))
    code, _, _ = run(capsys, "teo", "--mu", "1", "--nu", "0.5", "--mode", "1,1,0", "--t", "1", "--methods", "closed")
    assert code == 1


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "rw", "modes": [[3, 4, 5]], "times": [1.0], "methods": ["model-exact", "oracle"]}))
    _, out, _ = run(capsys, "teo", "--config", str(cfg))
    assert len(rows_of(out)) == 2
    _, out, _ = run(capsys, "teo", "--config", str(cfg), "--methods", "model-exact")
    assert [r["method"] for r in rows_of(out)] == ["model-exact"]


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "o.csv"
    run(capsys, "teo", "--model", "rw", "--mode", "1,2,3", "--t", "1", "--methods", "model-exact", "--out", str(dest))
    assert dest.read_text().splitlines()[0] == ",".join(COLUMNS)


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["teo", "--model", "rw", "--nu", "0.3", "--mode", "1,1,1", "--t", "1"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["teo", "--model", "rw", "--mode", "1,1,1", "--t", "1", "--methods", "magic"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["verify", "no-such-suite"])
    assert e.value.code == 2


def test_models_listing(capsys):
    code, out, _ = run(capsys, "models")
    assert code == 0
    names = [line.split()[0] for line in out.splitlines()]
    assert names == ["rw", "stiff", "kasner", "conformal"]


def test_verify_kasner_prints_quotient(capsys):
    code, out, _ = run(capsys, "verify", "kasner")
    assert "Kasner matching quotient 1.042817" in out
    assert code == 0


def test_tau_grid_converts_per_mode():
    cfg = build_config({"model": "stiff", "modes": [[0.1, 0.1, 10.0], [0.1, 0.1, 5.0]], "taus": [20.0], "methods": ["closed"]})
    ts = [t for _, t in cfg.cells]
    assert ts == pytest.approx([1.0, 2.0])


def test_stiff_closed_vs_appendix_ladder():
    """err_vs_ref of the large-time stiff form against the closed form on a tau ladder."""
    cfg = build_config({"model": "stiff", "modes": [[0.3, 0.4, 10.0]], "taus": [20.0, 40.0, 80.0], "methods": ["closed", "appendix"]})
    errs = [r.err_vs_ref for r in run_cells(cfg) if r.method == "appendix"]
    assert errs[0] > errs[1] > errs[2]


def test_stiff_closed_vs_appendix_moduli():
    cfg = build_config({"model": "stiff", "modes": [[0.3, 0.4, 10.0]], "taus": [20.0, 40.0, 80.0], "methods": ["closed", "appendix"]})
    rows = run_cells(cfg)
    eta = 0.25 / 20.0
    for c, a in zip(rows[::2], rows[1::2]):
        assert abs(abs(a.teo.k12) - abs(c.teo.k12)) <= 2 * eta
        assert abs(abs(a.teo.k11) - abs(c.teo.k11)) <= 2 * eta
