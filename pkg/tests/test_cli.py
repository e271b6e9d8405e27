import json
import subprocess
import sys

import pytest

from kervature import suite as st
from kervature.cli import main

K0 = '{"type": "paper-k0"}'
SZEGO = '{"type": "szego"}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kernel_eval(capsys):
    code, out, _ = run(capsys, "kernel", "eval", "--kernel", K0, "--z", "0", "--w", "0", "--order", "1")
    assert code == 0
    d = json.loads(out)
    assert d["value"] == {"re": "8.0", "im": "0.0"}
    entries = {(tuple(e["a"]), tuple(e["b"])): e["value"] for e in d["jet"]}
    assert entries[((1,), (1,))] == {"re": "16.0", "im": "0.0"}


def test_kernel_from_file(capsys, tmp_path):
    p = tmp_path / "k.json"
    p.write_text(SZEGO)
    for arg in (str(p), "@" + str(p)):
        code, out, _ = run(capsys, "kernel", "eval", "--kernel", arg, "--z", "0.5", "--w", "0.5")
        assert code == 0 and json.loads(out)["value"]["re"] == repr(1 / 0.75)


def test_psd_check(capsys):
    sample = '{"recipe": "radial-grid", "radii": [0.2, 0.5], "angles": 4}'
    code, out, _ = run(capsys, "psd", "check", "--kernel", K0, "--sample", sample, "--quantity", "one-minus-q")
    assert code == 0
    d = json.loads(out)
    assert d["is_nnd"] is False and d["size"] == 8


def test_curvature_grid_szego(capsys):
    code, out, _ = run(capsys, "curvature", "grid", "--kernel", SZEGO, "--quantity", "curvature")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert len(rows) == 5
    for row in rows:
        r = float(row[0])
        assert float(row[2]) == pytest.approx(-1 / (1 - r * r) ** 2, rel=1e-13)


def test_constant_gaussian_grid_is_zero(capsys):
    code, out, _ = run(capsys, "curvature", "grid", "--kernel", '{"type": "constant"}', "--quantity", "gaussian")
    assert code == 0
    assert all(float(v) == 0 for line in out.splitlines()[1:] for v in line.split(",")[2:])


def test_k0_margin_grid_nonpositive(capsys, tmp_path):
    out_file = tmp_path / "grid.csv"
    code, _, _ = run(capsys, "curvature", "grid", "--kernel", K0, "--quantity", "margin",
                     "--radii", "0.1,0.5,0.9", "--angles", "4", "--output", str(out_file))
    assert code == 0
    rows = out_file.read_text().splitlines()[1:]
    assert len(rows) == 12 and all(float(r.split(",")[2]) <= 0 for r in rows)


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "contractivity", "--kernel", K0)
    assert code == 1 and json.loads(out)["status"] == "fail"
    code, out, _ = run(capsys, "verify", "curvature-inequality", "--kernel", K0)
    assert code == 0
    code, out, _ = run(capsys, "verify", "gaussian-monotonicity", "--kernel", K0, "--kernel2", SZEGO)
    assert code == 0
    code, out, _ = run(capsys, "verify", "derivative-bound", "--kernel", SZEGO, "--f", "1,2j,0.5")
    assert code == 0


def test_decompose_limit(capsys):
    code, out, _ = run(capsys, "decompose", "limit", "--kernel", SZEGO, "--alpha", "1", "--beta", "1", "--z", "0")
    assert code == 0
    assert float(json.loads(out)["extrapolated"]) == pytest.approx(0.5, abs=1e-4)


def test_bad_input_exits_two(capsys):
    code, _, err = run(capsys, "kernel", "eval", "--kernel", '{"type": "power", "alpha": 0, "children": [{"type": "szego"}]}',
                       "--z", "0", "--w", "0")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "kernel", "eval", "--kernel", SZEGO, "--z", "1.5", "--w", "0")
    assert code == 2
    code, _, _ = run(capsys, "suite", "run", "--config", "no-such-suite")
    assert code == 2


def test_empty_suite(capsys, tmp_path):
    cfg = tmp_path / "empty.json"
    cfg.write_text('{"kernels": {}, "checks": []}')
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "suite", "run", "--config", str(cfg), "--output", str(out_dir))
    assert code == 0
    assert not out_dir.exists()


def test_expected_failure_is_green(capsys, tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({
        "kernels": {"k0": {"type": "paper-k0"}},
        "checks": [{"name": "contractivity", "kernel": "k0", "expect": "fail"},
                   {"name": "curvature-inequality", "kernel": "k0", "expect": "fail"}],
    }))
    code, out, _ = run(capsys, "suite", "run", "--config", str(cfg), "--output", str(tmp_path / "o"), "--format", "both")
    assert code == 1
    assert "1/2 checks matched" in out
    files = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert files == ["000-contractivity-k0.json", "001-curvature-inequality-k0.json", "summary.csv", "summary.json"]


def test_check_errors_are_recorded(tmp_path):
    cfg = st.load_config({
        "kernels": {"c": {"type": "diagonal-series", "coeffs": [0, 1]}},
        "checks": [{"name": "derivative-bound", "kernel": "c", "params": {"f": ["1", "1"]}, "expect": "error"},
                   {"name": "coefficient-nnd", "kernel": "c", "expect": "pass"}],
    })
    res = st.run_suite(cfg, str(tmp_path))
    assert [r["outcome"] for r in res.results] == ["error", "pass"]
    assert res.results[0]["report"]["error"]["type"] == "DegenerateError"
    assert res.exit_code == 0


@pytest.mark.parametrize("bad", [
    {"checks": [{"name": "no-such-check"}]},
    {"checks": [{"name": "contractivity", "kernel": "missing"}]},
    {"checks": [{"name": "contractivity", "expect": "maybe"}]},
    {"kernels": {"s": {"type": "szego"}}, "checks": [{"name": "gram-nnd", "kernel": "s", "params": {"tol": 0}}]},
    {"format": "xml"},
])
def test_invalid_configs(bad):
    with pytest.raises(st.SpecError):
        st.load_config(bad)


def test_worker_override(monkeypatch):
    cfg = st.load_config({"workers": 3})
    assert st.worker_count(cfg) == 3
    monkeypatch.setenv("KERVATURE_WORKERS", "1")
    assert st.worker_count(cfg) == 1


def test_results_independent_of_worker_count(tmp_path, monkeypatch):
    outputs = []
    for workers in ("1", "4"):
        monkeypatch.setenv("KERVATURE_WORKERS", workers)
        d = tmp_path / workers
        st.run_suite(st.read_config("paper-suite"), str(d))
        outputs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outputs[0] == outputs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kervature", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "suite" in proc.stdout
