from __future__ import annotations

import json
from pathlib import Path

import pytest

from kacflow import cli
from kacflow.linsys import LemmaReport

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("mode,count", [("mixed", 16), ("flat", 12)])
def test_tables(capsys, mode, count):
    code, out, _ = _run(capsys, "tables", "--mode", mode)
    assert code == 0
    assert out.strip().splitlines()[-1] == f"# {count}/{count} coefficients match the transcription"
    assert "MISMATCH" not in out


def test_tables_other_size_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["tables", "--n1", "3"])
    assert exc.value.code == 2


def _verify(capsys, *extra):
    code, out, _ = _run(capsys, "verify", *extra)
    lines = [json.loads(x) for x in out.splitlines()]
    return code, out, lines


def test_verify_mixed_22(capsys):
    code, _, lines = _verify(capsys)
    assert code == 0
    assert lines[0]["schema"] == cli.SCHEMA
    summary = lines[-1]["summary"]
    assert summary["failed"] == 0
    assert set(summary["paper_discrepancies"]) == {"block_table", "kronecker_mixed_product"}
    ids = [l["lemma_id"] for l in lines[1:-1]]
    for want in ("kac_spectrum", "recurrence", "m_singular", "m_rank", "cramer_consistency", "x0_recovery"):
        assert want in ids
    assert all(l["elapsed_ms"] is None for l in lines[1:-1])


def test_verify_flat_odd_skips_clauses(capsys):
    code, _, lines = _verify(capsys, "--mode", "flat", "--n2", "3", "--tau-samples", "4")
    assert code == 0
    summary = lines[-1]["summary"]
    assert summary["failed"] == 0
    ids = {l.get("lemma_id") for l in lines}
    assert "m_singular" not in ids and "m_rank" not in ids
    assert "generalized_eigvec" in ids


def test_verify_is_deterministic(capsys, monkeypatch):
    _, first, _ = _verify(capsys, "--tau-samples", "5")
    _, second, _ = _verify(capsys, "--tau-samples", "5", "--jobs", "3")
    assert first == second
    monkeypatch.setenv("KACFLOW_SEED", "12345")
    _, third, lines = _verify(capsys, "--tau-samples", "5")
    assert lines[0]["seed"] == 12345 and third != first


def test_verify_timing_flag(capsys):
    _, _, lines = _verify(capsys, "--tau-samples", "3", "--timing")
    assert all(isinstance(l["elapsed_ms"], float) for l in lines[1:-1])


def test_verify_failure_exit_code(capsys, monkeypatch):
    real = cli.build_jobs

    def with_broken(cfg):
        bad = LemmaReport("kac_spectrum", {}, "failed", {"why": "injected"})
        return real(cfg)[1:] + [("kac_spectrum", lambda: bad)]

    monkeypatch.setattr(cli, "build_jobs", with_broken)
    code, _, lines = _verify(capsys, "--tau-samples", "3")
    assert code == 1
    assert lines[-1]["summary"]["failed_ids"] == ["kac_spectrum"]


def test_verify_caps(capsys):
    code, out, err = _run(capsys, "verify", "--n1", "9", "--n2", "9")
    assert code == 2 and "CapExceeded" in err and out == ""
    code, _, err = _run(capsys, "verify", "--n1", "1")
    assert code == 2 and "BadDimension" in err


def test_verify_output_file(capsys, tmp_path):
    dest = tmp_path / "out.jsonl"
    code, out, _ = _run(capsys, "verify", "--tau-samples", "3", "-o", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text().splitlines()[-1])["summary"]["failed"] == 0


def _geometry_trailer(out):
    tail = {}
    for line in out.splitlines():
        if line.startswith("# "):
            key, *vals = line[2:].split(",")
            tail[key] = [float(v) for v in vals]
    return tail


@pytest.mark.parametrize("name", ["bihorospherical.txt", "flat_horospherical.txt"])
def test_geometry_horospherical(capsys, name):
    code, out, _ = _run(capsys, "geometry", str(CONFIGS / name))
    assert code == 0
    tail = _geometry_trailer(out)
    assert tail["max_theta_deviation"][0] == 0.0
    assert tail["max_H_deviation"][0] < 1e-12
    assert max(tail["trace_identity_residuals"]) < 1e-6
    assert len([l for l in out.splitlines() if not l.startswith("#")]) == 42


def test_geometry_sphere_control(capsys):
    code, out, _ = _run(capsys, "geometry", str(CONFIGS / "sphere_base.txt"))
    assert code == 0
    assert _geometry_trailer(out)["max_H_deviation"][0] > 1e-2


def test_geometry_focal_point(capsys, tmp_path):
    spec = tmp_path / "focal.txt"
    spec.write_text("eps1 = 0\neps2 = -1\nn1 = 2\nn2 = 2\nbase1 = 1\nphi_a = 1\ns_min = 0\ns_max = 2\nsteps = 3\n")
    code, _, err = _run(capsys, "geometry", str(spec))
    assert code == 1 and "focal" in err


def test_geometry_bad_inputs(capsys, tmp_path):
    spec = tmp_path / "bad.txt"
    spec.write_text("eps1 -1\n")
    code, _, err = _run(capsys, "geometry", str(spec))
    assert code == 2 and "BadConfig" in err
    code, _, err = _run(capsys, "geometry", str(tmp_path / "missing.txt"))
    assert code == 2
