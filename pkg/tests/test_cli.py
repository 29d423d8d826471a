"""Command-line surface: exit codes, artifacts, manifests, determinism."""

import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

import acforms.cli as cli_module
from acforms.cli import EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, EXIT_REFUTED, main
from acforms.construct import Instance, build
from acforms.decide import DeciderOutcome, genericity_guard
from acforms.ideals import TruncatedIdeal
from acforms.linalg import verify_farkas
from acforms.poly import OneForm
from acforms.serialize import (certificate_from_json, dump_json,
                               ideal_to_json, instance_to_json, load_json,
                               one_form_to_json, series_to_json,
                               sha256_of_payload, system_from_json)
from conftest import S, form, series_x, zero_series

FR = Fraction


def _write(path: Path, payload: dict) -> str:
    return dump_json(str(path), payload)


def _gradient_sigma_payload(trunc=8):
    sigma = form(S(2, trunc, {2: {(2, 0): 1}}), S(2, trunc, {2: {(0, 2): 1}}))
    return one_form_to_json(sigma)


def _const_series_payload(value, trunc=3):
    return series_to_json(S(2, trunc, {0: {(0, 0): value}}) if value
                          else zero_series(trunc))


@pytest.fixture(scope="module")
def refuted_run(tmp_path_factory):
    """One guard-passing d=18 refutation driven end to end through the CLI."""
    root = tmp_path_factory.mktemp("refuted")
    C = series_x(3)
    D = zero_series(3)
    chosen = None
    for seed in range(1, 30):
        sigma, _ = build(Instance(d=18, N=22, C=C, D=D, seed=seed))
        if genericity_guard(sigma).passed:
            chosen = seed
            break
    assert chosen is not None
    instance_path = root / "instance.json"
    _write(instance_path, instance_to_json(Instance(d=18, N=22, C=C, D=D, seed=chosen)))
    build_dir = root / "build"
    assert main(["build", str(instance_path), "--out", str(build_dir)]) == EXIT_OK
    sigma_path = build_dir / "sigma.json"
    out1, out2 = root / "out1", root / "out2"
    code1 = main(["decide", str(sigma_path), "--order", "21", "--out", str(out1)])
    code2 = main(["decide", str(sigma_path), "--order", "21", "--out", str(out2)])
    return {"root": root, "sigma": sigma_path, "build_dir": build_dir,
            "out1": out1, "out2": out2, "codes": (code1, code2)}


# --- build ---------------------------------------------------------------------


def test_build_writes_artifacts_and_manifest(tmp_path, capsys):
    inst = Instance(d=3, N=7, C=S(2, 3, {0: {(0, 0): 1}}), D=zero_series(3), seed=5)
    instance_path = tmp_path / "instance.json"
    _write(instance_path, instance_to_json(inst))
    out = tmp_path / "run"
    assert main(["build", str(instance_path), "--out", str(out)]) == EXIT_OK
    manifest = load_json(str(out / "manifest.json"))
    assert manifest["kind"] == "run_manifest"
    assert manifest["command"] == "build"
    assert set(manifest["outputs"]) == {"sigma.json", "log.json"}
    for name, entry in manifest["outputs"].items():
        blob = (out / name).read_bytes()
        import hashlib
        assert hashlib.sha256(blob).hexdigest() == entry["sha256"]
        payload = json.loads(blob)
        assert payload["manifest_sha256"] == manifest["core_sha256"]
    log = load_json(str(out / "log.json"))
    assert log["kind"] == "construction_log"
    assert log["d"] == 3 and log["N"] == 7 and log["seed"] == 5
    assert set(log["norms"]) == {str(k) for k in range(3, 7)}
    stdout = capsys.readouterr().out.strip().splitlines()[-1]
    assert json.loads(stdout)["kind"] == "one_form"


def test_build_rejects_invalid_instance(tmp_path, capsys):
    payload = {"kind": "instance", "d": 1, "N": 7,
               "C": series_to_json(zero_series(3)),
               "D": series_to_json(zero_series(3)), "seed": 1}
    path = tmp_path / "bad.json"
    _write(path, payload)
    assert main(["build", str(path)]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_missing_input_file_is_reported(tmp_path, capsys):
    assert main(["decide", str(tmp_path / "absent.json"), "--order", "4"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


# --- verify-ac -------------------------------------------------------------------


def test_verify_ac_pass_and_fail(tmp_path):
    inst = Instance(d=3, N=7, C=S(2, 3, {0: {(0, 0): 1}}), D=zero_series(3), seed=5)
    sigma, _ = build(inst)
    sp = tmp_path / "sigma.json"
    cp = tmp_path / "c.json"
    dp = tmp_path / "d.json"
    _write(sp, one_form_to_json(sigma))
    _write(cp, series_to_json(inst.C))
    _write(dp, series_to_json(inst.D))
    out = tmp_path / "ok"
    assert main(["verify-ac", str(sp), str(cp), str(dp), "--out", str(out)]) == EXIT_OK
    report = load_json(str(out / "report.json"))
    assert report["ok"] is True and report["failing_degrees"] == []

    bad = form(S(2, 3, {1: {(0, 1): 1}}), zero_series(3))    # y dx is not almost closed for C = D = 0
    bp = tmp_path / "bad_sigma.json"
    _write(bp, one_form_to_json(bad))
    cz = tmp_path / "cz.json"
    _write(cz, series_to_json(zero_series(3)))
    out2 = tmp_path / "fail"
    assert main(["verify-ac", str(bp), str(cz), str(cz), "--out", str(out2)]) == EXIT_REFUTED
    report = load_json(str(out2 / "report.json"))
    assert report["ok"] is False and report["first_failure"] == 0


# --- decide ----------------------------------------------------------------------


def test_decide_feasible_emits_witness_and_verifies(tmp_path, capsys):
    sp = tmp_path / "sigma.json"
    _write(sp, _gradient_sigma_payload())
    out = tmp_path / "run"
    assert main(["decide", str(sp), "--order", "5", "--out", str(out)]) == EXIT_OK
    outcome = load_json(str(out / "outcome.json"))
    assert outcome["verdict"] == "feasible_up_to_M"
    assert outcome["guard"]["passed"] is True
    assert not (out / "certificate.json").exists()
    phi = load_json(str(out / "phi.json"))
    assert phi["kind"] == "potential_witness"
    # the emitted candidate re-verifies through the standalone command
    code = main(["verify-potential", str(out / "phi.json"), str(sp), "--order", "5"])
    assert code == EXIT_OK
    capsys.readouterr()


def test_decide_refuted_exits_10_with_certificate(refuted_run):
    assert refuted_run["codes"] == (EXIT_REFUTED, EXIT_REFUTED)
    outcome = load_json(str(refuted_run["out1"] / "outcome.json"))
    assert outcome["verdict"] == "infeasible"
    assert outcome["failing_degree"] == 20
    assert outcome["branch"] == "forced_degree0"
    staged = outcome["staged"]
    assert [r["feasible"] for r in staged] == [True, True, True, False]


def test_decide_artifacts_are_byte_identical_across_out_dirs(refuted_run):
    for name in ("outcome.json", "certificate.json", "failing_system.json"):
        b1 = (refuted_run["out1"] / name).read_bytes()
        b2 = (refuted_run["out2"] / name).read_bytes()
        assert b1 == b2, name


def test_emitted_certificate_audits_standalone(refuted_run):
    sys_payload = load_json(str(refuted_run["out1"] / "failing_system.json"))
    cert_payload = load_json(str(refuted_run["out1"] / "certificate.json"))
    stamp = sys_payload.pop("manifest_sha256")
    assert stamp == cert_payload.pop("manifest_sha256")
    # the certificate names the exact system payload it refutes (pre-stamp)
    assert cert_payload["system_sha256"] == sha256_of_payload(sys_payload)
    system = system_from_json(sys_payload)
    certificate = certificate_from_json(cert_payload)
    assert verify_farkas(system, certificate)


def test_decide_degenerate_exit_code(tmp_path, monkeypatch, capsys):
    sp = tmp_path / "sigma.json"
    _write(sp, _gradient_sigma_payload())
    fake = DeciderOutcome(verdict="degenerate", order=5, lowest_degree=2)
    monkeypatch.setattr(cli_module, "decide", lambda sigma, order: fake)
    assert main(["decide", str(sp), "--order", "5"]) == EXIT_DEGENERATE
    capsys.readouterr()


def test_decide_order_beyond_truncation_is_input_error(tmp_path, capsys):
    sp = tmp_path / "sigma.json"
    _write(sp, _gradient_sigma_payload())
    assert main(["decide", str(sp), "--order", "8"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_decide_text_format_prints_staged_table(tmp_path, capsys):
    sp = tmp_path / "sigma.json"
    _write(sp, _gradient_sigma_payload())
    assert main(["decide", str(sp), "--order", "5", "--format", "text"]) == EXIT_OK
    text = capsys.readouterr().out
    assert "verdict: feasible_up_to_M" in text
    assert "block 0 dim" in text


# --- obstruction, tilde, converge-bound --------------------------------------------


def test_obstruction_and_tilde_commands(tmp_path, capsys):
    cp = tmp_path / "c.json"
    dp = tmp_path / "d.json"
    _write(cp, series_to_json(S(2, 2, {0: {(0, 0): 2}, 1: {(1, 0): 1}})))
    _write(dp, series_to_json(S(2, 2, {0: {(0, 0): 3}})))
    out = tmp_path / "obs"
    assert main(["obstruction", str(cp), str(dp), "--out", str(out)]) == EXIT_OK
    assert load_json(str(out / "obstruction.json"))["value"] == "1"
    out2 = tmp_path / "tilde"
    assert main(["tilde", str(cp), str(dp), "--out", str(out2)]) == EXIT_OK
    tilde = load_json(str(out2 / "tilde.json"))
    assert tilde["C1_tilde"] == {"x": "7", "y": "-4"}
    assert tilde["D1_tilde"] == {"x": "9", "y": "-6"}
    assert tilde["obstruction"] == "1"
    capsys.readouterr()


def test_converge_bound_command(tmp_path, capsys):
    cp = tmp_path / "c.json"
    dp = tmp_path / "d.json"
    _write(cp, series_to_json(S(2, 2, {0: {(0, 0): 1}, 1: {(1, 0): 1}})))    # 1 + x
    _write(dp, series_to_json(zero_series(2)))
    assert main(["converge-bound", str(cp), str(dp)]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out.strip())
    assert payload["magnitude"] == "2"
    assert payload["growth_ratio"] == "16"
    assert payload["radius_lower_bound"] == "1/16"


# --- ideal commands -----------------------------------------------------------------


def _square_ideal_payload(trunc=8):
    return ideal_to_json(TruncatedIdeal((S(2, trunc, {2: {(2, 0): 1}}),
                                         S(2, trunc, {2: {(0, 2): 1}}))))


def test_ideal_min_power_and_colength(tmp_path, capsys):
    ip = tmp_path / "ideal.json"
    _write(ip, _square_ideal_payload())
    out = tmp_path / "mp"
    assert main(["ideal", "min-power", str(ip), "--max", "7", "--out", str(out)]) == EXIT_OK
    assert load_json(str(out / "min_power.json"))["value"] == 3
    out2 = tmp_path / "co"
    assert main(["ideal", "colength", str(ip), "--max", "7", "--out", str(out2)]) == EXIT_OK
    assert load_json(str(out2 / "colength.json"))["value"] == 4
    capsys.readouterr()


def test_ideal_not_found_exits_10(tmp_path, capsys):
    payload = ideal_to_json(TruncatedIdeal((S(2, 8, {5: {(5, 0): 1}}),)))
    ip = tmp_path / "principal.json"
    _write(ip, payload)
    assert main(["ideal", "min-power", str(ip), "--max", "7"]) == EXIT_REFUTED
    assert main(["ideal", "colength", str(ip), "--max", "7"]) == EXIT_REFUTED
    assert main(["ideal", "min-power", str(ip), "--max", "9"]) == EXIT_INPUT
    capsys.readouterr()


# --- verify-potential ----------------------------------------------------------------


def test_verify_potential_pass_and_fail(tmp_path, capsys):
    sp = tmp_path / "sigma.json"
    _write(sp, _gradient_sigma_payload())
    good = tmp_path / "phi.json"
    _write(good, series_to_json(S(2, 8, {3: {(3, 0): FR(1, 3), (0, 3): FR(1, 3)}})))
    assert main(["verify-potential", str(good), str(sp), "--order", "6"]) == EXIT_OK
    bad = tmp_path / "wrong.json"
    _write(bad, series_to_json(S(2, 8, {3: {(3, 0): 1}})))
    assert main(["verify-potential", str(bad), str(sp), "--order", "6"]) == EXIT_REFUTED
    capsys.readouterr()


# --- batch ------------------------------------------------------------------------


def _small_instance_payload(seed):
    return instance_to_json(Instance(d=3, N=7, C=S(2, 3, {0: {(0, 0): 1}}),
                                     D=zero_series(3), seed=seed, coeff_bound=1))


def test_batch_mixes_guard_rejections_and_decisions(tmp_path, capsys):
    for seed in (5, 8, 16):
        _write(tmp_path / f"inst_{seed:02d}.json", _small_instance_payload(seed))
    out = tmp_path / "serial"
    pattern = str(tmp_path / "inst_*.json")
    assert main(["batch", pattern, "--out", str(out)]) == EXIT_OK
    summary = load_json(str(out / "summary.json"))
    assert summary["kind"] == "batch_summary"
    assert len(summary["runs"]) == 3
    assert summary["rejected_by_guard"] == 2
    by_seed = {row["seed"]: row for row in summary["runs"]}
    assert by_seed[8]["status"] == "guard_rejected"
    assert "degree0_forcing" in by_seed[8]["guard_failures"]
    assert "leading_pair" in by_seed[16]["guard_failures"]
    assert by_seed[5]["status"] in ("feasible_up_to_M", "infeasible", "degenerate")
    assert sum(summary["counts"].values()) == 3

    out2 = tmp_path / "parallel"
    assert main(["batch", pattern, "--parallel", "2", "--out", str(out2)]) == EXIT_OK
    assert (out / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()
    capsys.readouterr()


def test_batch_empty_glob_is_input_error(tmp_path, capsys):
    assert main(["batch", str(tmp_path / "nothing_*.json")]) == EXIT_INPUT
    assert "no instance files match" in capsys.readouterr().err


# --- module entry point ----------------------------------------------------------


def test_module_invocation_round_trip(tmp_path):
    cp = tmp_path / "c.json"
    dp = tmp_path / "d.json"
    _write(cp, series_to_json(S(2, 2, {1: {(1, 0): 1}})))
    _write(dp, series_to_json(zero_series(2)))
    proc = subprocess.run([sys.executable, "-m", "acforms", "obstruction",
                           str(cp), str(dp)], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout.strip())["value"] == "1"
