import json
import subprocess
import sys

import pytest

from tamenorm import cli


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "tamenorm.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


def run_inproc(args, tmp_path, name="cert.json"):
    out = tmp_path / name
    code = cli.main([*args, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_end_to_end_norm_relation(tmp_path):
    code, cert = run_inproc(
        ["norm-relation", "--n", "1", "--ell", "5", "--disc", "-4",
         "--conductor", "1", "--alpha", "0:1", "0:1"],
        tmp_path,
    )
    assert code == 0
    assert cert["pass"] is True
    assert cert["schema"] == "trc-1"
    eigs = cert["results"]["step5_lfactor"]["level_ellm_chi_decomposition"]["eigenvalue_set"]
    assert sorted(eigs) == ["6/5 + 2/5*s", "6/5 - 2/5*s"]  # P(1), P(-1)
    assert cert["results"]["step4_class_groups"]["big"]["order"] == 2


def test_norm_relation_trivial_variant(tmp_path):
    # ell = 29 has trivial class-group growth direction at disc -4 conductor 1?
    # h(-4 * 29^2) > 1, so instead this checks the reduction to the
    # central value at the small level: the per-chi block at level m is the
    # single trivial character
    code, cert = run_inproc(
        ["norm-relation", "--n", "1", "--ell", "29", "--disc", "-4",
         "--conductor", "1", "--alpha", "0:1", "1:2"],
        tmp_path,
    )
    assert code == 0
    small = cert["results"]["step5_lfactor"]["level_m_group_algebra"]
    assert len(small["per_chi"]) == 1
    assert small["pass"]


def test_negative_control_fails(tmp_path):
    code, cert = run_inproc(
        ["norm-relation", "--n", "1", "--ell", "5", "--disc", "-4",
         "--conductor", "1", "--alpha", "0:1", "0:1", "--perturb-b1"],
        tmp_path,
    )
    assert code == 1
    assert cert["pass"] is False
    assert cert["first_failure"]["stage"] == "step3_phi"


def test_empty_command_usage_exit_2():
    proc = run_cli([])
    assert proc.returncode == 2


def test_config_error_exit_2(tmp_path):
    # ell = 3 is inert in Q(i): configuration error
    code = cli.main(["norm-relation", "--n", "1", "--ell", "3", "--disc", "-4",
                     "--alpha", "0:1", "0:1", "--out", str(tmp_path / "x.json")])
    assert code == 2


def test_coeffs_certificate_and_csv(tmp_path):
    code, cert = run_inproc(["coeffs", "--n", "2", "--ell", "2"], tmp_path)
    assert code == 0
    assert cert["results"]["coefficient_table"]["b"] == [6, -18, 12]
    csv_path = tmp_path / "cert.csv"
    rows = [line.split(",") for line in csv_path.read_text().strip().splitlines()]
    assert rows[0] == ["r", "b_r", "a_r", "index_K_V1r", "nu_image_order"]
    assert [r[1] for r in rows[1:]] == ["6", "-18", "12"]


def test_verify_incl_excl_command(tmp_path):
    code, cert = run_inproc(
        ["verify-incl-excl", "--n", "2", "--ell", "3", "--depth", "2"], tmp_path
    )
    assert code == 0
    assert cert["results"]["inclusion_exclusion"]["pass"]
    assert cert["results"]["measure_identity"]["pass"]


def test_classgroup_command(tmp_path):
    code, cert = run_inproc(["classgroup", "--disc", "-4", "--conductor", "5"], tmp_path)
    assert code == 0
    assert cert["results"]["order"] == 2
    assert sorted(map(tuple, cert["results"]["forms"])) == [(1, 0, 25), (2, 2, 13)]


def test_tower_command(tmp_path):
    code, cert = run_inproc(["tower", "--disc", "-4", "--m", "1", "--ell", "5"], tmp_path)
    assert code == 0
    assert cert["results"]["tower_step"]["degree"] == 2


def test_lfactor_command(tmp_path):
    code, cert = run_inproc(
        ["lfactor", "--n", "1", "--ell", "5", "--alpha", "0:1", "1:2",
         "--chi-order", "1"],
        tmp_path,
    )
    assert code == 0
    assert cert["results"]["tame_factor"] == "1"


def test_mackey_command(tmp_path):
    code, cert = run_inproc(
        ["mackey-test", "--group", "S3", "--model", "two", "--samples", "40",
         "--seed", "11"],
        tmp_path,
    )
    assert code == 0
    assert cert["results"]["hecke_convolution"]["cases_checked"] == 40


def test_mackey_generator_file(tmp_path):
    gen_file = tmp_path / "gens.json"
    gen_file.write_text(json.dumps({
        "modulus": 4,
        "name": "GL1mod4",
        "generators": [[[3]]],
    }))
    code, cert = run_inproc(
        ["mackey-test", "--generator-file", str(gen_file), "--samples", "20"],
        tmp_path,
    )
    assert code == 0
    assert cert["pass"]


def test_determinism_byte_identical(tmp_path):
    args = ["norm-relation", "--n", "1", "--ell", "5", "--disc", "-4",
            "--conductor", "1", "--alpha", "0:1", "0:1", "--seed", "3"]
    cli.main([*args, "--out", str(tmp_path / "a.json")])
    cli.main([*args, "--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    args2 = ["mackey-test", "--group", "D8", "--samples", "30", "--seed", "5"]
    cli.main([*args2, "--out", str(tmp_path / "c.json")])
    cli.main([*args2, "--out", str(tmp_path / "d.json")])
    assert (tmp_path / "c.json").read_bytes() == (tmp_path / "d.json").read_bytes()


def test_json_roundtrip(tmp_path):
    code, cert = run_inproc(["coeffs", "--n", "1", "--ell", "3"], tmp_path)
    blob = json.dumps(cert, sort_keys=True)
    assert json.loads(blob) == cert


def test_seed_recorded_in_inputs(tmp_path):
    code, cert = run_inproc(
        ["mackey-test", "--group", "S3", "--samples", "10", "--seed", "42"],
        tmp_path,
    )
    assert cert["inputs"]["seed"] == 42
