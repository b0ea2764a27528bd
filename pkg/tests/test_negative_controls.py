"""Every CLI command must FAIL (exit 1) when its underlying data is perturbed.

The perturbations are injected by monkeypatching one exact value per command;
a certificate that still passed would mean the checks are not actually wired
to the computation.
"""

import json

import pytest

from tamenorm import classfield, cli, hecke, lattice, lfactor, mackey, qcomb


def run(args, tmp_path):
    out = tmp_path / "cert.json"
    code = cli.main([*args, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_coeffs_fails_on_perturbed_lambda(tmp_path, monkeypatch):
    real = qcomb.lambda_coefficients

    def fake(ctx):
        lam = real(ctx)
        lam[0] += 1
        return lam

    monkeypatch.setattr(qcomb, "lambda_coefficients", fake)
    code, cert = run(["coeffs", "--n", "2", "--ell", "3"], tmp_path)
    assert code == 1 and not cert["pass"]


def test_verify_incl_excl_fails_on_perturbed_lambda(tmp_path, monkeypatch):
    real = qcomb.lambda_coefficients

    def fake(ctx):
        lam = real(ctx)
        lam[-1] -= 1
        return lam

    monkeypatch.setattr(qcomb, "lambda_coefficients", fake)
    code, cert = run(["verify-incl-excl", "--n", "2", "--ell", "2"], tmp_path)
    assert code == 1
    assert not cert["results"]["measure_identity"]["pass"]


def test_mackey_fails_on_perturbed_volume(tmp_path, monkeypatch):
    from fractions import Fraction

    monkeypatch.setattr(mackey, "vol", lambda U, G: Fraction(len(U) + 1, len(G)))
    code, cert = run(["mackey-test", "--group", "S3", "--samples", "10"], tmp_path)
    assert code == 1
    assert not cert["results"]["completed_pushforward"]["pass"]


def test_lfactor_fails_on_perturbed_polynomial(tmp_path, monkeypatch):
    real = lfactor.frob_poly_from_satake

    def fake(sp):
        fp = real(sp)
        from tamenorm.exactnum import ExactScalar, Poly

        bumped = list(fp.p_central.coeffs)
        bumped[1] = bumped[1] + ExactScalar.one(sp.ell)
        object.__setattr__(fp, "p_central", Poly(bumped))
        return fp

    monkeypatch.setattr(lfactor, "frob_poly_from_satake", fake)
    code, cert = run(
        ["lfactor", "--n", "1", "--ell", "5", "--alpha", "0:1", "0:1"], tmp_path
    )
    assert code == 1
    assert not cert["results"]["central_value"]["pass"]


def test_classgroup_fails_on_perturbed_class_number(tmp_path, monkeypatch):
    real = classfield.FormClassGroup.class_number_formula_certificate

    def fake(self):
        cert = real(self)
        cert["pass"] = cert["enumerated"] == cert["formula"] + 1
        return cert

    monkeypatch.setattr(classfield.FormClassGroup, "class_number_formula_certificate", fake)
    code, cert = run(["classgroup", "--disc", "-4", "--conductor", "5"], tmp_path)
    assert code == 1


def test_tower_fails_on_perturbed_kernel(tmp_path, monkeypatch):
    real = classfield.norm_map

    def fake(big, small):
        mapping, cert = real(big, small)
        cert["kernel_order"] += 1
        cert["pass"] = cert["kernel_order"] == cert["degree"]
        return mapping, cert

    monkeypatch.setattr(classfield, "norm_map", fake)
    code, cert = run(["tower", "--disc", "-4", "--m", "1", "--ell", "5"], tmp_path)
    assert code == 1


def test_norm_relation_builtin_control(tmp_path):
    code, cert = run(
        ["norm-relation", "--n", "1", "--ell", "13", "--disc", "-4",
         "--conductor", "1", "--alpha", "0:1", "1:2", "--perturb-b1"],
        tmp_path,
    )
    assert code == 1
    assert cert["first_failure"]["stage"] == "step3_phi"
