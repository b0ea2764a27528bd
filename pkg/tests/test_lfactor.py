import pytest
from fractions import Fraction
from itertools import combinations_with_replacement

from tamenorm.classfield import ring_class_group
from tamenorm.exactnum import ExactScalar, Poly, poly_eval
from tamenorm.lfactor import (
    CharacterValue,
    SatakeParams,
    check_central_value,
    frob_poly_from_satake,
    local_l_inverse,
    tame_factor,
    tame_group_algebra_check,
    weil_weight_check,
)


def rat(q, ell):
    return ExactScalar.from_rational(q, ell)


def sp_ones(n, ell):
    return SatakeParams.from_root_exponents(n, ell, [(0, 1)] * (2 * n))


def test_frob_poly_all_ones():
    # n=1, ell=5, alpha = (1,1): P_lambda = (1 - sX)^2
    sp = sp_ones(1, 5)
    fp = frob_poly_from_satake(sp)
    s = ExactScalar.sqrt_ell(5)
    one = rat(1, 5)
    want = Poly([one, -s]) * Poly([one, -s])
    assert fp.p_lambda == want
    assert fp.p_lambda.constant_term().is_one()
    assert poly_eval(fp.p_lambda, rat(0, 5)).is_one()


def test_frob_poly_plus_minus():
    # alpha = (1, -1): P_lambda = 1 - 5 X^2 over ell = 5
    sp = SatakeParams.from_root_exponents(1, 5, [(0, 1), (1, 2)])
    fp = frob_poly_from_satake(sp)
    one = rat(1, 5)
    want = Poly([one, rat(0, 5), rat(-5, 5)])
    assert fp.p_lambda == want


def test_p_central_is_twist():
    # P(X) = P_lambda(ell^{-n} X): evaluate both ways on sample points
    for n, ell in [(1, 5), (2, 3)]:
        sp = sp_ones(n, ell)
        fp = frob_poly_from_satake(sp)
        for e, k in [(0, 1), (1, 4), (1, 3)]:
            x = ExactScalar.zeta(ell, k, e)
            lhs = poly_eval(fp.p_central, x)
            rhs = poly_eval(fp.p_lambda, x * rat(Fraction(1, ell ** n), ell))
            assert lhs == rhs


def test_central_value_trivial_chi():
    # chi trivial, n=1, ell=5, alpha=(1,1): both sides (6-2s)/5
    sp = sp_ones(1, 5)
    cert = check_central_value(sp, CharacterValue.trivial(5))
    assert cert["pass"]
    s = ExactScalar.sqrt_ell(5)
    want = (rat(6, 5) - rat(2, 5) * s) / rat(5, 5)
    assert poly_eval(frob_poly_from_satake(sp).p_central, rat(1, 5)) == want


def test_central_value_order_two_chi():
    sp = sp_ones(1, 5)
    chi = CharacterValue(rat(-1, 5), 2)
    cert = check_central_value(sp, chi)
    assert cert["pass"]
    # both sides prod (1 + alpha_i / s)
    s = ExactScalar.sqrt_ell(5)
    want = (rat(1, 5) + s / 5) ** 2
    assert local_l_inverse(sp, rat(-1, 5)) == want


def test_central_value_symmetric_case():
    # alpha all 1, chi trivial: both sides (1 - 1/s)^{2n}
    for n, ell in [(1, 3), (2, 5), (3, 2)]:
        sp = sp_ones(n, ell)
        s = ExactScalar.sqrt_ell(ell)
        want = (rat(1, ell) - s.inverse()) ** (2 * n)
        assert local_l_inverse(sp, rat(1, ell)) == want
        assert check_central_value(sp, CharacterValue.trivial(ell))["pass"]


PALETTE = [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 6), (5, 6)]


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_central_value_palette_n1(ell):
    for pair in combinations_with_replacement(PALETTE, 2):
        sp = SatakeParams.from_root_exponents(1, ell, list(pair))
        for k in range(1, 7):
            chi = CharacterValue.primitive(ell, k)
            assert check_central_value(sp, chi)["pass"], (pair, k)


def test_central_value_random_higher_rank():
    import random

    rng = random.Random(1234)
    for _ in range(25):
        n = rng.choice([2, 3])
        ell = rng.choice([2, 3, 5, 7])
        pairs = [PALETTE[rng.randrange(len(PALETTE))] for _ in range(2 * n)]
        sp = SatakeParams.from_root_exponents(n, ell, pairs)
        k = rng.randrange(1, 7)
        assert check_central_value(sp, CharacterValue.primitive(ell, k))["pass"]


def test_satake_rejects_non_unitary():
    with pytest.raises(ValueError):
        SatakeParams(1, 5, (rat(2, 5), rat(1, 5)))


def test_weil_weight_examples():
    ell, n = 3, 2
    s = ExactScalar.sqrt_ell(ell)
    ok = weil_weight_check([s ** (2 * n - 1), -(s ** (2 * n - 1))], n, ell)
    assert ok["pass"]
    bad = weil_weight_check([s ** (2 * n - 3)], n, ell)
    assert not bad["pass"]
    assert bad["rows"][0]["status"] == "fail"


def test_weil_weight_unchecked_shape():
    # 1 + z is not a root of unity times a power of s: norm is irrational
    ell = 5
    z = ExactScalar.zeta(ell, 5)
    rep = weil_weight_check([rat(1, ell) + z], 1, ell)
    assert not rep["pass"]
    assert rep["rows"][0]["status"] == "unchecked"


def test_tame_factor_examples():
    # n=1, ell=5, alpha=(1,1), chi trivial: (5/4) (6-2s)/5 = (6-2s)/4
    sp = sp_ones(1, 5)
    got = tame_factor(sp, CharacterValue.trivial(5))
    s = ExactScalar.sqrt_ell(5)
    assert got == (rat(6, 5) - rat(2, 5) * s) / rat(4, 5)
    # alpha = (1,-1): L^{-1} = 1 - 1/5 = 4/5, so the factor is exactly 1
    sp2 = SatakeParams.from_root_exponents(1, 5, [(0, 1), (1, 2)])
    assert tame_factor(sp2, CharacterValue.trivial(5)) == rat(1, 5)


def test_tame_group_algebra_trivial_group():
    # |cl| = 1 reduces to the central-value identity with trivial chi
    cl = ring_class_group(-4, 1)
    sp = sp_ones(1, 5)
    cert = tame_group_algebra_check(cl, sp, 5)
    assert cert["pass"], cert
    assert len(cert["per_chi"]) == 1


def test_tame_group_algebra_order_two():
    # disc -100: two characters; eigenvalues P(+-1) at a split prime with
    # nontrivial Frobenius (ell = 13)
    cl = ring_class_group(-4, 5)
    sp = sp_ones(1, 13)
    cert = tame_group_algebra_check(cl, sp, 13)
    assert cert["pass"], cert
    vals = {row["chi_at_frobenius"] for row in cert["per_chi"]}
    assert vals == {"1", "-1"}


def test_tame_group_algebra_trivial_frobenius():
    # ell = 29 is principal for disc -100: both eigenvalues are P(1)
    cl = ring_class_group(-4, 5)
    sp = sp_ones(1, 29)
    cert = tame_group_algebra_check(cl, sp, 29)
    assert cert["pass"]
    eigs = {row["eigenvalue"] for row in cert["per_chi"]}
    assert len(eigs) == 1


def test_tame_group_algebra_bigger_group():
    # Z/4 class group at disc -156; Fourier inversion over 4 characters
    cl = ring_class_group(-39, 2)
    sp = SatakeParams.from_root_exponents(1, 5, [(1, 4), (3, 4)])
    cert = tame_group_algebra_check(cl, sp, 5)
    assert cert["pass"], cert
    assert cert["fourier_inversion"]


def test_tame_group_algebra_rejects_mismatched_prime():
    cl = ring_class_group(-4, 1)
    sp = sp_ones(1, 5)
    with pytest.raises(ValueError):
        tame_group_algebra_check(cl, sp, 13)


def test_tame_group_algebra_order_36():
    # exercises the Fourier-inversion bound on a group of order 36; the
    # split prime 2 has (-23 | 2) = 1
    cl = ring_class_group(-23, 13)
    assert cl.order == 36
    sp = SatakeParams.from_root_exponents(1, 2, [(1, 6), (5, 6)])
    cert = tame_group_algebra_check(cl, sp, 2)
    assert cert["pass"], cert
    assert len(cert["per_chi"]) == 36
    assert cert["fourier_inversion"]
