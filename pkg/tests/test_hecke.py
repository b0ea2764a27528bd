import pytest
from fractions import Fraction

from tamenorm.hecke import (
    CosetSum,
    GroupElt,
    HeckeContext,
    InfeasibleError,
    a_coefficients,
    assemble_phi,
    certify_index_rule,
    flag_orbit_check,
    g_r_element,
    iwahori_coset_check,
    orbit_stabilizer,
    reduce_um_to_psi,
    same_coset,
    um_cosets,
)
from tamenorm.qcomb import QCombContext, lambda_coefficients, rank_count


def test_um_coset_counts():
    assert len(um_cosets(1, HeckeContext(2, 2))) == 4     # 2^(1*2)
    assert len(um_cosets(1, HeckeContext(1, 3))) == 3
    assert len(um_cosets(2, HeckeContext(2, 2))) == 16    # 2^(2*2)


def test_group_elt_level_membership():
    ctx = HeckeContext(1, 5)
    assert GroupElt.identity(5, 2).in_level()
    assert not g_r_element(1, ctx).in_level()  # has a 1/5 entry
    assert g_r_element(0, ctx).in_level()      # X_0 = 0 gives the identity


def test_same_coset_distinguishes_x_mod_ell():
    # U_m summands with X = X' mod ell give the same coset, otherwise not
    ctx = HeckeContext(1, 3)
    terms = um_cosets(1, ctx).terms
    reps = [g for _, g in terms]
    for i, g in enumerate(reps):
        for j, h in enumerate(reps):
            assert same_coset(g, h) == (i == j)


def test_reduce_um_examples():
    # n=2, m=1, ell=2: ch(K) + 3 ch((g_1,1)K)
    ctx = HeckeContext(2, 2)
    psi, counts, cert = reduce_um_to_psi(1, ctx)
    assert cert["pass"], cert
    assert counts == {0: 1, 1: 3}
    want = CosetSum(2, [(1, g_r_element(0, ctx)), (3, g_r_element(1, ctx))])
    assert psi == want
    # n=1, m=1, ell=3: ch(K) + 2 ch((g_1,1)K)
    ctx = HeckeContext(1, 3)
    psi, counts, cert = reduce_um_to_psi(1, ctx)
    assert cert["pass"]
    assert counts == {0: 1, 1: 2}


@pytest.mark.parametrize("ell", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_reduce_um_multiplicities_match_rank_counts(n, ell):
    ctx = HeckeContext(n, ell)
    qctx = QCombContext(n, ell)
    for m in range(1, n + 1):
        psi, counts, cert = reduce_um_to_psi(m, ctx)
        assert cert["pass"], cert
        assert sum(counts.values()) == ell ** (m * n)
        for r in range(m + 1):
            assert counts[r] == rank_count(r, m, qctx)
        assert counts[0] == 1


def test_assemble_phi_n1():
    ctx = HeckeContext(1, 5)
    phi, cert = assemble_phi(ctx)
    assert cert["pass"]
    want = CosetSum(5, [(1, g_r_element(0, ctx)), (-1, g_r_element(1, ctx))])
    assert phi == want


def test_assemble_phi_n2_ell2():
    phi, cert = assemble_phi(HeckeContext(2, 2))
    assert cert["pass"]
    assert cert["b"] == [6, -18, 12]
    assert cert["rows"][0]["lhs"] == cert["rows"][0]["rhs"]  # r = 0 restates b_0


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_assemble_phi_identity_sweep(n, ell):
    _, cert = assemble_phi(HeckeContext(n, ell))
    assert cert["pass"], cert


def test_orbit_stabilizer_r0():
    rep = orbit_stabilizer(0, HeckeContext(2, 3))
    assert rep.orbit_size == 1
    assert rep.nu_image_order == 2          # nu is surjective onto F_3^*
    assert rep.index_K_V1r == 2
    assert rep.certificate["pass"]


def test_orbit_stabilizer_r1_n2_ell2():
    rep = orbit_stabilizer(1, HeckeContext(2, 2))
    assert rep.orbit_size == 9
    assert rep.certificate["pass"]


def test_orbit_stabilizer_boundary_anomaly():
    # at r = n the stabilizer is the diagonal {(A, A)} and nu is trivial,
    # contradicting the blanket ell - 1 claim; reported, not corrected
    for n, ell in [(1, 3), (2, 2), (2, 3)]:
        rep = orbit_stabilizer(n, HeckeContext(n, ell))
        assert rep.nu_image_order == 1
        assert rep.certificate["nu_order_matches_uniform_claim"] == (ell == 2)
        assert rep.certificate["pass"]


@pytest.mark.parametrize("ell", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbit_sizes_match_rank_counts(n, ell):
    ctx = HeckeContext(n, ell)
    qctx = QCombContext(n, ell)
    for r in range(n + 1):
        rep = orbit_stabilizer(r, ctx)
        assert rep.certificate["pass"]
        assert rep.orbit_size == rank_count(r, n, qctx)
        assert rep.orbit_size * rep.stabilizer_order == rep.certificate["orbit_size"] * rep.stabilizer_order


def test_orbit_stabilizer_infeasible():
    with pytest.raises(InfeasibleError):
        orbit_stabilizer(0, HeckeContext(4, 7))


def test_index_rule_certificate():
    cert = certify_index_rule(max_n=2, ells=(2, 3))
    assert cert["pass"]


def test_a_coefficients_n1():
    a, cert = a_coefficients(HeckeContext(1, 3))
    assert cert["pass"], cert
    assert a == [1, -1]


def test_a_boundary_equals_minus_lambda():
    for n, ell in [(1, 3), (2, 2), (2, 3), (3, 2)]:
        a, cert = a_coefficients(HeckeContext(n, ell))
        assert cert["pass"], cert
        lam = lambda_coefficients(QCombContext(n, ell))
        assert a[n] == -lam[n - 1]
        assert cert["rows"][n]["documented_discrepancy"] == (ell != 2)


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_a_integrality_sweep(n, ell):
    a, cert = a_coefficients(HeckeContext(n, ell))
    assert cert["pass"], cert
    assert all(not isinstance(x, Fraction) for x in a)


def test_closed_form_indices_match_enumeration():
    for n, ell in [(1, 3), (2, 2), (2, 3)]:
        ctx = HeckeContext(n, ell)
        a1, c1 = a_coefficients(ctx, index_source="enumeration")
        a2, c2 = a_coefficients(ctx, index_source="closed_form")
        assert a1 == a2
        assert [r["index_K_V1r"] for r in c1["rows"]] == [r["index_K_V1r"] for r in c2["rows"]]


def test_flag_orbit_n1_ell3():
    cert = flag_orbit_check(HeckeContext(1, 3))
    assert cert["pass"], cert
    assert cert["orbit_size"] == 2              # |GL_1(F_3)|
    assert cert["identity_coset_orbit_size"] == 1
    assert cert["flag_point_count"] == 4        # P^1(F_3)


@pytest.mark.parametrize("n,ell", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_flag_orbit_grid(n, ell):
    cert = flag_orbit_check(HeckeContext(n, ell))
    assert cert["pass"], cert
    assert cert["orbit_equals_gl_n"]
    assert cert["stabilizer_is_diagonal"]


def test_iwahori_r1_p2():
    cert = iwahori_coset_check(1, 2, 4)
    assert cert["mode"] == "explicit"
    assert cert["pass"], cert
    assert all(cert["checks"].values())


def test_iwahori_r0_degenerate():
    cert = iwahori_coset_check(0, 2, 3)
    assert cert["pass"]
    assert cert["V_0_is_full_level"]
    assert cert["D_1_is_full_unit_group"]


def test_iwahori_r1_p3_counted():
    cert = iwahori_coset_check(1, 3, 4)
    assert cert["mode"] == "counted"
    assert cert["pass"], cert


def test_iwahori_modes_agree_at_p2():
    # the counted machinery must reproduce the explicit orders at p = 2
    import tamenorm.hecke as H

    explicit = iwahori_coset_check(1, 2, 4)
    preds = H._iwahori_mat_predicates(1, 2, 4)
    for name, pred in preds.items():
        shape = H._extract_shape(pred, 2, 4)
        assert H._shape_order(*shape, 2, 4) == explicit["orders"][name], name


def test_iwahori_needs_depth():
    with pytest.raises(ValueError):
        iwahori_coset_check(1, 2, 3)


def test_psi_total_mass():
    # sum of multiplicities is ell^{mn} for all m <= n <= 3
    for n, ell in [(2, 2), (3, 2), (2, 3)]:
        ctx = HeckeContext(n, ell)
        for m in range(1, n + 1):
            _, counts, cert = reduce_um_to_psi(m, ctx)
            assert cert["pass"]
            assert sum(counts.values()) == ell ** (m * n)


def test_bracket_ratio_identity():
    # [n m] c_{r,m} / c_{r,n} = [n-r, n-m] exactly, r <= m <= n <= 5
    from tamenorm.qcomb import q_binomial

    for ell in (2, 3, 5, 7):
        for n in range(1, 6):
            qctx = QCombContext(n, ell)
            for m in range(1, n + 1):
                for r in range(0, m + 1):
                    lhs = q_binomial(n, m, ell) * rank_count(r, m, qctx)
                    rhs = q_binomial(n - r, n - m, ell) * rank_count(r, n, qctx)
                    assert lhs == rhs, (n, m, r, ell)


def test_iwahori_deeper_level_counted():
    cert = iwahori_coset_check(2, 2, 6)
    assert cert["mode"] == "counted"
    assert cert["pass"], cert


def test_smith_witness_property():
    from itertools import product as iproduct

    from tamenorm.matrices import all_matrices_mod, det_mod, smith_witness_mod

    for p in (2, 3):
        for m, n in ((2, 2), (2, 3), (3, 2)):
            for X in all_matrices_mod(m, n, p):
                U, V, r = smith_witness_mod(X, p)
                assert det_mod(U, p) != 0 and det_mod(V, p) != 0
                prod = tuple(
                    tuple(
                        sum(U[i][a] * X[a][b] * V[b][j] for a in range(m) for b in range(n)) % p
                        for j in range(n)
                    )
                    for i in range(m)
                )
                want = tuple(
                    tuple(int(i == j and i < r) for j in range(n)) for i in range(m)
                )
                assert prod == want, (X, U, V, r)


def test_orbit_report_json():
    import json

    rep = orbit_stabilizer(1, HeckeContext(2, 2))
    blob = json.dumps(rep.to_json_dict(), sort_keys=True)
    assert json.loads(blob)["orbit_size"] == 9
