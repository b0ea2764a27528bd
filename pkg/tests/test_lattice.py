import random

import pytest

from tamenorm.lattice import (
    BoundExceeded,
    InvariantVec,
    LatticeChain,
    LatticeClass,
    contains,
    enumerate_sublattices,
    enumerate_X_ge1,
    join,
    relative_position,
    solve_lambda_from_counts,
    verify_inclusion_exclusion,
    verify_measure_identity,
)
from tamenorm.qcomb import QCombContext, lambda_coefficients


def diag_lattice(exps, ell):
    return LatticeClass.from_diag_exponents(exps, ell)


def test_standard_lattice_is_identity():
    L = LatticeClass.standard(3, 5)
    assert L.basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_relative_position_trivial():
    assert relative_position(diag_lattice([1, 0], 3)).exponents == (1, 0)
    assert relative_position(diag_lattice([1, 1], 3)).exponents == (1, 1)


def test_relative_position_derived():
    # [[4, 2], [0, 1]] over ell=2 has Smith exponents (2, 0)
    L = LatticeClass.from_rows([[4, 2], [0, 1]], 2)
    assert relative_position(L).exponents == (2, 0)


def test_prime_to_ell_structure_is_trivialized():
    # over Z_2, 3 is a unit: diag(3,1) spans Z^2; diag(6,1) spans diag(2,1)
    assert LatticeClass.from_rows([[3, 0], [0, 1]], 2) == LatticeClass.standard(2, 2)
    assert LatticeClass.from_rows([[6, 0], [0, 1]], 2) == diag_lattice([1, 0], 2)


def test_normal_form_canonical_under_unit_row_ops():
    rng = random.Random(4096)
    for ell in (2, 3, 5):
        for _ in range(25):
            n = rng.choice([2, 3])
            exps = sorted([rng.randint(0, 2) for _ in range(n)], reverse=True)
            rows = [[ell ** exps[i] if i == j else 0 for j in range(n)] for i in range(n)]
            L0 = LatticeClass.from_rows(rows, ell)
            # random ell-unit row operations: integer shears and unit scalings
            work = [r[:] for r in rows]
            for _ in range(12):
                op = rng.randrange(3)
                i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
                if op == 0 and i != j:
                    c = rng.randint(-4, 4)
                    work[i] = [x + c * y for x, y in zip(work[i], work[j])]
                elif op == 1:
                    u = rng.choice([u for u in (1, 2, 3, 5, 7) if u % ell != 0])
                    work[i] = [u * x for x in work[i]]
                else:
                    work[i], work[j] = work[j], work[i]
            assert LatticeClass.from_rows(work, ell) == L0


def test_contains_trivial_cases():
    Z2 = LatticeClass.standard(2, 3)
    L1 = diag_lattice([1, 0], 3)
    S = diag_lattice([1, 1], 3)
    assert contains(Z2, L1) and contains(Z2, S)
    assert not contains(S, L1)          # index comparison
    assert contains(L1, S)


def test_join_examples():
    ell = 3
    Z2 = LatticeClass.standard(2, ell)
    L = LatticeClass.from_rows([[1, 2], [0, 3]], ell)  # kernel of x + y mod 3
    assert join(L, Z2) == L
    assert join(L, L) == L
    # two distinct index-ell sublattices of Z^2 meet in ell Z^2
    L2 = diag_lattice([1, 0], ell)
    assert L != L2
    assert join(L, L2) == diag_lattice([1, 1], ell)
    assert relative_position(join(L, L2)).exponents == (1, 1)


def test_join_properties_randomized():
    rng = random.Random(777)
    for ell in (2, 3):
        pool = enumerate_X_ge1(3, ell)
        deeper = [join(a, b) for a, b in zip(pool[::2], pool[1::2])]
        pool = pool + deeper
        for _ in range(60):
            a, b, c = (pool[rng.randrange(len(pool))] for _ in range(3))
            assert join(a, b) == join(b, a)
            assert join(a, a) == a
            assert join(join(a, b), c) == join(a, join(b, c))
            # universal property against a random small lattice
            probe = pool[rng.randrange(len(pool))]
            assert contains(join(a, b), probe) == (contains(a, probe) and contains(b, probe))


def test_join_dominance():
    # inv(join) dominates both inv's coordinatewise after sorting
    for ell in (2, 3):
        pool = enumerate_X_ge1(2, ell) + enumerate_X_ge1(3, ell)
        for a in pool[:12]:
            for b in pool[:12]:
                if a.n != b.n:
                    continue
                ja = relative_position(join(a, b)).exponents
                for L in (a, b):
                    inv = relative_position(L).exponents
                    # dominance of partial sums (Bruhat order on cocharacters)
                    for t in range(1, len(inv) + 1):
                        assert sum(ja[:t]) >= sum(inv[:t])


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_enumerate_X_ge1_counts(ell):
    assert len(enumerate_X_ge1(1, ell)) == 1
    got = enumerate_X_ge1(2, ell)
    assert len(got) == ell + 2
    invs = sorted(tuple(relative_position(L).exponents) for L in got)
    assert invs.count((1, 0)) == ell + 1
    assert invs.count((1, 1)) == 1


def test_enumerate_X_ge1_bound():
    with pytest.raises(BoundExceeded):
        enumerate_X_ge1(5, 2)
    with pytest.raises(BoundExceeded):
        enumerate_X_ge1(2, 11)


def test_enumerate_sublattices_examples():
    for ell in (2, 3):
        Z2 = LatticeClass.standard(2, ell)
        assert enumerate_sublattices(InvariantVec((1, 0)), Z2) == ell + 1
        assert enumerate_sublattices(InvariantVec((1, 1)), Z2) == 1
        L1 = diag_lattice([1, 0], ell)
        assert enumerate_sublattices(InvariantVec((1, 0)), L1) == 1


def test_lattice_chain_validation():
    ell = 2
    Z2 = LatticeClass.standard(2, ell)
    S = diag_lattice([1, 1], ell)
    L1 = diag_lattice([1, 0], ell)
    ch = LatticeChain((L1, S))
    assert ch.length == 1
    assert ch.smallest == S
    with pytest.raises(ValueError):
        LatticeChain((S, L1))     # wrong direction
    with pytest.raises(ValueError):
        LatticeChain((Z2, Z2))    # not strict


def test_chain_structure_matches_worked_example():
    # n=2: ell+2 length-0 chains and ell+1 chains S < L_i
    for ell in (2, 3, 5):
        cert = verify_inclusion_exclusion(2, ell, 2)
        assert cert["pass"]
        assert cert["members"] == ell + 2
        assert cert["chains"] == (ell + 2) + (ell + 1)


@pytest.mark.parametrize("n,ell,depth", [
    (1, 2, 3), (1, 5, 3),
    (2, 2, 2), (2, 3, 2),
    (3, 2, 2),
])
def test_inclusion_exclusion_passes(n, ell, depth):
    cert = verify_inclusion_exclusion(n, ell, depth)
    assert cert["pass"], cert
    assert cert["cases_checked"] > 0


@pytest.mark.parametrize("n,ell,depth", [
    (1, 3, 3), (2, 2, 2), (2, 3, 2), (2, 5, 2), (3, 2, 2),
])
def test_measure_identity_passes(n, ell, depth):
    cert = verify_measure_identity(n, ell, depth)
    assert cert["pass"], cert


@pytest.mark.parametrize("n,ell", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_lambda_matches_counting_solution(n, ell):
    # Corollary-grade ground truth: the combinatorial lambda equals the unique
    # solution of the per-invariant counting system
    assert lambda_coefficients(QCombContext(n, ell)) == solve_lambda_from_counts(n, ell)


def test_invariant_vec_validation():
    with pytest.raises(ValueError):
        InvariantVec((0, 1))
    assert not InvariantVec((1, 0)).is_zero
    assert InvariantVec((0, 0)).is_zero


def test_enumerate_sublattices_depth_bound():
    Z2 = LatticeClass.standard(2, 3)
    with pytest.raises(BoundExceeded):
        enumerate_sublattices(InvariantVec((9, 0)), Z2)
