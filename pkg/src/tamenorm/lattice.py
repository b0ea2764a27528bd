"""The poset of full-rank lattices in Q_ell^n up to GL_n(Z_ell).

A lattice class is stored as the unique Hermite-normal-form basis whose
determinant is a power of ell (rows span the lattice; prime-to-ell structure
is trivialised by the normal form, so no genuine Z_ell arithmetic is ever
needed).  The order is L1 <= L2 iff L2 is contained in L1; the join is the
intersection.  Volume normalisation: each coset of GL_n(Z_ell) has volume 1,
so all measures here are lattice counts.

The two verification routines check, over every sublattice of Z^n at a given
depth, the chain-wise inclusion-exclusion identity and the per-invariant
measure identity that pins down the lambda coefficients of module `qcomb`.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from . import qcomb
from .matrices import (
    ell_normalize,
    ell_power_denominator,
    is_prime,
    mat_inv,
    smith_ell_exponents,
    v_ell,
)

DEFAULT_N_BOUND = 4
DEFAULT_ELL_BOUND = 7


class BoundExceeded(ValueError):
    """An enumeration was requested beyond the configured desk-scale bounds."""


@dataclass(frozen=True)
class InvariantVec:
    """Relative position: weakly decreasing elementary-divisor exponents."""

    exponents: tuple

    def __post_init__(self):
        e = tuple(self.exponents)
        if any(e[i] < e[i + 1] for i in range(len(e) - 1)):
            raise ValueError("exponents must be weakly decreasing")
        object.__setattr__(self, "exponents", e)

    def __iter__(self):
        return iter(self.exponents)

    @property
    def is_zero(self):
        return all(x == 0 for x in self.exponents)


class LatticeClass:
    """A sublattice of Z^n over Z_ell in canonical Hermite normal form."""

    __slots__ = ("ell", "n", "basis")

    def __init__(self, ell, n, basis):
        if not is_prime(ell):
            raise ValueError(f"ell must be prime, got {ell}")
        self.ell = ell
        self.n = n
        self.basis = basis  # trusted canonical form; use the constructors

    @staticmethod
    def standard(n, ell):
        return LatticeClass(ell, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def from_rows(rows, ell):
        """Lattice spanned over Z_ell by integer rows (full rank required)."""
        rows = [tuple(int(x) for x in r) for r in rows]
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        return LatticeClass(ell, n, ell_normalize(rows, ell))

    @staticmethod
    def from_diag_exponents(exps, ell):
        n = len(exps)
        return LatticeClass.from_rows(
            [[ell ** exps[i] if i == j else 0 for j in range(n)] for i in range(n)], ell
        )

    @staticmethod
    def minimal_vector_lattice(m, n, ell):
        """The lattice Lambda_{t_m} with basis diag(ell,..,ell,1,..,1), m ells."""
        return LatticeClass.from_diag_exponents([1] * m + [0] * (n - m), ell)

    def index_valuation(self):
        v = 0
        for i in range(self.n):
            v += v_ell(self.basis[i][i], self.ell)
        return v

    def __eq__(self, other):
        return (
            isinstance(other, LatticeClass)
            and self.ell == other.ell
            and self.n == other.n
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ell, self.n, self.basis))

    def __repr__(self):
        return f"LatticeClass(ell={self.ell}, basis={self.basis})"


def relative_position(L):
    """inv(L): sorted ell-adic elementary divisor exponents, largest first."""
    exps = smith_ell_exponents(L.basis, L.ell)
    return InvariantVec(tuple(sorted(exps, reverse=True)))


def contains(L_big, L_small):
    """True iff L_small is a sublattice of L_big over Z_ell.

    Solves rows(L_small) = X rows(L_big) exactly; containment holds iff every
    coordinate of X is ell-integral.  Exploits the upper-triangular basis, so
    only integer arithmetic with a common ell-power denominator is needed.
    """
    _check_compatible(L_big, L_small)
    ell = L_big.ell
    n = L_big.n
    H = L_big.basis
    diag_val = [v_ell(H[i][i], ell) for i in range(n)]
    for b in L_small.basis:
        # x_j = (b_j - sum_{i<j} x_i H[i][j]) / H[j][j], kept over ell^E
        num = [0] * n
        E = 0
        for j in range(n):
            s = b[j] * ell ** E - sum(num[i] * H[i][j] for i in range(j))
            aj = diag_val[j]
            for i in range(j):
                num[i] *= ell ** aj
            num[j] = s
            E += aj
        q = ell ** E
        if any(x % q for x in num):
            return False
    return True


def join(L1, L2):
    """The join L1 v L2 = L1 intersect L2, via duality: (L1* + L2*)*."""
    _check_compatible(L1, L2)
    ell, n = L1.ell, L1.n
    dual_rows = []
    for L in (L1, L2):
        inv = mat_inv(L.basis)
        dual_rows.extend(tuple(inv[i][j] for i in range(n)) for j in range(n))
    t = 0
    for row in dual_rows:
        for x in row:
            if x != 0:
                t = max(t, v_ell(Fraction(x).denominator, ell))
            if not ell_power_denominator(Fraction(x), ell):
                raise ArithmeticError("dual basis has non-ell denominator")
    scale = ell ** t
    int_rows = [[int(x * scale) for x in row] for row in dual_rows]
    Hd = ell_normalize(int_rows, ell)
    inv = mat_inv(Hd)
    res = [[Fraction(inv[i][j]) * scale for i in range(n)] for j in range(n)]
    out = []
    for row in res:
        r = []
        for x in row:
            if x.denominator != 1:
                raise ArithmeticError("intersection of integral lattices must be integral")
            r.append(int(x))
        out.append(r)
    return LatticeClass.from_rows(out, ell)


def _check_compatible(L1, L2):
    if L1.ell != L2.ell or L1.n != L2.n:
        raise ValueError("lattices live in different spaces")


# ---------------------------------------------------------------------------
# chains

@dataclass(frozen=True)
class LatticeChain:
    """A chain L_r < L_{r-1} < ... < L_0, all inclusions strict.

    `elements` is ordered largest lattice first; the length is the number of
    strict inclusions, so a single lattice has length 0.
    """

    elements: tuple

    def __post_init__(self):
        e = tuple(self.elements)
        if not e:
            raise ValueError("empty chain")
        for a, b in zip(e, e[1:]):
            if not (contains(a, b) and a != b):
                raise ValueError("chain elements must strictly decrease")
        object.__setattr__(self, "elements", e)

    @property
    def length(self):
        return len(self.elements) - 1

    @property
    def smallest(self):
        return self.elements[-1]


# ---------------------------------------------------------------------------
# enumeration

def _subspace_rrefs(n, d, ell):
    """All RREF matrices of d-dimensional subspaces of F_ell^n."""
    if d == 0:
        yield ()
        return
    for pivots in combinations(range(n), d):
        free_positions = []
        for i in range(d):
            for j in range(pivots[i] + 1, n):
                if j not in pivots:
                    free_positions.append((i, j))
        for vals in product(range(ell), repeat=len(free_positions)):
            M = [[0] * n for _ in range(d)]
            for i, p in enumerate(pivots):
                M[i][p] = 1
            for (i, j), v in zip(free_positions, vals):
                M[i][j] = v
            yield tuple(tuple(r) for r in M)


def enumerate_X_ge1(n, ell, n_bound=DEFAULT_N_BOUND, ell_bound=DEFAULT_ELL_BOUND):
    """All lattices L with ell Z^n <= L < Z^n, via proper subspaces of F_ell^n.

    A lattice of relative position t_m corresponds to the (n-m)-dimensional
    subspace L / ell Z^n.
    """
    if n > n_bound or ell > ell_bound:
        raise BoundExceeded(f"enumeration bound exceeded: n={n}, ell={ell}")
    out = []
    for d in range(n):  # proper subspaces only: Z^n itself is excluded
        for rref in _subspace_rrefs(n, d, ell):
            rows = [list(r) for r in rref]
            for i in range(n):
                e = [0] * n
                e[i] = ell
                rows.append(e)
            out.append(LatticeClass.from_rows(rows, ell))
    return out


def _hnf_candidates(n, ell, depth):
    """All HNF bases with diagonal exponents <= depth.

    Every sublattice of Z^n whose largest invariant exponent is <= depth has
    all HNF diagonal exponents <= depth (it contains ell^depth Z^n), so this
    family is a superset of any fixed-depth invariant stratum.
    """
    for diag_exps in product(range(depth + 1), repeat=n):
        diag = [ell ** e for e in diag_exps]
        off_ranges = []
        for i in range(n):
            for j in range(i + 1, n):
                off_ranges.append(range(diag[j]))
        for off in product(*off_ranges):
            M = [[0] * n for _ in range(n)]
            t = 0
            for i in range(n):
                M[i][i] = diag[i]
                for j in range(i + 1, n):
                    M[i][j] = off[t]
                    t += 1
            yield tuple(tuple(r) for r in M)


def _is_canonical_hnf(basis, ell):
    n = len(basis)
    for i in range(n):
        d = basis[i][i]
        v = d
        while v % ell == 0:
            v //= ell
        if v != 1:
            return False
        for j in range(i):
            if not 0 <= basis[j][i] < d:
                return False
        if any(basis[i][j] != 0 for j in range(i)):
            return False
    return True


def sublattices_up_to_depth(n, ell, depth):
    """All LatticeClass with HNF diagonal exponents <= depth (canonical forms)."""
    out = []
    for basis in _hnf_candidates(n, ell, depth):
        assert _is_canonical_hnf(basis, ell)
        out.append(LatticeClass(ell, n, basis))
    return out


def enumerate_sublattices(nu, of, depth_bound=6):
    """Number of sublattices of `of` whose position relative to Z^n is nu."""
    if isinstance(nu, InvariantVec):
        nu = tuple(nu.exponents)
    else:
        nu = tuple(nu)
    if any(e < 0 for e in nu):
        raise ValueError("invariant entries must be >= 0 for sublattices of Z^n")
    depth = max(nu) if nu else 0
    if depth > depth_bound:
        raise BoundExceeded(f"invariant depth {depth} exceeds bound {depth_bound}")
    n, ell = of.n, of.ell
    count = 0
    for L in sublattices_up_to_depth(n, ell, depth):
        if tuple(relative_position(L).exponents) == nu and contains(of, L):
            count += 1
    return count


# ---------------------------------------------------------------------------
# verification certificates

def _chain_weights(members):
    """w[k] = sum over chains with smallest lattice k of (-1)^length.

    Recurrence: w[k] = 1 - sum of w[a] over members a strictly containing k.
    Also returns the total number of chains for the certificate.
    """
    m = len(members)
    strictly_above = [[] for _ in range(m)]
    for a in range(m):
        for k in range(m):
            if a != k and contains(members[a], members[k]):
                strictly_above[k].append(a)
    # members are ordered by weakly increasing index valuation, so every
    # strict container of k precedes k; compute in that order
    order = sorted(range(m), key=lambda i: members[i].index_valuation())
    w = [0] * m
    counts = [0] * m
    for k in order:
        w[k] = 1 - sum(w[a] for a in strictly_above[k])
        counts[k] = 1 + sum(counts[a] for a in strictly_above[k])
    return w, sum(counts)


def verify_inclusion_exclusion(n, ell, depth):
    """Chain-wise inclusion-exclusion over X_n^{>=1}, checked pointwise.

    For every sublattice L' of Z^n with invariant entries <= depth:
      [L' lies below some member of X_n^{>=1}]
        = sum over chains c of (-1)^len(c) [L' below the smallest member of c]
    and the semilattice compatibility in poset form: L' below join(L1, L2)
    iff L' below L1 and L' below L2, over all member pairs.
    """
    members = enumerate_X_ge1(n, ell)
    M = len(members)
    w, n_chains = _chain_weights(members)

    index = {members[i]: i for i in range(M)}
    join_idx = [[0] * M for _ in range(M)]
    for i in range(M):
        for j in range(i, M):
            J = join(members[i], members[j])
            if J not in index:
                return _cert("inclusion_exclusion", n, ell, depth, 0, False,
                             {"reason": "join left the generated semilattice",
                              "pair": [members[i].basis, members[j].basis]})
            join_idx[i][j] = join_idx[j][i] = index[J]

    pairs_by_join = [[] for _ in range(M)]
    for i in range(M):
        for j in range(M):
            pairs_by_join[join_idx[i][j]].append((i, j))

    cases = 0
    for L in sublattices_up_to_depth(n, ell, depth):
        inv = relative_position(L)
        if max(inv.exponents) > depth:
            continue
        S = [k for k in range(M) if contains(members[k], L)]
        in_S = [False] * M
        for k in S:
            in_S[k] = True
        lhs = 1 if S else 0
        rhs = sum(w[k] for k in S)
        if lhs != rhs:
            return _cert("inclusion_exclusion", n, ell, depth, cases, False,
                         {"lattice": L.basis, "lhs": lhs, "rhs": rhs})
        # F(L1 v L2) = F(L1) cap F(L2), pointwise at L
        for i in S:
            for j in S:
                if not in_S[join_idx[i][j]]:
                    return _cert("inclusion_exclusion", n, ell, depth, cases, False,
                                 {"lattice": L.basis, "pair": [i, j],
                                  "reason": "join containment missing"})
        for k in S:
            for (i, j) in pairs_by_join[k]:
                if not (in_S[i] and in_S[j]):
                    return _cert("inclusion_exclusion", n, ell, depth, cases, False,
                                 {"lattice": L.basis, "pair": [i, j],
                                  "reason": "containment in join without both factors"})
        cases += 1
    return _cert("inclusion_exclusion", n, ell, depth, cases, True, None,
                 extra={"members": M, "chains": n_chains})


def verify_measure_identity(n, ell, depth):
    """Per-invariant counting form of the measure identity.

    For every invariant nu != 0 with entries in [0, depth]:
      #{L <= Z^n : inv(L) = nu}
        = sum_m lambda_m #{L <= Lambda_{t_m} : inv(L) = nu}.
    This is the identity defining the lambda coefficients, applied to the
    bi-invariant test functions that span all right-invariant ones.
    """
    lam = qcomb.lambda_coefficients(qcomb.QCombContext(n, ell))
    t_lattices = [LatticeClass.minimal_vector_lattice(m, n, ell) for m in range(1, n + 1)]

    total = {}
    within = [dict() for _ in range(n)]
    for L in sublattices_up_to_depth(n, ell, depth):
        nu = tuple(relative_position(L).exponents)
        if max(nu) > depth:
            continue
        total[nu] = total.get(nu, 0) + 1
        for m in range(n):
            if contains(t_lattices[m], L):
                within[m][nu] = within[m].get(nu, 0) + 1

    cases = 0
    for nu in sorted(total):
        if all(x == 0 for x in nu):
            continue
        lhs = total[nu]
        rhs = sum(lam[m] * within[m].get(nu, 0) for m in range(n))
        if lhs != rhs:
            return _cert("measure_identity", n, ell, depth, cases, False,
                         {"invariant": list(nu), "lhs": lhs, "rhs": rhs,
                          "lambda": lam})
        cases += 1
    return _cert("measure_identity", n, ell, depth, cases, True, None,
                 extra={"lambda": lam})


def solve_lambda_from_counts(n, ell):
    """The unique lambda solving the counting identity at nu = t_1..t_n.

    Independent route to the lambda coefficients: the system is triangular
    because a sublattice of Lambda_{t_m} cannot have invariant t_j for j < m.
    """
    t_lattices = [LatticeClass.minimal_vector_lattice(m, n, ell) for m in range(1, n + 1)]
    std = LatticeClass.standard(n, ell)
    lam = [0] * n
    # triangular: a sublattice of Lambda_{t_m} has index >= ell^m, so the
    # stratum nu = t_j only sees m <= j
    for j in range(1, n + 1):
        nu = InvariantVec(tuple([1] * j + [0] * (n - j)))
        lhs = enumerate_sublattices(nu, std)
        acc = sum(
            lam[m - 1] * enumerate_sublattices(nu, t_lattices[m - 1])
            for m in range(1, j)
        )
        diag = enumerate_sublattices(nu, t_lattices[j - 1])
        rem = lhs - acc
        if rem % diag:
            raise ArithmeticError("counting system is not integrally solvable")
        lam[j - 1] = rem // diag
    return lam


def _cert(identity, n, ell, depth, cases, ok, failure, extra=None):
    out = {
        "identity": identity,
        "n": n,
        "ell": ell,
        "depth": depth,
        "cases_checked": cases,
        "pass": ok,
        "first_failure": failure,
    }
    if extra:
        out.update(extra)
    return out
