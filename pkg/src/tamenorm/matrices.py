"""Exact linear algebra used everywhere else.

Three flavours live here:

* integer matrices: Hermite normal form (row style, upper triangular),
  determinants, minor valuations (Smith exponents at a prime);
* Fraction matrices: inverse / solve, for lattice duals and coset tests;
* matrices over F_p and Z/p^N: rank, RREF, inverses, Smith witnesses.

Everything is pure and allocation-cheap; sizes stay tiny (n <= 8).
"""

from fractions import Fraction
from itertools import combinations, product


# ---------------------------------------------------------------------------
# valuations

def v_ell(x, ell):
    """ell-adic valuation of a nonzero int or Fraction."""
    if isinstance(x, Fraction):
        return v_ell(x.numerator, ell) - v_ell(x.denominator, ell)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    x = abs(x)
    while x % ell == 0:
        x //= ell
        v += 1
    return v


def ell_power_denominator(x, ell):
    """True if the reduced denominator of the Fraction x is a power of ell."""
    d = x.denominator
    while d % ell == 0:
        d //= ell
    return d == 1


# ---------------------------------------------------------------------------
# generic dense helpers (entries int or Fraction)

def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    assert len(A[0]) == k
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_identity(n, one=1):
    return tuple(tuple(one if i == j else one * 0 for j in range(n)) for i in range(n))


def mat_inv(A):
    """Inverse of a square matrix, computed over Q.  Raises on singular input."""
    n = len(A)
    work = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
            for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        work[col], work[piv] = work[piv], work[col]
        inv = 1 / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def mat_det(A):
    """Exact determinant via fraction-free Bareiss."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if piv is None:
                return 0
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# integer lattices: HNF and ell-normalisation

def hnf_rows(rows):
    """Row-style Hermite normal form of integer rows spanning full column rank.

    Returns an n x n upper-triangular matrix with positive diagonal and the
    entries above each pivot reduced into [0, pivot).  This is the canonical
    basis of the integer row span.
    """
    if not rows:
        raise ValueError("no rows")
    n = len(rows[0])
    work = [list(r) for r in rows]
    out = []
    for col in range(n):
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            r0 = nz[0]
            for r in nz[1:]:
                q = r[col] // r0[col]
                if q:
                    for j in range(col, n):
                        r[j] -= q * r0[j]
        nz = [r for r in work if r[col] != 0]
        if not nz:
            raise ValueError("rank deficient rows")
        piv = nz[0]
        work.remove(piv)
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
    # reduce entries above each diagonal pivot
    for i in range(n - 1, -1, -1):
        for j in range(i):
            q = out[j][i] // out[i][i]
            if q:
                for k in range(i, n):
                    out[j][k] -= q * out[i][k]
    return tuple(tuple(r) for r in out)


def ell_normalize(rows, ell):
    """Canonical basis, over Z_ell, of the lattice spanned by integer rows.

    The prime-to-ell structure is trivialised by saturating with ell^k Z^n,
    where k is the ell-valuation of the determinant; the result is the unique
    HNF basis with determinant ell^k.
    """
    H0 = hnf_rows(rows)
    n = len(H0)
    det = 1
    for i in range(n):
        det *= H0[i][i]
    k = v_ell(det, ell)
    sat = [list(r) for r in H0]
    q = ell ** k
    for i in range(n):
        e = [0] * n
        e[i] = q
        sat.append(e)
    H = hnf_rows(sat)
    det = 1
    for i in range(n):
        det *= H[i][i]
    assert det == ell ** k
    return H


def smith_ell_exponents(M, ell):
    """ell-exponents of the elementary divisors of a nonsingular integer matrix.

    Computed from minor valuations: the i-th divisor exponent is
    min-valuation over i x i minors minus the same for (i-1) x (i-1) minors.
    Returned weakly increasing.
    """
    n = len(M)
    vals = [0]  # v(D_0) = 0
    idx = range(n)
    for size in range(1, n + 1):
        best = None
        for rs in combinations(idx, size):
            for cs in combinations(idx, size):
                d = mat_det([[M[r][c] for c in cs] for r in rs])
                if d == 0:
                    continue
                v = v_ell(d, ell)
                if best is None or v < best:
                    best = v
                if best == vals[-1]:
                    break
            if best == vals[-1]:
                break
        if best is None:
            raise ValueError("singular matrix")
        vals.append(best)
    return tuple(vals[i + 1] - vals[i] for i in range(n))


# ---------------------------------------------------------------------------
# matrices over F_p

def mat_mod(A, p):
    return tuple(tuple(x % p for x in row) for row in A)


def rref_mod(rows, p):
    """Reduced row echelon form over F_p; zero rows dropped.

    The result is canonical, so equal row spans give equal tuples.
    """
    work = [list(r) for r in rows]
    m = len(work)
    n = len(work[0]) if m else 0
    out = []
    lead = 0
    r = 0
    while r < m and lead < n:
        piv = next((i for i in range(r, m) if work[i][lead] % p != 0), None)
        if piv is None:
            lead += 1
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = pow(work[r][lead], -1, p)
        work[r] = [(x * inv) % p for x in work[r]]
        for i in range(m):
            if i != r and work[i][lead] % p:
                f = work[i][lead]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[r])]
        r += 1
        lead += 1
    for row in work[:r]:
        out.append(tuple(row))
    return tuple(out)


def rank_mod(A, p):
    return len(rref_mod(A, p))


def det_mod(A, p):
    n = len(A)
    M = [[x % p for x in row] for row in A]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = (det * M[col][col]) % p
        inv = pow(M[col][col], -1, p)
        for r in range(col + 1, n):
            if M[r][col]:
                f = (M[r][col] * inv) % p
                M[r] = [(x - f * y) % p for x, y in zip(M[r], M[col])]
    return det % p


def inv_mod_matrix(A, p):
    n = len(A)
    work = [[A[i][j] % p for j in range(n)] + [int(i == j) for j in range(n)]
            for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] % p), None)
        if piv is None:
            raise ZeroDivisionError("matrix not invertible mod p")
        work[col], work[piv] = work[piv], work[col]
        inv = pow(work[col][col], -1, p)
        work[col] = [(x * inv) % p for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] % p:
                f = work[r][col]
                work[r] = [(x - f * y) % p for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def smith_witness_mod(X, p):
    """(U, V, r) with U X V = E_r over F_p, E_r the rank-r idempotent matrix.

    U and V are invertible; this is constructive Gaussian elimination and is
    the witness that any rank-r matrix is equivalent to E_r.
    """
    m = len(X)
    n = len(X[0])
    A = [[x % p for x in row] for row in X]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    r = 0
    while True:
        piv = None
        for i in range(r, m):
            for j in range(r, n):
                if A[i][j] % p:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i0, j0 = piv
        if i0 != r:
            A[r], A[i0] = A[i0], A[r]
            U[r], U[i0] = U[i0], U[r]
        if j0 != r:
            for row in A:
                row[r], row[j0] = row[j0], row[r]
            for row in V:
                row[r], row[j0] = row[j0], row[r]
        inv = pow(A[r][r], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        U[r] = [(x * inv) % p for x in U[r]]
        for i in range(m):
            if i != r and A[i][r]:
                f = A[i][r]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
                U[i] = [(x - f * y) % p for x, y in zip(U[i], U[r])]
        for j in range(n):
            if j != r:
                f = A[r][j]
                if f:
                    for i in range(m):
                        A[i][j] = (A[i][j] - f * A[i][r]) % p
                    for i in range(n):
                        V[i][j] = (V[i][j] - f * V[i][r]) % p
        r += 1
    return tuple(map(tuple, U)), tuple(map(tuple, V)), r


def all_matrices_mod(m, n, p):
    for flat in product(range(p), repeat=m * n):
        yield tuple(flat[i * n:(i + 1) * n] for i in range(m))


def gl_order(n, p):
    o = 1
    for j in range(n):
        o *= p ** n - p ** j
    return o


def gl_elements(n, p):
    """All of GL_n(F_p) by filtering; fine for the desk-scale sizes used here."""
    for M in all_matrices_mod(n, n, p):
        if det_mod(M, p) != 0:
            yield M


def gl_generators(n, p):
    """A small generating set of GL_n(F_p): torus gen, cycle, transvection."""
    gens = []
    g = primitive_root(p)
    d = [[int(i == j) for j in range(n)] for i in range(n)]
    d[0][0] = g
    gens.append(tuple(map(tuple, d)))
    if n > 1:
        c = [[0] * n for _ in range(n)]
        for i in range(n):
            c[i][(i + 1) % n] = 1
        gens.append(tuple(map(tuple, c)))
        t = [[int(i == j) for j in range(n)] for i in range(n)]
        t[0][1] = 1
        gens.append(tuple(map(tuple, t)))
    return gens


def primitive_root(p):
    if p == 2:
        return 1
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise ValueError("no primitive root (p not prime?)")


# ---------------------------------------------------------------------------
# matrices over Z/p^N

def mat_mul_modq(A, B, q):
    n, k, m = len(A), len(B), len(B[0])
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) % q for j in range(m))
        for i in range(n)
    )


def inv_mod_matrix_q(A, p, N):
    """Inverse over Z/p^N by Gauss-Jordan with unit pivoting."""
    q = p ** N
    n = len(A)
    work = [[A[i][j] % q for j in range(n)] + [int(i == j) for j in range(n)]
            for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] % p), None)
        if piv is None:
            raise ZeroDivisionError("matrix not invertible mod p^N")
        work[col], work[piv] = work[piv], work[col]
        inv = pow(work[col][col], -1, q)
        work[col] = [(x * inv) % q for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [(x - f * y) % q for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


def mat_pow_modq(A, e, q):
    n = len(A)
    R = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    B = A
    while e:
        if e & 1:
            R = mat_mul_modq(R, B, q)
        e >>= 1
        if e:
            B = mat_mul_modq(B, B, q)
    return R


def is_prime(x):
    if x < 2:
        return False
    d = 2
    while d * d <= x:
        if x % d == 0:
            return False
        d += 1
    return True
