"""Exact arithmetic in Q[s, z] / (s^2 - ell, Phi_k(z)).

The element s plays the role of sqrt(ell), so half-integral powers of ell are
exact ring elements; z is a primitive k-th root of unity.  Every scalar is a
residue with rational coefficients, stored as an integer coefficient vector
over a common positive denominator, so equality is decidable and canonical.

The ring is not always a field (sqrt(ell) may already lie in Q(zeta_k));
inversion is defined exactly for units and raises NotInvertibleError
otherwise.  All operations are pure; values are immutable.

`Rational` is an alias for fractions.Fraction: exact rational arithmetic with
arbitrary-precision integers is exactly the stdlib type, so we do not rebuild
it.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .matrices import is_prime

Rational = Fraction


class NotInvertibleError(ZeroDivisionError):
    """Raised when inverting a non-unit scalar."""


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficients low degree first)

def _poly_divmod(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact integer polynomial division")
        q = c // den[-1]
        out[i] = q
        for j, d in enumerate(den):
            num[i + j] -= q * d
    while num and num[-1] == 0:
        num.pop()
    return out, num


@lru_cache(maxsize=None)
def cyclotomic_poly(k):
    """Coefficients of the k-th cyclotomic polynomial, low degree first."""
    num = [-1] + [0] * (k - 1) + [1]  # z^k - 1
    for d in range(1, k):
        if k % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_poly(d))
            assert not rem
    return tuple(num)


@lru_cache(maxsize=None)
def _ring_tables(k):
    """Reduction data for Q[z]/Phi_k: degree d and z^e mod Phi_k for e < max(k, 2d-1)."""
    phi = cyclotomic_poly(k)
    d = len(phi) - 1
    n_pows = max(k, 2 * d - 1)
    pows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(n_pows):
        pows.append(tuple(cur))
        nxt = [0] * (d + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] = c
        if nxt[d]:
            top = nxt[d]
            for i in range(d):
                nxt[i] -= top * phi[i]
        cur = nxt[:d]
    return d, tuple(pows)


@lru_cache(maxsize=None)
def _lift_table(k, K):
    """Images of z_k^j (j < deg Phi_k) inside Q[z]/Phi_K via z_k = z_K^(K/k)."""
    assert K % k == 0
    d_small, _ = _ring_tables(k)
    d_big, pows = _ring_tables(K)
    step = K // k
    return d_big, tuple(pows[(j * step) % K] for j in range(d_small))


def _normalize(num, den):
    if den < 0:
        num = tuple(-x for x in num)
        den = -den
    g = den
    for x in num:
        g = gcd(g, x)
        if g == 1:
            break
    if g > 1:
        num = tuple(x // g for x in num)
        den //= g
    if all(x == 0 for x in num):
        den = 1
    return num, den


class ExactScalar:
    """An element of Q[s, z]/(s^2 - ell, Phi_k(z)).

    Coefficient layout: ``num[i*d + j]`` is the integer numerator of the
    coefficient of s^i z^j (i in {0,1}, j < d = deg Phi_k), all over the
    common positive denominator ``den``.
    """

    __slots__ = ("ell", "k", "num", "den")
    __hash__ = None  # equality crosses cyclotomic orders; see __eq__

    def __init__(self, ell, k, num, den=1):
        if not is_prime(ell):
            raise ValueError(f"base prime must be prime, got {ell}")
        if k < 1:
            raise ValueError("cyclotomic order must be >= 1")
        d, _ = _ring_tables(k)
        num = tuple(int(x) for x in num)
        if len(num) != 2 * d:
            raise ValueError("coefficient vector has wrong length")
        self.ell = ell
        self.k = k
        self.num, self.den = _normalize(num, int(den))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rational(q, ell, k=1):
        q = Fraction(q)
        d, _ = _ring_tables(k)
        num = [0] * (2 * d)
        num[0] = q.numerator
        return ExactScalar(ell, k, num, q.denominator)

    @staticmethod
    def zero(ell, k=1):
        return ExactScalar.from_rational(0, ell, k)

    @staticmethod
    def one(ell, k=1):
        return ExactScalar.from_rational(1, ell, k)

    @staticmethod
    def sqrt_ell(ell):
        return ExactScalar(ell, 1, (0, 1))

    @staticmethod
    def zeta(ell, k, e=1):
        """The root of unity zeta_k^e."""
        d, pows = _ring_tables(k)
        vec = pows[e % k]
        return ExactScalar(ell, k, tuple(vec) + (0,) * d)

    # -- structure ----------------------------------------------------------

    @property
    def d(self):
        return len(self.num) // 2

    def _blocks(self):
        d = self.d
        return self.num[:d], self.num[d:]

    def lift(self, K):
        """The same value viewed in cyclotomic order K (k must divide K)."""
        if K == self.k:
            return self
        if K % self.k != 0:
            raise ValueError("can only lift to a multiple order")
        d_big, table = _lift_table(self.k, K)
        out = [0] * (2 * d_big)
        a0, a1 = self._blocks()
        for j, c in enumerate(a0):
            if c:
                for t, v in enumerate(table[j]):
                    out[t] += c * v
        for j, c in enumerate(a1):
            if c:
                for t, v in enumerate(table[j]):
                    out[d_big + t] += c * v
        return ExactScalar(self.ell, K, out, self.den)

    def _common(self, other):
        if not isinstance(other, ExactScalar):
            other = ExactScalar.from_rational(other, self.ell, 1)
        if other.ell != self.ell:
            raise ValueError("scalars live over different base primes")
        K = lcm(self.k, other.k)
        return self.lift(K), other.lift(K)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        a, b = self._common(other)
        num = tuple(x * b.den + y * a.den for x, y in zip(a.num, b.num))
        return ExactScalar(a.ell, a.k, num, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(self.ell, self.k, tuple(-x for x in self.num), self.den)

    def __sub__(self, other):
        a, b = self._common(other)
        num = tuple(x * b.den - y * a.den for x, y in zip(a.num, b.num))
        return ExactScalar(a.ell, a.k, num, a.den * b.den)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = self._common(other)
        d, pows = _ring_tables(a.k)
        ell = a.ell
        a0, a1 = a._blocks()
        b0, b1 = b._blocks()
        # s-blocks: (a0 + a1 s)(b0 + b1 s) = (a0 b0 + ell a1 b1) + (a0 b1 + a1 b0) s
        conv0 = [0] * (2 * d - 1)
        conv1 = [0] * (2 * d - 1)
        for i in range(d):
            x0, x1 = a0[i], a1[i]
            if x0 == 0 and x1 == 0:
                continue
            for j in range(d):
                y0, y1 = b0[j], b1[j]
                if y0 == 0 and y1 == 0:
                    continue
                conv0[i + j] += x0 * y0 + ell * x1 * y1
                conv1[i + j] += x0 * y1 + x1 * y0
        out = [0] * (2 * d)
        for e in range(2 * d - 1):
            c0, c1 = conv0[e], conv1[e]
            if c0 == 0 and c1 == 0:
                continue
            if e < d:
                out[e] += c0
                out[d + e] += c1
            else:
                red = pows[e]
                for t, v in enumerate(red):
                    if v:
                        out[t] += c0 * v
                        out[d + t] += c1 * v
        return ExactScalar(ell, a.k, out, a.den * b.den)

    __rmul__ = __mul__

    def inverse(self):
        """Exact inverse; raises NotInvertibleError for non-units."""
        n = 2 * self.d
        basis = []
        for i in range(n):
            vec = [0] * n
            vec[i] = 1
            e = ExactScalar(self.ell, self.k, vec)
            basis.append((self * e))
        # columns of the multiplication-by-self matrix, over Q
        M = [[Fraction(basis[j].num[i], basis[j].den) for j in range(n)] for i in range(n)]
        rhs = [Fraction(int(i == 0)) for i in range(n)]
        sol = _solve_fraction(M, rhs)
        if sol is None:
            raise NotInvertibleError("not invertible")
        den = 1
        for x in sol:
            den = den * x.denominator // gcd(den, x.denominator)
        num = [x.numerator * (den // x.denominator) for x in sol]
        return ExactScalar(self.ell, self.k, num, den)

    def __truediv__(self, other):
        a, b = self._common(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = ExactScalar.one(self.ell, self.k)
        b = self
        while e:
            if e & 1:
                r = r * b
            e >>= 1
            if e:
                b = b * b
        return r

    def conj(self):
        """The cyclotomic conjugation z -> z^(-1); fixes s.  An involution."""
        d, pows = _ring_tables(self.k)
        out = [0] * (2 * d)
        a0, a1 = self._blocks()
        for j in range(d):
            red = pows[(self.k - j) % self.k]
            if a0[j]:
                for t, v in enumerate(red):
                    out[t] += a0[j] * v
            if a1[j]:
                for t, v in enumerate(red):
                    out[d + t] += a1[j] * v
        return ExactScalar(self.ell, self.k, out, self.den)

    # -- predicates / conversions -------------------------------------------

    def is_zero(self):
        return all(x == 0 for x in self.num)

    def is_one(self):
        return self == 1

    def is_rational(self):
        return all(x == 0 for i, x in enumerate(self.num) if i != 0)

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("not a rational scalar")
        return Fraction(self.num[0], self.den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.from_rational(other, self.ell, 1)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.ell != other.ell:
            return False
        a, b = self._common(other)
        return a.num == b.num and a.den == b.den

    def __bool__(self):
        return not self.is_zero()

    # -- serialization ------------------------------------------------------

    def serialize(self):
        """Canonical text form: sum of monomials p/q[*s][*z^j], or "0"."""
        d = self.d
        parts = []
        for j in range(d):
            for i in (0, 1):
                c = self.num[i * d + j]
                if c == 0:
                    continue
                q = Fraction(c, self.den)
                body = f"{q.numerator}" if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
                if i == 1:
                    body += "*s"
                if j == 1:
                    body += "*z"
                elif j > 1:
                    body += f"*z^{j}"
                parts.append(body)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"ExactScalar({self.ell}, k={self.k}, {self.serialize()})"


def _solve_fraction(M, rhs):
    """Solve M x = rhs over Q; None if singular."""
    n = len(M)
    work = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] != 0), None)
        if piv is None:
            return None
        work[col], work[piv] = work[piv], work[col]
        inv = 1 / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [work[i][n] for i in range(n)]


def scalar_ops(a, b):
    """Convenience triple (a+b, a*b, a^(-1) if a is a unit else None)."""
    try:
        inv = a.inverse()
    except NotInvertibleError:
        inv = None
    return a + b, a * b, inv


def conj_cyclo(a):
    return a.conj()


# ---------------------------------------------------------------------------
# univariate polynomials over ExactScalar

class Poly:
    """Polynomial over ExactScalar, coefficients stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("need at least the constant coefficient")
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @staticmethod
    def constant(c):
        return Poly([c])

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0].is_zero():
            return -1
        return len(self.coeffs) - 1

    def constant_term(self):
        return self.coeffs[0]

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else None
            b = other.coeffs[i] if i < len(other.coeffs) else None
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return Poly(out)

    def __mul__(self, other):
        if isinstance(other, ExactScalar):
            return Poly([c * other for c in self.coeffs])
        zero = self.coeffs[0] - self.coeffs[0]
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def eval(self, x):
        """Exact Horner evaluation."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def serialize(self):
        return " ; ".join(c.serialize() for c in self.coeffs)

    def __repr__(self):
        return f"Poly[{self.serialize()}]"


def poly_eval(P, x):
    return P.eval(x)
