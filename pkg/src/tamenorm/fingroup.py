"""Small concrete finite groups: permutations and matrices over Z/N.

Elements are hashable tuples; a FiniteGroup wraps the element set with its
multiplication.  The catalog provides the groups used by the cohomology
functor test battery: S_3, S_4, D_8, GL_2(F_3), each with a distinguished
"Borel-like" subgroup for coset models.
"""

def _perm_mul(p, q):
    # (p*q)(i) = p(q(i))
    return tuple(p[q[i]] for i in range(len(p)))


def _perm_inv(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


class FiniteGroup:
    """A finite group with explicit elements and multiplication."""

    def __init__(self, elements, mul, inv, identity, name=""):
        self.elements = tuple(elements)
        self.mul = mul
        self.inv = inv
        self.identity = identity
        self.name = name
        self._set = frozenset(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    # -- subgroup machinery --------------------------------------------------

    def generate(self, gens):
        """Subgroup generated by `gens`, as a frozenset."""
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                for y in (self.mul(x, g), self.mul(g, x)):
                    if y not in seen:
                        seen.add(y)
                        frontier.append(y)
        return frozenset(seen)

    def conjugate(self, g, H):
        ginv = self.inv(g)
        return frozenset(self.mul(self.mul(g, h), ginv) for h in H)

    def left_coset_reps(self, H, within=None):
        """Representatives of (within)/H, `within` a subgroup containing H."""
        pool = within if within is not None else self._set
        seen = set()
        reps = []
        for g in sorted(pool):
            if g in seen:
                continue
            reps.append(g)
            for h in H:
                seen.add(self.mul(g, h))
        return reps

    def double_coset_reps(self, A, B, within=None):
        pool = within if within is not None else self._set
        seen = set()
        reps = []
        for g in sorted(pool):
            if g in seen:
                continue
            reps.append(g)
            for a in A:
                ag = self.mul(a, g)
                for b in B:
                    seen.add(self.mul(ag, b))
        return reps

    def double_coset(self, A, g, B):
        return frozenset(self.mul(self.mul(a, g), b) for a in A for b in B)

    def is_subgroup(self, H):
        if self.identity not in H:
            return False
        return all(self.mul(a, self.inv(b)) in H for a in H for b in H)

    def is_normal(self, H, K):
        """H normal in K (both subgroups, H <= K)."""
        return all(self.conjugate(k, H) == frozenset(H) for k in K)


def symmetric_group(n, name=None):
    from itertools import permutations

    elems = [tuple(p) for p in permutations(range(n))]
    ident = tuple(range(n))
    return FiniteGroup(elems, _perm_mul, _perm_inv, ident, name or f"S{n}")


def dihedral_8():
    """Symmetries of the square as permutations of its 4 vertices."""
    s4 = symmetric_group(4)
    r = (1, 2, 3, 0)
    f = (1, 0, 3, 2)
    elems = sorted(s4.generate([r, f]))
    return FiniteGroup(elems, _perm_mul, _perm_inv, s4.identity, "D8")


def _matmul_modn(N):
    def mul(A, B):
        n = len(A)
        return tuple(
            tuple(sum(A[i][t] * B[t][j] for t in range(n)) % N for j in range(n))
            for i in range(n)
        )

    return mul


def matrix_group_mod(generators, N, name="matgrp", max_order=200000):
    """Closure of invertible generator matrices over Z/N."""
    n = len(generators[0])
    mul = _matmul_modn(N)
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    gens = [tuple(tuple(x % N for x in row) for row in g) for g in generators]
    seen = {ident}
    frontier = [ident]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > max_order:
                    raise ValueError("generated group exceeds the configured bound")
                frontier.append(y)
    elems = sorted(seen)
    order = {}

    def inv(A):
        # finite group: A^{-1} = A^{k-1} with k the order of A
        if A in order:
            k = order[A]
        else:
            k = 1
            cur = A
            while cur != ident:
                cur = mul(cur, A)
                k += 1
            order[A] = k
        out = ident
        for _ in range(k - 1):
            out = mul(out, A)
        return out

    return FiniteGroup(elems, mul, inv, ident, name)


def gl2_f3():
    gens = [((1, 1), (0, 1)), ((2, 0), (0, 1)), ((0, 2), (1, 0))]
    G = matrix_group_mod(gens, 3, "GL2(F3)")
    assert len(G) == 48
    return G


def gl2_f3_borel(G):
    return frozenset(g for g in G if g[1][0] % 3 == 0)


CATALOG = {}


def catalog_group(name):
    """Built-in groups with a distinguished subgroup for coset models."""
    if name in CATALOG:
        return CATALOG[name]
    if name == "S3":
        G = symmetric_group(3)
        B = G.generate([(1, 0, 2)])          # <(12)>
    elif name == "S4":
        G = symmetric_group(4)
        B = G.generate([(1, 0, 2, 3), (0, 2, 1, 3)])  # S3 fixing the last point
    elif name == "D8":
        G = dihedral_8()
        B = G.generate([(1, 2, 3, 0)])       # rotation subgroup
    elif name == "GL2F3":
        G = gl2_f3()
        B = gl2_f3_borel(G)
    else:
        raise KeyError(f"unknown catalog group {name!r}")
    CATALOG[name] = (G, B)
    return G, B


CATALOG_NAMES = ("S3", "S4", "D8", "GL2F3")
