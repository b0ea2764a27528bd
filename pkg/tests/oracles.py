"""Independent brute-force oracles shared by the test suite.

Everything here enumerates naively over F_q objects (q prime); none of it
touches the closed forms or recurrences under test.
"""

from itertools import product


def all_vectors(n, q):
    return list(product(range(q), repeat=n))


def span(vectors, n, q):
    """Row space of `vectors` in F_q^n as a frozenset of points (q prime)."""
    space = {(0,) * n}
    for v in vectors:
        space |= {
            tuple((c * x + y) % q for x, y in zip(v, w))
            for c in range(1, q)
            for w in space
        }
    return frozenset(space)


def all_subspaces(n, q):
    """Every subspace of F_q^n as a frozenset of points (exhaustive BFS)."""
    points = all_vectors(n, q)
    zero = span([], n, q)
    seen = {zero}
    frontier = [zero]
    while frontier:
        cur = frontier.pop()
        for v in points:
            if v in cur:
                continue
            nxt = span(list(cur) + [v], n, q)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def subspace_dim(space, q):
    size = len(space)
    d = 0
    while q ** d < size:
        d += 1
    assert q ** d == size
    return d


def count_subspaces(n, d, q):
    """Brute-force number of d-dimensional subspaces of F_q^n."""
    return sum(1 for s in all_subspaces(n, q) if subspace_dim(s, q) == d)


def matrix_rank_bruteforce(M, q):
    """Rank over F_q by enumerating the row span."""
    n = len(M[0])
    return subspace_dim(span([tuple(r) for r in M], n, q), q)


def count_rank_matrices(r, m, n, q):
    """Brute-force count of rank-r matrices in M_{m x n}(F_q)."""
    count = 0
    for flat in product(range(q), repeat=m * n):
        M = [flat[i * n:(i + 1) * n] for i in range(m)]
        if matrix_rank_bruteforce(M, q) == r:
            count += 1
    return count


def count_chains(j, m, q):
    """Chains 0 = V_0 < V_1 < ... < V_j < F_q^m by exhaustive enumeration.

    Every V_i with i >= 1 is a proper nonzero subspace; inclusions strict.
    """
    if j == 0:
        return 1
    proper = [s for s in all_subspaces(m, q) if 1 < len(s) < q ** m]

    def extend(last, length):
        if length == j:
            return 1
        return sum(extend(s, length + 1) for s in proper if len(s) > len(last) and last < s)

    return sum(extend(s, 1) for s in proper)
