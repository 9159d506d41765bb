"""The rational group algebra of S_n: shuffles and Barr's idempotents.

Permutations are tuples in one-line notation; group algebra elements are
sparse dicts {permutation: Fraction}.  The product convention is
(sigma . tau) = "apply tau first".
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations

from . import linalg
from .graded import InputError, InvariantError, ONE, ZERO, perm_compose, perm_sign

DEFAULT_CAP = 5


class GroupAlgebraElement:
    def __init__(self, n, terms=None):
        self.n = int(n)
        self.terms = {}
        for p, c in (terms or {}).items():
            c = Fraction(c)
            if not c:
                continue
            if len(p) != self.n or sorted(p) != list(range(1, self.n + 1)):
                raise InputError("bad permutation %r in S_%d" % (p, self.n))
            self.terms[p] = c

    @classmethod
    def unit(cls, n):
        return cls(n, {tuple(range(1, n + 1)): ONE})

    def add(self, other, scale=ONE):
        if other.n != self.n:
            raise InputError("arity mismatch")
        terms = dict(self.terms)
        for p, c in other.terms.items():
            val = terms.get(p, ZERO) + scale * c
            if val:
                terms[p] = val
            else:
                terms.pop(p, None)
        return GroupAlgebraElement(self.n, terms)

    def scale(self, c):
        return GroupAlgebraElement(self.n, {p: c * x for p, x in self.terms.items()})

    def mul(self, other):
        if other.n != self.n:
            raise InputError("arity mismatch")
        terms = {}
        for p, cp in self.terms.items():
            for q, cq in other.terms.items():
                r = perm_compose(p, q)
                terms[r] = terms.get(r, ZERO) + cp * cq
        return GroupAlgebraElement(self.n, terms)

    def __eq__(self, other):
        return (isinstance(other, GroupAlgebraElement)
                and self.n == other.n and self.terms == other.terms)

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        body = " + ".join("%s*%s" % (c, list(p)) for p, c in sorted(self.terms.items()))
        return "GroupAlgebraElement(S_%d: %s)" % (self.n, body or "0")


def shuffle_element(p, q):
    """mu_{p,q}: the signed sum over all (p,q)-shuffles in S_{p+q}."""
    if p < 1 or q < 1:
        raise InputError("shuffle parameters must be >= 1")
    n = p + q
    terms = {}
    for pos in combinations(range(1, n + 1), p):
        rest = [i for i in range(1, n + 1) if i not in pos]
        sigma = tuple(list(pos) + rest)  # sigma(1..p)=pos ascending, etc.
        terms[sigma] = Fraction(perm_sign(sigma))
    return GroupAlgebraElement(n, terms)


def total_shuffle(n):
    """mu_n = sum of mu_{i,n-i} for 1 <= i <= n-1."""
    if n < 2:
        raise InputError("total shuffle needs n >= 2")
    out = GroupAlgebraElement(n)
    for i in range(1, n):
        out = out.add(shuffle_element(i, n - i))
    return out


def _all_perms(n):
    return [tuple(p) for p in permutations(range(1, n + 1))]


def _left_mult_matrix(elem, perms, pidx):
    n = len(perms)
    mat = linalg.zeros(n, n)
    for j, q in enumerate(perms):
        for p, c in elem.terms.items():
            mat[pidx[perm_compose(p, q)]][j] = c
    return mat


def _minimal_polynomial(mat):
    """Coefficients (ascending) of the monic minimal polynomial of mat."""
    n = len(mat)
    powers = [linalg.identity(n)]
    vecs = [[powers[0][i][j] for i in range(n) for j in range(n)]]
    while True:
        powers.append(linalg.mat_mul(powers[-1], mat))
        vecs.append([powers[-1][i][j] for i in range(n) for j in range(n)])
        cols = len(vecs)
        stacked = [[vecs[c][r] for c in range(cols)] for r in range(n * n)]
        ker = linalg.kernel_basis(stacked)
        if ker:
            rel = ker[0]  # leftmost free column: lowest-degree relation
            lead = rel[-1]
            return [c / lead for c in rel]


def _poly_divmod(a, b):
    """Polynomial division over Q, ascending-coefficient lists."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [ZERO] * max(0, len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / lb
        q[i - db] = c
        for j in range(db + 1):
            a[i - db + j] -= c * b[j]
    while len(a) > 1 and not a[-1]:
        a.pop()
    return q, a


def _poly_mul(a, b):
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_xgcd(a, b):
    """Extended gcd over Q[x]; returns (g, s, t) with s a + t b = g."""
    r0, r1 = list(a), list(b)
    s0, s1 = [ONE], [ZERO]
    t0, t1 = [ZERO], [ONE]
    while any(r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    return r0, s0, t0


def _poly_sub(a, b):
    out = [ZERO] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    while len(out) > 1 and not out[-1]:
        out.pop()
    return out


def _eval_poly_on_element(coeffs, elem):
    """p(elem) in the group algebra (ascending coefficients)."""
    out = GroupAlgebraElement(elem.n)
    power = GroupAlgebraElement.unit(elem.n)
    for i, c in enumerate(coeffs):
        if i:
            power = power.mul(elem)
        if c:
            out = out.add(power.scale(c))
    return out


_barr_cache = {}


def barr_idempotent(n, cap=DEFAULT_CAP):
    """Barr's idempotent e_n: the spectral projection onto im(mu_n .)
    along ker(mu_n .), realised as a constant-free polynomial in mu_n.

    Properties (i) e^2 = e, (ii) constant-free polynomial in mu_n, and
    (iii) e mu_{i,n-i} = mu_{i,n-i} are verified exactly before returning.
    """
    if n < 2:
        raise InputError("Barr idempotent needs n >= 2")
    if n > cap:
        raise InputError("n = %d exceeds the cap %d (S_n has n! elements)" % (n, cap))
    if n in _barr_cache:
        return _barr_cache[n]
    mu = total_shuffle(n)
    perms = _all_perms(n)
    pidx = {p: i for i, p in enumerate(perms)}
    mat = _left_mult_matrix(mu, perms, pidx)
    minpoly = _minimal_polynomial(mat)
    # split off the x^s factor
    s = 0
    while s < len(minpoly) and not minpoly[s]:
        s += 1
    if s == 0:
        raise InvariantError("mu_%d is invertible; no constant-free projection" % n)
    if s > 1:
        raise InvariantError("ker(M^2) != ker(M) for mu_%d" % n)
    q = minpoly[s:]
    # p = x^s * a with a * x^s = 1 mod q  ->  projection onto im along ker
    xs = [ZERO] * s + [ONE]
    g, a, _ = _poly_xgcd(xs, q)
    if len(g) != 1 or not g[0]:
        raise InvariantError("x^s and q(x) are not coprime for mu_%d" % n)
    a = [c / g[0] for c in a]
    proj = _poly_mul(xs, a)
    _, proj = _poly_divmod(proj, minpoly)
    if proj and proj[0]:
        raise InvariantError("projection polynomial has a constant term")
    e = _eval_poly_on_element(proj, mu)
    if not e.mul(e).__eq__(e):
        raise InvariantError("e_%d is not idempotent" % n)
    for i in range(1, n):
        mi = shuffle_element(i, n - i)
        if not e.mul(mi).__eq__(mi):
            raise InvariantError("e_%d mu_{%d,%d} != mu_{%d,%d}" % (n, i, n - i, i, n - i))
    _barr_cache[n] = e
    return e
