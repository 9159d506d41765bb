"""Graded vector spaces over the rationals: signs, suspension, cohomology.

Degrees are cohomological throughout (differentials have degree +1).
Vectors are sparse dicts {basis name: Fraction}; linear maps are stored
column-wise.  Everything is exact; no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg

ZERO = Fraction(0)
ONE = Fraction(1)


class InputError(ValueError):
    """Bad user-supplied data (exit code 2 territory)."""


class InvariantError(RuntimeError):
    """An internally checked identity failed; indicates a bug."""


# ---------------------------------------------------------------------------
# sparse vectors


def vec(*pairs):
    return {name: Fraction(c) for name, c in pairs if c}


def vadd(u, v, scale=ONE):
    out = dict(u)
    for k, c in v.items():
        val = out.get(k, ZERO) + scale * c
        if val:
            out[k] = val
        else:
            out.pop(k, None)
    return out


def vscale(u, c):
    if not c:
        return {}
    return {k: c * x for k, x in u.items()}


def vsub(u, v):
    return vadd(u, v, scale=-ONE)


def is_zero_vec(u):
    return not any(u.values())


# ---------------------------------------------------------------------------
# Koszul signs


def perm_sign(sigma):
    """Sign of a permutation in one-line notation (tuple of 1..n)."""
    n = len(sigma)
    inv = 0
    for i in range(n):
        for j in range(i + 1, n):
            if sigma[i] > sigma[j]:
                inv += 1
    return -1 if inv % 2 else 1


def perm_inverse(sigma):
    n = len(sigma)
    out = [0] * n
    for i, s in enumerate(sigma):
        out[s - 1] = i + 1
    return tuple(out)


def perm_compose(sigma, tau):
    """(sigma . tau)(i) = sigma(tau(i)): tau acts first."""
    return tuple(sigma[t - 1] for t in tau)


def koszul_sign(sigma, degrees, mode="koszul"):
    """Sign picked up when sigma reorders a tensor word with these degrees.

    mode="koszul" is the plain Koszul sign (multiplicative extension of
    (-1)^{|x||y|} over adjacent transpositions); mode="gamma" additionally
    multiplies by sgn(sigma).  Depends on degrees mod 2 only.
    """
    if len(sigma) != len(degrees):
        raise InputError("permutation/degree length mismatch")
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise InputError("not a permutation: %r" % (sigma,))
    n = len(sigma)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if sigma[i] > sigma[j] and degrees[i] % 2 and degrees[j] % 2:
                count += 1
    sign = -1 if count % 2 else 1
    if mode == "gamma":
        sign *= perm_sign(sigma)
    elif mode != "koszul":
        raise InputError("unknown sign mode %r" % mode)
    return sign


def permute_tensor(sigma, factors, degrees, mode="koszul"):
    """Apply sigma to a tensor word; output factor i is input factor sigma^-1(i).

    Returns (sign, reordered factors).
    """
    sign = koszul_sign(sigma, degrees, mode)
    inv = perm_inverse(sigma)
    return sign, tuple(factors[inv[i] - 1] for i in range(len(factors)))


def tensor_apply_sign(map_degrees, element_degrees):
    """Koszul sign of (f_1 x ... x f_k) applied to (x_1 x ... x_k)."""
    sign = 1
    acc = 0
    for fd, xd in zip(map_degrees, element_degrees):
        if fd % 2 and acc % 2:
            sign = -sign
        acc += xd
    return sign


# ---------------------------------------------------------------------------
# spaces, maps, complexes


class GradedVectorSpace:
    def __init__(self, basis):
        """basis: ordered iterable of (name, degree)."""
        basis = list(basis)
        names = [n for n, _ in basis]
        if len(set(names)) != len(names):
            raise InputError("duplicate basis names")
        self.names = tuple(names)
        self.degree = {n: int(d) for n, d in basis}

    @property
    def dim(self):
        return len(self.names)

    def degrees(self):
        return sorted(set(self.degree.values()))

    def basis_in_degree(self, d):
        return [n for n in self.names if self.degree[n] == d]

    def dims_by_degree(self):
        out = {}
        for n in self.names:
            d = self.degree[n]
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def deg_of(self, v):
        """Degree of a homogeneous vector, or None for the zero vector."""
        degs = {self.degree[k] for k, c in v.items() if c}
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError("vector is not homogeneous: %r" % (v,))
        return degs.pop()

    def __eq__(self, other):
        return (isinstance(other, GradedVectorSpace)
                and self.names == other.names and self.degree == other.degree)

    def __repr__(self):
        return "GradedVectorSpace(%d elements)" % self.dim


class GradedLinearMap:
    def __init__(self, source, target, degree, cols=None):
        """cols: {source name: sparse vector in target}."""
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.cols = {}
        for s, v in (cols or {}).items():
            v = {k: Fraction(c) for k, c in v.items() if c}
            if not v:
                continue
            for t in v:
                if target.degree[t] != source.degree[s] + self.degree:
                    raise InputError(
                        "entry (%s, %s) violates degree %d" % (t, s, self.degree))
            self.cols[s] = v

    @classmethod
    def zero(cls, source, target, degree):
        return cls(source, target, degree)

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0, {n: {n: ONE} for n in space.names})

    def apply(self, v):
        out = {}
        for k, c in v.items():
            col = self.cols.get(k)
            if col:
                out = vadd(out, col, scale=c)
        return out

    def __call__(self, v):
        return self.apply(v)

    def compose(self, other):
        """self after other."""
        if other.target is not self.source and other.target != self.source:
            raise InputError("composition source/target mismatch")
        cols = {s: self.apply(v) for s, v in other.cols.items()}
        return GradedLinearMap(other.source, self.target,
                               self.degree + other.degree, cols)

    def add(self, other, scale=ONE):
        cols = dict(self.cols)
        for s, v in other.cols.items():
            cols[s] = vadd(cols.get(s, {}), v, scale=scale)
        return GradedLinearMap(self.source, self.target, self.degree, cols)

    def scale(self, c):
        return GradedLinearMap(self.source, self.target, self.degree,
                               {s: vscale(v, c) for s, v in self.cols.items()})

    def is_zero(self):
        return all(is_zero_vec(v) for v in self.cols.values())

    def equals(self, other):
        return self.add(other, scale=-ONE).is_zero()

    def matrix(self):
        """Dense matrix over the full bases (target rows x source columns)."""
        tidx = {n: i for i, n in enumerate(self.target.names)}
        mat = linalg.zeros(self.target.dim, self.source.dim)
        for j, s in enumerate(self.source.names):
            for t, c in self.cols.get(s, {}).items():
                mat[tidx[t]][j] = c
        return mat


class CochainComplex:
    def __init__(self, space, differential, check=True):
        if differential.degree != 1:
            raise InputError("differential must have degree +1")
        self.space = space
        self.d = differential
        if check and not differential.compose(differential).is_zero():
            raise InputError("differential does not square to zero")

    def suspend(self):
        return suspend(self)


def suspend(complex_):
    """Shift degrees down by one and negate the differential: (sC, -s d s^-1)."""
    space = GradedVectorSpace(
        [("s" + n, complex_.space.degree[n] - 1) for n in complex_.space.names])
    cols = {}
    for s, v in complex_.d.cols.items():
        cols["s" + s] = {"s" + t: -c for t, c in v.items()}
    d = GradedLinearMap(space, space, 1, cols)
    return CochainComplex(space, d, check=False)


class Contraction:
    """(f, g, h) exhibiting `small` as a deformation retract of `big`.

    f: big -> small and g: small -> big are degree-0 chain maps, h: big -> big
    has degree -1, and the five identities hold:
        f g = id,  g f - id = d h + h d,  h g = 0,  f h = 0,  h h = 0.
    """

    def __init__(self, big, small, f, g, h):
        self.big = big
        self.small = small
        self.f = f
        self.g = g
        self.h = h

    def check(self):
        """Return a list of violated identities (empty = valid)."""
        bad = []
        f, g, h = self.f, self.g, self.h
        db, ds = self.big.d, self.small.d
        if not f.compose(g).equals(GradedLinearMap.identity(self.small.space)):
            bad.append("fg != id")
        lhs = g.compose(f).add(GradedLinearMap.identity(self.big.space), scale=-ONE)
        rhs = db.compose(h).add(h.compose(db))
        if not lhs.equals(rhs):
            bad.append("gf - id != dh + hd")
        if not f.compose(db).equals(ds.compose(f)):
            bad.append("f not a chain map")
        if not db.compose(g).equals(g.compose(ds)):
            bad.append("g not a chain map")
        if not h.compose(g).is_zero():
            bad.append("hg != 0")
        if not f.compose(h).is_zero():
            bad.append("fh != 0")
        if not h.compose(h).is_zero():
            bad.append("hh != 0")
        return bad

    def with_side_conditions(self):
        """Post-process h so the three side conditions hold.

        First h <- (1 - gf) h (1 - gf) kills hg and fh, then h <- -h d h
        kills hh; the sign matches the gf - id = dh + hd convention.
        """
        ident = GradedLinearMap.identity(self.big.space)
        p = ident.add(self.g.compose(self.f), scale=-ONE)
        h1 = p.compose(self.h).compose(p)
        h2 = h1.compose(self.big.d).compose(h1).scale(-ONE)
        out = Contraction(self.big, self.small, self.f, self.g, h2)
        bad = out.check()
        if bad:
            raise InvariantError("side-condition post-processing failed: %s" % bad)
        return out


def cohomology_with_contraction(complex_):
    """Cohomology of a complex together with a full contraction onto it.

    Deterministic: all choices are leftmost-pivot row reductions over the
    ordered input basis.  Class names are "[name]" where name is the
    distinguished free column of the chosen representative.
    """
    space = complex_.space
    d = complex_.d
    if not d.compose(d).is_zero():
        raise InputError("d^2 != 0")

    degs = space.degrees()
    h_basis = []          # (class name, degree)
    g_cols = {}           # class name -> representative vector
    f_cols = {}           # basis name -> vector over class names
    h_cols = {}           # basis name -> vector in space (degree -1)

    # per-degree data
    by_deg = {n: [] for n in degs}
    pivot_cols = {}       # degree -> list of basis names spanning a complement of ker
    for n in degs:
        names = space.basis_in_degree(n)
        tgt = space.basis_in_degree(n + 1)
        mat = [[d.cols.get(s, {}).get(t, ZERO) for s in names] for t in tgt]
        if not tgt:
            mat = [[ZERO] * len(names)]
        piv = linalg.column_space_basis(mat)
        pivot_cols[n] = [names[c] for c in piv]
        by_deg[n] = names

    for n in degs:
        names = by_deg[n]
        if not names:
            continue
        nidx = {m: i for i, m in enumerate(names)}
        dim = len(names)
        # boundaries: d applied to pivot columns of the previous degree
        prev = pivot_cols.get(n - 1, [])
        b_vecs = [d.cols.get(s, {}) for s in prev]
        # kernel of d in this degree
        tgt = space.basis_in_degree(n + 1)
        mat = [[d.cols.get(s, {}).get(t, ZERO) for s in names] for t in tgt]
        if not tgt:
            mat = [[ZERO] * dim]
        kvecs = linalg.kernel_basis(mat)  # coordinate vectors over `names`
        kfree = linalg.column_space_basis(mat)
        free_cols = [c for c in range(dim) if c not in set(kfree)]
        # reduce kernel vectors modulo boundaries; leftmost pivots pick reps
        cols = []
        for b in b_vecs:
            cols.append([b.get(m, ZERO) for m in names])
        cols_k = [list(v) for v in kvecs]
        stacked = [[c[i] for c in cols + cols_k] for i in range(dim)]
        if not stacked:
            stacked = [[]]
        piv = linalg.column_space_basis(stacked)
        rep_idx = [p - len(cols) for p in piv if p >= len(cols)]
        reps = []
        for ri in rep_idx:
            v = {names[i]: kvecs[ri][i] for i in range(dim) if kvecs[ri][i]}
            cname = "[%s]" % names[free_cols[ri]]
            h_basis.append((cname, n))
            g_cols[cname] = v
            reps.append((cname, kvecs[ri]))
        # decompose every basis vector over [boundaries | reps | pivot cols]
        cvecs = []
        cnames = pivot_cols.get(n, [])
        for s in cnames:
            e = [ZERO] * dim
            e[nidx[s]] = ONE
            cvecs.append(e)
        full = cols + [list(r[1]) for r in reps] + cvecs
        fmat = [[full[j][i] for j in range(len(full))] for i in range(dim)]
        nb, nr = len(cols), len(reps)
        for i, s in enumerate(names):
            e = [ZERO] * dim
            e[i] = ONE
            sol = linalg.solve(fmat, e)
            if sol is None:
                raise InvariantError("degree-%d decomposition failed" % n)
            fval = {reps[j][0]: sol[nb + j] for j in range(nr) if sol[nb + j]}
            if fval:
                f_cols[s] = fval
            hval = {}
            for j in range(nb):
                if sol[j]:
                    hval = vadd(hval, {prev[j]: -sol[j]})
            if hval:
                h_cols[s] = hval

    hspace = GradedVectorSpace(h_basis)
    hcx = CochainComplex(hspace, GradedLinearMap.zero(hspace, hspace, 1),
                         check=False)
    f = GradedLinearMap(space, hspace, 0, f_cols)
    g = GradedLinearMap(hspace, space, 0, g_cols)
    h = GradedLinearMap(space, space, -1, h_cols)
    con = Contraction(complex_, hcx, f, g, h)
    bad = con.check()
    if bad:
        raise InvariantError("contraction construction failed: %s" % bad)
    return hspace, con


def solve_linear(gmap, target):
    """Witness x with gmap(x) = target, or None.  target must be homogeneous."""
    tdeg = gmap.target.deg_of(target)
    if tdeg is None:
        return {}
    sdeg = tdeg - gmap.degree
    snames = gmap.source.basis_in_degree(sdeg)
    tnames = gmap.target.basis_in_degree(tdeg)
    if any(k for k in target if k not in set(tnames)):
        raise InputError("target not supported in expected degree")
    mat = [[gmap.cols.get(s, {}).get(t, ZERO) for s in snames] for t in tnames]
    rhs = [target.get(t, ZERO) for t in tnames]
    if not tnames:
        return {}
    sol = linalg.solve(mat, rhs)
    if sol is None:
        return None
    return {snames[i]: sol[i] for i in range(len(snames)) if sol[i]}
