"""Dg algebras of the three species (dga / cdga / dgl) and the fixture corpus.

A DgAlgebra is a finite basis with degrees, a degree +1 differential, and
structure constants for the product (bracket, for Lie).  Products for
Com/Lie are auto-completed from one orientation per pair using graded
(anti)symmetry.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import (CochainComplex, GradedLinearMap, GradedVectorSpace,
                     InputError, ONE, cohomology_with_contraction, is_zero_vec,
                     vadd, vscale)

SPECIES = ("Ass", "Com", "Lie")
KOSZUL_DUAL = {"Ass": "Ass", "Com": "Lie", "Lie": "Com"}


class DgAlgebra:
    def __init__(self, species, space, differential, products, unit=None,
                 name=""):
        """products: {(a_name, b_name): sparse vector}; missing pairs are zero.

        For Com each pair may be given in one orientation (the other is
        filled in with the Koszul sign); for Lie likewise with the graded
        antisymmetry sign.
        """
        if species not in SPECIES:
            raise InputError("unknown species %r" % species)
        if species == "Lie" and unit is not None:
            raise InputError("Lie algebras are unital-free")
        self.species = species
        self.space = space
        self.d = differential
        self.unit = unit
        self.name = name
        deg = space.degree
        prods = {}
        for (a, b), v in products.items():
            v = {k: Fraction(c) for k, c in v.items() if c}
            if not v:
                continue
            want = deg[a] + deg[b]
            for t in v:
                if deg[t] != want:
                    raise InputError("product %s*%s has wrong degree" % (a, b))
            prods[(a, b)] = v
        if species in ("Com", "Lie"):
            flip = -1 if species == "Lie" else 1
            for (a, b), v in list(prods.items()):
                sign = flip * (1 if (deg[a] * deg[b]) % 2 == 0 else -1)
                other = vscale(v, Fraction(sign))
                if (b, a) in prods:
                    if prods[(b, a)] != other:
                        raise InputError(
                            "inconsistent symmetry for pair (%s, %s)" % (a, b))
                elif other:
                    prods[(b, a)] = other
        if unit is not None:
            if unit not in deg or deg[unit] != 0:
                raise InputError("unit must be a basis element of degree 0")
            for a in space.names:
                prods.setdefault((unit, a), {a: ONE})
                prods.setdefault((a, unit), {a: ONE})
        self.products = prods

    def mul_basis(self, a, b):
        return self.products.get((a, b), {})

    def mul(self, u, v):
        out = {}
        for a, ca in u.items():
            for b, cb in v.items():
                p = self.products.get((a, b))
                if p:
                    out = vadd(out, p, scale=ca * cb)
        return out

    def complex(self):
        return CochainComplex(self.space, self.d, check=False)

    def contraction(self):
        return cohomology_with_contraction(self.complex())


def check_axioms(algebra):
    """Exhaustive basis verification of d^2, Leibniz, and the species law.

    Returns a report dict: {"passed": bool, "violations": [...]}, each
    violation naming the identity and a witness tuple.
    """
    A = algebra
    deg = A.space.degree
    names = A.space.names
    violations = []

    dd = A.d.compose(A.d)
    if not dd.is_zero():
        bad = next(s for s, v in dd.cols.items() if v)
        violations.append({"identity": "d^2 = 0", "witness": [bad]})

    def sgn(k):
        return ONE if k % 2 == 0 else -ONE

    for a in names:
        for b in names:
            lhs = A.d.apply(A.mul_basis(a, b))
            rhs = vadd(A.mul(A.d.cols.get(a, {}), {b: ONE}),
                       A.mul({a: ONE}, A.d.cols.get(b, {})), scale=sgn(deg[a]))
            if lhs != rhs:
                violations.append({"identity": "Leibniz", "witness": [a, b]})

    if A.species in ("Ass", "Com"):
        for a in names:
            for b in names:
                ab = A.mul_basis(a, b)
                for c in names:
                    lhs = A.mul(ab, {c: ONE})
                    rhs = A.mul({a: ONE}, A.mul_basis(b, c))
                    if lhs != rhs:
                        violations.append({"identity": "associativity",
                                           "witness": [a, b, c]})
    if A.species == "Com":
        for a in names:
            for b in names:
                lhs = A.mul_basis(a, b)
                rhs = vscale(A.mul_basis(b, a), sgn(deg[a] * deg[b]))
                if lhs != rhs:
                    violations.append({"identity": "graded commutativity",
                                       "witness": [a, b]})
    if A.species == "Lie":
        for a in names:
            for b in names:
                lhs = A.mul_basis(a, b)
                rhs = vscale(A.mul_basis(b, a), -sgn(deg[a] * deg[b]))
                if lhs != rhs:
                    violations.append({"identity": "graded antisymmetry",
                                       "witness": [a, b]})
        for a in names:
            for b in names:
                for c in names:
                    # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
                    lhs = A.mul({a: ONE}, A.mul_basis(b, c))
                    rhs = vadd(A.mul(A.mul_basis(a, b), {c: ONE}),
                               A.mul({b: ONE}, A.mul_basis(a, c)),
                               scale=sgn(deg[a] * deg[b]))
                    if lhs != rhs:
                        violations.append({"identity": "graded Jacobi",
                                           "witness": [a, b, c]})
    if A.unit is not None:
        if not is_zero_vec(A.d.cols.get(A.unit, {})):
            violations.append({"identity": "d(unit) = 0", "witness": [A.unit]})
        for a in names:
            if A.mul_basis(A.unit, a) != {a: ONE} or A.mul_basis(a, A.unit) != {a: ONE}:
                violations.append({"identity": "unit law", "witness": [a]})

    return {"passed": not violations, "violations": violations}


def cohomology_algebra(algebra, contraction=None):
    """The induced product on cohomology, as a DgAlgebra with zero differential.

    Returns (H algebra, contraction used).
    """
    if contraction is None:
        _, contraction = algebra.contraction()
    f, g = contraction.f, contraction.g
    H = contraction.small.space
    products = {}
    for a in H.names:
        for b in H.names:
            v = f.apply(algebra.mul(g.cols.get(a, {}), g.cols.get(b, {})))
            if v:
                products[(a, b)] = v
    unit = None
    if algebra.unit is not None:
        uclass = f.apply({algebra.unit: ONE})
        if len(uclass) == 1 and list(uclass.values())[0] == ONE:
            unit = next(iter(uclass))
    halg = DgAlgebra(algebra.species, H,
                     GradedLinearMap.zero(H, H, 1), products, unit=unit,
                     name="H(%s)" % (algebra.name or "A"))
    return halg, contraction


# ---------------------------------------------------------------------------
# fixture corpus


def _dgl(name, basis, brackets, d=None):
    space = GradedVectorSpace(basis)
    diff = GradedLinearMap(space, space, 1,
                           {k: {t: Fraction(c) for t, c in v.items()}
                            for k, v in (d or {}).items()})
    prods = {pair: {t: Fraction(c) for t, c in v.items()}
             for pair, v in brackets.items()}
    return DgAlgebra("Lie", space, diff, prods, name=name)


def fixture(key):
    """The built-in test corpus, keyed by F1..F5 plus named variants."""
    if key == "F1":
        # abelian one-generator dgl
        return _dgl("F1", [("x", 1)], {})
    if key == "F2":
        # Heisenberg cdga: Lambda(x,y,z), dz = xy
        basis = [("one", 0), ("x", 1), ("y", 1), ("z", 1),
                 ("xy", 2), ("xz", 2), ("yz", 2), ("xyz", 3)]
        space = GradedVectorSpace(basis)
        d = GradedLinearMap(space, space, 1, {"z": {"xy": ONE}})
        prods = {("x", "y"): {"xy": ONE}, ("x", "z"): {"xz": ONE},
                 ("y", "z"): {"yz": ONE}, ("x", "yz"): {"xyz": ONE},
                 ("y", "xz"): {"xyz": -ONE}, ("z", "xy"): {"xyz": ONE}}
        return DgAlgebra("Com", space, d, prods, unit="one", name="F2")
    if key in ("F3", "F3_formal"):
        # two-step abelian dgl
        return _dgl("F3", [("u", 1), ("v", 2)], {})
    if key == "F3_nonformal":
        # non-formal dgl: dz = [x,y], the class of [x,z] survives
        return _dgl("F3_nonformal",
                    [("x", 1), ("y", 1), ("z", 1), ("p", 2), ("q", 2)],
                    {("x", "y"): {"p": 1}, ("x", "z"): {"q": 1}},
                    d={"z": {"p": 1}})
    if key == "F4":
        # even-sphere cohomology: Q[e]/(e^2), |e| = 2
        space = GradedVectorSpace([("one", 0), ("e", 2)])
        return DgAlgebra("Com", space, GradedLinearMap.zero(space, space, 1),
                         {}, unit="one", name="F4")
    if key == "F5":
        # sl2 in degree 0
        return _dgl("F5", [("e", 0), ("f", 0), ("h", 0)],
                    {("e", "f"): {"h": 1}, ("h", "e"): {"e": 2},
                     ("h", "f"): {"f": -2}})
    if key == "acyclic":
        # d v = u, zero bracket
        return _dgl("acyclic", [("v", 0), ("u", 1)], {}, d={"v": {"u": 1}})
    raise InputError("unknown fixture %r" % key)


FIXTURE_KEYS = ("F1", "F2", "F3", "F3_nonformal", "F4", "F5", "acyclic")
