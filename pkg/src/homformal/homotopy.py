"""Minimal homotopy models by transfer along a contraction.

The transfer runs on the bar side: operations are stored in suspended form,
as coderivation components b_n: (sH)^{xn} -> sH of degree +1 on the tensor
coalgebra (Ass/Com) or symmetric coalgebra (Lie).  The perturbation lemma
is applied lazily, one word at a time, so nothing larger than the words in
play is ever built.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import coalgebra as ca
from . import linalg
from .algebras import DgAlgebra, cohomology_algebra
from .coalgebra import WordCoalgebra, corestrict
from .graded import (GradedLinearMap, GradedVectorSpace, InputError,
                     InvariantError, ONE, koszul_sign, permute_tensor,
                     suspend, tensor_apply_sign, vadd, vscale)

KIND_OF = {"Ass": "tensor", "Com": "tensor", "Lie": "sym"}


def _suspend_letter_map(gmap, s_source, s_target, negate=False):
    cols = {}
    for s, v in gmap.cols.items():
        cols["s" + s] = {"s" + t: (-c if negate else c) for t, c in v.items()}
    return GradedLinearMap(s_source, s_target, gmap.degree, cols)


def suspend_operations(algebra):
    """b_2 = s . mul . (s x s)^-1 on the suspended letters, as a
    coderivation component table {word: vector}.

    The sign is the Koszul sign of (s x s) against the unsuspended word,
    so that unsuspend_operation is an exact inverse and m_2 agrees with
    the product on the nose."""
    sA = suspend(algebra.complex())
    letters = sA.space
    deg = algebra.space.degree
    comp = {}
    C = WordCoalgebra(letters, KIND_OF[algebra.species])
    for (a, b), v in algebra.products.items():
        word = ("s" + a, "s" + b)
        got = C.canon(word)
        if got is None or got[0] != word:
            continue
        sign = tensor_apply_sign((1, 1), (deg[a], deg[b]))
        sv = {"s" + t: c * sign for t, c in v.items()}
        if sv:
            comp[word] = sv
    return sA, comp


def unsuspend_operation(space, sletters, word, svec):
    """Turn b_n(sx_1,...,sx_n) back into m_n(x_1,...,x_n)."""
    degs = [space.degree[x] for x in word]
    sign = tensor_apply_sign((1,) * len(word), degs)
    return {t[1:]: c * sign for t, c in svec.items()}


class PInftyStructure:
    """A P-infinity structure on a graded space, P in {Ass, Com, Lie}.

    ops: {arity: {canonical suspended word: suspended vector}}, each
    component of degree +1 on the suspended letters.
    """

    def __init__(self, species, space, ops, name=""):
        self.species = species
        self.space = space
        self.name = name
        self.sletters = GradedVectorSpace(
            [("s" + n, space.degree[n] - 1) for n in space.names])
        self.coalgebra = WordCoalgebra(self.sletters, KIND_OF[species])
        self.ops = {}
        sdeg = self.sletters.degree
        for n, comp in ops.items():
            kept = {}
            for word, v in comp.items():
                v = {t: Fraction(c) for t, c in v.items() if c}
                if not v:
                    continue
                got = self.coalgebra.canon(word)
                if got is None or got[0] != word:
                    raise InputError("operation word %r is not canonical" % (word,))
                want = sum(sdeg[x] for x in word) + 1
                for t in v:
                    if sdeg[t] != want:
                        raise InputError("operation on %r has wrong degree" % (word,))
                kept[word] = v
            if kept:
                self.ops[n] = kept
        self._D = self.coalgebra.coderivation(self.ops)

    def arities(self):
        return sorted(self.ops)

    def is_minimal(self):
        return 1 not in self.ops

    def operation(self, names):
        """m_n on unsuspended basis elements, as an unsuspended vector."""
        word = tuple("s" + x for x in names)
        got = self.coalgebra.canon(word)
        if got is None:
            return {}
        key, sign = got
        sv = self.ops.get(len(word), {}).get(key, {})
        out = unsuspend_operation(self.space, self.sletters,
                                  tuple(x[1:] for x in key), sv)
        return vscale(out, Fraction(sign))

    def coderivation(self):
        return self._D

    def check_relations(self, length_bound):
        """All D^2 = 0 failures on coalgebra words of length <= bound.

        D never increases word length, so this certifies the full set of
        P-infinity relations among operations of total arity <= bound.
        """
        bad = []
        D = self._D
        for n in range(1, length_bound + 1):
            for w in self.coalgebra.basis_words(n):
                if D(D({w: ONE})):
                    bad.append(w)
        return bad

    def shuffle_defects(self, length_bound=None):
        """C-infinity test: words of the bar-side shuffle product that some
        operation fails to kill.  Empty means every b_n vanishes on sums of
        (p, n-p)-shuffles of suspended words."""
        if self.species == "Lie":
            raise InputError("shuffle vanishing is an Ass/Com notion")
        bad = []
        deg = self.sletters.degree
        for n in sorted(self.ops):
            if length_bound and n > length_bound:
                continue
            comp = self.ops[n]
            for w in self.coalgebra.basis_words(n):
                degs = [deg[x] for x in w]
                for p in range(1, n):
                    # shuffles of w[:p] into w[p:]: pick output slots for
                    # the left block, keeping both blocks in order
                    total = {}
                    for slots in combinations(range(n), p):
                        sigma = [0] * n
                        for i, s in enumerate(slots):
                            sigma[i] = s + 1
                        others = [s for s in range(n) if s not in slots]
                        for j, s in enumerate(others):
                            sigma[p + j] = s + 1
                        out = [None] * n
                        for i in range(n):
                            out[sigma[i] - 1] = w[i]
                        sign = koszul_sign(tuple(sigma), degs)
                        img = comp.get(tuple(out))
                        if img:
                            total = vadd(total, img, scale=Fraction(sign))
                    if total:
                        bad.append((w, p))
        return bad


class InftyMorphism:
    """An infinity-morphism between P-infinity structures, stored as the
    corestriction components {arity: {canonical suspended word: vector}} of
    a coalgebra morphism, all of degree 0."""

    def __init__(self, source: PInftyStructure, target: PInftyStructure,
                 components):
        if source.species != target.species:
            raise InputError("morphism between different species")
        self.source = source
        self.target = target
        self.components = {}
        sdeg = source.sletters.degree
        tdeg = target.sletters.degree
        for n, comp in components.items():
            kept = {}
            for word, v in comp.items():
                v = {t: Fraction(c) for t, c in v.items() if c}
                if not v:
                    continue
                want = sum(sdeg[x] for x in word)
                for t in v:
                    if tdeg[t] != want:
                        raise InputError("morphism component on %r has wrong "
                                         "degree" % (word,))
                kept[word] = v
            if kept:
                self.components[n] = kept
        self._op = source.coalgebra.morphism(target.coalgebra, self.components)

    def as_operator(self):
        return self._op

    def linear_part(self):
        """phi_1 as a degree-0 map on the unsuspended spaces."""
        cols = {}
        for (x,), v in self.components.get(1, {}).items():
            cols[x[1:]] = {t[1:]: c for t, c in v.items()}
        return GradedLinearMap(self.source.space, self.target.space, 0, cols)

    def check(self, length_bound):
        """Violations of Phi . D_source = D_target . Phi on words of
        length <= bound."""
        Phi = self._op
        Ds = self.source.coderivation()
        Dt = self.target.coderivation()
        bad = []
        for n in range(1, length_bound + 1):
            for w in self.source.coalgebra.basis_words(n):
                lhs = Phi(Ds({w: ONE}))
                rhs = Dt(Phi({w: ONE}))
                if ca.op_sub(lambda _: lhs, lambda _: rhs)({}):
                    bad.append(w)
        return bad


def strict_structure(algebra):
    """The dg algebra itself, viewed as a P-infinity structure (b_1, b_2)."""
    sA, b2 = suspend_operations(algebra)
    b1 = {("s" + x,): dict(sA.d.cols.get("s" + x, {}))
          for x in algebra.space.names if sA.d.cols.get("s" + x)}
    ops = {}
    if b1:
        ops[1] = b1
    if b2:
        ops[2] = b2
    return PInftyStructure(algebra.species, algebra.space, ops,
                           name=algebra.name)


def check_coalgebra_contraction(C, D1, F_op, G_op, H_op, small, max_len):
    """Verify the five contraction identities on coalgebra basis words."""
    bad = []

    def diff(a, b, tag, w):
        d = dict(a)
        for k, c in b.items():
            d[k] = d.get(k, 0) - c
        if any(d.values()):
            bad.append((tag, w))

    for n in range(1, max_len + 1):
        for w in C.basis_words(n):
            one = {w: ONE}
            gf = G_op(F_op(one))
            hom = vadd(D1(H_op(one)), H_op(D1(one)))
            want = dict(gf)
            want[w] = want.get(w, 0) - ONE
            diff({k: v for k, v in want.items() if v},
                 {k: v for k, v in hom.items() if v}, "gf-1 != dh+hd", w)
            if H_op(H_op(one)):
                bad.append(("hh != 0", w))
            if F_op(H_op(one)):
                bad.append(("fh != 0", w))
        for w in small.basis_words(n):
            one = {w: ONE}
            if H_op(G_op(one)):
                bad.append(("hg != 0", w))
            fg = F_op(G_op(one))
            if fg != one:
                bad.append(("fg != id", w))
    return bad


def transfer_minimal_model(algebra: DgAlgebra, arity_bound,
                           contraction=None, certify_length=3):
    """Minimal model of a dg algebra up to the given arity.

    Returns (structure on H, quasi-isomorphism H -> A, info dict).  The
    transferred operations come from the perturbation lemma on the bar-side
    coalgebras; the contraction identities are re-verified on words up to
    certify_length, and the structure and morphism are certified by
    check_relations / InftyMorphism.check at the arity bound by the caller's
    tests (cheaply re-runnable, so not repeated here).
    """
    kind = KIND_OF[algebra.species]
    H_alg, con = cohomology_algebra(algebra, contraction)
    con = con.with_side_conditions()

    sA, b2 = suspend_operations(algebra)
    CA = WordCoalgebra(sA.space, kind)
    sH = suspend(H_alg.complex())
    CH = WordCoalgebra(sH.space, kind)

    f_s = _suspend_letter_map(con.f, sA.space, sH.space)
    g_s = _suspend_letter_map(con.g, sH.space, sA.space)
    h_s = _suspend_letter_map(con.h, sA.space, sA.space, negate=True)
    gf_s = g_s.compose(f_s)

    b1 = {("s" + x,): dict(sA.d.cols["s" + x])
          for x in algebra.space.names if sA.d.cols.get("s" + x)}
    D1 = CA.coderivation({1: b1} if b1 else {})
    t = CA.coderivation({2: b2} if b2 else {})

    F_op = CA.letterwise(f_s, target=CH)
    G_op = CH.letterwise(g_s, target=CA)
    if kind == "tensor":
        H_op = ca.tensor_homotopy(CA, h_s, gf_s)
    else:
        H_raw = ca.sym_average_homotopy(CA, h_s, gf_s)
        GF_op = CA.letterwise(gf_s)
        ann = ca.op_sub(ca.identity_op, GF_op)
        H_mid = ca.compose_ops(ann, H_raw, ann)
        H_hdh = ca.compose_ops(H_mid, D1, H_mid)
        H_op = lambda wv: {w: -c for w, c in H_hdh(wv).items()}

    bad = check_coalgebra_contraction(CA, D1, F_op, G_op, H_op, CH,
                                      certify_length)
    if bad:
        raise InvariantError("bar-side contraction failed: %s" % bad[:3])

    ops = {}
    phis = {1: {("s" + x,): dict(g_s.cols["s" + x])
                for x in H_alg.space.names}}
    for n in range(2, arity_bound + 1):
        comp_b = {}
        comp_phi = {}
        for w in CH.basis_words(n):
            x = t(G_op({w: ONE}))
            for _ in range(n - 2):
                x = t(H_op(x))
            bval = corestrict(F_op(x))
            if bval:
                comp_b[w] = bval
            y = G_op({w: ONE})
            for _ in range(n - 1):
                y = H_op(t(y))
            pval = corestrict(y)
            if pval:
                comp_phi[w] = pval
        if comp_b:
            ops[n] = comp_b
        if comp_phi:
            phis[n] = comp_phi

    model = PInftyStructure(algebra.species, H_alg.space, ops,
                            name="minimal(%s)" % (algebra.name or "A"))
    target = strict_structure(algebra)
    qiso = InftyMorphism(model, target, phis)
    info = {"contraction": con, "H_algebra": H_alg, "arity_bound": arity_bound}
    return model, qiso, info


def shuffle_vanishing_defects(C: WordCoalgebra, components, length_bound=None):
    """Precompose components with every mu_{p,n-p} shuffle action.

    The sgn-weighted shuffle elements act with gamma signs, which on
    suspended letters reproduces the plain Koszul-signed shuffle sums.
    Returns the (word, p) pairs where the precomposition is nonzero.
    """
    from .symgroup import shuffle_element
    bad = []
    deg = C.deg
    for n in sorted(components):
        if length_bound and n > length_bound:
            continue
        comp = components[n]
        if not comp:
            continue
        for w in C.basis_words(n):
            degs = [deg[x] for x in w]
            for p in range(1, n):
                mu = shuffle_element(p, n - p)
                total = {}
                for sigma, c in mu.terms.items():
                    sign, out = permute_tensor(sigma, w, degs, mode="gamma")
                    img = comp.get(out)
                    if img:
                        total = vadd(total, img, scale=c * sign)
                if total:
                    bad.append((w, p))
    return bad


def morphism_from_operator(source: PInftyStructure, target: PInftyStructure,
                           op, arity_bound):
    """Corestrict a coalgebra-morphism operator to InftyMorphism data."""
    comps = {}
    for n in range(1, arity_bound + 1):
        got = {}
        for w in source.coalgebra.basis_words(n):
            val = corestrict(op({w: ONE}))
            if val:
                got[w] = val
        if got:
            comps[n] = got
    return InftyMorphism(source, target, comps)


def coalgebra_morphism_defects(C: WordCoalgebra, op, max_len,
                               inverse=None):
    """Words where Delta . op != (op x op) . Delta, plus inverse failures."""
    bad = []
    for n in range(1, max_len + 1):
        for w in C.basis_words(n):
            one = {w: ONE}
            lhs = ca.coproduct(C, op(one))
            rhs = {}
            for (a, b), c in ca.coproduct(C, one).items():
                left = op({a: ONE}) if a else {(): ONE}
                right = op({b: ONE}) if b else {(): ONE}
                for wa, cx in left.items():
                    for wb, cy in right.items():
                        key = (wa, wb)
                        cur = rhs.get(key, 0) + c * cx * cy
                        if cur:
                            rhs[key] = cur
                        elif key in rhs:
                            del rhs[key]
            if lhs != rhs:
                bad.append(("comultiplication", w))
            if inverse is not None and inverse(op(one)) != one:
                bad.append(("inverse", w))
    return bad


def normalize_morphism(psi: InftyMorphism, arity_bound, check_length=3):
    """Post-compose with strict and exponential automorphisms of the target
    until the first component is the identity and, as far as the source's
    vanishing operations allow, components 2..n-2 are zero.

    Follows the reduction mechanically: first phi <- phi_1^{-1} . phi, then
    repeatedly kill the lowest stray component phi_i by e^{-theta} with
    theta the coderivation built from it (valid while the source has no
    operations of arity 3..i+1)."""
    source, target = psi.source, psi.target
    if not source.is_minimal() or not target.is_minimal():
        raise InputError("normalization needs minimal structures")
    phi1 = psi.components.get(1, {})
    mat = GradedLinearMap(source.sletters, target.sletters, 0,
                          {w[0]: dict(v) for w, v in phi1.items()})
    if source.sletters.names != target.sletters.names:
        raise InputError("normalization implemented for shared letter spaces")
    inv_cols = _invert_letter_map(mat)
    if inv_cols is None:
        raise InputError("first component is not invertible")
    strict = target.coalgebra.letterwise(
        GradedLinearMap(target.sletters, target.sletters, 0, inv_cols))
    psi_op = psi.as_operator()
    cur_op = ca.compose_ops(strict, psi_op)
    cur = morphism_from_operator(source, target, cur_op, arity_bound)
    if cur.check(check_length):
        raise InvariantError("strict part does not intertwine the products")

    # the first arity >= 3 with a nonzero source operation bounds how far
    # the stray components can be pushed
    n_limit = arity_bound + 2
    for n in sorted(source.ops):
        if n >= 3:
            n_limit = n
            break
    i = 2
    while i <= min(n_limit - 2, arity_bound):
        compo = cur.components.get(i)
        if not compo:
            i += 1
            continue
        done = False
        for sign_flip in (True, False):
            theta = {i: compo}
            e_op = exp_coderivation(target.coalgebra, theta, negate=sign_flip)
            cand_op = ca.compose_ops(e_op, cur.as_operator())
            cand = morphism_from_operator(source, target, cand_op, arity_bound)
            if not cand.components.get(i) and not cand.check(check_length):
                cur = cand
                done = True
                break
        if not done:
            raise InvariantError("could not kill component %d" % i)
        i += 1
    return cur


def _invert_letter_map(gmap):
    """Columns of the inverse of a degree-0 letter map, or None."""
    src = gmap.source
    tgt = gmap.target
    cols = {}
    for d in set(src.degrees()) | set(tgt.degrees()):
        s_names = src.basis_in_degree(d)
        t_names = tgt.basis_in_degree(d)
        if len(s_names) != len(t_names):
            return None
        mat = [[gmap.cols.get(s, {}).get(t, Fraction(0)) for s in s_names]
               for t in t_names]
        inv = linalg.invert(mat)
        if inv is None:
            return None
        for j, t in enumerate(t_names):
            cols[t] = {s_names[r]: inv[r][j] for r in range(len(s_names))
                       if inv[r][j]}
    return cols


# ---------------------------------------------------------------------------
# gauge moves


def exp_coderivation(C: WordCoalgebra, theta_components, negate=False,
                     parity=0):
    """Pointwise exp of a coderivation that strictly lowers word length."""
    for n in theta_components:
        if n < 2:
            raise InputError("exp needs arity >= 2 components")
    theta = C.coderivation(theta_components, parity=parity)

    def op(wv):
        out = dict(wv)
        term = wv
        k = 1
        while True:
            term = theta(term)
            if not term:
                return out
            c = Fraction((-1) ** k if negate else 1, 1)
            for i in range(2, k + 1):
                c /= i
            for w, v in term.items():
                cur = out.get(w, 0) + c * v
                if cur:
                    out[w] = cur
                elif w in out:
                    del out[w]
            k += 1
    return op


def gauge_transform(P: PInftyStructure, arity, component, arity_bound):
    """Conjugate the structure by exp of the coderivation from a single
    degree-0 component of the given arity: D' = e^-theta . D . e^theta."""
    sdeg = P.sletters.degree
    comp = {}
    for word, v in component.items():
        if len(word) != arity:
            raise InputError("gauge component word length != arity")
        got = P.coalgebra.canon(word)
        if got is None:
            continue
        key, sign = got
        want = sum(sdeg[x] for x in key)
        for t in v:
            if sdeg[t] != want:
                raise InputError("gauge component must have degree 0")
        comp[key] = vscale(v, Fraction(sign)) if key != word else dict(v)
    theta = {arity: comp}
    e_plus = exp_coderivation(P.coalgebra, theta)
    e_minus = exp_coderivation(P.coalgebra, theta, negate=True)
    D = P.coderivation()
    Dnew = ca.compose_ops(e_minus, D, e_plus)
    ops = {}
    for n in range(1, arity_bound + 1):
        out = {}
        for w in P.coalgebra.basis_words(n):
            val = corestrict(Dnew({w: ONE}))
            if val:
                out[w] = val
        if out:
            ops[n] = out
    return PInftyStructure(P.species, P.space, ops, name=P.name + "~")
