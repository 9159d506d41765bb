"""Operadic cochain complexes of a graded algebra, evaluated pointwise.

Cochains of arity k and (suspended) degree t are tables
{word: letter vector} on the bar-side coalgebra of a minimal structure,
with values of letter degree (word degree + t).  The differential is the
graded commutator [D2, f^] corestricted back to components, where D2 is
the coderivation of the binary part alone; this guarantees d^2 = 0 and
keeps the complex aligned with the gauge action on structures.

Supported theories: Hochschild (tensor words, Ass/Com), Chevalley-
Eilenberg (symmetric words, Lie), and Harrison as the shuffle-vanishing
subspace of Hochschild cut out by the arity-wise idempotents.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .coalgebra import WordCoalgebra, corestrict
from .graded import (InputError, InvariantError, ONE, koszul_sign,
                     perm_inverse, permute_tensor, vadd, vscale)
from .homotopy import PInftyStructure
from .symgroup import barr_idempotent


class Cochain:
    """An operadic cochain: arity, suspended degree, and its table."""

    def __init__(self, theory, arity, tdeg, comps):
        self.theory = theory
        self.arity = arity
        self.tdeg = tdeg
        C = theory.C
        sdeg = C.letters.degree
        clean = {}
        for word, v in comps.items():
            got = C.canon(word)
            if got is None or got[0] != word:
                raise InputError("cochain word %r is not canonical" % (word,))
            if len(word) != arity:
                raise InputError("cochain word %r has wrong arity" % (word,))
            v = {k: Fraction(c) for k, c in v.items() if c}
            want = sum(sdeg[x] for x in word) + tdeg
            for tgt in v:
                if theory.target.degree[tgt] != want:
                    raise InputError("cochain value on %r has wrong degree"
                                     % (word,))
            if v:
                clean[word] = v
        self.comps = clean

    def is_zero(self):
        return not self.comps

    def evaluate(self, word):
        got = self.theory.C.canon(word)
        if got is None:
            return {}
        key, sign = got
        return vscale(self.comps.get(key, {}), Fraction(sign))

    def add(self, other, scale=ONE):
        comps = {w: dict(v) for w, v in self.comps.items()}
        for w, v in other.comps.items():
            comps[w] = vadd(comps.get(w, {}), v, scale=scale)
        return Cochain(self.theory, self.arity, self.tdeg, comps)

    def labels(self):
        """Flatten to a sparse vector over (word, target letter) labels."""
        return {(w, tgt): c for w, v in self.comps.items()
                for tgt, c in v.items()}


class CochainTheory:
    """Cochains on a minimal structure with coefficients in itself."""

    def __init__(self, structure: PInftyStructure, harrison=False):
        self.structure = structure
        self.C = structure.coalgebra
        self.target = structure.sletters
        if harrison and structure.species != "Com":
            raise InputError("Harrison cochains need a commutative algebra")
        self.harrison = harrison
        self.b2 = structure.ops.get(2, {})
        self.D2 = self.C.coderivation({2: self.b2} if self.b2 else {})
        # reverse index of b2: target letter -> [(pair word, coeff)]
        self._blowup = {}
        for pair, v in self.b2.items():
            for tgt, c in v.items():
                self._blowup.setdefault(tgt, []).append((pair, c))
        self._orbit_cache = {}

    # -- slices --------------------------------------------------------

    def slice_basis(self, arity, tdeg):
        sdeg = self.C.letters.degree
        out = []
        for w in self.C.basis_words(arity):
            want = sum(sdeg[x] for x in w) + tdeg
            for tgt in self.target.names:
                if self.target.degree[tgt] == want:
                    out.append((w, tgt))
        return out

    def basis_cochain(self, arity, tdeg, pair):
        w, tgt = pair
        return Cochain(self, arity, tdeg, {w: {tgt: ONE}})

    # -- differential ----------------------------------------------------

    def _candidates(self, word):
        """Canonical (k+1)-words on which d of a cochain supported on
        `word` can be nonzero."""
        C = self.C
        seen = set()
        for x in C.letters.names:
            if C.kind == "tensor":
                raws = [(x,) + word, word + (x,)]
            else:
                raws = [(x,) + word]
            for raw in raws:
                got = C.canon(raw)
                if got is not None:
                    seen.add(got[0])
        for i, z in enumerate(word):
            for pair, _ in self._blowup.get(z, []):
                raw = word[:i] + pair + word[i + 1:]
                got = C.canon(raw)
                if got is not None:
                    seen.add(got[0])
        return seen

    def diff(self, cochain: Cochain):
        """[D2, f^] corestricted: a cochain of arity + 1, degree + 1."""
        k, t = cochain.arity, cochain.tdeg
        Theta = self.C.coderivation({k: cochain.comps}, parity=t % 2)
        sign = -ONE if t % 2 else ONE
        words = set()
        for w in cochain.comps:
            words |= self._candidates(w)
        comps = {}
        for w in sorted(words):
            one = {w: ONE}
            val = vadd(corestrict(self.D2(Theta(one))),
                       corestrict(Theta(self.D2(one))), scale=-sign)
            if val:
                comps[w] = val
        return Cochain(self, k + 1, t + 1, comps)

    def is_cocycle(self, cochain):
        return self.diff(cochain).is_zero()

    # -- Barr idempotent action (tensor words only) ----------------------

    def _orbit(self, word):
        """All canonical permutations of `word`, with the matrix of the
        arity-wise idempotent acting with Koszul signs: {w: e . w}."""
        key = tuple(sorted(word))
        got = self._orbit_cache.get(key)
        if got is not None:
            return got
        n = len(word)
        e = barr_idempotent(n)
        degs = None
        orbit = sorted({p for p in _distinct_perms(key)})
        action = {}
        for w in orbit:
            degs = [self.C.deg[x] for x in w]
            img = {}
            for sigma, c in e.terms.items():
                # gamma mode: sgn-weighted group algebra elements then act
                # with the plain Koszul signs of the unsuspended letters
                s, fac = permute_tensor(sigma, w, degs, mode="gamma")
                img[fac] = img.get(fac, Fraction(0)) + c * s
            action[w] = {f: c for f, c in img.items() if c}
        self._orbit_cache[key] = action
        return action

    def project(self, cochain: Cochain):
        """E f = f . (e_n action): the idempotent acting on cochains by
        precomposition.  Harrison cochains are exactly ker E."""
        if self.C.kind != "tensor":
            raise InputError("idempotent action needs tensor words")
        comps = {}
        done = set()
        for w0 in cochain.comps:
            key = tuple(sorted(w0))
            if key in done:
                continue
            done.add(key)
            action = self._orbit(key)
            for w, img in action.items():
                val = {}
                for w1, c in img.items():
                    part = cochain.comps.get(w1)
                    if part:
                        val = vadd(val, part, scale=c)
                if val:
                    comps[w] = vadd(comps.get(w, {}), val)
        comps = {w: v for w, v in comps.items() if v}
        return Cochain(self, cochain.arity, cochain.tdeg, comps)

    def shuffle_part(self, cochain):
        """(1 - E) f, the component in the shuffle-vanishing subspace."""
        return cochain.add(self.project(cochain), scale=-ONE)

    def in_harrison_subspace(self, cochain):
        return self.project(cochain).is_zero()

    # -- coboundary queries ----------------------------------------------

    def coboundary_witness(self, cochain: Cochain):
        """A cochain g with d g = f, or None.  In Harrison mode the
        witness is constrained to the shuffle-vanishing subspace."""
        k, t = cochain.arity, cochain.tdeg
        basis = self.slice_basis(k - 1, t - 1)
        elim = linalg.SparseEliminator(track_combos=True)
        sources = []
        for pair in basis:
            g = self.basis_cochain(k - 1, t - 1, pair)
            if self.harrison:
                g = self.shuffle_part(g)
                if g.is_zero():
                    continue
            sources.append(g)
            elim.add(self.diff(g).labels())
        combo = elim.express(cochain.labels())
        if combo is None:
            return None
        out = Cochain(self, k - 1, t - 1, {})
        for j, c in combo.items():
            out = out.add(sources[j], scale=c)
        if self.harrison and not self.in_harrison_subspace(out):
            raise InvariantError("harrison witness left the subspace")
        return out

    def slice_cohomology_dim(self, arity, tdeg):
        """dim of the (arity, tdeg) slice of the cochain cohomology."""
        basis = self.slice_basis(arity, tdeg)
        below = self.slice_basis(arity - 1, tdeg - 1)
        if self.harrison:
            kept = []
            for pair in basis:
                g = self.shuffle_part(self.basis_cochain(arity, tdeg, pair))
                if not g.is_zero():
                    kept.append(g)
            cols = [g.labels() for g in kept]
            dim = linalg.sparse_rank(cols)
            rank_out = linalg.sparse_rank([self.diff(g).labels() for g in kept])
            rank_in = linalg.sparse_rank(
                [self.diff(self.shuffle_part(
                    self.basis_cochain(arity - 1, tdeg - 1, p))).labels()
                 for p in below])
            return dim - rank_out - rank_in
        dim = len(basis)
        rank_out = linalg.sparse_rank(
            [self.diff(self.basis_cochain(arity, tdeg, p)).labels()
             for p in basis])
        rank_in = linalg.sparse_rank(
            [self.diff(self.basis_cochain(arity - 1, tdeg - 1, p)).labels()
             for p in below])
        return dim - rank_out - rank_in

    def chain_compatibility_defects(self, arity, tdeg, limit=None):
        """Words where d(E f) != E(d f) on slice basis cochains; empty
        means the idempotent splitting is a splitting of complexes here."""
        bad = []
        basis = self.slice_basis(arity, tdeg)
        if limit:
            basis = basis[:limit]
        for pair in basis:
            f = self.basis_cochain(arity, tdeg, pair)
            lhs = self.diff(self.project(f))
            rhs = self.project(self.diff(f))
            if not lhs.add(rhs, scale=-ONE).is_zero():
                bad.append(pair)
        return bad


def _distinct_perms(word):
    if len(word) <= 1:
        yield word
        return
    seen = set()
    for i, x in enumerate(word):
        if x in seen:
            continue
        seen.add(x)
        for rest in _distinct_perms(word[:i] + word[i + 1:]):
            yield (x,) + rest


def adjoint_action(structure: PInftyStructure):
    """The bracket of a Lie structure, reshaped as a module action table
    {(lie letter, module letter): vector} on its own letters."""
    C = structure.coalgebra
    b2 = structure.ops.get(2, {})
    act = {}
    for x in C.letters.names:
        for m in C.letters.names:
            got = C.canon((x, m))
            if got is None:
                continue
            key, sign = got
            v = b2.get(key)
            if v:
                act[(x, m)] = vscale(v, Fraction(sign))
    return act


class ModuleCochainTheory:
    """Chevalley-Eilenberg cochains of a graded Lie algebra with
    coefficients in a module.

    action: {(lie letter, module letter): module vector} for the suspended
    action map of degree +1 (built with the same sign recipe as the
    structure operations).  For the adjoint module this complex agrees
    with the self-coefficient one by construction.
    """

    def __init__(self, structure: PInftyStructure, module_letters, action):
        if structure.species != "Lie":
            raise InputError("module cochains are a Lie-side notion")
        self.structure = structure
        self.C = structure.coalgebra
        self.target = module_letters
        self.action = action
        self.b2 = structure.ops.get(2, {})
        self.D2 = self.C.coderivation({2: self.b2} if self.b2 else {})
        self._blowup = {}
        for pair, v in self.b2.items():
            for tgt, c in v.items():
                self._blowup.setdefault(tgt, []).append((pair, c))

    slice_basis = CochainTheory.slice_basis
    basis_cochain = CochainTheory.basis_cochain
    _candidates = CochainTheory._candidates
    is_cocycle = CochainTheory.is_cocycle
    coboundary_witness = CochainTheory.coboundary_witness
    slice_cohomology_dim = CochainTheory.slice_cohomology_dim
    harrison = False

    def _eval(self, cochain, wv):
        out = {}
        for w, c in wv.items():
            val = cochain.evaluate(w)
            if val:
                out = vadd(out, val, scale=c)
        return out

    def diff(self, cochain: Cochain):
        """termA - (-1)^t termB: action after extraction, minus f after D2."""
        k, t = cochain.arity, cochain.tdeg
        ldeg = self.C.deg
        sign = -ONE if t % 2 else ONE
        words = set()
        for w in cochain.comps:
            words |= self._candidates(w)
        comps = {}
        for w in sorted(words):
            total = vscale(self._eval(cochain, self.D2({w: ONE})), -sign)
            for i in range(len(w)):
                order = [i] + [j for j in range(len(w)) if j != i]
                perm = perm_inverse(tuple(j + 1 for j in order))
                s = koszul_sign(perm, [ldeg[x] for x in w])
                rest = tuple(w[j] for j in order[1:])
                val = cochain.evaluate(rest)
                if not val:
                    continue
                if (t * ldeg[w[i]]) % 2:
                    s = -s
                for m, cm in val.items():
                    act = self.action.get((w[i], m))
                    if act:
                        total = vadd(total, act, scale=Fraction(s) * cm)
            if total:
                comps[w] = total
        return Cochain(self, k + 1, t + 1, comps)
