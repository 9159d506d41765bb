"""Truncated cofree coalgebras on a graded letter alphabet.

Elements are sparse combinations of words (tuples of basis names of the
letter space).  kind="tensor" gives the tensor coalgebra T^c(V), used for
bar constructions of associative algebras; kind="sym" gives the symmetric
coalgebra S^c(V) (words are kept letter-sorted, a repeated odd letter kills
the word), used for Chevalley-Eilenberg constructions.

All operators act pointwise on word vectors; nothing is ever materialised
as a matrix on the full coalgebra.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

from .graded import (GradedVectorSpace, InputError, InvariantError, ONE,
                     koszul_sign, perm_inverse, vadd)


class WordCoalgebra:
    def __init__(self, letters: GradedVectorSpace, kind):
        if kind not in ("tensor", "sym"):
            raise InputError("kind must be 'tensor' or 'sym'")
        self.letters = letters
        self.kind = kind
        self.deg = letters.degree
        self._order = {n: i for i, n in enumerate(letters.names)}

    def word_degree(self, word):
        return sum(self.deg[x] for x in word)

    def canon(self, word):
        """Canonical form of a word: (word, sign) or None if it vanishes."""
        if self.kind == "tensor":
            return word, 1
        idx = sorted(range(len(word)), key=lambda i: self._order[word[i]])
        out = tuple(word[i] for i in idx)
        for i in range(len(out) - 1):
            if out[i] == out[i + 1] and self.deg[out[i]] % 2:
                return None
        sigma = perm_inverse(tuple(i + 1 for i in idx))
        return out, koszul_sign(sigma, [self.deg[x] for x in word])

    def add_word(self, out, word, coeff):
        if not coeff:
            return
        c = self.canon(word)
        if c is None:
            return
        word, sign = c
        coeff = coeff * sign
        cur = out.get(word)
        new = coeff if cur is None else cur + coeff
        if new:
            out[word] = new
        elif cur is not None:
            del out[word]

    def basis_words(self, n):
        """Canonical basis words of length n, in deterministic order."""
        names = self.letters.names
        if self.kind == "tensor":
            yield from product(names, repeat=n)
            return
        for combo in combinations_with_replacement(names, n):
            if self.canon(combo) is not None:
                yield combo

    # -- operators ---------------------------------------------------------

    def expand(self, out, parts, coeff):
        """Accumulate the product expansion of per-position letter vectors.

        parts: list whose entries are letter names (kept as-is) or sparse
        letter vectors (expanded multilinearly).  Signs from reordering are
        handled by canon; signs from applying maps must already be in coeff.
        """
        fixed = []
        slots = []
        for p in parts:
            if isinstance(p, str):
                fixed.append(p)
                slots.append(None)
            else:
                fixed.append(None)
                slots.append(sorted(p.items()))
        def rec(i, word, c):
            if i == len(parts):
                self.add_word(out, tuple(word), c)
                return
            if slots[i] is None:
                word.append(fixed[i])
                rec(i + 1, word, c)
                word.pop()
            else:
                for name, cv in slots[i]:
                    word.append(name)
                    rec(i + 1, word, c * cv)
                    word.pop()
        rec(0, [], coeff)

    def coderivation(self, components, parity=1):
        """The coderivation-style extension of corestriction components.

        components: {arity: {word: letter vector}}, all of the same degree
        parity (odd for structure coderivations, pass parity=0 for even
        maps such as gauge generators or cochains of even degree).  Missing
        words act as zero.  Returns an operator on word vectors.
        """
        deg = self.deg

        def op(wv):
            out = {}
            for word, c in wv.items():
                n = len(word)
                for k, comp in components.items():
                    if k > n:
                        continue
                    if self.kind == "tensor":
                        acc = 0
                        for p in range(n - k + 1):
                            sign = -1 if (acc * parity) % 2 else 1
                            key = word[p:p + k]
                            img = comp.get(key)
                            if img:
                                self.expand(out, list(word[:p]) + [img] +
                                            list(word[p + k:]), c * sign)
                            acc += deg[word[p]] if p < n else 0
                    else:
                        for sub in combinations(range(n), k):
                            rest = [i for i in range(n) if i not in sub]
                            perm = perm_inverse(tuple(
                                i + 1 for i in list(sub) + rest))
                            sign = koszul_sign(perm, [deg[x] for x in word])
                            cw = self.canon(tuple(word[i] for i in sub))
                            if cw is None:
                                continue
                            key, s2 = cw
                            img = comp.get(key)
                            if img:
                                self.expand(out, [img] +
                                            [word[i] for i in rest],
                                            c * sign * s2)
            return out
        return op

    def morphism(self, target, components):
        """The coalgebra morphism with the given corestriction components.

        components: {arity: {word: target letter vector}}, all of degree 0.
        Returns an operator from word vectors here to word vectors on
        target (a WordCoalgebra of the same kind).
        """
        if target.kind != self.kind:
            raise InputError("morphism between different coalgebra kinds")
        deg = self.deg

        def comp_of(word):
            cw = self.canon(word)
            if cw is None:
                return None
            key, s = cw
            img = components.get(len(key), {}).get(key)
            if not img:
                return None
            return img, s

        def op(wv):
            out = {}
            for word, c in wv.items():
                n = len(word)
                if self.kind == "tensor":
                    for cuts in _compositions(n):
                        parts = []
                        pos = 0
                        dead = False
                        for k in cuts:
                            got = comp_of(word[pos:pos + k])
                            if got is None:
                                dead = True
                                break
                            img, _ = got
                            parts.append(img)
                            pos += k
                        if not dead:
                            target.expand(out, parts, c)
                else:
                    for blocks in _set_partitions(n):
                        order = [i for b in blocks for i in b]
                        perm = perm_inverse(tuple(i + 1 for i in order))
                        sign = koszul_sign(perm, [deg[x] for x in word])
                        parts = []
                        coeff = c * sign
                        dead = False
                        for b in blocks:
                            got = comp_of(tuple(word[i] for i in b))
                            if got is None:
                                dead = True
                                break
                            img, s = got
                            coeff *= s
                            parts.append(img)
                        if not dead:
                            target.expand(out, parts, coeff)
            return out
        return op

    def letterwise(self, gmap, target=None):
        """Apply a degree-0 letter map to every position of every word."""
        if gmap.degree != 0:
            raise InputError("letterwise maps must have degree 0")
        target = target or self

        def op(wv):
            out = {}
            for word, c in wv.items():
                target.expand(out, [gmap.cols.get(x, {}) for x in word], c)
            return out
        return op


def coproduct(C: WordCoalgebra, wv):
    """Full comultiplication: {(left word, right word): coeff}.

    Tensor words split by deconcatenation; symmetric words by sign-weighted
    unshuffles.  Empty halves are included (counit direction)."""
    out = {}

    def put(a, b, c):
        if not c:
            return
        key = (a, b)
        cur = out.get(key, 0) + c
        if cur:
            out[key] = cur
        elif key in out:
            del out[key]

    for word, c in wv.items():
        n = len(word)
        if C.kind == "tensor":
            for i in range(n + 1):
                put(word[:i], word[i:], c)
        else:
            degs = [C.deg[x] for x in word]
            for k in range(n + 1):
                for sub in combinations(range(n), k):
                    rest = [i for i in range(n) if i not in sub]
                    perm = perm_inverse(tuple(i + 1 for i in list(sub) + rest))
                    sign = koszul_sign(perm, degs)
                    left = C.canon(tuple(word[i] for i in sub))
                    right = C.canon(tuple(word[i] for i in rest))
                    if left is None or right is None:
                        continue
                    put(left[0], right[0], c * sign * left[1] * right[1])
    return out


def _compositions(n):
    """Ordered tuples of positive integers summing to n."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def _set_partitions(n):
    """Unordered partitions of {0..n-1}; blocks sorted, ordered by minimum."""
    if n == 0:
        yield []
        return
    def rec(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for k in range(len(rest) + 1):
            for others in combinations(rest, k):
                block = (first,) + others
                remaining = [i for i in rest if i not in others]
                for sub in rec(remaining):
                    yield [block] + sub
    yield from rec(list(range(n)))


# ---------------------------------------------------------------------------
# the tensor-trick homotopy and its symmetric average


def corestrict(wv):
    """Length-1 component of a word vector, as a letter vector."""
    return {w[0]: c for w, c in wv.items() if len(w) == 1}


def singleton(letter_vec):
    return {(x,): c for x, c in letter_vec.items()}


def tensor_homotopy(C: WordCoalgebra, h_s, gf_s):
    """id^a x h x (gf)^b summed over positions, on tensor words.

    h_s has degree -1, gf_s degree 0, both letter maps on C.letters.
    """
    deg = C.deg

    def op(wv):
        out = {}
        for word, c in wv.items():
            acc = 0
            for a in range(len(word)):
                sign = -1 if acc % 2 else 1
                parts = (list(word[:a]) + [h_s.cols.get(word[a], {})] +
                         [gf_s.cols.get(x, {}) for x in word[a + 1:]])
                C.expand(out, parts, c * sign)
                acc += deg[word[a]]
        return out
    return op


def sym_average_homotopy(S: WordCoalgebra, h_s, gf_s):
    """Symmetric-word homotopy: average of the tensor homotopy over orderings.

    Computed as (1/n!) p . H_tensor . N where N is the sign-weighted
    symmetrisation into tensor words and p re-symmetrises.  The result is
    a homotopy for the letterwise contraction on S^c; side conditions are
    restored separately.
    """
    T = WordCoalgebra(S.letters, "tensor")
    HT = tensor_homotopy(T, h_s, gf_s)
    deg = S.deg
    from itertools import permutations

    def op(wv):
        out = {}
        for word, c in wv.items():
            n = len(word)
            fact = Fraction(1)
            for i in range(2, n + 1):
                fact *= i
            tens = {}
            degs = [deg[x] for x in word]
            for sigma in permutations(range(1, n + 1)):
                sign = koszul_sign(sigma, degs)
                inv = perm_inverse(sigma)
                tw = tuple(word[inv[i] - 1] for i in range(n))
                tens[tw] = tens.get(tw, 0) + c * sign
            tens = {w: v for w, v in tens.items() if v}
            himg = HT(tens)
            for tw, cv in himg.items():
                S.add_word(out, tw, cv / fact)
        return out
    return op


def compose_ops(*ops):
    """Right-to-left composition of word-vector operators."""
    def op(wv):
        for f in reversed(ops):
            wv = f(wv)
        return wv
    return op


def op_sub(a, b):
    def op(wv):
        out = dict(a(wv))
        for w, c in b(wv).items():
            cur = out.get(w, 0) - c
            if cur:
                out[w] = cur
            elif w in out:
                del out[w]
        return out
    return op


def identity_op(wv):
    return dict(wv)
