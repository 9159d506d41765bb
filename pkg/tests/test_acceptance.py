"""Acceptance gate: one test per headline criterion, exact arithmetic,
each with a wall-clock budget.  Every test ends with a single PASS line
(visible under pytest -v -s) naming the criterion."""

import itertools
import random
import time
from fractions import Fraction

from homformal import linalg
from homformal.algebras import (FIXTURE_KEYS, check_axioms,
                                cohomology_algebra, fixture)
from homformal.graded import (CochainComplex, Contraction, GradedLinearMap,
                              GradedVectorSpace, ONE, koszul_sign,
                              perm_compose, perm_inverse, perm_sign,
                              permute_tensor)
from homformal.homotopy import (coalgebra_morphism_defects, exp_coderivation,
                                gauge_transform, morphism_from_operator,
                                normalize_morphism, strict_structure,
                                transfer_minimal_model)
from homformal.opcohomology import Cochain, CochainTheory
from homformal.symgroup import (GroupAlgebraElement, barr_idempotent,
                                shuffle_element, total_shuffle)


def _budget(t0, seconds, label):
    elapsed = time.time() - t0
    assert elapsed < seconds, "%s exceeded %ds budget: %.1fs" % (
        label, seconds, elapsed)
    return elapsed


# -- 1: sign engine ---------------------------------------------------------


def _oracle_sign(sigma, degs):
    """Move factors one adjacent swap at a time, multiplying the Koszul
    sign of each swap."""
    n = len(sigma)
    inv = perm_inverse(sigma)
    cur = list(range(1, n + 1))
    want = list(inv)
    sign = 1
    for i in range(n):
        j = cur.index(want[i])
        while j > i:
            a, b = cur[j - 1], cur[j]
            if degs[a - 1] % 2 and degs[b - 1] % 2:
                sign = -sign
            cur[j - 1], cur[j] = b, a
            j -= 1
    return sign


def test_criterion_1_sign_engine():
    t0 = time.time()
    for n in (3, 4):
        perms = list(itertools.permutations(range(1, n + 1)))
        degss = list(itertools.product((0, 1), repeat=n))
        for sigma in perms:
            for degs in degss:
                want = _oracle_sign(sigma, degs)
                assert koszul_sign(sigma, degs) == want
                assert koszul_sign(sigma, degs, mode="gamma") == \
                    want * perm_sign(sigma)
        word = tuple("x%d" % i for i in range(n))
        for sigma in perms:
            for tau in perms:
                for degs in degss:
                    s1, w1 = permute_tensor(tau, word, degs)
                    degs1 = tuple(degs[word.index(x)] for x in w1)
                    s2, w2 = permute_tensor(sigma, w1, degs1)
                    s, w = permute_tensor(perm_compose(sigma, tau), word,
                                          degs)
                    assert (s1 * s2, w2) == (s, w)
    el = _budget(t0, 5, "criterion 1")
    print("criterion 1 (sign engine, S3/S4 oracle): PASS (%.1fs)" % el)


# -- 2: Barr idempotents ----------------------------------------------------


def _mu_word_action(theory, mu, word):
    degs = [theory.C.deg[x] for x in word]
    out = {}
    for sigma, c in mu.terms.items():
        s, fac = permute_tensor(sigma, word, degs, mode="gamma")
        cur = out.get(fac, Fraction(0)) + c * s
        if cur:
            out[fac] = cur
        elif fac in out:
            del out[fac]
    return out


def test_criterion_2_barr_idempotents():
    t0 = time.time()
    for n in range(2, 6):
        e = barr_idempotent(n)
        mu = total_shuffle(n)
        assert e.mul(e) == e                                    # (i)
        # (ii): e is a constant-free polynomial in mu
        perms = sorted(set(e.terms) | set(mu.terms)
                       | {tuple(range(1, n + 1))})
        pidx = {p: i for i, p in enumerate(perms)}

        def vec(el):
            v = [Fraction(0)] * len(perms)
            for p, c in el.terms.items():
                if p not in pidx:
                    return None
            for p, c in el.terms.items():
                v[pidx[p]] = c
            return v

        powers = []
        cur = mu
        for _ in range(8):
            v = vec(cur)
            if v is None:
                # enlarge the index set and restart
                perms = sorted(set(perms) | set(cur.terms))
                pidx = {p: i for i, p in enumerate(perms)}
                powers = []
                cur = mu
                continue
            powers.append(v)
            cur = cur.mul(mu)
        target = vec(e)
        assert target is not None
        assert linalg.in_span(powers, target)
        for i in range(1, n):                                   # (iii)
            m = shuffle_element(i, n - i)
            assert e.mul(m) == m

    H, _ = cohomology_algebra(fixture("F2"))
    th = CochainTheory(strict_structure(H))
    degs_present = sorted(set(H.space.degrees()))
    checked_iv = 0
    for arity in (2, 3):
        for tdeg in range(-1, max(degs_present) + 2):
            basis = th.slice_basis(arity, tdeg)
            if not basis:
                continue
            # (iv) on the full slice
            assert th.chain_compatibility_defects(arity, tdeg) == []
            checked_iv += len(basis)
            # ker(e action) equals the shuffle-vanishing subspace
            cols_e = [th.project(th.basis_cochain(arity, tdeg, p)).labels()
                      for p in basis]
            labels = sorted({lab for col in cols_e for lab in col})
            li = {lab: i for i, lab in enumerate(labels)}
            mat = [[col.get(lab, Fraction(0)) for col in cols_e]
                   for lab in labels]
            kern = linalg.kernel_basis(mat) if labels else \
                linalg.identity(len(basis))
            # shuffle-vanishing constraints on the same slice
            e = barr_idempotent(arity)
            words = sorted({w for w, _ in basis})
            rows = []
            for w in words:
                for i in range(1, arity):
                    img = _mu_word_action(th, shuffle_element(i, arity - i),
                                          w)
                    for tgt in {t for _, t in basis}:
                        row = [img.get(bw, Fraction(0))
                               if bt == tgt else Fraction(0)
                               for bw, bt in basis]
                        if any(row):
                            rows.append(row)
            vanish = linalg.kernel_basis(rows) if rows else \
                linalg.identity(len(basis))
            assert len(kern) == len(vanish)
            both = [list(v) for v in kern] + [list(v) for v in vanish]
            assert linalg.rank(both) == len(kern)
            # splitting dimensions: C_Harr + W = C_Hoch
            rank_e = linalg.sparse_rank(cols_e)
            cols_h = [th.shuffle_part(
                th.basis_cochain(arity, tdeg, p)).labels() for p in basis]
            rank_h = linalg.sparse_rank(cols_h)
            assert rank_h + rank_e == len(basis)
    assert checked_iv > 0
    el = _budget(t0, 60, "criterion 2")
    print("criterion 2 (Barr idempotents (i)-(iv), splitting): "
          "PASS (%.1fs)" % el)


# -- 3: homotopy transfer soundness ----------------------------------------


def test_criterion_3_htt_soundness():
    t0 = time.time()
    for key in ("F1", "F2", "F4", "F5"):
        A = fixture(key)
        model, qiso, info = transfer_minimal_model(A, 5)
        assert model.is_minimal()
        assert model.check_relations(5) == []
        H = info["H_algebra"]
        for a in H.space.names:
            for b in H.space.names:
                assert model.operation((a, b)) == H.mul_basis(a, b)
        if A.d.is_zero():
            assert all(k <= 2 for k in model.ops)
        if A.species == "Com":
            assert model.shuffle_defects(5) == []
    el = _budget(t0, 60, "criterion 3")
    print("criterion 3 (HTT soundness on F1/F2/F4/F5): PASS (%.1fs)" % el)


# -- 4: appendix machinery --------------------------------------------------


def _degree_zero_component(P, arity, rng):
    comp = {}
    for w in P.coalgebra.basis_words(arity):
        want = sum(P.sletters.degree[x] for x in w)
        col = {t: Fraction(rng.randint(-2, 2)) for t in P.sletters.names
               if P.sletters.degree[t] == want}
        col = {k: v for k, v in col.items() if v}
        if col:
            comp[w] = col
    return comp


def test_criterion_4_appendix_machinery():
    t0 = time.time()
    rng = random.Random(17)
    P, _, _ = transfer_minimal_model(fixture("F3_nonformal"), 5)

    theta = _degree_zero_component(P, 2, rng)
    e_plus = exp_coderivation(P.coalgebra, {2: theta})
    e_minus = exp_coderivation(P.coalgebra, {2: theta}, negate=True)
    assert coalgebra_morphism_defects(P.coalgebra, e_plus, 6,
                                      inverse=e_minus) == []

    # first-order gauge relation at the next arity: b' = b + d(theta)
    Q = gauge_transform(P, 2, theta, 5)
    assert Q.ops.get(2) == P.ops.get(2)
    assert Q.check_relations(5) == []
    th = CochainTheory(P)
    dtheta = th.diff(Cochain(th, 2, 0, theta))
    got = Cochain(th, 3, 1, Q.ops.get(3, {}))
    want = Cochain(th, 3, 1, P.ops.get(3, {})).add(dtheta)
    assert got.add(want, scale=-ONE).is_zero()

    # normalization: strict rescale collapses to the identity
    M1, _, _ = transfer_minimal_model(fixture("F1"), 5)
    from homformal.homotopy import InftyMorphism
    letter = M1.sletters.names[0]
    psi = InftyMorphism(M1, M1, {1: {(letter,): {letter: Fraction(2)}}})
    norm = normalize_morphism(psi, 5, check_length=4)
    assert norm.components == {1: {(letter,): {letter: ONE}}}

    # stray low components die while the source operations vanish
    M3, _, _ = transfer_minimal_model(fixture("F3"), 5)
    stray = _degree_zero_component(M3, 2, rng)
    assert stray
    op = exp_coderivation(M3.coalgebra, {2: stray})
    psi2 = morphism_from_operator(M3, M3, op, 5)
    assert 2 in psi2.components
    norm2 = normalize_morphism(psi2, 5, check_length=4)
    for i in range(2, 6):
        assert i not in norm2.components
    assert norm2.check(4) == []
    el = _budget(t0, 30, "criterion 4")
    print("criterion 4 (exp automorphism, gauge, normalization): "
          "PASS (%.1fs)" % el)


# -- 5: commutative vs associative comparison -------------------------------


def test_criterion_5_com_vs_ass():
    from homformal.formality import (compare_com_vs_ass,
                                     hochschild_to_harrison_witness)
    t0 = time.time()
    rep2 = compare_com_vs_ass(fixture("F2"), 4)
    assert rep2["verdict"] == {"status": "non-formal", "first_nonzero": 3}
    assert rep2["agreement"]
    stage3 = [s for s in rep2["stages"] if s["k"] == 3][0]
    assert not stage3["hochschild_vanishes"]
    assert not stage3["harrison_vanishes"]

    rep4 = compare_com_vs_ass(fixture("F4"), 5)
    assert rep4["verdict"]["status"] == "certified-formal"
    assert rep4["agreement"]

    # randomized witness-projection suite
    H, _ = cohomology_algebra(fixture("F2"))
    th = CochainTheory(strict_structure(H))
    rng = random.Random(23)
    done = 0
    attempts = 0
    while done < 50:
        attempts += 1
        assert attempts < 500
        arity = rng.choice((3, 4))
        tdeg = rng.choice((0, 1, 2))
        y = Cochain(th, arity - 1, tdeg - 1, {})
        for pair in th.slice_basis(arity - 1, tdeg - 1):
            y = y.add(th.basis_cochain(arity - 1, tdeg - 1, pair),
                      scale=Fraction(rng.randint(-2, 2)))
        y_h = th.shuffle_part(y)
        f = th.diff(y_h)
        if f.is_zero():
            continue
        noise = Cochain(th, arity - 2, tdeg - 2, {})
        for pair in th.slice_basis(arity - 2, tdeg - 2):
            noise = noise.add(th.basis_cochain(arity - 2, tdeg - 2, pair),
                              scale=Fraction(rng.randint(-1, 1)))
        witness = y_h.add(th.diff(noise))
        y1 = hochschild_to_harrison_witness(th, f, witness)
        assert th.in_harrison_subspace(y1)
        assert th.diff(y1).add(f, scale=-ONE).is_zero()
        done += 1
    el = _budget(t0, 120, "criterion 5")
    print("criterion 5 (com vs ass on F2/F4 + 50-case witness suite): "
          "PASS (%.1fs)" % el)


# -- 6: Lie vs associative comparison ----------------------------------------


def test_criterion_6_lie_vs_ass():
    from homformal.enveloping import (alt, hochschild_ce_pair, internal_diff,
                                      summand_retraction)
    from homformal.formality import compare_lie_vs_ass
    t0 = time.time()

    for key in ("F1", "acyclic"):
        rep = compare_lie_vs_ass(fixture(key), 4, 4)
        assert rep["status"] == "complete"
        assert rep["lie"]["status"] != "non-formal"
        assert rep["envelope"]["status"] != "non-formal"
        assert rep["agreement"]

    rep = compare_lie_vs_ass(fixture("F3_nonformal"), 4, 3)
    assert rep["status"] == "complete"
    assert rep["lie"] == dict(rep["lie"], status="non-formal",
                              first_nonzero=3)
    assert rep["envelope"]["status"] == "non-formal"
    assert rep["envelope"]["first_nonzero"] == 3
    cmp_out = rep["comparison"]
    assert cmp_out["classes_equal"]
    assert cmp_out["difference_bounds"]
    assert cmp_out["truncation_sufficient"]
    assert cmp_out["injectivity_ok"]
    assert rep["agreement"]

    # the alternation map is a chain map for both differential pieces,
    # on arities up to 3
    rng = random.Random(31)
    for key, W in (("F3", 4), ("F3_nonformal", 3)):
        L = fixture(key)
        env, hoch, cem, mdiff, lmap, vmap = hochschild_ce_pair(L, W)
        gens = ["s" + n for n in env.names]
        sdeg = hoch.C.letters.degree
        checked = 0
        for arity in (1, 2, 3):
            for tdeg in (0, 1):
                for _ in range(2):
                    comps = {}
                    for w in hoch.C.basis_words(arity):
                        if not all(x in gens for x in w):
                            continue
                        want = sum(sdeg[x] for x in w) + tdeg
                        col = {t: Fraction(rng.randint(-2, 2))
                               for t in hoch.target.names
                               if hoch.target.degree[t] == want
                               and t != "s1"
                               and len(t[1:].split(".")) <= 2}
                        col = {k: v for k, v in col.items() if v}
                        if col:
                            comps[w] = col
                    c = Cochain(hoch, arity, tdeg, comps)
                    if c.is_zero():
                        continue
                    ac = alt(c, cem, lmap, vmap)
                    assert alt(hoch.diff(c), cem, lmap, vmap).add(
                        cem.diff(ac), scale=-ONE).is_zero()
                    assert alt(internal_diff(hoch, c), cem, lmap, vmap).add(
                        internal_diff(cem, ac, module_diff=mdiff),
                        scale=-ONE).is_zero()
                    checked += 1
        assert checked >= 4, key

    # the PBW retraction is a module morphism up to weight 3
    for key in ("F5", "F3_nonformal"):
        pirep = summand_retraction(fixture(key), 3).report()
        assert pirep["unit_killed"] and pirep["fixes_generators"]
        assert pirep["equivariance_defects"] == []
    el = _budget(t0, 300, "criterion 6")
    print("criterion 6 (lie vs ass, Alt chain map, retraction): "
          "PASS (%.1fs)" % el)


# -- 7: enveloping dimension tables -----------------------------------------


def test_criterion_7_envelope_dimensions():
    from homformal.enveloping import quillen_check
    t0 = time.time()
    for key in ("F1", "F3", "F5", "acyclic"):
        rep = quillen_check(fixture(key), 4)
        assert rep["dims_match"], key
        assert rep["bijective"], key
        assert rep["algebra_map_defects"] == [], key
    rep = quillen_check(fixture("acyclic"), 4)
    assert rep["table_hul"] == {(0, 0): 1}
    el = _budget(t0, 120, "criterion 7")
    print("criterion 7 (envelope cohomology tables to weight 4): "
          "PASS (%.1fs)" % el)


# -- 8: perturbation engine --------------------------------------------------


def _random_filtered_case(rng):
    from homformal.homotopy import _invert_letter_map
    ns = rng.randint(0, 2)
    npairs = rng.randint(1, 2)
    basis, filt, small_basis, dcols = [], {}, [], {}
    for i in range(ns):
        d = rng.randint(0, 2)
        nm = "s%d" % i
        basis.append((nm, d))
        small_basis.append((nm, d))
        filt[nm] = rng.randint(0, 2)
    for i in range(npairs):
        d = rng.randint(0, 2)
        u, v = "u%d" % i, "v%d" % i
        basis.append((u, d))
        basis.append((v, d + 1))
        fl = rng.randint(0, 2)
        filt[u] = fl
        filt[v] = fl
    big_sp = GradedVectorSpace(basis)
    small_sp = GradedVectorSpace(small_basis)
    dbig = GradedLinearMap(big_sp, big_sp, 1, dcols)
    for i in range(npairs):
        dbig.cols["u%d" % i] = {"v%d" % i: ONE}
    big = CochainComplex(big_sp, dbig)
    small = CochainComplex(small_sp,
                           GradedLinearMap.zero(small_sp, small_sp, 1))
    f = GradedLinearMap(big_sp, small_sp, 0,
                        {nm: {nm: ONE} for nm, _ in small_basis})
    g = GradedLinearMap(small_sp, big_sp, 0,
                        {nm: {nm: ONE} for nm, _ in small_basis})
    h = GradedLinearMap(big_sp, big_sp, -1,
                        {"v%d" % i: {"u%d" % i: -ONE}
                         for i in range(npairs)})
    con = Contraction(big, small, f, g, h)
    assert con.check() == []
    # a certified perturbation: conjugate d by a filtration-lowering
    # unipotent and take the difference
    names = [nm for nm, _ in basis]
    deg = big_sp.degree
    ncols = {}
    for x in names:
        col = {y: Fraction(rng.randint(-2, 2)) for y in names
               if deg[y] == deg[x] and filt[y] < filt[x]
               and rng.random() < 0.6}
        col = {k: v for k, v in col.items() if v}
        if col:
            ncols[x] = col
    P = GradedLinearMap.identity(big_sp).add(
        GradedLinearMap(big_sp, big_sp, 0, ncols))
    Pinv = GradedLinearMap(big_sp, big_sp, 0, _invert_letter_map(P))
    t = Pinv.compose(dbig).compose(P).add(dbig, scale=-ONE)
    return con, t, filt


def test_criterion_8_perturbation_suite():
    from homformal.enveloping import perturbation_lemma
    t0 = time.time()
    rng = random.Random(7)

    def dense(gm, rows, cols):
        return [[gm.cols.get(c, {}).get(r, Fraction(0)) for c in cols]
                for r in rows]

    for case in range(100):
        con, t, filt = _random_filtered_case(rng)
        out = perturbation_lemma(con, t, filt, {"t": -1, "h": 0})
        # identities re-checked here, not just inside the engine
        big2 = out["big"]
        assert big2.d.compose(big2.d).is_zero()
        recon = Contraction(big2, out["small"], out["f"], out["g"],
                            out["h"])
        assert recon.check() == []
        # brute-force oracle: d' = d + f t (1 - h t)^{-1} g
        names = con.big.space.names
        n = len(names)
        ht = dense(con.h.compose(t), names, names)
        I = linalg.identity(n)
        M = [[I[i][j] - ht[i][j] for j in range(n)] for i in range(n)]
        Minv = linalg.invert(M)
        sn = con.small.space.names
        prod = linalg.mat_mul(
            dense(con.f, sn, names),
            linalg.mat_mul(dense(t, names, names),
                           linalg.mat_mul(Minv, dense(con.g, names, sn))))
        dsm = dense(con.small.d, sn, sn)
        expect = [[dsm[i][j] + prod[i][j] for j in range(len(sn))]
                  for i in range(len(sn))]
        assert dense(out["small"].d, sn, sn) == expect, case

    # zero perturbation leaves everything unchanged
    con, _, filt = _random_filtered_case(rng)
    z = GradedLinearMap.zero(con.big.space, con.big.space, 1)
    out = perturbation_lemma(con, z, filt, {"t": -1, "h": 0})
    assert out["small"].d.equals(con.small.d)
    assert out["f"].equals(con.f) and out["g"].equals(con.g)
    assert out["h"].equals(con.h)
    el = _budget(t0, 60, "criterion 8")
    print("criterion 8 (perturbation lemma, 100-case suite + oracle): "
          "PASS (%.1fs)" % el)


# -- 9: determinism & robustness ---------------------------------------------


def _capture(argv):
    import io
    import contextlib
    from homformal.cli import main
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def _permuted(A):
    from homformal.algebras import DgAlgebra
    names = list(reversed(A.space.names))
    sp = GradedVectorSpace([(n, A.space.degree[n]) for n in names])
    d = GradedLinearMap(sp, sp, 1,
                        {k: dict(v) for k, v in A.d.cols.items()})
    prods = {pair: dict(v) for pair, v in A.products.items()}
    return DgAlgebra(A.species, sp, d, prods, unit=A.unit, name=A.name)


def test_criterion_9_determinism():
    import os
    import tempfile
    from homformal.cli import serialize_algebra
    from homformal.formality import obstruction_sequence
    t0 = time.time()
    fixdir = os.path.join(os.path.dirname(__file__), "..", "fixtures")
    for cmd, key in (("cohomology", "F2"), ("obstructions", "F2"),
                     ("envelope", "F5"), ("compare-com-ass", "F4")):
        runs = []
        for _ in range(2):
            code, text = _capture(
                [cmd, os.path.join(fixdir, key + ".alg"),
                 "--arity-bound", "4", "--weight-bound", "3"])
            assert code == 0
            runs.append(text)
        assert runs[0] == runs[1], cmd

    # verdicts are invariant under basis permutation
    for key in FIXTURE_KEYS:
        A = fixture(key)
        B = _permuted(A)
        assert check_axioms(B)["passed"]
        reps = []
        for alg in (A, B):
            model, _, info = transfer_minimal_model(alg, 4)
            unit = info["H_algebra"].unit if alg.unit is not None else None
            rep = obstruction_sequence(model, 4, unit=unit)
            dims = {}
            for n in model.space.names:
                d = model.space.degree[n]
                dims[d] = dims.get(d, 0) + 1
            reps.append((rep["status"], rep["first_nonzero"], dims))
        assert reps[0] == reps[1], key
    el = _budget(t0, 120, "criterion 9")
    print("criterion 9 (byte-identical reports, basis invariance): "
          "PASS (%.1fs)" % el)
