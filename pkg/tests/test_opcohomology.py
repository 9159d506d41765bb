import random
from fractions import Fraction

from homformal.algebras import cohomology_algebra, fixture
from homformal.homotopy import strict_structure, transfer_minimal_model
from homformal.opcohomology import Cochain, CochainTheory


def _random_cochain(th, arity, tdeg, rng):
    c = Cochain(th, arity, tdeg, {})
    for pair in th.slice_basis(arity, tdeg):
        c = c.add(th.basis_cochain(arity, tdeg, pair),
                  scale=Fraction(rng.randint(-2, 2)))
    return c


def test_differential_squares_to_zero():
    rng = random.Random(5)
    model, _, _ = transfer_minimal_model(fixture("F2"), 4)
    th = CochainTheory(model)
    for arity in (1, 2, 3):
        for tdeg in (0, 1):
            c = _random_cochain(th, arity, tdeg, rng)
            assert th.diff(th.diff(c)).is_zero()


def test_obstruction_is_a_cocycle():
    model, _, _ = transfer_minimal_model(fixture("F2"), 4)
    th = CochainTheory(model)
    b3 = Cochain(th, 3, 1, model.ops[3])
    assert th.is_cocycle(b3)
    harr = CochainTheory(model, harrison=True)
    assert harr.in_harrison_subspace(Cochain(harr, 3, 1, model.ops[3]))


def test_coboundary_witness_verifies():
    rng = random.Random(9)
    H, _ = cohomology_algebra(fixture("F2"))
    th = CochainTheory(strict_structure(H))
    checked = 0
    for arity in (2, 3):
        for tdeg in (0, 1):
            g = _random_cochain(th, arity - 1, tdeg - 1, rng)
            f = th.diff(g)
            if f.is_zero():
                continue
            y = th.coboundary_witness(f)
            assert y is not None
            assert th.diff(y).add(f, scale=-Fraction(1)).is_zero()
            checked += 1
    assert checked


def test_coboundary_witness_none_for_noncoboundary():
    model, _, _ = transfer_minimal_model(fixture("F2"), 4)
    th = CochainTheory(model)
    b3 = Cochain(th, 3, 1, model.ops[3])
    # F2's triple Massey-type operation is not exact
    assert th.coboundary_witness(b3) is None


def test_projection_is_idempotent():
    rng = random.Random(2)
    H, _ = cohomology_algebra(fixture("F2"))
    th = CochainTheory(strict_structure(H))
    for arity in (2, 3):
        c = _random_cochain(th, arity, 1, rng)
        e = th.project(c)
        assert th.project(e).add(e, scale=-Fraction(1)).is_zero()
        assert th.in_harrison_subspace(th.shuffle_part(c))


def test_module_theory_squares_to_zero():
    rng = random.Random(4)
    from homformal.enveloping import hochschild_ce_pair
    L = fixture("F5")
    _, _, cem, _, _, _ = hochschild_ce_pair(L, 2)
    for arity in (1, 2):
        for tdeg in (0, 1):
            c = _random_cochain(cem, arity, tdeg, rng)
            assert cem.diff(cem.diff(c)).is_zero()
