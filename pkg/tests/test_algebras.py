from fractions import Fraction

import pytest

from homformal.algebras import (DgAlgebra, FIXTURE_KEYS, check_axioms,
                                cohomology_algebra, fixture)
from homformal.graded import (GradedLinearMap, GradedVectorSpace, InputError,
                              ONE)


def test_fixtures_pass_axioms():
    for key in FIXTURE_KEYS:
        rep = check_axioms(fixture(key))
        assert rep["passed"], (key, rep["violations"][:3])


def test_unknown_fixture():
    with pytest.raises(InputError):
        fixture("F9")


def test_corrupted_bracket_fails_jacobi():
    sp = GradedVectorSpace([("e", 0), ("f", 0), ("h", 0)])
    bad = DgAlgebra("Lie", sp, GradedLinearMap.zero(sp, sp, 1),
                    {("e", "f"): {"h": ONE, "e": ONE},
                     ("h", "e"): {"e": Fraction(2)},
                     ("h", "f"): {"f": Fraction(-2)}})
    rep = check_axioms(bad)
    assert not rep["passed"]
    assert any(v["identity"] == "graded Jacobi" for v in rep["violations"])


def test_lie_rejects_unit():
    sp = GradedVectorSpace([("one", 0)])
    with pytest.raises(InputError):
        DgAlgebra("Lie", sp, GradedLinearMap.zero(sp, sp, 1), {}, unit="one")


def test_cohomology_of_f2():
    H, _ = cohomology_algebra(fixture("F2"))
    assert check_axioms(H)["passed"]
    by_deg = {}
    for n in H.space.names:
        by_deg.setdefault(H.space.degree[n], []).append(n)
    assert [len(by_deg.get(i, [])) for i in range(4)] == [1, 2, 2, 1]
    x, y = by_deg[1]
    # xy = dz, so the degree-1 classes multiply to zero
    assert H.mul_basis(x, y) == {}


def test_cohomology_of_zero_differential():
    A = fixture("F4")
    H, _ = cohomology_algebra(A)
    assert H.space.dim == A.space.dim
    assert H.unit is not None
    assert check_axioms(H)["passed"]


def test_cohomology_species_preserved():
    for key in ("F2", "F5", "acyclic"):
        A = fixture(key)
        H, _ = cohomology_algebra(A)
        assert H.species == A.species
        assert check_axioms(H)["passed"]
