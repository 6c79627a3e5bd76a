import itertools

import pytest

from pfaffkit.errors import InvalidD, InvalidN, UnknownAction
from pfaffkit.groups import (
    EULERIAN,
    Elliptic,
    Finite,
    GL,
    Ga,
    GaxGm,
    Gm,
    ONE_REDUCIBLE_INTERNAL,
    PGL,
    PSL,
    SL,
    Torus,
    check_series,
    d_solvable,
    d_solvable_set,
    extension,
    generic_transitivity,
    gl_affine_action,
    pgl_projective_action,
    product,
    reducibility_profile,
    series_witness_valid,
    subgroup_of,
)


def small_atoms():
    atoms = [Ga(), Gm(), GaxGm(), Finite(), Elliptic()]
    for n in (2, 3, 4):
        atoms += [SL(n), GL(n), PSL(n)]
    atoms += [Torus(2), Torus(3)]
    # normalized aliases collapse into the same atoms
    atoms += [PGL(2), GL(1), Torus(1), SL(1)]
    out = []
    for a in atoms:
        if a not in out:
            out.append(a)
    return out


def depth_two(atoms):
    trees = list(atoms)
    for a, b in itertools.product(atoms, repeat=2):
        trees.append(product(a, b))
        trees.append(extension(a, b))
    for a in atoms:
        trees.append(subgroup_of(a))
    return trees


class TestNormalization:
    def test_pgl_is_psl(self):
        assert PGL(2) == PSL(2)
        assert PGL(3) == PSL(3)

    def test_rank_one_collapses(self):
        assert GL(1) == Gm()
        assert SL(1) == Finite()
        assert Torus(1) == Gm()

    def test_bad_ranks(self):
        with pytest.raises(InvalidN):
            SL(0)
        with pytest.raises(InvalidN):
            Torus(-1)


class TestCheckSeries:
    def test_gl2_eulerian_with_witness(self):
        v = check_series(GL(2), EULERIAN)
        assert v.is_yes
        assert v.witness == ("Gm", "PSL(2)", "Fin")
        assert series_witness_valid(v, EULERIAN)

    def test_sl3_not_eulerian(self):
        v = check_series(SL(3), EULERIAN)
        assert v.is_no
        assert "PSL(3)" in v.reason

    def test_elliptic_on_both_alphabets(self):
        assert check_series(Elliptic(), EULERIAN).is_no
        assert check_series(Elliptic(), ONE_REDUCIBLE_INTERNAL).is_yes

    def test_goursat_closure(self):
        v = check_series(subgroup_of(product(SL(2), SL(2), Gm())), EULERIAN)
        assert v.is_yes
        assert series_witness_valid(v, EULERIAN)

    def test_unknown_subgroup_of_large_group(self):
        v = check_series(subgroup_of(GL(3)), EULERIAN)
        assert v.value == "unknown"

    def test_nested_subgroups_and_products(self):
        g = subgroup_of(product(product(SL(2), Torus(2)), Finite()))
        assert check_series(g, EULERIAN).is_yes
        assert check_series(subgroup_of(subgroup_of(SL(2))), EULERIAN).is_yes

    def test_extension_rules(self):
        assert check_series(extension(SL(2), Gm()), EULERIAN).is_yes
        assert check_series(extension(SL(3), Gm()), EULERIAN).is_no
        assert check_series(extension(subgroup_of(GL(3)), Gm()), EULERIAN).value == "unknown"
        # a definite no wins over an unknown sibling
        assert check_series(extension(subgroup_of(GL(3)), SL(4)), EULERIAN).is_no


class TestDSolvable:
    def test_gl_n_at_level_n(self):
        for n in (2, 3, 4, 5):
            assert d_solvable(GL(n), n).is_yes

    def test_gl3_at_level_2_blocked_by_psl3(self):
        v = d_solvable(GL(3), 2)
        assert v.is_no
        assert "PSL(3)" in v.reason

    def test_ga_not_1_solvable(self):
        assert d_solvable(Ga(), 1).is_no
        assert d_solvable(Ga(), 2).is_yes

    def test_invalid_d(self):
        with pytest.raises(InvalidD):
            d_solvable(Gm(), 0)

    def test_monotone_in_d(self):
        atoms = small_atoms()
        for g in depth_two(atoms)[:200]:
            prev = None
            for d in (1, 2, 3, 4, 5):
                v = d_solvable(g, d)
                if prev is not None and prev.is_yes:
                    assert v.is_yes, f"monotonicity broke at {g} d={d}"
                prev = v


class TestEquivalences:
    def test_eulerian_iff_2_solvable_depth2(self):
        dsolv2 = d_solvable_set(2)
        for g in depth_two(small_atoms()):
            e = check_series(g, EULERIAN)
            s = check_series(g, dsolv2)
            if e.is_definite and s.is_definite:
                assert e.value == s.value, f"mismatch at {g}"

    def test_one_reducible_contains_eulerian_depth2(self):
        for g in depth_two(small_atoms()):
            e = check_series(g, EULERIAN)
            if e.is_yes:
                assert check_series(g, ONE_REDUCIBLE_INTERNAL).is_yes, g

    def test_product_extension_coherence(self):
        atoms = small_atoms()
        for a, b in itertools.product(atoms, repeat=2):
            for allowed in (EULERIAN, ONE_REDUCIBLE_INTERNAL, d_solvable_set(3)):
                p = check_series(product(a, b), allowed)
                e = check_series(extension(a, b), allowed)
                if p.is_definite and e.is_definite:
                    assert p.value == e.value

    def test_yes_witnesses_are_valid_series(self):
        for allowed in (EULERIAN, ONE_REDUCIBLE_INTERNAL, d_solvable_set(2), d_solvable_set(4)):
            for g in depth_two(small_atoms()):
                v = check_series(g, allowed)
                assert series_witness_valid(v, allowed), (g, str(allowed))


class TestActions:
    def test_projective_transitivity(self):
        assert generic_transitivity(pgl_projective_action(3)) == 4
        assert generic_transitivity(pgl_projective_action(2)) == 3

    def test_affine_transitivity(self):
        assert generic_transitivity(gl_affine_action(2)) == 2

    def test_unknown_action(self):
        with pytest.raises(UnknownAction):
            generic_transitivity("frobnicate")
        with pytest.raises(InvalidN):
            pgl_projective_action(1)


class TestReducibilityProfile:
    def test_window_values(self):
        for n in (3, 4, 5, 6):
            p = reducibility_profile(n)
            assert (p.reducible_at, p.not_reducible_at) == (n - 1, n - 2)

    def test_window_matches_transitivity_bound(self):
        p = reducibility_profile(3)
        assert p.not_reducible_at == generic_transitivity(pgl_projective_action(3)) - 3

    def test_small_n_rejected(self):
        with pytest.raises(InvalidN):
            reducibility_profile(2)
