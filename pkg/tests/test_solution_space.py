import random
from fractions import Fraction as F

import pytest

from vasbound.linalg import AffineSpace, dot, full_space, residual, spaces_equal
from vasbound.model import PropertySpec, SubstateFormula, parse_model, satisfies
from vasbound.solution_space import (
    ContradictoryFormula,
    build_solution_space,
    classify_pair,
    is_single_solution,
    normal_vector,
    substate_hyperplane,
)
from vasbound.subspaces import blanketing_space


def sf(target, beta, coeffs=()):
    return SubstateFormula(target=target, beta=beta, coeffs=tuple(coeffs))


class TestNormals:
    def test_pinned_species(self):
        n = normal_vector(sf(5, 50), 7)
        assert n == tuple(F(1) if i == 5 else F(0) for i in range(7))

    def test_equal_species(self):
        assert normal_vector(sf(0, 0, [(1, F(1))]), 3) == (F(1), F(-1), F(0))

    def test_weighted(self):
        assert normal_vector(sf(0, 0, [(1, F(2)), (2, F(1))]), 3) == (F(1), F(-2), F(-1))

    def test_orthogonal_to_hyperplane_generators(self):
        rng = random.Random(3)
        for _ in range(100):
            m = rng.randint(2, 5)
            j = rng.randrange(m)
            coeffs = tuple(
                (k, F(rng.randint(0, 3), rng.randint(1, 3)))
                for k in range(m)
                if k != j and rng.random() < 0.5
            )
            f = sf(j, rng.randint(0, 5), coeffs)
            n = normal_vector(f, m)
            h = substate_hyperplane(f, m)
            for col in h.columns:
                assert dot(n, col) == 0


class TestClassify:
    def test_identical(self):
        assert classify_pair(sf(0, 3), sf(0, 3), 2) == "redundant"

    def test_contradictory(self):
        assert classify_pair(sf(0, 3), sf(0, 4), 2) == "contradictory"

    def test_independent(self):
        a = sf(0, 0, [(1, F(1))])
        b = sf(0, 0, [(1, F(2)), (2, F(1))])
        assert classify_pair(a, b, 3) == "independent"

    def test_parallel_across_targets(self):
        # X0 = X1 and X1 = X0 define the same hyperplane
        a = sf(0, 0, [(1, F(1))])
        b = sf(1, 0, [(0, F(1))])
        assert classify_pair(a, b, 2) == "redundant"


class TestBuild:
    def test_myp_hyperplane(self, myp):
        model, prop = myp
        sol = build_solution_space(prop, model.m)
        assert sol.space.dim == 6
        assert sol.space.offset == tuple(F(50) if i == 5 else F(0) for i in range(7))
        assert sol.space.contains((1, 2, 3, 4, 5, 50, 6))
        assert not sol.space.contains((1, 2, 3, 4, 5, 49, 6))

    def test_worked_two_plane_intersection(self):
        prop = PropertySpec(
            (sf(0, 0, [(1, F(1))]), sf(0, 0, [(1, F(2)), (2, F(1))])), 1.0
        )
        sol = build_solution_space(prop, 3)
        assert sol.space.dim == 1
        assert sol.space.contains((1, 1, -1))
        assert sol.normals == ((F(1), F(-1), F(0)), (F(1), F(-2), F(-1)))

    def test_contradiction_raises(self):
        prop = PropertySpec((sf(0, 3), sf(0, 4)), 1.0)
        with pytest.raises(ContradictoryFormula):
            build_solution_space(prop, 2)

    def test_three_way_contradiction(self):
        # pairwise independent planes in Q^2 with empty joint intersection
        prop = PropertySpec(
            (sf(0, 0, [(1, F(1))]), sf(0, 0, [(1, F(2))]), sf(0, 1, [(1, F(1))])), 1.0
        )
        with pytest.raises(ContradictoryFormula):
            build_solution_space(prop, 2)

    def test_redundant_dropped(self):
        prop = PropertySpec((sf(0, 3), sf(0, 3)), 1.0)
        sol = build_solution_space(prop, 2)
        assert sol.space.dim == 1
        assert len(sol.normals) == 2

    def test_order_invariance(self):
        formulas = [sf(0, 5), sf(1, 2), sf(2, 0, [(3, F(1, 2))])]
        a = build_solution_space(PropertySpec(tuple(formulas), 1.0), 4)
        b = build_solution_space(PropertySpec(tuple(reversed(formulas)), 1.0), 4)
        assert spaces_equal(a.space, b.space)

    def test_multi_equality_offset(self):
        prop = PropertySpec((sf(0, 3), sf(1, 4)), 1.0)
        sol = build_solution_space(prop, 3)
        assert sol.space.offset == (F(3), F(4), F(0))
        assert sol.space.dim == 1

    @pytest.mark.parametrize("name", ["sspd", "myp", "efc", "smr"])
    def test_formula_geometry_agreement(self, name, request):
        model, prop = request.getfixturevalue(name)
        sol = build_solution_space(prop, model.m)
        rng = random.Random(hash(name) & 0xFFFF)
        agree = 0
        for _ in range(1000):
            s = list(rng.randint(0, 90) for _ in range(model.m))
            if rng.random() < 0.4:  # force some satisfying samples
                for f in prop.substates:
                    s[f.target] = f.beta
            s = tuple(s)
            in_space = residual(sol.space, s)[1] == 0
            assert satisfies(prop, s) == in_space
            agree += in_space
        assert agree > 0


class TestSingleSolution:
    def test_point_solution_in_full_space(self):
        prop = PropertySpec((sf(0, 1), sf(1, 2)), 1.0)
        sol = build_solution_space(prop, 2)
        assert is_single_solution(sol, full_space(2))

    def test_myp_not_single(self, myp):
        model, prop = myp
        sol = build_solution_space(prop, model.m)
        assert not is_single_solution(sol, blanketing_space(model))
        assert not is_single_solution(sol, full_space(model.m))

    def test_sspd_single_in_blanket(self, sspd):
        # the target line meets the (1-dimensional) reachable blanket in a point
        model, prop = sspd
        sol = build_solution_space(prop, model.m)
        assert is_single_solution(sol, blanketing_space(model))
        assert not is_single_solution(sol, full_space(model.m))

    def test_disjoint_is_false(self):
        sol = build_solution_space(PropertySpec((sf(1, 50),), 1.0), 2)
        other = AffineSpace([[1, 0]], [0, 49])
        assert not is_single_solution(sol, other)
