import random

import pytest

from pexpfan import catalog
from pexpfan.errors import (
    DependentBasis,
    NotComplete,
    NotInSpan,
    NotIntegral,
    NotSmooth,
    SingularGram,
)
from pexpfan.fan import Cone, resolve
from pexpfan.ktheory import (
    chi,
    decompose,
    dual_basis_solve,
    euler_characteristic,
    gram_matrix,
    kronecker_pair,
    localization_data,
    orbit_closure_class,
    poly_det,
    random_cartier_combination,
    tangent_weights,
)
from pexpfan.laurent import LaurentPoly
from pexpfan.pexp import CartierData, PiecewiseExponential, from_cartier, gkm_validate

from oracles import cartier_polytope_points

E = LaurentPoly.exponential


def poly(rank, d):
    return LaurentPoly.from_dict(rank, d)


class TestTangentWeights:
    def test_standard_cone(self):
        cone = Cone.from_generators(2, [(1, 0), (0, 1)])
        assert set(tangent_weights(cone)) == {(1, 0), (0, 1)}

    def test_weights_are_dual_to_the_generators(self):
        cone = Cone.from_generators(2, [(1, 0), (0, 1)])
        weights = tangent_weights(cone)
        for i, w in enumerate(weights):
            for j, v in enumerate(cone.generators):
                assert sum(a * b for a, b in zip(w, v)) == (1 if i == j else 0)

    def test_singular_chart_neighbor(self):
        cone = Cone.from_generators(2, [(0, 1), (-1, -2)])
        assert set(tangent_weights(cone)) == {(-2, 1), (-1, 0)}

    def test_singular_cone_rejected(self):
        cone = Cone.from_generators(2, [(1, 0), (-1, -2)])
        with pytest.raises(NotSmooth):
            tangent_weights(cone)

    def test_sign_flip(self):
        cone = Cone.from_generators(2, [(1, 0), (0, 1)])
        assert set(tangent_weights(cone, epsilon=-1)) == {(-1, 0), (0, -1)}


class TestSignConvention:
    """The experiment that froze the global sign: only epsilon = +1 makes the
    degree-one class on the line localize to the polytope's lattice points."""

    def test_epsilon_plus_one_matches_lattice_points(self, p1):
        cls = catalog.p1_degree_class(p1, 1)
        value = chi(p1, cls, epsilon=1)
        assert value == LaurentPoly.one(1) + E((1,))
        pts = cartier_polytope_points(p1, ((0,), (1,)))
        assert sorted(pts) == [(0,), (1,)]
        assert value == sum(
            (E(tuple(p)) for p in pts), LaurentPoly.zero(1)
        )

    def test_epsilon_minus_one_fails_the_oracle(self, p1):
        cls = catalog.p1_degree_class(p1, 1)
        assert chi(p1, cls, epsilon=-1) == LaurentPoly.zero(1)

    def test_both_choices_normalize_the_unit(self, p1):
        one = PiecewiseExponential.constant(p1, 1)
        assert chi(p1, one, epsilon=1) == LaurentPoly.one(1)
        assert chi(p1, one, epsilon=-1) == LaurentPoly.one(1)


class TestOrbitClosureClass:
    def test_origin_gives_unit_numerators(self, p2):
        data = orbit_closure_class(p2, ())
        assert all(n == LaurentPoly.one(2) for n in data.numerators)

    def test_full_cone_gives_point_class(self, p2):
        data = orbit_closure_class(p2, (0, 1))
        koszul = (LaurentPoly.one(2) - E(data.weights[0][0])) * (
            LaurentPoly.one(2) - E(data.weights[0][1])
        )
        assert data.numerators[0] == koszul
        assert all(n.is_zero() for n in data.numerators[1:])

    def test_ray_on_resolved_weighted_plane(self, p112):
        fine = resolve(p112).fine
        tau = fine.rayset_from_vectors([(-1, -2)])
        data = orbit_closure_class(fine, tau)
        nonzero = [i for i, n in enumerate(data.numerators) if not n.is_zero()]
        assert len(nonzero) == 2
        for i in nonzero:
            assert tau[0] in fine.maximal_cones[i]
            assert len(data.numerators[i].terms) == 2  # a single Koszul factor


class TestEulerCharacteristic:
    def test_line_unit(self, p1):
        data = localization_data(p1, [LaurentPoly.one(1)] * 2)
        assert euler_characteristic(p1, data) == LaurentPoly.one(1)

    def test_line_degree_one(self, p1):
        data = localization_data(p1, [LaurentPoly.one(1), E((1,))])
        assert euler_characteristic(p1, data) == LaurentPoly.one(1) + E((1,))

    def test_plane_unit(self, p2):
        data = localization_data(p2, [LaurentPoly.one(2)] * 3)
        assert euler_characteristic(p2, data) == LaurentPoly.one(2)

    def test_projective_space_rank3(self):
        fan = catalog.projective_space(3)
        assert fan.is_complete() and fan.is_smooth()
        data = localization_data(fan, [LaurentPoly.one(3)] * 4)
        assert euler_characteristic(fan, data) == LaurentPoly.one(3)

    def test_incomplete_fan_rejected(self):
        fan = catalog.singular_quadric_cone_fan()
        with pytest.raises((NotComplete, NotSmooth)):
            euler_characteristic(
                fan, localization_data(fan, [LaurentPoly.one(2)])
            )

    def test_inconsistent_data_is_not_polynomial(self, p1):
        from pexpfan.errors import NotPolynomial

        # a lone nonzero residue at one fixed point cannot cancel its pole
        data = localization_data(p1, [LaurentPoly.one(1), LaurentPoly.zero(1)])
        with pytest.raises(NotPolynomial):
            euler_characteristic(p1, data)


class TestChi:
    def test_unit_on_corpus(self, complete_corpus):
        for name, fan in complete_corpus.items():
            one = PiecewiseExponential.constant(fan, 1)
            assert chi(fan, one) == LaurentPoly.one(fan.rank), name

    def test_degree_class_on_line(self, p1):
        assert chi(p1, catalog.p1_degree_class(p1, 1)) == LaurentPoly.one(1) + E((1,))

    def test_demo_class_regression(self, p112):
        xi = catalog.p112_demo_class(p112)
        assert chi(p112, xi) == LaurentPoly.zero(2)

    def test_resolution_independence_on_demo(self, p112):
        xi = catalog.p112_demo_class(p112)
        r1 = resolve(p112)
        r2 = resolve(p112, rng=random.Random(41), extra_rounds=2)
        assert r1.fine != r2.fine
        assert chi(p112, xi, resolution=r1) == chi(p112, xi, resolution=r2)

    def test_not_complete(self):
        fan = catalog.singular_quadric_cone_fan()
        with pytest.raises(NotComplete):
            chi(fan, PiecewiseExponential.constant(fan, 1))


class TestKroneckerPair:
    def test_unit_at_origin(self, complete_corpus):
        for name, fan in complete_corpus.items():
            one = PiecewiseExponential.constant(fan, 1)
            assert kronecker_pair(fan, one, ()) == LaurentPoly.one(fan.rank), name

    def test_unit_pairs_augment_to_one(self, p112):
        one = PiecewiseExponential.constant(p112, 1)
        res = resolve(p112)
        for face in p112.faces:
            assert kronecker_pair(p112, one, face, resolution=res).augment() == 1

    def test_hand_derived_gram_entries(self, p112):
        """Frozen oracle values computed by hand from the localization sum on
        the four-cone resolution (see the decisions notes)."""
        unit, divisor, point = catalog.p112_spanning_classes(p112)
        tau_d = p112.rayset_from_vectors([(-1, -2)])
        sigma_p = p112.rayset_from_vectors([(1, 0), (-1, -2)])
        res = resolve(p112)
        pair = lambda f, t: kronecker_pair(p112, f, t, resolution=res)
        one = LaurentPoly.one(2)
        assert pair(unit, ()) == one
        assert pair(unit, tau_d) == one
        assert pair(unit, sigma_p) == one
        assert pair(divisor, ()) == poly(2, {(1, 0): -1, (2, 0): -1, (0, 1): -1})
        assert pair(divisor, tau_d) == poly(2, {(0, 0): 1, (2, 0): -1, (0, 1): -1})
        assert pair(divisor, sigma_p) == one - E((0, 1))
        assert pair(point, ()) == poly(2, {(-1, 1): 1, (-2, 2): 1})
        assert pair(point, tau_d) == poly(2, {(-2, 1): -1, (-2, 2): 1})
        assert pair(point, sigma_p) == (one - E((0, 1))) * (one - E((-2, 1)))

    def test_point_pairing_is_the_value_at_the_cone(self, p112):
        # <f, [O_point]> equals the class's value on the corresponding cone
        rng = random.Random(13)
        sigma_p = p112.rayset_from_vectors([(1, 0), (-1, -2)])
        res = resolve(p112)
        classes = [catalog.p112_demo_class(p112), *catalog.p112_spanning_classes(p112)]
        for _ in range(8):
            f = classes[rng.randrange(len(classes))]
            idx = p112.maximal_cones.index(sigma_p)
            assert kronecker_pair(p112, f, sigma_p, resolution=res) == f.values[idx]

    def test_bilinearity_and_additivity(self, p112):
        xi = catalog.p112_demo_class(p112)
        unit, divisor, point = catalog.p112_spanning_classes(p112)
        res = resolve(p112)
        tau = p112.rayset_from_vectors([(-1, -2)])
        g = E((1, -2))
        lhs = kronecker_pair(p112, xi.module_action(g), tau, resolution=res)
        assert lhs == g * kronecker_pair(p112, xi, tau, resolution=res)
        both = kronecker_pair(p112, xi + divisor, tau, resolution=res)
        assert both == kronecker_pair(p112, xi, tau, resolution=res) + kronecker_pair(
            p112, divisor, tau, resolution=res
        )

    def test_strict_transform_choice_does_not_matter(self, p112):
        # the singular maximal cone contains two full-dimensional fine cones;
        # pairing against either point class gives the same answer
        res = resolve(p112)
        fine = res.fine
        sigma_p = p112.maximal_cones[1]
        coarse_cone = p112.cone_objects[1]
        candidates = [
            c for c in fine.maximal_cones
            if all(coarse_cone.contains(fine.rays[i]) for i in c)
        ]
        assert len(candidates) == 2
        xi = catalog.p112_demo_class(p112)
        lifted_values = {}
        from pexpfan.pexp import pullback

        lifted = pullback(xi, res)
        results = []
        for cand in candidates:
            orbit = orbit_closure_class(fine, cand)
            results.append(
                euler_characteristic(fine, orbit.scaled(lifted.values))
            )
        assert results[0] == results[1]
        assert results[0] == kronecker_pair(p112, xi, sigma_p, resolution=res)

    def test_chi_decomposes_against_column(self, p112):
        # chi is the pairing against the origin; expanding in the spanning
        # classes must reproduce it R(T)-bilinearly
        xi = catalog.p112_demo_class(p112)
        spans = catalog.p112_spanning_classes(p112)
        coeffs = decompose(xi, spans)
        res = resolve(p112)
        acc = LaurentPoly.zero(2)
        for c, g in zip(coeffs, spans):
            acc = acc + c * kronecker_pair(p112, g, (), resolution=res)
        assert acc == chi(p112, xi, resolution=res)


class TestGramMatrix:
    def test_unit_against_origin(self, p1):
        m = gram_matrix(p1, [PiecewiseExponential.constant(p1, 1)], [()])
        assert m.entries == ((LaurentPoly.one(1),),)

    def test_empty(self, p1):
        m = gram_matrix(p1, [], [])
        assert m.entries == ()

    def test_p112_determinant(self, p112):
        spans = catalog.p112_spanning_classes(p112)
        cones = catalog.p112_duality_cones(p112)
        m = gram_matrix(p112, spans, cones)
        det = poly_det([list(r) for r in m.entries], 2)
        assert det == LaurentPoly.one(2) + E((1, 0))
        assert not det.is_unit()
        assert det.augment() == 2


class TestDecompose:
    def test_worked_decomposition(self, p112):
        xi = catalog.p112_demo_class(p112)
        spans = catalog.p112_spanning_classes(p112)
        coeffs = decompose(xi, spans)
        assert coeffs == (
            poly(2, {(1, 0): 1, (0, 1): 1}),
            poly(2, {(-2, 1): 1, (-1, 0): 1}),
            poly(2, {(0, 0): 1, (1, -1): 1}),
        )

    def test_basis_element(self, p112):
        spans = catalog.p112_spanning_classes(p112)
        coeffs = decompose(spans[0], spans)
        assert coeffs == (LaurentPoly.one(2), LaurentPoly.zero(2), LaurentPoly.zero(2))

    def test_unit_coefficient_is_integral(self, p1):
        one = PiecewiseExponential.constant(p1, 1)
        basis = [one.module_action(E((1,)))]
        assert decompose(one, basis) == (E((-1,)),)

    def test_constant_two_is_not_integral(self, p1):
        one = PiecewiseExponential.constant(p1, 1)
        with pytest.raises(NotIntegral):
            decompose(one, [PiecewiseExponential.constant(p1, 2)])

    def test_dependent_basis(self, p1):
        one = PiecewiseExponential.constant(p1, 1)
        with pytest.raises(DependentBasis):
            decompose(one, [one, one])

    def test_not_in_span(self, p1):
        cls = catalog.p1_degree_class(p1, 1)
        with pytest.raises(NotInSpan):
            decompose(cls, [PiecewiseExponential.constant(p1, 1)])

    def test_reexpansion_roundtrip(self, p112):
        rng = random.Random(17)
        spans = catalog.p112_spanning_classes(p112)
        for _ in range(10):
            coeffs = [
                poly(2, {tuple(rng.randint(-2, 2) for _ in range(2)): rng.randint(-3, 3)
                         for _ in range(rng.randint(0, 2))})
                for _ in spans
            ]
            f = PiecewiseExponential.constant(p112, 0)
            for c, g in zip(coeffs, spans):
                f = f + g.module_action(c)
            recovered = decompose(f, spans)
            rebuilt = PiecewiseExponential.constant(p112, 0)
            for c, g in zip(recovered, spans):
                rebuilt = rebuilt + g.module_action(c)
            assert rebuilt == f


class TestDualBasisSolve:
    def test_unit_against_origin(self, p1):
        out = dual_basis_solve(p1, [()], [PiecewiseExponential.constant(p1, 1)])
        assert out == (PiecewiseExponential.constant(p1, 1),)

    def test_line_pair(self, p1):
        spanning = [PiecewiseExponential.constant(p1, 1), catalog.p1_degree_class(p1, 1)]
        duals = dual_basis_solve(p1, [(), (0,)], spanning)
        # hand-solved: dual of the fundamental class and of the fixed point
        assert duals[0].values == (LaurentPoly.zero(1), LaurentPoly.one(1) - E((-1,)))
        assert duals[1].values == (LaurentPoly.one(1), E((-1,)))

    def test_p112_duals_have_identity_gram(self, p112):
        spans = catalog.p112_spanning_classes(p112)
        cones = catalog.p112_duality_cones(p112)
        duals = dual_basis_solve(p112, cones, spans)
        m = gram_matrix(p112, duals, cones)
        one, zero = LaurentPoly.one(2), LaurentPoly.zero(2)
        assert m.entries == (
            (one, zero, zero),
            (zero, one, zero),
            (zero, zero, one),
        )
        for g in duals:
            assert gkm_validate(p112, g.values).ok

    def test_singular_gram(self, p1):
        one = PiecewiseExponential.constant(p1, 1)
        with pytest.raises(SingularGram):
            dual_basis_solve(p1, [(), (0,)], [one, one])


class TestRandomCombinations:
    def test_generator_produces_valid_classes(self, p112):
        rng = random.Random(5)
        cartiers = [
            from_cartier(p112, CartierData(((0, 0), (0, b), (2 * b, 0))))
            for b in (1, 2)
        ]
        for _ in range(10):
            f = random_cartier_combination(p112, cartiers, rng)
            assert gkm_validate(p112, f.values).ok


class TestLatticePointOracleOnSmoothSurfaces:
    """Ample line bundle classes localize to the polytope's lattice points."""

    def test_product_of_lines(self):
        fan = catalog.p1_times_p1()
        # the a x b rectangle, vertices assigned by the minimizing rule
        a, b = 2, 3
        data = CartierData(((0, 0), (a, 0), (a, b), (0, b)))
        value = chi(fan, from_cartier(fan, data))
        pts = cartier_polytope_points(fan, data.exponents)
        assert len(pts) == (a + 1) * (b + 1)
        assert value == sum((E(p) for p in pts), LaurentPoly.zero(2))

    def test_hirzebruch_trapezoid(self):
        fan = catalog.hirzebruch(2)
        d, c = 2, 1
        data = CartierData(((0, 0), (d, 0), (d + 2 * c, c), (0, c)))
        value = chi(fan, from_cartier(fan, data))
        pts = cartier_polytope_points(fan, data.exponents)
        assert len(pts) == (c + 1) * (d + c + 1)
        assert value == sum((E(p) for p in pts), LaurentPoly.zero(2))


class TestCartierSerialization:
    def test_round_trip(self):
        data = CartierData(((0, 0), (1, 2), (-3, 0)))
        assert CartierData.from_json(data.to_json()) == data
        assert data.to_json() == {"m": [[0, 0], [1, 2], [-3, 0]]}
