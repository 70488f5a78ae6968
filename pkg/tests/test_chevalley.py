"""Tests for structure constants, commutators and the adjoint representation."""

import numpy as np
import pytest

from src.chevalley import (
    CocharacterWeighting,
    CommutatorError,
    Monomial,
    Twist,
    ad_closure_dim,
    adjoint_matrix,
    adjoint_torus_matrix,
    basis_vector,
    bracket_vectors,
    build_structure_constants,
    cartan_vector,
    check_jacobi,
    commutator_expansion,
    folded_factor,
    principal_factor,
    roots_commute,
    structure_constants_for,
    torus_weight,
    weight_tuple,
)
from src.chevalley import _string_below
from src.fields import make_field
from src.rootsys import Root, RootSystemError, build_root_system, is_root


def _product(matrices, GF, n):
    out = GF.Identity(n)
    for m in matrices:
        out = out @ m
    return out


class TestStructureConstants:
    def test_a2_magnitude(self):
        sc = structure_constants_for("A", 2)
        a1, a2 = sc.sys.simple_roots
        assert abs(sc.n(a1, a2)) == 1

    def test_c3_chain_of_length_two(self):
        sc = structure_constants_for("C", 3)
        assert abs(sc.n(Root.parse("010"), Root.parse("011"))) == 2

    def test_n_gamma_gamma_is_zero(self):
        sc = structure_constants_for("F", 4)
        assert all(sc.n(r, r) == 0 for r in sc.sys.roots)

    @pytest.mark.parametrize("key", [("A", 3), ("B", 3), ("C", 4), ("D", 4), ("F", 4), ("G", 2), ("E", 6)])
    def test_antisymmetry_and_magnitude(self, key):
        sc = structure_constants_for(*key)
        sys = sc.sys
        for a in sys.roots:
            for b in sys.roots:
                if is_root(sys, a + b):
                    assert sc.n(a, b) == -sc.n(b, a)
                    assert abs(sc.n(a, b)) == _string_below(sys, a, b) + 1
                    assert abs(sc.n(a, b)) in (1, 2, 3)
                else:
                    assert sc.n(a, b) == 0

    @pytest.mark.parametrize("key", [("A", 3), ("B", 3), ("C", 3), ("G", 2), ("D", 4)])
    def test_jacobi_exhaustive(self, key):
        assert check_jacobi(structure_constants_for(*key))

    @pytest.mark.slow
    def test_jacobi_f4(self):
        assert check_jacobi(structure_constants_for("F", 4))

    @pytest.mark.parametrize("key", [("E", 6), ("E", 8), ("B", 6)])
    def test_jacobi_sampled(self, key):
        assert check_jacobi(structure_constants_for(*key), samples=2000, seed=7)

    def test_memoized(self):
        sys = build_root_system("B", 4)
        assert build_structure_constants(sys) is build_structure_constants(sys)


class TestCommutation:
    def test_f4_commuting_pair(self):
        sc = structure_constants_for("F", 4)
        assert roots_commute(sc, Root.parse("1221"), Root.parse("1342"))

    def test_a2_simple_roots_do_not_commute(self):
        sc = structure_constants_for("A", 2)
        assert not roots_commute(sc, *sc.sys.simple_roots)

    def test_orthogonal_long_pair(self):
        sc = structure_constants_for("D", 4)
        assert roots_commute(sc, sc.sys.simple_root(1), sc.sys.simple_root(3))

    def test_opposite_roots_rejected(self):
        sc = structure_constants_for("A", 2)
        a1 = sc.sys.simple_root(1)
        with pytest.raises(CommutatorError):
            roots_commute(sc, a1, -a1)
        with pytest.raises(CommutatorError):
            commutator_expansion(sc, a1, Monomial(), a1, Monomial())

    def test_commuting_pair_gives_empty_product(self):
        sc = structure_constants_for("C", 3)
        assert commutator_expansion(sc, Root.parse("100"), Monomial(), Root.parse("001"), Monomial()) == []

    def test_a2_single_term(self):
        sc = structure_constants_for("A", 2)
        a1, a2 = sc.sys.simple_roots
        terms = commutator_expansion(sc, a1, Monomial(), a2, Monomial())
        assert len(terms) == 1
        assert terms[0].root == Root.parse("11")
        assert abs(terms[0].coefficient) == 1
        assert (terms[0].t_power, terms[0].u_power) == (1, 1)

    def test_b2_long_short_pair(self):
        sc = structure_constants_for("B", 2)
        long_root, short_root = sc.sys.simple_roots
        terms = commutator_expansion(sc, long_root, Monomial(), short_root, Monomial())
        assert [t.root for t in terms] == [Root.parse("11"), Root.parse("12")]
        assert [abs(t.coefficient) for t in terms] == [1, 1]
        assert [(t.t_power, t.u_power) for t in terms] == [(1, 1), (1, 2)]

    def test_monomial_exponents_scale(self):
        sc = structure_constants_for("A", 2)
        a1, a2 = sc.sys.simple_roots
        (term,) = commutator_expansion(sc, a1, Monomial(2, 3), a2, Monomial(1, 5))
        assert (term.t_power, term.u_power) == (3, 5)
        assert abs(term.coefficient) == 2

    @pytest.mark.parametrize(
        "key,gamma,delta",
        [
            (("A", 2), "10", "01"),
            (("B", 2), "10", "01"),
            (("B", 2), "01", "10"),
            (("C", 3), "010", "001"),
            (("C", 3), "011", "-001"),
        ],
    )
    def test_expansion_matches_adjoint_matrices(self, key, gamma, delta):
        sc = structure_constants_for(*key)
        GF = make_field(7)
        g, d = Root.parse(gamma), Root.parse(delta)
        n = sc.dim
        for t_val, u_val in ((1, 1), (2, 3), (5, 4)):
            t, u = GF(t_val), GF(u_val)
            lhs = _product(
                [
                    adjoint_matrix(sc, d, -u),
                    adjoint_matrix(sc, g, -t),
                    adjoint_matrix(sc, d, u),
                    adjoint_matrix(sc, g, t),
                ],
                GF,
                n,
            )
            factors = []
            for term in commutator_expansion(sc, g, Monomial(), d, Monomial()):
                value = GF(term.coefficient % 7) * t**term.t_power * u**term.u_power
                factors.append(adjoint_matrix(sc, term.root, value))
            assert np.array_equal(lhs, _product(factors, GF, n))


class TestWeights:
    F4_BETAS = ("0100", "0120", "1110", "1232")

    def _f4_weighting(self):
        sys = build_root_system("F", 4)
        roots = [Root.parse(x) for x in self.F4_BETAS]
        return sys, CocharacterWeighting.from_roots(sys, roots, 2, [2, 5, 0, 3])

    def test_f4_weight_tuples(self):
        _, cw = self._f4_weighting()
        assert weight_tuple(cw, Root.parse("0110")) == (1, 1, 0, 0)
        assert weight_tuple(cw, Root.parse("1231")) == (0, 1, 1, 1)

    def test_f4_torus_weight(self):
        _, cw = self._f4_weighting()
        assert cw.q == (4, 32, 1, 8)
        assert torus_weight(cw, Root.parse("0110")) == 36

    def test_orthogonal_root_has_zero_weight(self):
        sys = build_root_system("A", 3)
        cw = CocharacterWeighting.from_roots(sys, [sys.simple_root(1)], 3, [0])
        assert weight_tuple(cw, sys.simple_root(3)) == (0,)
        assert torus_weight(cw, sys.simple_root(3)) == 0

    def test_linearity(self):
        sys, cw = self._f4_weighting()
        for a in sys.roots:
            for b in sys.roots:
                if is_root(sys, a + b):
                    wa, wb = weight_tuple(cw, a), weight_tuple(cw, b)
                    assert weight_tuple(cw, a + b) == tuple(x + y for x, y in zip(wa, wb))

    def test_factor_roots_pair_to_two(self):
        sys, cw = self._f4_weighting()
        for k, beta in enumerate(cw.factor_roots):
            assert weight_tuple(cw, beta)[k] == 2

    def test_principal_a2(self):
        sys = build_root_system("A", 2)
        factor = principal_factor(sys, sys.simple_roots)
        assert factor.grading == (2, 2)
        assert factor.weight(sys.highest_root) == 4

    def test_folded_requires_orthogonal_roots(self):
        sys = build_root_system("A", 3)
        with pytest.raises(RootSystemError):
            folded_factor(sys, [sys.simple_root(1), sys.simple_root(2)])
        factor = folded_factor(sys, [sys.simple_root(1), sys.simple_root(3)])
        assert factor.grading == (2, -2, 2)

    def test_twist_value(self):
        assert Twist(3, 4).value == 81


class TestAdjoint:
    def test_zero_parameter_is_identity(self):
        sc = structure_constants_for("B", 3)
        GF = make_field(3)
        m = adjoint_matrix(sc, Root.parse("011"), GF(0))
        assert np.array_equal(m, GF.Identity(sc.dim))

    def test_unipotent_order_p(self):
        sc = structure_constants_for("A", 2)
        GF = make_field(5)
        x = adjoint_matrix(sc, sc.sys.simple_root(1), GF(1))
        assert x.shape == (8, 8)
        assert np.array_equal(_product([x] * 5, GF, 8), GF.Identity(8))
        assert not np.array_equal(x, GF.Identity(8))

    @pytest.mark.parametrize("p", [2, 3])
    def test_one_parameter_law(self, p):
        sc = structure_constants_for("G", 2)
        GF = make_field(p, 2)
        gamma = Root.parse("10")
        for t in GF.elements[:4]:
            for u in GF.elements[-3:]:
                lhs = adjoint_matrix(sc, gamma, t) @ adjoint_matrix(sc, gamma, u)
                assert np.array_equal(lhs, adjoint_matrix(sc, gamma, t + u))

    def test_preserves_bracket(self):
        sc = structure_constants_for("A", 2)
        GF = make_field(5)
        x = adjoint_matrix(sc, Root.parse("11"), GF(3))
        basis = GF.Identity(sc.dim)
        for i in range(sc.dim):
            for j in range(sc.dim):
                lhs = x @ bracket_vectors(sc, basis[i], basis[j])
                rhs = bracket_vectors(sc, x @ basis[i], x @ basis[j])
                assert np.array_equal(lhs, rhs)

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_commuting_roots_give_commuting_matrices(self, p):
        sc = structure_constants_for("C", 3)
        GF = make_field(p)
        pairs = [
            (a, b)
            for a in sc.sys.positive_roots
            for b in sc.sys.positive_roots
            if a != b and roots_commute(sc, a, b)
        ]
        for a, b in pairs[:12]:
            x = adjoint_matrix(sc, a, GF(1))
            y = adjoint_matrix(sc, b, GF(p - 1))
            assert np.array_equal(x @ y, y @ x)

    def test_torus_conjugation(self):
        sc = structure_constants_for("A", 3)
        sys = sc.sys
        GF = make_field(7)
        cw = CocharacterWeighting.from_roots(sys, [sys.simple_root(2)], 7, [0])
        c = GF(3)
        h = adjoint_torus_matrix(sc, lambda r: torus_weight(cw, r), c)
        gamma = Root.parse("110")
        t = GF(2)
        conjugated = h @ adjoint_matrix(sc, gamma, t) @ np.linalg.inv(h)
        # ⟨110, α2∨⟩ = 1
        assert np.array_equal(conjugated, adjoint_matrix(sc, gamma, c * t))


class TestClosure:
    def test_empty_seeds(self):
        sc = structure_constants_for("A", 2)
        GF = make_field(3)
        assert ad_closure_dim(sc, [], [], GF) == 0

    def test_span_only(self):
        sc = structure_constants_for("C", 3)
        GF = make_field(3)
        seeds = [basis_vector(sc, a, GF) for a in sc.sys.simple_roots]
        seeds += [basis_vector(sc, -a, GF) for a in sc.sys.simple_roots]
        assert ad_closure_dim(sc, seeds, [], GF) == 6

    def test_adjoint_module_generated(self):
        sc = structure_constants_for("A", 2)
        GF = make_field(5)
        operators = []
        for a in sc.sys.simple_roots:
            operators.append(adjoint_matrix(sc, a, GF(1)))
            operators.append(adjoint_matrix(sc, -a, GF(1)))
        seed = basis_vector(sc, -sc.sys.highest_root, GF)
        assert ad_closure_dim(sc, [seed], operators, GF) == 8

    def test_cartan_vector_is_fixed_by_torus(self):
        sc = structure_constants_for("A", 2)
        GF = make_field(5)
        h = adjoint_torus_matrix(sc, lambda r: r.height, GF(2))
        v = cartan_vector(sc, 1, GF)
        assert np.array_equal(h @ v, v)

    def test_shape_mismatch_rejected(self):
        sc = structure_constants_for("A", 2)
        GF = make_field(3)
        with pytest.raises(ValueError):
            ad_closure_dim(sc, [GF.Zeros(5)], [], GF)
