"""Tests for the classical matrix models and the matrix-level evidence routines."""

import numpy as np
import pytest

from src.chevalley import CocharacterWeighting, TorusFactor, Twist, folded_factor, principal_factor
from src.fields import FieldTooLarge, make_field
from src.repmat import (
    OneParameterFamily,
    RepresentationError,
    UnipotentFactor,
    block_links,
    burnside_span_dim,
    classical_model,
    classical_root_element,
    combined_grading,
    components,
    exp_terms,
    field_degree_for,
    field_for,
    folded_orthogonal_forms,
    invariant_form_dim,
    is_identity,
    jordan_type,
    maximal_vector_coefficients,
    normalizes,
    preserves_form,
    preserves_quadratic_form,
    principal_a1,
    strongly_connected,
    torus_matrix,
    twisted_diagonal_a1,
)
from src.rootsys import Root


def _c3_torus(p: int, exponents=(0, 1, 2)) -> CocharacterWeighting:
    model = classical_model("C", 3)
    roots = [model.root_from_eps(v) for v in [(2, 0, 0), (0, 2, 0), (0, 0, 2)]]
    return CocharacterWeighting.from_roots(model.sys, roots, p, exponents)


class TestClassicalModel:
    def test_dimensions(self):
        assert classical_model("A", 3).dim == 4
        assert classical_model("B", 3).dim == 7
        assert classical_model("C", 3).dim == 6
        assert classical_model("D", 4).dim == 8

    def test_exceptional_rejected(self):
        with pytest.raises(RepresentationError):
            classical_model("E", 6)

    def test_eps_round_trip_of_highest_root(self):
        model = classical_model("C", 3)
        assert model.eps(model.sys.highest_root) == (2, 0, 0)
        assert model.root_from_eps((2, 0, 0)) == model.sys.highest_root

    def test_d_last_simple_root(self):
        model = classical_model("D", 4)
        assert model.eps(Root((0, 0, 0, 1))) == (0, 0, 1, 1)

    def test_non_root_eps(self):
        with pytest.raises(RepresentationError):
            classical_model("D", 4).root_from_eps((2, 0, 0, 0))

    @pytest.mark.parametrize("type_label,rank", [("A", 3), ("B", 3), ("C", 3), ("D", 4)])
    def test_positive_roots_upper_triangular(self, type_label, rank):
        model = classical_model(type_label, rank)
        for r in model.sys.positive_roots:
            for X in model.root_matrices(r):
                assert not np.any(np.tril(X))

    @pytest.mark.parametrize("type_label,rank,p", [("B", 3, 3), ("C", 3, 2), ("C", 3, 5), ("D", 4, 3), ("D", 4, 2)])
    def test_root_elements_preserve_form(self, type_label, rank, p):
        model = classical_model(type_label, rank)
        GF = make_field(p)
        for r in model.sys.roots:
            assert preserves_form(model.form, model.root_element(r, 1, GF))

    @pytest.mark.parametrize("type_label,rank", [("B", 3), ("D", 4)])
    def test_root_elements_preserve_quadratic_form_in_char_2(self, type_label, rank):
        model = classical_model(type_label, rank)
        GF = make_field(2, 2)
        t = GF.primitive_element
        for r in model.sys.roots:
            assert preserves_quadratic_form(model.quadratic_form, model.root_element(r, t, GF))

    def test_root_elements_are_homomorphisms(self):
        model = classical_model("B", 3)
        GF = make_field(5)
        short = model.root_from_eps((1, 0, 0))
        product = model.root_element(short, 2, GF) @ model.root_element(short, 4, GF)
        assert np.array_equal(product, model.root_element(short, 1, GF))

    def test_classical_root_element_is_unipotent(self):
        model = classical_model("C", 3)
        GF = make_field(3)
        gamma = model.root_from_eps((2, 0, 0))
        x = classical_root_element(model, gamma, 1, GF)
        assert is_identity(x @ x @ x)
        assert np.array_equal(x, model.root_element(gamma, 1, GF))


class TestJordanType:
    def test_sp6_long_and_short(self):
        model = classical_model("C", 3)
        GF = make_field(3)
        long_root = model.root_from_eps((2, 0, 0))
        short_root = model.root_from_eps((1, -1, 0))
        assert jordan_type(model.root_element(long_root, 1, GF)) == (2, 1, 1, 1, 1)
        assert jordan_type(model.root_element(short_root, 1, GF)) == (2, 2, 1, 1)

    def test_so7_long_root(self):
        model = classical_model("B", 3)
        GF = make_field(3)
        assert jordan_type(model.root_element(model.root_from_eps((1, 1, 0)), 1, GF)) == (2, 2, 1, 1, 1)

    def test_so7_short_root_odd_characteristic(self):
        model = classical_model("B", 3)
        GF = make_field(3)
        assert jordan_type(model.root_element(model.root_from_eps((1, 0, 0)), 1, GF)) == (3, 1, 1, 1, 1)

    def test_identity(self):
        assert jordan_type(make_field(5).Identity(3)) == (1, 1, 1)

    def test_not_unipotent(self):
        GF = make_field(3)
        with pytest.raises(RepresentationError):
            jordan_type(GF([[2, 0], [0, 1]]))


class TestTwistedDiagonal:
    def test_sp6_weights(self):
        model = classical_model("C", 3)
        cw = _c3_torus(2)
        assert model.basis_weights(combined_grading(cw)) == (1, 2, 4, -4, -2, -1)

    def test_sp6_char_2_involution(self):
        model = classical_model("C", 3)
        cw = _c3_torus(2)
        GF = field_for(2, (1, 2, 4, -4, -2, -1), 3)
        rep = twisted_diagonal_a1(model, cw, GF)
        x = rep.generators["J+(1)"]
        assert is_identity(x @ x)
        assert jordan_type(x) == (2, 2, 2)
        assert rep.torus_weights == (1, 2, 4, -4, -2, -1)

    def test_torus_normalizes_raising_family(self):
        model = classical_model("C", 3)
        GF = field_for(2, (1, 2, 4, -4, -2, -1), 3)
        rep = twisted_diagonal_a1(model, _c3_torus(2), GF)
        result = normalizes([rep.generators["J-torus"]], rep.families["J+"], [GF(1), GF.primitive_element])
        assert result.holds
        assert len(result.trace) == 2

    def test_generators_preserve_symplectic_form(self):
        model = classical_model("C", 3)
        GF = field_for(3, (1, 3, 9, -9, -3, -1), 3)
        rep = twisted_diagonal_a1(model, _c3_torus(3), GF)
        for g in rep.generators.values():
            assert preserves_form(model.form, g)

    def test_characteristic_mismatch(self):
        model = classical_model("C", 3)
        with pytest.raises(RepresentationError):
            twisted_diagonal_a1(model, _c3_torus(3), make_field(5))

    def test_b_short_root_factor_char_2_rejected(self):
        model = classical_model("B", 3)
        short = model.root_from_eps((0, 0, 1))
        cw = CocharacterWeighting.from_roots(model.sys, [short], 2, [0])
        with pytest.raises(RepresentationError):
            twisted_diagonal_a1(model, cw, make_field(2, 3))

    def test_principal_block_char_2_rejected(self):
        model = classical_model("A", 4)
        factor = principal_factor(model.sys, [Root((0, 0, 1, 0)), Root((0, 0, 0, 1))])
        cw = CocharacterWeighting((factor,), (Twist(2, 0),))
        with pytest.raises(RepresentationError):
            twisted_diagonal_a1(model, cw, make_field(2, 4))

    def test_folded_factor(self):
        model = classical_model("D", 4)
        roots = [model.root_from_eps((1, -1, 0, 0)), model.root_from_eps((1, 1, 0, 0))]
        cw = CocharacterWeighting((folded_factor(model.sys, roots),), (Twist(3, 0),))
        GF = make_field(3, 2)
        rep = twisted_diagonal_a1(model, cw, GF)
        assert rep.torus_weights == (2, 0, 0, 0, 0, 0, 0, -2)
        assert preserves_form(model.form, rep.generators["J+(1)"])
        assert "J-" in rep.families


class TestPrincipal:
    def test_sp6_weights_and_regular_unipotent(self):
        model = classical_model("C", 3)
        GF = make_field(7)
        rep = principal_a1(model, GF)
        assert rep.torus_weights == (5, 3, 1, -1, -3, -5)
        assert jordan_type(rep.generators["J+(1)"]) == (6,)

    def test_sl4_weights(self):
        rep = principal_a1(classical_model("A", 3), make_field(5))
        assert rep.torus_weights == (3, 1, -1, -3)
        assert jordan_type(rep.generators["J+(1)"]) == (4,)

    def test_order_p(self):
        GF = make_field(7)
        x = principal_a1(classical_model("C", 3), GF).generators["J+(1)"]
        power = GF.Identity(6)
        for _ in range(7):
            power = power @ x
        assert is_identity(power)

    def test_small_characteristic_rejected(self):
        with pytest.raises(RepresentationError):
            principal_a1(classical_model("C", 3), make_field(5))

    def test_principal_burnside_full(self):
        GF = make_field(7)
        rep = principal_a1(classical_model("C", 3), GF)
        assert burnside_span_dim(list(rep.generators.values())) == 36

    def test_maximal_vector_highest_root(self):
        model = classical_model("C", 3)
        assert maximal_vector_coefficients(model, model.sys.simple_roots, [model.sys.highest_root]) == (1,)

    def test_maximal_vector_d4_pair(self):
        model = classical_model("D", 4)
        coeffs = maximal_vector_coefficients(
            model, model.sys.simple_roots, [Root((1, 1, 1, 0)), Root((1, 1, 0, 1))]
        )
        assert coeffs[0] == 1
        assert abs(coeffs[1]) == 1


class TestEvidence:
    def test_burnside_sl2(self):
        GF = make_field(3)
        upper = GF([[1, 1], [0, 1]])
        lower = GF([[1, 0], [1, 1]])
        assert burnside_span_dim([upper, lower]) == 4
        assert burnside_span_dim([upper]) == 2

    def test_burnside_identity(self):
        GF = make_field(5)
        assert burnside_span_dim([GF.Identity(3)]) == 1

    def test_invariant_forms_sp6(self):
        model = classical_model("C", 3)
        GF = make_field(5)
        generators = [model.root_element(r, 1, GF) for r in model.sys.roots]
        assert invariant_form_dim(generators) == 1

    def test_invariant_forms_trivial_group(self):
        GF = make_field(3)
        assert invariant_form_dim([GF.Identity(2)]) == 4

    def test_normalization_fails_for_opposite_root(self):
        model = classical_model("C", 3)
        GF = make_field(3)
        gamma = model.root_from_eps((2, 0, 0))
        family = OneParameterFamily("U", GF, (UnipotentFactor(model.root_terms(gamma, GF)),))
        b = model.root_element(-gamma, 1, GF)
        result = normalizes([b], family, [GF(1)])
        assert not result.holds
        assert result.trace[-1]["method"] == "exhaustive"

    def test_parameter_is_read_back(self):
        model = classical_model("C", 3)
        GF = make_field(5, 2)
        gamma = model.root_from_eps((1, 1, 0))
        family = OneParameterFamily("U", GF, (UnipotentFactor(model.root_terms(gamma, GF), 2, 1),))
        u = GF.primitive_element
        assert family.solve(family.at(u)) == u
        assert family.solve(family.at(GF(0))) == GF(0)

    def test_field_degree(self):
        assert field_degree_for(2, [0, 3]) == 3
        assert field_degree_for(5, [1, -1], minimum=2) == 2

    def test_field_degree_guard(self):
        with pytest.raises(FieldTooLarge):
            field_degree_for(2, [0, 3], minimum=1, max_bits=2)

    def test_exp_terms(self):
        GF = make_field(5)
        N = GF([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        terms = exp_terms(N)
        assert len(terms) == 2
        assert terms[1][0, 2] == GF(3)  # 1/2 mod 5

    def test_components_and_links(self):
        GF = make_field(3)
        x = GF.Identity(4)
        x[0, 1] = 1
        x[2, 3] = 1
        blocks = components(4, [x])
        assert blocks == [(0, 1), (2, 3)]
        y = GF.Identity(4)
        y[0, 2] = 1
        z = GF.Identity(4)
        z[3, 1] = 1
        edges = block_links(blocks, [y, z])
        assert edges == {(1, 0), (0, 1)}
        assert strongly_connected(2, edges)
        assert not strongly_connected(2, {(1, 0)})

    def test_torus_matrix_negative_weights(self):
        GF = make_field(7)
        h = torus_matrix(GF, [1, -1], 3)
        assert h[0, 0] * h[1, 1] == GF(1)

    def test_folded_forms(self):
        F, Q = folded_orthogonal_forms(5)
        assert F[2, 2] == 2
        assert F[0, 4] == 1 and F[4, 0] == 1
        assert Q[1, 3] == 1 and Q[3, 1] == 0
        with pytest.raises(RepresentationError):
            folded_orthogonal_forms(4)


def test_isogeny_factor_preserves_quadratic_form():
    model = classical_model("A", 4)
    # x_{ε3-ε5}(s)·x_{ε1-ε5}(s²): the short root element of SO5 in characteristic 2
    factor = TorusFactor((Root((0, 0, 1, 1)), Root((1, 1, 1, 1))), (2, 0, 0, 2), "isogeny")
    cw = CocharacterWeighting((factor,), (Twist(2, 0),))
    GF = make_field(2, 3)
    rep = twisted_diagonal_a1(model, cw, GF)
    _, Q = folded_orthogonal_forms(5)
    assert "J-" not in rep.families
    for name in ("J+(1)", "J+(g)", "J-torus"):
        assert preserves_quadratic_form(Q, rep.generators[name])
    assert rep.torus_weights == (2, 0, 0, 0, -2)
