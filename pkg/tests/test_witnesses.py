"""Tests for witness construction, verification and fault injection."""

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from src.chevalley import torus_weight, weight_tuple
from src.witnesses import (
    CASE_DIMENSIONS,
    E6_P2_GOLDEN_WEIGHTS,
    F4_GOLDEN_WEIGHTS,
    MUTATION_KINDS,
    Factor,
    UncoveredCase,
    build_principal_witness,
    build_witness,
    covered_cells,
    fault_injection_campaign,
    grid_groups,
    mutate_certificate,
    principal_cells,
    table_dimension,
    verify_witness,
    verify_witness_async,
)


class TestBuildWitness:
    def test_c3_p2(self):
        cert = build_witness("C", 3, 2)
        assert cert.case_tag == "C_l"
        assert cert.claimed_dim == 3
        assert [f.twist for f in cert.y_data] == [0, 1]
        assert [t.e for t in cert.j_data.twists] == [0, 1, 2]
        assert cert.torus_family == "s"
        assert cert.a_list == (1, 2, 3)
        assert cert.z_data == ()

    def test_c3_y_weights_are_one_plus_p(self):
        cert = build_witness("C", 3, 2)
        assert [weight_tuple(cert.j_data, f.root) for f in cert.y_data] == [(1, 1, 0), (0, 1, 1)]
        assert [torus_weight(cert.j_data, f.root) for f in cert.y_data] == [3, 6]

    def test_twist_parameter_scales_exponents(self):
        cert = build_witness("C", 4, 3, a=2)
        assert [t.e for t in cert.j_data.twists] == [0, 2, 4, 6]
        assert [f.twist for f in cert.y_data] == [0, 2, 4]
        assert cert.a_list == (2, 3, 4, 5)

    def test_lowercase_type(self):
        assert build_witness("c", 3, 3).group == "C3"

    @pytest.mark.parametrize(
        "type_label,rank,p,case_tag",
        [
            ("C", 5, 2, "C_l"),
            ("D", 4, 3, "D_l even"),
            ("D", 6, 2, "D_l even"),
            ("D", 7, 5, "D_l odd"),
            ("B", 3, 3, "B_3 p odd"),
            ("B", 5, 3, "B_l odd p odd"),
            ("B", 4, 5, "B_l even p odd"),
            ("A", 3, 2, "A_l odd"),
            ("A", 4, 3, "A_l even p odd"),
            ("A", 4, 2, "A_l even p=2"),
            ("F", 4, 2, "F4 p=2"),
            ("F", 4, 3, "F4 p odd"),
            ("E", 6, 3, "E6 p odd"),
            ("E", 6, 2, "E6 p=2"),
            ("E", 7, 5, "E7 p odd"),
            ("E", 7, 2, "E7 p=2"),
            ("E", 8, 3, "E8 p odd"),
            ("E", 8, 2, "E8 p=2"),
        ],
    )
    def test_case_dispatch(self, type_label, rank, p, case_tag):
        cert = build_witness(type_label, rank, p)
        assert cert.case_tag == case_tag
        assert cert.claimed_dim == CASE_DIMENSIONS[case_tag]
        assert cert.claimed_dim == 2 + len(cert.groups())

    def test_d7_has_two_extra_groups(self):
        cert = build_witness("D", 7, 3)
        assert cert.claimed_dim == 5
        assert [name for name, _ in cert.groups()] == ["Y", "Z", "Z2"]

    def test_e8_p_odd_y_twist_follows_a(self):
        cert = build_witness("E", 8, 3, a=2)
        assert [f.twist for f in cert.y_data] == [0, 2]
        first, second = (torus_weight(cert.j_data, f.root) for f in cert.y_data)
        assert second == first * 3**2

    def test_claimed_weights(self):
        assert build_witness("C", 3, 2).claimed_weights == (Fraction(3),)
        assert build_witness("F", 4, 2).claimed_weights == (Fraction(13),)
        assert len(build_witness("D", 7, 3).claimed_weights) == 3
        assert build_witness("C", 4, 3, a=2).claimed_weights == (Fraction(1 + 3**2),)

    def test_e6_p2_weights_follow_f4(self):
        cert = build_witness("E", 6, 2)
        sys = cert.sys
        for label, expected in E6_P2_GOLDEN_WEIGHTS.items():
            assert weight_tuple(cert.j_data, sys.root(label)) == expected
        assert [torus_weight(cert.j_data, f.root) for f in cert.y_data] == [13, 13, 52]
        assert torus_weight(cert.j_data, cert.z_data[0][0].root) == 41
        assert cert.claimed_weights == (Fraction(13), Fraction(41))

    def test_seed_is_recorded(self):
        assert build_witness("C", 3, 2, seed=17).seed == 17

    def test_resolution_annotations(self):
        cert = build_witness("C", 3, 2)
        records = cert.annotations["resolution"]
        assert len(records) == 2
        assert records[0]["target"] == [1, 1, 0]
        assert records[0]["chosen"] == [cert.y_data[0].root.label]


class TestUncoveredCases:
    def test_b_p2_redirects_to_c(self):
        with pytest.raises(UncoveredCase) as info:
            build_witness("B", 5, 2)
        assert info.value.kind == "redirect"
        assert info.value.redirect == ("C", 5)

    def test_a1_is_out_of_scope(self):
        with pytest.raises(UncoveredCase) as info:
            build_witness("A", 1, 3)
        assert info.value.kind == "out_of_scope"
        assert "Borel" in str(info.value)

    @pytest.mark.parametrize("type_label,rank", [("A", 2), ("B", 2), ("G", 2)])
    def test_rank_two_is_out_of_scope(self, type_label, rank):
        with pytest.raises(UncoveredCase) as info:
            build_witness(type_label, rank, 5)
        assert info.value.kind == "out_of_scope"

    def test_non_prime_p(self):
        with pytest.raises(ValueError):
            build_witness("C", 3, 4)

    def test_non_positive_a(self):
        with pytest.raises(ValueError):
            build_witness("C", 3, 2, a=0)


class TestTableDimension:
    @pytest.mark.parametrize(
        "type_label,rank,p,dim",
        [
            ("A", 1, 2, 2),
            ("G", 2, 5, 3),
            ("A", 5, 2, 4),
            ("B", 4, 3, 4),
            ("B", 4, 2, 3),
            ("C", 6, 7, 3),
            ("D", 5, 3, 5),
            ("D", 9, 3, 3),
            ("D", 6, 3, 3),
            ("E", 6, 2, 4),
            ("E", 6, 3, 3),
            ("E", 8, 5, 3),
        ],
    )
    def test_values(self, type_label, rank, p, dim):
        assert table_dimension(type_label, rank, p) == dim


class TestPrincipalWitness:
    def test_c3_p7(self):
        cert = build_principal_witness("C", 3, 7)
        assert cert.case_tag == "principal"
        assert cert.claimed_dim == 3
        assert cert.annotations["coxeter_number"] == 6
        assert len(cert.j_data.factors) == 1

    def test_p_below_coxeter_number(self):
        with pytest.raises(UncoveredCase) as info:
            build_principal_witness("C", 3, 5)
        assert info.value.kind == "out_of_scope"

    def test_exceptional_is_out_of_scope(self):
        with pytest.raises(UncoveredCase):
            build_principal_witness("E", 6, 13)


class TestSymbolicVerification:
    def test_c3_p2_passes(self):
        report = verify_witness(build_witness("C", 3, 2))
        assert report.passed, report.failing()
        assert report.check("dimension").evidence["claimed"] == 3
        assert report.check("torus density").status == "pass"

    def test_f4_p2_golden_weights(self):
        report = verify_witness(build_witness("F", 4, 2))
        assert report.passed, report.failing()
        weights = report.check("weight tuples").evidence["weights"]
        assert {k: tuple(v) for k, v in weights.items()} == F4_GOLDEN_WEIGHTS
        assert report.check("membership").status == "pass"

    def test_tampered_y_root_fails_homogeneity(self):
        cert = build_witness("C", 3, 2)
        sys = cert.sys
        replacement = next(
            r for r in sys.roots
            if torus_weight(cert.j_data, r) != torus_weight(cert.j_data, cert.y_data[0].root)
            and r != -cert.y_data[1].root
        )
        tampered = replace(cert, y_data=(Factor(replacement), cert.y_data[1]))
        report = verify_witness(tampered)
        assert report.check("homogeneity").status == "fail"
        assert "construction replay" in report.failing()
        assert not report.passed

    def test_dim_change_fails_dimension(self):
        cert = mutate_certificate(build_witness("D", 4, 3), "dim_change", random.Random(1))
        report = verify_witness(cert)
        assert report.check("dimension").status == "fail"

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            verify_witness(build_witness("C", 3, 2), level="numeric")

    def test_report_is_deterministic(self):
        cert = build_witness("C", 4, 3)
        first = verify_witness(cert, seed=5).to_dict()
        second = verify_witness(cert, seed=5).to_dict()
        assert first == second
        assert "duration_ms" not in first["checks"][0]

    def test_seed_defaults_to_certificate_seed(self):
        report = verify_witness(build_witness("C", 3, 3, seed=9))
        assert report.seed == 9

    def test_e6_p2_passes(self):
        report = verify_witness(build_witness("E", 6, 2))
        assert report.passed, report.failing()
        assert report.check("homogeneity").status == "pass"
        weights = report.check("weight tuples").evidence["weights"]
        assert {k: tuple(v) for k, v in weights.items()} == E6_P2_GOLDEN_WEIGHTS

    def test_single_factor_root_swap_fails_homogeneity(self):
        cert = build_witness("F", 4, 3)
        (old,) = cert.y_data
        weight = torus_weight(cert.j_data, old.root)
        swapped = next(r for r in cert.sys.roots if torus_weight(cert.j_data, r) != weight and r != -old.root)
        report = verify_witness(replace(cert, y_data=(Factor(swapped),)))
        groups = report.check("homogeneity").evidence["groups"]
        assert report.check("homogeneity").status == "fail"
        assert groups["Y"]["homogeneous"] is False
        assert groups["Y"]["claimed"] == str(weight)

    def test_single_factor_twist_bump_fails_homogeneity(self):
        cert = build_witness("F", 4, 3)
        (old,) = cert.y_data
        report = verify_witness(replace(cert, y_data=(replace(old, twist=old.twist + 1),)))
        assert report.check("homogeneity").status == "fail"

    def test_missing_claimed_weights_fail(self):
        report = verify_witness(replace(build_witness("C", 3, 2), claimed_weights=()))
        assert report.check("homogeneity").status == "fail"
        assert "claimed weights" in report.check("homogeneity").reason


class TestMatrixVerification:
    def test_c3_p2_all_levels(self):
        report = verify_witness(build_witness("C", 3, 2), level="all")
        assert report.passed, report.failing()
        assert report.check("burnside span").evidence == {"span": 36, "target": 36}
        assert report.check("normalization").status == "pass"

    @pytest.mark.slow
    @pytest.mark.parametrize("rank,p", [(3, 3), (4, 2), (5, 2)])
    def test_c_cells(self, rank, p):
        report = verify_witness(build_witness("C", rank, p), level="all")
        assert report.passed, report.failing()
        assert report.check("burnside span").evidence["span"] == (2 * rank) ** 2

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "type_label,rank,p,dim,span",
        [
            ("D", 4, 3, 3, 64),
            ("D", 6, 2, 3, 144),
            ("B", 5, 3, 4, 121),
            ("A", 5, 2, 4, 36),
            ("A", 4, 3, 4, 25),
            ("D", 5, 2, 5, 100),
        ],
    )
    def test_classical_cells(self, type_label, rank, p, dim, span):
        cert = build_witness(type_label, rank, p)
        assert cert.claimed_dim == dim
        report = verify_witness(cert, level="all")
        assert report.passed, report.failing()
        assert report.check("burnside span").evidence == {"span": span, "target": span}
        assert report.check("normalization").status == "pass"

    @pytest.mark.slow
    def test_b5_p3_long_roots_and_jordan_types(self):
        cert = build_witness("B", 5, 3)
        assert all(cert.sys.is_long(f.root) for f in cert.y_data)
        report = verify_witness(cert, level="matrix")
        assert report.check("Jordan types").status == "pass"

    def test_d5_p2_extra_groups_commute(self):
        cert = build_witness("D", 5, 2)
        sys = cert.sys
        assert [g[0].root for g in cert.z_data] == [-sys.simple_root(1), sys.highest_root]
        report = verify_witness(cert)
        assert report.check("commutation").status == "pass"
        assert report.check("commutation").evidence["offending"] == []

    @pytest.mark.slow
    def test_e6_p2_adjoint(self):
        report = verify_witness(build_witness("E", 6, 2), level="matrix")
        assert report.check("adjoint normalization").status == "pass"
        commutation = report.check("exhaustive commutation")
        assert commutation.status == "pass"
        assert commutation.evidence["pairs"] == 16

    @pytest.mark.slow
    def test_principal_c3_p7(self):
        report = verify_witness(build_principal_witness("C", 3, 7), level="matrix")
        assert report.check("unipotent order").status == "pass"
        assert report.check("burnside span").evidence["span"] == 36
        assert report.check("overgroup classification").status == "skipped"


class TestAsyncVerification:
    @pytest.mark.asyncio
    async def test_matches_sync(self):
        cert = build_witness("C", 3, 2)
        sync_report = verify_witness(cert, level="all")
        async_report = await verify_witness_async(cert, level="all")
        assert async_report.to_dict() == sync_report.to_dict()

    @pytest.mark.asyncio
    async def test_check_order_is_kept(self):
        cert = build_witness("D", 4, 3)
        report = await verify_witness_async(cert)
        assert [c.name for c in report.checks][:3] == ["construction replay", "torus density", "commutation"]


class TestGrid:
    def test_groups(self):
        groups = grid_groups()
        assert ("A", 3) in groups
        assert ("D", 3) not in groups
        assert groups[-4:] == [("F", 4), ("E", 6), ("E", 7), ("E", 8)]

    def test_covered_cells_skip_b_p2(self):
        cells = covered_cells()
        assert ("B", 4, 2) not in cells
        assert ("C", 3, 2) in cells

    def test_principal_cells_need_p_at_least_h(self):
        cells = principal_cells()
        assert ("A", 3, 5) in cells
        assert ("A", 3, 3) not in cells
        assert all(t in "ABCD" for t, _, _ in cells)

    @pytest.mark.slow
    @pytest.mark.parametrize("type_label,rank,p", [c for c in covered_cells(primes=(2, 3, 5)) if c[1] <= 6])
    def test_every_covered_cell_passes_symbolically(self, type_label, rank, p):
        report = verify_witness(build_witness(type_label, rank, p))
        assert report.passed, report.failing()


class TestFaultInjection:
    @pytest.mark.parametrize("kind", MUTATION_KINDS)
    def test_each_kind_is_caught(self, kind):
        cert = build_witness("C", 4, 3)
        report = verify_witness(mutate_certificate(cert, kind, random.Random(3)))
        assert not report.passed

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            mutate_certificate(build_witness("C", 3, 2), "swap_everything", random.Random(0))

    def test_campaign_detects_every_mutation(self):
        records = fault_injection_campaign(8, seed=4, max_rank=4)
        assert len(records) == 8
        assert all(r["detected"] for r in records)
        assert {r["kind"] for r in records} == set(MUTATION_KINDS)

    @pytest.mark.slow
    def test_hundred_mutations_across_the_grid(self):
        records = fault_injection_campaign(100, seed=11)
        assert len(records) == 100
        assert [r for r in records if not r["detected"]] == []

    @pytest.mark.parametrize("kind", ["root_swap", "coefficient_exponent"])
    def test_factor_mutations_break_homogeneity(self, kind):
        cert = build_witness("E", 6, 3)
        report = verify_witness(mutate_certificate(cert, kind, random.Random(5)))
        assert "homogeneity" in report.failing()
