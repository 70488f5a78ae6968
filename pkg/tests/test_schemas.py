"""Tests for the certificate and report file schemas."""

import copy
from fractions import Fraction

import pytest

from src.schemas import (
    CERTIFICATE_SCHEMA,
    CertificateSchemaError,
    GridRowModel,
    certificate_from_dict,
    certificate_to_dict,
    report_to_dict,
    validate_report,
)
from src.witnesses import WitnessCertificate, build_principal_witness, build_witness, verify_witness


@pytest.fixture
def c3_dict():
    return certificate_to_dict(build_witness("C", 3, 2))


class TestCertificateSchema:
    def test_shape(self, c3_dict):
        assert c3_dict["schema"] == CERTIFICATE_SCHEMA
        assert c3_dict["group"] == {"type": "C", "rank": 3}
        assert c3_dict["j_data"]["twists"][2] == {"p": 2, "e": 2, "q": "4"}
        assert c3_dict["torus_family"] == {"family": "s", "a_list": [1, 2, 3]}
        assert all(len(f["root"]) == 3 for f in c3_dict["y_data"])

    def test_loads_back(self, c3_dict):
        cert = certificate_from_dict(c3_dict)
        original = build_witness("C", 3, 2)
        assert cert.y_data == original.y_data
        assert cert.j_data == original.j_data
        assert WitnessCertificate.from_dict(c3_dict).case_tag == "C_l"

    def test_big_twist_travels_as_string(self):
        data = certificate_to_dict(build_witness("C", 6, 7, a=3))
        last = data["j_data"]["twists"][-1]
        assert last["q"] == str(7**15)

    def test_principal(self):
        data = certificate_to_dict(build_principal_witness("C", 3, 7))
        assert data["j_data"]["factors"][0]["kind"] == "principal"
        assert certificate_from_dict(data).case_tag == "principal"

    def test_claimed_weights_travel_as_strings(self, c3_dict):
        assert c3_dict["claimed_weights"] == ["3"]
        assert certificate_from_dict(c3_dict).claimed_weights == (Fraction(3),)

    def test_non_rational_claimed_weight(self, c3_dict):
        c3_dict["claimed_weights"] = ["three"]
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_wrong_q(self, c3_dict):
        c3_dict["j_data"]["twists"][1]["q"] = "3"
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_unknown_case_tag(self, c3_dict):
        c3_dict["case_tag"] = "G2 p=3"
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_root_length_must_match_rank(self, c3_dict):
        c3_dict["y_data"][0]["root"] = [1, 1]
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_non_root_is_rejected(self, c3_dict):
        c3_dict["y_data"][0]["root"] = [5, 5, 5]
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_missing_y(self, c3_dict):
        del c3_dict["y_data"]
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_twists_per_factor(self, c3_dict):
        c3_dict["j_data"]["twists"].pop()
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_unknown_family(self, c3_dict):
        c3_dict["torus_family"]["family"] = "t"
        with pytest.raises(CertificateSchemaError):
            certificate_from_dict(c3_dict)

    def test_input_is_not_mutated(self, c3_dict):
        before = copy.deepcopy(c3_dict)
        certificate_from_dict(c3_dict)
        assert c3_dict == before


class TestReportSchema:
    def test_report_round_trip(self):
        data = report_to_dict(verify_witness(build_witness("C", 3, 3)))
        assert data["schema"] == "epiwit.report/1"
        assert validate_report(data).overall == data["overall"]

    def test_bad_status(self):
        data = report_to_dict(verify_witness(build_witness("C", 3, 3)))
        data["checks"][0]["status"] = "maybe"
        with pytest.raises(CertificateSchemaError):
            validate_report(data)


class TestGridRow:
    def test_defaults(self):
        row = GridRowModel(group="B4", p=2, status="redirect", detail="see C4")
        assert row.kind == "witness"
        assert row.failing == []
