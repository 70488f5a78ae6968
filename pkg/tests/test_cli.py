"""Tests for the command-line driver and its exit codes."""

import json
import logging

import pytest

from src.cli import (
    EXIT_FAILED,
    EXIT_FIELD_GUARD,
    EXIT_OK,
    EXIT_SCHEMA,
    EXIT_UNCOVERED,
    build_parser,
    main,
    run_cell,
)
from src.schemas import certificate_from_dict


@pytest.fixture(autouse=True)
def quiet_logging():
    yield
    logging.getLogger().handlers.clear()


class TestParser:
    def test_build_requires_group(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["build", "--type", "C"])

    def test_defaults(self):
        args = build_parser().parse_args(["verify", "--type", "C", "--rank", "3", "--p", "2"])
        assert args.level == "symbolic"
        assert args.fmt == "text"
        assert args.a == 1


class TestBuild:
    def test_writes_canonical_certificate(self, tmp_path, capsys):
        out = tmp_path / "c3.json"
        code = main(["build", "--type", "C", "--rank", "3", "--p", "2", "--out", str(out), "--format", "json"])
        assert code == EXIT_OK
        text = out.read_text()
        assert text.endswith("}\n")
        assert certificate_from_dict(json.loads(text)).case_tag == "C_l"
        assert json.loads(capsys.readouterr().out) == json.loads(text)

    def test_redirect(self, capsys):
        assert main(["build", "--type", "B", "--rank", "4", "--p", "2"]) == EXIT_UNCOVERED
        assert "C4" in capsys.readouterr().err

    def test_out_of_scope(self, capsys):
        assert main(["build", "--type", "A", "--rank", "1", "--p", "3"]) == EXIT_UNCOVERED
        assert "Borel" in capsys.readouterr().err


class TestVerify:
    def test_verify_built_file(self, tmp_path, capsys):
        cert_path = tmp_path / "c3.json"
        report_path = tmp_path / "report.json"
        main(["build", "--type", "C", "--rank", "3", "--p", "3", "--out", str(cert_path)])
        capsys.readouterr()
        code = main(["verify", str(cert_path), "--out", str(report_path)])
        assert code == EXIT_OK
        assert "PASS" in capsys.readouterr().out
        assert json.loads(report_path.read_text())["overall"] == "pass"

    def test_tampered_file_fails(self, tmp_path):
        cert_path = tmp_path / "c3.json"
        main(["build", "--type", "C", "--rank", "3", "--p", "3", "--out", str(cert_path)])
        data = json.loads(cert_path.read_text())
        data["claimed_dim"] = 4
        cert_path.write_text(json.dumps(data))
        assert main(["verify", str(cert_path)]) == EXIT_FAILED

    def test_schema_violation(self, tmp_path, capsys):
        cert_path = tmp_path / "bad.json"
        cert_path.write_text(json.dumps({"schema": "epiwit.certificate/1", "p": 2}))
        assert main(["verify", str(cert_path)]) == EXIT_SCHEMA
        assert "schema violation" in capsys.readouterr().err

    def test_not_json(self, tmp_path):
        cert_path = tmp_path / "bad.json"
        cert_path.write_text("{ nope")
        assert main(["verify", str(cert_path)]) == EXIT_SCHEMA

    def test_field_guard(self, monkeypatch, capsys):
        monkeypatch.setenv("EPIWIT_MAX_FIELD_BITS", "2")
        code = main(["verify", "--type", "C", "--rank", "3", "--p", "2", "--level", "matrix"])
        assert code == EXIT_FIELD_GUARD
        assert "EPIWIT_MAX_FIELD_BITS" in capsys.readouterr().err


class TestGrid:
    def test_run_cell_redirect(self):
        row = run_cell("witness", "B", 4, 2, "symbolic", 0)
        assert row.status == "redirect"
        assert "C4" in row.detail

    def test_run_cell_pass(self):
        row = run_cell("witness", "C", 3, 2, "symbolic", 0)
        assert row.status == "pass"
        assert row.claimed_dim == row.table_dim == 3

    def test_only_type_letter(self, tmp_path, capsys):
        out = tmp_path / "grid.json"
        code = main(["grid", "--only", "C", "--out", str(out)])
        assert code == EXIT_OK
        rows = json.loads(out.read_text())["rows"]
        assert len(rows) == 16
        assert {r["group"] for r in rows} == {"C3", "C4", "C5", "C6"}
        assert all(r["status"] == "pass" for r in rows)
        assert "C_l" in capsys.readouterr().out


class TestCharCheck:
    def test_f4_identities(self, capsys):
        code = main(["char-check", "--only", "F4", "--format", "json"])
        data = json.loads(capsys.readouterr().out)
        assert [i["name"] for i in data["identities"]] == ["V26 of F4 to B4", "L(F4) to B4"]
        assert code == EXIT_OK
