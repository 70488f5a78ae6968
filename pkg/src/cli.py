"""
Command-line driver: build and verify witness certificates, run the grid,
check the branching identities.

Reports go to stdout (and to ``--out`` when given); logs go to stderr.
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Optional, Sequence

import anyio
import anyio.to_thread

from .characters import branching_identities, run_branching_suite
from .config import get_config
from .fields import FieldTooLarge
from .logging_config import calculate_stats, get_logger, setup_logging
from .schemas import CertificateSchemaError, GridRowModel, certificate_from_dict, report_to_dict
from .utils import canonical_json, format_duration, format_list, write_canonical_json
from .witnesses import (
    CASE_DIMENSIONS,
    GRID_PRIMES,
    UncoveredCase,
    VerificationReport,
    WitnessCertificate,
    build_principal_witness,
    build_witness,
    covered_cells,
    grid_groups,
    principal_cells,
    table_dimension,
    verify_witness,
    verify_witness_async,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_UNCOVERED = 2
EXIT_SCHEMA = 3
EXIT_FIELD_GUARD = 4


# =============================================================================
# Argument parsing
# =============================================================================


def _add_group_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--type", dest="type_label", choices=list("ABCDEFG"), required=required)
    parser.add_argument("--rank", type=int, required=required)
    parser.add_argument("--p", type=int, required=required)
    parser.add_argument("--a", type=int, default=1)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--format", dest="fmt", choices=["json", "text"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epiwit", description="Epimorphic-subgroup witness engine")
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="build a witness certificate")
    _add_group_flags(build, required=True)
    _add_output_flags(build)

    verify = commands.add_parser("verify", help="verify a certificate file (or a freshly built one)")
    verify.add_argument("certificate", nargs="?", type=Path, default=None)
    _add_group_flags(verify, required=False)
    verify.add_argument("--level", choices=["symbolic", "matrix", "all"], default="symbolic")
    _add_output_flags(verify)

    grid = commands.add_parser("grid", help="build and verify every covered cell")
    grid.add_argument("--level", choices=["symbolic", "matrix", "all"], default="symbolic")
    grid.add_argument("--only", default=None, help="classical, exceptional, principal, a type letter or a case tag")
    _add_output_flags(grid)

    char_check = commands.add_parser("char-check", help="run the branching identities")
    char_check.add_argument("--only", default=None, help="substring of the identity names to run")
    _add_output_flags(char_check)
    return parser


# =============================================================================
# Output
# =============================================================================


def _evidence_line(key: str, value: Any, width: int = 160) -> str:
    text = json.dumps(value, sort_keys=True)
    if len(text) > width:
        text = text[: width - 3] + "..."
    return f"      {key}: {text}"


def format_report_text(report: VerificationReport) -> str:
    lines = [
        f"{report.group} p={report.p} [{report.case_tag}] level={report.level} seed={report.seed}: "
        f"{report.overall.upper()}"
    ]
    for check in report.checks:
        flag = "" if check.required else " (informational)"
        lines.append(f"  [{check.status}] {check.name}{flag} ({format_duration(check.duration_ms / 1000)})")
        if check.reason:
            lines.append(f"      reason: {check.reason}")
        for key, value in check.evidence.items():
            lines.append(_evidence_line(key, value))
    stats = calculate_stats([c.duration_ms for c in report.checks])
    lines.append(f"  {stats['count']} checks in {format_duration(stats['sum'] / 1000)}")
    if report.failing():
        lines.append("  failing:")
        lines.append(format_list(report.failing(), max_items=20, prefix="    - "))
    return "\n".join(lines)


def _emit(text: str, data: Any, args: argparse.Namespace) -> None:
    """Print in the chosen format; --out always receives canonical JSON."""
    print(canonical_json(data) if args.fmt == "json" else text, end="" if args.fmt == "json" else "\n")
    if args.out is not None:
        write_canonical_json(data, args.out)


# =============================================================================
# Commands
# =============================================================================


def _seed(args: argparse.Namespace) -> int:
    return get_config().default_seed if args.seed is None else args.seed


def cmd_build(args: argparse.Namespace) -> int:
    cert = build_witness(args.type_label, args.rank, args.p, args.a, seed=_seed(args))
    data = cert.to_dict()
    text = (
        f"{cert.group} p={cert.p} a={cert.a} [{cert.case_tag}] dim {cert.claimed_dim}: "
        f"J has {len(cert.j_data.factors)} factors, groups "
        + ", ".join(f"{name}={[f.root.label for f in factors]}" for name, factors in cert.groups())
    )
    if args.out is not None and args.fmt == "text":
        text += f"\nwritten to {args.out}"
    _emit(text, data, args)
    return EXIT_OK


def _load_certificate(path: Path) -> WitnessCertificate:
    """
    Raises:
        CertificateSchemaError: If the file is not JSON or not a certificate
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CertificateSchemaError(f"cannot read certificate {path}: {exc}") from exc
    return certificate_from_dict(data)


async def cmd_verify(args: argparse.Namespace) -> int:
    if args.certificate is not None:
        cert = _load_certificate(args.certificate)
    elif args.type_label and args.rank and args.p:
        cert = build_witness(args.type_label, args.rank, args.p, args.a, seed=_seed(args))
    else:
        print("verify needs a certificate file or --type, --rank and --p", file=sys.stderr)
        return EXIT_SCHEMA
    seed = cert.seed if args.seed is None else args.seed
    report = await verify_witness_async(cert, args.level, seed)
    _emit(format_report_text(report), report_to_dict(report), args)
    return EXIT_OK if report.passed else EXIT_FAILED


def _matches(only: Optional[str], kind: str, type_label: str, case_tag: Optional[str]) -> bool:
    if only is None:
        return kind == "witness"
    if only == "principal":
        return kind == "principal"
    if kind == "principal":
        return False
    if only == "classical":
        return type_label in "ABCD"
    if only == "exceptional":
        return type_label in "EF"
    if len(only) == 1:
        return type_label == only.upper()
    return case_tag == only


def _grid_cells(only: Optional[str]) -> list[tuple[str, str, int, int]]:
    cells = []
    for type_label, rank in grid_groups():
        for p in GRID_PRIMES:
            cells.append(("witness", type_label, rank, p))
    cells += [("principal", t, r, p) for t, r, p in principal_cells()]
    selected = []
    for kind, type_label, rank, p in cells:
        tag = None
        if only is not None and only in CASE_DIMENSIONS and kind == "witness":
            if (type_label, rank, p) not in covered_cells():
                continue
            try:
                tag = build_witness(type_label, rank, p).case_tag
            except UncoveredCase:
                continue
        if _matches(only, kind, type_label, tag):
            selected.append((kind, type_label, rank, p))
    return selected


def run_cell(kind: str, type_label: str, rank: int, p: int, level: str, seed: int) -> GridRowModel:
    """Build and verify one grid cell; covered failures become rows, never exceptions."""
    start = time.perf_counter()
    group = f"{type_label}{rank}"
    row: dict[str, Any] = {"group": group, "p": p, "kind": kind}
    try:
        if kind == "principal":
            cert = build_principal_witness(type_label, rank, p, seed=seed)
        else:
            cert = build_witness(type_label, rank, p, seed=seed)
        report = verify_witness(cert, level, seed)
        row.update(
            status=report.overall,
            case_tag=cert.case_tag,
            claimed_dim=cert.claimed_dim,
            table_dim=table_dimension(type_label, rank, p),
            failing=report.failing(),
        )
    except UncoveredCase as exc:
        detail = str(exc)
        if exc.redirect is not None:
            detail = f"{detail} (see {exc.redirect[0]}{exc.redirect[1]})"
        row.update(status=exc.kind, detail=detail)
    except FieldTooLarge as exc:
        row.update(status="field_guard", detail=str(exc))
    row["duration_ms"] = (time.perf_counter() - start) * 1000
    logger.log_grid_cell(f"{group} p={p} {kind}", row["status"], row["duration_ms"])
    return GridRowModel(**row)


def format_grid_text(rows: Sequence[GridRowModel]) -> str:
    lines = [f"{'group':<6} {'p':>2}  {'case':<16} {'dim':>3} {'table':>5}  status"]
    for row in rows:
        case = row.case_tag or ("principal" if row.kind == "principal" else "-")
        dim = "-" if row.claimed_dim is None else str(row.claimed_dim)
        table = "-" if row.table_dim is None else str(row.table_dim)
        status = row.status
        if row.failing:
            status += " (" + ", ".join(row.failing) + ")"
        elif row.detail and row.status != "pass":
            status += f": {row.detail}"
        lines.append(f"{row.group:<6} {row.p:>2}  {case:<16} {dim:>3} {table:>5}  {status}")
    return "\n".join(lines)


async def cmd_grid(args: argparse.Namespace) -> int:
    config = get_config()
    seed = _seed(args)
    cells = _grid_cells(args.only)
    limiter = anyio.CapacityLimiter(config.grid_concurrency)
    rows: list[Optional[GridRowModel]] = [None] * len(cells)

    async def run(index: int, cell: tuple[str, str, int, int]) -> None:
        kind, type_label, rank, p = cell
        rows[index] = await anyio.to_thread.run_sync(
            run_cell, kind, type_label, rank, p, args.level, seed, limiter=limiter
        )

    async with anyio.create_task_group() as tg:
        for index, cell in enumerate(cells):
            tg.start_soon(run, index, cell)

    done = [r for r in rows if r is not None]
    data = {"level": args.level, "seed": seed, "rows": [r.model_dump() for r in done]}
    _emit(format_grid_text(done), data, args)
    return EXIT_FAILED if any(r.status == "fail" for r in done) else EXIT_OK


def cmd_char_check(args: argparse.Namespace) -> int:
    names = [i.name for i in branching_identities() if args.only is None or args.only in i.name]
    results = run_branching_suite(names)
    lines = []
    for result in results:
        found = ", ".join(str(tuple(w)) for w in result.found)
        lines.append(f"[{'pass' if result.passed else 'fail'}] {result.identity.name}: {found} dims {list(result.dims)}")
    data = {"identities": [r.to_dict() for r in results]}
    _emit("\n".join(lines), data, args)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# =============================================================================
# Entry points
# =============================================================================


def _configure_logging() -> None:
    config = get_config()
    setup_logging(
        log_level=config.log_level,
        json_format=config.log_format == "json",
        log_file=Path(config.log_file) if config.log_file else None,
        include_console=config.log_to_console,
    )


async def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "build":
            return cmd_build(args)
        if args.command == "verify":
            return await cmd_verify(args)
        if args.command == "grid":
            return await cmd_grid(args)
        return cmd_char_check(args)
    except UncoveredCase as exc:
        message = str(exc)
        if exc.redirect is not None:
            message += f"; use the {exc.redirect[0]}{exc.redirect[1]} witness"
        print(f"uncovered ({exc.kind}): {message}", file=sys.stderr)
        return EXIT_UNCOVERED
    except CertificateSchemaError as exc:
        print(f"schema violation: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FieldTooLarge as exc:
        print(f"field guard: {exc}", file=sys.stderr)
        return EXIT_FIELD_GUARD


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    return anyio.run(run, argv)
