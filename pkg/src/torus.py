"""
Torus density certificates for the three cocharacter families.

For twists p^a the families are

    s:   χ_1(t) χ_2(t^{p^a}) ⋯ χ_r(t^{p^{a(r−1)}})
    s′:  χ_1(t^{1+p^a}) χ_2(t^{−1+p^a}) χ_3(t^{p^{2a}+p^{3a}}) χ_4(t^{−p^{2a}+p^{3a}}) ⋯   (r even)
    s″:  the s′ pairs followed by χ_r(t^{p^{a(r−1)}})                                (r odd)

A subtorus containing the images for r distinct values of a is the whole
torus as soon as the exponent matrix is nonsingular; that is what is
certified here, exactly, with big integers.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import sympy

from .logging_config import get_logger

_logger = get_logger(__name__)

FAMILIES = ("s", "s'", "s''")


class ParityError(ValueError):
    """Family/rank parity mismatch or an unusable list of twist exponents."""


@dataclass(frozen=True)
class ExponentMatrix:
    family_tag: str
    r: int
    p: int
    a_list: tuple[int, ...]
    entries: tuple[tuple[int, ...], ...]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)


@dataclass(frozen=True)
class DensityCertificate:
    nonsingular: bool
    det: int
    vandermonde: Optional[int] = None
    column_identity: Optional[bool] = None
    mismatches: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        # big integers travel as decimal strings
        return {
            "nonsingular": self.nonsingular,
            "det": str(self.det),
            "vandermonde": None if self.vandermonde is None else str(self.vandermonde),
            "column_identity": self.column_identity,
            "mismatches": list(self.mismatches),
        }


def normalize_family(tag: str) -> str:
    """Accept s, s′, s″ as well as ASCII primes."""
    tag = tag.replace("′", "'").replace("″", "''")
    if tag not in FAMILIES:
        raise ParityError(f"unknown torus family {tag!r}")
    return tag


def _pair_columns(p: int, a: int, pairs: int) -> list[int]:
    row = []
    for j in range(pairs):
        lo, hi = p ** (2 * j * a), p ** ((2 * j + 1) * a)
        row.extend([lo + hi, -lo + hi])
    return row


def exponent_matrix(family_tag: str, r: int, p: int, a_list: Sequence[int]) -> ExponentMatrix:
    """
    Exponents of χ_1..χ_r in the family element at each twist a_i (one row per a_i).

    Raises:
        ParityError: s′ with odd r, s″ with even r, or a_list not r distinct positive integers
    """
    family = normalize_family(family_tag)
    a_list = tuple(int(a) for a in a_list)
    if r < 1:
        raise ParityError("r must be positive")
    if len(a_list) != r or len(set(a_list)) != r or min(a_list) < 1:
        raise ParityError(f"need {r} distinct positive twist exponents, got {list(a_list)}")
    if family == "s'" and r % 2:
        raise ParityError(f"family s′ needs even r, got {r}")
    if family == "s''" and r % 2 == 0:
        raise ParityError(f"family s″ needs odd r, got {r}")

    rows = []
    for a in a_list:
        if family == "s":
            rows.append(tuple(p ** (a * j) for j in range(r)))
        elif family == "s'":
            rows.append(tuple(_pair_columns(p, a, r // 2)))
        else:
            rows.append(tuple(_pair_columns(p, a, r // 2) + [p ** (a * (r - 1))]))
    return ExponentMatrix(family, r, p, a_list, tuple(rows))


def vandermonde_product(p: int, a_list: Sequence[int]) -> int:
    """∏_{i<j} (p^{a_j} − p^{a_i})."""
    result = 1
    nodes = [p**a for a in a_list]
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            result *= nodes[j] - nodes[i]
    return result


def column_operation_image(m: ExponentMatrix) -> tuple[tuple[int, ...], ...]:
    """
    Apply c_{2j} ← c_{2j} + c_{2j−1}, then c_{2j−1} ← 2c_{2j−1} − c_{2j}, to each
    column pair of an s′/s″ matrix. A trailing s″ column is left alone.
    """
    out = [list(row) for row in m.entries]
    for row in out:
        for j in range(0, m.r - 1, 2):
            row[j + 1] = row[j + 1] + row[j]
            row[j] = 2 * row[j] - row[j + 1]
    return tuple(tuple(row) for row in out)


def column_identity_holds(m: ExponentMatrix) -> bool:
    """After the column operations an s′ matrix is twice the s matrix; s″ is too, except its last column."""
    if m.family_tag == "s":
        return True
    base = exponent_matrix("s", m.r, m.p, m.a_list).entries
    image = column_operation_image(m)
    for i in range(m.r):
        for j in range(m.r):
            factor = 1 if (m.family_tag == "s''" and j == m.r - 1) else 2
            if image[i][j] != factor * base[i][j]:
                return False
    return True


def density_certificate(m: ExponentMatrix) -> DensityCertificate:
    """Exact determinant; for family s it is compared with the Vandermonde product."""
    det = int(sympy.Matrix(m.entries).det(method="bareiss"))
    vandermonde = None
    column_identity = None
    mismatches = []
    if det == 0:
        mismatches.append("exponent matrix is singular")
    if m.family_tag == "s":
        vandermonde = vandermonde_product(m.p, m.a_list)
        if det != vandermonde:
            mismatches.append(f"determinant {det} differs from Vandermonde product {vandermonde}")
    else:
        column_identity = column_identity_holds(m)
        if not column_identity:
            mismatches.append("column operations do not give the doubled s matrix")
    if mismatches:
        _logger.warning("Density certificate mismatch", family=m.family_tag, r=m.r, p=m.p, mismatches=mismatches)
    return DensityCertificate(
        nonsingular=det != 0,
        det=det,
        vandermonde=vandermonde,
        column_identity=column_identity,
        mismatches=tuple(mismatches),
    )


def certificate_passes(cert: DensityCertificate) -> bool:
    if not cert.nonsingular:
        return False
    if cert.vandermonde is not None and cert.det != cert.vandermonde:
        return False
    return cert.column_identity is not False
