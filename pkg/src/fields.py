"""
Finite fields GF(p^m) and exact linear algebra over them.

Fields come from ``galois``; the modulus is the Conway polynomial when the
database has one and the lexicographically first irreducible polynomial
otherwise.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Optional

import galois
import numpy as np

from .config import get_config
from .logging_config import get_logger

_logger = get_logger(__name__)


class FieldTooLarge(RuntimeError):
    """A requested field exceeds the configured size guard."""

    def __init__(self, p: int, m: int, bits: float, limit: int):
        self.p = p
        self.m = m
        self.bits = bits
        self.limit = limit
        super().__init__(
            f"GF({p}^{m}) needs {bits:.1f} bits per element, above the limit of {limit} "
            f"(raise EPIWIT_MAX_FIELD_BITS to allow it)"
        )


@dataclass(frozen=True)
class FieldSpec:
    """The parameters that pin down a field up to equality of elements."""

    p: int
    m: int
    modulus: str

    @property
    def order(self) -> int:
        return self.p**self.m

    @property
    def bits(self) -> float:
        return self.m * math.log2(self.p)


def make_field(p: int, m: int = 1, max_bits: Optional[int] = None) -> type[galois.FieldArray]:
    """
    Return the field class for GF(p^m).

    Raises:
        FieldTooLarge: If m·log2(p) exceeds the guard
        ValueError: If p is not prime or m < 1
    """
    if m < 1 or not galois.is_prime(p):
        raise ValueError(f"GF({p}^{m}) is not a finite field")
    limit = max_bits if max_bits is not None else get_config().max_field_bits
    bits = m * math.log2(p)
    if bits > limit:
        _logger.log_guard_hit("max_field_bits", limit, math.ceil(bits), p=p, m=m)
        raise FieldTooLarge(p, m, bits, limit)
    try:
        return galois.GF(p**m)
    except LookupError:
        return galois.GF(p**m, irreducible_poly=galois.irreducible_poly(p, m, method="min"))


def field_spec(GF: type[galois.FieldArray]) -> FieldSpec:
    return FieldSpec(p=GF.characteristic, m=GF.degree, modulus=str(GF.irreducible_poly))


def frobenius(x: galois.FieldArray, e: int) -> galois.FieldArray:
    """x ↦ x^(p^e); e may exceed the degree or be negative."""
    GF = type(x)
    m = GF.degree
    return x ** (GF.characteristic ** (e % m))


def power(x: galois.FieldArray, k: int) -> galois.FieldArray:
    """x^k for any integer k, reducing k modulo the multiplicative order."""
    GF = type(x)
    if k == 0:
        return GF(1)
    if x == 0:
        if k < 0:
            raise ZeroDivisionError("zero has no inverse")
        return GF(0)
    return x ** (k % (GF.order - 1))


def from_int_matrix(GF: type[galois.FieldArray], matrix: np.ndarray | Sequence[Sequence[int]]) -> galois.FieldArray:
    """Reduce an integer matrix into the prime subfield of GF."""
    arr = np.asarray(matrix, dtype=object)
    reduced = np.mod(arr, GF.characteristic).astype(np.int64)
    return GF(reduced)


def sample_elements(GF: type[galois.FieldArray], count: int, seed: int) -> list[galois.FieldArray]:
    """1, the primitive element, then seeded random nonzero elements."""
    picks = [GF(1), GF.primitive_element]
    rng = np.random.default_rng(seed)
    while len(picks) < count:
        picks.append(GF.Random(low=1, seed=rng))
    return picks[:count]


class IncrementalSpan:
    """
    Row-reduced basis of a growing subspace of GF^n.

    Rows are kept fully reduced against every pivot column, so reducing a new
    vector is a single matrix product.
    """

    def __init__(self, GF: type[galois.FieldArray], n: int):
        self.GF = GF
        self.n = n
        self._rows = GF.Zeros((n, n))
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._pivots)

    @property
    def basis(self) -> galois.FieldArray:
        return self._rows[: self.dim]

    def reduce(self, v: galois.FieldArray) -> galois.FieldArray:
        if not self._pivots:
            return v.copy()
        k = self.dim
        coeffs = v[self._pivots]
        return v - coeffs @ self._rows[:k]

    def contains(self, v: galois.FieldArray) -> bool:
        return not np.any(self.reduce(v))

    def add(self, v: galois.FieldArray) -> Optional[galois.FieldArray]:
        """Add v; return the new reduced basis row, or None when v was already in the span."""
        w = self.reduce(v)
        nonzero = np.flatnonzero(w)
        if nonzero.size == 0:
            return None
        c = int(nonzero[0])
        w = w / w[c]
        k = self.dim
        if k:
            column = self._rows[:k, c].copy()
            self._rows[:k] -= column[:, np.newaxis] * w[np.newaxis, :]
        self._rows[k] = w
        self._pivots.append(c)
        return w

    def extend(self, vectors: Iterable[galois.FieldArray]) -> int:
        """Add vectors; return how many enlarged the span."""
        return sum(1 for v in vectors if self.add(v) is not None)


def null_space(matrix: galois.FieldArray) -> galois.FieldArray:
    """Basis of {x : matrix @ x = 0} as rows."""
    return matrix.null_space()


def rank(matrix: galois.FieldArray) -> int:
    return int(np.linalg.matrix_rank(matrix))
