"""
Chevalley basis structure constants, commutator relations and the adjoint
representation over finite fields.

Signs are fixed by extraspecial pairs: for every positive non-simple root ξ
the special pair (α, β) with α first in root order gets N_{α,β} = +(q+1),
where q is the largest integer with β − qα a root. Every other constant
follows from the standard identities between N's.

The Lie algebra basis is ordered as the roots of ``sys.roots`` followed by
the simple coroots h_1..h_l.
"""

from __future__ import annotations

import math
import random
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

import galois
import numpy as np
import sympy

from .cache import get_global_cache
from .config import get_config
from .fields import IncrementalSpan, from_int_matrix
from .logging_config import get_logger
from .rootsys import Root, RootSystem, RootSystemError, build_root_system, pairing

_logger = get_logger(__name__)


class CommutatorError(ValueError):
    """The commutator formula does not apply to the pair (γ = ±δ or non-roots)."""


# =============================================================================
# Structure constants
# =============================================================================


@dataclass(frozen=True)
class CommutatorTerm:
    """One factor x_root(coefficient · t^t_power · u^u_power) of a commutator."""

    root: Root
    coefficient: int
    t_power: int
    u_power: int

    def __str__(self) -> str:
        return f"x_{self.root.label}({self.coefficient}·t^{self.t_power}·u^{self.u_power})"


@dataclass(frozen=True)
class StructureConstants:
    """Nonzero N_{γ,δ} for all root pairs with γ + δ a root."""

    sys: RootSystem
    N: Mapping[tuple[Root, Root], int]
    commutator_tables: dict[tuple[Root, Root], tuple[tuple[int, int, Root, int], ...]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def n(self, gamma: Root, delta: Root) -> int:
        return self.N.get((gamma, delta), 0)

    @property
    def dim(self) -> int:
        return len(self.sys.roots) + self.sys.rank

    def basis_index(self, gamma: Root) -> int:
        return self.sys.index[gamma]

    def cartan_index(self, i: int) -> int:
        """Index of the simple coroot h_i (1-based i)."""
        return len(self.sys.roots) + i - 1

    @cached_property
    def _coroot_coeffs(self) -> dict[Root, tuple[int, ...]]:
        return {r: self.sys.coroot_coefficients(r) for r in self.sys.roots}

    def bracket_basis(self, i: int, j: int) -> dict[int, int]:
        """[b_i, b_j] as a sparse integer vector over the basis."""
        sys = self.sys
        nroots = len(sys.roots)
        if i >= nroots and j >= nroots:
            return {}
        if i >= nroots:
            return {k: -v for k, v in self.bracket_basis(j, i).items()}
        a = sys.roots[i]
        if j >= nroots:
            # [e_a, h_k] = −⟨a, α_k∨⟩ e_a
            k = j - nroots
            value = sum(a.coeffs[m] * sys.cartan[m][k] for m in range(sys.rank))
            return {i: -value} if value else {}
        b = sys.roots[j]
        total = a + b
        if total.is_zero():
            coeffs = self._coroot_coeffs[a]
            return {nroots + k: c for k, c in enumerate(coeffs) if c}
        n = self.n(a, b)
        if n:
            return {sys.index[total]: n}
        return {}

    def ad_matrix(self, gamma: Root) -> np.ndarray:
        """Integer matrix of ad e_γ acting on column vectors."""
        dim = self.dim
        i = self.basis_index(gamma)
        matrix = np.zeros((dim, dim), dtype=np.int64)
        for j in range(dim):
            for k, v in self.bracket_basis(i, j).items():
                matrix[k, j] = v
        return matrix


def _string_below(sys: RootSystem, alpha: Root, beta: Root) -> int:
    """Largest q with β − qα a root."""
    q = 0
    while (beta - alpha * (q + 1)) in sys.root_set:
        q += 1
    return q


def _extraspecial_pairs(sys: RootSystem) -> dict[Root, tuple[Root, Root]]:
    order = {r: k for k, r in enumerate(sys.roots)}
    pairs: dict[Root, tuple[Root, Root]] = {}
    for xi in sys.positive_roots:
        for alpha in sys.positive_roots:
            beta = xi - alpha
            if beta in sys.root_set and beta.is_positive() and order[alpha] < order[beta]:
                pairs[xi] = (alpha, beta)
                break
    return pairs


class _ConstantSolver:
    def __init__(self, sys: RootSystem):
        self.sys = sys
        self.order = {r: k for k, r in enumerate(sys.roots)}
        self.extraspecial = _extraspecial_pairs(sys)
        self.memo: dict[tuple[Root, Root], Fraction] = {}

    def get(self, a: Root, b: Root) -> Fraction:
        if (a + b) not in self.sys.root_set:
            return Fraction(0)
        key = (a, b)
        if key not in self.memo:
            self.memo[key] = self._compute(a, b)
        return self.memo[key]

    def _compute(self, a: Root, b: Root) -> Fraction:
        sys = self.sys
        pa, pb = a.is_positive(), b.is_positive()
        if pa and pb:
            if self.order[a] > self.order[b]:
                return -self.get(b, a)
            xi = a + b
            alpha, beta = self.extraspecial[xi]
            if (a, b) == (alpha, beta):
                return Fraction(_string_below(sys, alpha, beta) + 1)
            # four-term identity with a + b − α − β = 0
            n_xi = Fraction(sys.norm(xi))
            total = Fraction(0)
            d1 = b - alpha
            if d1 in sys.root_set:
                total += self.get(b, -alpha) * self.get(a, -beta) / sys.norm(d1)
            d2 = a - alpha
            if d2 in sys.root_set:
                total += self.get(-alpha, a) * self.get(b, -beta) / sys.norm(d2)
            return n_xi * total / self.get(alpha, beta)
        if not pa and not pb:
            return -self.get(-a, -b)
        c = -(a + b)
        if c.is_positive() == pb:
            return Fraction(sys.norm(c), sys.norm(a)) * self.get(b, c)
        return Fraction(sys.norm(c), sys.norm(b)) * self.get(c, a)


def _build_structure_constants(sys: RootSystem) -> StructureConstants:
    solver = _ConstantSolver(sys)
    table: dict[tuple[Root, Root], int] = {}
    for a in sys.roots:
        for b in sys.roots:
            value = solver.get(a, b)
            if value:
                if value.denominator != 1:
                    raise RootSystemError(f"non-integral structure constant N({a}, {b}) = {value}")
                table[(a, b)] = int(value)
    _logger.debug("Structure constants built", system=sys.name, nonzero=len(table))
    return StructureConstants(sys=sys, N=table)


def build_structure_constants(sys: RootSystem) -> StructureConstants:
    """
    Structure constants of the Chevalley basis of L(G).

    Args:
        sys: A simple root system

    Returns:
        StructureConstants with N_{γ,δ} = −N_{δ,γ} and |N_{γ,δ}| = q+1
    """
    return get_global_cache().get_or_compute(
        "chevalley",
        {"type": sys.type_label, "rank": sys.rank, "cartan": [list(row) for row in sys.cartan]},
        lambda: _build_structure_constants(sys),
    )


def structure_constants_for(type_label: str, rank: int) -> StructureConstants:
    return build_structure_constants(build_root_system(type_label, rank))


def check_jacobi(sc: StructureConstants, samples: Optional[int] = None, seed: int = 0) -> bool:
    """
    Jacobi identity on basis triples: all triples for rank ≤ 4, otherwise a
    seeded sample (``jacobi_samples`` from the configuration by default).
    """
    dim = sc.dim

    def bracket(u: Mapping[int, int], j: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, c in u.items():
            for k, v in sc.bracket_basis(i, j).items():
                out[k] = out.get(k, 0) + c * v
        return out

    def jacobi(x: int, y: int, z: int) -> bool:
        total: dict[int, int] = {}
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            # [a, [b, c]] = −[[b, c], a]
            for k, v in bracket(sc.bracket_basis(b, c), a).items():
                total[k] = total.get(k, 0) - v
        return not any(total.values())

    if sc.sys.rank <= 4:
        triples: Iterable[tuple[int, int, int]] = (
            (x, y, z) for x in range(dim) for y in range(dim) for z in range(y + 1, dim)
        )
    else:
        count = samples if samples is not None else get_config().jacobi_samples
        rng = random.Random(seed)
        triples = ((rng.randrange(dim), rng.randrange(dim), rng.randrange(dim)) for _ in range(count))

    for x, y, z in triples:
        if not jacobi(x, y, z):
            _logger.warning("Jacobi identity failed", system=sc.sys.name, triple=(x, y, z))
            return False
    return True


# =============================================================================
# Commutator formula
# =============================================================================


def _require_pair(sc: StructureConstants, gamma: Root, delta: Root) -> None:
    for r in (gamma, delta):
        if r not in sc.sys.root_set:
            raise CommutatorError(f"{r} is not a root of {sc.sys.name}")
    if gamma == delta or gamma == -delta:
        raise CommutatorError(f"commutator formula needs γ ≠ ±δ, got {gamma} and {delta}")


def roots_commute(sc: StructureConstants, gamma: Root, delta: Root) -> bool:
    """True iff no iγ + jδ with i, j > 0 is a root, so U_γ and U_δ commute."""
    _require_pair(sc, gamma, delta)
    return not _combinations(sc.sys, gamma, delta)


def _combinations(sys: RootSystem, gamma: Root, delta: Root) -> list[tuple[int, int]]:
    found = []
    for i in range(1, 4):
        for j in range(1, 4):
            if (gamma * i + delta * j) in sys.root_set:
                found.append((i, j))
    return sorted(found, key=lambda ij: (ij[0] + ij[1], ij[0]))


def _m(sc: StructureConstants, r: Root, s: Root, i: int) -> Fraction:
    """M_{r,s,i} = N_{r,s} N_{r,r+s} ⋯ N_{r,(i−1)r+s} / i!"""
    product = Fraction(1)
    for k in range(i):
        product *= sc.n(r, r * k + s)
    return product / math.factorial(i)


def commutator_coefficients(
    sc: StructureConstants, gamma: Root, delta: Root
) -> tuple[tuple[int, int, Root, int], ...]:
    """The (i, j, iγ+jδ, C_ij) for the pair, in increasing i + j."""
    _require_pair(sc, gamma, delta)
    key = (gamma, delta)
    cached = sc.commutator_tables.get(key)
    if cached is not None:
        return cached

    rows = []
    for i, j in _combinations(sc.sys, gamma, delta):
        if j == 1:
            c = _m(sc, gamma, delta, i)
        elif i == 1:
            c = (-1) ** j * _m(sc, delta, gamma, j)
        elif (i, j) == (3, 2):
            c = _m(sc, gamma + delta, gamma, 2) / 3
        elif (i, j) == (2, 3):
            c = -2 * _m(sc, delta + gamma, delta, 2) / 3
        else:
            raise CommutatorError(f"unexpected root combination {i}γ+{j}δ")
        if c.denominator != 1:
            raise CommutatorError(f"non-integral commutator coefficient C_{i}{j} = {c}")
        rows.append((i, j, gamma * i + delta * j, int(c)))
    table = tuple(rows)
    sc.commutator_tables[key] = table
    return table


@dataclass(frozen=True)
class Monomial:
    """c · t^power for an integer c."""

    coefficient: int = 1
    power: int = 1


def commutator_expansion(
    sc: StructureConstants,
    gamma: Root,
    t_expr: Monomial,
    delta: Root,
    u_expr: Monomial,
) -> list[CommutatorTerm]:
    """
    Expand x_δ(u)⁻¹ x_γ(t)⁻¹ x_δ(u) x_γ(t) as an ordered product of root elements.

    With t = c·t^a and u = d·u^b the factor for iγ + jδ is
    x_{iγ+jδ}(C_ij (−c)^i d^j · t^{ai} u^{bj}). Equivalently
    x_δ(u) x_γ(t) = x_γ(t) x_δ(u) · (the returned product).
    """
    terms = []
    for i, j, root, c in commutator_coefficients(sc, gamma, delta):
        coefficient = c * (-t_expr.coefficient) ** i * u_expr.coefficient**j
        if coefficient:
            terms.append(CommutatorTerm(root, coefficient, t_expr.power * i, u_expr.power * j))
    return terms


# =============================================================================
# Cocharacters and torus weights
# =============================================================================


@dataclass(frozen=True)
class Twist:
    """The Frobenius twist q = p^e."""

    p: int
    e: int

    @property
    def value(self) -> int:
        return self.p**self.e


@dataclass(frozen=True)
class TorusFactor:
    """
    One A1 factor of the J torus.

    ``grading`` holds the values ⟨α_j, μ⟩ of the factor's cocharacter μ on
    the simple roots of G. ``kind`` says how its unipotent radical is
    modeled: "root" (U_β for one root β), "folded" (∏ x_r(s) over pairwise
    orthogonal roots), "principal" (principal A1 of an A_k base), "isogeny" (x_r(s)·x_r'(s²),
    the image of SL2 in SO3 in characteristic 2) or "tensor" (torus only).
    """

    roots: tuple[Root, ...]
    grading: tuple[int, ...]
    kind: str = "root"

    def weight(self, gamma: Root) -> int:
        return sum(c * g for c, g in zip(gamma.coeffs, self.grading, strict=True))


def root_factor(sys: RootSystem, beta: Root) -> TorusFactor:
    return TorusFactor((beta,), tuple(pairing(sys, a, beta) for a in sys.simple_roots), "root")


def folded_factor(sys: RootSystem, roots: Sequence[Root]) -> TorusFactor:
    roots = tuple(roots)
    for i, r in enumerate(roots):
        for s in roots[i + 1 :]:
            if sys.inner(r, s) != 0:
                raise RootSystemError(f"folded factor roots {r} and {s} are not orthogonal")
    grading = tuple(sum(pairing(sys, a, r) for r in roots) for a in sys.simple_roots)
    return TorusFactor(roots, grading, "folded")


def principal_factor(sys: RootSystem, simple_roots: Sequence[Root]) -> TorusFactor:
    """Principal A1 of the subsystem with the given base: cocharacter 2ρ∨ of that base."""
    simple_roots = tuple(simple_roots)
    k = len(simple_roots)
    cartan = sympy.Matrix(k, k, lambda a, b: pairing(sys, simple_roots[a], simple_roots[b]))
    coeffs = cartan.solve(sympy.Matrix([2] * k))
    grading = tuple(
        int(sum(coeffs[b] * pairing(sys, alpha, simple_roots[b]) for b in range(k)))
        for alpha in sys.simple_roots
    )
    return TorusFactor(simple_roots, grading, "principal")


def tensor_factor(grading: Sequence[int]) -> TorusFactor:
    return TorusFactor((), tuple(int(g) for g in grading), "tensor")


@dataclass(frozen=True)
class CocharacterWeighting:
    """The torus of a twisted diagonal A1: one twist per factor."""

    factors: tuple[TorusFactor, ...]
    twists: tuple[Twist, ...]

    def __post_init__(self) -> None:
        if len(self.factors) != len(self.twists):
            raise ValueError("one twist per factor required")

    @property
    def factor_roots(self) -> tuple[Root, ...]:
        return tuple(f.roots[0] for f in self.factors if f.kind == "root")

    @property
    def q(self) -> tuple[int, ...]:
        return tuple(t.value for t in self.twists)

    @classmethod
    def from_roots(cls, sys: RootSystem, roots: Sequence[Root], p: int, exponents: Sequence[int]) -> CocharacterWeighting:
        return cls(
            factors=tuple(root_factor(sys, r) for r in roots),
            twists=tuple(Twist(p, e) for e in exponents),
        )


def weight_tuple(cw: CocharacterWeighting, gamma: Root) -> tuple[int, ...]:
    """(⟨γ, μ_i⟩)_i over the factors."""
    return tuple(f.weight(gamma) for f in cw.factors)


def torus_weight(cw: CocharacterWeighting, gamma: Root) -> int:
    """Σ q_i ⟨γ, μ_i⟩: the weight of the diagonal torus on U_γ."""
    return sum(q * w for q, w in zip(cw.q, weight_tuple(cw, gamma), strict=True))


# =============================================================================
# Adjoint representation over GF(p^m)
# =============================================================================


def divided_powers(sc: StructureConstants, gamma: Root) -> list[np.ndarray]:
    """(ad e_γ)^k / k! over ℤ for k = 1, 2, … until zero."""
    e = sc.ad_matrix(gamma)
    powers = []
    current = e.copy()
    k = 1
    while np.any(current):
        powers.append(current)
        k += 1
        product = current @ e
        if np.any(product % k):
            raise CommutatorError(f"divided power {k} of ad e_{gamma} is not integral")
        current = product // k
    return powers


def adjoint_divided_powers(
    sc: StructureConstants, gamma: Root, GF: type[galois.FieldArray]
) -> list[galois.FieldArray]:
    return [from_int_matrix(GF, d) for d in divided_powers(sc, gamma)]


def adjoint_matrix(
    sc: StructureConstants,
    gamma: Root,
    t: galois.FieldArray,
    GF: Optional[type[galois.FieldArray]] = None,
    terms: Optional[Sequence[galois.FieldArray]] = None,
) -> galois.FieldArray:
    """x_γ(t) = Σ_k t^k (ad e_γ)^k / k! acting on L(G) ⊗ GF."""
    GF = GF or type(t)
    t = GF(t)
    if terms is None:
        terms = adjoint_divided_powers(sc, gamma, GF)
    result = GF.Identity(sc.dim)
    scale = GF(1)
    for d in terms:
        scale = scale * t
        result = result + scale * d
    return result


def adjoint_torus_matrix(
    sc: StructureConstants,
    weight: Callable[[Root], int],
    c: galois.FieldArray,
) -> galois.FieldArray:
    """Diagonal action c^weight(β) on e_β, trivial on the Cartan subalgebra."""
    GF = type(c)
    matrix = GF.Identity(sc.dim)
    inverse = c**-1
    for k, beta in enumerate(sc.sys.roots):
        w = weight(beta)
        matrix[k, k] = c**w if w >= 0 else inverse ** (-w)
    return matrix


def basis_vector(sc: StructureConstants, gamma: Root, GF: type[galois.FieldArray]) -> galois.FieldArray:
    v = GF.Zeros(sc.dim)
    v[sc.basis_index(gamma)] = 1
    return v


def cartan_vector(sc: StructureConstants, i: int, GF: type[galois.FieldArray]) -> galois.FieldArray:
    v = GF.Zeros(sc.dim)
    v[sc.cartan_index(i)] = 1
    return v


def bracket_vectors(sc: StructureConstants, u: galois.FieldArray, v: galois.FieldArray) -> galois.FieldArray:
    """[u, v] for vectors over a finite field."""
    GF = type(u)
    out = GF.Zeros(sc.dim)
    p = GF.characteristic
    for i in np.flatnonzero(u):
        for j in np.flatnonzero(v):
            coeff = u[i] * v[j]
            for k, value in sc.bracket_basis(int(i), int(j)).items():
                out[k] += coeff * GF(value % p)
    return out


def ad_closure_dim(
    sc: StructureConstants,
    seeds: Sequence[galois.FieldArray],
    operators: Sequence[galois.FieldArray],
    GF: type[galois.FieldArray],
) -> int:
    """
    Dimension of the smallest subspace of L(G) ⊗ GF containing the seeds and
    stable under every operator.

    Raises:
        ValueError: If a seed or operator does not match dim L(G)
    """
    dim = sc.dim
    for v in seeds:
        if v.shape != (dim,):
            raise ValueError(f"seed vector of shape {v.shape} does not match dim L = {dim}")
    for m in operators:
        if m.shape != (dim, dim):
            raise ValueError(f"operator of shape {m.shape} does not match dim L = {dim}")

    span = IncrementalSpan(GF, dim)
    queue = [w for w in (span.add(v) for v in seeds) if w is not None]
    while queue:
        v = queue.pop()
        for m in operators:
            w = span.add(m @ v)
            if w is not None:
                queue.append(w)
    return span.dim
