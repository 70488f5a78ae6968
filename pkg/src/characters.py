"""
Formal characters of Weyl modules and their restrictions.

Weights are tuples of Dynkin labels (coordinates over the fundamental
weights). Multiplicities come from Freudenthal's recursion in exact
rational arithmetic; restrictions go either to a subsystem (labels on the
subsystem's simple coroots) or to the one-dimensional torus of a twisted
diagonal A1.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

import sympy

from .cache import get_global_cache
from .chevalley import CocharacterWeighting
from .config import get_config
from .logging_config import get_logger
from .rootsys import Root, RootSystem, Subsystem, build_root_system, subsystem_closure

_logger = get_logger(__name__)

Weight = tuple[int, ...]


class CharacterError(ValueError):
    """Invalid highest weight or incompatible restriction."""


class CharacterTooLarge(CharacterError):
    def __init__(self, dim: int, limit: int):
        self.dim = dim
        self.limit = limit
        super().__init__(f"module of dimension {dim} exceeds the character guard {limit}")


class NotWeylCombination(CharacterError):
    """A character is not a nonnegative integer combination of Weyl characters."""


# =============================================================================
# Weight geometry
# =============================================================================


@dataclass(frozen=True)
class WeightGeometry:
    """Inner products and root data of one root system in Dynkin-label coordinates."""

    sys: RootSystem

    @cached_property
    def half_norms(self) -> tuple[int, ...]:
        return tuple(n // 2 for n in self.sys.simple_norms)

    @cached_property
    def inverse_gram(self) -> tuple[tuple[Fraction, ...], ...]:
        inv = sympy.Matrix(self.sys.gram).inv()
        n = self.sys.rank
        return tuple(tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)) for i in range(n))

    @cached_property
    def inverse_cartan(self) -> tuple[tuple[Fraction, ...], ...]:
        inv = sympy.Matrix(self.sys.cartan).inv()
        n = self.sys.rank
        return tuple(tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n)) for i in range(n))

    def inner(self, lam: Sequence[int], mu: Sequence[int]) -> Fraction:
        """(λ, μ) = (λ∘d)ᵀ B⁻¹ (μ∘d) with d_i = (α_i, α_i)/2."""
        d = self.half_norms
        g = self.inverse_gram
        n = self.sys.rank
        total = Fraction(0)
        for i in range(n):
            if lam[i]:
                li = lam[i] * d[i]
                for j in range(n):
                    if mu[j]:
                        total += li * g[i][j] * mu[j] * d[j]
        return total

    def root_labels(self, r: Root) -> Weight:
        """Dynkin labels of a root."""
        cartan = self.sys.cartan
        n = self.sys.rank
        return tuple(sum(r.coeffs[i] * cartan[i][j] for i in range(n)) for j in range(n))

    @cached_property
    def positive_root_labels(self) -> tuple[Weight, ...]:
        return tuple(self.root_labels(r) for r in self.sys.positive_roots)

    @cached_property
    def simple_root_labels(self) -> tuple[Weight, ...]:
        return tuple(tuple(row) for row in self.sys.cartan)

    def height(self, mu: Sequence[int]) -> Fraction:
        """Sum of the coordinates of μ over the simple roots."""
        inv = self.inverse_cartan
        n = self.sys.rank
        # μ = Σ c_k α_k with labels m = Aᵀc
        return sum((inv[j][k] * mu[j] for j in range(n) for k in range(n)), Fraction(0))

    def coweight_coordinates(self, grading: Sequence[int]) -> tuple[Fraction, ...]:
        """Coefficients over the simple coroots of the cocharacter with ⟨α_k, μ⟩ = grading[k]."""
        inv = self.inverse_cartan
        n = self.sys.rank
        return tuple(sum((inv[j][k] * grading[k] for k in range(n)), Fraction(0)) for j in range(n))


def geometry(sys: RootSystem) -> WeightGeometry:
    return get_global_cache().get_or_compute(
        "geometry",
        {"cartan": [list(r) for r in sys.cartan], "norms": list(sys.simple_norms)},
        lambda: WeightGeometry(sys),
    )


def fundamental_weight(sys: RootSystem, i: int) -> Weight:
    """λ_i (1-based)."""
    return tuple(1 if j == i - 1 else 0 for j in range(sys.rank))


def _check_dominant(sys: RootSystem, lam: Sequence[int]) -> Weight:
    lam = tuple(int(x) for x in lam)
    if len(lam) != sys.rank:
        raise CharacterError(f"weight {lam} does not have {sys.rank} labels")
    if any(x < 0 for x in lam):
        raise CharacterError(f"weight {lam} is not dominant")
    return lam


# =============================================================================
# Characters
# =============================================================================


@dataclass(frozen=True)
class FormalCharacter:
    """Weight multiset of a module; multiplicities are positive unless the character is virtual."""

    sys: RootSystem
    weights: Mapping[Weight, int]

    @property
    def dim(self) -> int:
        return sum(self.weights.values())

    def multiplicity(self, mu: Sequence[int]) -> int:
        return self.weights.get(tuple(mu), 0)

    def __add__(self, other: FormalCharacter) -> FormalCharacter:
        merged = Counter(self.weights)
        merged.update(other.weights)
        return FormalCharacter(self.sys, {w: m for w, m in merged.items() if m})

    def __sub__(self, other: FormalCharacter) -> FormalCharacter:
        merged = Counter(self.weights)
        merged.subtract(other.weights)
        return FormalCharacter(self.sys, {w: m for w, m in merged.items() if m})

    def is_weyl_symmetric(self) -> bool:
        """Invariance under each simple reflection."""
        simple = geometry(self.sys).simple_root_labels
        for mu, m in self.weights.items():
            for i, alpha in enumerate(simple):
                image = tuple(x - mu[i] * a for x, a in zip(mu, alpha))
                if self.weights.get(image, 0) != m:
                    return False
        return True


def weyl_dim(sys: RootSystem, lam: Sequence[int]) -> int:
    """
    Dimension of W(λ) by Weyl's formula.

    Raises:
        CharacterError: If λ is not dominant
    """
    lam = _check_dominant(sys, lam)
    numerator, denominator = 1, 1
    for r in sys.positive_roots:
        c = sys.coroot_coefficients(r)
        numerator *= sum(ci * (li + 1) for ci, li in zip(c, lam))
        denominator *= sum(c)
    return numerator // denominator


def _freudenthal(sys: RootSystem, lam: Weight) -> dict[Weight, int]:
    geo = geometry(sys)
    rho = tuple([1] * sys.rank)
    lam_rho = tuple(a + b for a, b in zip(lam, rho))
    top = geo.inner(lam_rho, lam_rho)
    positives = geo.positive_root_labels
    simple = geo.simple_root_labels

    mult: dict[Weight, int] = {lam: 1}
    layer = [lam]
    while layer:
        candidates: set[Weight] = set()
        for nu in layer:
            for alpha in simple:
                candidates.add(tuple(x - a for x, a in zip(nu, alpha)))
        next_layer = []
        for mu in sorted(candidates):
            mu_rho = tuple(a + b for a, b in zip(mu, rho))
            denom = top - geo.inner(mu_rho, mu_rho)
            if denom == 0:
                continue
            total = Fraction(0)
            for alpha in positives:
                k = 1
                shifted = tuple(x + a for x, a in zip(mu, alpha))
                while shifted in mult:
                    total += mult[shifted] * geo.inner(shifted, alpha)
                    k += 1
                    shifted = tuple(x + k * a for x, a in zip(mu, alpha))
            value = 2 * total / denom
            if value.denominator != 1:
                raise CharacterError(f"non-integral multiplicity {value} at {mu}")
            if value > 0:
                mult[mu] = int(value)
                next_layer.append(mu)
        layer = next_layer
    return mult


def formal_character(sys: RootSystem, lam: Sequence[int]) -> FormalCharacter:
    """
    Full weight multiset of W(λ).

    Raises:
        CharacterError: If λ is not dominant
        CharacterTooLarge: If dim W(λ) exceeds the configured guard
    """
    lam = _check_dominant(sys, lam)
    dim = weyl_dim(sys, lam)
    limit = get_config().character_dim_guard
    if dim > limit:
        _logger.log_guard_hit("character_dim_guard", limit, dim, system=sys.name)
        raise CharacterTooLarge(dim, limit)

    def compute() -> FormalCharacter:
        weights = _freudenthal(sys, lam)
        total = sum(weights.values())
        if total != dim:
            raise CharacterError(f"Freudenthal gave dimension {total}, Weyl's formula {dim}")
        return FormalCharacter(sys, weights)

    return get_global_cache().get_or_compute(
        "character",
        {"cartan": [list(r) for r in sys.cartan], "norms": list(sys.simple_norms), "lambda": list(lam)},
        compute,
    )


def sum_of_weyl_characters(sys: RootSystem, highest_weights: Sequence[Sequence[int]]) -> FormalCharacter:
    total = FormalCharacter(sys, {})
    for lam in highest_weights:
        total = total + formal_character(sys, lam)
    return total


# =============================================================================
# Restriction
# =============================================================================


@dataclass(frozen=True)
class EmbeddingMap:
    """Either a subsystem subgroup or the torus of a twisted diagonal A1."""

    kind: str  # "subsystem" or "twisted_diagonal_A1"
    subsystem: Optional[Subsystem] = None
    weighting: Optional[CocharacterWeighting] = None

    @classmethod
    def for_subsystem(cls, subsystem: Subsystem) -> EmbeddingMap:
        return cls("subsystem", subsystem=subsystem)

    @classmethod
    def for_weighting(cls, weighting: CocharacterWeighting) -> EmbeddingMap:
        return cls("twisted_diagonal_A1", weighting=weighting)


def _restrict_to_subsystem(char: FormalCharacter, sub: Subsystem) -> FormalCharacter:
    if sub.ambient.cartan != char.sys.cartan:
        raise CharacterError(f"subsystem of {sub.ambient.name} cannot restrict a character of {char.sys.name}")
    coroots = [char.sys.coroot_coefficients(s) for s in sub.simple_roots]
    target = sub.root_system()
    image: Counter[Weight] = Counter()
    for mu, m in char.weights.items():
        image[tuple(sum(c * x for c, x in zip(cv, mu)) for cv in coroots)] += m
    return FormalCharacter(target, dict(image))


def torus_weight_tuples(char: FormalCharacter, cw: CocharacterWeighting) -> Counter[tuple[int, ...]]:
    """Multiset of (⟨μ, μ_i⟩)_i over the factors of a cocharacter weighting."""
    geo = geometry(char.sys)
    coords = []
    for factor in cw.factors:
        if len(factor.grading) != char.sys.rank:
            raise CharacterError("weighting and character live on different ranks")
        coords.append(geo.coweight_coordinates(factor.grading))
    image: Counter[tuple[int, ...]] = Counter()
    for mu, m in char.weights.items():
        values = []
        for c in coords:
            value = sum((ci * x for ci, x in zip(c, mu)), Fraction(0))
            if value.denominator != 1:
                raise CharacterError(f"weight {mu} pairs non-integrally with a factor cocharacter")
            values.append(int(value))
        image[tuple(values)] += m
    return image


def twisted_restriction(char: FormalCharacter, cw: CocharacterWeighting) -> Counter[int]:
    """Multiset of Σ q_i ⟨μ, μ_i⟩: the weights of the diagonal torus."""
    q = cw.q
    image: Counter[int] = Counter()
    for values, m in torus_weight_tuples(char, cw).items():
        image[sum(a * b for a, b in zip(q, values))] += m
    return image


def restrict_character(char: FormalCharacter, emb: EmbeddingMap) -> Union[FormalCharacter, Counter[int]]:
    """
    Restrict along a subsystem (a character of the subsystem) or to a
    twisted diagonal A1 (an integer multiset).

    Raises:
        CharacterError: If the embedding does not belong to the character's system
    """
    if emb.kind == "subsystem" and emb.subsystem is not None:
        return _restrict_to_subsystem(char, emb.subsystem)
    if emb.kind == "twisted_diagonal_A1" and emb.weighting is not None:
        return twisted_restriction(char, emb.weighting)
    raise CharacterError(f"incomplete embedding of kind {emb.kind!r}")


def sl2_string(n: int) -> Counter[int]:
    """Weights n, n−2, …, −n."""
    return Counter(range(-n, n + 1, 2))


# =============================================================================
# Decomposition
# =============================================================================


def decompose_into_weyl(char: FormalCharacter) -> list[Weight]:
    """
    Highest weights D with char = Σ_{λ∈D} ch W(λ), by repeated subtraction of
    the character of a highest remaining weight.

    Raises:
        NotWeylCombination: If a subtraction leaves a negative multiplicity
    """
    geo = geometry(char.sys)
    remaining = dict(char.weights)
    found: list[Weight] = []
    while remaining:
        if any(m < 0 for m in remaining.values()):
            raise NotWeylCombination("character has negative multiplicities")
        top = max(remaining, key=lambda mu: (geo.height(mu), mu))
        if any(x < 0 for x in top):
            raise NotWeylCombination(f"maximal weight {top} is not dominant")
        found.append(top)
        for mu, m in formal_character(char.sys, top).weights.items():
            left = remaining.get(mu, 0) - m
            if left < 0:
                raise NotWeylCombination(f"subtracting W{top} leaves multiplicity {left} at {mu}")
            if left:
                remaining[mu] = left
            else:
                remaining.pop(mu, None)
    found.sort(key=lambda w: (-geo.height(w), w))
    return found


# =============================================================================
# Branching suite
# =============================================================================


@dataclass(frozen=True)
class BranchingIdentity:
    """
    A restriction W_G(λ)↓H = ⊕ W_H(μ).

    ``expected`` lists the μ in the labels of H's simple roots, which are
    the ``seeds`` in order. When it is empty, only the summand dimensions
    in ``expected_dims`` are compared.
    """

    name: str
    type_label: str
    rank: int
    highest_weight: Weight
    seeds: tuple[str, ...]
    expected: tuple[Weight, ...] = ()
    expected_dims: tuple[int, ...] = ()
    dual_pair: bool = False


@dataclass(frozen=True)
class BranchingResult:
    identity: BranchingIdentity
    subsystem_type: str
    found: tuple[Weight, ...]
    dims: tuple[int, ...]
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.identity.name,
            "group": f"{self.identity.type_label}{self.identity.rank}",
            "subsystem": self.subsystem_type,
            "found": [list(w) for w in self.found],
            "dims": list(self.dims),
            "passed": self.passed,
            "detail": self.detail,
        }


def _alpha0(type_label: str, rank: int) -> str:
    return (-build_root_system(type_label, rank).highest_root).label


def branching_identities() -> list[BranchingIdentity]:
    e6_low = _alpha0("E", 6)
    e7_low = _alpha0("E", 7)
    e8_low = _alpha0("E", 8)
    return [
        BranchingIdentity(
            "V26 of F4 to B4", "F", 4, (0, 0, 0, 1), ("-2342", "1000", "0100", "0010"),
            expected=((1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 0, 0)),
        ),
        BranchingIdentity(
            "L(F4) to B4", "F", 4, (1, 0, 0, 0), ("-2342", "1000", "0100", "0010"),
            expected=((0, 1, 0, 0), (0, 0, 0, 1)),
        ),
        BranchingIdentity(
            "L(B4) to D4", "B", 4, (0, 1, 0, 0), ("1000", "0100", "0010", "0012"),
            expected=((0, 1, 0, 0), (1, 0, 0, 0)),
        ),
        BranchingIdentity(
            "L(B6) to D6", "B", 6, (0, 1, 0, 0, 0, 0),
            ("100000", "010000", "001000", "000100", "000010", "000012"),
            expected=((0, 1, 0, 0, 0, 0), (1, 0, 0, 0, 0, 0)),
        ),
        BranchingIdentity(
            "L(E6) to A2^3", "E", 6, (0, 1, 0, 0, 0, 0),
            ("100000", "001000", "000010", "000001", "010000", e6_low),
            expected_dims=(27, 27, 8, 8, 8),
            dual_pair=True,
        ),
        BranchingIdentity(
            "V56 of E7 to A1D6", "E", 7, (0, 0, 0, 0, 0, 0, 1),
            (e7_low, "0000001", "0000010", "0000100", "0001000", "0010000", "0100000"),
            expected=((0, 0, 0, 0, 0, 0, 1), (1, 1, 0, 0, 0, 0, 0)),
        ),
        BranchingIdentity(
            "L(E7) to A1D6", "E", 7, (1, 0, 0, 0, 0, 0, 0),
            (e7_low, "0000001", "0000010", "0000100", "0001000", "0010000", "0100000"),
            expected=((2, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0, 0), (1, 0, 0, 0, 0, 1, 0)),
        ),
        BranchingIdentity(
            "L(E8) to D8", "E", 8, (0, 0, 0, 0, 0, 0, 0, 1),
            (e8_low, "00000001", "00000010", "00000100", "00001000", "00010000", "00100000", "01000000"),
            expected=((0, 0, 0, 0, 0, 0, 1, 0), (0, 1, 0, 0, 0, 0, 0, 0)),
        ),
    ]


def branch(sys: RootSystem, lam: Sequence[int], sub: Subsystem) -> tuple[FormalCharacter, list[Weight]]:
    restricted = restrict_character(formal_character(sys, lam), EmbeddingMap.for_subsystem(sub))
    return restricted, decompose_into_weyl(restricted)


def _dual_in_a2_components(w: Weight, v: Weight) -> bool:
    return all(w[k] == v[k + 1] and w[k + 1] == v[k] for k in range(0, len(w), 2))


def check_branching(identity: BranchingIdentity) -> BranchingResult:
    sys = build_root_system(identity.type_label, identity.rank)
    sub = subsystem_closure(sys, [sys.root(s) for s in identity.seeds])
    restricted, found = branch(sys, identity.highest_weight, sub)
    target = restricted.sys
    dims = tuple(weyl_dim(target, w) for w in found)

    detail = ""
    if identity.expected:
        passed = sorted(found) == sorted(identity.expected)
        if not passed:
            detail = f"expected {sorted(identity.expected)}"
    else:
        passed = sorted(dims, reverse=True) == sorted(identity.expected_dims, reverse=True)
        if passed and identity.dual_pair:
            big = [w for w, d in zip(found, dims) if d == max(dims)]
            passed = len(big) == 2 and _dual_in_a2_components(big[0], big[1])
            if not passed:
                detail = "largest summands are not dual to each other"
        elif not passed:
            detail = f"expected dimensions {sorted(identity.expected_dims, reverse=True)}"
    if sum(dims) != restricted.dim:
        passed = False
        detail = "summand dimensions do not add up"

    _logger.debug("Branching identity checked", identity=identity.name, passed=passed)
    return BranchingResult(identity, sub.type_name, tuple(found), dims, passed, detail)


def run_branching_suite(names: Optional[Sequence[str]] = None) -> list[BranchingResult]:
    identities = branching_identities()
    if names is not None:
        identities = [i for i in identities if i.name in names]
    return [check_branching(i) for i in identities]
