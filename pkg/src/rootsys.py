"""
Root systems of the simple types, subsystems and diagram symmetries.

Roots are integer coefficient vectors over the simple roots, numbered the
Bourbaki way: in F4 the label "2342" is 2α1 + 3α2 + 4α3 + 2α4 and is the
highest root. Squared lengths are normalized so that the Gram matrix of the
simple roots is integral: 2 for simply-laced types, 4/2 for long/short roots
of B, C and F, and 6/2 for G2.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import sympy

from .cache import get_global_cache
from .logging_config import get_logger

_logger = get_logger(__name__)

VALID_TYPES = ("A", "B", "C", "D", "E", "F", "G")
MAX_RANK = 8

_COXETER = {
    "E6": 12,
    "E7": 18,
    "E8": 30,
    "F4": 12,
    "G2": 6,
}


class RootSystemError(ValueError):
    """Invalid type/rank, non-root input, dependent seeds or non-finite Cartan data."""


@dataclass(frozen=True)
class Root:
    """A vector of the root lattice written over the simple roots."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    @property
    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (self.height, self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs) and not self.is_zero()

    def __add__(self, other: Root) -> Root:
        return Root(tuple(a + b for a, b in zip(self.coeffs, other.coeffs, strict=True)))

    def __sub__(self, other: Root) -> Root:
        return Root(tuple(a - b for a, b in zip(self.coeffs, other.coeffs, strict=True)))

    def __neg__(self) -> Root:
        return Root(tuple(-c for c in self.coeffs))

    def __mul__(self, k: int) -> Root:
        return Root(tuple(k * c for c in self.coeffs))

    __rmul__ = __mul__

    @property
    def label(self) -> str:
        """Compact label: "2342", "-0122", or comma separated when a digit would not do."""
        if self.is_zero():
            return "0" * self.rank
        if all(0 <= c <= 9 for c in self.coeffs):
            return "".join(str(c) for c in self.coeffs)
        if all(-9 <= c <= 0 for c in self.coeffs):
            return "-" + (-self).label
        return ",".join(str(c) for c in self.coeffs)

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, text: str) -> Root:
        """Inverse of ``label``."""
        text = text.strip()
        if "," in text:
            return cls(tuple(int(part) for part in text.split(",")))
        sign = 1
        if text.startswith("-"):
            sign, text = -1, text[1:]
        if not text.isdigit():
            raise RootSystemError(f"cannot parse root label {text!r}")
        return cls(tuple(sign * int(ch) for ch in text))

    @classmethod
    def simple(cls, rank: int, index: int) -> Root:
        """The simple root α_index (1-based)."""
        if not 1 <= index <= rank:
            raise RootSystemError(f"simple root index {index} outside 1..{rank}")
        return cls(tuple(1 if i == index - 1 else 0 for i in range(rank)))


class ComponentType(NamedTuple):
    """One Dynkin component of a subsystem; ``length`` is relative to the ambient system."""

    type_label: str
    rank: int
    length: str  # "long", "short" or "mixed"

    @property
    def name(self) -> str:
        # Ã marks a simply-laced component made of short roots
        tilde = "̃" if self.length == "short" and self.type_label in "ADE" else ""
        return f"{self.type_label}{tilde}{self.rank}"


@dataclass(frozen=True)
class RootSystem:
    """
    Root datum built from a Cartan matrix.

    ``cartan[i][j]`` is ⟨α_i, α_j∨⟩. Simple systems carry their highest root
    and Coxeter number; semisimple systems built from a subsystem leave both
    as ``None``.
    """

    type_label: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    simple_norms: tuple[int, ...]
    roots: tuple[Root, ...]
    highest_root: Optional[Root]
    coxeter_number: Optional[int]

    @cached_property
    def name(self) -> str:
        if len(self.type_label) == 1:
            return f"{self.type_label}{self.rank}"
        return self.type_label

    @cached_property
    def gram(self) -> tuple[tuple[int, ...], ...]:
        """(α_i, α_j) in the normalization described in the module docstring."""
        n = self.rank
        return tuple(
            tuple(self.cartan[i][j] * self.simple_norms[j] // 2 for j in range(n))
            for i in range(n)
        )

    @cached_property
    def root_set(self) -> frozenset[Root]:
        return frozenset(self.roots)

    @cached_property
    def index(self) -> dict[Root, int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if r.height > 0)

    @cached_property
    def simple_roots(self) -> tuple[Root, ...]:
        return tuple(Root.simple(self.rank, i + 1) for i in range(self.rank))

    @cached_property
    def max_norm(self) -> int:
        return max(self.simple_norms)

    @cached_property
    def length_map(self) -> dict[Root, str]:
        return {r: ("long" if self.norm(r) == self.max_norm else "short") for r in self.roots}

    def simple_root(self, index: int) -> Root:
        """α_index with the Bourbaki 1-based numbering."""
        return Root.simple(self.rank, index)

    def inner(self, u: Root, v: Root) -> int:
        g = self.gram
        return sum(
            u.coeffs[i] * g[i][j] * v.coeffs[j]
            for i in range(self.rank)
            if u.coeffs[i]
            for j in range(self.rank)
            if v.coeffs[j]
        )

    def norm(self, r: Root) -> int:
        return self.inner(r, r)

    def is_long(self, r: Root) -> bool:
        return self.norm(r) == self.max_norm

    def coroot_coefficients(self, r: Root) -> tuple[int, ...]:
        """Coefficients of r∨ over the simple coroots."""
        n = self.norm(r)
        return tuple(c * self.simple_norms[i] // n for i, c in enumerate(r.coeffs))

    def __contains__(self, item: object) -> bool:
        return isinstance(item, Root) and item in self.root_set

    def root(self, label: str | Sequence[int]) -> Root:
        """Parse a label or coefficient sequence and insist that it is a root."""
        r = Root.parse(label) if isinstance(label, str) else Root(tuple(label))
        if r not in self.root_set:
            raise RootSystemError(f"{r} is not a root of {self.name}")
        return r

    @classmethod
    def from_cartan(
        cls,
        cartan: Sequence[Sequence[int]],
        simple_norms: Sequence[int],
        type_label: str,
    ) -> RootSystem:
        """Generate all roots from a finite-type Cartan matrix by α-strings."""
        n = len(cartan)
        cartan_t = tuple(tuple(int(x) for x in row) for row in cartan)
        positives = _positive_roots_from_cartan(cartan_t)
        roots = sorted(
            [Root(c) for c in positives] + [Root(tuple(-x for x in c)) for c in positives],
            key=lambda r: r.sort_key,
        )
        return cls(
            type_label=type_label,
            rank=n,
            cartan=cartan_t,
            simple_norms=tuple(int(x) for x in simple_norms),
            roots=tuple(roots),
            highest_root=None,
            coxeter_number=None,
        )


def _positive_roots_from_cartan(cartan: tuple[tuple[int, ...], ...]) -> list[tuple[int, ...]]:
    n = len(cartan)
    simple = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    found = set(simple)
    layer = list(simple)
    ordered = list(simple)
    while layer:
        next_layer: list[tuple[int, ...]] = []
        for beta in layer:
            for i in range(n):
                # q: how far the α_i-string through β extends downwards
                q = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in found:
                        q += 1
                    else:
                        break
                pairing = sum(beta[j] * cartan[j][i] for j in range(n))
                if q - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up_t = tuple(up)
                    if up_t not in found:
                        found.add(up_t)
                        next_layer.append(up_t)
                        ordered.append(up_t)
        layer = next_layer
        if len(found) > 10_000:
            raise RootSystemError("Cartan matrix is not of finite type")
    return ordered


def _dynkin_data(type_label: str, rank: int) -> tuple[list[int], list[tuple[int, int]]]:
    """Squared lengths and bonds of the Dynkin diagram (0-based nodes)."""
    chain = [(i, i + 1) for i in range(rank - 1)]
    if type_label == "A":
        return [2] * rank, chain
    if type_label == "B":
        return [4] * (rank - 1) + [2], chain
    if type_label == "C":
        return [2] * (rank - 1) + [4], chain
    if type_label == "D":
        edges = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
        return [2] * rank, edges
    if type_label == "E":
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(i, i + 1) for i in range(4, rank - 1)]
        return [2] * rank, edges
    if type_label == "F":
        return [4, 4, 2, 2], chain
    if type_label == "G":
        return [2, 6], chain
    raise RootSystemError(f"unknown type {type_label!r}")


def _check_type(type_label: str, rank: int) -> None:
    valid = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }
    if type_label not in valid:
        raise RootSystemError(f"unknown type {type_label!r}; expected one of {', '.join(VALID_TYPES)}")
    if rank > MAX_RANK or not valid[type_label]:
        raise RootSystemError(f"{type_label}{rank} is not a valid simple type of rank at most {MAX_RANK}")


def expected_root_count(type_label: str, rank: int) -> int:
    """Number of roots of a simple type."""
    l = rank
    return {
        "A": l * (l + 1),
        "B": 2 * l * l,
        "C": 2 * l * l,
        "D": 2 * l * (l - 1),
        "E": {6: 72, 7: 126, 8: 240}.get(l, 0),
        "F": 48,
        "G": 12,
    }[type_label]


def coxeter_number(type_label: str, rank: int) -> int:
    l = rank
    if type_label == "A":
        return l + 1
    if type_label in ("B", "C"):
        return 2 * l
    if type_label == "D":
        return 2 * l - 2
    return _COXETER[f"{type_label}{rank}"]


def cartan_from_norms(norms: Sequence[int], edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    n = len(norms)
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        gram[i][i] = norms[i]
    for i, j in edges:
        bond = -max(norms[i], norms[j]) // 2
        gram[i][j] = gram[j][i] = bond
    return [[2 * gram[i][j] // gram[j][j] for j in range(n)] for i in range(n)]


def _build_root_system(type_label: str, rank: int) -> RootSystem:
    norms, edges = _dynkin_data(type_label, rank)
    base = RootSystem.from_cartan(cartan_from_norms(norms, edges), norms, type_label)

    expected = expected_root_count(type_label, rank)
    if len(base.roots) != expected:
        raise RootSystemError(
            f"{type_label}{rank}: generated {len(base.roots)} roots, expected {expected}"
        )
    top = max(base.positive_roots, key=lambda r: r.height)
    h = coxeter_number(type_label, rank)
    # |Φ| = h·l for every irreducible system
    if h * rank != len(base.roots):
        raise RootSystemError(f"{type_label}{rank}: Coxeter number {h} inconsistent with root count")

    _logger.debug("Root system generated", type_label=type_label, rank=rank, roots=len(base.roots))
    return RootSystem(
        type_label=type_label,
        rank=rank,
        cartan=base.cartan,
        simple_norms=base.simple_norms,
        roots=base.roots,
        highest_root=top,
        coxeter_number=h,
    )


def build_root_system(type_label: str, rank: int) -> RootSystem:
    """
    Build the root system of a simple type.

    Args:
        type_label: One of A..G
        rank: Rank, at most 8

    Returns:
        RootSystem with roots ordered by (height, coefficients)

    Raises:
        RootSystemError: If (type_label, rank) is not a simple type
    """
    type_label = type_label.upper()
    _check_type(type_label, rank)
    return get_global_cache().get_or_compute(
        "rootsys",
        {"type": type_label, "rank": rank},
        lambda: _build_root_system(type_label, rank),
    )


def is_root(sys: RootSystem, v: Sequence[int] | Root) -> bool:
    """True iff v is a root of sys; vectors of the wrong length are never roots."""
    coeffs = v.coeffs if isinstance(v, Root) else tuple(v)
    if len(coeffs) != sys.rank:
        return False
    return Root(coeffs) in sys.root_set


def _require_roots(sys: RootSystem, *roots: Root) -> None:
    for r in roots:
        if r not in sys.root_set:
            raise RootSystemError(f"{r} is not a root of {sys.name}")


def pairing(sys: RootSystem, gamma: Root, delta: Root) -> int:
    """⟨γ, δ∨⟩ = 2(γ, δ)/(δ, δ)."""
    _require_roots(sys, gamma, delta)
    return 2 * sys.inner(gamma, delta) // sys.norm(delta)


def reflect(sys: RootSystem, r: Root, v: Root) -> Root:
    """s_r(v) = v − ⟨v, r∨⟩ r for a root-lattice vector v."""
    return v - r * (2 * sys.inner(v, r) // sys.norm(r))


@dataclass(frozen=True)
class Subsystem:
    """A root subsystem of an ambient system, with an ordered base."""

    ambient: RootSystem
    simple_roots: tuple[Root, ...]
    closed_roots: frozenset[Root]
    component_types: tuple[ComponentType, ...]

    def __contains__(self, item: object) -> bool:
        return item in self.closed_roots

    @cached_property
    def type_name(self) -> str:
        counts: dict[str, int] = {}
        for comp in self.component_types:
            counts[comp.name] = counts.get(comp.name, 0) + 1
        return "".join(name if k == 1 else f"{name}^{k}" for name, k in counts.items())

    @cached_property
    def cartan(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(pairing(self.ambient, a, b) for b in self.simple_roots) for a in self.simple_roots
        )

    def root_system(self) -> RootSystem:
        """The subsystem as an abstract root system, coordinates over ``simple_roots``."""
        norms = [self.ambient.norm(r) for r in self.simple_roots]
        return RootSystem.from_cartan(self.cartan, norms, self.type_name)


def _linearly_independent(roots: Sequence[Root]) -> bool:
    if not roots:
        return True
    return sympy.Matrix([list(r.coeffs) for r in roots]).rank() == len(roots)


def reflection_closure(sys: RootSystem, seeds: Sequence[Root]) -> frozenset[Root]:
    """Smallest set containing ±seeds and stable under the reflections it contains."""
    closed = set(seeds) | {-s for s in seeds}
    frontier = list(closed)
    while frontier:
        new: list[Root] = []
        for r in list(closed):
            for s in frontier:
                for image in (reflect(sys, r, s), reflect(sys, s, r)):
                    if image not in closed:
                        closed.add(image)
                        new.append(image)
        frontier = new
    return frozenset(closed)


def additive_closure(sys: RootSystem, seeds: Sequence[Root]) -> frozenset[Root]:
    """Smallest symmetric set containing ±seeds and every ambient root r + s with r, s inside."""
    closed = set(seeds) | {-s for s in seeds}
    frontier = list(closed)
    while frontier:
        new: list[Root] = []
        for r in list(closed):
            for s in frontier:
                total = r + s
                if total in sys.root_set and total not in closed:
                    closed.add(total)
                    closed.add(-total)
                    new.extend([total, -total])
        frontier = new
    return frozenset(closed)


def _base_of(sys: RootSystem, closed: frozenset[Root]) -> tuple[Root, ...]:
    positive = [r for r in closed if r.height > 0]
    positive_set = set(positive)
    base = [
        r
        for r in positive
        if not any((r - s) in positive_set for s in positive if s != r)
    ]
    return tuple(sorted(base, key=lambda r: r.sort_key))


def subsystem_closure(
    sys: RootSystem,
    seeds: Sequence[Root],
    mode: str = "reflection",
) -> Subsystem:
    """
    Close a set of seed roots into a subsystem and classify it.

    The default mode closes under reflections, so it returns the root
    subsystem the seeds generate; with linearly independent, pairwise
    obtuse seeds those seeds are its base, in the given order. ``mode="additive"``
    closes under sums that are ambient roots instead, which is the closed
    subset whose root groups generate a subgroup away from special
    characteristics.

    Raises:
        RootSystemError: For non-roots or linearly dependent seeds
    """
    seeds = tuple(seeds)
    _require_roots(sys, *seeds)
    if not _linearly_independent(seeds):
        raise RootSystemError("subsystem seeds are linearly dependent")

    if mode == "reflection":
        closed = reflection_closure(sys, seeds)
    elif mode == "additive":
        closed = additive_closure(sys, seeds)
    else:
        raise RootSystemError(f"unknown closure mode {mode!r}")

    obtuse = all(
        sys.inner(a, b) <= 0 for i, a in enumerate(seeds) for b in seeds[i + 1 :]
    )
    if obtuse and mode == "reflection":
        simple = seeds
    else:
        simple = _base_of(sys, closed)

    return Subsystem(
        ambient=sys,
        simple_roots=tuple(simple),
        closed_roots=closed,
        component_types=tuple(classify_cartan_type(sys, simple)),
    )


def _components(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(matrix)
    seen: set[int] = set()
    comps: list[list[int]] = []
    for start in range(n):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if j not in seen and (matrix[i][j] or matrix[j][i]):
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _classify_component(
    cartan: Sequence[Sequence[int]], nodes: list[int], norms: Sequence[int]
) -> tuple[str, int]:
    n = len(nodes)
    if n == 1:
        return ("A", 1)
    sub = [[cartan[i][j] for j in nodes] for i in nodes]
    if sympy.Matrix(sub).det() <= 0 or any(
        sympy.Matrix([row[:k] for row in sub[:k]]).det() <= 0 for k in range(1, n)
    ):
        raise RootSystemError("Cartan matrix is not of finite type")

    adjacency = {i: [j for j in range(n) if j != i and sub[i][j]] for i in range(n)}
    edges = sum(len(v) for v in adjacency.values()) // 2
    if edges != n - 1:
        raise RootSystemError("Dynkin diagram has a cycle")
    multiplicity = max(sub[i][j] * sub[j][i] for i in range(n) for j in range(n) if i != j)

    if multiplicity == 3:
        return ("G", 2)

    degrees = {i: len(adjacency[i]) for i in range(n)}
    if multiplicity == 2:
        ends = [i for i in range(n) if degrees[i] == 1]
        path = _walk_path(adjacency, ends[0])
        double = next(
            k for k in range(n - 1) if sub[path[k]][path[k + 1]] * sub[path[k + 1]][path[k]] == 2
        )
        if n == 2:
            return ("B", 2)
        if double in (0, n - 2):
            end = path[0] if double == 0 else path[-1]
            end_norm = norms[nodes[end]]
            other_norm = norms[nodes[path[1] if double == 0 else path[-2]]]
            return ("B", n) if end_norm < other_norm else ("C", n)
        if n == 4:
            return ("F", 4)
        raise RootSystemError("double bond in the middle of a long chain is not of finite type")

    branch = [i for i in range(n) if degrees[i] == 3]
    if not branch:
        return ("A", n)
    if len(branch) > 1 or any(d > 3 for d in degrees.values()):
        raise RootSystemError("Dynkin diagram is not of finite type")
    center = branch[0]
    arms = []
    for start in adjacency[center]:
        length, prev, node = 1, center, start
        while degrees[node] == 2:
            nxt = next(x for x in adjacency[node] if x != prev)
            prev, node = node, nxt
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return ("D", n)
    if arms == [1, 2, 2]:
        return ("E", 6)
    if arms == [1, 2, 3]:
        return ("E", 7)
    if arms == [1, 2, 4]:
        return ("E", 8)
    raise RootSystemError("Dynkin diagram is not of finite type")


def _walk_path(adjacency: Mapping[int, list[int]], start: int) -> list[int]:
    path, prev = [start], None
    node = start
    while True:
        nxt = [x for x in adjacency[node] if x != prev]
        if not nxt:
            return path
        prev, node = node, nxt[0]
        path.append(node)


def classify_cartan_type(sys: RootSystem, simple_roots: Sequence[Root]) -> list[ComponentType]:
    """
    Classify the Dynkin components spanned by a set of simple roots.

    Components are listed in the order of their first simple root. B2 is
    reported as type B.

    Raises:
        RootSystemError: If the pairings do not form a finite-type Cartan matrix
    """
    simple_roots = list(simple_roots)
    _require_roots(sys, *simple_roots)
    cartan = [[pairing(sys, a, b) for b in simple_roots] for a in simple_roots]
    norms = [sys.norm(r) for r in simple_roots]
    result: list[ComponentType] = []
    for comp in _components(cartan):
        type_label, rank = _classify_component(cartan, comp, norms)
        long_flags = {sys.is_long(simple_roots[i]) for i in comp}
        if long_flags == {True}:
            length = "long"
        elif long_flags == {False}:
            length = "short"
        else:
            length = "mixed"
        result.append(ComponentType(type_label, rank, length))
    return result


STANDARD_SYMMETRIES: dict[str, tuple[int, ...]] = {
    "E6": (6, 2, 5, 4, 3, 1),
}


def standard_symmetry(sys: RootSystem) -> tuple[int, ...]:
    """The order-two diagram symmetry of A_l, D_l and E6 (1-based images)."""
    l = sys.rank
    if sys.type_label == "A":
        return tuple(l - i for i in range(l))
    if sys.type_label == "D":
        images = list(range(1, l + 1))
        images[l - 2], images[l - 1] = l, l - 1
        return tuple(images)
    if sys.name in STANDARD_SYMMETRIES:
        return STANDARD_SYMMETRIES[sys.name]
    raise RootSystemError(f"{sys.name} has no non-trivial diagram symmetry")


def graph_automorphism(sys: RootSystem, diagram_symmetry: Sequence[int]) -> dict[Root, Root]:
    """
    Extend a Dynkin diagram symmetry linearly to a permutation of the roots.

    Args:
        sys: Ambient system
        diagram_symmetry: 1-based image of each simple root, so (3, 2, 1)
            swaps α1 and α3 in A3

    Raises:
        RootSystemError: If the map is not a symmetry of the Cartan matrix
    """
    sigma = [int(x) - 1 for x in diagram_symmetry]
    n = sys.rank
    if sorted(sigma) != list(range(n)):
        raise RootSystemError("diagram symmetry must permute the simple roots")
    for i in range(n):
        for j in range(n):
            if sys.cartan[sigma[i]][sigma[j]] != sys.cartan[i][j]:
                raise RootSystemError("map does not preserve the Cartan matrix")

    def image(r: Root) -> Root:
        coeffs = [0] * n
        for i, c in enumerate(r.coeffs):
            coeffs[sigma[i]] = c
        return Root(tuple(coeffs))

    return {r: image(r) for r in sys.roots}
