"""
Witness certificates: case-by-case builders and the verifier.

A certificate names a twisted diagonal A1 subgroup J (its torus as a
``CocharacterWeighting``), a one-dimensional unipotent group Y normalized by
a Borel subgroup of J, and possibly further unipotent groups Z. The claim is
that B_J·Y·Z is epimorphic in G; ``verify_witness`` replays every part of
that claim that can be checked exactly.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Any, Optional

import anyio
import anyio.to_thread
import galois
import numpy as np
import sympy

from .characters import (
    CharacterError,
    formal_character,
    geometry,
    run_branching_suite,
    sl2_string,
    torus_weight_tuples,
    twisted_restriction,
)
from .chevalley import (
    CocharacterWeighting,
    TorusFactor,
    Twist,
    ad_closure_dim,
    adjoint_divided_powers,
    adjoint_matrix,
    adjoint_torus_matrix,
    basis_vector,
    build_structure_constants,
    commutator_coefficients,
    folded_factor,
    principal_factor,
    root_factor,
    tensor_factor,
    torus_weight,
    weight_tuple,
)
from .config import get_config
from .fields import make_field, sample_elements
from .logging_config import get_logger
from .repmat import (
    ClassicalModel,
    OneParameterFamily,
    RepresentationError,
    UnipotentFactor,
    block_links,
    burnside_span_dim,
    classical_model,
    combined_grading,
    components,
    field_degree_for,
    folded_orthogonal_forms,
    invariant_form_dim,
    is_identity,
    jordan_type,
    maximal_vector_coefficients,
    normalizes,
    preserves_quadratic_form,
    principal_a1,
    strongly_connected,
    twisted_diagonal_a1,
)
from .rootsys import Root, RootSystem, RootSystemError, build_root_system, coxeter_number, subsystem_closure
from .torus import certificate_passes, density_certificate, exponent_matrix
from .utils import format_partition

_logger = get_logger(__name__)


class UncoveredCase(ValueError):
    """No construction covers the requested (type, rank, p)."""

    def __init__(self, kind: str, message: str, redirect: Optional[tuple[str, int]] = None):
        self.kind = kind  # "redirect" or "out_of_scope"
        self.redirect = redirect
        super().__init__(message)


# =============================================================================
# Certificates
# =============================================================================


@dataclass(frozen=True)
class Factor:
    """x_root(coefficient · t^(p^twist)): one factor of a unipotent one-parameter group."""

    root: Root
    coefficient: int = 1
    twist: int = 0


@dataclass
class WitnessCertificate:
    type_label: str
    rank: int
    p: int
    a: int
    case_tag: str
    j_data: CocharacterWeighting
    y_data: tuple[Factor, ...]
    z_data: tuple[tuple[Factor, ...], ...] = ()
    claimed_dim: int = 3
    torus_family: str = "s"
    a_list: tuple[int, ...] = (1,)
    seed: int = 0
    annotations: dict[str, Any] = field(default_factory=dict)
    # T_a-weight of each group at twist 0, in groups() order
    claimed_weights: tuple[Fraction, ...] = ()

    @property
    def group(self) -> str:
        return f"{self.type_label}{self.rank}"

    @property
    def sys(self) -> RootSystem:
        return build_root_system(self.type_label, self.rank)

    def groups(self) -> list[tuple[str, tuple[Factor, ...]]]:
        """The unipotent groups beyond B_J, named Y, Z, Z2, …"""
        named = [("Y", self.y_data)]
        for k, z in enumerate(self.z_data):
            named.append(("Z" if k == 0 else f"Z{k + 1}", z))
        return named

    def all_factors(self) -> list[Factor]:
        return [f for _, factors in self.groups() for f in factors]

    def to_dict(self) -> dict[str, Any]:
        from .schemas import certificate_to_dict

        return certificate_to_dict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WitnessCertificate:
        """
        Raises:
            CertificateSchemaError: If data violates the certificate schema
        """
        from .schemas import certificate_from_dict

        return certificate_from_dict(data)


# construction dimension per case
CASE_DIMENSIONS: dict[str, int] = {
    "C_l": 3,
    "D_l even": 3,
    "D_l odd": 5,
    "B_3 p odd": 3,
    "B_l odd p odd": 4,
    "B_l even p odd": 4,
    "A_l odd": 4,
    "A_l even p odd": 4,
    "A_l even p=2": 4,
    "F4 p=2": 3,
    "F4 p odd": 3,
    "E6 p odd": 4,
    "E6 p=2": 4,
    "E7 p odd": 3,
    "E7 p=2": 3,
    "E8 p odd": 3,
    "E8 p=2": 3,
    "principal": 3,
}

CLASSICAL_CASES = frozenset(
    tag for tag in CASE_DIMENSIONS if tag[0] in "ABCD" and tag != "principal"
)


def table_dimension(type_label: str, rank: int, p: int) -> int:
    """The dimension listed in the published table of smallest known epimorphic subgroups."""
    if type_label == "A" and rank == 1:
        return 2
    if rank == 2:
        return 3
    if type_label == "A" or (type_label == "B" and p != 2):
        return 4
    if type_label == "D" and rank % 2 and rank % 6 != 3:
        return 5
    if type_label == "E" and rank == 6 and p == 2:
        return 4
    return 3


# =============================================================================
# Root search
# =============================================================================


def find_roots_with_torus_weight(sys: RootSystem, cw: CocharacterWeighting, target: Sequence[int]) -> list[Root]:
    """All roots whose weight tuple under the factors of cw equals target, in root order."""
    target = tuple(target)
    return [r for r in sys.roots if weight_tuple(cw, r) == target]


def _resolve(
    sys: RootSystem,
    cw: CocharacterWeighting,
    target: Sequence[int],
    count: int = 1,
    long_only: bool = False,
    outside: Optional[Sequence[Root]] = None,
    maximal_for: Optional[Sequence[Root]] = None,
) -> tuple[list[Root], dict[str, Any]]:
    """
    Resolve roots from a weight condition and record how.

    Raises:
        RootSystemError: If fewer than ``count`` roots survive the filters
    """
    candidates = find_roots_with_torus_weight(sys, cw, target)
    filters = []
    if long_only:
        candidates = [r for r in candidates if sys.is_long(r)]
        filters.append("long")
    if outside is not None:
        closed = subsystem_closure(sys, outside)
        candidates = [r for r in candidates if r not in closed]
        filters.append("outside subsystem")
    if maximal_for is not None:
        candidates = [r for r in candidates if all((r + s) not in sys.root_set for s in maximal_for)]
        filters.append("maximal")
    if len(candidates) < count:
        raise RootSystemError(
            f"weight {tuple(target)} has {len(candidates)} admissible roots in {sys.name}, need {count}"
        )
    chosen = candidates[:count]
    record = {
        "target": list(target),
        "filters": filters,
        "candidates": [r.label for r in candidates],
        "chosen": [r.label for r in chosen],
        "long_only": long_only,
        "outside": None if outside is None else [r.label for r in outside],
        "maximal_for": None if maximal_for is None else [r.label for r in maximal_for],
    }
    return chosen, record


def _unit(width: int, *indices: int, value: int = 1) -> tuple[int, ...]:
    v = [0] * width
    for i in indices:
        v[i] += value
    return tuple(v)


def _exponents(count: int, a: int) -> list[int]:
    return [a * k for k in range(count)]


def _a_list(r: int, a: int) -> tuple[int, ...]:
    return tuple(range(a, a + r))


def _certificate(
    type_label: str,
    rank: int,
    p: int,
    a: int,
    case_tag: str,
    cw: CocharacterWeighting,
    y: Sequence[Factor],
    z: Sequence[Sequence[Factor]] = (),
    family: str = "s",
    r: Optional[int] = None,
    **annotations: Any,
) -> WitnessCertificate:
    z = tuple(tuple(g) for g in z)
    cert = WitnessCertificate(
        type_label=type_label,
        rank=rank,
        p=p,
        a=a,
        case_tag=case_tag,
        j_data=cw,
        y_data=tuple(y),
        z_data=z,
        claimed_dim=2 + 1 + len(z),
        torus_family=family,
        a_list=_a_list(r if r is not None else len(cw.factors), a),
        annotations={k: v for k, v in annotations.items() if v is not None},
    )
    cert.claimed_weights = tuple(
        Fraction(torus_weight(cw, factors[0].root), p ** factors[0].twist) for _, factors in cert.groups()
    )
    if cert.claimed_dim != CASE_DIMENSIONS[case_tag]:
        raise RootSystemError(f"{case_tag} built {cert.claimed_dim} dimensions, expected {CASE_DIMENSIONS[case_tag]}")
    return cert


# =============================================================================
# Classical builders
# =============================================================================


def _eps_root(model: ClassicalModel, *terms: tuple[int, int]) -> Root:
    """Root from (index, coefficient) pairs on ε_1, ε_2, … (1-based)."""
    width = len(model.simple_eps[0])
    v = [0] * width
    for i, c in terms:
        v[i - 1] += c
    return model.root_from_eps(v)


def _orthogonal_blocks(model: ClassicalModel, first: int, count: int) -> list[Root]:
    """ε_i − ε_{i+1}, ε_i + ε_{i+1} for the SO4 blocks starting at ε_first."""
    roots = []
    for b in range(count):
        i = first + 2 * b
        roots.extend([_eps_root(model, (i, 1), (i + 1, -1)), _eps_root(model, (i, 1), (i + 1, 1))])
    return roots


def _block_chain(sys: RootSystem, cw: CocharacterWeighting, blocks: int, a: int, offset: int = 0, long_only: bool = False):
    """Y factors linking consecutive SO4 blocks: weight (1,1) on two neighbouring blocks."""
    width = len(cw.factors)
    factors, records = [], []
    for b in range(blocks - 1):
        target = _unit(width, *range(offset + 2 * b, offset + 2 * b + 4))
        (gamma,), record = _resolve(sys, cw, target, long_only=long_only)
        factors.append(Factor(gamma, 1, a * (offset + 2 * b)))
        records.append(record)
    return factors, records


def _build_c(rank: int, p: int, a: int) -> WitnessCertificate:
    model = classical_model("C", rank)
    sys = model.sys
    roots = [_eps_root(model, (i, 2)) for i in range(1, rank + 1)]
    cw = CocharacterWeighting.from_roots(sys, roots, p, _exponents(rank, a))
    y, records = [], []
    for i in range(rank - 1):
        (gamma,), record = _resolve(sys, cw, _unit(rank, i, i + 1))
        y.append(Factor(gamma, 1, a * i))
        records.append(record)
    return _certificate("C", rank, p, a, "C_l", cw, y, resolution=records)


def _build_d_even(rank: int, p: int, a: int) -> WitnessCertificate:
    model = classical_model("D", rank)
    cw = CocharacterWeighting.from_roots(model.sys, _orthogonal_blocks(model, 1, rank // 2), p, _exponents(rank, a))
    y, records = _block_chain(model.sys, cw, rank // 2, a)
    return _certificate(
        "D", rank, p, a, "D_l even", cw, y, family="s'", resolution=records,
        note="Y links the SO4 blocks pairwise in order (adjacent-pair reading of the block indices)",
    )


def _build_d_odd(rank: int, p: int, a: int) -> WitnessCertificate:
    model = classical_model("D", rank)
    sys = model.sys
    blocks = (rank - 1) // 2
    cw = CocharacterWeighting.from_roots(sys, _orthogonal_blocks(model, 2, blocks), p, _exponents(rank - 1, a))
    y, records = _block_chain(sys, cw, blocks, a)
    z = [(Factor(-sys.simple_root(1)),), (Factor(sys.highest_root),)]
    return _certificate(
        "D", rank, p, a, "D_l odd", cw, y, z, family="s'", r=rank - 1, resolution=records,
        note="the D_{l-1} construction on ε_2..ε_l together with U_{-α1} and U_{α0}",
    )


def _build_b_odd(rank: int, p: int, a: int) -> WitnessCertificate:
    model = classical_model("B", rank)
    sys = model.sys
    blocks = (rank - 1) // 2
    roots = _orthogonal_blocks(model, 1, blocks) + [_eps_root(model, (rank, 1))]
    cw = CocharacterWeighting.from_roots(sys, roots, p, _exponents(rank, a))
    y, records = _block_chain(sys, cw, blocks, a, long_only=True)
    target = _unit(rank, 0, 1)[:-1] + (2,)
    (gamma,), record = _resolve(sys, cw, target, long_only=True)
    records.append(record)
    z_group = (Factor(gamma),)
    if not y:
        return _certificate(
            "B", rank, p, a, "B_3 p odd", cw, z_group, family="s''", resolution=records,
            note="one SO4 block: the group U_{ε1+ε3} linking it to the SO3 block serves as Y",
        )
    return _certificate("B", rank, p, a, "B_l odd p odd", cw, y, [z_group], family="s''", resolution=records)


def _build_b_even(rank: int, p: int, a: int) -> WitnessCertificate:
    model = classical_model("B", rank)
    sys = model.sys
    cw = CocharacterWeighting.from_roots(sys, _orthogonal_blocks(model, 1, rank // 2), p, _exponents(rank, a))
    y, records = _block_chain(sys, cw, rank // 2, a, long_only=True)
    (gamma,), record = _resolve(sys, cw, _unit(rank, 0, 1))
    records.append(record)
    return _certificate(
        "B", rank, p, a, "B_l even p odd", cw, y, [(Factor(gamma),)], family="s'", resolution=records,
        note="J and Y lie in the D_l subsystem of long roots; Z is the short root group of weight ε_1",
    )


def _sum_simple(rank: int, first: int, last: int, sign: int = 1) -> Root:
    """±(α_first + … + α_last), 1-based."""
    return Root(tuple(sign if first <= k + 1 <= last else 0 for k in range(rank)))


def _build_a_odd(rank: int, p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("A", rank)
    m = (rank + 1) // 2
    roots = [sys.simple_root(2 * i - 1) for i in range(1, m + 1)]
    cw = CocharacterWeighting.from_roots(sys, roots, p, _exponents(m, a))
    y, z = [], []
    for i in range(1, m):
        twist = a * (i - 1)
        y.append(Factor(-sys.simple_root(2 * i), 1, twist))
        link = Factor(_sum_simple(rank, 2 * i - 1, 2 * i + 1), 1, twist)
        y.append(link)
        z.append(link)
    return _certificate("A", rank, p, a, "A_l odd", cw, y, [z], r=m)


def _build_a_even_odd_p(rank: int, p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("A", rank)
    m = (rank - 2) // 2
    factors = [root_factor(sys, sys.simple_root(2 * i - 1)) for i in range(1, m + 1)]
    factors.append(principal_factor(sys, [sys.simple_root(rank - 1), sys.simple_root(rank)]))
    cw = CocharacterWeighting(tuple(factors), tuple(Twist(p, e) for e in _exponents(m + 1, a)))
    y = []
    for i in range(1, m):
        twist = a * (i - 1)
        y.append(Factor(-sys.simple_root(2 * i), 1, twist))
        y.append(Factor(_sum_simple(rank, 2 * i - 1, 2 * i + 1), 1, twist))
    if rank == 4:
        y = [Factor(-sys.simple_root(2))]
        z = [Factor(sys.highest_root)]
        note = "rank 4: Y = U_{-α2} and Z = U_{α0}"
    else:
        z = [Factor(_sum_simple(rank, 2, rank - 2, -1)), Factor(sys.highest_root)]
        note = None
    return _certificate("A", rank, p, a, "A_l even p odd", cw, y, [z], r=m + 1, note=note)


def _build_a_even_p2(rank: int, p: int, a: int) -> WitnessCertificate:
    """SO(Q) of B_{l/2} inside SL_{l+1}; its images are written with roots of A_l."""
    model = classical_model("A", rank)
    sys = model.sys
    n = rank + 1
    k = rank // 2

    def sl_root(i: int, j: int) -> Root:
        return _eps_root(model, (i, 1), (j, -1))

    factors = []
    for i in range(1, k + 1):
        partner = n + 1 - i
        weights = [0] * n
        weights[i - 1], weights[partner - 1] = 2, -2
        grading = tuple(weights[j] - weights[j + 1] for j in range(rank))
        factors.append(TorusFactor((sl_root(k + 1, partner), sl_root(i, partner)), grading, "isogeny"))
    cw = CocharacterWeighting(tuple(factors), tuple(Twist(p, e) for e in _exponents(k, a)))
    y = []
    for i in range(1, k):
        twist = a * (i - 1)
        y.append(Factor(sl_root(i, n - i), 1, twist))
        y.append(Factor(sl_root(i + 1, n + 1 - i), -1, twist))
    return _certificate(
        "A", rank, p, a, "A_l even p=2", cw, y, [(Factor(sys.highest_root),)], r=k,
        note="J and Y are images of B_{l/2} elements under SO_{l+1} ⊂ SL_{l+1}; U_{α0} leaves SO(Q)",
    )


# =============================================================================
# Exceptional builders
# =============================================================================


def _d_seed_eps(n: int) -> list[tuple[int, ...]]:
    """ε-coordinates of the D_n base e_1 − e_2, …, e_{n-1} − e_n, e_{n-1} + e_n."""
    seeds = [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n)) for i in range(n - 1)]
    seeds.append(tuple(1 if k >= n - 2 else 0 for k in range(n)))
    return seeds


def _b_seed_eps(n: int) -> list[tuple[int, ...]]:
    seeds = [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(n)) for i in range(n - 1)]
    seeds.append(_unit(n, n - 1))
    return seeds


def _grading_from_seed_values(sys: RootSystem, seeds: Sequence[Root], values: Sequence[int]) -> tuple[int, ...]:
    """
    The grading (values on the simple roots of G) of the cocharacter with
    the given values on a base of a maximal-rank subsystem.

    Raises:
        RootSystemError: If the solution is not integral
    """
    matrix = sympy.Matrix([list(s.coeffs) for s in seeds])
    solution = matrix.solve(sympy.Matrix(list(values)))
    if not all(x.is_integer for x in solution):
        raise RootSystemError(f"cocharacter with seed values {list(values)} is not integral on {sys.name}")
    return tuple(int(x) for x in solution)


def _tensor_on_seeds(
    sys: RootSystem,
    seeds: Sequence[Root],
    seed_eps: Sequence[Sequence[int]],
    mu_eps: Sequence[int],
    extra: int = 0,
) -> TorusFactor:
    """Tensor factor with ε-values mu_eps on the last seeds and 0 on the first ``extra`` seeds."""
    values = [0] * extra + [sum(a * b for a, b in zip(eps, mu_eps, strict=True)) for eps in seed_eps]
    return tensor_factor(_grading_from_seed_values(sys, seeds, values))


def _root_on_seeds(seeds: Sequence[Root], seed_eps: Sequence[Sequence[int]], target_eps: Sequence[int]) -> Root:
    """The root of G whose ε-coordinates in the subsystem are target_eps."""
    matrix = sympy.Matrix([list(e) for e in seed_eps]).T
    coeffs = matrix.solve(sympy.Matrix(list(target_eps)))
    total = Root(tuple(0 for _ in seeds[0].coeffs))
    for s, c in zip(seeds, coeffs, strict=True):
        total = total + s * int(c)
    return total


def _roots(sys: RootSystem, labels: Sequence[str]) -> list[Root]:
    return [sys.root(label) for label in labels]


F4_B4_SEEDS = ("-2342", "1000", "0100", "0010")
F4_C4_SEEDS = ("0100", "0010", "0001", "-1232")
F4_GOLDEN_WEIGHTS = {
    "0110": (1, 1, 0, 0),
    "2342": (0, 0, 2, 2),
    "1221": (1, 0, 1, 1),
    "1231": (0, 1, 1, 1),
    "1220": (1, 1, 2, 0),
    "1342": (1, 1, 0, 2),
}


def _build_f4_p2(p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("F", 4)
    betas = _roots(sys, ("0100", "0120", "1110", "1232"))
    cw = CocharacterWeighting.from_roots(sys, betas, p, (2, 5, 0, 3))
    y = [Factor(sys.root("1221"), 1, 0), Factor(sys.root("1342"), 1, 2)]
    return _certificate(
        "F", 4, p, a, "F4 p=2", cw, y, r=4,
        note="twists 4, 32, 1, 8 are fixed; the twist parameter does not enter",
    )


def _build_f4_odd(p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("F", 4)
    seeds = _roots(sys, F4_B4_SEEDS)
    seed_eps = _b_seed_eps(4)
    factors = (
        _tensor_on_seeds(sys, seeds, seed_eps, (2, 0, -2, 2)),
        _tensor_on_seeds(sys, seeds, seed_eps, (2, 2, 2, 0)),
    )
    cw = CocharacterWeighting(factors, (Twist(p, 0), Twist(p, a)))
    (gamma,), record = _resolve(sys, cw, (1, 3), outside=seeds)
    return _certificate(
        "F", 4, p, a, "F4 p odd", cw, [Factor(gamma)], r=2, resolution=[record],
        note="J is diagonal in the A1^2 of B4 acting as (2,2) on the natural module",
    )


E6_A2_BASES = (("100000", "001000"), ("000010", "000001"), ("010000", None))


def _e6_a2_seeds(sys: RootSystem) -> list[tuple[Root, Root]]:
    low = -sys.highest_root
    return [
        tuple(sys.root(label) if label is not None else low for label in base)
        for base in E6_A2_BASES
    ]


def _build_e6_odd(p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("E", 6)
    bases = _e6_a2_seeds(sys)
    factors = tuple(principal_factor(sys, base) for base in bases)
    cw = CocharacterWeighting(factors, tuple(Twist(p, e) for e in _exponents(3, a)))
    seeds = [r for base in bases for r in base]
    (g1, g2), record = _resolve(sys, cw, (2, 2, 2), count=2, outside=seeds, maximal_for=seeds)
    return _certificate(
        "E", 6, p, a, "E6 p odd", cw, [Factor(g1)], [(Factor(g2),)], r=3, resolution=[record],
        note="the two highest weight vectors of (10,10,10) and (01,01,01) generate Y and Z",
    )


# the F4 p=2 tuples, read on the folded E6 roots
E6_P2_GOLDEN_WEIGHTS = {
    "111210": (1, 0, 1, 1),
    "011211": (1, 0, 1, 1),
    "112321": (1, 1, 0, 2),
    "011221": (0, 1, 1, 1),
}


def _build_e6_p2(p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("E", 6)
    factors = (
        root_factor(sys, sys.root("000100")),
        root_factor(sys, sys.root("001110")),
        folded_factor(sys, _roots(sys, ("011100", "010110"))),
        folded_factor(sys, _roots(sys, ("112211", "111221"))),
    )
    cw = CocharacterWeighting(factors, tuple(Twist(p, e) for e in (2, 5, 0, 3)))
    y = [
        Factor(sys.root("111210"), 1, 0),
        Factor(sys.root("011211"), 1, 0),
        Factor(sys.root("112321"), 1, 2),
    ]
    return _certificate(
        "E", 6, p, a, "E6 p=2", cw, y, [(Factor(sys.root("011221")),)], r=4,
        note="the F4 p=2 witness inside the graph-automorphism centralizer, with Z = U_011221",
    )


def _e7_h_seeds(sys: RootSystem) -> list[Root]:
    return [-sys.highest_root] + [sys.simple_root(k) for k in (7, 6, 5, 4, 3, 2)]


def _build_e7(p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("E", 7)
    seeds = _e7_h_seeds(sys)
    seed_eps = _d_seed_eps(6)
    count = 5 if p == 2 else 4
    factors = [root_factor(sys, seeds[0])]
    for k in range(count):
        factors.append(_tensor_on_seeds(sys, seeds, seed_eps, _unit(6, k, value=2), extra=1))
    cw = CocharacterWeighting(tuple(factors), tuple(Twist(p, e) for e in _exponents(count + 1, a)))
    target = (1,) * (count + 1)
    (gamma,), record = _resolve(sys, cw, target, outside=seeds, maximal_for=seeds)
    tag = "E7 p=2" if p == 2 else "E7 p odd"
    return _certificate("E", 7, p, a, tag, cw, [Factor(gamma)], r=count + 1, resolution=[record])


def _e8_d8_seeds(sys: RootSystem) -> list[Root]:
    return [-sys.highest_root] + [sys.simple_root(k) for k in (8, 7, 6, 5, 4, 3, 2)]


def _build_e8(p: int, a: int) -> WitnessCertificate:
    sys = build_root_system("E", 8)
    seeds = _e8_d8_seeds(sys)
    seed_eps = _d_seed_eps(8)
    if p == 2:
        factors = [_tensor_on_seeds(sys, seeds, seed_eps, _unit(8, k, value=2)) for k in range(7)]
        cw = CocharacterWeighting(tuple(factors), tuple(Twist(p, e) for e in _exponents(7, a)))
        (gamma,), record = _resolve(sys, cw, (1,) * 7, outside=seeds)
        return _certificate("E", 8, p, a, "E8 p=2", cw, [Factor(gamma)], r=7, resolution=[record])

    plus = _root_on_seeds(seeds, seed_eps, _unit(8, 0, 1))
    factors = [root_factor(sys, seeds[0]), root_factor(sys, plus)]
    factors += [_tensor_on_seeds(sys, seeds, seed_eps, _unit(8, k, value=2)) for k in (2, 3, 5, 6)]
    cw = CocharacterWeighting(tuple(factors), tuple(Twist(p, a * e) for e in (0, 5, 1, 2, 3, 4)))
    (g1,), first = _resolve(sys, cw, (1, 0, 1, 1, 1, 1), outside=seeds)
    (g3,), second = _resolve(sys, cw, (0, 1, 1, 1, 1, 1), outside=seeds)
    return _certificate(
        "E", 8, p, a, "E8 p odd", cw, [Factor(g1, 1, 0), Factor(g3, 1, a)], r=6,
        resolution=[first, second],
        note="each weight condition has two admissible roots; the first in root order is used",
    )


# overgroup subsystem each exceptional witness must escape
OVERGROUP_SEEDS: dict[str, Callable[[RootSystem], list[Root]]] = {
    "F4 p odd": lambda sys: _roots(sys, F4_B4_SEEDS),
    "E6 p odd": lambda sys: [r for base in _e6_a2_seeds(sys) for r in base],
    "E7 p odd": _e7_h_seeds,
    "E7 p=2": _e7_h_seeds,
    "E8 p odd": _e8_d8_seeds,
    "E8 p=2": _e8_d8_seeds,
}


# =============================================================================
# Dispatcher
# =============================================================================


def _check_inputs(type_label: str, rank: int, p: int, a: int) -> None:
    if not sympy.isprime(p):
        raise ValueError(f"p must be prime, got {p}")
    if a < 1:
        raise ValueError(f"twist parameter a must be positive, got {a}")
    build_root_system(type_label, rank)


def build_witness(type_label: str, rank: int, p: int, a: int = 1, seed: int = 0) -> WitnessCertificate:
    """
    Build the witness certificate for G = type_label rank in characteristic p.

    Raises:
        UncoveredCase: When no construction applies (a redirect names the
            group whose witness applies instead)
        ValueError: For a non-prime p or a < 1
        RootSystemError: For an unknown Dynkin type
    """
    type_label = type_label.upper()
    _check_inputs(type_label, rank, p, a)
    group = f"{type_label}{rank}"
    if type_label == "A" and rank == 1:
        raise UncoveredCase("out_of_scope", "Borel subgroup is a 2-dimensional epimorphic subgroup")
    if rank <= 2 or type_label == "G":
        raise UncoveredCase("out_of_scope", f"{group} has a 3-dimensional epimorphic subgroup outside these constructions")
    if type_label == "B" and p == 2:
        raise UncoveredCase(
            "redirect", f"B{rank} with p = 2 is handled through the isogeny with C{rank}", redirect=("C", rank)
        )

    if type_label == "C":
        cert = _build_c(rank, p, a)
    elif type_label == "D":
        cert = _build_d_even(rank, p, a) if rank % 2 == 0 else _build_d_odd(rank, p, a)
    elif type_label == "B":
        cert = _build_b_odd(rank, p, a) if rank % 2 else _build_b_even(rank, p, a)
    elif type_label == "A":
        if rank % 2:
            cert = _build_a_odd(rank, p, a)
        elif p == 2:
            cert = _build_a_even_p2(rank, p, a)
        else:
            cert = _build_a_even_odd_p(rank, p, a)
    elif type_label == "F":
        cert = _build_f4_p2(p, a) if p == 2 else _build_f4_odd(p, a)
    elif rank == 6:
        cert = _build_e6_p2(p, a) if p == 2 else _build_e6_odd(p, a)
    elif rank == 7:
        cert = _build_e7(p, a)
    else:
        cert = _build_e8(p, a)

    cert.seed = seed
    _logger.log_witness_built(cert.case_tag, group, p, cert.claimed_dim, a=a, family=cert.torus_family)
    return cert


def _principal_y_roots(sys: RootSystem, type_label: str, rank: int) -> list[Root]:
    if type_label == "B" and rank == 3:
        return _roots(sys, ("111", "012"))
    if type_label == "A" and rank % 2:
        return [_sum_simple(rank, 1, rank - 1), _sum_simple(rank, 2, rank)]
    if type_label == "D":
        second = Root(tuple(1 if k < rank - 2 or k == rank - 1 else 0 for k in range(rank)))
        return [_sum_simple(rank, 1, rank - 1), second]
    return [sys.highest_root]


def build_principal_witness(type_label: str, rank: int, p: int, seed: int = 0) -> WitnessCertificate:
    """
    Witness from the principal A1 (p ≥ h): Y is spanned by a maximal vector
    of the principal nilpotent inside the top of L(G).

    Raises:
        UncoveredCase: For exceptional types, rank ≤ 2, or p below the Coxeter number
    """
    type_label = type_label.upper()
    _check_inputs(type_label, rank, p, 1)
    if type_label not in "ABCD" or rank <= 2:
        raise UncoveredCase("out_of_scope", f"principal witnesses cover classical groups of rank ≥ 3, not {type_label}{rank}")
    h = coxeter_number(type_label, rank)
    if p < h:
        raise UncoveredCase("out_of_scope", f"principal witness for {type_label}{rank} needs p ≥ h = {h}")
    model = classical_model(type_label, rank)
    sys = model.sys
    roots = _principal_y_roots(sys, type_label, rank)
    coefficients = maximal_vector_coefficients(model, sys.simple_roots, roots)
    cw = CocharacterWeighting((principal_factor(sys, sys.simple_roots),), (Twist(p, 0),))
    y = [Factor(r, c) for r, c in zip(roots, coefficients, strict=True)]
    cert = _certificate(type_label, rank, p, 1, "principal", cw, y, r=1, coxeter_number=h)
    cert.seed = seed
    _logger.log_witness_built(cert.case_tag, cert.group, p, cert.claimed_dim, coxeter_number=h)
    return cert


# =============================================================================
# Verification reports
# =============================================================================

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
LEVELS = ("symbolic", "matrix", "all")


@dataclass
class CheckRecord:
    """Outcome of one check. ``required=False`` marks informational evidence."""

    name: str
    status: str
    evidence: dict[str, Any] = field(default_factory=dict)
    required: bool = True
    reason: str = ""
    duration_ms: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "evidence": self.evidence,
            "required": self.required,
            "reason": self.reason,
        }


@dataclass
class VerificationReport:
    case_tag: str
    group: str
    p: int
    level: str
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def overall(self) -> str:
        for check in self.checks:
            if check.status == FAIL or (check.required and check.status == SKIPPED):
                return FAIL
        return PASS

    @property
    def passed(self) -> bool:
        return self.overall == PASS

    def failing(self) -> list[str]:
        return [
            c.name for c in self.checks
            if c.status == FAIL or (c.required and c.status == SKIPPED)
        ]

    def check(self, name: str) -> Optional[CheckRecord]:
        return next((c for c in self.checks if c.name == name), None)

    def to_dict(self) -> dict[str, Any]:
        """Timings are left out so that equal inputs give equal reports."""
        return {
            "case_tag": self.case_tag,
            "group": self.group,
            "p": self.p,
            "level": self.level,
            "seed": self.seed,
            "overall": self.overall,
            "checks": [c.to_dict() for c in self.checks],
        }


def _record(name: str, ok: bool, evidence: dict[str, Any], required: bool = True, reason: str = "") -> CheckRecord:
    return CheckRecord(name, PASS if ok else FAIL, evidence, required, reason)


def _skipped(name: str, reason: str, required: bool = False) -> CheckRecord:
    return CheckRecord(name, SKIPPED, {}, required, reason)


class _Context:
    """Shared, lazily computed data for the checks of one certificate."""

    def __init__(self, cert: WitnessCertificate, seed: int):
        self.cert = cert
        self.seed = seed
        self.config = get_config()

    @cached_property
    def sys(self) -> RootSystem:
        return self.cert.sys

    @cached_property
    def sc(self):
        return build_structure_constants(self.sys)

    @property
    def is_classical(self) -> bool:
        return self.cert.case_tag in CLASSICAL_CASES

    @property
    def is_principal(self) -> bool:
        return self.cert.case_tag == "principal"

    @cached_property
    def model(self) -> ClassicalModel:
        return classical_model(self.cert.type_label, self.cert.rank)

    @cached_property
    def max_twist(self) -> int:
        exponents = [t.e for t in self.cert.j_data.twists] + [f.twist for f in self.cert.all_factors()]
        return max(exponents)


# =============================================================================
# Symbolic checks
# =============================================================================


def _fingerprint(cert: WitnessCertificate) -> dict[str, Any]:
    return {
        "case_tag": cert.case_tag,
        "j_data": cert.j_data,
        "y_data": cert.y_data,
        "z_data": cert.z_data,
        "claimed_dim": cert.claimed_dim,
        "torus_family": cert.torus_family,
        "a_list": cert.a_list,
        "claimed_weights": cert.claimed_weights,
    }


def _check_replay(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    try:
        if cert.case_tag == "principal":
            rebuilt = build_principal_witness(cert.type_label, cert.rank, cert.p)
        else:
            rebuilt = build_witness(cert.type_label, cert.rank, cert.p, cert.a)
    except UncoveredCase as exc:
        return _record("construction replay", False, {"uncovered": exc.kind}, reason=str(exc))
    ours, theirs = _fingerprint(cert), _fingerprint(rebuilt)
    differences = sorted(k for k in ours if ours[k] != theirs[k])
    return _record("construction replay", not differences, {"differences": differences})


def _check_density(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    required = ctx.is_classical
    try:
        matrix = exponent_matrix(cert.torus_family, len(cert.a_list), cert.p, cert.a_list)
    except ValueError as exc:
        return _record("torus density", False, {}, required, reason=str(exc))
    density = density_certificate(matrix)
    return _record(
        "torus density", certificate_passes(density), density.to_dict(), required, reason="; ".join(density.mismatches)
    )


def _factor_pairs(cert: WitnessCertificate):
    factors = cert.all_factors()
    for i, f in enumerate(factors):
        for g in factors[i + 1 :]:
            yield f, g


def _commutator_obstruction(sc, gamma: Root, delta: Root, p: int) -> list[str]:
    """Nonzero (mod p) commutator terms of x_γ and x_δ, as strings."""
    if gamma == delta:
        return []
    terms = commutator_coefficients(sc, gamma, delta)
    return [f"{root}:{c}" for i, j, root, c in terms if c % p]


def _check_commutation(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    offending, checked = [], 0
    for f, g in _factor_pairs(cert):
        checked += 1
        if f.root == -g.root:
            offending.append({"pair": [f.root.label, g.root.label], "terms": ["opposite roots"]})
            continue
        terms = _commutator_obstruction(ctx.sc, f.root, g.root, cert.p)
        if terms:
            offending.append({"pair": [f.root.label, g.root.label], "terms": terms})
    return _record("commutation", not offending, {"pairs": checked, "offending": offending})


def _check_homogeneity(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    cw, p = cert.j_data, cert.p
    named = cert.groups()
    if len(cert.claimed_weights) != len(named):
        return _record(
            "homogeneity", False, {"claimed": [str(w) for w in cert.claimed_weights]},
            reason=f"{len(named)} groups but {len(cert.claimed_weights)} claimed weights",
        )
    groups, ok = {}, True
    for (name, factors), base in zip(named, cert.claimed_weights, strict=True):
        weights = [torus_weight(cw, f.root) for f in factors]
        expected = [base * p**f.twist for f in factors]
        homogeneous = weights == expected
        ok = ok and homogeneous
        groups[name] = {
            "claimed": str(base),
            "expected": [str(e) for e in expected],
            "weights": [str(w) for w in weights],
            "homogeneous": homogeneous,
        }
    return _record("homogeneity", ok, {"groups": groups})


def _check_j_commutation(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    offending = []
    for factor in cert.j_data.factors:
        if factor.kind not in ("root", "folded"):
            continue
        for beta in factor.roots:
            for f in cert.all_factors():
                if beta == -f.root:
                    offending.append([beta.label, f.root.label])
                elif _commutator_obstruction(ctx.sc, beta, f.root, cert.p):
                    offending.append([beta.label, f.root.label])
    return _record("J root-factor commutation", not offending, {"offending": offending}, required=False)


def _check_dimension(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    expected = CASE_DIMENSIONS.get(cert.case_tag)
    counted = 2 + len(cert.groups())
    evidence = {
        "claimed": cert.claimed_dim,
        "counted": counted,
        "construction": expected,
        "table": table_dimension(cert.type_label, cert.rank, cert.p),
    }
    return _record("dimension", cert.claimed_dim == counted == expected, evidence)


def _check_weight_tuples(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    cw, sys = cert.j_data, ctx.sys
    evidence: dict[str, Any] = {}
    ok = True
    records = cert.annotations.get("resolution", [])
    resolved = []
    for record in records:
        target = tuple(record["target"])
        found = [sys.root(label) for label in record["chosen"]]
        matches = all(weight_tuple(cw, r) == target for r in found)
        ok = ok and matches
        resolved.append({"target": list(target), "chosen": record["chosen"], "matches": matches})
    if resolved:
        evidence["resolved"] = resolved
    golden = {"F4 p=2": F4_GOLDEN_WEIGHTS, "E6 p=2": E6_P2_GOLDEN_WEIGHTS}.get(cert.case_tag)
    if golden is not None:
        table = {label: list(weight_tuple(cw, sys.root(label))) for label in golden}
        ok = ok and all(tuple(table[k]) == v for k, v in golden.items())
        evidence["weights"] = table
    return _record("weight tuples", ok, evidence)


def _check_membership(ctx: _Context) -> CheckRecord:
    """F4 p=2: the γ roots against the B4 and C4 overgroups, and the β factors against the γ roots."""
    sys, p = ctx.sys, ctx.cert.p
    m1 = subsystem_closure(sys, _roots(sys, F4_B4_SEEDS))
    m2 = subsystem_closure(sys, _roots(sys, F4_C4_SEEDS))
    gammas = list(F4_GOLDEN_WEIGHTS)
    member = {label: [sys.root(label) in m1, sys.root(label) in m2] for label in gammas}
    placed = (
        all(member[label] == [True, True] for label in ("0110", "2342"))
        and not any(member[label][0] for label in ("1221", "1231"))
        and not any(member[label][1] for label in ("1220", "1342"))
    )
    centralized = all(
        not _commutator_obstruction(ctx.sc, beta, sys.root(label), p)
        for beta in ctx.cert.j_data.factor_roots
        for label in gammas
    )
    evidence = {"membership": member, "betas centralize gammas": centralized}
    return _record("membership", placed and centralized, evidence)


def _check_overgroup(ctx: _Context) -> CheckRecord:
    sys = ctx.sys
    closed = subsystem_closure(sys, OVERGROUP_SEEDS[ctx.cert.case_tag](sys))
    inside = [f.root.label for f in ctx.cert.all_factors() if f.root in closed]
    return _record("overgroup exclusion", not inside, {"subsystem": closed.type_name, "inside": inside})


def _at(k: int, *positions: int, value: int = 2) -> tuple[int, ...]:
    return _unit(k, *positions, value=value)


def _bookkeeping_summands(case_tag: str) -> list[tuple[tuple[int, ...], int]]:
    """Highest weights (one per J factor) of the summands of L(G)↓J, with multiplicities."""
    if case_tag == "E6 p odd":
        return [(_at(3, k), 1) for k in range(3)] + [(_at(3, k, value=4), 1) for k in range(3)] + [((2, 2, 2), 2)]
    if case_tag == "E7 p odd":
        return (
            [(_at(5, 0), 1)]
            + [(_at(5, k), 1) for k in range(1, 5)]
            + [(_at(5, j, k), 1) for j, k in combinations(range(1, 5), 2)]
            + [((1,) * 5, 2)]
        )
    return (
        [(_at(6, k), 1) for k in range(6)]
        + [(_at(6, j, k), 1) for j, k in combinations(range(2, 6), 2)]
        + [(tuple(1 if i < 2 else 2 if i == k else 0 for i in range(6)), 1) for k in range(2, 6)]
        + [((1, 0, 1, 1, 1, 1), 2), ((0, 1, 1, 1, 1, 1), 2)]
    )


def _summand_weights(highest: Sequence[int]) -> Counter[tuple[int, ...]]:
    strings = [sorted(sl2_string(n).elements()) for n in highest]
    return Counter(product(*strings))


def _check_bookkeeping(ctx: _Context) -> CheckRecord:
    sys, cw = ctx.sys, ctx.cert.j_data
    adjoint = formal_character(sys, geometry(sys).root_labels(sys.highest_root))
    actual = torus_weight_tuples(adjoint, cw)
    expected: Counter[tuple[int, ...]] = Counter()
    dims = []
    for highest, mult in _bookkeeping_summands(ctx.cert.case_tag):
        weights = _summand_weights(highest)
        for _ in range(mult):
            expected.update(weights)
            dims.append(sum(weights.values()))
    evidence = {"summand_dims": dims, "total": sum(dims), "dim": adjoint.dim}
    return _record("bookkeeping", actual == expected, evidence)


def _branching_names(cert: WitnessCertificate) -> list[str]:
    tag = cert.case_tag
    if tag.startswith("F4"):
        return ["V26 of F4 to B4", "L(F4) to B4"]
    if tag == "E6 p odd":
        return ["L(E6) to A2^3"]
    if tag.startswith("E7"):
        return ["V56 of E7 to A1D6", "L(E7) to A1D6"]
    if tag.startswith("E8"):
        return ["L(E8) to D8"]
    if tag == "B_l even p odd" and cert.rank in (4, 6):
        return [f"L(B{cert.rank}) to D{cert.rank}"]
    return []


def _check_branching(ctx: _Context) -> CheckRecord:
    results = run_branching_suite(_branching_names(ctx.cert))
    return _record(
        "branching identities",
        all(r.passed for r in results),
        {"identities": [r.to_dict() for r in results]},
    )


# =============================================================================
# Matrix checks: classical natural module
# =============================================================================


class _MatrixData:
    """Matrix models of J, Y and Z on the natural module over one finite field."""

    def __init__(self, ctx: _Context):
        cert = ctx.cert
        self.model = ctx.model
        grading = combined_grading(cert.j_data)
        weights = self.model.basis_weights(grading)
        degree = field_degree_for(cert.p, weights, minimum=ctx.max_twist + 1)
        self.GF = make_field(cert.p, degree)
        if ctx.is_principal:
            self.rep = principal_a1(self.model, self.GF)
        else:
            self.rep = twisted_diagonal_a1(self.model, cert.j_data, self.GF)
        self.families = {
            name: OneParameterFamily(
                name,
                self.GF,
                tuple(UnipotentFactor(self.model.root_terms(f.root, self.GF), f.coefficient, f.twist) for f in factors),
            )
            for name, factors in cert.groups()
        }
        self.samples = sample_elements(self.GF, ctx.config.normalization_samples, ctx.seed)

    @property
    def borel(self) -> list[galois.FieldArray]:
        return [m for name, m in self.rep.generators.items() if not name.startswith("J-(")]

    def group_generators(self, name: str) -> list[galois.FieldArray]:
        family = self.families[name]
        return [family.at(self.GF(1)), family.at(self.GF.primitive_element)]

    def all_generators(self) -> list[galois.FieldArray]:
        generators = list(self.rep.generators.values())
        for name in self.families:
            generators.extend(self.group_generators(name))
        return generators


def _matrix_data(ctx: _Context) -> _MatrixData:
    data = ctx.__dict__.get("matrix_data")
    if data is None:
        data = _MatrixData(ctx)
        ctx.__dict__["matrix_data"] = data
    return data


def _check_normalization(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    groups, ok = {}, True
    for name, family in data.families.items():
        result = normalizes(data.borel, family, data.samples, ctx.config.exhaustive_field_limit)
        ok = ok and result.holds
        groups[name] = {"holds": result.holds, "trace": result.trace}
    return _record("normalization", ok, {"field": data.GF.name, "groups": groups})


def _check_burnside(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    n = data.model.dim
    span = burnside_span_dim(data.all_generators())
    required = ctx.cert.case_tag != "A_l even p=2" and not (ctx.is_principal and ctx.cert.type_label == "D")
    return _record("burnside span", span == n * n, {"span": span, "target": n * n}, required)


def _expected_jordan(model: ClassicalModel, gamma: Root, p: int) -> tuple[int, ...]:
    n = model.dim
    kind, long_root = model.type_label, model.sys.is_long(gamma)
    if kind == "A" or (kind == "C" and long_root) or (kind == "B" and not long_root and p == 2):
        return (2,) + (1,) * (n - 2)
    if kind == "B" and not long_root:
        return (3,) + (1,) * (n - 3)
    return (2, 2) + (1,) * (n - 4)


def _check_jordan_types(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    types, ok = {}, True
    for f in ctx.cert.all_factors():
        found = jordan_type(data.model.root_element(f.root, 1, data.GF))
        expected = _expected_jordan(data.model, f.root, ctx.cert.p)
        ok = ok and found == expected
        types[f.root.label] = {"found": format_partition(found), "expected": format_partition(expected)}
    return _record("Jordan types", ok, {"types": types})


def _check_module_weights(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    sys = ctx.sys
    natural = formal_character(sys, _unit(sys.rank, 0))
    expected = twisted_restriction(natural, ctx.cert.j_data)
    found = Counter(data.rep.torus_weights)
    evidence = {"weights": [str(w) for w in sorted(found.elements())]}
    return _record("module weights", found == expected, evidence)


def _check_block_links(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    n = data.model.dim
    blocks = components(n, list(data.rep.generators.values()))
    edges = set()
    for name in data.families:
        edges |= block_links(blocks, data.group_generators(name))
    ok = strongly_connected(len(blocks), edges)
    evidence = {"blocks": [list(b) for b in blocks], "edges": sorted(list(e) for e in edges)}
    return _record("block links", ok, evidence, required=ctx.cert.case_tag != "A_l even p=2")


def _check_invariant_forms(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    dim = invariant_form_dim(data.all_generators())
    expected = 0 if data.model.form_kind == "none" else 1
    required = data.model.form_kind != "none" and not ctx.is_principal
    return _record("invariant forms", dim == expected, {"dim": dim, "expected": expected}, required)


def _check_quadratic_escape(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    _, quadratic = folded_orthogonal_forms(data.model.dim)
    inside = list(data.rep.generators.values()) + data.group_generators("Y")
    preserved = all(preserves_quadratic_form(quadratic, g) for g in inside)
    escapes = {
        name: not all(preserves_quadratic_form(quadratic, g) for g in data.group_generators(name))
        for name in data.families
        if name != "Y"
    }
    evidence = {"J and Y preserve Q": preserved, "escapes": escapes}
    return _record("quadratic escape", preserved and all(escapes.values()), evidence)


# =============================================================================
# Matrix checks: principal A1
# =============================================================================


def _check_principal_order(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    u = data.rep.generators["J+(1)"]
    power = u
    for _ in range(ctx.cert.p - 1):
        power = power @ u
    ok = not is_identity(u) and is_identity(power)
    return _record("unipotent order", ok, {"order divides": ctx.cert.p, "nontrivial": not is_identity(u)})


def _check_regular_jordan(ctx: _Context) -> CheckRecord:
    data = _matrix_data(ctx)
    found = jordan_type(data.rep.generators["J+(1)"])
    n, rank = data.model.dim, ctx.cert.rank
    expected = (2 * rank - 1, 1) if data.model.type_label == "D" else (n,)
    return _record("regular Jordan type", found == expected, {
        "found": format_partition(found), "expected": format_partition(expected),
    })


def _check_overgroup_classification(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    if (cert.type_label, cert.rank) in (("B", 3), ("D", 4)):
        return _skipped(
            "overgroup classification",
            f"the principal A1 of {cert.group} lies in a G2 overgroup; its classification is not replayed",
        )
    return _skipped("overgroup classification", "maximality of the principal A1 is taken from the classification")


# =============================================================================
# Matrix checks: exceptional adjoint model
# =============================================================================


def _adjoint_factor_terms(ctx: _Context, GF: type[galois.FieldArray]) -> list[UnipotentFactor]:
    factors = []
    for factor, twist in zip(ctx.cert.j_data.factors, ctx.cert.j_data.twists, strict=True):
        if factor.kind not in ("root", "folded"):
            raise RepresentationError(f"no adjoint unipotent model for a {factor.kind} factor")
        for beta in factor.roots:
            factors.append(UnipotentFactor(tuple(adjoint_divided_powers(ctx.sc, beta, GF)), 1, twist.e))
    return factors


def _adjoint_family(ctx: _Context, name: str, factors: Sequence[Factor], GF) -> OneParameterFamily:
    return OneParameterFamily(
        name,
        GF,
        tuple(UnipotentFactor(tuple(adjoint_divided_powers(ctx.sc, f.root, GF)), f.coefficient, f.twist) for f in factors),
    )


def _check_adjoint_normalization(ctx: _Context) -> CheckRecord:
    cert = ctx.cert
    GF = make_field(cert.p, ctx.max_twist + 1, ctx.config.max_field_bits)
    cw = cert.j_data
    raising = OneParameterFamily("J+", GF, tuple(_adjoint_factor_terms(ctx, GF)))
    torus = adjoint_torus_matrix(ctx.sc, lambda beta: torus_weight(cw, beta), GF.primitive_element)
    borel = [torus, raising.at(GF(1)), raising.at(GF.primitive_element)]
    samples = sample_elements(GF, ctx.config.normalization_samples, ctx.seed)
    groups, ok = {}, True
    for name, factors in cert.groups():
        result = normalizes(borel, _adjoint_family(ctx, name, factors, GF), samples, ctx.config.exhaustive_field_limit)
        ok = ok and result.holds
        groups[name] = {"holds": result.holds, "trace": result.trace}
    return _record("adjoint normalization", ok, {"field": GF.name, "groups": groups})


def _check_exhaustive_commutation(ctx: _Context) -> CheckRecord:
    GF = make_field(ctx.cert.p, 2)
    y = _adjoint_family(ctx, "Y", ctx.cert.y_data, GF)
    z = _adjoint_family(ctx, "Z", ctx.cert.z_data[0], GF)
    failures = []
    for t in GF.elements:
        yt = y.at(t)
        for u in GF.elements:
            zu = z.at(u)
            if not np.array_equal(yt @ zu, zu @ yt):
                failures.append([int(t), int(u)])
    evidence = {"field": GF.name, "pairs": int(GF.order) ** 2, "failures": failures}
    return _record("exhaustive commutation", not failures, evidence)


def _check_ad_closure(ctx: _Context) -> CheckRecord:
    """E6 p odd: the e_γ of Y and Z generate at least the two 27-dimensional summands."""
    cert, sc = ctx.cert, ctx.sc
    GF = make_field(cert.p, 1)
    seeds = [basis_vector(sc, f.root, GF) for f in cert.all_factors()]
    lowering = [-r for base in _e6_a2_seeds(ctx.sys) for r in base]
    operators = [adjoint_matrix(sc, r, GF(1), GF) for r in lowering]
    operators.append(adjoint_torus_matrix(sc, lambda beta: torus_weight(cert.j_data, beta), GF.primitive_element))
    dim = ad_closure_dim(sc, seeds, operators, GF)
    evidence = {"dim": dim, "target": 54, "operators": "A2^3 lowering root elements and the J torus"}
    return _record("adjoint closure", dim >= 54, evidence)


# =============================================================================
# Check plans and entry points
# =============================================================================

CheckFn = Callable[[_Context], CheckRecord]


def _symbolic_plan(ctx: _Context) -> list[tuple[str, CheckFn]]:
    tag = ctx.cert.case_tag
    plan: list[tuple[str, CheckFn]] = [
        ("construction replay", _check_replay),
        ("torus density", _check_density),
        ("commutation", _check_commutation),
        ("homogeneity", _check_homogeneity),
        ("J root-factor commutation", _check_j_commutation),
        ("dimension", _check_dimension),
    ]
    if ctx.cert.annotations.get("resolution") or tag in ("F4 p=2", "E6 p=2"):
        plan.append(("weight tuples", _check_weight_tuples))
    if tag == "F4 p=2":
        plan.append(("membership", _check_membership))
    if tag in OVERGROUP_SEEDS:
        plan.append(("overgroup exclusion", _check_overgroup))
    if tag in ("E6 p odd", "E7 p odd", "E8 p odd"):
        plan.append(("bookkeeping", _check_bookkeeping))
    if _branching_names(ctx.cert):
        plan.append(("branching identities", _check_branching))
    return plan


def _skip(name: str, reason: str) -> CheckFn:
    return lambda ctx: _skipped(name, reason)


def _matrix_plan(ctx: _Context) -> list[tuple[str, CheckFn]]:
    tag = ctx.cert.case_tag
    if ctx.is_principal:
        return [
            ("unipotent order", _check_principal_order),
            ("regular Jordan type", _check_regular_jordan),
            ("normalization", _check_normalization),
            ("burnside span", _check_burnside),
            ("invariant forms", _check_invariant_forms),
            ("overgroup classification", _check_overgroup_classification),
        ]
    if ctx.is_classical:
        plan = [
            ("normalization", _check_normalization),
            ("burnside span", _check_burnside),
            ("Jordan types", _check_jordan_types),
            ("module weights", _check_module_weights),
            ("block links", _check_block_links),
            ("invariant forms", _check_invariant_forms),
        ]
        if tag == "A_l even p=2":
            plan.append(("quadratic escape", _check_quadratic_escape))
        return plan
    if tag in ("F4 p=2", "E6 p=2"):
        plan = [("adjoint normalization", _check_adjoint_normalization)]
        if tag == "E6 p=2":
            plan.append(("exhaustive commutation", _check_exhaustive_commutation))
        return plan
    if tag == "E6 p odd":
        return [
            ("adjoint closure", _check_ad_closure),
            ("adjoint normalization", _skip("adjoint normalization", "principal A1 factors have no root-group model")),
        ]
    return [("adjoint normalization", _skip("adjoint normalization", "SO3-type J factors carry a torus only"))]


def _plan(ctx: _Context, level: str) -> list[tuple[str, CheckFn]]:
    if level not in LEVELS:
        raise ValueError(f"unknown verification level {level!r}")
    plan = []
    if level in ("symbolic", "all"):
        plan += _symbolic_plan(ctx)
    if level in ("matrix", "all"):
        plan += _matrix_plan(ctx)
    return plan


def _run_check(ctx: _Context, name: str, fn: CheckFn) -> CheckRecord:
    start = time.perf_counter()
    try:
        record = fn(ctx)
    except (RepresentationError, CharacterError) as exc:
        record = _skipped(name, str(exc), required=True)
    record.duration_ms = (time.perf_counter() - start) * 1000
    _logger.log_check_result(
        record.name, record.status, record.duration_ms, record.required,
        case=ctx.cert.case_tag, group=ctx.cert.group,
    )
    return record


def _report(cert: WitnessCertificate, level: str, seed: int, checks: list[CheckRecord]) -> VerificationReport:
    report = VerificationReport(cert.case_tag, cert.group, cert.p, level, seed, checks)
    _logger.info(
        "Verified witness",
        case=cert.case_tag, group=cert.group, p=cert.p, verify_level=level,
        overall=report.overall, failing=report.failing(),
    )
    return report


def verify_witness(cert: WitnessCertificate, level: str = "symbolic", seed: Optional[int] = None) -> VerificationReport:
    """
    Replay the claims of a certificate at the given level.

    Failing claims become ``fail`` records and never raise.

    Raises:
        ValueError: For an unknown level
        FieldTooLarge: If a matrix check needs a field beyond the guard
    """
    seed = cert.seed if seed is None else seed
    ctx = _Context(cert, seed)
    checks = [_run_check(ctx, name, fn) for name, fn in _plan(ctx, level)]
    return _report(cert, level, seed, checks)


async def verify_witness_async(
    cert: WitnessCertificate, level: str = "symbolic", seed: Optional[int] = None
) -> VerificationReport:
    """Like ``verify_witness``, with the checks run in worker threads; order is kept."""
    seed = cert.seed if seed is None else seed
    ctx = _Context(cert, seed)
    plan = _plan(ctx, level)
    if level != "symbolic":
        # the matrix models are shared by the matrix checks; build them once up front
        await anyio.to_thread.run_sync(_prepare_matrix_data, ctx)
    results: list[Optional[CheckRecord]] = [None] * len(plan)

    async def run(index: int, name: str, fn: CheckFn) -> None:
        results[index] = await anyio.to_thread.run_sync(_run_check, ctx, name, fn)

    async with anyio.create_task_group() as tg:
        for index, (name, fn) in enumerate(plan):
            tg.start_soon(run, index, name, fn)
    return _report(cert, level, seed, [r for r in results if r is not None])


def _prepare_matrix_data(ctx: _Context) -> None:
    if ctx.is_classical or ctx.is_principal:
        try:
            _matrix_data(ctx)
        except RepresentationError:
            pass


# =============================================================================
# Grid cells and fault injection
# =============================================================================

GRID_PRIMES = (2, 3, 5, 7)
EXCEPTIONAL_GROUPS = (("F", 4), ("E", 6), ("E", 7), ("E", 8))


def grid_groups(max_rank: int = 6) -> list[tuple[str, int]]:
    """Classical groups of rank 3..max_rank (D from rank 4), then the exceptional ones."""
    groups = []
    for type_label in "ABCD":
        first = 4 if type_label == "D" else 3
        groups.extend((type_label, rank) for rank in range(first, max_rank + 1))
    return groups + list(EXCEPTIONAL_GROUPS)


def covered_cells(primes: Sequence[int] = GRID_PRIMES, max_rank: int = 6) -> list[tuple[str, int, int]]:
    """Grid cells with a construction of their own (B with p = 2 redirects)."""
    return [
        (t, r, p) for t, r in grid_groups(max_rank) for p in primes
        if not (t == "B" and p == 2)
    ]


def principal_cells(primes: Sequence[int] = GRID_PRIMES, max_rank: int = 6) -> list[tuple[str, int, int]]:
    return [
        (t, r, p) for t, r in grid_groups(max_rank) if t in "ABCD"
        for p in primes if p >= coxeter_number(t, r)
    ]


MUTATION_KINDS = ("root_swap", "twist_swap", "dim_change", "coefficient_exponent")


def _replace_factor(cert: WitnessCertificate, index: int, new: Factor) -> WitnessCertificate:
    flat = [(g, k) for g, (_, factors) in enumerate(cert.groups()) for k in range(len(factors))]
    group, position = flat[index]
    groups = [list(factors) for _, factors in cert.groups()]
    groups[group][position] = new
    return replace(
        cert,
        y_data=tuple(groups[0]),
        z_data=tuple(tuple(g) for g in groups[1:]),
        annotations=dict(cert.annotations),
    )


def mutate_certificate(cert: WitnessCertificate, kind: str, rng: random.Random) -> WitnessCertificate:
    """
    A copy of cert with one field changed.

    Raises:
        ValueError: For an unknown mutation kind
    """
    factors = cert.all_factors()
    if kind == "root_swap":
        index = rng.randrange(len(factors))
        old = factors[index]
        weight = torus_weight(cert.j_data, old.root)
        choices = [
            r for r in cert.sys.roots
            if torus_weight(cert.j_data, r) != weight and all(r != -f.root for f in factors)
        ]
        return _replace_factor(cert, index, replace(old, root=rng.choice(choices)))
    if kind == "twist_swap":
        twists = list(cert.j_data.twists)
        index = rng.randrange(len(twists))
        twists[index] = Twist(twists[index].p, twists[index].e + 1)
        return replace(cert, j_data=replace(cert.j_data, twists=tuple(twists)), annotations=dict(cert.annotations))
    if kind == "dim_change":
        return replace(cert, claimed_dim=cert.claimed_dim + rng.choice((-1, 1)), annotations=dict(cert.annotations))
    if kind == "coefficient_exponent":
        index = rng.randrange(len(factors))
        old = factors[index]
        return _replace_factor(cert, index, replace(old, twist=old.twist + 1))
    raise ValueError(f"unknown mutation kind {kind!r}")


def fault_injection_campaign(n: int, seed: int = 0, level: str = "symbolic", max_rank: int = 6) -> list[dict[str, Any]]:
    """Verify n seeded single-field mutations of grid certificates; each record names the checks that caught it."""
    rng = random.Random(seed)
    cells = covered_cells(max_rank=max_rank)
    records = []
    for k in range(n):
        type_label, rank, p = rng.choice(cells)
        kind = MUTATION_KINDS[k % len(MUTATION_KINDS)]
        mutated = mutate_certificate(build_witness(type_label, rank, p, seed=seed), kind, rng)
        report = verify_witness(mutated, level, seed)
        caught_by = report.failing()
        records.append({
            "case": mutated.case_tag,
            "group": mutated.group,
            "p": p,
            "kind": kind,
            "caught_by": caught_by,
            "detected": bool(caught_by),
        })
    detected = sum(r["detected"] for r in records)
    _logger.log_metric("fault_injection.detected", detected, "mutations", total=n, seed=seed)
    return records
