"""
Exact matrix models of the classical groups over GF(p^m).

A ``ClassicalModel`` fixes a basis of the natural module W:

    e_1, …, e_l, [e_0 for B_l], e_{-l}, …, e_{-1}

(plain e_1, …, e_{l+1} for A_l), so torus weights decrease along the basis
and positive root elements are upper triangular. Root elements are integer
templates reduced into the field; every generator produced here preserves
the model's bilinear form over ℤ, hence also modulo p.

On top of the models sit the matrix-level evidence routines: the
normalization search, the Burnside span, Jordan types, invariant forms and
the block-link graph.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional

import galois
import numpy as np
import sympy

from .chevalley import CocharacterWeighting, TorusFactor, principal_factor
from .config import get_config
from .fields import (
    FieldSpec,
    FieldTooLarge,
    IncrementalSpan,
    field_spec,
    from_int_matrix,
    frobenius,
    make_field,
    power,
)
from .logging_config import get_logger
from .rootsys import Root, RootSystem, build_root_system, coxeter_number

_logger = get_logger(__name__)

__all__ = [
    "ClassicalModel",
    "FieldTooLarge",
    "MatrixRep",
    "NormalizationResult",
    "OneParameterFamily",
    "RepresentationError",
    "UnipotentFactor",
    "block_links",
    "burnside_span_dim",
    "classical_model",
    "field_degree_for",
    "invariant_form_dim",
    "jordan_type",
    "normalizes",
    "principal_a1",
    "twisted_diagonal_a1",
]


class RepresentationError(ValueError):
    """A matrix model was asked for something it cannot represent."""


# =============================================================================
# Classical models
# =============================================================================


def _simple_root_eps(type_label: str, rank: int) -> list[tuple[int, ...]]:
    width = rank + 1 if type_label == "A" else rank
    rows = []
    for i in range(rank):
        v = [0] * width
        if type_label == "A" or i < rank - 1:
            v[i], v[i + 1] = 1, -1
        elif type_label == "B":
            v[i] = 1
        elif type_label == "C":
            v[i] = 2
        else:
            v[i - 1], v[i] = 1, 1
        rows.append(tuple(v))
    return rows


def _sign(k: int) -> int:
    return 1 if k > 0 else -1


@dataclass(frozen=True)
class ClassicalModel:
    """The natural module of SL_{l+1}, SO_{2l+1}, Sp_{2l} or SO_{2l}."""

    type_label: str
    rank: int

    @cached_property
    def sys(self) -> RootSystem:
        return build_root_system(self.type_label, self.rank)

    @property
    def form_kind(self) -> str:
        return {"A": "none", "C": "alternating"}.get(self.type_label, "symmetric")

    @cached_property
    def labels(self) -> tuple[int, ...]:
        """Signed ε-index of each basis vector; 0 is the zero-weight vector of B_l."""
        l = self.rank
        if self.type_label == "A":
            return tuple(range(1, l + 2))
        middle = (0,) if self.type_label == "B" else ()
        return tuple(range(1, l + 1)) + middle + tuple(range(-l, 0))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @cached_property
    def _positions(self) -> dict[int, int]:
        return {k: i for i, k in enumerate(self.labels)}

    def position(self, label: int) -> int:
        return self._positions[label]

    @cached_property
    def simple_eps(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_simple_root_eps(self.type_label, self.rank))

    def eps(self, gamma: Root) -> tuple[int, ...]:
        """ε-coordinates of a root given by simple-root coefficients."""
        width = len(self.simple_eps[0])
        return tuple(
            sum(c * row[k] for c, row in zip(gamma.coeffs, self.simple_eps, strict=True))
            for k in range(width)
        )

    @cached_property
    def _root_by_eps(self) -> dict[tuple[int, ...], Root]:
        return {self.eps(r): r for r in self.sys.roots}

    def root_from_eps(self, eps: Sequence[int]) -> Root:
        try:
            return self._root_by_eps[tuple(eps)]
        except KeyError:
            raise RepresentationError(f"{tuple(eps)} is not a root of {self.sys.name}") from None

    def _phi(self, k: int) -> int:
        return _sign(k) if self.form_kind == "alternating" else 1

    @cached_property
    def form(self) -> Optional[np.ndarray]:
        """Gram matrix of the invariant bilinear form (None for SL)."""
        if self.form_kind == "none":
            return None
        n = self.dim
        F = np.zeros((n, n), dtype=np.int64)
        for k in self.labels:
            if k == 0:
                F[self.position(0), self.position(0)] = 2
            else:
                F[self.position(k), self.position(-k)] = self._phi(k)
        return F

    @cached_property
    def quadratic_form(self) -> Optional[np.ndarray]:
        """Upper-triangular matrix of Q with Q(v) = vᵀ·Q·v (orthogonal models only)."""
        if self.form_kind != "symmetric":
            return None
        return fold_quadratic_form(self.dim, self.labels, self.position)

    def root_matrices(self, gamma: Root) -> tuple[np.ndarray, ...]:
        """
        Integer (X, X2, …) with x_γ(t) = I + t·X + t²·X2 + ….

        Raises:
            RepresentationError: If γ is not a root of the model
        """
        if gamma not in self.sys:
            raise RepresentationError(f"{gamma} is not a root of {self.sys.name}")
        n = self.dim
        X = np.zeros((n, n), dtype=np.int64)
        pos = self.position
        v = self.eps(gamma)
        if self.type_label == "A":
            i = v.index(1) + 1
            j = v.index(-1) + 1
            X[pos(i), pos(j)] = 1
            return (X,)
        support = [(k + 1, c) for k, c in enumerate(v) if c]
        if len(support) == 2:
            (i, s), (j, s2) = support
            kappa = -1 if self.form_kind == "symmetric" else self._phi(-s * i) * self._phi(-s2 * j)
            X[pos(s * i), pos(-s2 * j)] += 1
            X[pos(s2 * j), pos(-s * i)] += kappa
            return (X,)
        ((i, c),) = support
        s = _sign(c)
        if abs(c) == 2:
            X[pos(s * i), pos(-s * i)] = 1
            return (X,)
        # short root of B_l: X³ = 0 and X2 = X²/2
        X2 = np.zeros((n, n), dtype=np.int64)
        X[pos(s * i), pos(0)] = 2
        X[pos(0), pos(-s * i)] = -1
        X2[pos(s * i), pos(-s * i)] = -1
        return (X, X2)

    def root_terms(self, gamma: Root, GF: type[galois.FieldArray]) -> tuple[galois.FieldArray, ...]:
        return tuple(from_int_matrix(GF, m) for m in self.root_matrices(gamma))

    def root_element(self, gamma: Root, t: Any, GF: type[galois.FieldArray]) -> galois.FieldArray:
        return _evaluate(self.root_terms(gamma, GF), GF(t), GF)

    def basis_weights(self, grading: Sequence[int]) -> tuple[int, ...]:
        """
        Weights on e_1, …, e_n of the cocharacter with ⟨α_j, μ⟩ = grading[j].

        Raises:
            RepresentationError: If some weight is not an integer
        """
        rows = [list(r) for r in self.simple_eps]
        rhs = [int(g) for g in grading]
        if self.type_label == "A":
            rows.append([1] * len(rows[0]))
            rhs.append(0)
        y = sympy.Matrix(rows).solve(sympy.Matrix(rhs))
        weights = []
        for k in self.labels:
            value = sympy.Integer(0) if k == 0 else _sign(k) * y[abs(k) - 1]
            if not value.is_integer:
                raise RepresentationError(f"grading {tuple(grading)} has fractional weight {value} on W")
            weights.append(int(value))
        return tuple(weights)


def fold_quadratic_form(n: int, labels: Sequence[int], position: Any) -> np.ndarray:
    """Q(v) = Σ_{i>0} v_i·v_{-i} + v_0² in the model's basis."""
    Q = np.zeros((n, n), dtype=np.int64)
    for k in labels:
        if k > 0:
            Q[position(k), position(-k)] = 1
        elif k == 0:
            Q[position(0), position(0)] = 1
    return Q


def classical_model(type_label: str, rank: int) -> ClassicalModel:
    """
    Raises:
        RepresentationError: For exceptional types, which only have the adjoint model
    """
    if type_label not in "ABCD" or len(type_label) != 1:
        raise RepresentationError(f"no natural-module model for type {type_label}")
    model = ClassicalModel(type_label, rank)
    model.sys  # validates the rank
    return model


def classical_root_element(model: ClassicalModel, gamma: Root, t: Any, GF: type[galois.FieldArray]) -> galois.FieldArray:
    """x_γ(t) on the natural module W."""
    return model.root_element(gamma, t, GF)


def folded_orthogonal_forms(n: int) -> tuple[np.ndarray, np.ndarray]:
    """
    (F, Q) of the SO_n inside SL_n (n odd) fixed by the graph automorphism,
    in the SL basis e_1, …, e_n read as e_1..e_k, e_0, e_{-k}..e_{-1}.
    """
    if n % 2 == 0:
        raise RepresentationError(f"SL_{n} has no odd orthogonal fold")
    k = n // 2
    labels = list(range(1, k + 1)) + [0] + list(range(-k, 0))
    position = {label: i for i, label in enumerate(labels)}.__getitem__
    F = np.zeros((n, n), dtype=np.int64)
    for label in labels:
        F[position(label), position(-label)] = 2 if label == 0 else 1
    return F, fold_quadratic_form(n, labels, position)


# =============================================================================
# One-parameter families
# =============================================================================


def _evaluate(terms: Sequence[galois.FieldArray], s: galois.FieldArray, GF: type[galois.FieldArray]) -> galois.FieldArray:
    n = terms[0].shape[0]
    result = GF.Identity(n)
    scale = GF(1)
    for term in terms:
        scale = scale * s
        result = result + scale * term
    return result


def _poly_product(GF: type[galois.FieldArray], polys: Sequence[Sequence[galois.FieldArray]]) -> tuple[galois.FieldArray, ...]:
    """Coefficients of ∏ (I + Σ s^k M_k) as a polynomial in s."""
    n = polys[0][0].shape[0]
    current = [GF.Identity(n)]
    for poly in polys:
        factor = [GF.Identity(n), *poly]
        out = [GF.Zeros((n, n)) for _ in range(len(current) + len(factor) - 1)]
        for i, a in enumerate(current):
            for j, b in enumerate(factor):
                out[i + j] = out[i + j] + a @ b
        current = out
    while len(current) > 1 and not np.any(current[-1]):
        current.pop()
    return tuple(current[1:])


@dataclass(frozen=True)
class UnipotentFactor:
    """I + Σ_k s^k·terms[k-1] evaluated at s = coefficient·u^(p^exponent)."""

    terms: tuple[galois.FieldArray, ...]
    coefficient: int = 1
    exponent: int = 0


@dataclass
class OneParameterFamily:
    """u ↦ ∏ factors(u): a one-dimensional unipotent group given by its parametrization."""

    name: str
    GF: type[galois.FieldArray]
    factors: tuple[UnipotentFactor, ...]

    @property
    def n(self) -> int:
        return self.factors[0].terms[0].shape[0]

    def at(self, u: Any) -> galois.FieldArray:
        GF = self.GF
        u = GF(u)
        result = GF.Identity(self.n)
        for f in self.factors:
            s = GF(f.coefficient % GF.characteristic) * frobenius(u, f.exponent)
            result = result @ _evaluate(f.terms, s, GF)
        return result

    def solve(self, target: galois.FieldArray) -> Optional[galois.FieldArray]:
        """The parameter u read off a designated entry of target (unverified)."""
        GF = self.GF
        first = self.factors[0]
        nonzero = np.argwhere(first.terms[0] != 0)
        if nonzero.size == 0:
            return None
        r, c = (int(x) for x in nonzero[0])
        coefficient = GF(first.coefficient % GF.characteristic)
        if coefficient == 0:
            return None
        s = (target[r, c] - GF(1 if r == c else 0)) / (first.terms[0][r, c] * coefficient)
        return frobenius(s, -first.exponent)


@dataclass
class NormalizationResult:
    holds: bool
    trace: list[dict[str, Any]] = field(default_factory=list)


def normalizes(
    b_generators: Sequence[galois.FieldArray],
    family: OneParameterFamily,
    samples: Sequence[Any],
    exhaustive_limit: Optional[int] = None,
) -> NormalizationResult:
    """
    Check b·y(u)·b⁻¹ ∈ {y(u')} for every generator b and sample u.

    u' is read off a designated matrix entry and then verified on the whole
    matrix. When that fails and |F| is at most ``exhaustive_limit`` every
    field element is tried before reporting a counterexample.
    """
    GF = family.GF
    limit = get_config().exhaustive_field_limit if exhaustive_limit is None else exhaustive_limit
    trace: list[dict[str, Any]] = []
    for index, b in enumerate(b_generators):
        b_inv = np.linalg.inv(b)
        for u in samples:
            target = b @ family.at(u) @ b_inv
            image = family.solve(target)
            method = "designated entry"
            if image is None or not np.array_equal(family.at(image), target):
                image = None
                if GF.order <= limit:
                    method = "exhaustive"
                    for candidate in GF.elements:
                        if np.array_equal(family.at(candidate), target):
                            image = candidate
                            break
            entry = {
                "generator": index,
                "sample": int(GF(u)),
                "image": None if image is None else int(image),
                "method": method,
            }
            trace.append(entry)
            if image is None:
                return NormalizationResult(False, trace)
    return NormalizationResult(True, trace)


# =============================================================================
# Twisted diagonal A1 and the principal A1
# =============================================================================


@dataclass
class MatrixRep:
    """Named generators of a subgroup of GL(W) over one field, with their one-parameter families."""

    field: FieldSpec
    GF: type[galois.FieldArray]
    generators: dict[str, galois.FieldArray]
    roles: dict[str, str]
    families: dict[str, OneParameterFamily]
    torus_weights: tuple[int, ...]
    model: Optional[ClassicalModel] = None

    def add_family(self, family: OneParameterFamily, role: str) -> None:
        """Register a family and its value at u = 1 and u = g as generators."""
        g = self.GF.primitive_element
        self.families[family.name] = family
        for suffix, u in (("(1)", self.GF(1)), ("(g)", g)):
            name = family.name + suffix
            self.generators[name] = family.at(u)
            self.roles[name] = role


def torus_matrix(GF: type[galois.FieldArray], weights: Sequence[int], c: Any) -> galois.FieldArray:
    """diag(c^w) over the basis."""
    c = GF(c)
    matrix = GF.Identity(len(weights))
    for k, w in enumerate(weights):
        matrix[k, k] = power(c, w)
    return matrix


def combined_grading(cw: CocharacterWeighting) -> tuple[int, ...]:
    """Σ_i q_i·grading_i: the grading of the diagonal torus."""
    width = len(cw.factors[0].grading)
    return tuple(
        sum(q * f.grading[j] for q, f in zip(cw.q, cw.factors, strict=True)) for j in range(width)
    )


def _factorial_inverse(GF: type[galois.FieldArray], k: int) -> galois.FieldArray:
    if k >= GF.characteristic:
        raise RepresentationError(f"exp needs {k}! to be invertible in characteristic {GF.characteristic}")
    return GF(math.factorial(k) % GF.characteristic) ** -1


def exp_terms(nilpotent: galois.FieldArray) -> tuple[galois.FieldArray, ...]:
    """(N, N²/2!, N³/3!, …) up to the nilpotency index."""
    GF = type(nilpotent)
    terms = []
    current = nilpotent.copy()
    k = 1
    while np.any(current):
        terms.append(current * _factorial_inverse(GF, k))
        current = current @ nilpotent
        k += 1
        if k > nilpotent.shape[0] + 1:
            raise RepresentationError("matrix is not nilpotent")
    return tuple(terms)


def _rational_to_field(GF: type[galois.FieldArray], value: Any) -> galois.FieldArray:
    value = sympy.Rational(value)
    p = GF.characteristic
    if value.q % p == 0:
        raise RepresentationError(f"{value} has no image in characteristic {p}")
    return GF(int(value.p) % p) / GF(int(value.q) % p)


def principal_pair(model: ClassicalModel, simple_roots: Sequence[Root]) -> tuple[np.ndarray, list[tuple[Root, Any]]]:
    """
    e = Σ X_s over the given simple roots and the coefficients d_s with
    f = Σ d_s·X_{-s} and [e, f] diagonal of the principal cocharacter.

    Returns:
        (e as an integer matrix, [(-s, d_s)] with rational d_s)
    """
    n = model.dim
    e = np.zeros((n, n), dtype=np.int64)
    for s in simple_roots:
        e = e + model.root_matrices(s)[0]
    factor = principal_cocharacter(model, simple_roots)
    target = model.basis_weights(factor)
    columns = []
    for s in simple_roots:
        x = model.root_matrices(s)[0]
        y = model.root_matrices(-s)[0]
        columns.append(np.diag(x @ y - y @ x).tolist())
    system = sympy.Matrix(columns).T
    try:
        solution, params = system.gauss_jordan_solve(sympy.Matrix(target))
    except ValueError as exc:
        raise RepresentationError(f"no principal sl2-triple on {[str(s) for s in simple_roots]}") from exc
    if params.shape[0]:
        raise RepresentationError("principal lowering operator is not unique")
    return e, [(-s, solution[k]) for k, s in enumerate(simple_roots)]


def principal_cocharacter(model: ClassicalModel, simple_roots: Sequence[Root]) -> tuple[int, ...]:
    return principal_factor(model.sys, simple_roots).grading


def _factor_families(
    model: ClassicalModel, factor: TorusFactor, exponent: int, GF: type[galois.FieldArray]
) -> tuple[UnipotentFactor, Optional[UnipotentFactor]]:
    if factor.kind == "tensor":
        raise RepresentationError("tensor factors have no unipotent model on W")
    if factor.kind == "root":
        (beta,) = factor.roots
        return (
            UnipotentFactor(model.root_terms(beta, GF), 1, exponent),
            UnipotentFactor(model.root_terms(-beta, GF), 1, exponent),
        )
    if factor.kind == "folded":
        upper = _poly_product(GF, [model.root_terms(r, GF) for r in factor.roots])
        lower = _poly_product(GF, [model.root_terms(-r, GF) for r in factor.roots])
        return UnipotentFactor(upper, 1, exponent), UnipotentFactor(lower, 1, exponent)
    if factor.kind == "isogeny":
        first, second = factor.roots
        terms = (from_int_matrix(GF, model.root_matrices(first)[0]), from_int_matrix(GF, model.root_matrices(second)[0]))
        return UnipotentFactor(terms, 1, exponent), None
    if factor.kind == "principal":
        if GF.characteristic == 2:
            raise RepresentationError("principal A1 blocks carry V(2), which needs p ≠ 2")
        e, lowering = principal_pair(model, factor.roots)
        f = GF.Zeros((model.dim, model.dim))
        for root, d in lowering:
            f = f + _rational_to_field(GF, d) * from_int_matrix(GF, model.root_matrices(root)[0])
        return (
            UnipotentFactor(exp_terms(from_int_matrix(GF, e)), 1, exponent),
            UnipotentFactor(exp_terms(f), 1, exponent),
        )
    raise RepresentationError(f"unknown factor kind {factor.kind!r}")


def twisted_diagonal_a1(model: ClassicalModel, cw: CocharacterWeighting, GF: type[galois.FieldArray]) -> MatrixRep:
    """
    The twisted diagonal A1 with torus ``cw`` acting on W.

    Generators: the torus at a primitive element, and the raising and
    lowering families "J+" and "J-" (the latter absent for isogeny factors).

    Raises:
        RepresentationError: For tensor factors, for principal blocks with
            p = 2, and for B_l short-root factors with p = 2 (a V(2) block)
    """
    p = GF.characteristic
    if p != cw.twists[0].p:
        raise RepresentationError(f"field characteristic {p} does not match the twists (p={cw.twists[0].p})")
    if p == 2 and model.type_label == "B":
        for factor in cw.factors:
            if factor.kind == "root" and not model.sys.is_long(factor.roots[0]):
                raise RepresentationError("short-root A1 of B_l acts on V(2), which needs p ≠ 2")
    weights = model.basis_weights(combined_grading(cw))
    rep = MatrixRep(
        field=field_spec(GF),
        GF=GF,
        generators={"J-torus": torus_matrix(GF, weights, GF.primitive_element)},
        roles={"J-torus": "J"},
        families={},
        torus_weights=weights,
        model=model,
    )
    raising, lowering = [], []
    for factor, twist in zip(cw.factors, cw.twists, strict=True):
        up, down = _factor_families(model, factor, twist.e, GF)
        raising.append(up)
        if down is not None:
            lowering.append(down)
    rep.add_family(OneParameterFamily("J+", GF, tuple(raising)), "J")
    if len(lowering) == len(raising):
        rep.add_family(OneParameterFamily("J-", GF, tuple(lowering)), "J")
    _logger.debug("Built twisted diagonal A1", group=model.sys.name, field=GF.name, weights=list(weights))
    return rep


def principal_a1(model: ClassicalModel, GF: type[galois.FieldArray]) -> MatrixRep:
    """
    The principal A1 of the model: x(t) = exp(t·e) with e = Σ X_{α_i}.

    Raises:
        RepresentationError: If p is below the Coxeter number
    """
    p = GF.characteristic
    h = coxeter_number(model.type_label, model.rank)
    if p < h:
        raise RepresentationError(f"principal A1 of {model.sys.name} needs p ≥ h = {h}, got p = {p}")
    factor = principal_factor(model.sys, model.sys.simple_roots)
    weights = model.basis_weights(factor.grading)
    rep = MatrixRep(
        field=field_spec(GF),
        GF=GF,
        generators={"J-torus": torus_matrix(GF, weights, GF.primitive_element)},
        roles={"J-torus": "J"},
        families={},
        torus_weights=weights,
        model=model,
    )
    up, down = _factor_families(model, factor, 0, GF)
    rep.add_family(OneParameterFamily("J+", GF, (up,)), "J")
    rep.add_family(OneParameterFamily("J-", GF, (down,)), "J")
    return rep


def maximal_vector_coefficients(model: ClassicalModel, simple_roots: Sequence[Root], roots: Sequence[Root]) -> tuple[int, ...]:
    """
    Integer c with [e, Σ c_k·X_{roots[k]}] = 0 and c_0 = 1, where e is the
    principal nilpotent on ``simple_roots``.

    Raises:
        RepresentationError: If the solution is not a unique integer vector
    """
    e, _ = principal_pair(model, simple_roots)
    columns = []
    for r in roots:
        x = model.root_matrices(r)[0]
        columns.append((e @ x - x @ e).flatten().tolist())
    kernel = sympy.Matrix(columns).T.nullspace()
    if len(kernel) != 1 or kernel[0][0] == 0:
        raise RepresentationError(f"no unique maximal vector in the span of {[str(r) for r in roots]}")
    v = kernel[0] / kernel[0][0]
    if not all(x.is_integer for x in v):
        raise RepresentationError(f"maximal vector {list(v)} is not integral")
    return tuple(int(x) for x in v)


# =============================================================================
# Matrix-level evidence
# =============================================================================


def field_degree_for(p: int, weights: Iterable[int], minimum: int = 1, max_bits: Optional[int] = None) -> int:
    """
    Smallest m ≥ minimum such that distinct weights stay distinct modulo p^m − 1,
    so that the torus at a primitive element separates the weight spaces.

    Raises:
        FieldTooLarge: If no admissible m fits under the field guard
    """
    distinct = sorted(set(weights))
    limit = max_bits if max_bits is not None else get_config().max_field_bits
    m = max(minimum, 1)
    while True:
        bits = m * math.log2(p)
        if bits > limit:
            _logger.log_guard_hit("max_field_bits", limit, math.ceil(bits), p=p, m=m)
            raise FieldTooLarge(p, m, bits, limit)
        modulus = p**m - 1
        if len({w % modulus for w in distinct}) == len(distinct):
            return m
        m += 1


def field_for(p: int, weights: Iterable[int], minimum: int = 1) -> type[galois.FieldArray]:
    return make_field(p, field_degree_for(p, weights, minimum))


def jordan_type(u: galois.FieldArray) -> tuple[int, ...]:
    """
    Jordan block sizes of a unipotent matrix, largest first.

    Raises:
        RepresentationError: If u − I is not nilpotent
    """
    GF = type(u)
    n = u.shape[0]
    N = u - GF.Identity(n)
    ranks = [n]
    current = GF.Identity(n)
    while ranks[-1] > 0:
        current = current @ N
        ranks.append(int(np.linalg.matrix_rank(current)))
        if len(ranks) > n + 1:
            raise RepresentationError("matrix is not unipotent")
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    blocks: list[int] = []
    for k, count in enumerate(at_least, start=1):
        exactly = count - (at_least[k] if k < len(at_least) else 0)
        blocks.extend([k] * exactly)
    return tuple(sorted(blocks, reverse=True))


def is_identity(m: galois.FieldArray) -> bool:
    return np.array_equal(m, type(m).Identity(m.shape[0]))


def burnside_span_dim(generators: Sequence[galois.FieldArray]) -> int:
    """Dimension of the associative algebra generated by the matrices (n² means irreducible over F̄)."""
    GF = type(generators[0])
    n = generators[0].shape[0]
    span = IncrementalSpan(GF, n * n)
    queue = deque(w for w in [span.add(GF.Identity(n).reshape(n * n))] if w is not None)
    while queue and span.dim < n * n:
        v = queue.popleft().reshape(n, n)
        for g in generators:
            w = span.add((g @ v).reshape(n * n))
            if w is not None:
                queue.append(w)
    return span.dim


def invariant_form_dim(generators: Sequence[galois.FieldArray]) -> int:
    """dim of {F : gᵀ·F·g = F for every generator}."""
    GF = type(generators[0])
    n = generators[0].shape[0]
    blocks = []
    for g in generators:
        gt = g.T
        kron = (gt[:, None, :, None] * gt[None, :, None, :]).reshape(n * n, n * n)
        blocks.append(kron - GF.Identity(n * n))
    system = np.concatenate(blocks, axis=0)
    return int(system.null_space().shape[0])


def preserves_form(form: np.ndarray, g: galois.FieldArray) -> bool:
    F = from_int_matrix(type(g), form)
    return np.array_equal(g.T @ F @ g, F)


def preserves_quadratic_form(quadratic: np.ndarray, g: galois.FieldArray) -> bool:
    """Q(g·v) = Q(v): the polar form is preserved and so is Q on each basis vector."""
    GF = type(g)
    Q = from_int_matrix(GF, quadratic)
    if not preserves_form(quadratic + quadratic.T, g):
        return False
    image = g.T @ Q @ g
    return all(image[k, k] == Q[k, k] for k in range(g.shape[0]))


def components(n: int, matrices: Sequence[galois.FieldArray]) -> list[tuple[int, ...]]:
    """Connected components of {0..n-1} joined by nonzero off-diagonal entries of M − I."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in matrices:
        N = m - type(m).Identity(n)
        for r, c in np.argwhere(N != 0):
            a, b = find(int(r)), find(int(c))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return [tuple(g) for g in sorted(groups.values())]


def block_links(blocks: Sequence[Sequence[int]], matrices: Sequence[galois.FieldArray]) -> set[tuple[int, int]]:
    """Directed edges i → j where some M − I maps block i into block j nontrivially."""
    edges = set()
    for m in matrices:
        N = m - type(m).Identity(m.shape[0])
        for i, source in enumerate(blocks):
            for j, target in enumerate(blocks):
                if i != j and np.any(N[np.ix_(list(target), list(source))] != 0):
                    edges.add((i, j))
    return edges


def strongly_connected(count: int, edges: Iterable[tuple[int, int]]) -> bool:
    edges = list(edges)
    if count <= 1:
        return True

    def reach(forward: bool) -> set[int]:
        adjacency: dict[int, list[int]] = {}
        for a, b in edges:
            src, dst = (a, b) if forward else (b, a)
            adjacency.setdefault(src, []).append(dst)
        seen = {0}
        stack = [0]
        while stack:
            for nxt in adjacency.get(stack.pop(), []):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    return len(reach(True)) == count and len(reach(False)) == count
