"""Finite-dimensional real Lie algebras given by structure constants.

Conventions: ``C[a][b][c]`` is C^a_{bc}, i.e. ``[e_b, e_c] = sum_a C[a][b][c] e_a``.
All indices are 0-based in the Python API; file formats and reports shift
them to 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact import to_fraction


class StructureError(ValueError):
    """Inconsistent shapes or indices in an algebra description."""


Tensor3 = tuple  # tuple[tuple[tuple[Fraction, ...], ...], ...]


def _freeze3(C) -> Tensor3:
    return tuple(tuple(tuple(to_fraction(x) for x in row) for row in mat) for mat in C)


@dataclass(frozen=True)
class LieAlgebraModel:
    dim: int
    C: Tensor3
    basis_labels: tuple[str, ...] = ()
    subalgebra_h: tuple[int, ...] = ()
    complement_m: tuple[int, ...] = field(default=None)  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise StructureError("dim must be positive")
        object.__setattr__(self, "C", _freeze3(self.C))
        n = self.dim
        if len(self.C) != n or any(len(m) != n or any(len(r) != n for r in m) for m in self.C):
            raise StructureError(f"structure constants are not {n}x{n}x{n}")
        labels = tuple(self.basis_labels) or tuple(f"e{i + 1}" for i in range(n))
        if len(labels) != n:
            raise StructureError("basis_labels length differs from dim")
        object.__setattr__(self, "basis_labels", labels)
        h = tuple(int(i) for i in self.subalgebra_h)
        m = self.complement_m
        m = tuple(i for i in range(n) if i not in h) if m is None else tuple(int(i) for i in m)
        if sorted(h + m) != list(range(n)):
            raise StructureError("subalgebra and complement indices must partition the basis")
        object.__setattr__(self, "subalgebra_h", h)
        object.__setattr__(self, "complement_m", m)

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[tuple[int, int, int, object]], **kw) -> "LieAlgebraModel":
        """Build from sparse ``(a, b, c, value)`` entries meaning C^a_{bc} = value.

        The antisymmetric partner C^a_{cb} = -value is implied.
        """
        C = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for a, b, c, value in entries:
            if not all(0 <= i < dim for i in (a, b, c)):
                raise StructureError(f"index out of range in entry {(a, b, c)}")
            v = to_fraction(value)
            if b == c:
                if v:
                    raise StructureError(f"C^{a + 1}_{{{b + 1}{c + 1}}} must vanish")
                continue
            C[a][b][c] = v
            C[a][c][b] = -v
        return cls(dim, C, **kw)

    def with_subalgebra(self, h: Sequence[int]) -> "LieAlgebraModel":
        return LieAlgebraModel(self.dim, self.C, self.basis_labels, tuple(h), None, self.name)

    def bracket(self, u: Sequence, v: Sequence) -> list[Fraction]:
        """Bracket of two coordinate vectors."""
        n = self.dim
        return [sum((self.C[a][b][c] * u[b] * v[c] for b in range(n) for c in range(n) if u[b] and v[c]),
                    Fraction(0)) for a in range(n)]

    def entries(self) -> list[tuple[int, int, int, Fraction]]:
        """Nonzero constants in canonical sparse order (b < c)."""
        n = self.dim
        return [(a, b, c, self.C[a][b][c])
                for b in range(n) for c in range(b + 1, n) for a in range(n) if self.C[a][b][c]]


@dataclass(frozen=True)
class Violation:
    kind: str  # "antisymmetry" | "jacobi" | "subalgebra"
    indices: tuple[int, ...]
    value: Fraction

    def as_dict(self) -> dict:
        return {"kind": self.kind, "indices": [i + 1 for i in self.indices], "value": str(self.value)}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def jacobi_sum(model: LieAlgebraModel, A: int, B: int, Cc: int, D: int) -> Fraction:
    C = model.C
    return sum((C[E][A][B] * C[D][E][Cc] + C[E][B][Cc] * C[D][E][A] + C[E][Cc][A] * C[D][E][B]
                for E in range(model.dim)), Fraction(0))


def validate_algebra(model: LieAlgebraModel) -> ValidationReport:
    """Exact antisymmetry, Jacobi and subalgebra-closure checks."""
    n, C = model.dim, model.C
    found: list[Violation] = []
    for a, b, c in itertools.product(range(n), repeat=3):
        if b <= c and C[a][b][c] != -C[a][c][b]:
            found.append(Violation("antisymmetry", (a, b, c), C[a][b][c] + C[a][c][b]))
    for A, B, Cc in itertools.combinations(range(n), 3):
        for D in range(n):
            s = jacobi_sum(model, A, B, Cc, D)
            if s:
                found.append(Violation("jacobi", (A, B, Cc, D), s))
    closed, witness = check_subalgebra(model, model.subalgebra_h)
    if not closed:
        b, c, a = witness
        found.append(Violation("subalgebra", (b, c, a), C[a][b][c]))
    return ValidationReport(tuple(found))


def adjoint_matrix(model: LieAlgebraModel, x: int) -> list[list[Fraction]]:
    """Matrix of ad_{e_x}: ``M[a][b] = C^a_{x b}``."""
    if not 0 <= x < model.dim:
        raise IndexError(f"basis index {x} out of range for dim {model.dim}")
    return [list(model.C[a][x]) for a in range(model.dim)]


def _matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def killing_form(model: LieAlgebraModel) -> list[list[Fraction]]:
    ads = [adjoint_matrix(model, x) for x in range(model.dim)]
    n = model.dim
    K = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            prod = _matmul(ads[a], ads[b])
            K[a][b] = K[b][a] = sum((prod[i][i] for i in range(n)), Fraction(0))
    return K


def ad_trace_vector(model: LieAlgebraModel) -> list[Fraction]:
    """``tr(ad_{e_A})`` for every basis element; all zero iff unimodular."""
    n = model.dim
    return [sum((model.C[a][x][a] for a in range(n)), Fraction(0)) for x in range(n)]


def is_unimodular(model: LieAlgebraModel) -> bool:
    return not any(ad_trace_vector(model))


def check_subalgebra(model: LieAlgebraModel, indices: Sequence[int]) -> tuple[bool, Optional[tuple[int, int, int]]]:
    """Whether ``span(e_i, i in indices)`` is closed under the bracket.

    On failure the witness ``(b, c, a)`` says that [e_b, e_c] has a nonzero
    component along e_a outside the span.
    """
    idx = set(indices)
    if any(not 0 <= i < model.dim for i in idx):
        raise IndexError("subalgebra index out of range")
    for b in sorted(idx):
        for c in sorted(idx):
            for a in range(model.dim):
                if a not in idx and model.C[a][b][c]:
                    return False, (b, c, a)
    return True, None
