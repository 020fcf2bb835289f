"""Clifford generators for an arbitrary nondegenerate symmetric form.

Generators for ``diag(+-1)`` are built from Kronecker products of Pauli
matrices; a general form ``g = S diag(s) S^T`` then gets
``gamma_a = sum_i S_ai e_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import ConnectionData

MAX_FORM_DIM = 6  # five spatial directions plus time -> 8x8 matrices
TOL = 1e-12

_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)
_E2 = np.eye(2, dtype=complex)


class CliffordError(ValueError):
    pass


def euclidean_generators(n: int) -> list[np.ndarray]:
    """``n`` Hermitian matrices of size 2^floor(n/2) with {e_i, e_j} = 2 delta_ij."""
    if n < 1:
        raise CliffordError("need at least one generator")
    if n == 1:
        return [np.eye(1, dtype=complex)]
    gens = [_S1, _S2]
    d = 2
    while d + 2 <= n:
        size = gens[0].shape[0]
        eye = np.eye(size, dtype=complex)
        gens = [np.kron(_S3, g) for g in gens] + [np.kron(_S1, eye), np.kron(_S2, eye)]
        d += 2
    if d < n:
        k = d // 2
        last = (-1j) ** k * np.linalg.multi_dot(gens) if len(gens) > 1 else gens[0]
        gens = gens + [last]
    return gens


def signature_generators(signs: Sequence[int]) -> list[np.ndarray]:
    """Generators with {e_i, e_j} = 2 signs[i] delta_ij."""
    base = euclidean_generators(len(signs))
    return [g if s > 0 else 1j * g for g, s in zip(base, signs)]


def anticommutator_residual(gammas: Sequence[np.ndarray], form) -> float:
    form = np.asarray(form, dtype=float)
    N = gammas[0].shape[0]
    eye = np.eye(N)
    worst = 0.0
    for a, ga in enumerate(gammas):
        for b, gb in enumerate(gammas):
            d = ga @ gb + gb @ ga - 2 * form[a, b] * eye
            worst = max(worst, float(np.max(np.abs(d))))
    return worst


@dataclass(frozen=True)
class CliffordRep:
    form: np.ndarray  # form of ``gammas`` (spatial form when gamma0 is set)
    gammas: tuple
    gamma0: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.gammas)

    @property
    def size(self) -> int:
        return self.gammas[0].shape[0]

    @property
    def upper(self) -> list[np.ndarray]:
        """gamma^a = (form^-1)^{ab} gamma_b."""
        inv = np.linalg.inv(self.form)
        return [sum(inv[a, b] * self.gammas[b] for b in range(self.n)) for a in range(self.n)]

    def residual(self) -> float:
        r = anticommutator_residual(self.gammas, self.form)
        if self.gamma0 is not None:
            full = np.zeros((self.n + 1, self.n + 1))
            full[0, 0] = 1.0
            full[1:, 1:] = self.form
            r = max(r, anticommutator_residual([self.gamma0, *self.gammas], full))
        return r


def _check_form(form) -> np.ndarray:
    g = np.asarray(form, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise CliffordError("form must be square")
    if not np.allclose(g, g.T, atol=0, rtol=0):
        raise CliffordError("form is not symmetric")
    if g.shape[0] > MAX_FORM_DIM:
        raise CliffordError(f"form dimension {g.shape[0]} exceeds {MAX_FORM_DIM}")
    if abs(np.linalg.det(g)) < 1e-14:
        raise CliffordError("form is singular")
    return g


def _congruence(g: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """``S`` and signs with ``g = S diag(signs) S^T``."""
    if np.count_nonzero(g - np.diag(np.diag(g))) == 0:
        d = np.diag(g)
        return np.diag(np.sqrt(np.abs(d))), [1 if x > 0 else -1 for x in d]
    w, Q = np.linalg.eigh(g)
    return Q * np.sqrt(np.abs(w)), [1 if x > 0 else -1 for x in w]


def build_gamma(form) -> CliffordRep:
    """Matrices with {gamma_a, gamma_b} = 2 form_ab, size 2^floor(n/2)."""
    g = _check_form(form)
    S, signs = _congruence(g)
    e = signature_generators(signs)
    gammas = tuple(sum(S[a, i] * e[i] for i in range(len(e))) for a in range(g.shape[0]))
    rep = CliffordRep(g, gammas)
    r = rep.residual()
    if r > TOL:
        raise CliffordError(f"anticommutation residual {r:.3e} exceeds {TOL}")  # pragma: no cover
    return rep


def build_spacetime(spatial_form) -> CliffordRep:
    """Time direction with gamma0^2 = 1 prepended to ``spatial_form``.

    Matrix size is 2^floor((n+1)/2) for n spatial directions.
    """
    g = _check_form(spatial_form)
    n = g.shape[0]
    full = np.zeros((n + 1, n + 1))
    full[0, 0] = 1.0
    full[1:, 1:] = g
    rep = build_gamma(full)
    return CliffordRep(g, rep.gammas[1:], rep.gammas[0])


@dataclass(frozen=True)
class SpinorConnection:
    matrices: tuple  # Gamma_a for each m-index

    def traces(self) -> list[complex]:
        return [complex(np.trace(M)) for M in self.matrices]


def spinor_connection(connection: ConnectionData, rep: CliffordRep) -> SpinorConnection:
    """Gamma_a = -1/4 Gamma^c_{ba} gamma^b gamma_c."""
    k = len(connection.m_indices)
    if rep.n != k:
        raise CliffordError(f"representation has {rep.n} spatial generators, connection has {k}")
    G = np.array([[[float(connection.gamma[c][b][a]) for a in range(k)] for b in range(k)] for c in range(k)])
    up = rep.upper
    mats = []
    for a in range(k):
        M = np.zeros((rep.size, rep.size), dtype=complex)
        for b in range(k):
            for c in range(k):
                if G[c, b, a]:
                    M += G[c, b, a] * (up[b] @ rep.gammas[c])
        mats.append(-0.25 * M)
    return SpinorConnection(tuple(mats))
