"""Invariant geometry of G/H from Lie algebra data.

All tensors are constant arrays in the basis of the complement ``m`` and are
computed in exact rational arithmetic.  Index positions follow the
structure-constant convention of :mod:`korbit.liealg`:
``gamma[a][b][c]`` is Gamma^a_{bc} and ``riemann[a][b][c][d]`` is R^a_{bcd}.

Contractions are fixed as ``Ric_ab = R^c_{acb}`` and ``R = B^{ab} Ric_ab``.
With this choice the curvature comes out with the opposite overall sign to
the Koszul convention ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``; reports
carry that as ``CURVATURE_SIGN_CONVENTION``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import det, inverse, to_fraction
from .liealg import LieAlgebraModel

CONTRACTION_CONVENTION = "Ric_ab = R^c_acb; R = B^ab Ric_ab"
CURVATURE_SIGN_CONVENTION = "opposite to Koszul R(X,Y)=[nabla_X,nabla_Y]-nabla_[X,Y]"


class DegenerateMetricError(ValueError):
    pass


@dataclass(frozen=True)
class InvariantMetric:
    G_full: tuple
    B_m: tuple
    m_indices: tuple[int, ...]

    @property
    def B_inv(self) -> list[list[Fraction]]:
        return inverse(self.B_m)


@dataclass(frozen=True)
class ConnectionData:
    gamma: tuple  # Gamma^a_{bc}, indices into m_indices
    m_indices: tuple[int, ...]


@dataclass(frozen=True)
class CurvatureData:
    riemann: tuple
    ricci: tuple
    scalar: Fraction
    m_indices: tuple[int, ...]


def _freeze(x):
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(v) for v in x)
    return x


def _as_matrix(G, n: int) -> list[list[Fraction]]:
    M = [[to_fraction(v) for v in row] for row in G]
    if len(M) != n or any(len(r) != n for r in M):
        raise ValueError(f"metric must be {n}x{n}")
    return M


def check_metric_invariance(model: LieAlgebraModel, G) -> tuple[bool, list[tuple[int, int, int, Fraction]]]:
    """Check G([X,Y],Z) + G(Y,[X,Z]) = 0 for X in h and Y, Z in L.

    Returns ``(holds, witnesses)`` with witnesses ``(x, y, z, value)``.
    """
    n, C = model.dim, model.C
    G = _as_matrix(G, n)
    if any(G[i][j] != G[j][i] for i in range(n) for j in range(n)):
        raise ValueError("metric is not symmetric")
    bad = []
    for x in model.subalgebra_h:
        for y in range(n):
            for z in range(n):
                v = sum((C[a][x][y] * G[a][z] + G[y][a] * C[a][x][z] for a in range(n)), Fraction(0))
                if v:
                    bad.append((x, y, z, v))
    return not bad, bad


def build_form_B(model: LieAlgebraModel, G) -> InvariantMetric:
    """Restrict G to the complement ``m``; refuses a degenerate restriction."""
    G = _as_matrix(G, model.dim)
    m = model.complement_m
    B = [[G[i][j] for j in m] for i in m]
    if det(B) == 0:
        raise DegenerateMetricError("degenerate induced metric")
    return InvariantMetric(_freeze(G), _freeze(B), m)


def _m_constants(model: LieAlgebraModel, m: Sequence[int]):
    return [[[model.C[a][b][c] for c in m] for b in m] for a in m]


def christoffel(model: LieAlgebraModel, metric: InvariantMetric) -> ConnectionData:
    """Gamma^a_{bc} = -C^a_{bc}/2 - G^{ad}(G_ec C^e_bd + G_eb C^e_cd)/2 over m."""
    m = metric.m_indices
    k = len(m)
    C = _m_constants(model, m)
    G = metric.B_m
    Gi = metric.B_inv
    half = Fraction(1, 2)
    # T[c][b][d] = G_ec C^e_bd
    T = [[[sum((G[e][c] * C[e][b][d] for e in range(k)), Fraction(0)) for d in range(k)]
          for b in range(k)] for c in range(k)]
    gamma = [[[-half * C[a][b][c]
               - half * sum((Gi[a][d] * (T[c][b][d] + T[b][c][d]) for d in range(k)), Fraction(0))
               for c in range(k)] for b in range(k)] for a in range(k)]
    return ConnectionData(_freeze(gamma), m)


def riemann(model: LieAlgebraModel, connection: ConnectionData, metric: InvariantMetric) -> CurvatureData:
    """R^a_{bcd} = Gam^a_{ed} Gam^e_{bc} - Gam^a_{ec} Gam^e_{bd} + C^e_{cd} Gam^a_{be}.

    The dummy index e runs over m only.
    """
    m = connection.m_indices
    k = len(m)
    Gm = connection.gamma
    C = _m_constants(model, m)
    R = [[[[sum((Gm[a][e][d] * Gm[e][b][c] - Gm[a][e][c] * Gm[e][b][d] + C[e][c][d] * Gm[a][b][e]
                 for e in range(k)), Fraction(0))
            for d in range(k)] for c in range(k)] for b in range(k)] for a in range(k)]
    ricci, scalar = ricci_scalar(R, metric)
    return CurvatureData(_freeze(R), _freeze(ricci), scalar, m)


def ricci_scalar(riemann_tensor, metric: InvariantMetric) -> tuple[list[list[Fraction]], Fraction]:
    if isinstance(riemann_tensor, CurvatureData):
        riemann_tensor = riemann_tensor.riemann
    k = len(riemann_tensor)
    ric = [[sum((riemann_tensor[c][a][c][b] for c in range(k)), Fraction(0)) for b in range(k)]
           for a in range(k)]
    Bi = metric.B_inv
    scalar = sum((Bi[a][b] * ric[a][b] for a in range(k) for b in range(k)), Fraction(0))
    return ric, scalar


@dataclass(frozen=True)
class GeometryResult:
    metric: InvariantMetric
    connection: ConnectionData
    curvature: CurvatureData


def compute_geometry(model: LieAlgebraModel, G) -> GeometryResult:
    """Form B, connection and curvature in one go (no invariance gate)."""
    metric = build_form_B(model, G)
    conn = christoffel(model, metric)
    return GeometryResult(metric, conn, riemann(model, conn, metric))
