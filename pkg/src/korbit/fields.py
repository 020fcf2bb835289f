"""Mode-level field equations on a coadjoint orbit.

Modes are expressions in ``q`` and ``l`` evaluated on a quadrature grid over
the orbit coordinates.  Measures on the spectral parameters (lambda, Lambda,
spin label) enter as per-mode weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .clifford import CliffordRep, SpinorConnection
from .exact import to_fraction
from .lambdarep import LambdaOperator, lambda_binding


class TachyonicModeError(ValueError):
    def __init__(self, radicand: float):
        super().__init__(f"tachyonic mode: Lambda^2 + zeta R + m^2 = {radicand!r} < 0")
        self.radicand = radicand


class ZeroModeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _simpson_1d(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of nodes >= 3")
    x = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return x, w * h / 3


def _periodic_1d(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise ValueError("periodic rule needs at least one node")
    h = (b - a) / n
    return a + h * np.arange(n), np.full(n, h)


def _gauss_1d(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


RULES = {"simpson": _simpson_1d, "periodic": _periodic_1d, "gauss": _gauss_1d}


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor-product rule on a box; ``nodes`` has shape (N, dim)."""

    nodes: np.ndarray
    weights: np.ndarray
    rule: str = "simpson"

    def __post_init__(self):
        if self.nodes.ndim != 2 or self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("nodes must have shape (N, dim) matching weights")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @classmethod
    def point(cls) -> "QuadratureGrid":
        """Zero-dimensional orbit: one node, unit weight."""
        return cls(np.zeros((1, 0)), np.ones(1), "point")

    @classmethod
    def box(cls, box: Sequence[Sequence[float]], nodes: Union[int, Sequence[int]], rule: str = "simpson"):
        if not box:
            return cls.point()
        if rule not in RULES:
            raise ValueError(f"unknown quadrature rule {rule!r}")
        counts = [nodes] * len(box) if isinstance(nodes, int) else list(nodes)
        axes = [RULES[rule](float(a), float(b), int(n)) for (a, b), n in zip(box, counts)]
        xs = np.meshgrid(*[x for x, _ in axes], indexing="ij")
        ws = np.meshgrid(*[w for _, w in axes], indexing="ij")
        pts = np.stack([x.ravel() for x in xs], axis=1)
        wt = np.prod(np.stack([w.ravel() for w in ws], axis=1), axis=1)
        return cls(pts, wt, rule)

    def binding(self, lambda_values=(), beta=None) -> dict:
        b = {ex.q(a + 1): self.nodes[:, a] for a in range(self.dim)}
        b.update(lambda_binding(lambda_values, beta))
        return b

    def values(self, e: ex.Expr, lambda_values=(), beta=None) -> np.ndarray:
        """``e`` on every node as a complex array of length N."""
        v = ex.evaluate(e, self.binding(lambda_values, beta))
        return np.broadcast_to(np.asarray(v, dtype=complex), self.weights.shape)

    def integrate(self, values) -> complex:
        v = np.asarray(values, dtype=complex) * self.weights
        return complex(math.fsum(v.real), math.fsum(v.imag))


# ---------------------------------------------------------------------------
# modes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeFunction:
    """Scalar (``psi`` an Expr) or spinor (``psi`` a tuple of Exprs) mode.

    ``weight`` is the product of the spectral measures dmu(lambda) dmu(Lambda)
    dmu(s) attached to this mode.
    """

    psi: Union[ex.Expr, tuple]
    Lambda: float
    omega: float = 0.0
    lambda_values: tuple = ()
    weight: float = 1.0
    s: str = ""

    @property
    def is_spinor(self) -> bool:
        return isinstance(self.psi, tuple)

    @property
    def components(self) -> tuple:
        return self.psi if self.is_spinor else (self.psi,)


def kg_dispersion(Lambda, R, m, n: int) -> tuple[Fraction, float]:
    """zeta = (n-1)/(4n) and omega = sqrt(Lambda^2 + zeta R + m^2)."""
    if n < 1:
        raise ValueError("n must be positive")
    zeta = Fraction(n - 1, 4 * n)
    radicand = float(Lambda) ** 2 + float(zeta * to_fraction(R)) + float(m) ** 2
    if radicand < 0:
        raise TachyonicModeError(radicand)
    return zeta, math.sqrt(radicand)


def _spinor_values(psi: Sequence[ex.Expr], grid: QuadratureGrid, lambda_values, beta=None) -> np.ndarray:
    """Array of shape (N, n_components)."""
    return np.stack([grid.values(c, lambda_values, beta) for c in psi], axis=1)


def mode_norm(mode: ModeFunction, grid: QuadratureGrid, beta=None) -> float:
    vals = _spinor_values(mode.components, grid, mode.lambda_values, beta)
    return math.sqrt(math.fsum(grid.weights * np.sum(np.abs(vals) ** 2, axis=1)))


def normalize_mode(mode: ModeFunction, grid: QuadratureGrid, beta=None) -> tuple[float, ModeFunction]:
    """(norm, rescaled mode) with norm = sqrt(int |psi|^2 dmu(q))."""
    norm = mode_norm(mode, grid, beta)
    if norm == 0:
        raise ZeroModeError("mode has zero norm on the grid")
    c = ex.const(1.0 / norm)
    scaled = tuple(ex.mul(c, comp) for comp in mode.components)
    return norm, replace(mode, psi=scaled if mode.is_spinor else scaled[0])


def laplace_operator_apply(psi: ex.Expr, ops: Sequence[LambdaOperator], B_inv, ad_traces,
                           m_indices: Sequence[int]) -> ex.Expr:
    """H psi with H = B^{ab} (l_a l_b - tr(ad_a) l_b), a and b over m."""
    k = len(m_indices)
    terms = []
    for a in range(k):
        la = ops[m_indices[a]]
        for b in range(k):
            g = to_fraction(B_inv[a][b])
            if not g:
                continue
            lb_psi = ops[m_indices[b]].apply(psi)
            t = ex.add(la.apply(lb_psi), ex.mul(ex.Const(-to_fraction(ad_traces[a])), lb_psi))
            terms.append(ex.mul(ex.Const(g), t))
    return ex.add(*terms)


def laplace_residual(psi: ex.Expr, ops: Sequence[LambdaOperator], B_inv, ad_traces, Lambda,
                     grid: QuadratureGrid, lambda_values, m_indices: Optional[Sequence[int]] = None,
                     beta=None) -> float:
    """max over the grid of |(-H - Lambda^2) psi|."""
    m_indices = list(range(len(B_inv))) if m_indices is None else list(m_indices)
    H = laplace_operator_apply(psi, ops, B_inv, ad_traces, m_indices)
    L2 = float(Lambda) ** 2
    r = -grid.values(H, lambda_values, beta) - L2 * grid.values(psi, lambda_values, beta)
    return float(np.max(np.abs(r)))


def dirac_apply(psi: Sequence[ex.Expr], ops: Sequence[LambdaOperator], rep: CliffordRep,
                spin_conn: SpinorConnection, Lambda, m, grid: QuadratureGrid, lambda_values,
                m_indices: Sequence[int], beta=None) -> np.ndarray:
    """[gamma^a (l_a + Gamma_a) - i Lambda gamma0 + i m] psi on every node, shape (N, size)."""
    if len(psi) != rep.size:
        raise ValueError(f"spinor has {len(psi)} components, representation has size {rep.size}")
    vals = _spinor_values(psi, grid, lambda_values, beta)
    out = (1j * float(m)) * vals - 1j * float(Lambda) * vals @ rep.gamma0.T
    up = rep.upper
    for a, idx in enumerate(m_indices):
        lpsi = np.stack([grid.values(ops[idx].apply(c), lambda_values, beta) for c in psi], axis=1)
        inner = lpsi + vals @ spin_conn.matrices[a].T
        out = out + inner @ up[a].T
    return out


def dirac_residual(psi: Sequence[ex.Expr], ops: Sequence[LambdaOperator], rep: CliffordRep,
                   spin_conn: SpinorConnection, Lambda, m, grid: QuadratureGrid, lambda_values,
                   m_indices: Optional[Sequence[int]] = None, beta=None) -> float:
    m_indices = list(range(rep.n)) if m_indices is None else list(m_indices)
    vals = _spinor_values(psi, grid, lambda_values, beta) if len(psi) == rep.size else None
    if vals is not None and not np.any(vals):
        raise ZeroModeError("spinor vanishes on the grid")
    out = dirac_apply(psi, ops, rep, spin_conn, Lambda, m, grid, lambda_values, m_indices, beta)
    return float(np.max(np.linalg.norm(out, axis=1)))


def dirac_spectrum(rep: CliffordRep, lam_m: Sequence[float], m) -> tuple[np.ndarray, np.ndarray]:
    """Flat constant-coefficient case: D psi = 0 iff gamma0 (lam_a gamma^a + m) psi = Lambda psi.

    Holds when l_a = i lam_a and Gamma_a = 0.  Returns (Lambdas, eigenvectors as columns).
    The matrix is Hermitian for a negative definite spatial form; otherwise the
    eigenvalues may be complex and are sorted by (real, imag).
    """
    A = float(m) * np.eye(rep.size, dtype=complex)
    for a, g in enumerate(rep.upper):
        A = A + float(lam_m[a]) * g
    A = rep.gamma0 @ A
    if np.allclose(A, A.conj().T, rtol=0, atol=1e-14):
        return np.linalg.eigh(0.5 * (A + A.conj().T))
    w, v = np.linalg.eig(A)
    order = np.lexsort((w.imag, w.real))
    return w[order], v[:, order]


def homogeneity_check(psi: ex.Expr, ops: Sequence[LambdaOperator], h_indices: Sequence[int],
                      grid: QuadratureGrid, lambda_values, beta=None) -> float:
    """max over the grid and alpha in h of |l_alpha psi|."""
    worst = 0.0
    for a in h_indices:
        if not 0 <= a < len(ops):
            raise IndexError(f"h index {a} out of range")
        v = grid.values(ops[a].apply(psi), lambda_values, beta)
        worst = max(worst, float(np.max(np.abs(v))))
    return worst
