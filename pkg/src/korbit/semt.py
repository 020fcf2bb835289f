"""Vacuum stress-energy-momentum tensor from lambda-representation modes.

Components are "quasi-tetrad": index 0 is time, ``a`` and ``b`` run over the
complement ``m``.  Integrals are plain quadrature sums with no
regularization, so divergent growth across Lambda nodes shows up as is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from .clifford import CliffordRep, SpinorConnection
from .exact import to_fraction
from .fields import ModeFunction, QuadratureGrid, ZeroModeError, _spinor_values
from .lambdarep import LambdaOperator


class DegenerateFrequencyError(ZeroDivisionError):
    pass


# ---------------------------------------------------------------------------
# {l_a, l_b}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecondOrderOperator:
    """``sum_{i<=j} second[(i, j)] d_i d_j + sum_i first[i] d_i + zeroth``."""

    second: tuple  # ((i, j), Expr) with i <= j
    first: tuple
    zeroth: ex.Expr

    def apply(self, psi: ex.Expr) -> ex.Expr:
        terms = []
        for (i, j), c in self.second:
            terms.append(ex.mul(c, ex.differentiate(ex.differentiate(psi, ex.q(i + 1)), ex.q(j + 1))))
        for i, c in enumerate(self.first):
            terms.append(ex.mul(c, ex.differentiate(psi, ex.q(i + 1))))
        terms.append(ex.mul(self.zeroth, psi))
        return ex.add(*terms)

    def to_string(self) -> str:
        parts = [f"({ex.to_string(c)})*d2/dq{i + 1}dq{j + 1}" for (i, j), c in self.second]
        parts += [f"({ex.to_string(c)})*d/dq{i + 1}" for i, c in enumerate(self.first) if c != ex.ZERO]
        if self.zeroth != ex.ZERO or not parts:
            parts.append(ex.to_string(self.zeroth))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def compose(A: LambdaOperator, B: LambdaOperator) -> SecondOrderOperator:
    """A B as a second-order operator."""
    k = len(A.coeffs)
    second: dict = {}
    for i in range(k):
        for j in range(k):
            c = ex.mul(A.coeffs[i], B.coeffs[j])
            if c != ex.ZERO:
                key = (min(i, j), max(i, j))
                second[key] = ex.add(second.get(key, ex.ZERO), c)
    first = tuple(ex.add(A.derivation(B.coeffs[j]), ex.mul(A.coeffs[j], B.zeroth), ex.mul(A.zeroth, B.coeffs[j]))
                  for j in range(k))
    zeroth = ex.add(A.derivation(B.zeroth), ex.mul(A.zeroth, B.zeroth))
    return SecondOrderOperator(tuple((key, c) for key, c in sorted(second.items()) if c != ex.ZERO), first, zeroth)


def _sum_second(X: SecondOrderOperator, Y: SecondOrderOperator) -> SecondOrderOperator:
    second = dict(X.second)
    for key, c in Y.second:
        second[key] = ex.add(second.get(key, ex.ZERO), c)
    return SecondOrderOperator(tuple((key, c) for key, c in sorted(second.items()) if c != ex.ZERO),
                               tuple(ex.add(a, b) for a, b in zip(X.first, Y.first)),
                               ex.add(X.zeroth, Y.zeroth))


def anticommutator_operator(la: LambdaOperator, lb: LambdaOperator) -> SecondOrderOperator:
    """{l_a, l_b} = l_a l_b + l_b l_a."""
    return _sum_second(compose(la, lb), compose(lb, la))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _cpair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass
class ModeContribution:
    label: str
    Lambda: float
    weight: float
    T00: complex
    T0a: list
    Tab: list
    T00_density: list = field(default_factory=list)  # per grid node, before weighting

    def as_dict(self) -> dict:
        return {"s": self.label, "Lambda": self.Lambda, "weight": self.weight, "T00": _cpair(self.T00),
                "T0a": [_cpair(z) for z in self.T0a], "Tab": [[_cpair(z) for z in row] for row in self.Tab],
                "T00_density": [_cpair(z) for z in self.T00_density]}


@dataclass
class SemtReport:
    kind: str
    T00: complex
    T0a: list
    Tab: list
    modes: list
    apply_beta: bool = False
    zeta: Optional[Fraction] = None
    conventions: dict = field(default_factory=dict)

    def asymmetry(self) -> float:
        k = len(self.Tab)
        return max((abs(self.Tab[a][b] - self.Tab[b][a]) for a in range(k) for b in range(k)), default=0.0)

    def max_imag(self) -> float:
        vals = [self.T00] + [z for row in self.Tab for z in row]
        return max(abs(z.imag) for z in vals)

    def monotonicity(self) -> dict:
        """Whether |T00| contributions grow with |Lambda| (raw divergence diagnostic)."""
        ordered = sorted(self.modes, key=lambda c: (abs(c.Lambda), c.label))
        mags = [abs(c.T00) for c in ordered]
        return {"ordered_by": "|Lambda|", "abs_T00": mags,
                "nondecreasing": all(x <= y for x, y in zip(mags, mags[1:]))}

    def as_dict(self) -> dict:
        return {"kind": self.kind, "T00": _cpair(self.T00), "T0a": [_cpair(z) for z in self.T0a],
                "Tab": [[_cpair(z) for z in row] for row in self.Tab],
                "Tab_asymmetry": self.asymmetry(), "max_imag": self.max_imag(),
                "apply_beta": self.apply_beta, "zeta": None if self.zeta is None else str(self.zeta),
                "conventions": self.conventions, "monotonicity": self.monotonicity(),
                "modes": [c.as_dict() for c in self.modes]}


def _check_norm(mode: ModeFunction, vals: np.ndarray, grid: QuadratureGrid):
    n2 = math.fsum(grid.weights * np.sum(np.abs(vals) ** 2, axis=1))
    if n2 == 0:
        raise ZeroModeError(f"mode {mode.s!r} has zero norm")


def semt_scalar(modes: Sequence[ModeFunction], ops: Sequence[LambdaOperator], ricci, grid: QuadratureGrid,
                zeta, m_indices: Sequence[int], beta=None) -> SemtReport:
    """T00 = -1/2 int omega |psi|^2, T0a = i/2 int conj(psi) l_a psi,
    Tab = int conj(psi) ({l_a, l_b} - zeta R_ab) psi / (2 omega)."""
    k = len(m_indices)
    zeta = to_fraction(zeta)
    anti = [[anticommutator_operator(ops[m_indices[a]], ops[m_indices[b]]) for b in range(k)] for a in range(k)]
    contribs = []
    for mode in modes:
        if mode.is_spinor:
            raise ValueError("semt_scalar needs scalar modes")
        if mode.omega == 0:
            raise DegenerateFrequencyError(f"omega = 0 for mode {mode.s!r}")
        lv = mode.lambda_values
        psi = grid.values(mode.psi, lv, beta)
        _check_norm(mode, psi[:, None], grid)
        cpsi = np.conj(psi)
        dens00 = -0.5 * mode.omega * np.abs(psi) ** 2
        T00 = grid.integrate(dens00)
        T0a = [grid.integrate(0.5j * cpsi * grid.values(ops[m_indices[a]].apply(mode.psi), lv, beta))
               for a in range(k)]
        Tab = []
        for a in range(k):
            row = []
            for b in range(k):
                hpsi = grid.values(anti[a][b].apply(mode.psi), lv, beta)
                hpsi = hpsi - float(zeta * to_fraction(ricci[a][b])) * psi
                row.append(grid.integrate(cpsi * hpsi / (2 * mode.omega)))
            Tab.append(row)
        contribs.append(ModeContribution(mode.s, float(mode.Lambda), float(mode.weight), T00, T0a, Tab,
                                         [complex(z) for z in dens00]))
    return _assemble("scalar", contribs, k, beta is not None, zeta)


def semt_spinor(modes: Sequence[ModeFunction], ops: Sequence[LambdaOperator], rep: CliffordRep,
                spin_conn: SpinorConnection, grid: QuadratureGrid, m_indices: Sequence[int],
                beta=None) -> SemtReport:
    """Spinor components with psi-bar = psi^dagger gamma0 and lower-index gamma_a."""
    k = len(m_indices)
    if rep.n != k or len(spin_conn.matrices) != k:
        raise ValueError("representation, connection and m disagree in dimension")
    g0 = rep.gamma0
    contribs = []
    for mode in modes:
        if not mode.is_spinor or len(mode.psi) != rep.size:
            raise ValueError(f"spinor mode must have {rep.size} components")
        lv = mode.lambda_values
        L = float(mode.Lambda)
        psi = _spinor_values(mode.psi, grid, lv, beta)  # (N, size)
        _check_norm(mode, psi, grid)
        bar = np.conj(psi) @ g0  # rows are psi^dagger gamma0
        lpsi = [_spinor_values(tuple(ops[m_indices[a]].apply(c) for c in mode.psi), grid, lv, beta)
                for a in range(k)]
        Gpsi = [psi @ spin_conn.matrices[a].T for a in range(k)]
        Gbar = [np.conj(G) @ g0 for G in Gpsi]

        def dot(u, v):
            return np.sum(u * v, axis=1)

        dens00 = -L * dot(np.conj(psi), psi)
        T00 = grid.integrate(dens00)
        T0a = []
        for a in range(k):
            ga = rep.gammas[a]
            v = (-0.5 * L * dot(bar, psi @ ga.T) + 0.5j * dot(np.conj(psi), lpsi[a])
                 + 0.25j * (dot(np.conj(psi), Gpsi[a]) - dot(Gbar[a], psi)))
            T0a.append(grid.integrate(v))

        def raw(a, b):
            gb_a = rep.gammas[a]
            return (1j * dot(bar, lpsi[b] @ gb_a.T)
                    + 0.5j * (dot(bar, Gpsi[b] @ gb_a.T) - dot(Gbar[a], psi @ rep.gammas[b].T)))

        Tab = [[grid.integrate(0.5 * (raw(a, b) + raw(b, a))) for b in range(k)] for a in range(k)]
        contribs.append(ModeContribution(mode.s, L, float(mode.weight), T00, T0a, Tab,
                                         [complex(z) for z in dens00]))
    return _assemble("spinor", contribs, k, beta is not None, None)


def _assemble(kind: str, contribs: list, k: int, apply_beta: bool, zeta) -> SemtReport:
    T00 = _csum(c.weight * c.T00 for c in contribs)
    T0a = [_csum(c.weight * c.T0a[a] for c in contribs) for a in range(k)]
    Tab = [[_csum(c.weight * c.Tab[a][b] for c in contribs) for b in range(k)] for a in range(k)]
    conventions = {"components": "quasi-tetrad, 0 = time, a,b over m (1-based in reports)",
                   "integration": "plain quadrature sums, no regularization"}
    if kind == "spinor":
        conventions["dirac_conjugate"] = "psi-bar = psi^dagger gamma0"
        conventions["symmetrization"] = "X_(ab) = (X_ab + X_ba)/2"
    return SemtReport(kind, T00, T0a, Tab, contribs, apply_beta, zeta, conventions)
