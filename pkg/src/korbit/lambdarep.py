"""Canonical transitions, lambda-representation operators and polarizations.

A canonical transition realizes the coordinate functions on a coadjoint orbit
as ``f_X = sum_a alpha^a_X(q) p_a + chi_X(q, l)``.  Quantizing
``p_a -> -i d/dq_a`` and multiplying by ``i`` gives first-order operators
``l_X = sum_a alpha^a_X d/dq_a + i chi_X``.

Bracket convention: the Poisson bracket of :func:`korbit.expr.poisson_bracket`
times ``bracket_sign``.  With ``bracket_sign=+1`` a valid transition
quantizes to operators obeying ``[l_X, l_Y] = -C^K_XY l_K``; with ``-1`` they
obey ``[l_X, l_Y] = +C^K_XY l_K``.  :func:`commutator_check` takes the
expected sign explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from . import expr as ex
from .exact import GaussianRational, independent_rows, rank, solve_in_span, to_fraction
from .liealg import LieAlgebraModel, ad_trace_vector, adjoint_matrix
from .orbits import CasimirPolynomial, orbit_rank

DEFAULT_TOL = 1e-9


class TransitionStructureError(ValueError):
    """Transition is not linear in the momenta or has inconsistent shapes."""


class PolarizationError(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalTransition:
    alpha: tuple  # alpha[X][a]: Expr
    chi: tuple  # chi[X]: Expr
    lambda0: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(tuple(row) for row in self.alpha))
        object.__setattr__(self, "chi", tuple(self.chi))
        if len(self.alpha) != len(self.chi):
            raise TransitionStructureError("alpha and chi cover different numbers of basis elements")
        if len({len(row) for row in self.alpha}) > 1:
            raise TransitionStructureError("alpha rows have different lengths")
        if self.lambda0 is not None:
            object.__setattr__(self, "lambda0", tuple(to_fraction(v) for v in self.lambda0))

    @property
    def dim(self) -> int:
        return len(self.chi)

    @property
    def n_pairs(self) -> int:
        return len(self.alpha[0]) if self.alpha else 0

    def f(self, x: int) -> ex.Expr:
        return ex.add(*(ex.mul(a, ex.p(i + 1)) for i, a in enumerate(self.alpha[x])), self.chi[x])

    @classmethod
    def from_strings(cls, alpha: Sequence[Sequence[str]], chi: Sequence[str], lambda0=None) -> "CanonicalTransition":
        return cls(tuple(tuple(ex.parse(s) for s in row) for row in alpha),
                   tuple(ex.parse(s) for s in chi), lambda0)

    @classmethod
    def from_functions(cls, fs: Sequence, n_pairs: int, lambda0=None) -> "CanonicalTransition":
        """Split full ``f_X(q, p, l)`` into alpha and chi; rejects p-nonlinear input."""
        alpha, chi = [], []
        for x, f in enumerate(fs):
            f = ex.parse(f) if isinstance(f, str) else f
            for a in range(1, n_pairs + 1):
                d = ex.degree_in(f, ex.p(a))
                if d is None or d > 1:
                    raise TransitionStructureError(f"f_{x + 1} is not linear in p{a}")
            extra = {v for v in ex.free_vars(f) if v.kind == "p" and v.index > n_pairs}
            if extra:
                raise TransitionStructureError(f"f_{x + 1} uses momenta beyond p{n_pairs}")
            zero_p = {ex.p(a): ex.ZERO for a in range(1, n_pairs + 1)}
            alpha.append(tuple(ex.substitute(ex.differentiate(f, ex.p(a)), zero_p) for a in range(1, n_pairs + 1)))
            chi.append(ex.substitute(f, zero_p))
        return cls(tuple(alpha), tuple(chi), lambda0)


def structural_problems(transition: CanonicalTransition) -> list[str]:
    problems = []
    for x in range(transition.dim):
        for a, coef in enumerate(transition.alpha[x]):
            if any(v.kind == "p" for v in ex.free_vars(coef)):
                problems.append(f"alpha^{a + 1}_{x + 1} depends on momenta")
        if any(v.kind == "p" for v in ex.free_vars(transition.chi[x])):
            problems.append(f"chi_{x + 1} depends on momenta")
    return problems


def lambda_binding(values, beta: Optional[Sequence] = None) -> dict:
    """Binding for l-variables; ``values`` is a sequence or {1-based index: value}.

    With ``beta`` the quantum shift l -> l + i*beta is applied.
    """
    items = values.items() if isinstance(values, Mapping) else enumerate(values, start=1)
    out = {}
    for k, v in items:
        v = complex(float(to_fraction(v)) if not isinstance(v, complex) else v)
        if beta is not None:
            v += 1j * float(beta[int(k) - 1])
        out[ex.lam(int(k))] = v
    return out


def _used_lambdas(exprs) -> set[int]:
    out = set()
    for e in exprs:
        out |= {v.index for v in ex.free_vars(e) if v.kind == "l"}
    return out


# ---------------------------------------------------------------------------
# validation of transitions
# ---------------------------------------------------------------------------

@dataclass
class PairResidual:
    x: int
    y: int
    max_residual: float
    symbolic_zero: bool
    residual_expr: str
    worst_lambda: dict

    def as_dict(self) -> dict:
        return {"pair": [self.x + 1, self.y + 1], "max_residual": self.max_residual,
                "symbolic_zero": self.symbolic_zero, "residual": self.residual_expr,
                "worst_lambda": self.worst_lambda}


@dataclass
class TransitionReport:
    tol: float
    bracket_sign: int
    pairs: list = field(default_factory=list)
    base_point_residual: float = 0.0
    casimir_residuals: list = field(default_factory=list)

    @property
    def max_bracket_residual(self) -> float:
        return max((r.max_residual for r in self.pairs), default=0.0)

    @property
    def failing_pairs(self) -> list:
        return [r for r in self.pairs if r.max_residual > self.tol]

    @property
    def ok(self) -> bool:
        return (not self.failing_pairs and self.base_point_residual <= self.tol
                and all(c <= self.tol for c in self.casimir_residuals))

    def as_dict(self) -> dict:
        return {"ok": self.ok, "tol": self.tol, "bracket_sign": self.bracket_sign,
                "max_bracket_residual": self.max_bracket_residual,
                "pairs": [r.as_dict() for r in self.pairs],
                "base_point_residual": self.base_point_residual,
                "casimir_residuals": self.casimir_residuals}


def _sample_lambdas(transition: CanonicalTransition, dim: int, rng, count: int, fixed: Optional[Mapping]):
    used = _used_lambdas(transition.chi) | _used_lambdas(c for row in transition.alpha for c in row)
    base = transition.lambda0 or tuple(Fraction(0) for _ in range(dim))
    fixed = {int(k): v for k, v in (fixed or {}).items()}
    out = []
    for _ in range(count):
        vals = {}
        for k in range(1, dim + 1):
            if k in fixed:
                vals[k] = float(to_fraction(fixed[k]))
            elif k in used:
                vals[k] = float(rng.uniform(-2.0, 2.0))
            else:
                vals[k] = float(base[k - 1])
        out.append(vals)
    return out


def _poly_value(casimir: CasimirPolynomial, fvals: Sequence[complex]) -> complex:
    total = 0j
    for mono, c in casimir.coeffs:
        term = complex(float(c))
        for v, e in enumerate(mono):
            if e:
                term *= fvals[v] ** e
        total += term
    return total


def validate_canonical_transition(model: LieAlgebraModel, transition: CanonicalTransition,
                                  casimirs: Sequence[CasimirPolynomial] = (), *, bracket_sign: int = 1,
                                  tol: float = DEFAULT_TOL, n_points: int = 20, seed: int = 0,
                                  lambda_values: Optional[Mapping] = None) -> TransitionReport:
    """Check ``s*{f_X, f_Y} = sum_K C^K_XY f_K``, ``f_X(0,0,l) = l_X`` and Casimir constancy.

    Residuals are evaluated at ``n_points`` random (q, p, l) points; the
    symbolic residual is also kept so exact cancellation is visible.
    ``lambda_values`` pins selected l-components (1-based keys).
    """
    if bracket_sign not in (1, -1):
        raise ValueError("bracket_sign must be +1 or -1")
    if transition.dim != model.dim:
        raise TransitionStructureError(f"transition covers {transition.dim} basis elements, algebra has {model.dim}")
    problems = structural_problems(transition)
    if problems:
        raise TransitionStructureError("; ".join(problems))
    n, k = model.dim, transition.n_pairs
    rng = np.random.default_rng(seed)
    fs = [transition.f(x) for x in range(n)]
    lambdas = _sample_lambdas(transition, n, rng, n_points, lambda_values)
    points = []
    for lv in lambdas:
        b = ex.bind(q=rng.uniform(-1, 1, k), p=rng.uniform(-1, 1, k))
        b.update(lambda_binding(lv))
        points.append((b, lv))
    report = TransitionReport(tol, bracket_sign)
    for x in range(n):
        for y in range(x + 1, n):
            if k:
                br = ex.mul(ex.Const(Fraction(bracket_sign)), ex.poisson_bracket(fs[x], fs[y], k))
            else:
                br = ex.ZERO
            rhs = ex.add(*(ex.mul(ex.Const(model.C[K][x][y]), fs[K]) for K in range(n) if model.C[K][x][y]))
            resid = ex.add(br, ex.mul(ex.Const(Fraction(-1)), rhs))
            worst, worst_l = 0.0, {}
            if resid != ex.ZERO:
                for b, lv in points:
                    r = abs(ex.evaluate(resid, b))
                    if r > worst:
                        worst, worst_l = r, lv
            report.pairs.append(PairResidual(x, y, worst, resid == ex.ZERO, ex.to_string(resid), worst_l))
    zero_q = {ex.q(a): 0.0 for a in range(1, k + 1)}
    base = 0.0
    for b, lv in points[:10]:
        bb = dict(b)
        bb.update(zero_q)
        for x in range(n):
            base = max(base, abs(ex.evaluate(transition.chi[x], bb) - lv[x + 1]))
    report.base_point_residual = base
    for cas in casimirs:
        dev = 0.0
        for b0, _ in points[:2]:
            ref = None
            for _ in range(10):
                b = dict(b0)
                b.update(ex.bind(q=rng.uniform(-1, 1, k), p=rng.uniform(-1, 1, k)))
                val = _poly_value(cas, [ex.evaluate(f, b) for f in fs])
                ref = val if ref is None else ref
                dev = max(dev, abs(val - ref))
        report.casimir_residuals.append(dev)
    return report


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaOperator:
    """``sum_a coeffs[a] d/dq_{a+1} + zeroth``."""

    coeffs: tuple
    zeroth: ex.Expr

    def apply(self, psi: ex.Expr) -> ex.Expr:
        terms = [ex.mul(c, ex.differentiate(psi, ex.q(a + 1))) for a, c in enumerate(self.coeffs)]
        terms.append(ex.mul(self.zeroth, psi))
        return ex.add(*terms)

    def derivation(self, f: ex.Expr) -> ex.Expr:
        """Apply only the vector-field part."""
        return ex.add(*(ex.mul(c, ex.differentiate(f, ex.q(a + 1))) for a, c in enumerate(self.coeffs)))

    def scaled(self, c) -> "LambdaOperator":
        c = ex.const(c)
        return LambdaOperator(tuple(ex.mul(c, a) for a in self.coeffs), ex.mul(c, self.zeroth))

    def __add__(self, other: "LambdaOperator") -> "LambdaOperator":
        return LambdaOperator(tuple(ex.add(a, b) for a, b in zip(self.coeffs, other.coeffs)),
                              ex.add(self.zeroth, other.zeroth))

    def __sub__(self, other: "LambdaOperator") -> "LambdaOperator":
        return self + other.scaled(-1)

    def to_string(self) -> str:
        parts = [f"({ex.to_string(c)})*d/dq{a + 1}" for a, c in enumerate(self.coeffs) if c != ex.ZERO]
        if self.zeroth != ex.ZERO or not parts:
            parts.append(ex.to_string(self.zeroth))
        return " + ".join(parts)


def zero_operator(n_pairs: int) -> LambdaOperator:
    return LambdaOperator(tuple(ex.ZERO for _ in range(n_pairs)), ex.ZERO)


def commutator(A: LambdaOperator, B: LambdaOperator) -> LambdaOperator:
    """[A, B] of first-order operators, again first order."""
    coeffs = tuple(ex.add(A.derivation(b), ex.mul(ex.Const(Fraction(-1)), B.derivation(a)))
                   for a, b in zip(A.coeffs, B.coeffs))
    zeroth = ex.add(A.derivation(B.zeroth), ex.mul(ex.Const(Fraction(-1)), B.derivation(A.zeroth)))
    return LambdaOperator(coeffs, zeroth)


def build_operators(transition: CanonicalTransition, report: Optional[TransitionReport]) -> list[LambdaOperator]:
    """``l_X = sum_a alpha^a_X d/dq_a + i chi_X`` from a validated transition."""
    if report is None or not report.ok:
        raise TransitionStructureError("transition has not passed validation")
    problems = structural_problems(transition)
    if problems:
        raise TransitionStructureError("; ".join(problems))
    return [LambdaOperator(transition.alpha[x], ex.mul(ex.I, transition.chi[x])) for x in range(transition.dim)]


def unchecked_operators(transition: CanonicalTransition) -> list[LambdaOperator]:
    """Operators without the validation gate (for diagnostics only)."""
    problems = structural_problems(transition)
    if problems:
        raise TransitionStructureError("; ".join(problems))
    return [LambdaOperator(transition.alpha[x], ex.mul(ex.I, transition.chi[x])) for x in range(transition.dim)]


DEFAULT_PROBES = ("1", "q1", "q1^2", "exp(q1)")


@dataclass
class CommutatorReport:
    tol: float
    sign: int
    residuals: dict  # (x, y) -> max residual
    by_probe: dict = field(default_factory=dict)  # probe text -> max residual

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol

    def as_dict(self) -> dict:
        return {"ok": self.ok, "tol": self.tol, "expected": f"[l_X,l_Y] = {'+' if self.sign > 0 else '-'}C^K_XY l_K",
                "max_residual": self.max_residual, "by_probe": self.by_probe,
                "pairs": [{"pair": [x + 1, y + 1], "max_residual": r} for (x, y), r in sorted(self.residuals.items())]}


def _random_q_binding(rng, n_pairs: int) -> dict:
    # probe functions mention q1 even when there are no coordinates
    return ex.bind(q=rng.uniform(-1, 1, max(n_pairs, 1)))


def commutator_check(ops: Sequence[LambdaOperator], model: LieAlgebraModel, lambda_values, *, sign: int = 1,
                     probes: Sequence[str] = DEFAULT_PROBES, n_points: int = 10, seed: int = 0,
                     tol: float = DEFAULT_TOL) -> CommutatorReport:
    """Residual of ``[l_X, l_Y] - sign * sum_K C^K_XY l_K`` on probe functions."""
    n = model.dim
    k = len(ops[0].coeffs) if ops else 0
    rng = np.random.default_rng(seed)
    lb = lambda_binding(lambda_values)
    psis = [ex.parse(s) if isinstance(s, str) else s for s in probes]
    by_probe = {ex.to_string(psi): 0.0 for psi in psis}
    points = []
    for _ in range(n_points):
        b = _random_q_binding(rng, k)
        b.update(lb)
        points.append(b)
    residuals = {}
    for x in range(n):
        for y in range(x + 1, n):
            D = commutator(ops[x], ops[y])
            for K in range(n):
                if model.C[K][x][y]:
                    D = D - ops[K].scaled(sign * model.C[K][x][y])
            worst = 0.0
            for psi in psis:
                out = D.apply(psi)
                if out == ex.ZERO:
                    continue
                key = ex.to_string(psi)
                for b in points:
                    r = abs(ex.evaluate(out, b))
                    worst = max(worst, r)
                    by_probe[key] = max(by_probe[key], r)
            residuals[(x, y)] = worst
    return CommutatorReport(tol, sign, residuals, by_probe)


def anti_hermiticity_check(ops: Sequence[LambdaOperator], nodes, weights, lambda_values,
                           probe_pairs: Optional[Sequence[tuple[str, str]]] = None) -> list[float]:
    """``|(l phi, psi) + (phi, l psi)|`` per operator, maximised over probe pairs.

    ``nodes`` has shape (N, n_pairs).  Boundary terms are not removed, so
    the default probes decay at the edges of the grid.
    """
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    k = nodes.shape[1] if nodes.ndim == 2 else 1
    nodes = nodes.reshape(len(weights), k)
    if probe_pairs is None:
        g = "exp(-" + " - ".join(f"q{a}^2" for a in range(1, k + 1)) + ")"
        probe_pairs = [(g, g), (f"q1*{g}", g), (f"(1 + 2*q1 + i*q1^2)*{g}", f"(3 - i*q1)*{g}")]
    b = {ex.q(a + 1): nodes[:, a] for a in range(k)}
    b.update(lambda_binding(lambda_values))
    out = []
    for op in ops:
        worst = 0.0
        for s1, s2 in probe_pairs:
            phi, psi = ex.parse(s1), ex.parse(s2)
            lphi, lpsi = op.apply(phi), op.apply(psi)
            v = [np.broadcast_to(ex.evaluate(e, b), weights.shape) for e in (phi, psi, lphi, lpsi)]
            s = np.sum(weights * (np.conj(v[2]) * v[1] + np.conj(v[0]) * v[3]))
            worst = max(worst, abs(s))
        out.append(float(worst))
    return out


@dataclass
class CasimirOperatorReport:
    value: complex
    residual: float
    tol: float
    ordering: str = "monomials f_A f_B ... map to l_A l_B ... (left-to-right composition, no symmetrization)"

    @property
    def constant(self) -> bool:
        return self.residual <= self.tol

    def as_dict(self) -> dict:
        return {"constant": self.constant, "value": [self.value.real, self.value.imag],
                "residual": self.residual, "tol": self.tol, "ordering": self.ordering}


def apply_casimir(casimir: CasimirPolynomial, ops: Sequence[LambdaOperator], psi: ex.Expr) -> ex.Expr:
    terms = []
    for mono, c in casimir.coeffs:
        seq = [v for v, e in enumerate(mono) for _ in range(e)]
        out = psi
        for v in reversed(seq):
            out = ops[v].apply(out)
        terms.append(ex.mul(ex.Const(c), out))
    return ex.add(*terms)


def casimir_in_lambda_rep(casimir: CasimirPolynomial, ops: Sequence[LambdaOperator], lambda_values, *,
                          probes: Sequence[str] = ("1", "exp(q1)", "1 + q1^2"), n_points: int = 10,
                          seed: int = 0, tol: float = DEFAULT_TOL) -> CasimirOperatorReport:
    """Whether the Casimir acts as a constant H(l) on probe functions."""
    k = len(ops[0].coeffs) if ops else 0
    rng = np.random.default_rng(seed)
    lb = lambda_binding(lambda_values)
    ratios = []
    for s in probes:
        psi = ex.parse(s)
        out = apply_casimir(casimir, ops, psi)
        for _ in range(n_points):
            b = _random_q_binding(rng, k)
            b.update(lb)
            ratios.append(ex.evaluate(out, b) / ex.evaluate(psi, b))
    value = ratios[0]
    return CasimirOperatorReport(complex(value), float(max(abs(r - value) for r in ratios)), tol)


# ---------------------------------------------------------------------------
# polarizations
# ---------------------------------------------------------------------------

def _as_gauss_vectors(vectors) -> list[list[GaussianRational]]:
    return [[GaussianRational.coerce(c) for c in v] for v in vectors]


def _ad_apply(model: LieAlgebraModel, x: int, v: Sequence[GaussianRational]) -> list[GaussianRational]:
    M = adjoint_matrix(model, x)
    n = model.dim
    return [sum((v[b] * M[a][b] for b in range(n) if M[a][b]), GaussianRational()) for a in range(n)]


def _complex_bracket(model: LieAlgebraModel, u, v) -> list[GaussianRational]:
    n = model.dim
    out = [GaussianRational() for _ in range(n)]
    for b in range(n):
        if not u[b]:
            continue
        for c in range(n):
            if not v[c]:
                continue
            uv = u[b] * v[c]
            for a in range(n):
                if model.C[a][b][c]:
                    out[a] = out[a] + uv * model.C[a][b][c]
    return out


@dataclass
class PolarizationReport:
    dim_n: int
    required_dim: int
    closed: bool
    closure_witness: Optional[tuple]
    isotropic: bool
    isotropy_witness: Optional[tuple]

    @property
    def dimension_ok(self) -> bool:
        return self.dim_n == self.required_dim

    @property
    def ok(self) -> bool:
        return self.closed and self.isotropic and self.dimension_ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "dim_n": self.dim_n, "required_dim": self.required_dim,
                "closed": self.closed,
                "closure_witness": None if self.closure_witness is None else [i + 1 for i in self.closure_witness],
                "isotropic": self.isotropic,
                "isotropy_witness": None if self.isotropy_witness is None else
                [self.isotropy_witness[0] + 1, self.isotropy_witness[1] + 1, str(self.isotropy_witness[2])]}


def polarization_check(model: LieAlgebraModel, lam: Sequence, n_basis) -> PolarizationReport:
    """Subalgebra closure, isotropy for <lam,[.,.]> and dimension of n."""
    vecs = _as_gauss_vectors(n_basis)
    lam = [to_fraction(v) for v in lam]
    dim_n = rank(vecs) if vecs else 0
    required = model.dim - orbit_rank(model, lam) // 2
    basis = independent_rows(vecs)
    closed, cw = True, None
    iso, iw = True, None
    for i, u in enumerate(vecs):
        for j, v in enumerate(vecs):
            if j <= i:
                continue
            w = _complex_bracket(model, u, v)
            if closed and any(w) and solve_in_span(basis, w) is None:
                closed, cw = False, (i, j)
            pairing = sum((w[a] * lam[a] for a in range(model.dim)), GaussianRational())
            if iso and pairing:
                iso, iw = False, (i, j, pairing)
    return PolarizationReport(dim_n, required, closed, cw, iso, iw)


def quantum_shift_beta(model: LieAlgebraModel, n_basis) -> list[Fraction]:
    """beta(X) = (tr ad_X - tr ad_X restricted to n + conj(n)) / 2."""
    vecs = _as_gauss_vectors(n_basis)
    ell = independent_rows(vecs + [[c.conjugate() for c in v] for v in vecs])
    full = ad_trace_vector(model)
    beta = []
    for x in range(model.dim):
        tr = GaussianRational()
        for i, v in enumerate(ell):
            coeffs = solve_in_span(ell, _ad_apply(model, x, v))
            if coeffs is None:
                raise PolarizationError(f"n + conj(n) is not stable under ad_{x + 1}")
            tr = tr + coeffs[i]
        if tr.im != 0:
            raise PolarizationError(f"restricted trace of ad_{x + 1} is not real")  # pragma: no cover
        beta.append((full[x] - tr.re) / 2)
    return beta
