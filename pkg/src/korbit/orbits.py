"""Coadjoint orbits: ranks of the Kirillov form, index, strata, Casimirs, defect.

Suprema over covectors are taken over a deterministic sample: all coordinate
covectors plus ``n_samples`` pseudo-random rational covectors.  Ranks are
exact, so a generic sample attains the generic rank outside a proper
algebraic subset.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact import independent_rows, nullspace, rank, to_fraction
from .liealg import LieAlgebraModel

DEFAULT_SEED = 20100101
DEFAULT_SAMPLES = 32
CASIMIR_DEGREE_CAP = 4

Covector = tuple  # tuple[Fraction, ...]
Monomial = tuple  # exponent tuple


def covector(values: Iterable) -> Covector:
    return tuple(to_fraction(v) for v in values)


def kirillov_matrix(model: LieAlgebraModel, lam: Sequence) -> list[list[Fraction]]:
    """``M[a][b] = <lam, [e_a, e_b]> = sum_k C^k_ab lam_k``."""
    n = model.dim
    if len(lam) != n:
        raise ValueError(f"covector has length {len(lam)}, expected {n}")
    lam = covector(lam)
    return [[sum((model.C[k][a][b] * lam[k] for k in range(n) if lam[k]), Fraction(0))
             for b in range(n)] for a in range(n)]


def orbit_rank(model: LieAlgebraModel, lam: Sequence) -> int:
    return rank(kirillov_matrix(model, lam))


def kirillov_form(model: LieAlgebraModel, lam: Sequence, directions: Sequence[int]) -> list[list[Fraction]]:
    M = kirillov_matrix(model, lam)
    return [[M[i][j] for j in directions] for i in directions]


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 7))


def sample_covectors(dim: int, seed: int = DEFAULT_SEED, n_samples: int = DEFAULT_SAMPLES,
                     zero_on: Sequence[int] = ()) -> list[Covector]:
    """Coordinate covectors first, then seeded random ones.

    Components listed in ``zero_on`` are held at zero (used for h-perp).
    Each random sample uses its own ``Random(seed + i)`` stream.
    """
    free = [i for i in range(dim) if i not in set(zero_on)]
    out: list[Covector] = []
    for i in free:
        out.append(tuple(Fraction(int(j == i)) for j in range(dim)))
    for s in range(n_samples):
        rng = random.Random(seed + s)
        v = [Fraction(0)] * dim
        for i in free:
            v[i] = _random_rational(rng)
        out.append(tuple(v))
    return out


def algebra_index(model: LieAlgebraModel, seed: int = DEFAULT_SEED, n_samples: int = DEFAULT_SAMPLES) -> int:
    generic = max((orbit_rank(model, lam) for lam in sample_covectors(model.dim, seed, n_samples)), default=0)
    return model.dim - generic


@dataclass(frozen=True)
class OrbitStratum:
    s: int
    orbit_dim: int
    sample_points: tuple[Covector, ...]


def _probe_covectors(dim: int, seed: int, n_samples: int) -> list[Covector]:
    """Coordinate covectors, random covectors on every coordinate subspace, then zero."""
    probes = sample_covectors(dim, seed, n_samples)
    for size in range(2, dim):
        for support in itertools.combinations(range(dim), size):
            rng = random.Random(seed + 7919 * (1 + sum(1 << i for i in support)))
            v = [Fraction(0)] * dim
            for i in support:
                v[i] = _random_rational(rng) or Fraction(1)
            probes.append(tuple(v))
    probes.append(tuple([Fraction(0)] * dim))
    return probes


def stratify(model: LieAlgebraModel, seed: int = DEFAULT_SEED, n_samples: int = DEFAULT_SAMPLES,
             max_witnesses: int = 3) -> list[OrbitStratum]:
    """Orbit-type strata observed on the probe set, sorted by s."""
    ind = algebra_index(model, seed, n_samples)
    by_rank: dict[int, list[Covector]] = {}
    for lam in _probe_covectors(model.dim, seed, n_samples):
        r = orbit_rank(model, lam)
        pts = by_rank.setdefault(r, [])
        if len(pts) < max_witnesses:
            pts.append(lam)
    strata = []
    for r, pts in by_rank.items():
        strata.append(OrbitStratum((model.dim - ind - r) // 2, r, tuple(pts)))
    return sorted(strata, key=lambda st: st.s)


def defect(model: LieAlgebraModel, seed: int = DEFAULT_SEED, n_samples: int = DEFAULT_SAMPLES) -> int:
    """d_P = sup rank <lam,[L,L]> / 2 - sup rank <lam,[L,h]> over lam in h-perp."""
    h = list(model.subalgebra_h)
    full = 0
    mixed = 0
    for lam in sample_covectors(model.dim, seed, n_samples, zero_on=h):
        M = kirillov_matrix(model, lam)
        full = max(full, rank(M))
        if h:
            mixed = max(mixed, rank([[row[j] for j in h] for row in M]))
    return full // 2 - mixed


# ---------------------------------------------------------------------------
# polynomials on L*
# ---------------------------------------------------------------------------

Poly = dict  # Monomial -> Fraction


def monomials(n_vars: int, degree: int, variables: Optional[Sequence[int]] = None) -> list[Monomial]:
    """Degree-``degree`` monomials in graded-lex order, largest first (f1 > f2 > ...)."""
    variables = range(n_vars) if variables is None else variables
    out = []
    for combo in itertools.combinations_with_replacement(sorted(variables), degree):
        e = [0] * n_vars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def poly_derivative(p: Poly, j: int) -> Poly:
    out: Poly = {}
    for mono, c in p.items():
        if mono[j]:
            m = list(mono)
            m[j] -= 1
            m = tuple(m)
            out[m] = out.get(m, Fraction(0)) + c * mono[j]
    return {m: c for m, c in out.items() if c}


def poly_times_var(p: Poly, k: int) -> Poly:
    out = {}
    for mono, c in p.items():
        m = list(mono)
        m[k] += 1
        out[tuple(m)] = c
    return out


def poly_add(p: Poly, q: Poly, scale=1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, Fraction(0)) + scale * c
    return {m: c for m, c in out.items() if c}


def lie_poisson_with_coordinate(model: LieAlgebraModel, p: Poly, i: int, vanishing: Sequence[int] = ()) -> Poly:
    """``{f_i, p} = sum_{j,k} C^k_ij f_k dp/df_j`` with f_v = 0 for v in ``vanishing``."""
    n = model.dim
    zero = set(vanishing)
    out: Poly = {}
    for j in range(n):
        dp = poly_derivative(p, j)
        if not dp:
            continue
        for k in range(n):
            c = model.C[k][i][j]
            if c and k not in zero:
                out = poly_add(out, poly_times_var(dp, k), c)
    if zero:
        out = {m: c for m, c in out.items() if not any(m[v] for v in zero)}
    return out


@dataclass(frozen=True)
class CasimirPolynomial:
    degree: int
    coeffs: tuple  # sorted ((monomial, Fraction), ...), largest monomial first
    vanishing: tuple[int, ...] = ()

    @property
    def as_dict(self) -> Poly:
        return dict(self.coeffs)

    def __call__(self, lam: Sequence) -> Fraction:
        return evaluate_casimir(self, lam)

    def to_string(self, labels: Optional[Sequence[str]] = None) -> str:
        parts = []
        for mono, c in self.coeffs:
            factors = []
            for v, e in enumerate(mono):
                if e:
                    name = labels[v] if labels else f"f{v + 1}"
                    factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors)
            if c == 1:
                term = body
            elif c == -1:
                term = "-" + body
            else:
                term = f"{c}*{body}"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")


class DegreeCapError(ValueError):
    pass


def commutes_with_all(model: LieAlgebraModel, p: Poly, vanishing: Sequence[int] = ()) -> bool:
    return all(not lie_poisson_with_coordinate(model, p, i, vanishing) for i in range(model.dim))


def find_casimirs(model: LieAlgebraModel, max_degree: int, min_degree: int = 1,
                  vanishing: Sequence[int] = (), cap: int = CASIMIR_DEGREE_CAP) -> list[CasimirPolynomial]:
    """Polynomial Casimirs of each degree in ``[min_degree, max_degree]``.

    The bracket with a coordinate preserves degree, so every homogeneous
    degree is solved separately.  Each degree's solution space is returned in
    reduced echelon form over graded-lex order, so leading coefficients are 1.
    ``vanishing`` restricts to the coordinate stratum ``f_v = 0``.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    if max_degree > cap:
        raise DegreeCapError(f"max_degree {max_degree} exceeds cap {cap}")
    n = model.dim
    free_vars = [v for v in range(n) if v not in set(vanishing)]
    found: list[CasimirPolynomial] = []
    for d in range(max(1, min_degree), max_degree + 1):
        monos = monomials(n, d, free_vars)
        if not monos:
            continue
        # columns: unknown coefficient per monomial; rows: (i, output monomial)
        rows: dict[tuple[int, Monomial], list[Fraction]] = {}
        for col, mono in enumerate(monos):
            image_by_i = [lie_poisson_with_coordinate(model, {mono: Fraction(1)}, i, vanishing) for i in range(n)]
            for i, img in enumerate(image_by_i):
                for out_mono, c in img.items():
                    row = rows.setdefault((i, out_mono), [Fraction(0)] * len(monos))
                    row[col] += c
        system = [rows[key] for key in sorted(rows)]
        basis = nullspace(system, len(monos)) if system else nullspace([], len(monos))
        if not basis:
            continue
        red = independent_rows(basis)
        for vec in red:
            coeffs = tuple((monos[j], c) for j, c in enumerate(vec) if c)
            cas = CasimirPolynomial(d, coeffs, tuple(vanishing))
            if not commutes_with_all(model, cas.as_dict, vanishing):
                raise AssertionError("Casimir failed re-verification")  # pragma: no cover
            found.append(cas)
    return found


def evaluate_casimir(casimir: CasimirPolynomial, lam: Sequence) -> Fraction:
    lam = covector(lam)
    total = Fraction(0)
    for mono, c in casimir.coeffs:
        term = c
        for v, e in enumerate(mono):
            if e:
                term *= lam[v] ** e
        total += term
    return total


def compatible(casimirs: Sequence[CasimirPolynomial], lam: Sequence) -> bool:
    """True when every supplied Casimir vanishes at ``lam``."""
    return all(evaluate_casimir(k, lam) == 0 for k in casimirs)


def infinitesimal_invariance(model: LieAlgebraModel, casimir: CasimirPolynomial, lam: Sequence) -> list[Fraction]:
    """``sum_{j,k} C^k_ij lam_k dK/df_j (lam)`` for each i; all zero for a Casimir."""
    lam = covector(lam)
    out = []
    for i in range(model.dim):
        img = lie_poisson_with_coordinate(model, casimir.as_dict, i, casimir.vanishing)
        out.append(evaluate_casimir(CasimirPolynomial(casimir.degree, tuple(img.items())), lam))
    return out


def vanishes_on_h_perp(model: LieAlgebraModel, casimir: CasimirPolynomial,
                       seed: int = DEFAULT_SEED, n_samples: int = DEFAULT_SAMPLES) -> bool:
    return all(evaluate_casimir(casimir, lam) == 0
               for lam in sample_covectors(model.dim, seed, n_samples, zero_on=model.subalgebra_h))
