"""Command-line workbench.

    korbit <command> --model MODEL.json [--config CONFIG.json] [--out REPORT.json]

Exit codes: 0 success, 2 validation failure (report still written),
1 structural error (bad input, degenerate data).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from . import expr as ex
from .clifford import CliffordError, build_spacetime, spinor_connection
from .exact import GaussianRational, MalformedRationalError, fraction_str, to_fraction
from .fields import (ModeFunction, QuadratureGrid, TachyonicModeError, ZeroModeError, dirac_residual,
                     homogeneity_check, kg_dispersion, laplace_residual, normalize_mode)
from .geometry import (CONTRACTION_CONVENTION, CURVATURE_SIGN_CONVENTION, DegenerateMetricError,
                       check_metric_invariance, compute_geometry)
from .lambdarep import (DEFAULT_TOL, CanonicalTransition, PolarizationError, TransitionStructureError,
                        build_operators, casimir_in_lambda_rep, commutator_check, polarization_check,
                        quantum_shift_beta, validate_canonical_transition)
from .liealg import LieAlgebraModel, StructureError, ad_trace_vector, validate_algebra
from .orbits import DEFAULT_SEED, DegreeCapError, algebra_index, defect, find_casimirs, stratify

SCHEMA_VERSION = "1.0"
COMMANDS = ("validate", "geometry", "orbits", "casimirs", "defect", "lrep", "clifford", "fields", "semt")
CLIFFORD_TOL = 1e-12

EXIT_OK, EXIT_STRUCTURAL, EXIT_VALIDATION = 0, 1, 2


class ModelFormatError(ValueError):
    """Bad input file; ``locator`` is a path-like pointer such as ``structure_constants[3].c``."""

    def __init__(self, locator: str, message: str):
        super().__init__(f"{locator}: {message}")
        self.locator = locator


class ModelValidationError(ValueError):
    def __init__(self, report):
        super().__init__("structure constants violate Lie algebra axioms")
        self.report = report


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

@dataclass
class ModelFile:
    model: LieAlgebraModel
    metric: Optional[list] = None
    transition: Optional[CanonicalTransition] = None
    polarization: Optional[list] = None
    raw: dict = field(default_factory=dict)


def _rational(value, locator: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, float, str, Fraction)):
        raise ModelFormatError(locator, f"expected a rational, got {value!r}")
    try:
        return to_fraction(value)
    except (MalformedRationalError, ValueError, ZeroDivisionError):
        raise ModelFormatError(locator, f"malformed rational {value!r}") from None


def _require(doc: dict, key: str, locator: str):
    if key not in doc:
        raise ModelFormatError(locator + key, "missing field")
    return doc[key]


def _index(value, dim: int, locator: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelFormatError(locator, f"expected an integer index, got {value!r}")
    if not 1 <= value <= dim:
        raise ModelFormatError(locator, f"index {value} outside 1..{dim}")
    return value - 1


def _parse_expr(text, locator: str) -> ex.Expr:
    if not isinstance(text, str):
        raise ModelFormatError(locator, f"expected an expression string, got {text!r}")
    try:
        return ex.parse(text)
    except ex.ExprError as err:
        raise ModelFormatError(locator, str(err)) from None


def parse_model(doc: dict, validate: bool = True) -> ModelFile:
    if not isinstance(doc, dict):
        raise ModelFormatError("$", "model must be a JSON object")
    dim = _require(doc, "dim", "")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ModelFormatError("dim", f"expected a positive integer, got {dim!r}")
    C = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    seen: dict = {}
    entries = doc.get("structure_constants", [])
    if not isinstance(entries, list):
        raise ModelFormatError("structure_constants", "expected a list")
    for n, entry in enumerate(entries):
        loc = f"structure_constants[{n}]"
        if not isinstance(entry, dict):
            raise ModelFormatError(loc, "expected an object {i, j, k, c}")
        i, j, k = (_index(_require(entry, key, loc + "."), dim, f"{loc}.{key}") for key in "ijk")
        c = _rational(_require(entry, "c", loc + "."), f"{loc}.c")
        if i == j:
            if c:
                raise ModelFormatError(loc, "[e_i, e_i] must vanish")
            continue
        for key, val in (((k, i, j), c), ((k, j, i), -c)):
            if key in seen and seen[key] != val:
                raise ModelFormatError(loc, "conflicts with an earlier entry")
            seen[key] = val
            C[key[0]][key[1]][key[2]] = val
    h = doc.get("subalgebra", [])
    if not isinstance(h, list):
        raise ModelFormatError("subalgebra", "expected a list of indices")
    h = tuple(_index(v, dim, f"subalgebra[{n}]") for n, v in enumerate(h))
    labels = doc.get("basis_labels", [])
    if not isinstance(labels, list) or not all(isinstance(v, str) for v in labels):
        raise ModelFormatError("basis_labels", "expected a list of strings")
    try:
        model = LieAlgebraModel(dim, C, basis_labels=tuple(labels), subalgebra_h=h, name=str(doc.get("name", "")))
    except StructureError as err:
        raise ModelFormatError("$", str(err)) from None
    metric = None
    if "metric" in doc:
        rows = doc["metric"]
        if not isinstance(rows, list) or len(rows) != dim:
            raise ModelFormatError("metric", f"expected {dim} rows")
        metric = []
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != dim:
                raise ModelFormatError(f"metric[{r}]", f"expected {dim} entries")
            metric.append([_rational(v, f"metric[{r}][{c}]") for c, v in enumerate(row)])
    transition = _parse_transition(doc["transition"], model) if "transition" in doc else None
    polarization = None
    if "polarization" in doc:
        polarization = []
        for r, vec in enumerate(doc["polarization"]):
            if not isinstance(vec, list) or len(vec) != dim:
                raise ModelFormatError(f"polarization[{r}]", f"expected {dim} complex entries")
            row = []
            for c, z in enumerate(vec):
                loc = f"polarization[{r}][{c}]"
                pair = z if isinstance(z, list) else [z, 0]
                if len(pair) != 2:
                    raise ModelFormatError(loc, "expected [re, im]")
                row.append(GaussianRational(_rational(pair[0], loc + "[0]"), _rational(pair[1], loc + "[1]")))
            polarization.append(row)
    mf = ModelFile(model, metric, transition, polarization, doc)
    if validate:
        report = validate_algebra(model)
        if not report.ok:
            raise ModelValidationError(report)
    return mf


def _parse_transition(doc, model: LieAlgebraModel) -> CanonicalTransition:
    if not isinstance(doc, dict):
        raise ModelFormatError("transition", "expected an object")
    labels = {lab: i for i, lab in enumerate(model.basis_labels)}
    alpha: list = [None] * model.dim
    chi: list = [None] * model.dim
    for key, entry in doc.items():
        if key == "lambda0":
            continue
        loc = f"transition.{key}"
        if key.isdigit():
            x = _index(int(key), model.dim, loc)
        elif key in labels:
            x = labels[key]
        else:
            raise ModelFormatError(loc, "unknown basis element")
        if not isinstance(entry, dict):
            raise ModelFormatError(loc, "expected {alpha, chi}")
        a = _require(entry, "alpha", loc + ".")
        if not isinstance(a, list):
            raise ModelFormatError(loc + ".alpha", "expected a list of strings")
        alpha[x] = tuple(_parse_expr(s, f"{loc}.alpha[{n}]") for n, s in enumerate(a))
        chi[x] = _parse_expr(_require(entry, "chi", loc + "."), loc + ".chi")
    for x in range(model.dim):
        if alpha[x] is None:
            raise ModelFormatError(f"transition.{x + 1}", "missing field")
    widths = {len(a) for a in alpha}
    if len(widths) != 1:
        raise ModelFormatError("transition", "alpha lists differ in length")
    lambda0 = None
    if "lambda0" in doc:
        l0 = doc["lambda0"]
        if not isinstance(l0, list) or len(l0) != model.dim:
            raise ModelFormatError("transition.lambda0", f"expected {model.dim} rationals")
        lambda0 = tuple(_rational(v, f"transition.lambda0[{n}]") for n, v in enumerate(l0))
    try:
        return CanonicalTransition(tuple(alpha), tuple(chi), lambda0)
    except (TransitionStructureError, ValueError) as err:
        raise ModelFormatError("transition", str(err)) from None


def load_model(path, validate: bool = True) -> ModelFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ModelFormatError("$", f"file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise ModelFormatError("$", f"invalid JSON: {err}") from None
    return parse_model(doc, validate)


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise ModelFormatError("config", str(err)) from None
    if not isinstance(doc, dict):
        raise ModelFormatError("config", "expected a JSON object")
    return doc


# ---------------------------------------------------------------------------
# report helpers
# ---------------------------------------------------------------------------

def _fr(x) -> str:
    return fraction_str(to_fraction(x))


def _matrix(M) -> list:
    return [[_fr(v) for v in row] for row in M]


def _sparse(tensor, m: Sequence[int], order: int) -> list:
    """Nonzero entries with 1-based basis indices."""
    out = []

    def walk(t, idx):
        if len(idx) == order:
            if t:
                out.append({"index": [m[i] + 1 for i in idx], "value": _fr(t)})
            return
        for i, sub in enumerate(t):
            walk(sub, idx + [i])

    walk(tensor, [])
    return out


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]  # no negative zeros in reports


@dataclass
class Settings:
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    max_degree: int = 2
    bracket_sign: int = 1
    apply_beta: bool = False
    spatial_form: str = "-B"

    @classmethod
    def from_sources(cls, config: dict, args) -> "Settings":
        s = cls()
        for key in ("tol", "seed", "max_degree", "bracket_sign", "apply_beta", "spatial_form"):
            if key in config:
                setattr(s, key, config[key])
        if args.tol is not None:
            s.tol = args.tol
        if args.seed is not None:
            s.seed = args.seed
        if args.max_degree is not None:
            s.max_degree = args.max_degree
        if not s.tol > 0:
            raise ModelFormatError("config.tol", "tolerance must be positive")
        if s.bracket_sign not in (1, -1):
            raise ModelFormatError("config.bracket_sign", "must be +1 or -1")
        if s.spatial_form not in ("-B", "+B"):
            raise ModelFormatError("config.spatial_form", 'must be "-B" or "+B"')
        return s


# ---------------------------------------------------------------------------
# commands; each returns (ok, results)
# ---------------------------------------------------------------------------

def _geometry(mf: ModelFile):
    if mf.metric is None:
        raise ModelFormatError("metric", "missing field")
    return compute_geometry(mf.model, mf.metric)


def cmd_validate(mf: ModelFile, cfg: dict, s: Settings):
    report = validate_algebra(mf.model)
    res: dict = {"algebra": {"ok": report.ok, "violations": [v.as_dict() for v in report.violations]}}
    ok = report.ok
    if mf.metric is not None:
        inv, bad = check_metric_invariance(mf.model, mf.metric)
        res["metric_invariance"] = {"ok": inv, "witnesses": [
            {"x": x + 1, "y": y + 1, "z": z + 1, "value": _fr(v)} for x, y, z, v in bad]}
        ok = ok and inv
    return ok, res


def cmd_geometry(mf: ModelFile, cfg: dict, s: Settings):
    if mf.metric is None:
        raise ModelFormatError("metric", "missing field")
    inv, bad = check_metric_invariance(mf.model, mf.metric)
    res: dict = {"metric_invariance": {"ok": inv, "witnesses": [
        {"x": x + 1, "y": y + 1, "z": z + 1, "value": _fr(v)} for x, y, z, v in bad]}}
    if not inv:
        return False, res
    geo = _geometry(mf)
    m = geo.metric.m_indices
    k = len(m)
    gam = geo.connection.gamma
    res.update({
        "m_indices": [i + 1 for i in m],
        "form_B": _matrix(geo.metric.B_m),
        "christoffel": _sparse(gam, m, 3),
        "christoffel_trace": [_fr(sum((gam[b][b][a] for b in range(k)), Fraction(0))) for a in range(k)],
        "riemann": _sparse(geo.curvature.riemann, m, 4),
        "ricci": _matrix(geo.curvature.ricci),
        "scalar_curvature": _fr(geo.curvature.scalar),
        "scalar_curvature_abs": _fr(abs(geo.curvature.scalar)),
    })
    return True, res


def cmd_orbits(mf: ModelFile, cfg: dict, s: Settings):
    model = mf.model
    strata = stratify(model, s.seed)
    return True, {"index": algebra_index(model, s.seed), "strata": [
        {"s": st.s, "orbit_dim": st.orbit_dim, "witnesses": [[_fr(v) for v in lam] for lam in st.sample_points]}
        for st in strata]}


def _casimir_dict(c, model) -> dict:
    return {"degree": c.degree, "polynomial": c.to_string(),
            "coefficients": [{"monomial": list(mono), "value": _fr(v)} for mono, v in c.coeffs],
            "vanishing": [v + 1 for v in c.vanishing]}


def cmd_casimirs(mf: ModelFile, cfg: dict, s: Settings):
    cas = find_casimirs(mf.model, s.max_degree)
    return True, {"max_degree": s.max_degree, "casimirs": [_casimir_dict(c, mf.model) for c in cas],
                  "reverified": True}


def cmd_defect(mf: ModelFile, cfg: dict, s: Settings):
    return True, {"subalgebra": [i + 1 for i in mf.model.subalgebra_h], "defect": defect(mf.model, s.seed)}


def _lambda_values(cfg: dict, mf: ModelFile) -> list[Fraction]:
    if "lambda_values" in cfg:
        vals = cfg["lambda_values"]
        if not isinstance(vals, list) or len(vals) != mf.model.dim:
            raise ModelFormatError("config.lambda_values", f"expected {mf.model.dim} values")
        return [_rational(v, f"config.lambda_values[{n}]") for n, v in enumerate(vals)]
    if mf.transition is not None and mf.transition.lambda0 is not None:
        return list(mf.transition.lambda0)
    return [Fraction(0)] * mf.model.dim


def _operators(mf: ModelFile, s: Settings):
    if mf.transition is None:
        raise ModelFormatError("transition", "missing field")
    report = validate_canonical_transition(mf.model, mf.transition, find_casimirs(mf.model, s.max_degree),
                                           bracket_sign=s.bracket_sign, tol=s.tol)
    ops = build_operators(mf.transition, report) if report.ok else None
    return report, ops


def _beta(mf: ModelFile, s: Settings):
    if not s.apply_beta:
        return None
    if mf.polarization is None:
        raise ModelFormatError("polarization", "apply_beta needs a polarization")
    return [float(b) for b in quantum_shift_beta(mf.model, mf.polarization)]


def cmd_lrep(mf: ModelFile, cfg: dict, s: Settings):
    report, ops = _operators(mf, s)
    res: dict = {"transition": report.as_dict()}
    if ops is None:
        return False, res
    lv = _lambda_values(cfg, mf)
    comm = commutator_check(ops, mf.model, lv, sign=-s.bracket_sign, tol=s.tol)
    res["operators"] = [op.to_string() for op in ops]
    res["commutators"] = comm.as_dict()
    res["lambda_values"] = [_fr(v) for v in lv]
    cas_reports = []
    for c in find_casimirs(mf.model, s.max_degree):
        r = casimir_in_lambda_rep(c, ops, lv, tol=s.tol)
        cas_reports.append({"casimir": c.to_string(), **r.as_dict()})
    res["casimir_operators"] = cas_reports
    ok = comm.ok
    if mf.polarization is not None:
        pol = polarization_check(mf.model, lv, mf.polarization)
        res["polarization"] = pol.as_dict()
        ok = ok and pol.ok
        try:
            res["beta"] = [_fr(b) for b in quantum_shift_beta(mf.model, mf.polarization)]
        except PolarizationError as err:
            res["beta_error"] = str(err)
    return ok, res


def _clifford(mf: ModelFile, s: Settings):
    geo = _geometry(mf)
    sign = -1 if s.spatial_form == "-B" else 1
    form = np.array([[sign * float(v) for v in row] for row in geo.metric.B_m])
    rep = build_spacetime(form)
    return geo, rep, spinor_connection(geo.connection, rep)


def cmd_clifford(mf: ModelFile, cfg: dict, s: Settings):
    geo, rep, sc = _clifford(mf, s)
    resid = rep.residual()
    traces = [abs(t) for t in sc.traces()]
    ok = resid <= CLIFFORD_TOL and max(traces, default=0.0) <= CLIFFORD_TOL
    return ok, {"spatial_form": s.spatial_form, "size": rep.size, "anticommutator_residual": resid,
                "spinor_connection_traces": traces,
                "spinor_connection": [[[_cplx(z) for z in row] for row in M] for M in sc.matrices]}


def _grid(cfg: dict, loc: str) -> QuadratureGrid:
    g = cfg.get("grids", {}).get("q")
    if g is None:
        return QuadratureGrid.point()
    try:
        return QuadratureGrid.box(g.get("box", []), g.get("nodes", 65), g.get("rule", "simpson"))
    except (ValueError, TypeError) as err:
        raise ModelFormatError(loc + ".grids.q", str(err)) from None


def _psi(section: dict, loc: str):
    psi = _require(section, "psi", loc + ".")
    if isinstance(psi, list):
        return tuple(_parse_expr(p, f"{loc}.psi[{n}]") for n, p in enumerate(psi))
    return _parse_expr(psi, loc + ".psi")


def cmd_fields(mf: ModelFile, cfg: dict, s: Settings):
    sec = cfg.get("fields", cfg)
    geo = _geometry(mf)
    m = geo.metric.m_indices
    n = len(m)
    grid = _grid(sec, "config")
    psi = _psi(sec, "config")
    Lambda = float(_rational(sec.get("Lambda", 0), "config.Lambda"))
    mass = float(_rational(sec.get("m", 0), "config.m"))
    lv = _lambda_values(sec, mf)
    beta = _beta(mf, s)
    report, ops = _operators(mf, s)
    res: dict = {"transition_ok": report.ok}
    if ops is None:
        res["transition"] = report.as_dict()
        return False, res
    mode = ModeFunction(psi, Lambda, 0.0, tuple(lv))
    norm, mode = normalize_mode(mode, grid, beta)
    res["norm"] = norm
    ok = True
    if isinstance(psi, tuple):
        _, rep, sc = _clifford(mf, s)
        r = dirac_residual(mode.psi, ops, rep, sc, Lambda, mass, grid, lv, m, beta)
        res["dirac_residual"] = r
    else:
        zeta, omega = kg_dispersion(Lambda, geo.curvature.scalar, mass, n)
        res.update({"zeta": _fr(zeta), "omega": omega})
        trv = ad_trace_vector(mf.model)
        r = laplace_residual(mode.psi, ops, geo.metric.B_inv, [trv[i] for i in m], Lambda, grid, lv, m, beta)
        res["laplace_residual"] = r
        res["homogeneity_residual"] = homogeneity_check(mode.psi, ops, mf.model.subalgebra_h, grid, lv, beta)
        ok = res["homogeneity_residual"] <= s.tol
    ok = ok and r <= s.tol
    return ok, res


def _spectral_nodes(sec: dict, key: str, default) -> list[tuple[Any, float]]:
    nodes = sec.get("grids", {}).get(key)
    if nodes is None:
        return [(default, 1.0)]
    out = []
    for n, node in enumerate(nodes):
        loc = f"config.grids.{key}[{n}]"
        if isinstance(node, dict):
            out.append((node.get("value"), float(_rational(node.get("weight", 1), loc + ".weight"))))
        else:
            out.append((node, 1.0))
    return out


def cmd_semt(mf: ModelFile, cfg: dict, s: Settings):
    from .semt import semt_scalar, semt_spinor

    sec = cfg.get("semt", cfg)
    mode_kind = sec.get("mode", "scalar")
    if mode_kind not in ("scalar", "spinor"):
        raise ModelFormatError("config.mode", 'expected "scalar" or "spinor"')
    geo = _geometry(mf)
    m = geo.metric.m_indices
    grid = _grid(sec, "config")
    psi = _psi(sec, "config")
    mass = float(_rational(sec.get("m", 0), "config.m"))
    beta = _beta(mf, s)
    report, ops = _operators(mf, s)
    if ops is None:
        return False, {"transition": report.as_dict()}
    modes = []
    for lam_val, lw in _spectral_nodes(sec, "lambda", _lambda_values(sec, mf)):
        lv = tuple(_rational(v, "config.grids.lambda") for v in lam_val)
        for L, Lw in _spectral_nodes(sec, "Lambda", sec.get("Lambda", 0)):
            L = float(_rational(L, "config.grids.Lambda"))
            omega = 0.0
            if mode_kind == "scalar":
                _, omega = kg_dispersion(L, geo.curvature.scalar, mass, len(m))
            label = f"lambda={[_fr(v) for v in lv]},Lambda={L!r}"
            _, mode = normalize_mode(ModeFunction(psi, L, omega, lv, lw * Lw, label), grid, beta)
            modes.append(mode)
    if mode_kind == "scalar":
        zeta = sec.get("zeta_tilde", cfg.get("zeta_tilde"))
        zeta = kg_dispersion(0, 0, 1, len(m))[0] if zeta is None else _rational(zeta, "config.zeta_tilde")
        rep = semt_scalar(modes, ops, geo.curvature.ricci, grid, zeta, m, beta)
    else:
        _, crep, sc = _clifford(mf, s)
        rep = semt_spinor(modes, ops, crep, sc, grid, m, beta)
    res = rep.as_dict()
    ok = rep.asymmetry() <= s.tol
    return ok, res


HANDLERS = {"validate": cmd_validate, "geometry": cmd_geometry, "orbits": cmd_orbits, "casimirs": cmd_casimirs,
            "defect": cmd_defect, "lrep": cmd_lrep, "clifford": cmd_clifford, "fields": cmd_fields,
            "semt": cmd_semt}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="korbit", description="Lie algebra / coadjoint orbit workbench")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--model", required=True, help="model JSON file")
    ap.add_argument("--config", help="config JSON file")
    ap.add_argument("--out", help="report path (default: stdout)")
    ap.add_argument("--tol", type=float, help="residual tolerance")
    ap.add_argument("--seed", type=int, help="orbit sampling seed")
    ap.add_argument("--max-degree", type=int, dest="max_degree", help="Casimir degree bound")
    ap.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte identity)")
    return ap


def run(args) -> tuple[int, dict]:
    report: dict = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "command": args.command,
                    "inputs": {"model": str(args.model), "config": args.config}}
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config)
        settings = Settings.from_sources(cfg, args)
        report["tolerances"] = {"residual": settings.tol, "clifford": CLIFFORD_TOL}
        report["conventions"] = {
            "structure_constants": "[e_i, e_j] = c e_k stored as C^k_ij; indices 1-based",
            "contraction": CONTRACTION_CONVENTION, "curvature_sign": CURVATURE_SIGN_CONVENTION,
            "bracket_sign": settings.bracket_sign,
            "commutator_expectation": f"[l_X,l_Y] = {'+' if settings.bracket_sign < 0 else '-'}C^K_XY l_K",
            "spatial_form": settings.spatial_form, "apply_beta": settings.apply_beta,
            "seed": settings.seed, "max_degree": settings.max_degree}
        try:
            mf = load_model(args.model)
        except ModelValidationError as err:
            report["ok"] = False
            report["results"] = {"algebra": {"ok": False,
                                             "violations": [v.as_dict() for v in err.report.violations]}}
            return EXIT_VALIDATION, report
        report["inputs"]["name"] = mf.model.name
        report["inputs"]["dim"] = mf.model.dim
        ok, results = HANDLERS[args.command](mf, cfg, settings)
        report["ok"] = ok
        report["results"] = results
        code = EXIT_OK if ok else EXIT_VALIDATION
    except ModelFormatError as err:
        report["ok"] = False
        report["error"] = {"kind": "format", "locator": err.locator, "message": str(err)}
        code = EXIT_STRUCTURAL
    except (StructureError, DegenerateMetricError, CliffordError, TachyonicModeError, ZeroModeError,
            TransitionStructureError, PolarizationError, DegreeCapError, ZeroDivisionError, ex.ExprError) as err:
        report["ok"] = False
        report["error"] = {"kind": type(err).__name__, "message": str(err)}
        code = EXIT_STRUCTURAL
    if args.timings:
        report["timings"] = {"total_seconds": time.perf_counter() - t0}
    return code, report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(args)
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
