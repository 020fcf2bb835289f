"""Acceptance criteria, one test (and one summary line) each.

Run ``python tests/test_acceptance.py`` to print the lines without pytest.
"""
import cmath
import itertools
import math
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from korbit import catalog
from korbit import expr as ex
from korbit.clifford import build_gamma, build_spacetime, spinor_connection
from korbit.fields import ModeFunction, QuadratureGrid, dirac_spectrum, kg_dispersion
from korbit.geometry import compute_geometry
from korbit.lambdarep import (CanonicalTransition, build_operators, commutator_check, unchecked_operators,
                              validate_canonical_transition)
from korbit.liealg import validate_algebra
from korbit.orbits import algebra_index, defect, find_casimirs, stratify
from korbit.semt import semt_scalar, semt_spinor

sys.path.insert(0, str(Path(__file__).parent))
from oracles import bracket, koszul_curvature, sympy_casimir_check  # noqa: E402

DATA = Path(__file__).parent / "data"


def eye(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _jacobiator(C, x, y, z):
    n = len(C)
    e = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    terms = [bracket(C, bracket(C, e[x], e[y]), e[z]), bracket(C, bracket(C, e[y], e[z]), e[x]),
             bracket(C, bracket(C, e[z], e[x]), e[y])]
    return [sum(t[a] for t in terms) for a in range(n)]


def _witness_correct(model, kind, v):
    C = model.C
    if v.kind != kind or v.value == 0:
        return False
    if kind == "jacobi":
        x, y, z, d = v.indices
        return _jacobiator(C, x, y, z)[d] == v.value
    if kind == "antisymmetry":
        a, b, c = v.indices
        return C[a][b][c] + C[a][c][b] == v.value
    x, y, z = v.indices  # subalgebra: [e_x, e_y] leaks into e_z outside h
    return z not in model.subalgebra_h and C[z][x][y] == v.value


def check_1():
    fixtures = catalog.catalog()
    bad_ok = [n for n, m in fixtures.items() if not validate_algebra(m).ok]
    rejected = []
    for name, (model, kind) in catalog.perturbations().items():
        rep = validate_algebra(model)
        if not rep.ok and rep.violations and _witness_correct(model, kind, rep.violations[0]):
            rejected.append(name)
    ok = not bad_ok and len(rejected) == len(catalog.perturbations())
    return ok, f"{len(fixtures) - len(bad_ok)}/{len(fixtures)} fixtures valid, " \
               f"{len(rejected)}/{len(catalog.perturbations())} perturbations rejected with verified witness"


def check_2():
    gam = compute_geometry(catalog.su2(), eye(3)).connection.gamma
    eps_ok = all(gam[a][b][c] == -Fraction((a - b) * (b - c) * (c - a), 4)
                 for a, b, c in itertools.product(range(3), repeat=3))
    anti_ok = True
    for model in catalog.catalog().values():
        n = model.dim
        g = compute_geometry(model, eye(n)).connection.gamma
        anti_ok &= all((g[a][b][c] - g[a][c][b]) / 2 == -model.C[a][b][c] / 2
                       for a, b, c in itertools.product(range(n), repeat=3))
    return eps_ok and anti_ok, f"su2 Gamma = -eps/2: {eps_ok}; antisymmetric part -C/2 on all fixtures: {anti_ok}"


def check_3():
    flat = all(compute_geometry(catalog.abelian(n), eye(n)).curvature.scalar == 0 for n in (2, 3))
    out = {}
    for name, model, want in (("su2", catalog.su2(), Fraction(3, 2)), ("h3", catalog.heisenberg(), Fraction(1, 2))):
        ours = compute_geometry(model, eye(3)).curvature.scalar
        oracle = koszul_curvature(model.C, eye(3))[1]
        out[name] = (ours, oracle, abs(ours) == want == abs(oracle) and ours == -oracle)
    ok = flat and all(v[2] for v in out.values())
    detail = "; ".join(f"{k}: scalar {v[0]} (Koszul oracle {v[1]})" for k, v in out.items())
    return ok, f"abelian flat: {flat}; {detail}"


def check_4():
    h3, su2 = catalog.heisenberg(), catalog.su2()
    h3_strata = sorted((s.orbit_dim for s in stratify(h3)), reverse=True)
    h3_cas = [k.to_string() for k in find_casimirs(h3, 1)]
    su2_cas = [k.to_string() for k in find_casimirs(su2, 2)]
    reverified = all(sympy_casimir_check(m.C, k.as_dict)
                     for m in catalog.catalog().values() for k in find_casimirs(m, 3))
    ok = (algebra_index(h3) == 1 and h3_strata == [2, 0] and h3_cas == ["f3"]
          and algebra_index(su2) == 1 and su2_cas == ["f1^2 + f2^2 + f3^2"] and reverified)
    return ok, (f"h3 index {algebra_index(h3)} strata {h3_strata} Casimirs {h3_cas}; su2 index "
                f"{algebra_index(su2)} Casimirs {su2_cas}; all re-verified: {reverified}")


def check_5():
    vals = {"su2/span(e3)": defect(catalog.su2(h=(2,))), "h3/span(e2)": defect(catalog.heisenberg(h=(1,))),
            "R3": defect(catalog.abelian(3)), "R3/span(e1)": defect(catalog.abelian(3, h=(0,)))}
    return all(v == 0 for v in vals.values()), ", ".join(f"{k} {v}" for k, v in vals.items())


def _h3_transition(chi2):
    return CanonicalTransition.from_strings([["1"], ["0"], ["0"]], ["0", chi2, "l3"])


def check_6():
    # bracket_sign = -1 makes [l1, l2] = +l3 hold for the validated transition
    h3 = catalog.heisenberg()
    tr = _h3_transition("l3*q1")
    rep = validate_canonical_transition(h3, tr, bracket_sign=-1)
    symbolic = all(p.symbolic_zero for p in rep.pairs)
    numeric = rep.max_bracket_residual <= 1e-12 and rep.base_point_residual <= 1e-12
    ops = build_operators(tr, rep)
    chk = commutator_check(ops, h3, [0, 0, 1.7], sign=+1)
    probes_ok = len(chk.by_probe) == 4 and chk.max_residual <= 1e-9
    flip_ok = True
    worst = 0.0
    for l3 in (1.0, -0.6, 2.5):
        bad = validate_canonical_transition(h3, _h3_transition("-l3*q1"), bracket_sign=-1, lambda_values={3: l3})
        op_bad = commutator_check(unchecked_operators(_h3_transition("-l3*q1")), h3, [0, 0, l3], sign=+1)
        for r in (bad.max_bracket_residual, op_bad.by_probe["1"]):
            worst = max(worst, abs(r - 2 * abs(l3)))
        flip_ok &= not bad.ok
    flip_ok &= worst <= 1e-9
    ok = rep.ok and symbolic and numeric and probes_ok and flip_ok
    return ok, (f"transition symbolic 0: {symbolic}, numeric {rep.max_bracket_residual:.1e}; "
                f"[l1,l2]=l3 on {len(chk.by_probe)} probes max {chk.max_residual:.1e}; "
                f"flipped |r - 2|l3|| max {worst:.1e}")


def check_7():
    g = build_gamma(np.diag([1.0, -1.0, -1.0, -1.0]))
    worst, pairs = 0.0, 0
    for a in range(4):
        for b in range(a, 4):
            d = g.gammas[a] @ g.gammas[b] + g.gammas[b] @ g.gammas[a] - 2 * g.form[a, b] * np.eye(g.size)
            worst = max(worst, float(np.max(np.abs(d))))
            pairs += 1
    traces = 0.0
    for model in (catalog.su2(), catalog.heisenberg()):
        geo = compute_geometry(model, eye(3))
        sc = spinor_connection(geo.connection, build_spacetime(-np.eye(3)))
        traces = max(traces, max(abs(t) for t in sc.traces()))
    ok = pairs == 10 and worst <= 1e-12 and traces <= 1e-12
    return ok, f"{pairs} anticommutators max {worst:.1e}; spinor connection |tr| max {traces:.1e}"


def check_8():
    zeta, omega = kg_dispersion(3, 6, 0, 3)
    ok = zeta == Fraction(1, 6) and abs(omega - math.sqrt(10)) <= 1e-12
    return ok, f"zeta(3) = {zeta}; omega(3,6,0,3) - sqrt(10) = {omega - math.sqrt(10):.1e}"


def check_9():
    model = catalog.abelian(2)
    tr = CanonicalTransition.from_strings([[], []], ["l1", "l2"])
    ops = build_operators(tr, validate_canonical_transition(model, tr))
    point = QuadratureGrid.point()
    rel = 0.0
    asym = imag = phase = 0.0
    spin_err = 0.0
    for lam, Lambda, m in (((0.3, 0.4), 0.5, 1.0), ((-1.2, 0.7), 2.0, 0.0), ((2.0, -0.1), 0.3, 1.5)):
        _, w = kg_dispersion(Lambda, 0, m, 2)
        reps = []
        for theta in (0.0, 1.1, 4.0):
            mode = ModeFunction(ex.const(cmath.exp(1j * theta)), Lambda, w, lam)
            reps.append(semt_scalar([mode], ops, [[0, 0], [0, 0]], point, 0, [0, 1]))
        r = reps[0]
        rel = max(rel, abs(r.T00 + w / 2) / (w / 2))
        for a in range(2):
            rel = max(rel, abs(r.T0a[a] + lam[a] / 2) / abs(lam[a] / 2))
            for b in range(2):
                rel = max(rel, abs(r.Tab[a][b] + lam[a] * lam[b] / w) / abs(lam[a] * lam[b] / w))
        asym, imag = max(asym, r.asymmetry()), max(imag, r.max_imag())
        phase = max(phase, *(abs(x.T00 - r.T00) for x in reps))
        rep_c = build_spacetime(-np.eye(2))
        sc = spinor_connection(compute_geometry(model, eye(2)).connection, rep_c)
        vals, vecs = dirac_spectrum(rep_c, lam, m)
        for k in range(len(vals)):
            outs = []
            for theta in (0.0, 2.3):
                psi = tuple(ex.const(complex(c) * cmath.exp(1j * theta)) for c in vecs[:, k])
                outs.append(semt_spinor([ModeFunction(psi, float(vals[k]), 0.0, lam)], ops, rep_c, sc, point, [0, 1]))
            o = outs[0]
            spin_err = max(spin_err, abs(o.T00 + vals[k]))
            asym, imag = max(asym, o.asymmetry()), max(imag, o.max_imag())
            flat = lambda s: [s.T00, *s.T0a, *sum(s.Tab, [])]  # noqa: E731
            phase = max(phase, *(abs(x - y) for x, y in zip(flat(o), flat(outs[1]))))
    ok = rel <= 1e-9 and spin_err <= 1e-9 and asym <= 1e-9 and imag <= 1e-9 and phase <= 1e-12
    return ok, (f"scalar rel err {rel:.1e}; spinor |T00 + Lambda| {spin_err:.1e}; Tab asym {asym:.1e} "
                f"imag {imag:.1e}; phase drift {phase:.1e}")


def check_10():
    runs = [["validate", "--model", "broken_jacobi.json"], ["geometry", "--model", "su2.json"],
            ["orbits", "--model", "h3.json"], ["lrep", "--model", "h3.json", "--config", "h3_lrep.json"],
            ["semt", "--model", "abelian2.json", "--config", "abelian2_semt.json"]]
    identical = 0
    for argv in runs:
        outs = [subprocess.run([sys.executable, "-m", "korbit", *argv], cwd=DATA, capture_output=True,
                               check=False).stdout for _ in range(2)]
        identical += outs[0] == outs[1] and len(outs[0]) > 0
    return identical == len(runs), f"{identical}/{len(runs)} commands byte-identical across two runs"


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10]


def test_c01_catalog_and_perturbations(acceptance):
    assert acceptance(1, *check_1())


def test_c02_christoffel(acceptance):
    assert acceptance(2, *check_2())


def test_c03_curvature(acceptance):
    assert acceptance(3, *check_3())


def test_c04_orbits_and_casimirs(acceptance):
    assert acceptance(4, *check_4())


def test_c05_defect(acceptance):
    assert acceptance(5, *check_5())


def test_c06_transition(acceptance):
    assert acceptance(6, *check_6())


def test_c07_clifford(acceptance):
    assert acceptance(7, *check_7())


def test_c08_dispersion(acceptance):
    assert acceptance(8, *check_8())


def test_c09_semt_closed_forms(acceptance):
    assert acceptance(9, *check_9())


def test_c10_byte_identical(acceptance):
    assert acceptance(10, *check_10())


if __name__ == "__main__":
    for n, check in enumerate(CHECKS, 1):
        ok, detail = check()
        print(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
