import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from korbit import catalog
from korbit import expr as ex
from korbit.clifford import build_spacetime, spinor_connection
from korbit.fields import ModeFunction, QuadratureGrid, ZeroModeError, dirac_spectrum, kg_dispersion, normalize_mode
from korbit.geometry import compute_geometry
from korbit.lambdarep import CanonicalTransition, build_operators, validate_canonical_transition
from korbit.semt import DegenerateFrequencyError, anticommutator_operator, compose, semt_scalar, semt_spinor

H3 = catalog.heisenberg()
AB2 = catalog.abelian(2)
POINT = QuadratureGrid.point()
ZERO_RIC = [[0, 0], [0, 0]]


def ops_for(model, alpha, chi, bracket_sign=1):
    tr = CanonicalTransition.from_strings(alpha, chi)
    return build_operators(tr, validate_canonical_transition(model, tr, bracket_sign=bracket_sign))


H3_OPS = ops_for(H3, [["1"], ["0"], ["0"]], ["0", "-l3*q1", "l3"])
AB_OPS = ops_for(AB2, [[], []], ["l1", "l2"])


def scalar_mode(lam, Lambda, m, phase=0.0, weight=1.0):
    _, omega = kg_dispersion(Lambda, 0, m, 2)
    psi = ex.const(cmath.exp(1j * phase))
    return ModeFunction(psi, Lambda, omega, tuple(lam), weight)


def spinor_mode(lam, m, phase=0.0, which=-1):
    rep = build_spacetime(-np.eye(2))
    sc = spinor_connection(compute_geometry(AB2, [[1, 0], [0, 1]]).connection, rep)
    w, v = dirac_spectrum(rep, lam, m)
    psi = tuple(ex.const(complex(c) * cmath.exp(1j * phase)) for c in v[:, which])
    return rep, sc, ModeFunction(psi, float(w[which]), 0.0, tuple(lam))


def _rel(a, b):
    return abs(a - b) / max(1e-300, abs(b))


def test_anticommutator_operator_example():
    assert anticommutator_operator(H3_OPS[0], H3_OPS[1]).to_string() == "(-2*i*q1*l3)*d/dq1 - i*l3"
    flipped = ops_for(H3, [["1"], ["0"], ["0"]], ["0", "l3*q1", "l3"], -1)
    assert anticommutator_operator(flipped[0], flipped[1]).to_string() == "(2*i*q1*l3)*d/dq1 + i*l3"
    sq = compose(H3_OPS[0], H3_OPS[0])
    assert sq.apply(ex.parse("q1^2")) == ex.parse("2")


def test_scalar_abelian_closed_forms():
    lam, Lambda, m = (0.3, 0.4), 0.5, 1.0
    mode = scalar_mode(lam, Lambda, m)
    rep = semt_scalar([mode], AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    w = mode.omega
    assert _rel(rep.T00, -w / 2) <= 1e-9
    for a in range(2):
        assert _rel(rep.T0a[a], -lam[a] / 2) <= 1e-9
        for b in range(2):
            assert _rel(rep.Tab[a][b], -lam[a] * lam[b] / w) <= 1e-9
    assert rep.asymmetry() <= 1e-12 and rep.max_imag() <= 1e-12


def test_spinor_abelian_closed_forms():
    rep, sc, mode = spinor_mode((0.3, 0.4), 1.0)
    out = semt_spinor([mode], AB_OPS, rep, sc, POINT, [0, 1])
    assert _rel(out.T00, -mode.Lambda) <= 1e-9
    assert out.asymmetry() <= 1e-9 and out.max_imag() <= 1e-9
    assert out.conventions["dirac_conjugate"] == "psi-bar = psi^dagger gamma0"


def test_weights_and_monotonicity():
    modes = [scalar_mode((0.3, 0.4), L, 1.0, weight=0.5) for L in (0.5, 1.0, 2.0)]
    rep = semt_scalar(modes, AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    assert rep.T00 == pytest.approx(-0.25 * sum(md.omega for md in modes), rel=1e-12)
    assert rep.monotonicity()["nondecreasing"]
    d = rep.as_dict()
    assert len(d["modes"]) == 3 and d["kind"] == "scalar"


def test_errors():
    mode = scalar_mode((0.3, 0.4), 0.5, 1.0)
    with pytest.raises(DegenerateFrequencyError):
        semt_scalar([ModeFunction(ex.ONE, 0.0, 0.0, (0, 0))], AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    with pytest.raises(ZeroModeError):
        semt_scalar([ModeFunction(ex.ZERO, 1.0, 1.0, (0, 0))], AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    rep, sc, smode = spinor_mode((0.3, 0.4), 1.0)
    with pytest.raises(ValueError):
        semt_scalar([smode], AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    with pytest.raises(ValueError):
        semt_spinor([mode], AB_OPS, rep, sc, POINT, [0, 1])


def test_h3_gaussian_scalar():
    # real Gaussian: T0a vanishes for the q-derivative and l2 pieces, T00 = -omega/2
    l3 = 2.0
    grid = QuadratureGrid.box([[-6, 6]], 129)
    R = compute_geometry(H3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]).curvature
    zeta, omega = kg_dispersion(math.sqrt(l3 + l3 * l3), R.scalar, 0, 3)
    _, mode = normalize_mode(ModeFunction(ex.parse("exp(-l3*q1^2/2)"), math.sqrt(6), omega, (0, 0, l3)), grid)
    rep = semt_scalar([mode], H3_OPS, R.ricci, grid, zeta, [0, 1, 2])
    assert rep.T00 == pytest.approx(-omega / 2, rel=1e-9)
    assert abs(rep.T0a[0]) <= 1e-12
    assert rep.T0a[2] == pytest.approx(-l3 / 2, rel=1e-9)
    assert rep.asymmetry() <= 1e-9


phase = st.floats(0, 2 * math.pi, allow_nan=False)
comp = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(comp, comp, st.floats(0.1, 3), st.floats(0, 2), phase)
def test_scalar_closed_forms_random(l1, l2, Lambda, m, theta):
    mode = scalar_mode((l1, l2), Lambda, m, theta)
    base = semt_scalar([scalar_mode((l1, l2), Lambda, m)], AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    rep = semt_scalar([mode], AB_OPS, ZERO_RIC, POINT, 0, [0, 1])
    w = mode.omega
    lam = (l1, l2)
    assert abs(rep.T00 + w / 2) <= 1e-9 * w
    for a in range(2):
        assert abs(rep.T0a[a] + lam[a] / 2) <= 1e-9 * max(1e-12, abs(lam[a]))
        for b in range(2):
            assert abs(rep.Tab[a][b] + lam[a] * lam[b] / w) <= 1e-9 * max(1e-12, abs(lam[a] * lam[b] / w))
    assert abs(rep.T00 - base.T00) <= 1e-12
    assert all(abs(x - y) <= 1e-12 for x, y in zip(rep.T0a, base.T0a))


@settings(max_examples=40, deadline=None)
@given(comp, comp, st.floats(0, 2), phase, st.sampled_from([0, 1]))
def test_spinor_closed_forms_random(l1, l2, m, theta, which):
    rep, sc, mode = spinor_mode((l1, l2), m, theta, which)
    base = semt_spinor([spinor_mode((l1, l2), m, 0.0, which)[2]], AB_OPS, rep, sc, POINT, [0, 1])
    out = semt_spinor([mode], AB_OPS, rep, sc, POINT, [0, 1])
    assert abs(out.T00 + mode.Lambda) <= 1e-9 * max(1.0, abs(mode.Lambda))
    assert out.asymmetry() <= 1e-9 and out.max_imag() <= 1e-9
    for x, y in zip([out.T00, *out.T0a, *sum(out.Tab, [])], [base.T00, *base.T0a, *sum(base.Tab, [])]):
        assert abs(x - y) <= 1e-12
