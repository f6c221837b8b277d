import numpy as np
import pytest

from magweyl import coupling as C
from magweyl import fields as F
from magweyl import grid as G
from magweyl import quantize as Q
from magweyl.errors import InputError

QUAD = F.Quadrature(16)


# ---------------------------------------------------------------------------
# symbolic oracle: pins the sign and size of the third-order correction
# before anything else relies on it

def sympy_coupling_oracle():
    import sympy as sp

    x1, x2, p1, p2, y1, y2, t = sp.symbols("x1 x2 p1 p2 y1 y2 t", real=True)
    # potential (0, x1^2): quadratic, so the dichotomy bites at degree 3
    A2 = (x1 + t * y1) ** 2
    avg = sp.integrate(A2, (t, sp.Rational(-1, 2), sp.Rational(1, 2)))
    tau = y1 * p1 + y2 * (p2 - avg)
    expr = sp.I**3 * sp.diff(sp.exp(-sp.I * tau), y1, y1, y2)
    out = sp.simplify(expr.subs({y1: 0, y2: 0}))
    return sp.expand(out), (x1, x2, p1, p2)


def test_symbolic_third_derivative_oracle():
    import sympy as sp

    out, (x1, x2, p1, p2) = sympy_coupling_oracle()
    naive = p1**2 * (p2 - x1**2)
    correction = sp.expand(out - naive)
    assert correction == sp.Rational(1, 6)


# ---------------------------------------------------------------------------
# closed forms

def test_position_only_symbol_is_fixed_point():
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    A = F.polynomial_potential(2, [[(0.5, (0, 2))], [(1.0, (2, 0))]])
    f = C.PolynomialSymbol(2, [(1.0, (0, 0), lambda x: np.cos(x[..., 0]))])
    out = C.covariant_coupling(f, A, g)
    expect = G.x_only_symbol(2, lambda x: np.cos(x[..., 0])).sample(g, "standard")
    assert np.abs(out.values - expect.values).max() < 1e-12


def test_first_order_symbol_shifts_momentum():
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    A = F.polynomial_potential(2, [[(0.3, (1, 1))], [(1.0, (2, 0))]])
    f = C.PolynomialSymbol(2, [(1.0, (1, 0))])
    out = C.covariant_coupling(f, A, g)
    pts = g.config_points()
    kpts = g.momentum_points()
    expect = (kpts[None, :, 0] - 0.3 * (pts[:, 0] * pts[:, 1])[:, None]).reshape(out.values.shape)
    assert np.abs(out.values - expect).max() < 1e-12


def test_kinetic_symbol_equals_minimal_coupling():
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    A = F.polynomial_potential(2, [[(0.4, (0, 2))], [(0.7, (2, 0))]])
    f = C.PolynomialSymbol(2, [(1.0, (2, 0)), (1.0, (0, 2))])  # |p|^2
    tci = C.covariant_coupling(f, A, g)
    mci = C.minimal_coupling(f, A, g)
    assert np.abs(tci.values - mci.values).max() < 1e-12


def test_degree_two_agreement_for_all_potentials():
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    pots = [F.zero_potential(2), F.symmetric_gauge(1.0), F.landau_gauge(1.0),
            F.polynomial_potential(2, [[(0.5, (2, 0)), (0.2, (1, 1))], [(0.3, (0, 3))]])]
    f = C.PolynomialSymbol(2, [(1.0, (2, 0)), (0.5, (1, 1)), (-0.3, (0, 1)), (2.0, (0, 0))])
    for A in pots:
        diff, report = C.coupling_discrepancy(f, A, g)
        assert report["max_abs_difference"] < 1e-10, A.name


def test_linear_potentials_agree_at_degree_three():
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    f = C.PolynomialSymbol(2, [(1.0, (2, 1))])
    for A in (F.symmetric_gauge(1.0), F.landau_gauge(2.0), F.constant_potential([0.5, -0.2])):
        diff, report = C.coupling_discrepancy(f, A, g)
        assert report["max_abs_difference"] < 1e-10, A.name


def test_degree_three_quadratic_potential_discrepancy():
    # f = p1^2 p2, A = (0, x1^2): the correction is the constant 1/6
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    A = F.polynomial_potential(2, [[], [(1.0, (2, 0))]])
    f = C.PolynomialSymbol(2, [(1.0, (2, 1))])
    diff, report = C.coupling_discrepancy(f, A, g)
    assert report["max_abs_difference"] > 1e-3
    assert np.abs(diff.values - 1.0 / 6.0).max() < 1e-8
    # and the lattice difference matches the symbolic oracle pointwise
    import sympy as sp

    out, (x1, x2, p1, p2) = sympy_coupling_oracle()
    fn = sp.lambdify((x1, x2, p1, p2), out, "numpy")
    pts = g.config_points()
    kpts = g.momentum_points()
    oracle = fn(pts[:, 0][:, None], pts[:, 1][:, None],
                kpts[None, :, 0], kpts[None, :, 1]).reshape(diff.values.shape)
    tci = C.covariant_coupling(f, A, g)
    assert np.abs(tci.values - oracle).max() < 1e-8


def test_discrepancy_rejects_high_degree():
    g = G.PhaseSpaceGrid(2, 8, 4.0)
    f = C.PolynomialSymbol(2, [(1.0, (4, 0))])
    with pytest.raises(InputError):
        C.coupling_discrepancy(f, F.symmetric_gauge(1.0), g)


def test_covariant_coupling_high_degree_warns():
    g = G.PhaseSpaceGrid(1, 8, 4.0)
    f = C.PolynomialSymbol(1, [(1.0, (4,))])
    with pytest.warns(UserWarning):
        C.covariant_coupling(f, F.zero_potential(1), g)


# ---------------------------------------------------------------------------
# transform route and quantization equivalence

def test_transform_route_matches_substitution_for_linear_potential():
    # for linear A the two couplings coincide, so the discrete transform
    # route must reproduce the pointwise substitution on localized symbols
    g = G.PhaseSpaceGrid(1, 64, 10.0)
    A = F.linear_potential([[0.4]])
    # cutoff narrow enough that the shifted argument never wraps the box
    f = C.PolynomialSymbol(1, [(1.0, (1,))]).with_momentum_cutoff(0.8)
    tvals = C.covariant_coupling(f, A, g, QUAD, kind="midpoint")
    mvals = C.minimal_coupling(f, A, g, kind="midpoint")
    scale = np.abs(mvals.values).max()
    assert np.abs(tvals.values - mvals.values).max() / scale < 1e-10


def test_quantization_equivalence_1d():
    # op^A(f) = op(T^A f): covariant quantization via the coupled symbol
    g = G.PhaseSpaceGrid(1, 64, 10.0)
    A = F.polynomial_potential(1, [[(0.3, (2,))]])
    f = C.PolynomialSymbol(1, [(1.0, (3,))]).with_momentum_cutoff(1.0)
    lhs = Q.op_quantize(f, A, g)
    coupled = C.covariant_coupling(f, A, g, QUAD, kind="midpoint")
    rhs = Q.op_quantize(coupled, None, g)
    err = np.linalg.norm(lhs.kernel - rhs.kernel) / np.linalg.norm(lhs.kernel)
    assert err < 1e-8


def test_wrong_quantization_fails_gauge_covariance():
    # same constant field through a linear and a quadratic potential: the
    # naive coupling quantization is not gauge covariant, the correct one is
    g = G.PhaseSpaceGrid(2, 24, 7.0)
    b = 1.0
    A = F.symmetric_gauge(b)
    rho_poly = F.PolynomialMap(2, [[(0.1, (2, 1))]])
    rho = F.ScalarPotential.from_poly(rho_poly)
    A2 = F.add_gradient(A, rho)
    fsym = C.PolynomialSymbol(2, [(1.0, (2, 1))]).with_momentum_cutoff(0.9)

    wrong_A = Q.op_quantize(C.minimal_coupling_evaluator(fsym, A), None, g)
    wrong_A2 = Q.op_quantize(C.minimal_coupling_evaluator(fsym, A2), None, g)
    conj = Q.gauge_conjugate(wrong_A, rho, "forward")
    fail = np.linalg.norm(wrong_A2.kernel - conj.kernel) / np.linalg.norm(wrong_A.kernel)
    assert fail > 1e-3

    right_A = Q.op_quantize(C.covariant_coupling(fsym, A, g, QUAD, "midpoint"), None, g)
    right_A2 = Q.op_quantize(C.covariant_coupling(fsym, A2, g, QUAD, "midpoint"), None, g)
    conj2 = Q.gauge_conjugate(right_A, rho, "forward")
    ok = np.linalg.norm(right_A2.kernel - conj2.kernel) / np.linalg.norm(right_A.kernel)
    assert ok < 1e-6
