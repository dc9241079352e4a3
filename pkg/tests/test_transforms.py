"""Transform tests against closed forms and independently computed integrals.

Frozen reference values were produced with scipy.integrate.quad/dblquad on
the explicit integrands at the stated points; quad error estimates were at
or below 1e-12 in every case.
"""

import math

import numpy as np
import pytest

from hemiradon import (
    QuadratureSpec,
    classical_radon,
    make_test_field,
    parabolic_field,
    parabolic_transform,
    slope_intercept_relation,
    sonar_profile,
    sonar_transform,
    transversal_field,
    transversal_transform,
)
from hemiradon.errors import DomainError
from hemiradon.fields import Point, ScalarField
from hemiradon.transforms import RadonPlane


def hemisphere_area(n, r):
    return 0.5 * (2 * math.pi ** (n / 2) / math.gamma(n / 2)) * r ** (n - 1)


# ---------------------------------------------------------------------------
# sonar
# ---------------------------------------------------------------------------

def test_sonar_constant_gives_hemisphere_measure():
    for n in (2, 3):
        one = ScalarField(n, lambda pts: np.ones(len(pts)), domain="half")
        xp = (0.3,) if n == 2 else (0.1, -0.2)
        for r in (0.5, 1.0, 2.0):
            got = sonar_transform(one, xp, r)
            assert got == pytest.approx(hemisphere_area(n, r), rel=1e-10)


def test_sonar_bump_frozen_2d():
    # independent arc-integral oracle: 0.223111437031443
    phi = make_test_field("bump", 2, (0.0, 1.0), 0.5, domain="half")
    got = sonar_transform(phi, (0.0,), 1.0)
    assert got == pytest.approx(0.223111437031443, rel=1e-9)


def test_sonar_bump_frozen_3d():
    # independent polar-chart oracle: 0.116628098294582; the bump's edge
    # flatness limits the tensor rule to ~1e-7 here
    phi = make_test_field("bump", 3, (0.0, 0.0, 1.0), 0.5, domain="half")
    got = sonar_transform(phi, (0.0, 0.0), 1.0)
    assert got == pytest.approx(0.116628098294582, rel=1e-6)


def test_sonar_linearity():
    a = make_test_field("bump", 2, (0.0, 1.0), 0.4, domain="half")
    b = make_test_field("bump", 2, (0.2, 0.8), 0.3, domain="half")
    xp, r = (0.1,), 0.9
    # the sum carries the union support box, so the two sides window the
    # arcs differently; agreement is limited by the bump quadrature itself
    lhs = sonar_transform(a + b, xp, r)
    rhs = sonar_transform(a, xp, r) + sonar_transform(b, xp, r)
    assert lhs == pytest.approx(rhs, rel=1e-5)


def test_sonar_profile_matches_pointwise():
    phi = make_test_field("bump", 2, (0.0, 1.0), 0.4, domain="half")
    prof = sonar_profile(phi)
    for xp, r in (((-0.2,), 0.8), ((0.0,), 1.0), ((0.3,), 1.2)):
        assert prof.eval(xp, r) == pytest.approx(sonar_transform(phi, xp, r), rel=1e-12)
    assert prof.n == 2
    # support hint: spheres too small or too large to reach the bump vanish
    lo, hi = prof.r_support(np.array([[0.0]]))
    assert lo[0] <= 0.6 and hi[0] >= 1.4


def test_sonar_domain_checks():
    full = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        sonar_transform(full, (0.0,), 1.0)
    phi = make_test_field("bump", 2, (0.0, 1.0), 0.4, domain="half")
    with pytest.raises(DomainError):
        sonar_transform(phi, (0.0,), -1.0)
    with pytest.raises(DomainError):
        sonar_transform(phi, (0.0, 0.0), 1.0)


# ---------------------------------------------------------------------------
# parabolic
# ---------------------------------------------------------------------------

def test_parabolic_gaussian_frozen_2d():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    assert parabolic_transform(f, (0.3, 0.8)) == pytest.approx(
        1.188260294284684, rel=1e-10)
    assert parabolic_transform(f, (-0.5, 1.5)) == pytest.approx(
        0.644716200650647, rel=1e-10)


def test_parabolic_gaussian_frozen_3d():
    f = make_test_field("gaussian", 3, (0.0, 0.0, 0.0), 1.0)
    got = parabolic_transform(f, (0.2, -0.1, 0.5))
    assert got == pytest.approx(2.121391753576941, rel=1e-8)


def test_parabolic_restricted_frozen():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    got = parabolic_transform(f, (0.3, 0.8), variant="restricted")
    assert got == pytest.approx(0.933970385045765, rel=1e-9)
    with pytest.raises(DomainError):
        parabolic_transform(f, (0.3, -0.1), variant="restricted")


def test_parabolic_surface_measure_frozen():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    got = parabolic_transform(f, (0.3, 0.8), variant="surface_measure")
    assert got == pytest.approx(1.922578388232790, rel=1e-9)


def test_parabolic_field_matches_pointwise():
    f = make_test_field("gaussian", 2, (0.2, -0.3), 1.0)
    F = parabolic_field(f)
    for x in ((0.0, 0.0), (1.0, -0.5), (-2.0, 2.5)):
        assert F.eval(x) == pytest.approx(parabolic_transform(f, x), rel=1e-12)


def test_parabolic_rejects_bad_input():
    half = make_test_field("bump", 2, (0.0, 1.0), 0.4, domain="half")
    with pytest.raises(DomainError):
        parabolic_transform(half, (0.0, 1.0))
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        parabolic_transform(f, (0.0, 0.0), variant="projective")


# ---------------------------------------------------------------------------
# transversal
# ---------------------------------------------------------------------------

def transversal_gaussian_exact(u, s):
    """Closed form for the unit gaussian: the slab integral is gaussian."""
    q = 1.0 + float(np.dot(u, u))
    k = len(u)
    return math.pi ** (k / 2) / math.sqrt(q) * math.exp(-s * s / q)


def test_transversal_gaussian_closed_form_2d():
    psi = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    for u in (0.0, 0.4, 1.3, -2.0):
        for s in (0.0, -0.7, 1.1):
            got = transversal_transform(psi, (u, s))
            assert got == pytest.approx(transversal_gaussian_exact((u,), s), rel=1e-12)
    # one frozen spot value for regression
    assert transversal_transform(psi, (1.3, -0.7)) == pytest.approx(
        0.900719142313290, rel=1e-12)


def test_transversal_gaussian_closed_form_3d():
    psi = make_test_field("gaussian", 3, (0.0, 0.0, 0.0), 1.0)
    for u in ((0.0, 0.0), (0.5, -0.3), (2.0, 1.0)):
        got = transversal_transform(psi, u + (0.4,))
        assert got == pytest.approx(transversal_gaussian_exact(u, 0.4), rel=1e-9)


def test_transversal_extreme_slope_accuracy():
    # narrow support windows at steep slopes must stay resolved
    psi = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    for u in (8.0, 64.0, 1024.0):
        got = transversal_transform(psi, (u, 0.3))
        assert got == pytest.approx(transversal_gaussian_exact((u,), 0.3), rel=1e-9)


def test_transversal_field_matches_pointwise():
    psi = make_test_field("gaussian", 2, (0.1, 0.4), 1.0)
    T = transversal_field(psi)
    for x in ((0.0, 0.0), (1.5, -0.8)):
        assert T.eval(x) == pytest.approx(transversal_transform(psi, x), rel=1e-12)
    assert T.box is None
    assert T.section_support is not None


def test_transversal_rejects_half_space_input():
    half = make_test_field("bump", 2, (0.0, 1.0), 0.4, domain="half")
    with pytest.raises(DomainError):
        transversal_transform(half, (0.0, 1.0))


# ---------------------------------------------------------------------------
# classical Radon and the slope-intercept relation
# ---------------------------------------------------------------------------

def test_radon_plane_validation():
    with pytest.raises(DomainError):
        RadonPlane((1.0, 1.0), 0.0)
    p = RadonPlane((0.6, 0.8), 0.5)
    assert p.n == 2


def test_classical_radon_gaussian():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    # rotation invariance: sqrt(pi) exp(-t^2) for every direction
    for ang in (0.1, 1.0, 2.5):
        theta = (math.cos(ang), math.sin(ang))
        for t in (0.0, 0.6, -1.2):
            got = classical_radon(f, RadonPlane(theta, t))
            assert got == pytest.approx(math.sqrt(math.pi) * math.exp(-t * t),
                                        rel=1e-12)


def test_classical_radon_shifted_gaussian():
    c = (0.5, -0.25)
    f = make_test_field("gaussian", 2, c, 1.0)
    theta = (0.6, 0.8)
    t = 0.3
    shift = theta[0] * c[0] + theta[1] * c[1]
    got = classical_radon(f, RadonPlane(theta, t))
    assert got == pytest.approx(math.sqrt(math.pi) * math.exp(-(t - shift) ** 2),
                                rel=1e-11)


def test_classical_radon_3d():
    f = make_test_field("gaussian", 3, (0.0, 0.0, 0.0), 1.0)
    theta = (0.0, 0.6, 0.8)
    got = classical_radon(f, RadonPlane(theta, 0.4))
    assert got == pytest.approx(math.pi * math.exp(-0.16), rel=1e-10)


def test_slope_intercept_relation_agrees():
    f = make_test_field("gaussian", 2, (0.3, 0.1), 1.0)
    for ang in (0.4, 1.2, 2.8):
        plane = RadonPlane((math.cos(ang), math.sin(ang)), 0.7)
        lhs, rhs = slope_intercept_relation(f, plane)
        assert lhs == pytest.approx(rhs, rel=1e-11)


def test_slope_intercept_needs_tilted_plane():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        slope_intercept_relation(f, RadonPlane((1.0, 0.0), 0.2))


def test_point_input_accepted():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    p = Point((0.5,), 0.25)
    assert transversal_transform(f, p) == pytest.approx(
        transversal_transform(f, (0.5, 0.25)), rel=1e-14)


def test_spec_override_changes_rule():
    f = make_test_field("gaussian", 2, (0.0, 0.0), 1.0)
    coarse = QuadratureSpec(m=24, rule="trapezoid")
    got = transversal_transform(f, (0.4, 0.2), coarse)
    exact = transversal_gaussian_exact((0.4,), 0.2)
    assert got == pytest.approx(exact, rel=0.05)
    assert abs(got - exact) > 0.0
