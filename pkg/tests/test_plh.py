from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K3, context
from tropical_period.errors import OutOfRange, SubspaceDimMismatch
from tropical_period.plh import (
    ScaledScalar, ZERO, build_plh, corrupted_filtration, filtration_basis, kappa,
    monodromy_preserves_pairing, nilpotent_orbit, orbit_operator,
    pairing_symmetric, positivity_sweep, q_trop_pair, structure_checks, to_complex,
)
from tropical_period.radiance import radiance_class, top_power

YS = (5, 10, 20)


def _zero_plh(name):
    ctx = context(name)
    return build_plh(ctx.model, radiance_class(ctx.model, [0] * ctx.fan.n_rays))


# -- scaled scalars ---------------------------------------------------------------------------

@given(st.fractions(max_denominator=50), st.integers(-3, 3), st.fractions(max_denominator=50),
       st.integers(-3, 3))
def test_scaled_scalar_numeric_matches_symbolic(r1, p1, r2, p2):
    a, b = ScaledScalar(r1, p1), ScaledScalar(r2, p2)
    prod = a * b
    expected = complex(a) * complex(b)
    assert abs(complex(prod) - expected) <= 1e-12 * max(1.0, abs(expected))
    if p1 == p2 or r1 == 0 or r2 == 0:
        s = a + b
        assert abs(complex(s) - (complex(a) + complex(b))) <= 1e-12 * max(1.0, abs(complex(s)))


def test_scaled_scalar_refuses_mixed_powers():
    with pytest.raises(ValueError):
        ScaledScalar(1, 1) + ScaledScalar(1, 2)
    assert ScaledScalar(1, 1) + ZERO == ScaledScalar(1, 1)
    assert str(ScaledScalar(Fraction(-1, 2), 2)) == "-1/2*(2pi i)^2"


# -- nilpotent operator and monodromy ---------------------------------------------------------

def test_quartic_nilpotent_operator():
    plh = context("quartic").plh
    assert plh.degrees == [0, 1, 2]
    assert plh.N == [[0, 0, 0], [4, 0, 0], [0, 4, 0]]


def test_zero_class_gives_zero_operator_and_identity_monodromy(golden):
    plh = _zero_plh(golden.spec.name)
    assert all(x == 0 for row in plh.N for x in row)
    n = plh.dim
    assert plh.monodromy == [[ScaledScalar(int(i == j)) for j in range(n)] for i in range(n)]


def test_operator_is_nilpotent_and_raises_degree(any_instance):
    plh = any_instance.plh
    n = plh.dim
    for a in range(n):
        for b in range(n):
            if plh.N[a][b]:
                assert plh.degrees[a] == plh.degrees[b] + 1
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(plh.d + 1):
        P = [[sum(plh.N[i][k] * P[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert all(x == 0 for row in P for x in row)


def test_monodromy_matches_matrix_exponential(any_instance):
    plh = any_instance.plh
    N = np.array([[float(x) for x in row] for row in plh.N])
    expected = scipy.linalg.expm(-2j * math.pi * N)
    assert np.allclose(to_complex(plh.monodromy), expected, rtol=1e-12, atol=1e-9)


def test_monodromy_is_unipotent(any_instance):
    plh = any_instance.plh
    T = to_complex(plh.monodromy) - np.eye(plh.dim)
    assert np.allclose(np.linalg.matrix_power(T, plh.d + 1), 0, atol=1e-6)


def test_monodromy_preserves_pairing(any_instance):
    assert monodromy_preserves_pairing(any_instance.plh)


# -- pairing ---------------------------------------------------------------------------------------

def test_quartic_pairing_example():
    ctx = context("quartic")
    unit, eta2 = (), ctx.model.amb_graded_basis(2)[0][0]
    assert q_trop_pair(ctx.model, unit, eta2) == ScaledScalar(4, 2)
    assert q_trop_pair(ctx.model, unit, unit) == ZERO


def test_pairing_parity(any_instance):
    assert pairing_symmetric(any_instance.plh)


def test_cubic_pairing_is_antisymmetric():
    gram = context("cubic").plh.gram
    assert gram == [[ZERO, ScaledScalar(3, 1)], [ScaledScalar(-3, 1), ZERO]]


# -- filtration ---------------------------------------------------------------------------------------

def test_filtration_examples():
    plh = context("quartic").plh
    assert len(filtration_basis(plh, 0)) == plh.dim
    assert filtration_basis(plh, 2) == [[1, 0, 0]]
    with pytest.raises(OutOfRange):
        filtration_basis(plh, plh.d + 1)


def test_filtration_is_decreasing(any_instance):
    plh = any_instance.plh
    for p in range(plh.d):
        big, small = filtration_basis(plh, p), filtration_basis(plh, p + 1)
        assert all(v in big for v in small)
        assert len(big) - len(small) == plh.dims[plh.d - p]


def test_structure_checks_pass(any_instance):
    rep = structure_checks(any_instance.plh)
    assert rep.ok
    assert all(rep.griffiths.values()) and all(rep.orthogonality.values())
    d = any_instance.plh.d
    assert [rep.hodge_numbers[p] for p in range(d + 1)] == list(reversed(any_instance.model.dims))


@pytest.mark.parametrize("name", ["quartic", "cube", "quintic"])
def test_corrupted_filtration_breaks_griffiths(name):
    plh = context(name).plh
    rep = structure_checks(plh, corrupted_filtration(plh, 0, 1))
    assert not all(rep.griffiths.values())
    assert not rep.ok


# -- nilpotent orbit ----------------------------------------------------------------------------------

def test_orbit_with_zero_class_is_constant(golden):
    plh = _zero_plh(golden.spec.name)
    F = nilpotent_orbit(plh, 2j)
    for p, cols in F.items():
        assert np.array_equal(cols, np.array(filtration_basis(plh, p), dtype=complex).T)


def test_orbit_needs_upper_half_plane(golden):
    with pytest.raises(ValueError):
        nilpotent_orbit(golden.plh, 1.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 5), st.sampled_from(["cubic", "quartic", "cube", "quintic"]))
def test_orbit_shift_by_one_is_monodromy(x, y, name):
    plh = context(name).plh
    z = complex(x, y)
    lhs = orbit_operator(plh, z + 1)
    rhs = to_complex(plh.monodromy) @ orbit_operator(plh, z)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-8 * np.abs(lhs).max())


def test_quartic_orbit_at_ten_i():
    plh = context("quartic").plh
    E = orbit_operator(plh, 10j)
    a = 2 * math.pi * 10 * 4
    expected = np.array([[1, 0, 0], [a, 1, 0], [a * a / 2, a, 1]], dtype=complex)
    assert np.allclose(E, expected, rtol=1e-13)
    N = np.array([[float(x) for x in row] for row in plh.N])
    assert np.allclose(E, scipy.linalg.expm(-2j * math.pi * 10j * N), rtol=1e-12)


# -- positivity ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["cubic", "quartic", "cube", "P1xP2", "quintic"])
def test_positivity_sweep(name):
    ctx = context(name)
    rep = positivity_sweep(ctx.plh, YS, ctx.lattice)
    assert rep.ok and rep.smallest() > 1e-9
    assert len(rep.entries) == len(YS) * (ctx.plh.d + 1)
    for e in rep.entries:
        assert e.dim == ctx.model.dims[e.q]
        assert e.hermitian_defect < 1e-20 * max(1.0, abs(e.min_eigenvalue))


@pytest.mark.parametrize("name", ["cubic", "quartic", "cube", "quintic"])
@pytest.mark.parametrize("y", YS)
def test_top_hodge_form_matches_volume_formula(name, y):
    # on phi = exp(-2 pi i z c_B) 1 the form is (2 pi)^{2d} 2^d y^d / d! times the volume,
    # plus for d = 3 the constant 16 pi^3 zeta(3) chi(Y): the zeta(3) part of the Gamma
    # class makes the conjugate of 1 pick up a top-degree term
    ctx = context(name)
    plh = ctx.plh
    d = plh.d
    phi = orbit_operator(plh, 1j * y)[:, 0]
    kphi = kappa(ctx.lattice, phi[:, None], d)[:, 0]
    Q = to_complex(plh.gram)
    value = (1j ** d) * (phi @ Q @ kphi)
    vol = float(top_power(ctx.model, ctx.c))
    expected = (2 * math.pi) ** (2 * d) * 2 ** d * y ** d / math.factorial(d) * vol
    if d == 3:
        expected += 16 * math.pi ** 3 * float(mpmath.zeta(3)) * ctx.chars.euler_number
    assert abs(value.imag) < 1e-9 * expected
    assert value.real == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("name", ["cubic", "quintic"])
def test_lattice_real_structure_flips_odd_dimensions(name):
    ctx = context(name)
    rep = positivity_sweep(ctx.plh, YS, ctx.lattice, real_structure="lattice")
    assert all(not e.positive for e in rep.entries)
    assert all(e.min_eigenvalue < 0 for e in rep.entries if e.dim == 1)


@pytest.mark.parametrize("name", K3)
def test_real_structures_agree_in_even_dimension(name):
    ctx = context(name)
    a = positivity_sweep(ctx.plh, YS, ctx.lattice)
    b = positivity_sweep(ctx.plh, YS, ctx.lattice, real_structure="lattice")
    assert [e.min_eigenvalue for e in a.entries] == [e.min_eigenvalue for e in b.entries]


def test_kappa_is_an_involution(golden):
    rng = np.random.default_rng(0)
    n = golden.plh.dim
    v = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    back = kappa(golden.lattice, kappa(golden.lattice, v, golden.plh.d), golden.plh.d)
    assert np.allclose(back, v)
    # lattice vectors are fixed up to the real-structure sign
    G = golden.lattice.complex_matrix
    assert np.allclose(kappa(golden.lattice, G, golden.plh.d, "lattice"), G)


def test_dimension_mismatch_is_reported():
    # a zero radiance class keeps F^p(iy) = F^p, which meets its conjugate wrongly
    plh = _zero_plh("quartic")
    with pytest.raises(SubspaceDimMismatch):
        positivity_sweep(plh, [5], context("quartic").lattice)


def test_sweep_rejects_nonpositive_y(golden):
    with pytest.raises(ValueError):
        positivity_sweep(golden.plh, [0], golden.lattice)


def test_precision_is_high_enough_for_threefolds():
    assert mpmath.mp.dps >= 30
