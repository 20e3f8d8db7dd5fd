import numpy as np
import pytest
from dataclasses import replace

import supersigma.sigma2d as s2
from supersigma.gridfield import GrassmannField, Grid
from supersigma.sigma2d import (
    ActionCoefficients,
    CalibrationError,
    ComponentFields,
    FlowDivergenceError,
    Target,
    UnsupportedRegimeError,
    action_component,
    action_superfield_flat,
    calibrate_conventions,
    components_from_superfield,
    current_spin32,
    d_zbar,
    energy_momentum,
    harmonic_flow,
    super_current,
    superfield_from_components,
    susy_fields,
    susy_gravitino_variation,
    susy_invariance_residual,
    susy_metric_gravitino,
    t_zz,
)
from supersigma.spin_surface import (
    CLIFFORD,
    GravitinoField,
    SpinorField,
    SurfaceGeometry,
)

from conftest import (N_GEN, constant_odd_spinor, even_field, gravitino,
                      odd_field, odd_spinor, trig_array)

CAL = replace(ActionCoefficients(), c5=-0.5)


@pytest.fixture
def grid():
    return Grid((16, 16), (2.0 * np.pi, 2.0 * np.pi))


def matter(rng, grid, with_F=False, soul=True):
    return ComponentFields(
        phi=[even_field(rng, grid, scale=0.7,
                        soul_mask=0b11 if soul else None)],
        psi=[odd_spinor(rng, grid, [1, 2], scale=0.6)],
        F=[even_field(rng, grid, scale=0.5) if with_F
           else GrassmannField.zero(grid, N_GEN)],
    )


def test_superfield_component_roundtrip(rng, grid):
    fields = matter(rng, grid, with_F=True)
    back = components_from_superfield(superfield_from_components(fields))
    assert back.phi[0].max_abs_diff(fields.phi[0]) < 1e-14
    assert back.psi[0].max_abs_diff(fields.psi[0]) < 1e-14
    assert back.F[0].max_abs_diff(fields.F[0]) < 1e-14


def test_superfield_action_equals_component_action(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    for _ in range(5):
        fields = matter(rng, grid, with_F=True)
        a_super = action_superfield_flat(superfield_from_components(fields), CAL)
        a_comp = action_component(geom, chi0, fields, coeffs=CAL)
        assert a_super.max_abs_diff(a_comp) < 1e-11


def test_superfield_rejects_winding(rng, grid):
    fields = ComponentFields(
        phi=[even_field(rng, grid)],
        psi=[SpinorField.zero(grid, N_GEN)],
        F=[GrassmannField.zero(grid, N_GEN)],
        winding=np.array([[1.0, 0.0]]),
    )
    with pytest.raises(UnsupportedRegimeError):
        superfield_from_components(fields)


def test_susy_invariance_chi_zero(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    fields = matter(rng, grid, soul=False)
    q = constant_odd_spinor(rng, grid, 5)
    assert susy_invariance_residual(geom, chi0, fields, q, coeffs=CAL) < 1e-12


def test_susy_invariance_chi_nonzero(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi = gravitino(rng, grid)
    fields = matter(rng, grid, soul=False)
    q = constant_odd_spinor(rng, grid, 5)
    assert susy_invariance_residual(geom, chi, fields, q, coeffs=CAL) < 1e-12


def test_susy_variation_first_order_exactness(rng, grid):
    # The variation is linear in the monomial parameter q, so applying it
    # twice with the same q annihilates every field (q^2 = 0 structurally).
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    fields = matter(rng, grid, soul=False)
    q = constant_odd_spinor(rng, grid, 5)
    delta = susy_fields(fields, chi0, q, geom, coeffs=CAL)
    delta2 = susy_fields(delta, chi0, q, geom, coeffs=CAL)
    assert delta2.phi[0].max_abs() < 1e-13


def test_susy_rejects_even_parameter(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    fields = matter(rng, grid, soul=False)
    q_even = SpinorField([even_field(rng, grid) for _ in range(2)])
    with pytest.raises(Exception):
        susy_fields(fields, chi0, q_even, geom, coeffs=CAL)


def battery(rng, grid, n=3):
    out = []
    for i in range(n):
        geom = SurfaceGeometry.flat(grid, N_GEN)
        fields = matter(rng, grid, soul=False)
        chi = gravitino(rng, grid) if i < n - 1 \
            else GravitinoField.zero(grid, N_GEN)
        out.append((geom, chi, fields, constant_odd_spinor(rng, grid, 5)))
    return out


def test_calibration_finds_signs(rng, grid):
    cal = calibrate_conventions(battery(rng, grid))
    assert (cal.s1, cal.s2, cal.c4, cal.c5) == (1.0, 1.0, 2.0, -0.5)


def test_calibration_rejects_empty_battery():
    with pytest.raises(CalibrationError):
        calibrate_conventions([])


def test_calibration_reports_degenerate_battery(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    zero_fields = ComponentFields.zero(grid, N_GEN, 1)
    chi0 = GravitinoField.zero(grid, N_GEN)
    q = constant_odd_spinor(rng, grid, 5)
    with pytest.raises(CalibrationError, match="underdetermined"):
        calibrate_conventions([(geom, chi0, zero_fields, q)])


def test_energy_momentum_closed_form(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    fields = ComponentFields(
        phi=[even_field(rng, grid, scale=0.8)],
        psi=[SpinorField.zero(grid, N_GEN)],
        F=[GrassmannField.zero(grid, N_GEN)],
    )
    T = energy_momentum(geom, chi0, fields, coeffs=CAL)
    dphi = [fields.phi_derivative(0, k) for k in range(2)]
    norm_sq = dphi[0] * dphi[0] + dphi[1] * dphi[1]
    scale = norm_sq.max_abs()
    for a in range(2):
        for b in range(2):
            exact = dphi[a] * dphi[b]
            if a == b:
                exact = exact - norm_sq * 0.5
            assert T[a][b].max_abs_diff(exact) / scale < 1e-7
    assert T[0][1].max_abs_diff(T[1][0]) == 0.0


def test_energy_momentum_holomorphic_for_harmonic_map(grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    winding = np.array([[1.0, 0.0], [0.0, 1.0]])
    fields = ComponentFields(
        phi=[GrassmannField.zero(grid, N_GEN) for _ in range(2)],
        psi=[SpinorField.zero(grid, N_GEN) for _ in range(2)],
        F=[GrassmannField.zero(grid, N_GEN) for _ in range(2)],
        winding=winding,
    )
    T = energy_momentum(geom, chi0, fields, coeffs=CAL)
    assert (T[0][0] + T[1][1]).max_abs() < 1e-9
    re, im = t_zz(T)
    dre, dim_ = d_zbar(re, im)
    assert max(dre.max_abs(), dim_.max_abs()) < 1e-9


def test_super_current_directional_oracle(rng, grid):
    """delta_chi A contracted against an arbitrary direction must equal the
    pairing integral against J; the direction carries the spare generator so
    the identity is exact in the Grassmann algebra."""
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi = gravitino(rng, grid)
    fields = matter(rng, grid, soul=False)
    direction = GravitinoField([odd_spinor(rng, grid, [6, 6], scale=0.7)
                                for _ in range(2)])
    a0 = action_component(geom, chi, fields, coeffs=CAL)
    a1 = action_component(geom, chi + direction, fields, coeffs=CAL)
    J = super_current(geom, chi, fields, coeffs=CAL)
    from supersigma.spin_surface import pairing
    density = GrassmannField.zero(grid, N_GEN)
    for a in (1, 2):
        density = density + pairing(direction[a], J[a], CLIFFORD)
    expected = density.integral()
    assert (a1 - a0).max_abs_diff(expected) < 1e-11


def test_super_current_vanishes_without_psi(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi = gravitino(rng, grid)
    fields = ComponentFields(
        phi=[even_field(rng, grid)],
        psi=[SpinorField.zero(grid, N_GEN)],
        F=[GrassmannField.zero(grid, N_GEN)],
    )
    assert super_current(geom, chi, fields, coeffs=CAL).max_abs() == 0.0


def test_super_current_gamma_trace_free_at_chi_zero(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    fields = matter(rng, grid, soul=False)
    J = super_current(geom, chi0, fields, coeffs=CAL)
    assert J.gamma_trace(CLIFFORD).max_abs() < 1e-13


def test_spin32_component_holomorphic_on_critical_fixture(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    winding = np.array([[1.0, 0.0], [0.0, 1.0]])
    crit = ComponentFields(
        phi=[GrassmannField.zero(grid, N_GEN) for _ in range(2)],
        psi=[constant_odd_spinor(rng, grid, g) for g in (1, 2)],
        F=[GrassmannField.zero(grid, N_GEN) for _ in range(2)],
        winding=winding,
    )
    J = super_current(geom, chi0, crit, coeffs=CAL)
    re, im = current_spin32(J, CLIFFORD)
    dre, dim_ = d_zbar(re, im)
    assert max(dre.max_abs(), dim_.max_abs()) < 1e-12


def test_harmonic_flow_converges(grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    X, Y = grid.coordinates()
    phi0 = [0.3 * np.cos(2 * X + Y), 0.2 * np.sin(2 * Y)]
    result = harmonic_flow(geom, phi0, steps=5000, dt=1e-3,
                           winding=np.eye(2))
    assert result.converged
    linear = harmonic_flow(geom, [np.zeros(grid.shape)] * 2, steps=0,
                           dt=1e-3, winding=np.eye(2)).energies[0]
    assert abs(result.energies[-1] - linear) < 1e-6
    assert all(e1 <= e0 + 1e-12 for e0, e1 in zip(result.energies, result.energies[1:]))


def test_harmonic_flow_divergence_detected(grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    X, Y = grid.coordinates()
    phi0 = [0.3 * np.cos(7 * X + 5 * Y), np.zeros(grid.shape)]
    with pytest.raises(FlowDivergenceError):
        harmonic_flow(geom, phi0, steps=2000, dt=0.05, winding=np.eye(2))


def test_sphere_flow_reprojects(grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    target = Target(kind="sphere", dim=3, curvature=1.0)
    X, Y = grid.coordinates()
    phi0 = [1.0 + 0.1 * np.cos(X), 0.1 * np.sin(Y), 0.1 * np.cos(X + Y)]
    result = harmonic_flow(geom, phi0, steps=500, dt=1e-3, target=target)
    radii = np.sqrt(sum(p * p for p in result.phi))
    assert np.max(np.abs(radii - 1.0)) < 1e-12


def test_gravitino_variation_is_odd(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi = gravitino(rng, grid)
    q = constant_odd_spinor(rng, grid, 5)
    dchi = susy_gravitino_variation(geom, chi, q)
    from supersigma.grassmann import Parity
    for a in (1, 2):
        assert dchi[a].is_zero() or dchi[a].parity() is Parity.ODD
