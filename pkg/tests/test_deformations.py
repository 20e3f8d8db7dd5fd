import numpy as np
import pytest

from supersigma.deformations import (
    DecompositionResult,
    GravitinoDeformation,
    MetricDeformation,
    decompose_gravitino,
    decompose_metric,
    lie_derivative_metric,
    true_deformation_dimensions,
)
from supersigma.grassmann import ParityError
from supersigma.gridfield import GrassmannField, Grid
from supersigma.sigma2d import UnsupportedRegimeError
from supersigma.spin_surface import CLIFFORD, GravitinoField, SpinorField, SurfaceGeometry

from conftest import N_GEN, even_field, gravitino, odd_field, odd_spinor


@pytest.fixture
def grid():
    return Grid((32, 32), (2.0 * np.pi, 2.0 * np.pi))


@pytest.fixture
def geom(grid):
    return SurfaceGeometry.flat(grid, N_GEN)


@pytest.fixture
def chi0(grid):
    return GravitinoField.zero(grid, N_GEN)


def band_field(rng, grid, masks=(0,), cutoff=6):
    from conftest import trig_array
    return GrassmannField(grid, N_GEN, {
        m: trig_array(rng, grid, cutoff=cutoff) for m in masks})


def test_lie_derivative_closed_form(geom, grid):
    X2 = grid.coordinates()[1]
    X = [GrassmannField(grid, N_GEN, {0: np.sin(X2)}),
         GrassmannField.zero(grid, N_GEN)]
    lie = lie_derivative_metric(geom, X)
    assert np.max(np.abs(lie.tensor[0][1].terms[0] - np.cos(X2))) < 1e-12
    assert lie.tensor[0][0].max_abs() == 0.0
    assert lie.tensor[1][1].max_abs() == 0.0


def test_lie_derivative_of_killing_field_vanishes(geom, grid):
    X = [GrassmannField.from_array(grid, N_GEN, np.full(grid.shape, 2.0)),
         GrassmannField.from_array(grid, N_GEN, np.full(grid.shape, -1.0))]
    assert lie_derivative_metric(geom, X).max_abs() < 1e-12


def test_lie_derivative_rejects_odd_vector(rng, geom, grid):
    with pytest.raises(ParityError):
        lie_derivative_metric(geom, [odd_field(rng, grid, [1]),
                                     GrassmannField.zero(grid, N_GEN)])


def test_conformal_input_recovered(geom, chi0, grid):
    three = GrassmannField.from_array(grid, N_GEN, np.full(grid.shape, 3.0))
    zero = GrassmannField.zero(grid, N_GEN)
    r = decompose_metric(geom, chi0, MetricDeformation([[three, zero], [zero, three]]))
    assert np.max(np.abs(r.weyl.terms[0] - 3.0)) < 1e-12
    assert r.residual_metric.max_abs() < 1e-12
    assert r.reassembly_residual < 1e-12


def test_lie_derivative_input_absorbed(rng, geom, chi0, grid):
    X = [band_field(rng, grid), band_field(rng, grid)]
    dg = lie_derivative_metric(geom, X)
    r = decompose_metric(geom, chi0, dg)
    assert r.residual_metric.max_abs() < 1e-8
    assert r.reassembly_residual < 1e-8


def test_constant_trace_free_tensor_is_true_deformation(geom, chi0, grid):
    one = GrassmannField.from_array(grid, N_GEN, np.ones(grid.shape))
    zero = GrassmannField.zero(grid, N_GEN)
    dg = MetricDeformation([[one, zero], [zero, -1.0 * one]])
    r = decompose_metric(geom, chi0, dg)
    assert r.weyl.max_abs() < 1e-12
    assert r.residual_metric.max_abs_diff(dg) < 1e-12
    assert r.trace_residual < 1e-12
    assert r.divergence_residual < 1e-12


def test_metric_reassembly_on_random_input(rng, geom, chi0, grid):
    g11 = band_field(rng, grid, (0, 0b11))
    g12 = band_field(rng, grid, (0, 0b1100))
    g22 = band_field(rng, grid, (0,))
    dg = MetricDeformation([[g11, g12], [g12, g22]])
    r = decompose_metric(geom, chi0, dg)
    assert r.reassembly_residual < 1e-8
    assert r.trace_residual < 1e-8
    assert r.divergence_residual < 1e-8


def test_super_weyl_input_recovered(rng, geom, chi0, grid):
    t = SpinorField([band_field(rng, grid, (0b1,)), band_field(rng, grid, (0b10,))])
    dchi = GravitinoField([t.matrix_apply(CLIFFORD.gamma(1)),
                           t.matrix_apply(CLIFFORD.gamma(2))])
    r = decompose_gravitino(geom, chi0, dchi)
    assert r.residual_gravitino.max_abs() < 1e-8
    assert r.super_weyl.max_abs_diff(t) < 1e-8


def test_susy_image_absorbed(rng, geom, chi0, grid):
    q = SpinorField([band_field(rng, grid, (0b1,)), band_field(rng, grid, (0b10,))])
    dchi = GravitinoField([q.derivative(0), q.derivative(1)])
    r = decompose_gravitino(geom, chi0, dchi)
    assert r.residual_gravitino.max_abs() < 1e-8
    assert r.reassembly_residual < 1e-8


def test_constant_gamma_trace_free_section_is_true_deformation(geom, chi0, grid):
    A = np.zeros((2, 4))
    A[:, 0:2] = CLIFFORD.gamma(1)
    A[:, 2:4] = CLIFFORD.gamma(2)
    null = np.linalg.svd(A)[2][-1]
    dchi = GravitinoField([
        SpinorField([GrassmannField(grid, N_GEN, {0b1: np.full(grid.shape, null[2 * a])}),
                     GrassmannField(grid, N_GEN, {0b1: np.full(grid.shape, null[2 * a + 1])})])
        for a in range(2)])
    r = decompose_gravitino(geom, chi0, dchi)
    assert r.residual_gravitino.max_abs_diff(dchi) < 1e-12
    assert r.gamma_trace_residual < 1e-12


def test_gravitino_reassembly_on_random_input(rng, geom, chi0, grid):
    dchi = GravitinoField([odd_spinor(rng, grid, [1, 3], cutoff=6),
                           odd_spinor(rng, grid, [2, 4], cutoff=6)])
    r = decompose_gravitino(geom, chi0, dchi)
    assert r.reassembly_residual < 1e-8
    assert r.gamma_trace_residual < 1e-8


def test_true_dimensions_flat_torus(geom):
    assert true_deformation_dimensions(geom) == (2, 2)


def test_true_dimensions_stable_under_refinement(geom):
    geom64 = SurfaceGeometry.flat(Grid((64, 64), (2.0 * np.pi, 2.0 * np.pi)), N_GEN)
    assert true_deformation_dimensions(geom) == true_deformation_dimensions(geom64)


def test_nonzero_gravitino_background_unsupported(rng, geom, grid):
    chi = gravitino(rng, grid)
    one = GrassmannField.from_array(grid, N_GEN, np.ones(grid.shape))
    zero = GrassmannField.zero(grid, N_GEN)
    dg = MetricDeformation([[one, zero], [zero, one]])
    with pytest.raises(UnsupportedRegimeError):
        decompose_metric(geom, chi, dg)


def test_metric_deformation_must_be_symmetric(rng, grid):
    a = band_field(rng, grid)
    b = band_field(rng, grid)
    zero = GrassmannField.zero(grid, N_GEN)
    with pytest.raises(ValueError):
        MetricDeformation([[zero, a], [b, zero]])


def test_gravitino_deformation_must_be_odd(rng, grid):
    # Parity is already enforced when the section itself is built.
    with pytest.raises(ParityError):
        GravitinoField([
            SpinorField([even_field(rng, grid) for _ in range(2)])
            for _ in range(2)])
