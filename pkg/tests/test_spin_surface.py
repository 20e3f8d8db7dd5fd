import numpy as np
import pytest

from supersigma.grassmann import Parity, ParityError
from supersigma.gridfield import GrassmannField, Grid
from supersigma.spin_surface import (
    CLIFFORD,
    CliffordConvention,
    GravitinoField,
    SpinorField,
    SurfaceGeometry,
    clifford,
    pairing,
    super_weyl,
    susy_metric_gravitino,
    weyl,
)

from conftest import (N_GEN, constant_odd_spinor, even_field, gravitino,
                      odd_field, odd_spinor, trig_array)


@pytest.fixture
def grid():
    return Grid((16, 16), (2.0 * np.pi, 2.0 * np.pi))


def test_clifford_relations():
    for a in (1, 2):
        for b in (1, 2):
            anti = CLIFFORD.gamma(a) @ CLIFFORD.gamma(b) \
                + CLIFFORD.gamma(b) @ CLIFFORD.gamma(a)
            assert np.array_equal(anti, 2.0 * (a == b) * np.eye(2))


def test_pairing_matrix_antisymmetric():
    C = CLIFFORD.pairing_matrix
    assert np.array_equal(C, -C.T)
    CLIFFORD.validate()


def test_bad_convention_rejected():
    with pytest.raises(ValueError):
        CliffordConvention(gamma1=np.eye(2), gamma2=np.eye(2)).validate()


def test_pairing_symmetric_on_odd_spinors(rng, grid):
    u = odd_spinor(rng, grid, [1, 2])
    v = odd_spinor(rng, grid, [3, 4])
    assert pairing(u, v).max_abs_diff(pairing(v, u)) < 1e-14


def test_pairing_antisymmetric_on_even_spinors(rng, grid):
    u = SpinorField([even_field(rng, grid) for _ in range(2)])
    v = SpinorField([even_field(rng, grid) for _ in range(2)])
    assert (pairing(u, v) + pairing(v, u)).max_abs() < 1e-14
    assert pairing(u, u).max_abs() < 1e-14


def test_clifford_action_componentwise(rng, grid):
    s = odd_spinor(rng, grid, [1, 2])
    g1 = CLIFFORD.gamma(1)
    rotated = clifford(1, s, CLIFFORD)
    for i in range(2):
        expected = s.comps[0] * g1[i, 0] + s.comps[1] * g1[i, 1]
        assert rotated.comps[i].max_abs_diff(expected) < 1e-14


def test_super_weyl_shifts_gravitino(rng, grid):
    chi = gravitino(rng, grid)
    t = odd_spinor(rng, grid, [1, 2])
    shifted = super_weyl(chi, t, CLIFFORD)
    for a in (1, 2):
        assert shifted[a].max_abs_diff(chi[a] + clifford(a, t, CLIFFORD)) < 1e-14


def test_gamma_trace(rng, grid):
    chi = gravitino(rng, grid)
    gt = chi.gamma_trace(CLIFFORD)
    expected = clifford(1, chi[1], CLIFFORD) + clifford(2, chi[2], CLIFFORD)
    assert gt.max_abs_diff(expected) == 0.0


def test_susy_metric_gravitino_parities(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi = gravitino(rng, grid)
    q = constant_odd_spinor(rng, grid, 5)
    dframe, dchi = susy_metric_gravitino(geom, chi, q)
    for row in dframe:
        for entry in row:
            assert entry.is_zero() or entry.parity() is Parity.EVEN
    for a in (1, 2):
        assert dchi[a].is_zero() or dchi[a].parity() is Parity.ODD


def test_susy_metric_vanishes_at_chi_zero(rng, grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    chi0 = GravitinoField.zero(grid, N_GEN)
    q = constant_odd_spinor(rng, grid, 5)
    dframe, dchi = susy_metric_gravitino(geom, chi0, q)
    assert max(e.max_abs() for row in dframe for e in row) == 0.0
    # Constant q has vanishing flat spin-connection derivative.
    assert dchi.max_abs() == 0.0


def test_weyl_scales_frame(grid):
    geom = SurfaceGeometry.flat(grid, N_GEN)
    lam = GrassmannField(grid, N_GEN, {0: np.full(grid.shape, 4.0)})
    scaled = weyl(geom, lam)
    # g -> lambda g means the orthonormal frame scales by lambda^{-1/2}.
    for a in range(2):
        for k in range(2):
            expected = geom.frame[a][k] * 0.5
            assert scaled.frame[a][k].max_abs_diff(expected) < 1e-14


def test_frame_parity_enforced(rng, grid):
    odd_entry = odd_field(rng, grid, [1])
    one = GrassmannField.from_array(grid, N_GEN, np.ones(grid.shape))
    zero = GrassmannField.zero(grid, N_GEN)
    with pytest.raises(ParityError):
        SurfaceGeometry(grid, N_GEN, [[one, odd_entry], [zero, one]])


def test_frame_orientation_enforced(grid):
    one = GrassmannField.from_array(grid, N_GEN, np.ones(grid.shape))
    zero = GrassmannField.zero(grid, N_GEN)
    with pytest.raises(ValueError):
        SurfaceGeometry(grid, N_GEN, [[-1.0 * one, zero], [zero, one]])


def test_volume_factor_inverts_determinant(rng, grid):
    one = GrassmannField.from_array(grid, N_GEN, np.ones(grid.shape))
    zero = GrassmannField.zero(grid, N_GEN)
    scale = GrassmannField(grid, N_GEN, {0: 2.0 + 0.5 * np.cos(grid.coordinates()[0]),
                                         0b11: trig_array(rng, grid)})
    geom = SurfaceGeometry(grid, N_GEN, [[scale, zero], [zero, one]])
    prod = geom.volume_factor() * geom.frame_determinant()
    assert prod.max_abs_diff(one) < 1e-12
