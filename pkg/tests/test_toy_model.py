import numpy as np
import pytest

from supersigma.grassmann import ParityError, generator, unit
from supersigma.gridfield import GrassmannField, Grid
from supersigma.toy_model import (
    ToyFields,
    fields_from_superfield,
    superfield_from_fields,
    toy_action_component,
    toy_action_superfield,
    toy_embedding_residual,
    toy_invariance_residual,
    toy_susy,
    toy_susy_geometric,
)

from conftest import N_GEN, even_field, odd_field


@pytest.fixture
def grid():
    return Grid((64,), (2.0 * np.pi,))


def toy_fixture(rng, grid):
    return ToyFields(even_field(rng, grid, soul_mask=0b11),
                     odd_field(rng, grid, [1, 2]))


def test_superfield_component_roundtrip(rng, grid):
    f = toy_fixture(rng, grid)
    back = fields_from_superfield(superfield_from_fields(f))
    assert back.phi.max_abs_diff(f.phi) == 0.0
    assert back.psi.max_abs_diff(f.psi) == 0.0


def test_action_equivalence(rng, grid):
    for _ in range(10):
        f = toy_fixture(rng, grid)
        a_comp = toy_action_component(f)
        a_super = toy_action_superfield(superfield_from_fields(f))
        assert a_comp.max_abs_diff(a_super) < 1e-12


def test_closed_form_action(grid):
    x = grid.axis_points(0)
    f = ToyFields(
        GrassmannField(grid, N_GEN, {0: np.sin(x)}),
        GrassmannField(grid, N_GEN, {0b01: np.cos(x), 0b10: np.sin(x)}),
    )
    expected = unit(N_GEN) * (np.pi / 2.0) \
        + generator(N_GEN, 1) * generator(N_GEN, 2) * np.pi
    assert toy_action_component(f).max_abs_diff(expected) < 1e-12
    assert toy_action_superfield(superfield_from_fields(f)).max_abs_diff(expected) < 1e-12


def test_susy_invariance(rng, grid):
    for _ in range(10):
        f = toy_fixture(rng, grid)
        q = generator(N_GEN, 5) * float(rng.normal())
        assert toy_invariance_residual(f, q) < 1e-12


def test_susy_geometric_agreement(rng, grid):
    f = toy_fixture(rng, grid)
    q = generator(N_GEN, 5) * 0.8
    d1, d2 = toy_susy(f, q), toy_susy_geometric(f, q)
    assert d1.phi.max_abs_diff(d2.phi) < 1e-13
    assert d1.psi.max_abs_diff(d2.psi) < 1e-13


def test_embedding_independence(rng, grid):
    f = toy_fixture(rng, grid)
    xi = odd_field(rng, grid, [6])
    assert toy_embedding_residual(f, xi) < 1e-12


def test_susy_requires_odd_parameter(rng, grid):
    f = toy_fixture(rng, grid)
    with pytest.raises(ParityError):
        toy_susy(f, unit(N_GEN))


def test_fields_parity_checked(rng, grid):
    with pytest.raises(ParityError):
        ToyFields(odd_field(rng, grid, [1]), odd_field(rng, grid, [2]))
    with pytest.raises(ParityError):
        ToyFields(even_field(rng, grid), even_field(rng, grid))
