import numpy as np
import pytest

from supersigma.gridfield import GrassmannField, Grid
from supersigma.spin_surface import GravitinoField, SpinorField

N_GEN = 6


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)


def trig_array(rng, grid, cutoff=3, n_modes=3, scale=1.0):
    coords = grid.coordinates()
    a = np.zeros(grid.shape)
    for _ in range(n_modes):
        arg = rng.uniform(0.0, 2.0 * np.pi)
        for i in range(grid.ndim):
            k = int(rng.integers(-cutoff, cutoff + 1))
            arg = arg + (2.0 * np.pi * k / grid.periods[i]) * coords[i]
        a = a + rng.normal() * scale * np.cos(arg)
    return a


def even_field(rng, grid, scale=1.0, soul_mask=None, cutoff=3, n_gen=N_GEN):
    terms = {0: trig_array(rng, grid, cutoff=cutoff, scale=scale)}
    if soul_mask is not None:
        terms[soul_mask] = trig_array(rng, grid, cutoff=cutoff, scale=scale)
    return GrassmannField(grid, n_gen, terms)


def odd_field(rng, grid, gens, scale=1.0, cutoff=3, n_gen=N_GEN):
    return GrassmannField(grid, n_gen, {
        1 << (g - 1): trig_array(rng, grid, cutoff=cutoff, scale=scale) for g in gens})


def odd_spinor(rng, grid, gens, scale=1.0, cutoff=3, n_gen=N_GEN):
    return SpinorField([odd_field(rng, grid, [g], scale, cutoff, n_gen) for g in gens])


def constant_odd_spinor(rng, grid, gen, n_gen=N_GEN):
    return SpinorField([
        GrassmannField(grid, n_gen,
                       {1 << (gen - 1): np.full(grid.shape, float(rng.normal()))})
        for _ in range(2)])


def gravitino(rng, grid, gens=(3, 4), scale=0.5, n_gen=N_GEN):
    return GravitinoField([odd_spinor(rng, grid, gens, scale, n_gen=n_gen)
                           for _ in range(2)])
