import numpy as np
import pytest

from supersigma.grassmann import ParityError, generator
from supersigma.gridfield import GrassmannField, Grid
from supersigma.superdomain import (
    CoordinateChange,
    Embedding,
    SuperFunction,
    apply_D,
    apply_Q,
    pullback_coordinate_change,
    restrict,
    susy_vector_field,
)

from conftest import N_GEN, even_field, odd_field


@pytest.fixture
def grid():
    return Grid((64,), (2.0 * np.pi,))


def random_superfunction(rng, grid):
    f0 = even_field(rng, grid, soul_mask=0b11) + odd_field(rng, grid, [1])
    f1 = odd_field(rng, grid, [2]) + even_field(rng, grid, soul_mask=0b110)
    return SuperFunction(grid, 1, N_GEN, {0: f0, 1: f1})


def test_d_squared_is_minus_dx(rng, grid):
    f = random_superfunction(rng, grid)
    lhs = apply_D(apply_D(f))
    rhs = f.partial_even(1) * -1.0
    assert lhs.max_abs_diff(rhs) < 1e-12


def test_d_commutes_with_q(rng, grid):
    # With the odd parameter attached, Q is an even operator, so the
    # relevant bracket with D is the commutator; it vanishes identically.
    f = random_superfunction(rng, grid)
    q = generator(N_GEN, 5) * 1.3
    dq = apply_D(apply_Q(f, q))
    qd = apply_Q(apply_D(f), q)
    assert dq.max_abs_diff(qd) < 1e-12


def test_q_algebra_with_parameters_attached(rng, grid):
    # With odd parameters attached the variations are even operators: they
    # commute in pairs (anticommutator of the stripped operators times the
    # antisymmetric parameter product), and a repeated parameter kills the
    # square outright since q^2 = 0.
    f = random_superfunction(rng, grid)
    q1, q2 = generator(N_GEN, 5), generator(N_GEN, 6)
    anti = apply_Q(apply_Q(f, q1), q2) + apply_Q(apply_Q(f, q2), q1)
    assert anti.max_abs() < 1e-12
    assert apply_Q(apply_Q(f, q1), q1).max_abs() < 1e-12
    # The translation content of the algebra survives in the commutator.
    comm = apply_Q(apply_Q(f, q1), q2) - apply_Q(apply_Q(f, q2), q1)
    expected = f.partial_even(1).scale_left(q2 * q1) * -2.0
    assert comm.max_abs_diff(expected) < 1e-12


def test_partial_odd_squares_to_zero(rng, grid):
    f = SuperFunction(grid, 2, N_GEN, {
        0: even_field(rng, grid), 0b01: odd_field(rng, grid, [1]),
        0b10: odd_field(rng, grid, [2]), 0b11: even_field(rng, grid)})
    for alpha in (1, 2):
        assert f.partial_odd(alpha).partial_odd(alpha).max_abs() == 0.0


def test_partial_odd_graded_leibniz(rng, grid):
    # Odd (homogeneous) superfunction f: d_eta(f g) = (d_eta f) g - f d_eta g.
    f = SuperFunction(grid, 1, N_GEN, {0: odd_field(rng, grid, [1]),
                                       1: even_field(rng, grid)})
    g = random_superfunction(rng, grid)
    lhs = (f * g).partial_odd(1)
    rhs = f.partial_odd(1) * g - f * g.partial_odd(1)
    assert lhs.max_abs_diff(rhs) < 1e-12


def test_product_associative(rng, grid):
    f, g, h = (random_superfunction(rng, grid) for _ in range(3))
    assert ((f * g) * h).max_abs_diff(f * (g * h)) < 1e-11


def test_odd_coordinate_squares_to_zero(rng, grid):
    f = random_superfunction(rng, grid)
    assert f.mul_odd_coordinate(1).mul_odd_coordinate(1).max_abs() == 0.0


def test_susy_vector_field_agrees_with_apply_q(rng, grid):
    f = random_superfunction(rng, grid)
    q = generator(N_GEN, 5) * -0.7
    V = susy_vector_field(grid, N_GEN, q)
    assert V.apply(f).max_abs_diff(apply_Q(f, q)) < 1e-12


def test_apply_q_requires_odd_parameter(rng, grid):
    f = random_superfunction(rng, grid)
    with pytest.raises(ParityError):
        apply_Q(f, generator(N_GEN, 5) * generator(N_GEN, 6))


def test_restrict_zero_embedding(rng, grid):
    f = random_superfunction(rng, grid)
    zero = Embedding(xi=[GrassmannField.zero(grid, N_GEN)])
    assert restrict(f, zero).max_abs_diff(f.coefficient(0)) == 0.0


def test_restrict_general_embedding(rng, grid):
    f = random_superfunction(rng, grid)
    xi = odd_field(rng, grid, [6])
    emb = Embedding(xi=[xi])
    expected = f.coefficient(0) + xi * f.coefficient(1)
    assert restrict(f, emb).max_abs_diff(expected) < 1e-13


def test_pullback_identity_change(rng, grid):
    f = random_superfunction(rng, grid)
    ident = CoordinateChange.identity(grid, N_GEN)
    assert pullback_coordinate_change(f, ident).max_abs_diff(f) < 1e-12


def test_pullback_then_inverse_is_identity(rng, grid):
    f = random_superfunction(rng, grid)
    x = grid.axis_points(0)
    change = CoordinateChange(
        g0=x + 1.25,
        gamma0=odd_field(rng, grid, [6], scale=0.6),
        gamma1=GrassmannField(grid, N_GEN, {
            0: np.ones(grid.shape), 0b11: 0.4 * np.cos(x)}),
    )
    moved = pullback_coordinate_change(f, change)
    back = pullback_coordinate_change(moved, change.inverse(grid, N_GEN))
    assert back.max_abs_diff(f) < 1e-10


def test_orientation_reversal_rejected(grid):
    x = grid.axis_points(0)
    bad = CoordinateChange(g0=(-x) % grid.periods[0])
    f = SuperFunction.from_even(grid, 1, N_GEN, np.sin(x))
    with pytest.raises(ValueError):
        pullback_coordinate_change(f, bad)
