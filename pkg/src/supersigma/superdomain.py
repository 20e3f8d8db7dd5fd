"""Superfunctions on R^{m|n} as finite expansions in odd coordinates.

A superfunction is stored as a map from odd-coordinate multi-indices
(bitmasks over the n odd coordinates) to Grassmann-valued coefficient
fields on the even torus.  All products and derivatives keep track of the
Koszul signs from moving odd coefficients past odd coordinates.

Convention notes (recorded once, used everywhere):

* Expansions are written with the odd coordinates on the LEFT of their
  coefficients, f = sum_gamma eta^gamma f_gamma(x), with strictly
  increasing multi-indices.
* partial_odd is a LEFT derivative: eta^alpha is commuted to the front of
  each monomial and stripped.
* The 1|1 model uses  D = d_eta - eta d_x  and  Q = q (d_eta + eta d_x).
  These are the unique signs (given the left-derivative rule above) for
  which the component action  1/2 Int phi'^2 + psi psi' dx  equals the
  superfield action  -1/2 Int d_x(Phi) D(Phi) [dx deta]  and is invariant
  under the supersymmetry generated by Q.  D and Q anticommute and
  D^2 = -d_x, Q^2 = q-squared terms of +d_x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .grassmann import GrassmannNumber, Parity, ParityError, monomial_sign
from .gridfield import GrassmannField, Grid, spectral_derivative, trig_interpolate

__all__ = [
    "SuperFunction",
    "SuperVectorField",
    "Embedding",
    "CoordinateChange",
    "apply_D",
    "apply_Q",
    "pullback_coordinate_change",
    "restrict",
    "D_SIGN",
    "Q_SIGN",
]

# Sign of the eta d_x part of D and of Q (see module docstring).
D_SIGN = -1.0
Q_SIGN = +1.0


class SuperFunction:
    """Function on R^{m|n} x B with grid-sampled coefficient fields."""

    __slots__ = ("grid", "n_odd", "n_gen", "coeffs")

    def __init__(self, grid: Grid, n_odd: int, n_gen: int,
                 coeffs: Mapping[int, GrassmannField] | None = None):
        self.grid = grid
        self.n_odd = n_odd
        self.n_gen = n_gen
        clean: dict[int, GrassmannField] = {}
        if coeffs:
            limit = 1 << n_odd
            for gamma, f in coeffs.items():
                if not 0 <= gamma < limit:
                    raise ValueError(f"odd multi-index {gamma} out of range")
                if not f.is_zero():
                    clean[gamma] = f
        self.coeffs = clean

    @property
    def m(self) -> int:
        return self.grid.ndim

    def coefficient(self, gamma: int) -> GrassmannField:
        return self.coeffs.get(gamma, GrassmannField.zero(self.grid, self.n_gen))

    @classmethod
    def from_even(cls, grid: Grid, n_odd: int, n_gen: int, values) -> "SuperFunction":
        f = values if isinstance(values, GrassmannField) else GrassmannField.from_array(grid, n_gen, values)
        return cls(grid, n_odd, n_gen, {0: f})

    # -- linear structure ----------------------------------------------------

    def _check(self, other: "SuperFunction") -> None:
        if (self.grid, self.n_odd, self.n_gen) != (other.grid, other.n_odd, other.n_gen):
            raise ValueError("superfunctions live on different superdomains")

    def __add__(self, other):
        if isinstance(other, (int, float, GrassmannNumber, GrassmannField)):
            other = SuperFunction.from_even(self.grid, self.n_odd, self.n_gen,
                                            self.coefficient(0)._coerce(other))
        if not isinstance(other, SuperFunction):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for g, f in other.coeffs.items():
            out[g] = out[g] + f if g in out else f
        return SuperFunction(self.grid, self.n_odd, self.n_gen, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperFunction(self.grid, self.n_odd, self.n_gen,
                             {g: -f for g, f in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Graded product of superfunctions (or right scaling)."""
        if isinstance(other, (int, float, np.ndarray)):
            return SuperFunction(self.grid, self.n_odd, self.n_gen,
                                 {g: f * other for g, f in self.coeffs.items()})
        if not isinstance(other, SuperFunction):
            return NotImplemented
        self._check(other)
        out: dict[int, GrassmannField] = {}
        for g1, f1 in self.coeffs.items():
            for g2, f2 in other.coeffs.items():
                s = monomial_sign(g1, g2)
                if not s:
                    continue
                # Move f1 past eta^{g2}: odd terms of f1 pick up (-1)^{|g2|}.
                f1s = f1.scale_by_parity(1.0, -1.0) if g2.bit_count() & 1 else f1
                term = f1s * f2 * float(s)
                g = g1 | g2
                out[g] = out[g] + term if g in out else term
        return SuperFunction(self.grid, self.n_odd, self.n_gen, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.ndarray)):
            return self * other
        if isinstance(other, GrassmannNumber):
            return self.scale_left(other)
        return NotImplemented

    def scale_left(self, g: GrassmannNumber) -> "SuperFunction":
        """Multiply by a Grassmann constant from the LEFT of the expansion."""
        even = GrassmannNumber(g.n_gen, {m: c for m, c in g.coeffs.items() if m.bit_count() % 2 == 0})
        odd = GrassmannNumber(g.n_gen, {m: c for m, c in g.coeffs.items() if m.bit_count() % 2 == 1})
        out: dict[int, GrassmannField] = {}
        for gamma, f in self.coeffs.items():
            factor = even + odd * (-1.0 if gamma.bit_count() & 1 else 1.0)
            term = GrassmannField.constant(self.grid, factor) * f
            if not term.is_zero():
                out[gamma] = term
        return SuperFunction(self.grid, self.n_odd, self.n_gen, out)

    def mul_odd_coordinate(self, alpha: int) -> "SuperFunction":
        """Left multiplication by the odd coordinate eta^alpha (1-based)."""
        bit = 1 << (alpha - 1)
        out: dict[int, GrassmannField] = {}
        for gamma, f in self.coeffs.items():
            s = monomial_sign(bit, gamma)
            if s:
                out[bit | gamma] = f * float(s)
        return SuperFunction(self.grid, self.n_odd, self.n_gen, out)

    # -- derivatives -----------------------------------------------------------

    def partial_even(self, a: int) -> "SuperFunction":
        """Spectral derivative along even axis ``a`` (1-based)."""
        if not 1 <= a <= self.m:
            raise ValueError(f"even axis {a} out of range 1..{self.m}")
        return SuperFunction(self.grid, self.n_odd, self.n_gen,
                             {g: f.derivative(a - 1) for g, f in self.coeffs.items()})

    def partial_odd(self, alpha: int) -> "SuperFunction":
        """Left derivative with respect to eta^alpha (1-based)."""
        if not 1 <= alpha <= self.n_odd:
            raise ValueError(f"odd coordinate {alpha} out of range 1..{self.n_odd}")
        bit = 1 << (alpha - 1)
        out: dict[int, GrassmannField] = {}
        for gamma, f in self.coeffs.items():
            if gamma & bit:
                below = (gamma & (bit - 1)).bit_count()
                sign = -1.0 if below & 1 else 1.0
                out[gamma ^ bit] = f * sign
        return SuperFunction(self.grid, self.n_odd, self.n_gen, out)

    # -- inspection --------------------------------------------------------------

    def parity(self) -> Parity:
        parities = set()
        for gamma, f in self.coeffs.items():
            p = f.parity()
            if p is Parity.MIXED:
                return Parity.MIXED
            parities.add((gamma.bit_count() + p.value) % 2)
        if len(parities) > 1:
            return Parity.MIXED
        if not parities:
            return Parity.EVEN
        return Parity.ODD if parities.pop() else Parity.EVEN

    def max_abs(self) -> float:
        return max((f.max_abs() for f in self.coeffs.values()), default=0.0)

    def max_abs_diff(self, other: "SuperFunction") -> float:
        return (self - other).max_abs()

    def __repr__(self):
        return (f"SuperFunction(m={self.m}, n={self.n_odd}, "
                f"slots={sorted(self.coeffs)})")


@dataclass
class SuperVectorField:
    """V = V^a d_{x^a} + V^alpha d_{eta^alpha} with superfunction components."""

    even_components: Sequence[SuperFunction | None]
    odd_components: Sequence[SuperFunction | None]

    def apply(self, f: SuperFunction) -> SuperFunction:
        out = None
        for a, comp in enumerate(self.even_components, start=1):
            if comp is not None:
                term = comp * f.partial_even(a)
                out = term if out is None else out + term
        for alpha, comp in enumerate(self.odd_components, start=1):
            if comp is not None:
                term = comp * f.partial_odd(alpha)
                out = term if out is None else out + term
        if out is None:
            raise ValueError("vector field has no components")
        return out


def apply_D(f: SuperFunction) -> SuperFunction:
    """D f = d_eta f - eta d_x f on R^{1|1} (sign convention: module docstring)."""
    if f.m != 1 or f.n_odd != 1:
        raise ValueError("apply_D is defined on R^{1|1}")
    return f.partial_odd(1) + f.partial_even(1).mul_odd_coordinate(1) * D_SIGN


def apply_Q(f: SuperFunction, q: GrassmannNumber) -> SuperFunction:
    """Q f = q (d_eta f + eta d_x f) on R^{1|1} for an odd parameter q."""
    if f.m != 1 or f.n_odd != 1:
        raise ValueError("apply_Q is defined on R^{1|1}")
    if q.parity() is not Parity.ODD:
        raise ParityError("supersymmetry parameter q must be odd")
    inner = f.partial_odd(1) + f.partial_even(1).mul_odd_coordinate(1) * Q_SIGN
    return inner.scale_left(q)


def susy_vector_field(grid: Grid, n_gen: int, q: GrassmannNumber) -> SuperVectorField:
    """Q as a SuperVectorField on R^{1|1}; agrees with apply_Q."""
    if q.parity() is not Parity.ODD:
        raise ParityError("supersymmetry parameter q must be odd")
    q_field = SuperFunction.from_even(grid, 1, n_gen, GrassmannField.constant(grid, q))
    # Q = q d_eta + Q_SIGN * (q eta) d_x.  mul_odd_coordinate builds eta*q,
    # and q eta = -eta q for the odd constant q.
    even = q_field.mul_odd_coordinate(1) * (-Q_SIGN)
    return SuperVectorField(even_components=[even], odd_components=[q_field])


@dataclass
class Embedding:
    """Embedding of the underlying even manifold: i#x = x, i#eta^alpha = xi_alpha."""

    xi: Sequence[GrassmannField]

    def __post_init__(self):
        for x in self.xi:
            if x.parity() not in (Parity.ODD, Parity.EVEN) or (not x.is_zero() and x.parity() is not Parity.ODD):
                raise ParityError("embedding components xi_alpha must be odd")


def restrict(f: SuperFunction, i: Embedding) -> GrassmannField:
    """i#f = sum_gamma xi^gamma f_gamma with xi factors in increasing order."""
    if len(i.xi) != f.n_odd:
        raise ValueError("embedding has wrong number of odd components")
    out = GrassmannField.zero(f.grid, f.n_gen)
    for gamma, coeff in f.coeffs.items():
        term = coeff
        # Multiply xi factors from the right inward so the final order is
        # xi_{a1} xi_{a2} ... coeff with a1 < a2 < ...
        for alpha in reversed(range(f.n_odd)):
            if gamma >> alpha & 1:
                term = i.xi[alpha] * term
        out = out + term
    return out


@dataclass
class CoordinateChange:
    """Coordinate change on R^{1|1}: x = g0(xt) + eta_t g1(xt), eta = gamma0(xt) + eta_t gamma1(xt).

    ``g0`` maps grid points to body values (same grid, orientation
    preserving); ``g1`` and ``gamma0`` are odd fields, ``gamma1`` is even
    with invertible body.
    """

    g0: np.ndarray
    g1: GrassmannField | None = None
    gamma0: GrassmannField | None = None
    gamma1: GrassmannField | None = None
    grid: Grid | None = None

    def validate(self, grid: Grid) -> None:
        x = grid.axis_points(0)
        periodic_part = np.asarray(self.g0, dtype=float) - x
        slope = 1.0 + spectral_derivative(periodic_part, grid, 0)
        if np.any(slope <= 0.0):
            raise ValueError("body map g0 is not an orientation-preserving diffeomorphism")

    @classmethod
    def identity(cls, grid: Grid, n_gen: int) -> "CoordinateChange":
        return cls(g0=grid.axis_points(0))

    def inverse(self, grid: Grid, n_gen: int) -> "CoordinateChange":
        """Inverse change; implemented for rigid rotations with g1 = 0."""
        if self.g1 is not None and not self.g1.is_zero():
            raise NotImplementedError("inverse only implemented for g1 = 0 changes")
        x = grid.axis_points(0)
        shift = np.asarray(self.g0, dtype=float) - x
        if not np.allclose(shift, shift.flat[0]):
            raise NotImplementedError("inverse only implemented for rigid rotations")
        c = float(shift.flat[0])
        # Keep the body map unwrapped: coefficient evaluation is periodic,
        # and wrapping would make the validation slope check see a jump.
        g0_inv = x - c
        gamma1 = self.gamma1 if self.gamma1 is not None else GrassmannField.from_array(grid, n_gen, np.ones(grid.shape))
        gamma1_inv = gamma1.nilpotent_power(-1.0).compose_body(g0_inv)
        if self.gamma0 is not None and not self.gamma0.is_zero():
            gamma0_inv = -(gamma1_inv * self.gamma0.compose_body(g0_inv))
        else:
            gamma0_inv = None
        return CoordinateChange(g0=g0_inv, g1=None, gamma0=gamma0_inv, gamma1=gamma1_inv)


def pullback_coordinate_change(f: SuperFunction, change: CoordinateChange) -> SuperFunction:
    """Express a function on R^{1|1} in the new coordinates (xt, eta_t).

    Nilpotent Taylor expansion about the body map:

        f0(g0 + eta_t g1) + (gamma0 + eta_t gamma1) f1(g0 + eta_t g1)
        = [f0(g0) + gamma0 f1(g0)]
        + eta_t [g1 f0'(g0) + gamma1 f1(g0) - gamma0 g1 f1'(g0)]
    """
    if f.m != 1 or f.n_odd != 1:
        raise ValueError("coordinate-change pullback is defined on R^{1|1}")
    grid, n_gen = f.grid, f.n_gen
    change.validate(grid)
    g0 = np.asarray(change.g0, dtype=float)

    f0, f1 = f.coefficient(0), f.coefficient(1)
    f0_at = f0.compose_body(g0)
    f1_at = f1.compose_body(g0)

    slot0 = f0_at
    slot1 = GrassmannField.zero(grid, n_gen)
    if change.gamma0 is not None and not change.gamma0.is_zero():
        slot0 = slot0 + change.gamma0 * f1_at
    if change.g1 is not None and not change.g1.is_zero():
        slot1 = slot1 + change.g1 * f0.derivative(0).compose_body(g0)
        if change.gamma0 is not None and not change.gamma0.is_zero():
            slot1 = slot1 - change.gamma0 * change.g1 * f1.derivative(0).compose_body(g0)
    gamma1 = change.gamma1
    if gamma1 is None:
        gamma1 = GrassmannField.from_array(grid, n_gen, np.ones(grid.shape))
    slot1 = slot1 + gamma1 * f1_at
    return SuperFunction(grid, 1, n_gen, {0: slot0, 1: slot1})
