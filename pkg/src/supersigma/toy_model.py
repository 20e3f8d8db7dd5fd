"""The 1|1-dimensional supersymmetric sigma model on the circle.

Both formulations of the action are implemented:

* component form   A(phi, psi) = 1/2 Int phi'^2 + psi psi' dx
* superfield form  A(Phi)      = -1/2 Int d_x(Phi) D(Phi) [dx deta]

with D = d_eta - eta d_x (see superdomain).  The supersymmetry variation is

    delta phi = q psi,   delta psi = -q d_x phi,

which is exactly the restriction of Q Phi and Q D Phi along the zero
embedding, and leaves both actions invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .berezin import BerezinDomain, berezin_integrate
from .grassmann import GrassmannNumber, Parity, ParityError
from .gridfield import GrassmannField, Grid
from .superdomain import (
    CoordinateChange,
    Embedding,
    SuperFunction,
    apply_D,
    apply_Q,
    pullback_coordinate_change,
    restrict,
)

__all__ = [
    "ToyFields",
    "superfield_from_fields",
    "fields_from_superfield",
    "toy_action_component",
    "toy_action_superfield",
    "toy_susy",
    "toy_susy_geometric",
    "toy_invariance_residual",
    "toy_embedding_residual",
]


@dataclass
class ToyFields:
    """Circle-valued matter content: even phi and odd psi."""

    phi: GrassmannField
    psi: GrassmannField

    def __post_init__(self):
        if self.phi.parity() not in (Parity.EVEN,):
            raise ParityError("phi must be even")
        if not self.psi.is_zero() and self.psi.parity() is not Parity.ODD:
            raise ParityError("psi must be odd")
        if self.phi.grid != self.psi.grid or self.phi.n_gen != self.psi.n_gen:
            raise ValueError("phi and psi must share grid and algebra")

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    @property
    def n_gen(self) -> int:
        return self.phi.n_gen

    def __add__(self, other: "ToyFields") -> "ToyFields":
        return ToyFields(self.phi + other.phi, self.psi + other.psi)


def superfield_from_fields(f: ToyFields) -> SuperFunction:
    """Phi = phi + eta psi."""
    return SuperFunction(f.grid, 1, f.n_gen, {0: f.phi, 1: f.psi})


def fields_from_superfield(Phi: SuperFunction) -> ToyFields:
    return ToyFields(Phi.coefficient(0), Phi.coefficient(1))


def toy_action_component(f: ToyFields) -> GrassmannNumber:
    """A = 1/2 Int phi'^2 + psi psi' dx over the circle."""
    dphi = f.phi.derivative(0)
    dpsi = f.psi.derivative(0)
    density = dphi * dphi + f.psi * dpsi
    return density.integral() * 0.5


def toy_action_superfield(Phi: SuperFunction) -> GrassmannNumber:
    """A = -1/2 Int d_x(Phi) D(Phi) [dx deta]; equals the component action."""
    if Phi.m != 1 or Phi.n_odd != 1:
        raise ValueError("toy superfield action is defined on R^{1|1}")
    integrand = Phi.partial_even(1) * apply_D(Phi) * (-0.5)
    return berezin_integrate(integrand, BerezinDomain(Phi.grid, 1))


def toy_susy(f: ToyFields, q: GrassmannNumber) -> ToyFields:
    """Supersymmetry variation (delta phi, delta psi) = (q psi, -q phi')."""
    if q.parity() is not Parity.ODD:
        raise ParityError("supersymmetry parameter q must be odd")
    dphi = q * f.psi
    dpsi = -(q * f.phi.derivative(0))
    return ToyFields(dphi, dpsi)


def toy_susy_geometric(f: ToyFields, q: GrassmannNumber) -> ToyFields:
    """The same variation read off geometrically: (i#QPhi, i#QDPhi) at xi=0."""
    Phi = superfield_from_fields(f)
    zero_embed = Embedding(xi=[GrassmannField.zero(f.grid, f.n_gen)])
    dphi = restrict(apply_Q(Phi, q), zero_embed)
    dpsi = restrict(apply_Q(apply_D(Phi), q), zero_embed)
    return ToyFields(dphi, dpsi)


def toy_invariance_residual(f: ToyFields, q: GrassmannNumber) -> float:
    """Max coefficient of A(f + delta f) - A(f).

    The variation is proportional to the odd parameter q, so for a monomial
    q the difference is exactly the first variation (q^2 = 0 structurally);
    no finite-difference step is involved.
    """
    delta = toy_susy(f, q)
    return toy_action_component(f + delta).max_abs_diff(toy_action_component(f))


def toy_embedding_residual(f: ToyFields, xi: GrassmannField) -> float:
    """Independence of the superfield action from the embedding.

    The Berezin integral is taken in coordinates adapted to the embedding
    with i#eta = xi: the integrand is pulled back through the coordinate
    change eta = xi + eta~ (unit Berezinian) and integrated there.  The
    result must equal the adapted xi = 0 integral.
    """
    if not xi.is_zero() and xi.parity() is not Parity.ODD:
        raise ParityError("embedding component xi must be odd")
    Phi = superfield_from_fields(f)
    integrand = Phi.partial_even(1) * apply_D(Phi) * (-0.5)
    a0 = berezin_integrate(integrand, BerezinDomain(f.grid, 1))
    change = CoordinateChange(g0=f.grid.axis_points(0), g1=None, gamma0=xi, gamma1=None)
    moved = pullback_coordinate_change(integrand, change)
    a1 = berezin_integrate(moved, BerezinDomain(f.grid, 1))
    return a0.max_abs_diff(a1)
