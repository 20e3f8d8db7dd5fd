"""Flat-torus surface geometry with spinors, gravitino, and their transformations.

The spinor bundle is a real rank-2 bundle with Clifford matrices

    gamma^1 = [[1, 0], [0, -1]],   gamma^2 = [[0, 1], [1, 0]],

and spinor pairing <s, t> = s^T C t with C = gamma^1 gamma^2 = [[0, 1], [-1, 0]]
(antisymmetric, so <psi, psi> is generically nonzero for odd-valued psi).
The chirality operator is gamma5 = gamma^1 gamma^2 = C.

Frames are stored as 2x2 matrices of even Grassmann fields, frame[a][k]
holding the k-th coordinate component of the frame vector f_a; the induced
metric is the identity exactly when the frame is orthonormal.  Nilpotent
(soul-valued) frame perturbations are handled exactly through the finite
Grassmann expansion of 1/det and sqrt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grassmann import GrassmannNumber, Parity, ParityError
from .gridfield import GrassmannField, Grid

__all__ = [
    "CliffordConvention",
    "SpinorField",
    "GravitinoField",
    "SurfaceGeometry",
    "clifford",
    "pairing",
    "super_weyl",
    "spin_connection_derivative",
    "susy_metric_gravitino",
    "weyl",
]


@dataclass(frozen=True)
class CliffordConvention:
    """Real 2D Euclidean Clifford matrices and the spinor pairing matrix."""

    gamma1: np.ndarray = field(default_factory=lambda: np.array([[1.0, 0.0], [0.0, -1.0]]))
    gamma2: np.ndarray = field(default_factory=lambda: np.array([[0.0, 1.0], [1.0, 0.0]]))

    def gamma(self, a: int) -> np.ndarray:
        if a == 1:
            return self.gamma1
        if a == 2:
            return self.gamma2
        raise ValueError(f"frame index {a} must be 1 or 2")

    @property
    def gamma5(self) -> np.ndarray:
        return self.gamma1 @ self.gamma2

    @property
    def pairing_matrix(self) -> np.ndarray:
        return self.gamma5

    def validate(self) -> None:
        for a in (1, 2):
            for b in (1, 2):
                anti = self.gamma(a) @ self.gamma(b) + self.gamma(b) @ self.gamma(a)
                if not np.array_equal(anti, 2.0 * (a == b) * np.eye(2)):
                    raise ValueError("Clifford relations violated")
        if abs(np.linalg.det(self.pairing_matrix)) < 1e-12:
            raise ValueError("degenerate spinor pairing")


CLIFFORD = CliffordConvention()


class SpinorField:
    """Rank-2 spinor with Grassmann-field components on the torus grid."""

    __slots__ = ("comps",)

    def __init__(self, comps: Sequence[GrassmannField]):
        comps = tuple(comps)
        if len(comps) != 2:
            raise ValueError("spinor fields have exactly two components")
        if comps[0].grid != comps[1].grid or comps[0].n_gen != comps[1].n_gen:
            raise ValueError("spinor components must share grid and algebra")
        self.comps = comps

    @classmethod
    def zero(cls, grid: Grid, n_gen: int) -> "SpinorField":
        return cls([GrassmannField.zero(grid, n_gen)] * 2)

    @property
    def grid(self) -> Grid:
        return self.comps[0].grid

    @property
    def n_gen(self) -> int:
        return self.comps[0].n_gen

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def parity(self) -> Parity:
        ps = {c.parity() for c in self.comps if not c.is_zero()}
        if not ps:
            return Parity.EVEN
        if len(ps) > 1:
            return Parity.MIXED
        return ps.pop()

    def __add__(self, other: "SpinorField") -> "SpinorField":
        return SpinorField([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        return SpinorField([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "SpinorField":
        return SpinorField([-a for a in self.comps])

    def __mul__(self, other) -> "SpinorField":
        """Right scaling by a real scalar/array."""
        return SpinorField([c * other for c in self.comps])

    def __rmul__(self, other) -> "SpinorField":
        """Left multiplication by reals, GrassmannNumbers, or even fields."""
        return SpinorField([other * c for c in self.comps])

    def matrix_apply(self, m: np.ndarray) -> "SpinorField":
        """Pointwise action of a real 2x2 matrix on the spinor index."""
        return SpinorField([
            self.comps[0] * float(m[0, 0]) + self.comps[1] * float(m[0, 1]),
            self.comps[0] * float(m[1, 0]) + self.comps[1] * float(m[1, 1]),
        ])

    def derivative(self, axis: int) -> "SpinorField":
        return SpinorField([c.derivative(axis) for c in self.comps])

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.comps)

    def max_abs_diff(self, other: "SpinorField") -> float:
        return (self - other).max_abs()


def clifford(a: int, s: SpinorField, conv: CliffordConvention = CLIFFORD) -> SpinorField:
    """gamma^a acting pointwise on the spinor index."""
    return s.matrix_apply(conv.gamma(a))


def pairing(s: SpinorField, t: SpinorField, conv: CliffordConvention = CLIFFORD) -> GrassmannField:
    """<s, t> = sum_{ab} s_a C_{ab} t_b (factors multiplied in this order)."""
    C = conv.pairing_matrix
    out = GrassmannField.zero(s.grid, s.n_gen)
    for a in range(2):
        for b in range(2):
            c = float(C[a, b])
            if c:
                out = out + s.comps[a] * t.comps[b] * c
    return out


class GravitinoField:
    """chi_a = chi(f_a) for the two frame directions; odd spinor per direction."""

    __slots__ = ("chi",)

    def __init__(self, chi: Sequence[SpinorField]):
        chi = tuple(chi)
        if len(chi) != 2:
            raise ValueError("gravitino has one spinor per frame direction")
        for c in chi:
            if not c.is_zero() and c.parity() is not Parity.ODD:
                raise ParityError("gravitino components must be odd")
        self.chi = chi

    @classmethod
    def zero(cls, grid: Grid, n_gen: int) -> "GravitinoField":
        return cls([SpinorField.zero(grid, n_gen)] * 2)

    def __getitem__(self, a: int) -> SpinorField:
        """chi_a with a in {1, 2}."""
        return self.chi[a - 1]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.chi)

    def __add__(self, other: "GravitinoField") -> "GravitinoField":
        return GravitinoField([a + b for a, b in zip(self.chi, other.chi)])

    def __sub__(self, other: "GravitinoField") -> "GravitinoField":
        return GravitinoField([a - b for a, b in zip(self.chi, other.chi)])

    def gamma_trace(self, conv: CliffordConvention = CLIFFORD) -> SpinorField:
        return clifford(1, self[1], conv) + clifford(2, self[2], conv)

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.chi)

    def max_abs_diff(self, other: "GravitinoField") -> float:
        return (self - other).max_abs()


class SurfaceGeometry:
    """Flat torus with an (even Grassmann-valued) frame f_a = frame[a][k] d_k."""

    __slots__ = ("grid", "n_gen", "frame", "clifford_convention")

    def __init__(self, grid: Grid, n_gen: int,
                 frame: Sequence[Sequence[GrassmannField]] | None = None,
                 clifford_convention: CliffordConvention = CLIFFORD):
        if grid.ndim != 2:
            raise ValueError("surface geometry requires a 2D grid")
        self.grid = grid
        self.n_gen = n_gen
        self.clifford_convention = clifford_convention
        if frame is None:
            one = GrassmannField.from_array(grid, n_gen, np.ones(grid.shape))
            zero = GrassmannField.zero(grid, n_gen)
            frame = [[one, zero], [zero, one]]
        self.frame = [[frame[a][k] for k in range(2)] for a in range(2)]
        for row in self.frame:
            for entry in row:
                if entry.parity() is Parity.MIXED or (not entry.is_zero() and entry.parity() is Parity.ODD):
                    raise ParityError("frame entries must be even")
        det_body = (self.frame[0][0].body() * self.frame[1][1].body()
                    - self.frame[0][1].body() * self.frame[1][0].body())
        if np.any(det_body <= 0.0):
            raise ValueError("frame body must be invertible and orientation-preserving")

    @classmethod
    def flat(cls, grid: Grid, n_gen: int) -> "SurfaceGeometry":
        return cls(grid, n_gen)

    def is_identity_frame(self) -> bool:
        for a in range(2):
            for k in range(2):
                t = self.frame[a][k].terms
                if a == k:
                    if set(t) != {0} or not np.allclose(t[0], 1.0):
                        return False
                elif t:
                    return False
        return True

    def frame_determinant(self) -> GrassmannField:
        return (self.frame[0][0] * self.frame[1][1]
                - self.frame[0][1] * self.frame[1][0])

    def volume_factor(self) -> GrassmannField:
        """dvol_g = volume_factor * dx^1 dx^2 (= 1/det f for orthonormal f)."""
        return self.frame_determinant().nilpotent_power(-1.0)

    def directional_derivative(self, a: int, g: GrassmannField) -> GrassmannField:
        """f_a g = frame[a][k] d_k g, a in {1, 2}."""
        return (self.frame[a - 1][0] * g.derivative(0)
                + self.frame[a - 1][1] * g.derivative(1))

    def directional_derivative_spinor(self, a: int, s: SpinorField) -> SpinorField:
        return SpinorField([self.directional_derivative(a, c) for c in s.comps])

    def with_frame(self, frame) -> "SurfaceGeometry":
        return SurfaceGeometry(self.grid, self.n_gen, frame, self.clifford_convention)

    def perturb_frame_constant(self, m: np.ndarray) -> "SurfaceGeometry":
        """Frame premultiplied by a constant real matrix: f_a -> m_{ab} f_b."""
        new = []
        for a in range(2):
            row = []
            for k in range(2):
                entry = self.frame[0][k] * float(m[a, 0]) + self.frame[1][k] * float(m[a, 1])
                row.append(entry)
            new.append(row)
        return self.with_frame(new)


def super_weyl(chi: GravitinoField, t: SpinorField,
               conv: CliffordConvention = CLIFFORD) -> GravitinoField:
    """chi_a -> chi_a + gamma^a t."""
    if not t.is_zero() and t.parity() is not Parity.ODD:
        raise ParityError("super Weyl parameter t must be odd")
    return GravitinoField([chi[a] + clifford(a, t, conv) for a in (1, 2)])


def gravitino_connection_coefficient(chi: GravitinoField, a: int,
                                     conv: CliffordConvention = CLIFFORD) -> GrassmannField:
    """The even field <gamma^b chi_b, chi_a> entering the corrected connection."""
    return pairing(chi.gamma_trace(conv), chi[a], conv)


def spin_connection_derivative(geom: SurfaceGeometry, chi: GravitinoField,
                               s: SpinorField, a: int) -> SpinorField:
    """nabla^S_{f_a} s = f_a s + <gamma^b chi_b, chi_a> gamma5 s (flat frame LC)."""
    conv = geom.clifford_convention
    out = geom.directional_derivative_spinor(a, s)
    coeff = gravitino_connection_coefficient(chi, a, conv)
    if not coeff.is_zero():
        out = out + coeff * s.matrix_apply(conv.gamma5)
    return out


def susy_metric_gravitino(geom: SurfaceGeometry, chi: GravitinoField,
                          q: SpinorField) -> tuple[list[list[GrassmannField]], GravitinoField]:
    """Geometry sector of the supersymmetry transformation.

        delta f_a = -2 <gamma^b q, chi_a> f_b,
        delta chi_a = nabla^S_{f_a} q.

    Returns (delta frame, delta chi); delta frame is even (two odd factors),
    delta chi is odd.
    """
    if not q.is_zero() and q.parity() is not Parity.ODD:
        raise ParityError("supersymmetry parameter q must be odd")
    conv = geom.clifford_convention
    dframe: list[list[GrassmannField]] = []
    for a in (1, 2):
        coeffs = [pairing(clifford(b, q, conv), chi[a], conv) * (-2.0) for b in (1, 2)]
        row = []
        for k in range(2):
            entry = coeffs[0] * geom.frame[0][k] + coeffs[1] * geom.frame[1][k]
            row.append(entry)
        dframe.append(row)
    dchi = GravitinoField([spin_connection_derivative(geom, chi, q, a) for a in (1, 2)])
    return dframe, dchi


def weyl(geom: SurfaceGeometry, lam: GrassmannField) -> SurfaceGeometry:
    """Conformal rescaling g -> lam g, realized as frame scaling by lam^{-1/2}."""
    if lam.parity() is Parity.MIXED or (not lam.is_zero() and lam.parity() is Parity.ODD):
        raise ParityError("conformal factor must be even")
    if np.any(lam.body() <= 0.0):
        raise ValueError("conformal factor must have positive body")
    scale = lam.nilpotent_power(-0.5)
    new = [[scale * geom.frame[a][k] for k in range(2)] for a in range(2)]
    return geom.with_frame(new)
