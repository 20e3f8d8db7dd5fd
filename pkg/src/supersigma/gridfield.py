"""Grassmann-valued fields sampled on uniform periodic grids.

A ``GrassmannField`` stores one real sample array per Grassmann basis
monomial (bitmask key, as in :mod:`supersigma.grassmann`).  Even-direction
derivatives are spectral, so all differential identities hold to machine
precision for band-limited data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .grassmann import (
    DimensionMismatchError,
    GrassmannNumber,
    Parity,
    monomial_sign,
)

__all__ = ["Grid", "GrassmannField", "spectral_derivative", "trig_interpolate"]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on a torus [0,P_1) x ... x [0,P_m)."""

    shape: tuple[int, ...]
    periods: tuple[float, ...]

    def __post_init__(self):
        if len(self.shape) != len(self.periods):
            raise ValueError("shape and periods must have equal length")
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "periods", tuple(float(p) for p in self.periods))

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def volume(self) -> float:
        return math.prod(self.periods)

    @property
    def cell_volume(self) -> float:
        return self.volume / math.prod(self.shape)

    def axis_points(self, axis: int) -> np.ndarray:
        n, p = self.shape[axis], self.periods[axis]
        return np.arange(n) * (p / n)

    def coordinates(self) -> list[np.ndarray]:
        """Full coordinate arrays of ``shape`` (meshgrid, ij indexing)."""
        axes = [self.axis_points(a) for a in range(self.ndim)]
        return list(np.meshgrid(*axes, indexing="ij")) if self.ndim > 1 else [axes[0]]

    def wavenumbers(self, axis: int) -> np.ndarray:
        n, p = self.shape[axis], self.periods[axis]
        return 2.0 * np.pi * np.fft.fftfreq(n, d=p / n)


def spectral_derivative(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """Fourier-space derivative along ``axis``; exact on trig polynomials.

    The Nyquist mode is zeroed (odd derivative of an even-length grid).
    """
    k = grid.wavenumbers(axis)
    n = grid.shape[axis]
    if n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    fhat = np.fft.fft(values, axis=axis)
    out = np.fft.ifft(1j * k.reshape(shape) * fhat, axis=axis)
    return np.real(out) if np.isrealobj(values) else out


def trig_interpolate(values: np.ndarray, grid: Grid, points: np.ndarray, axis: int = 0) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a 1-d periodic sample set.

    Only supports 1-d grids (used by the 1|1 coordinate-change pullback).
    ``points`` may be any array of evaluation abscissae.
    """
    if grid.ndim != 1 or axis != 0:
        raise NotImplementedError("trig interpolation implemented for 1-d grids only")
    n = grid.shape[0]
    fhat = np.fft.fft(values) / n
    k = grid.wavenumbers(0).copy()
    if n % 2 == 0:
        # fftfreq assigns -k_nyq to index n//2; split that mode into +-k_nyq
        # halves so the interpolant stays real for real samples.
        k_nyq = np.pi * n / grid.periods[0]
        fhat = np.concatenate([fhat, [0.5 * fhat[n // 2]]])
        fhat[n // 2] *= 0.5
        k = np.concatenate([k, [k_nyq]])
        k[n // 2] = -k_nyq
    phase = np.exp(1j * np.multiply.outer(points, k))
    out = phase @ fhat
    return np.real(out) if np.isrealobj(values) else out


class GrassmannField:
    """Field on a periodic grid with values in a real Grassmann algebra."""

    __slots__ = ("grid", "n_gen", "terms")

    def __init__(self, grid: Grid, n_gen: int, terms: Mapping[int, np.ndarray] | None = None):
        self.grid = grid
        self.n_gen = n_gen
        clean: dict[int, np.ndarray] = {}
        if terms:
            for mask, arr in terms.items():
                a = np.asarray(arr, dtype=float)
                if a.shape != grid.shape:
                    a = np.broadcast_to(a, grid.shape).copy()
                if np.any(a):
                    clean[mask] = a
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, grid: Grid, n_gen: int) -> "GrassmannField":
        return cls(grid, n_gen)

    @classmethod
    def from_array(cls, grid: Grid, n_gen: int, values: np.ndarray) -> "GrassmannField":
        return cls(grid, n_gen, {0: np.asarray(values, dtype=float)})

    @classmethod
    def constant(cls, grid: Grid, value: GrassmannNumber) -> "GrassmannField":
        return cls(grid, value.n_gen, {m: np.full(grid.shape, c) for m, c in value.coeffs.items()})

    @classmethod
    def monomial(cls, grid: Grid, n_gen: int, mask: int, values: np.ndarray) -> "GrassmannField":
        return cls(grid, n_gen, {mask: np.asarray(values, dtype=float)})

    # -- structure ---------------------------------------------------------

    def body(self) -> np.ndarray:
        return self.terms.get(0, np.zeros(self.grid.shape)).copy()

    def soul(self) -> "GrassmannField":
        return GrassmannField(self.grid, self.n_gen, {m: a for m, a in self.terms.items() if m})

    def parity(self) -> Parity:
        has_even = any(m.bit_count() % 2 == 0 for m in self.terms)
        has_odd = any(m.bit_count() % 2 == 1 for m in self.terms)
        if has_even and has_odd:
            return Parity.MIXED
        return Parity.ODD if has_odd else Parity.EVEN

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "GrassmannField") -> None:
        if self.n_gen != other.n_gen:
            raise DimensionMismatchError(
                f"mixed generator counts: {self.n_gen} vs {other.n_gen}")
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "GrassmannField | None":
        if isinstance(other, GrassmannField):
            return other
        if isinstance(other, GrassmannNumber):
            return GrassmannField.constant(self.grid, other)
        if isinstance(other, (int, float, np.ndarray)):
            return GrassmannField.from_array(self.grid, self.n_gen, np.asarray(other, dtype=float) * np.ones(self.grid.shape))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._check(o)
        out = {m: a.copy() for m, a in self.terms.items()}
        for m, a in o.terms.items():
            out[m] = out[m] + a if m in out else a
        return GrassmannField(self.grid, self.n_gen, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannField(self.grid, self.n_gen, {m: -a for m, a in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Graded product; ``other`` multiplies from the right."""
        if isinstance(other, (int, float)):
            return GrassmannField(self.grid, self.n_gen, {m: a * other for m, a in self.terms.items()})
        if isinstance(other, np.ndarray):
            return GrassmannField(self.grid, self.n_gen, {m: a * other for m, a in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        self._check(o)
        out: dict[int, np.ndarray] = {}
        for ma, aa in self.terms.items():
            for mb, ab in o.terms.items():
                s = monomial_sign(ma, mb)
                if s:
                    m = ma | mb
                    prod = aa * ab if s > 0 else -(aa * ab)
                    out[m] = out[m] + prod if m in out else prod
        return GrassmannField(self.grid, self.n_gen, out)

    def __rmul__(self, other):
        # Real scalars and arrays commute; GrassmannNumbers multiply from the left.
        if isinstance(other, (int, float, np.ndarray)):
            return self * other
        if isinstance(other, GrassmannNumber):
            return GrassmannField.constant(self.grid, other) * self
        return NotImplemented

    def scale_by_parity(self, even: float, odd: float) -> "GrassmannField":
        return GrassmannField(
            self.grid, self.n_gen,
            {m: a * (odd if m.bit_count() & 1 else even) for m, a in self.terms.items()},
        )

    # -- calculus ----------------------------------------------------------

    def derivative(self, axis: int) -> "GrassmannField":
        return GrassmannField(
            self.grid, self.n_gen,
            {m: spectral_derivative(a, self.grid, axis) for m, a in self.terms.items()},
        )

    def integral(self) -> GrassmannNumber:
        """Periodic trapezoid rule (= mean times torus volume), per monomial."""
        vol = self.grid.volume
        return GrassmannNumber(self.n_gen, {m: float(a.mean()) * vol for m, a in self.terms.items()})

    def compose_body(self, points: np.ndarray) -> "GrassmannField":
        """Evaluate the trig interpolant of every term at new abscissae (1-d)."""
        return GrassmannField(
            self.grid, self.n_gen,
            {m: trig_interpolate(a, self.grid, points) for m, a in self.terms.items()},
        )

    def nilpotent_power(self, p: float, order: int | None = None) -> "GrassmannField":
        """f**p via the finite binomial series around the body.

        Requires a nowhere-zero body; exact because the soul is nilpotent.
        Covers inverse (p=-1) and square roots (p=0.5) of even fields.
        """
        b = self.body()
        if np.any(b == 0.0):
            raise ValueError("nilpotent_power requires a nowhere-zero body")
        s = self.soul() * (1.0 / b)
        n_terms = order if order is not None else self.n_gen
        out = GrassmannField.from_array(self.grid, self.n_gen, np.power(b, p))
        power = GrassmannField.from_array(self.grid, self.n_gen, np.ones(self.grid.shape))
        coeff = 1.0
        for k in range(1, n_terms + 1):
            coeff *= (p - (k - 1)) / k
            power = power * s
            if power.is_zero():
                break
            out = out + power * (coeff * np.power(b, p))
        return out

    # -- inspection --------------------------------------------------------

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(a))) for a in self.terms.values()), default=0.0)

    def max_abs_diff(self, other: "GrassmannField") -> float:
        return (self - other).max_abs()

    def value_at(self, index: tuple[int, ...]) -> GrassmannNumber:
        return GrassmannNumber(self.n_gen, {m: float(a[index]) for m, a in self.terms.items()})

    def to_number(self) -> GrassmannNumber:
        """Constant field to number; raises if any term is non-constant."""
        coeffs = {}
        for m, a in self.terms.items():
            v = float(a.flat[0])
            if not np.allclose(a, v, rtol=0.0, atol=1e-14 * max(1.0, abs(v))):
                raise ValueError("field is not constant")
            coeffs[m] = v
        return GrassmannNumber(self.n_gen, coeffs)

    def to_dict(self) -> dict:
        return {
            "shape": list(self.grid.shape),
            "periods": list(self.grid.periods),
            "terms": [
                {"idx": [i + 1 for i in range(self.n_gen) if m >> i & 1],
                 "values": self.terms[m].ravel().tolist()}
                for m in sorted(self.terms)
            ],
        }

    def __repr__(self):
        return f"GrassmannField(shape={self.grid.shape}, monomials={sorted(self.terms)})"
