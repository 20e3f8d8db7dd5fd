"""Infinitesimal deformations of the flat-torus geometry and their
decomposition into conformal, diffeomorphism, supersymmetry, and residual
("true") parts.

A metric deformation splits as

    delta g = lambda g + L_X g + (metric image of susy(q)) + D,

where D is trace-free and divergence-free, and a gravitino deformation as

    delta chi = gamma t + L_X chi + susy(q) + DD,

where DD is gamma-trace-free.  On the flat torus with the gravitino
background chi = 0 the susy metric image vanishes identically and the
gravitino susy image is the plain directional derivative of q, so both
decompositions reduce to finite linear algebra, solved here per Fourier
mode by least squares with a pseudo-inverse (singular-value cutoff 1e-10).

The residual spaces are two-dimensional on each line: the constant
trace-free symmetric tensors and the constant gamma-trace-free gravitino
sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grassmann import Parity, ParityError
from .gridfield import GrassmannField, Grid, spectral_derivative
from .sigma2d import UnsupportedRegimeError
from .spin_surface import (
    CliffordConvention,
    GravitinoField,
    SpinorField,
    SurfaceGeometry,
)

__all__ = [
    "MetricDeformation",
    "GravitinoDeformation",
    "DecompositionResult",
    "lie_derivative_metric",
    "decompose_metric",
    "decompose_gravitino",
    "true_deformation_dimensions",
]

SVD_CUTOFF = 1e-10


@dataclass
class MetricDeformation:
    """Symmetric 2-tensor delta g with even Grassmann-valued entries."""

    tensor: Sequence[Sequence[GrassmannField]]

    def __post_init__(self):
        t = [[self.tensor[a][b] for b in range(2)] for a in range(2)]
        if t[0][1].max_abs_diff(t[1][0]) > 0.0:
            raise ValueError("metric deformation must be symmetric")
        for row in t:
            for entry in row:
                if not entry.is_zero() and entry.parity() is not Parity.EVEN:
                    raise ParityError("metric deformation entries must be even")
        self.tensor = t

    @property
    def grid(self) -> Grid:
        return self.tensor[0][0].grid

    @property
    def n_gen(self) -> int:
        return self.tensor[0][0].n_gen

    def __sub__(self, other: "MetricDeformation") -> "MetricDeformation":
        return MetricDeformation(
            [[self.tensor[a][b] - other.tensor[a][b] for b in range(2)] for a in range(2)])

    def max_abs(self) -> float:
        return max(self.tensor[a][b].max_abs() for a in range(2) for b in range(2))

    def max_abs_diff(self, other: "MetricDeformation") -> float:
        return (self - other).max_abs()

    def trace(self) -> GrassmannField:
        return self.tensor[0][0] + self.tensor[1][1]

    def divergence(self) -> list[GrassmannField]:
        """(div delta g)_a = d_b (delta g)_{ab} on the flat torus."""
        return [self.tensor[a][0].derivative(0) + self.tensor[a][1].derivative(1)
                for a in range(2)]


@dataclass
class GravitinoDeformation:
    """Gravitino-shaped odd section delta chi."""

    chi: GravitinoField

    def __post_init__(self):
        if not self.chi.is_zero() and self.chi[1].parity() not in (Parity.ODD,) \
                and not self.chi[1].is_zero():
            raise ParityError("gravitino deformation must be odd")
        for a in (1, 2):
            s = self.chi[a]
            if not s.is_zero() and s.parity() is not Parity.ODD:
                raise ParityError("gravitino deformation must be odd")

    @property
    def grid(self) -> Grid:
        return self.chi[1].grid

    @property
    def n_gen(self) -> int:
        return self.chi[1].n_gen

    def max_abs(self) -> float:
        return self.chi.max_abs()


@dataclass
class DecompositionResult:
    """Parameters and residuals of a deformation decomposition.

    The metric line fills ``weyl`` (lambda), ``vector`` (X), and
    ``residual_metric`` (D); the gravitino line fills ``super_weyl`` (t),
    ``susy_parameter`` (q), and ``residual_gravitino`` (DD).  Unused slots
    are None.  Residual norms are max-coefficient magnitudes.
    """

    weyl: GrassmannField | None = None
    vector: list[GrassmannField] | None = None
    susy_parameter: SpinorField | None = None
    super_weyl: SpinorField | None = None
    residual_metric: MetricDeformation | None = None
    residual_gravitino: GravitinoField | None = None
    reassembly_residual: float = 0.0
    trace_residual: float = 0.0
    divergence_residual: float = 0.0
    gamma_trace_residual: float = 0.0
    null_directions: list[str] = field(default_factory=list)

    def residual_norms(self) -> dict:
        return {
            "reassembly": self.reassembly_residual,
            "trace": self.trace_residual,
            "divergence": self.divergence_residual,
            "gamma_trace": self.gamma_trace_residual,
        }


def _require_flat_background(geom: SurfaceGeometry, chi: GravitinoField) -> None:
    if not geom.is_identity_frame():
        raise UnsupportedRegimeError(
            "deformation decomposition requires the flat identity frame")
    if not chi.is_zero():
        raise UnsupportedRegimeError(
            "deformation decomposition requires gravitino background chi = 0")


def lie_derivative_metric(geom: SurfaceGeometry, X: Sequence[GrassmannField]) -> MetricDeformation:
    """(L_X g)_{ab} = d_a X_b + d_b X_a on the flat torus (g = identity)."""
    if not geom.is_identity_frame():
        raise UnsupportedRegimeError("Lie derivative implemented for the flat identity frame")
    for comp in X:
        if not comp.is_zero() and comp.parity() is not Parity.EVEN:
            raise ParityError("vector field components must be even")
    t = [[X[b].derivative(a) + X[a].derivative(b) for b in range(2)] for a in range(2)]
    return MetricDeformation(t)


def _default_cutoff(grid: Grid) -> int:
    return min(grid.shape) // 4


def _mode_wavenumbers(grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Angular wavenumbers and integer mode indices along each axis."""
    n1, n2 = grid.shape
    m1 = np.fft.fftfreq(n1, d=1.0 / n1)
    m2 = np.fft.fftfreq(n2, d=1.0 / n2)
    k1 = 2.0 * np.pi * m1 / grid.periods[0]
    k2 = 2.0 * np.pi * m2 / grid.periods[1]
    return k1, k2, m1, m2


def _per_mode_solve(stack: np.ndarray, grid: Grid, cutoff: int,
                    build_columns) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares fit of a component stack per Fourier mode.

    ``stack`` has shape (n_components, n1, n2) of real arrays.
    ``build_columns(kappa1, kappa2)`` returns the complex design matrix
    (n_components x n_params) for one mode.  Returns (params, residual)
    as complex mode arrays of shapes (n_params, n1, n2) and
    (n_components, n1, n2); modes beyond the cutoff go entirely to the
    residual.
    """
    n_comp = stack.shape[0]
    F = np.fft.fft2(stack, axes=(1, 2))
    k1, k2, m1, m2 = _mode_wavenumbers(grid)
    probe = build_columns(k1[0], k2[0])
    n_par = probe.shape[1]
    params = np.zeros((n_par,) + grid.shape, dtype=complex)
    resid = np.array(F, dtype=complex)
    for i1 in range(grid.shape[0]):
        if abs(m1[i1]) > cutoff:
            continue
        for i2 in range(grid.shape[1]):
            if abs(m2[i2]) > cutoff:
                continue
            A = build_columns(k1[i1], k2[i2])
            rhs = F[:, i1, i2]
            sol = np.linalg.pinv(A, rcond=SVD_CUTOFF) @ rhs
            params[:, i1, i2] = sol
            resid[:, i1, i2] = rhs - A @ sol
    return params, resid


def _metric_columns(kap1: float, kap2: float) -> np.ndarray:
    """Design matrix for components (g11, g12, g22).

    Column 0: conformal direction lambda * identity.
    Columns 1-2: (L_X g)_{ab} = i kappa_a X_b + i kappa_b X_a.
    """
    return np.array([
        [1.0, 2j * kap1, 0.0],
        [0.0, 1j * kap2, 1j * kap1],
        [1.0, 0.0, 2j * kap2],
    ], dtype=complex)


def _gravitino_columns(kap1: float, kap2: float, conv: CliffordConvention) -> np.ndarray:
    """Design matrix for components (chi_1^1, chi_1^2, chi_2^1, chi_2^2).

    Columns 0-1: super-Weyl direction delta chi_a = gamma^a t.
    Columns 2-3: susy direction delta chi_a = d_a q = i kappa_a q
    (the flat spin connection at chi = 0).
    """
    g1, g2 = conv.gamma(1), conv.gamma(2)
    A = np.zeros((4, 4), dtype=complex)
    A[0:2, 0:2] = g1
    A[2:4, 0:2] = g2
    A[0:2, 2:4] = 1j * kap1 * np.eye(2)
    A[2:4, 2:4] = 1j * kap2 * np.eye(2)
    return A


def _fields_from_modes(modes: np.ndarray, grid: Grid, n_gen: int,
                       masks: Sequence[int], mask_index: dict) -> list[GrassmannField]:
    """Inverse transform per-mask mode arrays back to GrassmannFields.

    ``modes`` is indexed [mask_slot, component, i1, i2].
    Returns one field per component with the given masks.
    """
    n_comp = modes.shape[1]
    out = []
    for c in range(n_comp):
        terms = {}
        for mask in masks:
            vals = np.fft.ifft2(modes[mask_index[mask], c]).real
            if np.max(np.abs(vals)) > 0.0:
                terms[mask] = vals
        out.append(GrassmannField(grid, n_gen, terms))
    return out


def _decompose_stacks(fields_by_mask: dict, grid: Grid, cutoff: int,
                      build_columns) -> tuple[np.ndarray, np.ndarray, list[int], dict]:
    """Run the per-mode solve for every Grassmann mask present in the input."""
    masks = sorted(fields_by_mask)
    mask_index = {m: i for i, m in enumerate(masks)}
    params_all, resid_all = None, None
    for m in masks:
        params, resid = _per_mode_solve(fields_by_mask[m], grid, cutoff, build_columns)
        if params_all is None:
            params_all = np.zeros((len(masks),) + params.shape, dtype=complex)
            resid_all = np.zeros((len(masks),) + resid.shape, dtype=complex)
        params_all[mask_index[m]] = params
        resid_all[mask_index[m]] = resid
    return params_all, resid_all, masks, mask_index


def decompose_metric(geom: SurfaceGeometry, chi: GravitinoField, dg: MetricDeformation,
                     cutoff: int | None = None) -> DecompositionResult:
    """Least-squares split delta g = lambda g + L_X g + D per Fourier mode.

    Requires the flat identity frame and gravitino background chi = 0; at
    that background the susy metric image -2<gamma^b q, chi_a> f_b vanishes
    identically, so q = 0 and the split is the classical three-term one.
    The residual D is trace-free and divergence-free for band-limited
    inputs.  Constant vector fields (Killing fields of the flat metric)
    are null directions of the fit and are reported, not errors.
    """
    _require_flat_background(geom, chi)
    grid, n_gen = dg.grid, dg.n_gen
    if cutoff is None:
        cutoff = _default_cutoff(grid)

    fields_by_mask: dict[int, np.ndarray] = {}
    comps = [dg.tensor[0][0], dg.tensor[0][1], dg.tensor[1][1]]
    all_masks = sorted({m for f in comps for m in f.terms})
    if not all_masks:
        all_masks = [0]
    for m in all_masks:
        fields_by_mask[m] = np.stack([
            f.terms.get(m, np.zeros(grid.shape)) for f in comps])

    params, resid, masks, mask_index = _decompose_stacks(
        fields_by_mask, grid, cutoff, _metric_columns)

    lam = _fields_from_modes(params[:, 0:1], grid, n_gen, masks, mask_index)[0]
    X = _fields_from_modes(params[:, 1:3], grid, n_gen, masks, mask_index)
    r = _fields_from_modes(resid, grid, n_gen, masks, mask_index)
    D = MetricDeformation([[r[0], r[1]], [r[1], r[2]]])

    reassembled = _reassemble_metric(geom, lam, X, D)
    res = DecompositionResult(
        weyl=lam, vector=X,
        susy_parameter=SpinorField.zero(grid, n_gen),
        residual_metric=D,
        reassembly_residual=reassembled.max_abs_diff(dg),
        trace_residual=D.trace().max_abs(),
        divergence_residual=max(f.max_abs() for f in D.divergence()),
        null_directions=["constant vector fields (Killing)",
                         "susy metric image vanishes at chi = 0"],
    )
    return res


def _reassemble_metric(geom: SurfaceGeometry, lam: GrassmannField,
                       X: Sequence[GrassmannField], D: MetricDeformation) -> MetricDeformation:
    lie = lie_derivative_metric(geom, X)
    t = [[lie.tensor[a][b] + D.tensor[a][b] for b in range(2)] for a in range(2)]
    t[0][0] = t[0][0] + lam
    t[1][1] = t[1][1] + lam
    return MetricDeformation(t)


def decompose_gravitino(geom: SurfaceGeometry, chi: GravitinoField, dchi: GravitinoField,
                        cutoff: int | None = None) -> DecompositionResult:
    """Least-squares split delta chi = gamma t + susy(q) + DD per Fourier mode.

    Requires the flat identity frame and gravitino background chi = 0; at
    that background L_X chi = 0 (null direction) and the susy image is the
    plain directional derivative delta chi_a = d_a q.  The residual DD is
    gamma-trace-free for band-limited inputs.  Constant spinors (harmonic
    on the flat torus with trivial spin structure) are null directions of
    the susy fit and are reported, not errors.
    """
    _require_flat_background(geom, chi)
    for a in (1, 2):
        s = dchi[a]
        if not s.is_zero() and s.parity() is not Parity.ODD:
            raise ParityError("gravitino deformation must be odd")
    grid, n_gen = dchi[1].grid, dchi[1].n_gen
    if cutoff is None:
        cutoff = _default_cutoff(grid)
    conv = geom.clifford_convention

    comps = [dchi[1].comps[0], dchi[1].comps[1], dchi[2].comps[0], dchi[2].comps[1]]
    all_masks = sorted({m for f in comps for m in f.terms})
    if not all_masks:
        all_masks = [0]
    fields_by_mask = {m: np.stack([f.terms.get(m, np.zeros(grid.shape)) for f in comps])
                      for m in all_masks}

    params, resid, masks, mask_index = _decompose_stacks(
        fields_by_mask, grid, cutoff,
        lambda kap1, kap2: _gravitino_columns(kap1, kap2, conv))

    t_comps = _fields_from_modes(params[:, 0:2], grid, n_gen, masks, mask_index)
    q_comps = _fields_from_modes(params[:, 2:4], grid, n_gen, masks, mask_index)
    r = _fields_from_modes(resid, grid, n_gen, masks, mask_index)
    t = SpinorField(t_comps)
    q = SpinorField(q_comps)
    DD = GravitinoField([SpinorField([r[0], r[1]]), SpinorField([r[2], r[3]])])

    reassembled = _reassemble_gravitino(geom, t, q, DD)
    return DecompositionResult(
        super_weyl=t, susy_parameter=q,
        vector=[GrassmannField.zero(grid, n_gen) for _ in range(2)],
        residual_gravitino=DD,
        reassembly_residual=reassembled.max_abs_diff(dchi),
        gamma_trace_residual=DD.gamma_trace(conv).max_abs(),
        null_directions=["L_X chi vanishes at chi = 0",
                         "constant spinors q (harmonic)"],
    )


def _reassemble_gravitino(geom: SurfaceGeometry, t: SpinorField, q: SpinorField,
                          DD: GravitinoField) -> GravitinoField:
    conv = geom.clifford_convention
    out = []
    for a in (1, 2):
        part = t.matrix_apply(conv.gamma(a)) + q.derivative(a - 1) + DD[a]
        out.append(part)
    return GravitinoField(out)


def true_deformation_dimensions(geom: SurfaceGeometry,
                                cutoff: int | None = None) -> tuple[int, int]:
    """Real dimensions of the residual ("true") deformation spaces.

    Even part: band-limited symmetric 2-tensors with zero trace and zero
    divergence.  Odd part: band-limited gravitino-shaped sections with zero
    gamma-trace and zero divergence.  Computed per Fourier mode as complex
    nullities of the constraint matrices (singular values below 1e-10
    relative count as zero); each nonzero mode contributes twice its
    complex nullity as a real dimension, the zero mode once.
    On the flat torus both come out 2: the constant trace-free symmetric
    tensors and the constant gamma-trace-free sections.
    """
    if not geom.is_identity_frame():
        raise UnsupportedRegimeError("dimension count implemented for the flat identity frame")
    grid = geom.grid
    if cutoff is None:
        cutoff = _default_cutoff(grid)
    conv = geom.clifford_convention
    g1, g2 = conv.gamma(1), conv.gamma(2)

    def nullity(A: np.ndarray) -> int:
        s = np.linalg.svd(A, compute_uv=False)
        smax = s[0] if len(s) and s[0] > 0 else 1.0
        rank = int(np.sum(s > SVD_CUTOFF * smax))
        return A.shape[1] - rank

    d_even = 0
    d_odd = 0
    for n1 in range(0, cutoff + 1):
        for n2 in range(-cutoff, cutoff + 1):
            if n1 == 0 and n2 < 0:
                continue
            kap1 = 2.0 * np.pi * n1 / grid.periods[0]
            kap2 = 2.0 * np.pi * n2 / grid.periods[1]
            mult = 1 if (n1 == 0 and n2 == 0) else 2
            # Even line: unknowns (g11, g12, g22); trace + divergence rows.
            Ae = np.array([
                [1.0, 0.0, 1.0],
                [1j * kap1, 1j * kap2, 0.0],
                [0.0, 1j * kap1, 1j * kap2],
            ], dtype=complex)
            d_even += mult * nullity(Ae)
            # Odd line: unknowns (chi_1^1, chi_1^2, chi_2^1, chi_2^2);
            # gamma-trace + divergence rows.
            Ao = np.zeros((4, 4), dtype=complex)
            Ao[0:2, 0:2] = g1
            Ao[0:2, 2:4] = g2
            Ao[2:4, 0:2] = 1j * kap1 * np.eye(2)
            Ao[2:4, 2:4] = 1j * kap2 * np.eye(2)
            d_odd += mult * nullity(Ao)
    return d_even, d_odd
