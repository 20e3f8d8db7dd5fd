"""Verification suites: seeded fixture batteries for every library layer.

Each suite returns a list of CheckReport records; ``run_suite`` dispatches
by name and ``calibrate`` wraps the sign calibration, returning an updated
configuration.  All randomness flows through one generator seeded from the
configured seed and a fixed per-suite index, so reports are deterministic
for a given (seed, config) pair whether suites run alone or under "all".
"""

from __future__ import annotations

import numpy as np

from .berezin import BerezinDomain, berezin_integrate
from .config import SuiteConfig
from .deformations import (
    GravitinoDeformation,
    MetricDeformation,
    decompose_gravitino,
    decompose_metric,
    lie_derivative_metric,
    true_deformation_dimensions,
)
from .grassmann import GrassmannNumber, generator, unit
from .gridfield import GrassmannField, Grid
from .report import CheckReport
from .sigma2d import (
    ActionCoefficients,
    ComponentFields,
    action_component,
    action_superfield_flat,
    calibrate_conventions,
    current_spin32,
    d_zbar,
    energy_momentum,
    harmonic_flow,
    super_current,
    superfield_from_components,
    susy_invariance_residual,
    t_zz,
)
from .spin_surface import (
    CLIFFORD,
    GravitinoField,
    SpinorField,
    SurfaceGeometry,
    weyl,
)
from .superdomain import SuperFunction
from .toy_model import (
    ToyFields,
    superfield_from_fields,
    toy_action_component,
    toy_action_superfield,
    toy_embedding_residual,
    toy_invariance_residual,
    toy_susy,
    toy_susy_geometric,
)

__all__ = ["SUITE_NAMES", "run_suite", "calibrate", "build_calibration_battery"]

SUITE_NAMES = ["grassmann", "berezin", "toy", "reduction", "susy2d",
               "currents", "flow", "decompose"]

# Generator allocation: 1-2 matter spinor psi, 3-4 gravitino chi,
# 5 supersymmetry parameter q, 6 spare (directional probes).
PSI_GENS = (1, 2)
CHI_GENS = (3, 4)
Q_GEN = 5
SPARE_GEN = 6


# ---------------------------------------------------------------------------
# Fixture helpers
# ---------------------------------------------------------------------------

def _trig_array(rng: np.random.Generator, grid: Grid, cutoff: int = 3,
                n_modes: int = 3, scale: float = 1.0) -> np.ndarray:
    coords = grid.coordinates()
    a = np.zeros(grid.shape)
    for _ in range(n_modes):
        arg = rng.uniform(0.0, 2.0 * np.pi)
        for i in range(grid.ndim):
            k = int(rng.integers(-cutoff, cutoff + 1))
            arg = arg + (2.0 * np.pi * k / grid.periods[i]) * coords[i]
        a = a + rng.normal() * scale * np.cos(arg)
    return a


def _even_field(rng, grid, n_gen, scale=1.0, soul_mask: int | None = None,
                cutoff: int = 3) -> GrassmannField:
    terms = {0: _trig_array(rng, grid, cutoff=cutoff, scale=scale)}
    if soul_mask is not None:
        terms[soul_mask] = _trig_array(rng, grid, cutoff=cutoff, scale=scale)
    return GrassmannField(grid, n_gen, terms)


def _odd_field(rng, grid, n_gen, gens, scale=1.0, cutoff: int = 3) -> GrassmannField:
    terms = {1 << (g - 1): _trig_array(rng, grid, cutoff=cutoff, scale=scale)
             for g in gens}
    return GrassmannField(grid, n_gen, terms)


def _odd_spinor(rng, grid, n_gen, gens, scale=1.0, cutoff: int = 3) -> SpinorField:
    return SpinorField([_odd_field(rng, grid, n_gen, [g], scale, cutoff) for g in gens])


def _constant_q(rng, grid, n_gen) -> SpinorField:
    comps = []
    for _ in range(2):
        coeff = float(rng.normal())
        comps.append(GrassmannField(grid, n_gen,
                                    {1 << (Q_GEN - 1): np.full(grid.shape, coeff)}))
    return SpinorField(comps)


def _sigma_fixture(rng, grid, n_gen, with_chi: bool) -> tuple:
    """(geom, chi, fields, q) on the flat identity frame, F = 0."""
    geom = SurfaceGeometry.flat(grid, n_gen)
    fields = ComponentFields(
        phi=[_even_field(rng, grid, n_gen, scale=0.7)],
        psi=[_odd_spinor(rng, grid, n_gen, PSI_GENS, scale=0.6)],
        F=[GrassmannField.zero(grid, n_gen)],
    )
    if with_chi:
        chi = GravitinoField([_odd_spinor(rng, grid, n_gen, CHI_GENS, scale=0.5)
                              for _ in range(2)])
    else:
        chi = GravitinoField.zero(grid, n_gen)
    return geom, chi, fields, _constant_q(rng, grid, n_gen)


def build_calibration_battery(config: SuiteConfig, rng: np.random.Generator) -> list:
    grid = Grid(config.grid_shape, config.periods)
    n_gen = config.n_gen
    battery = [_sigma_fixture(rng, grid, n_gen, with_chi=True)
               for _ in range(max(1, config.fixtures("calibration") - 1))]
    battery.append(_sigma_fixture(rng, grid, n_gen, with_chi=False))
    return battery


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _suite_grassmann(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    count = config.fixtures("grassmann")
    tol = config.tolerance("grassmann")

    def random_element(n_masks: int = 6) -> GrassmannNumber:
        # Small-integer coefficients keep all products and sums exact in
        # floating point, so the laws can be checked with zero tolerance.
        masks = rng.integers(0, 1 << n_gen, n_masks)
        return GrassmannNumber(n_gen, {int(m): float(rng.integers(-8, 9) or 1)
                                       for m in masks})

    def random_homogeneous(parity: int) -> GrassmannNumber:
        coeffs = {}
        while len(coeffs) < 4:
            m = int(rng.integers(0, 1 << n_gen))
            if bin(m).count("1") % 2 == parity:
                coeffs[m] = float(rng.integers(-8, 9) or 1)
        return GrassmannNumber(n_gen, coeffs)

    elems = [random_element() for _ in range(count)]
    assoc = 0.0
    for i in range(count):
        a, b, c = elems[i], elems[(i + 1) % count], elems[(i + 2) % count]
        assoc = max(assoc, ((a * b) * c).max_abs_diff(a * (b * c)))

    comm = 0.0
    for _ in range(count):
        pa, pb = int(rng.integers(0, 2)), int(rng.integers(0, 2))
        a, b = random_homogeneous(pa), random_homogeneous(pb)
        sign = -1.0 if (pa and pb) else 1.0
        comm = max(comm, (a * b).max_abs_diff((b * a) * sign))

    nilp = 0.0
    for _ in range(count):
        lin = GrassmannNumber(n_gen, {1 << i: float(rng.normal()) for i in range(n_gen)})
        nilp = max(nilp, (lin * lin).max_abs())
    for _ in range(10):
        s = random_element().soul()
        power = unit(n_gen)
        for _ in range(n_gen + 1):
            power = power * s
        nilp = max(nilp, power.max_abs())

    return [
        CheckReport("grassmann-associativity", assoc, tol),
        CheckReport("grassmann-graded-commutativity", comm, tol),
        CheckReport("grassmann-nilpotency", nilp, tol),
    ]


def _suite_berezin(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid((config.toy_points,), (config.periods[0],))
    tol = config.tolerance("berezin")
    worst = 0.0
    for _ in range(config.fixtures("berezin")):
        f0 = _even_field(rng, grid, n_gen, soul_mask=0b11) \
            + _odd_field(rng, grid, n_gen, [1])
        f1 = _even_field(rng, grid, n_gen, soul_mask=0b110) \
            + _odd_field(rng, grid, n_gen, [2])
        sf = SuperFunction(grid, 1, n_gen, {0: f0, 1: f1})
        lhs = berezin_integrate(sf, BerezinDomain(grid, 1))
        worst = max(worst, lhs.max_abs_diff(f1.integral()))
    return [CheckReport("berezin-top-coefficient-reduction", worst, tol)]


def _toy_fixture(rng, grid, n_gen) -> ToyFields:
    phi = _even_field(rng, grid, n_gen, soul_mask=0b11)
    psi = _odd_field(rng, grid, n_gen, PSI_GENS)
    return ToyFields(phi, psi)


def _suite_toy(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid((config.toy_points,), (config.periods[0],))
    tol = config.tolerance("toy")
    count = config.fixtures("toy")

    equiv = susy = geom_agree = embed = 0.0
    for _ in range(count):
        f = _toy_fixture(rng, grid, n_gen)
        a_comp = toy_action_component(f)
        a_super = toy_action_superfield(superfield_from_fields(f))
        equiv = max(equiv, a_comp.max_abs_diff(a_super))

        q = generator(n_gen, Q_GEN) * float(rng.normal())
        susy = max(susy, toy_invariance_residual(f, q))
        d1, d2 = toy_susy(f, q), toy_susy_geometric(f, q)
        geom_agree = max(geom_agree,
                         max(d1.phi.max_abs_diff(d2.phi), d1.psi.max_abs_diff(d2.psi)))

        xi = _odd_field(rng, grid, n_gen, [SPARE_GEN], scale=0.8)
        embed = max(embed, toy_embedding_residual(f, xi))

    # Closed-form fixture: phi = sin x, psi = cos(x) theta1 + sin(x) theta2
    # on the circle of circumference 2 pi has action pi/2 + pi theta1 theta2.
    x = grid.axis_points(0)
    f = ToyFields(
        GrassmannField(grid, n_gen, {0: np.sin(x)}),
        GrassmannField(grid, n_gen, {0b01: np.cos(x), 0b10: np.sin(x)}),
    )
    expected = unit(n_gen) * (np.pi / 2.0) \
        + generator(n_gen, 1) * generator(n_gen, 2) * np.pi
    closed = max(toy_action_component(f).max_abs_diff(expected),
                 toy_action_superfield(superfield_from_fields(f)).max_abs_diff(expected))

    return [
        CheckReport("toy-superfield-component-equivalence", equiv, tol),
        CheckReport("toy-closed-form-action", closed, tol, provenance="closed-form"),
        CheckReport("toy-susy-invariance", susy, tol),
        CheckReport("toy-susy-geometric-agreement", geom_agree, tol),
        CheckReport("toy-embedding-independence", embed, tol),
    ]


def _suite_reduction(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid(config.reduction_grid_shape, config.periods)
    tol = config.tolerance("reduction")
    coeffs = config.conventions
    geom = SurfaceGeometry.flat(grid, n_gen)
    chi0 = GravitinoField.zero(grid, n_gen)

    worst = 0.0
    for _ in range(config.fixtures("reduction")):
        fields = ComponentFields(
            phi=[_even_field(rng, grid, n_gen, scale=0.7, soul_mask=0b11)],
            psi=[_odd_spinor(rng, grid, n_gen, PSI_GENS, scale=0.6)],
            F=[_even_field(rng, grid, n_gen, scale=0.5)],
        )
        a_super = action_superfield_flat(superfield_from_components(fields), coeffs)
        a_comp = action_component(geom, chi0, fields, coeffs=coeffs)
        worst = max(worst, a_super.max_abs_diff(a_comp))

    # Classical limit: phi = sin x1, psi = chi = F = 0 on the square torus
    # of side 2 pi has Dirichlet action c1 * 2 pi^2.
    coords = grid.coordinates()
    classical_fields = ComponentFields(
        phi=[GrassmannField(grid, n_gen, {0: np.sin(coords[0])})],
        psi=[SpinorField.zero(grid, n_gen)],
        F=[GrassmannField.zero(grid, n_gen)],
    )
    a = action_component(geom, chi0, classical_fields, coeffs=coeffs)
    expected = unit(n_gen) * (coeffs.c1 * 2.0 * np.pi ** 2)
    classical = a.max_abs_diff(expected)

    # Conformal invariance of the phi sector under a Weyl rescaling.
    conformal = 0.0
    for _ in range(5):
        lam = GrassmannField(grid, n_gen, {
            0: np.exp(_trig_array(rng, grid, scale=0.3)),
            0b11: _trig_array(rng, grid, scale=0.4),
        })
        scaled = weyl(geom, lam)
        a0 = action_component(geom, chi0, classical_fields, coeffs=coeffs)
        a1 = action_component(scaled, chi0, classical_fields, coeffs=coeffs)
        conformal = max(conformal, a0.max_abs_diff(a1))

    return [
        CheckReport("reduction-superfield-component", worst, tol),
        CheckReport("reduction-classical-limit", classical,
                    config.tolerance("classical"), provenance="closed-form"),
        CheckReport("reduction-conformal-invariance", conformal,
                    config.tolerance("conformal")),
    ]


def _suite_susy2d(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid(config.grid_shape, config.periods)
    tol = config.tolerance("susy2d")
    cal_tol = config.tolerance("calibration")
    battery = build_calibration_battery(config, rng)

    cal = calibrate_conventions(battery, tolerance=cal_tol)
    cal_residual = max(susy_invariance_residual(geom, chi, fields, q, coeffs=cal)
                       for geom, chi, fields, q in battery)
    cal_match = max(abs(getattr(cal, k) - getattr(config.conventions, k))
                    for k in ("s1", "s2", "c4", "c5"))

    chi0_resid = chi_resid = 0.0
    for _ in range(config.fixtures("susy2d")):
        geom, chi, fields, q = _sigma_fixture(rng, grid, n_gen, with_chi=False)
        chi0_resid = max(chi0_resid, susy_invariance_residual(
            geom, chi, fields, q, coeffs=config.conventions))
        geom, chi, fields, q = _sigma_fixture(rng, grid, n_gen, with_chi=True)
        chi_resid = max(chi_resid, susy_invariance_residual(
            geom, chi, fields, q, coeffs=config.conventions))

    return [
        CheckReport("susy2d-calibration-residual", cal_residual, cal_tol),
        CheckReport("susy2d-calibration-matches-config", cal_match, 0.0),
        CheckReport("susy2d-invariance-chi-zero", chi0_resid, tol),
        CheckReport("susy2d-invariance-chi-nonzero", chi_resid, tol),
    ]


def _harmonic_fields(grid, n_gen, winding) -> ComponentFields:
    d = winding.shape[0]
    return ComponentFields(
        phi=[GrassmannField.zero(grid, n_gen) for _ in range(d)],
        psi=[SpinorField.zero(grid, n_gen) for _ in range(d)],
        F=[GrassmannField.zero(grid, n_gen) for _ in range(d)],
        winding=winding,
    )


def _suite_currents(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid(config.grid_shape, config.periods)
    tol = config.tolerance("currents")
    coeffs = config.conventions
    geom = SurfaceGeometry.flat(grid, n_gen)
    chi0 = GravitinoField.zero(grid, n_gen)

    # Closed form: for psi = chi = F = 0 the energy-momentum tensor is
    # dphi (x) dphi - 1/2 |dphi|^2 g.
    closed_rel = 0.0
    for _ in range(config.fixtures("currents")):
        fields = ComponentFields(
            phi=[_even_field(rng, grid, n_gen, scale=0.8)],
            psi=[SpinorField.zero(grid, n_gen)],
            F=[GrassmannField.zero(grid, n_gen)],
        )
        T = energy_momentum(geom, chi0, fields, coeffs=coeffs)
        dphi = [fields.phi_derivative(0, k) for k in range(2)]
        norm_sq = dphi[0] * dphi[0] + dphi[1] * dphi[1]
        scale = max(norm_sq.max_abs(), 1e-30)
        err = 0.0
        for a in range(2):
            for b in range(2):
                exact = dphi[a] * dphi[b] * coeffs.c1
                if a == b:
                    exact = exact - norm_sq * (0.5 * coeffs.c1)
                err = max(err, T[a][b].max_abs_diff(exact))
        closed_rel = max(closed_rel, err / scale)

    # Harmonic map (pure winding): T is trace-free, divergence-free, and
    # T_zz is antiholomorphic-derivative-free.
    winding = np.array([[1.0, 0.0], [0.5, 1.0]])
    fields = _harmonic_fields(grid, n_gen, winding)
    T = energy_momentum(geom, chi0, fields, coeffs=coeffs)
    trace = (T[0][0] + T[1][1]).max_abs()
    div = max((T[a][0].derivative(0) + T[a][1].derivative(1)).max_abs()
              for a in range(2))
    re, im = t_zz(T)
    dre, dim_ = d_zbar(re, im)
    holo = max(dre.max_abs(), dim_.max_abs())

    # Super current: J = 0 when psi = 0 (gravitino present).
    chi = GravitinoField([_odd_spinor(rng, grid, n_gen, CHI_GENS, scale=0.5)
                          for _ in range(2)])
    fields_nopsi = ComponentFields(
        phi=[_even_field(rng, grid, n_gen)],
        psi=[SpinorField.zero(grid, n_gen)],
        F=[GrassmannField.zero(grid, n_gen)],
    )
    j_zero = super_current(geom, chi, fields_nopsi, coeffs=coeffs).max_abs()

    # Critical fixture: harmonic phi (pure winding), constant psi, chi = 0.
    d = 2
    psi = [SpinorField([GrassmannField(grid, n_gen,
                                       {1 << (g - 1): np.full(grid.shape, float(rng.normal()))})
                        for g in PSI_GENS]) for _ in range(d)]
    crit = ComponentFields(
        phi=[GrassmannField.zero(grid, n_gen) for _ in range(d)],
        psi=psi,
        F=[GrassmannField.zero(grid, n_gen) for _ in range(d)],
        winding=winding,
    )
    J = super_current(geom, chi0, crit, coeffs=coeffs)
    gamma_trace = J.gamma_trace(CLIFFORD).max_abs()
    jre, jim = current_spin32(J, CLIFFORD)
    djre, djim = d_zbar(jre, jim)
    j_holo = max(djre.max_abs(), djim.max_abs())

    em_tol = config.tolerance("energy_momentum_relative")
    return [
        CheckReport("currents-energy-momentum-closed-form", closed_rel, em_tol,
                    provenance="closed-form"),
        CheckReport("currents-energy-momentum-trace", trace, tol),
        CheckReport("currents-energy-momentum-divergence", div, tol),
        CheckReport("currents-t-zz-holomorphic", holo, tol),
        CheckReport("currents-super-current-zero-at-psi-zero", j_zero, tol),
        CheckReport("currents-super-current-gamma-trace", gamma_trace, tol),
        CheckReport("currents-spin32-holomorphic", j_holo, tol),
    ]


def _suite_flow(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid(config.grid_shape, config.periods)
    geom = SurfaceGeometry.flat(grid, n_gen)
    winding = np.eye(2)
    coords = grid.coordinates()
    phi0 = []
    for _ in range(2):
        p = np.zeros(grid.shape)
        for _ in range(4):
            kx = int(rng.integers(2, 5)) * (1 if rng.integers(0, 2) else -1)
            ky = int(rng.integers(2, 5))
            p += 0.2 * rng.normal() * np.cos(kx * coords[0] + ky * coords[1]
                                             + rng.uniform(0, 2 * np.pi))
        phi0.append(p)
    result = harmonic_flow(geom, phi0, steps=config.flow_steps, dt=config.flow_dt,
                           winding=winding)
    linear_energy = harmonic_flow(geom, [np.zeros(grid.shape)] * 2, steps=0,
                                  dt=config.flow_dt, winding=winding).energies[0]
    energy_gap = abs(result.energies[-1] - linear_energy)
    return [
        CheckReport("flow-converged", 0.0 if result.converged else 1.0, 0.0),
        CheckReport("flow-final-energy", energy_gap, config.tolerance("flow_energy"),
                    provenance="closed-form"),
        CheckReport("flow-step-budget",
                    float(max(0, result.steps_taken - config.flow_steps)), 0.0),
    ]


def _suite_decompose(config: SuiteConfig, rng) -> list[CheckReport]:
    n_gen = config.n_gen
    grid = Grid((32, 32), config.periods)
    tol = config.tolerance("decompose")
    geom = SurfaceGeometry.flat(grid, n_gen)
    chi0 = GravitinoField.zero(grid, n_gen)
    count = config.fixtures("decompose")

    m_reasm = m_trace = m_div = 0.0
    g_reasm = g_trace = 0.0
    for i in range(count):
        g11 = _even_field(rng, grid, n_gen, soul_mask=0b11, cutoff=6)
        g12 = _even_field(rng, grid, n_gen, cutoff=6)
        g22 = _even_field(rng, grid, n_gen, soul_mask=0b1100, cutoff=6)
        dg = MetricDeformation([[g11, g12], [g12, g22]])
        r = decompose_metric(geom, chi0, dg)
        m_reasm = max(m_reasm, r.reassembly_residual)
        m_trace = max(m_trace, r.trace_residual)
        m_div = max(m_div, r.divergence_residual)

        dchi = GravitinoField([_odd_spinor(rng, grid, n_gen, PSI_GENS, cutoff=6),
                               _odd_spinor(rng, grid, n_gen, CHI_GENS, cutoff=6)])
        rg = decompose_gravitino(geom, chi0, dchi)
        g_reasm = max(g_reasm, rg.reassembly_residual)
        g_trace = max(g_trace, rg.gamma_trace_residual)

    dims32 = true_deformation_dimensions(geom)
    geom64 = SurfaceGeometry.flat(Grid((64, 64), config.periods), n_gen)
    dims64 = true_deformation_dimensions(geom64)
    dims_err = float(max(abs(dims32[0] - 2), abs(dims32[1] - 2)))
    stable = float(max(abs(dims32[0] - dims64[0]), abs(dims32[1] - dims64[1])))

    return [
        CheckReport("decompose-metric-reassembly", m_reasm, tol),
        CheckReport("decompose-metric-trace-free", m_trace, tol),
        CheckReport("decompose-metric-divergence-free", m_div, tol),
        CheckReport("decompose-gravitino-reassembly", g_reasm, tol),
        CheckReport("decompose-gravitino-gamma-trace-free", g_trace, tol),
        CheckReport("decompose-true-dimensions", dims_err, 0.0,
                    provenance="closed-form"),
        CheckReport("decompose-dimensions-refinement-stable", stable, 0.0),
    ]


_SUITES = {
    "grassmann": _suite_grassmann,
    "berezin": _suite_berezin,
    "toy": _suite_toy,
    "reduction": _suite_reduction,
    "susy2d": _suite_susy2d,
    "currents": _suite_currents,
    "flow": _suite_flow,
    "decompose": _suite_decompose,
}


def _suite_rng(config: SuiteConfig, name: str) -> np.random.Generator:
    return np.random.default_rng([config.seed, SUITE_NAMES.index(name)])


def run_suite(config: SuiteConfig, suite: str) -> list[CheckReport]:
    """Run one named suite (or "all") and return its check reports."""
    if suite == "all":
        out = []
        for name in SUITE_NAMES:
            out.extend(_SUITES[name](config, _suite_rng(config, name)))
        return out
    if suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from "
                         f"{SUITE_NAMES + ['all']}")
    return _SUITES[suite](config, _suite_rng(config, suite))


def calibrate(config: SuiteConfig) -> tuple[SuiteConfig, ActionCoefficients]:
    """Run the sign calibration and return (updated config, coefficients)."""
    rng = _suite_rng(config, "susy2d")
    battery = build_calibration_battery(config, rng)
    cal = calibrate_conventions(battery, tolerance=config.tolerance("calibration"))
    updated = SuiteConfig.from_dict({**config.to_dict(), "conventions": cal.to_dict()})
    return updated, cal
