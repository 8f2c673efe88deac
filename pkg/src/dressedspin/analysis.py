"""Frequency extraction, parameter scans, and ratio-curve calibration.

Scans sweep one parameter (dressing parameter xi, tuning phase, or the
transverse static field) and tabulate the Larmor frequency by every
requested method: the first-order closed form, the numeric monodromy
quasienergy, and a fit to a propagated time series.  Calibration fits the
ratio of dressed to undressed precession frequencies versus the nominal
transverse field, recovering the field-scale factor, a tilt of the applied
transverse field into z, and the dressing parameter.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from .config import DriveConfiguration, validate
from .effective import bare_precession, floquet_first_order, rectified_field
from .errors import DegenerateData, DressedSpinError, FitDiverged, NoOscillation
from .fitting import Lcg64, bisect_root, least_squares
from .propagate import (
    DEFAULT_INTEGRATOR,
    CoherenceSeries,
    IntegratorControl,
    monodromy_quasienergy,
    propagate_bloch_spin1,
    propagate_spin_half,
)
from .special import bessel_j

__all__ = [
    "FrequencyEstimate",
    "ScanSpec",
    "ScanRow",
    "ScanResult",
    "CalibrationFit",
    "extract_frequency",
    "run_scan",
    "calibrate",
    "synthetic_calibration_data",
    "J0_FIRST_ROOT",
]

# First zero of J0, located by the package's own bisection against bessel_j;
# pinned here (and re-derived in the tests) because calibration inverts J0 on
# [0, first root).
J0_FIRST_ROOT = 2.404825557695773

SWEEPABLE = ("xi", "phi", "omega0x")
METHODS = ("perturbative", "monodromy", "timeseries")


@dataclass(frozen=True)
class FrequencyEstimate:
    """Fitted precession frequency (rad/s) and its standard error."""

    omega_L: float
    stderr: float


def extract_frequency(series: CoherenceSeries) -> FrequencyEstimate:
    """Precession frequency of the sx channel: offset + amplitude*cos(Omega t).

    The sx channel carries a single spectral line, so a three-parameter
    model applies: the discrete spectrum peak seeds a nonlinear refinement.
    The series must start at the zero-phase point t = 0 (all generators in
    this package do), span at least 3 periods and resolve each period with
    at least 16 samples.
    """
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.sx, dtype=float)
    if t.size < 16:
        raise ValueError("need at least 16 samples")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValueError("series must be uniformly sampled")
    dt = float(dt[0])

    centred = y - float(np.mean(y))
    if float(np.max(np.abs(centred))) < 1e-3:
        raise NoOscillation("sx oscillation amplitude below 1e-3")
    spec = np.abs(np.fft.rfft(centred))
    if spec.size < 3:
        raise NoOscillation("series too short for a spectrum")
    k = int(np.argmax(spec[1:])) + 1
    # the peak must actually stand out against the rest of the spectrum
    others = np.delete(spec, [0, k])
    if others.size and spec[k] < 3.0 * float(np.median(others)) + 1e-30:
        raise NoOscillation("spectral peak indistinct")
    # parabolic interpolation of the peak bin
    if 1 <= k < spec.size - 1 and spec[k - 1] > 0 and spec[k + 1] > 0:
        la, lb, lc = np.log(spec[k - 1 : k + 2])
        denom = la - 2.0 * lb + lc
        shift = 0.5 * (la - lc) / denom if denom != 0.0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    omega0 = 2.0 * math.pi * (k + shift) / (t.size * dt)

    span = t[-1] - t[0]
    if span * omega0 < 3.0 * 2.0 * math.pi:
        raise ValueError("series spans fewer than 3 oscillation periods")
    if 2.0 * math.pi / omega0 < 16.0 * dt:
        raise ValueError("fewer than 16 samples per oscillation period")

    def model_residuals(params):
        c, a, om = params
        return c + a * np.cos(om * t) - y

    def model_jacobian(params):
        _, a, om = params
        cos_t = np.cos(om * t)
        return np.column_stack([np.ones_like(t), cos_t, -a * t * np.sin(om * t)])

    amp0 = float(np.max(centred) - np.min(centred)) / 2.0
    fit = least_squares(model_residuals, [float(np.mean(y)), amp0, omega0], model_jacobian)
    if not fit.converged or not np.all(np.isfinite(fit.params)):
        raise FitDiverged("offset+cosine refinement did not converge")
    omega_fit = abs(float(fit.params[2]))
    stderr = float(math.sqrt(max(fit.covariance[2, 2], 0.0)))
    return FrequencyEstimate(omega_L=omega_fit, stderr=stderr)


@dataclass(frozen=True)
class ScanSpec:
    """One swept parameter over a strictly monotone grid.

    swept: "xi" (dimensionless), "phi" (radians; requires exactly one tuning
    component), or "omega0x" (rad/s).  methods is a subset of
    {perturbative, monodromy, timeseries}.
    """

    swept: str
    grid: tuple
    base: DriveConfiguration
    methods: tuple = ("perturbative",)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(v) for v in self.grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.swept not in SWEEPABLE:
            raise ValueError(f"swept must be one of {SWEEPABLE}")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        d = np.diff(self.grid)
        if self.grid[1:] and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("grid must be strictly monotone")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.swept == "phi" and len(self.base.tuning) != 1:
            raise ValueError("phi sweep requires exactly one tuning component")
        validate(self.base)

    def config_at(self, value: float) -> DriveConfiguration:
        if self.swept == "xi":
            if value < 0.0:
                raise ValueError("xi must be >= 0")
            dres = replace(self.base.dressing, omega_d=value * self.base.dressing.omega)
            return replace(self.base, dressing=dres)
        if self.swept == "phi":
            comp = replace(self.base.tuning[0], phase=value)
            return replace(self.base, tuning=(comp,))
        static = replace(self.base.static, omega0x=value)
        return replace(self.base, static=static)


@dataclass(frozen=True)
class ScanRow:
    """One grid point: swept value, Omega_L per method (rad/s; None on error),
    diagnostics, and per-method error tokens."""

    value: float
    perturbative: float = None
    monodromy: float = None
    timeseries: float = None
    eta: float = None
    alias_ambiguous: bool = None
    p1_norm_max: float = None
    errors: tuple = ()


@dataclass(frozen=True)
class ScanResult:
    spec: ScanSpec
    rows: tuple


def _timeseries_omega(config, omega_ref, ctl):
    """Propagate long enough to resolve omega_ref and fit the sx frequency."""
    omega_ref = max(abs(omega_ref), 1e-3 * config.dressing.omega)
    t_end = 8.0 * 2.0 * math.pi / omega_ref
    samples = 256
    series = propagate_spin_half(config, t_end, samples, ctl=ctl)
    return extract_frequency(series).omega_L


def _scan_point(spec: ScanSpec, value: float, ctl: IntegratorControl):
    errors = []
    row = {"value": value}
    try:
        config = spec.config_at(value)
        validate(config)
    except (DressedSpinError, ValueError) as exc:
        return ScanRow(value=value, errors=(f"config:{type(exc).__name__}",) + tuple(errors))

    pert = None
    try:
        field = rectified_field(config)
        pert = field.omega_L
        row["eta"] = field.eta
        row["p1_norm_max"] = floquet_first_order(config).p1_norm_max
    except DressedSpinError as exc:
        errors.append(f"perturbative:{type(exc).__name__}")
    if "perturbative" in spec.methods:
        row["perturbative"] = pert

    if "monodromy" in spec.methods:
        try:
            qe = monodromy_quasienergy(config, ctl)
            row["monodromy"] = qe.omega_L_numeric
            row["alias_ambiguous"] = qe.alias_ambiguous
        except DressedSpinError as exc:
            errors.append(f"monodromy:{type(exc).__name__}")

    if "timeseries" in spec.methods:
        try:
            row["timeseries"] = _timeseries_omega(config, pert if pert else 0.0, ctl)
        except (DressedSpinError, ValueError) as exc:
            errors.append(f"timeseries:{type(exc).__name__}")

    return ScanRow(errors=tuple(errors), **row)


def _apply_branch_continuity(rows, omega, spin):
    """Resolve monodromy aliasing by continuity along the grid.

    The eigenphase fixes Omega_L only modulo the drive frequency and up to
    sign; walk the grid and replace each raw value by the alias candidate
    closest to its resolved neighbour.
    """
    step = 2.0 * omega if spin == "half" else omega
    prev = None
    out = []
    for row in rows:
        if row.monodromy is None:
            out.append(row)
            continue
        x = row.monodromy
        if prev is not None:
            best = x
            for k in range(0, 4):
                for cand in (k * step + x, (k + 1) * step - x):
                    if abs(cand - prev) < abs(best - prev):
                        best = cand
            if best != x:
                row = replace(row, monodromy=best)
        prev = row.monodromy
        out.append(row)
    return out


def run_scan(spec: ScanSpec, ctl: IntegratorControl = DEFAULT_INTEGRATOR, jobs: int = 1) -> ScanResult:
    """Evaluate every grid point by every requested method.

    Per-point failures are recorded as error tokens in the row and the scan
    continues.  Rows come back in grid order regardless of jobs; with
    methods={perturbative} the result is a pure function of the spec.
    """
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_point, [spec] * len(spec.grid), spec.grid, [ctl] * len(spec.grid)))
    else:
        rows = [_scan_point(spec, v, ctl) for v in spec.grid]
    if "monodromy" in spec.methods:
        rows = _apply_branch_continuity(rows, spec.base.dressing.omega, spec.base.spin)
    return ScanResult(spec=spec, rows=tuple(rows))


@dataclass(frozen=True)
class CalibrationFit:
    """Recovered transverse-field scale, tilt fraction into z, and dressing
    parameter, with 1-sigma errors from the fit's local curvature."""

    scale: float
    tilt: float
    xi: float
    residual_norm: float
    scale_err: float
    tilt_err: float
    xi_err: float


def _ratio_model(omega0x_nominal, omega0z, params):
    scale, tilt, xi = params
    wx = omega0x_nominal * scale
    wz = omega0z + tilt * wx
    j0 = bessel_j(0, xi)
    num = np.hypot(wx, wz * j0)
    den = np.hypot(wx, wz)
    return num, den, wx, wz, j0


def calibrate(ratio_data, omega0z: float, omega: float = None) -> CalibrationFit:
    """Fit dressed/undressed frequency ratios vs the nominal transverse field.

    ratio_data: sequence of (omega0x_nominal [rad/s], ratio) pairs; the
    zero-field point pins xi through ratio = |J0(xi)|.  omega0z is held
    fixed.  omega is accepted for interface completeness (the ratio model
    is independent of the drive frequency once xi is a parameter).

    Model: ratio(w) = Omega0(w*scale, omega0z + tilt*w*scale; xi)
                    / Omega0(w*scale, omega0z + tilt*w*scale; 0)
    with Omega0 the tuning-off precession law.  Fits with |tilt| > 0.2 are
    rejected as unphysical.
    """
    if omega is not None and not omega > 0.0:
        raise ValueError("omega must be > 0")
    data = [(float(w), float(r)) for w, r in ratio_data]
    if len(data) < 5:
        raise DegenerateData(f"need at least 5 data points, got {len(data)}")
    wx = np.array([d[0] for d in data])
    ratios = np.array([d[1] for d in data])
    if np.all(wx == wx[0]):
        raise DegenerateData("all omega0x values equal; scale and tilt are unidentifiable")
    if np.any(ratios <= 0.0):
        raise DegenerateData("ratios must be positive")

    # initial guesses: invert J0 on [0, first root) using the zero-field point
    i0 = int(np.argmin(np.abs(wx)))
    r0 = min(float(ratios[i0]), 1.0)
    if r0 >= 1.0:
        xi0 = 0.0
    else:
        xi0 = bisect_root(lambda x: bessel_j(0, x) - r0, 0.0, J0_FIRST_ROOT - 1e-9, xtol=1e-12)

    def residuals(params):
        num, den, _, _, _ = _ratio_model(wx, omega0z, params)
        return num / den - ratios

    def jacobian(params):
        scale, tilt, xi = params
        num, den, wxs, wzs, j0 = _ratio_model(wx, omega0z, params)
        j1 = bessel_j(1, xi)
        dnum_dscale = (wxs * wx + wzs * (tilt * wx) * j0 * j0) / num
        dden_dscale = (wxs * wx + wzs * (tilt * wx)) / den
        dnum_dtilt = wzs * wxs * j0 * j0 / num
        dden_dtilt = wzs * wxs / den
        dnum_dxi = -(wzs * wzs) * j0 * j1 / num
        col_scale = (dnum_dscale * den - num * dden_dscale) / (den * den)
        col_tilt = (dnum_dtilt * den - num * dden_dtilt) / (den * den)
        col_xi = dnum_dxi / den
        return np.column_stack([col_scale, col_tilt, col_xi])

    fit = least_squares(residuals, [1.0, 0.0, xi0], jacobian)
    if not fit.converged:
        raise FitDiverged(f"calibration fit did not converge after {fit.iterations} iterations")
    scale, tilt, xi = (float(v) for v in fit.params)
    xi = abs(xi)  # J0 is even; report the physical branch
    if abs(tilt) > 0.2:
        raise FitDiverged(f"fit rejected: tilt fraction {tilt:.3f} outside [-0.2, 0.2]")
    errs = np.sqrt(np.clip(np.diag(fit.covariance), 0.0, None))
    return CalibrationFit(
        scale=scale,
        tilt=tilt,
        xi=xi,
        residual_norm=fit.residual_norm,
        scale_err=float(errs[0]),
        tilt_err=float(errs[1]),
        xi_err=float(errs[2]),
    )


def synthetic_calibration_data(
    omega0x_grid,
    *,
    omega0z: float,
    xi: float,
    scale: float = 1.0,
    tilt: float = 0.0,
    noise: float = 0.0,
    seed: int = 0,
):
    """Generate (omega0x_nominal, ratio) pairs from the precession-ratio model.

    noise is the multiplicative 1-sigma level applied independently to the
    dressed and undressed synthetic frequency measurements, drawn from the
    seeded Lcg64 generator (see fitting.Lcg64); the ratio inherits both.
    """
    rng = Lcg64(seed)
    rows = []
    for w_nom in omega0x_grid:
        wx = float(w_nom) * scale
        wz = omega0z + tilt * wx
        dressed = bare_precession(wx, wz, xi)
        undressed = math.hypot(wx, wz)
        if noise:
            dressed *= 1.0 + noise * rng.normal()
            undressed *= 1.0 + noise * rng.normal()
        rows.append((float(w_nom), dressed / undressed))
    return rows
