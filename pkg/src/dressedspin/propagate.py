"""Exact time-dependent propagation, quasienergies, and analytic coherences.

The full bichromatic drive is integrated with a classical fixed-step RK4
scheme under global step-halving control: the whole calculation is repeated
with doubled step count until the result moves by less than ``rel_tol``.
No renormalisation is applied during integration -- norm drift is the error
diagnostic, not something to hide.

All drive terms share the dressing period, so the propagator over one period
(the monodromy matrix) determines the evolution at any later time exactly:
U(k*T + s) = U(s) * M^k.  Long coherence series therefore cost one period of
integration regardless of duration.
"""

from dataclasses import dataclass
import math

import numpy as np

from .config import DriveConfiguration, dimensionless
from .effective import L_X, L_Y, L_Z, PAULI_X, PAULI_Y, PAULI_Z, rectified_field
from .errors import NoConvergence, UnitarityLost

__all__ = [
    "IntegratorControl",
    "DEFAULT_INTEGRATOR",
    "CoherenceSeries",
    "QuasiEnergy",
    "propagate_spin_half",
    "propagate_bloch_spin1",
    "monodromy_quasienergy",
    "analytic_coherences",
    "propagator_at",
]

TWO_PI = 2.0 * math.pi

# Eigenphase closer than this to a branch edge (0 or pi) cannot be told
# apart from its alias.
_ALIAS_TOL = 1e-3

# Spin-1 propagation is norm-conserving physics; drift beyond this is a bug.
_BLOCH_NORM_TOL = 1e-9

_SIGMA_HALF = (-0.5j * PAULI_X, -0.5j * PAULI_Y, -0.5j * PAULI_Z)
_GEN_ONE = (L_X, L_Y, L_Z)


@dataclass(frozen=True)
class IntegratorControl:
    """Fixed-step RK4 settings and step-halving convergence policy."""

    steps_per_period: int = 512
    rel_tol: float = 1e-10
    max_refinements: int = 6
    unitarity_drift_limit: float = 1e-6

    def __post_init__(self):
        if self.steps_per_period < 64:
            raise ValueError("steps_per_period must be >= 64")
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be > 0")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")
        if not self.unitarity_drift_limit > 0.0:
            raise ValueError("unitarity_drift_limit must be > 0")


DEFAULT_INTEGRATOR = IntegratorControl()


@dataclass(frozen=True)
class CoherenceSeries:
    """Sampled spin expectation values (spin half) or magnetisation (spin one)."""

    times: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    source: str  # "analytic" | "numeric"
    degenerate_field: bool = False


@dataclass(frozen=True)
class QuasiEnergy:
    """Larmor frequency from the one-period monodromy eigenphases.

    The eigenphase determines the frequency only modulo the drive frequency
    and up to sign; alias_ambiguous marks eigenphases within 1e-3 of a
    branch edge, where the candidates merge.
    """

    omega_L_numeric: float
    alias_ambiguous: bool
    monodromy_unitarity_error: float


def _generator_stack(bundle, taus, spin):
    """dU/dtau generator A(tau) at each tau: -i H for spin half, b.L for spin one."""
    taus = np.asarray(taus, dtype=float)
    bx = np.full_like(taus, bundle.w0[0])
    by = np.full_like(taus, bundle.w0[1])
    bz = np.full_like(taus, bundle.w0[2])
    bx += bundle.xi * np.cos(taus)
    for t in bundle.tuning:
        drive = t.strength * np.cos(t.harmonic * taus + t.phase)
        if t.axis == "x":
            bx += drive
        elif t.axis == "y":
            by += drive
        else:
            bz += drive
    gx, gy, gz = _SIGMA_HALF if spin == "half" else _GEN_ONE
    return (
        bx[:, None, None] * gx[None, :, :]
        + by[:, None, None] * gy[None, :, :]
        + bz[:, None, None] * gz[None, :, :]
    )


def _integrate_targets(bundle, spin, targets, base_step):
    """RK4-propagate dU/dtau = A(tau) U from tau = 0 through ascending targets.

    Within each gap the step divides the gap evenly and never exceeds
    base_step, so every target is hit exactly.  Returns the propagator at
    each target.
    """
    dim = 2 if spin == "half" else 3
    dtype = complex if spin == "half" else float
    U = np.eye(dim, dtype=dtype)
    out = []
    prev = 0.0
    for target in targets:
        gap = target - prev
        if gap > 0.0:
            m = max(1, int(math.ceil(gap / base_step - 1e-12)))
            hs = gap / m
            t0 = prev + hs * np.arange(m)
            a0 = _generator_stack(bundle, t0, spin)
            ah = _generator_stack(bundle, t0 + 0.5 * hs, spin)
            a1 = _generator_stack(bundle, t0 + hs, spin)
            for j in range(m):
                k1 = a0[j] @ U
                k2 = ah[j] @ (U + (0.5 * hs) * k1)
                k3 = ah[j] @ (U + (0.5 * hs) * k2)
                k4 = a1[j] @ (U + hs * k3)
                U = U + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(U.copy())
        prev = target
    return out


def propagator_at(config: DriveConfiguration, tau_points, steps_per_period: int = 512):
    """Propagator of the full drive at the given ascending tau points.

    Spin model chosen by config.spin.  Utility for consistency checks; the
    high-level entry points below add step-halving convergence control.
    """
    bundle = dimensionless(config)
    pts = [float(t) for t in tau_points]
    if any(b < a for a, b in zip(pts, pts[1:])) or (pts and pts[0] < 0.0):
        raise ValueError("tau_points must be ascending and >= 0")
    return _integrate_targets(bundle, bundle.spin, pts, TWO_PI / steps_per_period)


def _sampled_series(bundle, spin, times, psi0, steps_per_period):
    """Evaluate the state at each time via the one-period factorisation."""
    omega = 1.0  # times are already in tau units here
    taus = np.asarray(times, dtype=float) * omega
    ks = np.floor(taus / TWO_PI).astype(np.int64)
    ss = taus - TWO_PI * ks
    # guard against s == 2*pi from floating roundoff
    wrap = ss >= TWO_PI
    ks[wrap] += 1
    ss[wrap] -= TWO_PI

    unique_s = np.unique(ss)
    targets = list(unique_s)
    if not targets or targets[-1] < TWO_PI:
        targets.append(TWO_PI)
    mats = _integrate_targets(bundle, spin, targets, TWO_PI / steps_per_period)
    monodromy = mats[-1]
    lookup = {s: mats[i] for i, s in enumerate(unique_s)}

    states = np.empty((len(taus), psi0.shape[0]), dtype=monodromy.dtype)
    power = np.eye(monodromy.shape[0], dtype=monodromy.dtype)
    k_cur = 0
    order = np.argsort(ks, kind="stable")
    for idx in order:
        k = int(ks[idx])
        while k_cur < k:
            power = monodromy @ power
            k_cur += 1
        states[idx] = lookup[ss[idx]] @ (power @ psi0)
    return states


def _coherences_from_states(states, spin):
    if spin == "half":
        a, b = states[:, 0], states[:, 1]
        cross = np.conj(a) * b
        sx = 2.0 * cross.real
        sy = 2.0 * cross.imag
        sz = (np.abs(a) ** 2 - np.abs(b) ** 2).real
        norms = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
        return sx, sy, sz, norms
    sx, sy, sz = states[:, 0], states[:, 1], states[:, 2]
    norms = np.sqrt(sx * sx + sy * sy + sz * sz)
    return sx, sy, sz, norms


def _propagate(config, t_end, samples, psi0, ctl, spin, norm_tol):
    """Step-halve until the sampled series settles AND the norm drift is
    within norm_tol (relative to the initial norm); long runs accumulate
    drift through the monodromy powers, so conservation is part of the
    convergence criterion rather than an afterthought."""
    if not t_end > 0.0:
        raise ValueError("t_end must be > 0")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    bundle = dimensionless(config)
    omega = config.dressing.omega
    times = np.linspace(0.0, t_end, samples)
    taus = times * omega
    norm0 = float(np.linalg.norm(psi0))

    steps = ctl.steps_per_period
    states = _sampled_series(bundle, spin, taus, psi0, steps)
    prev = np.column_stack(_coherences_from_states(states, spin)[:3])
    err = math.inf
    drift = math.inf
    for _ in range(ctl.max_refinements):
        steps *= 2
        states = _sampled_series(bundle, spin, taus, psi0, steps)
        sx, sy, sz, norms = _coherences_from_states(states, spin)
        cur = np.column_stack((sx, sy, sz))
        err = float(np.max(np.abs(cur - prev)))
        scale = max(1.0, float(np.max(np.abs(cur))))
        drift = float(np.max(np.abs(norms / norm0 - 1.0)))
        if err <= ctl.rel_tol * scale and drift <= norm_tol:
            return times, sx, sy, sz, norms
        prev = cur
    if drift > norm_tol:
        raise UnitarityLost(
            f"norm drift {drift:.3e} exceeds {norm_tol:g} after "
            f"{ctl.max_refinements} refinements ({steps} steps/period)"
        )
    raise NoConvergence(
        f"series not converged after {ctl.max_refinements} refinements "
        f"({steps} steps/period, last change {err:.3e})"
    )


def propagate_spin_half(
    config: DriveConfiguration,
    t_end: float,
    samples: int,
    initial=None,
    ctl: IntegratorControl = DEFAULT_INTEGRATOR,
) -> CoherenceSeries:
    """Integrate the two-level dynamics of the full drive and sample <sigma_j>(t).

    initial defaults to the +1 sigma_x eigenstate; any unit 2-spinor is
    accepted.  The state norm is monitored over the whole run and drift past
    ctl.unitarity_drift_limit raises UnitarityLost.
    """
    if initial is None:
        psi0 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    else:
        psi0 = np.asarray(initial, dtype=complex).reshape(2)
        if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
            raise ValueError("initial state must be a unit vector")
    times, sx, sy, sz, _ = _propagate(
        config, t_end, samples, psi0, ctl, "half", ctl.unitarity_drift_limit
    )
    return CoherenceSeries(times=times, sx=sx, sy=sy, sz=sz, source="numeric")


def propagate_bloch_spin1(
    config: DriveConfiguration,
    t_end: float,
    samples: int,
    initial=None,
    ctl: IntegratorControl = DEFAULT_INTEGRATOR,
) -> CoherenceSeries:
    """Integrate dM/dt = (drive field) x M for the spin-one magnetisation.

    Requires config.spin == "one".  |M(t)| must stay within 1e-9 relative of
    |M(0)|; larger drift raises UnitarityLost.
    """
    if config.spin != "one":
        raise ValueError("propagate_bloch_spin1 requires a spin='one' configuration")
    if initial is None:
        m0 = np.array([1.0, 0.0, 0.0])
    else:
        m0 = np.asarray(initial, dtype=float).reshape(3)
        if not np.linalg.norm(m0) > 0.0:
            raise ValueError("initial magnetisation must be nonzero")
    norm_tol = min(_BLOCH_NORM_TOL, ctl.unitarity_drift_limit)
    times, mx, my, mz, _ = _propagate(config, t_end, samples, m0, ctl, "one", norm_tol)
    return CoherenceSeries(times=times, sx=mx, sy=my, sz=mz, source="numeric")


def _quasienergy_once(bundle, spin, omega, steps):
    mono = _integrate_targets(bundle, spin, [TWO_PI], TWO_PI / steps)[0]
    gram = mono.conj().T @ mono if spin == "half" else mono.T @ mono
    unit_err = float(np.linalg.norm(gram - np.eye(gram.shape[0]), 2))
    angles = np.angle(np.linalg.eigvals(mono))
    if spin == "half":
        theta = float(np.mean(np.abs(angles)))  # phases come as ~(+t, -t)
        return theta, theta * omega / math.pi, unit_err
    theta = float(np.max(np.abs(angles)))  # spectrum {1, exp(+-i theta)}
    return theta, theta * omega / TWO_PI, unit_err


def monodromy_quasienergy(
    config: DriveConfiguration,
    ctl: IntegratorControl = DEFAULT_INTEGRATOR,
) -> QuasiEnergy:
    """Larmor frequency from the propagator over exactly one drive period.

    The dressing phase closes after one period, so the monodromy eigenphases
    +-theta give Omega_L = theta*omega/pi for spin half (half-angle rotation)
    and theta*omega/(2 pi) for spin one.  Step-halving refines until the
    extracted frequency moves by less than rel_tol * omega.
    """
    bundle = dimensionless(config)
    omega = config.dressing.omega
    steps = ctl.steps_per_period
    theta, om_prev, unit_err = _quasienergy_once(bundle, bundle.spin, omega, steps)
    for _ in range(ctl.max_refinements):
        steps *= 2
        theta, om_cur, unit_err = _quasienergy_once(bundle, bundle.spin, omega, steps)
        if abs(om_cur - om_prev) <= ctl.rel_tol * omega:
            if unit_err > ctl.unitarity_drift_limit:
                raise UnitarityLost(f"monodromy unitarity error {unit_err:.3e}")
            return QuasiEnergy(
                omega_L_numeric=om_cur,
                alias_ambiguous=(theta < _ALIAS_TOL or math.pi - theta < _ALIAS_TOL),
                monodromy_unitarity_error=unit_err,
            )
        om_prev = om_cur
    raise NoConvergence(
        f"quasienergy not converged after {ctl.max_refinements} refinements "
        f"({steps} steps/period)"
    )


def quasienergy_candidates(qe: QuasiEnergy, omega: float, spin: str = "half", k_max: int = 3):
    """All frequencies consistent with the measured eigenphase (aliasing).

    For spin half the pair {+-theta} fixes Omega_L only up to
    {x, 2*omega*k +- x}; for spin one up to {x, omega*k +- x}.
    """
    step = 2.0 * omega if spin == "half" else omega
    x = qe.omega_L_numeric
    cands = []
    for k in range(0, k_max + 1):
        for cand in (k * step + x, (k + 1) * step - x):
            if cand >= 0.0:
                cands.append(cand)
    return sorted(set(cands))


def analytic_coherences(
    config: DriveConfiguration,
    t_end: float,
    samples: int,
) -> CoherenceSeries:
    """First-order closed-form coherences for an initial +x state.

    sx carries a single precession line at Omega_L; sy and sz are modulated
    by the dressing phase phi(t) = xi*sin(omega t) and therefore carry
    harmonics of the drive as well.  The same expressions describe the
    spin-one magnetisation components for M(0) = x_hat.

    A vanishing rectified field has no precession axis: the series is
    returned frozen (sx = 1, sy = sz = 0) with degenerate_field set.
    """
    if not t_end > 0.0:
        raise ValueError("t_end must be > 0")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    field = rectified_field(config)
    xi = config.xi()
    omega = config.dressing.omega
    times = np.linspace(0.0, t_end, samples)
    if field.omega_L == 0.0:
        ones = np.ones_like(times)
        zeros = np.zeros_like(times)
        return CoherenceSeries(
            times=times, sx=ones, sy=zeros, sz=zeros, source="analytic", degenerate_field=True
        )
    ux = field.hx / field.omega_L
    uy = field.hy / field.omega_L
    uz = field.hz / field.omega_L
    phit = xi * np.sin(omega * times)
    cphi, sphi = np.cos(phit), np.sin(phit)
    cl, sl = np.cos(field.omega_L * times), np.sin(field.omega_L * times)
    one_m_cl = 1.0 - cl
    sx = (1.0 - ux * ux) * cl + ux * ux
    sy = (uy * sphi + uz * cphi) * sl + ux * (uy * cphi - uz * sphi) * one_m_cl
    sz = (uz * sphi - uy * cphi) * sl + ux * (uz * cphi + uy * sphi) * one_m_cl
    return CoherenceSeries(times=times, sx=sx, sy=sy, sz=sz, source="analytic")
