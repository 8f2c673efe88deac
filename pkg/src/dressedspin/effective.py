"""First-order rectified field, Larmor frequency, and Floquet matrices.

The one-period average of the interaction-picture generator gives a static
effective field h (in energy units): the x component passes through
unattenuated, the y and z components get Bessel-weighted contributions from
the static field and from each tuning component according to the parity of
its harmonic.  |h| is the observable Larmor precession frequency.

Parity rule for a tuning component of amplitude A, harmonic m, phase Ph:
    on y:  adds J_m(xi)*A*cos(Ph) to h_y when m is even,
           adds J_m(xi)*A*sin(Ph) to h_z when m is odd;
    on z:  adds J_m(xi)*A*cos(Ph) to h_z when m is even,
           subtracts J_m(xi)*A*sin(Ph) from h_y when m is odd;
    on x:  no first-order contribution (the component commutes with the
           dressing rotation and has zero period average for m >= 1);
           it still enters the periodic part P1 and the exact dynamics.

Each rule follows from the period average of the rotated drive; the tests
check all parity cells against direct quadrature of the generator.
"""

from dataclasses import dataclass
import math

import numpy as np

from .config import DriveConfiguration, dimensionless
from .special import SeriesControl, DEFAULT_SERIES, bessel_j, f_aux

__all__ = [
    "EffectiveField",
    "FloquetFirstOrder",
    "rectified_field",
    "larmor_frequency",
    "bare_precession",
    "floquet_first_order",
    "perturbative_eta",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "L_X",
    "L_Y",
    "L_Z",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Cartesian rotation generators: (B . L) M = B x M.
L_X = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
L_Y = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
L_Z = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


@dataclass(frozen=True)
class EffectiveField:
    """Rectified field components in energy units (rad/s) and its modulus.

    eta is the perturbative-validity diagnostic max(|omega0_j|, amplitudes)/omega;
    first-order results are trustworthy for eta well below the dressing
    strength (the CLI warns above 0.3).
    """

    hx: float
    hy: float
    hz: float
    omega_L: float
    eta: float

    @classmethod
    def from_components(cls, hx, hy, hz, eta):
        return cls(hx=hx, hy=hy, hz=hz, omega_L=math.sqrt(hx * hx + hy * hy + hz * hz), eta=eta)


@dataclass(frozen=True)
class FloquetFirstOrder:
    """First-order Floquet matrix (dimensionless, in units of omega) and the
    maximum spectral norm of the periodic part P1 over the requested grid."""

    lambda1: np.ndarray
    p1_norm_max: float
    spin: str
    omega: float

    def omega_L_from_spectrum(self) -> float:
        """Larmor frequency recovered from the Lambda1 spectrum (rad/s)."""
        eig = np.linalg.eigvals(self.lambda1)
        if self.spin == "half":
            # Hermitian, eigenvalues +-Omega_L/(2 omega)
            return 2.0 * self.omega * float(np.max(eig.real))
        # real antisymmetric generator, eigenvalues {0, +-i Omega_L/omega}
        return self.omega * float(np.max(np.abs(eig.imag)))


def perturbative_eta(config: DriveConfiguration) -> float:
    """max(|omega0_j|/omega, tuning amplitudes/omega) validity diagnostic."""
    b = dimensionless(config)
    vals = [abs(v) for v in b.w0] + [t.strength for t in b.tuning]
    return max(vals) if vals else 0.0


def rectified_field(config: DriveConfiguration) -> EffectiveField:
    """First-order rectified field h of a validated configuration (rad/s).

    Works directly in angular-frequency units so the undressed x component
    is returned bit-for-bit equal to omega0x.
    """
    b = dimensionless(config)  # validates; xi and eta come from here
    j0 = bessel_j(0, b.xi)
    hx = config.static.omega0x
    hy = j0 * config.static.omega0y
    hz = j0 * config.static.omega0z
    for comp in config.tuning:
        if comp.amplitude == 0.0:
            continue
        jm = bessel_j(int(comp.harmonic), b.xi)
        even = comp.harmonic % 2 == 0
        if comp.axis == "y":
            if even:
                hy += jm * comp.amplitude * math.cos(comp.phase)
            else:
                hz += jm * comp.amplitude * math.sin(comp.phase)
        elif comp.axis == "z":
            if even:
                hz += jm * comp.amplitude * math.cos(comp.phase)
            else:
                hy -= jm * comp.amplitude * math.sin(comp.phase)
        # axis == "x": zero period average, nothing to add
    eta = max([abs(v) for v in b.w0] + [t.strength for t in b.tuning], default=0.0)
    return EffectiveField.from_components(hx, hy, hz, eta)


def larmor_frequency(config: DriveConfiguration) -> float:
    """|h| >= 0, the effective Larmor precession frequency (rad/s).

    For omega0x = omega0y = 0 with a single y-axis tuning component this
    reduces to |omega0z*J0 + A*J_p*sin(Phi)| (p odd) or
    sqrt((A*J_p*cos(Phi))^2 + (omega0z*J0)^2) (p even).  Signed projections
    are available from the EffectiveField components.
    """
    return rectified_field(config).omega_L


def bare_precession(omega0x: float, omega0z: float, xi: float) -> float:
    """Precession frequency with the tuning off: sqrt(w0x^2 + w0z^2 J0(xi)^2)."""
    return math.hypot(omega0x, omega0z * bessel_j(0, xi))


def _p1_vector(bundle, tau, ctl: SeriesControl):
    """Cartesian components of the periodic part P1 at tau, in units of omega."""
    w0x, w0y, w0z = bundle.w0
    vx = 0.0
    vy = w0y * f_aux(1, tau, bundle.xi, ctl=ctl) + w0z * f_aux(2, tau, bundle.xi, ctl=ctl)
    vz = -w0y * f_aux(2, tau, bundle.xi, ctl=ctl) + w0z * f_aux(1, tau, bundle.xi, ctl=ctl)
    for t in bundle.tuning:
        if t.axis == "x":
            m = t.harmonic
            vx += t.strength * (math.sin(m * tau + t.phase) - math.sin(t.phase)) / m
        elif t.axis == "y":
            vy += t.strength * f_aux(3, tau, bundle.xi, t.harmonic, t.phase, ctl)
            vz -= t.strength * f_aux(4, tau, bundle.xi, t.harmonic, t.phase, ctl)
        else:
            vy += t.strength * f_aux(4, tau, bundle.xi, t.harmonic, t.phase, ctl)
            vz += t.strength * f_aux(3, tau, bundle.xi, t.harmonic, t.phase, ctl)
    return vx, vy, vz


def floquet_first_order(
    config: DriveConfiguration,
    tau_grid=None,
    ctl: SeriesControl = DEFAULT_SERIES,
) -> FloquetFirstOrder:
    """Lambda1 built from the rectified field, plus the max norm of P1.

    For spin half Lambda1 = h.sigma/(2 omega) (Hermitian); for spin one it is
    the rotation generator h.L/omega.  P1 is evaluated on tau_grid (default:
    129 points over one period) from the periodic remainders f1..f4, and its
    largest spectral norm is returned as a size diagnostic for the
    exp(-i P1) ~ identity approximation.

    When every field vanishes, Lambda1 = 0: its eigenbasis is unspecified
    (there is no precession axis), only the zero eigenvalues are meaningful.
    """
    b = dimensionless(config)
    field = rectified_field(config)
    w = config.dressing.omega
    hx, hy, hz = field.hx / w, field.hy / w, field.hz / w
    if b.spin == "half":
        lambda1 = 0.5 * (hx * PAULI_X + hy * PAULI_Y + hz * PAULI_Z)
    else:
        lambda1 = hx * L_X + hy * L_Y + hz * L_Z

    if tau_grid is None:
        tau_grid = np.linspace(0.0, 2.0 * math.pi, 129)
    p1_max = 0.0
    for tau in np.asarray(tau_grid, dtype=float):
        vx, vy, vz = _p1_vector(b, float(tau), ctl)
        if b.spin == "half":
            mat = 0.5 * (vx * PAULI_X + vy * PAULI_Y + vz * PAULI_Z)
        else:
            mat = vx * L_X + vy * L_Y + vz * L_Z
        p1_max = max(p1_max, float(np.linalg.norm(mat, 2)))
    return FloquetFirstOrder(lambda1=lambda1, p1_norm_max=p1_max, spin=b.spin, omega=w)
