"""Plane-wave scattering by planar electrostatic steps and barriers.

Stationary Dirac waves in a piecewise-constant potential V(x) split into
spin-up and spin-down channels that never mix, and each channel reduces
to 2x2 linear algebra over the commutative ring of "phase scalars"
a + b j, where j acts on a spinor by right multiplication with i sig3.
This module builds the travelling, evanescent and Klein-regime waves of
each region, matches them across boundaries, and carries the standard
closed forms: step and barrier coefficients at perpendicular incidence,
the spin precession acquired under total reflection, the first-order
Coulomb amplitude with its cross-section and spin rotor, and the
pair-production rate of a supercritical step.  A boundary-integral
propagator reconstructs interior values of stationary waves from their
values on a closed surface.

Geometry: the potential varies along x only and the beam lies in the
x-y plane, so p_y is conserved and the refraction law
sinh(u) sin(phi) = p_y / m links all travelling regions.  Every wave is
an even element of the Pauli algebra (the same (..., 8) layout as
`stakit.spinors`), normalised so that the boost factor is a unit rotor;
amplitudes multiply from the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Multivector
from .spinors import (
    ISP3,
    ONE3,
    SIG3,
    pauli_field_bar,
    pauli_field_product,
    pauli_field_right_j,
    pauli_field_vector,
)
from .sta import GAMMA, four_vector
from .units import FINE_STRUCTURE

__all__ = [
    "REGIME_TRAVELLING",
    "REGIME_EVANESCENT",
    "REGIME_KLEIN",
    "SPIN_UP",
    "SPIN_DOWN",
    "FORWARD",
    "BACKWARD",
    "KLEIN_OUTGOING",
    "KLEIN_INCOMING",
    "PhaseScalar",
    "RegionSpec",
    "classify_region",
    "wave_at",
    "wave_parts",
    "wave_gradient",
    "stationary_residual",
    "wave_current",
    "MatchMatrix2",
    "match_matrix",
    "propagator",
    "interface_solve",
    "ChainResult",
    "chain_solve",
    "step_coefficients",
    "closed_step_perpendicular",
    "closed_barrier_perpendicular",
    "closed_klein_step",
    "reflection_precession",
    "BornResult",
    "born_coulomb",
    "mott_cross_section",
    "mott_precession",
    "feynman_kernel",
    "klein_pair_rate",
    "helmholtz_kernel",
    "sphere_mesh",
    "huygens_propagate",
]

REGIME_TRAVELLING = "travelling"
REGIME_EVANESCENT = "evanescent"
REGIME_KLEIN = "klein"

SPIN_UP = "up"
SPIN_DOWN = "down"

#: Wave-family tokens: FORWARD waves carry current in +x (for evanescent
#: regions they decay towards +x), BACKWARD waves are their partners.
FORWARD = "forward"
BACKWARD = "backward"

#: Boundary conditions in a Klein region.  "outgoing" matches onto the
#: wave whose current leaves the barrier (|r| <= 1); "incoming" is the
#: textbook group-velocity choice, which yields |r| > 1.
KLEIN_OUTGOING = "outgoing"
KLEIN_INCOMING = "incoming"

_J = ISP3[3]


# ----------------------------------------------------------------------
# the phase ring


@dataclass(frozen=True)
class PhaseScalar:
    """An element a + b j of the ring generated by j = i sig3.

    Reflection/transmission amplitudes, matching-matrix entries and slab
    phases all live in this ring, which acts on waves by right
    multiplication and is isomorphic to the complex numbers (conjugation
    flips ``im``).  Keeping a dedicated scalar type rather than a width-1
    multivector makes chain assembly cheap and keeps conjugation - which
    is where the spin-down sector differs - explicit.
    """

    re: float
    im: float = 0.0

    @classmethod
    def from_complex(cls, z: complex) -> "PhaseScalar":
        z = complex(z)
        return cls(z.real, z.imag)

    @classmethod
    def exp_j(cls, angle: float) -> "PhaseScalar":
        """Unit phase e^{j angle}."""
        return cls(math.cos(angle), math.sin(angle))

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def to_multivector(self) -> Multivector:
        """The same element as an even Pauli multivector."""
        return ONE3 * self.re + _J * self.im

    def conjugate(self) -> "PhaseScalar":
        return PhaseScalar(self.re, -self.im)

    def arg(self) -> float:
        return math.atan2(self.im, self.re)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __neg__(self) -> "PhaseScalar":
        return PhaseScalar(-self.re, -self.im)

    def __add__(self, other):
        other = _as_phase(other)
        if other is None:
            return NotImplemented
        return PhaseScalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_phase(other)
        if other is None:
            return NotImplemented
        return PhaseScalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_phase(other)
        if other is None:
            return NotImplemented
        return PhaseScalar(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _as_phase(other)
        if other is None:
            return NotImplemented
        return PhaseScalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_phase(other)
        if other is None:
            return NotImplemented
        return PhaseScalar.from_complex(self.to_complex() / other.to_complex())

    def __rtruediv__(self, other):
        other = _as_phase(other)
        if other is None:
            return NotImplemented
        return PhaseScalar.from_complex(other.to_complex() / self.to_complex())


def _as_phase(value) -> PhaseScalar | None:
    if isinstance(value, PhaseScalar):
        return value
    if isinstance(value, (int, float)):
        return PhaseScalar(float(value), 0.0)
    return None


# ----------------------------------------------------------------------
# region classification


@dataclass(frozen=True)
class RegionSpec:
    """One constant-potential slab together with its derived wave data.

    Instances are built by `classify_region`.  ``e_prime`` is the local
    energy E - eV; comparing |e_prime| against sqrt(p_y^2 + m^2) selects
    the regime, and the fields that do not apply to a regime are None:

    * travelling (e_prime above the gap): momentum ``p``, its x-component
      ``p_x``, incidence angle ``phi`` and rapidity ``u`` with
      tanh(u/2) = p/(e_prime + m);
    * evanescent (inside the gap): decay constant ``kappa`` and the two
      half-rapidities ``u_plus``/``u_minus`` with
      tanh(u±/2) = (p_y ± kappa)/(e_prime + m);
    * klein (below the gap): ``p``, ``p_x``, ``phi`` and ``u`` with
      tanh(u/2) = p/(m - e_prime).

    ``marginal`` flags the measure-zero boundary |e_prime| = threshold,
    which is classified evanescent with kappa = 0 (its matching matrix is
    singular, so chains through it fail with a clear error).  The
    evanescent rapidities are real only while |p_y ± kappa| < e_prime + m
    (equivalently e_prime > |p_y|); past that - e.g. in any barrier taller
    than the energy - u_plus/u_minus are NaN, but the waves and matching
    matrices remain well defined through the unnormalised structure pair
    (e_prime + m, p_y ± kappa), which is what the module actually uses.
    Only the lightlike lines e_prime = ±p_y are genuinely singular.
    """

    energy: float
    potential: float
    p_y: float
    mass: float
    regime: str
    e_prime: float
    marginal: bool = False
    p: float | None = None
    p_x: float | None = None
    phi: float | None = None
    u: float | None = None
    kappa: float | None = None
    u_plus: float | None = None
    u_minus: float | None = None

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.regime not in (REGIME_TRAVELLING, REGIME_EVANESCENT, REGIME_KLEIN):
            raise ValueError(f"unknown regime {self.regime!r}")


def classify_region(
    energy: float, potential: float, p_y: float = 0.0, mass: float = 1.0
) -> RegionSpec:
    """Sort a slab into travelling/evanescent/klein and derive its parameters.

    The regime boundary is |E - eV| = sqrt(p_y^2 + m^2): above it (local
    energy dominating) waves travel, below the negative edge the Klein
    regime starts, and in between waves decay.  Exact boundary hits are
    returned as evanescent with ``kappa = 0`` and ``marginal = True``.
    """
    if mass <= 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    e_prime = energy - potential
    thr2 = p_y * p_y + mass * mass
    disc = thr2 - e_prime * e_prime  # positive inside the gap
    tol = 1e-12 * thr2
    common = dict(energy=energy, potential=potential, p_y=p_y, mass=mass, e_prime=e_prime)

    if disc > tol:
        kappa = math.sqrt(disc)
        den = e_prime + mass
        with np.errstate(invalid="ignore", divide="ignore"):
            u_plus = float(2.0 * np.arctanh((p_y + kappa) / den)) if den != 0.0 else math.nan
            u_minus = float(2.0 * np.arctanh((p_y - kappa) / den)) if den != 0.0 else math.nan
        return RegionSpec(
            regime=REGIME_EVANESCENT, kappa=kappa, u_plus=u_plus, u_minus=u_minus, **common
        )
    if disc < -tol:
        p = math.sqrt(e_prime * e_prime - mass * mass)
        p_x = math.sqrt(-disc)
        phi = math.atan2(p_y, p_x)
        if e_prime > 0.0:
            return RegionSpec(
                regime=REGIME_TRAVELLING,
                p=p,
                p_x=p_x,
                phi=phi,
                u=math.asinh(p / mass),
                **common,
            )
        return RegionSpec(
            regime=REGIME_KLEIN, p=p, p_x=p_x, phi=phi, u=math.asinh(p / mass), **common
        )
    # |e_prime| sits on the gap edge: a marginal, zero-decay evanescent slab.
    den = e_prime + mass
    with np.errstate(invalid="ignore", divide="ignore"):
        u_edge = float(2.0 * np.arctanh(p_y / den)) if den != 0.0 else math.nan
    return RegionSpec(
        regime=REGIME_EVANESCENT,
        marginal=True,
        kappa=0.0,
        u_plus=u_edge,
        u_minus=u_edge,
        **common,
    )


# ----------------------------------------------------------------------
# the waves themselves


def _check_spin(spin: str) -> None:
    if spin not in (SPIN_UP, SPIN_DOWN):
        raise ValueError(f"spin must be {SPIN_UP!r} or {SPIN_DOWN!r}, got {spin!r}")


def _check_direction(direction: str) -> None:
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}, got {direction!r}")


def _evan_coeffs(region: RegionSpec, which: float) -> tuple[float, float]:
    """Structure coefficients (c, s) of the e^{-which kappa x} evanescent wave.

    The wave structure is c + s sig2 with (c, s) proportional to
    (e_prime + m, p_y + which * kappa).  In the ordinary domain
    |p_y ± kappa| < e_prime + m this normalises to the unit boost
    (cosh(u/2), sinh(u/2)); outside it the same pair is normalised by
    sqrt(|c^2 - s^2|) instead, a real continuation that keeps every
    matrix column finite.  The lightlike case c = ±s has no such wave.
    """
    num = region.p_y + which * region.kappa
    den = region.e_prime + region.mass
    n2 = den * den - num * num
    if abs(n2) <= 1e-28 * (den * den + num * num):
        raise ValueError(
            "evanescent wave structure is lightlike (e_prime = +/- p_y); "
            "no normalisable wave exists on this line"
        )
    nrm = math.sqrt(abs(n2))
    return den / nrm, num / nrm


def _wave_parts(region: RegionSpec, spin: str, direction: str):
    """Boost structure, signed phase momentum q_x and real decay rate.

    The wave is  structure * e^{-j (E t - q_x x - p_y y)} * e^{-decay x}.
    """
    fwd = direction == FORWARD
    if region.regime == REGIME_TRAVELLING:
        c, s = math.cosh(0.5 * region.u), math.sinh(0.5 * region.u)
        sign = 1.0 if fwd else -1.0
        boost = ONE3 * c + (
            SIG3[1] * (sign * math.cos(region.phi)) + SIG3[2] * math.sin(region.phi)
        ) * s
        q_x, decay = sign * region.p_x, 0.0
    elif region.regime == REGIME_EVANESCENT:
        # Decaying spin-up and growing spin-down waves use the u_plus
        # structure; the other two use u_minus.
        use_minus = (spin == SPIN_DOWN) == fwd
        c, s = _evan_coeffs(region, -1.0 if use_minus else 1.0)
        boost = ONE3 * c + SIG3[2] * s
        q_x = 0.0
        decay = region.kappa if fwd else -region.kappa
    else:  # Klein regime
        c, s = math.cosh(0.5 * region.u), math.sinh(0.5 * region.u)
        sign = 1.0 if fwd else -1.0
        boost = (
            ONE3 * c
            + (SIG3[1] * (sign * math.cos(region.phi)) - SIG3[2] * math.sin(region.phi)) * s
        ) * SIG3[1]
        q_x, decay = -sign * region.p_x, 0.0
    if spin == SPIN_DOWN:
        boost = boost * (ISP3[2] * -1.0)
    return boost, q_x, decay


def _wave_with_parts(region, spin, direction, x, y, t, amplitude):
    boost, q_x, decay = _wave_parts(region, spin, direction)
    s = region.energy * t - q_x * x - region.p_y * y
    amp = amplitude if isinstance(amplitude, PhaseScalar) else PhaseScalar(float(amplitude))
    phase = PhaseScalar.exp_j(-s) * amp
    psi = boost * phase.to_multivector()
    if decay != 0.0:
        psi = psi * math.exp(-decay * x)
    return psi, q_x, decay


def wave_at(
    region: RegionSpec,
    spin: str = SPIN_UP,
    direction: str = FORWARD,
    x: float = 0.0,
    y: float = 0.0,
    t: float = 0.0,
    amplitude: PhaseScalar | float = 1.0,
) -> Multivector:
    """Evaluate one basis wave of a region at a spacetime point.

    Travelling waves are unit boosts times plane phases, evanescent waves
    decay (FORWARD) or grow (BACKWARD) along x, and Klein waves are the
    pair with outward current obtained by flipping the sign of p_x in the
    phase relative to the boost.  Spin-down waves carry a trailing
    -i sig2.  The result satisfies the stationary equation
    (E - eV) psi = -grad(psi) i sig3 + m bar(psi); `stationary_residual`
    evaluates the left-minus-right side directly.
    """
    _check_spin(spin)
    _check_direction(direction)
    return _wave_with_parts(region, spin, direction, x, y, t, amplitude)[0]


def wave_parts(
    region: RegionSpec,
    spin: str = SPIN_UP,
    direction: str = FORWARD,
) -> tuple[Multivector, float, float]:
    """Split a basis wave into its structure and phase data.

    Returns ``(structure, q_x, decay)`` such that the wave of `wave_at`
    equals ``structure * exp(-j (E t - q_x x - p_y y)) * exp(-decay x)``.
    Superposition code uses this to evaluate many modes at once: the
    structure is a constant multivector, and everything position- or
    time-dependent lives in the scalar factors.
    """
    _check_spin(spin)
    _check_direction(direction)
    return _wave_parts(region, spin, direction)


def wave_gradient(
    region: RegionSpec,
    spin: str = SPIN_UP,
    direction: str = FORWARD,
    x: float = 0.0,
    y: float = 0.0,
    t: float = 0.0,
    amplitude: PhaseScalar | float = 1.0,
) -> Multivector:
    """Spatial vector derivative sig_k d_k of a basis wave, analytically."""
    _check_spin(spin)
    _check_direction(direction)
    psi, q_x, decay = _wave_with_parts(region, spin, direction, x, y, t, amplitude)
    psi_j = psi * _J
    dx_psi = psi_j * q_x - psi * decay
    dy_psi = psi_j * region.p_y
    return SIG3[1] * dx_psi + SIG3[2] * dy_psi


def stationary_residual(
    region: RegionSpec,
    spin: str = SPIN_UP,
    direction: str = FORWARD,
    x: float = 0.0,
    y: float = 0.0,
    t: float = 0.0,
    amplitude: PhaseScalar | float = 1.0,
) -> Multivector:
    """(E - eV) psi + grad(psi) i sig3 - m bar(psi); zero for exact waves."""
    psi = wave_at(region, spin, direction, x, y, t, amplitude)
    grad = wave_gradient(region, spin, direction, x, y, t, amplitude)
    return psi * region.e_prime + grad * _J - psi.grade_involution() * region.mass


def wave_current(psi: Multivector) -> Multivector:
    """Observer-frame current of a wave value: scalar J^0 plus vector J.

    Computed as psi times its spatial reversion.  For a unit travelling
    wave this gives J^0 = cosh(u) = E'/m and |J| = sinh(u); a Klein
    forward wave returns J^0 = -E'/m > 0 with the current along +x, and a
    single evanescent wave carries no x-current at all.
    """
    return psi * psi.reverse()


# ----------------------------------------------------------------------
# matching matrices and chains


@dataclass(frozen=True)
class MatchMatrix2:
    """A 2x2 matrix over the phase ring, acting on (T, R) amplitude pairs.

    ``kind`` records the provenance: "A" (travelling), "B+"/"B-"
    (evanescent, spin up/down), "C" (Klein), "P_travel"/"P_evanescent"
    (slab propagators) or "interface" (a solved boundary relation).  The
    A and C matrices are invertible whenever cos(phi) != 0 and u != 0;
    the B matrices whenever kappa != 0.
    """

    kind: str
    entries: tuple[tuple[PhaseScalar, PhaseScalar], tuple[PhaseScalar, PhaseScalar]]

    @classmethod
    def from_complex(cls, kind: str, mat) -> "MatchMatrix2":
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {mat.shape}")
        rows = tuple(
            tuple(PhaseScalar(mat[i, k].real, mat[i, k].imag) for k in (0, 1)) for i in (0, 1)
        )
        return cls(kind, rows)

    def to_complex(self) -> np.ndarray:
        return np.array(
            [[e.to_complex() for e in row] for row in self.entries], dtype=complex
        )

    def det(self) -> PhaseScalar:
        e = self.entries
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]

    def apply(self, pair) -> tuple[PhaseScalar, PhaseScalar]:
        """Multiply onto an amplitude pair (T, R)."""
        t, r = (_as_phase(pair[0]), _as_phase(pair[1]))
        e = self.entries
        return (e[0][0] * t + e[0][1] * r, e[1][0] * t + e[1][1] * r)


def _match_complex(region: RegionSpec, spin: str, klein_convention: str) -> tuple[str, np.ndarray]:
    if region.regime == REGIME_TRAVELLING:
        c, s = math.cosh(0.5 * region.u), math.sinh(0.5 * region.u)
        e = complex(math.cos(region.phi), math.sin(region.phi))
        mat = np.array([[c, c], [s * e, -s * e.conjugate()]], dtype=complex)
        kind = "A"
    elif region.regime == REGIME_EVANESCENT:
        cp, sp = _evan_coeffs(region, 1.0)
        cm, sm = _evan_coeffs(region, -1.0)
        if spin == SPIN_UP:
            return "B+", np.array([[cp, cm], [1j * sp, 1j * sm]], dtype=complex)
        # Spin-down columns follow from the down waves directly: decaying
        # uses u_minus, growing uses u_plus, and the sig2 component picks
        # up -j instead of +j when moved through the trailing -i sig2.
        return "B-", np.array([[cm, cp], [-1j * sm, -1j * sp]], dtype=complex)
    else:
        c, s = math.cosh(0.5 * region.u), math.sinh(0.5 * region.u)
        e = complex(math.cos(region.phi), math.sin(region.phi))
        mat = np.array([[s * e, -s * e.conjugate()], [c, c]], dtype=complex)
        if klein_convention == KLEIN_INCOMING:
            mat = mat[:, ::-1]
        kind = "C"
    if spin == SPIN_DOWN:
        mat = mat.conjugate()
    return kind, mat


def match_matrix(
    region: RegionSpec,
    spin: str = SPIN_UP,
    *,
    klein_convention: str = KLEIN_OUTGOING,
) -> MatchMatrix2:
    """Boundary matrix collecting the wave structure of one region.

    Columns correspond to the (FORWARD, BACKWARD) amplitudes; rows are
    the two spinor structure components that must match across a
    boundary.  For spin down the travelling and Klein matrices are the
    complex conjugates of the spin-up ones, and the evanescent matrix
    additionally swaps u_plus with u_minus ("B-").  With
    ``klein_convention="incoming"`` the Klein columns are swapped, which
    reproduces the textbook group-velocity matching (and |r| > 1).
    """
    _check_spin(spin)
    _check_klein_convention(klein_convention)
    kind, mat = _match_complex(region, spin, klein_convention)
    return MatchMatrix2.from_complex(kind, mat)


def _check_klein_convention(klein_convention: str) -> None:
    if klein_convention not in (KLEIN_OUTGOING, KLEIN_INCOMING):
        raise ValueError(f"unknown klein convention {klein_convention!r}")


def propagator(
    region: RegionSpec, width: float, *, klein_convention: str = KLEIN_OUTGOING
) -> MatchMatrix2:
    """Diagonal matrix moving boundary-local amplitudes across one slab.

    For a slab of the given width the local (T, R) pair at its left
    boundary equals this matrix times the pair at its right boundary:
    diag(e^{-j p_x d}, e^{j p_x d}) for travelling slabs (the forward
    wave carries phase e^{j p_x x}, so moving its reference point left
    unwinds it), the complex conjugate for outgoing-Klein slabs, and
    diag(e^{kappa d}, e^{-kappa d}) for evanescent ones.  The growing
    entry overflows to inf near kappa*d ~ 700; `chain_solve` rescales
    internally and stays finite, so prefer it for deep barriers.
    Propagators are the same for both spins.
    """
    _check_klein_convention(klein_convention)
    if not (width >= 0.0 and math.isfinite(width)):
        raise ValueError(f"width must be finite and nonnegative, got {width}")
    if region.regime == REGIME_EVANESCENT:
        grow = np.exp(region.kappa * width)
        return MatchMatrix2.from_complex(
            "P_evanescent", np.diag([grow, np.exp(-region.kappa * width)])
        )
    q = region.p_x * width
    if not (region.regime == REGIME_KLEIN and klein_convention == KLEIN_OUTGOING):
        q = -q
    phase = complex(math.cos(q), math.sin(q))
    return MatchMatrix2.from_complex("P_travel", np.diag([phase, phase.conjugate()]))


def _solve2(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    if not (np.isfinite(det) and abs(det) > 1e-300):
        raise ValueError(
            "singular matching matrix: grazing incidence (cos phi = 0), zero rapidity, "
            "or a marginal (kappa = 0) region"
        )
    return np.array(
        [
            (mat[1, 1] * rhs[0] - mat[0, 1] * rhs[1]) / det,
            (mat[0, 0] * rhs[1] - mat[1, 0] * rhs[0]) / det,
        ]
    )


def interface_solve(
    left: RegionSpec,
    right: RegionSpec,
    spin: str = SPIN_UP,
    *,
    klein_convention: str = KLEIN_OUTGOING,
) -> MatchMatrix2:
    """Relation (T, R)_left = S (T, R)_right at a shared boundary.

    Amplitudes are boundary-local (phases referenced to the interface).
    Raises ValueError when the left matrix is singular, i.e. at grazing
    incidence or zero rapidity.
    """
    _check_spin(spin)
    _, ml = _match_complex(left, spin, klein_convention)
    _, mr = _match_complex(right, spin, klein_convention)
    cols = np.column_stack([_solve2(ml, mr[:, 0]), _solve2(ml, mr[:, 1])])
    return MatchMatrix2.from_complex("interface", cols)


@dataclass(frozen=True)
class ChainResult:
    """Solved amplitudes of a layered chain, normalised to unit incidence.

    ``r`` and ``t`` follow the convention that the last boundary sits at
    x = 0 and all amplitudes are referenced there, so a single step gives
    boundary-local coefficients and a barrier of width d carries the
    usual e^{-j d p_x} transit phase in t.  ``flux_ratio`` is the
    x-current per unit squared amplitude of the exit wave relative to
    the incident one (p_x_out/p_x_in for travelling or outgoing-Klein
    exits, negative for incoming-Klein, zero for an evanescent tail), so
    that |r|^2 + flux_ratio |t|^2 = 1.  ``amplitudes`` holds the global
    (T, R) pair of every region; for deep evanescent slabs the growing
    entry may overflow to inf even though r and t remain finite.
    """

    r: PhaseScalar
    t: PhaseScalar
    flux_ratio: float
    amplitudes: tuple[tuple[PhaseScalar, PhaseScalar], ...]

    @property
    def reflectance(self) -> float:
        return abs(self.r) ** 2

    @property
    def transmittance(self) -> float:
        return self.flux_ratio * abs(self.t) ** 2

    @property
    def flux_defect(self) -> float:
        return abs(1.0 - self.reflectance - self.transmittance)


def chain_solve(
    regions,
    widths=(),
    spin: str = SPIN_UP,
    *,
    klein_convention: str = KLEIN_OUTGOING,
) -> ChainResult:
    """Match a travelling wave through a chain of constant-potential slabs.

    ``regions`` lists the semi-infinite incident region, the interior
    slabs in order, and the semi-infinite exit region; ``widths`` gives
    the interior thicknesses (so len(regions) == len(widths) + 2).  All
    regions must share energy, p_y and mass.  The incident region must be
    travelling; the exit region may be travelling, Klein or evanescent
    (total reflection).  Growing evanescent factors are pulled out of the
    linear algebra slab by slab, so chains with kappa*d of several
    hundred solve without overflow (t underflows gracefully to 0).
    """
    _check_spin(spin)
    _check_klein_convention(klein_convention)
    regions = tuple(regions)
    widths = tuple(float(w) for w in widths)
    n = len(regions)
    if n < 2:
        raise ValueError("a chain needs at least two regions")
    if len(widths) != n - 2:
        raise ValueError(f"expected {n - 2} widths for {n} regions, got {len(widths)}")
    for w in widths:
        if not (w >= 0.0 and math.isfinite(w)):
            raise ValueError(f"slab widths must be finite and nonnegative, got {w}")
    first = regions[0]
    for rg in regions[1:]:
        if (rg.energy, rg.p_y, rg.mass) != (first.energy, first.p_y, first.mass):
            raise ValueError("all regions in a chain must share energy, p_y and mass")
    if first.regime != REGIME_TRAVELLING:
        raise ValueError("the incident region must carry a travelling wave")

    mats = [_match_complex(rg, spin, klein_convention)[1] for rg in regions]
    v = np.array([1.0 + 0.0j, 0.0 + 0.0j])
    log_scale = 0.0
    # Region-local amplitudes at each region's rightmost boundary, with
    # the log of the growing-factor rescaling in force at that moment.
    at_right: list[tuple[np.ndarray, float]] = [None] * n
    at_right[n - 1] = (v.copy(), 0.0)
    for b in range(n - 2, -1, -1):
        v = _solve2(mats[b], mats[b + 1] @ v)
        at_right[b] = (v.copy(), log_scale)
        if b > 0:
            rg, d = regions[b], widths[b - 1]
            if rg.regime == REGIME_EVANESCENT:
                # Pull the growing factor e^{kappa d} out of the algebra.
                v = np.array([v[0], v[1] * np.exp(-2.0 * rg.kappa * d)])
                log_scale += rg.kappa * d
            else:
                q = rg.p_x * d
                if not (rg.regime == REGIME_KLEIN and klein_convention == KLEIN_OUTGOING):
                    q = -q
                phase = complex(math.cos(q), math.sin(q))
                v = np.array([v[0] * phase, v[1] * phase.conjugate()])

    depth = sum(widths)
    px0 = first.p_x
    # Incident amplitude referenced to x = 0:  T_in = e^{-j p_x X0} v0 e^{s}.
    # For very deep evanescent chains it overflows to inf, which only means
    # the interior amplitudes underflow to zero; r and t stay finite.
    with np.errstate(over="ignore", invalid="ignore"):
        t_in = np.exp(complex(log_scale, px0 * depth)) * v[0]
    r_c = np.exp(complex(0.0, -2.0 * px0 * depth)) * v[1] / v[0]
    t_c = np.exp(complex(-log_scale, -px0 * depth)) / v[0]

    # Global (x = 0 referenced) per-region amplitudes, unit incidence.
    positions = [0.0] * (n - 1)
    for b in range(n - 3, -1, -1):
        positions[b] = positions[b + 1] - widths[b]
    amps = []
    with np.errstate(over="ignore", invalid="ignore"):
        for i, rg in enumerate(regions):
            vi, ls = at_right[i]
            x_b = 0.0 if i == n - 1 else positions[i]
            if rg.regime == REGIME_EVANESCENT:
                d_inv = np.array(
                    [np.exp(rg.kappa * x_b), np.exp(-rg.kappa * x_b)], dtype=complex
                )
            else:
                q = rg.p_x * x_b
                if rg.regime == REGIME_KLEIN and klein_convention == KLEIN_OUTGOING:
                    q = -q
                d_inv = np.array([np.exp(-1j * q), np.exp(1j * q)])
            pair = d_inv * vi * np.exp(ls) / t_in
            amps.append(
                (PhaseScalar.from_complex(pair[0]), PhaseScalar.from_complex(pair[1]))
            )

    last = regions[-1]
    if last.regime == REGIME_TRAVELLING:
        flux_ratio = last.p_x / px0
    elif last.regime == REGIME_KLEIN:
        flux_ratio = last.p_x / px0
        if klein_convention == KLEIN_INCOMING:
            flux_ratio = -flux_ratio
    else:
        flux_ratio = 0.0
    return ChainResult(
        r=PhaseScalar.from_complex(r_c),
        t=PhaseScalar.from_complex(t_c),
        flux_ratio=flux_ratio,
        amplitudes=tuple(amps),
    )


def step_coefficients(
    left: RegionSpec,
    right: RegionSpec,
    spin: str = SPIN_UP,
    *,
    klein_convention: str = KLEIN_OUTGOING,
) -> ChainResult:
    """Reflection/transmission at a single potential step at x = 0."""
    return chain_solve((left, right), (), spin, klein_convention=klein_convention)


# ----------------------------------------------------------------------
# closed forms


def closed_step_perpendicular(
    left: RegionSpec, right: RegionSpec
) -> tuple[PhaseScalar, PhaseScalar]:
    """Step coefficients at perpendicular incidence, travelling on both sides:

        r = sinh((u1 - u2)/2) / sinh((u1 + u2)/2),
        t = sinh(u1) / sinh((u1 + u2)/2).
    """
    for rg in (left, right):
        if rg.regime != REGIME_TRAVELLING:
            raise ValueError("closed step form needs travelling waves on both sides")
        if rg.p_y != 0.0:
            raise ValueError("closed step form is for perpendicular incidence (p_y = 0)")
    u1, u2 = left.u, right.u
    den = math.sinh(0.5 * (u1 + u2))
    return (
        PhaseScalar(math.sinh(0.5 * (u1 - u2)) / den),
        PhaseScalar(math.sinh(u1) / den),
    )


def closed_barrier_perpendicular(
    outside: RegionSpec, barrier: RegionSpec, width: float
) -> tuple[PhaseScalar, PhaseScalar]:
    """Tunnelling coefficients through a rectangular barrier, perpendicular.

        t = kappa p e^{-j d p} / [kappa p cosh(kappa d) - j (p^2 - eV E) sinh(kappa d)]

    and the matching reflection amplitude, both referenced to the exit
    boundary at x = 0 (the barrier occupies [-d, 0]).
    """
    if outside.regime != REGIME_TRAVELLING or outside.p_y != 0.0:
        raise ValueError("closed barrier form needs a perpendicular travelling outside region")
    if barrier.regime != REGIME_EVANESCENT or barrier.p_y != 0.0:
        raise ValueError("closed barrier form needs a perpendicular evanescent barrier")
    p = outside.p_x
    kappa = barrier.kappa
    energy, e_v, mass = outside.energy, barrier.potential, outside.mass
    ch, sh = math.cosh(kappa * width), math.sinh(kappa * width)
    denom = complex(kappa * p * ch, -(p * p - e_v * energy) * sh)
    t = kappa * p * complex(math.cos(p * width), -math.sin(p * width)) / denom
    r = (
        complex(0.0, -e_v * mass * sh)
        * complex(math.cos(2 * p * width), -math.sin(2 * p * width))
        / denom
    )
    return PhaseScalar.from_complex(r), PhaseScalar.from_complex(t)


def closed_klein_step(left: RegionSpec, right: RegionSpec) -> tuple[PhaseScalar, PhaseScalar]:
    """Step coefficients onto a Klein region with outgoing-current matching.

    General incidence:  with c_i = cosh(u_i/2), s_i = sinh(u_i/2) and the
    two region angles phi1, phi2,

        r = (s1 s2 e^{j(phi1 + phi2)} - c1 c2) / (c1 c2 + s1 s2 e^{j(phi2 - phi1)})
        t = sinh(u1) cos(phi1) / (c1 c2 + s1 s2 e^{j(phi2 - phi1)}),

    reducing at perpendicular incidence to r = -cosh((u1-u2)/2)/cosh((u1+u2)/2),
    t = sinh(u1)/cosh((u1+u2)/2), with |r| <= 1 always.
    """
    if left.regime != REGIME_TRAVELLING:
        raise ValueError("closed Klein step form needs a travelling incident region")
    if right.regime != REGIME_KLEIN:
        raise ValueError("closed Klein step form needs a Klein exit region")
    c1, s1 = math.cosh(0.5 * left.u), math.sinh(0.5 * left.u)
    c2, s2 = math.cosh(0.5 * right.u), math.sinh(0.5 * right.u)
    e_sum = complex(math.cos(left.phi + right.phi), math.sin(left.phi + right.phi))
    e_dif = complex(math.cos(right.phi - left.phi), math.sin(right.phi - left.phi))
    den = c1 * c2 + s1 * s2 * e_dif
    r = (s1 * s2 * e_sum - c1 * c2) / den
    t = math.sinh(left.u) * math.cos(left.phi) / den
    return PhaseScalar.from_complex(r), PhaseScalar.from_complex(t)


def reflection_precession(energy: float, phi: float, mass: float = 1.0) -> float:
    """Spin precession angle acquired under total reflection.

    A wave of energy E incident at angle phi on any totally reflecting
    step leaves with its rest-spin rotated by delta about the barrier
    normal plane, where

        tan(delta/2) = -(cosh u - 1) tan phi / (1 + cosh u tan^2 phi)

    and cosh u = E/m.  Remarkably the result does not depend on the
    barrier height, only on the incident energy and direction.
    """
    if mass <= 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    if energy <= mass:
        raise ValueError("total reflection needs a travelling incident wave (E > m)")
    if not abs(phi) < 0.5 * math.pi:
        raise ValueError("incidence angle must satisfy |phi| < pi/2")
    ch = energy / mass
    tp = math.tan(phi)
    return 2.0 * math.atan2(-(ch - 1.0) * tp, 1.0 + ch * tp * tp)


# ----------------------------------------------------------------------
# first-order Coulomb scattering


@dataclass(frozen=True)
class BornResult:
    """First-order Coulomb scattering data for one (p_i -> p_f) pair.

    ``amplitude`` is the scalar-plus-vector object (Z alpha / q^2)(2E + q);
    ``cross_section`` its modulus combination, equal to the Mott formula;
    ``rotor`` the unit even element rotating the initial rest-spin plane
    into the final one; ``precession`` the rotor's rotation angle.
    """

    amplitude: Multivector
    cross_section: float
    rotor: Multivector
    precession: float


def _pauli_vector(components) -> Multivector:
    out = SIG3[1] * float(components[0])
    out = out + SIG3[2] * float(components[1])
    return out + SIG3[3] * float(components[2])


def born_coulomb(p_initial, p_final, z: float, mass: float = 1.0) -> BornResult:
    """First Born approximation for scattering from a charge Z e.

    Momenta are 3-vectors of equal magnitude (elastic scattering); the
    coupling is Z times the fine-structure constant.  The differential
    cross-section is assembled from the amplitude as S conj(S) rather
    than from the closed form, so comparing against `mott_cross_section`
    exercises two independent routes.  The exact forward direction has a
    vanishing momentum transfer and is rejected.
    """
    p_i = np.asarray(p_initial, dtype=float)
    p_f = np.asarray(p_final, dtype=float)
    if p_i.shape != (3,) or p_f.shape != (3,):
        raise ValueError("momenta must be 3-vectors")
    pi_mag = float(np.linalg.norm(p_i))
    pf_mag = float(np.linalg.norm(p_f))
    if pi_mag == 0.0:
        raise ValueError("incident momentum must be nonzero")
    if abs(pi_mag - pf_mag) > 1e-9 * pi_mag:
        raise ValueError("elastic scattering requires |p_i| = |p_f|")
    q = p_f - p_i
    q2 = float(q @ q)
    if q2 <= 1e-24 * pi_mag * pi_mag:
        raise ValueError("forward direction has zero momentum transfer; no Born amplitude")
    energy = math.hypot(mass, pi_mag)
    coupling = z * FINE_STRUCTURE / q2
    amplitude = ONE3 * (2.0 * energy * coupling) + _pauli_vector(q) * coupling
    # S times its spatial reversion: the scalar part is d sigma / d Omega.
    cross = (amplitude * amplitude.reverse().grade_involution()).scalar_part

    pf_mv = _pauli_vector(p_f)
    pi_mv = _pauli_vector(p_i)
    raw = ONE3 * (2.0 * (energy + mass) ** 2) + (pf_mv * pi_mv) * 2.0
    norm = math.sqrt((raw * raw.reverse()).scalar_part)
    rotor = raw * (1.0 / norm)
    bivec = rotor.grade(2)
    precession = 2.0 * math.atan2(bivec.coeff_norm(), rotor.scalar_part)
    return BornResult(
        amplitude=amplitude, cross_section=cross, rotor=rotor, precession=precession
    )


def mott_cross_section(energy: float, theta: float, z: float, mass: float = 1.0) -> float:
    """Mott formula Z^2 alpha^2 (1 - beta^2 sin^2(theta/2)) / (4 p^2 beta^2 sin^4(theta/2))."""
    if energy <= mass:
        raise ValueError("scattering requires E > m")
    if not 0.0 < theta <= math.pi:
        raise ValueError("scattering angle must lie in (0, pi]")
    p2 = energy * energy - mass * mass
    beta2 = p2 / (energy * energy)
    s2 = math.sin(0.5 * theta) ** 2
    return (z * FINE_STRUCTURE) ** 2 * (1.0 - beta2 * s2) / (4.0 * p2 * beta2 * s2 * s2)


def mott_precession(energy: float, theta: float, mass: float = 1.0) -> float:
    """Spin rotation angle in Coulomb scattering through angle theta.

    tan(delta/2) = sin(theta) / ((E + m)/(E - m) + cos(theta)); vanishes
    in the non-relativistic limit and matches the rotor angle returned by
    `born_coulomb`.
    """
    if energy <= mass:
        raise ValueError("scattering requires E > m")
    ratio = (energy + mass) / (energy - mass)
    return 2.0 * math.atan2(math.sin(theta), ratio + math.cos(theta))


def feynman_kernel(momentum, mass: float, operand: Multivector) -> Multivector:
    """Momentum-space propagator kernel (p M + m M g0) / (p^2 - m^2).

    ``momentum`` is a four-component sequence (t, x, y, z) defining the
    spacetime vector p; ``operand`` an arbitrary spacetime multivector M.
    Raises ValueError on shell, where the kernel has its pole.
    """
    p_mv = four_vector(*(float(c) for c in momentum))
    p2 = (p_mv * p_mv).scalar_part
    denom = p2 - mass * mass
    scale = max(abs(p2), mass * mass, 1.0)
    if abs(denom) <= 1e-12 * scale:
        raise ValueError("momentum is on the mass shell; kernel pole")
    return (p_mv * operand + operand * GAMMA[0] * mass) * (1.0 / denom)


# ----------------------------------------------------------------------
# pair production at a supercritical step


def klein_pair_rate(
    potential: float,
    mass: float = 1.0,
    mode_cutoffs: tuple[int, int] = (160, 160),
    *,
    flux_normalised: bool = False,
) -> float:
    """Fermion pair-production rate per unit time and area of a step eV > 2m.

    Sums the flux transmission of both spin channels over the Klein-zone
    modes: frequencies omega in (m, eV - m) and transverse momenta with
    k^2 < min(omega^2, (eV - omega)^2) - m^2, using tensorised
    Gauss-Legendre rules of the given sizes (omega nodes, k nodes).  Each
    mode contributes 2 sinh^2(u') / cosh^2((u + u')/2) with the energy
    rapidities m sinh u = sqrt(omega^2 - m^2) and
    m sinh u' = sqrt((eV - omega)^2 - m^2); for a step barely above the
    threshold, eV = 2m(1 + eps), the result approaches pi m^3 eps^3 / 32.
    Below threshold the rate is exactly zero.

    With ``flux_normalised=True`` the integrand is replaced by the
    unitary per-mode flux sum 2 sinh(u_x) sinh(u_x') / cosh^2((u_x + u_x')/2)
    built from x-rapidities with transverse mass sqrt(m^2 + k^2).  That
    variant scales as m^3 eps^3 / (6 pi) near threshold and is kept as a
    diagnostic only - it does not reproduce the target closed form.
    """
    if mass <= 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    if potential <= 2.0 * mass:
        return 0.0
    n_omega, n_k = mode_cutoffs
    if n_omega < 2 or n_k < 1:
        raise ValueError("mode_cutoffs must provide at least (2, 1) quadrature nodes")
    x_w, w_w = np.polynomial.legendre.leggauss(n_omega)
    lo, hi = mass, potential - mass
    omega = 0.5 * (hi - lo) * x_w + 0.5 * (hi + lo)
    w_w = 0.5 * (hi - lo) * w_w

    p = np.sqrt(np.maximum(omega**2 - mass**2, 0.0))
    pp = np.sqrt(np.maximum((potential - omega) ** 2 - mass**2, 0.0))
    kmax = np.sqrt(np.maximum(np.minimum(omega, potential - omega) ** 2 - mass**2, 0.0))

    x_k, w_k = np.polynomial.legendre.leggauss(n_k)
    k = 0.5 * kmax[:, None] * (x_k[None, :] + 1.0)
    kw = 0.5 * kmax[:, None] * w_k[None, :]

    if flux_normalised:
        p_x = np.sqrt(np.maximum(p[:, None] ** 2 - k**2, 0.0))
        pp_x = np.sqrt(np.maximum(pp[:, None] ** 2 - k**2, 0.0))
        m_perp = np.sqrt(mass**2 + k**2)
        u_x = np.arcsinh(p_x / m_perp)
        up_x = np.arcsinh(pp_x / m_perp)
        g = 2.0 * np.sinh(u_x) * np.sinh(up_x) / np.cosh(0.5 * (u_x + up_x)) ** 2
    else:
        u = np.arcsinh(p / mass)
        up = np.arcsinh(pp / mass)
        g = (2.0 * np.sinh(up) ** 2 / np.cosh(0.5 * (u + up)) ** 2)[:, None]
        g = np.broadcast_to(g, k.shape)

    total = float(np.sum(w_w[:, None] * kw * k * g))
    # angular integral 2 pi over the mode measure d^2k dw / (2 pi)^3
    return total / (4.0 * math.pi**2)


# ----------------------------------------------------------------------
# boundary-integral propagation


def helmholtz_kernel(distance: float, momentum: float) -> PhaseScalar:
    """Outgoing kernel e^{j p r} / r of the operator grad^2 + p^2."""
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    pr = momentum * distance
    return PhaseScalar(math.cos(pr) / distance, math.sin(pr) / distance)


def sphere_mesh(
    radius: float, n_polar: int, n_azimuth: int, center=(0.0, 0.0, 0.0)
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre x uniform-azimuth quadrature mesh on a sphere.

    Returns (points, outward unit normals, area weights); the weights sum
    to the exact sphere area and integrate smooth surface data with
    spectral accuracy.
    """
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if n_polar < 1 or n_azimuth < 1:
        raise ValueError("mesh needs at least one node per direction")
    x_gl, w_gl = np.polynomial.legendre.leggauss(n_polar)
    phis = (np.arange(n_azimuth) + 0.5) * (2.0 * math.pi / n_azimuth)
    ct = x_gl[:, None]
    st = np.sqrt(1.0 - ct**2)
    normals = np.stack(
        np.broadcast_arrays(st * np.cos(phis)[None, :], st * np.sin(phis)[None, :], ct + 0.0 * phis),
        axis=-1,
    ).reshape(-1, 3)
    points = np.asarray(center, dtype=float)[None, :] + radius * normals
    weights = np.broadcast_to(
        radius**2 * w_gl[:, None] * (2.0 * math.pi / n_azimuth), (n_polar, n_azimuth)
    ).reshape(-1)
    return points, normals, weights.copy()


def huygens_propagate(
    points: np.ndarray,
    normals: np.ndarray,
    weights: np.ndarray,
    values: np.ndarray,
    energy: float,
    targets: np.ndarray,
    mass: float = 1.0,
) -> np.ndarray:
    """Reconstruct a stationary wave inside a closed surface from boundary data.

    ``values`` holds samples (an (N, 8) even-Pauli coefficient array) of a
    solution of  E psi + grad(psi) i sig3 - m bar(psi) = 0  on a closed
    surface with outward unit ``normals`` and quadrature ``weights``.  The
    interior value is rebuilt from the surface sources n psi and n bar(psi)
    convolved with the outgoing kernel pair

        a(r) = e^{j p r} / r,      b(r) = e^{j p r} (1/r + j/(p r^2)),

    p = sqrt(E^2 - m^2): by Stokes' theorem the combinations
    oint (a + b rhat) n (psi - gamma bar(psi)) dS, with rhat the unit
    vector from source to target and gamma = (E - p)/m, collapse onto the
    target values (the 1/r^2 head of b supplies the delta function), and
    the two resulting spin-gauge mixtures are disentangled algebraically.
    The identity is exact; with a smooth quadrature such as `sphere_mesh`
    the error decays spectrally with mesh size.  Zero boundary data
    propagates to exactly zero; targets on the surface are rejected.
    """
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    weights = np.asarray(weights, dtype=float)
    values = np.asarray(values, dtype=float)
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    n_src = points.shape[0]
    if points.shape != (n_src, 3) or normals.shape != (n_src, 3):
        raise ValueError("points and normals must be (N, 3) arrays")
    if weights.shape != (n_src,):
        raise ValueError("weights must be an (N,) array")
    if values.shape != (n_src, 8):
        raise ValueError("values must be an (N, 8) coefficient array")
    if targets.shape[-1] != 3:
        raise ValueError("targets must be 3-vectors")
    if energy <= mass:
        raise ValueError("boundary propagation requires a travelling energy (E > m)")
    p = math.sqrt(energy * energy - mass * mass)
    gamma = (energy - p) / mass
    scale = math.sqrt(float(np.max(np.sum((points - points.mean(0)) ** 2, axis=1))))

    normal_field = pauli_field_vector(normals.T)
    h = pauli_field_product(normal_field, values)
    h_bar = pauli_field_product(normal_field, pauli_field_bar(values))
    out = np.empty((targets.shape[0], 8))
    for idx, target in enumerate(targets):
        diff = target[None, :] - points
        r = np.sqrt(np.sum(diff * diff, axis=1))
        if np.min(r) <= 1e-12 * max(scale, 1.0):
            raise ValueError("target lies on the source surface")
        pr = p * r
        cos_pr, sin_pr = np.cos(pr), np.sin(pr)
        a_re, a_im = cos_pr / r, sin_pr / r
        b_re = cos_pr / r - sin_pr / (p * r**2)
        b_im = sin_pr / r + cos_pr / (p * r**2)
        rhat_field = pauli_field_vector((diff / r[:, None]).T)
        rh = pauli_field_product(rhat_field, h)
        rh_bar = pauli_field_product(rhat_field, h_bar)

        def reduce(data, c_re, c_im):
            return np.sum(
                data * (weights * c_re)[:, None]
                + pauli_field_right_j(data) * (weights * c_im)[:, None],
                axis=0,
            )

        u_scal, u_vec = reduce(h, a_re, a_im), reduce(rh, b_re, b_im)
        v_scal, v_vec = reduce(h_bar, a_re, a_im), reduce(rh_bar, b_re, b_im)
        first = (u_scal + u_vec) - gamma * (v_scal + v_vec)  # -> c (psi - gamma psibar)
        second = gamma * (u_scal - u_vec) - (v_scal - v_vec)  # -> c (psibar - gamma psi)
        x1 = pauli_field_right_j(first[None, :])[0] * (p / (4.0 * math.pi))
        x2 = pauli_field_right_j(second[None, :])[0] * (p / (4.0 * math.pi))
        out[idx] = (x1 + gamma * x2) / (1.0 - gamma * gamma)
    return out
