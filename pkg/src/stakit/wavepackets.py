"""One-dimensional relativistic wavepackets built from exact plane-wave modes.

A packet is a Gaussian superposition of travelling modes; evolution is
spectral, i.e. every mode advances with its exact phase and the only
numerical approximation anywhere is the quadrature of the mode sum.
Barrier runs propagate along x and take their per-mode coefficients from
the layered-matching solver in `scattering`; the impulsive spin splitter
propagates along z, the one axis whose shock operator commutes with the
dynamical phase plane.  On top of the mode sums sit the observable maps
(density, current, local spin vector), current streamlines integrated
with an adaptive solver, and arrival-time statistics at a detector.

Internally everything is in natural units (hbar = c = 1, energies in
units of the particle mass); the `*_from_*` converters translate
angstroms, seconds and SI momenta for desk-scale electron runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .algebra import Multivector, to_dense
from .scattering import (
    BACKWARD,
    FORWARD,
    REGIME_TRAVELLING,
    SPIN_DOWN,
    SPIN_UP,
    chain_solve,
    classify_region,
    wave_parts,
)
from .spinors import (
    ISP3,
    ONE3,
    SIG3,
    pauli_field_product,
    pauli_field_reverse,
    pauli_field_right_j,
)
from .units import ELECTRON_MASS_EV, HBAR_C_EV_ANGSTROM, HBAR_EV_S, SPEED_OF_LIGHT_M_S

__all__ = [
    "PacketSpec",
    "packet_from_kinetic",
    "Modes",
    "build_packet",
    "PacketEvolution",
    "FieldGrid",
    "evolve_free",
    "evolve_barrier",
    "SplitPacket",
    "stern_gerlach",
    "spin_split",
    "frequency_split",
    "spin_field",
    "Streamline",
    "streamlines",
    "ArrivalDistribution",
    "arrival_times",
    "peak_position",
    "natural_from_angstrom",
    "angstrom_from_natural",
    "natural_from_seconds",
    "seconds_from_natural",
    "natural_from_momentum_si",
]

_J = ISP3[3]
_MINUS_I_SIG2 = ISP3[2] * -1.0
_EV_JOULES = 1.602176634e-19

# Dense slot bookkeeping: [1, s1, s2, s3, i s3, -i s2, i s1, i] up to signs;
# slots 1..3 of psi sig3 rev(psi) are the spin-vector components.
_SIG3_ROW = to_dense(SIG3[3])


# --------------------------------------------------------------------------
# unit conversions


def natural_from_angstrom(x: float, mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Length in angstroms -> natural units (1/mass)."""
    return x * mass_ev / HBAR_C_EV_ANGSTROM


def angstrom_from_natural(x: float, mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Length in natural units -> angstroms."""
    return x * HBAR_C_EV_ANGSTROM / mass_ev


def natural_from_seconds(t: float, mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Time in seconds -> natural units (1/mass)."""
    return t * mass_ev / HBAR_EV_S


def seconds_from_natural(t: float, mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Time in natural units -> seconds."""
    return t * HBAR_EV_S / mass_ev


def natural_from_momentum_si(p: float, mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Momentum in kg m/s -> natural units (mass c)."""
    return p * SPEED_OF_LIGHT_M_S / (mass_ev * _EV_JOULES)


# --------------------------------------------------------------------------
# packet specification and mode construction


@dataclass(frozen=True)
class PacketSpec:
    """Recipe for a Gaussian packet of travelling modes.

    ``k0`` is the central momentum and ``delta_k`` the momentum-space
    width, both in natural units: the mode amplitude is
    exp(-(k - k0)^2 / delta_k^2), falling to 1/e at k0 +/- delta_k, and
    the spatial density built from it has standard deviation 1/delta_k.
    ``spin`` is an even multivector amplitude (or the shorthands
    "up" -> 1 and "down" -> -i sig2); its magnitude is folded into the
    normalisation, so only the direction and the up/down mixture matter.
    The spectrum is sampled with ``n_modes`` points over
    k0 +/- window*delta_k; at the default window the truncated tails
    carry weight ~1e-11 of the peak.
    """

    k0: float
    delta_k: float
    x0: float = 0.0
    spin: Multivector | str = "up"
    n_modes: int = 2048
    window: float = 5.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k0) and math.isfinite(self.x0)):
            raise ValueError("packet centre parameters must be finite")
        if not (self.delta_k > 0.0 and math.isfinite(self.delta_k)):
            raise ValueError("delta_k must be positive and finite")
        if self.n_modes < 1 or not (self.window > 0.0):
            raise ValueError("empty truncation window")
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValueError("mass must be positive")

    @property
    def rotor(self) -> Multivector:
        """The spin amplitude as a multivector, with shorthands resolved."""
        if isinstance(self.spin, str):
            try:
                return {"up": ONE3, "down": _MINUS_I_SIG2}[self.spin]
            except KeyError:
                raise ValueError(f"unknown spin shorthand {self.spin!r}") from None
        dense = to_dense(self.spin)
        if np.abs(dense[[1, 2, 3, 7]]).max() > 1e-14 * np.abs(dense).max():
            raise ValueError("spin amplitude must be an even multivector")
        if not np.abs(dense).max() > 0.0:
            raise ValueError("spin amplitude must be nonzero")
        return self.spin


def packet_from_kinetic(
    kinetic_ev: float,
    delta_k_per_angstrom: float,
    x0_angstrom: float = 0.0,
    **kwargs,
) -> PacketSpec:
    """Electron packet from lab numbers: kinetic energy in eV, widths in 1/A.

    Uses the electron mass, so the resulting spec is in natural units
    with mass = 1.
    """
    if kinetic_ev <= 0.0:
        raise ValueError("kinetic energy must be positive")
    energy = 1.0 + kinetic_ev / ELECTRON_MASS_EV
    k0 = math.sqrt(energy * energy - 1.0)
    delta_k = delta_k_per_angstrom * HBAR_C_EV_ANGSTROM / ELECTRON_MASS_EV
    return PacketSpec(k0, delta_k, natural_from_angstrom(x0_angstrom), **kwargs)


@dataclass(frozen=True)
class Modes:
    """Sampled spectrum of a packet: momenta, complex weights, spin amplitude.

    The weights carry the normalisation and the e^{-j k x0} centring
    phase; ``spacing`` is the momentum-grid step (0 for a single mode,
    which is normalised to unit density instead of unit norm).
    """

    momenta: np.ndarray
    weights: np.ndarray
    rotor: Multivector
    mass: float
    spacing: float

    @property
    def energies(self) -> np.ndarray:
        return np.hypot(self.mass, self.momenta)

    def norm(self) -> float:
        """Analytic integral of the density over all space."""
        if self.spacing == 0.0:
            return math.inf
        rotor_norm = to_dense(self.rotor * self.rotor.reverse())[0]
        total = np.sum(np.abs(self.weights) ** 2 * (self.energies / self.mass))
        return 2.0 * math.pi / self.spacing * float(total) * rotor_norm


def build_packet(spec: PacketSpec) -> Modes:
    """Sample the Gaussian spectrum and normalise the packet.

    For n_modes >= 2 the weights are scaled so the spatial integral of
    the density equals one; a single-mode "packet" degenerates to a
    plane wave and is scaled to unit density instead.
    """
    rotor = spec.rotor
    rotor_norm = to_dense(rotor * rotor.reverse())[0]
    if spec.n_modes == 1:
        momenta = np.array([spec.k0])
        energy = math.hypot(spec.mass, spec.k0)
        weight = 1.0 / math.sqrt((energy / spec.mass) * rotor_norm)
        weights = np.array([weight * np.exp(-1j * spec.k0 * spec.x0)])
        return Modes(momenta, weights, rotor, spec.mass, 0.0)
    half = spec.window * spec.delta_k
    momenta = np.linspace(spec.k0 - half, spec.k0 + half, spec.n_modes)
    spacing = momenta[1] - momenta[0]
    gauss = np.exp(-((momenta - spec.k0) ** 2) / spec.delta_k**2)
    energies = np.hypot(spec.mass, momenta)
    total = np.sum(gauss**2 * energies / spec.mass) * rotor_norm
    scale = math.sqrt(spacing / (2.0 * math.pi * total))
    weights = scale * gauss * np.exp(-1j * momenta * spec.x0)
    return Modes(momenta, weights, rotor, spec.mass, float(spacing))


# --------------------------------------------------------------------------
# spin and frequency projectors


def spin_split(value: Multivector) -> tuple[Multivector, Multivector]:
    """Eigendecomposition under the impulsive splitter operator.

    The two parts are the +1/-1 eigencomponents of V -> sig3 bar(V) sig3
    and receive opposite momentum kicks from a magnetic shock along z.
    Both commute with right j-phases, and for a rest-frame rotor they are
    the spin-up and spin-down amplitudes (1 and -i sig2 families).
    """
    flip = SIG3[3] * value.grade_involution() * SIG3[3]
    return (value + flip) * 0.5, (value - flip) * 0.5


def frequency_split(
    value: Multivector, momentum: float, mass: float = 1.0
) -> tuple[Multivector, Multivector]:
    """Positive/negative-frequency parts of a structure at a z-momentum.

    Returns (plus, minus) with plus + minus = value exactly; plus solves
    E V = k sig3 V + m bar(V) and evolves with e^{-jEt}, minus solves it
    with E -> -E and evolves with e^{+jEt}.
    """
    energy = math.hypot(mass, momentum)
    acted = SIG3[3] * value * momentum + value.grade_involution() * mass
    plus = (value * energy + acted) * (0.5 / energy)
    minus = (value * energy - acted) * (0.5 / energy)
    return plus, minus


def _rotor_chain_amplitudes(rotor: Multivector) -> tuple[complex, complex]:
    """Complex amplitudes (up, down) of a rotor in the two spin families.

    The decomposition is rotor = up_amp + (-i sig2) down_amp with both
    amplitudes in the commutative j-ring, read off densely (slot 0 is
    the scalar, slot 4 the i sig3 component).
    """
    up_part, down_part = spin_split(rotor)
    up = to_dense(up_part)
    down = to_dense(ISP3[2] * down_part)
    return complex(up[0], up[4]), complex(down[0], down[4])


def _boost_z(momentum: float, mass: float) -> Multivector:
    u = math.asinh(momentum / mass)
    return ONE3 * math.cosh(0.5 * u) + SIG3[3] * math.sinh(0.5 * u)


# --------------------------------------------------------------------------
# evolution objects


@dataclass(frozen=True)
class _Branch:
    """One family of modes in one region: dense structures plus phase data.

    The field value of the branch at (t, x) is
    sum_k amps_k * structures_k * e^{j(momenta_k (x - x_ref)
    - freq_k energies_k t)} * e^{-decay_k (x - x_ref)} with the complex
    coefficient acting through the right j-ring.
    """

    region: int
    structures: np.ndarray
    structures_j: np.ndarray
    momenta: np.ndarray
    decay: np.ndarray
    energies: np.ndarray
    freq: np.ndarray
    amps: np.ndarray
    x_ref: float


def _make_branch(region, structures, momenta, decay, energies, freq, amps, x_ref=0.0):
    structures = np.asarray(structures, dtype=float)
    return _Branch(
        region=region,
        structures=structures,
        structures_j=pauli_field_right_j(structures),
        momenta=np.asarray(momenta, dtype=float),
        decay=np.asarray(decay, dtype=float),
        energies=np.asarray(energies, dtype=float),
        freq=np.asarray(freq, dtype=float),
        amps=np.asarray(amps, dtype=complex),
        x_ref=float(x_ref),
    )


class PacketEvolution:
    """Lazy spectral evaluator for an evolved packet.

    Field values, currents and spin vectors at arbitrary (t, x) are
    assembled on demand from the per-mode branches; nothing is stored on
    a grid unless `grid` is called.  ``axis`` is the dense slot of the
    propagation direction (1 for x-runs, 3 for z-runs) and
    ``boundaries`` the ordered region edges (empty for free space).
    """

    def __init__(
        self,
        branches: Sequence[_Branch],
        *,
        axis: int,
        boundaries: Sequence[float] = (),
        mass: float = 1.0,
    ) -> None:
        self.branches = tuple(branches)
        self.axis = int(axis)
        self.boundaries = tuple(float(b) for b in boundaries)
        self.mass = float(mass)

    def _regions(self, positions: np.ndarray) -> np.ndarray:
        if not self.boundaries:
            return np.zeros(positions.shape, dtype=int)
        return np.searchsorted(np.asarray(self.boundaries), positions, side="right")

    def values(self, time: float, positions) -> np.ndarray:
        """Dense field components, shape (len(positions), 8)."""
        xs = np.atleast_1d(np.asarray(positions, dtype=float))
        out = np.zeros(xs.shape + (8,))
        region_of = self._regions(xs)
        for branch in self.branches:
            sel = region_of == branch.region
            if not sel.any():
                continue
            dx = xs[sel, None] - branch.x_ref
            phases = dx * branch.momenta - time * (branch.freq * branch.energies)
            coeff = branch.amps * np.exp(1j * phases)
            if branch.decay.any():
                coeff = coeff * np.exp(-dx * branch.decay)
            out[sel] += coeff.real @ branch.structures + coeff.imag @ branch.structures_j
        return out

    def current(self, time: float, positions) -> tuple[np.ndarray, np.ndarray]:
        """Density J0 and the current component along the motion axis."""
        psi = self.values(time, positions)
        cur = pauli_field_product(psi, pauli_field_reverse(psi))
        return cur[..., 0], cur[..., self.axis]

    def observables(
        self, time: float, positions
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Density, axis current and the local spin vector (N, 3)."""
        psi = self.values(time, positions)
        rev = pauli_field_reverse(psi)
        cur = pauli_field_product(psi, rev)
        spun = pauli_field_product(pauli_field_product(psi, _SIG3_ROW), rev)
        return cur[..., 0], cur[..., self.axis], spun[..., 1:4]

    def velocity(self, time: float, positions, floor: float = 0.0) -> np.ndarray:
        """J_axis / J0, set to zero wherever the density is at or below floor."""
        rho, flux = self.current(time, positions)
        safe = np.maximum(rho, np.finfo(float).tiny)
        return np.where(rho > floor, flux / safe, 0.0)

    def grid(self, times, positions) -> "FieldGrid":
        """Sample density, current and spin on a (times x positions) grid."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        xs = np.atleast_1d(np.asarray(positions, dtype=float))
        density = np.empty((times.size, xs.size))
        current = np.empty_like(density)
        spin = np.empty((times.size, xs.size, 3))
        for i, t in enumerate(times):
            density[i], current[i], spin[i] = self.observables(t, xs)
        return FieldGrid(times, xs, density, current, spin, self.axis)


@dataclass(frozen=True)
class FieldGrid:
    """Observables sampled on a spacetime grid.

    Stores the density J0, the current component along the motion axis
    and the spin vector; field values themselves are recomputed on
    demand by the evolution object rather than stored.
    """

    times: np.ndarray
    positions: np.ndarray
    density: np.ndarray
    current: np.ndarray
    spin: np.ndarray
    axis: int

    def norms(self) -> np.ndarray:
        """Trapezoid integral of the density over x at every time sample."""
        return np.trapezoid(self.density, self.positions, axis=1)


def spin_field(grid: FieldGrid, floor_ratio: float = 1e-12) -> np.ndarray:
    """Spin vectors of a grid with numerically empty points set to NaN.

    A point is considered empty when its density is at or below
    floor_ratio times the grid maximum.
    """
    out = np.array(grid.spin, dtype=float)
    out[grid.density <= floor_ratio * grid.density.max()] = np.nan
    return out


# --------------------------------------------------------------------------
# free and barrier evolution


def evolve_free(modes: Modes, axis: str = "x") -> PacketEvolution:
    """Free propagation of a packet along x or z.

    Every mode is a positive-frequency travelling wave; the two axes
    differ only in which boost plane the structures use.
    """
    if axis not in ("x", "z"):
        raise ValueError("axis must be 'x' or 'z'")
    up_amp, down_amp = _rotor_chain_amplitudes(modes.rotor)
    energies = modes.energies
    branches = []
    for spin, spin_amp in ((SPIN_UP, up_amp), (SPIN_DOWN, down_amp)):
        if spin_amp == 0.0:
            continue
        rows = np.empty((modes.momenta.size, 8))
        qs = np.array(modes.momenta, dtype=float)
        for i, (k, e) in enumerate(zip(modes.momenta, energies)):
            if axis == "z":
                structure = _boost_z(k, modes.mass)
                if spin == SPIN_DOWN:
                    structure = structure * _MINUS_I_SIG2
            else:
                region = classify_region(e, 0.0, mass=modes.mass)
                direction = FORWARD if k >= 0.0 else BACKWARD
                structure, q_x, _ = wave_parts(region, spin, direction)
                qs[i] = q_x
            rows[i] = to_dense(structure)
        branches.append(
            _make_branch(
                0, rows, qs, np.zeros_like(qs), energies,
                np.ones_like(qs), modes.weights * spin_amp,
            )
        )
    return PacketEvolution(
        branches, axis=3 if axis == "z" else 1, mass=modes.mass
    )


def evolve_barrier(
    modes: Modes,
    potential: float,
    width: float,
    barrier_start: float = 0.0,
) -> PacketEvolution:
    """Scatter a packet off a rectangular barrier along x.

    Each mode is matched through the three-region chain (free, barrier,
    free); the incident+reflected, interior and transmitted families are
    kept as separate branches so the field is exact in every region.
    Requires every mode to travel toward the barrier and to sit strictly
    inside one regime of the barrier region.
    """
    if not (width > 0.0 and math.isfinite(width)):
        raise ValueError("barrier width must be positive")
    if modes.momenta.min() <= 0.0:
        raise ValueError(
            "every mode must be travelling toward the barrier; "
            f"minimum momentum {modes.momenta.min():.3g} is not positive"
        )
    up_amp, down_amp = _rotor_chain_amplitudes(modes.rotor)
    exit_x = barrier_start + width
    energies = modes.energies
    n = modes.momenta.size
    # The chain normalises the incident wave to unit amplitude in a frame
    # whose origin is the exit boundary; restate the packet weights there.
    weights = modes.weights * np.exp(1j * modes.momenta * exit_x)

    regions = []
    chains = []
    for e in energies:
        outside = classify_region(e, 0.0, mass=modes.mass)
        inside = classify_region(e, potential, mass=modes.mass)
        if inside.marginal or outside.regime != REGIME_TRAVELLING:
            raise ValueError(
                "mode falling outside the valid regime for this barrier "
                f"(energy {e:.6g}, potential {potential:.6g})"
            )
        regions.append((outside, inside, outside))
        # Perpendicular incidence: the chain coefficients are the same for
        # both spin families, so one solve serves both.
        chains.append(chain_solve(regions[-1], (width,), spin=SPIN_UP))

    branches = []
    for spin, spin_amp in ((SPIN_UP, up_amp), (SPIN_DOWN, down_amp)):
        if spin_amp == 0.0:
            continue
        for region_index in range(3):
            for dir_index, direction in enumerate((FORWARD, BACKWARD)):
                rows = np.empty((n, 8))
                qs = np.empty(n)
                decs = np.empty(n)
                amps = np.empty(n, dtype=complex)
                for i in range(n):
                    coeff = chains[i].amplitudes[region_index][dir_index].to_complex()
                    amps[i] = weights[i] * spin_amp * coeff
                    structure, q_x, decay = wave_parts(
                        regions[i][region_index], spin, direction
                    )
                    rows[i] = to_dense(structure)
                    qs[i] = q_x
                    decs[i] = decay
                if not np.isfinite(amps).all():
                    raise ValueError(
                        "interior amplitudes overflowed; the barrier is too "
                        "opaque to evaluate inside"
                    )
                if np.abs(amps).max() > 0.0:
                    branches.append(
                        _make_branch(
                            region_index, rows, qs, decs, energies,
                            np.ones(n), amps, exit_x,
                        )
                    )
    return PacketEvolution(
        branches,
        axis=1,
        boundaries=(barrier_start, exit_x),
        mass=modes.mass,
    )


# --------------------------------------------------------------------------
# impulsive spin splitter


@dataclass(frozen=True)
class _Family:
    """One of the four shock components: structures at kicked momenta."""

    structures: np.ndarray
    momenta: np.ndarray
    energies: np.ndarray
    freq: float
    amps: np.ndarray


@dataclass(frozen=True)
class SplitPacket:
    """Post-shock packet: four mode families {up,down} x {plus,minus}.

    The up/down split is the eigendecomposition of the shock operator
    (opposite momentum kicks), and plus/minus are the positive and
    negative frequency parts required because the kicked momentum no
    longer matches the boost of each mode.  The four families evolve
    independently; their norms are exactly additive.
    """

    components: Mapping[str, _Family]
    mass: float
    spacing: float

    def evolution(self, labels: Sequence[str] | None = None) -> PacketEvolution:
        """Mode-sum evaluator along z for the chosen components (default all)."""
        chosen = tuple(labels) if labels is not None else tuple(self.components)
        branches = []
        for label in chosen:
            fam = self.components[label]
            branches.append(
                _make_branch(
                    0,
                    fam.structures,
                    fam.momenta,
                    np.zeros_like(fam.momenta),
                    fam.energies,
                    np.full(fam.momenta.shape, fam.freq),
                    fam.amps,
                )
            )
        return PacketEvolution(branches, axis=3, mass=self.mass)

    def component_norms(self) -> dict[str, float]:
        """Analytic density integral of every component.

        The families are mutually orthogonal in the conserved current, so
        these norms sum to the norm of the incident packet.
        """
        if self.spacing == 0.0:
            raise ValueError("component norms are undefined for a single mode")
        out = {}
        for label, fam in self.components.items():
            weight = np.sum(fam.structures**2, axis=1)
            total = np.sum(np.abs(fam.amps) ** 2 * weight)
            out[label] = 2.0 * math.pi / self.spacing * float(total)
        return out


def stern_gerlach(modes: Modes, delta_p: float) -> SplitPacket:
    """Apply an impulsive magnetic shock along z to a packet at t = 0.

    The shock multiplies the up eigencomponent by e^{j delta_p z} and the
    down one by e^{-j delta_p z}, shifting their momenta by +/- delta_p;
    each shifted component is then resolved into positive and negative
    frequency waves, which is what makes the future evolution exact.
    """
    if not math.isfinite(delta_p):
        raise ValueError("momentum impulse must be finite")
    n = modes.momenta.size
    rows = {
        "up_plus": np.empty((n, 8)),
        "up_minus": np.empty((n, 8)),
        "down_plus": np.empty((n, 8)),
        "down_minus": np.empty((n, 8)),
    }
    for i, k in enumerate(modes.momenta):
        value = _boost_z(k, modes.mass) * modes.rotor
        up_part, down_part = spin_split(value)
        up_plus, up_minus = frequency_split(up_part, k + delta_p, modes.mass)
        down_plus, down_minus = frequency_split(down_part, k - delta_p, modes.mass)
        rows["up_plus"][i] = to_dense(up_plus)
        rows["up_minus"][i] = to_dense(up_minus)
        rows["down_plus"][i] = to_dense(down_plus)
        rows["down_minus"][i] = to_dense(down_minus)
    momenta = {"up": modes.momenta + delta_p, "down": modes.momenta - delta_p}
    components = {}
    for label, structures in rows.items():
        side, sign = label.split("_")
        components[label] = _Family(
            structures=structures,
            momenta=momenta[side],
            energies=np.hypot(modes.mass, momenta[side]),
            freq=1.0 if sign == "plus" else -1.0,
            amps=np.array(modes.weights, dtype=complex),
        )
    return SplitPacket(components, modes.mass, modes.spacing)


# --------------------------------------------------------------------------
# streamlines and arrival times


@dataclass(frozen=True)
class Streamline:
    """Integrated current line of one seed.

    ``fate`` reports which side of the scatterer the line ended on
    ("transmitted", "reflected", "interior", or "free" when the run has
    no boundaries); ``starved`` flags that the integration crossed a
    region of numerically empty density, where the velocity was held at
    zero rather than fabricated.
    """

    seed: float
    times: np.ndarray
    positions: np.ndarray
    fate: str
    min_density: float
    starved: bool


def streamlines(
    evolution: PacketEvolution,
    seeds,
    t_span: tuple[float, float],
    *,
    n_samples: int = 121,
    rtol: float = 1e-7,
    atol: float | None = None,
    floor_ratio: float = 1e-12,
) -> list[Streamline]:
    """Integrate dx/dt = J_axis/J0 for every seed jointly.

    All seeds ride one adaptive solve so they share step control; the
    velocity field is evaluated by mode sum at the current positions
    (never interpolated from a grid).  The density floor below which a
    line is flagged as starved is floor_ratio times the densest seed at
    the start time.
    """
    seeds = np.atleast_1d(np.asarray(seeds, dtype=float))
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    rho0, _ = evolution.current(t0, seeds)
    floor = floor_ratio * float(rho0.max())
    if not floor > 0.0:
        raise ValueError("all seeds start in numerically empty density")
    minima = np.array(rho0, dtype=float)

    def rhs(t, y):
        rho, flux = evolution.current(t, y)
        np.minimum(minima, rho, out=minima)
        safe = np.maximum(rho, np.finfo(float).tiny)
        return np.where(rho > floor, flux / safe, 0.0)

    if atol is None:
        atol = 1e-9 * max(1.0, float(np.abs(seeds).max()))
    sol = solve_ivp(
        rhs,
        (t0, t1),
        seeds,
        t_eval=np.linspace(t0, t1, n_samples),
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"streamline integration failed: {sol.message}")

    lines = []
    for i, seed in enumerate(seeds):
        path = sol.y[i]
        if evolution.boundaries:
            if path[-1] > evolution.boundaries[-1]:
                fate = "transmitted"
            elif path[-1] < evolution.boundaries[0]:
                fate = "reflected"
            else:
                fate = "interior"
        else:
            fate = "free"
        lines.append(
            Streamline(
                seed=float(seed),
                times=sol.t,
                positions=path,
                fate=fate,
                min_density=float(minima[i]),
                starved=bool(minima[i] <= floor),
            )
        )
    return lines


@dataclass(frozen=True)
class ArrivalDistribution:
    """Current flux through a detector, normalised over the time window."""

    times: np.ndarray
    flux: np.ndarray
    total: float
    mean: float
    mode: float


def arrival_times(
    evolution: PacketEvolution, detector: float, times
) -> ArrivalDistribution:
    """Arrival-time distribution J_axis(detector, t) over the given window.

    The flux is normalised by its time integral; the mean is the first
    moment and the mode the quadratically interpolated peak.  Raises
    when no flux crosses the detector within the window.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    flux = np.empty(times.size)
    for i, t in enumerate(times):
        _, flux[i] = evolution.current(t, np.array([detector]))
    total = float(np.trapezoid(flux, times))
    if not total > 1e-300:
        raise ValueError("zero transmitted flux at the detector in this window")
    pdf = flux / total
    mean = float(np.trapezoid(times * pdf, times))
    return ArrivalDistribution(times, flux, total, mean, peak_position(times, flux))


def peak_position(positions, values) -> float:
    """Quadratically interpolated location of the maximum of a sampled curve.

    Fits a parabola through the three samples around the argmax (assumes
    locally uniform spacing); at the edges the raw sample wins.
    """
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)
    i = int(np.argmax(values))
    if i == 0 or i == values.size - 1:
        return float(positions[i])
    denom = values[i - 1] - 2.0 * values[i] + values[i + 1]
    if denom == 0.0:
        return float(positions[i])
    step = 0.5 * (positions[i + 1] - positions[i - 1])
    return float(positions[i] + 0.5 * step * (values[i - 1] - values[i + 1]) / denom)
