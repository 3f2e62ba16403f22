"""Relativistic central-field bound states.

Hydrogen-like atoms and the linear ("oscillator") coupling share one
skeleton: an angular factor with a definite K eigenvalue kappa = +/-(l+1)
multiplying two radial profiles (u, v) that obey a coupled first-order
system d/dr (u,v) = M(r; E, kappa) (u,v).  This module provides

* closed-form spectra (`hydrogen_energy`, `oscillator_energy`),
* the power-series route whose termination condition reproduces the
  oscillator spectrum (`oscillator_series`, `oscillator_termination_energy`),
* an independent shooting oracle (`radial_shoot`) that integrates the
  radial system from both ends and matches log-derivatives, used to
  referee between closed-form variants rather than trusting either.

Energies are in units of the mass unless a mass is passed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

__all__ = [
    "KIND_COULOMB",
    "KIND_OSCILLATOR",
    "RadialSystem",
    "RadialSolution",
    "SpectrumEntry",
    "hydrogen_energy",
    "hydrogen_spectrum",
    "radial_shoot",
    "oscillator_energy",
    "oscillator_series",
    "oscillator_termination_energy",
    "oscillator_spectrum",
]

KIND_COULOMB = "coulomb"
KIND_OSCILLATOR = "oscillator"


@dataclass(frozen=True)
class RadialSystem:
    """A radial eigenproblem: kappa sector, potential kind, and coupling.

    ``coupling`` is Zalpha for the Coulomb kind (must satisfy Zalpha < 1,
    else the effective centrifugal exponent turns imaginary) and m*omega
    for the oscillator kind.  ``energy`` is an optional trial energy used
    to seed the shooting bracket.
    """

    kappa: int
    kind: str
    coupling: float
    energy: float | None = None
    mass: float = 1.0

    def __post_init__(self):
        if self.kappa == 0:
            raise ValueError("kappa must be a nonzero integer")
        if self.kind not in (KIND_COULOMB, KIND_OSCILLATOR):
            raise ValueError(f"kind must be {KIND_COULOMB!r} or {KIND_OSCILLATOR!r}")
        if self.coupling <= 0:
            raise ValueError("coupling must be positive")
        if self.kind == KIND_COULOMB and self.coupling >= 1.0:
            raise ValueError("Coulomb coupling must satisfy Zalpha < 1")
        if self.mass <= 0:
            raise ValueError("mass must be positive")

    def matrix(self, energy: float, r) -> np.ndarray:
        """Coefficient matrix M(r) of the first-order system y' = M y."""
        k, m = self.kappa, self.mass
        if self.kind == KIND_COULOMB:
            za = self.coupling
            return np.array([
                [(k - 1) / r, -(energy + za / r + m)],
                [energy + za / r - m, -(k + 1) / r],
            ])
        mw = self.coupling
        return np.array([
            [(k - 1) / r - mw * r, -(energy + m)],
            [energy - m, -(k + 1) / r + mw * r],
        ])


@dataclass(frozen=True)
class RadialSolution:
    """Shooting result: located energy plus the stitched radial profiles."""

    energy: float
    r: np.ndarray
    u: np.ndarray
    v: np.ndarray
    nodes: int


@dataclass(frozen=True)
class SpectrumEntry:
    """One bound level: quantum labels, energy, and its degeneracy.

    ``degeneracy`` counts states sharing the energy; math.inf marks the
    oscillator levels whose energy does not depend on l at all.
    """

    n: int
    l: int
    kappa_sign: int
    energy: float
    degeneracy: float
    kind: str = KIND_COULOMB
    mass: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.l < 0 or self.kappa_sign not in (1, -1):
            raise ValueError("bad quantum labels")
        if self.kind == KIND_COULOMB and not abs(self.energy) < self.mass:
            raise ValueError("Coulomb bound states require |E| < m")
        if self.kind == KIND_OSCILLATOR and not self.energy**2 > self.mass**2:
            raise ValueError("oscillator states require E^2 > m^2")


def _check_hydrogen_args(n: int, l: int, zalpha: float) -> None:
    if n < 1:
        raise ValueError("n must be a positive integer")
    if l < 0:
        raise ValueError("l must be nonnegative")
    if not 0.0 < zalpha:
        raise ValueError("Zalpha must be positive")
    if zalpha >= 1.0:
        raise ValueError("Zalpha must be < 1")


def hydrogen_energy(n: int, l: int, zalpha: float, *, mass: float = 1.0,
                    nu_sign: int = -1) -> float:
    """Closed-form Coulomb bound-state energy.

    With nu = sqrt((l+1)^2 - Zalpha^2) (the default, ``nu_sign=-1``) this is

        E = m [1 + Zalpha^2/(n + nu)^2]^{-1/2}
          = m [1 - Zalpha^2/(n^2 + 2 n nu + (l+1)^2)]^{1/2},

    the Sommerfeld fine-structure series, and it is the version the
    shooting oracle confirms.  ``nu_sign=+1`` evaluates the same spectrum
    expression with nu = sqrt((l+1)^2 + Zalpha^2) instead; the two
    disagree at order (Zalpha)^4 and the oracle rules that variant out —
    it is kept so comparison tables can report the discrepancy.
    """
    _check_hydrogen_args(n, l, zalpha)
    if nu_sign not in (1, -1):
        raise ValueError("nu_sign must be +1 or -1")
    nu = math.sqrt((l + 1) ** 2 + nu_sign * zalpha**2)
    return mass * math.sqrt(1.0 - zalpha**2 / (n**2 + 2 * n * nu + (l + 1) ** 2))


# ---------------------------------------------------------------------------
# shooting oracle


def _frobenius_start(system: RadialSystem, energy: float, r0: float) -> np.ndarray:
    """Two-term series solution at r0 (overall power of r0 dropped)."""
    k, m = system.kappa, system.mass
    if system.kind == KIND_COULOMB:
        za = system.coupling
        gamma = math.sqrt(k * k - za * za)
        s = gamma - 1.0
        # leading coefficients; the two closed forms avoid cancellation
        # on either sign of kappa
        b0 = za / (k + gamma) if k > 0 else (k - gamma) / za
        rhs = np.array([-(energy + m) * b0, (energy - m) * 1.0])
        mat = np.array([[s + 2 - k, za], [-za, s + 2 + k]])
        a1, b1 = np.linalg.solve(mat, rhs)
        return np.array([1.0 + a1 * r0, b0 + b1 * r0])
    # linear coupling: the potential is regular, so the leading branch is
    # a pure power with the partner component one order up
    if k > 0:
        return np.array([1.0, (energy - m) * r0 / (2 * k + 1)])
    kk = -k
    return np.array([-(energy + m) * r0 / (2 * kk + 1), 1.0])


def _integrate_leg(system, energy, r_start, r_end, y0, *, log_leg, rtol,
                   samples=0):
    """Integrate y' = M y between two radii with a 4/5 embedded pair.

    Returns (unit end state, (r, u, v) samples or None).  The log_leg
    flag integrates in ln r, which tames the 1/r coefficients near the
    origin; ``samples`` asks for that many dense-output points.
    """
    if log_leg:
        def rhs(t, y):
            r = math.exp(t)
            return r * (system.matrix(energy, r) @ y)
        span = (math.log(r_start), math.log(r_end))
    else:
        def rhs(t, y):
            return system.matrix(energy, t) @ y
        span = (r_start, r_end)
    y0 = np.asarray(y0, dtype=float)
    sol = solve_ivp(rhs, span, y0 / np.linalg.norm(y0), method="RK45",
                    rtol=rtol, atol=1e-14, dense_output=samples > 0)
    if not sol.success:
        raise RuntimeError(
            f"radial integration failed ({system.kind}, E={energy}): {sol.message}")
    end = sol.y[:, -1]
    norm_end = np.linalg.norm(end)
    if not np.isfinite(norm_end) or norm_end == 0.0:
        raise RuntimeError("radial integration overflowed; system too stiff")
    triple = None
    if samples:
        ts = np.linspace(span[0], span[1], samples)
        ys = sol.sol(ts)
        rs = np.exp(ts) if log_leg else ts
        triple = (rs, ys[0], ys[1])
    return end / norm_end, triple


def _coulomb_ranges(system: RadialSystem, energy: float):
    m, za = system.mass, system.coupling
    r0 = 1e-6 / m
    lam = math.sqrt(max(m * m - energy * energy, 1e-300))
    r_turn = za / max(m - energy, 1e-300)
    r_mid = max(r_turn, 2.0 / m, 50.0 * r0)
    r_max = r_mid + 34.0 / lam
    return r0, r_mid, r_max


def _oscillator_ranges(system: RadialSystem, energy: float):
    m, mw = system.mass, system.coupling
    scale = 1.0 / math.sqrt(mw)
    r0 = 1e-6 * scale
    rho_mid = 1.0 + math.sqrt(max((energy**2 - m * m) / (4 * mw), 1.0))
    return r0, rho_mid * scale, (rho_mid + 5.5) * scale


def _inward_start(system: RadialSystem, energy: float, r_max: float) -> np.ndarray:
    m = system.mass
    if system.kind == KIND_COULOMB:
        return np.array([1.0, math.sqrt((m - energy) / (m + energy))])
    mw = system.coupling
    return np.array([1.0, -(energy - m) / (2.0 * mw * r_max)])


def _mismatch(system: RadialSystem, energy: float, *, rtol: float, samples=0):
    """Log-derivative mismatch at the matching radius, plus leg samples."""
    if system.kind == KIND_COULOMB:
        r0, r_mid, r_max = _coulomb_ranges(system, energy)
    else:
        r0, r_mid, r_max = _oscillator_ranges(system, energy)
    y_out, out_samples = _integrate_leg(
        system, energy, r0, r_mid, _frobenius_start(system, energy, r0),
        log_leg=True, rtol=rtol, samples=samples)
    y_in, in_samples = _integrate_leg(
        system, energy, r_max, r_mid, _inward_start(system, energy, r_max),
        log_leg=False, rtol=rtol, samples=samples)
    f = y_out[0] * y_in[1] - y_out[1] * y_in[0]
    return f, (y_out, y_in, out_samples, in_samples, r_mid)


def _count_nodes(u: np.ndarray) -> int:
    s = np.sign(u[np.abs(u) > 1e-9 * np.max(np.abs(u))])
    return int(np.count_nonzero(s[1:] * s[:-1] < 0))


def radial_shoot(
    system: RadialSystem,
    *,
    bracket: tuple[float, float] | None = None,
    bisect_tol: float = 1e-10,
    rtol: float = 3e-9,
    scan_points: int = 90,
) -> RadialSolution:
    """Locate a bound state of ``system`` by two-sided shooting.

    The coupled system is integrated outward from r ~ 0 (series start, in
    log r) and inward from the far decay region, and the eigenvalue is the
    zero of the log-derivative mismatch at the matching radius, refined by
    bisection to ``bisect_tol * mass``.  The energy bracket is taken from
    ``bracket``, else grown around ``system.energy``, else found by
    scanning (0, m) — in which case the lowest state in the sector is
    returned.

    Raises ValueError when the mismatch does not change sign in the
    bracket, RuntimeError if the integrator gives up (stiffness).
    """
    m = system.mass

    def f(e: float) -> float:
        return _mismatch(system, e, rtol=rtol)[0]

    if bracket is not None:
        lo, hi = bracket
        f_lo, f_hi = f(lo), f(hi)
        if f_lo * f_hi > 0:
            raise ValueError(
                f"no sign change in matching function over [{lo}, {hi}]")
    elif system.energy is not None:
        # grow a window around the seed; Coulomb levels accumulate at E=m,
        # so the window there is relative to the binding energy m-E rather
        # than absolute (an absolute window would swallow neighbouring
        # states at weak coupling)
        lo = hi = None
        seed = system.energy
        f_seed = f(seed)
        for k in range(10):
            if system.kind == KIND_COULOMB:
                w = 1e-4 * 4.0**k
                binding = m - seed
                cand_lo = m - binding * (1 + w)
                cand_hi = m - binding / (1 + w)
            else:
                w = (1e-3 * m) * 4.0**k
                cand_lo = max(seed - w, m * (1 + 1e-13))
                cand_hi = seed + w
            f_cand_lo = f(cand_lo)
            if f_cand_lo * f_seed < 0:
                lo, hi, f_lo, f_hi = cand_lo, seed, f_cand_lo, f_seed
                break
            f_cand_hi = f(cand_hi)
            if f_cand_hi * f_seed < 0:
                lo, hi, f_lo, f_hi = seed, cand_hi, f_seed, f_cand_hi
                break
        if lo is None:
            raise ValueError(
                f"no sign change in matching function near seed E={seed}")
    else:
        if system.kind != KIND_COULOMB:
            raise ValueError(
                "oscillator systems need a bracket or trial energy")
        grid = np.linspace(0.05 * m, m * (1 - 1e-5), scan_points)
        vals = [f(e) for e in grid]
        lo = hi = None
        for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
            if fa * fb < 0:
                lo, hi, f_lo, f_hi = a, b, fa, fb
                break
        if lo is None:
            raise ValueError("no sign change in matching function over (0, m)")

    while hi - lo > bisect_tol * m:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if f_lo * f_mid < 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    energy = 0.5 * (lo + hi)

    # final pass: stitch the two legs into sampled radial profiles,
    # scaling the inward leg to agree with the outward one at the junction
    _, (y_out, y_in, out_s, in_s, r_mid) = _mismatch(
        system, energy, rtol=rtol, samples=256)
    out_end = np.array([out_s[1][-1], out_s[2][-1]])
    in_end = np.array([in_s[1][-1], in_s[2][-1]])
    scale = (out_end @ in_end) / (in_end @ in_end)
    r = np.concatenate([out_s[0], in_s[0][::-1]])
    u = np.concatenate([out_s[1], scale * in_s[1][::-1]])
    v = np.concatenate([out_s[2], scale * in_s[2][::-1]])
    top = np.max(np.abs(u))
    return RadialSolution(energy=energy, r=r, u=u / top, v=v / top,
                          nodes=_count_nodes(u))


# ---------------------------------------------------------------------------
# linear coupling ("oscillator") spectra


def _check_oscillator_args(n, l, kappa_sign, m_omega):
    if n < 1:
        raise ValueError("n must be a positive integer")
    if l < 0:
        raise ValueError("l must be nonnegative")
    if kappa_sign not in (1, -1):
        raise ValueError("kappa_sign must be +1 or -1")
    if m_omega <= 0:
        raise ValueError("m_omega must be positive")


def oscillator_energy(n: int, l: int, kappa_sign: int, m_omega: float,
                      *, mass: float = 1.0) -> tuple[float, float]:
    """Both energy roots of the linear-coupling spectrum.

    E^2 - m^2 = 4 n m omega in the positive-kappa sector (no l dependence,
    hence infinitely degenerate levels) and 2(2n + 2l + 1) m omega in the
    negative-kappa sector.  Returns (positive root, negative root).
    """
    _check_oscillator_args(n, l, kappa_sign, m_omega)
    gap = 4 * n * m_omega if kappa_sign > 0 else 2 * (2 * n + 2 * l + 1) * m_omega
    root = math.sqrt(mass * mass + gap)
    return (root, -root)


def _series_coefficients(kappa_sign, energy, l, m_omega, n_terms, seed, mass):
    """Raw two-term recursion arrays (A_n, B_n), n = 0 .. n_terms."""
    ep = (energy + mass) / math.sqrt(m_omega)
    em = (energy - mass) / math.sqrt(m_omega)
    a = np.zeros(n_terms + 1)
    b = np.zeros(n_terms + 1)
    if kappa_sign > 0:
        a[0] = seed
        b[0] = em * a[0] / (2 * l + 3)
        for n in range(1, n_terms + 1):
            a[n] = -ep * b[n - 1] / (2 * n)
            b[n] = (em * a[n] + 2 * b[n - 1]) / (2 * n + 2 * l + 3)
    else:
        b[0] = seed
        a[0] = -ep * b[0] / (2 * l + 3)
        for n in range(1, n_terms + 1):
            b[n] = (em * a[n - 1] + 2 * b[n - 1]) / (2 * n)
            a[n] = -ep * b[n] / (2 * n + 2 * l + 3)
    return a, b


def oscillator_series(kappa_sign: int, energy: float, l: int, m_omega: float,
                      n_max: int = 200, *, seed: float = 1.0, mass: float = 1.0,
                      rel_tol: float = 1e-12) -> tuple[bool, np.ndarray]:
    """Run the power-series recursions and report termination.

    Returns (terminates, coefficients) with coefficients[n] = (A_n, B_n).
    The series terminates — every later coefficient vanishes — exactly at
    the energies from `oscillator_energy`; termination is declared when a
    coefficient pair drops below ``rel_tol`` times the running maximum.
    A series that neither terminates nor stays finite within ``n_max``
    terms is reported as non-terminating (a non-eigenvalue).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if kappa_sign not in (1, -1):
        raise ValueError("kappa_sign must be +1 or -1")
    if l < 0:
        raise ValueError("l must be nonnegative")
    if m_omega <= 0:
        raise ValueError("m_omega must be positive")
    a, b = _series_coefficients(kappa_sign, energy, l, m_omega, n_max, seed, mass)
    coeffs = np.column_stack([a, b])
    if seed == 0.0:
        return True, coeffs
    lead = max(abs(a[0]), abs(b[0]))
    for n in range(1, n_max + 1):
        if not math.isfinite(abs(a[n]) + abs(b[n])):
            return False, coeffs[: n + 1]
        # true termination kills B_n outright (and with it everything
        # after); a merely convergent tail decays like 1/n per term and
        # never trips a ratio threshold this small.  The floor on the
        # previous coefficient keeps gradual underflow of a convergent
        # tail from mimicking termination.
        if abs(b[n]) <= rel_tol * abs(b[n - 1]) and abs(b[n - 1]) > 1e-200 * lead:
            return True, coeffs[: n + 1]
    return False, coeffs


def oscillator_termination_energy(kappa_sign: int, n: int, l: int,
                                  m_omega: float, *, mass: float = 1.0) -> float:
    """Positive energy at which the series recursion truncates at index n.

    Root-finds the final recursion coefficient B_n(E) directly, giving a
    route to the spectrum that is independent of the closed forms in
    `oscillator_energy`.
    """
    _check_oscillator_args(n, l, kappa_sign, m_omega)

    def target(e: float) -> float:
        a, b = _series_coefficients(kappa_sign, e, l, m_omega, n, 1.0, mass)
        return b[n]

    gap = 4 * n * m_omega if kappa_sign > 0 else 2 * (2 * n + 2 * l + 1) * m_omega
    guess = math.sqrt(mass * mass + gap)
    lo, hi = guess * 0.93, guess * 1.07
    if target(lo) * target(hi) > 0:
        raise ValueError("termination coefficient does not change sign")
    return brentq(target, lo, hi, xtol=1e-14, rtol=8.9e-16)


# ---------------------------------------------------------------------------
# spectrum tables


def hydrogen_spectrum(n_max: int, l_max: int, zalpha: float,
                      *, mass: float = 1.0) -> list[SpectrumEntry]:
    """Closed-form Coulomb levels for n <= n_max, l <= l_max, both kappa signs.

    The energy depends only on (n, l); each entry's degeneracy is the
    angular multiplicity 2(l+1) of its kappa sector.
    """
    out = []
    for n in range(1, n_max + 1):
        for l in range(l_max + 1):
            e = hydrogen_energy(n, l, zalpha, mass=mass)
            for ks in (1, -1):
                out.append(SpectrumEntry(n=n, l=l, kappa_sign=ks, energy=e,
                                         degeneracy=2 * (l + 1), kind=KIND_COULOMB,
                                         mass=mass))
    return out


def oscillator_spectrum(n_max: int, l_max: int, m_omega: float,
                        *, mass: float = 1.0) -> list[SpectrumEntry]:
    """Positive-energy oscillator levels for both kappa sectors.

    Positive-kappa levels carry degeneracy = inf (energy independent of l);
    a negative-kappa level with q = n + l is shared by the q label pairs
    (n', l') = (1, q-1) ... (q, 0), so its degeneracy is q.
    """
    out = []
    for n in range(1, n_max + 1):
        for l in range(l_max + 1):
            e_pos = oscillator_energy(n, l, 1, m_omega, mass=mass)[0]
            out.append(SpectrumEntry(n=n, l=l, kappa_sign=1, energy=e_pos,
                                     degeneracy=math.inf, kind=KIND_OSCILLATOR,
                                     mass=mass))
            e_neg = oscillator_energy(n, l, -1, m_omega, mass=mass)[0]
            out.append(SpectrumEntry(n=n, l=l, kappa_sign=-1, energy=e_neg,
                                     degeneracy=n + l, kind=KIND_OSCILLATOR,
                                     mass=mass))
    return out
