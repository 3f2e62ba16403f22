"""Spherical monogenics and angular-momentum machinery for central fields.

The angular eigenfunctions used here take values in the even Pauli
subalgebra and reduce central-field wave equations to pairs of coupled
radial equations.  A single compact expression covers the whole multiplet:

    psi_l^m(theta, phi) = [(l+m+1) P_l^m(cos th) - P_l^{m+1}(cos th) i sig_phi]
                          * exp(m phi i sig3)

with l >= 0 and -1-l <= m <= l.  They satisfy -x^grad psi = l psi and
J3 psi = (m + 1/2) psi, where the J_k are the Hermitian angular-momentum
operators acting by left multiplication with frame bivectors plus a
right factor of i sig3.

Sampled fields on the sphere use the same (..., 8) coefficient layout as
`stakit.spinors`: grids must keep clear of the poles (the frame vectors
sigma_theta, sigma_phi blow up there), so theta grids are cell-centred
and the finite-difference operators return NaN bands at the theta edges.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import Multivector, from_dense, to_dense
from .spinors import (
    ISP3,
    PAULI_SIG,
    SIG3,
    pauli_field_product,
    pauli_field_right_j,
    pauli_grid,
    pauli_left_matrix,
)

__all__ = [
    "assoc_legendre",
    "legendre_table",
    "monogenic_eval",
    "monogenic_field",
    "spherical_frame",
    "angular_apply",
    "ANGULAR_OPS",
    "degeneracy",
    "eigenvalue_range",
    "normalization",
]

_DENSE_SIGMA = np.array([to_dense(SIG3[k]) for k in (1, 2, 3)])
_DENSE_ISIGMA = np.array([to_dense(ISP3[k]) for k in (1, 2, 3)])
_LEFT_ISIGMA = [pauli_left_matrix(ISP3[k]) for k in (1, 2, 3)]


def _check_l(l: int) -> None:
    if l < 0:
        raise ValueError(f"l must be nonnegative, got {l}")


def _check_lm(l: int, m: int) -> None:
    _check_l(l)
    if not -1 - l <= m <= l:
        raise ValueError(f"m={m} outside [-1-l, l] = [{-1 - l}, {l}]")


def assoc_legendre(l: int, m: int, x) -> np.ndarray:
    """Associated Legendre function P_l^m(x), vectorised over x.

    Uses the Condon-Shortley (-1)^m phase, so P_1^1(x) = -sqrt(1-x^2).
    Defined to be zero for |m| > l; negative orders follow from
    P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.  Evaluation is by upward
    recursion in degree starting from the diagonal P_m^m, which is
    well-conditioned for the degrees used here (l up to ~64).
    """
    _check_l(l)
    x = np.asarray(x, dtype=float)
    if m < 0:
        if -m > l:
            return np.zeros_like(x)
        scale = (-1) ** m * math.factorial(l + m) / math.factorial(l - m)
        return scale * assoc_legendre(l, -m, x)
    if m > l:
        return np.zeros_like(x)
    if m == 0:
        p_mm = np.ones_like(x)
    else:
        odd_fac = math.prod(range(1, 2 * m, 2))
        p_mm = (-1) ** m * odd_fac * np.sqrt(np.clip(1.0 - x * x, 0.0, None)) ** m
    if l == m:
        return p_mm
    p_prev, p_curr = p_mm, (2 * m + 1) * x * p_mm
    for deg in range(m + 2, l + 1):
        p_prev, p_curr = (
            p_curr,
            ((2 * deg - 1) * x * p_curr - (deg + m - 1) * p_prev) / (deg - m),
        )
    return p_curr


def legendre_table(l_max: int, x) -> dict[tuple[int, int], np.ndarray]:
    """All P_l^m(x) for 0 <= l <= l_max, -l <= m <= l, keyed by (l, m)."""
    _check_l(l_max)
    return {
        (l, m): assoc_legendre(l, m, x)
        for l in range(l_max + 1)
        for m in range(-l, l + 1)
    }


def monogenic_field(l: int, m: int, theta, phi) -> np.ndarray:
    """Evaluate psi_l^m on broadcast theta/phi arrays as a (..., 8) field."""
    _check_lm(l, m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct = np.cos(theta)
    a = (l + m + 1) * assoc_legendre(l, m, ct)
    b = assoc_legendre(l, m + 1, ct)
    sp, cp = np.sin(phi), np.cos(phi)
    # i sigma_phi = -sin(phi) i sigma_1 + cos(phi) i sigma_2, so the bracket
    # (l+m+1) P - P^+ i sigma_phi has components (a, b sp, -b cp, 0)
    bracket = pauli_grid(a, b * sp, -b * cp, 0.0)
    rotor = pauli_grid(np.cos(m * phi), 0.0, 0.0, np.sin(m * phi))
    return pauli_field_product(bracket, rotor)


def monogenic_eval(l: int, m: int, theta: float, phi: float) -> Multivector:
    """psi_l^m at a single point, as an even-subalgebra multivector."""
    return from_dense(PAULI_SIG, monogenic_field(l, m, float(theta), float(phi)))


def spherical_frame(theta, phi) -> dict[str, np.ndarray]:
    """Unit frame fields on the sphere as (..., 8) coefficient arrays.

    Keys: 'sigma_r', 'sigma_theta', 'sigma_phi' and their duals
    'i_sigma_r', 'i_sigma_theta', 'i_sigma_phi'.  theta/phi broadcast.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    zero = np.zeros(np.broadcast_shapes(theta.shape, phi.shape))
    comps = {
        "sigma_r": (st * cp, st * sp, ct + zero),
        "sigma_theta": (ct * cp, ct * sp, -st + zero),
        "sigma_phi": (-sp + zero, cp + zero, zero),
    }
    out = {}
    for name, c in comps.items():
        stack = np.stack(np.broadcast_arrays(*c))
        out[name] = np.einsum("c...,ci->...i", stack, _DENSE_SIGMA)
        out["i_" + name] = np.einsum("c...,ci->...i", stack, _DENSE_ISIGMA)
    return out


# first-derivative central stencils, offsets -half..half
_FD = {
    4: (2, np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0),
    6: (3, np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0),
}


def _dtheta(f: np.ndarray, h: float, order: int) -> np.ndarray:
    half, w = _FD[order]
    acc = sum(c * np.roll(f, half - i, axis=0) for i, c in enumerate(w) if c)
    out = np.full_like(f, np.nan)
    out[half:-half] = acc[half:-half] / h
    return out


def _dphi(f: np.ndarray, h: float, order: int) -> np.ndarray:
    half, w = _FD[order]
    return sum(c * np.roll(f, half - i, axis=1) for i, c in enumerate(w) if c) / h


def _uniform_step(grid: np.ndarray, name: str) -> float:
    steps = np.diff(grid)
    if len(steps) == 0 or not np.allclose(steps, steps[0], rtol=1e-10, atol=1e-14):
        raise ValueError(f"{name} grid must be uniformly spaced")
    return float(steps[0])


ANGULAR_OPS = ("x_wedge_grad", "J1", "J2", "J3", "J+", "J-", "kappa_precursor")


def angular_apply(
    which: str,
    field: np.ndarray,
    theta: np.ndarray,
    phi: np.ndarray,
    order: int = 4,
) -> np.ndarray:
    """Apply an angular operator to a field sampled on a (theta, phi) grid.

    ``which`` selects among:

    * ``x_wedge_grad``    -- the bivector operator x^grad (monogenics obey
      -x^grad psi = l psi),
    * ``J1``/``J2``/``J3``-- angular-momentum components,
      J_k f = (i sig_k . (x^grad) f - (1/2) i sig_k f) i sig3,
    * ``J+``/``J-``       -- ladder combinations J1 f +/- (J2 f) i sig3,
    * ``kappa_precursor`` -- (1 - x^grad) f, the spatial factor of the
      K operator; eigenvalues +/-(l+1) on the two monogenic towers.

    ``field`` is (Ntheta, Nphi, 8) over a uniform, pole-free theta grid
    (cell centres work well) and a uniform phi grid covering the full
    circle; derivatives are central differences of the given ``order``
    (4 or 6), periodic in phi.  Rows within the theta stencil reach of
    the ends come back as NaN — the frame is singular on the axis, so
    those pole bands are excluded rather than extrapolated.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    field = np.asarray(field, dtype=float)
    if field.shape != (len(theta), len(phi), 8):
        raise ValueError("field must have shape (len(theta), len(phi), 8)")
    if order not in _FD:
        raise ValueError(f"order must be one of {sorted(_FD)}")
    h_t = _uniform_step(theta, "theta")
    h_p = _uniform_step(phi, "phi")
    if not math.isclose(len(phi) * h_p, 2 * math.pi, rel_tol=1e-9):
        raise ValueError("phi grid must cover the full circle")
    if theta[0] <= 0.0 or theta[-1] >= math.pi:
        raise ValueError("theta grid must lie strictly inside (0, pi)")

    dth = _dtheta(field, h_t, order)
    dph = _dphi(field, h_p, order)
    inv_sin = (1.0 / np.sin(theta))[:, None, None]

    if which == "x_wedge_grad" or which == "kappa_precursor":
        frame = spherical_frame(theta[:, None], phi[None, :])
        xw = pauli_field_product(
            frame["i_sigma_phi"], dth
        ) - pauli_field_product(frame["i_sigma_theta"], dph * inv_sin)
        return xw if which == "x_wedge_grad" else field - xw

    st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
    sp, cp = np.sin(phi)[None, :], np.cos(phi)[None, :]
    ones = np.ones((len(theta), len(phi)))
    s_theta = (ct * cp, ct * sp, -st * ones)
    s_phi = (-sp * ones, cp * ones, np.zeros_like(ones))

    def component(k: int) -> np.ndarray:
        # J_k before the overall right i sig3 factor: the scalar operator
        # i sig_k . (x^grad) = -[sig_phi]_k d_theta + [sig_theta]_k (1/sin) d_phi
        scal = -s_phi[k][..., None] * dth + s_theta[k][..., None] * inv_sin * dph
        spin = np.einsum("jk,...j->...k", _LEFT_ISIGMA[k], field)
        return pauli_field_right_j(scal - 0.5 * spin)

    if which in ("J1", "J2", "J3"):
        return component(int(which[1]) - 1)
    if which == "J+":
        return component(0) + pauli_field_right_j(component(1))
    if which == "J-":
        return component(0) - pauli_field_right_j(component(1))
    raise ValueError(f"unknown operator {which!r}; choices: {ANGULAR_OPS}")


def degeneracy(l: int) -> int:
    """Number of J3 eigenstates in the degree-l multiplet: 2(l+1)."""
    _check_l(l)
    return 2 * (l + 1)


def eigenvalue_range(l: int) -> tuple[float, float]:
    """Extremal J3 eigenvalues (mu-, mu+) = (-(l+1/2), l+1/2)."""
    _check_l(l)
    return (-(l + 0.5), l + 0.5)


def normalization(l: int, m: int) -> float:
    """Surface integral of psi psi~ over the sphere: 4 pi (l+m+1)!/(l-m)!."""
    _check_lm(l, m)
    return 4.0 * math.pi * math.factorial(l + m + 1) / math.factorial(l - m)
