"""Column-spinor translation layer and Dirac-theory observables.

Quantum-mechanical column spinors (2-component Pauli, 4-component Dirac)
are placed in one-to-one correspondence with even multivectors.  Operator
actions become left/right multiplications, which lets every representation
matrix be *generated* from the algebra instead of hand-coded.  Also here:
bilinear observables, plane-wave states, discrete symmetries, and a
residual evaluator for the low-velocity (Pauli) reduction on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import sta
from .algebra import (
    Multivector,
    Signature,
    blade_order,
    grade_project,
    hermitian_adjoint,
    reverse,
    scalar_product,
    to_dense,
)

# ---------------------------------------------------------------------------
# Pauli algebra (three euclidean dimensions)

PAULI_SIG = Signature(3, 0)

ONE3 = Multivector.scalar(PAULI_SIG, 1.0)
SIG3 = (None,) + tuple(Multivector.basis_vector(PAULI_SIG, k) for k in range(3))
IP3 = SIG3[1] * SIG3[2] * SIG3[3]  # unit pseudoscalar, squares to -1
ISP3 = (None, IP3 * SIG3[1], IP3 * SIG3[2], IP3 * SIG3[3])

#: parameter basis for the Pauli even subalgebra: phi = a0 + a_k (i sigma_k)
PAULI_EVEN_BASIS = (ONE3, ISP3[1], ISP3[2], ISP3[3])


def _extractor(basis):
    """Map each single-blade basis element to (blade, 1/coeff) for readout."""
    table = {}
    for idx, mv in enumerate(basis):
        terms = mv.terms
        if len(terms) != 1:
            raise AssertionError("parameter basis elements must be single blades")
        (blade, coeff), = terms.items()
        table[blade] = (idx, 1.0 / coeff)
    return table


_PAULI_EXTRACT = _extractor(PAULI_EVEN_BASIS)
_DIRAC_EXTRACT = _extractor(sta.EVEN_PARAM_BASIS)


def _components_from(mv, extract, n):
    out = np.zeros(n)
    for blade, coeff in mv.terms.items():
        if blade not in extract:
            raise ValueError(f"multivector has a component outside the spinor space: {mv}")
        idx, inv = extract[blade]
        out[idx] = coeff * inv
    return out


# ---------------------------------------------------------------------------
# Pauli spinors

def pauli_from_column(column) -> Multivector:
    """Convert a 2-component complex column to a Pauli-even multivector.

    The identification is (a0 + j a3, -a2 + j a1) <-> a0 + a_k i sigma_k,
    so spin-up (1, 0) maps to 1 and spin-down (0, 1) maps to -i sigma_2.
    """
    c = np.asarray(column, dtype=complex)
    if c.shape != (2,):
        raise ValueError("expected a length-2 complex column")
    a0, a3 = c[0].real, c[0].imag
    a2, a1 = -c[1].real, c[1].imag
    comps = (a0, a1, a2, a3)
    out = Multivector.zero(PAULI_SIG)
    for a, b in zip(comps, PAULI_EVEN_BASIS):
        out = out + b * a
    return out


def pauli_to_column(phi: Multivector) -> np.ndarray:
    """Inverse of :func:`pauli_from_column`."""
    if phi.signature != PAULI_SIG:
        raise ValueError("not a Pauli-algebra element")
    a0, a1, a2, a3 = _components_from(phi, _PAULI_EXTRACT, 4)
    return np.array([a0 + 1j * a3, -a2 + 1j * a1])


def pauli_apply_sigma(k: int, phi: Multivector) -> Multivector:
    """Action equivalent to the k-th Pauli matrix on the column: sigma_k phi sigma_3."""
    if k not in (1, 2, 3):
        raise ValueError("sigma index must be 1, 2 or 3")
    return SIG3[k] * phi * SIG3[3]


def pauli_apply_j(phi: Multivector) -> Multivector:
    """Action equivalent to multiplying the column by the imaginary unit."""
    return phi * ISP3[3]


def pauli_inner(phi: Multivector, chi: Multivector) -> complex:
    """Spinor inner product <phi|chi>, returned as an ordinary complex number.

    Real part <phi^dag chi>, imaginary part -<phi^dag chi i sigma_3>; the
    dagger in the euclidean algebra is plain reversion.
    """
    d = reverse(phi) * chi
    return complex(d.scalar_part, -scalar_product(reverse(phi), chi * ISP3[3]))


def pauli_spin_vector(phi: Multivector) -> Multivector:
    """Spin (polarisation) vector phi sigma_3 phi^dag; length is the density."""
    return phi * SIG3[3] * reverse(phi)


# ---------------------------------------------------------------------------
# Dirac spinors: components, columns, and generated representation matrices

def dirac_from_components(comps) -> Multivector:
    """Build the even element a0 + a_k i sigma_k + (b0 + b_k i sigma_k) sigma_3.

    ``comps`` holds the eight reals (a0, a1, a2, a3, b0, b1, b2, b3).
    """
    c = np.asarray(comps, dtype=float)
    if c.shape != (8,):
        raise ValueError("expected 8 real components")
    out = Multivector.zero(sta.SIG)
    for a, b in zip(c, sta.EVEN_PARAM_BASIS):
        out = out + b * float(a)
    return out


def dirac_to_components(psi: Multivector) -> np.ndarray:
    if psi.signature != sta.SIG:
        raise ValueError("not a spacetime-algebra element")
    return _components_from(psi, _DIRAC_EXTRACT, 8)


def dirac_from_column(column) -> Multivector:
    """4-component complex column (Dirac--Pauli representation) -> even element."""
    c = np.asarray(column, dtype=complex)
    if c.shape != (4,):
        raise ValueError("expected a length-4 complex column")
    a0, a3 = c[0].real, c[0].imag
    a2, a1 = -c[1].real, c[1].imag
    b0, b3 = c[2].real, c[2].imag
    b2, b1 = -c[3].real, c[3].imag
    return dirac_from_components((a0, a1, a2, a3, b0, b1, b2, b3))


def dirac_to_column(psi: Multivector) -> np.ndarray:
    a0, a1, a2, a3, b0, b1, b2, b3 = dirac_to_components(psi)
    return np.array([a0 + 1j * a3, -a2 + 1j * a1, b0 + 1j * b3, -b2 + 1j * b1])


def apply_gamma(mu: int, psi: Multivector) -> Multivector:
    """Action equivalent to the mu-th gamma matrix: gamma_mu psi gamma_0."""
    return sta.GAMMA[mu] * psi * sta.GAMMA[0]


def apply_j(psi: Multivector) -> Multivector:
    """Action equivalent to the complex unit j on the column: psi i sigma_3."""
    return psi * sta.ISIGMA[3]


def apply_gamma5(psi: Multivector) -> Multivector:
    """Chirality operator action: psi sigma_3."""
    return psi * sta.SIGMA[3]


def _component_matrix(op: Callable[[Multivector], Multivector]) -> np.ndarray:
    """8x8 real matrix of a linear map on the even subalgebra, in component order."""
    cols = []
    for b in sta.EVEN_PARAM_BASIS:
        cols.append(_components_from(op(b), _DIRAC_EXTRACT, 8))
    return np.array(cols).T


#: real 8x8 matrices of the standard operator actions on the component vector
REP_MATRICES = {
    "gamma0": _component_matrix(lambda p: apply_gamma(0, p)),
    "gamma1": _component_matrix(lambda p: apply_gamma(1, p)),
    "gamma2": _component_matrix(lambda p: apply_gamma(2, p)),
    "gamma3": _component_matrix(lambda p: apply_gamma(3, p)),
    "gamma5": _component_matrix(apply_gamma5),
    "j": _component_matrix(apply_j),
}


def rep_matrix(name: str) -> np.ndarray:
    """Return a copy of the named 8x8 real representation matrix."""
    try:
        return REP_MATRICES[name].copy()
    except KeyError:
        raise ValueError(f"unknown operator {name!r}; choices: {sorted(REP_MATRICES)}") from None


# Weyl representation: psi = chi (1+sigma_3)/sqrt(2) - etabar (1-sigma_3)/sqrt(2),
# with chi from the upper two and etabar from the lower two column components.
_RT2 = math.sqrt(0.5)
_P_PLUS = (sta.ONE + sta.SIGMA[3]) * _RT2
_P_MINUS = (sta.ONE - sta.SIGMA[3]) * _RT2


def weyl_from_components(comps) -> Multivector:
    c = np.asarray(comps, dtype=float)
    if c.shape != (8,):
        raise ValueError("expected 8 real components")
    chi = dirac_from_components(np.concatenate([c[:4], np.zeros(4)]))
    etabar = dirac_from_components(np.concatenate([c[4:], np.zeros(4)]))
    return chi * _P_PLUS - etabar * _P_MINUS


_WEYL_MATRIX = np.array([
    _components_from(weyl_from_components(row), _DIRAC_EXTRACT, 8)
    for row in np.eye(8)
]).T
_WEYL_INVERSE = np.linalg.inv(_WEYL_MATRIX)


def weyl_to_components(psi: Multivector) -> np.ndarray:
    return _WEYL_INVERSE @ dirac_to_components(psi)


def weyl_from_column(column) -> Multivector:
    c = np.asarray(column, dtype=complex)
    if c.shape != (4,):
        raise ValueError("expected a length-4 complex column")
    a0, a3 = c[0].real, c[0].imag
    a2, a1 = -c[1].real, c[1].imag
    b0, b3 = c[2].real, c[2].imag
    b2, b1 = -c[3].real, c[3].imag
    return weyl_from_components((a0, a1, a2, a3, b0, b1, b2, b3))


def dirac_inner(psi: Multivector, phi: Multivector) -> complex:
    """Dirac column inner product <psi|phi> via <psi^dag phi> - <psi^dag phi i sigma_3> j."""
    dag = hermitian_adjoint(psi, sta.GAMMA[0])
    return complex(scalar_product(dag, phi), -scalar_product(dag, phi * sta.ISIGMA[3]))


# ---------------------------------------------------------------------------
# observables

@dataclass(frozen=True)
class Observables:
    """Bilinear covariants of a Dirac state.

    rho is the scalar density, beta the chiral angle in (-pi, pi], current
    the conserved probability current (grade 1), spin the spin vector
    (grade 1) and spin_bivector the spin plane scaled by rho (grade 2).
    """

    rho: float
    beta: float
    current: Multivector
    spin: Multivector
    spin_bivector: Multivector


def observables(psi: Multivector, tol: float = 1e-12) -> Observables:
    """Compute rho, beta and the bilinear vectors of an even state.

    Raises ValueError for a singular state (rho = 0, beta undefined).
    """
    if psi.signature != sta.SIG or any(g % 2 for g in psi.grades()):
        raise ValueError("expected an even spacetime multivector")
    rt = reverse(psi)
    dens = psi * rt
    s0 = dens.scalar_part
    s4 = dens.blade_coefficient((0, 1, 2, 3))
    rho = math.hypot(s0, s4)
    if rho <= tol * max(1.0, psi.coeff_norm() ** 2):
        raise ValueError("singular state: rho vanishes, beta is undefined")
    beta = math.atan2(s4, s0)
    return Observables(
        rho=rho,
        beta=beta,
        current=grade_project(psi * sta.GAMMA[0] * rt, 1),
        spin=grade_project(psi * sta.GAMMA[3] * rt, 1),
        spin_bivector=grade_project(psi * sta.ISIGMA[3] * rt, 2),
    )


# ---------------------------------------------------------------------------
# plane waves

def _as_four_vector(x) -> Multivector:
    if isinstance(x, Multivector):
        return x
    t, x1, x2, x3 = x
    return sta.four_vector(float(t), float(x1), float(x2), float(x3))


def _is_pauli_even(phi: Multivector) -> bool:
    return all(blade in _DIRAC_EXTRACT and _DIRAC_EXTRACT[blade][0] < 4 for blade in phi.terms)


@dataclass(frozen=True)
class PlaneWave:
    """A single-momentum solution of the free electron equation.

    ``amplitude`` is the constant spinor (boost times rest rotor, with a
    trailing sigma_3 for the negative-energy branch); calling the object
    evaluates the full state at a spacetime point.
    """

    momentum: Multivector
    mass: float
    energy: float
    boost: Multivector
    rest_rotor: Multivector
    energy_sign: int
    amplitude: Multivector

    def phase_rotor(self, x) -> Multivector:
        arg = -self.energy_sign * scalar_product(self.momentum, _as_four_vector(x))
        return sta.ONE * math.cos(arg) + sta.ISIGMA[3] * math.sin(arg)

    def __call__(self, x) -> Multivector:
        return self.amplitude * self.phase_rotor(x)

    def dirac_residual(self, x) -> Multivector:
        """grad psi i sigma_3 - m psi gamma_0 at x, evaluated analytically."""
        psi = self(x)
        return self.momentum * psi * float(self.energy_sign) - psi * sta.GAMMA[0] * self.mass


def plane_wave(p, rest_rotor: Multivector | None = None, energy_sign: int = 1) -> PlaneWave:
    """Build a plane-wave state of 4-momentum ``p``.

    The amplitude factorises into the pure boost (E + m + **p**)/sqrt(2m(E+m))
    acting on a rotation ``rest_rotor`` drawn from the span of {1, i sigma_k};
    ``energy_sign=-1`` appends sigma_3 and conjugates the phase.
    """
    p = _as_four_vector(p)
    if p.grades() not in ((), (1,)):
        raise ValueError("momentum must be a 4-vector")
    m2 = scalar_product(p, p)
    if m2 <= 0.0:
        raise ValueError("momentum must be timelike (positive mass squared)")
    energy = scalar_product(p, sta.GAMMA[0])
    if energy <= 0.0:
        raise ValueError("energy component must be positive")
    if energy_sign not in (1, -1):
        raise ValueError("energy_sign must be +1 or -1")
    mass = math.sqrt(m2)
    phi = sta.ONE if rest_rotor is None else rest_rotor
    if phi.signature != sta.SIG or not _is_pauli_even(phi):
        raise ValueError("rest rotor must lie in the span of {1, i sigma_k}")
    rel_p = grade_project(p * sta.GAMMA[0], 2)
    boost = (sta.ONE * (energy + mass) + rel_p) * (1.0 / math.sqrt(2.0 * mass * (energy + mass)))
    amp = boost * phi
    if energy_sign < 0:
        amp = amp * sta.SIGMA[3]
    return PlaneWave(
        momentum=p,
        mass=mass,
        energy=energy,
        boost=boost,
        rest_rotor=phi,
        energy_sign=energy_sign,
        amplitude=amp,
    )


# ---------------------------------------------------------------------------
# discrete symmetries

_SYMMETRY_NAMES = ("P", "C", "T", "CPT", "majorana_conjugate")


def discrete_symmetry(psi: Multivector, which: str) -> Multivector:
    """Apply the algebraic part of a discrete symmetry to a spinor value.

    P and T also reflect the spacetime argument of a wavefunction (x -> x-bar
    and x -> -x-bar respectively) and CPT sends x -> -x; composing with the
    point map is left to the caller since ``psi`` here is a single value.
    """
    if which == "P":
        return sta.GAMMA[0] * psi * sta.GAMMA[0]
    if which == "C":
        return psi * sta.SIGMA[1]
    if which == "T":
        return sta.I * sta.GAMMA[0] * psi * sta.GAMMA[1]
    if which == "CPT":
        return -sta.I * psi
    if which == "majorana_conjugate":
        return psi * sta.SIGMA[2]
    raise ValueError(f"unknown symmetry {which!r}; choices: {_SYMMETRY_NAMES}")


# ---------------------------------------------------------------------------
# low-velocity reduction on a grid
#
# States are stored as real coefficient arrays of shape (..., 8) over the
# euclidean 3-space basis (blade order: 1, e1, e2, e3, e12, e13, e23, e123);
# geometric products become einsum contractions with a structure tensor
# generated from the algebra.

_P_ORDER = blade_order(PAULI_SIG)
_P_INDEX = {b: i for i, b in enumerate(_P_ORDER)}
_P_DIM = len(_P_ORDER)


def _pauli_struct() -> np.ndarray:
    t = np.zeros((_P_DIM, _P_DIM, _P_DIM))
    for i, bi in enumerate(_P_ORDER):
        for j, bj in enumerate(_P_ORDER):
            s, blade = PAULI_SIG.product_of_blades(bi, bj)
            t[i, j, _P_INDEX[blade]] = s
    return t


_STRUCT3 = _pauli_struct()


def pauli_left_matrix(mv: Multivector) -> np.ndarray:
    """8x8 matrix of left multiplication by ``mv`` on coefficient vectors."""
    out = np.zeros((_P_DIM, _P_DIM))
    for blade, coeff in mv.terms.items():
        out += coeff * _STRUCT3[_P_INDEX[blade]]
    return out


def pauli_right_matrix(mv: Multivector) -> np.ndarray:
    """8x8 matrix of right multiplication by ``mv``: x -> x mv."""
    out = np.zeros((_P_DIM, _P_DIM))
    for blade, coeff in mv.terms.items():
        out += coeff * _STRUCT3[:, _P_INDEX[blade], :]
    return out


# left multiplication by sigma_k and right multiplication by i sigma_3,
# read straight out of the structure tensor
_LEFT_SIGMA = [pauli_left_matrix(SIG3[k + 1]) for k in range(3)]
_RIGHT_ISIG3 = pauli_right_matrix(ISP3[3])
_VEC_SLOTS = [_P_INDEX[1 << k] for k in range(3)]
_REVERSE_SIGNS = np.array([(-1) ** (b.bit_count() * (b.bit_count() - 1) // 2) for b in _P_ORDER])
_INVOLUTION_SIGNS = np.array([(-1) ** b.bit_count() for b in _P_ORDER])
_EVEN_DENSE = np.array([to_dense(b) for b in PAULI_EVEN_BASIS])


def pauli_grid(a0, a1=0.0, a2=0.0, a3=0.0) -> np.ndarray:
    """Assemble coefficient grids a_i into a (..., 8) Pauli field array."""
    parts = np.broadcast_arrays(*(np.asarray(a) for a in (a0, a1, a2, a3)))
    return np.einsum("c...,ci->...i", np.stack(parts), _EVEN_DENSE)


def pauli_grid_from_complex(up, down=None) -> np.ndarray:
    """Build a Pauli field from the two complex column components."""
    up = np.asarray(up, dtype=complex)
    down = np.zeros_like(up) if down is None else np.asarray(down, dtype=complex)
    return pauli_grid(up.real, down.imag, -down.real, up.imag)


def pauli_grid_components(x: np.ndarray) -> np.ndarray:
    """Extract the (..., 4) even-subalgebra coefficients from a field array."""
    return np.einsum("...i,ci->...c", x, _EVEN_DENSE)


def pauli_field_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pointwise geometric product of two (..., 8) coefficient fields."""
    return np.einsum("...i,...j,ijk->...k", x, y, _STRUCT3)


def pauli_field_right_j(x: np.ndarray) -> np.ndarray:
    """Right multiplication by i sigma_3 (the complex-structure 'j')."""
    return np.einsum("...i,ik->...k", x, _RIGHT_ISIG3)


def pauli_field_reverse(x: np.ndarray) -> np.ndarray:
    """Pointwise reversion of a coefficient field."""
    return x * _REVERSE_SIGNS


def pauli_field_bar(x: np.ndarray) -> np.ndarray:
    """Pointwise g0 x g0 on even spacetime elements = 3-space grade involution."""
    return x * _INVOLUTION_SIGNS


def _diff(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Fourth-order central first derivative; edges are trimmed by the caller."""
    out = np.full_like(f, np.nan)
    core = (
        -np.roll(f, -2, axis) + 8 * np.roll(f, -1, axis)
        - 8 * np.roll(f, 1, axis) + np.roll(f, 2, axis)
    ) / (12.0 * h)
    sl = [slice(None)] * f.ndim
    sl[axis] = slice(2, -2)
    out[tuple(sl)] = core[tuple(sl)]
    return out


def _grad(phi: np.ndarray, dx: Sequence[float]) -> np.ndarray:
    """Geometric gradient sigma_k d_k acting from the left on a field array."""
    out = np.zeros_like(phi)
    for k in range(3):
        out = out + np.einsum("jk,...j->...k", _LEFT_SIGMA[k], _diff(phi, k, dx[k]))
    return out


def _momentum_op(phi: np.ndarray, a_field: np.ndarray | None, dx, charge: float) -> np.ndarray:
    """(p-hat - eA) phi = -grad(phi) i sigma_3 - e A phi."""
    out = -pauli_field_right_j(_grad(phi, dx))
    if a_field is not None:
        out = out - charge * pauli_field_product(a_field, phi)
    return out


def pauli_field_vector(components: np.ndarray) -> np.ndarray:
    """Pack a (3, ...) cartesian array into a (..., 8) grade-1 field."""
    shape = components.shape[1:] + (_P_DIM,)
    out = np.zeros(shape)
    for k in range(3):
        out[..., _VEC_SLOTS[k]] = components[k]
    return out


def pauli_reduce(
    phi: np.ndarray,
    *,
    dt: float,
    dx: float | Sequence[float],
    V: np.ndarray | None = None,
    A: np.ndarray | None = None,
    order: int = 0,
    mass: float = 1.0,
    charge: float = 1.0,
    light_speed: float = 1.0,
) -> np.ndarray:
    """Residual of the low-velocity electron equation on a sampled field.

    ``phi`` has shape (T, NX, NY, NZ, 8): a time series of Pauli fields with
    the fast phase already factored out.  ``V`` (shape (NX, NY, NZ)) and ``A``
    (shape (3, NX, NY, NZ)) are static potentials.  ``order=0`` keeps the
    kinetic + potential terms; ``order=2`` adds the relativistic corrections
    suppressed by 1/c^2 (momentum quartic, the combined spin-orbit/Darwin
    single-source term, and the A-cross-E term).  Returns d_t(phi) i sigma_3
    minus the Hamiltonian action; entries too close to the grid edge for the
    stencils are NaN.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 5 or phi.shape[-1] != _P_DIM:
        raise ValueError("phi must have shape (T, NX, NY, NZ, 8)")
    if order not in (0, 2):
        raise ValueError("order must be 0 (leading) or 2 (include 1/c^2 terms)")
    dx = np.broadcast_to(np.asarray(dx, dtype=float), (3,))
    space_margin = 8 if order == 2 else 4
    if phi.shape[0] < 5:
        raise ValueError("need at least 5 time slices for the time stencil")
    if any(n <= 2 * space_margin for n in phi.shape[1:4]):
        raise ValueError("spatial grid too coarse for the requested derivative order")

    a_field = pauli_field_vector(np.asarray(A, dtype=float)) if A is not None else None

    def ham(slab: np.ndarray) -> np.ndarray:
        o1 = _momentum_op(slab, a_field, dx, charge)
        h = _momentum_op(o1, a_field, dx, charge) / (2.0 * mass)
        if V is not None:
            h = h + charge * V[..., None] * slab
        if order == 2:
            c2 = light_speed * light_speed
            # momentum quartic: apply the bare p-hat twice more
            p2 = -pauli_field_right_j(_grad(-pauli_field_right_j(_grad(slab, dx)), dx))
            p4 = -pauli_field_right_j(_grad(-pauli_field_right_j(_grad(p2, dx)), dx))
            h = h - p4 / (8.0 * mass**3 * c2)
            if V is not None:
                e_field = np.stack([-_diff(V, k, dx[k]) for k in range(3)])
                e_mv = pauli_field_vector(e_field)
                grad_e = sum(
                    np.einsum("jk,...j->...k", _LEFT_SIGMA[k], pauli_field_vector(
                        np.stack([_diff(e_field[c], k, dx[k]) for c in range(3)])
                    ))
                    for k in range(3)
                )
                h = h - (charge / (8.0 * mass**2 * c2)) * pauli_field_product(grad_e, slab)
                # (E wedge grad) phi = sum_k (E ^ sigma_k) d_k phi; E must stay
                # on the left of phi, so expand the wedge per derivative term
                dphi = [_diff(slab, k, dx[k]) for k in range(3)]
                e_grad = pauli_field_product(e_mv, sum(
                    np.einsum("jk,...j->...k", _LEFT_SIGMA[k], dphi[k]) for k in range(3)
                ))
                grad_e_phi = sum(
                    np.einsum("jk,...j->...k", _LEFT_SIGMA[k], pauli_field_product(e_mv, dphi[k]))
                    for k in range(3)
                )
                h = h + (charge / (8.0 * mass**2 * c2)) * (e_grad - grad_e_phi)
                if a_field is not None:
                    awe = 0.5 * (pauli_field_product(a_field, e_mv) - pauli_field_product(e_mv, a_field))
                    h = h + (charge**2 / (4.0 * mass**2 * c2)) * pauli_field_right_j(pauli_field_product(awe, slab))
        return h

    t_mid = phi.shape[0] // 2
    dphi_dt = (
        -phi[t_mid + 2] + 8 * phi[t_mid + 1] - 8 * phi[t_mid - 1] + phi[t_mid - 2]
    ) / (12.0 * dt)
    return pauli_field_right_j(dphi_dt) - ham(phi[t_mid])


def pauli_current(
    phi: np.ndarray,
    *,
    dx: float | Sequence[float],
    A: np.ndarray | None = None,
    mass: float = 1.0,
) -> np.ndarray:
    """Leading-order conserved current -(<grad(phi) i sigma_3 phi^dag>_1 - A phi phi^dag)/m.

    ``phi`` is a single Pauli field of shape (NX, NY, NZ, 8); the result is a
    cartesian (3, NX, NY, NZ) array, NaN near the edges.
    """
    phi = np.asarray(phi, dtype=float)
    dx = np.broadcast_to(np.asarray(dx, dtype=float), (3,))
    dag = phi * _REVERSE_SIGNS
    term = pauli_field_product(pauli_field_right_j(_grad(phi, dx)), dag)
    if A is not None:
        dens = pauli_field_product(phi, dag)[..., 0]
        term = term - pauli_field_vector(np.asarray(A, dtype=float) * dens)
    out = np.stack([term[..., _VEC_SLOTS[k]] for k in range(3)])
    return -out / mass
