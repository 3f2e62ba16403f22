"""Shared Minkowski-algebra fixtures.

One (+,-,-,-) signature instance and the standard basis elements, so the
physics modules all talk about the same generators.  Everything here is built
through the kernel; no product signs are hand-coded.
"""

from __future__ import annotations

from .algebra import Multivector, Signature

SIG = Signature(1, 3)

ONE = Multivector.scalar(SIG, 1.0)
ZERO = Multivector.zero(SIG)


def gamma(mu: int) -> Multivector:
    """Basis vector of spacetime, index 0..3 (0 is the timelike one)."""
    if not 0 <= mu <= 3:
        raise ValueError("spacetime index must be 0..3")
    return Multivector.basis_vector(SIG, mu)


GAMMA = tuple(gamma(mu) for mu in range(4))

# relative (observer-frame) vectors sigma_k = gamma_k gamma_0
SIGMA = (None,) + tuple(GAMMA[k] * GAMMA[0] for k in (1, 2, 3))

I = GAMMA[0] * GAMMA[1] * GAMMA[2] * GAMMA[3]  # volume element, I*I = -1

ISIGMA = (None,) + tuple(I * SIGMA[k] for k in (1, 2, 3))


def sigma(k: int) -> Multivector:
    if not 1 <= k <= 3:
        raise ValueError("relative-vector index must be 1..3")
    return SIGMA[k]


def isigma(k: int) -> Multivector:
    if not 1 <= k <= 3:
        raise ValueError("relative-bivector index must be 1..3")
    return ISIGMA[k]


def four_vector(t: float, x: float, y: float, z: float) -> Multivector:
    return GAMMA[0] * t + GAMMA[1] * x + GAMMA[2] * y + GAMMA[3] * z


def rel_vector(x: float, y: float, z: float) -> Multivector:
    """Relative vector x sigma_1 + y sigma_2 + z sigma_3."""
    return SIGMA[1] * x + SIGMA[2] * y + SIGMA[3] * z


def bar(psi: Multivector) -> Multivector:
    """gamma_0-conjugation: flips the sign of relative vectors and trivectors."""
    return GAMMA[0] * psi * GAMMA[0]


# even-subalgebra parameter basis used by the spinor component maps:
# psi = a0 + a_k isigma_k + (b0 + b_k isigma_k) sigma_3
EVEN_PARAM_BASIS = (
    ONE,
    ISIGMA[1],
    ISIGMA[2],
    ISIGMA[3],
    SIGMA[3],
    ISIGMA[1] * SIGMA[3],
    ISIGMA[2] * SIGMA[3],
    ISIGMA[3] * SIGMA[3],
)
