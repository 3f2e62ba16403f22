"""Spacetime-algebra toolkit: Dirac theory without matrices.

Subpackages cover the Clifford kernel, spinor translation, spherical
monogenics, central-field bound states, step/barrier scattering, wavepacket
simulations, multiparticle states, and semiclassical rotor models, plus a CLI
that writes the corresponding data tables.
"""

from .algebra import (
    Frame,
    Multivector,
    Rotor,
    Signature,
    berezin_contract,
    derived_products,
    field_split,
    from_string,
    geometric_product,
    grade_project,
    hermitian_adjoint,
    reciprocal_frame,
    reverse,
    rotor_exp,
    set_prune_epsilon,
    spacetime_split,
    to_string,
)

__version__ = "0.1.0"

__all__ = [
    "Frame",
    "Multivector",
    "Rotor",
    "Signature",
    "berezin_contract",
    "derived_products",
    "field_split",
    "from_string",
    "geometric_product",
    "grade_project",
    "hermitian_adjoint",
    "reciprocal_frame",
    "reverse",
    "rotor_exp",
    "set_prune_epsilon",
    "spacetime_split",
    "to_string",
    "__version__",
]
