"""Sparse real Clifford-algebra kernel for mixed-signature spaces.

Multivectors are stored as dictionaries mapping blade bitmasks (bit i set ==
generator e_i present) to float coefficients.  The product sign is computed by
counting the transpositions needed to bring a concatenated generator list into
canonical ascending order, times the metric squares of repeated generators.
Everything downstream (spinor maps, transfer matrices, wavepacket bridges)
is generated from this kernel rather than hand-coded tables.

Dimensions up to 12 generators are supported; degenerate metrics are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Signature",
    "Multivector",
    "Rotor",
    "Frame",
    "set_prune_epsilon",
    "geometric_product",
    "grade_project",
    "derived_products",
    "inner",
    "outer",
    "scalar_product",
    "commutator",
    "reverse",
    "grade_involution",
    "hermitian_adjoint",
    "rotor_exp",
    "spacetime_split",
    "field_split",
    "reciprocal_frame",
    "berezin_contract",
    "vector_contract",
    "to_string",
    "from_string",
    "blade_order",
    "to_dense",
    "from_dense",
    "left_matrix",
    "right_matrix",
]

_MAX_DIM = 12

# Coefficients with |c| <= _PRUNE_EPS are dropped after arithmetic.
_PRUNE_EPS = 1e-14


def set_prune_epsilon(eps: float) -> float:
    """Set the global zero-pruning threshold, returning the previous value."""
    global _PRUNE_EPS
    if eps < 0:
        raise ValueError("prune epsilon must be non-negative")
    old, _PRUNE_EPS = _PRUNE_EPS, float(eps)
    return old


@dataclass(frozen=True)
class Signature:
    """Metric signature: counts of +1 and -1 generator squares.

    By default the first ``plus_count`` generators square to +1.  An explicit
    ``squares`` tuple (any permutation with the same counts) supports layouts
    such as the interleaved multi-copy spacetime ordering.
    """

    plus_count: int
    minus_count: int
    squares: tuple[int, ...] = None  # type: ignore[assignment]
    _cache: dict = field(default=None, compare=False, repr=False, hash=False)  # type: ignore[assignment]

    def __post_init__(self):
        p, q = self.plus_count, self.minus_count
        if p < 0 or q < 0:
            raise ValueError("signature counts must be non-negative")
        if p + q > _MAX_DIM:
            raise ValueError(f"dimension {p + q} exceeds supported maximum {_MAX_DIM}")
        if self.squares is None:
            object.__setattr__(self, "squares", tuple([1] * p + [-1] * q))
        else:
            sq = tuple(int(s) for s in self.squares)
            if any(s not in (-1, 1) for s in sq):
                raise ValueError("squares entries must be +1 or -1 (no degenerate metric)")
            if len(sq) != p + q or sq.count(1) != p or sq.count(-1) != q:
                raise ValueError("squares inconsistent with (plus_count, minus_count)")
            object.__setattr__(self, "squares", sq)
        object.__setattr__(self, "_cache", {})

    @property
    def dim(self) -> int:
        return self.plus_count + self.minus_count

    def __hash__(self):
        return hash((self.plus_count, self.minus_count, self.squares))

    def product_of_blades(self, a: int, b: int) -> tuple[int, int]:
        """(sign, blade) for the geometric product of basis blades a, b."""
        cached = self._cache.get((a, b))
        if cached is not None:
            return cached
        # transpositions to interleave the two ascending generator lists
        swaps = 0
        t = a >> 1
        while t:
            swaps += (t & b).bit_count()
            t >>= 1
        sign = -1 if swaps & 1 else 1
        common = a & b
        while common:
            low = common & -common
            sign *= self.squares[low.bit_length() - 1]
            common ^= low
        result = (sign, a ^ b)
        self._cache[(a, b)] = result
        return result


def _blade_from_indices(sig: Signature, indices) -> int:
    mask = 0
    prev = -1
    for i in indices:
        if not 0 <= i < sig.dim:
            raise ValueError(f"generator index {i} out of range for dimension {sig.dim}")
        if i <= prev:
            raise ValueError("blade indices must be strictly ascending")
        prev = i
        mask |= 1 << i
    return mask


class Multivector:
    """Immutable sparse multivector over a fixed :class:`Signature`."""

    __slots__ = ("signature", "_terms")

    def __init__(self, signature: Signature, terms=None, *, prune: bool = True):
        self.signature = signature
        data: dict[int, float] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for blade, coeff in items:
                c = data.get(blade, 0.0) + float(coeff)
                if c == 0.0:
                    data.pop(blade, None)
                else:
                    data[blade] = c
        if prune:
            eps = _PRUNE_EPS
            data = {b: c for b, c in data.items() if abs(c) > eps}
        self._terms = data

    # -- constructors -------------------------------------------------

    @classmethod
    def scalar(cls, sig: Signature, value: float) -> "Multivector":
        return cls(sig, {0: value})

    @classmethod
    def zero(cls, sig: Signature) -> "Multivector":
        return cls(sig, {})

    @classmethod
    def basis_vector(cls, sig: Signature, i: int) -> "Multivector":
        return cls(sig, {_blade_from_indices(sig, (i,)): 1.0})

    @classmethod
    def from_blade(cls, sig: Signature, indices, coeff: float = 1.0) -> "Multivector":
        return cls(sig, {_blade_from_indices(sig, indices): coeff})

    # -- inspection ---------------------------------------------------

    @property
    def terms(self) -> dict[int, float]:
        return dict(self._terms)

    def grades(self) -> tuple[int, ...]:
        return tuple(sorted({b.bit_count() for b in self._terms}))

    @property
    def scalar_part(self) -> float:
        return self._terms.get(0, 0.0)

    def blade_coefficient(self, indices) -> float:
        return self._terms.get(_blade_from_indices(self.signature, indices), 0.0)

    def coeff_norm(self) -> float:
        """Euclidean norm of the coefficient vector (basis-dependent)."""
        return math.sqrt(sum(c * c for c in self._terms.values()))

    def is_zero(self) -> bool:
        return not self._terms

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "Multivector"):
        if self.signature != other.signature:
            raise ValueError("signature mismatch between multivector operands")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Multivector.scalar(self.signature, other)
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        data = dict(self._terms)
        for b, c in other._terms.items():
            data[b] = data.get(b, 0.0) + c
        return Multivector(self.signature, data)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Multivector.scalar(self.signature, other)
        if not isinstance(other, Multivector):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(self.signature, {b: -c for b, c in self._terms.items()}, prune=False)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.signature, {b: c * other for b, c in self._terms.items()})
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        prod = self.signature.product_of_blades
        data: dict[int, float] = {}
        for ba, ca in self._terms.items():
            for bb, cb in other._terms.items():
                sign, blade = prod(ba, bb)
                data[blade] = data.get(blade, 0.0) + sign * ca * cb
        return Multivector(self.signature, data)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Multivector.scalar(self.signature, 1.0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.signature == other.signature and self._terms == other._terms

    __hash__ = None  # mutable-dict backed; compare with == / approx_eq

    def approx_eq(self, other: "Multivector", tol: float = 1e-12) -> bool:
        self._check(other)
        return (self - other).coeff_norm() <= tol

    # -- involutions and projections -----------------------------------

    def grade(self, r: int) -> "Multivector":
        return Multivector(
            self.signature,
            {b: c for b, c in self._terms.items() if b.bit_count() == r},
            prune=False,
        )

    def even(self) -> "Multivector":
        return Multivector(
            self.signature,
            {b: c for b, c in self._terms.items() if not b.bit_count() & 1},
            prune=False,
        )

    def odd(self) -> "Multivector":
        return Multivector(
            self.signature,
            {b: c for b, c in self._terms.items() if b.bit_count() & 1},
            prune=False,
        )

    def reverse(self) -> "Multivector":
        # grade r picks up (-1)^(r(r-1)/2): flips grades 2,3 mod 4
        data = {}
        for b, c in self._terms.items():
            r = b.bit_count()
            data[b] = -c if (r * (r - 1) // 2) & 1 else c
        return Multivector(self.signature, data, prune=False)

    def grade_involution(self) -> "Multivector":
        data = {}
        for b, c in self._terms.items():
            data[b] = -c if b.bit_count() & 1 else c
        return Multivector(self.signature, data, prune=False)

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        sig = self.signature
        return f"Multivector(({sig.plus_count},{sig.minus_count}), '{to_string(self)}')"


# -- products ----------------------------------------------------------


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a * b


def grade_project(a: Multivector, r: int) -> Multivector:
    if r < 0 or r > a.signature.dim:
        raise ValueError(f"grade {r} out of range")
    return a.grade(r)


def reverse(a: Multivector) -> Multivector:
    return a.reverse()


def grade_involution(a: Multivector) -> Multivector:
    return a.grade_involution()


def inner(a: Multivector, b: Multivector) -> Multivector:
    """Graded inner product: the |r-s|-grade part of each graded product pair."""
    a._check(b)
    out = Multivector.zero(a.signature)
    for r in a.grades():
        ar = a.grade(r)
        for s in b.grades():
            out = out + (ar * b.grade(s)).grade(abs(r - s))
    return out


def outer(a: Multivector, b: Multivector) -> Multivector:
    """Graded outer product: the (r+s)-grade part of each graded product pair."""
    a._check(b)
    out = Multivector.zero(a.signature)
    for r in a.grades():
        ar = a.grade(r)
        for s in b.grades():
            if r + s <= a.signature.dim:
                out = out + (ar * b.grade(s)).grade(r + s)
    return out


def scalar_product(a: Multivector, b: Multivector) -> float:
    return (a * b).scalar_part


def commutator(a: Multivector, b: Multivector) -> Multivector:
    return (a * b - b * a) * 0.5


def derived_products(a: Multivector, b: Multivector, kind: str) -> Multivector:
    """Dispatch on kind in {inner, outer, scalar, commutator}.

    The scalar product is returned as a grade-0 multivector for uniformity.
    """
    if kind == "inner":
        return inner(a, b)
    if kind == "outer":
        return outer(a, b)
    if kind == "scalar":
        return (a * b).grade(0)
    if kind == "commutator":
        return commutator(a, b)
    raise ValueError(f"unknown product kind {kind!r}")


def vector_contract(v: Multivector, x: Multivector) -> Multivector:
    """Left contraction of a vector onto a multivector: sum of <v x_s>_{s-1}.

    Satisfies the graded Leibniz rule over outer products, which is what the
    fermionic-derivative translation relies on.
    """
    if v.grades() not in ((), (1,)):
        raise ValueError("contraction requires a grade-1 left operand")
    v._check(x)
    out = Multivector.zero(v.signature)
    for s in x.grades():
        if s >= 1:
            out = out + (v * x.grade(s)).grade(s - 1)
    return out


# -- timelike splits ----------------------------------------------------


def _check_timelike(t: Multivector):
    if t.grades() != (1,):
        raise ValueError("timelike axis must be grade-1")
    sq = (t * t)
    if abs(sq.scalar_part - 1.0) > 1e-12 or not sq.grade(0).approx_eq(sq):
        raise ValueError("timelike axis must square to +1")


def spacetime_split(a: Multivector, timelike: Multivector) -> tuple[float, Multivector]:
    """Split a vector into (time component, relative-vector bivector part).

    a*t = a.t + a^t: the scalar is the component along the timelike axis, the
    bivector part represents the relative vector seen in that frame.
    """
    if a.grades() not in ((), (1,)):
        raise ValueError("spacetime split expects a grade-1 argument")
    _check_timelike(timelike)
    prod = a * timelike
    return prod.scalar_part, prod.grade(2)


def field_split(F: Multivector, timelike: Multivector) -> tuple[Multivector, Multivector]:
    """Split a grade-2 field into electric-type and magnetic-type parts.

    Returns (E, B) where F = E + I*B, E = (F - t F t)/2 and I*B = (F + t F t)/2
    with I the volume element of the timelike observer's algebra.
    """
    if F.grades() not in ((), (2,)):
        raise ValueError("field split expects a grade-2 argument")
    _check_timelike(timelike)
    conj = timelike * F * timelike
    E = (F - conj) * 0.5
    iB = (F + conj) * 0.5
    n = F.signature.dim
    vol = Multivector(F.signature, {(1 << n) - 1: 1.0})
    # B = -I (I B) when I^2 = -1 (Lorentzian 4-space)
    B = -(vol * iB) if (vol * vol).scalar_part == -1.0 else vol * iB
    return E, B


def hermitian_adjoint(a: Multivector, timelike: Multivector) -> Multivector:
    """Reversion conjugated by the timelike axis: t * reverse(a) * t."""
    _check_timelike(timelike)
    return timelike * a.reverse() * timelike


# -- rotors --------------------------------------------------------------


class Rotor:
    """Even element R with R * reverse(R) = 1 (within 1e-12)."""

    __slots__ = ("value",)

    def __init__(self, value: Multivector):
        if any(g & 1 for g in value.grades()):
            raise ValueError("rotor must be even-grade")
        unit = value * value.reverse()
        if not unit.approx_eq(Multivector.scalar(value.signature, 1.0), 1e-12):
            raise ValueError("rotor normalization R * ~R = 1 violated")
        self.value = value

    def apply(self, a: Multivector) -> Multivector:
        return self.value * a * self.value.reverse()

    def compose(self, other: "Rotor") -> "Rotor":
        return Rotor(self.value * other.value)

    def __mul__(self, other):
        if isinstance(other, Rotor):
            return self.compose(other)
        return NotImplemented

    def reverse(self) -> "Rotor":
        return Rotor(self.value.reverse())

    def __repr__(self):
        return f"Rotor({to_string(self.value)})"


_SERIES_CAP = 64


def rotor_exp(B: Multivector) -> Rotor:
    """Exponential of a bivector.

    Closed form when B*B is scalar (circular, hyperbolic, or null branches);
    otherwise a capped power series.
    """
    if B.grades() not in ((), (2,)):
        raise ValueError("rotor_exp requires a bivector argument")
    sig = B.signature
    one = Multivector.scalar(sig, 1.0)
    B2 = B * B
    s = B2.scalar_part
    if (B2 - B2.grade(0)).coeff_norm() <= 1e-14 * max(1.0, abs(s)):
        if abs(s) <= 1e-30:
            return Rotor(one + B)
        if s < 0:
            w = math.sqrt(-s)
            return Rotor(one * math.cos(w) + B * (math.sin(w) / w))
        w = math.sqrt(s)
        return Rotor(one * math.cosh(w) + B * (math.sinh(w) / w))
    term = one
    total = one
    for k in range(1, _SERIES_CAP + 1):
        term = term * B / k
        total = total + term
        if term.coeff_norm() <= 1e-17 * max(1.0, total.coeff_norm()):
            return Rotor(total)
    raise ArithmeticError("bivector exponential series failed to converge in 64 terms")


# -- frames ---------------------------------------------------------------


class Frame:
    """Ordered basis of grade-1 vectors with a cached Gram matrix."""

    __slots__ = ("vectors", "_gram")

    def __init__(self, vectors):
        vectors = list(vectors)
        if not vectors:
            raise ValueError("frame needs at least one vector")
        sig = vectors[0].signature
        for v in vectors:
            if v.signature != sig:
                raise ValueError("signature mismatch in frame")
            if v.grades() != (1,):
                raise ValueError("frame vectors must be grade-1")
        self.vectors = vectors
        self._gram = None

    @property
    def gram(self) -> np.ndarray:
        if self._gram is None:
            n = len(self.vectors)
            g = np.empty((n, n))
            for j, ej in enumerate(self.vectors):
                for k, ek in enumerate(self.vectors):
                    g[j, k] = scalar_product(ej, ek)
            self._gram = g
        return self._gram

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]


def reciprocal_frame(frame: Frame) -> Frame:
    """Frame {e^k} with e^k . e_j = delta^k_j, via the inverse Gram matrix."""
    try:
        minv = np.linalg.inv(frame.gram)
    except np.linalg.LinAlgError as exc:
        raise ValueError("degenerate frame: Gram matrix is singular") from exc
    recip = []
    for k in range(len(frame)):
        vk = Multivector.zero(frame.vectors[0].signature)
        for j, ej in enumerate(frame.vectors):
            vk = vk + ej * minv[k, j]
        recip.append(vk)
    return Frame(recip)


def berezin_contract(frame: Frame, i: int, x: Multivector) -> Multivector:
    """Fermionic derivative translated to geometry: e^i contracted onto x.

    The reciprocal vector guarantees the unit derivative of the matching
    generator, and the contraction supplies the graded Leibniz rule.
    """
    if not 0 <= i < len(frame):
        raise ValueError("frame index out of range")
    return vector_contract(reciprocal_frame(frame)[i], x)


# -- serialization ---------------------------------------------------------

_DIGITS = "0123456789ab"  # generator indices 10, 11 print as a, b


def _blade_token(blade: int) -> str:
    if blade == 0:
        return ""
    out = ["e"]
    i = 0
    while blade:
        if blade & 1:
            out.append(_DIGITS[i])
        blade >>= 1
        i += 1
    return "".join(out)


def to_string(mv: Multivector) -> str:
    if not mv._terms:
        return "0"
    parts = []
    for blade in sorted(mv._terms, key=lambda b: (b.bit_count(), b)):
        coeff = mv._terms[blade]
        tok = _blade_token(blade)
        body = repr(abs(coeff)) + (" " + tok if tok else "")
        if not parts:
            parts.append(("-" if coeff < 0 else "") + body)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + body)
    return " ".join(parts)


def from_string(sig: Signature, text: str) -> Multivector:
    tokens = text.split()
    if tokens == ["0"]:
        return Multivector.zero(sig)
    terms: list[tuple[int, float]] = []
    sign = 1.0
    expect_term = True
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("+", "-"):
            if expect_term:
                raise ValueError(f"misplaced operator {tok!r}")
            sign = 1.0 if tok == "+" else -1.0
            expect_term = True
            i += 1
            continue
        if not expect_term:
            raise ValueError(f"expected '+' or '-' before {tok!r}")
        neg = tok.startswith("-") and len(tok) > 1
        if neg:
            tok = tok[1:]
        try:
            coeff = float(tok)
        except ValueError as exc:
            raise ValueError(f"bad coefficient {tok!r}") from exc
        if not math.isfinite(coeff):
            raise ValueError("non-finite coefficient")
        coeff *= -sign if neg else sign
        blade = 0
        if i + 1 < len(tokens) and _is_blade_token(tokens[i + 1]):
            blade = _parse_blade(sig, tokens[i + 1])
            i += 1
        terms.append((blade, coeff))
        sign = 1.0
        expect_term = False
        i += 1
    if expect_term:
        raise ValueError("dangling operator at end of input")
    return Multivector(sig, terms)


def _is_blade_token(tok: str) -> bool:
    return len(tok) >= 2 and tok[0] == "e" and all(c in _DIGITS for c in tok[1:])


def _parse_blade(sig: Signature, tok: str) -> int:
    blade = 0
    prev = -1
    for c in tok[1:]:
        i = _DIGITS.index(c)
        if i >= sig.dim:
            raise ValueError(f"generator {c} out of range for dimension {sig.dim}")
        if i <= prev:
            raise ValueError(f"blade {tok!r} indices must be strictly ascending")
        prev = i
        blade |= 1 << i
    return blade


# -- dense bridges -----------------------------------------------------------


def blade_order(sig: Signature) -> tuple[int, ...]:
    """All 2^n blade bitmasks, sorted by (grade, bitmask): the dense layout."""
    key = "blade_order"
    cached = sig._cache.get(key)
    if cached is None:
        cached = tuple(sorted(range(1 << sig.dim), key=lambda b: (b.bit_count(), b)))
        sig._cache[key] = cached
        sig._cache["blade_index"] = {b: i for i, b in enumerate(cached)}
    return cached


def _blade_index(sig: Signature) -> dict[int, int]:
    blade_order(sig)
    return sig._cache["blade_index"]


def to_dense(mv: Multivector) -> np.ndarray:
    idx = _blade_index(mv.signature)
    out = np.zeros(1 << mv.signature.dim)
    for b, c in mv._terms.items():
        out[idx[b]] = c
    return out


def from_dense(sig: Signature, vec) -> Multivector:
    order = blade_order(sig)
    return Multivector(sig, {order[i]: float(c) for i, c in enumerate(vec) if c != 0.0})


def left_matrix(mv: Multivector) -> np.ndarray:
    """Matrix L with L @ to_dense(x) = to_dense(mv * x)."""
    sig = mv.signature
    order = blade_order(sig)
    idx = _blade_index(sig)
    n = len(order)
    L = np.zeros((n, n))
    prod = sig.product_of_blades
    for j, bj in enumerate(order):
        for ba, ca in mv._terms.items():
            sign, blade = prod(ba, bj)
            L[idx[blade], j] += sign * ca
    return L


def right_matrix(mv: Multivector) -> np.ndarray:
    """Matrix R with R @ to_dense(x) = to_dense(x * mv)."""
    sig = mv.signature
    order = blade_order(sig)
    idx = _blade_index(sig)
    n = len(order)
    R = np.zeros((n, n))
    prod = sig.product_of_blades
    for j, bj in enumerate(order):
        for bb, cb in mv._terms.items():
            sign, blade = prod(bj, bb)
            R[idx[blade], j] += sign * cb
    return R
