"""Planar scattering: region classification, wave structure, matching chains,
closed-form coefficients, Coulomb amplitudes and the surface propagator."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stakit.algebra import to_dense
from stakit.scattering import (
    BACKWARD,
    FORWARD,
    KLEIN_INCOMING,
    KLEIN_OUTGOING,
    REGIME_EVANESCENT,
    REGIME_KLEIN,
    REGIME_TRAVELLING,
    SPIN_DOWN,
    SPIN_UP,
    MatchMatrix2,
    PhaseScalar,
    RegionSpec,
    born_coulomb,
    chain_solve,
    classify_region,
    closed_barrier_perpendicular,
    closed_klein_step,
    closed_step_perpendicular,
    feynman_kernel,
    helmholtz_kernel,
    huygens_propagate,
    interface_solve,
    klein_pair_rate,
    match_matrix,
    mott_cross_section,
    mott_precession,
    propagator,
    reflection_precession,
    sphere_mesh,
    stationary_residual,
    step_coefficients,
    wave_at,
    wave_current,
    wave_gradient,
)
from stakit.spinors import ISP3, ONE3, SIG3
from stakit.sta import GAMMA, four_vector
from stakit.units import FINE_STRUCTURE

rng = np.random.default_rng(7)

_J = ISP3[3]
_I3 = SIG3[1] * SIG3[2] * SIG3[3]

# a representative region of each regime (shared mass 1, shared p_y where
# it matters); the evanescent pair covers both parameter domains: one with
# e' > p_y where the rapidity form tanh(u/2) = (p_y +- kappa)/(e' + m) is
# real, one with e' < p_y where only the unnormalised structure survives
TRAV = classify_region(1.7, 0.3, p_y=0.4)
EVAN_RAPID = classify_region(1.8, 1.35, p_y=0.3)
EVAN_CORNER = classify_region(1.2, 1.0, p_y=0.3)
EVAN_DEEP = classify_region(1.0, 1.8)
KLEIN = classify_region(1.0, 3.0, p_y=0.3)

ALL_REGIONS = [TRAV, EVAN_RAPID, EVAN_CORNER, EVAN_DEEP, KLEIN]


def _vec_component(mv, k):
    return (mv.grade(1) * SIG3[k]).scalar_part


# ---------------------------------------------------------------- regimes


def test_classify_travelling_kinematics():
    r = TRAV
    assert r.regime == REGIME_TRAVELLING
    assert r.e_prime == pytest.approx(1.4)
    assert r.p == pytest.approx(math.sqrt(1.4**2 - 1.0))
    assert r.p_x**2 + r.p_y**2 == pytest.approx(r.p**2)
    assert math.cosh(r.u) == pytest.approx(r.e_prime)
    assert math.sinh(r.u) == pytest.approx(r.p)
    assert math.tan(r.phi) == pytest.approx(r.p_y / r.p_x)
    assert r.kappa is None and r.u_plus is None and r.u_minus is None
    assert not r.marginal


def test_classify_evanescent_rapidity_domain():
    r = EVAN_RAPID
    assert r.regime == REGIME_EVANESCENT
    thr2 = r.p_y**2 + 1.0
    assert r.kappa == pytest.approx(math.sqrt(thr2 - r.e_prime**2))
    # both rapidities exist here and parametrise the decaying structures
    for u, sign in ((r.u_plus, 1.0), (r.u_minus, -1.0)):
        assert math.tanh(0.5 * u) == pytest.approx(
            (r.p_y + sign * r.kappa) / (r.e_prime + 1.0)
        )
    assert r.p is None and r.u is None


def test_classify_evanescent_corner_domain():
    # e' = 0.2 < p_y = 0.3: the decaying structure loses its real rapidity
    # (only the growing one survives), yet kappa and the waves still exist
    r = EVAN_CORNER
    assert r.regime == REGIME_EVANESCENT
    assert math.isnan(r.u_plus) and math.isfinite(r.u_minus)
    assert r.kappa == pytest.approx(math.sqrt(1.09 - 0.04))
    assert stationary_residual(r).coeff_norm() < 1e-14
    # deeper still, e' < 0 and both rapidities are gone
    assert math.isnan(EVAN_DEEP.u_plus) and math.isnan(EVAN_DEEP.u_minus)


def test_classify_klein():
    r = KLEIN
    assert r.regime == REGIME_KLEIN
    assert r.e_prime == pytest.approx(-2.0)
    assert r.p == pytest.approx(math.sqrt(4.0 - 1.0))
    assert r.p_x**2 + r.p_y**2 == pytest.approx(r.p**2)
    assert r.kappa is None


@pytest.mark.parametrize("potential", [0.0, 2.0])
def test_classify_marginal_edges(potential):
    # e' = +-threshold exactly: flagged, kappa pinned to zero
    r = classify_region(1.0, potential)
    assert r.marginal
    assert r.regime == REGIME_EVANESCENT
    assert r.kappa == 0.0


def test_classify_rejects_bad_mass():
    with pytest.raises(ValueError, match="mass"):
        classify_region(1.0, 0.0, mass=0.0)
    with pytest.raises(ValueError, match="mass"):
        classify_region(1.0, 0.0, mass=-2.0)


def test_region_spec_rejects_unknown_regime():
    with pytest.raises(ValueError, match="regime"):
        RegionSpec(
            energy=1.0, potential=0.0, p_y=0.0, mass=1.0, regime="bogus", e_prime=1.0
        )


def test_snell_invariant_shared_across_step():
    left = classify_region(2.0, 0.0, p_y=0.5)
    right = classify_region(2.0, 0.6, p_y=0.5)
    assert math.sinh(left.u) * math.sin(left.phi) == pytest.approx(0.5, abs=1e-14)
    assert math.sinh(right.u) * math.sin(right.phi) == pytest.approx(0.5, abs=1e-14)


# ---------------------------------------------------------- phase scalars


@given(
    st.complex_numbers(min_magnitude=0.0, max_magnitude=1e6, allow_nan=False),
    st.complex_numbers(min_magnitude=1e-6, max_magnitude=1e6, allow_nan=False),
)
@settings(max_examples=60, deadline=None)
def test_phase_scalar_matches_complex_field(za, zb):
    a, b = PhaseScalar.from_complex(za), PhaseScalar.from_complex(zb)
    assert (a + b).to_complex() == za + zb
    assert (a - b).to_complex() == za - zb
    assert (a * b).to_complex() == pytest.approx(za * zb, rel=1e-12, abs=1e-300)
    assert (a / b).to_complex() == pytest.approx(za / zb, rel=1e-12, abs=1e-300)
    assert (-a).to_complex() == -za
    assert abs(a) == pytest.approx(abs(za))
    assert a.conjugate().to_complex() == za.conjugate()


def test_phase_scalar_mixes_with_reals():
    a = PhaseScalar(0.5, -2.0)
    assert (2 * a).to_complex() == 1.0 - 4.0j
    assert (a * 2.0).to_complex() == 1.0 - 4.0j
    assert (1 - a).to_complex() == 0.5 + 2.0j
    assert (1.0 / a).to_complex() == pytest.approx(1.0 / (0.5 - 2.0j))
    assert (a + 1) .to_complex() == 1.5 - 2.0j


def test_phase_scalar_exp_and_arg():
    th = 0.83
    e = PhaseScalar.exp_j(th)
    assert e.to_complex() == pytest.approx(cmath.exp(1j * th))
    assert e.arg() == pytest.approx(th)
    assert abs(e) == pytest.approx(1.0)


def test_phase_scalar_embeds_in_even_subalgebra():
    a = PhaseScalar(0.7, -0.4)
    mv = a.to_multivector()
    assert (mv - (ONE3 * 0.7 - _J * 0.4)).coeff_norm() == 0.0
    # multiplication in the ring agrees with multivector multiplication
    b = PhaseScalar(-1.1, 0.2)
    prod = (a * b).to_multivector()
    assert (prod - mv * b.to_multivector()).coeff_norm() < 1e-15


# ----------------------------------------------------------------- waves


@pytest.mark.parametrize("region", ALL_REGIONS)
@pytest.mark.parametrize("spin", [SPIN_UP, SPIN_DOWN])
@pytest.mark.parametrize("direction", [FORWARD, BACKWARD])
def test_waves_satisfy_stationary_equation(region, spin, direction):
    for x, y, t in ((0.0, 0.0, 0.0), (0.7, -0.3, 0.4), (-1.2, 0.9, -2.0)):
        res = stationary_residual(region, spin, direction, x=x, y=y, t=t)
        assert res.coeff_norm() < 1e-12


def test_wave_gradient_matches_finite_differences():
    h = 1e-6
    for region in (TRAV, EVAN_CORNER, KLEIN):
        grad = wave_gradient(region, SPIN_DOWN, FORWARD, x=0.31, y=-0.17)
        fd = SIG3[1] * (
            (wave_at(region, SPIN_DOWN, x=0.31 + h, y=-0.17)
             - wave_at(region, SPIN_DOWN, x=0.31 - h, y=-0.17)) * (0.5 / h)
        ) + SIG3[2] * (
            (wave_at(region, SPIN_DOWN, x=0.31, y=-0.17 + h)
             - wave_at(region, SPIN_DOWN, x=0.31, y=-0.17 - h)) * (0.5 / h)
        )
        assert (grad - fd).coeff_norm() < 1e-6


def test_travelling_current_components():
    for direction, sx in ((FORWARD, 1.0), (BACKWARD, -1.0)):
        cur = wave_current(wave_at(TRAV, direction=direction, x=0.4, y=0.2))
        assert cur.scalar_part == pytest.approx(math.cosh(TRAV.u))
        assert _vec_component(cur, 1) == pytest.approx(sx * math.sinh(TRAV.u) * math.cos(TRAV.phi))
        assert _vec_component(cur, 2) == pytest.approx(math.sinh(TRAV.u) * math.sin(TRAV.phi))
        assert _vec_component(cur, 3) == pytest.approx(0.0, abs=1e-15)


def test_klein_forward_current_points_outward():
    # future-pointing density with the x-flow along +x despite e' < 0
    cur = wave_current(wave_at(KLEIN, direction=FORWARD, x=-0.3))
    assert cur.scalar_part == pytest.approx(-KLEIN.e_prime)
    assert _vec_component(cur, 1) == pytest.approx(KLEIN.p_x)
    assert _vec_component(cur, 2) == pytest.approx(-KLEIN.p_y)


@pytest.mark.parametrize("region", [EVAN_RAPID, EVAN_CORNER, EVAN_DEEP])
@pytest.mark.parametrize("direction", [FORWARD, BACKWARD])
def test_single_evanescent_wave_carries_no_x_current(region, direction):
    for x in (0.0, 0.4):
        cur = wave_current(wave_at(region, direction=direction, x=x))
        assert abs(_vec_component(cur, 1)) < 1e-13


def test_evanescent_waves_decay_or_grow():
    up0 = wave_at(EVAN_CORNER, direction=FORWARD, x=0.0).coeff_norm()
    up1 = wave_at(EVAN_CORNER, direction=FORWARD, x=1.0).coeff_norm()
    assert up1 == pytest.approx(up0 * math.exp(-EVAN_CORNER.kappa))
    dn1 = wave_at(EVAN_CORNER, direction=BACKWARD, x=1.0).coeff_norm()
    assert dn1 == pytest.approx(
        wave_at(EVAN_CORNER, direction=BACKWARD, x=0.0).coeff_norm()
        * math.exp(EVAN_CORNER.kappa)
    )


@pytest.mark.parametrize(
    "region,want", [(TRAV, 1.0), (KLEIN, -1.0)], ids=["travelling", "klein"]
)
@pytest.mark.parametrize("spin", [SPIN_UP, SPIN_DOWN])
def test_unit_wave_invariant_norm(region, want, spin):
    # psi times the grade-involved reversion is +-1: +1 travelling, -1 Klein
    psi = wave_at(region, spin=spin, x=0.3, y=0.1, t=-0.2)
    inv = psi * psi.reverse().grade_involution()
    assert inv.scalar_part == pytest.approx(want)
    assert (inv - ONE3 * inv.scalar_part).coeff_norm() < 1e-14


def test_wave_amplitude_is_right_module_factor():
    amp = PhaseScalar(0.3, -1.2)
    for spin in (SPIN_UP, SPIN_DOWN):
        scaled = wave_at(TRAV, spin=spin, x=0.4, y=-0.2, t=0.1, amplitude=amp)
        plain = wave_at(TRAV, spin=spin, x=0.4, y=-0.2, t=0.1)
        assert (scaled - plain * amp.to_multivector()).coeff_norm() < 1e-14
        res = stationary_residual(TRAV, spin, FORWARD, x=0.4, amplitude=amp)
        assert res.coeff_norm() < 1e-13


def test_wave_at_rejects_bad_tokens():
    with pytest.raises(ValueError, match="spin"):
        wave_at(TRAV, spin="sideways")
    with pytest.raises(ValueError, match="direction"):
        wave_at(TRAV, direction="up")


def test_lightlike_evanescent_structure_rejected():
    # e' = p_y exactly: the decaying structure degenerates to a null spinor
    region = classify_region(1.3, 1.0, p_y=0.3)
    assert region.regime == REGIME_EVANESCENT
    with pytest.raises(ValueError, match="lightlike"):
        wave_at(region)
    with pytest.raises(ValueError, match="lightlike"):
        match_matrix(region)


# ---------------------------------------------------------- spin readout


def _rest_spin_expectation(region, spin, direction):
    """Expectation of the polarisation operator along sig_1, sig_2, sig_3.

    The operator divides out the motion: acting on a plane wave with
    spatial momentum p it reads off the rest-frame spin direction,

        O(n) psi = -[i p (p.n) psi + i (p^2 n - (p.n) p) bar(psi)] j / p^2,

    so every travelling or Klein wave should report (0, 0, +-1).
    """
    psi = wave_at(region, spin=spin, direction=direction)
    if region.regime == REGIME_TRAVELLING:
        q_x = region.p_x if direction == FORWARD else -region.p_x
    else:
        q_x = -region.p_x if direction == FORWARD else region.p_x
    p_mv = SIG3[1] * q_x + SIG3[2] * region.p_y
    p2 = q_x * q_x + region.p_y**2
    dens = (psi.reverse() * psi).scalar_part
    out = []
    for k in (1, 2, 3):
        p_dot_n = q_x if k == 1 else (region.p_y if k == 2 else 0.0)
        transverse = SIG3[k] * p2 - p_mv * p_dot_n
        acted = ((_I3 * p_mv * p_dot_n) * psi
                 + (_I3 * transverse) * psi.grade_involution()) * _J * (-1.0 / p2)
        out.append((psi.reverse() * acted).scalar_part / dens)
    return out


@pytest.mark.parametrize("region", [TRAV, KLEIN], ids=["travelling", "klein"])
@pytest.mark.parametrize("spin,want", [(SPIN_UP, 1.0), (SPIN_DOWN, -1.0)])
@pytest.mark.parametrize("direction", [FORWARD, BACKWARD])
def test_polarisation_operator_reads_rest_spin(region, spin, want, direction):
    sx, sy, sz = _rest_spin_expectation(region, spin, direction)
    assert abs(sx) < 1e-12 and abs(sy) < 1e-12
    assert sz == pytest.approx(want, abs=1e-12)


# ------------------------------------------------------ matching matrices


def test_travelling_match_matrix_entries():
    c, s = math.cosh(0.5 * TRAV.u), math.sinh(0.5 * TRAV.u)
    want = np.array(
        [
            [c, c],
            [s * cmath.exp(1j * TRAV.phi), -s * cmath.exp(-1j * TRAV.phi)],
        ]
    )
    got = match_matrix(TRAV).to_complex()
    assert np.max(np.abs(got - want)) < 1e-15
    assert match_matrix(TRAV).det().to_complex() == pytest.approx(
        -math.sinh(TRAV.u) * math.cos(TRAV.phi)
    )


@pytest.mark.parametrize("region", [TRAV, KLEIN], ids=["travelling", "klein"])
def test_spin_down_match_is_conjugate(region):
    up = match_matrix(region, SPIN_UP).to_complex()
    down = match_matrix(region, SPIN_DOWN).to_complex()
    assert np.max(np.abs(down - up.conj())) == 0.0


@pytest.mark.parametrize("region", [EVAN_RAPID, EVAN_CORNER])
def test_evanescent_down_match_swaps_conjugated_columns(region):
    up = match_matrix(region, SPIN_UP).to_complex()
    down = match_matrix(region, SPIN_DOWN).to_complex()
    assert np.max(np.abs(down - up.conj()[:, ::-1])) < 1e-15


def test_match_matrix_complex_round_trip():
    mat = np.array([[1.0 + 2.0j, -0.5j], [0.25, 3.0 - 1.0j]])
    m = MatchMatrix2.from_complex("test", mat)
    assert np.array_equal(m.to_complex(), mat)
    t, r = m.apply((PhaseScalar(1.0), PhaseScalar(0.0, 1.0)))
    want = mat @ np.array([1.0, 1.0j])
    assert t.to_complex() == pytest.approx(want[0])
    assert r.to_complex() == pytest.approx(want[1])
    assert m.det().to_complex() == pytest.approx(np.linalg.det(mat))


@pytest.mark.parametrize(
    "region", [TRAV, EVAN_RAPID, KLEIN], ids=["travelling", "evanescent", "klein"]
)
def test_propagators_have_unit_determinant(region):
    p = propagator(region, 0.8)
    assert p.det().to_complex() == pytest.approx(1.0)


def test_travelling_propagator_unwinds_forward_phase():
    width = 0.8
    p = propagator(TRAV, width).to_complex()
    q = TRAV.p_x * width
    assert p[0, 0] == pytest.approx(cmath.exp(-1j * q))
    assert p[1, 1] == pytest.approx(cmath.exp(1j * q))
    assert p[0, 1] == 0.0 and p[1, 0] == 0.0


def test_klein_propagator_convention_flip():
    width = 0.6
    out = propagator(KLEIN, width, klein_convention=KLEIN_OUTGOING).to_complex()
    inc = propagator(KLEIN, width, klein_convention=KLEIN_INCOMING).to_complex()
    assert out[0, 0] == pytest.approx(cmath.exp(1j * KLEIN.p_x * width))
    assert inc[0, 0] == pytest.approx(cmath.exp(-1j * KLEIN.p_x * width))


def test_evanescent_propagator_growth():
    width = 2.0
    p = propagator(EVAN_CORNER, width).to_complex()
    assert p[0, 0] == pytest.approx(math.exp(EVAN_CORNER.kappa * width))
    assert p[1, 1] == pytest.approx(math.exp(-EVAN_CORNER.kappa * width))


def test_propagator_rejects_bad_width():
    with pytest.raises(ValueError, match="width"):
        propagator(TRAV, -0.1)
    with pytest.raises(ValueError, match="width"):
        propagator(TRAV, math.inf)


def test_interface_solve_reproduces_step():
    left = classify_region(1.7, 0.0, p_y=0.4)
    right = classify_region(1.7, 0.5, p_y=0.4)
    res = step_coefficients(left, right)
    s = interface_solve(left, right)
    t_l, r_l = s.apply((res.t, PhaseScalar(0.0)))
    assert t_l.to_complex() == pytest.approx(1.0)
    assert r_l.to_complex() == pytest.approx(res.r.to_complex())


def test_marginal_region_is_singular_to_match():
    # a marginal slab has two identical structure columns and cannot be
    # inverted; stepping onto a marginal half-space is still well defined
    marginal = classify_region(2.0, 1.0)
    assert marginal.marginal
    outside = classify_region(2.0, 0.0)
    with pytest.raises(ValueError, match="singular"):
        chain_solve((outside, marginal, outside), (0.5,))
    with pytest.raises(ValueError, match="singular"):
        interface_solve(marginal, outside)
    assert math.isfinite(abs(step_coefficients(outside, marginal).r))


# ----------------------------------------------------------------- chains


def _boundary_positions(widths):
    xs = [-float(sum(widths))]
    for w in widths:
        xs.append(xs[-1] + w)
    return xs


def _continuity_defect(regions, widths, result, spin):
    """Largest mismatch of the full wave across any interior boundary."""
    xs = _boundary_positions(widths)
    worst = 0.0
    for b, x in enumerate(xs):
        vals = []
        for i in (b, b + 1):
            t_amp, r_amp = result.amplitudes[i]
            val = None
            for direction, amp in ((FORWARD, t_amp), (BACKWARD, r_amp)):
                if abs(amp) == 0.0 or not math.isfinite(abs(amp)):
                    continue
                w = wave_at(regions[i], spin, direction, x=x, y=0.37, amplitude=amp)
                val = w if val is None else val + w
            vals.append(val if val is not None else ONE3 * 0.0)
        worst = max(worst, (vals[0] - vals[1]).coeff_norm())
    return worst


CHAIN_CASES = [
    ("oblique step", (classify_region(1.7, 0.0, p_y=0.4),
                      classify_region(1.7, 0.5, p_y=0.4)), ()),
    ("total reflection", (classify_region(1.2, 0.0, p_y=0.25),
                          classify_region(1.2, 2.0, p_y=0.25)), ()),
    ("barrier", (classify_region(1.8, 0.0, p_y=0.3),
                 classify_region(1.8, 1.35, p_y=0.3),
                 classify_region(1.8, 0.0, p_y=0.3)), (1.1,)),
    ("four regions", (classify_region(2.0, 0.0, p_y=0.3),
                      classify_region(2.0, 0.9, p_y=0.3),
                      classify_region(2.0, 1.55, p_y=0.3),
                      classify_region(2.0, 0.2, p_y=0.3)), (0.8, 0.6)),
    ("klein exit", (classify_region(1.5, 0.0, p_y=0.3),
                    classify_region(1.5, 4.0, p_y=0.3)), ()),
    ("klein slab", (classify_region(1.5, 0.0, p_y=0.2),
                    classify_region(1.5, 4.0, p_y=0.2),
                    classify_region(1.5, 0.0, p_y=0.2)), (0.9,)),
]


@pytest.mark.parametrize(
    "regions,widths", [c[1:] for c in CHAIN_CASES], ids=[c[0] for c in CHAIN_CASES]
)
@pytest.mark.parametrize("spin", [SPIN_UP, SPIN_DOWN])
def test_chain_waves_are_continuous(regions, widths, spin):
    res = chain_solve(regions, widths, spin)
    assert _continuity_defect(regions, widths, res, spin) < 1e-12
    assert res.flux_defect < 1e-10
    t0, r0 = res.amplitudes[0]
    assert t0.to_complex() == pytest.approx(1.0, abs=1e-12)
    assert r0.to_complex() == pytest.approx(res.r.to_complex(), abs=1e-12)


def test_step_spin_down_coefficients_conjugate():
    # travelling and Klein structures conjugate cleanly, so at a bare step
    # the two spins mirror each other; oblique evanescent slabs break this
    # (their spin asymmetry is what drives the reflection precession)
    for name in ("oblique step", "klein exit"):
        regions = dict((c[0], c[1]) for c in CHAIN_CASES)[name]
        up = chain_solve(regions, (), SPIN_UP)
        down = chain_solve(regions, (), SPIN_DOWN)
        assert down.r.to_complex() == pytest.approx(up.r.to_complex().conjugate())
        assert down.t.to_complex() == pytest.approx(up.t.to_complex().conjugate())


def test_oblique_evanescent_spins_share_reflectance():
    regions, widths = CHAIN_CASES[3][1:]
    up = chain_solve(regions, widths, SPIN_UP)
    down = chain_solve(regions, widths, SPIN_DOWN)
    assert abs(down.r) == pytest.approx(abs(up.r), rel=1e-12)
    assert abs(down.t) == pytest.approx(abs(up.t), rel=1e-12)
    # oblique tunnelling shifts the two spin phases differently
    assert abs(cmath.phase(down.r.to_complex() / up.r.to_complex())) > 1e-3


def test_chain_perpendicular_spins_identical():
    regions = (classify_region(1.6, 0.0), classify_region(1.6, 1.2),
               classify_region(1.6, 0.0))
    up = chain_solve(regions, (0.7,), SPIN_UP)
    down = chain_solve(regions, (0.7,), SPIN_DOWN)
    assert up.r.to_complex() == down.r.to_complex()
    assert up.t.to_complex() == down.t.to_complex()


def test_trivial_step_is_transparent():
    same = classify_region(1.5, 0.0, p_y=0.2)
    res = step_coefficients(same, classify_region(1.5, 0.0, p_y=0.2))
    assert abs(res.r) < 1e-15
    assert res.t.to_complex() == pytest.approx(1.0)


def test_zero_width_barrier_is_transparent():
    out = classify_region(1.6, 0.0)
    res = chain_solve((out, classify_region(1.6, 1.2), out), (0.0,))
    assert abs(res.r) < 1e-14
    assert res.t.to_complex() == pytest.approx(1.0)


def test_deep_barrier_stays_finite():
    out = classify_region(1.6, 0.0)
    barrier = classify_region(1.6, 1.2)
    res = chain_solve((out, barrier, out), (2000.0,))
    assert abs(res.r) == pytest.approx(1.0, abs=1e-12)
    assert res.t.to_complex() == 0.0
    assert math.isfinite(res.flux_defect)


def test_chain_validates_inputs():
    a = classify_region(1.5, 0.0)
    b = classify_region(1.5, 0.6)
    with pytest.raises(ValueError, match="width"):
        chain_solve((a, b), (0.5,))
    with pytest.raises(ValueError, match="width"):
        chain_solve((a, b, a), (-0.5,))
    with pytest.raises(ValueError, match="at least two"):
        chain_solve((a,))
    with pytest.raises(ValueError, match="travelling"):
        chain_solve((classify_region(1.5, 1.0), a))
    with pytest.raises(ValueError, match="share"):
        chain_solve((a, classify_region(1.6, 0.6)))


@given(
    energy=st.floats(1.1, 4.0),
    v_frac=st.floats(0.0, 0.95),
    y_frac=st.floats(0.0, 0.8),
)
@settings(max_examples=25, deadline=None)
def test_random_travelling_steps_conserve_flux(energy, v_frac, y_frac):
    p_y = y_frac * math.sqrt(energy**2 - 1.0)
    thr = math.hypot(p_y, 1.0)
    # choose the far side anywhere travelling, downhill steps included
    e_prime = thr * 1.02 + v_frac * energy
    left = classify_region(energy, 0.0, p_y=p_y)
    right = classify_region(energy, energy - e_prime, p_y=p_y)
    res = step_coefficients(left, right)
    assert res.flux_defect < 1e-10
    assert _continuity_defect((left, right), (), res, SPIN_UP) < 1e-11


# ----------------------------------------------------------- closed forms


def test_step_closed_form_matches_chain():
    for _ in range(10):
        energy = float(rng.uniform(1.05, 4.0))
        e_prime = float(rng.uniform(1.02, energy + 1.5))
        left = classify_region(energy, 0.0)
        right = classify_region(energy, energy - e_prime)
        r_closed, t_closed = closed_step_perpendicular(left, right)
        res = step_coefficients(left, right)
        assert res.r.to_complex() == pytest.approx(r_closed.to_complex(), abs=1e-13)
        assert res.t.to_complex() == pytest.approx(t_closed.to_complex(), abs=1e-13)


def test_step_closed_form_guards_domain():
    with pytest.raises(ValueError, match="travelling"):
        closed_step_perpendicular(classify_region(1.5, 0.0), classify_region(1.5, 1.0))
    with pytest.raises(ValueError, match="perpendicular"):
        closed_step_perpendicular(
            classify_region(1.5, 0.0, p_y=0.1), classify_region(1.5, 0.2, p_y=0.1)
        )


@pytest.mark.parametrize(
    "energy,potential,width",
    [(1.6, 1.2, 0.7), (1.2, 2.0, 0.9), (1.05, 1.9, 1.3), (1.6, 1.2, 35.0)],
    ids=["ordinary", "tall barrier", "taller than 2E", "deep"],
)
def test_barrier_closed_form_matches_chain(energy, potential, width):
    out = classify_region(energy, 0.0)
    barrier = classify_region(energy, potential)
    r_closed, t_closed = closed_barrier_perpendicular(out, barrier, width)
    res = chain_solve((out, barrier, out), (width,))
    assert res.r.to_complex() == pytest.approx(r_closed.to_complex(), abs=1e-12)
    assert res.t.to_complex() == pytest.approx(t_closed.to_complex(), abs=1e-12)
    assert res.flux_defect < 1e-10


def test_barrier_interior_amplitudes_closed_form():
    # T1, R1 under the barrier in terms of the entrance/exit rapidities
    for energy, potential, width in ((1.8, 0.9, 1.1), (1.6, 0.8, 0.7)):
        out = classify_region(energy, 0.0)
        barrier = classify_region(energy, potential)
        res = chain_solve((out, barrier, out), (width,))
        u_b, u_o = barrier.u_plus, out.u
        sh = cmath.sinh
        t1_want = res.t.to_complex() * (
            math.sinh(0.5 * u_b) * math.cosh(0.5 * u_o)
            - 1j * math.cosh(0.5 * u_b) * math.sinh(0.5 * u_o)
        ) / math.sinh(u_b)
        r1_want = res.t.to_complex() * (
            math.sinh(0.5 * u_b) * math.cosh(0.5 * u_o)
            + 1j * math.cosh(0.5 * u_b) * math.sinh(0.5 * u_o)
        ) / math.sinh(u_b)
        t1, r1 = res.amplitudes[1]
        assert t1.to_complex() == pytest.approx(t1_want, abs=1e-13)
        assert r1.to_complex() == pytest.approx(r1_want, abs=1e-13)


def test_klein_step_closed_form_matches_chain():
    for p_y in (0.0, 0.3):
        left = classify_region(1.3, 0.0, p_y=p_y)
        right = classify_region(1.3, 3.5, p_y=p_y)
        r_closed, t_closed = closed_klein_step(left, right)
        res = step_coefficients(left, right)
        assert res.r.to_complex() == pytest.approx(r_closed.to_complex(), abs=1e-13)
        assert res.t.to_complex() == pytest.approx(t_closed.to_complex(), abs=1e-13)
        # outgoing matching transmits: below-unit reflection, positive flux
        assert abs(res.r) < 1.0
        assert res.transmittance > 0.0
        assert res.flux_defect < 1e-12


def test_klein_step_perpendicular_reduction():
    left = classify_region(1.3, 0.0)
    right = classify_region(1.3, 3.5)
    r_closed, _ = closed_klein_step(left, right)
    want = -math.cosh(0.5 * (left.u - right.u)) / math.cosh(0.5 * (left.u + right.u))
    assert r_closed.to_complex() == pytest.approx(want)


def test_klein_incoming_convention_overreflects():
    left = classify_region(1.5, 0.0, p_y=0.3)
    right = classify_region(1.5, 4.0, p_y=0.3)
    res = step_coefficients(left, right, klein_convention=KLEIN_INCOMING)
    assert abs(res.r) > 1.0
    assert res.flux_ratio < 0.0
    # the paradoxical bookkeeping still balances: R - |T| = 1
    assert res.flux_defect < 1e-12


# ------------------------------------------------- precession on reflection


def test_total_reflection_is_unimodular():
    left = classify_region(1.2, 0.0, p_y=0.25)
    for potential in (1.5, 1.8, 2.1):
        for spin in (SPIN_UP, SPIN_DOWN):
            res = step_coefficients(left, classify_region(1.2, potential, p_y=0.25), spin)
            assert abs(res.r) == pytest.approx(1.0, abs=1e-12)
            assert res.flux_ratio == 0.0


def test_total_reflection_closed_amplitudes():
    # printed closed forms, valid where the barrier rapidities are real
    for energy, potential, p_y in ((1.8, 1.35, 0.3), (2.2, 1.9, 0.25), (1.5, 1.1, 0.2)):
        left = classify_region(energy, 0.0, p_y=p_y)
        right = classify_region(energy, potential, p_y=p_y)
        assert right.e_prime > p_y
        tu = math.tanh(0.5 * left.u)
        tp = math.tanh(0.5 * right.u_plus)
        tm = math.tanh(0.5 * right.u_minus)
        eip = cmath.exp(1j * left.phi)
        r_up = -(tp + tu * 1j * eip) / (tp - tu * 1j / eip)
        r_down = -(tm - tu * 1j / eip) / (tm + tu * 1j * eip)
        assert step_coefficients(left, right).r.to_complex() == pytest.approx(r_up)
        assert step_coefficients(left, right, SPIN_DOWN).r.to_complex() == pytest.approx(r_down)


def test_reflection_precession_height_independent():
    energy, p_y = 1.8, 0.3
    phi = classify_region(energy, 0.0, p_y=p_y).phi
    want = reflection_precession(energy, phi)
    deltas = []
    for potential in (1.2, 1.45, 1.7):
        regions = (classify_region(energy, 0.0, p_y=p_y),
                   classify_region(energy, potential, p_y=p_y))
        r_up = chain_solve(regions).r.to_complex()
        r_down = chain_solve(regions, spin=SPIN_DOWN).r.to_complex()
        deltas.append(cmath.phase(r_up * r_down.conjugate()))
    for delta in deltas:
        assert delta == pytest.approx(want, abs=1e-10)


def test_reflection_precession_perpendicular_is_zero():
    assert reflection_precession(1.5, 0.0) == 0.0
    regions = (classify_region(1.5, 0.0), classify_region(1.5, 2.2))
    r_up = chain_solve(regions).r.to_complex()
    r_down = chain_solve(regions, spin=SPIN_DOWN).r.to_complex()
    assert cmath.phase(r_up * r_down.conjugate()) == pytest.approx(0.0, abs=1e-14)


def test_reflection_precession_matches_coulomb_angle():
    # grazing reflection at angle phi is Coulomb deflection through pi - 2 phi
    for energy, phi in ((1.3, 0.4), (2.5, -0.9), (1.01, 1.2)):
        assert reflection_precession(energy, phi) == pytest.approx(
            -mott_precession(energy, math.pi - 2.0 * phi), abs=1e-12
        )


def test_reflection_precession_guards_domain():
    with pytest.raises(ValueError, match="E > m"):
        reflection_precession(0.9, 0.3)
    with pytest.raises(ValueError, match="phi"):
        reflection_precession(1.5, 1.6)
    with pytest.raises(ValueError, match="mass"):
        reflection_precession(1.5, 0.3, mass=0.0)


# ------------------------------------------------------- Coulomb scattering


def _random_elastic_pair(p_mag, theta):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    seed = rng.normal(size=3)
    perp = np.cross(axis, seed)
    perp /= np.linalg.norm(perp)
    p_i = p_mag * axis
    p_f = p_mag * (math.cos(theta) * axis + math.sin(theta) * perp)
    return p_i, p_f


def test_born_amplitude_reproduces_mott():
    for _ in range(10):
        p_mag = float(rng.uniform(0.1, 5.0))
        theta = float(rng.uniform(0.1, math.pi - 1e-6))
        p_i, p_f = _random_elastic_pair(p_mag, theta)
        res = born_coulomb(p_i, p_f, z=4.0)
        energy = math.hypot(1.0, p_mag)
        want = mott_cross_section(energy, theta, z=4.0)
        assert res.cross_section == pytest.approx(want, rel=1e-12)
        assert res.precession == pytest.approx(mott_precession(energy, theta), rel=1e-12, abs=1e-12)


def test_born_rotor_is_unit_and_in_scattering_plane():
    p_i, p_f = _random_elastic_pair(2.0, 0.8)
    res = born_coulomb(p_i, p_f, z=1.0)
    rotor = res.rotor
    unit = rotor * rotor.reverse()
    assert unit.scalar_part == pytest.approx(1.0)
    assert (unit - ONE3 * unit.scalar_part).coeff_norm() < 1e-12
    assert rotor.grade(1).coeff_norm() == 0.0
    assert rotor.grade(3).coeff_norm() == 0.0
    # the bivector part lies in the p_f ^ p_i plane
    plane = _pauli_vec(p_f) * _pauli_vec(p_i)
    b1 = to_dense(rotor.grade(2))
    b2 = to_dense(plane.grade(2))
    b1 /= np.linalg.norm(b1)
    b2 /= np.linalg.norm(b2)
    assert min(np.linalg.norm(b1 - b2), np.linalg.norm(b1 + b2)) < 1e-12


def _pauli_vec(v):
    return SIG3[1] * float(v[0]) + SIG3[2] * float(v[1]) + SIG3[3] * float(v[2])


def test_born_amplitude_structure():
    p_i = np.array([0.0, 0.0, 1.3])
    p_f = np.array([0.0, 1.3, 0.0])
    res = born_coulomb(p_i, p_f, z=2.0)
    q = p_f - p_i
    coupling = 2.0 * FINE_STRUCTURE / float(q @ q)
    energy = math.hypot(1.0, 1.3)
    want = ONE3 * (2.0 * energy * coupling) + _pauli_vec(q) * coupling
    assert (res.amplitude - want).coeff_norm() < 1e-15


def test_rutherford_limit():
    p_mag, theta, z = 0.01, 1.1, 1.0
    p_i, p_f = _random_elastic_pair(p_mag, theta)
    classical = (z * FINE_STRUCTURE) ** 2 / (4.0 * p_mag**4 * math.sin(0.5 * theta) ** 4)
    assert born_coulomb(p_i, p_f, z=z).cross_section == pytest.approx(classical, rel=1e-3)


def test_born_guards_kinematics():
    with pytest.raises(ValueError, match="elastic"):
        born_coulomb([1.0, 0, 0], [0, 2.0, 0], z=1.0)
    with pytest.raises(ValueError, match="forward"):
        born_coulomb([1.0, 0, 0], [1.0, 0, 0], z=1.0)
    with pytest.raises(ValueError, match="nonzero"):
        born_coulomb([0.0, 0, 0], [0.0, 0, 0], z=1.0)
    with pytest.raises(ValueError, match="3-vector"):
        born_coulomb([1.0, 0], [0, 1.0], z=1.0)


def test_mott_cross_section_guards_domain():
    with pytest.raises(ValueError, match="E > m"):
        mott_cross_section(0.9, 0.5, z=1.0)
    with pytest.raises(ValueError, match="angle"):
        mott_cross_section(1.5, 0.0, z=1.0)
    with pytest.raises(ValueError, match="angle"):
        mott_cross_section(1.5, 4.0, z=1.0)


def test_mott_precession_limits():
    assert mott_precession(1.5, 1e-9) == pytest.approx(0.0, abs=1e-8)
    # non-relativistic spins barely precess
    assert abs(mott_precession(1.0 + 1e-6, 2.0)) < 2e-3


def test_feynman_kernel_inverts_momentum_operator():
    momentum = (1.7, 0.4, -0.2, 0.9)
    p_mv = four_vector(*momentum)
    # a grade-mixed operand built from spacetime basis blades
    operand = GAMMA[0] * 1.3 + (GAMMA[1] * GAMMA[2]) * 0.7 + GAMMA[3] * -0.4
    out = feynman_kernel(momentum, 1.0, operand)
    back = p_mv * out - out * GAMMA[0] * 1.0
    assert (back - operand).coeff_norm() < 1e-12


def test_feynman_kernel_rejects_mass_shell():
    energy = math.hypot(1.0, 0.8)
    with pytest.raises(ValueError, match="pole"):
        feynman_kernel((energy, 0.8, 0.0, 0.0), 1.0, GAMMA[0])


# ---------------------------------------------------------- pair creation


def test_pair_rate_vanishes_below_threshold():
    assert klein_pair_rate(1.9) == 0.0
    assert klein_pair_rate(2.0) == 0.0


def test_pair_rate_threshold_law():
    # near threshold the rate grows as pi m^3 eps^3 / 32
    for eps in (0.005, 0.01, 0.02):
        rate = klein_pair_rate(2.0 * (1.0 + eps))
        assert rate / (math.pi * eps**3 / 32.0) == pytest.approx(1.0, abs=0.05)


def test_pair_rate_frozen_value():
    assert klein_pair_rate(2.02) == pytest.approx(1.0032956506180409e-07, rel=1e-9)


def test_pair_rate_quadrature_converged():
    full = klein_pair_rate(2.02)
    half = klein_pair_rate(2.02, mode_cutoffs=(80, 80))
    assert half == pytest.approx(full, rel=1e-4)


def test_pair_rate_scales_as_mass_cubed():
    assert klein_pair_rate(4.04, mass=2.0) == pytest.approx(8.0 * klein_pair_rate(2.02))


def test_pair_rate_flux_normalised_variant():
    # dividing out the attempt flux replaces the threshold law by eps^3/(6 pi)
    eps = 0.01
    rate = klein_pair_rate(2.0 * (1.0 + eps), flux_normalised=True)
    assert rate / (eps**3 / (6.0 * math.pi)) == pytest.approx(1.0, abs=0.05)


# ------------------------------------------------------- surface propagator


def test_sphere_mesh_weights_are_exact():
    points, normals, weights = sphere_mesh(1.7, 10, 20, center=(0.5, -1.0, 2.0))
    assert weights.sum() == pytest.approx(4.0 * math.pi * 1.7**2, rel=1e-12)
    assert np.max(np.abs(np.linalg.norm(normals, axis=1) - 1.0)) < 1e-12
    radii = np.linalg.norm(points - np.array([0.5, -1.0, 2.0]), axis=1)
    assert np.max(np.abs(radii - 1.7)) < 1e-12
    # smooth polynomial integrates to its exact surface integral
    x = points[:, 0] - 0.5
    integral = float((x**2 + 3.0) @ weights)
    want = 4.0 * math.pi * 1.7**4 / 3.0 + 3.0 * 4.0 * math.pi * 1.7**2
    assert integral == pytest.approx(want, rel=1e-12)


def test_sphere_mesh_guards_inputs():
    with pytest.raises(ValueError, match="radius"):
        sphere_mesh(0.0, 4, 8)
    with pytest.raises(ValueError, match="node"):
        sphere_mesh(1.0, 0, 8)


def test_helmholtz_kernel_solves_radial_equation():
    p, h = 0.83, 1e-5
    for r in (0.7, 2.4):
        # r g(r) obeys the 1-d Helmholtz equation (r g)'' = -p^2 (r g)
        g = lambda s: s * helmholtz_kernel(s, p).to_complex()
        second = (g(r + h) - 2.0 * g(r) + g(r - h)) / (h * h)
        assert second == pytest.approx(-p * p * g(r), rel=1e-5)
    with pytest.raises(ValueError, match="distance"):
        helmholtz_kernel(0.0, p)


_HUYGENS_ENERGY = 1.3
_HUYGENS_CHANNELS = (
    ((0.36, 0.48, 0.80), 0.9 - 0.4j, False),
    ((-0.5, 0.7, 0.2), -0.3 + 1.1j, False),
    ((0.0, 0.0, 1.0), 0.5 + 0.25j, True),
)


def _huygens_field(point):
    """A known solution: three boosted plane waves, one with flipped spin."""
    total = None
    for direction, factor, flip in _HUYGENS_CHANNELS:
        n_hat = np.asarray(direction, dtype=float)
        n_hat = n_hat / np.linalg.norm(n_hat)
        p = math.sqrt(_HUYGENS_ENERGY**2 - 1.0)
        u = math.acosh(_HUYGENS_ENERGY)
        n_mv = _pauli_vec(n_hat)
        boost = ONE3 * math.cosh(0.5 * u) + n_mv * math.sinh(0.5 * u)
        if flip:
            boost = boost * (SIG3[1] * SIG3[3])
        theta = p * float(n_hat @ np.asarray(point, dtype=float))
        phase = PhaseScalar.exp_j(theta) * PhaseScalar.from_complex(factor)
        term = boost * phase.to_multivector()
        total = term if total is None else total + term
    return total


def _huygens_surface(n_polar, n_azimuth):
    points, normals, weights = sphere_mesh(2.1, n_polar, n_azimuth)
    values = np.array([to_dense(_huygens_field(p)) for p in points])
    return points, normals, weights, values


def test_huygens_reconstructs_interior_values():
    points, normals, weights, values = _huygens_surface(24, 48)
    targets = np.array([[0.3, -0.2, 0.4], [-0.8, 0.1, -0.5], [0.0, 0.0, 0.0]])
    rebuilt = huygens_propagate(points, normals, weights, values, _HUYGENS_ENERGY, targets)
    reference = np.array([to_dense(_huygens_field(t)) for t in targets])
    scale = np.max(np.abs(reference))
    assert np.max(np.abs(rebuilt - reference)) / scale < 1e-12


def test_huygens_error_falls_spectrally_with_the_mesh():
    target = np.array([[-0.8, 0.1, -0.5]])
    reference = to_dense(_huygens_field(target[0]))
    errors = []
    for n_polar, n_azimuth in ((8, 16), (16, 32)):
        points, normals, weights, values = _huygens_surface(n_polar, n_azimuth)
        rebuilt = huygens_propagate(points, normals, weights, values, _HUYGENS_ENERGY, target)
        errors.append(np.max(np.abs(rebuilt[0] - reference)))
    assert errors[0] < 1e-4
    assert errors[1] < errors[0] / 1000.0


def test_huygens_vanishes_outside_the_surface():
    points, normals, weights, values = _huygens_surface(24, 48)
    outside = np.array([[3.5, 0.2, -1.0]])
    rebuilt = huygens_propagate(points, normals, weights, values, _HUYGENS_ENERGY, outside)
    assert np.max(np.abs(rebuilt)) < 1e-9


def test_huygens_zero_data_gives_zero():
    points, normals, weights, _ = _huygens_surface(8, 16)
    out = huygens_propagate(
        points, normals, weights, np.zeros((len(points), 8)), _HUYGENS_ENERGY,
        np.array([[0.1, 0.0, 0.0]]),
    )
    assert np.all(out == 0.0)


def test_huygens_guards_inputs():
    points, normals, weights, values = _huygens_surface(6, 12)
    target = np.array([[0.0, 0.0, 0.0]])
    with pytest.raises(ValueError, match="E > m|energy"):
        huygens_propagate(points, normals, weights, values, 0.9, target)
    with pytest.raises(ValueError, match="shape|values"):
        huygens_propagate(points, normals, weights, values[:, :4], _HUYGENS_ENERGY, target)
    with pytest.raises(ValueError, match="surface"):
        huygens_propagate(points, normals, weights, values, _HUYGENS_ENERGY,
                          points[:1].copy())
