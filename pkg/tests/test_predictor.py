"""Closed-form shift predictors: linear response, resummed second order,
orthogonal selections, and the Stern-Gerlach amplification curve."""

import math
import warnings

import numpy as np
import pytest

from weakmeas import (
    SGParams,
    density_state,
    gaussian,
    grid_state,
    make_scenario,
    moment,
    new_observable,
    p_power,
    predict_aav,
    predict_general,
    predict_orthogonal,
    predict_orthogonal_gaussian,
    projector_onto,
    pure_state,
    scenario_with_orthogonal_weak_value,
    sg_optimum,
    stern_gerlach_outcome,
    weak_value,
)
from weakmeas.amplifier import sg_family
from weakmeas.errors import (
    LambdaOutOfRange,
    NonPositiveDenominator,
    NotOrthogonal,
    OrthogonalPPS,
    PointerNotEven,
    UnsupportedMixedOrthogonal,
    ValidityWarning,
)
from weakmeas.pointer import ANTICOMM_QP, gaussian_profile, variance_p

from support import (
    half_overlap_scenario,
    orthogonal_idempotent,
    orthogonal_sigma_x,
    qubit_pps_half_overlap,
    skewed_pointer,
)


def _quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        return fn(*args, **kwargs)


# --- linear response -----------------------------------------------------------


def test_aav_formula_hand_check():
    sc = half_overlap_scenario(0.02)
    aw = weak_value(sc.observable, sc.pre, sc.post).value
    anti = moment(sc.pointer, ANTICOMM_QP)
    varp = variance_p(sc.pointer)
    pred = predict_aav(sc.observable, sc.pre, sc.post, sc.g, sc.pointer)
    assert pred.regime == "aav"
    assert pred.delta_q == pytest.approx(sc.g * aw.real + sc.g * aw.imag * anti, abs=1e-15)
    assert pred.delta_p == pytest.approx(2.0 * sc.g * aw.imag * varp, abs=1e-15)
    assert pred.margin_weak is not None and pred.margin_aav is not None


def test_aav_and_general_refuse_orthogonal_selections():
    sc = orthogonal_sigma_x(0.01)
    with pytest.raises(OrthogonalPPS):
        predict_aav(sc.observable, sc.pre, sc.post, sc.g, sc.pointer)
    with pytest.raises(OrthogonalPPS):
        predict_general(sc.observable, sc.pre, sc.post, sc.g, sc.pointer)


def test_general_extends_aav_by_one_order():
    # With a generic (non-even) pointer the two predictions separate at
    # second order, so their gap shrinks by ~4 per halving of g.
    pt = skewed_pointer(1.0)
    gaps = []
    for g in (8e-3, 4e-3):
        sc = half_overlap_scenario(g, pt)
        d_aav = predict_aav(sc.observable, sc.pre, sc.post, g, pt).delta_q
        d_gen = predict_general(sc.observable, sc.pre, sc.post, g, pt).delta_q
        gaps.append(abs(d_gen - d_aav))
    assert 3.5 < gaps[0] / gaps[1] < 4.5


def test_general_matches_stern_gerlach_closed_form():
    lam = 0.2
    family = sg_family(lam)
    for alpha in (0.3, 1.2, 2.0, 2.9):
        sc = family(alpha)
        pred = _quiet(
            predict_general, sc.observable, sc.pre, sc.post, sc.g, sc.pointer
        )
        expected = stern_gerlach_outcome(SGParams(alpha=alpha, lmbda=lam))
        assert pred.delta_q / sc.g == pytest.approx(expected, abs=1e-12)
        assert pred.denominator_c is not None and pred.denominator_c > 0.0


def test_general_nonpositive_denominator():
    # Selections engineered so the first-order response vanishes while the
    # second-order coefficient is large and negative: <f|A|i> = 0 with
    # <f|A^2|i> of order one against a small overlap.
    a = new_observable(np.diag([1.0, 0.0, -1.0]))
    psi = np.ones(3) / math.sqrt(3.0)
    w = np.array([1.0, -2.0, 1.0]) / math.sqrt(6.0)
    phi = psi * 0.01 + w
    with pytest.raises(NonPositiveDenominator):
        _quiet(
            predict_general,
            a,
            pure_state(psi),
            projector_onto(phi),
            0.5,
            gaussian(1.0),
        )


# --- orthogonal selections --------------------------------------------------------


def test_orthogonal_pinned_values():
    sc = orthogonal_sigma_x(0.02)
    pred = predict_orthogonal(sc.observable, sc.pre, sc.post, sc.g, sc.pointer)
    assert pred.regime == "orthogonal"
    assert pred.delta_q == pytest.approx(0.0, abs=1e-15)
    assert pred.delta_p == pytest.approx(0.0, abs=1e-15)
    assert pred.var_q_out == pytest.approx(3.0, rel=1e-12)
    assert pred.var_p_out == pytest.approx(0.75, rel=1e-12)

    idem = orthogonal_idempotent(0.02)
    pred = predict_orthogonal(idem.observable, idem.pre, idem.post, idem.g, idem.pointer)
    assert pred.delta_q == pytest.approx(0.01, rel=1e-12)
    assert pred.delta_p == pytest.approx(0.0, abs=1e-15)


def test_orthogonal_general_and_gaussian_forms_agree():
    # For a Gaussian pointer the moment-based orthogonal formulas must
    # collapse to the closed Gaussian ones, field by field.
    for delta_q in (0.8, 1.0, 1.5):
        sc = scenario_with_orthogonal_weak_value(0.2 + 0.1j, 0.02, delta_q)
        a = predict_orthogonal(sc.observable, sc.pre, sc.post, sc.g, sc.pointer)
        b = predict_orthogonal_gaussian(sc.observable, sc.pre, sc.post, sc.g, delta_q)
        assert a.delta_q == pytest.approx(b.delta_q, rel=1e-12, abs=1e-15)
        assert a.delta_p == pytest.approx(b.delta_p, rel=1e-12, abs=1e-15)
        assert a.var_q_out == pytest.approx(b.var_q_out, rel=1e-12)
        assert a.var_p_out == pytest.approx(b.var_p_out, rel=1e-12)


def test_orthogonal_gaussian_peaks():
    g, delta_q = 0.02, 1.0
    sc = scenario_with_orthogonal_weak_value(0.2 + 0.1j, g, delta_q)
    pred = predict_orthogonal_gaussian(sc.observable, sc.pre, sc.post, g, delta_q)
    assert pred.regime == "orthogonal-gaussian"
    root2 = math.sqrt(2.0)
    delta_p = 1.0 / (2.0 * delta_q)
    qc = g * 0.2
    pc = g * 0.1 * delta_p**2
    assert pred.peaks_q == pytest.approx((qc - root2 * delta_q, qc + root2 * delta_q),
                                         abs=1e-10)
    assert pred.peaks_p == pytest.approx((pc - root2 * delta_p, pc + root2 * delta_p),
                                         abs=1e-10)


def test_orthogonal_error_paths():
    obs, pre, post = qubit_pps_half_overlap()
    with pytest.raises(NotOrthogonal):
        predict_orthogonal(obs, pre, post, 0.01, gaussian(1.0))

    # mixed pre-selection, orthogonal to the projector
    a = new_observable(np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex))
    mixed = density_state(np.diag([0.5, 0.5, 0.0]))
    post3 = projector_onto([0.0, 0.0, 1.0])
    with pytest.raises(UnsupportedMixedOrthogonal):
        predict_orthogonal(a, mixed, post3, 0.01, gaussian(1.0))

    # pointer with nonzero odd momentum moments
    n, half = 2048, 12.0
    dq = 2.0 * half / n
    q = -half + dq * np.arange(n)
    phi = gaussian_profile(q, 1.0) * np.exp(0.4j * q)
    phi = phi / math.sqrt(float(np.sum(np.abs(phi) ** 2) * dq))
    tilted = grid_state(-half, dq, n, [(1.0, phi)])
    sc = orthogonal_sigma_x(0.01)
    with pytest.raises(PointerNotEven):
        predict_orthogonal(sc.observable, sc.pre, sc.post, sc.g, tilted)


# --- Stern-Gerlach closed forms ------------------------------------------------------


def test_stern_gerlach_outcome_values():
    assert stern_gerlach_outcome(SGParams(alpha=math.pi / 2, lmbda=0.3)) == 1.0
    lam, alpha = 0.2, 2.0
    expected = math.sin(alpha) / ((1.0 - 0.5 * lam**2) * math.cos(alpha) + 1.0)
    assert stern_gerlach_outcome(SGParams(alpha=alpha, lmbda=lam)) == pytest.approx(
        expected, rel=1e-15
    )


def test_sg_params_validation():
    with pytest.raises(ValueError):
        SGParams(alpha=-0.1, lmbda=0.2)
    with pytest.raises(LambdaOutOfRange):
        SGParams(alpha=1.0, lmbda=1.5)
    with pytest.raises(LambdaOutOfRange):
        sg_optimum(0.0)
    with pytest.warns(ValidityWarning):
        SGParams(alpha=1.0, lmbda=0.7)


def test_sg_optimum_is_the_curve_maximum():
    for lam in (0.05, 0.1, 0.2, 0.4):
        alpha_opt, outcome_max = sg_optimum(lam)
        assert stern_gerlach_outcome(
            SGParams(alpha=alpha_opt, lmbda=lam)
        ) == pytest.approx(outcome_max, rel=1e-14)
        for off in (-0.01, 0.01):
            assert (
                stern_gerlach_outcome(SGParams(alpha=alpha_opt + off, lmbda=lam))
                < outcome_max
            )
        assert outcome_max == pytest.approx(
            1.0 / math.sqrt(lam**2 - 0.25 * lam**4), rel=1e-15
        )


# --- validity gating -------------------------------------------------------------------


def test_validity_warnings_fire_by_margin():
    obs, pre, post = qubit_pps_half_overlap()
    with pytest.warns(ValidityWarning, match="higher-order"):
        predict_general(obs, pre, post, 0.3, gaussian(1.0))
    with pytest.warns(ValidityWarning, match="unreliable"):
        predict_general(obs, pre, post, 0.6, gaussian(1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error", ValidityWarning)
        predict_general(obs, pre, post, 0.01, gaussian(1.0))  # no warning


def test_margin_aav_reported_only_for_rank_one_pure():
    obs, _, post = qubit_pps_half_overlap()
    mixed = density_state(np.diag([0.6, 0.4]))
    pred = predict_general(obs, mixed, post, 0.01, gaussian(1.0))
    assert pred.margin_aav is None
    assert pred.margin_weak is not None
