"""Pointer-state grids, transforms, moments and densities."""

import json
import math

import numpy as np
import pytest

from weakmeas import (
    default_grid,
    densities,
    gaussian,
    gaussian_profile,
    grid_state,
    moment,
    p_power,
    q_power,
    variance_p,
    variance_q,
)
from weakmeas.errors import EmptyGrid, GridTooSmall, UnsupportedOrder
from weakmeas.pointer import (
    ANTICOMM_QP,
    P_BRACE_P,
    PQ2P,
    PQP,
    QGrid,
    apply_p,
    pointer_from_wire,
    pointer_to_wire,
    to_momentum,
    translate,
)

from support import skewed_pointer


def _grid_gaussian(delta_q: float, n: int = 4096, half_span: float | None = None):
    """Grid pointer sampling an exact Gaussian, for closed-form cross-checks."""
    if half_span is None:
        half_span = 12.0 * delta_q
    dq = 2.0 * half_span / n
    q = -half_span + dq * np.arange(n)
    phi = gaussian_profile(q, delta_q)
    phi = phi / math.sqrt(float(np.sum(np.abs(phi) ** 2) * dq))
    return grid_state(-half_span, dq, n, [(1.0, phi)])


# --- grids and transforms ------------------------------------------------------


def test_grid_momenta_match_fft_convention():
    grid = QGrid(q_min=-8.0, dq=0.125, n=128)
    np.testing.assert_allclose(
        grid.momenta(), 2.0 * np.pi * np.fft.fftfreq(128, 0.125), atol=0.0
    )
    assert grid.dp == pytest.approx(2.0 * np.pi / (128 * 0.125), rel=1e-15)


def test_to_momentum_is_unitary():
    grid = QGrid(q_min=-10.0, dq=20.0 / 1024, n=1024)
    phi = gaussian_profile(grid.coords(), 0.7) * np.exp(0.3j * grid.coords())
    tilde = to_momentum(grid, phi)
    q_norm = float(np.sum(np.abs(phi) ** 2) * grid.dq)
    p_norm = float(np.sum(np.abs(tilde) ** 2) * grid.dp)
    assert p_norm == pytest.approx(q_norm, rel=1e-12)


def test_apply_p_matches_derivative():
    # p acts as -i d/dq: on exp(ikq) times a Gaussian envelope the expected
    # mean momentum is k.
    grid = QGrid(q_min=-12.0, dq=24.0 / 2048, n=2048)
    k = 1.3
    phi = gaussian_profile(grid.coords(), 1.0) * np.exp(1j * k * grid.coords())
    pphi = apply_p(grid, phi)
    mean_p = float(np.real(np.sum(np.conj(phi) * pphi) * grid.dq))
    assert mean_p == pytest.approx(k, rel=1e-10)


def test_translate_shifts_mean_and_preserves_norm():
    grid = QGrid(q_min=-12.0, dq=24.0 / 2048, n=2048)
    phi = gaussian_profile(grid.coords(), 0.8)
    shifted = translate(grid, phi, 1.7)
    q = grid.coords()
    mean = float(np.sum(q * np.abs(shifted) ** 2) * grid.dq)
    assert mean == pytest.approx(1.7, abs=1e-10)
    assert float(np.sum(np.abs(shifted) ** 2) * grid.dq) == pytest.approx(1.0, rel=1e-12)


def test_default_grid_covers_pointer_and_translations():
    grid = default_grid(1.0, g=3.0)
    assert grid.n == 4096
    # The grid is half-open: the last sample sits one cell shy of the upper
    # edge, so coverage is judged by q_min + n*dq.
    assert grid.q_min <= -30.0 and grid.q_min + grid.n * grid.dq >= 30.0
    grid_small = default_grid(0.5, g=0.0, n=256)
    assert grid_small.n == 256


# --- construction validation ---------------------------------------------------


def test_grid_state_validates_input():
    n, dq = 256, 0.125
    q = -16.0 + dq * np.arange(n)
    phi = gaussian_profile(q, 1.0)
    phi = phi / math.sqrt(float(np.sum(np.abs(phi) ** 2) * dq))
    with pytest.raises(ValueError):
        grid_state(-16.0, dq, 255, [(1.0, phi[:-1])])  # not a power of two
    with pytest.raises(ValueError):
        grid_state(-16.0, dq, n, [(0.5, phi)])  # weights must sum to one
    with pytest.raises(ValueError):
        grid_state(-16.0, dq, n, [(1.0, 2.0 * phi)])  # branch not normalized
    with pytest.raises(EmptyGrid):
        grid_state(-16.0, dq, n, [])
    with pytest.raises(GridTooSmall):
        narrow_q = -4.0 + (8.0 / n) * np.arange(n)
        narrow = gaussian_profile(narrow_q, 1.0)
        narrow = narrow / math.sqrt(float(np.sum(np.abs(narrow) ** 2) * (8.0 / n)))
        grid_state(-4.0, 8.0 / n, n, [(1.0, narrow)])  # < 8 sigma of coverage


# --- moments --------------------------------------------------------------------


def test_gaussian_moment_closed_forms():
    for delta_q in (0.5, 1.0, 2.0):
        g = gaussian(delta_q)
        var_p = 1.0 / (4.0 * delta_q**2)
        assert variance_q(g) == pytest.approx(delta_q**2, rel=1e-14)
        assert variance_p(g) == pytest.approx(var_p, rel=1e-14)
        assert moment(g, p_power(4)) == pytest.approx(3.0 * var_p**2, rel=1e-14)
        assert moment(g, q_power(4)) == pytest.approx(3.0 * delta_q**4, rel=1e-14)
        for n in (1, 3, 5):
            assert moment(g, p_power(n)) == 0.0
            assert moment(g, q_power(n)) == 0.0
        assert moment(g, ANTICOMM_QP) == 0.0
        assert moment(g, PQP) == 0.0
        assert moment(g, P_BRACE_P) == 0.0
        # <p q^2 p> = <q^4>/(4 dq^4) = 3/4 for a Gaussian, any width
        assert moment(g, PQ2P) == pytest.approx(0.75, rel=1e-14)


def test_grid_moments_agree_with_gaussian_closed_forms():
    for delta_q in (0.7, 1.0, 1.6):
        closed = gaussian(delta_q)
        sampled = _grid_gaussian(delta_q)
        specs = (
            [p_power(n) for n in range(1, 7)]
            + [q_power(n) for n in range(1, 7)]
            + [ANTICOMM_QP, PQP, PQ2P, P_BRACE_P]
        )
        for spec in specs:
            assert moment(sampled, spec) == pytest.approx(
                moment(closed, spec), rel=1e-9, abs=1e-10
            ), spec


def test_grid_moment_order_cap():
    sampled = _grid_gaussian(1.0)
    with pytest.raises(UnsupportedOrder):
        moment(sampled, q_power(9))
    with pytest.raises(UnsupportedOrder):
        moment(sampled, p_power(9))


def test_skewed_pointer_is_centred_but_not_even():
    """The recentred asymmetric profile used in convergence-order tests:
    all the moments a real wavefunction forces to zero are zero, while the
    parity-sensitive <p q p> stays visibly nonzero."""
    pt = skewed_pointer(1.0)
    assert abs(moment(pt, q_power(1))) < 1e-10
    assert abs(moment(pt, p_power(1))) < 1e-12
    assert abs(moment(pt, p_power(3))) < 1e-12
    assert abs(moment(pt, ANTICOMM_QP)) < 1e-10
    assert abs(moment(pt, PQP)) > 1e-2


# --- densities -------------------------------------------------------------------


def test_densities_normalized_for_gaussian_and_grid():
    for state in (gaussian(0.8), skewed_pointer(1.0)):
        qd, pd = densities(state)
        assert qd.total() == pytest.approx(1.0, abs=1e-10)
        assert pd.total() == pytest.approx(1.0, abs=1e-10)
        assert qd.spacing == pytest.approx(qd.coords[1] - qd.coords[0], rel=1e-12)
        # p coordinates must be monotonically increasing after the shift
        assert np.all(np.diff(pd.coords) > 0)


def test_density_variances_match_moments():
    pt = skewed_pointer(1.0)
    qd, pd = densities(pt)
    var_q = float(np.sum((qd.coords - np.sum(qd.coords * qd.values) * qd.spacing) ** 2
                         * qd.values) * qd.spacing)
    assert var_q == pytest.approx(variance_q(pt), rel=1e-9)
    var_p = float(np.sum(pd.coords**2 * pd.values) * pd.spacing)
    assert var_p == pytest.approx(variance_p(pt), rel=1e-9)


# --- wire format -------------------------------------------------------------------


def test_pointer_wire_round_trip_gaussian():
    wire = pointer_to_wire(gaussian(1.25))
    back = pointer_from_wire(json.loads(json.dumps(wire)))
    assert back == gaussian(1.25)


def test_pointer_wire_round_trip_grid_is_bit_exact():
    pt = skewed_pointer(0.9)
    wire = pointer_to_wire(pt)
    back = pointer_from_wire(json.loads(json.dumps(wire)))
    assert back.grid == pt.grid
    assert len(back.branches) == len(pt.branches)
    for (w1, s1), (w2, s2) in zip(back.branches, pt.branches):
        assert w1 == w2
        assert s1.tobytes() == s2.tobytes()


def test_pointer_wire_parse_errors_name_the_key():
    from weakmeas.errors import ParseError

    with pytest.raises(ParseError, match="pointer.type"):
        pointer_from_wire({"type": "triangular"})
    with pytest.raises(ParseError, match="delta_q"):
        pointer_from_wire({"type": "gaussian", "delta_q": -1.0})
    with pytest.raises(ParseError, match="pointer"):
        pointer_from_wire(["not", "an", "object"])
