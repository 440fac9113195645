"""Weak values and weakness diagnostics.

Covers the standard weak value tr(P A rho)/tr(P rho), its two-sided
generalization tr(P A^m rho A^l)/tr(P rho), and the orthogonal-selection
variant in which the leading response is carried by tr(P A rho A). The two
margin diagnostics quantify how far a scenario sits from the linear-response
and weak-interaction regimes; predictions should only be trusted while they
stay well below one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    HigherOrderOrthogonality,
    NotOrthogonal,
    OrderTooLarge,
    OrthogonalPPS,
)
from .pointer import PointerState, moment, p_power, variance_p
from .qops import Observable, PostSelection, SystemState, overlap

__all__ = [
    "ORTH_THRESHOLD",
    "G2_THRESHOLD",
    "MAX_WEAK_ORDER",
    "WeakValueReport",
    "weak_value",
    "generalized_weak_value",
    "orthogonal_weak_value",
    "aav_margin",
    "weak_interaction_margin",
    "weak_interaction_margin_argmax",
]

ORTH_THRESHOLD = 1e-12
G2_THRESHOLD = 1e-12
MAX_WEAK_ORDER = 12


@dataclass(frozen=True)
class WeakValueReport:
    """A weak value together with the denominator that conditioned it.

    ``kind`` is one of ``standard``, ``generalized`` or ``orthogonal``;
    ``orders`` holds (m, l) for the two-sided kinds.
    """

    value: complex
    kind: str
    orders: tuple[int, int] | None
    denominator: complex


def _check_dims(obs: Observable, pre: SystemState, post: PostSelection) -> None:
    if not (obs.dim == pre.dim == post.dim):
        raise DimensionMismatch(
            f"dimensions differ: observable {obs.dim}, state {pre.dim}, projector {post.dim}"
        )


def selection_trace(
    obs: Observable, pre: SystemState, post: PostSelection, m: int, l: int
) -> complex:
    """tr(P A^m rho A^l) through the spectral decomposition (no order cap)."""
    _check_dims(obs, pre, post)
    return complex(np.trace(post.matrix @ obs.power(m) @ pre.matrix @ obs.power(l)))


def weak_value(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
) -> WeakValueReport:
    """Standard weak value tr(P A rho)/tr(P rho).

    Raises OrthogonalPPS when the selections are orthogonal within
    ``orth_threshold``; use `orthogonal_weak_value` there instead.
    """
    denom = overlap(post, pre)
    if denom <= orth_threshold:
        raise OrthogonalPPS(
            f"selection overlap {denom:.3e} is below {orth_threshold:.1e}; "
            "the standard weak value is undefined"
        )
    num = selection_trace(obs, pre, post, 1, 0)
    return WeakValueReport(
        value=num / denom, kind="standard", orders=None, denominator=complex(denom)
    )


def generalized_weak_value(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    m: int,
    l: int,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
) -> WeakValueReport:
    """Two-sided weak value tr(P A^m rho A^l)/tr(P rho)."""
    if m < 0 or l < 0:
        raise ValueError("orders must be nonnegative")
    if m > MAX_WEAK_ORDER or l > MAX_WEAK_ORDER:
        raise OrderTooLarge(f"orders up to {MAX_WEAK_ORDER} supported, got ({m}, {l})")
    denom = overlap(post, pre)
    if denom <= orth_threshold:
        raise OrthogonalPPS(
            f"selection overlap {denom:.3e} is below {orth_threshold:.1e}"
        )
    num = selection_trace(obs, pre, post, m, l)
    return WeakValueReport(
        value=num / denom, kind="generalized", orders=(m, l), denominator=complex(denom)
    )


def orthogonal_weak_value(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    m: int = 1,
    l: int = 0,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
    g2_threshold: float = G2_THRESHOLD,
) -> WeakValueReport:
    """Orthogonal-selection weak value.

    Defined as tr(P A^(m+1) rho A^(l+1)) / ((m+1)(l+1) tr(P A rho A));
    requires orthogonal selections and a nonvanishing tr(P A rho A).
    """
    if m < 0 or l < 0:
        raise ValueError("orders must be nonnegative")
    if m > MAX_WEAK_ORDER or l > MAX_WEAK_ORDER:
        raise OrderTooLarge(f"orders up to {MAX_WEAK_ORDER} supported, got ({m}, {l})")
    ov = overlap(post, pre)
    if ov > orth_threshold:
        raise NotOrthogonal(
            f"selection overlap {ov:.3e} exceeds {orth_threshold:.1e}; "
            "use the standard weak value"
        )
    denom = float(np.real(selection_trace(obs, pre, post, 1, 1)))
    if abs(denom) <= g2_threshold:
        raise HigherOrderOrthogonality(
            "tr(P A rho A) vanishes as well; the pointer response starts at "
            "higher order and no orthogonal weak value exists"
        )
    num = selection_trace(obs, pre, post, m + 1, l + 1)
    return WeakValueReport(
        value=num / ((m + 1) * (l + 1) * denom),
        kind="orthogonal",
        orders=(m, l),
        denominator=complex(denom),
    )


def aav_margin(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    g: float,
    pointer: PointerState,
    n_max: int = 4,
) -> float:
    """Linear-response validity diagnostic for pure rank-1 selections.

    Returns max over n = 1..n_max of
    ``|g| dp |<f|A^n|i>|^(1/n) / |<f|i>|``; the first-order pointer-shift
    formula is trustworthy only while this is far below one. Orthogonal
    selections give the +inf sentinel.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    _check_dims(obs, pre, post)
    if not pre.is_pure or not post.is_rank_one:
        raise ValueError("the linear-response margin is defined for rank-1 pure selections")
    fi = complex(np.vdot(post.vector, pre.vector))
    if abs(fi) == 0.0:
        return math.inf
    gdp = abs(g) * math.sqrt(variance_p(pointer))
    best = 0.0
    vec = pre.vector
    for n in range(1, n_max + 1):
        vec = obs.matrix @ vec
        amp = abs(complex(np.vdot(post.vector, vec)))
        best = max(best, gdp * amp ** (1.0 / n) / abs(fi))
    return best


def weak_interaction_margin(
    g: float, pointer: PointerState, n_max: int = 4
) -> float:
    """Weak-interaction diagnostic max(|g| dp, max_n |g| |<p^n>|^(1/n)).

    For a Gaussian, <p^n>^(1/n) grows like sqrt(n), so this makes no claim
    about the supremum over all orders; it reports the max up to ``n_max``
    (grid states support n_max <= 8).
    """
    return weak_interaction_margin_argmax(g, pointer, n_max)[0]


def weak_interaction_margin_argmax(
    g: float, pointer: PointerState, n_max: int = 4
) -> tuple[float, int]:
    """Like `weak_interaction_margin` but also reports which term attained
    the max (n = 1 denotes the |g| dp term)."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    best = abs(g) * math.sqrt(variance_p(pointer))
    best_n = 1
    for n in range(2, n_max + 1):
        term = abs(g) * abs(moment(pointer, p_power(n))) ** (1.0 / n)
        if term > best:
            best, best_n = term, n
    return best, best_n
