"""Perturbative pointer-shift predictions for post-selected weak measurements.

The interaction is the impulsive coupling exp(-i g A p) between a system
observable A and the pointer momentum p (hbar = 1 throughout). After
post-selection the pointer's position and momentum means shift; this module
evaluates those shifts in closed form:

- `predict_aav`: first order in g (linear response).
- `predict_general`: second order with the resummed denominator, valid for
  mixed states and any small-but-finite coupling short of orthogonality.
- `predict_orthogonal` / `predict_orthogonal_gaussian`: exactly orthogonal
  selections, where the response is governed by the orthogonal weak value
  and the pointer arrives in a distorted (for Gaussians, double-peaked)
  profile.
- `stern_gerlach_outcome` / `sg_optimum`: the closed-form measured-value
  amplification curve for a spin-1/2 Stern-Gerlach arrangement and its
  analytic optimum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import (
    DegenerateDenominator,
    LambdaOutOfRange,
    NonPositiveDenominator,
    NotOrthogonal,
    OrthogonalPPS,
    PointerNotEven,
    UnsupportedMixedOrthogonal,
    ValidityWarning,
)
from .pointer import (
    ANTICOMM_QP,
    P_BRACE_P,
    PQ2P,
    PQP,
    PointerState,
    gaussian,
    moment,
    p_power,
    q_power,
    variance_p,
)
from .qops import Observable, PostSelection, SystemState, overlap
from .weak_values import (
    G2_THRESHOLD,
    ORTH_THRESHOLD,
    aav_margin,
    generalized_weak_value,
    orthogonal_weak_value,
    weak_interaction_margin,
)

__all__ = [
    "ShiftPrediction",
    "predict_aav",
    "predict_general",
    "predict_orthogonal",
    "predict_orthogonal_gaussian",
    "SGParams",
    "stern_gerlach_outcome",
    "sg_optimum",
]

# Weak-interaction margins above which predictions are flagged / distrusted.
MARGIN_WARN = 0.1
MARGIN_STRONG = 0.3


@dataclass(frozen=True)
class ShiftPrediction:
    """Predicted post-selected pointer statistics.

    ``delta_q`` / ``delta_p`` are shifts of the means relative to the initial
    pointer. Output variances and the resummation factor ``denominator_c``
    are populated only by the predictors that compute them. ``peaks_q`` /
    ``peaks_p`` locate the two maxima of the double-peaked orthogonal
    Gaussian profile. The margins record validity diagnostics at the
    prediction point (``margin_aav`` only for rank-1 pure selections).
    """

    regime: str
    delta_q: float
    delta_p: float
    var_q_out: float | None = None
    var_p_out: float | None = None
    denominator_c: float | None = None
    peaks_q: tuple[float, float] | None = None
    peaks_p: tuple[float, float] | None = None
    margin_weak: float | None = None
    margin_aav: float | None = None


def _warn_margin(margin: float) -> None:
    if margin >= MARGIN_STRONG:
        warnings.warn(
            f"weak-interaction margin {margin:.3g} >= {MARGIN_STRONG}; the "
            "perturbative prediction is unreliable here",
            ValidityWarning,
            stacklevel=3,
        )
    elif margin > MARGIN_WARN:
        warnings.warn(
            f"weak-interaction margin {margin:.3g} > {MARGIN_WARN}; "
            "higher-order corrections may be visible",
            ValidityWarning,
            stacklevel=3,
        )


def _maybe_aav_margin(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    g: float,
    pointer: PointerState,
) -> float | None:
    if pre.is_pure and post.is_rank_one:
        return aav_margin(obs, pre, post, g, pointer)
    return None


def predict_aav(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    g: float,
    pointer: PointerState,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
) -> ShiftPrediction:
    """First-order (linear-response) pointer shifts.

    delta_q = g Re A_w + g Im A_w <{q, p}>,  delta_p = 2 g Im A_w var p,
    with A_w the (generalized) weak value. Accurate only while the
    linear-response margin is small; `predict_general` extends this to
    second order.
    """
    ov = overlap(post, pre)
    if ov <= orth_threshold:
        raise OrthogonalPPS(
            f"selection overlap {ov:.3e} is below {orth_threshold:.1e}; "
            "use the orthogonal predictor"
        )
    aw = generalized_weak_value(obs, pre, post, 1, 0, orth_threshold=orth_threshold).value
    anti = moment(pointer, ANTICOMM_QP)
    varp = variance_p(pointer)
    margin = weak_interaction_margin(g, pointer)
    _warn_margin(margin)
    return ShiftPrediction(
        regime="aav",
        delta_q=g * aw.real + g * aw.imag * anti,
        delta_p=2.0 * g * aw.imag * varp,
        margin_weak=margin,
        margin_aav=_maybe_aav_margin(obs, pre, post, g, pointer),
    )


def predict_general(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    g: float,
    pointer: PointerState,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
) -> ShiftPrediction:
    """Second-order pointer shifts with the resummed denominator.

    Writing A_w = tr(P A rho)/tr(P rho), A2_w = tr(P A^2 rho)/tr(P rho),
    and D = tr(P A rho A)/tr(P rho) - Re A2_w, the shifts are

        C = [1 + 2 g <p> Im A_w + g^2 <p^2> D]^(-1)
        delta_q = C [g Re A_w + g Im A_w (<{q,p}> - 2<q><p>)
                     + g^2 (<p q p> - <p^2><q>) D + g^2 <p> Im A2_w]
        delta_p = C [2 g Im A_w var p + g^2 (<p^3> - <p^2><p>) D]

    Valid for mixed pre-selections and projector post-selections of any
    rank. Raises NonPositiveDenominator when the bracket in C is <= 0
    (the expansion has broken down).
    """
    ov = overlap(post, pre)
    if ov <= orth_threshold:
        raise OrthogonalPPS(
            f"selection overlap {ov:.3e} is below {orth_threshold:.1e}; "
            "use the orthogonal predictor"
        )
    aw = generalized_weak_value(obs, pre, post, 1, 0, orth_threshold=orth_threshold).value
    a2w = generalized_weak_value(obs, pre, post, 2, 0, orth_threshold=orth_threshold).value
    w11 = generalized_weak_value(obs, pre, post, 1, 1, orth_threshold=orth_threshold).value
    d_coef = w11.real - a2w.real

    q1 = moment(pointer, q_power(1))
    p1 = moment(pointer, p_power(1))
    p2 = moment(pointer, p_power(2))
    p3 = moment(pointer, p_power(3))
    pqp = moment(pointer, PQP)
    anti = moment(pointer, ANTICOMM_QP)
    varp = p2 - p1 * p1

    bracket = 1.0 + 2.0 * g * p1 * aw.imag + g * g * p2 * d_coef
    if bracket <= 0.0:
        raise NonPositiveDenominator(
            f"resummed denominator bracket {bracket:.3e} <= 0; the "
            "second-order expansion is invalid for this coupling"
        )
    c = 1.0 / bracket

    delta_q = c * (
        g * aw.real
        + g * aw.imag * (anti - 2.0 * q1 * p1)
        + g * g * (pqp - p2 * q1) * d_coef
        + g * g * p1 * a2w.imag
    )
    delta_p = c * (2.0 * g * aw.imag * varp + g * g * (p3 - p2 * p1) * d_coef)

    margin = weak_interaction_margin(g, pointer)
    _warn_margin(margin)
    return ShiftPrediction(
        regime="general",
        delta_q=delta_q,
        delta_p=delta_p,
        denominator_c=c,
        margin_weak=margin,
        margin_aav=_maybe_aav_margin(obs, pre, post, g, pointer),
    )


def _require_rank_one_pure(pre: SystemState, post: PostSelection) -> None:
    if not pre.is_pure or not post.is_rank_one:
        raise UnsupportedMixedOrthogonal(
            "orthogonal-selection predictions are implemented for a pure "
            "pre-selection and a rank-1 post-selection only"
        )


def _require_even_pointer(pointer: PointerState, tol: float = 1e-10) -> None:
    # The orthogonal formulas assume a pointer whose odd p-moments vanish
    # (even wavefunction). The first two odd moments are checked directly.
    for n in (1, 3):
        val = moment(pointer, p_power(n))
        if abs(val) > tol:
            raise PointerNotEven(
                f"<p^{n}> = {val:.3e} does not vanish (tolerance {tol:.1e}); "
                "the orthogonal predictor requires an even pointer state"
            )


def predict_orthogonal(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    g: float,
    pointer: PointerState,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
    g2_threshold: float = G2_THRESHOLD,
) -> ShiftPrediction:
    """Leading-order pointer statistics for orthogonal selections.

    With A_ow the orthogonal weak value and an even pointer state,

        delta_q = g Re A_ow + g Im A_ow <p{q,p}p>/<p^2>
        delta_p = 2 g Im A_ow <p^4>/<p^2>
        var'_q  = <p q^2 p>/<p^2>,   var'_p = <p^4>/<p^2>

    (variances to zeroth order in g). The post-selected pointer is no
    longer a small displacement of the input: even at g -> 0 its moments
    are those of the p-filtered state.
    """
    ov = overlap(post, pre)
    if ov > orth_threshold:
        raise NotOrthogonal(
            f"selection overlap {ov:.3e} exceeds {orth_threshold:.1e}; "
            "use the non-orthogonal predictors"
        )
    _require_rank_one_pure(pre, post)
    _require_even_pointer(pointer)
    ow = orthogonal_weak_value(
        obs, pre, post, orth_threshold=orth_threshold, g2_threshold=g2_threshold
    ).value

    p2 = moment(pointer, p_power(2))
    p4 = moment(pointer, p_power(4))
    pbrace = moment(pointer, P_BRACE_P)
    pq2p = moment(pointer, PQ2P)

    margin = weak_interaction_margin(g, pointer)
    _warn_margin(margin)
    return ShiftPrediction(
        regime="orthogonal",
        delta_q=g * ow.real + g * ow.imag * pbrace / p2,
        delta_p=2.0 * g * ow.imag * p4 / p2,
        var_q_out=pq2p / p2,
        var_p_out=p4 / p2,
        margin_weak=margin,
        margin_aav=None,
    )


def predict_orthogonal_gaussian(
    obs: Observable,
    pre: SystemState,
    post: PostSelection,
    g: float,
    delta_q: float,
    *,
    orth_threshold: float = ORTH_THRESHOLD,
    g2_threshold: float = G2_THRESHOLD,
) -> ShiftPrediction:
    """Orthogonal-selection statistics specialized to a Gaussian pointer.

    For a Gaussian of width delta_q (var = delta_q^2, var p = 1/(4 delta_q^2))
    the general orthogonal formulas reduce to

        delta_q = g Re A_ow            delta_p = 6 g Im A_ow var p
        var'_q  = 3 var q              var'_p  = 3 var p

    and the outgoing profile is double-peaked, with maxima at

        q = g Re A_ow +/- sqrt(2) delta_q
        p = g Im A_ow delta_p^2 +/- sqrt(2) delta_p.
    """
    pointer = gaussian(delta_q)
    ov = overlap(post, pre)
    if ov > orth_threshold:
        raise NotOrthogonal(
            f"selection overlap {ov:.3e} exceeds {orth_threshold:.1e}; "
            "use the non-orthogonal predictors"
        )
    _require_rank_one_pure(pre, post)
    ow = orthogonal_weak_value(
        obs, pre, post, orth_threshold=orth_threshold, g2_threshold=g2_threshold
    ).value

    varq = pointer.var_q
    varp = pointer.var_p
    delta_p = pointer.delta_p
    root2 = math.sqrt(2.0)
    q_center = g * ow.real
    p_center = g * ow.imag * varp

    margin = weak_interaction_margin(g, pointer)
    _warn_margin(margin)
    return ShiftPrediction(
        regime="orthogonal-gaussian",
        delta_q=g * ow.real,
        delta_p=6.0 * g * ow.imag * varp,
        var_q_out=3.0 * varq,
        var_p_out=3.0 * varp,
        peaks_q=(q_center - root2 * delta_q, q_center + root2 * delta_q),
        peaks_p=(p_center - root2 * delta_p, p_center + root2 * delta_p),
        margin_weak=margin,
        margin_aav=None,
    )


@dataclass(frozen=True)
class SGParams:
    """Stern-Gerlach amplification parameters.

    ``alpha`` in [0, pi] sets the pre-selection direction relative to the
    post-selection; ``lmbda`` in (0, 1) is the dimensionless coupling
    (beam displacement over pointer width). Couplings above 0.5 are
    accepted with a validity warning.
    """

    alpha: float
    lmbda: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= math.pi):
            raise ValueError(f"alpha must lie in [0, pi], got {self.alpha}")
        if not (0.0 < self.lmbda < 1.0):
            raise LambdaOutOfRange(
                f"lambda must lie in (0, 1), got {self.lmbda}"
            )
        if self.lmbda > 0.5:
            warnings.warn(
                f"lambda = {self.lmbda} > 0.5; the closed-form outcome curve "
                "degrades noticeably at this coupling",
                ValidityWarning,
                stacklevel=3,
            )


def stern_gerlach_outcome(params: SGParams) -> float:
    """Measured spin value sin(alpha) / ((1 - lambda^2/2) cos(alpha) + 1).

    This is the second-order resummed prediction for the spin component
    inferred from the pointer shift, delta_q / g, in the Stern-Gerlach
    arrangement; it exceeds the eigenvalue range near orthogonality.
    """
    den = (1.0 - 0.5 * params.lmbda**2) * math.cos(params.alpha) + 1.0
    if abs(den) <= 1e-12:
        raise DegenerateDenominator(
            f"outcome denominator {den:.3e} vanishes at alpha = {params.alpha}"
        )
    return math.sin(params.alpha) / den


def sg_optimum(lmbda: float) -> tuple[float, float]:
    """Analytic optimum of the Stern-Gerlach outcome curve over alpha.

    Returns (alpha_opt, outcome_max) with
    alpha_opt = arccos(lambda^2/2 - 1) and
    outcome_max = 1/sqrt(lambda^2 - lambda^4/4).
    """
    if not (0.0 < lmbda < 1.0):
        raise LambdaOutOfRange(f"lambda must lie in (0, 1), got {lmbda}")
    alpha_opt = math.acos(0.5 * lmbda**2 - 1.0)
    outcome_max = 1.0 / math.sqrt(lmbda**2 - 0.25 * lmbda**4)
    return alpha_opt, outcome_max
