"""Scenario container, JSON wire format, and targeted scenario construction.

A scenario bundles everything one run of the experiment needs: the
normalized observable, the pre-selected system state, the post-selection
projector, the effective coupling, and the initial pointer state. On disk a
scenario is a JSON object::

    {
      "observable":     [[[re, im], ...], ...],   # square complex matrix
      "pre_state":      vector or density matrix,
      "post_projector": projector matrix or post-selection vector,
      "g": 0.1,
      "pointer": {"type": "gaussian", "delta_q": 1.0} |
                 {"type": "grid", "q_min": ..., "dq": ..., "n": ...,
                  "branches": [{"weight": w, "samples": [[re, im], ...]}, ...]},
      "options": {"grid_n": ..., "series_order": ..., "orth_threshold": ...}
    }

Observables are normalized at parse time and the coupling rescaled by the
spectral norm, so files may state the observable in any overall scale.
Serializing an in-memory scenario writes the normalized form, which makes a
serialize/parse cycle reproduce every complex entry bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionFailure, DimensionMismatch, ParseError, WeakMeasurementError
from .pointer import PointerState, gaussian, pointer_from_wire, pointer_to_wire
from .qops import (
    Observable,
    PostSelection,
    SystemState,
    density_state,
    matrix_from_wire,
    matrix_to_wire,
    new_observable,
    projector,
    projector_onto,
    pure_state,
    vector_from_wire,
)
from .weak_values import orthogonal_weak_value, weak_value

__all__ = [
    "Scenario",
    "ScenarioOptions",
    "make_scenario",
    "parse_scenario",
    "load_scenario",
    "scenario_to_wire",
    "scenario_with_weak_value",
    "scenario_with_orthogonal_weak_value",
]

MAX_SERIES_ORDER = 16
MIN_GRID_N = 64
MAX_GRID_N = 1 << 22


@dataclass(frozen=True)
class ScenarioOptions:
    """Optional numerical controls carried alongside a scenario file."""

    grid_n: int | None = None
    series_order: int | None = None
    orth_threshold: float | None = None

    def any_set(self) -> bool:
        return any(v is not None for v in (self.grid_n, self.series_order, self.orth_threshold))


@dataclass(frozen=True)
class Scenario:
    """One pre/post-selected weak-measurement arrangement.

    ``g`` is the effective coupling to the unit-spectral-norm observable.
    """

    observable: Observable
    pre: SystemState
    post: PostSelection
    g: float
    pointer: PointerState

    def __post_init__(self) -> None:
        if not (self.observable.dim == self.pre.dim == self.post.dim):
            raise DimensionMismatch(
                f"dimensions differ: observable {self.observable.dim}, "
                f"state {self.pre.dim}, projector {self.post.dim}"
            )


def make_scenario(observable, pre, post, g: float, pointer: PointerState) -> Scenario:
    """Assemble a scenario from raw ingredients.

    ``observable`` may be a raw matrix (normalized here, with ``g`` rescaled
    by its spectral norm) or an already-normalized `Observable` (``g`` is
    then taken as-is). ``pre`` accepts a `SystemState`, a state vector, or a
    density matrix; ``post`` accepts a `PostSelection`, a post-selection
    vector, or a projector matrix.
    """
    if isinstance(observable, Observable):
        obs = observable
        g_eff = float(g)
    else:
        obs = new_observable(observable)
        g_eff = float(g) * obs.scale
    if not isinstance(pre, SystemState):
        arr = np.asarray(pre, dtype=complex)
        pre = pure_state(arr) if arr.ndim == 1 else density_state(arr)
    if not isinstance(post, PostSelection):
        arr = np.asarray(post, dtype=complex)
        post = projector_onto(arr) if arr.ndim == 1 else projector(arr)
    return Scenario(observable=obs, pre=pre, post=post, g=g_eff, pointer=pointer)


# --- wire format -----------------------------------------------------------

_TOP_KEYS = {"observable", "pre_state", "post_projector", "g", "pointer", "options"}
_OPTION_KEYS = {"grid_n", "series_order", "orth_threshold"}


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{path}: expected a number, got {value!r}")
    return float(value)


def validate_grid_n(n, path: str = "grid_n") -> int:
    """Check a grid-size option: an integer power of two in a sane range."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParseError(f"{path}: expected an integer, got {n!r}")
    if n < MIN_GRID_N or n > MAX_GRID_N or (n & (n - 1)) != 0:
        raise ParseError(
            f"{path}: expected a power of two in [{MIN_GRID_N}, {MAX_GRID_N}], got {n}"
        )
    return n


def validate_series_order(order, path: str = "series_order") -> int:
    if isinstance(order, bool) or not isinstance(order, int):
        raise ParseError(f"{path}: expected an integer, got {order!r}")
    if not (0 <= order <= MAX_SERIES_ORDER):
        raise ParseError(f"{path}: expected an order in [0, {MAX_SERIES_ORDER}], got {order}")
    return order


def _parse_options(data, path: str) -> ScenarioOptions:
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected an object")
    unknown = set(data) - _OPTION_KEYS
    if unknown:
        raise ParseError(f"{path}: unknown key {sorted(unknown)[0]!r}")
    grid_n = data.get("grid_n")
    if grid_n is not None:
        grid_n = validate_grid_n(grid_n, f"{path}.grid_n")
    series_order = data.get("series_order")
    if series_order is not None:
        series_order = validate_series_order(series_order, f"{path}.series_order")
    orth = data.get("orth_threshold")
    if orth is not None:
        orth = _require_number(orth, f"{path}.orth_threshold")
        if not (0.0 < orth < 1.0):
            raise ParseError(f"{path}.orth_threshold: expected a value in (0, 1), got {orth}")
    return ScenarioOptions(grid_n=grid_n, series_order=series_order, orth_threshold=orth)


def _looks_like_matrix(data) -> bool:
    return (
        isinstance(data, (list, tuple))
        and bool(data)
        and isinstance(data[0], (list, tuple))
        and bool(data[0])
        and isinstance(data[0][0], (list, tuple))
    )


def parse_scenario(obj, path: str = "scenario") -> tuple[Scenario, ScenarioOptions]:
    """Parse a scenario wire object; errors name the offending key."""
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ParseError(f"{path}: unknown key {sorted(unknown)[0]!r}")
    for key in ("observable", "pre_state", "post_projector", "g", "pointer"):
        if key not in obj:
            raise ParseError(f"{path}.{key}: missing required key")

    obs_mat = matrix_from_wire(obj["observable"], f"{path}.observable")
    try:
        obs = new_observable(obs_mat)
    except (WeakMeasurementError, ValueError) as exc:
        raise ParseError(f"{path}.observable: {exc}") from exc

    pre_data = obj["pre_state"]
    try:
        if _looks_like_matrix(pre_data):
            pre = density_state(matrix_from_wire(pre_data, f"{path}.pre_state"))
        else:
            pre = pure_state(vector_from_wire(pre_data, f"{path}.pre_state"))
    except ParseError:
        raise
    except (WeakMeasurementError, ValueError) as exc:
        raise ParseError(f"{path}.pre_state: {exc}") from exc

    post_data = obj["post_projector"]
    try:
        if _looks_like_matrix(post_data):
            post = projector(matrix_from_wire(post_data, f"{path}.post_projector"))
        else:
            post = projector_onto(vector_from_wire(post_data, f"{path}.post_projector"))
    except ParseError:
        raise
    except (WeakMeasurementError, ValueError) as exc:
        raise ParseError(f"{path}.post_projector: {exc}") from exc

    g_raw = _require_number(obj["g"], f"{path}.g")
    pointer = pointer_from_wire(obj["pointer"], f"{path}.pointer")
    options = (
        _parse_options(obj["options"], f"{path}.options")
        if "options" in obj
        else ScenarioOptions()
    )
    try:
        sc = Scenario(
            observable=obs, pre=pre, post=post, g=g_raw * obs.scale, pointer=pointer
        )
    except WeakMeasurementError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return sc, options


def load_scenario(path: str) -> tuple[Scenario, ScenarioOptions]:
    """Load a scenario JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return parse_scenario(obj, path=path)


def scenario_to_wire(sc: Scenario, options: ScenarioOptions | None = None) -> dict:
    """Serialize a scenario (normalized form) to a wire object."""
    out = {
        "observable": matrix_to_wire(sc.observable.matrix),
        "pre_state": matrix_to_wire(sc.pre.matrix),
        "post_projector": matrix_to_wire(sc.post.matrix),
        "g": float(sc.g),
        "pointer": pointer_to_wire(sc.pointer),
    }
    if options is not None and options.any_set():
        opts = {}
        if options.grid_n is not None:
            opts["grid_n"] = int(options.grid_n)
        if options.series_order is not None:
            opts["series_order"] = int(options.series_order)
        if options.orth_threshold is not None:
            opts["orth_threshold"] = float(options.orth_threshold)
        out["options"] = opts
    return out


# --- targeted construction -------------------------------------------------
#
# A fixed qutrit frame in which selections realizing a requested weak value
# are solved for directly. The spectrum is nondegenerate with unit spectral
# norm, and the pre-selection vector is a fixed generic direction, so the
# linear constraints below have full rank for every target value that is
# actually attainable.

_TARGET_SPECTRUM = (1.0, 0.15, -0.75)
_TARGET_PRE = (0.55, 0.60 + 0.25j, -0.52 + 0.10j)
_TARGET_TOL = 1e-10


def _target_frame() -> tuple[Observable, np.ndarray]:
    obs = new_observable(np.diag(np.array(_TARGET_SPECTRUM, dtype=complex)))
    psi = np.array(_TARGET_PRE, dtype=complex)
    return obs, psi / np.linalg.norm(psi)


def scenario_with_weak_value(
    target: complex, g: float, delta_q: float = 1.0
) -> Scenario:
    """Scenario whose standard weak value equals ``target``.

    The post-selection vector is chosen in the kernel of <.|(A - w)|psi_i>,
    picking the kernel direction closest to the pre-selection so the
    post-selection probability stays generic.
    """
    target = complex(target)
    obs, psi = _target_frame()
    constraint = (obs.matrix - target * np.eye(obs.dim)) @ psi
    rows = np.array([constraint.conj()])
    _, _, vh = np.linalg.svd(rows)
    kernel = vh[1:].conj().T  # columns orthogonal to the constraint row
    phi = kernel @ (kernel.conj().T @ psi)
    norm = float(np.linalg.norm(phi))
    if norm < 1e-8:
        raise ConstructionFailure(
            f"no post-selection with usable overlap realizes weak value {target}"
        )
    phi = phi / norm
    sc = Scenario(
        observable=obs,
        pre=pure_state(psi),
        post=projector_onto(phi),
        g=float(g),
        pointer=gaussian(delta_q),
    )
    achieved = weak_value(sc.observable, sc.pre, sc.post).value
    if abs(achieved - target) > _TARGET_TOL * max(1.0, abs(target)):
        raise ConstructionFailure(
            f"constructed weak value {achieved} misses target {target}"
        )
    return sc


def scenario_with_orthogonal_weak_value(
    target: complex, g: float, delta_q: float = 1.0
) -> Scenario:
    """Scenario with orthogonal selections whose orthogonal weak value
    equals ``target``.

    The post-selection vector is solved from two linear constraints:
    orthogonality <phi|psi_i> = 0 and <phi|(A^2 - 2 w A)|psi_i> = 0, which
    pin A_ow = <phi|A^2|psi_i> / (2 <phi|A|psi_i>) to w.
    """
    target = complex(target)
    obs, psi = _target_frame()
    a2 = obs.power(2)
    rows = np.array(
        [
            psi.conj(),
            ((a2 - 2.0 * target * obs.matrix) @ psi).conj(),
        ]
    )
    _, _, vh = np.linalg.svd(rows)
    phi = vh[-1].conj()
    lead = complex(np.vdot(phi, obs.matrix @ psi))
    if abs(lead) < 1e-8:
        raise ConstructionFailure(
            f"leading response <phi|A|psi> vanishes for target {target}; no "
            "first-order orthogonal scenario exists in this frame"
        )
    sc = Scenario(
        observable=obs,
        pre=pure_state(psi),
        post=projector_onto(phi),
        g=float(g),
        pointer=gaussian(delta_q),
    )
    achieved = orthogonal_weak_value(sc.observable, sc.pre, sc.post).value
    if abs(achieved - target) > _TARGET_TOL * max(1.0, abs(target)):
        raise ConstructionFailure(
            f"constructed orthogonal weak value {achieved} misses target {target}"
        )
    return sc
