"""Measuring-device (pointer) states and their moments.

Two representations are supported: an analytic zero-mean minimum-uncertainty
Gaussian, for which every required moment has a closed form, and a sampled
grid state (optionally a convex mixture of pure branches), for which
momentum-side quantities use the unitary discrete Fourier pair on the grid
with the convention dq * dp = 2*pi/n. Everything runs with hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyGrid,
    GridTooSmall,
    NonPositiveWidth,
    ParseError,
    UnsupportedOrder,
)

__all__ = [
    "DEFAULT_GRID_N",
    "MAX_GRID_MOMENT_ORDER",
    "QGrid",
    "GaussianPointer",
    "GridPointer",
    "PointerState",
    "MomentSpec",
    "p_power",
    "q_power",
    "ANTICOMM_QP",
    "PQP",
    "PQ2P",
    "P_BRACE_P",
    "P3",
    "Density",
    "gaussian",
    "grid_state",
    "moment",
    "variance_q",
    "variance_p",
    "densities",
    "gaussian_profile",
    "default_grid",
    "to_momentum",
    "apply_p",
    "translate",
    "pointer_to_wire",
    "pointer_from_wire",
]

DEFAULT_GRID_N = 4096
MAX_GRID_MOMENT_ORDER = 8


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class QGrid:
    """Uniform position grid q_i = q_min + i*dq, i = 0..n-1."""

    q_min: float
    dq: float
    n: int

    def coords(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n)

    def momenta(self) -> np.ndarray:
        """Conjugate momentum grid in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dq)

    @property
    def dp(self) -> float:
        return 2.0 * np.pi / (self.n * self.dq)

    @property
    def q_max(self) -> float:
        return self.q_min + self.dq * (self.n - 1)


def to_momentum(grid: QGrid, samples: np.ndarray) -> np.ndarray:
    """Momentum wavefunction samples (FFT ordering), unitary normalization.

    Parseval holds exactly: sum |out|^2 * dp == sum |samples|^2 * dq.
    """
    phase = np.exp(-1j * grid.momenta() * grid.q_min)
    return (grid.dq / math.sqrt(2.0 * math.pi)) * phase * np.fft.fft(samples)


def apply_p(grid: QGrid, samples: np.ndarray, power: int = 1) -> np.ndarray:
    """Apply the momentum operator (spectral differentiation) `power` times."""
    return np.fft.ifft(grid.momenta() ** power * np.fft.fft(samples))


def translate(grid: QGrid, samples: np.ndarray, shift: float) -> np.ndarray:
    """Samples of psi(q - shift) via the spectral translation phase.

    Exact for band-limited periodic data; callers must leave room so the
    translated tails do not wrap around.
    """
    return np.fft.ifft(np.exp(-1j * grid.momenta() * shift) * np.fft.fft(samples))


@dataclass(frozen=True)
class GaussianPointer:
    """Zero-mean minimum-uncertainty real Gaussian of width delta_q."""

    delta_q: float

    @property
    def var_q(self) -> float:
        return self.delta_q**2

    @property
    def delta_p(self) -> float:
        return 1.0 / (2.0 * self.delta_q)

    @property
    def var_p(self) -> float:
        return self.delta_p**2


@dataclass(frozen=True)
class GridPointer:
    """Sampled pointer state: convex mixture of pure branches on one grid."""

    grid: QGrid
    branches: tuple[tuple[float, np.ndarray], ...]

    @property
    def q_min(self) -> float:
        return self.grid.q_min

    @property
    def dq(self) -> float:
        return self.grid.dq

    @property
    def n(self) -> int:
        return self.grid.n


PointerState = GaussianPointer | GridPointer


def gaussian(delta_q: float) -> GaussianPointer:
    if not (delta_q > 0.0) or not math.isfinite(delta_q):
        raise NonPositiveWidth(f"delta_q must be a positive real, got {delta_q!r}")
    return GaussianPointer(delta_q=float(delta_q))


def gaussian_profile(q, delta_q: float, shift: float = 0.0) -> np.ndarray:
    """Normalized Gaussian wavefunction samples centered at `shift`."""
    q = np.asarray(q, dtype=float)
    norm = (2.0 * math.pi * delta_q**2) ** (-0.25)
    return norm * np.exp(-((q - shift) ** 2) / (4.0 * delta_q**2))


def default_grid(delta_q: float, g: float = 0.0, n: int | None = None) -> QGrid:
    """Symmetric grid covering +-10 max(delta_q, |g|) around zero."""
    n = int(n or DEFAULT_GRID_N)
    half = 10.0 * max(delta_q, abs(g))
    return QGrid(q_min=-half, dq=2.0 * half / n, n=n)


def grid_state(q_min: float, dq: float, n: int, branches) -> GridPointer:
    """Build a grid pointer from `(weight, samples)` branches.

    Validates: n is a power of two; weights are positive and sum to one
    within 1e-12; each branch is normalized within 1e-10; the grid extends
    at least eight standard deviations beyond each branch mean.
    """
    if n <= 0:
        raise EmptyGrid("grid has no points")
    if n & (n - 1):
        raise ValueError(f"grid size must be a power of two, got {n}")
    if not (dq > 0.0):
        raise ValueError(f"grid spacing must be positive, got {dq!r}")
    grid = QGrid(q_min=float(q_min), dq=float(dq), n=int(n))
    seq = list(branches)
    if not seq:
        raise EmptyGrid("pointer needs at least one branch")
    total = 0.0
    out = []
    q = grid.coords()
    for idx, (w, samples) in enumerate(seq):
        w = float(w)
        if w <= 0.0:
            raise ValueError(f"branch {idx} weight must be positive, got {w!r}")
        total += w
        phi = np.asarray(samples, dtype=complex).reshape(-1)
        if phi.size != n:
            raise ValueError(f"branch {idx} has {phi.size} samples, expected {n}")
        norm = float(np.sum(np.abs(phi) ** 2) * dq)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"branch {idx} norm is {norm!r}, expected 1 within 1e-10")
        prob = np.abs(phi) ** 2 * dq
        mean = float(np.sum(q * prob))
        sigma = math.sqrt(max(float(np.sum((q - mean) ** 2 * prob)), 0.0))
        if mean - 8.0 * sigma < grid.q_min or mean + 8.0 * sigma > grid.q_max:
            raise GridTooSmall(
                f"branch {idx}: grid [{grid.q_min:g}, {grid.q_max:g}] does not cover "
                f"eight standard deviations around the branch mean {mean:g}"
            )
        out.append((w, _frozen(phi)))
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"branch weights sum to {total!r}, expected 1 within 1e-12")
    return GridPointer(grid=grid, branches=tuple(out))


# --- moments ---------------------------------------------------------------

@dataclass(frozen=True)
class MomentSpec:
    """Tag for one of the pointer-moment expressions used by the predictors.

    Kinds: ``p_power``/``q_power`` (<p^n>, <q^n> with ``order`` = n),
    ``anticomm_qp`` (<{q,p}>), ``pqp`` (<p q p>), ``pq2p`` (<p q^2 p>) and
    ``p_brace_p`` (<p {q,p} p>).
    """

    kind: str
    order: int = 0


def p_power(n: int) -> MomentSpec:
    if n < 0:
        raise ValueError("moment order must be nonnegative")
    return MomentSpec("p_power", n)


def q_power(n: int) -> MomentSpec:
    if n < 0:
        raise ValueError("moment order must be nonnegative")
    return MomentSpec("q_power", n)


ANTICOMM_QP = MomentSpec("anticomm_qp")
PQP = MomentSpec("pqp")
PQ2P = MomentSpec("pq2p")
P_BRACE_P = MomentSpec("p_brace_p")
P3 = MomentSpec("p_power", 3)

_KINDS = {"p_power", "q_power", "anticomm_qp", "pqp", "pq2p", "p_brace_p"}


def _double_factorial_odd(m: int) -> float:
    # (m)!! for odd m, i.e. 1*3*5*...*m; m = -1 gives 1
    out = 1.0
    for k in range(1, m + 1, 2):
        out *= k
    return out


def _gaussian_moment(state: GaussianPointer, spec: MomentSpec) -> float:
    if spec.kind == "p_power":
        if spec.order % 2:
            return 0.0
        return _double_factorial_odd(spec.order - 1) * state.var_p ** (spec.order // 2)
    if spec.kind == "q_power":
        if spec.order % 2:
            return 0.0
        return _double_factorial_odd(spec.order - 1) * state.var_q ** (spec.order // 2)
    if spec.kind == "pq2p":
        return 3.0 * state.var_q * state.var_p
    # <{q,p}>, <pqp>, <p{q,p}p> all vanish for a real even wavefunction
    return 0.0


def _branch_moment(grid: QGrid, phi: np.ndarray, spec: MomentSpec) -> float:
    q = grid.coords()
    if spec.kind == "q_power":
        return float(np.sum(q**spec.order * np.abs(phi) ** 2) * grid.dq)
    if spec.kind == "p_power":
        tilde = to_momentum(grid, phi)
        return float(np.sum(grid.momenta() ** spec.order * np.abs(tilde) ** 2) * grid.dp)
    psi = apply_p(grid, phi)
    if spec.kind == "anticomm_qp":
        return float(2.0 * np.real(np.sum(np.conj(phi) * q * psi) * grid.dq))
    if spec.kind == "pqp":
        return float(np.real(np.sum(np.conj(psi) * q * psi) * grid.dq))
    if spec.kind == "pq2p":
        return float(np.real(np.sum(np.conj(psi) * q**2 * psi) * grid.dq))
    # p_brace_p
    chi = apply_p(grid, psi)
    return float(2.0 * np.real(np.sum(np.conj(psi) * q * chi) * grid.dq))


def moment(state: PointerState, spec: MomentSpec) -> float:
    """Evaluate a pointer moment: closed form for the Gaussian, spectral
    quadrature for grid states (orders above MAX_GRID_MOMENT_ORDER refused)."""
    if spec.kind not in _KINDS:
        raise ValueError(f"unknown moment kind {spec.kind!r}")
    if isinstance(state, GaussianPointer):
        return _gaussian_moment(state, spec)
    if spec.kind in ("p_power", "q_power") and spec.order > MAX_GRID_MOMENT_ORDER:
        raise UnsupportedOrder(
            f"grid moments support order <= {MAX_GRID_MOMENT_ORDER}, got {spec.order}"
        )
    return sum(
        w * _branch_moment(state.grid, phi, spec) for w, phi in state.branches
    )


def variance_q(state: PointerState) -> float:
    m1 = moment(state, q_power(1))
    return moment(state, q_power(2)) - m1**2


def variance_p(state: PointerState) -> float:
    m1 = moment(state, p_power(1))
    return moment(state, p_power(2)) - m1**2


# --- densities --------------------------------------------------------------

@dataclass(frozen=True)
class Density:
    """Real density sampled on a uniform coordinate grid."""

    coords: np.ndarray
    values: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.coords[1] - self.coords[0])

    def total(self) -> float:
        return float(np.sum(self.values) * self.spacing)


def densities(state: PointerState, grid_n: int | None = None) -> tuple[Density, Density]:
    """Position- and momentum-space probability densities of the pointer."""
    if isinstance(state, GaussianPointer):
        n = int(grid_n or DEFAULT_GRID_N)
        qg = default_grid(state.delta_q, n=n)
        q = qg.coords()
        qd = gaussian_profile(q, state.delta_q) ** 2
        half_p = 10.0 * state.delta_p
        p = -half_p + (2.0 * half_p / n) * np.arange(n)
        pd = gaussian_profile(p, state.delta_p) ** 2
        return (
            Density(coords=_frozen(q), values=_frozen(qd)),
            Density(coords=_frozen(p), values=_frozen(pd)),
        )
    grid = state.grid
    qd = np.zeros(grid.n)
    pd = np.zeros(grid.n)
    for w, phi in state.branches:
        qd += w * np.abs(phi) ** 2
        pd += w * np.abs(to_momentum(grid, phi)) ** 2
    order = np.fft.fftshift(np.arange(grid.n))
    p_sorted = grid.momenta()[order]
    return (
        Density(coords=_frozen(grid.coords()), values=_frozen(qd)),
        Density(coords=_frozen(p_sorted), values=_frozen(pd[order])),
    )


# --- wire format -------------------------------------------------------------

def pointer_to_wire(state: PointerState) -> dict:
    if isinstance(state, GaussianPointer):
        return {"type": "gaussian", "delta_q": state.delta_q}
    return {
        "type": "grid",
        "q_min": state.q_min,
        "dq": state.dq,
        "n": state.n,
        "branches": [
            {
                "weight": w,
                "samples": [[float(z.real), float(z.imag)] for z in phi],
            }
            for w, phi in state.branches
        ],
    }


def pointer_from_wire(data, path: str = "pointer") -> PointerState:
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected an object")
    kind = data.get("type")
    if kind == "gaussian":
        if "delta_q" not in data:
            raise ParseError(f"{path}.delta_q: missing")
        try:
            return gaussian(float(data["delta_q"]))
        except (TypeError, ValueError, NonPositiveWidth) as exc:
            raise ParseError(f"{path}.delta_q: {exc}") from exc
    if kind == "grid":
        for key in ("q_min", "dq", "n", "branches"):
            if key not in data:
                raise ParseError(f"{path}.{key}: missing")
        raw_branches = data["branches"]
        if not isinstance(raw_branches, list) or not raw_branches:
            raise ParseError(f"{path}.branches: expected a nonempty array")
        branches = []
        for i, entry in enumerate(raw_branches):
            if not isinstance(entry, dict) or "weight" not in entry or "samples" not in entry:
                raise ParseError(
                    f"{path}.branches[{i}]: expected an object with weight and samples"
                )
            samples = entry["samples"]
            if not isinstance(samples, list):
                raise ParseError(f"{path}.branches[{i}].samples: expected an array")
            phi = np.array(
                [
                    complex(c[0], c[1])
                    if isinstance(c, (list, tuple)) and len(c) == 2
                    else _bad_sample(path, i, j)
                    for j, c in enumerate(samples)
                ],
                dtype=complex,
            )
            branches.append((float(entry["weight"]), phi))
        try:
            return grid_state(float(data["q_min"]), float(data["dq"]), int(data["n"]), branches)
        except (TypeError, ValueError, EmptyGrid, GridTooSmall) as exc:
            raise ParseError(f"{path}: {exc}") from exc
    raise ParseError(f"{path}.type: expected 'gaussian' or 'grid', got {kind!r}")


def _bad_sample(path: str, i: int, j: int):
    raise ParseError(f"{path}.branches[{i}].samples[{j}]: expected a [real, imag] pair")
