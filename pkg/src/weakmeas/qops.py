"""Finite-dimensional operator algebra for weak-measurement scenarios.

Observables are rescaled to unit spectral norm at construction time so the
coupling constant carries the physical magnitude; system states and
post-selection projectors are validated against the usual Hermiticity,
positivity and idempotency requirements. All wrapper types are immutable:
their arrays are defensive copies with the writeable flag cleared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonHermitian, ParseError, ZeroOperator

__all__ = [
    "HERMITICITY_TOL",
    "IDEMPOTENCY_TOL",
    "STATE_TOL",
    "Observable",
    "SystemState",
    "PostSelection",
    "new_observable",
    "pure_state",
    "density_state",
    "projector",
    "projector_onto",
    "overlap",
    "commutes",
    "matrix_to_wire",
    "matrix_from_wire",
    "vector_from_wire",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
]

HERMITICITY_TOL = 1e-10
IDEMPOTENCY_TOL = 1e-10
STATE_TOL = 1e-12
_MIXTURE_FLOOR = 1e-14


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


def _as_square(raw, what: str) -> np.ndarray:
    m = np.asarray(raw, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"{what} must be a nonempty square matrix, got shape {m.shape}")
    return m

def _check_hermitian(m: np.ndarray, tol: float, what: str) -> None:
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > tol:
        raise NonHermitian(f"{what} deviates from Hermiticity by {dev:.3e} (tol {tol:.1e})")


@dataclass(frozen=True)
class Observable:
    """Hermitian observable normalized to unit spectral norm.

    ``matrix`` equals the symmetrized input divided by ``scale`` (the input's
    spectral norm); ``eigenvalues`` are sorted descending with
    max(|eigenvalues|) == 1, and ``eigenvectors[:, i]`` belongs to
    ``eigenvalues[i]``.
    """

    dim: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    scale: float

    def power(self, k: int) -> np.ndarray:
        """Matrix power through the spectral decomposition."""
        if k < 0:
            raise ValueError("power expects a nonnegative integer")
        v = self.eigenvectors
        return (v * self.eigenvalues**k) @ v.conj().T


@dataclass(frozen=True)
class SystemState:
    """Density matrix with its spectral mixture.

    ``eigenmixture`` lists ``(weight, vector)`` pairs for eigenvalues above
    the numerical floor, weights descending.
    """

    dim: int
    matrix: np.ndarray
    eigenmixture: tuple[tuple[float, np.ndarray], ...]

    @property
    def is_pure(self) -> bool:
        return len(self.eigenmixture) == 1

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("state is mixed; no defining vector")
        return self.eigenmixture[0][1]


@dataclass(frozen=True)
class PostSelection:
    """Orthogonal projector onto the accepted subspace.

    ``basis`` holds an orthonormal basis of the range as columns.
    """

    dim: int
    matrix: np.ndarray
    rank: int
    basis: np.ndarray

    @property
    def is_rank_one(self) -> bool:
        return self.rank == 1

    @property
    def vector(self) -> np.ndarray:
        if self.rank != 1:
            raise ValueError("projector rank exceeds one; no defining vector")
        return self.basis[:, 0]


def new_observable(raw) -> Observable:
    """Validate, symmetrize and normalize an observable.

    The input must be square and Hermitian within ``HERMITICITY_TOL``; it is
    symmetrized and divided by its spectral norm, which is returned as
    ``scale`` so couplings can be rescaled consistently.
    """
    m = _as_square(raw, "observable")
    _check_hermitian(m, HERMITICITY_TOL, "observable")
    m = (m + m.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(m)
    scale = float(np.max(np.abs(evals)))
    if scale == 0.0:
        raise ZeroOperator("observable is identically zero")
    if abs(scale - 1.0) <= 1e-12:
        # Spectral norms within roundoff of one are treated as exactly one,
        # so normalizing an already-normalized matrix is a bitwise no-op.
        scale = 1.0
    order = np.argsort(evals)[::-1]
    return Observable(
        dim=m.shape[0],
        matrix=_frozen(m / scale),
        eigenvalues=_frozen(evals[order] / scale),
        eigenvectors=_frozen(evecs[:, order]),
        scale=scale,
    )


def pure_state(vec) -> SystemState:
    """System state |v><v| from a (not necessarily normalized) vector."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroOperator("state vector is zero")
    v = v / norm
    outer = np.outer(v, v.conj())
    # Store the symmetrized form: it is bitwise Hermitian, so the wire
    # format round-trips exactly (the raw outer product need not be).
    return SystemState(
        dim=v.size,
        matrix=_frozen((outer + outer.conj().T) / 2.0),
        eigenmixture=((1.0, _frozen(v)),),
    )


def density_state(raw) -> SystemState:
    """System state from a density matrix.

    Requires Hermiticity and unit trace to ``STATE_TOL`` and eigenvalues
    >= -STATE_TOL; tiny negative weights are clipped to zero.
    """
    m = _as_square(raw, "density matrix")
    _check_hermitian(m, STATE_TOL, "density matrix")
    m = (m + m.conj().T) / 2.0
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1.0) > STATE_TOL:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1 within {STATE_TOL:.1e}")
    evals, evecs = np.linalg.eigh(m)
    if float(evals.min()) < -STATE_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    order = np.argsort(evals)[::-1]
    mixture = tuple(
        (float(evals[i]), _frozen(evecs[:, i]))
        for i in order
        if evals[i] > _MIXTURE_FLOOR
    )
    return SystemState(dim=m.shape[0], matrix=_frozen(m), eigenmixture=mixture)


def projector(raw) -> PostSelection:
    """Post-selection from a projector matrix (idempotent, Hermitian)."""
    m = _as_square(raw, "projector")
    _check_hermitian(m, HERMITICITY_TOL, "projector")
    m = (m + m.conj().T) / 2.0
    dev = float(np.max(np.abs(m @ m - m)))
    if dev > IDEMPOTENCY_TOL:
        raise ValueError(f"projector is not idempotent (|P^2-P| = {dev:.3e})")
    tr = float(np.real(np.trace(m)))
    rank = int(round(tr))
    if rank < 1:
        raise ZeroOperator("projector has rank zero")
    evals, evecs = np.linalg.eigh(m)
    keep = evals > 0.5
    return PostSelection(
        dim=m.shape[0],
        matrix=_frozen(m),
        rank=rank,
        basis=_frozen(evecs[:, keep]),
    )


def projector_onto(*vectors) -> PostSelection:
    """Projector onto the span of the given vectors (orthonormalized)."""
    if not vectors:
        raise ZeroOperator("projector needs at least one vector")
    cols = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
    q, r = np.linalg.qr(cols)
    keep = np.abs(np.diag(r)) > 1e-12
    if not keep.any():
        raise ZeroOperator("projector vectors span nothing")
    basis = q[:, keep]
    mat = basis @ basis.conj().T
    return PostSelection(
        dim=basis.shape[0],
        matrix=_frozen((mat + mat.conj().T) / 2.0),
        rank=int(basis.shape[1]),
        basis=_frozen(basis),
    )


def overlap(post: PostSelection, pre: SystemState) -> float:
    """Post-selection success probability at zero coupling, tr(P rho),
    clipped into [0, 1]."""
    if post.dim != pre.dim:
        raise DimensionMismatch(
            f"projector dimension {post.dim} != state dimension {pre.dim}"
        )
    val = float(np.real(np.trace(post.matrix @ pre.matrix)))
    return min(max(val, 0.0), 1.0)


def commutes(obs: Observable, x, tol: float) -> bool:
    """True when max |[A, X]| entry stays within tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    xm = _as_square(x, "operator")
    if xm.shape[0] != obs.dim:
        raise DimensionMismatch(
            f"operator dimension {xm.shape[0]} != observable dimension {obs.dim}"
        )
    comm = obs.matrix @ xm - xm @ obs.matrix
    return bool(np.max(np.abs(comm)) <= tol)


# --- wire format -----------------------------------------------------------
#
# Complex matrices cross process boundaries as row-major nested arrays whose
# entries are [real, imag] pairs of IEEE-754 doubles in decimal text. The
# format round-trips bit-exactly through Python's json module.

def matrix_to_wire(m) -> list:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def _entry_from_wire(cell, path: str) -> complex:
    if (
        not isinstance(cell, (list, tuple))
        or len(cell) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in cell)
    ):
        raise ParseError(f"{path}: expected a [real, imag] number pair, got {cell!r}")
    return complex(float(cell[0]), float(cell[1]))


def vector_from_wire(data, path: str = "vector") -> np.ndarray:
    if not isinstance(data, (list, tuple)) or not data:
        raise ParseError(f"{path}: expected a nonempty array of [real, imag] pairs")
    return np.array(
        [_entry_from_wire(cell, f"{path}[{i}]") for i, cell in enumerate(data)],
        dtype=complex,
    )


def matrix_from_wire(data, path: str = "matrix") -> np.ndarray:
    if not isinstance(data, (list, tuple)) or not data:
        raise ParseError(f"{path}: expected a nonempty array of rows")
    n = len(data)
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, (list, tuple)) or len(row) != n:
            raise ParseError(f"{path}[{i}]: expected a row of {n} entries")
        rows.append([_entry_from_wire(cell, f"{path}[{i}][{j}]") for j, cell in enumerate(row)])
    return np.array(rows, dtype=complex)


SIGMA_X = _frozen(np.array([[0, 1], [1, 0]], dtype=complex))
SIGMA_Y = _frozen(np.array([[0, -1j], [1j, 0]], dtype=complex))
SIGMA_Z = _frozen(np.array([[1, 0], [0, -1]], dtype=complex))
