"""State-vector primitives and small dense Hermitian linear algebra.

A "state vector" is any 1-D complex numpy array with unit norm; all
functions here are pure and never mutate their inputs.  Matrices are
small (M <= ~16), so everything goes through dense numpy routines.
"""

import numpy as np

from .config import TOL
from .errors import (DegenerateAtTolerance, DimensionMismatch, NotHermitian,
                     ZeroVector)


def as_cvector(v) -> np.ndarray:
    """Coerce to a finite 1-D complex array."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("vector has non-finite entries")
    return arr


def normalize(v) -> np.ndarray:
    """Return v / ||v||, preserving direction."""
    arr = as_cvector(v)
    nrm = np.linalg.norm(arr)
    if nrm <= TOL.zero_vector:
        raise ZeroVector(f"cannot normalize a vector of norm {nrm}")
    return arr / nrm


def is_state(v, tol: float = TOL.norm) -> bool:
    arr = np.asarray(v, dtype=complex)
    return arr.ndim == 1 and abs(np.linalg.norm(arr) - 1.0) <= tol


def overlap(a, b) -> complex:
    """Inner product <a|b> with the first argument conjugated."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"overlap of shapes {a.shape} and {b.shape}")
    return complex(np.vdot(a, b))


def projector(psi) -> np.ndarray:
    """Rank-one projector |psi><psi| for a normalized state."""
    arr = as_cvector(psi)
    if not is_state(arr):
        raise ZeroVector("projector requires a normalized state")
    return np.outer(arr, arr.conj())


def _check_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max()) if h.size else 1.0)
    if np.abs(h - h.conj().T).max() > TOL.hermitian * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return h


def eigh(h, require_gap_at: int | None = None):
    """Eigendecomposition of a Hermitian matrix.

    Returns (values, vectors) with values ascending and vectors[i] the
    normalized eigenvector belonging to values[i].  When a single band
    index is requested via require_gap_at, raises DegenerateAtTolerance
    if its gap to a neighboring eigenvalue is below the degeneracy
    tolerance (an ill-posed band selection).
    """
    h = _check_hermitian(h)
    vals, vecs = np.linalg.eigh(h)
    if require_gap_at is not None:
        i = require_gap_at
        if i < 0 or i >= len(vals):
            raise DimensionMismatch(f"band index {i} out of range")
        scale = float(np.abs(vals).max())
        gap = np.inf
        if i > 0:
            gap = min(gap, vals[i] - vals[i - 1])
        if i < len(vals) - 1:
            gap = min(gap, vals[i + 1] - vals[i])
        if gap < TOL.degeneracy * max(scale, TOL.zero_vector):
            raise DegenerateAtTolerance(
                f"band {i} gap {gap:.3e} below {TOL.degeneracy:.0e} * ||H||")
    return vals, vecs.T.copy()


def gauge_fix(psi) -> np.ndarray:
    """Rotate the global phase so the first non-negligible entry is real positive."""
    arr = as_cvector(psi)
    idx = np.flatnonzero(np.abs(arr) > TOL.gauge_zero)
    if idx.size == 0:
        raise ZeroVector("all entries below the gauge-fixing threshold")
    phase = arr[idx[0]] / abs(arr[idx[0]])
    return arr / phase


class ProjectivePoint:
    """Canonical representative of a ray in CP^(M-1).

    The stored representative has unit norm and its first non-negligible
    entry real positive, so gauge fixing is idempotent and representatives
    of the same ray compare equal.
    """

    __slots__ = ("rep",)

    def __init__(self, v):
        self.rep = gauge_fix(normalize(v))
        self.rep.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.rep.shape[0]

    def distance(self, other: "ProjectivePoint") -> float:
        """Geodesic Fubini-Study distance to another point."""
        ov = min(1.0, abs(overlap(self.rep, other.rep)))
        return float(np.arccos(ov))

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return abs(abs(overlap(self.rep, other.rep)) - 1.0) <= TOL.projective_eq

    def __repr__(self):
        return f"ProjectivePoint({np.array2string(self.rep, precision=6)})"
