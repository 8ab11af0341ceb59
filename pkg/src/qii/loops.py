"""Generators, refinement, perturbation, and splitting of discretized loops.

All generators return `geometry.Loop` values; randomness is always driven
by an explicit seed or Generator so property suites are reproducible.
"""

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import TOL
from .errors import (BadResolution, DegenerateSpec, IllConditionedSegment,
                     OutOfRange)
from .geometry import Loop, _cyclic_overlaps

__all__ = [
    "FourierLoopSpec", "bloch_circle", "bloch_states", "great_circle",
    "spherical_polygon", "fourier_loop", "random_fourier_spec",
    "perturb_circle", "refine", "split_self_intersections",
    "save_loop", "load_loop",
]


def bloch_states(theta, phi) -> np.ndarray:
    """Spinors (cos(theta/2), e^{i phi} sin(theta/2)) for angle arrays."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    return np.stack([np.cos(theta / 2.0) * np.ones_like(phi),
                     np.exp(1j * phi) * np.sin(theta / 2.0)], axis=1)


def bloch_circle(theta: float, n: int) -> Loop:
    """Constant-polar-angle circle on the Bloch sphere, n samples."""
    if n < 3:
        raise BadResolution(f"need n >= 3 samples, got {n}")
    if not 0.0 < theta < np.pi:
        raise OutOfRange(f"polar angle {theta} outside (0, pi)")
    phi = 2.0 * np.pi * np.arange(n) / n
    return Loop(bloch_states(theta, phi))


def _vectors_to_states(vecs: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(vecs[:, 2], -1.0, 1.0))
    phi = np.arctan2(vecs[:, 1], vecs[:, 0])
    return bloch_states(theta, phi)


def great_circle(axis, n: int, turns: int = 1) -> Loop:
    """Great circle of the Bloch sphere normal to `axis`, traversed `turns` times."""
    if n < 3:
        raise BadResolution(f"need n >= 3 samples, got {n}")
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    # deterministic frame: cross with the least-aligned basis vector
    seed = np.zeros(3)
    seed[np.abs(axis).argmin()] = 1.0
    u = np.cross(axis, seed)
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    t = 2.0 * np.pi * turns * np.arange(n) / n
    vecs = np.outer(np.cos(t), u) + np.outer(np.sin(t), v)
    return Loop(_vectors_to_states(vecs))


def _slerp_vectors(a: np.ndarray, b: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Great-circle interpolation between unit 3-vectors a, b at fractions ts."""
    ang = np.arccos(np.clip(np.dot(a, b), -1.0, 1.0))
    if ang < 1e-12:
        return np.repeat(a[None, :], len(ts), axis=0)
    return (np.outer(np.sin((1.0 - ts) * ang), a)
            + np.outer(np.sin(ts * ang), b)) / np.sin(ang)


def spherical_polygon(n_vertices: int, theta: float, n_per_edge: int) -> Loop:
    """Geodesic polygon with vertices at polar angle theta, equal azimuths."""
    if n_vertices < 3:
        raise BadResolution(f"need at least 3 vertices, got {n_vertices}")
    if n_per_edge < 1 or n_vertices * n_per_edge < 3:
        raise BadResolution("too few samples per edge")
    if not 0.0 < theta < np.pi:
        raise OutOfRange(f"polar angle {theta} outside (0, pi)")
    phis = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    verts = np.stack([np.sin(theta) * np.cos(phis),
                      np.sin(theta) * np.sin(phis),
                      np.full(n_vertices, np.cos(theta))], axis=1)
    ts = np.arange(n_per_edge) / n_per_edge
    pieces = [_slerp_vectors(verts[i], verts[(i + 1) % n_vertices], ts)
              for i in range(n_vertices)]
    return Loop(_vectors_to_states(np.concatenate(pieces, axis=0)))


@dataclass(frozen=True)
class FourierLoopSpec:
    """Loop z_i(t) = sum_m c_{i,m} e^{i m t} in the (1, z) chart of CP^{M-1}.

    coeffs has shape (m_dim - 1, 2*k + 1) with harmonics ordered
    -k .. 0 .. k; the loop is sampled at n equispaced t values.
    """

    m_dim: int
    coeffs: np.ndarray
    k: int
    n: int

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.m_dim < 2:
            raise OutOfRange("need at least a two-level system")
        if self.k < 0:
            raise OutOfRange("harmonic cutoff must be >= 0")
        if coeffs.shape != (self.m_dim - 1, 2 * self.k + 1):
            raise OutOfRange(
                f"coeffs shape {coeffs.shape} != {(self.m_dim - 1, 2 * self.k + 1)}")
        if self.n < 8 * (self.k + 1):
            raise BadResolution(f"n = {self.n} under-resolves harmonics up to {self.k}")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def with_resolution(self, n: int) -> "FourierLoopSpec":
        return FourierLoopSpec(self.m_dim, self.coeffs, self.k, n)


@lru_cache(maxsize=32)
def _fourier_basis(n: int, k: int) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n) / n
    modes = np.arange(-k, k + 1)
    basis = np.exp(1j * np.outer(t, modes))          # (n, 2k+1)
    basis.setflags(write=False)
    return basis


def fourier_states(spec: FourierLoopSpec) -> np.ndarray:
    z = _fourier_basis(spec.n, spec.k) @ spec.coeffs.T   # (n, m-1)
    states = np.concatenate([np.ones((spec.n, 1), dtype=complex), z], axis=1)
    return states / np.linalg.norm(states, axis=1, keepdims=True)


def fourier_loop(spec: FourierLoopSpec) -> Loop:
    """Sample the Fourier-parametrized loop; reject ill-conditioned specs."""
    states = fourier_states(spec)
    ovl = np.abs(_cyclic_overlaps(states))
    if ovl.min() <= TOL.segment_overlap:
        raise DegenerateSpec(
            f"consecutive overlap {ovl.min():.3e} below {TOL.segment_overlap:.0e}")
    return Loop(states)


def random_fourier_spec(m_dim: int, k: int, n: int, rng, scale: float = 0.6) -> FourierLoopSpec:
    """Random spec with harmonic amplitudes decaying like 1/(1+|m|)."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    modes = np.arange(-k, k + 1)
    sigma = scale / (1.0 + np.abs(modes))
    shape = (m_dim - 1, 2 * k + 1)
    coeffs = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * sigma
    return FourierLoopSpec(m_dim=m_dim, coeffs=coeffs, k=k, n=n)


def perturb_circle(theta: float, eps: float, mode: int, n: int) -> Loop:
    """Bloch circle with modulated polar angle theta + eps*cos(mode*phi)."""
    if eps < 0 or mode < 1:
        raise OutOfRange("need eps >= 0 and mode >= 1")
    if n < 3:
        raise BadResolution(f"need n >= 3 samples, got {n}")
    if not (0.0 < theta - eps and theta + eps < np.pi):
        raise OutOfRange(f"theta +- eps leaves (0, pi): {theta} +- {eps}")
    phi = 2.0 * np.pi * np.arange(n) / n
    return Loop(bloch_states(theta + eps * np.cos(mode * phi), phi))


def refine(loop: Loop, factor: int) -> Loop:
    """Insert factor-1 geodesic intermediates per segment.

    Representatives are phase-aligned so <psi_j|psi_{j+1}> > 0 before
    interpolating; the spherical interpolation then runs along the
    projective geodesic, keeping the refinement gauge independent.
    """
    if factor < 2:
        raise BadResolution("refinement factor must be >= 2")
    states = loop.states
    nxt = np.roll(states, -1, axis=0)
    ovl = _cyclic_overlaps(states)
    if np.abs(ovl).min() <= TOL.segment_overlap:
        raise IllConditionedSegment("cannot refine across a near-orthogonal segment")
    aligned = nxt * np.exp(-1j * np.angle(ovl))[:, None]
    alpha = np.arccos(np.clip(np.abs(ovl), 0.0, 1.0))[:, None]
    tiny = alpha < 1e-12  # degenerate segment: fall back to linear weights
    sin_alpha = np.sin(np.where(tiny, 1.0, alpha))
    out = np.empty((loop.n, factor, loop.dim), dtype=complex)
    for step in range(factor):
        t = step / factor
        w0 = np.where(tiny, 1.0 - t, np.sin((1.0 - t) * alpha) / sin_alpha)
        w1 = np.where(tiny, t, np.sin(t * alpha) / sin_alpha)
        out[:, step, :] = w0 * states + w1 * aligned
    flat = out.reshape(loop.n * factor, loop.dim)
    return Loop(flat / np.linalg.norm(flat, axis=1, keepdims=True))


@lru_cache(maxsize=16)
def _pair_mask(n: int) -> np.ndarray:
    # upper triangle k >= j+2, minus the cyclically adjacent corner
    mask = np.triu(np.ones((n, n), dtype=bool), k=2)
    mask[0, n - 1] = False
    mask.setflags(write=False)
    return mask


def _coincidence_pairs(states: np.ndarray, tol: float) -> np.ndarray:
    """Index pairs (j, k), k > j+1 and not cyclically adjacent, whose
    projective distance is below tol, in row-major order."""
    n = states.shape[0]
    gram = np.abs(states @ states.conj().T)
    close = (gram >= np.cos(tol)) & _pair_mask(n)
    if not close.any():
        return np.empty((0, 2), dtype=np.intp)
    return np.argwhere(close)


def _split_states(states: np.ndarray, tol: float, out: list):
    n = states.shape[0]
    for j, k in _coincidence_pairs(states, tol):
        j, k = int(j), int(k)
        # skip pairs whose split would leave a piece of fewer than 3 states
        if k - j >= 3 and n - (k - j) >= 3:
            _split_states(states[j:k], tol, out)
            _split_states(np.concatenate([states[:j], states[k:]]), tol, out)
            return
    out.append(states)


def split_self_intersections(loop: Loop, tol: float = TOL.split) -> list[Loop]:
    """Break a self-intersecting loop into simple sub-loops.

    Splits greedily at the first coincident index pair and recurses; the
    concatenation of the returned sub-loops retraces the original loop.
    Returns [loop] unchanged when no coincidence is found.
    """
    if tol <= 0:
        raise OutOfRange("coincidence tolerance must be positive")
    parts: list[np.ndarray] = []
    _split_states(loop.states, tol, parts)
    if len(parts) == 1:
        return [loop]
    return [Loop(p) for p in parts]


def save_loop(path, loop: Loop, generator: str = "", parameters: dict | None = None,
              seed: int | None = None):
    """Write a loop as CSV with a JSON header line.

    The header (first line, '#'-prefixed) records M, n, the generator
    name, its parameters, and the seed; data rows are index followed by
    re/im of each amplitude.
    """
    header = {"m": loop.dim, "n": loop.n, "generator": generator,
              "parameters": parameters or {}, "seed": seed}
    cols = ",".join(f"re_{i},im_{i}" for i in range(loop.dim))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write(f"index,{cols}\n")
        for idx, row in enumerate(loop.states):
            parts = [f"{idx}"]
            for amp in row:
                parts.append(f"{amp.real:.17g}")
                parts.append(f"{amp.imag:.17g}")
            fh.write(",".join(parts) + "\n")


def load_loop(path) -> tuple[Loop, dict]:
    """Read a loop written by save_loop; rows are renormalized."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError("missing JSON header line")
        meta = json.loads(first[1:].strip())
        fh.readline()  # column names
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array([[float(x) for x in row[1:]] for row in rows])
    states = data[:, 0::2] + 1j * data[:, 1::2]
    states = states / np.linalg.norm(states, axis=1, keepdims=True)
    return Loop(states), meta
