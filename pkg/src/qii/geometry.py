"""Quantum-geometric quantities of discretized loops and parametrized charts.

A loop is an ordered cyclic sequence of normalized states; its two
macroscopic invariants are the Fubini-Study length (sum of geodesic
segment distances arccos|<psi_j|psi_{j+1}>|) and the Berry phase (the
Pancharatnam phase of the cyclic overlap product).  Both are manifestly
gauge invariant, so no gauge smoothing is ever needed.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import TOL
from .core import normalize, projector
from .errors import (IllConditionedSegment, NonFiniteDerivative,
                     PoleDegenerate, WrongDimension)

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def principal_phase(x: float, guard: float = TOL.branch_guard) -> float:
    """Reduce a phase to (-pi, pi], resolving the branch edge to +pi.

    Values within `guard` of -pi are reported as +pi: at the branch point
    the two signs label the same phase mod 2*pi and the printed convention
    picks +pi.
    """
    y = (x + np.pi) % (2.0 * np.pi) - np.pi
    if y <= -np.pi + guard:
        return np.pi
    return float(y)


@dataclass(frozen=True)
class Loop:
    """Closed discretized path of pure states.

    states has shape (n, M) with n >= 3; the sequence is cyclic, the
    closing segment being states[n-1] -> states[0].  Rows must be
    normalized and consecutive rows must not be (nearly) orthogonal.
    """

    states: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.states, dtype=complex)
        if arr.ndim != 2:
            raise WrongDimension(f"loop states must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 3:
            raise IllConditionedSegment("a loop needs at least 3 states")
        norms = np.linalg.norm(arr, axis=1)
        if np.abs(norms - 1.0).max() > TOL.norm:
            raise ValueError("loop states must be normalized")
        ovl = np.abs(_cyclic_overlaps(arr))
        if ovl.min() <= TOL.segment_overlap:
            raise IllConditionedSegment(
                f"consecutive overlap {ovl.min():.3e} at segment {int(ovl.argmin())}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "states", arr)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def reversed(self) -> "Loop":
        return Loop(self.states[::-1])


@dataclass(frozen=True)
class LoopSummary:
    """Gauge-invariant scalars of one loop.

    gamma_total is the accumulated phase before principal-value
    reduction; it only differs from gamma_b when the summary was
    produced by sub-loop aggregation.
    """

    d_fs: float
    gamma_b: float
    gamma_total: float
    n_segments: int
    convergence_est: float


def _cyclic_overlaps(states: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", states.conj(), np.roll(states, -1, axis=0))


def _distance(states: np.ndarray) -> float:
    # atan2(sin, cos) with the sine taken from the orthogonal residual is
    # uniformly accurate; arccos alone loses half the digits near 1.
    nxt = np.roll(states, -1, axis=0)
    ovl = np.einsum("ij,ij->i", states.conj(), nxt)
    residual = nxt - states * ovl[:, None]
    sin = np.linalg.norm(residual, axis=1)
    return float(np.arctan2(sin, np.abs(ovl)).sum())


def _berry_phase(states: np.ndarray) -> float:
    ovl = _cyclic_overlaps(states)
    small = np.abs(ovl)
    if small.min() < TOL.segment_overlap:
        raise IllConditionedSegment(
            f"overlap {small.min():.3e} too small for a Berry phase")
    # Summing the segment angles (each well inside (-pi, pi)) instead of
    # taking arg of the product avoids underflow of the product magnitude.
    return principal_phase(-float(np.angle(ovl).sum()))


def segment_distance(a, b) -> float:
    """Geodesic Fubini-Study distance arccos|<a|b>| in [0, pi/2]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ov = np.vdot(a, b)
    sin = np.linalg.norm(b - a * ov)
    return float(np.arctan2(sin, min(1.0, abs(ov))))


def loop_distance(loop: Loop) -> float:
    """Fubini-Study length of the cyclic chord sequence.

    Exact for geodesic polygons; converges to the continuum length from
    below under refinement of a smooth loop.
    """
    return _distance(loop.states)


def loop_berry_phase(loop: Loop) -> float:
    """Pancharatnam phase -arg prod_j <psi_j|psi_{j+1}> in (-pi, pi]."""
    return _berry_phase(loop.states)


def bloch_vectors(states: np.ndarray) -> np.ndarray:
    """Unit Bloch vectors <psi|sigma|psi> for an (n, 2) state array."""
    a, b = states[:, 0], states[:, 1]
    x = 2.0 * (a.conj() * b).real
    y = 2.0 * (a.conj() * b).imag
    z = (np.abs(a) ** 2 - np.abs(b) ** 2)
    return np.stack([x, y, z], axis=1)


def _solid_angle_reference(n: np.ndarray) -> np.ndarray:
    """Pick a triangulation reference far from every loop vertex.

    Alignment is measured by 1 - |n.ref| (double precision cannot resolve
    angular separations through inner products any finer).  Candidates:
    the north pole, the centroid antipode, the mean normal, then seeded
    random directions.
    """
    def ok(ref):
        return (1.0 - np.abs(n @ ref).max()) > TOL.pole_align

    candidates = [np.array([0.0, 0.0, 1.0])]
    centroid = n.mean(axis=0)
    if np.linalg.norm(centroid) > 1e-6:
        candidates.append(-centroid / np.linalg.norm(centroid))
    normal = np.cross(n, np.roll(n, -1, axis=0)).sum(axis=0)
    if np.linalg.norm(normal) > 1e-6:
        candidates.append(normal / np.linalg.norm(normal))
    for ref in candidates:
        if ok(ref):
            return ref
    rng = np.random.default_rng(20240718)
    for _ in range(128):
        ref = rng.normal(size=3)
        ref /= np.linalg.norm(ref)
        if ok(ref):
            return ref
    raise PoleDegenerate("no usable reference direction found")


def bloch_solid_angle(loop: Loop) -> float:
    """Signed solid angle enclosed by the Bloch image of a two-band loop.

    Triangulates the loop from a reference point and sums the signed
    spherical excesses (van Oosterom-Strackee), then reduces mod 4*pi
    into (-2*pi, 2*pi] -- the smaller of the two possible solid angles.
    Positive for counterclockwise circulation seen from outside the
    enclosed cap.  Serves as the independent oracle for |gamma_B| = Omega/2.
    """
    if loop.dim != 2:
        raise WrongDimension(f"Bloch sphere requires dimension 2, got {loop.dim}")
    n = bloch_vectors(loop.states)
    ref = _solid_angle_reference(n)
    nxt = np.roll(n, -1, axis=0)
    num = np.einsum("i,ji->j", ref, np.cross(n, nxt))
    den = 1.0 + n @ ref + np.einsum("ij,ij->i", n, nxt) + nxt @ ref
    total = 2.0 * np.arctan2(num, den).sum()
    reduced = total % (4.0 * np.pi)
    if reduced > 2.0 * np.pi:
        reduced -= 4.0 * np.pi
    if reduced <= -2.0 * np.pi + 2.0 * TOL.branch_guard:
        reduced = 2.0 * np.pi
    return float(reduced)


def summarize(loop: Loop) -> LoopSummary:
    """Bundle distance, Berry phase, and a convergence estimate.

    The estimate compares against the half-resolution subsampled loop;
    for a loop that is already a geodesic polygon it is ~machine epsilon.
    """
    d = _distance(loop.states)
    g = _berry_phase(loop.states)
    if loop.n >= 6:
        half = loop.states[::2]
        try:
            est = max(abs(d - _distance(half)),
                      abs(principal_phase(g - _berry_phase(half), guard=0.0)))
        except IllConditionedSegment:
            # subsampling can join nearly orthogonal states on wild loops
            est = abs(d - _distance(half))
    else:
        est = 0.0
    return LoopSummary(d_fs=d, gamma_b=g, gamma_total=g,
                       n_segments=loop.n, convergence_est=float(est))


def aggregate_summary(parts: list[LoopSummary]) -> LoopSummary:
    """Combine sub-loop summaries: distances and phases add.

    gamma_total carries the accumulated (unreduced) phase; gamma_b is its
    principal value.
    """
    d = sum(s.d_fs for s in parts)
    total = sum(s.gamma_b for s in parts)
    return LoopSummary(
        d_fs=d,
        gamma_b=principal_phase(total),
        gamma_total=total,
        n_segments=sum(s.n_segments for s in parts),
        convergence_est=max(s.convergence_est for s in parts),
    )


@dataclass(frozen=True)
class Chart:
    """Map from d real parameters to normalized states, with an FD step."""

    map: Callable[[np.ndarray], np.ndarray]
    d: int
    step: float = TOL.fd_step

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("finite-difference step must be positive")


@dataclass(frozen=True)
class QGTensor:
    """Quantum geometric tensor chi = g - (i/2) F at one chart point.

    g is the (real symmetric, positive semidefinite) quantum metric and
    F the (real antisymmetric) Berry curvature.  convergence_est is the
    max-abs change of chi when the difference step is halved.
    """

    chi: np.ndarray
    g: np.ndarray
    f: np.ndarray
    convergence_est: float

    @property
    def trace_g(self) -> float:
        return float(np.trace(self.g).real)


def _projector_at(chart: Chart, lam: np.ndarray) -> np.ndarray:
    psi = normalize(chart.map(lam))
    return projector(psi)


def _chi_parts(chart: Chart, lam0: np.ndarray, h: float, p0: np.ndarray):
    d = chart.d
    dps = []
    for mu in range(d):
        e = np.zeros(d)
        e[mu] = h
        dp = (_projector_at(chart, lam0 + e) - _projector_at(chart, lam0 - e)) / (2.0 * h)
        if not np.all(np.isfinite(dp.real)) or not np.all(np.isfinite(dp.imag)):
            raise NonFiniteDerivative(f"non-finite projector difference along axis {mu}")
        dps.append(dp)
    g = np.empty((d, d))
    f = np.empty((d, d))
    for mu in range(d):
        for nu in range(mu, d):
            g[mu, nu] = g[nu, mu] = 0.5 * np.trace(dps[mu] @ dps[nu]).real
            im = -2.0 * np.trace(p0 @ dps[mu] @ dps[nu]).imag
            f[mu, nu] = im
            f[nu, mu] = -im
        f[mu, mu] = 0.0
    return g, f


def qgt_at(chart: Chart, lam0, richardson: bool = True) -> QGTensor:
    """Quantum geometric tensor by central differences of the projector.

    Projector differences bypass any phase convention of the chart map:
    g_{mu nu} = Re Tr[dP_mu dP_nu] / 2 and F_{mu nu} = -2 Im Tr[P dP_mu dP_nu].
    With richardson=True the evaluation is repeated at half the step and
    the max-abs change of chi is exposed as convergence_est.
    """
    lam0 = np.atleast_1d(np.asarray(lam0, dtype=float))
    if lam0.shape != (chart.d,):
        raise WrongDimension(f"chart expects {chart.d} parameters, got {lam0.shape}")
    p0 = _projector_at(chart, lam0)
    g, f = _chi_parts(chart, lam0, chart.step, p0)
    chi = g - 0.5j * f
    est = 0.0
    if richardson:
        g2, f2 = _chi_parts(chart, lam0, chart.step / 2.0, p0)
        est = float(np.abs(chi - (g2 - 0.5j * f2)).max())
    return QGTensor(chi=chi, g=g, f=f, convergence_est=est)
