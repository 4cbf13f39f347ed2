"""Exact time evolution and two-body correlations of the walker pair.

Propagation uses the full Hermitian eigendecomposition of the
two-particle Hamiltonian (hbar = 1), which is exact at any time for the
lattice sizes this package targets.  Correlations reduce, in the
two-particle sector, to squared pair-annihilation amplitudes:

    position:  Gamma_{q r} = |C_{q r}|^2
    momentum:  Gamma_{a b} = |Ctilde(p_a, p_b)|^2,
               Ctilde = (1/n) sum_{l,m} e^{i(p_a m + p_b l)} C[m, l]

on the momentum grid ``p_a = 2 pi a / n``.  Both sum to 2 for a
normalized state.  The front-speed estimator used for co-walking fits a
line through threshold-crossing arrival times of the nearest-neighbor
(minor-diagonal) correlation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryContaminationError, InsufficientPointsError
from .model import (
    LatticeSpec,
    StateVector,
    amplitude_matrix,
    build_basis,
    build_hamiltonian,
)

__all__ = [
    "Propagator",
    "CorrelationMatrix",
    "WalkSeries",
    "ConeFit",
    "build_propagator",
    "prepare_initial",
    "evolve",
    "correlation_position",
    "correlation_momentum",
    "walk_series",
    "minor_diagonal",
    "cone_speed",
    "boundary_contact_time",
    "CONE_THRESHOLD",
]

CONE_THRESHOLD = 0.05


@dataclass(eq=False)
class Propagator:
    """Eigendecomposition of the two-particle Hamiltonian, reused across times."""

    spec: LatticeSpec
    energies: np.ndarray
    modes: np.ndarray = field(repr=False)

    def hamiltonian(self) -> np.ndarray:
        return (self.modes * self.energies) @ self.modes.T.conj()


def build_propagator(spec: LatticeSpec) -> Propagator:
    energies, modes = np.linalg.eigh(build_hamiltonian(spec))
    return Propagator(spec=spec, energies=energies, modes=modes)


def prepare_initial(spec: LatticeSpec, l1: int = 0, l2: int = 1) -> StateVector:
    """Basis state with the walkers on sites l1 and l2 (default neighbors 0, 1).

    Site order is canonicalized; coinciding sites are allowed only for
    bosons (normalized doublon).
    """
    basis = build_basis(spec)
    l1, l2 = spec.wrap(l1), spec.wrap(l2)
    if l1 == l2 and not spec.statistics.allows_double_occupancy:
        raise ValueError(f"two {spec.statistics.value} walkers cannot share site {l1}")
    if l1 > l2:
        l1, l2 = l2, l1
    amp = np.zeros(basis.dim, dtype=complex)
    amp[basis.index_of(l1, l2)] = 1.0
    return StateVector(basis, amp)


def evolve(prop: Propagator, state: StateVector, t: float) -> StateVector:
    """Propagate a state by time t (exact; negative t runs backwards)."""
    if state.basis.spec != prop.spec:
        raise ValueError("state and propagator belong to different lattice specifications")
    coeffs = prop.modes.T.conj() @ state.amplitudes
    evolved = prop.modes @ (np.exp(-1j * prop.energies * t) * coeffs)
    return StateVector(state.basis, evolved)


@dataclass(eq=False)
class CorrelationMatrix:
    """Joint two-body detection probabilities at one instant.

    ``entries[q + L, r + L]`` is the probability weight for finding one
    walker at site (or momentum index) q and the other at r.  Symmetric,
    sums to 2, and has exactly zero diagonal for fermions.
    """

    entries: np.ndarray
    space_tag: str  # "position" | "momentum"
    time: float

    def total(self) -> float:
        return float(self.entries.sum())


def correlation_position(state: StateVector, time: float = 0.0) -> CorrelationMatrix:
    """Gamma_{q r} = <a+_q a+_r a_r a_q> from the squared amplitude matrix."""
    C = amplitude_matrix(state)
    return CorrelationMatrix(entries=np.abs(C.entries) ** 2, space_tag="position", time=time)


def _momentum_kernel(spec: LatticeSpec) -> np.ndarray:
    sites = np.arange(-spec.L, spec.L + 1)
    p = 2.0 * np.pi * sites / spec.n_sites  # momentum index runs over -L..L too
    return np.exp(1j * np.outer(p, sites))


def correlation_momentum(state: StateVector, time: float = 0.0) -> CorrelationMatrix:
    """Momentum-space correlation via the double Fourier transform of C.

    The transform convention matches creation operators
    ``c+_a = n^{-1/2} sum_l e^{-i p_a l} a+_l``; the reduction to
    ``|Ctilde|^2`` is exact in the two-particle sector for all three
    statistics (hard-core operators included), because only the vacuum
    survives two annihilations.
    """
    spec = state.basis.spec
    C = amplitude_matrix(state)
    F = _momentum_kernel(spec)
    Ctilde = F @ C.entries @ F.T / spec.n_sites
    return CorrelationMatrix(entries=np.abs(Ctilde) ** 2, space_tag="momentum", time=time)


@dataclass(eq=False)
class WalkSeries:
    """Time-resolved correlations of one walk."""

    spec: LatticeSpec
    initial_pair: tuple[int, int]
    times: np.ndarray
    position: list[CorrelationMatrix]
    momentum: list[CorrelationMatrix]


def walk_series(spec: LatticeSpec, initial: StateVector | tuple[int, int],
                times: np.ndarray | list[float]) -> WalkSeries:
    """Evolve an initial pair and record both correlation spaces per time."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a non-empty strictly ascending sequence")
    if isinstance(initial, StateVector):
        if initial.basis.spec != spec:
            raise ValueError("initial state belongs to a different lattice specification")
        state0 = initial
        pair = state0.basis.pair(int(np.argmax(np.abs(state0.amplitudes))))
    else:
        pair = (int(initial[0]), int(initial[1]))
        state0 = prepare_initial(spec, *pair)
    prop = build_propagator(spec)
    pos, mom = [], []
    for t in times:
        state = evolve(prop, state0, float(t))
        pos.append(correlation_position(state, time=float(t)))
        mom.append(correlation_momentum(state, time=float(t)))
    return WalkSeries(spec=spec, initial_pair=pair, times=times, position=pos, momentum=mom)


def minor_diagonal(spec: LatticeSpec, corr: CorrelationMatrix | np.ndarray) -> np.ndarray:
    """Nearest-neighbor weights Gamma_{q, q+1} as an array over bond label q.

    Bond q joins sites q and q+1 (the bond at q = L wraps to -L); entry
    ``q + L`` of the result belongs to bond q.
    """
    entries = corr.entries if isinstance(corr, CorrelationMatrix) else corr
    n, L = spec.n_sites, spec.L
    out = np.empty(n)
    for q in spec.sites:
        out[q + L] = entries[q + L, (spec.wrap(q + 1)) + L].real
    return out


def boundary_contact_time(series: WalkSeries, occupancy_threshold: float = 0.05) -> float | None:
    """First sampled time at which the edge sites -L, L carry real occupancy.

    Row sums of the position correlation give single-site occupancies for
    a two-walker state; contact is declared when the summed occupancy of
    the two edge sites exceeds the threshold.  Returns None if the window
    stays clean.
    """
    for corr in series.position:
        rho = corr.entries.sum(axis=1)
        if rho[0] + rho[-1] > occupancy_threshold:
            return corr.time
    return None


@dataclass(frozen=True)
class ConeFit:
    """Ballistic front fit: distance versus threshold-crossing arrival time."""

    speed: float
    window: tuple[float, float]
    arrival_times: dict[int, float]

    @property
    def n_points(self) -> int:
        return len(self.arrival_times)


def _crossing_time(times: np.ndarray, signal: np.ndarray, threshold: float) -> float | None:
    above = signal > threshold
    if not above.any():
        return None
    i = int(np.argmax(above))
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    s0, s1 = signal[i - 1], signal[i]
    return float(t0 + (threshold - s0) * (t1 - t0) / (s1 - s0))


def cone_speed(spec: LatticeSpec, times: np.ndarray, bond_series: np.ndarray, *,
               threshold: float = CONE_THRESHOLD, min_points: int = 4) -> ConeFit:
    """Front speed of the nearest-neighbor correlation cone.

    ``bond_series[i, q + L]`` holds Gamma_{q, q+1} at ``times[i]``.  The
    signal at distance d sums the mirror bonds q = d and q = -d - 1; its
    arrival time is the first threshold crossing (linearly interpolated
    between samples).  The speed is the least-squares slope of distance
    against arrival time over all distances up to L - 2, with at least
    ``min_points`` detected arrivals required.  If the bond at L - 1
    crosses the threshold inside the window the fit would be contaminated
    by the lattice edge and :class:`BoundaryContaminationError` is raised.
    """
    times = np.asarray(times, dtype=float)
    L = spec.L
    guard = _crossing_time(
        times, bond_series[:, (L - 1) + L] + bond_series[:, (-(L - 1) - 1) + L], threshold)
    if guard is not None:
        raise BoundaryContaminationError(
            f"front reached bond |q| = L - 1 = {L - 1} at t = {guard:.6g}")
    arrivals: dict[int, float] = {}
    for d in range(1, L - 1):
        signal = bond_series[:, d + L] + bond_series[:, (-d - 1) + L]
        t_cross = _crossing_time(times, signal, threshold)
        if t_cross is not None:
            arrivals[d] = t_cross
    if len(arrivals) < min_points:
        raise InsufficientPointsError(
            f"only {len(arrivals)} arrival(s) detected, need at least {min_points}")
    ds = np.array(sorted(arrivals), dtype=float)
    ts = np.array([arrivals[int(d)] for d in ds])
    design = np.vstack([ts, np.ones_like(ts)]).T
    slope = float(np.linalg.lstsq(design, ds, rcond=None)[0][0])
    return ConeFit(speed=slope, window=(float(times[0]), float(times[-1])),
                   arrival_times={int(d): float(arrivals[int(d)]) for d in ds})
