"""Momentum-resolved solver for the two-particle ring.

Translation invariance conserves the total quasi-momentum
``K = 2 pi alpha / n_sites`` (integer ``alpha`` in -L..L), so the
two-particle problem splits into independent blocks acting on the
relative coordinate ``r``.  Each block is tridiagonal with hopping
``J_K = -2 J cos(K/2)``, the interaction V on the ``r = 1`` slot, and a
wrap term ``+/- (-1)^alpha J_K`` folded onto the last diagonal entry
(plus sign for bosons and hard-core bosons, minus for fermions).

Eigenstates come in two families: scattering states with a real relative
quasi-momentum ``k`` obeying a statistics-dependent quantization
condition, and bound states with ``k = i eta`` whose energy in the
large-ring limit has closed form ``E = 2 J_K cosh(eta)``.  Both the
quantization residuals and the closed forms are implemented here,
independently of the numerical block diagonalization, so each route can
audit the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import cos, cosh, log, pi, sqrt

import mpmath as mp
import numpy as np

from .errors import (
    DegenerateDenominatorError,
    InvalidRegimeError,
    NoBoundStateError,
)
from .model import LatticeSpec, Statistics, build_basis

__all__ = [
    "KBlock",
    "BlockModes",
    "BoundStateSolution",
    "ScatteringRoot",
    "StateKind",
    "EigenstateClass",
    "SpectrumPoint",
    "build_k_block",
    "diagonalize_block",
    "relative_amplitudes",
    "scattering_residual",
    "scattering_root_from_energy",
    "bound_state_energy_fh",
    "bound_state_eta_boson",
    "classify_eigenstates",
    "spectrum_sweep",
    "bound_band_minimum_precise",
]

_JK_FLOOR = 1e-13  # below this the block is treated as decoupled (J_K = 0)

TAIL_THRESHOLD = 1e-2
RESIDUAL_THRESHOLD = 1e-4


def _parity(alpha: int) -> int:
    """exp(i K n_sites / 2) on the quantized grid reduces to (-1)^alpha."""
    return 1 if alpha % 2 == 0 else -1


@dataclass(frozen=True, eq=False)
class KBlock:
    """One total-quasi-momentum block of the two-particle Hamiltonian.

    ``matrix`` is the real-symmetric form over the orthonormal relative
    basis (doublon slot rescaled by 1/sqrt2 for bosons), used for all
    numerics.  ``relative_matrix`` is the same operator written on raw
    relative amplitudes phi(r); for bosons its first row reads
    ``(0, 2 J_K, 0, ...)`` against ``J_K`` in the first column, for the
    other statistics the two coincide.
    """

    spec: LatticeSpec
    alpha: int
    K: float
    J_K: float
    corner: float
    matrix: np.ndarray = field(repr=False)
    relative_matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def relative_range(self) -> range:
        """Relative coordinates carried by the block rows."""
        start = 0 if self.spec.statistics.allows_double_occupancy else 1
        return range(start, self.spec.L + 1)


def build_k_block(spec: LatticeSpec, alpha: int) -> KBlock:
    """Assemble the relative-motion block at total quasi-momentum 2 pi alpha / n."""
    L = spec.L
    if not -L <= alpha <= L:
        raise ValueError(f"alpha must lie in [{-L}, {L}], got {alpha}")
    n = spec.n_sites
    K = 2.0 * pi * alpha / n
    J_K = -2.0 * spec.J * cos(K / 2.0)
    wrap_sign = 1 if spec.statistics is not Statistics.FERMION else -1
    corner = wrap_sign * _parity(alpha) * J_K

    boson = spec.statistics.allows_double_occupancy
    dim = L + 1 if boson else L
    M = np.zeros((dim, dim))
    for i in range(dim - 1):
        M[i, i + 1] = M[i + 1, i] = J_K
    # interaction sits on the r = 1 slot; the wrap term folds onto r = L
    r_one = 1 if boson else 0
    if dim > r_one:
        M[r_one, r_one] += spec.V
    M[dim - 1, dim - 1] += corner

    rel = M.copy()
    if boson and dim > 1:
        # raw-amplitude convention: phi(0) couples with 2 J_K above, J_K below
        rel[0, 1] = 2.0 * J_K
        rel[1, 0] = J_K
        M[0, 1] = M[1, 0] = sqrt(2.0) * J_K
    return KBlock(spec=spec, alpha=alpha, K=K, J_K=J_K, corner=corner,
                  matrix=M, relative_matrix=rel)


@dataclass(eq=False)
class BlockModes:
    """Eigen-decomposition of one block; energies ascending, columns orthonormal."""

    block: KBlock
    energies: np.ndarray
    vectors: np.ndarray


def diagonalize_block(block: KBlock) -> BlockModes:
    energies, vectors = np.linalg.eigh(block.matrix)
    return BlockModes(block=block, energies=energies, vectors=vectors)


def relative_amplitudes(block: KBlock, vector: np.ndarray) -> np.ndarray:
    """Raw relative amplitudes phi(r) of an eigenvector of ``block.matrix``."""
    phi = np.array(vector, dtype=complex)
    if block.spec.statistics.allows_double_occupancy:
        phi[0] *= sqrt(2.0)
    return phi


# ---------------------------------------------------------------------------
# analytic quantization conditions
# ---------------------------------------------------------------------------

def _alpha_from_K(spec: LatticeSpec, K: float, tol: float = 1e-9) -> int:
    alpha = round(K * spec.n_sites / (2.0 * pi))
    if abs(K - 2.0 * pi * alpha / spec.n_sites) > tol or not -spec.L <= alpha <= spec.L:
        raise ValueError(f"K={K!r} is not on the quantized grid 2 pi alpha / {spec.n_sites}")
    return int(alpha)


def scattering_residual(spec: LatticeSpec, K: float, k: complex) -> float:
    """Defect of the statistics-appropriate quantization condition at (K, k).

    Zero exactly when ``k`` is an admissible relative quasi-momentum.  The
    fermion and hard-core conditions read

        e^{i k n} = (+/-)(-1)^alpha (J_K - V e^{ik}) / (J_K - V e^{-ik})

    (plus for fermions, minus for hard-core bosons), while the bosonic one
    carries the doublon-modified amplitude ratio.  ``k`` may be complex
    (closed upper half plane); a vanishing denominator raises
    :class:`DegenerateDenominatorError`.
    """
    alpha = _alpha_from_K(spec, K)
    J_K = -2.0 * spec.J * cos(K / 2.0)
    V = spec.V
    k = complex(k)
    if k.imag < -1e-12:
        raise ValueError("relative quasi-momentum must lie in the closed upper half plane")
    e_p = np.exp(1j * k)
    e_m = np.exp(-1j * k)
    lhs = np.exp(1j * k * spec.n_sites)
    if spec.statistics is Statistics.BOSON:
        num = J_K * (e_p - e_m) + V * (1.0 + np.exp(2j * k))
        den = J_K * (e_p - e_m) - V * (1.0 + np.exp(-2j * k))
        sign = _parity(alpha)
    else:
        num = J_K - V * e_p
        den = J_K - V * e_m
        sign = _parity(alpha) if spec.statistics is Statistics.FERMION else -_parity(alpha)
    if abs(den) < 1e-13:
        raise DegenerateDenominatorError(
            f"quantization condition degenerates at K={K!r}, k={k!r}")
    return float(abs(lhs - sign * num / den))


@dataclass(frozen=True)
class BoundStateSolution:
    """Bound pair at total quasi-momentum K: decay rate eta and energy.

    The relative wavefunction decays as ``exp(-eta r)``; for attractive V
    the energy satisfies ``E = 2 J_K cosh(eta)`` (staggered branch with the
    opposite overall sign for repulsive V).
    """

    K: float
    eta: float
    energy: float


@dataclass(frozen=True)
class ScatteringRoot:
    """Real relative quasi-momentum candidate for one block eigenvalue.

    ``k`` is the principal branch of ``arccos(E / 2 J_K)`` in [0, pi] and
    ``residual`` its quantization-condition defect; genuine scattering
    eigenstates leave residuals below 1e-8.
    """

    K: float
    k: float
    energy: float
    residual: float


def scattering_root_from_energy(spec: LatticeSpec, K: float, energy: float) -> ScatteringRoot:
    """Infer the real quasi-momentum explaining an in-band eigenvalue.

    Raises :class:`NoBoundStateError`-free ``ValueError`` when the energy
    lies outside the band ``|E| <= 2 |J_K|`` (no real k exists there; such
    eigenvalues belong to bound pairs).
    """
    J_K = -2.0 * spec.J * cos(K / 2.0)
    if abs(J_K) < _JK_FLOOR:
        raise ValueError("decoupled block: no travelling relative motion at this K")
    x = energy / (2.0 * J_K)
    if abs(x) > 1.0:
        raise ValueError(f"energy {energy!r} lies outside the scattering band at K={K!r}")
    k = float(np.arccos(x))
    return ScatteringRoot(K=K, k=k, energy=float(energy),
                          residual=scattering_residual(spec, K, k))


def bound_state_energy_fh(spec: LatticeSpec, K: float) -> BoundStateSolution:
    """Closed-form bound state for fermions or hard-core bosons.

    ``E = V + (4 J^2 / V) cos^2(K/2)`` with decay ``e^eta = V / J_K``, valid
    in the large-ring limit whenever ``|V| > |J_K|``; otherwise
    :class:`NoBoundStateError` is raised.
    """
    if spec.statistics is Statistics.BOSON:
        raise ValueError("use bound_state_eta_boson for bosonic walkers")
    _alpha_from_K(spec, K)
    J_K = -2.0 * spec.J * cos(K / 2.0)
    if abs(J_K) < _JK_FLOOR:
        return BoundStateSolution(K=K, eta=float("inf"), energy=spec.V)
    if abs(spec.V) <= abs(J_K):
        raise NoBoundStateError(
            f"no bound state at K={K!r}: |V|={abs(spec.V)!r} <= |J_K|={abs(J_K)!r}")
    eta = log(abs(spec.V / J_K))
    energy = spec.V + (4.0 * spec.J ** 2 / spec.V) * cos(K / 2.0) ** 2
    return BoundStateSolution(K=K, eta=eta, energy=energy)


def bound_state_eta_boson(spec: LatticeSpec, K: float) -> BoundStateSolution:
    """Closed-form bosonic bound state from the cubic in e^eta.

    With ``beta = V / J_K`` the decay solves
    ``x^3 - beta x^2 - x - beta = 0`` and reads

        x = (beta + (3 + beta^2)/D0 + D0) / 3,
        D0 = (18 beta + beta^3 + 3 sqrt3 sqrt(beta^4 + 11 beta^2 - 1))^(1/3),

    valid for ``beta^2 (beta^2 + 11) > 1``.  Attractive V gives
    ``E = 2 J_K cosh(eta)``; repulsive V maps onto the staggered branch with
    the opposite sign.
    """
    if spec.statistics is not Statistics.BOSON:
        raise ValueError("bosonic closed form requested for non-bosonic statistics")
    _alpha_from_K(spec, K)
    J_K = -2.0 * spec.J * cos(K / 2.0)
    if abs(J_K) < _JK_FLOOR:
        return BoundStateSolution(K=K, eta=float("inf"), energy=spec.V)
    beta = spec.V / J_K
    if beta ** 2 * (beta ** 2 + 11.0) <= 1.0:
        raise InvalidRegimeError(
            f"closed form invalid at K={K!r}: beta^2(beta^2+11) <= 1 (beta={beta!r})")
    b = abs(beta)
    D0 = np.cbrt(18.0 * b + b ** 3 + 3.0 * sqrt(3.0) * sqrt(b ** 4 + 11.0 * b ** 2 - 1.0))
    x = (b + (3.0 + b ** 2) / D0 + D0) / 3.0
    eta = log(x)
    energy = 2.0 * J_K * cosh(eta) * (1.0 if beta > 0 else -1.0)
    return BoundStateSolution(K=K, eta=eta, energy=energy)


# ---------------------------------------------------------------------------
# bound / scattering classification
# ---------------------------------------------------------------------------

class StateKind(str, Enum):
    BOUND = "bound"
    SCATTERING = "scattering"


@dataclass(frozen=True)
class EigenstateClass:
    """Classification record for one block eigenstate.

    ``tail`` is the relative-amplitude decay measure |phi(L)| / max |phi|;
    ``k`` the real quasi-momentum inferred from the energy when one exists
    inside the band (None otherwise) and ``residual`` its quantization
    defect.  ``ambiguous`` marks states where the decay and quantization
    indicators disagree, so the label is the conservative default rather
    than a confident call.
    """

    energy: float
    label: StateKind
    tail: float
    k: float | None
    residual: float | None
    ambiguous: bool


def classify_eigenstates(block: KBlock, modes: BlockModes | None = None, *,
                         tail_threshold: float = TAIL_THRESHOLD,
                         residual_threshold: float = RESIDUAL_THRESHOLD) -> list[EigenstateClass]:
    """Label the block eigenstates as bound or scattering.

    A state is bound when its relative amplitude has decayed at the far
    point (``tail < tail_threshold``) and no real quasi-momentum explains
    its energy: either the energy lies outside the scattering band
    ``|E| <= 2 |J_K|`` or the inferred ``k = arccos(E / 2 J_K)`` violates
    the quantization condition by more than ``residual_threshold``.
    Everything else is labelled scattering; states whose two indicators
    disagree are flagged ambiguous instead of guessed at.
    """
    if modes is None:
        modes = diagonalize_block(block)
    out = []
    for energy, vec in zip(modes.energies, modes.vectors.T):
        phi = np.abs(relative_amplitudes(block, vec))
        tail = float(phi[-1] / phi.max())
        decays = tail < tail_threshold

        try:
            root = scattering_root_from_energy(block.spec, block.K, float(energy))
        except ValueError:
            # decoupled block or out-of-band energy: no real k exists
            k, residual, quantized = None, None, False
        else:
            k, residual = root.k, root.residual
            quantized = root.residual < residual_threshold

        label = StateKind.BOUND if (decays and not quantized) else StateKind.SCATTERING
        out.append(EigenstateClass(
            energy=float(energy),
            label=label,
            tail=tail,
            k=k,
            residual=residual,
            ambiguous=(decays == quantized),
        ))
    return out


@dataclass(frozen=True)
class SpectrumPoint:
    alpha: int
    K: float
    energy: float
    label: StateKind
    ambiguous: bool


def spectrum_sweep(spec: LatticeSpec, *,
                   tail_threshold: float = TAIL_THRESHOLD,
                   residual_threshold: float = RESIDUAL_THRESHOLD) -> list[SpectrumPoint]:
    """Classified eigenenergies of every momentum block.

    Deterministic ordering: alpha ascending, energy ascending within each
    block.  The concatenation carries exactly the two-particle dimension.
    """
    points = []
    for alpha in range(-spec.L, spec.L + 1):
        block = build_k_block(spec, alpha)
        modes = diagonalize_block(block)
        for record in classify_eigenstates(block, modes,
                                           tail_threshold=tail_threshold,
                                           residual_threshold=residual_threshold):
            points.append(SpectrumPoint(alpha=alpha, K=block.K, energy=record.energy,
                                        label=record.label, ambiguous=record.ambiguous))
    assert len(points) == build_basis(spec).dim
    return points


# ---------------------------------------------------------------------------
# high-precision bound-band minimum (Sturm bisection on the tridiagonal block)
# ---------------------------------------------------------------------------

def _block_tridiagonal_mp(spec: LatticeSpec, alpha: int):
    """Diagonal and off-diagonal of the block in arbitrary precision."""
    n = spec.n_sites
    J_K = -2 * mp.mpf(spec.J) * mp.cos(mp.pi * alpha / n)
    wrap_sign = 1 if spec.statistics is not Statistics.FERMION else -1
    corner = wrap_sign * _parity(alpha) * J_K
    boson = spec.statistics.allows_double_occupancy
    dim = spec.L + 1 if boson else spec.L
    diag = [mp.mpf(0)] * dim
    off = [J_K] * (dim - 1)
    r_one = 1 if boson else 0
    if dim > r_one:
        diag[r_one] += mp.mpf(spec.V)
    diag[dim - 1] += corner
    if boson and dim > 1:
        off[0] = mp.sqrt(2) * J_K
    return diag, off


def _sturm_count(diag, off, lam) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below lam."""
    count = 0
    q = diag[0] - lam
    if q < 0:
        count += 1
    for i in range(1, len(diag)):
        if q == 0:
            q = mp.mpf(10) ** (-mp.mp.dps * 2)
        q = diag[i] - lam - off[i - 1] ** 2 / q
        if q < 0:
            count += 1
    return count


def bound_band_minimum_precise(spec: LatticeSpec, alpha: int, dps: int = 60) -> mp.mpf:
    """Lowest block eigenvalue by Sturm bisection in ``dps``-digit arithmetic.

    The bound-band energies approach their large-ring closed forms
    exponentially fast in the ring size, far below double precision for
    strong coupling, so auditing that convergence needs an eigenvalue
    oracle with controllable accuracy.
    """
    with mp.workdps(dps):
        diag, off = _block_tridiagonal_mp(spec, alpha)
        radius = max(abs(d) for d in diag) + 2 * sum(abs(e) for e in off) + 1
        lo, hi = -radius, radius
        tol = mp.mpf(10) ** (-(dps - 5))
        while hi - lo > tol * max(1, abs(lo)):
            mid = (lo + hi) / 2
            if _sturm_count(diag, off, mid) >= 1:
                hi = mid
            else:
                lo = mid
        return (lo + hi) / 2
