"""Two-particle lattice model: Hilbert space, Hamiltonians, and exact mappings.

Everything here describes two indistinguishable walkers on a ring of
``n_sites = 2L + 1`` sites labelled ``-L ... L`` (periodic, site ``L+1``
is site ``-L``) with nearest-neighbor hopping ``J`` and nearest-neighbor
interaction ``V``:

    H = -J sum_l (a+_l a_{l+1} + h.c.) + V sum_l n_l n_{l+1}

The creation/annihilation algebra is selected by :class:`Statistics`:
bosons commute, fermions anticommute, hard-core bosons commute off-site
and anticommute on-site (double occupancy forbidden).

Matrix construction goes through a tiny second-quantization engine
(:func:`apply_hop`, :func:`pair_state`, :func:`vacuum_projection_row`)
that normal-orders operator strings on the canonical pair basis, so all
exchange and wrap-around signs are computed, never hand-coded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import sqrt

import numpy as np

from .errors import StatisticsError

__all__ = [
    "Statistics",
    "LatticeSpec",
    "TwoParticleBasis",
    "StateVector",
    "AmplitudeMatrix",
    "XxzMapping",
    "WaveguideLayout",
    "build_basis",
    "build_hopping",
    "build_interaction",
    "build_hamiltonian",
    "pair_state",
    "vacuum_projection_row",
    "amplitude_matrix",
    "state_from_amplitudes",
    "map_to_xxz",
    "build_distinguishable_2d",
    "sector_isometry",
]

_SQRT2 = sqrt(2.0)


class Statistics(str, Enum):
    """Exchange statistics of the two walkers."""

    BOSON = "boson"
    FERMION = "fermion"
    HARD_CORE_BOSON = "hcb"

    @property
    def exchange_sign(self) -> int:
        """Sign picked up when the two particle labels are swapped."""
        return -1 if self is Statistics.FERMION else 1

    @property
    def allows_double_occupancy(self) -> bool:
        return self is Statistics.BOSON


@dataclass(frozen=True)
class LatticeSpec:
    """Physical specification of the ring; the single source of model truth.

    Parameters
    ----------
    L : int
        Half-width; the ring has ``n_sites = 2L + 1`` sites labelled -L..L.
    J : float
        Hopping energy, J > 0.  Sets the unit scale (hbar = 1).
    V : float
        Nearest-neighbor interaction energy; the attractive regime is V < 0.
    statistics : Statistics
        Exchange algebra of the two walkers.
    """

    L: int
    J: float
    V: float
    statistics: Statistics

    def __post_init__(self) -> None:
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"half-width L must be a positive integer, got {self.L!r}")
        if not self.J > 0:
            raise ValueError(f"hopping J must be positive, got {self.J!r}")
        if not np.isfinite(self.V):
            raise ValueError(f"interaction V must be finite, got {self.V!r}")
        object.__setattr__(self, "statistics", Statistics(self.statistics))

    @classmethod
    def from_site_count(cls, n_sites: int, J: float, V: float,
                        statistics: Statistics) -> "LatticeSpec":
        if n_sites % 2 != 1 or n_sites < 3:
            raise ValueError(f"site count must be odd and >= 3, got {n_sites}")
        return cls(L=(n_sites - 1) // 2, J=J, V=V, statistics=statistics)

    @property
    def n_sites(self) -> int:
        return 2 * self.L + 1

    @property
    def sites(self) -> range:
        return range(-self.L, self.L + 1)

    def wrap(self, site: int) -> int:
        """Fold a site index back into -L..L (periodic boundary)."""
        return (site + self.L) % self.n_sites - self.L

    def adjacent(self, l1: int, l2: int) -> bool:
        """Whether two sites are nearest neighbors on the ring."""
        return self.wrap(l1 - l2) in (1, -1)


class TwoParticleBasis:
    """Ordered pair basis of the two-particle sector.

    Pairs are enumerated in lexicographic order of (l1, l2) with
    ``l1 <= l2`` for bosons (doubly occupied sites included) and
    ``l1 < l2`` for fermions and hard-core bosons.  ``index_of`` is a
    total bijection onto ``0 .. dim-1``.
    """

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        lo = 0 if spec.statistics.allows_double_occupancy else 1
        pairs = [
            (l1, l2)
            for l1 in spec.sites
            for l2 in range(l1 + lo, spec.L + 1)
        ]
        self.pairs: tuple[tuple[int, int], ...] = tuple(pairs)
        self._index = {p: i for i, p in enumerate(self.pairs)}

    @property
    def dim(self) -> int:
        return len(self.pairs)

    def index_of(self, l1: int, l2: int) -> int:
        try:
            return self._index[(l1, l2)]
        except KeyError:
            raise KeyError(f"({l1}, {l2}) is not a canonical pair of this basis") from None

    def pair(self, index: int) -> tuple[int, int]:
        return self.pairs[index]

    def __len__(self) -> int:
        return self.dim


def build_basis(spec: LatticeSpec) -> TwoParticleBasis:
    """Enumerate the two-particle Hilbert space of ``spec``."""
    return TwoParticleBasis(spec)


@dataclass
class StateVector:
    """Two-particle state expanded over the canonical pair basis."""

    basis: TwoParticleBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.basis.dim,):
            raise ValueError(f"amplitude vector has shape {amp.shape}, expected ({self.basis.dim},)")
        self.amplitudes = amp

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes / self.norm())


@dataclass
class AmplitudeMatrix:
    """Pair-annihilation amplitudes C[l1, l2] = <0| a_{l2} a_{l1} |Psi>.

    Stored as an ``n_sites x n_sites`` complex matrix indexed by site
    label offset by L (row ``l1 + L``, column ``l2 + L``).  Symmetric for
    bosons and hard-core bosons, antisymmetric for fermions; the diagonal
    carries ``sqrt(2) * psi_ll`` for bosons and vanishes otherwise.  For a
    normalized state the total weight ``sum |C|^2`` equals 2.
    """

    spec: LatticeSpec
    entries: np.ndarray

    def total_weight(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def __getitem__(self, sites: tuple[int, int]) -> complex:
        l1, l2 = sites
        L = self.spec.L
        return self.entries[l1 + L, l2 + L]


# ---------------------------------------------------------------------------
# second-quantization engine on the two-particle sector
# ---------------------------------------------------------------------------

def _annihilate(stats: Statistics, pair: tuple[int, int], site: int) -> list[tuple[float, int]]:
    """Apply a_site to the normalized ket |l1, l2>; return (coeff, survivor)."""
    l1, l2 = pair
    if l1 == l2:
        # normalized doublon (bosons only): a_l (a+_l)^2 |0> / sqrt2 = sqrt2 a+_l |0>
        return [(_SQRT2, l1)] if site == l1 else []
    out = []
    if site == l1:
        out.append((1.0, l2))
    if site == l2:
        # a_{l2} must pass a+_{l1} first; only fermions pick up a sign
        out.append((-1.0 if stats is Statistics.FERMION else 1.0, l1))
    return out


def _create(stats: Statistics, site: int, survivor: int) -> tuple[float, tuple[int, int]] | None:
    """Apply a+_site to |survivor>; return (coeff, canonical pair) or None."""
    if site == survivor:
        if stats is not Statistics.BOSON:
            return None  # Pauli / hard-core exclusion
        return _SQRT2, (site, site)  # (a+_l)^2 |0> = sqrt2 |l, l>
    if site < survivor:
        return 1.0, (site, survivor)
    sign = -1.0 if stats is Statistics.FERMION else 1.0
    return sign, (survivor, site)


def apply_hop(basis: TwoParticleBasis, dst: int, src: int,
              index: int) -> list[tuple[float, int]]:
    """Apply a+_dst a_src to basis ket ``index``; return (coeff, ket index) terms."""
    stats = basis.spec.statistics
    out = []
    for c1, survivor in _annihilate(stats, basis.pair(index), src):
        created = _create(stats, dst, survivor)
        if created is not None:
            c2, pair = created
            out.append((c1 * c2, basis.index_of(*pair)))
    return out


def pair_state(basis: TwoParticleBasis, l1: int, l2: int) -> np.ndarray:
    """Normalized state vector of a+_{l1} a+_{l2} |0>, including the creation-order sign.

    For fermions with l1 > l2 the canonical ket appears with a minus sign;
    for excluded configurations (same site, non-boson) the zero vector is
    returned.
    """
    stats = basis.spec.statistics
    vec = np.zeros(basis.dim)
    if l1 == l2:
        if stats is Statistics.BOSON:
            vec[basis.index_of(l1, l2)] = 1.0
        return vec
    a, b = (l1, l2) if l1 < l2 else (l2, l1)
    sign = 1.0
    if stats is Statistics.FERMION and l1 > l2:
        sign = -1.0
    vec[basis.index_of(a, b)] = sign
    return vec


def vacuum_projection_row(basis: TwoParticleBasis, l1: int, l2: int) -> np.ndarray:
    """Row vector of <0| a_{l2} a_{l1} |pair_i> over the basis.

    Contracting a state's amplitudes with this row yields the
    amplitude-matrix entry C[l1, l2] by pure operator algebra.
    """
    row = np.zeros(basis.dim)
    for i in range(basis.dim):
        for coeff, survivor in _annihilate(basis.spec.statistics, basis.pair(i), l1):
            if survivor == l2:
                row[i] += coeff
    return row


# ---------------------------------------------------------------------------
# Hamiltonian builders
# ---------------------------------------------------------------------------

def build_hopping(spec: LatticeSpec) -> np.ndarray:
    """Kinetic part -J sum_l (a+_l a_{l+1} + h.c.) on the two-particle sector."""
    basis = build_basis(spec)
    H = np.zeros((basis.dim, basis.dim))
    for i in range(basis.dim):
        for l in spec.sites:
            r = spec.wrap(l + 1)
            for dst, src in ((l, r), (r, l)):
                for coeff, j in apply_hop(basis, dst, src, i):
                    H[j, i] += -spec.J * coeff
    return H


def build_interaction(spec: LatticeSpec) -> np.ndarray:
    """Interaction part V sum_l n_l n_{l+1}; diagonal in the pair basis."""
    basis = build_basis(spec)
    diag = np.array([
        spec.V if spec.adjacent(l1, l2) else 0.0
        for (l1, l2) in basis.pairs
    ])
    return np.diag(diag)


def build_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """Full two-particle Hamiltonian matrix (real symmetric, dim x dim)."""
    return build_hopping(spec) + build_interaction(spec)


# ---------------------------------------------------------------------------
# amplitude matrix
# ---------------------------------------------------------------------------

def amplitude_matrix(state: StateVector) -> AmplitudeMatrix:
    """Assemble C[l1, l2] = <0| a_{l2} a_{l1} |Psi> from pair amplitudes.

    C inherits the exchange symmetry of the statistics and satisfies
    ``psi_{l1 l2} = C_{l1 l2} (1 + delta_{l1 l2})^{-1/2}`` on canonical pairs.
    """
    spec = state.basis.spec
    L = spec.L
    sign = spec.statistics.exchange_sign
    C = np.zeros((spec.n_sites, spec.n_sites), dtype=complex)
    for psi, (l1, l2) in zip(state.amplitudes, state.basis.pairs):
        if l1 == l2:
            C[l1 + L, l1 + L] = _SQRT2 * psi
        else:
            C[l1 + L, l2 + L] = psi
            C[l2 + L, l1 + L] = sign * psi
    return AmplitudeMatrix(spec, C)


def state_from_amplitudes(basis: TwoParticleBasis, amplitudes: AmplitudeMatrix | np.ndarray) -> StateVector:
    """Inverse of :func:`amplitude_matrix`; reads canonical entries of C."""
    C = amplitudes.entries if isinstance(amplitudes, AmplitudeMatrix) else np.asarray(amplitudes)
    L = basis.spec.L
    psi = np.empty(basis.dim, dtype=complex)
    for i, (l1, l2) in enumerate(basis.pairs):
        scale = 1.0 / _SQRT2 if l1 == l2 else 1.0
        psi[i] = scale * C[l1 + L, l2 + L]
    return StateVector(basis, psi)


# ---------------------------------------------------------------------------
# XXZ two-magnon mapping (hard-core bosons only)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class XxzMapping:
    """Spin-chain image of the hard-core model.

    ``matrix`` is the two-magnon sector of the XXZ chain

        H = -J_ex sum_l (Sx Sx + Sy Sy + Delta Sz Sz) + h_z sum_l Sz

    built directly from spin operator algebra.  It equals the hard-core
    two-particle matrix plus ``energy_offset`` times the identity; the
    offset comes out of the Sz -> n - 1/2 rewriting and is computed from
    the two constructions, not assumed.
    """

    J_ex: float
    Delta: float
    h_z: float
    matrix: np.ndarray = field(repr=False)
    energy_offset: float


def _two_magnon_xxz(spec: LatticeSpec, J_ex: float, Delta: float, h_z: float) -> np.ndarray:
    """Two-magnon block of the XXZ chain over up-spin pairs (l1 < l2)."""
    basis = build_basis(spec)  # hard-core pairs double as magnon positions
    n = spec.n_sites
    H = np.zeros((basis.dim, basis.dim))
    for i, (l1, l2) in enumerate(basis.pairs):
        up = {l1, l2}
        # Ising part: sum over ring bonds of Sz Sz for this configuration
        szsz = 0.0
        for l in spec.sites:
            s_here = 0.5 if l in up else -0.5
            s_next = 0.5 if spec.wrap(l + 1) in up else -0.5
            szsz += s_here * s_next
        H[i, i] += -J_ex * Delta * szsz + h_z * (2 - n / 2.0)
        # transverse part: -J_ex/2 (S+ S- + S- S+) moves one up spin
        for src, other in ((l1, l2), (l2, l1)):
            for step in (1, -1):
                dst = spec.wrap(src + step)
                if dst == other:
                    continue
                a, b = (dst, other) if dst < other else (other, dst)
                H[basis.index_of(a, b), i] += -J_ex / 2.0
    return H


def map_to_xxz(spec: LatticeSpec) -> XxzMapping:
    """Map the hard-core model onto the XXZ Heisenberg chain.

    Returns exchange coupling ``J_ex = 2J``, anisotropy ``Delta = -V/(2J)``,
    field ``h_z = V``, the two-magnon XXZ matrix, and the uniform energy
    offset separating it from the hard-core two-particle matrix.
    """
    if spec.statistics is not Statistics.HARD_CORE_BOSON:
        raise StatisticsError(
            f"XXZ mapping is defined for hard-core bosons, not {spec.statistics.value}")
    J_ex = 2.0 * spec.J
    Delta = -spec.V / (2.0 * spec.J)
    h_z = spec.V
    H_xxz = _two_magnon_xxz(spec, J_ex, Delta, h_z)
    H_hcb = build_hamiltonian(spec)
    offset = float(np.trace(H_xxz) - np.trace(H_hcb)) / H_hcb.shape[0]
    return XxzMapping(J_ex=J_ex, Delta=Delta, h_z=h_z, matrix=H_xxz, energy_offset=offset)


# ---------------------------------------------------------------------------
# distinguishable 2D lattice (waveguide-array picture)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveguideLayout:
    """Planar array realizing the two-particle walk as single-particle motion.

    One waveguide per amplitude E_{l1 l2}; nearest-neighbor couplings -J on
    the torus and detuning V on the sites with |l1 - l2| = 1 (mod ring).
    Bosonic arrays keep the main-diagonal guides (l, l); fermionic and
    hard-core arrays omit them, which restricts propagation to the
    corresponding exchange sector.
    """

    statistics: Statistics
    n_sites: int
    sites: tuple[tuple[int, int, float], ...]      # (l1, l2, detuning)
    edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]


def build_distinguishable_2d(spec: LatticeSpec) -> tuple[np.ndarray, WaveguideLayout]:
    """Coupled-mode matrix of the full planar array plus its layout description.

    The matrix is always the complete ``n^2 x n^2`` torus (distinguishable
    amplitudes); the layout lists the guides actually fabricated for the
    requested statistics sector.
    """
    n = spec.n_sites
    L = spec.L

    def flat(l1: int, l2: int) -> int:
        return (l1 + L) * n + (l2 + L)

    H = np.zeros((n * n, n * n))
    for l1 in spec.sites:
        for l2 in spec.sites:
            i = flat(l1, l2)
            if spec.adjacent(l1, l2):
                H[i, i] = spec.V
            for d1, d2 in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                j = flat(spec.wrap(l1 + d1), spec.wrap(l2 + d2))
                H[j, i] += -spec.J

    keep_diagonal = spec.statistics.allows_double_occupancy
    site_list = []
    for l1 in spec.sites:
        for l2 in spec.sites:
            if l1 == l2 and not keep_diagonal:
                continue
            site_list.append((l1, l2, spec.V if spec.adjacent(l1, l2) else 0.0))
    kept = {(l1, l2) for (l1, l2, _) in site_list}
    edge_list = []
    for l1 in spec.sites:
        for l2 in spec.sites:
            if (l1, l2) not in kept:
                continue
            for d1, d2 in ((1, 0), (0, 1)):  # each torus edge once
                nb = (spec.wrap(l1 + d1), spec.wrap(l2 + d2))
                if nb in kept:
                    edge_list.append(((l1, l2), nb))
    layout = WaveguideLayout(
        statistics=spec.statistics,
        n_sites=n,
        sites=tuple(site_list),
        edges=tuple(edge_list),
    )
    return H, layout


def sector_isometry(spec: LatticeSpec) -> np.ndarray:
    """Isometry from the two-particle basis into the distinguishable plane.

    Columns are the (anti)symmetrized plane kets matching the statistics:
    ``(|l1 l2> + s |l2 l1>)/sqrt2`` with the exchange sign ``s``, and bare
    ``|l l>`` for bosonic doublons.  Conjugating the planar matrix with
    this isometry reproduces the two-particle Hamiltonian exactly.
    """
    basis = build_basis(spec)
    n = spec.n_sites
    L = spec.L
    sign = spec.statistics.exchange_sign
    Q = np.zeros((n * n, basis.dim))
    for col, (l1, l2) in enumerate(basis.pairs):
        if l1 == l2:
            Q[(l1 + L) * n + (l2 + L), col] = 1.0
        else:
            Q[(l1 + L) * n + (l2 + L), col] = 1.0 / _SQRT2
            Q[(l2 + L) * n + (l1 + L), col] = sign / _SQRT2
    return Q
