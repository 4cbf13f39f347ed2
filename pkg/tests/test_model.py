"""Hilbert space, Hamiltonian construction, amplitude matrices, and exact mappings."""

import numpy as np
import pytest
from itertools import combinations, combinations_with_replacement

from cowalk import (
    LatticeSpec,
    StateVector,
    Statistics,
    amplitude_matrix,
    build_basis,
    build_distinguishable_2d,
    build_hamiltonian,
    map_to_xxz,
    pair_state,
    sector_isometry,
    state_from_amplitudes,
    vacuum_projection_row,
)
from cowalk.errors import StatisticsError

ALL_STATS = (Statistics.BOSON, Statistics.FERMION, Statistics.HARD_CORE_BOSON)
SQRT2 = np.sqrt(2.0)


def spec_for(stats, n=5, J=1.0, V=-1.3):
    return LatticeSpec.from_site_count(n, J=J, V=V, statistics=stats)


# ---------------------------------------------------------------------------
# lattice spec and basis
# ---------------------------------------------------------------------------

def test_spec_validation():
    with pytest.raises(ValueError):
        LatticeSpec(L=0, J=1.0, V=0.0, statistics=Statistics.BOSON)
    with pytest.raises(ValueError):
        LatticeSpec(L=3, J=-1.0, V=0.0, statistics=Statistics.BOSON)
    with pytest.raises(ValueError):
        LatticeSpec.from_site_count(20, J=1.0, V=0.0, statistics=Statistics.BOSON)
    spec = LatticeSpec.from_site_count(21, J=1.0, V=-1.0, statistics="fermion")
    assert spec.L == 10 and spec.n_sites == 21
    assert spec.wrap(11) == -10 and spec.wrap(-11) == 10
    assert spec.adjacent(-10, 10) and not spec.adjacent(-10, 9)


def test_basis_counts():
    assert build_basis(spec_for(Statistics.BOSON, 3)).dim == 6
    assert build_basis(spec_for(Statistics.BOSON, 21)).dim == 231
    assert build_basis(spec_for(Statistics.FERMION, 21)).dim == 210
    assert build_basis(spec_for(Statistics.HARD_CORE_BOSON, 21)).dim == 210


def test_basis_enumeration_lt3_fermion():
    basis = build_basis(spec_for(Statistics.FERMION, 3))
    assert basis.pairs == ((-1, 0), (-1, 1), (0, 1))


@pytest.mark.parametrize("stats", ALL_STATS)
@pytest.mark.parametrize("n", [3, 5, 9])
def test_index_bijection(stats, n):
    basis = build_basis(spec_for(stats, n))
    seen = set()
    for i, (l1, l2) in enumerate(basis.pairs):
        assert basis.index_of(l1, l2) == i
        seen.add(i)
    assert seen == set(range(basis.dim))
    with pytest.raises(KeyError):
        basis.index_of(1, 0)


# ---------------------------------------------------------------------------
# Hamiltonian
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("stats", ALL_STATS)
def test_hamiltonian_exactly_symmetric(stats):
    H = build_hamiltonian(spec_for(stats, 7))
    assert np.array_equal(H, H.T)


def test_interaction_entries():
    spec = spec_for(Statistics.FERMION, 5, V=-2.5)
    basis = build_basis(spec)
    H = build_hamiltonian(spec)
    assert H[basis.index_of(0, 1), basis.index_of(0, 1)] == spec.V
    assert H[basis.index_of(-2, 2), basis.index_of(-2, 2)] == spec.V  # wrap pair
    assert H[basis.index_of(0, 2), basis.index_of(0, 2)] == 0.0


def test_boson_doublon_hop_amplitude():
    spec = spec_for(Statistics.BOSON, 5, J=1.7)
    basis = build_basis(spec)
    H = build_hamiltonian(spec)
    assert H[basis.index_of(0, 1), basis.index_of(0, 0)] == pytest.approx(-SQRT2 * spec.J, abs=1e-15)


@pytest.mark.parametrize("n", [5, 7])
def test_v0_spectrum_separates(n):
    # free walkers: pair sums of the single-particle band over the grid the
    # exchange sector actually quantizes (hard-core pairs live on the
    # half-shifted grid, the Jordan-Wigner boundary term at N = 2)
    cases = [
        (Statistics.BOSON, combinations_with_replacement, 0.0),
        (Statistics.FERMION, combinations, 0.0),
        (Statistics.HARD_CORE_BOSON, combinations, 0.5),
    ]
    for stats, combine, shift in cases:
        spec = spec_for(stats, n, V=0.0)
        got = np.sort(np.linalg.eigvalsh(build_hamiltonian(spec)))
        singles = -2.0 * spec.J * np.cos(2.0 * np.pi * (np.arange(n) + shift) / n)
        want = np.sort([a + b for a, b in combine(singles, 2)])
        np.testing.assert_allclose(got, want, atol=1e-12)


def test_pair_state_wrap_sign():
    spec = spec_for(Statistics.FERMION, 5)
    basis = build_basis(spec)
    vec = pair_state(basis, 2, -2)  # creation across the seam reorders once
    assert vec[basis.index_of(-2, 2)] == -1.0
    assert np.count_nonzero(vec) == 1
    hcb = build_basis(spec_for(Statistics.HARD_CORE_BOSON, 5))
    assert pair_state(hcb, 2, -2)[hcb.index_of(-2, 2)] == 1.0


# ---------------------------------------------------------------------------
# amplitude matrix
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("stats", ALL_STATS)
def test_amplitude_matrix_neighbor_pair(stats):
    spec = spec_for(stats, 5)
    basis = build_basis(spec)
    amp = np.zeros(basis.dim, dtype=complex)
    amp[basis.index_of(0, 1)] = 1.0
    C = amplitude_matrix(StateVector(basis, amp))
    assert C[0, 1] == 1.0
    assert C[1, 0] == spec.statistics.exchange_sign
    assert C.total_weight() == pytest.approx(2.0, abs=1e-14)
    entries = C.entries.copy()
    entries[spec.L + 0, spec.L + 1] = entries[spec.L + 1, spec.L + 0] = 0.0
    assert np.all(entries == 0)


def test_amplitude_matrix_doublon_and_fermion_diagonal():
    spec = spec_for(Statistics.BOSON, 5)
    basis = build_basis(spec)
    amp = np.zeros(basis.dim, dtype=complex)
    amp[basis.index_of(0, 0)] = 1.0
    C = amplitude_matrix(StateVector(basis, amp))
    assert C[0, 0] == pytest.approx(SQRT2, abs=1e-15)

    fspec = spec_for(Statistics.FERMION, 5)
    fbasis = build_basis(fspec)
    rng = np.random.default_rng(7)
    psi = rng.normal(size=fbasis.dim) + 1j * rng.normal(size=fbasis.dim)
    Cf = amplitude_matrix(StateVector(fbasis, psi / np.linalg.norm(psi)))
    assert np.max(np.abs(np.diag(Cf.entries))) == 0.0


@pytest.mark.parametrize("stats", ALL_STATS)
def test_amplitude_roundtrip_and_operator_route(stats):
    spec = spec_for(stats, 5)
    basis = build_basis(spec)
    rng = np.random.default_rng(42)
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi /= np.linalg.norm(psi)
    state = StateVector(basis, psi)
    C = amplitude_matrix(state)
    back = state_from_amplitudes(basis, C)
    np.testing.assert_allclose(back.amplitudes, psi, atol=1e-14)
    assert C.total_weight() == pytest.approx(2.0, abs=1e-12)
    # scatter rule agrees with literal <0| a_{l2} a_{l1} |psi>
    for l1, l2 in [(0, 1), (1, 0), (-2, 2), (0, 0), (-1, -1)]:
        algebra = vacuum_projection_row(basis, l1, l2) @ psi
        assert C[l1, l2] == pytest.approx(algebra, abs=1e-14)


# ---------------------------------------------------------------------------
# XXZ mapping
# ---------------------------------------------------------------------------

def test_xxz_parameters():
    mapping = map_to_xxz(spec_for(Statistics.HARD_CORE_BOSON, 7, J=1.0, V=-2.0))
    assert mapping.J_ex == 2.0
    assert mapping.Delta == 1.0
    assert mapping.h_z == -2.0


def test_xxz_experimental_anisotropy():
    spec = spec_for(Statistics.HARD_CORE_BOSON, 21, J=1.0, V=-2.0 * 0.986)
    assert map_to_xxz(spec).Delta == pytest.approx(0.986, abs=1e-15)


def test_xxz_spectrum_offset():
    spec = spec_for(Statistics.HARD_CORE_BOSON, 7, V=-2.0)
    mapping = map_to_xxz(spec)
    H = build_hamiltonian(spec)
    diff = np.sort(np.linalg.eigvalsh(mapping.matrix)) - np.sort(np.linalg.eigvalsh(H))
    assert diff.max() - diff.min() < 1e-10
    assert mapping.energy_offset == pytest.approx(-spec.V * spec.n_sites / 4.0, abs=1e-12)
    # the two constructions agree operator by operator, not just in spectrum
    np.testing.assert_allclose(
        mapping.matrix, H + mapping.energy_offset * np.eye(H.shape[0]), atol=1e-13)


@pytest.mark.parametrize("stats", [Statistics.BOSON, Statistics.FERMION])
def test_xxz_rejects_non_hardcore(stats):
    with pytest.raises(StatisticsError):
        map_to_xxz(spec_for(stats, 5))


# ---------------------------------------------------------------------------
# distinguishable planar lattice
# ---------------------------------------------------------------------------

def test_planar_detunings():
    spec = spec_for(Statistics.BOSON, 5, V=-3.0)
    H2d, layout = build_distinguishable_2d(spec)
    n, L = spec.n_sites, spec.L
    assert H2d[(0 + L) * n + (1 + L), (0 + L) * n + (1 + L)] == spec.V
    assert H2d[(0 + L) * n + (2 + L), (0 + L) * n + (2 + L)] == 0.0
    detuned = {(l1, l2) for (l1, l2, det) in layout.sites if det != 0.0}
    assert detuned == {(l1, l2) for l1 in spec.sites for l2 in spec.sites
                       if spec.adjacent(l1, l2)}


@pytest.mark.parametrize("stats", ALL_STATS)
def test_planar_sector_reproduces_two_particle_matrix(stats):
    spec = spec_for(stats, 5)
    H2d, _ = build_distinguishable_2d(spec)
    Q = sector_isometry(spec)
    np.testing.assert_allclose(Q.T @ H2d @ Q, build_hamiltonian(spec), atol=1e-13)


def test_layout_sites_and_edges():
    boson = build_distinguishable_2d(spec_for(Statistics.BOSON, 21))[1]
    fermion = build_distinguishable_2d(spec_for(Statistics.FERMION, 21))[1]
    assert len(boson.sites) == 441 and len(boson.edges) == 2 * 441
    assert len(fermion.sites) == 441 - 21
    assert len(fermion.edges) == 2 * 21 * (21 - 2)
    only_in_boson = ({(l1, l2) for (l1, l2, _) in boson.sites}
                     - {(l1, l2) for (l1, l2, _) in fermion.sites})
    assert only_in_boson == {(l, l) for l in range(-10, 11)}
