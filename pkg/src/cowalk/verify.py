"""End-to-end verification suite.

Each criterion below checks one headline property of the package against
an independent route (closed forms against block numerics, operator
algebra against transform formulas, projector algebra against closed
forms, high-precision eigenvalues against perturbative spectra), at fixed
tolerances.  The functions return :class:`CriterionResult` records; the
CLI ``verify`` subcommand and the acceptance test suite both consume
them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import cos, pi

import mpmath as mp
import numpy as np

from . import blochsolve, dynamics, effective, model
from .model import LatticeSpec, Statistics

__all__ = ["CriterionResult", "CRITERIA", "run_criteria"]

ALL_STATISTICS = (Statistics.BOSON, Statistics.FERMION, Statistics.HARD_CORE_BOSON)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number}: {self.title} ({self.elapsed:.2f}s) :: {self.detail}"


def _spec(ratio: float, statistics: Statistics, n_sites: int = 21, J: float = 1.0) -> LatticeSpec:
    """Attractive lattice at interaction-to-bandwidth ratio |V/(2J)|."""
    return LatticeSpec.from_site_count(n_sites, J=J, V=-2.0 * J * ratio, statistics=statistics)


def criterion_1() -> CriterionResult:
    """Bound band matches its closed form for fermions and hard-core bosons."""
    t0 = time.perf_counter()
    worst = 0.0
    for statistics in (Statistics.FERMION, Statistics.HARD_CORE_BOSON):
        spec = _spec(2.0, statistics)
        for alpha in range(-spec.L, spec.L + 1):
            block = blochsolve.build_k_block(spec, alpha)
            numeric = np.linalg.eigvalsh(block.matrix)[0]
            exact = blochsolve.bound_state_energy_fh(spec, block.K).energy
            worst = max(worst, abs(numeric - exact) / abs(exact))
    elapsed = time.perf_counter() - t0
    passed = bool(worst < 1e-5) and elapsed < 1.0
    return CriterionResult(1, "bound-band closed form, |V/2J|=2, 21 sites",
                           passed, f"max relative error {worst:.3e}, limit 1e-05", elapsed)


def _cone_speed_full(spec: LatticeSpec, t_end: float, n_samples: int) -> dynamics.ConeFit:
    times = np.linspace(0.0, t_end, n_samples)
    prop = dynamics.build_propagator(spec)
    state0 = dynamics.prepare_initial(spec, 0, 1)
    bonds = np.empty((len(times), spec.n_sites))
    for i, t in enumerate(times):
        state = dynamics.evolve(prop, state0, float(t))
        bonds[i] = dynamics.minor_diagonal(spec, dynamics.correlation_position(state).entries)
    return dynamics.cone_speed(spec, times, bonds)


def criterion_2() -> CriterionResult:
    """Co-walking speeds: bosons three times faster, fermions = hard-core bosons."""
    t0 = time.perf_counter()
    ratio = 40.0
    fit_f = _cone_speed_full(_spec(ratio, Statistics.FERMION, 21), 280.0, 561)
    fit_h = _cone_speed_full(_spec(ratio, Statistics.HARD_CORE_BOSON, 21), 280.0, 561)
    fit_b = _cone_speed_full(_spec(ratio, Statistics.BOSON, 41), 95.0, 381)
    speed_ratio = fit_b.speed / fit_f.speed
    fh_mismatch = abs(fit_f.speed - fit_h.speed) / fit_f.speed
    elapsed = time.perf_counter() - t0
    passed = bool(2.7 <= speed_ratio <= 3.3 and fh_mismatch < 0.02) and elapsed < 60.0
    detail = (f"boson/fermion speed ratio {speed_ratio:.3f} (band [2.7, 3.3]), "
              f"fermion-vs-hcb mismatch {fh_mismatch * 100:.3f}% (limit 2%)")
    return CriterionResult(2, "3:1 co-walking speed at |V/2J|=40", passed, detail, elapsed)


def criterion_3() -> CriterionResult:
    """Two separated mini-bands at strong coupling, one mixed band at weak."""
    t0 = time.perf_counter()
    gaps = {}
    ok = True
    for statistics in ALL_STATISTICS:
        for ratio, want_gap in ((2.0, True), (0.5, False)):
            points = blochsolve.spectrum_sweep(_spec(ratio, statistics))
            bound = [p.energy for p in points if p.label is blochsolve.StateKind.BOUND]
            scattering = [p.energy for p in points if p.label is blochsolve.StateKind.SCATTERING]
            if not bound:
                ok = False
                gaps[(statistics.value, ratio)] = None
                continue
            gap = min(scattering) - max(bound)
            gaps[(statistics.value, ratio)] = gap
            ok = ok and bool((gap > 0) == want_gap)
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < 1.0
    detail = ", ".join(f"{k[0]}@{k[1]}: gap={v:.3f}" for k, v in gaps.items())
    return CriterionResult(3, "band topology vs interaction strength", passed, detail, elapsed)


def criterion_4() -> CriterionResult:
    """Fermion and hard-core position correlations coincide; momentum ones differ."""
    t0 = time.perf_counter()
    times = np.linspace(0.0, 4.0, 41)
    report = []
    ok = True
    for ratio in (0.0, 0.5, 40.0):
        sf = dynamics.walk_series(_spec(ratio, Statistics.FERMION), (0, 1), times)
        sh = dynamics.walk_series(_spec(ratio, Statistics.HARD_CORE_BOSON), (0, 1), times)
        pos_diff = max(np.max(np.abs(f.entries - h.entries))
                       for f, h in zip(sf.position, sh.position))
        mom_diff = max(np.max(np.abs(f.entries - h.entries))
                       for f, h in zip(sf.momentum, sh.momentum))
        ok = ok and bool(pos_diff < 1e-8 and mom_diff > 0.01)
        report.append(f"|V/2J|={ratio}: max|dGamma_pos|={pos_diff:.3e} (limit 1e-08), "
                      f"max|dGamma_mom|={mom_diff:.4g} (need >0.01)")
    elapsed = time.perf_counter() - t0
    return CriterionResult(4, "fermion-vs-hcb coincidence in position, split in momentum",
                           ok, "; ".join(report), elapsed)


def criterion_5() -> CriterionResult:
    """Momentum-space anti-bunching (fermions) and bunching (bosons) at V = 0."""
    t0 = time.perf_counter()
    times = np.linspace(0.0, 4.0, 17)
    sf = dynamics.walk_series(_spec(0.0, Statistics.FERMION), (0, 1), times)
    sb = dynamics.walk_series(_spec(0.0, Statistics.BOSON), (0, 1), times)
    fermi_diag = max(np.max(np.abs(np.diag(m.entries))) for m in sf.momentum)
    bose_diag_min = min(float(np.trace(m.entries)) for m in sb.momentum)
    elapsed = time.perf_counter() - t0
    passed = bool(fermi_diag < 1e-24 and bose_diag_min > 0.0)
    detail = (f"fermion max diagonal weight {fermi_diag:.2e} (exact zero), "
              f"boson min diagonal sum {bose_diag_min:.4f} (> 0)")
    return CriterionResult(5, "statistics signatures in momentum space", passed, detail, elapsed)


def _operator_correlation(basis: model.TwoParticleBasis, psi: np.ndarray,
                          momentum_space: bool) -> np.ndarray:
    """Two-body expectations from literal operator matrices (oracle route)."""
    spec = basis.spec
    n, L = spec.n_sites, spec.L
    # <0| a_l a_m |pair_i> for every (l, m): vacuum rows by operator algebra
    R = np.empty((n, n, basis.dim))
    for l in spec.sites:
        for m in spec.sites:
            R[l + L, m + L] = model.vacuum_projection_row(basis, m, l)
    out = np.empty((n, n))
    if momentum_space:
        p = 2.0 * np.pi * np.arange(-L, L + 1) / n
        for a in range(n):
            for b in range(n):
                row = np.zeros(basis.dim, dtype=complex)
                for l in spec.sites:
                    for m in spec.sites:
                        row += np.exp(1j * (p[b] * l + p[a] * m)) * R[l + L, m + L]
                row /= n
                amp = row @ psi
                out[a, b] = abs(amp) ** 2
    else:
        for q in range(n):
            for r in range(n):
                amp = R[r, q] @ psi  # <0| a_r a_q |psi>
                out[q, r] = abs(amp) ** 2
    return out


def criterion_6() -> CriterionResult:
    """Oracle equivalences: blocks vs full matrix, operators vs transforms,
    projectors vs closed forms, spin chain vs hard-core model."""
    t0 = time.perf_counter()
    details = []
    ok = True

    # (a) union of momentum-block spectra reproduces the full spectrum
    worst_a = 0.0
    for statistics in ALL_STATISTICS:
        for n_sites in (5, 7, 21):
            spec = _spec(0.65, statistics, n_sites)
            full = np.sort(np.linalg.eigvalsh(model.build_hamiltonian(spec)))
            blocks = np.sort(np.concatenate([
                np.linalg.eigvalsh(blochsolve.build_k_block(spec, a).matrix)
                for a in range(-spec.L, spec.L + 1)]))
            worst_a = max(worst_a, float(np.max(np.abs(full - blocks))))
    ok = ok and bool(worst_a < 1e-10)
    details.append(f"(a) block-vs-full spectra {worst_a:.2e} (limit 1e-10)")

    # (b) correlation formulas vs direct operator expectations
    rng = np.random.default_rng(12345)
    worst_b = 0.0
    for statistics in ALL_STATISTICS:
        spec = _spec(0.65, statistics, 5)
        basis = model.build_basis(spec)
        for _ in range(50):
            psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
            psi /= np.linalg.norm(psi)
            state = model.StateVector(basis, psi)
            gp = dynamics.correlation_position(state).entries
            gm = dynamics.correlation_momentum(state).entries
            worst_b = max(worst_b,
                          float(np.max(np.abs(gp - _operator_correlation(basis, psi, False)))),
                          float(np.max(np.abs(gm - _operator_correlation(basis, psi, True)))))
    ok = ok and bool(worst_b < 1e-12)
    details.append(f"(b) operator oracle {worst_b:.2e} (limit 1e-12)")

    # (c) projector-built effective Hamiltonian equals the closed form
    worst_c = 0.0
    for statistics in ALL_STATISTICS:
        for n_sites in (5, 7, 9):
            spec = _spec(3.0, statistics, n_sites)
            built = effective.build_h2_from_projectors(spec)
            closed = effective.build_effective_model(spec).hamiltonian
            worst_c = max(worst_c, float(np.max(np.abs(built - closed))))
    ok = ok and bool(worst_c < 1e-12)
    details.append(f"(c) projector vs closed form {worst_c:.2e} (limit 1e-12)")

    # (d) XXZ two-magnon sector equals the hard-core matrix up to a constant
    worst_d = 0.0
    for n_sites in (7, 21):
        spec = _spec(1.0, Statistics.HARD_CORE_BOSON, n_sites)
        mapping = model.map_to_xxz(spec)
        diff = (np.sort(np.linalg.eigvalsh(mapping.matrix))
                - np.sort(np.linalg.eigvalsh(model.build_hamiltonian(spec))))
        worst_d = max(worst_d, float(diff.max() - diff.min()))
    ok = ok and bool(worst_d < 1e-10)
    details.append(f"(d) XXZ offset spread {worst_d:.2e} (limit 1e-10)")

    elapsed = time.perf_counter() - t0
    return CriterionResult(6, "oracle equivalence suite", ok, "; ".join(details), elapsed)


def criterion_7() -> CriterionResult:
    """Unitarity, energy conservation, and sum rules out to Jt = 1000."""
    t0 = time.perf_counter()
    times = np.unique(np.concatenate([np.linspace(0.0, 1000.0, 11), [0.5, 1.0, 2.0, 5.0, 50.0]]))
    worst_norm = worst_energy = worst_sum = 0.0
    for statistics in ALL_STATISTICS:
        spec = _spec(0.5, statistics)
        H = model.build_hamiltonian(spec)
        prop = dynamics.build_propagator(spec)
        state0 = dynamics.prepare_initial(spec, 0, 1)
        e0 = float(np.real(state0.amplitudes.conj() @ H @ state0.amplitudes))
        for t in times:
            state = dynamics.evolve(prop, state0, float(t))
            worst_norm = max(worst_norm, abs(state.norm() - 1.0))
            e_t = float(np.real(state.amplitudes.conj() @ H @ state.amplitudes))
            worst_energy = max(worst_energy, abs(e_t - e0))
            worst_sum = max(worst_sum,
                            abs(dynamics.correlation_position(state).total() - 2.0),
                            abs(dynamics.correlation_momentum(state).total() - 2.0))
    elapsed = time.perf_counter() - t0
    passed = bool(worst_norm < 1e-12 and worst_energy < 1e-10 and worst_sum < 1e-10)
    detail = (f"norm drift {worst_norm:.2e} (limit 1e-12), energy drift {worst_energy:.2e} "
              f"(limit 1e-10), sum-rule defect {worst_sum:.2e} (limit 1e-10)")
    return CriterionResult(7, "conservation laws over Jt in [0, 1000]", passed, detail, elapsed)


def criterion_8() -> CriterionResult:
    """Effective spectra converge onto the exact bound band as |V| grows."""
    t0 = time.perf_counter()
    ratios = (5.0, 10.0, 20.0, 40.0)
    ok = True
    report = []
    for statistics in ALL_STATISTICS:
        maxima = []
        for ratio in ratios:
            spec = _spec(ratio, statistics)
            coeff = 12.0 if statistics is Statistics.BOSON else 4.0
            worst = mp.mpf(0)
            with mp.workdps(60):
                for alpha in range(-spec.L, spec.L + 1):
                    exact = blochsolve.bound_band_minimum_precise(spec, alpha, dps=60)
                    eff = (mp.mpf(spec.V)
                           + coeff * mp.mpf(spec.J) ** 2 / spec.V
                           * mp.cos(mp.pi * alpha / spec.n_sites) ** 2)
                    worst = max(worst, abs(exact - eff))
            maxima.append(worst)
        monotone = all(maxima[i] > maxima[i + 1] for i in range(len(maxima) - 1))
        final_ok = bool(maxima[-1] < 1e-3)  # units of J (J = 1 here)
        ok = ok and monotone and final_ok
        report.append(f"{statistics.value}: " +
                      " > ".join(mp.nstr(m, 3) for m in maxima) +
                      (" (monotone)" if monotone else " (NOT monotone)"))
    elapsed = time.perf_counter() - t0
    return CriterionResult(8, "effective-spectrum convergence over |V/2J| in {5,10,20,40}",
                           ok, "; ".join(report), elapsed)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_criteria(numbers: list[int] | None = None) -> list[CriterionResult]:
    selected = sorted(CRITERIA) if numbers is None else sorted(set(numbers))
    results = []
    for number in selected:
        if number not in CRITERIA:
            raise ValueError(f"unknown criterion {number}; available: {sorted(CRITERIA)}")
        results.append(CRITERIA[number]())
    return results
