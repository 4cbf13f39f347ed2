"""Command-line interface and deterministic serialization.

Subcommands
-----------
spectrum          classified two-particle spectrum over all momentum blocks
walk              time series of position/momentum correlations
cowalk            co-walking speeds, full vs effective dynamics, speed ratios
effective         effective-model spectrum comparison and composite dynamics
export-waveguide  planar waveguide-array layout realizing the walk
verify            run the end-to-end verification suite

All data files are byte-reproducible for a given configuration: floats
are printed with 17 significant digits, orderings are fixed, and nothing
time- or host-dependent is written.  Exit codes: 0 success, 2 invalid
configuration, 3 numerical guard tripped (boundary contamination, no
bound state, ...).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__, blochsolve, dynamics, effective, model, verify
from .errors import (
    BoundBandGapError,
    BoundaryContaminationError,
    DegenerateDenominatorError,
    InsufficientPointsError,
    InvalidRegimeError,
    NoBoundStateError,
)
from .model import LatticeSpec, Statistics

GUARD_ERRORS = (
    BoundBandGapError,
    BoundaryContaminationError,
    DegenerateDenominatorError,
    InsufficientPointsError,
    InvalidRegimeError,
    NoBoundStateError,
)
EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3


def fmt(x: float) -> str:
    """17-significant-digit decimal form; round-trips IEEE doubles exactly."""
    x = float(x) + 0.0  # normalize negative zero
    return format(x, ".17g")


@dataclass
class RunConfig:
    """Run configuration; file values are overridden by explicit flags."""

    n_sites: int = 21
    J: float = 1.0
    V: float = -1.0
    statistics: str = "boson"
    initial: tuple[int, int] = (0, 1)
    t_start: float = 0.0
    t_end: float = 4.0
    n_samples: int = 41
    tail_threshold: float = blochsolve.TAIL_THRESHOLD
    cone_threshold: float = dynamics.CONE_THRESHOLD
    boson_n_sites: int = 41
    out_dir: str = "."
    fmt: str = "csv"
    normalize: bool = False
    allow_boundary: bool = False

    def validate(self) -> None:
        if self.n_sites % 2 != 1 or self.n_sites < 3:
            raise ValueError(f"--Lt must be odd and >= 3, got {self.n_sites}")
        if self.boson_n_sites % 2 != 1 or self.boson_n_sites < 3:
            raise ValueError(f"--boson-Lt must be odd and >= 3, got {self.boson_n_sites}")
        if self.J <= 0:
            raise ValueError(f"--J must be positive, got {self.J}")
        Statistics(self.statistics)  # raises ValueError on bad name
        if self.n_samples < 2:
            raise ValueError(f"--samples must be >= 2, got {self.n_samples}")
        if not (self.t_end > self.t_start >= 0.0):
            raise ValueError(f"need t_end > t_start >= 0, got [{self.t_start}, {self.t_end}]")
        if not 0.0 < self.cone_threshold < 1.0:
            raise ValueError(f"--cone-threshold must lie in (0, 1), got {self.cone_threshold}")
        if not 0.0 < self.tail_threshold < 1.0:
            raise ValueError(f"--tail-threshold must lie in (0, 1), got {self.tail_threshold}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"--format must be csv or json, got {self.fmt}")

    def spec(self, n_sites: int | None = None, statistics: str | None = None) -> LatticeSpec:
        return LatticeSpec.from_site_count(
            n_sites if n_sites is not None else self.n_sites,
            J=self.J, V=self.V,
            statistics=Statistics(statistics if statistics is not None else self.statistics))

    def energy_unit(self) -> float:
        return self.J if self.normalize else 1.0

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)


def _merge_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(RunConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "initial" in raw:
            raw["initial"] = tuple(raw["initial"])
        config = replace(config, **raw)
    for name in (f.name for f in fields(RunConfig)):
        value = getattr(args, name, None)
        if value is not None:
            if name == "initial":
                value = tuple(value)
            config = replace(config, **{name: value})
    config.validate()
    return config


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_table(out_dir: Path, name: str, header: list[str],
                 rows: list[list], fmt_kind: str) -> Path:
    """Emit one table as CSV or as a JSON row list, fixed order and formatting."""
    def cell(x):
        return fmt(x) if isinstance(x, float) else str(x)

    if fmt_kind == "csv":
        path = out_dir / f"{name}.csv"
        lines = [",".join(header)]
        lines += [",".join(cell(x) for x in row) for row in rows]
        _write(path, "\n".join(lines) + "\n")
    else:
        path = out_dir / f"{name}.json"
        payload = {"columns": header,
                   "rows": [[json.loads(cell(x)) if isinstance(x, float) else x
                             for x in row] for row in rows]}
        _write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _write_meta(out_dir: Path, command: str, config: RunConfig, extra: dict | None = None) -> None:
    meta = {
        "command": command,
        "package": "cowalk",
        "version": __version__,
        "config": asdict(config),
        "energy_unit": "J" if config.normalize else "absolute",
    }
    if extra:
        meta.update(extra)
    _write(out_dir / "meta.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(config: RunConfig) -> int:
    spec = config.spec()
    points = blochsolve.spectrum_sweep(spec, tail_threshold=config.tail_threshold)
    unit = config.energy_unit()
    rows = [[p.alpha, float(p.K), float(p.energy / unit), p.label.value] for p in points]
    out_dir = Path(config.out_dir)
    _write_table(out_dir, "spectrum", ["alpha", "K", "energy", "label"], rows, config.fmt)
    _write_meta(out_dir, "spectrum", config, {"n_states": len(rows)})
    return EXIT_OK


def cmd_walk(config: RunConfig) -> int:
    spec = config.spec()
    series = dynamics.walk_series(spec, config.initial, config.times())
    contact = dynamics.boundary_contact_time(series)
    if contact is not None and not config.allow_boundary:
        raise dynamics.BoundaryContaminationError(
            f"walkers reach the lattice edge at t = {contact:.6g}; "
            f"shorten the window or pass --allow-boundary")
    L = spec.L
    pos_rows, mom_rows = [], []
    for corr_p, corr_m in zip(series.position, series.momentum):
        for q in spec.sites:
            for r in spec.sites:
                pos_rows.append([float(corr_p.time), q, r, float(corr_p.entries[q + L, r + L])])
        for a in spec.sites:
            for b in spec.sites:
                mom_rows.append([float(corr_m.time), a, b, float(corr_m.entries[a + L, b + L])])
    out_dir = Path(config.out_dir)
    _write_table(out_dir, "position", ["t", "q", "r", "gamma"], pos_rows, config.fmt)
    _write_table(out_dir, "momentum", ["t", "alpha", "beta", "gamma"], mom_rows, config.fmt)
    _write_meta(out_dir, "walk", config, {
        "initial_pair": list(series.initial_pair),
        "boundary_contact_time": contact,
    })
    return EXIT_OK


def _cowalk_one(config: RunConfig, statistics: Statistics) -> dict:
    n_sites = config.boson_n_sites if statistics is Statistics.BOSON else config.n_sites
    spec = config.spec(n_sites=n_sites, statistics=statistics.value)
    eff = effective.build_effective_model(spec)
    # window sized so the front crosses d_target bonds but not the guard bond:
    # scaled arrival times 2|J_eff| t sit near 1.05 d - 0.6, so d + 0.4 lands
    # between consecutive arrivals
    d_target = min(6, spec.L - 2)
    t_end = (d_target + 0.4) / (2.0 * abs(eff.J_eff))
    times = np.linspace(0.0, t_end, 561)

    prop = dynamics.build_propagator(spec)
    state0 = dynamics.prepare_initial(spec, 0, 1)
    bonds = np.empty((len(times), spec.n_sites))
    for i, t in enumerate(times):
        state = dynamics.evolve(prop, state0, float(t))
        bonds[i] = dynamics.minor_diagonal(spec, dynamics.correlation_position(state).entries)
    fit_full = dynamics.cone_speed(spec, times, bonds, threshold=config.cone_threshold)

    probs = effective.evolve_effective(eff, 0, times)
    fit_eff = dynamics.cone_speed(spec, times, probs, threshold=config.cone_threshold)

    # agreement between bound-band-projected full dynamics and the composite model
    band = effective.bound_band_indices(prop.energies, spec.n_sites)
    coeffs = prop.modes.T.conj() @ state0.amplitudes
    c_band = coeffs[band]
    c_band = c_band / np.linalg.norm(c_band)
    l1_max = 0.0
    for i, t in enumerate(times[::20]):
        psi = prop.modes[:, band] @ (np.exp(-1j * prop.energies[band] * float(t)) * c_band)
        gb = dynamics.minor_diagonal(
            spec, dynamics.correlation_position(model.StateVector(state0.basis, psi)).entries)
        l1_max = max(l1_max, float(np.sum(np.abs(gb - probs[i * 20]))))

    unit = config.energy_unit()
    return {
        "statistics": statistics.value,
        "n_sites": spec.n_sites,
        "J_eff": eff.J_eff / unit,
        "mu_eff": eff.mu_eff / unit,
        "window": [0.0, t_end],
        "speed_full": fit_full.speed,
        "speed_effective": fit_eff.speed,
        "arrival_times": {str(d): t for d, t in sorted(fit_full.arrival_times.items())},
        "l1_distance_max": l1_max,
    }


def cmd_cowalk(config: RunConfig) -> int:
    results = {s.value: _cowalk_one(config, s) for s in
               (Statistics.BOSON, Statistics.FERMION, Statistics.HARD_CORE_BOSON)}
    vb = results["boson"]["speed_full"]
    vf = results["fermion"]["speed_full"]
    vh = results["hcb"]["speed_full"]
    report = {
        "per_statistics": results,
        "speed_ratio_boson_over_fermion": vb / vf,
        "speed_ratio_boson_over_hcb": vb / vh,
        "fermion_hcb_relative_mismatch": abs(vf - vh) / vf,
    }
    out_dir = Path(config.out_dir)
    _write(out_dir / "cowalk.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_meta(out_dir, "cowalk", config)
    return EXIT_OK


def cmd_effective(config: RunConfig) -> int:
    spec = config.spec()
    eff = effective.build_effective_model(spec)
    unit = config.energy_unit()
    spectrum_rows = []
    for alpha in range(-spec.L, spec.L + 1):
        block = blochsolve.build_k_block(spec, alpha)
        e_exact = float(np.linalg.eigvalsh(block.matrix)[0])
        e_eff = effective.effective_spectrum(eff, block.K)
        spectrum_rows.append([float(block.K), e_eff / unit, e_exact / unit,
                              abs(e_eff - e_exact) / unit])
    probs = effective.evolve_effective(eff, 0, config.times())
    dyn_rows = []
    for qi, q in enumerate(spec.sites):
        for ti, t in enumerate(config.times()):
            dyn_rows.append([q, float(t), float(probs[ti, qi])])
    out_dir = Path(config.out_dir)
    _write_table(out_dir, "effective_spectrum", ["K", "E_eff", "E_exact", "abs_err"],
                 spectrum_rows, config.fmt)
    _write_table(out_dir, "effective_dynamics", ["q", "t", "prob"], dyn_rows, config.fmt)
    _write_meta(out_dir, "effective", config,
                {"J_eff": eff.J_eff / unit, "mu_eff": eff.mu_eff / unit})
    return EXIT_OK


def cmd_export_waveguide(config: RunConfig) -> int:
    spec = config.spec()
    _, layout = model.build_distinguishable_2d(spec)
    out_dir = Path(config.out_dir)
    if config.fmt == "csv":
        site_rows = [[l1, l2, float(det)] for (l1, l2, det) in layout.sites]
        edge_rows = [[a[0], a[1], b[0], b[1]] for (a, b) in layout.edges]
        _write_table(out_dir, "waveguide_sites", ["l1", "l2", "detuning"], site_rows, "csv")
        _write_table(out_dir, "waveguide_edges", ["l1_from", "l2_from", "l1_to", "l2_to"],
                     edge_rows, "csv")
    else:
        payload = {
            "statistics": layout.statistics.value,
            "n_sites": layout.n_sites,
            "sites": [{"l1": l1, "l2": l2, "detuning": det} for (l1, l2, det) in layout.sites],
            "edges": [{"from": list(a), "to": list(b)} for (a, b) in layout.edges],
        }
        _write(out_dir / "waveguide.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_meta(out_dir, "export-waveguide", config, {
        "n_waveguides": len(layout.sites),
        "n_couplings": len(layout.edges),
    })
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    numbers = None
    if args.criteria:
        numbers = [int(x) for x in args.criteria.split(",")]
    results = verify.run_criteria(numbers)
    for result in results:
        print(result.line())
    if args.out:
        payload = [{"criterion": r.number, "title": r.title, "passed": r.passed,
                    "detail": r.detail, "elapsed_seconds": round(r.elapsed, 3)}
                   for r in results]
        _write(Path(args.out) / "verify.json", json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--Lt", dest="n_sites", type=int, help="site count (odd)")
    parser.add_argument("--J", dest="J", type=float, help="hopping energy (> 0)")
    parser.add_argument("--V", dest="V", type=float, help="nearest-neighbor interaction")
    parser.add_argument("--stats", dest="statistics", choices=[s.value for s in Statistics],
                        help="exchange statistics")
    parser.add_argument("--out", dest="out_dir", help="output directory")
    parser.add_argument("--format", dest="fmt", choices=["csv", "json"], help="data file format")
    parser.add_argument("--normalize", dest="normalize", action="store_const", const=True,
                        help="print energies in units of J")
    parser.add_argument("--config", help="JSON file with RunConfig fields (flags override)")


def _add_time_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-start", dest="t_start", type=float, help="window start (units 1/J)")
    parser.add_argument("--t-end", dest="t_end", type=float, help="window end (units 1/J)")
    parser.add_argument("--samples", dest="n_samples", type=int, help="number of time samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cowalk",
        description="Two interacting quantum walkers on a ring: spectra, correlations, co-walking.")
    parser.add_argument("--version", action="version", version=f"cowalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="classified spectrum over all momentum blocks")
    _add_common(p)
    p.add_argument("--tail-threshold", dest="tail_threshold", type=float,
                   help="bound-state tail threshold for classification")

    p = sub.add_parser("walk", help="correlation time series of one walk")
    _add_common(p)
    _add_time_grid(p)
    p.add_argument("--initial", dest="initial", type=int, nargs=2, metavar=("L1", "L2"),
                   help="initial walker sites (default 0 1)")
    p.add_argument("--allow-boundary", dest="allow_boundary", action="store_const", const=True,
                   help="keep time windows that touch the lattice edge")

    p = sub.add_parser("cowalk", help="co-walking speeds and effective-model agreement")
    _add_common(p)
    p.add_argument("--boson-Lt", dest="boson_n_sites", type=int,
                   help="site count for the (faster) bosonic run")
    p.add_argument("--cone-threshold", dest="cone_threshold", type=float,
                   help="arrival threshold for the front fit")

    p = sub.add_parser("effective", help="effective spectrum comparison and composite dynamics")
    _add_common(p)
    _add_time_grid(p)

    p = sub.add_parser("export-waveguide", help="planar waveguide-array layout")
    _add_common(p)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    p.add_argument("--out", help="directory for verify.json report")

    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "walk": cmd_walk,
    "cowalk": cmd_cowalk,
    "effective": cmd_effective,
    "export-waveguide": cmd_export_waveguide,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    try:
        config = _merge_config(args)
        return COMMANDS[args.command](config)
    except ValueError as exc:  # includes StatisticsError
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GUARD_ERRORS as exc:
        print(f"error: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
