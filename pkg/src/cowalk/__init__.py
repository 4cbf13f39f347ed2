"""Two-particle continuous-time quantum walks on interacting 1D rings.

Simulation and analysis toolkit for pairs of indistinguishable walkers
(bosons, fermions, hard-core bosons) hopping on a periodic chain with
nearest-neighbor interaction: exact spectra split by total
quasi-momentum, bound/scattering classification with analytic
quantization conditions, correlation dynamics in position and momentum
space, and the second-order composite-particle model whose hopping is
three times larger for bosons than for fermions or hard-core bosons.
"""

__version__ = "0.1.0"

from .blochsolve import (
    BlockModes,
    BoundStateSolution,
    EigenstateClass,
    KBlock,
    ScatteringRoot,
    SpectrumPoint,
    StateKind,
    bound_band_minimum_precise,
    bound_state_energy_fh,
    bound_state_eta_boson,
    build_k_block,
    classify_eigenstates,
    diagonalize_block,
    relative_amplitudes,
    scattering_residual,
    scattering_root_from_energy,
    spectrum_sweep,
)
from .dynamics import (
    ConeFit,
    CorrelationMatrix,
    Propagator,
    WalkSeries,
    boundary_contact_time,
    build_propagator,
    cone_speed,
    correlation_momentum,
    correlation_position,
    evolve,
    minor_diagonal,
    prepare_initial,
    walk_series,
)
from .effective import (
    EffectiveModel,
    bound_band_indices,
    build_effective_model,
    build_h2_from_projectors,
    effective_params,
    effective_spectrum,
    evolve_effective,
)
from .model import (
    AmplitudeMatrix,
    LatticeSpec,
    StateVector,
    Statistics,
    TwoParticleBasis,
    WaveguideLayout,
    XxzMapping,
    amplitude_matrix,
    build_basis,
    build_distinguishable_2d,
    build_hamiltonian,
    build_hopping,
    build_interaction,
    map_to_xxz,
    pair_state,
    sector_isometry,
    state_from_amplitudes,
    vacuum_projection_row,
)

__all__ = [name for name in dir() if not name.startswith("_")]
