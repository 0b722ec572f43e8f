"""Structure-preserving model order reduction for dissipative systems.

The package closes linearly damped Hamiltonian dynamics into a canonical
Hamiltonian system with memory (a Volterra constraint on an auxiliary
co-state), integrates it with a structure-preserving splitting scheme,
reduces it on ortho-symplectic bases, and benchmarks the result against
symplectic and unstructured Galerkin baselines.
"""

from .benchmarks import (Benchmark, LadderConfig, SineGordonConfig,
                         WaveConfig, benchmark_names, build_benchmark,
                         build_oscillator, kink_profile, make_config,
                         oscillator_exact, skew_to_canonical, spline_bump)
from .dynamics import (DissipativeModel, ExtendedState, NonFiniteError,
                       RunReport, StringAccumulator, TddSystem, VerletStepper,
                       cholesky_factor, extended_hamiltonian,
                       initial_extended_state, integrate,
                       integrate_dissipative, integrate_rk4,
                       passivity_residual, solve_auxiliary, symmetric_sqrt)
from .reduction import (PodModel, ReducedDissipative, ReducedTdd,
                        TrajectoryError, l2_error, pod_baseline, psd_baseline,
                        rdh_reduce, reconstruct, spectral_abscissa,
                        symplectic_galerkin)
from .symplectic import (CanonicalForm, DegenerateVector, GreedyResult,
                         OrthoSymplecticBasis, SnapshotSet, cotangent_lift,
                         greedy_basis, pod_basis, random_ortho_symplectic,
                         singular_value_report, symplectic_gram_schmidt,
                         symplectic_inverse)

__version__ = "0.1.0"

__all__ = [
    "Benchmark",
    "CanonicalForm",
    "DegenerateVector",
    "DissipativeModel",
    "ExtendedState",
    "GreedyResult",
    "LadderConfig",
    "NonFiniteError",
    "OrthoSymplecticBasis",
    "PodModel",
    "ReducedDissipative",
    "ReducedTdd",
    "RunReport",
    "SineGordonConfig",
    "SnapshotSet",
    "StringAccumulator",
    "TddSystem",
    "TrajectoryError",
    "VerletStepper",
    "WaveConfig",
    "benchmark_names",
    "build_benchmark",
    "build_oscillator",
    "cholesky_factor",
    "cotangent_lift",
    "extended_hamiltonian",
    "greedy_basis",
    "initial_extended_state",
    "integrate",
    "integrate_dissipative",
    "integrate_rk4",
    "kink_profile",
    "l2_error",
    "make_config",
    "oscillator_exact",
    "passivity_residual",
    "pod_baseline",
    "pod_basis",
    "psd_baseline",
    "random_ortho_symplectic",
    "rdh_reduce",
    "reconstruct",
    "singular_value_report",
    "skew_to_canonical",
    "solve_auxiliary",
    "spectral_abscissa",
    "spline_bump",
    "symmetric_sqrt",
    "symplectic_galerkin",
    "symplectic_gram_schmidt",
    "symplectic_inverse",
    "__version__",
]
