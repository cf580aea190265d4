"""Eigenvalue filtering by randomized controlled evolution on Zeeman models.

The package splits into a dense state-vector core (qcore), Hamiltonian
builders with exact spectral evolution (hamiltonian), the filter circuit
itself (engine), closed-form response curves (oracle), a reproducible Monte
Carlo scan harness (rng, scan, dataset), and a CLI (cli).
"""
from .dataset import DatasetFormatError, RideRecord, read_dataset, write_dataset
from .engine import (RideOutcome, RidePlan, bull_cycle, prepare_rider, ride,
                     score_mean, score_product, shot_estimate, success_probability)
from .hamiltonian import (HermitianOperator, SpectralDecomposition, ZeemanParams,
                          evolution_unitary, spectral_decompose, zeeman)
from .oracle import (DosCurve, GaussianTimeParams, SpectralWeights, bell_curve,
                     bell_weights, beta_tau0, dos, dos_compact_tau0, entropy_and_beta,
                     entropy_tau0, g_given_times, gaussian_cosine_average, mean_score,
                     one_spin_curve, one_spin_weights, overlaps_from_state, stderr,
                     two_spin_curve, two_spin_weights, variance_product)
from .qcore import (StateVector, apply_controlled_unitary, apply_phase,
                    apply_single_qubit_gate, basis_state, expect_pauli_z, phase_gate,
                    sample_bitstring, states_equal, tensor, u3)
from .rng import Stream, mix64, probit
from .scan import (Peak, RodeoConfig, ScanResult, aggregate, detect_peaks, run_scan,
                   state_from_descriptor)

__version__ = "0.1.0"
