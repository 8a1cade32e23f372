"""Mismatch-aware weight and mapping design for current-steering DACs."""
from .metric import (
    ActivationProfile, InputPmf, MetricValue, activation_profile, auto_gaussian_pmf, gaussian_pmf,
    mismatch_mse, optimal_rms, receiver_error, uniform_pmf,
)
from .model import (
    Basis, ConfigError, IncompleteBasisError, InvariantError, MismatchRealization, RepresentationTable,
    SegmentSpec, binary_basis, canonical_mapping, dac_output, load_basis, sample_mismatch, save_basis,
    segmented_basis, thermometer_basis,
)
from .montecarlo import SimConfig, SndrDistribution, run_simulation, sampled_waveform_sndr, sndr_one_realization
from .optimize import (
    AnnealConfig, ArchReport, DescentConfig, OptimizationTrace, anneal_basis, descend_multistart,
    descend_representations, evaluate_architecture,
)
from .repset import RepresentationIndex, RepresentationSet, enumerate_all, is_complete, mean_representation_count

__version__ = "0.1.0"
