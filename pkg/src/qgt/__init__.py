"""Quantum geometric tensors for parametrized families of full-rank density matrices.

The U^N(1) tensor Q = g_FR + g_FS - i*Omega, the Bures metric, parallel
transport, surface phases, quantum volume and numerical witnesses for the
associated inequalities.
"""

from .derivatives import StepPolicy, TangentData, spectral_tangent
from .distances import decomposition_terms, purify, raw_purification_distance, sjoqvist_finite_distance
from .errors import *  # noqa: F401,F403
from .inequalities import (InequalityReport, bures_pair_inequality, det_curvature_bound_2d, qgt_pair_inequality,
                           quantum_volume, volume_phase_relation)
from .models import (ModelConfig, StateFamily, bloch_family, bosonic_coherent_family, build_model,
                     diagonal_qubit_family, random_smooth_family, thermal_family)
from .spectral import DensityMatrix, SpectralDecomposition, align_frames, hermitian_eigendecompose, validate_density
from .tensors import BuresResult, QgtResult, bures_metric, pure_qgt, qgt, sjoqvist_qgt
from .transport import Curve, SurfacePatch, horizontal_lift, plaquette_fluxes, pure_berry_phase, theta_g

__version__ = "0.1.0"
