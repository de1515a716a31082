"""Direct Wigner-function estimation by displaced-parity photon counting.

The parity of the photocount distribution after displacing a signal mode
equals, up to 2/pi, the Wigner function at the probe-defined phase-space
point; detector losses and mode mismatch map the same measurement onto an
s-ordered quasidistribution with s < 0.  This package provides the truncated
Fock-space machinery, the imperfect-detection model, exact quasidistribution
oracles, a reproducible Monte Carlo counting simulator, and a CLI that scans
phase space and serializes the resulting surfaces.
"""

from .counts import (
    CountDistribution,
    convolve,
    parity_of_distribution,
    poisson_distribution,
)
from .detection import (
    DetectorModel,
    IDEAL_DETECTOR,
    ProbePoint,
    coherent_closed_form,
    exact_pi,
    full_count_distribution,
    matched_count_distribution,
)
from .errors import (
    ConfigError,
    DomainError,
    ParseError,
    TruncationOverflow,
    ValidationError,
)
from .estimator import (
    ParityEstimate,
    ScanGrid,
    SeedSpec,
    SurfacePoint,
    WignerSurface,
    estimate_parity,
    sample_counts,
    scan,
)
from .fock import (
    DEFAULT_POLICY,
    DensityMatrix,
    TruncationPolicy,
    apply_displacement,
    coherent_amplitudes,
    diagonal,
    displacement_matrix,
    fidelity,
    loss_channel,
    purity,
    trace_distance,
)
from .quasiprob import (
    HUSIMI_Q,
    WIGNER,
    OrderingParameter,
    displaced_number_diagonal,
    gaussian_quasidist_oracle,
    parity_operator_expectation,
    quasidist,
)
from .states import (
    PhaseDiffusionSpec,
    coherent,
    fock,
    mixture,
    phase_diffused_coherent,
    vacuum,
)

__version__ = "0.1.0"

__all__ = [
    "CountDistribution",
    "convolve",
    "parity_of_distribution",
    "poisson_distribution",
    "DetectorModel",
    "IDEAL_DETECTOR",
    "ProbePoint",
    "coherent_closed_form",
    "exact_pi",
    "full_count_distribution",
    "matched_count_distribution",
    "ConfigError",
    "DomainError",
    "ParseError",
    "TruncationOverflow",
    "ValidationError",
    "ParityEstimate",
    "ScanGrid",
    "SeedSpec",
    "SurfacePoint",
    "WignerSurface",
    "estimate_parity",
    "sample_counts",
    "scan",
    "DEFAULT_POLICY",
    "DensityMatrix",
    "TruncationPolicy",
    "apply_displacement",
    "coherent_amplitudes",
    "diagonal",
    "displacement_matrix",
    "fidelity",
    "loss_channel",
    "purity",
    "trace_distance",
    "HUSIMI_Q",
    "WIGNER",
    "OrderingParameter",
    "displaced_number_diagonal",
    "gaussian_quasidist_oracle",
    "parity_operator_expectation",
    "quasidist",
    "PhaseDiffusionSpec",
    "coherent",
    "fock",
    "mixture",
    "phase_diffused_coherent",
    "vacuum",
    "__version__",
]
