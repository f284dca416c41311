"""Non-perturbative simulation of qubit detectors signalling through a
massless scalar field in 1+1 dimensions via controlled multimode
coherent-state displacements."""

from .algebra import (
    AXIS_STATES,
    ControlledDisplacement,
    DensityMatrix,
    GeneratorBasis,
    HybridState,
    coherent_information,
    entropy,
    fidelity,
    haar_states,
    pure_state_fidelity,
)
from .errors import (
    AuditError,
    BoundViolationError,
    CavityTruncationError,
    DegenerateGeometryError,
    FieldcommError,
    GeometryError,
    KernelMismatchError,
    ProfileError,
    PSDViolationError,
    QuadratureError,
    UnitarityError,
)
from .kernels import (
    AmplitudeKernel,
    AmplitudeNormReport,
    CavityKernel,
    DisplacementGenerator,
    MomentumKernel,
    amplitude_kernel_norm,
    cavity_mode_amp,
    cavity_phase_closed_form,
    cavity_phase_window,
    cavity_tail_bound,
    displacement_inner,
    displacement_norm_sq,
    phi,
    phi_momentum_closed_form,
    solve_sensing_strength,
)
from .profiles import ProfileFunction
from .protocols import (
    AntidegradabilityReport,
    AuditClaims,
    AuditReport,
    CavityReport,
    DelocalizeReport,
    ProtocolReport,
    TransferParams,
    alice_to_field,
    antidegradability_check,
    appendix_c_audit,
    cavity_transfer,
    default_transfer_params,
    delocalize,
    erasure_channel,
    erasure_coherent_info,
    reflection_focal_point,
    state_transfer,
    transfer_params_for_gamma,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
