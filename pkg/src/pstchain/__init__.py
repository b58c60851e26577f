"""Perfect state transfer chains: certify a spectrum, build the chain, simulate it."""
__version__ = "0.1.0"

from .design import (
    PSTCertificate,
    SpectralWeights,
    Spectrum,
    certify_spectrum,
    design,
    design_protocol1_even,
    design_protocol1_odd,
    reconstruct_chain,
    weights_from_spectrum,
)
from .dynamics import (
    BOSON,
    FERMION,
    ParticleStatistics,
    Propagator,
    TwoParticleState,
    TwoQubitGate,
    WellPacket,
    effective_gate,
    evolve_two_particle,
    mirror_check,
    propagate,
    transfer_fidelity,
    two_way_transfer,
    well_mirror_revival,
)
from .entanglement import (
    PureTwoQubitState,
    apply_effective_gate,
    concurrence,
    protocol1_halfchain_matrix,
    run_protocol1,
    run_protocol2,
    schmidt_coefficients,
)
from .jacobi import (
    ChainSpec,
    EigenSystem,
    SturmSequence,
    eigensolve,
    eigvec_from_sturm,
    mirror_index,
    parity_check,
    sturm_eval,
)
from .kernels import BACKEND
