"""Upper bounds on fault-tolerance thresholds from stabilizer-octahedron entry of injected resources."""

__version__ = "0.1.0"

from .channels import (
    IDENTITY,
    AffineChannel,
    PauliOp,
    apply,
    choi_psd_check,
    compose,
    depolarizing,
    mix_with,
    opposite_noise,
    pauli_channel,
)
from .decoding import decoding_polynomial_root
from .noise import (
    InjectionVariant,
    LocationNoise,
    ResourceSpec,
    epg_location_noise,
    knill_location_noise,
    phase_gate_resource,
    phase_state_resource,
)
from .qubit import BlochVector, antipode, in_octahedron, octahedron_norm, phase_state
from .scan import analytic_diagonal_optimum, scan_general_resources, scan_phase_resources
from .shifting import effective_map, knill_effective_formula, shift_rule
from .solver import (
    ThresholdResult,
    depolarizing_two_hit_threshold,
    epg_phase_threshold_general,
    octahedron_threshold,
    two_hit_dephasing_threshold,
)
