"""Logarithmic-depth quantum state preparation of polynomial amplitude
profiles, with a dense statevector engine that verifies every construction.
"""

__version__ = "0.1.0"

from .circuit import (
    Circuit, CircuitMetrics, Gate, RegisterLayout,
    compute_metrics, controlled, expand_to_cx, export_circuit, fanout_copy,
    import_circuit, layers, make_gate, mcx,
    SYSTEM, CONTROL, FLAG, GQSP, SCRATCH, COPY,
)
from .simulator import (
    SIMULATION_QUBIT_CAP, SPUEDescriptor, StateVector,
    apply, extract_block, fidelity, matrix_chebyshev_oracle, postselect,
    replay_basis, replay_basis_batch, two_norm_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
