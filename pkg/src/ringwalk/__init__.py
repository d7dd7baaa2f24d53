"""Continuous-time classical and quantum walks on rings with 2m-neighbour coupling."""

__version__ = "0.1.0"

from .errors import LatticeError, NumericalError, QuadratureError  # noqa: E402
from .lattice import (  # noqa: E402
    INFINITE,
    LatticeSpec,
    bloch_eigenvalues,
    build_laplacian,
    degeneracy_partition,
    pattern_equivalent,
)
from .finite import (  # noqa: E402
    TimeGrid,
    classical_probability,
    distribution_snapshot,
    quantum_amplitude,
    quantum_probability,
)
from .infinite import QuadratureConfig, bessel_m1, infinite_classical, infinite_quantum, no_wrap_check  # noqa: E402
from .limiting import (  # noqa: E402
    asymmetry_delta,
    asymmetry_scan,
    closed_form_cycle,
    complete_graph_limit,
    general_mirror_asymmetry,
    limiting_distribution,
)
from .transport import (  # noqa: E402
    character_time,
    delta_scaling,
    fit_linear_velocity,
    fit_quadratic,
    scaling_exponent,
)
