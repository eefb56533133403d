"""Exact entanglement dynamics of two spin-coherent Bose-Einstein condensates."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError, DegenerateRatioError, IntegrationError, NormalizationError,
    NumericalError, ResourceError, TwoBecError,
)
from .spin import (  # noqa: E402
    CollectiveSpinMatrix, SpinCoherentParams, coherent_overlap, coherent_to_fock,
    spin_operator, x_eigendecomposition,
)
from .pure import (  # noqa: E402
    EntanglementRecord, GateSpec, RationalGateTime, TwoBecPureState, characteristic_times,
    entanglement_entropy, evolve_xz, evolve_zz, initial_xx_state, map2d_entropy,
    rational_dip_entropy, scan_entropy,
)
from .dephasing import (  # noqa: E402
    DephasingConfig, FitResult, NegativityRecord, TwoBecDensityMatrix, evolve_dephasing_x,
    evolve_dephasing_z, logarithmic_negativity, robustness_scaling,
)
from .witness import (  # noqa: E402
    CvPrediction, MomentReport, WitnessResult, collective_moments, cv_prediction,
    evaluate_witness, witness_scan,
)
from .husimi import CircleDiagram, QFunctionGrid, circle_diagram, qfunction_grid  # noqa: E402
