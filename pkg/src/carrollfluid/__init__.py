"""Solvers and certificates for the one-dimensional isentropic Carrollian fluid equations."""

__version__ = "0.1.0"

from .errors import (BlowupError, BracketError, CarrollError, ClassificationError, ConfigError,
                     DataError, DegeneracyError, GateError, HorizonError, InversionError,
                     IterationError, LiquescenceError, ParameterError, RegionError, TimeStepError)
from .state import (DualityDiagnostics, EigenData, FluidState, GammaParams, RiemannState,
                    duality_diagnostics, eigen, eigen_gradients, eigenvalues_riemann,
                    from_riemann, genuine_nonlinearity, make_params, space_momentum_residual,
                    to_riemann)
from .initial_data import (InitialData, derivative_field, ingest_tabulated, preset,
                           read_tabulated_csv, write_tabulated_csv)
from .classification import (AdmissibilityVerdict, EigenvalueEnvelope, PointClass, RegionBounds,
                             RegionCertificate, admissibility_gate, certify_runtime_region,
                             classification_summary, classify_point, eigenvalue_envelope,
                             region_bounds, require_admissible)
from .gamma3 import (BlowupReport, alpha_along_characteristic_gamma3, first_crossing_time_gamma3,
                     foot_points, one_sided_lipschitz_certificate_gamma3, predict_blowup_gamma3,
                     solve_exact_gamma3)
from .characteristics import (BlowupInterval, CharacteristicBundle, CharacteristicTrace,
                              RiccatiResult, RiccatiState, blowup_bounds_general, blowup_envelope,
                              build_bundle, integrate_riccati, integrating_factor,
                              one_sided_lipschitz_certificate_general, trace_characteristic)
from .grid import Grid1D, GridSolution, run, upwind_step
