"""Infinity-modulus of curve families and the essential metric on finite
metric measure spaces."""

__version__ = "0.1.0"

from .curves import (Curve, LengthProfile, arc_length_parametrize, compute_length, concatenate,
                     evaluate, length_inverse, line_integral, measure_in, polyline,
                     positive_length_in, positive_time_in, reverse, subcurve)
from .errors import (ConsistencyError, InfmodError, InvalidCurveError, InvalidSpaceError,
                     NonRectifiableError, SchemaError, UnknownPointError)
from .essential import (EssentialDistanceResult, check_metric_axioms, connecting_family, d_ess,
                        d_hat, d_N, essential_matrix)
from .modulus import (CurveFamily, ModulusResult, check_modulus_laws, ess_length, inf_length,
                      is_admissible, is_exceptional, mod_infinity, mod_infinity_star, mod_sup,
                      mod_sup_lp)
from .space import (Density, NullSetCertificate, Space, distance, ess_sup, validate_metric,
                    validate_null_set)
