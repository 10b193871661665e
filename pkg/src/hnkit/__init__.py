"""Representation, admissibility and symmetry of several-variable Herglotz-Nevanlinna functions."""
from .core import (DomainError, HNKitError, NoConvergence, NotConverged, PreconditionError,
                   OffRealPoint, UpperPoint, IndexSet, RhoVector, classify)
from .measures import (HyperplaneLebesgue, LebesgueDensity, PointMass, QuadratureSpec,
                       integrate, lebesgue, measure_from_json)
from .representation import (RepresentationData, evaluate_q, evaluate_q_extended, FunctionOracle,
                             recover_a, recover_b, recover_c)
from .conditions import full_admissibility, verdict_profile
from .symmetry import symmetric_value_g, symmetric_value_q, check_cplus_independence

__version__ = "0.1.0"
