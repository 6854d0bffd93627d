"""Exact p-adic and formal-group computations for TC^- and TP of O_L.

The main entry points are re-exported here; see the submodules for the rest.
"""
from .bkring import TCMinusElement, TPElement, degree, frobenius_phi, tc_multiply, tc_to_tp, tp_multiply
from .coeff import FqElement, PrimeParams, WittCoords, WittElement, teichmuller_lift, witt_frobenius, witt_oracle
from .errors import (
    CheckFailedError,
    ConstantTermError,
    HeightSanityError,
    IntegralityError,
    NonUnitError,
    ParameterMismatchError,
    PrecisionError,
    PrecisionExhaustedError,
    TpfglError,
    UnsupportedPrecisionError,
    ValidationError,
    WrongCharacteristicError,
    ZOverflowError,
)
from .fgl import (
    FormalGroupLaw,
    HeightReport,
    base_change_fgl,
    check_axioms,
    fgl_from_log,
    honda_law,
    honda_log,
    n_series,
    p_height_mod_p,
)
from .localfield import LocalFieldData, OLElement, validate_eisenstein
from .orientation import (
    TheoremReport,
    build_tc_fgl_mod_p,
    build_tp_fgl_mod_p,
    default_suite,
    degeneration_checks,
    precision_policy,
    run_theorem,
    v1_image_tc,
    v1_image_tp,
)
from .series import BaseRing, BaseSeries, BiSeries, ValuedSeries, XSeries, compose, revert

__version__ = "0.1.0"
