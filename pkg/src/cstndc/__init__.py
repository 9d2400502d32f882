"""Dynamic consistency of Conditional Simple Temporal Networks.

A CSTN is expanded into one STN copy per scenario, the copies are tied
together by hyperarcs encoding the reaction-time requirement, and the
resulting Hyper Temporal Network is checked through an energy game.
"""

from .cstn import (
    LAMBDA,
    Cstn,
    CstnNode,
    Label,
    LabeledConstraint,
    Literal,
    Scenario,
    Stn,
    difference_set,
    enumerate_scenarios,
    expansion,
    label_con,
    label_sub,
    restrict,
    scenario_eval,
    validate_wd,
    wd_warnings,
)
from .dc import (
    DcReport,
    Verdict,
    check_dc,
    check_edc,
    construct_h_epsilon,
    dc_epsilon,
    estimate_epsilon_hat,
    expected_h_epsilon_counts,
    round_schedule,
    verify_strategy,
)
from .errors import (
    CapacityError,
    CstnError,
    InputError,
    ParseError,
    ValidationError,
    VerificationError,
    WeightOverflowError,
)
from .formats import export_dot, parse_cstn, parse_strategy, serialize_cstn, serialize_strategy
from .generators import gen_from_3cnf, gen_gamma_n, gen_gamma_n_strategy, gen_random_cstn
from .hytn import Hyperarc, Hytn, brute_force_hytn, check_hytn_consistency
from .mpg import Mpg, brute_force_mpg, hytn_to_mpg, solve_energy

__version__ = "0.1.0"
