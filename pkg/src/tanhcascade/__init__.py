"""Recurrent tanh cascades, their fixpoint structure, and the extraction
of equivalent finite automata as cascades of three-state semiautomata."""

from .automata_core import (
    Automaton,
    SemiCascade,
    Semiautomaton,
    TransitionMonoid,
    automaton_from_dict,
    automaton_to_dict,
    automaton_to_dot,
    equivalent,
    flatten,
    identity_letters,
    is_aperiodic,
    is_identity_transformation,
    minimize,
    net_equivalent,
    reachable,
    transition_monoid,
)
from .errors import (
    AlphabetMismatch,
    CapExceeded,
    CascadeError,
    ContractiveRegime,
    DimensionMismatch,
    NoConvergence,
    NotRncPlus,
    OutOfBounds,
    UngroundedOutput,
    UnknownFixture,
    UnknownLetter,
    WeakDrive,
)
from .extraction import (
    Diagnostic,
    ExtractionConfig,
    ExtractionReport,
    VerificationSummary,
    eta,
    extract,
    report_to_dict,
    report_to_json,
    verify_extraction,
)
from .fixtures import (
    FixtureEntry,
    brute_membership,
    build_cascade_net,
    build_latch_net,
    catalog,
    dfa_diamond_p,
    dfa_grid,
    dfa_p_since_q,
    dfa_p_then_q,
    dfa_product_truncated,
    dfa_sum_bits_eq,
    dfa_sum_mod_k,
)
from .rnc_dynamics import (
    CascadeNet,
    GroundedAlphabet,
    InputFunction,
    Neuron,
    net_from_dict,
    net_from_json,
    net_to_dict,
    net_to_json,
    run,
    settle,
    step,
    validate_rncp,
)
from .tanh_analysis import (
    AMBIGUOUS,
    FixpointSet,
    NeuronShape,
    PivotPair,
    Regime,
    classify,
    fixpoints,
    pivots,
    settle_scalar,
    stationary_points,
)

__version__ = "0.1.0"
