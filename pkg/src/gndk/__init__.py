"""gndk: a proof kernel for grounding calculi.

Formulas carry three claim operators: immediate claims (``|>``), mediate
claims (``>>``), and nested tree entries (``*>``) that record whole chains
of immediate steps.  The kernel parses this language, checks derivations
against a pluggable rule set, normalizes them by detour reduction, and
builds the constructive conversions between derivations, bars, and claims.
"""

from . import analysis, calculus, derivation, errors, operators, rewrite, syntax
from .analysis import (
    Bar,
    BarOccurrence,
    bar_to_mediate,
    bars,
    derivation_to_tree,
    tree_derivation_witness,
    tree_to_derivation,
    validate_bar,
)
from .calculus import (
    CalculusSpec,
    RuleInstance,
    RuleSchema,
    gc_core,
    load_calculus,
    load_calculus_file,
    match_grounding_rule,
    packaged_calculus,
)
from .derivation import (
    CheckReport,
    Derivation,
    Rule,
    check,
    is_grounding_derivation,
    open_hypotheses,
    parse_derivation,
    print_derivation,
)
from .errors import KernelError
from .operators import DoiWitness, decompose_tree, recompose_tree, wdoi_immediate, wdoi_tree
from .rewrite import (
    ComplexityTriple,
    Redex,
    Segment,
    derivation_complexity,
    find_redexes,
    strategy_complexity,
    is_normal,
    normalize,
    reduce_redex,
    segments,
)
from .syntax import (
    Formula,
    GroundEntry,
    Immediate,
    Mediate,
    holds,
    logical_complexity,
    parse_formula,
    print_formula,
    tree_size,
)

__version__ = "0.1.0"
