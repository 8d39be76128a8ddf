"""Finite-scale toolkit for Ramsey algebras, finite reductions and ultrafilters."""

__version__ = "0.1.0"

from .core_algebra import (  # noqa: E402
    IDENTITY,
    Apply,
    OpDef,
    Signature,
    builtin,
    enumerate_orderly_terms,
    plus,
    shifted_mult,
    term_eval,
    term_op,
    zero,
)
from .errors import BudgetExhausted, Inconclusive, InputError, PrefixTooShort, Unknown, is_unknown  # noqa: E402
from .reduction import StreamSeq, check_witness, diagonalize, find_reduction, fr_enumerate, fr_member  # noqa: E402
from .search import (  # noqa: E402
    Coloring,
    SearchBudget,
    probe_degeneracy,
    search_iterated,
    search_monochromatic,
)
from .set_algebra import SymSet, check_admissible_sampled, closure_enumerate, family_union  # noqa: E402
from .ultrafilter import (  # noqa: E402
    COFINITE,
    Principal,
    check_associativity,
    is_idempotent,
    orderly_idempotence_check,
    pushforward,
    tensor_member,
)
from .galvin import (  # noqa: E402
    FRChainField,
    build_fr_field,
    fr_chain_member,
    galvin_construct,
    normalize,
    verify_strongly_reducible,
)
