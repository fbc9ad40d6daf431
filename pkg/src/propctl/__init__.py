"""Model checking, satisfiability, and control analysis for a modal logic
where every propositional variable is owned by one agent: coalition
modalities quantify over assignments to owned variables, and program
modalities move ownership between agents."""

from .control import (
    characterize_second_order,
    controls,
    delegation_can_achieve,
    geq,
    give_program,
    grand_coalition_control,
    second_order_controls,
)
from .decision import (
    counterexample,
    default_signature,
    entails,
    satisfiable,
    valid,
)
from .kripke import PointedKripkeModel, cross_check, pointed_of
from .model import (
    Allocation,
    CValuation,
    DirectModel,
    Signature,
    SignatureError,
    Valuation,
    apply_cvaluation,
    atomic_transfer,
    enumerate_allocations,
    enumerate_models,
    enumerate_valuations,
    model_size,
    serialize_model,
)
from .normalform import (
    BudgetError,
    NormalForm,
    description_counts,
    equivalent,
    nf_to_formula,
    normal_form,
)
from .semantics import evaluate, in_relation, program_image, star_depth
from .syntax import (
    Atom,
    Choice,
    Dia,
    DiaProg,
    Formula,
    Give,
    Not,
    Or,
    ParseError,
    Program,
    Seq,
    Star,
    Test,
    Top,
    TOP,
    parse_formula,
    parse_model,
    parse_program,
    render,
    signature_of,
)

__version__ = "0.1.0"
