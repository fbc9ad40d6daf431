"""Satisfiability and validity by small-model enumeration.

A satisfiable formula has a model built from exactly the variables and
agents it mentions plus one extra agent, so deciding it means enumerating
the finitely many models of that signature.  Validity is unsatisfiability
of the negation and is always relative to a signature; results name the
signature they were decided over.
"""

from __future__ import annotations

from .model import DirectModel, Signature, enumerate_models
from .semantics import evaluate
from .syntax import Formula, Not, conj_all, ensure_fits, implies, signature_of


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def default_signature(formula: Formula) -> Signature:
    """Smallest search signature for the formula: its own variables and
    agents, one spare agent to absorb foreign ownership, and a spare
    variable only when the formula mentions none (signatures must be
    non-empty)."""
    props, agents = signature_of(formula)
    agent_pool = set(agents)
    agent_pool.add(_fresh("_env", agent_pool))
    var_pool = set(props)
    if not var_pool:
        var_pool.add(_fresh("_aux", agent_pool))
    return Signature(tuple(agent_pool), tuple(var_pool))


def satisfiable(formula: Formula, sig: Signature | None = None) -> DirectModel | None:
    """First witness model in enumeration order, or ``None``.

    Searches the given signature, or the formula's default signature.
    """
    if sig is None:
        sig = default_signature(formula)
    else:
        ensure_fits(formula, sig)
    for m in enumerate_models(sig):
        if evaluate(m, formula):
            return m
    return None


def valid(formula: Formula, sig: Signature | None = None) -> bool:
    """Whether the formula holds in every model of the signature (default:
    the formula's own default signature)."""
    if sig is None:
        sig = default_signature(formula)
    return satisfiable(Not(formula), sig) is None


def counterexample(formula: Formula, sig: Signature | None = None) -> DirectModel | None:
    """A model falsifying the formula, or ``None`` when it is valid."""
    if sig is None:
        sig = default_signature(formula)
    return satisfiable(Not(formula), sig)


def entails(premises, conclusion: Formula, sig: Signature | None = None) -> bool:
    """Finite entailment: validity of (conjunction of premises -> conclusion)."""
    combined = implies(conj_all(premises), conclusion)
    return valid(combined, sig)
