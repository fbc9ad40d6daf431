"""Semantic normal forms: per-allocation tables of satisfying valuations.

Every formula over a fixed signature is equivalent to a disjunction, over
all allocations, of "the allocation holds and the valuation is one of
these".  The table of satisfying valuations per allocation is that normal
form with the syntax stripped away; it is computed by exhaustive
evaluation, so equality of tables is exactly semantic equivalence over the
signature.

Rows are bitmasks over the canonical valuation order, indexed by the
canonical allocation order, which makes complement, union, and equality
single word operations per row.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import semantics
from .model import (
    Allocation,
    DirectModel,
    Signature,
    Valuation,
    enumerate_allocations,
)
from .syntax import (
    Atom,
    Formula,
    Not,
    bottom,
    conj,
    conj_all,
    controls,
    disj_all,
    ensure_fits,
)


class BudgetError(ValueError):
    """A requested count would exceed the configured size budget."""


@dataclass(frozen=True)
class NormalForm:
    """Total map from allocations to their sets of satisfying valuations."""

    sig: Signature
    rows: tuple[int, ...]

    @property
    def full_row(self) -> int:
        return (1 << (1 << len(self.sig.vars))) - 1

    def mask_for(self, alloc: Allocation) -> int:
        return self.rows[alloc.index()]

    def satisfying(self, alloc: Allocation) -> tuple[Valuation, ...]:
        row = self.mask_for(alloc)
        return tuple(
            Valuation(self.sig, bits)
            for bits in range(1 << len(self.sig.vars))
            if row >> bits & 1
        )

    def complement(self) -> NormalForm:
        full = self.full_row
        return NormalForm(self.sig, tuple(full ^ row for row in self.rows))


def normal_form(formula: Formula, sig: Signature) -> NormalForm:
    """Evaluate the formula on every model of the signature and tabulate."""
    ensure_fits(formula, sig)
    rows = []
    for alloc in enumerate_allocations(sig):
        row = 0
        for bits in range(1 << len(sig.vars)):
            m = DirectModel(sig, alloc, Valuation(sig, bits))
            if semantics.evaluate(m, formula):
                row |= 1 << bits
        rows.append(row)
    return NormalForm(sig, tuple(rows))


def valuation_description(sig: Signature, val: Valuation) -> Formula:
    """The complete literal conjunction pinning down one valuation."""
    literals = [
        Atom(p) if val.value(p) else Not(Atom(p))
        for p in sig.vars
    ]
    return conj_all(literals)


def allocation_description(alloc: Allocation) -> Formula:
    """The controls conjunction pinning down one allocation."""
    facts = [controls({alloc.owner(p)}, Atom(p)) for p in alloc.sig.vars]
    return conj_all(facts)


def nf_to_formula(nf: NormalForm) -> Formula:
    """Rebuild a formula from the table: a disjunction over allocations of
    (satisfying valuation descriptions, conjoined with the allocation
    description).  An empty row contributes a falsum disjunct."""
    branches = []
    for alloc in enumerate_allocations(nf.sig):
        row = nf.mask_for(alloc)
        if row == 0:
            inner: Formula = bottom()
        else:
            inner = disj_all(
                valuation_description(nf.sig, val) for val in nf.satisfying(alloc)
            )
        branches.append(conj(inner, allocation_description(alloc)))
    if not branches:
        return bottom()
    return disj_all(branches)


def equivalent(left: Formula, right: Formula, sig: Signature) -> bool:
    """Whether the two formulas agree on every model of the signature."""
    return normal_form(left, sig) == normal_form(right, sig)


def description_counts(n: int, k: int, max_digits: int = 20_000) -> tuple[int, int, int, int]:
    """Counting bounds for n agents and k variables.

    Returns (valuation descriptions, allocation descriptions, the
    non-equivalent-formula bound 2**(n*k), and the proposition-description
    bound 2**2**(n*k)), as exact integers.  Refuses when the final value
    would exceed the decimal digit budget.
    """
    if n < 1 or k < 1:
        raise ValueError("need at least one agent and one variable")
    exponent = 2 ** (n * k)
    # 2**exponent has about exponent * log10(2) decimal digits.
    if exponent * 30103 > max_digits * 100_000:
        raise BudgetError(
            f"2**2**{n * k} would have ~{exponent * 30103 // 100_000} digits, "
            f"budget is {max_digits}"
        )
    return (2**k, n**k, 2 ** (n * k), 2**exponent)
