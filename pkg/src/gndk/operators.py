"""Constructive balance witnesses for the claim operators.

``wdoi_immediate`` and ``wdoi_tree`` build, from a claim assumed as its own
hypothesis, a derivation of that same claim that applies at least one
elimination: the eliminations recover exactly the material the introduction
needs.  ``decompose_tree``/``recompose_tree`` split a nested claim into the
one-step claims it encodes and rebuild it from them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import CalculusSpec, match_grounding_rule
from .errors import NoTreeEntry, NotAGroundingTree, NotIntroducible, PartsMismatch
from .derivation import (
    Derivation,
    grounding,
    hyp,
    imm_e_condition,
    imm_e_ground,
    imm_i,
    tree_e_extract_condition,
    tree_e_extract_ground,
    tree_e_flatten_condition,
    tree_e_flatten_ground,
    tree_i_condition,
    tree_i_ground,
)
from .syntax import Formula, Immediate, Plain, Tree, print_formula, tree_size


@dataclass(frozen=True)
class DoiWitness:
    """Round trip from a claim back to itself, eliminations first."""

    derivation: Derivation
    elim_count: int


def wdoi_immediate(claim: Formula, spec: CalculusSpec) -> DoiWitness:
    """Witness for a plain immediate claim: project every ground and
    condition out of the hypothesis, re-apply the grounding rule to the
    projections, and reintroduce the claim."""
    if not isinstance(claim, Immediate) or claim.has_tree_entry():
        raise ValueError(f"expected an immediate claim without tree entries: {claim}")
    grounds = tuple(e.f for e in claim.grounds)
    conditions = tuple(e.f for e in claim.conditions)
    inst = match_grounding_rule(spec, grounds, conditions, claim.consequence)
    if inst is None:
        raise NotIntroducible(
            f"no rule of {spec.name!r} concludes {print_formula(claim.consequence)} "
            f"from these grounds"
        )
    h = hyp(claim)
    premisses = [imm_e_ground(h, i) for i in range(len(grounds))]
    premisses += [imm_e_condition(h, i) for i in range(len(conditions))]
    d = imm_i(grounding(inst, premisses))
    return DoiWitness(d, elim_count=len(premisses))


def wdoi_tree(claim: Formula, entry: int | None = None) -> DoiWitness:
    """Witness for a claim with tree entries: extract the selected entry's
    claim and the flattened host, then reintroduce the entry.  Any outermost
    tree entry works; the leftmost is used unless ``entry`` names another
    (an index into grounds followed by conditions)."""
    if not isinstance(claim, Immediate):
        raise ValueError(f"expected an immediate claim: {claim}")
    tree_slots = [i for i, e in enumerate(claim.entries) if isinstance(e, Tree)]
    if not tree_slots:
        raise NoTreeEntry(f"claim has no tree entry: {print_formula(claim)}")
    if entry is None:
        entry = tree_slots[0]
    if entry not in tree_slots:
        raise NoTreeEntry(f"entry {entry} is not a tree entry")
    h = hyp(claim)
    n = len(claim.grounds)
    if entry < n:
        extracted = tree_e_extract_ground(h, entry)
        flattened = tree_e_flatten_ground(h, entry)
        d = tree_i_ground(extracted, flattened, entry)
    else:
        i = entry - n
        extracted = tree_e_extract_condition(h, i)
        flattened = tree_e_flatten_condition(h, i)
        d = tree_i_condition(extracted, flattened, i)
    if d.conclusion != claim:
        raise AssertionError("witness does not reproduce the claim")
    return DoiWitness(d, elim_count=2)


def decompose_tree(claim: Formula) -> list[tuple[Formula, Derivation]]:
    """All one-step claims a nested claim encodes, each paired with the
    elimination-only derivation projecting it from the claim, innermost
    first and the fully flattened top claim last."""
    if not isinstance(claim, Immediate):
        raise NotAGroundingTree(f"not an immediate grounding claim: {claim}")

    def walk(d: Derivation) -> list[tuple[Formula, Derivation]]:
        c = d.conclusion
        out: list[tuple[Formula, Derivation]] = []
        for i, e in enumerate(c.grounds):
            if isinstance(e, Tree):
                out.extend(walk(tree_e_extract_ground(d, i)))
        for i, e in enumerate(c.conditions):
            if isinstance(e, Tree):
                out.extend(walk(tree_e_extract_condition(d, i)))
        flat = d
        for i, e in enumerate(c.grounds):
            if isinstance(e, Tree):
                flat = tree_e_flatten_ground(flat, i)
        for i, e in enumerate(c.conditions):
            if isinstance(e, Tree):
                flat = tree_e_flatten_condition(flat, i)
        out.append((flat.conclusion, flat))
        return out

    parts = walk(hyp(claim))
    assert len(parts) == tree_size(claim)
    return parts


def recompose_tree(parts: list[Formula], target: Formula) -> Derivation:
    """Rebuild ``target`` from its decomposition using introduction rules
    only; the parts become the hypotheses."""
    if not isinstance(target, Immediate):
        raise NotAGroundingTree(f"not an immediate grounding claim: {target}")
    expected = [c for c, _ in decompose_tree(target)]
    if list(parts) != expected:
        raise PartsMismatch(
            "parts are not the decomposition of the target "
            f"(expected {[print_formula(c) for c in expected]})"
        )

    def build(claim: Immediate) -> Derivation:
        for i, e in enumerate(claim.grounds):
            if isinstance(e, Tree):
                sub = build(e.as_claim())
                host = build(
                    Immediate(
                        claim.grounds[:i] + (Plain(e.consequence),) + claim.grounds[i + 1 :],
                        claim.conditions,
                        claim.consequence,
                    )
                )
                return tree_i_ground(sub, host, i)
        for i, e in enumerate(claim.conditions):
            if isinstance(e, Tree):
                sub = build(e.as_claim())
                host = build(
                    Immediate(
                        claim.grounds,
                        claim.conditions[:i] + (Plain(e.consequence),) + claim.conditions[i + 1 :],
                        claim.consequence,
                    )
                )
                return tree_i_condition(sub, host, i)
        return hyp(claim)

    d = build(target)
    if d.conclusion != target:
        raise AssertionError("recomposition does not conclude the target")
    return d
