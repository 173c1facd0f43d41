"""Bars of grounding derivations and the claim/derivation correspondences.

A bar is a set of formula occurrences (here: derivation nodes) hitting every
root-leaf path exactly once, the root excluded.  Bars are what the mediate
operator internalises: ``bar_to_mediate`` derives the corresponding mediate
claim.  ``derivation_to_tree``/``tree_to_derivation`` convert between
grounding derivations and the nested claims that mirror their structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .calculus import CalculusSpec, match_grounding_rule
from .errors import BarMismatch, NoMatchingRule, NotAGroundingDerivation
from .derivation import (
    GROUNDING,
    Derivation,
    NodePath,
    check,
    grounding,
    hyp,
    imm_i,
    is_grounding_derivation,
    med_i,
    med_i_trans_condition,
    med_i_trans_ground,
    node_at,
    tree_i_condition,
    tree_i_ground,
)
from .syntax import Formula, Immediate, Mediate, Plain, Tree, print_formula

TreeClaim = Immediate


@dataclass(frozen=True)
class BarOccurrence:
    path: NodePath
    formula: Formula
    is_condition: bool  # position the occurrence fills in its parent rule
    below_condition: bool = False  # some proper ancestor fills a condition slot


@dataclass(frozen=True)
class Bar:
    occurrences: tuple[BarOccurrence, ...]

    @property
    def paths(self) -> tuple[NodePath, ...]:
        return tuple(o.path for o in self.occurrences)

    def formulas(self) -> tuple[Formula, ...]:
        return tuple(o.formula for o in self.occurrences)

    def grounds(self) -> tuple[Formula, ...]:
        return tuple(o.formula for o in self.occurrences if not o.is_condition)

    def conditions(self) -> tuple[Formula, ...]:
        return tuple(o.formula for o in self.occurrences if o.is_condition)

    def crosses_condition(self) -> bool:
        """True when some member lies strictly inside a condition subtree;
        grounds found there are carried into the mediate claim's conditions
        by the transitivity splice, which deserves the caller's attention."""
        return any(o.below_condition for o in self.occurrences)


def _is_condition_index(node: Derivation, i: int) -> bool:
    inst = node.rule.instance
    return inst is not None and i >= len(inst.grounds)


def bars(d: Derivation) -> list[Bar]:
    """Every bar of a grounding derivation, depth-first: at each subtree the
    single-node cut comes before the cuts that descend into the premisses."""
    if not is_grounding_derivation(d):
        raise NotAGroundingDerivation("bars are defined for grounding derivations only")

    def cuts(node: Derivation, path: NodePath, is_cond: bool, below_cond: bool):
        yield (BarOccurrence(path, node.conclusion, is_cond, below_cond),)
        if node.kind == GROUNDING:
            child_choices = [
                list(cuts(p, path + (i,), _is_condition_index(node, i), below_cond or is_cond))
                for i, p in enumerate(node.premisses)
            ]
            for combo in product(*child_choices):
                yield tuple(x for part in combo for x in part)

    root_children = [
        list(cuts(p, (i,), _is_condition_index(d, i), False)) for i, p in enumerate(d.premisses)
    ]
    return [Bar(tuple(x for part in combo for x in part)) for combo in product(*root_children)]


def validate_bar(d: Derivation, b: Bar) -> bool:
    """Independent hitting-set test: exactly one member on each root-leaf
    path, root excluded."""
    chosen = set(b.paths)
    if () in chosen:
        return False

    def paths_ok(node: Derivation, path: NodePath, hits: int) -> bool:
        hits += path in chosen
        if not node.premisses:
            return hits == 1
        return all(paths_ok(p, path + (i,), hits) for i, p in enumerate(node.premisses))

    return paths_ok(d, (), 0) and all(_node_exists(d, p) for p in chosen)


def _node_exists(d: Derivation, path: NodePath) -> bool:
    try:
        node_at(d, path)
    except IndexError:
        return False
    return True


def bar_to_mediate(d: Derivation, b: Bar, spec: CalculusSpec) -> Derivation:
    """Derivation of the mediate claim whose grounds and conditions are the
    bar's members and whose consequence is d's conclusion.

    The bottom rule contributes the claim over all its premisses (via the
    immediate-claim introduction and the base mediate introduction); every
    premiss the bar passes through is then replaced by its sub-bar with a
    transitivity splice.
    """
    if not is_grounding_derivation(d):
        raise NotAGroundingDerivation("bars are defined for grounding derivations only")
    if not validate_bar(d, b):
        raise BarMismatch("not a bar of this derivation")
    chosen = set(b.paths)

    def synthesize(node: Derivation, path: NodePath) -> Derivation:
        inst = node.rule.instance
        acc = med_i(imm_i(node))
        n_grounds = len(inst.grounds)
        # splice conditions right-to-left first: ground splices prepend to
        # the condition list, so do not disturb condition indices afterwards
        for i in reversed(range(len(node.premisses))):
            child_path = path + (i,)
            if child_path in chosen:
                continue
            if i >= n_grounds:
                sub = synthesize(node.premisses[i], child_path)
                acc = med_i_trans_condition(sub, acc, i - n_grounds)
        for i in reversed(range(n_grounds)):
            child_path = path + (i,)
            if child_path in chosen:
                continue
            sub = synthesize(node.premisses[i], child_path)
            acc = med_i_trans_ground(sub, acc, i)
        return acc

    result = synthesize(d, ())
    claim = result.conclusion
    assert isinstance(claim, Mediate) and claim.consequence == d.conclusion
    _must_check(result, spec)
    return result


def derivation_to_tree(d: Derivation) -> TreeClaim:
    """The unique nested claim mirroring a grounding derivation: leaf
    premisses become plain entries, derived premisses tree entries."""
    if not is_grounding_derivation(d):
        raise NotAGroundingDerivation("only grounding derivations correspond to tree claims")

    def convert(node: Derivation) -> Immediate:
        inst = node.rule.instance
        entries = []
        for p in node.premisses:
            if p.kind == GROUNDING:
                sub = convert(p)
                entries.append(Tree(sub.grounds, sub.conditions, sub.consequence))
            else:
                entries.append(Plain(p.conclusion))
        n = len(inst.grounds)
        return Immediate(tuple(entries[:n]), tuple(entries[n:]), node.conclusion)

    t = convert(d)
    return t


def tree_to_derivation(t: TreeClaim, spec: CalculusSpec) -> Derivation:
    """The grounding derivation a nested claim describes; every one-step
    claim in it must be an application of a rule of ``spec``."""
    if not isinstance(t, Immediate):
        raise NotAGroundingDerivation(f"not an immediate grounding claim: {t}")

    def build(claim: Immediate) -> Derivation:
        premisses = []
        for e in claim.entries:
            if isinstance(e, Tree):
                premisses.append(build(e.as_claim()))
            else:
                premisses.append(hyp(e.f))
        grounds = tuple(p.conclusion for p in premisses[: len(claim.grounds)])
        conditions = tuple(p.conclusion for p in premisses[len(claim.grounds) :])
        inst = match_grounding_rule(spec, grounds, conditions, claim.consequence)
        if inst is None:
            flat = Immediate(
                tuple(Plain(g) for g in grounds),
                tuple(Plain(c) for c in conditions),
                claim.consequence,
            )
            raise NoMatchingRule(flat, f"{print_formula(flat)} is not a rule application")
        return grounding(inst, premisses)

    return build(t)


def tree_derivation_witness(d: Derivation, spec: CalculusSpec) -> Derivation:
    """Derivation of derivation_to_tree(d) from d's hypotheses, using only
    grounding applications, the immediate-claim introduction, and tree
    introductions: introduce the flat claim over the final rule, then nest
    each derived premiss's witness into it."""
    if not is_grounding_derivation(d):
        raise NotAGroundingDerivation("only grounding derivations correspond to tree claims")

    def witness(node: Derivation) -> Derivation:
        inst = node.rule.instance
        acc = imm_i(node)
        n = len(inst.grounds)
        for i, p in enumerate(node.premisses):
            if p.kind != GROUNDING:
                continue
            sub = witness(p)
            if i < n:
                acc = tree_i_ground(sub, acc, i)
            else:
                acc = tree_i_condition(sub, acc, i - n)
        return acc

    result = witness(d)
    assert result.conclusion == derivation_to_tree(d)
    _must_check(result, spec)
    return result


def _must_check(result: Derivation, spec: CalculusSpec) -> None:
    # the constructions are proofs; hand back nothing the checker rejects
    report = check(result, spec)
    if not report.ok:
        raise AssertionError(f"construction failed its own check: {report.failures[0]}")
