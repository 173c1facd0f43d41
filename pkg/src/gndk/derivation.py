"""Derivations: finite proof trees with hypothesis discharge, a full node
checker, and the s-expression proof file format.

A node records its conclusion, a rule tag, child subderivations (premiss
order is significant), discharge labels, and for leaves an optional
hypothesis label.  Rule applications are validated against a calculus by
``check``; failures are reported as data, never raised.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .calculus import CalculusSpec, RuleInstance, match_grounding_rule, match_schema
from .errors import ParseError, UnknownSchema
from .syntax import (
    And,
    Bottom,
    Formula,
    Imp,
    Immediate,
    Mediate,
    Neg,
    Or,
    Plain,
    Tree,
    parse_formula,
    print_formula,
)

# Rule kinds.  Introductions and eliminations are classified for the
# rewrite machinery; hypotheses and grounding applications are neither.
HYP = "hyp"
GROUNDING = "grounding"

AND_I, AND_E_L, AND_E_R = "and_i", "and_e_l", "and_e_r"
OR_I_L, OR_I_R, OR_E = "or_i_l", "or_i_r", "or_e"
IMP_I, IMP_E = "imp_i", "imp_e"
NEG_I, NEG_E = "neg_i", "neg_e"
BOT_E = "bot_e"

IMM_I = "imm_i"
IMM_E_CONSEQUENCE = "imm_e_consequence"
IMM_E_GROUND = "imm_e_ground"
IMM_E_CONDITION = "imm_e_condition"
IMM_E_NEG = "imm_e_neg"

MED_I = "med_i"
MED_I_TRANS_GROUND = "med_i_trans_ground"
MED_I_TRANS_CONDITION = "med_i_trans_condition"
MED_E_CONSEQUENCE = "med_e_consequence"
MED_E_GROUND = "med_e_ground"
MED_E_CONDITION = "med_e_condition"

TREE_I_GROUND = "tree_i_ground"
TREE_I_CONDITION = "tree_i_condition"
TREE_E_EXTRACT_GROUND = "tree_e_extract_ground"
TREE_E_EXTRACT_CONDITION = "tree_e_extract_condition"
TREE_E_FLATTEN_GROUND = "tree_e_flatten_ground"
TREE_E_FLATTEN_CONDITION = "tree_e_flatten_condition"

INTRO_KINDS = frozenset(
    {
        AND_I,
        OR_I_L,
        OR_I_R,
        IMP_I,
        NEG_I,
        IMM_I,
        MED_I,
        MED_I_TRANS_GROUND,
        MED_I_TRANS_CONDITION,
        TREE_I_GROUND,
        TREE_I_CONDITION,
    }
)
ELIM_KINDS = frozenset(
    {
        AND_E_L,
        AND_E_R,
        OR_E,
        IMP_E,
        NEG_E,
        BOT_E,
        IMM_E_CONSEQUENCE,
        IMM_E_GROUND,
        IMM_E_CONDITION,
        IMM_E_NEG,
        MED_E_CONSEQUENCE,
        MED_E_GROUND,
        MED_E_CONDITION,
        TREE_E_EXTRACT_GROUND,
        TREE_E_EXTRACT_CONDITION,
        TREE_E_FLATTEN_GROUND,
        TREE_E_FLATTEN_CONDITION,
    }
)

_ARITY = {
    HYP: 0,
    AND_I: 2,
    AND_E_L: 1,
    AND_E_R: 1,
    OR_I_L: 1,
    OR_I_R: 1,
    OR_E: 3,
    IMP_I: 1,
    IMP_E: 2,
    NEG_I: 1,
    NEG_E: 2,
    BOT_E: 1,
    IMM_I: 1,
    IMM_E_CONSEQUENCE: 1,
    IMM_E_GROUND: 1,
    IMM_E_CONDITION: 1,
    IMM_E_NEG: 1,
    MED_I: 1,
    MED_I_TRANS_GROUND: 2,
    MED_I_TRANS_CONDITION: 2,
    MED_E_CONSEQUENCE: 1,
    MED_E_GROUND: 1,
    MED_E_CONDITION: 1,
    TREE_I_GROUND: 2,
    TREE_I_CONDITION: 2,
    TREE_E_EXTRACT_GROUND: 1,
    TREE_E_EXTRACT_CONDITION: 1,
    TREE_E_FLATTEN_GROUND: 1,
    TREE_E_FLATTEN_CONDITION: 1,
}

_INDEXED = frozenset(
    {
        IMM_E_GROUND,
        IMM_E_CONDITION,
        MED_E_GROUND,
        MED_E_CONDITION,
        MED_I_TRANS_GROUND,
        MED_I_TRANS_CONDITION,
        TREE_I_GROUND,
        TREE_I_CONDITION,
        TREE_E_EXTRACT_GROUND,
        TREE_E_EXTRACT_CONDITION,
        TREE_E_FLATTEN_GROUND,
        TREE_E_FLATTEN_CONDITION,
    }
)


@dataclass(frozen=True)
class Rule:
    kind: str
    index: int | None = None
    instance: RuleInstance | None = None


@dataclass(frozen=True)
class Derivation:
    conclusion: Formula
    rule: Rule
    premisses: tuple[Derivation, ...] = ()
    discharged: tuple[str, ...] = ()
    hyp_label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "premisses", tuple(self.premisses))
        object.__setattr__(self, "discharged", tuple(self.discharged))

    @property
    def kind(self) -> str:
        return self.rule.kind

    def __str__(self) -> str:
        return print_derivation(self)


NodePath = tuple[int, ...]


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    failures: tuple[tuple[NodePath, str, str], ...]
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Builders.  These compute conclusions in the forward direction and raise
# ValueError on shape mismatch; check() stays the independent validator.


def hyp(f: Formula, label: str | None = None) -> Derivation:
    return Derivation(f, Rule(HYP), (), (), label)


def grounding(instance: RuleInstance, premisses) -> Derivation:
    premisses = tuple(premisses)
    expected = instance.grounds + instance.conditions
    got = tuple(p.conclusion for p in premisses)
    if got != expected:
        raise ValueError(f"premisses {got} do not fit instance {expected}")
    return Derivation(instance.conclusion, Rule(GROUNDING, instance=instance), premisses)


def imm_i(g: Derivation) -> Derivation:
    if g.kind != GROUNDING:
        raise ValueError("the |> introduction sits directly on a grounding application")
    inst = g.rule.instance
    claim = Immediate(
        tuple(Plain(f) for f in inst.grounds),
        tuple(Plain(f) for f in inst.conditions),
        inst.conclusion,
    )
    return Derivation(claim, Rule(IMM_I), (g,))


def _at(xs, i: int):
    if not isinstance(i, int) or not 0 <= i < len(xs):
        raise ValueError(f"index {i} out of range")
    return xs[i]


def _imm_claim(d: Derivation) -> Immediate:
    if not isinstance(d.conclusion, Immediate):
        raise ValueError(f"expected an immediate claim, got {d.conclusion}")
    return d.conclusion


def imm_e_consequence(d: Derivation) -> Derivation:
    return Derivation(_imm_claim(d).consequence, Rule(IMM_E_CONSEQUENCE), (d,))


def imm_e_ground(d: Derivation, i: int) -> Derivation:
    entry = _at(_imm_claim(d).grounds, i)
    if not isinstance(entry, Plain):
        raise ValueError("cannot project a tree entry")
    return Derivation(entry.f, Rule(IMM_E_GROUND, index=i), (d,))


def imm_e_condition(d: Derivation, i: int) -> Derivation:
    entry = _at(_imm_claim(d).conditions, i)
    if not isinstance(entry, Plain):
        raise ValueError("cannot project a tree entry")
    return Derivation(entry.f, Rule(IMM_E_CONDITION, index=i), (d,))


def imm_e_neg(d: Derivation) -> Derivation:
    _imm_claim(d)
    return Derivation(Bottom(), Rule(IMM_E_NEG), (d,))


def med_i(d: Derivation) -> Derivation:
    claim = _imm_claim(d)
    if claim.has_tree_entry():
        raise ValueError("only a plain immediate claim converts to a mediate claim")
    return Derivation(
        Mediate(
            tuple(e.f for e in claim.grounds),
            tuple(e.f for e in claim.conditions),
            claim.consequence,
        ),
        Rule(MED_I),
        (d,),
    )


def _med_claim(d: Derivation) -> Mediate:
    if not isinstance(d.conclusion, Mediate):
        raise ValueError(f"expected a mediate claim, got {d.conclusion}")
    return d.conclusion


def med_i_trans_ground(sub: Derivation, host: Derivation, i: int) -> Derivation:
    s, h = _med_claim(sub), _med_claim(host)
    if _at(h.grounds, i) != s.consequence:
        raise ValueError("ground at the given index does not match the spliced consequence")
    merged = Mediate(
        h.grounds[:i] + s.grounds + h.grounds[i + 1 :],
        s.conditions + h.conditions,
        h.consequence,
    )
    return Derivation(merged, Rule(MED_I_TRANS_GROUND, index=i), (sub, host))


def med_i_trans_condition(sub: Derivation, host: Derivation, i: int) -> Derivation:
    s, h = _med_claim(sub), _med_claim(host)
    if _at(h.conditions, i) != s.consequence:
        raise ValueError("condition at the given index does not match the spliced consequence")
    merged = Mediate(
        h.grounds,
        h.conditions[:i] + s.grounds + s.conditions + h.conditions[i + 1 :],
        h.consequence,
    )
    return Derivation(merged, Rule(MED_I_TRANS_CONDITION, index=i), (sub, host))


def med_e_consequence(d: Derivation) -> Derivation:
    return Derivation(_med_claim(d).consequence, Rule(MED_E_CONSEQUENCE), (d,))


def med_e_ground(d: Derivation, i: int) -> Derivation:
    return Derivation(_at(_med_claim(d).grounds, i), Rule(MED_E_GROUND, index=i), (d,))


def med_e_condition(d: Derivation, i: int) -> Derivation:
    return Derivation(_at(_med_claim(d).conditions, i), Rule(MED_E_CONDITION, index=i), (d,))


def tree_i_ground(sub: Derivation, host: Derivation, i: int) -> Derivation:
    s, h = _imm_claim(sub), _imm_claim(host)
    if _at(h.grounds, i) != Plain(s.consequence):
        raise ValueError("ground at the given index does not match the nested consequence")
    entry = Tree(s.grounds, s.conditions, s.consequence)
    claim = Immediate(h.grounds[:i] + (entry,) + h.grounds[i + 1 :], h.conditions, h.consequence)
    return Derivation(claim, Rule(TREE_I_GROUND, index=i), (sub, host))


def tree_i_condition(sub: Derivation, host: Derivation, i: int) -> Derivation:
    s, h = _imm_claim(sub), _imm_claim(host)
    if _at(h.conditions, i) != Plain(s.consequence):
        raise ValueError("condition at the given index does not match the nested consequence")
    entry = Tree(s.grounds, s.conditions, s.consequence)
    claim = Immediate(h.grounds, h.conditions[:i] + (entry,) + h.conditions[i + 1 :], h.consequence)
    return Derivation(claim, Rule(TREE_I_CONDITION, index=i), (sub, host))


def _tree_entry(claim: Immediate, i: int, side: str) -> Tree:
    entry = _at(claim.grounds if side == "ground" else claim.conditions, i)
    if not isinstance(entry, Tree):
        raise ValueError(f"{side} {i} is not a tree entry")
    return entry


def tree_e_extract_ground(d: Derivation, i: int) -> Derivation:
    t = _tree_entry(_imm_claim(d), i, "ground")
    return Derivation(t.as_claim(), Rule(TREE_E_EXTRACT_GROUND, index=i), (d,))


def tree_e_extract_condition(d: Derivation, i: int) -> Derivation:
    t = _tree_entry(_imm_claim(d), i, "condition")
    return Derivation(t.as_claim(), Rule(TREE_E_EXTRACT_CONDITION, index=i), (d,))


def tree_e_flatten_ground(d: Derivation, i: int) -> Derivation:
    c = _imm_claim(d)
    t = _tree_entry(c, i, "ground")
    claim = Immediate(
        c.grounds[:i] + (Plain(t.consequence),) + c.grounds[i + 1 :], c.conditions, c.consequence
    )
    return Derivation(claim, Rule(TREE_E_FLATTEN_GROUND, index=i), (d,))


def tree_e_flatten_condition(d: Derivation, i: int) -> Derivation:
    c = _imm_claim(d)
    t = _tree_entry(c, i, "condition")
    claim = Immediate(
        c.grounds, c.conditions[:i] + (Plain(t.consequence),) + c.conditions[i + 1 :], c.consequence
    )
    return Derivation(claim, Rule(TREE_E_FLATTEN_CONDITION, index=i), (d,))


def and_i(l: Derivation, r: Derivation) -> Derivation:
    return Derivation(And(l.conclusion, r.conclusion), Rule(AND_I), (l, r))


def and_e_l(d: Derivation) -> Derivation:
    return Derivation(d.conclusion.l, Rule(AND_E_L), (d,))


def and_e_r(d: Derivation) -> Derivation:
    return Derivation(d.conclusion.r, Rule(AND_E_R), (d,))


def or_i_l(d: Derivation, right: Formula) -> Derivation:
    return Derivation(Or(d.conclusion, right), Rule(OR_I_L), (d,))


def or_i_r(d: Derivation, left: Formula) -> Derivation:
    return Derivation(Or(left, d.conclusion), Rule(OR_I_R), (d,))


def or_e(major: Derivation, left: Derivation, right: Derivation, labels=()) -> Derivation:
    if left.conclusion != right.conclusion:
        raise ValueError("both branches of v-elimination must agree")
    return Derivation(left.conclusion, Rule(OR_E), (major, left, right), tuple(labels))


def imp_i(d: Derivation, antecedent: Formula, label: str | None = None) -> Derivation:
    labels = (label,) if label is not None else ()
    return Derivation(Imp(antecedent, d.conclusion), Rule(IMP_I), (d,), labels)


def imp_e(major: Derivation, minor: Derivation) -> Derivation:
    return Derivation(major.conclusion.r, Rule(IMP_E), (major, minor))


def neg_i(d: Derivation, negated: Formula, label: str | None = None) -> Derivation:
    labels = (label,) if label is not None else ()
    return Derivation(Neg(negated), Rule(NEG_I), (d,), labels)


def neg_e(major: Derivation, minor: Derivation) -> Derivation:
    return Derivation(Bottom(), Rule(NEG_E), (major, minor))


def bot_e(d: Derivation, conclusion: Formula) -> Derivation:
    return Derivation(conclusion, Rule(BOT_E), (d,))


# ---------------------------------------------------------------------------
# Checking


def check(d: Derivation, spec: CalculusSpec) -> CheckReport:
    """Validate every node against the base rules, the grounding rules of
    ``spec``, and the claim-operator rules.  Failures are collected, not
    raised; ok is True iff there are none."""
    failures: list[tuple[NodePath, str, str]] = []
    seen_discharge: set[str] = set()

    def fail(path: NodePath, node: Derivation, msg: str) -> None:
        failures.append((path, node.kind, msg))

    def walk(node: Derivation, path: NodePath) -> Counter:
        kind = node.kind
        if kind != HYP and node.hyp_label is not None:
            fail(path, node, "hypothesis label on a non-leaf node")
        expected_arity = (
            len(node.rule.instance.grounds) + len(node.rule.instance.conditions)
            if kind == GROUNDING and node.rule.instance is not None
            else _ARITY.get(kind)
        )
        if kind != GROUNDING and expected_arity is None:
            fail(path, node, f"unknown rule {kind!r}")
            return Counter()
        if expected_arity is not None and len(node.premisses) != expected_arity:
            fail(path, node, f"expected {expected_arity} premisses, got {len(node.premisses)}")
            for i, p in enumerate(node.premisses):
                walk(p, path + (i,))
            return Counter()
        if kind in _INDEXED and node.rule.index is None:
            fail(path, node, "missing premiss index")
            return Counter()

        child_open = [walk(p, path + (i,)) for i, p in enumerate(node.premisses)]
        open_ = Counter()
        for c in child_open:
            open_.update(c)

        def discharge(labels_needed: int, scopes: list[tuple[int, Formula]]) -> None:
            # scopes: (premiss index, formula the bound leaves must carry)
            if not node.discharged:
                return  # vacuous discharge is allowed
            if len(node.discharged) != labels_needed:
                fail(path, node, f"rule discharges {labels_needed} labels")
                return
            for label, (pi, want) in zip(node.discharged, scopes):
                if label in seen_discharge:
                    fail(path, node, f"label {label!r} discharged twice")
                seen_discharge.add(label)
                for lbl, f in list(child_open[pi]):
                    if lbl != label:
                        continue
                    if f != want:
                        fail(path, node, f"label {label!r} binds {f}, expected {want}")
                    open_[(lbl, f)] -= child_open[pi][(lbl, f)]

        concl = node.conclusion
        prem = node.premisses

        if kind == HYP:
            if node.discharged:
                fail(path, node, "hypotheses do not discharge")
            return Counter({(node.hyp_label, concl): 1})

        if kind == GROUNDING:
            inst = node.rule.instance
            if inst is None:
                fail(path, node, "grounding node without a rule instance")
            else:
                got = tuple(p.conclusion for p in prem)
                if got != inst.grounds + inst.conditions:
                    fail(path, node, "premisses do not match the instance")
                if concl != inst.conclusion:
                    fail(path, node, "conclusion does not match the instance")
                schema = spec.schema(inst.schema)
                if schema is None:
                    fail(path, node, f"no rule named {inst.schema!r} in calculus {spec.name!r}")
                else:
                    confirmed = match_schema(
                        schema, inst.grounds, inst.conditions, inst.conclusion, spec.commutative
                    )
                    if confirmed is None:
                        fail(path, node, "not a grounding rule application")
                    elif confirmed.binding != inst.binding:
                        fail(path, node, "instance binding does not match the schema")
        elif kind == IMM_I:
            p = prem[0]
            if p.kind != GROUNDING or p.rule.instance is None:
                fail(path, node, "|> introduction requires a grounding application above")
            else:
                inst = p.rule.instance
                want = Immediate(
                    tuple(Plain(f) for f in inst.grounds),
                    tuple(Plain(f) for f in inst.conditions),
                    inst.conclusion,
                )
                if concl != want:
                    fail(path, node, f"claim should be {want}")
        elif kind in (IMM_E_CONSEQUENCE, IMM_E_GROUND, IMM_E_CONDITION, IMM_E_NEG):
            c = prem[0].conclusion
            if not isinstance(c, Immediate):
                fail(path, node, "premiss is not an immediate claim")
            elif kind == IMM_E_CONSEQUENCE:
                if concl != c.consequence:
                    fail(path, node, "conclusion is not the claim's consequence")
            elif kind in (IMM_E_GROUND, IMM_E_CONDITION):
                entries = c.grounds if kind == IMM_E_GROUND else c.conditions
                i = node.rule.index
                if not 0 <= i < len(entries):
                    fail(path, node, f"index {i} out of range")
                elif not isinstance(entries[i], Plain):
                    fail(path, node, "projected entry has *> as outermost operator")
                elif concl != entries[i].f:
                    fail(path, node, "conclusion is not the projected entry")
            else:  # IMM_E_NEG
                if not spec.closed_world:
                    fail(path, node, "closed-world elimination disabled by the calculus")
                elif c.has_tree_entry():
                    fail(path, node, "closed-world elimination needs a plain claim")
                else:
                    inst = match_grounding_rule(
                        spec,
                        tuple(e.f for e in c.grounds),
                        tuple(e.f for e in c.conditions),
                        c.consequence,
                    )
                    if inst is not None:
                        fail(path, node, f"a grounding rule applies ({inst.schema})")
                    elif concl != Bottom():
                        fail(path, node, "closed-world elimination concludes bot")
        elif kind == MED_I:
            c = prem[0].conclusion
            if not isinstance(c, Immediate) or c.has_tree_entry():
                fail(path, node, "premiss is not a plain immediate claim")
            elif concl != Mediate(
                tuple(e.f for e in c.grounds), tuple(e.f for e in c.conditions), c.consequence
            ):
                fail(path, node, "claim must repeat the immediate claim verbatim")
        elif kind in (MED_I_TRANS_GROUND, MED_I_TRANS_CONDITION):
            s, h = prem[0].conclusion, prem[1].conclusion
            i = node.rule.index
            if not (isinstance(s, Mediate) and isinstance(h, Mediate)):
                fail(path, node, "both premisses must be mediate claims")
            else:
                try:
                    build = med_i_trans_ground if kind == MED_I_TRANS_GROUND else med_i_trans_condition
                    want = build(prem[0], prem[1], i).conclusion
                except (ValueError, IndexError) as e:
                    fail(path, node, str(e))
                else:
                    if concl != want:
                        fail(path, node, f"claim should be {want}")
        elif kind in (MED_E_CONSEQUENCE, MED_E_GROUND, MED_E_CONDITION):
            c = prem[0].conclusion
            if not isinstance(c, Mediate):
                fail(path, node, "premiss is not a mediate claim")
            else:
                i = node.rule.index
                if kind == MED_E_CONSEQUENCE:
                    want = c.consequence
                else:
                    parts = c.grounds if kind == MED_E_GROUND else c.conditions
                    if not 0 <= i < len(parts):
                        fail(path, node, f"index {i} out of range")
                        want = None
                    else:
                        want = parts[i]
                if want is not None and concl != want:
                    fail(path, node, "conclusion is not the projected part")
        elif kind in (TREE_I_GROUND, TREE_I_CONDITION):
            try:
                build = tree_i_ground if kind == TREE_I_GROUND else tree_i_condition
                want = build(prem[0], prem[1], node.rule.index).conclusion
            except (ValueError, IndexError) as e:
                fail(path, node, str(e))
            else:
                if concl != want:
                    fail(path, node, f"claim should be {want}")
        elif kind in (
            TREE_E_EXTRACT_GROUND,
            TREE_E_EXTRACT_CONDITION,
            TREE_E_FLATTEN_GROUND,
            TREE_E_FLATTEN_CONDITION,
        ):
            try:
                build = {
                    TREE_E_EXTRACT_GROUND: tree_e_extract_ground,
                    TREE_E_EXTRACT_CONDITION: tree_e_extract_condition,
                    TREE_E_FLATTEN_GROUND: tree_e_flatten_ground,
                    TREE_E_FLATTEN_CONDITION: tree_e_flatten_condition,
                }[kind]
                want = build(prem[0], node.rule.index).conclusion
            except (ValueError, IndexError) as e:
                fail(path, node, str(e))
            else:
                if concl != want:
                    fail(path, node, f"conclusion should be {want}")
        elif kind == AND_I:
            if concl != And(prem[0].conclusion, prem[1].conclusion):
                fail(path, node, "conclusion is not the conjunction of the premisses")
        elif kind in (AND_E_L, AND_E_R):
            c = prem[0].conclusion
            if not isinstance(c, And):
                fail(path, node, "premiss is not a conjunction")
            elif concl != (c.l if kind == AND_E_L else c.r):
                fail(path, node, "conclusion is not the projected conjunct")
        elif kind == OR_I_L:
            if not (isinstance(concl, Or) and concl.l == prem[0].conclusion):
                fail(path, node, "conclusion must add a right disjunct to the premiss")
        elif kind == OR_I_R:
            if not (isinstance(concl, Or) and concl.r == prem[0].conclusion):
                fail(path, node, "conclusion must add a left disjunct to the premiss")
        elif kind == OR_E:
            c = prem[0].conclusion
            if not isinstance(c, Or):
                fail(path, node, "major premiss is not a disjunction")
            elif not (prem[1].conclusion == prem[2].conclusion == concl):
                fail(path, node, "both minor premisses must conclude the conclusion")
            else:
                discharge(2, [(1, c.l), (2, c.r)])
        elif kind == IMP_I:
            if not isinstance(concl, Imp) or prem[0].conclusion != concl.r:
                fail(path, node, "conclusion must be an implication of the premiss")
            else:
                discharge(1, [(0, concl.l)])
        elif kind == IMP_E:
            c = prem[0].conclusion
            if not isinstance(c, Imp):
                fail(path, node, "major premiss is not an implication")
            elif prem[1].conclusion != c.l or concl != c.r:
                fail(path, node, "modus ponens shape violated")
        elif kind == NEG_I:
            if not isinstance(concl, Neg) or prem[0].conclusion != Bottom():
                fail(path, node, "negation introduction needs bot above a negated conclusion")
            else:
                discharge(1, [(0, concl.f)])
        elif kind == NEG_E:
            c = prem[0].conclusion
            if not isinstance(c, Neg):
                fail(path, node, "major premiss is not a negation")
            elif prem[1].conclusion != c.f or concl != Bottom():
                fail(path, node, "negation elimination concludes bot from A and ~A")
        elif kind == BOT_E:
            if prem[0].conclusion != Bottom():
                fail(path, node, "premiss must be bot")
        else:
            fail(path, node, f"unknown rule {kind!r}")

        if kind not in (OR_E, IMP_I, NEG_I) and node.discharged:
            fail(path, node, "this rule does not discharge hypotheses")
        return +open_

    open_hyps = walk(d, ())
    warnings = _consistency_scan(open_hyps)
    return CheckReport(ok=not failures, failures=tuple(failures), warnings=warnings)


def _consistency_scan(open_hyps: Counter) -> tuple[str, ...]:
    formulas = {f for ((_, f), cnt) in open_hyps.items() if cnt > 0}
    warnings = []
    if Bottom() in formulas:
        warnings.append("hypotheses contain bot; the hypothesis set is inconsistent")
    for f in formulas:
        if Neg(f) in formulas:
            warnings.append(
                f"hypotheses contain both {print_formula(f)} and {print_formula(Neg(f))}"
            )
    return tuple(sorted(warnings))


def open_hypotheses(d: Derivation) -> Counter:
    """Multiset of undischarged hypothesis formulas."""
    labelled = _open_labelled(d)
    out: Counter = Counter()
    for (_, f), cnt in labelled.items():
        out[f] += cnt
    return out


def _open_labelled(d: Derivation) -> Counter:
    if d.kind == HYP:
        return Counter({(d.hyp_label, d.conclusion): 1})
    child = [_open_labelled(p) for p in d.premisses]
    open_ = Counter()
    for c in child:
        open_.update(c)
    scopes: list[tuple[str, int]] = []
    if d.kind == OR_E and len(d.discharged) == 2:
        scopes = [(d.discharged[0], 1), (d.discharged[1], 2)]
    elif d.kind in (IMP_I, NEG_I) and len(d.discharged) == 1:
        scopes = [(d.discharged[0], 0)]
    for label, pi in scopes:
        for (lbl, f), cnt in child[pi].items():
            if lbl == label:
                open_[(lbl, f)] -= cnt
    return +open_


def is_grounding_derivation(d: Derivation) -> bool:
    """True iff every non-leaf node applies a grounding rule and at least one
    rule is applied (a bare hypothesis is not a grounding derivation)."""
    if d.kind == HYP:
        return False

    def only_grounding(node: Derivation) -> bool:
        if node.kind == HYP:
            return True
        return node.kind == GROUNDING and all(only_grounding(p) for p in node.premisses)

    return only_grounding(d)


def rule_applications(d: Derivation) -> int:
    if d.kind == HYP:
        return 0
    return 1 + sum(rule_applications(p) for p in d.premisses)


def grounding_applications(d: Derivation) -> int:
    own = 1 if d.kind == GROUNDING else 0
    return own + sum(grounding_applications(p) for p in d.premisses)


def node_at(d: Derivation, path: NodePath) -> Derivation:
    node = d
    for i in path:
        node = node.premisses[i]
    return node


def replace_at(d: Derivation, path: NodePath, new: Derivation) -> Derivation:
    if not path:
        return new
    i = path[0]
    prem = d.premisses[:i] + (replace_at(d.premisses[i], path[1:], new),) + d.premisses[i + 1 :]
    return Derivation(d.conclusion, d.rule, prem, d.discharged, d.hyp_label)


def iter_nodes(d: Derivation, path: NodePath = ()):
    yield path, d
    for i, p in enumerate(d.premisses):
        yield from iter_nodes(p, path + (i,))


# ---------------------------------------------------------------------------
# Proof files: s-expressions, one node per form.
#
#   node := "(" rule-name quoted-conclusion key-values child* ")"
#   leaf := "(hyp" quoted-formula [":label" ident] ")"
#
# Keys: :schema (grounding), :index (indexed rules), :label (leaves),
# :discharge (repeatable, premiss order).

_SEXPR_TOKEN = re.compile(r'\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<str>"[^"]*")|(?P<atom>[^\s()"]+))')


def _sexpr_tokens(text: str):
    pos = 0
    while pos < len(text):
        m = _SEXPR_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"bad proof file near {text[pos:pos+12]!r}", position=pos)
            break
        pos = m.end()
        if m.lastgroup == "lpar":
            yield ("(", m.start())
        elif m.lastgroup == "rpar":
            yield (")", m.start())
        elif m.lastgroup == "str":
            yield (m.group().strip()[1:-1], m.start())
        else:
            yield (m.group().strip(), m.start())
    yield (None, len(text))


def parse_derivation(text: str, spec: CalculusSpec) -> Derivation:
    """Parse a proof file.  The calculus resolves grounding schemas so that
    premisses can be split into grounds and conditions; invalid applications
    still parse and are reported by check()."""
    toks = list(_sexpr_tokens(text))
    i = 0

    def take(expect: str | None = None):
        nonlocal i
        tok, pos = toks[i]
        if expect is not None and tok != expect:
            raise ParseError(f"expected {expect!r} in proof file", position=pos)
        i += 1
        return tok, pos

    def node():
        nonlocal i
        take("(")
        name, pos = take()
        if name is None or name == "(" or name == ")":
            raise ParseError("missing rule name", position=pos)
        concl_text, pos = take()
        if concl_text is None:
            raise ParseError("missing conclusion", position=pos)
        conclusion = parse_formula(concl_text)
        schema_name = None
        index = None
        label = None
        discharged: list[str] = []
        while toks[i][0] is not None and isinstance(toks[i][0], str) and toks[i][0].startswith(":"):
            key, pos = take()
            val, vpos = take()
            if val is None:
                raise ParseError(f"missing value for {key}", position=vpos)
            if key == ":schema":
                schema_name = val
            elif key == ":index":
                index = int(val)
            elif key == ":label":
                label = val
            elif key == ":discharge":
                discharged.append(val)
            else:
                raise ParseError(f"unknown key {key!r}", position=pos)
        children = []
        while toks[i][0] == "(":
            children.append(node())
        take(")")

        if name == HYP:
            return Derivation(conclusion, Rule(HYP), (), (), label)
        if name == GROUNDING:
            if schema_name is None:
                raise ParseError("grounding node without :schema", position=pos)
            schema = spec.schema(schema_name)
            if schema is None:
                raise UnknownSchema(f"calculus {spec.name!r} has no rule {schema_name!r}")
            n = len(schema.ground_patterns)
            grounds = tuple(c.conclusion for c in children[:n])
            conditions = tuple(c.conclusion for c in children[n:])
            inst = match_schema(schema, grounds, conditions, conclusion, spec.commutative)
            if inst is None:
                inst = RuleInstance(schema_name, (), grounds, conditions, conclusion)
            return Derivation(conclusion, Rule(GROUNDING, instance=inst), tuple(children))
        if name not in _ARITY:
            raise ParseError(f"unknown rule name {name!r}", position=pos)
        return Derivation(conclusion, Rule(name, index=index), tuple(children), tuple(discharged))

    d = node()
    if toks[i][0] is not None:
        raise ParseError("trailing content in proof file", position=toks[i][1])
    return d


def print_derivation(d: Derivation) -> str:
    """Canonical proof file text; parse_derivation inverts it."""
    lines: list[str] = []

    def emit(node: Derivation, depth: int) -> None:
        head = f"({node.kind} \"{print_formula(node.conclusion)}\""
        if node.kind == GROUNDING and node.rule.instance is not None:
            head += f" :schema {node.rule.instance.schema}"
        if node.rule.index is not None:
            head += f" :index {node.rule.index}"
        if node.hyp_label is not None:
            head += f" :label {node.hyp_label}"
        for l in node.discharged:
            head += f" :discharge {l}"
        if not node.premisses:
            lines.append("  " * depth + head + ")")
            return
        lines.append("  " * depth + head)
        for p in node.premisses:
            emit(p, depth + 1)
        lines[-1] += ")"

    emit(d, 0)
    return "\n".join(lines) + "\n"
