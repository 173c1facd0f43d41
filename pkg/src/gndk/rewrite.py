"""Detour reduction and normalization.

A redex is an elimination applied directly to the conclusion of a matching
introduction (plus the permutation case: an elimination whose major premiss
is a v-elimination).  ``reduce_redex`` implements the local reduction for
every such configuration; ``normalize`` drives them with the segment
strategy: repeatedly reduce a rightmost, uppermost segment of maximal
complexity.

Measures.  The complexity of a redex or segment is the logical complexity of
the introduced formula.  A derivation's complexity is the triple (m, n, u):
maximal segment complexity, summed length of the segments realizing it, and
rule-application count.  Reductions of claim-operator and logical detours
strictly decrease the triple lexicographically; mediate-claim detours do
not in general (their reduction can uncover a detour on a more complex
claim), so they are only reduced when ``include_mediate`` is set and the
step budget bounds the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import BudgetExhausted, StaleRedex
from .derivation import (
    AND_E_L,
    AND_E_R,
    AND_I,
    ELIM_KINDS,
    HYP,
    IMM_E_CONDITION,
    IMM_E_CONSEQUENCE,
    IMM_E_GROUND,
    IMM_I,
    IMP_E,
    IMP_I,
    INTRO_KINDS,
    MED_E_CONDITION,
    MED_E_CONSEQUENCE,
    MED_E_GROUND,
    MED_I,
    MED_I_TRANS_CONDITION,
    MED_I_TRANS_GROUND,
    NEG_E,
    NEG_I,
    OR_E,
    OR_I_L,
    OR_I_R,
    TREE_E_EXTRACT_CONDITION,
    TREE_E_EXTRACT_GROUND,
    TREE_E_FLATTEN_CONDITION,
    TREE_E_FLATTEN_GROUND,
    TREE_I_CONDITION,
    TREE_I_GROUND,
    Derivation,
    NodePath,
    Rule,
    imm_e_condition,
    imm_e_consequence,
    imm_e_ground,
    iter_nodes,
    med_e_condition,
    med_e_consequence,
    med_e_ground,
    node_at,
    replace_at,
    rule_applications,
    tree_e_extract_condition,
    tree_e_extract_ground,
    tree_e_flatten_condition,
    tree_e_flatten_ground,
    tree_i_condition,
    tree_i_ground,
)
from .syntax import Tree, logical_complexity

IMM, MED, TREE1, TREE2 = "Imm", "Med", "Tree1", "Tree2"
LOGICAL, PERMUTATION = "LogicalDetour", "Permutation"

_TREE_ELIMS = frozenset(
    {
        TREE_E_EXTRACT_GROUND,
        TREE_E_EXTRACT_CONDITION,
        TREE_E_FLATTEN_GROUND,
        TREE_E_FLATTEN_CONDITION,
    }
)
_IMM_PROJECTIONS = frozenset({IMM_E_CONSEQUENCE, IMM_E_GROUND, IMM_E_CONDITION})
_MED_ELIMS = frozenset({MED_E_CONSEQUENCE, MED_E_GROUND, MED_E_CONDITION})


@dataclass(frozen=True)
class Redex:
    """A reducible configuration located at its elimination node.

    ``route`` selects among equally sound right-hand sides where the tables
    offer a choice (a tree entry duplicated between the introduced entry's
    claim and the host claim): "host" rebuilds from the host premiss and is
    what the strategy uses; "inner" rebuilds from the nested claim.
    """

    location: NodePath
    kind: str
    complexity: int
    route: str = "host"


@dataclass(frozen=True)
class Segment:
    occurrences: tuple[NodePath, ...]
    complexity: int

    @property
    def length(self) -> int:
        return len(self.occurrences)

    @property
    def bottom(self) -> NodePath:
        return self.occurrences[-1]


class ComplexityTriple(NamedTuple):
    m: int
    n: int
    u: int


# ---------------------------------------------------------------------------
# Redex detection


def _table_kind(e: Derivation) -> str | None:
    """Redex kind formed by elimination node e over its major premiss."""
    if e.kind not in ELIM_KINDS or not e.premisses:
        return None
    major = e.premisses[0]
    ek, mk = e.kind, major.kind
    if mk == OR_E:
        return PERMUTATION
    if mk not in INTRO_KINDS:
        return None
    if ek in (AND_E_L, AND_E_R) and mk == AND_I:
        return LOGICAL
    if ek == OR_E and mk in (OR_I_L, OR_I_R):
        return LOGICAL
    if ek == IMP_E and mk == IMP_I:
        return LOGICAL
    if ek == NEG_E and mk == NEG_I:
        return LOGICAL
    if ek in _IMM_PROJECTIONS and mk == IMM_I:
        return IMM
    if ek in _MED_ELIMS and mk in (MED_I, MED_I_TRANS_GROUND, MED_I_TRANS_CONDITION):
        return MED
    if mk in (TREE_I_GROUND, TREE_I_CONDITION):
        if ek in _IMM_PROJECTIONS:
            return TREE2
        if ek in _TREE_ELIMS:
            same_side = (
                mk == TREE_I_GROUND
                and ek in (TREE_E_EXTRACT_GROUND, TREE_E_FLATTEN_GROUND)
            ) or (
                mk == TREE_I_CONDITION
                and ek in (TREE_E_EXTRACT_CONDITION, TREE_E_FLATTEN_CONDITION)
            )
            if same_side and e.rule.index == major.rule.index:
                return TREE1
            return TREE2
    return None


def find_redexes(d: Derivation) -> list[Redex]:
    """All reducible configurations, in preorder of their elimination node."""
    out = []
    for path, node in iter_nodes(d):
        kind = _table_kind(node)
        if kind is not None:
            out.append(Redex(path, kind, logical_complexity(node.premisses[0].conclusion)))
    return out


def is_normal(d: Derivation) -> bool:
    return not find_redexes(d)


# ---------------------------------------------------------------------------
# Label hygiene for duplicating reductions


def _labels_in(d: Derivation) -> set[str]:
    labels = set()
    for _, n in iter_nodes(d):
        labels.update(n.discharged)
        if n.hyp_label is not None:
            labels.add(n.hyp_label)
    return labels


class _LabelSupply:
    def __init__(self, used: set[str]):
        self.used = set(used)
        self.counter = 0

    def fresh(self) -> str:
        while True:
            self.counter += 1
            name = f"h{self.counter}"
            if name not in self.used:
                self.used.add(name)
                return name


def _freshen_copy(node: Derivation, supply: _LabelSupply) -> Derivation:
    """Rename every discharge label inside ``node`` (with its bound leaves)
    so a duplicated subderivation cannot collide with the original."""

    def walk(n: Derivation, env: dict[str, str]) -> Derivation:
        if n.kind == HYP:
            if n.hyp_label in env:
                return Derivation(n.conclusion, n.rule, (), (), env[n.hyp_label])
            return n
        discharged = n.discharged
        child_envs = [env] * len(n.premisses)
        if n.kind in (IMP_I, NEG_I) and len(discharged) == 1:
            new = supply.fresh()
            child_envs[0] = {**env, discharged[0]: new}
            discharged = (new,)
        elif n.kind == OR_E and len(discharged) == 2:
            n1, n2 = supply.fresh(), supply.fresh()
            child_envs[1] = {**env, discharged[0]: n1}
            child_envs[2] = {**env, discharged[1]: n2}
            discharged = (n1, n2)
        prem = tuple(walk(p, child_envs[i]) for i, p in enumerate(n.premisses))
        return Derivation(n.conclusion, n.rule, prem, discharged, n.hyp_label)

    return walk(node, {})


def _relabel_leaves(node: Derivation, old: str, new: str) -> Derivation:
    if node.kind == HYP:
        if node.hyp_label == old:
            return Derivation(node.conclusion, node.rule, (), (), new)
        return node
    prem = tuple(_relabel_leaves(p, old, new) for p in node.premisses)
    return Derivation(node.conclusion, node.rule, prem, node.discharged, node.hyp_label)


def _subst_hyp(body: Derivation, label: str | None, repl: Derivation, supply: _LabelSupply) -> Derivation:
    """Replace every leaf labeled ``label`` by ``repl``; copies beyond the
    first get their internal discharge labels freshened."""
    if label is None:
        return body
    count = 0

    def walk(n: Derivation) -> Derivation:
        nonlocal count
        if n.kind == HYP:
            if n.hyp_label == label:
                count += 1
                return repl if count == 1 else _freshen_copy(repl, supply)
            return n
        prem = tuple(walk(p) for p in n.premisses)
        return Derivation(n.conclusion, n.rule, prem, n.discharged, n.hyp_label)

    return walk(body)


# ---------------------------------------------------------------------------
# Local reductions


def _reduced(e: Derivation, kind: str, route: str, supply: _LabelSupply) -> Derivation:
    major = e.premisses[0]
    ek, mk = e.kind, major.kind

    if kind == LOGICAL:
        if ek == AND_E_L:
            return major.premisses[0]
        if ek == AND_E_R:
            return major.premisses[1]
        if ek == IMP_E:
            label = major.discharged[0] if major.discharged else None
            return _subst_hyp(major.premisses[0], label, e.premisses[1], supply)
        if ek == NEG_E:
            label = major.discharged[0] if major.discharged else None
            return _subst_hyp(major.premisses[0], label, e.premisses[1], supply)
        if ek == OR_E:
            branch = 1 if mk == OR_I_L else 2
            label = e.discharged[branch - 1] if e.discharged else None
            return _subst_hyp(e.premisses[branch], label, major.premisses[0], supply)
        raise StaleRedex(f"not a logical detour: {ek} over {mk}")

    if kind == IMM:
        g = major.premisses[0]  # the grounding application
        inst = g.rule.instance
        if ek == IMM_E_CONSEQUENCE:
            return g
        if ek == IMM_E_GROUND:
            return g.premisses[e.rule.index]
        if ek == IMM_E_CONDITION:
            return g.premisses[len(inst.grounds) + e.rule.index]
        raise StaleRedex(f"not an immediate-claim detour: {ek}")

    if kind == MED:
        sub, host = (major.premisses + (None,))[:2]
        if mk == MED_I:
            c = major.premisses[0]
            if ek == MED_E_CONSEQUENCE:
                return imm_e_consequence(c)
            if ek == MED_E_GROUND:
                return imm_e_ground(c, e.rule.index)
            return imm_e_condition(c, e.rule.index)
        if mk == MED_I_TRANS_GROUND:
            s0 = major.rule.index
            k = len(sub.conclusion.grounds)
            l = len(sub.conclusion.conditions)
            if ek == MED_E_CONSEQUENCE:
                return med_e_consequence(host)
            if ek == MED_E_GROUND:
                i = e.rule.index
                if i < s0:
                    return med_e_ground(host, i)
                if i < s0 + k:
                    return med_e_ground(sub, i - s0)
                return med_e_ground(host, i - k + 1)
            j = e.rule.index
            if j < l:
                return med_e_condition(sub, j)
            return med_e_condition(host, j - l)
        if mk == MED_I_TRANS_CONDITION:
            c0 = major.rule.index
            k = len(sub.conclusion.grounds)
            l = len(sub.conclusion.conditions)
            if ek == MED_E_CONSEQUENCE:
                return med_e_consequence(host)
            if ek == MED_E_GROUND:
                return med_e_ground(host, e.rule.index)
            j = e.rule.index
            if j < c0:
                return med_e_condition(host, j)
            if j < c0 + k:
                return med_e_ground(sub, j - c0)
            if j < c0 + k + l:
                return med_e_condition(sub, j - c0 - k)
            return med_e_condition(host, j - k - l + 1)
        raise StaleRedex(f"not a mediate-claim detour: {ek} over {mk}")

    if kind == TREE1:
        sub, host = major.premisses
        if ek in (TREE_E_EXTRACT_GROUND, TREE_E_EXTRACT_CONDITION):
            return sub
        return host

    if kind == TREE2:
        sub, host = major.premisses
        if route == "inner":
            return _tree2_inner(e, sub)
        builders = {
            IMM_E_CONSEQUENCE: lambda d: imm_e_consequence(d),
            IMM_E_GROUND: lambda d: imm_e_ground(d, e.rule.index),
            IMM_E_CONDITION: lambda d: imm_e_condition(d, e.rule.index),
            TREE_E_EXTRACT_GROUND: lambda d: tree_e_extract_ground(d, e.rule.index),
            TREE_E_EXTRACT_CONDITION: lambda d: tree_e_extract_condition(d, e.rule.index),
            TREE_E_FLATTEN_GROUND: lambda d: tree_e_flatten_ground(d, e.rule.index),
            TREE_E_FLATTEN_CONDITION: lambda d: tree_e_flatten_condition(d, e.rule.index),
        }
        try:
            redirected = builders[ek](host)
        except (ValueError, IndexError) as err:
            raise StaleRedex(str(err)) from None
        if ek in (TREE_E_FLATTEN_GROUND, TREE_E_FLATTEN_CONDITION):
            # flattening elsewhere keeps the introduced entry in its
            # conclusion, so the introduction is replayed below the
            # elimination instead of vanishing
            intro = tree_i_ground if mk == TREE_I_GROUND else tree_i_condition
            redirected = intro(sub, redirected, major.rule.index)
        if redirected.conclusion != e.conclusion:
            raise StaleRedex("reduction does not preserve the conclusion")
        return redirected

    if kind == PERMUTATION:
        return _permute(e, supply)

    raise StaleRedex(f"unknown redex kind {kind!r}")


def _tree2_inner(e: Derivation, sub: Derivation) -> Derivation:
    """Duplicate-entry variant: the extracted claim also occurs as a tree
    entry of the introduced entry's own claim, so eliminate from there."""
    if e.kind not in (TREE_E_EXTRACT_GROUND, TREE_E_EXTRACT_CONDITION):
        raise StaleRedex("the inner route applies to extractions only")
    claim = sub.conclusion
    for i, entry in enumerate(claim.grounds):
        if isinstance(entry, Tree) and entry.as_claim() == e.conclusion:
            return tree_e_extract_ground(sub, i)
    for i, entry in enumerate(claim.conditions):
        if isinstance(entry, Tree) and entry.as_claim() == e.conclusion:
            return tree_e_extract_condition(sub, i)
    raise StaleRedex("extracted claim does not occur in the nested claim")


def _permute(e: Derivation, supply: _LabelSupply) -> Derivation:
    """Push an elimination above the v-elimination that feeds its major
    premiss; the elimination's remaining premisses are duplicated into both
    branches, with discharge labels kept globally unique."""
    o = e.premisses[0]
    d0, b1, b2 = o.premisses
    l1 = l2 = None
    if len(o.discharged) == 2:
        # fresh labels: the branches now also contain e's side premisses,
        # whose open hypotheses must not be captured
        l1, l2 = supply.fresh(), supply.fresh()
        b1 = _relabel_leaves(b1, o.discharged[0], l1)
        b2 = _relabel_leaves(b2, o.discharged[1], l2)
    rest = e.premisses[1:]
    e1 = Derivation(e.conclusion, e.rule, (b1,) + rest, e.discharged)
    e2 = _freshen_copy(Derivation(e.conclusion, e.rule, (b2,) + rest, e.discharged), supply)
    discharged = (l1, l2) if l1 is not None else ()
    return Derivation(e.conclusion, Rule(OR_E), (d0, e1, e2), discharged)


def reduce_redex(d: Derivation, r: Redex) -> Derivation:
    """Apply one reduction; the conclusion at the redex location and of the
    whole derivation is preserved."""
    try:
        e = node_at(d, r.location)
    except IndexError:
        raise StaleRedex(f"no node at {r.location}") from None
    kind = _table_kind(e)
    if kind != r.kind:
        raise StaleRedex(f"expected a {r.kind} redex at {r.location}, found {kind}")
    supply = _LabelSupply(_labels_in(d))
    new_sub = _reduced(e, kind, r.route, supply)
    if new_sub.conclusion != e.conclusion:
        raise StaleRedex("reduction does not preserve the conclusion")
    return replace_at(d, r.location, new_sub)


# ---------------------------------------------------------------------------
# Segments and the complexity triple


def segments(d: Derivation) -> list[Segment]:
    """All maximal segments.  A segment chains minor premisses of
    v-eliminations into their conclusions; every other occurrence forms a
    singleton.  Complexity is the formula's complexity when the segment ends
    at the major premiss of an elimination and either has length > 1 or
    starts at an introduction's conclusion; otherwise 0."""
    nodes = dict(iter_nodes(d))
    out = []
    for start in nodes:
        if nodes[start].kind == OR_E:
            continue  # clause on the top end: conclusions of v-elim continue segments
        chain = [start]
        while True:
            cur = chain[-1]
            if cur and nodes[cur[:-1]].kind == OR_E and cur[-1] in (1, 2):
                chain.append(cur[:-1])
            else:
                break
        out.append(Segment(tuple(chain), _segment_complexity(nodes, chain)))
    out.sort(key=lambda s: s.occurrences[0])
    return out


def _segment_complexity(nodes, chain) -> int:
    bottom = chain[-1]
    if not bottom:
        return 0
    parent = nodes[bottom[:-1]]
    ends_at_major = parent.kind in ELIM_KINDS and bottom[-1] == 0
    if not ends_at_major:
        return 0
    if len(chain) > 1 or nodes[chain[0]].kind in INTRO_KINDS:
        return logical_complexity(nodes[bottom].conclusion)
    return 0


def derivation_complexity(d: Derivation) -> ComplexityTriple:
    """(m, n, u); (0, 0, u) exactly when the derivation is normal."""
    return _triple(segments(d), rule_applications(d))


def strategy_complexity(d: Derivation, include_mediate: bool = True) -> ComplexityTriple:
    """The measure the normalization strategy descends on; differs from
    derivation_complexity only when mediate detours are excluded."""
    return _triple(_effective_segments(d, include_mediate), rule_applications(d))


def _triple(segs, u: int) -> ComplexityTriple:
    m = max((s.complexity for s in segs), default=0)
    if m == 0:
        return ComplexityTriple(0, 0, u)
    n = sum(s.length for s in segs if s.complexity == m)
    return ComplexityTriple(m, n, u)


# ---------------------------------------------------------------------------
# Normalization strategy


def _effective_segments(d: Derivation, include_mediate: bool):
    """Segments as the strategy weighs them: with mediate detours excluded,
    their singleton segments count as complexity 0 and stay in place."""
    nodes = dict(iter_nodes(d))
    segs = segments(d)
    if include_mediate:
        return segs
    out = []
    for s in segs:
        if s.complexity > 0 and s.length == 1:
            e = nodes[s.bottom[:-1]]
            if _table_kind(e) == MED:
                s = Segment(s.occurrences, 0)
        out.append(s)
    return out


def _select_redex(d: Derivation, include_mediate: bool) -> Redex | None:
    segs = _effective_segments(d, include_mediate)
    m = max((s.complexity for s in segs), default=0)
    if m == 0:
        return None
    # rightmost, then uppermost: later premisses compare greater, and a path
    # extension (further from the root) compares greater than its prefix
    best = max((s for s in segs if s.complexity == m), key=lambda s: s.bottom)
    e_path = best.bottom[:-1]
    e = node_at(d, e_path)
    kind = PERMUTATION if best.length > 1 else _table_kind(e)
    if kind is None:
        raise AssertionError(f"segment at {best.bottom} has no reducible configuration")
    return Redex(e_path, kind, best.complexity)


def normalize(
    d: Derivation, include_mediate: bool = False, step_budget: int = 10000
) -> tuple[Derivation, list[tuple[Redex, ComplexityTriple]]]:
    """Reduce until no eligible redex remains.  Returns the result and the
    trace: the redex reduced at each step with the measure after the step.
    Without mediate detours the measure strictly decreases and termination
    is guaranteed; with them the step budget is the only bound and
    BudgetExhausted carries the partial result."""
    trace: list[tuple[Redex, ComplexityTriple]] = []
    current = d
    for _ in range(step_budget):
        r = _select_redex(current, include_mediate)
        if r is None:
            return current, trace
        current = reduce_redex(current, r)
        trace.append(
            (r, _triple(_effective_segments(current, include_mediate), rule_applications(current)))
        )
    if _select_redex(current, include_mediate) is None:
        return current, trace
    raise BudgetExhausted(current, trace)
