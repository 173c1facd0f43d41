"""Deterministic random construction of grounding derivations, detour
injection, and brute-force oracles for the bigger test suites."""

from __future__ import annotations

import random

from gndk.calculus import match_grounding_rule, substitute
from gndk.derivation import (
    GROUNDING,
    Derivation,
    and_e_l,
    and_i,
    grounding,
    hyp,
    imm_e_consequence,
    imm_i,
    imp_e,
    imp_i,
    iter_nodes,
    or_e,
    or_i_l,
    tree_e_flatten_ground,
    tree_i_ground,
)
from gndk.syntax import And, Atom, Imp, Neg, Or

ATOMS = tuple(Atom(x) for x in "pqrstuvw")


def rand_prop(rng: random.Random, depth: int = 2):
    if depth == 0 or rng.random() < 0.4:
        return rng.choice(ATOMS)
    k = rng.randrange(4)
    if k == 0:
        return Neg(rand_prop(rng, depth - 1))
    ctor = (And, Or, Imp)[k - 1]
    return ctor(rand_prop(rng, depth - 1), rand_prop(rng, depth - 1))


def rand_groundable(rng: random.Random, depth: int = 2):
    """A formula some gc-core rule can conclude."""
    k = rng.randrange(4)
    a, b = rand_prop(rng, depth - 1), rand_prop(rng, depth - 1)
    if k == 0:
        return And(a, b)
    if k == 1:
        return Or(a, b)
    if k == 2:
        # the or_l condition for this shape is ~~b, itself derivable, so
        # derivations with condition subtrees (and bars crossing them) arise
        return Or(a, Neg(b))
    return Neg(Neg(a))


def _rule_options(f):
    opts = []
    if isinstance(f, And):
        opts.append(((f.l, f.r), ()))
    if isinstance(f, Or):
        opts.append(((f.l,), (Neg(f.r),)))
        opts.append(((f.r,), (Neg(f.l),)))
        opts.append(((f.l, f.r), ()))
    if isinstance(f, Neg) and isinstance(f.f, Neg):
        opts.append(((f.f.f,), ()))
    return opts


def grounding_derivation(rng: random.Random, max_rules: int, spec) -> Derivation:
    """A random gc-core grounding derivation with at most max_rules
    applications (at least one)."""
    budget = [rng.randint(1, max_rules) - 1]

    def derive(f, force: bool) -> Derivation:
        opts = _rule_options(f)
        if opts and (force or (budget[0] > 0 and rng.random() < 0.7)):
            if not force:
                budget[0] -= 1
            grounds, conds = rng.choice(opts)
            premisses = [derive(g, False) for g in grounds]
            premisses += [derive(c, False) for c in conds]
            inst = match_grounding_rule(spec, grounds, conds, f)
            assert inst is not None
            return grounding(inst, premisses)
        return hyp(f)

    return derive(rand_groundable(rng), True)


class _Labels:
    def __init__(self):
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"u{self.n}"


def _has_dischargers(d: Derivation) -> bool:
    return any(n.discharged for _, n in iter_nodes(d))


def inject_detours(rng: random.Random, d: Derivation, max_wraps: int = 3) -> Derivation:
    """Wrap subderivations of a grounding derivation in conclusion-preserving
    detours: claim-operator detours, logical detours, and v-elimination
    permutation configurations.  No mediate rules are used, and every
    discharge label binds at most one leaf.

    Claim-level detours go in first and are label-free, so the duplication
    they involve cannot collide discharge labels; labelled logical wraps are
    added afterwards, never between a claim introduction and its grounding
    application.
    """
    labels = _Labels()
    wraps = [0]

    def logical_wrap(s: Derivation) -> Derivation:
        f = s.conclusion
        choice = rng.randrange(3)
        if choice == 0:
            return and_e_l(and_i(s, hyp(rand_prop(rng, 1))))
        if choice == 1:
            l = labels.fresh()
            return imp_e(imp_i(hyp(f, l), f, l), s)
        l1, l2 = labels.fresh(), labels.fresh()
        return or_e(or_i_l(s, rand_prop(rng, 1)), hyp(f, l1), hyp(f), (l1, l2))

    def claim_wrap(s: Derivation, allow_labels: bool) -> Derivation:
        # s applies a grounding rule; detour through its claim
        claim = imm_i(s)
        nested = [
            j
            for j, p in enumerate(s.premisses[: len(s.rule.instance.grounds)])
            if p.kind == GROUNDING and not _has_dischargers(p)
        ]
        choice = rng.randrange(5)
        if choice == 0 or not nested:
            if not allow_labels or rng.random() < 0.5:
                return imm_e_consequence(claim)
            # permutation configuration on the claim level
            l1, l2 = labels.fresh(), labels.fresh()
            sandwich = or_e(
                or_i_l(claim, rand_prop(rng, 1)),
                hyp(claim.conclusion, l1),
                hyp(claim.conclusion),
                (l1, l2),
            )
            return imm_e_consequence(sandwich)
        if choice == 1 and len(nested) >= 2:
            # flatten under an introduction at a different position
            j, k = rng.sample(nested, 2)
            t1 = tree_i_ground(imm_i(s.premisses[k]), claim, k)
            t2 = tree_i_ground(imm_i(s.premisses[j]), t1, j)
            flat = tree_e_flatten_ground(tree_e_flatten_ground(t2, k), j)
            return imm_e_consequence(flat)
        j = rng.choice(nested)
        t = tree_i_ground(imm_i(s.premisses[j]), claim, j)
        if choice in (1, 2):
            return imm_e_consequence(tree_e_flatten_ground(t, j))
        return imm_e_consequence(t)

    def claim_pass(node: Derivation, is_root: bool) -> Derivation:
        prem = tuple(claim_pass(p, False) for p in node.premisses)
        s = Derivation(node.conclusion, node.rule, prem, node.discharged, node.hyp_label)
        if s.kind == GROUNDING and wraps[0] < max_wraps:
            if rng.random() < (0.6 if is_root else 0.3):
                s = claim_wrap(s, allow_labels=is_root)
                wraps[0] += 1
        return s

    def logical_pass(node: Derivation, parent_kind: str | None) -> Derivation:
        prem = tuple(logical_pass(p, node.kind) for p in node.premisses)
        s = Derivation(node.conclusion, node.rule, prem, node.discharged, node.hyp_label)
        while parent_kind != "imm_i" and wraps[0] < max_wraps and rng.random() < 0.15:
            s = logical_wrap(s)
            wraps[0] += 1
        return s

    out = logical_pass(claim_pass(d, True), None)
    if wraps[0] == 0:
        out = claim_wrap(out, True) if out.kind == GROUNDING else logical_wrap(out)
    return out


# ---------------------------------------------------------------------------
# Brute-force oracles


def brute_force_bars(d: Derivation) -> set[frozenset]:
    """All bars by subset enumeration over non-root nodes: keep exactly the
    subsets meeting every root-leaf path exactly once."""
    nodes = [path for path, _ in iter_nodes(d) if path != ()]
    index = {p: i for i, p in enumerate(nodes)}
    path_masks = []

    def walk(node: Derivation, path, mask: int):
        if path != ():
            mask |= 1 << index[path]
        if not node.premisses:
            path_masks.append(mask)
            return
        for i, p in enumerate(node.premisses):
            walk(p, path + (i,), mask)

    walk(d, (), 0)
    out = set()
    for subset in range(1 << len(nodes)):
        if all((subset & pm).bit_count() == 1 for pm in path_masks):
            out.add(frozenset(p for p in nodes if subset & (1 << index[p])))
    return out


def brute_force_match_exists(schema, grounds, conds, concl) -> bool:
    """Schema matching by enumerating every metavariable assignment over the
    subformulas of the query triple."""
    from itertools import product

    from gndk.syntax import MetaVar, child_nodes, logical_complexity

    if len(schema.ground_patterns) != len(grounds):
        return False
    if len(schema.condition_patterns) != len(conds):
        return False

    def metavars(pat, acc):
        if isinstance(pat, MetaVar):
            acc.add(pat.name)
        for kid in child_nodes(pat):
            metavars(kid, acc)
        return acc

    names = sorted(
        set().union(
            *(
                metavars(p, set())
                for p in schema.ground_patterns
                + schema.condition_patterns
                + (schema.conclusion_pattern,)
            )
        )
    )

    pool = set()

    def subformulas(f):
        pool.add(f)
        for kid in child_nodes(f):
            subformulas(kid)

    for f in tuple(grounds) + tuple(conds) + (concl,):
        subformulas(f)
    pool = sorted(pool, key=str)

    targets = tuple(grounds) + tuple(conds) + (concl,)
    patterns = schema.ground_patterns + schema.condition_patterns + (schema.conclusion_pattern,)
    for combo in product(pool, repeat=len(names)):
        binding = dict(zip(names, combo))
        try:
            if all(substitute(p, binding) == t for p, t in zip(patterns, targets)):
                if schema.side_condition == "premiss_simpler":
                    bound = logical_complexity(concl)
                    if any(
                        logical_complexity(x) >= bound for x in tuple(grounds) + tuple(conds)
                    ):
                        continue
                return True
        except Exception:
            continue
    return False
