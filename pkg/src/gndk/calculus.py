"""Grounding-calculus definitions and one-way schema matching.

A calculus is a named list of rule schemas.  Each schema relates metavariable
patterns for grounds, conditions and a conclusion; a concrete (grounds,
conditions, conclusion) triple matches when the patterns instantiate to it
positionally, binding every metavariable consistently.  Matching never
unifies: metavariables occur only on the pattern side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import DuplicateRuleName, IllFormedPattern, ParseError
from .syntax import (
    And,
    Atom,
    Bottom,
    Formula,
    Imp,
    Immediate,
    Mediate,
    MetaVar,
    Neg,
    Or,
    logical_complexity,
    parse_pattern,
    print_formula,
)

SIDE_CONDITIONS = ("none", "premiss_simpler")


@dataclass(frozen=True)
class RuleSchema:
    name: str
    ground_patterns: tuple[Formula, ...]
    condition_patterns: tuple[Formula, ...]
    conclusion_pattern: Formula
    side_condition: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "ground_patterns", tuple(self.ground_patterns))
        object.__setattr__(self, "condition_patterns", tuple(self.condition_patterns))
        if self.side_condition not in SIDE_CONDITIONS:
            raise IllFormedPattern(f"unknown side condition {self.side_condition!r}")


@dataclass(frozen=True)
class CalculusSpec:
    name: str
    schemas: tuple[RuleSchema, ...]
    closed_world: bool = False
    commutative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "schemas", tuple(self.schemas))
        seen = set()
        for s in self.schemas:
            if s.name in seen:
                raise DuplicateRuleName(f"rule {s.name!r} defined twice")
            seen.add(s.name)

    def schema(self, name: str) -> RuleSchema | None:
        for s in self.schemas:
            if s.name == name:
                return s
        return None


@dataclass(frozen=True)
class RuleInstance:
    """A schema applied to concrete formulas.

    ``binding`` is stored as sorted (name, formula) pairs so instances stay
    hashable; substituting it into the schema's patterns reproduces the
    grounds/conditions/conclusion (positional calculi).
    """

    schema: str
    binding: tuple[tuple[str, Formula], ...]
    grounds: tuple[Formula, ...]
    conditions: tuple[Formula, ...]
    conclusion: Formula

    def binding_dict(self) -> dict[str, Formula]:
        return dict(self.binding)


def substitute(pattern: Formula, binding: dict[str, Formula]) -> Formula:
    if isinstance(pattern, MetaVar):
        try:
            return binding[pattern.name]
        except KeyError:
            raise IllFormedPattern(f"unbound metavariable {pattern.name}") from None
    if isinstance(pattern, (Atom, Bottom)):
        return pattern
    if isinstance(pattern, Neg):
        return Neg(substitute(pattern.f, binding))
    if isinstance(pattern, (And, Or, Imp)):
        return type(pattern)(substitute(pattern.l, binding), substitute(pattern.r, binding))
    raise IllFormedPattern(f"unsupported pattern node {pattern!r}")


def match_pattern(pattern: Formula, f: Formula, binding: dict[str, Formula]) -> bool:
    """Extend binding so that pattern instantiates to f; False if impossible.
    Mutates binding only on a successful constructor step, so callers must
    pass a scratch dict they are prepared to discard."""
    if isinstance(pattern, MetaVar):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = f
            return True
        return bound == f
    if isinstance(pattern, (Atom, Bottom)):
        return pattern == f
    if isinstance(pattern, Neg):
        return isinstance(f, Neg) and match_pattern(pattern.f, f.f, binding)
    if isinstance(pattern, (And, Or, Imp)):
        return (
            type(f) is type(pattern)
            and match_pattern(pattern.l, f.l, binding)
            and match_pattern(pattern.r, f.r, binding)
        )
    raise IllFormedPattern(f"unsupported pattern node {pattern!r}")


def _match_lists(patterns, formulas, binding) -> bool:
    if len(patterns) != len(formulas):
        return False
    for p, f in zip(patterns, formulas):
        if not match_pattern(p, f, binding):
            return False
    return True


def _permutations(xs):
    import itertools

    return itertools.permutations(range(len(xs)))


def match_schema(
    schema: RuleSchema,
    grounds: tuple[Formula, ...],
    conditions: tuple[Formula, ...],
    conclusion: Formula,
    commutative: bool = False,
) -> RuleInstance | None:
    orders_g = _permutations(grounds) if commutative else [tuple(range(len(grounds)))]
    for og in orders_g:
        orders_c = _permutations(conditions) if commutative else [tuple(range(len(conditions)))]
        for oc in orders_c:
            binding: dict[str, Formula] = {}
            if not match_pattern(schema.conclusion_pattern, conclusion, binding):
                break  # conclusion does not depend on premiss order
            if not _match_lists(schema.ground_patterns, [grounds[i] for i in og], binding):
                continue
            if not _match_lists(schema.condition_patterns, [conditions[i] for i in oc], binding):
                continue
            if schema.side_condition == "premiss_simpler":
                bound = logical_complexity(conclusion)
                if any(logical_complexity(p) >= bound for p in grounds + conditions):
                    continue
            return RuleInstance(
                schema=schema.name,
                binding=tuple(sorted(binding.items())),
                grounds=tuple(grounds),
                conditions=tuple(conditions),
                conclusion=conclusion,
            )
    return None


def match_grounding_rule(
    spec: CalculusSpec,
    grounds,
    conditions,
    conclusion: Formula,
) -> RuleInstance | None:
    """First schema (file order) whose patterns match the triple; None when
    no rule applies — the closed-world elimination needs that as a value."""
    grounds = tuple(grounds)
    conditions = tuple(conditions)
    for schema in spec.schemas:
        inst = match_schema(schema, grounds, conditions, conclusion, spec.commutative)
        if inst is not None:
            return inst
    return None


# ---------------------------------------------------------------------------
# Calculus files


def _parse_rule_pattern(text: str) -> Formula:
    pat = parse_pattern(text)
    if isinstance(pat, (Immediate, Mediate)):
        raise IllFormedPattern(f"grounding operators are not allowed in patterns: {text!r}")
    _assert_propositional(pat, text)
    return pat


def _assert_propositional(pat: Formula, text: str) -> None:
    if isinstance(pat, (Atom, Bottom, MetaVar)):
        return
    if isinstance(pat, Neg):
        _assert_propositional(pat.f, text)
        return
    if isinstance(pat, (And, Or, Imp)):
        _assert_propositional(pat.l, text)
        _assert_propositional(pat.r, text)
        return
    raise IllFormedPattern(f"grounding operators are not allowed in patterns: {text!r}")


def load_calculus(document: str) -> CalculusSpec:
    """Parse a calculus JSON document; see the file format in the README."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise ParseError(f"calculus file is not valid JSON: {e}", position=e.pos) from None
    if not isinstance(data, dict) or "name" not in data or "rules" not in data:
        raise ParseError("calculus file must be an object with 'name' and 'rules'")
    schemas = []
    for rule in data["rules"]:
        side = rule.get("side", "none")
        if side not in SIDE_CONDITIONS:
            raise IllFormedPattern(f"unknown side condition {side!r} in rule {rule.get('name')!r}")
        schemas.append(
            RuleSchema(
                name=rule["name"],
                ground_patterns=tuple(_parse_rule_pattern(p) for p in rule.get("grounds", [])),
                condition_patterns=tuple(
                    _parse_rule_pattern(p) for p in rule.get("conditions", [])
                ),
                conclusion_pattern=_parse_rule_pattern(rule["conclusion"]),
                side_condition=side,
            )
        )
    return CalculusSpec(
        name=data["name"],
        schemas=tuple(schemas),
        closed_world=bool(data.get("closed_world", False)),
        commutative=bool(data.get("commutative", False)),
    )


def load_calculus_file(path) -> CalculusSpec:
    with open(path, encoding="utf-8") as fh:
        return load_calculus(fh.read())


def packaged_calculus(name: str = "gc-core") -> CalculusSpec:
    """Load one of the calculi shipped with the package."""
    text = resources.files("gndk").joinpath(f"calculi/{name}.json").read_text("utf-8")
    return load_calculus(text)


def gc_core() -> CalculusSpec:
    """The reference calculus: conjunction, both disjunction forms, and
    double negation, each with the premiss-simpler complexity constraint."""
    return packaged_calculus("gc-core")


def describe_instance(inst: RuleInstance) -> str:
    parts = ", ".join(print_formula(g) for g in inst.grounds)
    if inst.conditions:
        parts += " [" + ", ".join(print_formula(c) for c in inst.conditions) + "]"
    return f"{inst.schema}: {parts} => {print_formula(inst.conclusion)}"
