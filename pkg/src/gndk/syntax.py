"""Formula language: AST, parser, printer, complexity, occurrence paths.

The surface syntax is plain ASCII:

    atoms        [a-z][a-z0-9_]*          ("bot" is reserved for falsum)
    connectives  ~  &  |  ->              (precedence ~ > & > | > ->)
    immediate    p, q [~r] |> s           grounds [conditions] |> consequence
    mediate      p, q [~r] >> s           arguments are plain formulas
    tree entry   (p, q [~r] *> s)         only inside an entry list, always
                                          parenthesized, never a formula

Nested grounding claims used as formulas are parenthesized, e.g.
``(p |> q) & r``.  Conditions are omitted when empty.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import BadOccurrence, GrammarViolation, NotAGroundingTree, ParseError


# ---------------------------------------------------------------------------
# AST


class Formula:
    """Base class for formulas; instances are immutable and hashable."""

    def __str__(self) -> str:
        return print_formula(self)


_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if self.name == "bot" or not _ATOM_RE.match(self.name):
            raise GrammarViolation(f"bad atom name {self.name!r}")


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Neg(Formula):
    f: Formula


@dataclass(frozen=True)
class And(Formula):
    l: Formula
    r: Formula


@dataclass(frozen=True)
class Or(Formula):
    l: Formula
    r: Formula


@dataclass(frozen=True)
class Imp(Formula):
    l: Formula
    r: Formula


class GroundEntry:
    """Element of an immediate claim's ground or condition list."""


@dataclass(frozen=True)
class Plain(GroundEntry):
    f: Formula


@dataclass(frozen=True)
class Tree(GroundEntry):
    """Nested grounding step ``(grounds [conditions] *> consequence)``.

    Tree entries occur only inside entry lists; they are never formulas.
    """

    grounds: tuple[GroundEntry, ...]
    conditions: tuple[GroundEntry, ...]
    consequence: Formula

    def __post_init__(self):
        object.__setattr__(self, "grounds", tuple(_as_entry(e) for e in self.grounds))
        object.__setattr__(self, "conditions", tuple(_as_entry(e) for e in self.conditions))
        if not self.grounds:
            raise GrammarViolation("tree entry needs a non-empty ground list")

    def as_claim(self) -> "Immediate":
        """Read the entry as the immediate claim it abbreviates."""
        return Immediate(self.grounds, self.conditions, self.consequence)


@dataclass(frozen=True)
class Immediate(Formula):
    grounds: tuple[GroundEntry, ...]
    conditions: tuple[GroundEntry, ...]
    consequence: Formula

    def __post_init__(self):
        object.__setattr__(self, "grounds", tuple(_as_entry(e) for e in self.grounds))
        object.__setattr__(self, "conditions", tuple(_as_entry(e) for e in self.conditions))
        if not self.grounds:
            raise GrammarViolation("immediate claim needs a non-empty ground list")

    @property
    def entries(self) -> tuple[GroundEntry, ...]:
        return self.grounds + self.conditions

    def has_tree_entry(self) -> bool:
        return any(isinstance(e, Tree) for e in self.entries)


@dataclass(frozen=True)
class Mediate(Formula):
    grounds: tuple[Formula, ...]
    conditions: tuple[Formula, ...]
    consequence: Formula

    def __post_init__(self):
        object.__setattr__(self, "grounds", tuple(self.grounds))
        object.__setattr__(self, "conditions", tuple(self.conditions))
        if not self.grounds:
            raise GrammarViolation("mediate claim needs a non-empty ground list")
        for f in self.grounds + self.conditions:
            if not isinstance(f, Formula):
                raise GrammarViolation("mediate claim arguments must be plain formulas")


@dataclass(frozen=True)
class MetaVar(Formula):
    """Schematic placeholder in rule patterns; never part of a concrete formula."""

    name: str


def _as_entry(e: Union[Formula, GroundEntry]) -> GroundEntry:
    if isinstance(e, GroundEntry):
        return e
    if isinstance(e, Formula):
        return Plain(e)
    raise GrammarViolation(f"not a ground entry: {e!r}")


BOT = Bottom()

# Path into a formula, as child indices; see child_nodes for the numbering.
OccPath = tuple[int, ...]


def entry_formula(e: GroundEntry) -> Formula:
    """The formula an entry contributes to its claim (a tree's consequence)."""
    return e.f if isinstance(e, Plain) else e.consequence


def child_nodes(node) -> tuple:
    """Addressable children of a formula or tree entry.

    For claims the order is: ground entries, condition entries, consequence.
    Plain entries are transparent (the entry's formula is the child).
    """
    if isinstance(node, (Atom, Bottom, MetaVar)):
        return ()
    if isinstance(node, Neg):
        return (node.f,)
    if isinstance(node, (And, Or, Imp)):
        return (node.l, node.r)
    if isinstance(node, (Immediate, Tree)):
        kids = tuple(e.f if isinstance(e, Plain) else e for e in node.grounds + node.conditions)
        return kids + (node.consequence,)
    if isinstance(node, Mediate):
        return node.grounds + node.conditions + (node.consequence,)
    raise TypeError(f"not a formula node: {node!r}")


def subterm_at(f: Formula, path: OccPath):
    """Node addressed by path; raises BadOccurrence on an invalid step."""
    node = f
    for i, idx in enumerate(path):
        kids = child_nodes(node)
        if not 0 <= idx < len(kids):
            raise BadOccurrence(f"index {idx} out of range at {path[:i]}")
        node = kids[idx]
    return node


def operator_occurrences(f: Formula) -> list[tuple[OccPath, str]]:
    """All grounding-operator occurrences as (path, kind) with kind in
    {"imm", "med", "tree"}, in preorder."""
    out: list[tuple[OccPath, str]] = []

    def walk(node, path: OccPath):
        if isinstance(node, Immediate):
            out.append((path, "imm"))
        elif isinstance(node, Mediate):
            out.append((path, "med"))
        elif isinstance(node, Tree):
            out.append((path, "tree"))
        for i, kid in enumerate(child_nodes(node)):
            walk(kid, path + (i,))

    walk(f, ())
    return out


def holds(f: Formula, outer: OccPath, inner: OccPath) -> bool:
    """Whether the claim operator at ``outer`` holds the tree operator at
    ``inner``: the inner entry heads one of the outer's ground/condition
    slots, or is reached through a chain of such tree entries."""
    onode = subterm_at(f, outer)
    if not isinstance(onode, (Immediate, Tree)):
        raise BadOccurrence(f"outer path {outer} is not a |> or *> occurrence")
    inode = subterm_at(f, inner)
    if not isinstance(inode, Tree):
        raise BadOccurrence(f"inner path {inner} is not a *> occurrence")
    if len(inner) <= len(outer) or inner[: len(outer)] != outer:
        return False
    node = onode
    for idx in inner[len(outer) :]:
        n_entries = len(node.grounds) + len(node.conditions)
        if idx >= n_entries:
            return False
        node = child_nodes(node)[idx]
        if not isinstance(node, Tree):
            return False
    return True


def logical_complexity(f) -> int:
    """Symbol count: one per atom, falsum, connective, or grounding operator;
    brackets and commas do not count.  Strictly monotone in subformulas."""
    if isinstance(f, (Atom, Bottom)):
        return 1
    if isinstance(f, MetaVar):
        raise ValueError("metavariables have no logical complexity")
    if isinstance(f, Neg):
        return 1 + logical_complexity(f.f)
    if isinstance(f, (And, Or, Imp)):
        return 1 + logical_complexity(f.l) + logical_complexity(f.r)
    if isinstance(f, Plain):
        return logical_complexity(f.f)
    if isinstance(f, (Immediate, Tree)):
        return (
            1
            + sum(logical_complexity(e) for e in f.grounds + f.conditions)
            + logical_complexity(f.consequence)
        )
    if isinstance(f, Mediate):
        return (
            1
            + sum(logical_complexity(g) for g in f.grounds + f.conditions)
            + logical_complexity(f.consequence)
        )
    raise TypeError(f"not a formula: {f!r}")


def tree_size(f: Formula) -> int:
    """Number of immediate grounding steps encoded by a claim: 1 for a plain
    claim, plus the size of every tree entry read as a claim."""
    if not isinstance(f, Immediate):
        raise NotAGroundingTree(f"not an immediate grounding claim: {f}")
    return 1 + sum(tree_size(e.as_claim()) for e in f.entries if isinstance(e, Tree))


def validate_formula(f: Formula) -> None:
    """Enforce the grammar invariants; raises GrammarViolation.

    Constructors already reject the cheap violations; this re-walks the whole
    term so parsed and hand-built values meet the same contract.
    """
    if isinstance(f, (Tree, GroundEntry)) and not isinstance(f, Plain):
        raise GrammarViolation("a tree entry is not a formula")
    if isinstance(f, MetaVar):
        raise GrammarViolation("metavariable in a concrete formula")

    def walk(node):
        if isinstance(node, Mediate):
            for g in node.grounds + node.conditions:
                if isinstance(g, (Tree, GroundEntry)) and not isinstance(g, Plain):
                    raise GrammarViolation("tree entry inside a mediate claim")
        if isinstance(node, MetaVar):
            raise GrammarViolation("metavariable in a concrete formula")
        for kid in child_nodes(node):
            walk(kid)

    walk(f)


def unordered(f):
    """Canonical representative with ground/condition lists sorted; use to
    compare claims when argument order is irrelevant (e.g. bar contents)."""
    if isinstance(f, (Atom, Bottom, MetaVar)):
        return f
    if isinstance(f, Neg):
        return Neg(unordered(f.f))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(unordered(f.l), unordered(f.r))
    if isinstance(f, Plain):
        return Plain(unordered(f.f))
    if isinstance(f, Tree):
        return Tree(
            _sorted_entries(f.grounds), _sorted_entries(f.conditions), unordered(f.consequence)
        )
    if isinstance(f, Immediate):
        return Immediate(
            _sorted_entries(f.grounds), _sorted_entries(f.conditions), unordered(f.consequence)
        )
    if isinstance(f, Mediate):
        return Mediate(
            tuple(sorted((unordered(g) for g in f.grounds), key=_entry_key)),
            tuple(sorted((unordered(c) for c in f.conditions), key=_entry_key)),
            unordered(f.consequence),
        )
    raise TypeError(f"not a formula: {f!r}")


def _sorted_entries(entries):
    return tuple(sorted((unordered(e) for e in entries), key=_entry_key))


def _entry_key(e):
    return _print_entry(e) if isinstance(e, GroundEntry) else print_formula(e)


def claims_equal_unordered(a: Formula, b: Formula) -> bool:
    return unordered(a) == unordered(b)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<meta>[A-Z][A-Za-z0-9_]*)
  | (?P<imm>\|\>)
  | (?P<med>\>\>)
  | (?P<tree>\*\>)
  | (?P<arrow>-\>)
  | (?P<or>\|)
  | (?P<and>&)
  | (?P<neg>~)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<lbrack>\[)
  | (?P<rbrack>\])
  | (?P<comma>,)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


# ---------------------------------------------------------------------------
# Parser

_TREE_MARKER = object()  # sentinel context, see _Parser._group


class _Parser:
    def __init__(self, text: str, allow_metavars: bool = False):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_metavars = allow_metavars

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str | None = None) -> _Tok:
        t = self.toks[self.i]
        if kind is not None and t.kind != kind:
            raise ParseError(
                f"expected {kind} but found {t.text or 'end of input'!r}",
                position=t.pos,
                expected=kind,
            )
        self.i += 1
        return t

    # entry points ---------------------------------------------------------

    def formula(self) -> Formula:
        node = self.claim_or_prop()
        t = self.peek()
        if t.kind != "eof":
            raise ParseError(f"trailing input at {t.text!r}", position=t.pos, expected="eof")
        if isinstance(node, Tree):
            raise GrammarViolation("*> cannot be the outermost operator", position=0)
        return node

    # grammar --------------------------------------------------------------

    def claim_or_prop(self):
        """entrylist cond? ('|>' | '>>') prop, or a single prop."""
        start = self.peek().pos
        items = [self.entry()]
        while self.peek().kind == "comma":
            self.take()
            items.append(self.entry())
        conds: list | None = None
        if self.peek().kind == "lbrack":
            self.take()
            conds = []
            if self.peek().kind != "rbrack":
                conds.append(self.entry())
                while self.peek().kind == "comma":
                    self.take()
                    conds.append(self.entry())
            self.take("rbrack")
        op = self.peek()
        if op.kind == "imm":
            self.take()
            cons = self.prop()
            return Immediate(tuple(map(_as_entry, items)), tuple(map(_as_entry, conds or ())), cons)
        if op.kind == "med":
            self.take()
            for x in items + (conds or []):
                if isinstance(x, Tree):
                    raise GrammarViolation("tree entry inside >>", position=start)
            cons = self.prop()
            return Mediate(tuple(items), tuple(conds or ()), cons)
        if len(items) == 1 and conds is None:
            return items[0]
        raise ParseError(
            f"expected |> or >> after list but found {op.text or 'end of input'!r}",
            position=op.pos,
            expected="|> or >>",
        )

    def entry(self):
        """A prop formula, or a parenthesized tree entry standing alone."""
        node = self.imp(allow_tree=True)
        return node

    def prop(self) -> Formula:
        node = self.imp(allow_tree=False)
        return node

    def imp(self, allow_tree: bool):
        left = self.or_(allow_tree)
        if self.peek().kind == "arrow":
            self._no_tree(left)
            self.take()
            right = self.imp(allow_tree=False)  # right-associative
            return Imp(left, right)
        return left

    def or_(self, allow_tree: bool):
        left = self.and_(allow_tree)
        while self.peek().kind == "or":
            self._no_tree(left)
            self.take()
            right = self.and_(allow_tree=False)
            left = Or(left, right)
        return left

    def and_(self, allow_tree: bool):
        left = self.unary(allow_tree)
        while self.peek().kind == "and":
            self._no_tree(left)
            self.take()
            right = self.unary(allow_tree=False)
            left = And(left, right)
        return left

    def unary(self, allow_tree: bool):
        t = self.peek()
        if t.kind == "neg":
            self.take()
            return Neg(self._no_tree(self.unary(allow_tree=False)))
        return self.primary(allow_tree)

    def primary(self, allow_tree: bool):
        t = self.peek()
        if t.kind == "ident":
            self.take()
            if t.text == "bot":
                return BOT
            return Atom(t.text)
        if t.kind == "meta":
            self.take()
            if not self.allow_metavars:
                raise ParseError(
                    f"uppercase identifier {t.text!r} is only legal in rule patterns",
                    position=t.pos,
                )
            return MetaVar(t.text)
        if t.kind == "lpar":
            self.take()
            node = self._group()
            if isinstance(node, Tree) and not allow_tree:
                raise GrammarViolation(
                    "tree entry cannot occur here (only inside an entry list)", position=t.pos
                )
            return node
        raise ParseError(
            f"expected a formula but found {t.text or 'end of input'!r}",
            position=t.pos,
            expected="formula",
        )

    def _group(self):
        """Contents of '(' ... ')': a parenthesized formula, a nested claim,
        or a tree entry ``entrylist cond? *> prop``."""
        start = self.peek().pos
        items = [self.entry()]
        while self.peek().kind == "comma":
            self.take()
            items.append(self.entry())
        conds: list | None = None
        if self.peek().kind == "lbrack":
            self.take()
            conds = []
            if self.peek().kind != "rbrack":
                conds.append(self.entry())
                while self.peek().kind == "comma":
                    self.take()
                    conds.append(self.entry())
            self.take("rbrack")
        op = self.peek()
        if op.kind == "tree":
            self.take()
            cons = self.prop()
            self.take("rpar")
            return Tree(tuple(map(_as_entry, items)), tuple(map(_as_entry, conds or ())), cons)
        if op.kind == "imm":
            self.take()
            cons = self.prop()
            self.take("rpar")
            return Immediate(tuple(map(_as_entry, items)), tuple(map(_as_entry, conds or ())), cons)
        if op.kind == "med":
            self.take()
            for x in items + (conds or []):
                if isinstance(x, Tree):
                    raise GrammarViolation("tree entry inside >>", position=start)
            cons = self.prop()
            self.take("rpar")
            return Mediate(tuple(items), tuple(conds or ()), cons)
        if op.kind == "rpar" and len(items) == 1 and conds is None:
            self.take()
            return items[0]
        raise ParseError(
            f"expected *>, |>, >> or ) but found {op.text or 'end of input'!r}",
            position=op.pos,
            expected="*>, |>, >> or )",
        )

    def _no_tree(self, node):
        if isinstance(node, Tree):
            raise GrammarViolation("tree entry cannot be an operand of a connective")
        return node


def parse_formula(text: str) -> Formula:
    """Parse surface syntax into a Formula; raises ParseError/GrammarViolation."""
    f = _Parser(text).formula()
    validate_formula(f)
    return f


def parse_pattern(text: str) -> Formula:
    """Like parse_formula but uppercase identifiers become metavariables."""
    return _Parser(text, allow_metavars=True).formula()


# ---------------------------------------------------------------------------
# Printer

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NEG, _PREC_ATOM = 1, 2, 3, 4, 5


def print_formula(f: Formula) -> str:
    """Canonical surface syntax; parse_formula(print_formula(f)) == f."""
    return _pp(f, parent_prec=0, top=True)


def _pp(f, parent_prec: int, top: bool = False) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, MetaVar):
        return f.name
    if isinstance(f, Neg):
        return "~" + _pp(f.f, _PREC_NEG)
    if isinstance(f, And):
        s = f"{_pp(f.l, _PREC_AND)} & {_pp(f.r, _PREC_AND + 1)}"
        return s if parent_prec <= _PREC_AND else f"({s})"
    if isinstance(f, Or):
        s = f"{_pp(f.l, _PREC_OR)} | {_pp(f.r, _PREC_OR + 1)}"
        return s if parent_prec <= _PREC_OR else f"({s})"
    if isinstance(f, Imp):
        s = f"{_pp(f.l, _PREC_IMP + 1)} -> {_pp(f.r, _PREC_IMP)}"
        return s if parent_prec <= _PREC_IMP else f"({s})"
    if isinstance(f, Immediate):
        s = f"{_print_list(f.grounds, f.conditions)} |> {_pp(f.consequence, 0)}"
        return s if top else f"({s})"
    if isinstance(f, Mediate):
        s = f"{_print_list(f.grounds, f.conditions)} >> {_pp(f.consequence, 0)}"
        return s if top else f"({s})"
    raise TypeError(f"not a printable formula: {f!r}")


def _print_entry(e) -> str:
    if isinstance(e, Plain):
        return _pp(e.f, 0)
    if isinstance(e, Tree):
        return f"({_print_list(e.grounds, e.conditions)} *> {_pp(e.consequence, 0)})"
    # mediate claims carry bare formulas in their lists
    return _pp(e, 0)


def _print_list(grounds, conditions) -> str:
    s = ", ".join(_print_entry(e) for e in grounds)
    if conditions:
        s += " [" + ", ".join(_print_entry(e) for e in conditions) + "]"
    return s
