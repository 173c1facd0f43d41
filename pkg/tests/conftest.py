import sys
from pathlib import Path

SRC = str(Path(__file__).resolve().parents[1] / "src")
if SRC not in sys.path:
    sys.path.insert(0, SRC)

import pytest

from gndk.calculus import gc_core, match_grounding_rule
from gndk.derivation import grounding, hyp
from gndk.syntax import parse_formula


@pytest.fixture(scope="session")
def gc():
    return gc_core()


@pytest.fixture(scope="session")
def apply_rule(gc):
    """Build a grounding application from premiss derivations and the
    concluded formula (surface syntax)."""

    def build(grounds, conditions, conclusion):
        premisses = list(grounds) + list(conditions)
        inst = match_grounding_rule(
            gc,
            [d.conclusion for d in grounds],
            [d.conclusion for d in conditions],
            parse_formula(conclusion),
        )
        assert inst is not None, f"no rule concludes {conclusion}"
        return grounding(inst, premisses)

    return build


@pytest.fixture(scope="session")
def worked_examples(gc, apply_rule):
    """The derivations used throughout the discussion sections."""
    f = parse_formula
    and_pq = apply_rule([hyp(f("p")), hyp(f("q"))], [], "p & q")
    or_pq = apply_rule([hyp(f("p"))], [hyp(f("~q"))], "p | q")
    dneg_pq = apply_rule([and_pq], [], "~~(p & q)")

    qr = apply_rule([hyp(f("q")), hyp(f("r"))], [], "q | r")
    pqr = apply_rule([hyp(f("p")), qr], [], "p & (q | r)")
    st = apply_rule([hyp(f("s")), hyp(f("t"))], [], "s & t")
    big = apply_rule([pqr, st], [], "(p & (q | r)) | (s & t)")

    rs = apply_rule([hyp(f("r")), hyp(f("s"))], [], "r & s")
    dneg_rs = apply_rule([rs], [], "~~(r & s)")
    or_tree = apply_rule([dneg_rs], [hyp(f("~t"))], "~~(r & s) | t")

    or_rs = apply_rule([hyp(f("r"))], [hyp(f("~s"))], "r | s")
    dneg_or = apply_rule([or_rs], [], "~~(r | s)")

    return {
        "and_pq": and_pq,
        "or_pq": or_pq,
        "dneg_pq": dneg_pq,
        "big": big,
        "or_tree": or_tree,
        "dneg_or": dneg_or,
    }
