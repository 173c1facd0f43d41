"""Adversarial coverage: the checker must reject mutated derivations, the
parser must fail cleanly on junk, and the two redex views must agree."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gndk.analysis import bar_to_mediate, bars, tree_derivation_witness
from gndk.derivation import (
    Derivation,
    Rule,
    check,
    iter_nodes,
    node_at,
    parse_derivation,
    print_derivation,
    replace_at,
)
from gndk.errors import KernelError, ParseError
from gndk.operators import wdoi_immediate
from gndk.rewrite import derivation_complexity, find_redexes, is_normal, normalize
from gndk.syntax import Atom, parse_formula, print_formula
from randgen import grounding_derivation, inject_detours

f = parse_formula

# conclusions of these rules are not pinned down by their premisses alone,
# so changing them can produce a different but still valid derivation
_UNPINNED = {"hyp", "or_i_l", "or_i_r", "imp_i", "neg_i", "bot_e"}


def _valid_corpus(gc):
    rng = random.Random(61)
    corpus = []
    for _ in range(12):
        d = grounding_derivation(rng, 5, gc)
        corpus.append(d)
        corpus.append(inject_detours(rng, d))
        corpus.append(tree_derivation_witness(d, gc))
        b = bars(d)[rng.randrange(len(bars(d)))]
        corpus.append(bar_to_mediate(d, b, gc))
    corpus.append(wdoi_immediate(f("p, q |> p & q"), gc).derivation)
    return corpus


def _mutate_conclusion(d, path):
    node = node_at(d, path)
    return replace_at(
        d,
        path,
        Derivation(Atom("zzmut"), node.rule, node.premisses, node.discharged, node.hyp_label),
    )


def _mutate_index(d, path):
    node = node_at(d, path)
    rule = Rule(node.rule.kind, index=99, instance=node.rule.instance)
    return replace_at(
        d, path, Derivation(node.conclusion, rule, node.premisses, node.discharged, node.hyp_label)
    )


def _drop_premiss(d, path):
    node = node_at(d, path)
    return replace_at(
        d,
        path,
        Derivation(
            node.conclusion, node.rule, node.premisses[:-1], node.discharged, node.hyp_label
        ),
    )


def _rename_schema(d, path):
    from dataclasses import replace as dc_replace

    node = node_at(d, path)
    inst = dc_replace(node.rule.instance, schema="zz_missing")
    rule = Rule(node.rule.kind, instance=inst)
    return replace_at(
        d, path, Derivation(node.conclusion, rule, node.premisses, node.discharged, node.hyp_label)
    )


class TestCheckerRejectsMutations:
    def test_every_valid_derivation_checks(self, gc):
        for d in _valid_corpus(gc):
            assert check(d, gc).ok

    def test_conclusion_mutations_rejected(self, gc):
        for d in _valid_corpus(gc):
            for path, node in iter_nodes(d):
                if node.kind in _UNPINNED:
                    continue
                assert not check(_mutate_conclusion(d, path), gc).ok, (
                    f"mutated {node.kind} at {path} went undetected"
                )

    def test_index_mutations_rejected(self, gc):
        for d in _valid_corpus(gc):
            for path, node in iter_nodes(d):
                if node.rule.index is None:
                    continue
                assert not check(_mutate_index(d, path), gc).ok

    def test_missing_premiss_rejected(self, gc):
        for d in _valid_corpus(gc):
            for path, node in iter_nodes(d):
                if not node.premisses:
                    continue
                assert not check(_drop_premiss(d, path), gc).ok

    def test_unknown_schema_rejected(self, gc):
        for d in _valid_corpus(gc):
            for path, node in iter_nodes(d):
                if node.kind == "grounding":
                    assert not check(_rename_schema(d, path), gc).ok

    def test_labelled_leaf_mutations_rejected(self, gc):
        rng = random.Random(67)
        hit = 0
        for _ in range(30):
            d = inject_detours(rng, grounding_derivation(rng, 4, gc))
            for path, node in iter_nodes(d):
                if node.kind == "hyp" and node.hyp_label is not None:
                    mutated = replace_at(
                        d,
                        path,
                        Derivation(Atom("zzmut"), node.rule, (), (), node.hyp_label),
                    )
                    assert not check(mutated, gc).ok
                    hit += 1
        assert hit > 10

    def test_proof_files_reject_mutated_text(self, gc):
        d = tree_derivation_witness(grounding_derivation(random.Random(71), 5, gc), gc)
        text = print_derivation(d)
        broken = text.replace("imm_i", "imm_e_consequence", 1)
        reparsed = parse_derivation(broken, gc)
        assert not check(reparsed, gc).ok


class TestParserRobustness:
    @given(
        st.text(
            alphabet=list("pqrs&|->~*[](),> bot"),
            min_size=0,
            max_size=40,
        )
    )
    @settings(max_examples=400, deadline=None)
    def test_junk_fails_cleanly_or_round_trips(self, text):
        try:
            parsed = parse_formula(text)
        except ParseError:
            return
        assert parse_formula(print_formula(parsed)) == parsed

    @given(st.text(max_size=30))
    @settings(max_examples=200, deadline=None)
    def test_arbitrary_unicode_never_crashes_unexpectedly(self, text):
        try:
            parse_formula(text)
        except KernelError:
            pass

    def test_deep_nesting(self):
        # recursive traversals bound the depth by the interpreter stack;
        # 150 levels stays comfortably inside the default limit
        deep = "~" * 150 + "p"
        assert parse_formula(deep) == f(deep)
        claims = "p |> " + "(q |> " * 40 + "r" + ")" * 40
        assert parse_formula(claims) is not None


class TestRedexViewsAgree:
    def test_normality_iff_zero_measure(self, gc):
        rng = random.Random(73)
        for _ in range(80):
            d = grounding_derivation(rng, 5, gc)
            if rng.random() < 0.7:
                d = inject_detours(rng, d)
            triple = derivation_complexity(d)
            assert is_normal(d) == (triple.m == 0 == triple.n)
            result, _ = normalize(d)
            final = derivation_complexity(result)
            assert final.m == 0 and final.n == 0
            assert find_redexes(result) == []

    def test_redex_complexity_matches_segment_measure(self, gc):
        rng = random.Random(79)
        for _ in range(40):
            d = inject_detours(rng, grounding_derivation(rng, 4, gc))
            triple = derivation_complexity(d)
            if find_redexes(d):
                top = max(r.complexity for r in find_redexes(d))
                # the maximal segment complexity is realized by some redex
                assert triple.m == top


class TestBudget:
    def test_partial_progress_is_preserved(self, gc):
        rng = random.Random(83)
        d = inject_detours(rng, grounding_derivation(rng, 5, gc), max_wraps=5)
        full, trace = normalize(d)
        if len(trace) < 2:
            pytest.skip("needs a multi-step reduction")
        from gndk.errors import BudgetExhausted

        with pytest.raises(BudgetExhausted) as e:
            normalize(d, step_budget=1)
        partial = e.value.derivation
        assert partial.conclusion == d.conclusion
        assert len(e.value.trace) == 1
        resumed, _ = normalize(partial)
        assert resumed == full
