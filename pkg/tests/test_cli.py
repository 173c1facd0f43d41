import io
import json
import subprocess
import sys

import pytest

from gndk.cli import run
from gndk.derivation import hyp, imm_i, print_derivation
from gndk.syntax import parse_formula

f = parse_formula

PAIR_TREE = "(p, q *> p & q), (r, ~s *> r | s) |> (p & q) & (r | s)"


def go(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def calculus_path(tmp_path_factory):
    from importlib import resources

    text = resources.files("gndk").joinpath("calculi/gc-core.json").read_text("utf-8")
    path = tmp_path_factory.mktemp("calc") / "gc-core.json"
    path.write_text(text)
    return str(path)


@pytest.fixture
def pandq_proof(tmp_path, gc, apply_rule):
    d = imm_i(apply_rule([hyp(f("p")), hyp(f("q"))], [], "p & q"))
    path = tmp_path / "pandq.gnd"
    path.write_text(print_derivation(d))
    return str(path)


@pytest.fixture
def big_proof(tmp_path, gc, worked_examples):
    path = tmp_path / "big.gnd"
    path.write_text(print_derivation(worked_examples["big"]))
    return str(path)


class TestCheck:
    def test_ok(self, pandq_proof, calculus_path):
        code, out = go("check", pandq_proof, "--calculus", calculus_path)
        assert code == 0 and out == "OK\n"

    def test_packaged_calculus_by_name(self, pandq_proof):
        code, out = go("check", pandq_proof, "--calculus", "gc-core")
        assert code == 0 and out == "OK\n"

    def test_multiple_files(self, pandq_proof, big_proof):
        code, out = go("check", pandq_proof, big_proof, "--calculus", "gc-core")
        assert code == 0
        assert out == f"{pandq_proof}: OK\n{big_proof}: OK\n"

    def test_invalid_proof(self, tmp_path):
        path = tmp_path / "bad.gnd"
        path.write_text('(grounding "p & q" :schema and\n  (hyp "p")\n  (hyp "r"))')
        code, out = go("check", str(path), "--calculus", "gc-core")
        assert code == 1
        assert "ERROR CheckFailed" in out

    def test_json(self, pandq_proof):
        code, out = go("check", pandq_proof, "--calculus", "gc-core", "--json")
        assert code == 0
        payload = json.loads(out)
        assert payload["ok"] is True

    def test_missing_calculus(self, pandq_proof):
        code, out = go("check", pandq_proof, "--calculus", "no-such-thing")
        assert code == 1 and out.startswith("ERROR")


class TestErrors:
    def test_wdoi_not_introducible(self):
        code, out = go("wdoi", "p & q & r & s |> p", "--calculus", "gc-core")
        assert code == 1
        assert out.startswith("ERROR NotIntroducible:")

    def test_usage_error(self):
        code, _ = go("frobnicate")
        assert code == 2

    def test_missing_file(self):
        code, out = go("check", "/nonexistent.gnd", "--calculus", "gc-core")
        assert code == 1 and out.startswith("ERROR")


class TestRoundTrips:
    def test_wdoi_witness_rechecks(self, tmp_path):
        code, witness = go("wdoi", "p, q |> p & q", "--calculus", "gc-core")
        assert code == 0
        path = tmp_path / "w.gnd"
        path.write_text(witness)
        code, out = go("check", str(path), "--calculus", "gc-core")
        assert code == 0 and out == "OK\n"

    def test_from_tree_then_to_tree(self, tmp_path):
        # conditions bracketed so every component claim is a rule application
        claim_text = "(p, q *> p & q), (r [~s] *> r | s) |> (p & q) & (r | s)"
        code, proof = go("from-tree", claim_text, "--calculus", "gc-core")
        assert code == 0
        path = tmp_path / "t.gnd"
        path.write_text(proof)
        code, out = go("check", str(path), "--calculus", "gc-core")
        assert code == 0
        code, claim = go("to-tree", str(path), "--calculus", "gc-core")
        assert code == 0
        assert parse_formula(claim.strip()) == parse_formula(claim_text)

    def test_from_tree_rejects_non_instance(self):
        code, out = go("from-tree", PAIR_TREE, "--calculus", "gc-core")
        assert code == 1 and out.startswith("ERROR NoMatchingRule")

    def test_recompose_from_decompose(self, tmp_path):
        code, parts = go("decompose", PAIR_TREE, "--calculus", "gc-core")
        assert code == 0
        part_list = [line for line in parts.splitlines() if line]
        code, proof = go("recompose", PAIR_TREE, *part_list, "--calculus", "gc-core")
        assert code == 0
        path = tmp_path / "r.gnd"
        path.write_text(proof)
        code, out = go("check", str(path), "--calculus", "gc-core")
        assert code == 0 and out == "OK\n"

    def test_recompose_rejects_missing_part(self):
        code, parts = go("decompose", PAIR_TREE, "--calculus", "gc-core")
        part_list = [line for line in parts.splitlines() if line]
        code, out = go("recompose", PAIR_TREE, *part_list[1:], "--calculus", "gc-core")
        assert code == 1 and out.startswith("ERROR PartsMismatch")

    def test_normalize_output_rechecks(self, tmp_path, gc, apply_rule):
        from gndk.derivation import imm_e_consequence

        d = imm_e_consequence(imm_i(apply_rule([hyp(f("p")), hyp(f("q"))], [], "p & q")))
        src = tmp_path / "detour.gnd"
        src.write_text(print_derivation(d))
        code, normal = go("normalize", str(src), "--calculus", "gc-core")
        assert code == 0
        dst = tmp_path / "normal.gnd"
        dst.write_text(normal)
        code, out = go("check", str(dst), "--calculus", "gc-core")
        assert code == 0 and out == "OK\n"

    def test_wdoi_requires_a_claim(self):
        code, out = go("wdoi", "p & q", "--calculus", "gc-core")
        assert code == 1 and out.startswith("ERROR UnsupportedFormula")


class TestBars:
    def test_six_lines(self, big_proof):
        code, out = go("bars", big_proof, "--calculus", "gc-core")
        assert code == 0
        lines = [l for l in out.splitlines() if l]
        assert len(lines) == 6
        assert "p, q, r, s, t" in lines
        assert "p, q | r, s & t" in lines

    def test_condition_entries_bracketed(self, tmp_path, gc, apply_rule):
        d = apply_rule([hyp(f("p"))], [hyp(f("~q"))], "p | q")
        path = tmp_path / "or.gnd"
        path.write_text(print_derivation(d))
        code, out = go("bars", str(path), "--calculus", "gc-core")
        assert code == 0
        assert "p, [~q]" in out.splitlines()

    def test_json(self, big_proof):
        code, out = go("bars", big_proof, "--calculus", "gc-core", "--json")
        payload = json.loads(out)
        assert len(payload) == 6


class TestNormalize:
    def test_already_normal_is_identity(self, pandq_proof):
        code, out = go("normalize", pandq_proof, "--calculus", "gc-core")
        assert code == 0
        assert out == open(pandq_proof).read()

    def test_trace_format(self, tmp_path, gc, apply_rule):
        from gndk.derivation import imm_e_consequence

        d = imm_e_consequence(imm_i(apply_rule([hyp(f("p")), hyp(f("q"))], [], "p & q")))
        path = tmp_path / "detour.gnd"
        path.write_text(print_derivation(d))
        code, out = go("normalize", str(path), "--calculus", "gc-core", "--trace")
        assert code == 0
        trace_line = out.splitlines()[0]
        assert trace_line == "0\tImm\t/\t(6,1,3)\t(0,0,1)"

    def test_byte_stable(self, big_proof):
        runs = {go("normalize", big_proof, "--calculus", "gc-core") for _ in range(2)}
        assert len(runs) == 1

    def test_with_mediate_flag(self, tmp_path, gc):
        from gndk.derivation import med_e_ground, med_i_trans_ground

        inner = med_i_trans_ground(hyp(f("p >> v & z")), hyp(f("v & z >> q | r | s")), 0)
        outer = med_i_trans_ground(inner, hyp(f("q | r | s, t >> u")), 0)
        d = med_e_ground(outer, 0)
        path = tmp_path / "med.gnd"
        path.write_text(print_derivation(d))
        code, plain = go("normalize", str(path), "--calculus", "gc-core")
        assert code == 0 and plain == print_derivation(d)
        code, reduced = go("normalize", str(path), "--calculus", "gc-core", "--with-mediate")
        assert code == 0
        assert reduced == '(med_e_ground "p" :index 0\n  (hyp "p >> v & z"))\n'

    def test_reduce_single_step(self, tmp_path, gc, apply_rule):
        from gndk.derivation import imm_e_consequence

        d = imm_e_consequence(imm_i(apply_rule([hyp(f("p")), hyp(f("q"))], [], "p & q")))
        path = tmp_path / "detour.gnd"
        path.write_text(print_derivation(d))
        code, out = go("reduce", str(path), "--calculus", "gc-core")
        assert code == 0
        assert out == print_derivation(apply_rule([hyp(f("p")), hyp(f("q"))], [], "p & q"))


class TestEntryPoint:
    def test_module_invocation(self, pandq_proof):
        proc = subprocess.run(
            [sys.executable, "-m", "gndk", "check", pandq_proof, "--calculus", "gc-core"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == "OK\n"
