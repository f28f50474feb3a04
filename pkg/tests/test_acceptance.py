"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Budgets are wall-clock seconds and are asserted.
"""

import copy
import os
import random
import re
import time

from jvm2boogie.boogie import ast, heap_effects, parse, print_program
from jvm2boogie.classfile import ClassPlan, build_class, parse_class
from jvm2boogie.cli import main
from jvm2boogie.contracts import SpecNamespace, aggregate, check_aggregable
from jvm2boogie.encode import default_prelude
from jvm2boogie.frames import EMPTY
from jvm2boogie.lift import (
    TestHeap,
    Trap,
    eval_grimp,
    infer_expected_types,
    interpret_bytecode,
    simulate_stack,
)
from jvm2boogie.lift.interp import eval_expr

import plans
import randgen
from util import translate_plans, write_corpus

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "summary.bpl")
NS = SpecNamespace()


def report(name: str, detail: str = ""):
    print("ACCEPTANCE %s: PASS %s" % (name, detail))


def demangle(text: str) -> str:
    """Strip owner prefixes and descriptor hashes from mangled member names."""
    return re.sub(r"[A-Za-z_$][\w.$]*\.([A-Za-z_$][\w$]*)#[0-9a-f]{8}", r"\1", text)


def test_fig5_golden():
    started = time.monotonic()
    program, frames = translate_plans(plans.summary_plan())
    text = print_program(program)

    golden = open(GOLDEN, "r", encoding="utf-8").read()
    assert text == golden, "summary translation drifted from the golden file"

    normalized = demangle(text)
    m = re.search(r"procedure summary\(values: Reference\) returns \(@ret: int\)\n"
                  r"((?:  .*\n)*)", normalized)
    assert m is not None
    clauses = [line.strip() for line in m.group(1).splitlines()]
    assert clauses == [
        "requires !contains(#heap, values, 1, 0, lengthof(values));",
        "ensures @ret >= 0;",
    ]
    fn = re.search(r"function contains\(h: Heap, as: Reference, e: int, from: int, "
                   r"to: int\) returns \(bool\) \{ (.*) \}", normalized)
    assert fn is not None
    assert fn.group(1) == ("(exists i: int :: from <= i && i < to && "
                           "(array.read(h, as, i): int) == e)")
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    report("fig5-golden", "(%.2fs)" % elapsed)


def test_table5b_golden():
    started = time.monotonic()
    program, _ = translate_plans(plans.counted_loop_plan())
    proc = next(d for d in program.decls
                if isinstance(d, ast.ProcDecl) and ".run#" in d.name)
    inv = "0 <= l0i && l0i <= 3"
    lines = []
    for s in proc.body:
        if isinstance(s, ast.AssertStmt):
            lines.append(("assert", print_program(ast.Program([ast.AxiomDecl(s.expr)]))))
        elif isinstance(s, ast.AssumeStmt):
            lines.append(("assume", print_program(ast.Program([ast.AxiomDecl(s.expr)]))))
    asserts = [l for l in lines if l[0] == "assert"]
    assumes = [l for l in lines if l[0] == "assume"]
    assert len(asserts) == 2 and len(assumes) == 2
    assert all(inv in text for _, text in lines)

    # skeleton order: assert, head label, exit test, assume, ..., assert,
    # backjump goto, exit label, assume
    kinds = []
    for s in proc.body:
        if isinstance(s, ast.AssertStmt):
            kinds.append("assert")
        elif isinstance(s, ast.AssumeStmt):
            kinds.append("assume")
        elif isinstance(s, ast.LabelStmt):
            kinds.append("label:" + s.name)
        elif isinstance(s, ast.IfStmt):
            kinds.append("iftest")
        elif isinstance(s, ast.GotoStmt):
            kinds.append("goto")
        else:
            kinds.append("stmt")
    flat = " ".join(kinds)
    assert re.search(r"assert label:\S+ iftest assume .*assert goto label:\S+ assume",
                     flat), flat
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    report("table5b-golden", "(%.2fs)" % elapsed)


def test_aggregation_oracle():
    started = time.monotonic()
    rng = random.Random(20240601)
    trials = 1000
    for trial in range(trials):
        plan = randgen.random_aggregable(rng)
        cf = parse_class(build_class(ClassPlan(name="acc.A%d" % trial, methods=[plan])))
        m = cf.method("p")
        body = infer_expected_types(simulate_stack(m.code, m, cf.this_class))
        assert check_aggregable(body, NS, lambda *a: False) == []
        agg = aggregate(body, NS)
        for _ in range(10):
            args = randgen.random_agg_inputs(rng)
            env = {p.name: a for p, a in zip(body.params, args)}
            got = eval_expr(agg, env, TestHeap(), [1_000_000])
            want = eval_grimp(body, list(args), TestHeap())
            assert got == want, (trial, args, got, want)
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    report("aggregation-oracle", "(%d bodies x 10 inputs, %.1fs)" % (trials, elapsed))


def test_lifting_oracle():
    started = time.monotonic()
    rng = random.Random(987654)
    trials = 1000
    for trial in range(trials):
        plan = randgen.random_method(rng)
        cf = parse_class(build_class(ClassPlan(name="acc.L%d" % trial, methods=[plan])))
        m = cf.method("f")
        body = simulate_stack(m.code, m, cf.this_class)
        for _ in range(10):
            seed = TestHeap()
            args = randgen.random_inputs(rng, plan, seed)
            h1, h2 = copy.deepcopy(seed), copy.deepcopy(seed)
            try:
                r1 = ("ok", interpret_bytecode(m.code, m, cf.this_class, list(args), h1),
                      h1.state_snapshot())
            except Trap as t:
                r1 = ("trap", t.kind, None)
            try:
                r2 = ("ok", eval_grimp(body, list(args), h2), h2.state_snapshot())
            except Trap as t:
                r2 = ("trap", t.kind, None)
            assert r1 == r2, (trial, args, r1[:2], r2[:2])
    elapsed = time.monotonic() - started
    assert elapsed < 120.0
    report("lifting-oracle", "(%d methods x 10 inputs, %.1fs)" % (trials, elapsed))


def test_frame_soundness():
    program, frames = translate_plans(*plans.corpus())
    empty_count = 0
    for decl in program.decls:
        if not isinstance(decl, ast.ProcDecl) or decl.body is None:
            continue
        frame = frames.get(decl.name)
        if frame is None or frame.value != EMPTY:
            continue
        empty_count += 1
        first_assign, calls = heap_effects(decl)
        assert first_assign is None, (decl.name, "heap assignment in EMPTY procedure")
        for _, callee in calls:
            callee_frame = frames.get(callee)
            assert callee_frame is not None and callee_frame.value == EMPTY, \
                (decl.name, callee)
    assert empty_count > 0
    summary = next(name for name in frames if ".summary#" in name)
    assert frames[summary].value == EMPTY
    report("frame-soundness", "(%d EMPTY procedures scanned)" % empty_count)


def test_printer_round_trip():
    prelude_program = ast.Program(list(parse(default_prelude()).decls))
    assert parse(print_program(prelude_program)) == prelude_program

    program, _ = translate_plans(*plans.corpus())
    assert parse(print_program(program)) == program

    rng = random.Random(13)
    for k in range(500):
        fuzz = randgen.random_boogie_program(rng)
        assert parse(print_program(fuzz)) == fuzz, k
    report("printer-round-trip", "(prelude + corpus + 500 fuzzed)")


def test_determinism(tmp_path):
    d = tmp_path / "cp"
    d.mkdir()
    write_corpus(str(d), plans.corpus())
    args = ["--classpath", str(d),
            "--class", "fixtures.Summary", "--class", "fixtures.Counter",
            "--class", "fixtures.Gcd", "--class", "fixtures.LinearSearch",
            "--class", "fixtures.AllPositive", "--class", "fixtures.CountedLoop"]
    out1, out2 = str(tmp_path / "a.bpl"), str(tmp_path / "b.bpl")
    assert main(args + ["--output", out1]) == 0
    assert main(args + ["--output", out2]) == 0
    b1 = open(out1, "rb").read()
    b2 = open(out2, "rb").read()
    assert b1 == b2
    report("determinism", "(%d bytes)" % len(b1))


def test_error_taxonomy(tmp_path):
    d = tmp_path / "cp"
    d.mkdir()
    write_corpus(str(d), [
        plans.missing_predicate_plan(),
        plans.branching_predicate_plan(),
        plans.impure_pure_plan(),
        plans.invokedynamic_plan(),
        plans.irreducible_plan(),
    ])
    out = str(tmp_path / "o.bpl")
    expectations = [
        ("fixtures.MissingPredicate", 2),   # E_NO_SUCH_PREDICATE
        ("fixtures.BranchingPredicate", 2),  # BRANCHING violation
        ("fixtures.ImpurePure", 2),          # E_IMPURE_SPEC
        ("fixtures.Indy", 1),                # E_UNSUPPORTED invokedynamic
        ("fixtures.Irreducible", 1),         # E_IRREDUCIBLE
    ]
    for cls, want in expectations:
        got = main(["--classpath", str(d), "--class", cls, "--output", out])
        assert got == want, (cls, got, want)
    report("error-taxonomy", "(%d codes)" % len(expectations))
