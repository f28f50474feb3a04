"""Boogie AST: printer/parser round-trips, prelude, heap-write scanning."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jvm2boogie.boogie import (
    ast,
    parse,
    parse_expr,
    print_expr,
    print_program,
    scan_heap_writes,
    undefined_symbols,
)
from jvm2boogie.encode import default_prelude, emit_prelude
from jvm2boogie.errors import BoogieSyntaxError

import randgen


def round_trip(program: ast.Program):
    text = print_program(program)
    again = parse(text)
    assert again == program, text
    assert print_program(again) == text


def test_axiom_exact_text():
    p = ast.Program([ast.AxiomDecl(ast.BoolLit(True))])
    assert print_program(p) == "axiom true;\n"


def test_syntax_error_position():
    with pytest.raises(BoogieSyntaxError) as err:
        parse("procedure p(;")
    assert err.value.line == 1 and err.value.col > 0


def test_prelude_parses_and_round_trips():
    decls = emit_prelude(default_prelude())
    program = ast.Program(list(decls))
    round_trip(program)
    names = {d.name for d in decls if hasattr(d, "name")}
    for required in ("read", "update", "array.read", "array.update", "type2ref",
                     "cmp", "lengthof", "new", "array.new", "Heap", "Reference",
                     "#heap"):
        assert required in names


def test_prelude_read_signature():
    decls = emit_prelude(default_prelude())
    read = next(d for d in decls if isinstance(d, ast.FuncDecl) and d.name == "read")
    assert read.typarams == ("a",)
    assert [t.name for _, t in read.params] == ["Heap", "Reference", "Field"]
    assert read.params[2][1] == ast.TName("Field", (ast.TName("a"),))


def test_cmp_axioms_evaluate():
    """cmp(3,2)=1, cmp(2,3)=-1, cmp(2,2)=0 follow from the shipped axioms."""
    decls = emit_prelude(default_prelude())
    axiom = None
    for d in decls:
        if isinstance(d, ast.AxiomDecl) and isinstance(d.expr, ast.Quant):
            body = d.expr.body
            if isinstance(body, ast.BinOp) and isinstance(body.a, ast.FnApp) \
                    and body.a.name == "cmp" \
                    and all(t == ast.TINT for _, t in d.expr.bound):
                axiom = d.expr
                break
    assert axiom is not None

    def eval_ite(e, env):
        if isinstance(e, ast.Ite):
            return eval_ite(e.then, env) if eval_ite(e.cond, env) else eval_ite(e.other, env)
        if isinstance(e, ast.BinOp):
            a, b = eval_ite(e.a, env), eval_ite(e.b, env)
            return {"<": a < b, ">": a > b, "==": a == b}[e.op]
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.Id):
            return env[e.name]
        raise AssertionError(e)

    (x, _), (y, _) = axiom.bound
    rhs = axiom.body.b
    for xv, yv, want in ((3, 2, 1), (2, 3, -1), (2, 2, 0)):
        got = eval_ite(rhs, {x: xv, y: yv})
        assert got == want


def test_bad_prelude_rejected():
    with pytest.raises(Exception) as err:
        emit_prelude("function broken(;")
    assert getattr(err.value, "code", "") == "E_PRELUDE_PARSE"


def test_operator_precedence_round_trips():
    cases = [
        ast.BinOp("==>", ast.Id("a"), ast.BinOp("==>", ast.Id("b"), ast.Id("c"))),
        ast.BinOp("==>", ast.BinOp("==>", ast.Id("a"), ast.Id("b")), ast.Id("c")),
        ast.BinOp("&&", ast.BinOp("||", ast.Id("a"), ast.Id("b")), ast.Id("c")),
        ast.BinOp("+", ast.Id("a"), ast.BinOp("+", ast.Id("b"), ast.Id("c"))),
        ast.BinOp("-", ast.BinOp("-", ast.Id("a"), ast.Id("b")), ast.Id("c")),
        ast.BinOp("==", ast.BinOp("==", ast.Id("a"), ast.Id("b")), ast.Id("c")),
        ast.UnOp("-", ast.IntLit(5)),
        ast.UnOp("-", ast.UnOp("-", ast.Id("x"))),
        ast.BinOp("*", ast.IntLit(-3), ast.Id("x")),
        ast.BinOp("div", ast.Id("x"), ast.BinOp("mod", ast.Id("y"), ast.IntLit(2))),
        ast.Coerce(ast.FnApp("array.read", (ast.Id("h"), ast.Id("a"), ast.IntLit(0))),
                   ast.TINT),
        ast.Ite(ast.Id("c"), ast.IntLit(1), ast.IntLit(0)),
        ast.Quant("forall", ("a", "b"), (("x", ast.TName("a")),),
                  ast.BinOp("==", ast.Id("x"), ast.Id("x"))),
        ast.OldExpr(ast.FnApp("read", (ast.Id("#heap"), ast.Id("o"), ast.Id("f")))),
    ]
    for expr in cases:
        text = print_expr(expr)
        assert parse_expr(text) == expr, text


def test_mixed_and_or_requires_parens():
    with pytest.raises(BoogieSyntaxError):
        parse_expr("a && b || c")
    with pytest.raises(BoogieSyntaxError):
        parse_expr("a == b == c")


def test_identifier_charset():
    for name in ("#heap", "@ret", "C.f", "a$b", "_x", "q'0"):
        assert parse_expr(name) == ast.Id(name)


@given(st.integers(min_value=0, max_value=10 ** 9))
@settings(max_examples=100, deadline=None)
def test_int_literal_round_trip(n):
    assert parse_expr(print_expr(ast.IntLit(n))) == ast.IntLit(n)
    assert parse_expr(print_expr(ast.IntLit(-n))) == ast.IntLit(-n)


@given(st.floats(min_value=0.0, max_value=1e12, allow_nan=False, allow_infinity=False))
@settings(max_examples=150, deadline=None)
def test_real_literal_round_trip(x):
    assert parse_expr(print_expr(ast.RealLit(x))) == ast.RealLit(x)


@pytest.mark.parametrize("seed", range(60))
def test_fuzzed_program_round_trip(seed):
    rng = random.Random(seed * 31 + 5)
    round_trip(randgen.random_boogie_program(rng))


def test_scan_heap_writes():
    text = """
var #heap: int;
procedure clean() { x: x := 1; return; }
procedure writer() { #heap := 2; return; }
procedure caller() { call q(); return; }
procedure q();
"""
    program = parse(text)
    assert scan_heap_writes(program, "clean") is None
    w = scan_heap_writes(program, "writer")
    assert w.kind == "assign"
    c = scan_heap_writes(program, "caller")
    assert c.kind == "call" and c.detail == "q"


def test_undefined_symbols_detects_dangling():
    program = parse("axiom f(x) == 1;")
    missing = undefined_symbols(program)
    assert "function:f" in missing and "x" in missing
    ok = parse("const x: int;\nfunction f(a: int) returns (int);\naxiom f(x) == 1;")
    assert undefined_symbols(ok) == []
