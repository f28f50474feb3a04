"""Boogie emission: type/declaration/statement/expression translation,
invariant injection, call extraction, constructors, determinism."""

import re

import pytest

from jvm2boogie.boogie import ast, parse, print_program, undefined_symbols
from jvm2boogie.boogie import ast as ast_mod
from jvm2boogie.classfile import ClassPlan, FieldPlan, MethodPlan
from jvm2boogie.contracts import SpecNamespace
from jvm2boogie.encode import Encoder, Mangler, extract_calls, translate_type
from jvm2boogie.errors import TranslationError
from jvm2boogie.lift import ir

import plans
from util import translate_plans

NS = SpecNamespace()


def emit(*class_plans) -> str:
    program, _ = translate_plans(*class_plans)
    return print_program(program)


def emit_method(code, descriptor="()V", name="f", param_names=None, extra=(),
                fields=(), annotations=()):
    plan = ClassPlan(
        name="t.T",
        fields=list(fields),
        methods=[MethodPlan(name=name, descriptor=descriptor, code=code,
                            param_names=param_names,
                            annotations=list(annotations))] + list(extra))
    return emit(plan)


def proc_body(text: str, marker: str) -> str:
    start = text.index(marker)
    open_brace = text.index("{", start)
    end = text.index("\n}", open_brace)
    return text[open_brace:end]


# -- translate_type ----------------------------------------------------------------


def test_type_mapping():
    assert translate_type("I") == ast.TINT
    assert translate_type("Z") == ast.TBOOL
    assert translate_type("[I") == ast.TName("Reference")
    assert translate_type("C") == ast.TINT
    assert translate_type("J") == ast.TINT
    assert translate_type("F") == ast.TREAL
    assert translate_type("D") == ast.TREAL
    assert translate_type("Ljava/lang/String;") == ast.TName("Reference")


# -- declarations --------------------------------------------------------------------


def test_field_constant_declared():
    text = emit(plans.counter_plan())
    assert "const unique fixtures.Counter.count: Field int;" in text
    assert "const unique fixtures.Counter: Type;" in text
    assert re.search(r"axiom fieldId\(fixtures\.Counter\.count\) == \d+;", text)


def test_fieldless_class_only_type_constant():
    text = emit_method([("return",)])
    assert "const unique t.T: Type;" in text
    assert "const unique t.T." not in text


def test_declare_class_single():
    from jvm2boogie.encode import declare_class
    from util import compile_plan

    cf = compile_plan(ClassPlan(name="d.C", fields=[FieldPlan("f", "I"),
                                                    FieldPlan("b", "Z")]))
    decls = declare_class(cf)
    printed = [ast_mod.print_decl(d) for d in decls]
    assert printed[0] == "const unique d.C: Type;"
    assert "const unique d.C.f: Field int;" in printed
    assert "const unique d.C.b: Field bool;" in printed
    ids = [p for p in printed if p.startswith("axiom fieldId")]
    assert len(ids) == 2

    empty = declare_class(compile_plan(ClassPlan(name="d.E")))
    assert [ast_mod.print_decl(d) for d in empty] == ["const unique d.E: Type;"]


def test_mangler_injective_same_simple_name():
    mangler = Mangler()
    a = mangler.type_const("p1.Cls")
    b = mangler.type_const("p2.Cls")
    assert a != b
    m1 = mangler.method("p.C", "f", "(I)I")
    m2 = mangler.method("p.C", "f", "(J)I")
    assert m1 != m2  # overloads disambiguated by descriptor hash


def test_mangled_angle_brackets():
    mangler = Mangler()
    name = mangler.method("p.C", "<init>", "()V")
    assert "<" not in name and ">" not in name


# -- specification functions -----------------------------------------------------------


def test_contains_function_shape():
    text = emit(plans.summary_plan())
    m = re.search(
        r"function (\S*contains\S*)\(h: Heap, as: Reference, e: int, from: int, "
        r"to: int\) returns \(bool\) \{ (.*) \}", text)
    assert m, text
    body = m.group(2)
    assert body == "(exists i: int :: from <= i && i < to && " \
                   "(array.read(h, as, i): int) == e)"


def test_trivially_true_predicate():
    p = MethodPlan(name="p", descriptor="()Z",
                   annotations=[plans.PREDICATE_ANN],
                   code=[("push", "int", 1), ("ireturn",)])
    text = emit(ClassPlan(name="t.P", methods=[p]))
    assert re.search(r"function \S*\.p#\S*\(h: Heap\) returns \(bool\) \{ true \}", text)


def test_recursive_pure_function_calls_itself():
    fact = MethodPlan(
        name="fact", descriptor="(I)I",
        annotations=[plans.PURE_ANN], param_names=["n"],
        code=[
            ("iload", 0), ("push", "int", 1),
            ("invokestatic", (plans.OPS, "lte", "(II)Z")),
            ("push", "int", 1),
            ("iload", 0),
            ("iload", 0), ("push", "int", 1), ("isub",),
            ("invokestatic", ("t.F", "fact", "(I)I")),
            ("imul",),
            ("invokestatic", (plans.OPS, "conditional", "(ZII)I")),
            ("ireturn",),
        ])
    text = emit(ClassPlan(name="t.F", methods=[fact]))
    m = re.search(r"function (\S*fact\S*)\(h: Heap, n: int\) returns \(int\) \{ (.*) \}",
                  text)
    assert m
    assert m.group(1) + "(h, n - 1)" in m.group(2)
    parse(text)


def test_instance_predicate_gets_this():
    text = emit(plans.counter_plan())
    m = re.search(r"function \S*\.zero#\S*\((.*?)\) returns", text)
    assert m.group(1).startswith("h: Heap, this: Reference")


# -- procedures and contracts -----------------------------------------------------------


def test_summary_procedure_signature_and_contracts():
    text = emit(plans.summary_plan())
    m = re.search(r"procedure (\S*summary\S*)\(values: Reference\) returns "
                  r"\(@ret: int\)\n((?:  .*\n)*)", text)
    assert m, text
    clauses = m.group(2)
    assert re.search(r"requires !\S*contains\S*\(#heap, values, 1, 0, "
                     r"lengthof\(values\)\);", clauses)
    assert "ensures @ret >= 0;" in clauses
    assert "modifies" not in clauses  # frame is empty


def test_old_ensures_matches_paper_form():
    text = emit(plans.counter_plan())
    m = re.search(r"procedure \S*increment\S*\(this: Reference\)\n((?:  .*\n)*)", text)
    clauses = m.group(1)
    assert "ensures read(#heap, this, fixtures.Counter.count) > " \
           "old(read(#heap, this, fixtures.Counter.count));" in clauses
    assert "modifies #heap;" in clauses


def test_contract_free_void_static():
    text = emit_method([("return",)])
    assert re.search(r"procedure \S*\.f#\S*\(\)\n\{", text)


def test_bodiless_method_keeps_contracts():
    p = MethodPlan(name="p", descriptor="(I)Z",
                   annotations=[plans.PREDICATE_ANN], param_names=["x"],
                   code=[("iload", 0), ("push", "int", 0),
                         ("invokestatic", (plans.OPS, "gt", "(II)Z")), ("ireturn",)])
    abstract = MethodPlan(name="f", descriptor="(I)V", access_flags=0x0409,
                          annotations=[plans.require("p")], code=None,
                          param_names=None)
    text = emit(ClassPlan(name="t.A", methods=[p, abstract]))
    m = re.search(r"procedure \S*\.f#\S*\(p0: int\);\n((?:  .*\n)*)", text)
    assert m and "requires p0 > 0;" in m.group(1)


# -- statement translation (Tables 3 and 4a) ----------------------------------------------


def test_array_write_row():
    text = emit_method([
        ("aload", 0), ("iload", 1), ("push", "int", 0), ("iastore",), ("return",)],
        descriptor="([II)V", param_names=["a", "i"])
    assert "#heap := array.update(#heap, a, i, 0);" in text


def test_instance_field_read_row():
    text = emit_method(
        [("aload", 0), ("getfield", ("t.T", "f", "I")), ("ireturn",)],
        descriptor="()I", fields=[FieldPlan("f", "I")],
        param_names=[])
    # instance method: make it non-static
    plan = ClassPlan(name="t.T", fields=[FieldPlan("f", "I")], methods=[MethodPlan(
        name="g", descriptor="()I", access_flags=0x0001,
        code=[("aload", 0), ("getfield", ("t.T", "f", "I")), ("ireturn",)])])
    text = emit(plan)
    assert "@ret := read(#heap, this, t.T.f);" in text


def test_static_field_via_type2ref():
    plan = ClassPlan(name="t.S", fields=[FieldPlan("f", "I", 0x0009)], methods=[
        MethodPlan(name="get", descriptor="()I",
                   code=[("getstatic", ("t.S", "f", "I")), ("ireturn",)]),
        MethodPlan(name="set", descriptor="(I)V",
                   code=[("iload", 0), ("putstatic", ("t.S", "f", "I")), ("return",)]),
    ])
    text = emit(plan)
    assert "@ret := read(#heap, type2ref(t.S), t.S.f);" in text
    assert "#heap := update(#heap, type2ref(t.S), t.S.f, p0);" in text


def test_branching_rows():
    text = emit_method([
        ("label", "top"),
        ("iload", 0), ("ifeq", "done"),
        ("iinc", 0, -1),
        ("goto", "top"),
        ("label", "done"),
        ("iload", 0), ("ireturn",),
    ], descriptor="(I)I", param_names=["n"])
    body = proc_body(text, "procedure t.T.f#")
    assert "if (n#l == 0) {\n    goto " in body
    assert re.search(r"goto L\d+;", body)
    assert "@ret := n#l;\n  return;" in body


def test_mutated_param_shadow():
    text = emit_method([("iinc", 0, 1), ("iload", 0), ("ireturn",)],
                       descriptor="(I)I", param_names=["x"])
    body = proc_body(text, "procedure t.T.f#")
    assert "var x#l: int;" in body
    assert "x#l := x;" in body
    assert "x#l := x#l + 1;" in body


def test_virtual_call_row():
    callee = MethodPlan(name="m", descriptor="(I)V", access_flags=0x0001,
                        code=[("return",)])
    caller = MethodPlan(
        name="go", descriptor="(Lt/T;I)V",
        code=[("aload", 0), ("iload", 1),
              ("invokevirtual", ("t.T", "m", "(I)V")), ("return",)],
        param_names=["o", "x"])
    text = emit(ClassPlan(name="t.T", methods=[callee, caller]))
    assert re.search(r"call t\.T\.m#\S*\(o, x\);", text)


# -- expression translation (Table 4b and friends) ------------------------------------------


def test_boolean_operator_rows():
    # (a & b) | !(a ^ b) with boolean parameters, plus implies
    code = [
        ("iload", 0), ("iload", 1), ("iand",),
        ("iload", 0), ("iload", 1), ("ixor",),
        ("invokestatic", (plans.OPS, "not", "(Z)Z")),
        ("ior",),
        ("iload", 0),
        ("invokestatic", (plans.OPS, "implies", "(ZZ)Z")),
        ("ireturn",),
    ]
    text = emit_method(code, descriptor="(ZZ)Z", param_names=["a", "b"])
    assert "@ret := (a && b) || !(a != b) ==> a;" in text


def test_iff_for_boolean_equality():
    code = [("iload", 0), ("iload", 1), ("if_icmpeq", "t"),
            ("push", "int", 0), ("ireturn",),
            ("label", "t"), ("push", "int", 1), ("ireturn",)]
    text = emit_method(code, descriptor="(ZZ)Z", param_names=["a", "b"])
    assert "if (a <==> b)" in text


def test_integer_division_uses_div():
    text = emit_method([("iload", 0), ("iload", 1), ("idiv",), ("ireturn",)],
                       descriptor="(II)I", param_names=["a", "b"])
    assert "@ret := a div b;" in text


def test_real_division_uses_slash():
    text = emit_method([("dload", 0), ("dload", 2), ("ddiv",), ("dreturn",)],
                       descriptor="(DD)D", param_names=["a", "b"])
    assert "@ret := a / b;" in text


def test_rem_uses_mod():
    text = emit_method([("iload", 0), ("iload", 1), ("irem",), ("ireturn",)],
                       descriptor="(II)I", param_names=["a", "b"])
    assert "@ret := a mod b;" in text


def test_literal_false_for_boolean_zero():
    text = emit_method([("push", "int", 0), ("ireturn",)], descriptor="()Z")
    assert "@ret := false;" in text


def test_cmp_function():
    text = emit_method([("lload", 0), ("lload", 2), ("lcmp",), ("ireturn",)],
                       descriptor="(JJ)I", param_names=["a", "b"])
    assert "@ret := cmp(a, b);" in text


def test_array_read_coerced_to_expected_type():
    text = emit_method([("aload", 0), ("push", "int", 0), ("baload",), ("ireturn",)],
                       descriptor="([Z)Z", param_names=["flags"])
    assert "@ret := (array.read(#heap, flags, 0): bool);" in text


# -- call extraction ----------------------------------------------------------------------


def test_call_in_expression_extracted():
    callee = MethodPlan(name="m", descriptor="()I", code=[("push", "int", 1), ("ireturn",)])
    caller = MethodPlan(name="go", descriptor="()I",
                        code=[("invokestatic", ("t.T", "m", "()I")),
                              ("push", "int", 1), ("iadd",), ("ireturn",)])
    text = emit(ClassPlan(name="t.T", methods=[callee, caller]))
    body = proc_body(text, [l for l in text.splitlines() if "go#" in l][0])
    assert re.search(r"call #r0 := t\.T\.m#\S*\(\);", body)
    assert "@ret := #r0 + 1;" in body
    assert "var #r0: int;" in body


def test_pure_call_not_extracted():
    text = emit(plans.summary_plan())
    # no_ones body: contains(...) stays a function application inside !
    m = re.search(r"function \S*no_ones\S*\(h: Heap, values: Reference\) returns "
                  r"\(bool\) \{ (.*) \}", text)
    assert m.group(1).startswith("!")
    assert "call" not in m.group(1)


def test_nested_calls_extracted_left_to_right():
    f = MethodPlan(name="f", descriptor="(I)I", code=[("iload", 0), ("ireturn",)])
    g = MethodPlan(name="g", descriptor="()I", code=[("push", "int", 2), ("ireturn",)])
    top = MethodPlan(name="go", descriptor="()I",
                     code=[("invokestatic", ("t.T", "g", "()I")),
                           ("invokestatic", ("t.T", "f", "(I)I")),
                           ("ireturn",)])
    text = emit(ClassPlan(name="t.T", methods=[f, g, top]))
    body = proc_body(text, [l for l in text.splitlines() if "go#" in l][0])
    g_at = body.index("call #r0 := t.T.g#")
    f_at = body.index("call #r1 := t.T.f#")
    assert g_at < f_at
    assert "(#r0)" in body[f_at:f_at + 60]
    assert "@ret := #r1;" in body


def test_extract_calls_unit_against_constructed_ir():
    encoder = Encoder({}, NS)
    from jvm2boogie.encode import ProcedureContext
    ctx = ProcedureContext(encoder, "unit")
    inner = ir.Call("static", "x.M", "g", "()I", None, [])
    inner.ex = ir.INT
    outer = ir.Call("static", "x.M", "f", "(I)I", None, [inner])
    outer.ex = ir.INT
    target = ir.Local("v", "i", "I")
    target.ex = ir.INT
    stmt = ir.Assign(target, ir.Binary("+", outer, ir.Lit(1, "i"), "i"))
    stmt.value.ex = ir.INT
    stmt.value.b.ex = ir.INT
    prefix, rewritten = extract_calls(stmt, ctx)
    assert len(prefix) == 2
    assert prefix[0].value.name == "g" and prefix[1].value.name == "f"
    assert isinstance(rewritten.value.a, ir.Local)
    assert rewritten.value.a.name == "#r1"


# -- invariant injection -----------------------------------------------------------------


def test_table5b_skeleton():
    text = emit(plans.counted_loop_plan())
    body = proc_body(text, [l for l in text.splitlines() if ".run#" in l][0])
    lines = [l.strip() for l in body.splitlines() if l.strip()]
    inv = "0 <= l0i && l0i <= 3"
    flat = "\n".join(lines)
    assert flat.count("assert %s;" % inv) == 2
    assert flat.count("assume %s;" % inv) == 2
    i_assert1 = lines.index("assert %s;" % inv)
    assert lines[i_assert1 + 1].endswith(":")  # head label right after entry assert
    head_if = lines[i_assert1 + 2]
    assert head_if.startswith("if (l0i >= 3)")
    assert lines[lines.index("goto L2;") - 1] == "assert %s;" % inv


def test_loop_without_invariant_unchanged():
    code = [
        ("push", "int", 0), ("istore", 0),
        ("label", "h"), ("iload", 0), ("push", "int", 3), ("if_icmpge", "x"),
        ("iinc", 0, 1), ("goto", "h"),
        ("label", "x"), ("return",),
    ]
    text = emit_method(code)
    body = proc_body(text, "procedure t.T.f#")
    assert "assert" not in body and "assume" not in body


def test_nested_loop_invariant_counts():
    ops = plans.OPS
    code = [
        ("push", "int", 0), ("istore", 0),
        ("label", "oh"), ("iload", 0), ("push", "int", 3), ("if_icmpge", "ox"),
        ("iload", 0), ("push", "int", 0),
        ("invokestatic", (ops, "gte", "(II)Z")),
        ("invokestatic", (ops, "invariant", "(Z)V")),
        ("push", "int", 0), ("istore", 1),
        ("label", "ih"), ("iload", 1), ("push", "int", 2), ("if_icmpge", "ix"),
        ("iload", 1), ("push", "int", 0),
        ("invokestatic", (ops, "gte", "(II)Z")),
        ("invokestatic", (ops, "invariant", "(Z)V")),
        ("iinc", 1, 1), ("goto", "ih"),
        ("label", "ix"),
        ("iinc", 0, 1), ("goto", "oh"),
        ("label", "ox"), ("return",),
    ]
    text = emit_method(code)
    body = proc_body(text, "procedure t.T.f#")
    # one single-exit loop each: 2 asserts and 2 assumes per loop
    assert body.count("assert l0i >= 0;") == 2
    assert body.count("assume l0i >= 0;") == 2
    assert body.count("assert l1i >= 0;") == 2
    assert body.count("assume l1i >= 0;") == 2


# -- constructors and allocation --------------------------------------------------------


def test_new_lowers_to_new_plus_init():
    text = emit(plans.allocator_plan(), plans.counter_plan())
    body = proc_body(text, [l for l in text.splitlines() if ".make#" in l][0])
    assert "call #o0 := new(fixtures.Counter);" in body
    assert re.search(r"call fixtures\.Counter\.\$init\$#\S*\(#o0\);", body)
    assert "call #o1 := array.new(5);" in body


def test_array_new_contract_provides_length():
    decls = parse(emit(plans.allocator_plan(), plans.counter_plan())).decls
    proc = next(d for d in decls if isinstance(d, ast.ProcDecl) and d.name == "array.new")
    wanted = ast.BinOp("==", ast.FnApp("lengthof", (ast.Id("arr"),)), ast.Id("len"))
    assert wanted in proc.ensures
    fresh = [e for e in proc.ensures if isinstance(e, ast.BinOp) and e.op == "&&"]
    assert fresh  # freshness conjunction present


def test_constructor_with_ensures_inlined():
    text = emit(plans.counter_plan())
    m = re.search(r"procedure \S*\.\$init\$#\S*\(this: Reference\)\n((?:  .*\n)*)", text)
    assert "ensures read(#heap, this, fixtures.Counter.count) == 0;" in m.group(1)


# -- whole-program properties -------------------------------------------------------------


def test_determinism_byte_identical():
    first = emit(*plans.corpus())
    second = emit(*plans.corpus())
    assert first == second


def test_symbol_closure_on_corpus():
    text = emit(*plans.corpus())
    assert undefined_symbols(parse(text)) == []


def test_emitted_program_reparses_structurally():
    program, _ = translate_plans(*plans.corpus())
    assert parse(print_program(program)) == program


def test_old_outside_ensures_in_function_body():
    pure = MethodPlan(name="p", descriptor="(I)I",
                      annotations=[plans.PURE_ANN], param_names=["x"],
                      code=[("iload", 0), ("invokestatic", (plans.OPS, "old", "(I)I")),
                            ("ireturn",)])
    with pytest.raises(TranslationError) as err:
        emit(ClassPlan(name="t.OF", methods=[pure]))
    assert err.value.code == "E_OLD_OUTSIDE_ENSURES"


def test_old_operator_only_inside_ensures():
    program, _ = translate_plans(*plans.corpus())

    def scan(e, allow_old):
        if isinstance(e, ast.OldExpr):
            assert allow_old, "old() outside an ensures clause"
            scan(e.a, allow_old)
        elif isinstance(e, (ast.BinOp,)):
            scan(e.a, allow_old)
            scan(e.b, allow_old)
        elif isinstance(e, (ast.UnOp, ast.Coerce)):
            scan(e.a, allow_old)
        elif isinstance(e, ast.FnApp):
            for a in e.args:
                scan(a, allow_old)
        elif isinstance(e, ast.Ite):
            for sub in (e.cond, e.then, e.other):
                scan(sub, allow_old)
        elif isinstance(e, ast.Quant):
            scan(e.body, allow_old)

    saw_ensures_old = False
    for d in program.decls:
        if isinstance(d, ast.FuncDecl) and d.body is not None:
            scan(d.body, False)
        elif isinstance(d, ast.AxiomDecl):
            scan(d.expr, False)
        elif isinstance(d, ast.ProcDecl):
            for r in d.requires:
                scan(r, False)
            for e in d.ensures:
                scan(e, True)
                if "OldExpr" in repr(e):
                    saw_ensures_old = True
            for s in d.body or ():
                for expr in getattr(s, "expr", None), getattr(s, "value", None):
                    if expr is not None:
                        scan(expr, False)
                if isinstance(s, ast.CallStmt):
                    for a in s.args:
                        scan(a, False)
    assert saw_ensures_old  # the counter fixture exercises it


def test_boolean_int_coercion_at_call_boundary():
    # a Z-declared parameter used where an int formal is expected
    callee = MethodPlan(name="m", descriptor="(I)I",
                        code=[("iload", 0), ("ireturn",)])
    caller = MethodPlan(name="go", descriptor="(Z)I",
                        code=[("iload", 0), ("invokestatic", ("t.T", "m", "(I)I")),
                              ("ireturn",)], param_names=["b"])
    text = emit(ClassPlan(name="t.T", methods=[callee, caller]))
    assert "(if b then 1 else 0)" in text


def test_interface_call_uses_bodiless_procedure():
    iface = ClassPlan(
        name="t.Shape", access_flags=0x0601,  # interface abstract
        interfaces=[], default_init=False,
        methods=[MethodPlan(name="area", descriptor="(I)I", access_flags=0x0401,
                            code=None)])
    caller = ClassPlan(name="t.Use", methods=[MethodPlan(
        name="go", descriptor="(Lt/Shape;I)I",
        code=[("aload", 0), ("iload", 1),
              ("invokeinterface", ("t.Shape", "area", "(I)I")),
              ("ireturn",)],
        param_names=["s", "n"])])
    program, frames = translate_plans(iface, caller)
    text = print_program(program)
    m = re.search(r"procedure (t\.Shape\.area#\S*)\(this: Reference, p0: int\) "
                  r"returns \(@ret: int\);", text)
    assert m, text
    assert "call #r0 := %s(s, n);" % m.group(1) in text
    assert frames[m.group(1)].value == "WHOLE_HEAP"  # bodiless, conservative
    assert undefined_symbols(parse(text)) == []


def test_long_constant_is_mathematical_int():
    text = emit_method([("push", "long", 1 << 40), ("lload", 0), ("ladd",),
                        ("lreturn",)],
                       descriptor="(J)J", param_names=["x"])
    assert "@ret := 1099511627776 + x;" in text


@pytest.mark.parametrize("seed", range(10))
def test_random_programs_translate_and_resolve(seed):
    import random

    import randgen
    from jvm2boogie.boogie import parse as bparse

    rng = random.Random(seed * 7001 + 3)
    for trial in range(6):
        if trial % 2 == 0:
            plan = ClassPlan(name="rp.C%d" % trial,
                             methods=[randgen.random_method(rng, "m%d" % k)
                                      for k in range(2)])
        else:
            plan = randgen.random_stateful_class(rng, "rp.S%d" % trial)
        program, _ = translate_plans(plan)
        text = print_program(program)
        reparsed = bparse(text)
        assert reparsed == program
        assert undefined_symbols(reparsed) == []
