"""Parser/builder round-trips, modified UTF-8, annotations, error paths."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jvm2boogie.classfile import (
    AnnotationValue,
    ClassPlan,
    MethodPlan,
    build_class,
    parse_class,
    parsed_code_shape,
    plan_code_shape,
    read_annotations,
)
from jvm2boogie.classfile import mutf8
from jvm2boogie.errors import BuildPlanError, ClassFileError

import plans
import randgen
from util import compile_plan


def test_bad_magic():
    with pytest.raises(ClassFileError) as err:
        parse_class(b"\x00\x01\x02\x03" + b"\x00" * 20)
    assert err.value.code == "E_MAGIC"


def test_truncated():
    data = build_class(ClassPlan(name="A"))
    with pytest.raises(ClassFileError) as err:
        parse_class(data[:30])
    assert err.value.code in ("E_TRUNCATED", "E_BAD_CP_INDEX")


def test_minimal_class_round_trip():
    cf = compile_plan(ClassPlan(name="A"))
    assert cf.this_class == "A"
    assert cf.super_class == "java.lang.Object"
    # only the builder's default constructor
    assert [m.name for m in cf.methods] == ["<init>"]


def test_version_range():
    data = bytearray(build_class(ClassPlan(name="A", major_version=52)))
    assert parse_class(bytes(data)).major_version == 52
    data[6:8] = (0).to_bytes(1, "big") + (48).to_bytes(1, "big")
    with pytest.raises(ClassFileError):
        parse_class(bytes(data))


def test_summary_fixture_shape():
    cf = compile_plan(plans.summary_plan())
    summary = cf.method("summary")
    assert summary is not None and summary.descriptor == "([I)I"
    annotated = [m.name for m in cf.methods
                 if any(a.type_name.endswith("Predicate") for a in m.annotations)]
    assert sorted(annotated) == ["no_ones", "nonnegative"]
    assert cf.method("contains").annotations[0].type_name == plans.PURE


def test_code_shape_round_trip():
    plan = plans.summary_plan()
    cf = compile_plan(plan)
    for mp in plan.methods:
        parsed = cf.method(mp.name, mp.descriptor)
        assert parsed_code_shape(parsed.code.instructions) == plan_code_shape(mp.code)


def test_branch_to_missing_label():
    bad = MethodPlan(name="f", descriptor="()V", code=[("goto", "nowhere"), ("return",)])
    with pytest.raises(BuildPlanError) as err:
        build_class(ClassPlan(name="B", methods=[bad]))
    assert err.value.code == "E_PLAN_INCONSISTENT"


def test_inconsistent_stack_depth():
    bad = MethodPlan(name="f", descriptor="(I)I", code=[
        ("iload", 0), ("ifeq", "merge"),
        ("push", "int", 1),
        ("label", "merge"),  # depth 1 from fallthrough, 0 from the branch
        ("push", "int", 2), ("iadd",), ("ireturn",),
    ])
    with pytest.raises(BuildPlanError) as err:
        build_class(ClassPlan(name="B", methods=[bad]))
    assert err.value.code == "E_PLAN_INCONSISTENT"


def test_branch_into_instruction_middle_rejected():
    data = bytearray(build_class(ClassPlan(
        name="B2", methods=[MethodPlan(
            name="f", descriptor="(I)I",
            code=[("iload", 0), ("push", "int", 1000), ("iadd",),
                  ("goto", "l"), ("label", "l"), ("ireturn",)])],
        default_init=False)))
    goto_at = data.find(bytes([0xA7, 0x00, 0x03]))
    assert goto_at > 0
    data[goto_at + 2] = 0x02  # target now lands inside the next instruction
    with pytest.raises(ClassFileError) as err:
        parse_class(bytes(data))
    assert err.value.code == "E_BAD_BRANCH"


def test_jsr_rejected():
    data = bytearray(build_class(ClassPlan(
        name="J", methods=[MethodPlan(name="f", descriptor="()V",
                                      code=[("goto", "l"), ("label", "l"), ("return",)])],
        default_init=False)))
    goto_at = data.find(bytes([0xA7, 0x00]))
    assert goto_at > 0
    data[goto_at] = 0xA8  # jsr has the same operand layout
    with pytest.raises(ClassFileError) as err:
        parse_class(bytes(data))
    assert err.value.code == "E_UNSUPPORTED"


def test_annotation_values_preserved():
    cf = compile_plan(plans.summary_plan())
    summary = cf.method("summary")
    anns = read_annotations(summary)
    assert [(a.type_name, a.element("value")) for a in anns] == [
        (plans.REQUIRE, "no_ones"),
        (plans.ENSURE, "nonnegative"),
    ]


def test_unannotated_method_empty():
    cf = compile_plan(ClassPlan(name="A"))
    assert read_annotations(cf.method("<init>")) == []


def test_repeated_annotations_flattened_in_order():
    cf = compile_plan(plans.two_ensures_plan())
    clamp = cf.method("clamp")
    anns = read_annotations(clamp)
    assert [a.element("value") for a in anns] == ["lower", "upper"]
    assert all(a.type_name == plans.ENSURE for a in anns)


def test_exception_table_parsed():
    plan = ClassPlan(name="E", methods=[MethodPlan(
        name="f", descriptor="()V",
        code=[("label", "a"), ("nop",), ("label", "b"), ("return",)],
        exception_table=[("a", "b", "b", "java.lang.Exception")])])
    cf = compile_plan(plan)
    table = cf.method("f").code.exception_table
    assert len(table) == 1 and table[0].catch_type == "java.lang.Exception"


def test_long_constant_occupies_two_slots():
    plan = ClassPlan(name="L", methods=[MethodPlan(
        name="f", descriptor="()J",
        code=[("push", "long", 1 << 40), ("lreturn",)])])
    cf = compile_plan(plan)
    shape = parsed_code_shape(cf.method("f").code.instructions)
    assert shape[0] == ("push", "long", 1 << 40)


@given(st.text(min_size=0, max_size=60))
@settings(max_examples=300, deadline=None)
def test_mutf8_round_trip(text):
    assert mutf8.decode(mutf8.encode(text)) == text


def test_mutf8_surrogate_pair_encoding():
    text = "a\U0001F600b\x00c"
    data = mutf8.encode(text)
    assert b"\x00" not in data
    assert mutf8.decode(data) == text


def test_exotic_names_round_trip():
    name = "päck.€ls\U0001F600"
    cf = compile_plan(ClassPlan(name=name))
    assert cf.this_class == name


@pytest.mark.parametrize("seed", range(40))
def test_random_plan_round_trip(seed):
    rng = random.Random(seed + 1000)
    plan = randgen.random_class_plan(rng, seed)
    cf = compile_plan(plan)
    assert cf.this_class == plan.name
    assert cf.major_version == plan.major_version
    assert [f.name for f in cf.fields] == [f.name for f in plan.fields]
    want = {m.name for m in plan.methods}
    if plan.default_init and not any(m.name == "<init>" for m in plan.methods):
        want.add("<init>")
    assert {m.name for m in cf.methods} == want
    for mp in plan.methods:
        parsed = cf.method(mp.name, mp.descriptor)
        assert parsed_code_shape(parsed.code.instructions) == plan_code_shape(mp.code)
        if mp.annotations:
            assert parsed.annotations == mp.annotations


def test_wide_local_indices():
    code = [("push", "int", 7), ("istore", 300), ("iload", 300), ("ireturn",)]
    plan = ClassPlan(name="W", methods=[MethodPlan(name="f", descriptor="()I", code=code)])
    cf = compile_plan(plan)
    assert parsed_code_shape(cf.method("f").code.instructions) == plan_code_shape(code)


def test_nested_annotation_round_trip():
    inner = AnnotationValue("x.Inner", (("value", "deep"),))
    outer = AnnotationValue("x.Outer", (("nested", inner), ("count", 3)))
    plan = ClassPlan(name="N", methods=[MethodPlan(
        name="f", descriptor="()V", code=[("return",)], annotations=[outer])])
    cf = compile_plan(plan)
    assert cf.method("f").annotations == [outer]
