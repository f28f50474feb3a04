"""Small helpers shared across test modules."""

import copy
import os

from jvm2boogie.classfile import ClassFile, ClassPlan, build_class, parse_class
from jvm2boogie.encode import translate_classes
from jvm2boogie.lift import TestHeap, Trap


def compile_plan(plan: ClassPlan) -> ClassFile:
    return parse_class(build_class(plan))


def translate_plans(*plans: ClassPlan):
    classes = {}
    for plan in plans:
        cf = compile_plan(plan)
        classes[cf.this_class] = cf
    return translate_classes(classes)


def write_corpus(directory: str, plans) -> None:
    for plan in plans:
        rel = plan.name.replace(".", "/") + ".class"
        path = os.path.join(directory, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(build_class(plan))


def outcome(fn, heap: TestHeap):
    """(kind, value, heap snapshot) triple for differential comparison."""
    try:
        value = fn(heap)
    except Trap as trap:
        return ("trap", trap.kind, None)
    return ("ok", value, heap.state_snapshot())


def run_both(code_runner, ir_runner, seed_heap: TestHeap):
    h1 = copy.deepcopy(seed_heap)
    h2 = copy.deepcopy(seed_heap)
    return outcome(code_runner, h1), outcome(ir_runner, h2)
