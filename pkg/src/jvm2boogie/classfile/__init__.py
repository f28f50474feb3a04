from .build import ClassPlan, FieldPlan, MethodPlan, build_class, parsed_code_shape, plan_code_shape
from .model import (
    AnnotationValue,
    ClassFile,
    CodeAttribute,
    FieldInfo,
    MethodInfo,
    RawInstruction,
    parse_descriptor,
    slot_width,
)
from .parse import parse_class, read_annotations

__all__ = [
    "AnnotationValue", "ClassFile", "ClassPlan", "CodeAttribute", "FieldInfo",
    "FieldPlan", "MethodInfo", "MethodPlan", "RawInstruction", "build_class",
    "parse_class", "parse_descriptor", "parsed_code_shape", "plan_code_shape",
    "read_annotations", "slot_width",
]
