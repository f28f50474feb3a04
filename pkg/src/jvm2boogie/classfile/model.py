"""Structured classfile model produced by the parser.

Constant-pool indirection is resolved while parsing, so the model carries
plain values: dotted class names, raw JVM descriptors, decoded strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ClassFileError

ACC_STATIC = 0x0008
ACC_FINAL = 0x0010
ACC_SUPER = 0x0020
ACC_VARARGS = 0x0080
ACC_NATIVE = 0x0100
ACC_INTERFACE = 0x0200
ACC_ABSTRACT = 0x0400
ACC_SYNTHETIC = 0x1000
ACC_ANNOTATION = 0x2000


@dataclass(frozen=True)
class RawInstruction:
    offset: int
    mnemonic: str
    operands: tuple = ()


@dataclass
class ExceptionEntry:
    start_pc: int
    end_pc: int
    handler_pc: int
    catch_type: str | None


@dataclass
class CodeAttribute:
    max_stack: int
    max_locals: int
    instructions: list[RawInstruction]
    exception_table: list[ExceptionEntry] = field(default_factory=list)
    param_names: list[str] | None = None

    def by_offset(self) -> dict[int, RawInstruction]:
        return {ins.offset: ins for ins in self.instructions}


@dataclass(frozen=True)
class AnnotationValue:
    type_name: str  # dotted, e.g. "byteback.annotations.Require"
    elements: tuple[tuple[str, object], ...] = ()

    def element(self, name: str):
        for key, value in self.elements:
            if key == name:
                return value
        return None


@dataclass
class FieldInfo:
    name: str
    descriptor: str
    access_flags: int
    annotations: list[AnnotationValue] = field(default_factory=list)

    @property
    def is_static(self) -> bool:
        return bool(self.access_flags & ACC_STATIC)


@dataclass
class MethodInfo:
    name: str
    descriptor: str
    access_flags: int
    code: CodeAttribute | None = None
    annotations: list[AnnotationValue] = field(default_factory=list)

    @property
    def is_static(self) -> bool:
        return bool(self.access_flags & ACC_STATIC)

    @property
    def is_abstract(self) -> bool:
        return bool(self.access_flags & ACC_ABSTRACT)

    @property
    def is_native(self) -> bool:
        return bool(self.access_flags & ACC_NATIVE)

    @property
    def param_types(self) -> list[str]:
        return parse_descriptor(self.descriptor)[0]

    @property
    def return_type(self) -> str:
        return parse_descriptor(self.descriptor)[1]


@dataclass
class ClassFile:
    major_version: int
    this_class: str
    super_class: str | None
    interfaces: list[str]
    fields: list[FieldInfo]
    methods: list[MethodInfo]
    class_annotations: list[AnnotationValue] = field(default_factory=list)
    access_flags: int = ACC_SUPER

    def method(self, name: str, descriptor: str | None = None) -> MethodInfo | None:
        for m in self.methods:
            if m.name == name and (descriptor is None or m.descriptor == descriptor):
                return m
        return None

    def field(self, name: str) -> FieldInfo | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None


def parse_descriptor(descriptor: str) -> tuple[list[str], str]:
    """Split a method descriptor into (parameter type list, return type)."""
    if not descriptor.startswith("("):
        raise ClassFileError("E_BAD_DESCRIPTOR", "not a method descriptor: %r" % descriptor)
    params: list[str] = []
    i = 1
    while i < len(descriptor) and descriptor[i] != ")":
        t, i = _parse_field_type(descriptor, i)
        params.append(t)
    if i >= len(descriptor) or descriptor[i] != ")":
        raise ClassFileError("E_BAD_DESCRIPTOR", "unterminated parameter list: %r" % descriptor)
    i += 1
    if descriptor[i:] == "V":
        return params, "V"
    ret, j = _parse_field_type(descriptor, i)
    if j != len(descriptor):
        raise ClassFileError("E_BAD_DESCRIPTOR", "trailing junk in %r" % descriptor)
    return params, ret


def _parse_field_type(s: str, i: int) -> tuple[str, int]:
    start = i
    while i < len(s) and s[i] == "[":
        i += 1
    if i >= len(s):
        raise ClassFileError("E_BAD_DESCRIPTOR", "truncated type in %r" % s)
    c = s[i]
    if c in "BCDFIJSZ":
        return s[start:i + 1], i + 1
    if c == "L":
        end = s.find(";", i)
        if end < 0:
            raise ClassFileError("E_BAD_DESCRIPTOR", "unterminated class type in %r" % s)
        return s[start:end + 1], end + 1
    raise ClassFileError("E_BAD_DESCRIPTOR", "bad type char %r in %r" % (c, s))


def check_field_descriptor(descriptor: str) -> str:
    t, i = _parse_field_type(descriptor, 0)
    if i != len(descriptor):
        raise ClassFileError("E_BAD_DESCRIPTOR", "trailing junk in %r" % descriptor)
    return t


def is_wide_type(descriptor: str) -> bool:
    return descriptor in ("J", "D")


def slot_width(descriptor: str) -> int:
    return 2 if is_wide_type(descriptor) else 1
