"""Classfile binary parser.

Resolves all constant-pool indirection during parsing, decodes modified
UTF-8, disassembles Code attributes into canonical instructions, and
validates that branch targets land on instruction boundaries.
"""

from __future__ import annotations

import struct

from . import mutf8
from .model import (
    AnnotationValue,
    ClassFile,
    CodeAttribute,
    ExceptionEntry,
    FieldInfo,
    MethodInfo,
    RawInstruction,
    check_field_descriptor,
    parse_descriptor,
)
from .opcodes import NEWARRAY_TYPES, OPCODES
from ..errors import ClassFileError

MAGIC = 0xCAFEBABE
MIN_MAJOR = 49
MAX_MAJOR = 65

CONST_UTF8 = 1
CONST_INTEGER = 3
CONST_FLOAT = 4
CONST_LONG = 5
CONST_DOUBLE = 6
CONST_CLASS = 7
CONST_STRING = 8
CONST_FIELDREF = 9
CONST_METHODREF = 10
CONST_IMETHODREF = 11
CONST_NAME_AND_TYPE = 12
CONST_METHOD_HANDLE = 15
CONST_METHOD_TYPE = 16
CONST_DYNAMIC = 17
CONST_INVOKE_DYNAMIC = 18
CONST_MODULE = 19
CONST_PACKAGE = 20


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ClassFileError("E_TRUNCATED", "unexpected end of classfile at byte %d" % self.pos)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u1(self) -> int:
        return self.take(1)[0]

    def u2(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u4(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def s1(self) -> int:
        return struct.unpack(">b", self.take(1))[0]

    def s2(self) -> int:
        return struct.unpack(">h", self.take(2))[0]

    def s4(self) -> int:
        return struct.unpack(">i", self.take(4))[0]


class _ConstantPool:
    """Raw pool entries plus typed resolution accessors."""

    def __init__(self, entries: dict[int, tuple]):
        self.entries = entries

    def _get(self, index: int, *tags: int) -> tuple:
        entry = self.entries.get(index)
        if entry is None:
            raise ClassFileError("E_BAD_CP_INDEX", "constant pool index %d out of range" % index)
        if tags and entry[0] not in tags:
            raise ClassFileError(
                "E_BAD_CP_INDEX",
                "constant pool index %d has tag %d, expected %s" % (index, entry[0], tags),
            )
        return entry

    def utf8(self, index: int) -> str:
        return self._get(index, CONST_UTF8)[1]

    def class_name(self, index: int) -> str:
        name = self.utf8(self._get(index, CONST_CLASS)[1])
        if name.startswith("["):
            return name  # array "class" entries stay in descriptor form
        return name.replace("/", ".")

    def name_and_type(self, index: int) -> tuple[str, str]:
        _, name_idx, desc_idx = self._get(index, CONST_NAME_AND_TYPE)
        return self.utf8(name_idx), self.utf8(desc_idx)

    def member_ref(self, index: int) -> tuple[str, str, str]:
        tag, class_idx, nat_idx = self._get(
            index, CONST_FIELDREF, CONST_METHODREF, CONST_IMETHODREF
        )
        owner = self.class_name(class_idx)
        name, desc = self.name_and_type(nat_idx)
        return owner, name, desc

    def load_constant(self, index: int) -> tuple[str, object]:
        entry = self._get(index)
        tag = entry[0]
        if tag == CONST_INTEGER:
            return ("int", entry[1])
        if tag == CONST_FLOAT:
            return ("float", entry[1])
        if tag == CONST_LONG:
            return ("long", entry[1])
        if tag == CONST_DOUBLE:
            return ("double", entry[1])
        if tag == CONST_STRING:
            return ("string", self.utf8(entry[1]))
        if tag == CONST_CLASS:
            return ("class", self.class_name(index))
        raise ClassFileError("E_BAD_CP_INDEX", "cannot load constant with tag %d" % tag)


def parse_class(data: bytes) -> ClassFile:
    r = _Reader(data)
    if len(data) < 4 or struct.unpack(">I", data[:4])[0] != MAGIC:
        raise ClassFileError("E_MAGIC", "bad magic word (expected 0xCAFEBABE)")
    r.pos = 4
    r.u2()  # minor version
    major = r.u2()
    if not (MIN_MAJOR <= major <= MAX_MAJOR):
        raise ClassFileError(
            "E_UNSUPPORTED_VERSION", "classfile major version %d outside %d..%d"
            % (major, MIN_MAJOR, MAX_MAJOR)
        )
    pool = _parse_constant_pool(r)
    access_flags = r.u2()
    this_class = pool.class_name(r.u2())
    super_idx = r.u2()
    super_class = pool.class_name(super_idx) if super_idx != 0 else None
    interfaces = [pool.class_name(r.u2()) for _ in range(r.u2())]
    fields = [_parse_field(r, pool) for _ in range(r.u2())]
    methods = [_parse_method(r, pool) for _ in range(r.u2())]
    class_annotations: list[AnnotationValue] = []
    for _ in range(r.u2()):
        name, payload = _attribute(r, pool)
        if name == "RuntimeVisibleAnnotations":
            class_annotations = _parse_annotations(_Reader(payload), pool)
    return ClassFile(
        major_version=major,
        this_class=this_class,
        super_class=super_class,
        interfaces=interfaces,
        fields=fields,
        methods=methods,
        class_annotations=class_annotations,
        access_flags=access_flags,
    )


def read_annotations(m: MethodInfo) -> list[AnnotationValue]:
    """Runtime-visible annotations in declaration order, with repeatable
    containers (single "value" element holding an annotation array)
    flattened in place."""
    out: list[AnnotationValue] = []
    for ann in m.annotations:
        if (
            len(ann.elements) == 1
            and ann.elements[0][0] == "value"
            and isinstance(ann.elements[0][1], tuple)
            and ann.elements[0][1]
            and all(isinstance(v, AnnotationValue) for v in ann.elements[0][1])
        ):
            out.extend(ann.elements[0][1])
        else:
            out.append(ann)
    return out


def _parse_constant_pool(r: _Reader) -> _ConstantPool:
    count = r.u2()
    entries: dict[int, tuple] = {}
    index = 1
    while index < count:
        tag = r.u1()
        if tag == CONST_UTF8:
            length = r.u2()
            entries[index] = (tag, mutf8.decode(r.take(length)))
        elif tag == CONST_INTEGER:
            entries[index] = (tag, r.s4())
        elif tag == CONST_FLOAT:
            entries[index] = (tag, struct.unpack(">f", r.take(4))[0])
        elif tag == CONST_LONG:
            entries[index] = (tag, struct.unpack(">q", r.take(8))[0])
        elif tag == CONST_DOUBLE:
            entries[index] = (tag, struct.unpack(">d", r.take(8))[0])
        elif tag in (CONST_CLASS, CONST_STRING, CONST_MODULE, CONST_PACKAGE, CONST_METHOD_TYPE):
            entries[index] = (tag, r.u2())
        elif tag in (CONST_FIELDREF, CONST_METHODREF, CONST_IMETHODREF, CONST_NAME_AND_TYPE,
                     CONST_DYNAMIC, CONST_INVOKE_DYNAMIC):
            entries[index] = (tag, r.u2(), r.u2())
        elif tag == CONST_METHOD_HANDLE:
            entries[index] = (tag, r.u1(), r.u2())
        else:
            raise ClassFileError("E_BAD_CP_INDEX", "unknown constant pool tag %d" % tag)
        # 8-byte constants occupy two slots; the phantom slot stays unmapped
        index += 2 if tag in (CONST_LONG, CONST_DOUBLE) else 1
    return _ConstantPool(entries)


def _attribute(r: _Reader, pool: _ConstantPool) -> tuple[str, bytes]:
    name = pool.utf8(r.u2())
    length = r.u4()
    return name, r.take(length)


def _parse_field(r: _Reader, pool: _ConstantPool) -> FieldInfo:
    flags = r.u2()
    name = pool.utf8(r.u2())
    desc = pool.utf8(r.u2())
    check_field_descriptor(desc)
    annotations: list[AnnotationValue] = []
    for _ in range(r.u2()):
        attr_name, payload = _attribute(r, pool)
        if attr_name == "RuntimeVisibleAnnotations":
            annotations = _parse_annotations(_Reader(payload), pool)
    return FieldInfo(name=name, descriptor=desc, access_flags=flags, annotations=annotations)


def _parse_method(r: _Reader, pool: _ConstantPool) -> MethodInfo:
    flags = r.u2()
    name = pool.utf8(r.u2())
    desc = pool.utf8(r.u2())
    parse_descriptor(desc)
    code: CodeAttribute | None = None
    annotations: list[AnnotationValue] = []
    param_names: list[str] | None = None
    for _ in range(r.u2()):
        attr_name, payload = _attribute(r, pool)
        if attr_name == "Code":
            code = _parse_code(_Reader(payload), pool)
        elif attr_name == "RuntimeVisibleAnnotations":
            annotations = _parse_annotations(_Reader(payload), pool)
        elif attr_name == "MethodParameters":
            pr = _Reader(payload)
            param_names = []
            for _ in range(pr.u1()):
                name_idx = pr.u2()
                pr.u2()  # flags
                param_names.append(pool.utf8(name_idx) if name_idx else "")
    method = MethodInfo(name=name, descriptor=desc, access_flags=flags,
                        code=code, annotations=annotations)
    if code is not None and param_names is not None:
        code.param_names = param_names
    return method


def _parse_code(r: _Reader, pool: _ConstantPool) -> CodeAttribute:
    max_stack = r.u2()
    max_locals = r.u2()
    code_length = r.u4()
    bytecode = r.take(code_length)
    instructions = _disassemble(bytecode, pool)
    exception_table = []
    for _ in range(r.u2()):
        start, end, handler, catch_idx = r.u2(), r.u2(), r.u2(), r.u2()
        catch = pool.class_name(catch_idx) if catch_idx else None
        exception_table.append(ExceptionEntry(start, end, handler, catch))
    for _ in range(r.u2()):
        _attribute(r, pool)  # StackMapTable, LineNumberTable, ... all ignored
    return CodeAttribute(max_stack=max_stack, max_locals=max_locals,
                         instructions=instructions, exception_table=exception_table)


_CONST_PUSHES = {
    "aconst_null": ("null", None),
    "iconst_m1": ("int", -1),
    "iconst_0": ("int", 0),
    "iconst_1": ("int", 1),
    "iconst_2": ("int", 2),
    "iconst_3": ("int", 3),
    "iconst_4": ("int", 4),
    "iconst_5": ("int", 5),
    "lconst_0": ("long", 0),
    "lconst_1": ("long", 1),
    "fconst_0": ("float", 0.0),
    "fconst_1": ("float", 1.0),
    "fconst_2": ("float", 2.0),
    "dconst_0": ("double", 0.0),
    "dconst_1": ("double", 1.0),
}

_LOAD_STORE_KINDS = "ilfda"


def _disassemble(code: bytes, pool: _ConstantPool) -> list[RawInstruction]:
    r = _Reader(code)
    out: list[RawInstruction] = []
    branch_targets: list[tuple[int, int]] = []  # (target, source offset)
    while r.pos < len(code):
        offset = r.pos
        op = r.u1()
        if op not in OPCODES:
            raise ClassFileError("E_BAD_OPCODE", "unknown opcode 0x%02X at %d" % (op, offset))
        mnemonic, fmt = OPCODES[op]
        if mnemonic in ("jsr", "jsr_w", "ret"):
            raise ClassFileError("E_UNSUPPORTED", "obsolete %s at offset %d" % (mnemonic, offset))
        ins = _decode_one(r, pool, offset, mnemonic, fmt, branch_targets)
        out.append(ins)
    offsets = {ins.offset for ins in out}
    for target, source in branch_targets:
        if target not in offsets:
            raise ClassFileError(
                "E_BAD_BRANCH", "branch from %d to %d is not an instruction boundary"
                % (source, target)
            )
    return out


def _decode_one(r, pool, offset, mnemonic, fmt, branch_targets) -> RawInstruction:
    if mnemonic in _CONST_PUSHES:
        kind, value = _CONST_PUSHES[mnemonic]
        return RawInstruction(offset, "push", (kind, value))
    if fmt == "" and len(mnemonic) > 2 and mnemonic[-2] == "_" and mnemonic[-1].isdigit() \
            and mnemonic[1:-2] in ("load", "store"):
        return RawInstruction(offset, mnemonic[:-2], (int(mnemonic[-1]),))
    if mnemonic == "bipush":
        return RawInstruction(offset, "push", ("int", r.s1()))
    if mnemonic == "sipush":
        return RawInstruction(offset, "push", ("int", r.s2()))
    if mnemonic in ("ldc", "ldc_w", "ldc2_w"):
        index = r.u1() if mnemonic == "ldc" else r.u2()
        kind, value = pool.load_constant(index)
        return RawInstruction(offset, "push", (kind, value))
    if mnemonic == "wide":
        wide_op = r.u1()
        if wide_op not in OPCODES:
            raise ClassFileError("E_BAD_OPCODE", "bad wide opcode 0x%02X" % wide_op)
        wide_mn, wide_fmt = OPCODES[wide_op]
        if wide_fmt == "local":
            return RawInstruction(offset, wide_mn, (r.u2(),))
        if wide_mn == "iinc":
            return RawInstruction(offset, "iinc", (r.u2(), r.s2()))
        raise ClassFileError("E_BAD_OPCODE", "wide prefix on %s" % wide_mn)
    if fmt == "":
        return RawInstruction(offset, mnemonic)
    if fmt == "local":
        return RawInstruction(offset, mnemonic, (r.u1(),))
    if fmt == "iinc":
        return RawInstruction(offset, "iinc", (r.u1(), r.s1()))
    if fmt in ("branch2", "branch4"):
        delta = r.s2() if fmt == "branch2" else r.s4()
        target = offset + delta
        branch_targets.append((target, offset))
        canonical = "goto" if mnemonic in ("goto", "goto_w") else mnemonic
        return RawInstruction(offset, canonical, (target,))
    if fmt == "cp2" and mnemonic in ("getstatic", "putstatic", "getfield", "putfield"):
        return RawInstruction(offset, mnemonic, (pool.member_ref(r.u2()),))
    if fmt == "cp2" and mnemonic in ("invokevirtual", "invokespecial", "invokestatic"):
        return RawInstruction(offset, mnemonic, (pool.member_ref(r.u2()),))
    if fmt == "iface":
        ref = pool.member_ref(r.u2())
        r.u1()
        r.u1()
        return RawInstruction(offset, "invokeinterface", (ref,))
    if fmt == "indy":
        r.u2()
        r.u2()
        return RawInstruction(offset, "invokedynamic", ())
    if mnemonic == "new":
        return RawInstruction(offset, "new", (pool.class_name(r.u2()),))
    if mnemonic == "anewarray":
        return RawInstruction(offset, "anewarray", (pool.class_name(r.u2()),))
    if fmt == "atype":
        atype = r.u1()
        if atype not in NEWARRAY_TYPES:
            raise ClassFileError("E_BAD_OPCODE", "bad newarray element code %d" % atype)
        return RawInstruction(offset, "newarray", (NEWARRAY_TYPES[atype],))
    if mnemonic in ("checkcast", "instanceof"):
        return RawInstruction(offset, mnemonic, (pool.class_name(r.u2()),))
    if fmt == "multi":
        return RawInstruction(offset, "multianewarray", (pool.class_name(r.u2()), r.u1()))
    if fmt == "table":
        while r.pos % 4 != 0:
            r.u1()
        default = offset + r.s4()
        low = r.s4()
        high = r.s4()
        if high < low:
            raise ClassFileError("E_BAD_OPCODE", "tableswitch high < low")
        targets = tuple(offset + r.s4() for _ in range(high - low + 1))
        branch_targets.append((default, offset))
        for t in targets:
            branch_targets.append((t, offset))
        return RawInstruction(offset, "tableswitch", (default, low, targets))
    if fmt == "lookup":
        while r.pos % 4 != 0:
            r.u1()
        default = offset + r.s4()
        npairs = r.s4()
        pairs = tuple((r.s4(), offset + r.s4()) for _ in range(npairs))
        branch_targets.append((default, offset))
        for _, t in pairs:
            branch_targets.append((t, offset))
        return RawInstruction(offset, "lookupswitch", (default, pairs))
    raise ClassFileError("E_BAD_OPCODE", "unhandled opcode format %s/%s" % (mnemonic, fmt))


def _parse_annotations(r: _Reader, pool: _ConstantPool) -> list[AnnotationValue]:
    return [_parse_annotation(r, pool) for _ in range(r.u2())]


def _parse_annotation(r: _Reader, pool: _ConstantPool) -> AnnotationValue:
    type_desc = pool.utf8(r.u2())
    type_name = check_field_descriptor(type_desc)
    if not type_name.startswith("L"):
        raise ClassFileError("E_BAD_DESCRIPTOR", "annotation type %r is not a class" % type_desc)
    dotted = type_name[1:-1].replace("/", ".")
    elements = []
    for _ in range(r.u2()):
        name = pool.utf8(r.u2())
        elements.append((name, _parse_element_value(r, pool)))
    return AnnotationValue(type_name=dotted, elements=tuple(elements))


def _parse_element_value(r: _Reader, pool: _ConstantPool):
    tag = chr(r.u1())
    if tag in "BCISZ":
        value = pool._get(r.u2(), CONST_INTEGER)[1]
        return bool(value) if tag == "Z" else value
    if tag == "J":
        return pool._get(r.u2(), CONST_LONG)[1]
    if tag == "F":
        return pool._get(r.u2(), CONST_FLOAT)[1]
    if tag == "D":
        return pool._get(r.u2(), CONST_DOUBLE)[1]
    if tag == "s":
        return pool.utf8(r.u2())
    if tag == "e":
        type_desc = pool.utf8(r.u2())
        const_name = pool.utf8(r.u2())
        return (check_field_descriptor(type_desc)[1:-1].replace("/", "."), const_name)
    if tag == "c":
        return ("class", pool.utf8(r.u2()))
    if tag == "@":
        return _parse_annotation(r, pool)
    if tag == "[":
        return tuple(_parse_element_value(r, pool) for _ in range(r.u2()))
    raise ClassFileError("E_BAD_DESCRIPTOR", "bad element_value tag %r" % tag)
