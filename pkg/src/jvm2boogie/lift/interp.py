"""Reference interpreters used as differential-testing oracles.

`interpret_bytecode` executes raw instructions on an operand stack;
`eval_grimp` executes the lifted IR.  Both use two's-complement machine
arithmetic at the operand width, so they agree with a real JVM on
overflow, division and shift semantics.  Traps (null dereference, bounds,
division by zero) are oracle-only signals.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from ..classfile.model import CodeAttribute, MethodInfo, parse_descriptor, slot_width
from . import ir
from .simulate import simulate_stack

STEP_LIMIT = 2_000_000


class Trap(Exception):
    """E_TRAP: runtime fault in the oracle (null, oob, div, negsize)."""

    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(kind)


@dataclass(frozen=True)
class Ref:
    id: int


@dataclass
class TestHeap:
    """A tiny heap plus a class table for resolving calls during tests."""

    __test__ = False  # not a pytest class

    objects: dict[int, dict] = field(default_factory=dict)
    arrays: dict[int, tuple[str, list]] = field(default_factory=dict)
    methods: dict[tuple[str, str, str], tuple] = field(default_factory=dict)
    spec_namespace: str | None = "byteback.annotations"
    next_id: int = 1
    strings: dict[str, Ref] = field(default_factory=dict)

    def _alloc(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def new_object(self, owner: str) -> Ref:
        i = self._alloc()
        self.objects[i] = {"$class": owner}
        return Ref(i)

    def new_array(self, elem: str, length: int) -> Ref:
        if length < 0:
            raise Trap("negsize")
        i = self._alloc()
        self.arrays[i] = (elem, [_default_value(elem)] * length)
        return Ref(i)

    def intern_string(self, text: str) -> Ref:
        if text not in self.strings:
            self.strings[text] = self.new_object("java.lang.String")
        return self.strings[text]

    def add_bytecode(self, owner: str, method: MethodInfo):
        self.methods[(owner, method.name, method.descriptor)] = ("bc", owner, method)

    def add_ir(self, body: ir.GrimpBody):
        m = body.method
        self.methods[(m.owner, m.name, m.descriptor)] = ("ir", body)

    def get_field(self, ref, owner: str, name: str, descriptor: str):
        if not isinstance(ref, Ref):
            raise Trap("null")
        return self.objects[ref.id].setdefault((owner, name), _default_value(descriptor))

    def set_field(self, ref, owner: str, name: str, value):
        if not isinstance(ref, Ref):
            raise Trap("null")
        self.objects[ref.id][(owner, name)] = value

    def statics_ref(self, owner: str) -> Ref:
        key = "$statics:" + owner
        if key not in self.strings:
            self.strings[key] = self.new_object(key)
        return self.strings[key]

    def array(self, ref) -> tuple[str, list]:
        if not isinstance(ref, Ref):
            raise Trap("null")
        if ref.id not in self.arrays:
            raise Trap("null")
        return self.arrays[ref.id]

    def array_get(self, ref, index: int):
        _, data = self.array(ref)
        if not (0 <= index < len(data)):
            raise Trap("oob")
        return data[index]

    def array_set(self, ref, index: int, value):
        elem, data = self.array(ref)
        if not (0 <= index < len(data)):
            raise Trap("oob")
        data[index] = _narrow(elem, value)

    def state_snapshot(self):
        return (
            {i: dict(fields) for i, fields in self.objects.items()},
            {i: (elem, list(data)) for i, (elem, data) in self.arrays.items()},
        )

    def call(self, owner: str, name: str, descriptor: str, args: list, budget: list):
        intrinsic = _intrinsic_semantics(self, owner, name, args)
        if intrinsic is not NOT_INTRINSIC:
            return intrinsic
        entry = self.methods.get((owner, name, descriptor))
        if entry is None:
            raise Trap("unresolved:%s.%s" % (owner, name))
        if entry[0] == "bc":
            _, own, method = entry
            return interpret_bytecode(method.code, method, own, args, self, budget)
        return eval_grimp(entry[1], args, self, budget)


def _default_value(descriptor: str):
    kind = ir.descriptor_kind(descriptor)
    if kind in "ij":
        return 0
    if kind in "fd":
        return 0.0
    return None


def _narrow(elem: str, value):
    if elem == "Z":
        return value & 1
    if elem == "B":
        return ((value & 0xFF) ^ 0x80) - 0x80
    if elem == "C":
        return value & 0xFFFF
    if elem == "S":
        return ((value & 0xFFFF) ^ 0x8000) - 0x8000
    if elem == "F":
        return f32(value)
    return value


NOT_INTRINSIC = object()


def _intrinsic_semantics(heap: TestHeap, owner: str, name: str, args: list):
    """Runtime meaning of the specification operators (booleans are 0/1)."""
    ns = heap.spec_namespace
    if ns is None or not owner.startswith(ns + "."):
        return NOT_INTRINSIC
    simple = owner[len(ns) + 1:]
    if simple == "Binding":
        return 0 if name not in ("reference",) else None
    if simple != "Operators":
        return NOT_INTRINSIC
    if name == "eq":
        return 1 if args[0] == args[1] else 0
    if name == "neq":
        return 1 if args[0] != args[1] else 0
    if name == "lt":
        return 1 if args[0] < args[1] else 0
    if name == "lte":
        return 1 if args[0] <= args[1] else 0
    if name == "gt":
        return 1 if args[0] > args[1] else 0
    if name == "gte":
        return 1 if args[0] >= args[1] else 0
    if name == "not":
        return 1 - (1 if args[0] else 0)
    if name == "implies":
        return 1 if (not args[0]) or args[1] else 0
    if name == "conditional":
        return args[1] if args[0] else args[2]
    if name == "old":
        return args[0]
    if name in ("invariant", "assertion", "assumption"):
        return None
    return NOT_INTRINSIC


# -- machine arithmetic --------------------------------------------------------

def i32(x: int) -> int:
    return ((x + 0x80000000) & 0xFFFFFFFF) - 0x80000000


def i64(x: int) -> int:
    return ((x + 0x8000000000000000) & 0xFFFFFFFFFFFFFFFF) - 0x8000000000000000


def f32(x: float) -> float:
    return struct.unpack(">f", struct.pack(">f", x))[0]


def _java_div(a: int, b: int) -> int:
    if b == 0:
        raise Trap("div")
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def _java_rem(a: int, b: int) -> int:
    if b == 0:
        raise Trap("div")
    r = abs(a) % abs(b)
    return -r if a < 0 else r


def binary_op(op: str, kind: str, a, b):
    if kind in ("i", "j"):
        norm = i32 if kind == "i" else i64
        shift_mask = 31 if kind == "i" else 63
        bits = 0xFFFFFFFF if kind == "i" else 0xFFFFFFFFFFFFFFFF
        if op == "+":
            return norm(a + b)
        if op == "-":
            return norm(a - b)
        if op == "*":
            return norm(a * b)
        if op == "/":
            return norm(_java_div(a, b))
        if op == "%":
            return _java_rem(a, b)
        if op == "<<":
            return norm(a << (b & shift_mask))
        if op == ">>":
            return a >> (b & shift_mask)
        if op == ">>>":
            return norm((a & bits) >> (b & shift_mask))
        if op == "&":
            return a & b
        if op == "|":
            return a | b
        if op == "^":
            return a ^ b
        if op == "cmp":
            return (a > b) - (a < b)
    if kind in ("f", "d"):
        wrap = f32 if kind == "f" else (lambda x: x)
        if op == "+":
            return wrap(a + b)
        if op == "-":
            return wrap(a - b)
        if op == "*":
            return wrap(a * b)
        if op == "/":
            if b == 0:
                inf = float("inf")
                return float("nan") if a == 0 or a != a else (inf if a > 0 else -inf)
            return wrap(a / b)
        if op == "%":
            if b == 0 or a != a or b != b or abs(a) == float("inf"):
                return float("nan")
            if abs(b) == float("inf"):
                return a
            return wrap(a - b * int(a / b))
        if op in ("cmpl", "cmpg"):
            if a != a or b != b:
                return -1 if op == "cmpl" else 1
            return (a > b) - (a < b)
    if op == "==>":
        return 1 if (not a) or b else 0
    if op in ("==", "!=", "<", "<=", ">", ">="):
        if kind == "a":
            same = (a is b) or (a == b)
            return (1 if same else 0) if op == "==" else (0 if same else 1)
        if kind in ("f", "d") and (a != a or b != b):
            return 1 if op == "!=" else 0
        table = {
            "==": a == b, "!=": a != b, "<": a < b,
            "<=": a <= b, ">": a > b, ">=": a >= b,
        }
        return 1 if table[op] else 0
    raise Trap("badop:%s%s" % (op, kind))


def unary_op(op: str, kind: str, a):
    if op == "neg":
        if kind == "i":
            return i32(-a)
        if kind == "j":
            return i64(-a)
        return f32(-a) if kind == "f" else -a
    if op == "!":
        return 1 - (1 if a else 0)
    if op in ("i2l", "f2d"):
        return a
    if op == "l2i":
        return i32(a)
    if op == "i2b":
        return ((a & 0xFF) ^ 0x80) - 0x80
    if op == "i2c":
        return a & 0xFFFF
    if op == "i2s":
        return ((a & 0xFFFF) ^ 0x8000) - 0x8000
    if op in ("i2f", "l2f"):
        return f32(float(a))
    if op in ("i2d", "l2d"):
        return float(a)
    if op == "d2f":
        return f32(a)
    if op in ("f2i", "d2i"):
        return _float_to_int(a, 0x7FFFFFFF, -0x80000000)
    if op in ("f2l", "d2l"):
        return _float_to_int(a, 0x7FFFFFFFFFFFFFFF, -0x8000000000000000)
    raise Trap("badop:%s" % op)


def _float_to_int(x: float, hi: int, lo: int) -> int:
    if x != x:
        return 0
    if x >= hi:
        return hi
    if x <= lo:
        return lo
    return int(x)


# -- bytecode interpreter -------------------------------------------------------

def interpret_bytecode(code: CodeAttribute, method: MethodInfo, owner: str,
                       args: list, heap: TestHeap, budget: list | None = None):
    """Directly execute raw instructions; the independent side of the
    lifting differential oracle."""
    if budget is None:
        budget = [STEP_LIMIT]
    locals_: dict[int, object] = {}
    ptypes, _ = parse_descriptor(method.descriptor)
    slot = 0
    arg_list = list(args)
    if not method.is_static:
        locals_[0] = arg_list.pop(0)
        slot = 1
    for desc, value in zip(ptypes, arg_list):
        locals_[slot] = value
        slot += slot_width(desc)

    index_of = {ins.offset: i for i, ins in enumerate(code.instructions)}
    stack: list[tuple[object, bool]] = []  # (value, wide)
    i = 0

    def push(v, wide=False):
        stack.append((v, wide))

    def pop():
        return stack.pop()[0]

    while True:
        budget[0] -= 1
        if budget[0] <= 0:
            raise Trap("limit")
        ins = code.instructions[i]
        mn = ins.mnemonic
        ops = ins.operands
        jump = None

        if mn == "nop":
            pass
        elif mn == "push":
            kind, value = ops
            if kind == "string":
                push(heap.intern_string(value))
            elif kind == "null":
                push(None)
            elif kind == "float":
                push(f32(value))
            else:
                push(value, wide=kind in ("long", "double"))
        elif mn in ("iload", "fload", "aload"):
            push(locals_[ops[0]])
        elif mn in ("lload", "dload"):
            push(locals_[ops[0]], wide=True)
        elif mn in ("istore", "fstore", "astore", "lstore", "dstore"):
            locals_[ops[0]] = pop()
        elif mn == "iinc":
            locals_[ops[0]] = i32(locals_[ops[0]] + ops[1])
        elif mn in ("iaload", "laload", "faload", "daload", "aaload",
                    "baload", "caload", "saload"):
            idx = pop()
            arr = pop()
            push(heap.array_get(arr, idx), wide=mn[0] in "ld")
        elif mn in ("iastore", "lastore", "fastore", "dastore", "aastore",
                    "bastore", "castore", "sastore"):
            value = pop()
            idx = pop()
            arr = pop()
            heap.array_set(arr, idx, value)
        elif mn == "arraylength":
            arr = pop()
            push(len(heap.array(arr)[1]))
        elif mn == "pop":
            stack.pop()
        elif mn == "pop2":
            if not stack[-1][1]:
                stack.pop()
            stack.pop()
        elif mn in ("dup", "dup_x1", "dup_x2", "dup2", "dup2_x1", "dup2_x2"):
            _interp_dup(stack, mn)
        elif mn == "swap":
            a, b = stack.pop(), stack.pop()
            stack.extend([a, b])
        elif mn in ("ineg", "lneg", "fneg", "dneg"):
            push(unary_op("neg", {"i": "i", "l": "j", "f": "f", "d": "d"}[mn[0]], pop()),
                 wide=mn[0] in "ld")
        elif mn in ("i2l", "i2f", "i2d", "l2i", "l2f", "l2d", "f2i", "f2l", "f2d",
                    "d2i", "d2l", "d2f", "i2b", "i2c", "i2s"):
            result = unary_op(mn, "", pop())
            push(result, wide=mn[2] in "ld")
        elif mn == "lcmp":
            b, a = pop(), pop()
            push((a > b) - (a < b))
        elif mn in ("fcmpl", "fcmpg", "dcmpl", "dcmpg"):
            b, a = pop(), pop()
            push(binary_op("cmp" + mn[-1], "f", a, b))
        elif len(mn) >= 3 and mn[0] in "ilfd" and mn[1:] in (
                "add", "sub", "mul", "div", "rem", "shl", "shr", "ushr", "and", "or", "xor"):
            b, a = pop(), pop()
            kind = {"i": "i", "l": "j", "f": "f", "d": "d"}[mn[0]]
            op = {"add": "+", "sub": "-", "mul": "*", "div": "/", "rem": "%",
                  "shl": "<<", "shr": ">>", "ushr": ">>>",
                  "and": "&", "or": "|", "xor": "^"}[mn[1:]]
            push(binary_op(op, kind, a, b), wide=mn[0] in "ld")
        elif mn in ("ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle"):
            v = pop()
            op = {"eq": "==", "ne": "!=", "lt": "<", "ge": ">=", "gt": ">", "le": "<="}[mn[2:]]
            if binary_op(op, "i", v, 0):
                jump = ops[0]
        elif mn.startswith("if_icmp") or mn.startswith("if_acmp"):
            b, a = pop(), pop()
            kind = "i" if mn[3] == "i" else "a"
            op = {"eq": "==", "ne": "!=", "lt": "<", "ge": ">=", "gt": ">", "le": "<="}[mn[7:]]
            if binary_op(op, kind, a, b):
                jump = ops[0]
        elif mn in ("ifnull", "ifnonnull"):
            v = pop()
            if (v is None) == (mn == "ifnull"):
                jump = ops[0]
        elif mn == "goto":
            jump = ops[0]
        elif mn == "tableswitch":
            default, low, tgts = ops
            key = pop()
            jump = tgts[key - low] if low <= key < low + len(tgts) else default
        elif mn == "lookupswitch":
            default, pairs = ops
            key = pop()
            jump = dict(pairs).get(key, default)
        elif mn in ("ireturn", "lreturn", "freturn", "dreturn", "areturn"):
            return pop()
        elif mn == "return":
            return None
        elif mn == "getstatic":
            o, name, desc = ops[0]
            push(heap.get_field(heap.statics_ref(o), o, name, desc),
                 wide=desc in ("J", "D"))
        elif mn == "putstatic":
            o, name, desc = ops[0]
            heap.set_field(heap.statics_ref(o), o, name, pop())
        elif mn == "getfield":
            o, name, desc = ops[0]
            ref = pop()
            push(heap.get_field(ref, o, name, desc), wide=desc in ("J", "D"))
        elif mn == "putfield":
            o, name, desc = ops[0]
            value = pop()
            ref = pop()
            heap.set_field(ref, o, name, value)
        elif mn in ("invokestatic", "invokevirtual", "invokespecial", "invokeinterface"):
            o, name, desc = ops[0]
            ptypes_, ret = parse_descriptor(desc)
            call_args = [pop() for _ in ptypes_][::-1]
            if mn != "invokestatic":
                receiver = pop()
                if receiver is None:
                    raise Trap("null")
                call_args.insert(0, receiver)
            result = heap.call(o, name, desc, call_args, budget)
            if ret != "V":
                push(result, wide=ret in ("J", "D"))
        elif mn == "new":
            push(heap.new_object(ops[0]))
        elif mn == "newarray":
            push(heap.new_array(ops[0], pop()))
        elif mn == "anewarray":
            elem = ops[0] if ops[0].startswith("[") else "L%s;" % ops[0].replace(".", "/")
            push(heap.new_array(elem, pop()))
        elif mn == "checkcast":
            pass
        else:
            raise Trap("unsupported:%s" % mn)

        i = index_of[jump] if jump is not None else i + 1


def _interp_dup(stack, mn: str):
    shapes = {"dup": (1, 0), "dup_x1": (1, 1), "dup_x2": (1, 2),
              "dup2": (2, 0), "dup2_x1": (2, 1), "dup2_x2": (2, 2)}
    dup_slots, skip_slots = shapes[mn]

    def take(n):
        group = []
        while n > 0:
            entry = stack.pop()
            n -= 2 if entry[1] else 1
            group.append(entry)
        group.reverse()
        return group

    dup_group = take(dup_slots)
    skip_group = take(skip_slots)
    stack.extend(dup_group)
    stack.extend(skip_group)
    stack.extend(dup_group)


# -- IR interpreter --------------------------------------------------------------

def eval_expr(e: ir.Expr, env: dict, heap: TestHeap, budget: list):
    if isinstance(e, ir.Local):
        return env[e.name]
    if isinstance(e, ir.Lit):
        return f32(e.value) if e.kind == "f" else e.value
    if isinstance(e, ir.NullLit):
        return None
    if isinstance(e, ir.StringLit):
        return heap.intern_string(e.value)
    if isinstance(e, ir.Binary):
        a = eval_expr(e.a, env, heap, budget)
        b = eval_expr(e.b, env, heap, budget)
        return binary_op(e.op, e.kind, a, b)
    if isinstance(e, ir.Unary):
        return unary_op(e.op, e.kind, eval_expr(e.a, env, heap, budget))
    if isinstance(e, ir.Cast):
        return eval_expr(e.a, env, heap, budget)
    if isinstance(e, ir.FieldRead):
        if e.receiver is None:
            ref = heap.statics_ref(e.owner)
        else:
            ref = eval_expr(e.receiver, env, heap, budget)
            if ref is None:
                raise Trap("null")
        return heap.get_field(ref, e.owner, e.name, e.descriptor)
    if isinstance(e, ir.ArrayRead):
        arr = eval_expr(e.array, env, heap, budget)
        idx = eval_expr(e.index, env, heap, budget)
        return heap.array_get(arr, idx)
    if isinstance(e, ir.ArrayLength):
        arr = eval_expr(e.array, env, heap, budget)
        return len(heap.array(arr)[1])
    if isinstance(e, ir.Call):
        recv = []
        if e.receiver is not None:
            r = eval_expr(e.receiver, env, heap, budget)
            if r is None:
                raise Trap("null")
            recv = [r]
        args = recv + [eval_expr(a, env, heap, budget) for a in e.args]
        return heap.call(e.owner, e.name, e.descriptor, args, budget)
    if isinstance(e, ir.NewObject):
        return heap.new_object(e.owner)
    if isinstance(e, ir.NewArray):
        return heap.new_array(e.elem, eval_expr(e.length, env, heap, budget))
    if isinstance(e, ir.Conditional):
        c = eval_expr(e.cond, env, heap, budget)
        return eval_expr(e.then if c else e.other, env, heap, budget)
    if isinstance(e, ir.Old):
        return eval_expr(e.a, env, heap, budget)
    raise Trap("uneval:%s" % type(e).__name__)


def eval_grimp(body: ir.GrimpBody, args: list, heap: TestHeap,
               budget: list | None = None):
    """Execute a lifted body; the checked side of the differential oracle."""
    if budget is None:
        budget = [STEP_LIMIT]
    env: dict[str, object] = {}
    for param, value in zip(body.params, args):
        env[param.name] = value
    pc = 0
    stmts = body.stmts
    while True:
        budget[0] -= 1
        if budget[0] <= 0:
            raise Trap("limit")
        if pc >= len(stmts):
            raise Trap("fellthrough")
        s = stmts[pc]
        if isinstance(s, ir.Assign):
            env[s.target.name] = eval_expr(s.value, env, heap, budget)
        elif isinstance(s, ir.FieldStore):
            if s.receiver is None:
                ref = heap.statics_ref(s.owner)
            else:
                ref = eval_expr(s.receiver, env, heap, budget)
                if ref is None:
                    raise Trap("null")
            value = eval_expr(s.value, env, heap, budget)
            heap.set_field(ref, s.owner, s.name, value)
        elif isinstance(s, ir.ArrayStore):
            arr = eval_expr(s.array, env, heap, budget)
            idx = eval_expr(s.index, env, heap, budget)
            value = eval_expr(s.value, env, heap, budget)
            heap.array_set(arr, idx, value)
        elif isinstance(s, ir.If):
            if eval_expr(s.cond, env, heap, budget):
                pc = body.labels[s.target]
                continue
        elif isinstance(s, ir.Goto):
            pc = body.labels[s.target]
            continue
        elif isinstance(s, ir.Return):
            if s.value is None:
                return None
            return eval_expr(s.value, env, heap, budget)
        elif isinstance(s, ir.InvokeStmt):
            eval_expr(s.call, env, heap, budget)
        elif isinstance(s, (ir.SpecAssert, ir.SpecAssume)):
            pass
        else:
            raise Trap("unstmt:%s" % type(s).__name__)
        pc += 1


def run_lifted(code: CodeAttribute, method: MethodInfo, owner: str,
               args: list, heap: TestHeap):
    body = simulate_stack(code, method, owner)
    return eval_grimp(body, args, heap)
