"""Stack-to-register lifting of bytecode into the three-address IR.

The symbolic operand stack holds expression trees.  Side-effecting
instructions (calls, heap writes, allocations) spill affected pending
entries into fresh temporaries so that evaluation order is preserved;
at every basic-block boundary the remaining stack is flushed into
canonical per-depth temporaries (`#s0i`, `#s1a`, ...) so that any two
predecessors of a merge point agree on where values live.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..classfile.model import CodeAttribute, MethodInfo, parse_descriptor, slot_width
from ..errors import TranslationError, unsupported
from . import ir
from .ir import (
    ArrayLength, ArrayRead, ArrayStore, Assign, Binary, Call, Cast, FieldRead,
    FieldStore, Goto, GrimpBody, If, InvokeStmt, Lit, Local, MethodRef, NewArray,
    NewObject, NullLit, Return, StringLit, Unary,
)

_BINOPS = {
    "add": "+", "sub": "-", "mul": "*", "div": "/", "rem": "%",
    "shl": "<<", "shr": ">>", "ushr": ">>>", "and": "&", "or": "|", "xor": "^",
}
_KIND_BY_PREFIX = {"i": "i", "l": "j", "f": "f", "d": "d", "a": "a"}
_IF_OPS = {"eq": "==", "ne": "!=", "lt": "<", "ge": ">=", "gt": ">", "le": "<="}
_LOADS = {"iload", "lload", "fload", "dload", "aload"}
_STORES = {"istore", "lstore", "fstore", "dstore", "astore"}
_ARRAY_LOADS = {"iaload", "laload", "faload", "daload", "aaload", "baload", "caload", "saload"}
_ARRAY_STORES = {"iastore", "lastore", "fastore", "dastore", "aastore",
                 "bastore", "castore", "sastore"}
_ARITH = {p + suffix for p in "ilfd" for suffix in ("add", "sub", "mul", "div", "rem")}
_ARITH |= {p + suffix for p in "il" for suffix in ("shl", "shr", "ushr", "and", "or", "xor")}
_CONVERSIONS = {
    "i2l": "j", "i2f": "f", "i2d": "d", "l2i": "i", "l2f": "f", "l2d": "d",
    "f2i": "i", "f2l": "j", "f2d": "d", "d2i": "i", "d2l": "j", "d2f": "f",
    "i2b": "i", "i2c": "i", "i2s": "i",
}

_GENERIC_RTYPE = {"i": "I", "j": "J", "f": "F", "d": "D", "a": "Ljava/lang/Object;"}


@dataclass
class _Entry:
    expr: ir.Expr
    kind: str  # value kind: i j f d a

    @property
    def wide(self) -> bool:
        return self.kind in "jd"


def expr_rtype(e: ir.Expr) -> str | None:
    if isinstance(e, Local):
        return e.rtype
    if isinstance(e, FieldRead):
        return e.descriptor
    if isinstance(e, ArrayRead):
        return e.elem
    if isinstance(e, Call):
        return parse_descriptor(e.descriptor)[1]
    if isinstance(e, NewObject):
        return "L%s;" % e.owner.replace(".", "/")
    if isinstance(e, NewArray):
        return "[" + e.elem
    if isinstance(e, Cast):
        t = e.target
        return t if t.startswith("[") else "L%s;" % t.replace(".", "/")
    if isinstance(e, StringLit):
        return "Ljava/lang/String;"
    return None


def expr_kind(e: ir.Expr) -> str:
    if isinstance(e, Local):
        return e.kind
    if isinstance(e, Lit):
        return e.kind
    if isinstance(e, (NullLit, StringLit, NewObject, NewArray, Cast)):
        return "a"
    if isinstance(e, Binary):
        if e.op in ("cmp", "cmpl", "cmpg", "==", "!=", "<", "<=", ">", ">="):
            return "i"
        return e.kind
    if isinstance(e, Unary):
        return e.kind
    if isinstance(e, (FieldRead,)):
        return ir.descriptor_kind(e.descriptor)
    if isinstance(e, ArrayRead):
        return ir.descriptor_kind(e.elem)
    if isinstance(e, ArrayLength):
        return "i"
    if isinstance(e, Call):
        return ir.descriptor_kind(parse_descriptor(e.descriptor)[1])
    raise TranslationError("E_INTERNAL", "no kind for %r" % e)


class _Lifter:
    def __init__(self, code: CodeAttribute, method: MethodInfo, owner: str):
        self.code = code
        self.method = method
        self.owner = owner
        self.temp_count = 0
        self.alloc_count = 0
        self.locals: dict[tuple[int, str], Local] = {}
        self.canon: dict[tuple[int, str], Local] = {}
        self.params: list[Local] = []
        self.assigned: set[str] = set()
        self.param_names: set[str] = set()
        self._setup_params()

    # -- locals ---------------------------------------------------------------

    def _setup_params(self):
        ptypes, _ = parse_descriptor(self.method.descriptor)
        names = self.code.param_names
        slot = 0
        if not self.method.is_static:
            this = Local("this", "a", "L%s;" % self.owner.replace(".", "/"))
            self.locals[(0, "a")] = this
            self.params.append(this)
            self.param_names.add("this")
            slot = 1
        for i, desc in enumerate(ptypes):
            name = None
            if names and i < len(names) and names[i]:
                name = names[i]
            if not name:
                name = "p%d" % i
            kind = ir.descriptor_kind(desc)
            var = Local(name, kind, desc)
            self.locals[(slot, kind)] = var
            self.params.append(var)
            self.param_names.add(name)
            slot += slot_width(desc)

    def local(self, slot: int, kind: str) -> Local:
        var = self.locals.get((slot, kind))
        if var is None:
            var = Local("l%d%s" % (slot, kind), kind, None)
            self.locals[(slot, kind)] = var
        return var

    def canonical(self, index: int, kind: str) -> Local:
        var = self.canon.get((index, kind))
        if var is None:
            var = Local("#s%d%s" % (index, kind), kind, None)
            self.canon[(index, kind)] = var
        return var

    def fresh(self, kind: str, rtype: str | None) -> Local:
        var = Local("#t%d" % self.temp_count, kind, rtype)
        self.temp_count += 1
        return var

    def fresh_alloc(self, rtype: str) -> Local:
        var = Local("#o%d" % self.alloc_count, "a", rtype)
        self.alloc_count += 1
        return var

    # -- spilling -------------------------------------------------------------

    def _spill_entry(self, out: list, entry: _Entry, force: bool = False):
        if not force and isinstance(entry.expr, (Local, Lit, NullLit, StringLit)):
            return
        temp = self.fresh(entry.kind, expr_rtype(entry.expr))
        out.append(Assign(temp, entry.expr))
        self.assigned.add(temp.name)
        entry.expr = temp

    def spill_where(self, out: list, stack: list[_Entry], pred):
        """Spill entries matching pred, forcing any pending computation that
        can fault or has effects and sits below a spilled entry to evaluate
        first (bytecode evaluated it first)."""
        max_pos = -1
        for i, entry in enumerate(stack):
            if pred(entry.expr):
                max_pos = i
        for i, entry in enumerate(stack):
            if pred(entry.expr) or (i < max_pos and (ir.can_trap(entry.expr)
                                                     or ir.has_side_effects(entry.expr))):
                self._spill_entry(out, entry)

    def spill_group(self, out: list, stack: list[_Entry], group: list[_Entry]):
        """Spill specific popped entries; everything still on the stack lies
        below them, so pending faults there evaluate first."""
        if not any(not isinstance(e.expr, (Local, Lit, NullLit, StringLit))
                   for e in group):
            return
        self.spill_for_trap_order(out, stack)
        for entry in group:
            self._spill_entry(out, entry)

    def spill_for_side_effect(self, out, stack):
        self.spill_where(out, stack, lambda e: ir.reads_heap(e) or ir.has_side_effects(e)
                         or ir.can_trap(e))

    def spill_for_trap_order(self, out, stack):
        """Pending expressions that can fault must evaluate before the
        statement being emitted, as they did in the original bytecode."""
        self.spill_where(out, stack, lambda e: ir.has_side_effects(e) or ir.can_trap(e))

    def spill_for_local_write(self, out, stack, name: str):
        self.spill_where(out, stack, lambda e: ir.reads_local(e, name))

    # -- block flush ----------------------------------------------------------

    def flush_evaluations(self, out: list, stack: list[_Entry]):
        """Phase 1: force pending computations that must not move past the
        upcoming canonical reassignment (or that can fault)."""
        for entry in stack:
            if ir.has_side_effects(entry.expr) or ir.can_trap(entry.expr) or any(
                isinstance(n, Local) and n.name.startswith("#s") for n in ir.walk(entry.expr)
            ):
                self._spill_entry(out, entry)

    def flush_moves(self, out: list, stack: list[_Entry]):
        """Phase 2: park every entry in its canonical per-depth temporary.
        A value that reads a canonical about to be reassigned (permuted
        canonicals) is copied aside first, sequentializing the parallel
        assignment."""
        moves = []
        for i, entry in enumerate(stack):
            target = self.canonical(i, entry.kind)
            if isinstance(entry.expr, Local) and entry.expr.name == target.name:
                continue
            moves.append((entry, target))
        written = {target.name for _, target in moves}
        for entry, _ in moves:
            if any(isinstance(n, Local) and n.name in written
                   for n in ir.walk(entry.expr)):
                self._spill_entry(out, entry, force=True)
        for entry, target in moves:
            self._merge_rtype(target, expr_rtype(entry.expr))
            out.append(Assign(target, entry.expr))
            self.assigned.add(target.name)
            entry.expr = target

    def flush(self, out: list, stack: list[_Entry]):
        self.flush_evaluations(out, stack)
        self.flush_moves(out, stack)

    def _merge_rtype(self, var: Local, rtype: str | None):
        if rtype is None:
            return
        if var.rtype is None:
            var.rtype = rtype
        elif var.rtype != rtype:
            var.rtype = _GENERIC_RTYPE[var.kind]

    def layout(self, stack: list[_Entry]) -> tuple[str, ...]:
        return tuple(entry.kind for entry in stack)

    def entry_stack(self, layout: tuple[str, ...]) -> list[_Entry]:
        return [_Entry(self.canonical(i, kind), kind) for i, kind in enumerate(layout)]


def simulate_stack(code: CodeAttribute, method: MethodInfo, owner: str) -> GrimpBody:
    """Lift a method's bytecode to a stack-free three-address body."""
    where = "%s.%s" % (owner, method.name)
    if code.exception_table:
        raise unsupported("exception table", where)
    lifter = _Lifter(code, method, owner)

    instructions = code.instructions
    if not instructions:
        raise TranslationError("E_UNSUPPORTED", "empty code attribute", where)
    index_of = {ins.offset: i for i, ins in enumerate(instructions)}

    leaders = {0}
    targets = set()
    for i, ins in enumerate(instructions):
        mn = ins.mnemonic
        if mn in ("goto", "tableswitch", "lookupswitch") or mn.startswith("if"):
            if mn == "tableswitch":
                tgts = [ins.operands[0]] + list(ins.operands[2])
            elif mn == "lookupswitch":
                tgts = [ins.operands[0]] + [t for _, t in ins.operands[1]]
            else:
                tgts = [ins.operands[0]]
            targets.update(tgts)
            leaders.update(tgts)
            if i + 1 < len(instructions):
                leaders.add(instructions[i + 1].offset)
        elif mn in ("return", "ireturn", "lreturn", "freturn", "dreturn", "areturn", "athrow"):
            if i + 1 < len(instructions):
                leaders.add(instructions[i + 1].offset)

    block_starts = sorted(leaders)
    next_leader = {}
    for i, start in enumerate(block_starts):
        end = block_starts[i + 1] if i + 1 < len(block_starts) else None
        next_leader[start] = end

    in_layout: dict[int, tuple[str, ...]] = {0: ()}
    block_stmts: dict[int, list] = {}
    work = [0]
    while work:
        start = work.pop()
        if start in block_stmts:
            continue
        stmts, succs = _simulate_block(lifter, instructions, index_of, start,
                                       next_leader[start], in_layout[start], where)
        block_stmts[start] = stmts
        for succ, layout in succs:
            if succ not in index_of:
                raise TranslationError("E_BAD_BRANCH", "jump to offset %d" % succ, where)
            if succ not in in_layout:
                in_layout[succ] = layout
                work.append(succ)
            else:
                if in_layout[succ] != layout:
                    raise TranslationError(
                        "E_STACK_MISMATCH",
                        "inconsistent stack shapes %r vs %r at offset %d"
                        % (in_layout[succ], layout, succ), where)

    all_stmts: list[ir.Stmt] = []
    labels: dict[str, int] = {}
    for start in block_starts:
        if start not in block_stmts:
            continue
        if start in targets:
            labels["L%d" % start] = len(all_stmts)
        all_stmts.extend(block_stmts[start])

    ret = MethodRef(owner, method.name, method.descriptor, method.is_static)
    body = GrimpBody(method=ret, params=lifter.params, stmts=all_stmts, labels=labels)
    body.mutated_params = lifter.param_names & lifter.assigned
    return body


def _simulate_block(lifter: _Lifter, instructions, index_of, start, end,
                    layout, where) -> tuple[list, list]:
    out: list[ir.Stmt] = []
    stack = lifter.entry_stack(layout)
    i = index_of[start]

    def push(expr, kind=None):
        stack.append(_Entry(expr, kind if kind else expr_kind(expr)))

    def pop() -> _Entry:
        if not stack:
            raise TranslationError("E_STACK_MISMATCH", "stack underflow", where)
        return stack.pop()

    def assign_local(slot: int, kind: str):
        entry = pop()
        if entry.kind != kind:
            raise TranslationError("E_STACK_MISMATCH",
                                   "store kind %s != %s" % (entry.kind, kind), where)
        var = lifter.local(slot, kind)
        lifter.spill_for_trap_order(out, stack)
        lifter.spill_for_local_write(out, stack, var.name)
        if var.name not in lifter.param_names:
            lifter._merge_rtype(var, expr_rtype(entry.expr))
        out.append(Assign(var, entry.expr))
        lifter.assigned.add(var.name)

    def discard(entry: _Entry):
        lifter.spill_for_trap_order(out, stack)
        if isinstance(entry.expr, Call):
            out.append(InvokeStmt(entry.expr))
        elif ir.has_side_effects(entry.expr) or ir.can_trap(entry.expr):
            temp = lifter.fresh(entry.kind, expr_rtype(entry.expr))
            out.append(Assign(temp, entry.expr))
            lifter.assigned.add(temp.name)

    def finish_jump(cond_entries: list[_Entry], force_spill: bool = False):
        """Flush the stack below a terminator.  Pending evaluations run
        first (push order), then consumed operands that would observe the
        canonical reassignment are respilled, then the moves happen."""
        lifter.flush_evaluations(out, stack)
        for entry in cond_entries:
            needs = force_spill and not isinstance(entry.expr, (Local, Lit))
            needs = needs or any(isinstance(n, Local) and n.name.startswith("#s")
                                 for n in ir.walk(entry.expr))
            if needs:
                lifter._spill_entry(out, entry)
        lifter.flush_moves(out, stack)

    while True:
        ins = instructions[i]
        mn = ins.mnemonic
        ops = ins.operands

        if mn == "nop":
            pass
        elif mn == "push":
            kind, value = ops
            if kind == "int":
                push(Lit(value, "i"))
            elif kind == "long":
                push(Lit(value, "j"))
            elif kind == "float":
                push(Lit(value, "f"))
            elif kind == "double":
                push(Lit(value, "d"))
            elif kind == "null":
                push(NullLit())
            elif kind == "string":
                push(StringLit(value))
            else:
                raise unsupported("constant kind %s" % kind, where)
        elif mn in _LOADS:
            kind = _KIND_BY_PREFIX[mn[0]]
            push(lifter.local(ops[0], kind))
        elif mn in _STORES:
            assign_local(ops[0], _KIND_BY_PREFIX[mn[0]])
        elif mn == "iinc":
            var = lifter.local(ops[0], "i")
            lifter.spill_for_local_write(out, stack, var.name)
            out.append(Assign(var, Binary("+", var, Lit(ops[1], "i"), "i")))
            lifter.assigned.add(var.name)
        elif mn in _ARRAY_LOADS:
            idx = pop()
            arr = pop()
            push(ArrayRead(arr.expr, idx.expr, _array_elem(arr, mn[:2])))
        elif mn in _ARRAY_STORES:
            value = pop()
            idx = pop()
            arr = pop()
            elem = _array_elem(arr, mn[:2])
            lifter.spill_for_side_effect(out, stack)
            out.append(ArrayStore(arr.expr, idx.expr, elem, value.expr))
        elif mn == "arraylength":
            push(ArrayLength(pop().expr))
        elif mn in ("pop", "pop2"):
            slots = 1 if mn == "pop" else 2
            while slots > 0:
                entry = pop()
                slots -= 2 if entry.wide else 1
                discard(entry)
            if slots < 0:
                raise TranslationError("E_STACK_MISMATCH", "pop2 split a wide value", where)
        elif mn in ("dup", "dup_x1", "dup_x2", "dup2", "dup2_x1", "dup2_x2"):
            _do_dup(lifter, out, stack, mn, where)
        elif mn == "swap":
            a, b = pop(), pop()
            if a.wide or b.wide:
                raise TranslationError("E_STACK_MISMATCH", "swap on wide value", where)
            # reordering pending computations would reorder their faults
            lifter.spill_group(out, stack, [b, a])
            stack.extend([a, b])
        elif mn in _ARITH:
            op = _BINOPS[mn[1:]]
            b, a = pop(), pop()
            push(Binary(op, a.expr, b.expr, _KIND_BY_PREFIX[mn[0]]))
        elif mn in ("ineg", "lneg", "fneg", "dneg"):
            a = pop()
            push(Unary("neg", a.expr, _KIND_BY_PREFIX[mn[0]]))
        elif mn in _CONVERSIONS:
            a = pop()
            push(Unary(mn, a.expr, _CONVERSIONS[mn]))
        elif mn == "lcmp":
            b, a = pop(), pop()
            push(Binary("cmp", a.expr, b.expr, "j"))
        elif mn in ("fcmpl", "fcmpg", "dcmpl", "dcmpg"):
            b, a = pop(), pop()
            push(Binary("cmp" + mn[-1], a.expr, b.expr, _KIND_BY_PREFIX[mn[0]]))
        elif mn.startswith("if_icmp") or mn.startswith("if_acmp"):
            b, a = pop(), pop()
            kind = "i" if mn[3] == "i" else "a"
            cond = _Entry(Binary(_IF_OPS[mn[7:]], a.expr, b.expr, kind), "i")
            finish_jump([cond])
            out.append(If(cond.expr, "L%d" % ops[0]))
            return out, [(ops[0], lifter.layout(stack)),
                         (_fallthrough(instructions, i, where), lifter.layout(stack))]
        elif mn in ("ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle"):
            a = pop()
            cond = _Entry(Binary(_IF_OPS[mn[2:]], a.expr, Lit(0, "i"), "i"), "i")
            finish_jump([cond])
            out.append(If(cond.expr, "L%d" % ops[0]))
            return out, [(ops[0], lifter.layout(stack)),
                         (_fallthrough(instructions, i, where), lifter.layout(stack))]
        elif mn in ("ifnull", "ifnonnull"):
            a = pop()
            op = "==" if mn == "ifnull" else "!="
            cond = _Entry(Binary(op, a.expr, NullLit(), "a"), "i")
            finish_jump([cond])
            out.append(If(cond.expr, "L%d" % ops[0]))
            return out, [(ops[0], lifter.layout(stack)),
                         (_fallthrough(instructions, i, where), lifter.layout(stack))]
        elif mn == "goto":
            finish_jump([])
            out.append(Goto("L%d" % ops[0]))
            return out, [(ops[0], lifter.layout(stack))]
        elif mn in ("tableswitch", "lookupswitch"):
            key = pop()
            finish_jump([key], force_spill=True)  # key is read by every arm
            if mn == "tableswitch":
                default, low, tgts = ops
                pairs = [(low + k, t) for k, t in enumerate(tgts)]
            else:
                default, raw_pairs = ops
                pairs = list(raw_pairs)
            for match, target in pairs:
                out.append(If(Binary("==", key.expr, Lit(match, "i"), "i"), "L%d" % target))
            out.append(Goto("L%d" % default))
            layout = lifter.layout(stack)
            succs = [(t, layout) for _, t in pairs] + [(default, layout)]
            return out, succs
        elif mn in ("ireturn", "lreturn", "freturn", "dreturn", "areturn"):
            value = pop()
            lifter.spill_for_trap_order(out, stack)
            out.append(Return(value.expr))
            return out, []
        elif mn == "return":
            out.append(Return(None))
            return out, []
        elif mn in ("getfield", "getstatic"):
            owner, name, desc = ops[0]
            recv = pop().expr if mn == "getfield" else None
            push(FieldRead(recv, owner, name, desc))
        elif mn in ("putfield", "putstatic"):
            owner, name, desc = ops[0]
            value = pop()
            recv = pop().expr if mn == "putfield" else None
            lifter.spill_for_side_effect(out, stack)
            out.append(FieldStore(recv, owner, name, desc, value.expr))
        elif mn in ("invokevirtual", "invokespecial", "invokestatic", "invokeinterface"):
            owner, name, desc = ops[0]
            ptypes, rettype = parse_descriptor(desc)
            args = [pop().expr for _ in ptypes][::-1]
            recv = pop().expr if mn != "invokestatic" else None
            lifter.spill_for_side_effect(out, stack)
            invoke_kind = {"invokevirtual": "virtual", "invokespecial": "special",
                           "invokestatic": "static", "invokeinterface": "interface"}[mn]
            call = Call(invoke_kind, owner, name, desc, recv, args)
            if rettype == "V":
                out.append(InvokeStmt(call))
            else:
                push(call)
        elif mn == "invokedynamic":
            raise unsupported("invokedynamic", where)
        elif mn == "new":
            lifter.spill_for_side_effect(out, stack)
            var = lifter.fresh_alloc("L%s;" % ops[0].replace(".", "/"))
            out.append(Assign(var, NewObject(ops[0])))
            lifter.assigned.add(var.name)
            push(var)
        elif mn in ("newarray", "anewarray"):
            length = pop()
            if mn == "newarray":
                elem = ops[0]
            else:
                elem = ops[0] if ops[0].startswith("[") else "L%s;" % ops[0].replace(".", "/")
            lifter.spill_for_side_effect(out, stack)
            var = lifter.fresh_alloc("[" + elem)
            out.append(Assign(var, NewArray(elem, length.expr)))
            lifter.assigned.add(var.name)
            push(var)
        elif mn == "checkcast":
            a = pop()
            push(Cast(ops[0], a.expr))
        elif mn in ("athrow", "monitorenter", "monitorexit", "multianewarray", "instanceof"):
            raise unsupported(mn, where)
        else:
            raise unsupported(mn, where)

        i += 1
        if i >= len(instructions):
            raise TranslationError("E_BAD_BRANCH", "control flow falls off method end", where)
        if end is not None and instructions[i].offset >= end:
            finish_jump([])
            return out, [(end, lifter.layout(stack))]


def _fallthrough(instructions, i, where) -> int:
    if i + 1 >= len(instructions):
        raise TranslationError("E_BAD_BRANCH", "conditional at method end", where)
    return instructions[i + 1].offset


def _array_elem(arr: _Entry, prefix: str) -> str:
    rtype = expr_rtype(arr.expr)
    if rtype and rtype.startswith("["):
        return rtype[1:]
    return {"ia": "I", "la": "J", "fa": "F", "da": "D",
            "ba": "B", "ca": "C", "sa": "S", "aa": "Ljava/lang/Object;"}[prefix]


_DUP_SHAPES = {
    "dup": (1, 0), "dup_x1": (1, 1), "dup_x2": (1, 2),
    "dup2": (2, 0), "dup2_x1": (2, 1), "dup2_x2": (2, 2),
}


def _do_dup(lifter: _Lifter, out, stack: list[_Entry], mn: str, where: str):
    dup_slots, skip_slots = _DUP_SHAPES[mn]

    def take(n: int) -> list[_Entry]:
        group: list[_Entry] = []
        while n > 0:
            if not stack:
                raise TranslationError("E_STACK_MISMATCH", "%s underflow" % mn, where)
            entry = stack.pop()
            n -= 2 if entry.wide else 1
            group.append(entry)
        if n < 0:
            raise TranslationError("E_STACK_MISMATCH", "%s split a wide value" % mn, where)
        group.reverse()
        return group

    dup_group = take(dup_slots)
    skip_group = take(skip_slots)
    lifter.spill_group(out, stack, skip_group + dup_group)
    copies = [_Entry(entry.expr, entry.kind) for entry in dup_group]
    stack.extend(copies)
    stack.extend(skip_group)
    stack.extend([_Entry(e.expr, e.kind) for e in dup_group])
