"""Three-address IR with expression trees, lifted from stack bytecode.

Expression nodes carry two layers of typing: `kind` is the JVM
computational type ('i', 'j', 'f', 'd', 'a') fixed by the producing
opcode, and `ex` is the reconstructed expected sort ('int', 'real',
'bool', 'ref') filled in by expected-type inference.  `rtype` keeps the
raw descriptor when one is known (parameter, field, call signatures),
which is how boolean locals and boolean arrays are recognized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# expected sorts
INT = "int"
REAL = "real"
BOOL = "bool"
REF = "ref"

KIND_SORT = {"i": INT, "j": INT, "f": REAL, "d": REAL, "a": REF}

DESC_KIND = {"B": "i", "C": "i", "I": "i", "S": "i", "Z": "i", "J": "j", "F": "f", "D": "d"}


def descriptor_kind(desc: str) -> str:
    return DESC_KIND.get(desc, "a")


def descriptor_sort(desc: str) -> str:
    if desc == "Z":
        return BOOL
    return KIND_SORT[descriptor_kind(desc)]


@dataclass(eq=False)
class Expr:
    pass


@dataclass(eq=False)
class Local(Expr):
    name: str
    kind: str
    rtype: str | None = None
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Lit(Expr):
    value: object
    kind: str  # 'i', 'j', 'f', 'd'
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class NullLit(Expr):
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class StringLit(Expr):
    value: str
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Binary(Expr):
    op: str  # + - * / % << >> >>> & | ^ cmp cmpl cmpg == != < <= > >= ==> (spec)
    a: Expr
    b: Expr
    kind: str  # computational kind of the operands
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Unary(Expr):
    op: str  # 'neg', '!', or a conversion opcode such as 'i2l'
    a: Expr
    kind: str  # result kind
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Cast(Expr):
    target: str  # class name or array descriptor
    a: Expr
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class FieldRead(Expr):
    receiver: Expr | None  # None for static reads
    owner: str
    name: str
    descriptor: str
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class ArrayRead(Expr):
    array: Expr
    index: Expr
    elem: str  # element descriptor
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class ArrayLength(Expr):
    array: Expr
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Call(Expr):
    invoke_kind: str  # static | virtual | interface | special
    owner: str
    name: str
    descriptor: str
    receiver: Expr | None
    args: list[Expr]
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class NewObject(Expr):
    owner: str
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class NewArray(Expr):
    elem: str  # element descriptor
    length: Expr
    ex: str | None = field(default=None, compare=False)


# specification-only nodes, introduced by aggregation
@dataclass(eq=False)
class BoundVar(Expr):
    name: str
    rtype: str  # descriptor of the bound type
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Quantifier(Expr):
    quant: str  # 'forall' | 'exists'
    var: BoundVar
    body: Expr
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Conditional(Expr):
    cond: Expr
    then: Expr
    other: Expr
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Old(Expr):
    a: Expr
    ex: str | None = field(default=None, compare=False)


@dataclass(eq=False)
class Stmt:
    pass


@dataclass(eq=False)
class Assign(Stmt):
    target: Local
    value: Expr


@dataclass(eq=False)
class FieldStore(Stmt):
    receiver: Expr | None
    owner: str
    name: str
    descriptor: str
    value: Expr


@dataclass(eq=False)
class ArrayStore(Stmt):
    array: Expr
    index: Expr
    elem: str
    value: Expr


@dataclass(eq=False)
class If(Stmt):
    cond: Expr
    target: str


@dataclass(eq=False)
class Goto(Stmt):
    target: str


@dataclass(eq=False)
class Return(Stmt):
    value: Expr | None


@dataclass(eq=False)
class InvokeStmt(Stmt):
    call: Call


@dataclass(eq=False)
class SpecAssert(Stmt):
    expr: Expr


@dataclass(eq=False)
class SpecAssume(Stmt):
    expr: Expr


@dataclass
class MethodRef:
    owner: str
    name: str
    descriptor: str
    is_static: bool


@dataclass
class GrimpBody:
    method: MethodRef
    params: list[Local]
    stmts: list[Stmt]
    labels: dict[str, int]  # label name -> statement index
    mutated_params: set[str] = field(default_factory=set)

    def locals_used(self) -> dict[str, Local]:
        found: dict[str, Local] = {}

        def visit(e: Expr):
            if isinstance(e, Local) and e.name not in found:
                found[e.name] = e
            for child in children(e):
                visit(child)

        for s in self.stmts:
            for e in stmt_exprs(s):
                visit(e)
            if isinstance(s, Assign) and s.target.name not in found:
                found[s.target.name] = s.target
        return found

    def label_at(self, index: int) -> str | None:
        for name, i in self.labels.items():
            if i == index:
                return name
        return None


def children(e: Expr) -> list[Expr]:
    if isinstance(e, Binary):
        return [e.a, e.b]
    if isinstance(e, (Unary, Old, Cast)):
        return [e.a]
    if isinstance(e, FieldRead):
        return [e.receiver] if e.receiver is not None else []
    if isinstance(e, ArrayRead):
        return [e.array, e.index]
    if isinstance(e, ArrayLength):
        return [e.array]
    if isinstance(e, Call):
        base = [e.receiver] if e.receiver is not None else []
        return base + list(e.args)
    if isinstance(e, NewArray):
        return [e.length]
    if isinstance(e, Quantifier):
        return [e.body]
    if isinstance(e, Conditional):
        return [e.cond, e.then, e.other]
    return []


def stmt_exprs(s: Stmt) -> list[Expr]:
    if isinstance(s, Assign):
        return [s.value]
    if isinstance(s, FieldStore):
        base = [s.receiver] if s.receiver is not None else []
        return base + [s.value]
    if isinstance(s, ArrayStore):
        return [s.array, s.index, s.value]
    if isinstance(s, If):
        return [s.cond]
    if isinstance(s, Return):
        return [s.value] if s.value is not None else []
    if isinstance(s, InvokeStmt):
        return [s.call]
    if isinstance(s, (SpecAssert, SpecAssume)):
        return [s.expr]
    return []


def walk(e: Expr):
    yield e
    for child in children(e):
        yield from walk(child)


def reads_local(e: Expr, name: str) -> bool:
    return any(isinstance(n, Local) and n.name == name for n in walk(e))


def reads_heap(e: Expr) -> bool:
    return any(isinstance(n, (FieldRead, ArrayRead)) for n in walk(e))


def has_side_effects(e: Expr) -> bool:
    """Calls may write the heap; allocations always do."""
    return any(isinstance(n, (Call, NewObject, NewArray)) for n in walk(e))


def can_trap(e: Expr) -> bool:
    """Evaluation may fault: integer division, array/instance-field access,
    calls, allocation.  Used to keep the bytecode's fault order when
    expressions stay pending on the symbolic stack."""
    for n in walk(e):
        if isinstance(n, Binary) and n.op in ("/", "%") and n.kind in ("i", "j"):
            return True
        if isinstance(n, (ArrayRead, ArrayLength, Call, NewObject, NewArray)):
            return True
        if isinstance(n, FieldRead) and n.receiver is not None:
            return True
    return False


def set_children(e: Expr, kids: list[Expr]):
    if not kids:
        return
    if isinstance(e, Binary):
        e.a, e.b = kids
    elif isinstance(e, (Unary, Old, Cast)):
        (e.a,) = kids
    elif isinstance(e, FieldRead):
        (e.receiver,) = kids
    elif isinstance(e, ArrayRead):
        e.array, e.index = kids
    elif isinstance(e, ArrayLength):
        (e.array,) = kids
    elif isinstance(e, Call):
        if e.receiver is not None:
            e.receiver = kids[0]
            e.args = kids[1:]
        else:
            e.args = list(kids)
    elif isinstance(e, NewArray):
        (e.length,) = kids
    elif isinstance(e, Quantifier):
        (e.body,) = kids
    elif isinstance(e, Conditional):
        e.cond, e.then, e.other = kids
    else:
        raise ValueError("node %r takes no children" % e)


def copy_expr(e: Expr) -> Expr:
    import copy as _copy

    out = _copy.copy(e)
    kids = [copy_expr(k) for k in children(e)]
    set_children(out, kids)
    return out


def copy_stmt(s: Stmt) -> Stmt:
    if isinstance(s, Assign):
        return Assign(s.target, copy_expr(s.value))
    if isinstance(s, FieldStore):
        recv = copy_expr(s.receiver) if s.receiver is not None else None
        return FieldStore(recv, s.owner, s.name, s.descriptor, copy_expr(s.value))
    if isinstance(s, ArrayStore):
        return ArrayStore(copy_expr(s.array), copy_expr(s.index), s.elem,
                          copy_expr(s.value))
    if isinstance(s, If):
        return If(copy_expr(s.cond), s.target)
    if isinstance(s, Return):
        return Return(copy_expr(s.value) if s.value is not None else None)
    if isinstance(s, InvokeStmt):
        return InvokeStmt(copy_expr(s.call))
    if isinstance(s, SpecAssert):
        return SpecAssert(copy_expr(s.expr))
    if isinstance(s, SpecAssume):
        return SpecAssume(copy_expr(s.expr))
    return s


def structurally_equal(a: Expr, b: Expr) -> bool:
    if type(a) is not type(b):
        return False
    simple = {
        Local: lambda e: (e.name, e.kind),
        Lit: lambda e: (e.value, e.kind),
        NullLit: lambda e: (),
        StringLit: lambda e: (e.value,),
        Binary: lambda e: (e.op, e.kind),
        Unary: lambda e: (e.op, e.kind),
        Cast: lambda e: (e.target,),
        FieldRead: lambda e: (e.owner, e.name, e.descriptor),
        ArrayRead: lambda e: (e.elem,),
        ArrayLength: lambda e: (),
        Call: lambda e: (e.invoke_kind, e.owner, e.name, e.descriptor),
        NewObject: lambda e: (e.owner,),
        NewArray: lambda e: (e.elem,),
        BoundVar: lambda e: (e.name, e.rtype),
        Quantifier: lambda e: (e.quant, e.var.name, e.var.rtype),
        Conditional: lambda e: (),
        Old: lambda e: (),
    }
    key = simple[type(a)]
    if key(a) != key(b):
        return False
    ca, cb = children(a), children(b)
    return len(ca) == len(cb) and all(structurally_equal(x, y) for x, y in zip(ca, cb))
