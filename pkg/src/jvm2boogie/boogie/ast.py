"""AST for the emitted Boogie subset, plus the deterministic printer.

All nodes are frozen dataclasses over tuples, so structural equality is
plain ==, which is what the print/parse round-trip tests rely on.  The
printer emits minimal parentheses: same-level `&&`/`||` mixing and nested
relational/equivalence operators are parenthesized because Boogie's
grammar rejects the unparenthesized forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal


# -- types ----------------------------------------------------------------------

@dataclass(frozen=True)
class TName:
    name: str
    args: tuple["TName", ...] = ()


TINT = TName("int")
TREAL = TName("real")
TBOOL = TName("bool")


# -- expressions ------------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class RealLit:
    value: float


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Id:
    name: str


@dataclass(frozen=True)
class FnApp:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class BinOp:
    op: str  # <==> ==> && || == != < <= > >= + - * div mod /
    a: object
    b: object


@dataclass(frozen=True)
class UnOp:
    op: str  # ! -
    a: object


@dataclass(frozen=True)
class OldExpr:
    a: object


@dataclass(frozen=True)
class Coerce:
    a: object
    type: TName


@dataclass(frozen=True)
class Ite:
    cond: object
    then: object
    other: object


@dataclass(frozen=True)
class Quant:
    kind: str  # forall | exists
    typarams: tuple[str, ...]
    bound: tuple[tuple[str, TName], ...]
    body: object


# -- statements -------------------------------------------------------------------

@dataclass(frozen=True)
class LabelStmt:
    name: str


@dataclass(frozen=True)
class AssignStmt:
    target: str
    value: object


@dataclass(frozen=True)
class CallStmt:
    lhs: str | None
    callee: str
    args: tuple = ()


@dataclass(frozen=True)
class IfStmt:
    cond: object
    then: tuple = ()
    other: tuple | None = None


@dataclass(frozen=True)
class GotoStmt:
    targets: tuple[str, ...] = ()


@dataclass(frozen=True)
class AssertStmt:
    expr: object


@dataclass(frozen=True)
class AssumeStmt:
    expr: object


@dataclass(frozen=True)
class ReturnStmt:
    pass


# -- declarations -------------------------------------------------------------------

@dataclass(frozen=True)
class TypeDecl:
    name: str
    params: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: TName
    unique: bool = False


@dataclass(frozen=True)
class GlobalVarDecl:
    name: str
    type: TName


@dataclass(frozen=True)
class LocalVarDecl:
    name: str
    type: TName


@dataclass(frozen=True)
class FuncDecl:
    name: str
    typarams: tuple[str, ...]
    params: tuple[tuple[str | None, TName], ...]
    ret: TName
    body: object | None = None


@dataclass(frozen=True)
class AxiomDecl:
    expr: object


@dataclass(frozen=True)
class ProcDecl:
    name: str
    params: tuple[tuple[str, TName], ...] = ()
    returns: tuple[tuple[str, TName], ...] = ()
    requires: tuple = ()
    ensures: tuple = ()
    modifies: tuple[str, ...] = ()
    locals: tuple[LocalVarDecl, ...] = ()
    body: tuple | None = None  # None = declaration without implementation


@dataclass
class Program:
    decls: list = field(default_factory=list)

    def __eq__(self, other):
        return isinstance(other, Program) and self.decls == other.decls

    def find_proc(self, name: str) -> ProcDecl | None:
        for d in self.decls:
            if isinstance(d, ProcDecl) and d.name == name:
                return d
        return None

    def find_func(self, name: str) -> FuncDecl | None:
        for d in self.decls:
            if isinstance(d, FuncDecl) and d.name == name:
                return d
        return None


# -- printer ---------------------------------------------------------------------

_LEVEL = {
    "<==>": 1, "==>": 2, "||": 3, "&&": 3,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "div": 6, "mod": 6, "/": 6,
}
_RELATIONAL = {"==", "!=", "<", "<=", ">", ">=", "<==>"}


def print_real(value: float) -> str:
    text = repr(value)
    if "e" in text or "E" in text or "." not in text:
        text = format(Decimal(text), "f")
    if "." not in text:
        text += ".0"
    return text


def print_type(t: TName) -> str:
    if not t.args:
        return t.name
    return t.name + " " + " ".join(
        "(%s)" % print_type(a) if a.args else print_type(a) for a in t.args)


def print_expr(e, parent_level: int = 0, parent_op: str | None = None,
               right_side: bool = False) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, RealLit):
        return print_real(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Id):
        return e.name
    if isinstance(e, FnApp):
        return "%s(%s)" % (e.name, ", ".join(print_expr(a) for a in e.args))
    if isinstance(e, OldExpr):
        return "old(%s)" % print_expr(e.a)
    if isinstance(e, Coerce):
        return "(%s: %s)" % (print_expr(e.a), print_type(e.type))
    if isinstance(e, Ite):
        return "(if %s then %s else %s)" % (
            print_expr(e.cond), print_expr(e.then), print_expr(e.other))
    if isinstance(e, Quant):
        typ = "<%s> " % ", ".join(e.typarams) if e.typarams else ""
        bound = ", ".join("%s: %s" % (n, print_type(t)) for n, t in e.bound)
        return "(%s %s%s :: %s)" % (e.kind, typ, bound, print_expr(e.body))
    if isinstance(e, UnOp):
        if e.op == "-" and isinstance(e.a, (IntLit, RealLit)):
            return "-(%s)" % print_expr(e.a)
        return "%s%s" % (e.op, print_expr(e.a, 7, e.op))
    if isinstance(e, BinOp):
        level = _LEVEL[e.op]
        a = print_expr(e.a, level, e.op, False)
        b = print_expr(e.b, level, e.op, True)
        text = "%s %s %s" % (a, e.op, b)
        if parent_level > level:
            return "(%s)" % text
        if parent_level == level:
            if e.op in _RELATIONAL or parent_op in _RELATIONAL:
                return "(%s)" % text
            if parent_op != e.op and {e.op, parent_op} <= {"&&", "||"}:
                return "(%s)" % text
            if e.op == "==>":
                # implication associates to the right
                return text if right_side else "(%s)" % text
            if right_side:
                return "(%s)" % text
        return text
    raise TypeError("cannot print %r" % (e,))


def _print_stmt(s, indent: str, out: list[str]):
    if isinstance(s, LabelStmt):
        out.append(indent[2:] + s.name + ":")
    elif isinstance(s, AssignStmt):
        out.append("%s%s := %s;" % (indent, s.target, print_expr(s.value)))
    elif isinstance(s, CallStmt):
        args = ", ".join(print_expr(a) for a in s.args)
        if s.lhs is None:
            out.append("%scall %s(%s);" % (indent, s.callee, args))
        else:
            out.append("%scall %s := %s(%s);" % (indent, s.lhs, s.callee, args))
    elif isinstance(s, IfStmt):
        out.append("%sif (%s) {" % (indent, print_expr(s.cond)))
        for inner in s.then:
            _print_stmt(inner, indent + "  ", out)
        if s.other is not None:
            out.append(indent + "} else {")
            for inner in s.other:
                _print_stmt(inner, indent + "  ", out)
        out.append(indent + "}")
    elif isinstance(s, GotoStmt):
        out.append("%sgoto %s;" % (indent, ", ".join(s.targets)))
    elif isinstance(s, AssertStmt):
        out.append("%sassert %s;" % (indent, print_expr(s.expr)))
    elif isinstance(s, AssumeStmt):
        out.append("%sassume %s;" % (indent, print_expr(s.expr)))
    elif isinstance(s, ReturnStmt):
        out.append(indent + "return;")
    else:
        raise TypeError("cannot print statement %r" % (s,))


def _print_params(params) -> str:
    parts = []
    for name, t in params:
        if name is None:
            parts.append(print_type(t))
        else:
            parts.append("%s: %s" % (name, print_type(t)))
    return ", ".join(parts)


def print_decl(d) -> str:
    if isinstance(d, TypeDecl):
        if d.params:
            return "type %s %s;" % (d.name, " ".join(d.params))
        return "type %s;" % d.name
    if isinstance(d, ConstDecl):
        unique = "unique " if d.unique else ""
        return "const %s%s: %s;" % (unique, d.name, print_type(d.type))
    if isinstance(d, GlobalVarDecl):
        return "var %s: %s;" % (d.name, print_type(d.type))
    if isinstance(d, AxiomDecl):
        return "axiom %s;" % print_expr(d.expr)
    if isinstance(d, FuncDecl):
        typ = "<%s>" % ", ".join(d.typarams) if d.typarams else ""
        head = "function %s%s(%s) returns (%s)" % (
            d.name, typ, _print_params(d.params), print_type(d.ret))
        if d.body is None:
            return head + ";"
        return head + " { %s }" % print_expr(d.body)
    if isinstance(d, ProcDecl):
        head = "procedure %s(%s)" % (d.name, _print_params(d.params))
        if d.returns:
            head += " returns (%s)" % _print_params(d.returns)
        lines = [head + (";" if d.body is None else "")]
        for r in d.requires:
            lines.append("  requires %s;" % print_expr(r))
        for e in d.ensures:
            lines.append("  ensures %s;" % print_expr(e))
        if d.modifies:
            lines.append("  modifies %s;" % ", ".join(d.modifies))
        if d.body is not None:
            lines.append("{")
            for v in d.locals:
                lines.append("  var %s: %s;" % (v.name, print_type(v.type)))
            for s in d.body:
                _print_stmt(s, "  ", lines)
            lines.append("}")
        return "\n".join(lines)
    raise TypeError("cannot print declaration %r" % (d,))


def print_program(p: Program) -> str:
    return "\n".join(print_decl(d) for d in p.decls) + "\n"
