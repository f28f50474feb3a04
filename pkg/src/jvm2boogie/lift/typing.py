"""Expected-type reconstruction over lifted bodies.

Bytecode erases the boolean/int distinction; this pass recovers it from
use sites.  Integer-kind variables with no declared descriptor live in
the lattice unknown < bool < int and are resolved by a fixpoint over
def/use constraints; mixed bool/int evidence resolves upward to int.
Declared descriptors (parameters, fields, call signatures) are hard.
"""

from __future__ import annotations

from ..classfile.model import parse_descriptor
from ..errors import TranslationError
from . import ir
from .ir import BOOL, INT, REAL, REF

_ARITH_OPS = {"+", "-", "*", "/", "%", "<<", ">>", ">>>"}
_CMP_OPS = {"==", "!=", "<", "<=", ">", ">="}
_BITWISE = {"&", "|", "^"}


def _join(a: str | None, b: str | None) -> str | None:
    if a is None:
        return b
    if b is None or a == b:
        return a
    if {a, b} == {BOOL, INT}:
        return INT
    raise TranslationError("E_TYPE_CONFLICT", "cannot reconcile %s with %s" % (a, b))


class _Typer:
    def __init__(self, body: ir.GrimpBody):
        self.body = body
        self.fixed: dict[str, str] = {}
        self.lattice: dict[str, str | None] = {}
        self.changed = False
        variables = dict(body.locals_used())
        for p in body.params:
            variables.setdefault(p.name, p)
        for name, var in variables.items():
            if var.kind == "j":
                self.fixed[name] = INT
            elif var.kind in ("f", "d"):
                self.fixed[name] = REAL
            elif var.kind == "a":
                self.fixed[name] = REF
            elif var.rtype == "Z":
                self.fixed[name] = BOOL
            elif var.rtype in ("I", "B", "C", "S"):
                self.fixed[name] = INT
            else:
                self.lattice[name] = None

    def var_sort(self, name: str) -> str | None:
        if name in self.fixed:
            return self.fixed[name]
        return self.lattice.get(name)

    def constrain_var(self, name: str, sort: str | None):
        if sort is None or name in self.fixed:
            return
        if sort in (REAL, REF):
            raise TranslationError(
                "E_TYPE_CONFLICT",
                "integer variable %s used at sort %s" % (name, sort))
        new = _join(self.lattice.get(name), sort)
        if new != self.lattice.get(name):
            self.lattice[name] = new
            self.changed = True

    # -- natural (bottom-up) sorts ---------------------------------------------

    def expr_sort(self, e: ir.Expr) -> str | None:
        if isinstance(e, ir.Local):
            return self.var_sort(e.name)
        if isinstance(e, ir.Lit):
            if e.kind == "i":
                return None if e.value in (0, 1) else INT
            return INT if e.kind == "j" else REAL
        if isinstance(e, (ir.NullLit, ir.StringLit, ir.NewObject, ir.NewArray, ir.Cast)):
            return REF
        if isinstance(e, ir.Binary):
            if e.op in ("cmp", "cmpl", "cmpg"):
                return INT
            if e.op in _CMP_OPS:
                return BOOL
            if e.op == "==>":
                return BOOL
            if e.op in _BITWISE and e.kind == "i":
                return _join(self.expr_sort(e.a), self.expr_sort(e.b))
            return INT if e.kind in ("i", "j") else REAL
        if isinstance(e, ir.Unary):
            if e.op == "!":
                return BOOL
            if e.op == "neg":
                return INT if e.kind in ("i", "j") else REAL
            return INT if e.kind in ("i", "j") else REAL
        if isinstance(e, ir.FieldRead):
            return ir.descriptor_sort(e.descriptor)
        if isinstance(e, ir.ArrayRead):
            return ir.descriptor_sort(e.elem)
        if isinstance(e, ir.ArrayLength):
            return INT
        if isinstance(e, ir.Call):
            ret = parse_descriptor(e.descriptor)[1]
            return None if ret == "V" else ir.descriptor_sort(ret)
        if isinstance(e, ir.Quantifier):
            return BOOL
        if isinstance(e, ir.Conditional):
            return _join(self.expr_sort(e.then), self.expr_sort(e.other))
        if isinstance(e, ir.Old):
            return self.expr_sort(e.a)
        if isinstance(e, ir.BoundVar):
            return ir.descriptor_sort(e.rtype)
        raise TranslationError("E_TYPE_CONFLICT", "unsortable %r" % e)

    # -- constraint propagation --------------------------------------------------

    def constrain(self, e: ir.Expr, ctx: str | None):
        if isinstance(e, ir.Local):
            self.constrain_var(e.name, ctx)
            return
        if isinstance(e, ir.Lit):
            return
        if isinstance(e, ir.Binary):
            if e.op in _CMP_OPS and e.kind == "i":
                sa, sb = self.expr_sort(e.a), self.expr_sort(e.b)
                operand = INT if INT in (sa, sb) else (BOOL if BOOL in (sa, sb) else None)
                self.constrain(e.a, operand)
                self.constrain(e.b, operand)
            elif e.op in _CMP_OPS or e.op in ("cmp", "cmpl", "cmpg"):
                opctx = INT if e.kind == "j" else (REAL if e.kind in "fd" else None)
                self.constrain(e.a, opctx)
                self.constrain(e.b, opctx)
            elif e.op == "==>":
                self.constrain(e.a, BOOL)
                self.constrain(e.b, BOOL)
            elif e.op in _BITWISE and e.kind == "i":
                sub = ctx if ctx in (BOOL, INT) else None
                self.constrain(e.a, sub)
                self.constrain(e.b, sub)
            else:
                opctx = INT if e.kind in ("i", "j") else REAL
                self.constrain(e.a, opctx)
                self.constrain(e.b, INT if e.op in ("<<", ">>", ">>>") else opctx)
            return
        if isinstance(e, ir.Unary):
            if e.op == "!":
                self.constrain(e.a, BOOL)
            elif e.op == "neg":
                self.constrain(e.a, INT if e.kind in ("i", "j") else REAL)
            else:
                src = e.op[0]
                self.constrain(e.a, INT if src in ("i", "l") else REAL)
            return
        if isinstance(e, ir.Cast):
            self.constrain(e.a, REF)
            return
        if isinstance(e, ir.FieldRead):
            if e.receiver is not None:
                self.constrain(e.receiver, REF)
            return
        if isinstance(e, ir.ArrayRead):
            self.constrain(e.array, REF)
            self.constrain(e.index, INT)
            return
        if isinstance(e, ir.ArrayLength):
            self.constrain(e.array, REF)
            return
        if isinstance(e, ir.Call):
            if e.receiver is not None:
                self.constrain(e.receiver, REF)
            ptypes = parse_descriptor(e.descriptor)[0]
            for arg, desc in zip(e.args, ptypes):
                self.constrain(arg, ir.descriptor_sort(desc))
            return
        if isinstance(e, ir.Quantifier):
            self.constrain(e.body, BOOL)
            return
        if isinstance(e, ir.Conditional):
            self.constrain(e.cond, BOOL)
            sub = ctx if ctx is not None else self.expr_sort(e)
            self.constrain(e.then, sub)
            self.constrain(e.other, sub)
            return
        if isinstance(e, ir.Old):
            self.constrain(e.a, ctx)
            return

    def stmt_pass(self):
        ret_desc = parse_descriptor(self.body.method.descriptor)[1]
        for s in self.body.stmts:
            if isinstance(s, ir.Assign):
                self.constrain_var(s.target.name, self.expr_sort(s.value))
                self.constrain(s.value, self.var_sort(s.target.name))
            elif isinstance(s, ir.FieldStore):
                if s.receiver is not None:
                    self.constrain(s.receiver, REF)
                self.constrain(s.value, ir.descriptor_sort(s.descriptor))
            elif isinstance(s, ir.ArrayStore):
                self.constrain(s.array, REF)
                self.constrain(s.index, INT)
                self.constrain(s.value, ir.descriptor_sort(s.elem))
            elif isinstance(s, ir.If):
                self.constrain(s.cond, BOOL)
            elif isinstance(s, ir.Return):
                if s.value is not None and ret_desc != "V":
                    self.constrain(s.value, ir.descriptor_sort(ret_desc))
            elif isinstance(s, ir.InvokeStmt):
                self.constrain(s.call, None)
            elif isinstance(s, (ir.SpecAssert, ir.SpecAssume)):
                self.constrain(s.expr, BOOL)

    # -- annotation ----------------------------------------------------------------

    def annotate(self, e: ir.Expr, ctx: str | None) -> str:
        if isinstance(e, ir.Local):
            e.ex = self.var_sort(e.name) or INT
        elif isinstance(e, ir.Lit):
            if e.kind == "i" and e.value in (0, 1) and ctx == BOOL:
                e.ex = BOOL
            elif e.kind in ("i", "j"):
                e.ex = INT
            else:
                e.ex = REAL
        elif isinstance(e, (ir.NullLit, ir.StringLit, ir.NewObject, ir.NewArray, ir.Cast)):
            for child in ir.children(e):
                self.annotate(child, INT if isinstance(e, ir.NewArray) else REF)
            e.ex = REF
        elif isinstance(e, ir.Binary):
            if e.op in _CMP_OPS and e.kind == "i":
                sa, sb = self.expr_sort(e.a), self.expr_sort(e.b)
                operand = INT if INT in (sa, sb) else (BOOL if BOOL in (sa, sb) else INT)
                self.annotate(e.a, operand)
                self.annotate(e.b, operand)
                e.ex = BOOL
            elif e.op in _CMP_OPS:
                opctx = REAL if e.kind in "fd" else (REF if e.kind == "a" else INT)
                self.annotate(e.a, opctx)
                self.annotate(e.b, opctx)
                e.ex = BOOL
            elif e.op in ("cmp", "cmpl", "cmpg"):
                opctx = REAL if e.kind in "fd" else INT
                self.annotate(e.a, opctx)
                self.annotate(e.b, opctx)
                e.ex = INT
            elif e.op == "==>":
                self.annotate(e.a, BOOL)
                self.annotate(e.b, BOOL)
                e.ex = BOOL
            elif e.op in _BITWISE and e.kind == "i":
                if ctx in (BOOL, INT):
                    sub = ctx
                else:
                    sub = _join(self.expr_sort(e.a), self.expr_sort(e.b)) or INT
                self.annotate(e.a, sub)
                self.annotate(e.b, sub)
                e.ex = sub
            else:
                opctx = INT if e.kind in ("i", "j") else REAL
                self.annotate(e.a, opctx)
                self.annotate(e.b, INT if e.op in ("<<", ">>", ">>>") else opctx)
                e.ex = opctx
        elif isinstance(e, ir.Unary):
            if e.op == "!":
                self.annotate(e.a, BOOL)
                e.ex = BOOL
            elif e.op == "neg":
                opctx = INT if e.kind in ("i", "j") else REAL
                self.annotate(e.a, opctx)
                e.ex = opctx
            else:
                src = e.op[0]
                self.annotate(e.a, INT if src in ("i", "l") else REAL)
                e.ex = INT if e.kind in ("i", "j") else REAL
        elif isinstance(e, ir.FieldRead):
            if e.receiver is not None:
                self.annotate(e.receiver, REF)
            e.ex = ir.descriptor_sort(e.descriptor)
        elif isinstance(e, ir.ArrayRead):
            self.annotate(e.array, REF)
            self.annotate(e.index, INT)
            e.ex = ir.descriptor_sort(e.elem)
        elif isinstance(e, ir.ArrayLength):
            self.annotate(e.array, REF)
            e.ex = INT
        elif isinstance(e, ir.Call):
            if e.receiver is not None:
                self.annotate(e.receiver, REF)
            ptypes, ret = parse_descriptor(e.descriptor)
            for arg, desc in zip(e.args, ptypes):
                self.annotate(arg, ir.descriptor_sort(desc))
            e.ex = ir.descriptor_sort(ret) if ret != "V" else None
        elif isinstance(e, ir.Quantifier):
            e.var.ex = ir.descriptor_sort(e.var.rtype)
            self.annotate(e.body, BOOL)
            e.ex = BOOL
        elif isinstance(e, ir.BoundVar):
            e.ex = ir.descriptor_sort(e.rtype)
        elif isinstance(e, ir.Conditional):
            self.annotate(e.cond, BOOL)
            sub = ctx if ctx is not None else (self.expr_sort(e) or INT)
            self.annotate(e.then, sub)
            self.annotate(e.other, sub)
            e.ex = sub
        elif isinstance(e, ir.Old):
            e.ex = self.annotate(e.a, ctx)
        else:
            raise TranslationError("E_TYPE_CONFLICT", "cannot annotate %r" % e)
        return e.ex

    def annotate_stmts(self):
        ret_desc = parse_descriptor(self.body.method.descriptor)[1]
        for s in self.body.stmts:
            if isinstance(s, ir.Assign):
                s.target.ex = self.var_sort(s.target.name) or INT
                self.annotate(s.value, s.target.ex)
            elif isinstance(s, ir.FieldStore):
                if s.receiver is not None:
                    self.annotate(s.receiver, REF)
                self.annotate(s.value, ir.descriptor_sort(s.descriptor))
            elif isinstance(s, ir.ArrayStore):
                self.annotate(s.array, REF)
                self.annotate(s.index, INT)
                self.annotate(s.value, ir.descriptor_sort(s.elem))
            elif isinstance(s, ir.If):
                self.annotate(s.cond, BOOL)
            elif isinstance(s, ir.Return):
                if s.value is not None:
                    self.annotate(s.value, ir.descriptor_sort(ret_desc) if ret_desc != "V" else None)
            elif isinstance(s, ir.InvokeStmt):
                self.annotate(s.call, None)
            elif isinstance(s, (ir.SpecAssert, ir.SpecAssume)):
                self.annotate(s.expr, BOOL)


def infer_expected_types(body: ir.GrimpBody) -> ir.GrimpBody:
    """Annotate every expression with its expected sort; idempotent."""
    typer = _Typer(body)
    for _ in range(len(body.stmts) * 4 + 8):
        typer.changed = False
        typer.stmt_pass()
        if not typer.changed:
            break
    else:
        raise TranslationError("E_TYPE_CONFLICT", "type inference did not converge")
    typer.annotate_stmts()
    body.var_sorts = {name: typer.var_sort(name) or INT
                      for name in list(typer.fixed) + list(typer.lattice)}
    return body
