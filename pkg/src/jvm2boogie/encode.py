"""Translation of typed IR plus contracts into a Boogie program.

Pipeline per program: instantiate the prelude, declare class/field
constants, turn @Pure/@Predicate methods into Boogie functions, translate
every other method into a procedure (contracts inlined into requires/
ensures, loop invariants injected as assert/assume at the loop anchor
points, call expressions extracted into fresh temporaries), then run frame
inference over the generated bodies to decide modifies clauses and enforce
purity.
"""

from __future__ import annotations

import importlib.resources as resources
import zlib
from dataclasses import dataclass, field

from .boogie import ast, parse
from .classfile import ClassFile, MethodInfo, parse_descriptor, read_annotations
from .contracts import (
    ClassAnalysis,
    MethodContracts,
    RESULT_PARAM,
    SpecNamespace,
    clean_spec_statements,
    resolve_contracts,
)
from .errors import BoogieSyntaxError, TranslationError, unsupported
from .frames import WHOLE_HEAP, FrameResult, enforce_purity, infer_frames
from .lift import build_cfg, detect_loops, infer_expected_types
from .lift import ir
from .lift.cfg import LoopInfo

REFERENCE = ast.TName("Reference")
HEAP_TYPE = ast.TName("Heap")
TYPE_TYPE = ast.TName("Type")

_SORT_TYPE = {ir.INT: ast.TINT, ir.REAL: ast.TREAL, ir.BOOL: ast.TBOOL, ir.REF: REFERENCE}


def translate_type(sort_or_desc: str) -> ast.TName:
    """Boogie type for an IR sort or a JVM descriptor."""
    if sort_or_desc in _SORT_TYPE:
        return _SORT_TYPE[sort_or_desc]
    return _SORT_TYPE[ir.descriptor_sort(sort_or_desc)]


class Mangler:
    """Deterministic injective renaming into Boogie identifiers."""

    _ALLOWED = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789.$_#@")

    def __init__(self, reserved: set[str] | None = None):
        self.assigned: dict[tuple, str] = {}
        self.used: set[str] = set(reserved or ())

    def _clean(self, text: str) -> str:
        return "".join(c if c in self._ALLOWED else "$" for c in text)

    def _claim(self, key: tuple, name: str) -> str:
        if key in self.assigned:
            return self.assigned[key]
        candidate = name
        n = 0
        while candidate in self.used:
            n += 1
            candidate = "%s$%d" % (name, n)
        self.assigned[key] = candidate
        self.used.add(candidate)
        return candidate

    def type_const(self, owner: str) -> str:
        return self._claim(("type", owner), self._clean(owner))

    def field_const(self, owner: str, name: str) -> str:
        return self._claim(("field", owner, name), self._clean("%s.%s" % (owner, name)))

    def method(self, owner: str, name: str, descriptor: str) -> str:
        digest = "%08x" % (zlib.crc32(descriptor.encode("utf-8")) & 0xFFFFFFFF)
        return self._claim(("method", owner, name, descriptor),
                           self._clean("%s.%s#%s" % (owner, name, digest)))

    def string_const(self, value: str, index: int) -> str:
        return self._claim(("string", value), "$string.%d" % index)


# -- loop invariant injection ------------------------------------------------------


def inject_invariants(body: ir.GrimpBody, loops: list[LoopInfo],
                      invariants: dict[str, list[ir.Expr]]) -> ir.GrimpBody:
    """Insert assert/assume statements at each loop's head, backjump, body
    entry and exit points."""
    if not invariants:
        return body
    n = len(body.stmts)
    pre_label: dict[int, list[ir.Stmt]] = {}
    post_label: dict[int, list[ir.Stmt]] = {}
    post_stmt: dict[int, list[ir.Stmt]] = {}

    def conjoin(exprs: list[ir.Expr]) -> ir.Expr:
        acc = exprs[0]
        for e in exprs[1:]:
            node = ir.Binary("&", acc, e, "i")
            node.ex = ir.BOOL
            acc = node
        return acc

    for loop in loops:  # already innermost-first
        conjuncts = invariants.get(loop.head_label)
        if not conjuncts:
            continue
        inv = conjoin(conjuncts)
        pre_label.setdefault(loop.head_index, []).append(ir.SpecAssert(inv))
        head_stmt = body.stmts[loop.head_index]
        body_entry_after_test = False
        if isinstance(head_stmt, ir.If):
            target_index = body.labels[head_stmt.target]
            if any(target_index == idx for idx, _ in loop.exit_points):
                body_entry_after_test = True
        if body_entry_after_test:
            post_stmt.setdefault(loop.head_index, []).append(ir.SpecAssume(inv))
        else:
            post_label.setdefault(loop.head_index, []).append(ir.SpecAssume(inv))
        for back in loop.back_indices:
            pre_label.setdefault(back, []).append(ir.SpecAssert(inv))
        for exit_index, _ in loop.exit_points:
            post_label.setdefault(exit_index, []).append(ir.SpecAssume(inv))

    new_stmts: list[ir.Stmt] = []
    label_pos: dict[int, int] = {}
    for i, s in enumerate(body.stmts):
        new_stmts.extend(pre_label.get(i, ()))
        label_pos[i] = len(new_stmts)
        new_stmts.extend(post_label.get(i, ()))
        new_stmts.append(s)
        new_stmts.extend(post_stmt.get(i, ()))
    label_pos[n] = len(new_stmts)
    new_labels = {name: label_pos[idx] for name, idx in body.labels.items()}
    return ir.GrimpBody(method=body.method, params=body.params, stmts=new_stmts,
                        labels=new_labels, mutated_params=set(body.mutated_params))


# -- call extraction ----------------------------------------------------------------


def extract_calls(s: ir.Stmt, ctx: "ProcedureContext") -> tuple[list[ir.Stmt], ir.Stmt]:
    """Pull non-pure calls out of expressions into fresh `#r` temporaries,
    preserving left-to-right evaluation order.  The root call of a plain
    assignment or invoke statement stays in place.  The input statement is
    not modified."""
    prefix: list[ir.Stmt] = []

    def is_procedure_call(e: ir.Expr) -> bool:
        return (isinstance(e, ir.Call)
                and not ctx.enc.is_pure_call(e)
                and ctx.enc.ns.recognize_intrinsics(e) is None)

    def visit(e: ir.Expr) -> ir.Expr:
        _set_children(e, [visit(k) for k in ir.children(e)])
        if is_procedure_call(e):
            ret = parse_descriptor(e.descriptor)[1]
            if ret == "V":
                raise TranslationError("E_INTERNAL", "void call in expression")
            temp = ctx.fresh_result(ret)
            prefix.append(ir.Assign(temp, e))
            out = ir.Local(temp.name, temp.kind, temp.rtype)
            out.ex = e.ex
            return out
        return e

    def visit_keep_root(call: ir.Call):
        if call.receiver is not None:
            call.receiver = visit(call.receiver)
        call.args = [visit(a) for a in call.args]

    s = ir.copy_stmt(s)
    if isinstance(s, ir.Assign):
        if isinstance(s.value, (ir.NewObject, ir.NewArray)):
            _set_children(s.value, [visit(k) for k in ir.children(s.value)])
            return prefix, s
        if is_procedure_call(s.value):
            visit_keep_root(s.value)
            return prefix, s
        s.value = visit(s.value)
        return prefix, s
    if isinstance(s, ir.InvokeStmt):
        visit_keep_root(s.call)
        return prefix, s
    if isinstance(s, ir.FieldStore):
        if s.receiver is not None:
            s.receiver = visit(s.receiver)
        s.value = visit(s.value)
        return prefix, s
    if isinstance(s, ir.ArrayStore):
        s.array = visit(s.array)
        s.index = visit(s.index)
        s.value = visit(s.value)
        return prefix, s
    if isinstance(s, ir.If):
        s.cond = visit(s.cond)
        return prefix, s
    if isinstance(s, ir.Return) and s.value is not None:
        s.value = visit(s.value)
        return prefix, s
    return prefix, s


def _set_children(e: ir.Expr, kids: list[ir.Expr]):
    ir.set_children(e, kids)


# -- expression translation -----------------------------------------------------------

_BOUND_NAMES = "ijknm"


class ExprContext:
    """State for translating the expressions of one function, clause or
    procedure body."""

    def __init__(self, enc: "Encoder", heap: ast.Id, in_ensures: bool,
                 rename: dict[str, str] | None = None,
                 used_names: set[str] | None = None, where: str = "?"):
        self.enc = enc
        self.heap = heap
        self.in_ensures = in_ensures
        self.rename = rename or {}
        self.used = set(used_names or ())
        self.bound: dict[int, str] = {}
        self.bound_count = 0
        self.where = where

    def _fresh_bound_name(self) -> str:
        while True:
            if self.bound_count < len(_BOUND_NAMES):
                name = _BOUND_NAMES[self.bound_count]
            else:
                name = "i%d" % (self.bound_count - len(_BOUND_NAMES))
            self.bound_count += 1
            if name not in self.used:
                self.used.add(name)
                return name

    def coerce(self, expr, have: str, want: str | None):
        if want is None or have == want:
            return expr
        if have == ir.BOOL and want == ir.INT:
            return ast.Ite(expr, ast.IntLit(1), ast.IntLit(0))
        if have == ir.INT and want == ir.BOOL:
            return ast.BinOp("!=", expr, ast.IntLit(0))
        if have == ir.INT and want == ir.REAL:
            return ast.FnApp("int.to.real", (expr,))
        if have == ir.REAL and want == ir.INT:
            return ast.FnApp("real.to.int", (expr,))
        raise TranslationError("E_TYPE_CONFLICT",
                               "cannot use a %s value at sort %s" % (have, want), self.where)

    def tr_as(self, e: ir.Expr, want: str | None):
        expr, have = self.tr(e)
        return self.coerce(expr, have, want)

    def tr(self, e: ir.Expr):
        """Returns (boogie expression, sort)."""
        sort = e.ex
        if isinstance(e, ir.Lit):
            if e.kind in ("f", "d"):
                if e.value != e.value or e.value in (float("inf"), float("-inf")):
                    raise unsupported("non-finite float literal", self.where)
                return ast.RealLit(float(e.value)), ir.REAL
            if sort == ir.BOOL:
                if e.value not in (0, 1):
                    raise TranslationError("E_TYPE_CONFLICT",
                                           "literal %r used as boolean" % e.value, self.where)
                return ast.BoolLit(e.value == 1), ir.BOOL
            return ast.IntLit(e.value), ir.INT
        if isinstance(e, ir.NullLit):
            return ast.Id("null.reference"), ir.REF
        if isinstance(e, ir.StringLit):
            return ast.Id(self.enc.string_const(e.value)), ir.REF
        if isinstance(e, ir.Local):
            name = self.rename.get(e.name, e.name)
            return ast.Id(name), (e.ex or ir.KIND_SORT[e.kind])
        if isinstance(e, ir.BoundVar):
            name = self.bound.get(id(e))
            if name is None:
                # bound variables of the same quantifier share name by identity;
                # fall back to the raw name for detached nodes
                name = self.rename.get(e.name, e.name)
            return ast.Id(name), (e.ex or ir.descriptor_sort(e.rtype))
        if isinstance(e, ir.Binary):
            return self._tr_binary(e)
        if isinstance(e, ir.Unary):
            return self._tr_unary(e)
        if isinstance(e, ir.Cast):
            expr, _ = self.tr(e.a)
            return expr, ir.REF
        if isinstance(e, ir.FieldRead):
            if e.receiver is None:
                receiver = ast.FnApp("type2ref", (ast.Id(self.enc.type_const(e.owner)),))
            else:
                receiver = self.tr_as(e.receiver, ir.REF)
            fconst = ast.Id(self.enc.field_const(e.owner, e.name, e.descriptor))
            return ast.FnApp("read", (self.heap, receiver, fconst)), \
                ir.descriptor_sort(e.descriptor)
        if isinstance(e, ir.ArrayRead):
            arr = self.tr_as(e.array, ir.REF)
            idx = self.tr_as(e.index, ir.INT)
            sort = ir.descriptor_sort(e.elem)
            return ast.Coerce(ast.FnApp("array.read", (self.heap, arr, idx)),
                              translate_type(sort)), sort
        if isinstance(e, ir.ArrayLength):
            return ast.FnApp("lengthof", (self.tr_as(e.array, ir.REF),)), ir.INT
        if isinstance(e, ir.Call):
            return self._tr_call(e)
        if isinstance(e, ir.Quantifier):
            name = self._fresh_bound_name()
            self.bound[id(e.var)] = name
            # bound-variable occurrences in the body are BoundVar nodes that
            # share the variable's raw name
            inner_rename = dict(self.rename)
            inner_rename[e.var.name] = name
            saved = self.rename
            self.rename = inner_rename
            body = self.tr_as(e.body, ir.BOOL)
            self.rename = saved
            sort = ir.descriptor_sort(e.var.rtype)
            return ast.Quant(e.quant, (), ((name, translate_type(sort)),), body), ir.BOOL
        if isinstance(e, ir.Conditional):
            cond = self.tr_as(e.cond, ir.BOOL)
            want = e.ex or ir.INT
            return ast.Ite(cond, self.tr_as(e.then, want), self.tr_as(e.other, want)), want
        if isinstance(e, ir.Old):
            if not self.in_ensures:
                raise TranslationError("E_OLD_OUTSIDE_ENSURES",
                                       "old() outside an ensures clause", self.where)
            inner, sort = self.tr(e.a)
            return ast.OldExpr(inner), sort
        raise TranslationError("E_INTERNAL", "untranslatable expression %r" % e, self.where)

    def _tr_binary(self, e: ir.Binary):
        op = e.op
        if op in ("cmp", "cmpl", "cmpg"):
            want = ir.REAL if e.kind in "fd" else ir.INT
            return ast.FnApp("cmp", (self.tr_as(e.a, want), self.tr_as(e.b, want))), ir.INT
        if op == "==>":
            return ast.BinOp("==>", self.tr_as(e.a, ir.BOOL), self.tr_as(e.b, ir.BOOL)), ir.BOOL
        if op in ("==", "!=", "<", "<=", ">", ">="):
            if e.kind == "a":
                return ast.BinOp(op, self.tr_as(e.a, ir.REF), self.tr_as(e.b, ir.REF)), ir.BOOL
            lt, ls = self.tr(e.a)
            rt, rs = self.tr(e.b)
            if e.kind == "i" and ls == ir.BOOL and rs == ir.BOOL:
                if op == "==":
                    return ast.BinOp("<==>", lt, rt), ir.BOOL
                if op == "!=":
                    return ast.BinOp("!=", lt, rt), ir.BOOL
                op_sort = ir.INT
            else:
                op_sort = ir.REAL if e.kind in "fd" else ir.INT
            return ast.BinOp(op, self.coerce(lt, ls, op_sort),
                             self.coerce(rt, rs, op_sort)), ir.BOOL
        if op in ("&", "|", "^"):
            if e.ex == ir.BOOL:
                a = self.tr_as(e.a, ir.BOOL)
                b = self.tr_as(e.b, ir.BOOL)
                if op == "&":
                    return ast.BinOp("&&", a, b), ir.BOOL
                if op == "|":
                    return ast.BinOp("||", a, b), ir.BOOL
                return ast.BinOp("!=", a, b), ir.BOOL
            name = {"&": "int.and", "|": "int.or", "^": "int.xor"}[op]
            return ast.FnApp(name, (self.tr_as(e.a, ir.INT), self.tr_as(e.b, ir.INT))), ir.INT
        if op in ("<<", ">>", ">>>"):
            name = {"<<": "int.shl", ">>": "int.shr", ">>>": "int.ushr"}[op]
            return ast.FnApp(name, (self.tr_as(e.a, ir.INT), self.tr_as(e.b, ir.INT))), ir.INT
        if op in ("+", "-", "*", "/", "%"):
            sort = ir.REAL if e.kind in "fd" else ir.INT
            a = self.tr_as(e.a, sort)
            b = self.tr_as(e.b, sort)
            if op == "/":
                return ast.BinOp("/" if sort == ir.REAL else "div", a, b), sort
            if op == "%":
                if sort == ir.REAL:
                    return ast.FnApp("real.rem", (a, b)), sort
                return ast.BinOp("mod", a, b), sort
            return ast.BinOp(op, a, b), sort
        raise TranslationError("E_INTERNAL", "unknown binary operator %s" % op, self.where)

    def _tr_unary(self, e: ir.Unary):
        if e.op == "!":
            return ast.UnOp("!", self.tr_as(e.a, ir.BOOL)), ir.BOOL
        if e.op == "neg":
            sort = ir.REAL if e.kind in "fd" else ir.INT
            return ast.UnOp("-", self.tr_as(e.a, sort)), sort
        # conversions: integral<->integral and real<->real are identities,
        # int<->real go through prelude functions
        src = "int" if e.op[0] in ("i", "l") else "real"
        dst = ir.INT if e.kind in ("i", "j") else ir.REAL
        inner = self.tr_as(e.a, ir.INT if src == "int" else ir.REAL)
        if src == "int" and dst == ir.REAL:
            return ast.FnApp("int.to.real", (inner,)), ir.REAL
        if src == "real" and dst == ir.INT:
            return ast.FnApp("real.to.int", (inner,)), ir.INT
        return inner, dst

    def _tr_call(self, e: ir.Call):
        kind = self.enc.ns.recognize_intrinsics(e)
        if kind is not None:
            return self._tr_intrinsic(e, kind)
        if not self.enc.is_pure_call(e):
            raise TranslationError("E_INTERNAL",
                                   "procedure call survived extraction", self.where)
        if (e.owner, e.name, e.descriptor) in self.enc.old_specs:
            raise TranslationError(
                "E_OLD_OUTSIDE_ENSURES",
                "%s uses old() and can only appear directly in an ensures" % e.name,
                self.where)
        args = [self.heap]
        ptypes = parse_descriptor(e.descriptor)[0]
        if e.receiver is not None:
            args.append(self.tr_as(e.receiver, ir.REF))
        for arg, desc in zip(e.args, ptypes):
            args.append(self.tr_as(arg, ir.descriptor_sort(desc)))
        name = self.enc.mangler.method(e.owner, e.name, e.descriptor)
        ret = parse_descriptor(e.descriptor)[1]
        return ast.FnApp(name, tuple(args)), ir.descriptor_sort(ret)

    def _tr_intrinsic(self, e: ir.Call, kind):
        """Operator-library calls appearing in ordinary (non-aggregated) code
        translate to their logic meaning directly."""
        name = kind.name
        arg_descs = parse_descriptor(e.descriptor)[0]
        if name in ("EQ", "NEQ", "LT", "LTE", "GT", "GTE"):
            op = {"EQ": "==", "NEQ": "!=", "LT": "<", "LTE": "<=",
                  "GT": ">", "GTE": ">="}[name]
            want = ir.descriptor_sort(arg_descs[0])
            return ast.BinOp("<==>" if op == "==" and want == ir.BOOL else op,
                             self.tr_as(e.args[0], want),
                             self.tr_as(e.args[1], want)), ir.BOOL
        if name == "NOT":
            return ast.UnOp("!", self.tr_as(e.args[0], ir.BOOL)), ir.BOOL
        if name == "IMPLIES":
            return ast.BinOp("==>", self.tr_as(e.args[0], ir.BOOL),
                             self.tr_as(e.args[1], ir.BOOL)), ir.BOOL
        if name == "CONDITIONAL":
            want = ir.descriptor_sort(arg_descs[1])
            return ast.Ite(self.tr_as(e.args[0], ir.BOOL),
                           self.tr_as(e.args[1], want),
                           self.tr_as(e.args[2], want)), want
        if name == "OLD":
            if not self.in_ensures:
                if getattr(self, "analysis", False):
                    return self.tr(e.args[0])
                raise TranslationError("E_OLD_OUTSIDE_ENSURES",
                                       "old() outside an ensures clause", self.where)
            inner, sort = self.tr(e.args[0])
            return ast.OldExpr(inner), sort
        if name == "BINDING":
            sort = ir.descriptor_sort(kind.binding_type)
            default = {ir.INT: ast.IntLit(0), ir.REAL: ast.RealLit(0.0),
                       ir.BOOL: ast.BoolLit(False), ir.REF: ast.Id("null.reference")}
            return default[sort], sort
        if name in ("FORALL", "EXISTS") and getattr(self, "analysis", False):
            # spec-function bodies are translated to procedures only for frame
            # scanning; the quantifier itself has no heap effect
            for arg in e.args:
                self.tr(arg)
            return ast.BoolLit(True), ir.BOOL
        raise unsupported("specification operator %s outside an aggregated context" % name,
                          self.where)


class ProcedureContext(ExprContext):
    """Adds statement translation state: extracted-call temporaries."""

    def __init__(self, enc, where: str, rename=None, used=None, analysis=False):
        super().__init__(enc, ast.Id("#heap"), False, rename, used, where)
        self.extra_locals: list[tuple[str, str]] = []  # (name, sort)
        self.rcount = 0
        self.analysis = analysis

    def fresh_result(self, ret_desc: str) -> ir.Local:
        name = "#r%d" % self.rcount
        self.rcount += 1
        var = ir.Local(name, ir.descriptor_kind(ret_desc), ret_desc)
        var.ex = ir.descriptor_sort(ret_desc)
        self.extra_locals.append((name, var.ex))
        return var


# -- whole-program encoder --------------------------------------------------------


def emit_prelude(template: str) -> list:
    """Parse the prelude template into declarations (E_PRELUDE_PARSE on
    syntax errors)."""
    try:
        return parse(template).decls
    except BoogieSyntaxError as exc:
        raise TranslationError("E_PRELUDE_PARSE", "prelude does not parse: %s" % exc) from exc


def default_prelude() -> str:
    return resources.files("jvm2boogie.boogie").joinpath("prelude.bpl").read_text("utf-8")


def declare_class(cf: ClassFile, mangler: Mangler | None = None,
                  first_field_id: int = 0) -> list:
    """Type and field constants for one class, in deterministic order."""
    mangler = mangler or Mangler()
    decls = [ast.ConstDecl(mangler.type_const(cf.this_class), TYPE_TYPE, unique=True)]
    named = sorted((mangler.field_const(cf.this_class, f.name), f) for f in cf.fields)
    for index, (mangled, f) in enumerate(named):
        decls.append(ast.ConstDecl(
            mangled, ast.TName("Field", (translate_type(ir.descriptor_sort(f.descriptor)),)),
            unique=True))
        decls.append(ast.AxiomDecl(ast.BinOp(
            "==", ast.FnApp("fieldId", (ast.Id(mangled),)),
            ast.IntLit(first_field_id + index))))
    return decls


@dataclass
class TranslatedMethod:
    owner: str
    method: MethodInfo
    mangled: str
    contracts: MethodContracts
    body: ir.GrimpBody | None
    loops: list[LoopInfo] = field(default_factory=list)
    invariants: dict[str, list[ir.Expr]] = field(default_factory=dict)


class Encoder:
    def __init__(self, classes: dict[str, ClassFile], ns: SpecNamespace,
                 prelude_text: str | None = None):
        self.classes = classes
        self.ns = ns
        self.prelude_decls = emit_prelude(prelude_text if prelude_text is not None
                                          else default_prelude())
        reserved = set()
        for d in self.prelude_decls:
            for attr in ("name",):
                if hasattr(d, attr):
                    reserved.add(getattr(d, attr))
        self.mangler = Mangler(reserved)
        self.pure_set: set[tuple[str, str, str]] = set()
        self.contracts: dict[tuple[str, str, str], MethodContracts] = {}
        self.analyses: dict[str, ClassAnalysis] = {}
        self.strings: dict[str, str] = {}
        self.referenced_types: set[str] = set()
        self.external_fields: set[tuple[str, str, str]] = set()
        self.external_methods: set[tuple[str, str, str, bool]] = set()
        self.field_descs: dict[tuple[str, str], str] = {}
        self.old_specs: set[tuple[str, str, str]] = set()
        self.ensures_targets: set[tuple[str, str, str]] = set()

    # -- global lookups ---------------------------------------------------------

    def is_pure_call(self, call: ir.Call) -> bool:
        return (call.owner, call.name, call.descriptor) in self.pure_set

    def type_const(self, owner: str) -> str:
        self.referenced_types.add(owner)
        return self.mangler.type_const(owner)

    def field_const(self, owner: str, name: str, descriptor: str) -> str:
        if owner not in self.classes or self.classes[owner].field(name) is None:
            self.external_fields.add((owner, name, descriptor))
        self.field_descs[(owner, name)] = descriptor
        return self.mangler.field_const(owner, name)

    def string_const(self, value: str) -> str:
        if value not in self.strings:
            self.strings[value] = "$string.%d" % len(self.strings)
        return self.strings[value]

    # -- per-class preparation -----------------------------------------------------

    def prepare(self):
        for owner in sorted(self.classes):
            cf = self.classes[owner]
            analysis = ClassAnalysis(cf, self.ns, external_pure=self._external_pure)
            self.analyses[owner] = analysis
            for m in cf.methods:
                names = {a.type_name for a in read_annotations(m)}
                if self.ns.pure in names or self.ns.predicate in names:
                    self.pure_set.add((owner, m.name, m.descriptor))
        for owner in sorted(self.classes):
            cf = self.classes[owner]
            contracts = resolve_contracts(cf, self.ns, external_pure=self._external_pure)
            for (name, desc), mc in contracts.items():
                self.contracts[(owner, name, desc)] = mc
                for clause in mc.ensures:
                    self.ensures_targets.add(
                        (owner, clause.predicate_name, clause.predicate_descriptor))

    def _external_pure(self, owner: str, name: str, descriptor: str) -> bool:
        return (owner, name, descriptor) in self.pure_set

    # -- method translation -----------------------------------------------------------

    def _prepare_method(self, owner: str, m: MethodInfo) -> TranslatedMethod:
        mangled = self.mangler.method(owner, m.name, m.descriptor)
        mc = self.contracts[(owner, m.name, m.descriptor)]
        where = "%s.%s" % (owner, m.name)
        if m.code is None:
            return TranslatedMethod(owner, m, mangled, mc, None)
        analysis = self.analyses[owner]
        body = analysis.typed_body(m)
        if mc.is_spec_function:
            return TranslatedMethod(owner, m, mangled, mc, body)
        loops = detect_loops(build_cfg(body))
        cleaned = clean_spec_statements(body, loops, self.ns, analysis.is_pure_method)
        body = cleaned.body
        loops = detect_loops(build_cfg(body))
        body = inject_invariants(body, loops, cleaned.invariants)
        body = infer_expected_types(body)
        return TranslatedMethod(owner, m, mangled, mc, body, loops, cleaned.invariants)

    def translate_pure(self, tm: TranslatedMethod) -> ast.FuncDecl | None:
        """Boogie function for a @Pure/@Predicate method, or None when the
        body uses old(), which Boogie only accepts inside ensures clauses;
        such predicates exist solely inlined into postconditions."""
        m = tm.method
        where = "%s.%s" % (tm.owner, m.name)
        analysis = self.analyses[tm.owner]
        agg = analysis.aggregate_method(m)
        if any(isinstance(n, ir.Old) for n in ir.walk(agg)):
            if (tm.owner, m.name, m.descriptor) not in self.ensures_targets:
                raise TranslationError(
                    "E_OLD_OUTSIDE_ENSURES",
                    "old() in a pure method that is not a postcondition predicate",
                    where)
            self.old_specs.add((tm.owner, m.name, m.descriptor))
            return None
        body = analysis.typed_body(m)
        params: list[tuple[str, ast.TName]] = [("h", HEAP_TYPE)]
        used = {"h"}
        for p in body.params:
            sort = ir.descriptor_sort(p.rtype) if p.rtype else ir.KIND_SORT[p.kind]
            params.append((p.name, translate_type(sort)))
            used.add(p.name)
        ctx = ExprContext(self, ast.Id("h"), in_ensures=False, used_names=used, where=where)
        ret = parse_descriptor(m.descriptor)[1]
        body_expr = ctx.tr_as(agg, ir.descriptor_sort(ret))
        return ast.FuncDecl(tm.mangled, (), tuple(params),
                            translate_type(ir.descriptor_sort(ret)), body_expr)

    def _signature(self, tm: TranslatedMethod):
        m = tm.method
        params: list[tuple[str, ast.TName]] = []
        names: list[str] = []
        if not m.is_static:
            params.append(("this", REFERENCE))
            names.append("this")
        declared = m.code.param_names if m.code is not None else None
        for i, desc in enumerate(m.param_types):
            name = None
            if declared and i < len(declared) and declared[i]:
                name = declared[i]
            name = name or "p%d" % i
            params.append((name, translate_type(ir.descriptor_sort(desc))))
            names.append(name)
        ret = parse_descriptor(m.descriptor)[1]
        returns = ()
        if ret != "V":
            returns = (("@ret", translate_type(ir.descriptor_sort(ret))),)
        return tuple(params), returns, names

    def translate_procedure(self, tm: TranslatedMethod, frame: FrameResult | None,
                            prebuilt: tuple | None = None) -> ast.ProcDecl:
        params, returns, (requires, ensures) = self._contract_parts(tm)
        modifies = ()
        if frame is not None and frame.value == WHOLE_HEAP:
            modifies = ("#heap",)
        if tm.body is None:
            return ast.ProcDecl(tm.mangled, params, returns, requires, ensures,
                                modifies, (), None)
        if prebuilt is None:
            where = "%s.%s" % (tm.owner, tm.method.name)
            _, _, param_names = self._signature(tm)
            prebuilt = self.translate_body(tm, param_names, where)
        locals_, stmts = prebuilt
        return ast.ProcDecl(tm.mangled, params, returns, requires, ensures,
                            modifies, locals_, stmts)

    def translate_body(self, tm: TranslatedMethod, param_names: list[str], where: str):
        body = tm.body
        rename = {}
        prologue: list = []
        for pname in sorted(body.mutated_params):
            shadow = pname + "#l"
            rename[pname] = shadow
            prologue.append(ast.AssignStmt(shadow, ast.Id(pname)))
        ctx = ProcedureContext(self, where, rename=rename,
                               used=set(param_names) | set(rename.values()),
                               analysis=tm.contracts.is_spec_function)
        label_at: dict[int, list[str]] = {}
        for name, idx in body.labels.items():
            label_at.setdefault(idx, []).append(name)
        stmts: list = list(prologue)
        for i, s in enumerate(body.stmts):
            for label in sorted(label_at.get(i, ())):
                stmts.append(ast.LabelStmt(label))
            stmts.extend(self.translate_stmt(s, ctx, body))
        for label in sorted(label_at.get(len(body.stmts), ())):
            stmts.append(ast.LabelStmt(label))

        var_sorts = getattr(body, "var_sorts", {})
        locals_: list[ast.LocalVarDecl] = []
        seen = set(param_names)
        for name, var in sorted(body.locals_used().items()):
            mapped = rename.get(name, name)
            if name in seen and name not in rename:
                continue
            sort = var_sorts.get(name) or (ir.descriptor_sort(var.rtype) if var.rtype
                                           else ir.KIND_SORT[var.kind])
            locals_.append(ast.LocalVarDecl(mapped, translate_type(sort)))
            seen.add(name)
        for name, sort in ctx.extra_locals:
            locals_.append(ast.LocalVarDecl(name, translate_type(sort)))
        return tuple(locals_), tuple(stmts)

    def translate_stmt(self, s: ir.Stmt, ctx: ProcedureContext,
                       body: ir.GrimpBody) -> list:
        prefix, s = extract_calls(s, ctx)
        out = []
        for p in prefix:
            out.extend(self._translate_simple(p, ctx, body))
        out.extend(self._translate_simple(s, ctx, body))
        return out

    def _translate_simple(self, s: ir.Stmt, ctx: ProcedureContext,
                          body: ir.GrimpBody) -> list:
        if isinstance(s, ir.Assign):
            target = ctx.rename.get(s.target.name, s.target.name)
            value = s.value
            if isinstance(value, ir.NewObject):
                return [ast.CallStmt(target, "new",
                                     (ast.Id(self.type_const(value.owner)),))]
            if isinstance(value, ir.NewArray):
                return [ast.CallStmt(target, "array.new",
                                     (ctx.tr_as(value.length, ir.INT),))]
            if isinstance(value, ir.Call) and not self.is_pure_call(value) \
                    and self.ns.recognize_intrinsics(value) is None:
                return [self._call_stmt(value, ctx, lhs=target)]
            want = s.target.ex or ir.KIND_SORT[s.target.kind]
            return [ast.AssignStmt(target, ctx.tr_as(value, want))]
        if isinstance(s, ir.FieldStore):
            fconst = ast.Id(self.field_const(s.owner, s.name, s.descriptor))
            if s.receiver is None:
                receiver = ast.FnApp("type2ref", (ast.Id(self.type_const(s.owner)),))
            else:
                receiver = ctx.tr_as(s.receiver, ir.REF)
            value = ctx.tr_as(s.value, ir.descriptor_sort(s.descriptor))
            return [ast.AssignStmt("#heap", ast.FnApp(
                "update", (ast.Id("#heap"), receiver, fconst, value)))]
        if isinstance(s, ir.ArrayStore):
            arr = ctx.tr_as(s.array, ir.REF)
            idx = ctx.tr_as(s.index, ir.INT)
            value = ctx.tr_as(s.value, ir.descriptor_sort(s.elem))
            return [ast.AssignStmt("#heap", ast.FnApp(
                "array.update", (ast.Id("#heap"), arr, idx, value)))]
        if isinstance(s, ir.If):
            cond = ctx.tr_as(s.cond, ir.BOOL)
            return [ast.IfStmt(cond, (ast.GotoStmt((s.target,)),))]
        if isinstance(s, ir.Goto):
            return [ast.GotoStmt((s.target,))]
        if isinstance(s, ir.Return):
            if s.value is None:
                return [ast.ReturnStmt()]
            ret = parse_descriptor(body.method.descriptor)[1]
            value = ctx.tr_as(s.value, ir.descriptor_sort(ret))
            return [ast.AssignStmt("@ret", value), ast.ReturnStmt()]
        if isinstance(s, ir.InvokeStmt):
            return [self._call_stmt(s.call, ctx, lhs=None)]
        if isinstance(s, ir.SpecAssert):
            return [ast.AssertStmt(ctx.tr_as(s.expr, ir.BOOL))]
        if isinstance(s, ir.SpecAssume):
            return [ast.AssumeStmt(ctx.tr_as(s.expr, ir.BOOL))]
        raise TranslationError("E_INTERNAL", "untranslatable statement %r" % s, ctx.where)

    def _call_stmt(self, call: ir.Call, ctx: ProcedureContext, lhs: str | None):
        if self.ns.recognize_intrinsics(call) is not None:
            # a stray specification call in statement position has no effect
            return ast.AssumeStmt(ast.BoolLit(True))
        if self.is_pure_call(call):
            # a pure call in statement position has no effect; still translate
            # it as a function application assigned to a dummy
            expr, sort = ctx._tr_call(call)
            if lhs is None:
                return ast.AssumeStmt(ast.BoolLit(True))
            return ast.AssignStmt(lhs, expr)
        owner_class = self.classes.get(call.owner)
        known = owner_class is not None and any(
            m.name == call.name and m.descriptor == call.descriptor
            for m in owner_class.methods)
        if not known:
            self.external_methods.add((call.owner, call.name, call.descriptor,
                                       call.receiver is None))
        args = []
        ptypes, ret = parse_descriptor(call.descriptor)
        if call.receiver is not None:
            args.append(ctx.tr_as(call.receiver, ir.REF))
        for arg, desc in zip(call.args, ptypes):
            args.append(ctx.tr_as(arg, ir.descriptor_sort(desc)))
        name = self.mangler.method(call.owner, call.name, call.descriptor)
        if ret != "V" and lhs is None:
            temp = ctx.fresh_result(ret)
            lhs = temp.name
        return ast.CallStmt(lhs if ret != "V" else None, name, tuple(args))

    # -- declarations ---------------------------------------------------------------

    def declare_classes(self) -> list:
        decls = []
        for owner in sorted(set(self.classes) | self.referenced_types):
            decls.append(ast.ConstDecl(self.mangler.type_const(owner), TYPE_TYPE,
                                       unique=True))
        fields = []
        for owner in sorted(self.classes):
            for f in self.classes[owner].fields:
                fields.append((owner, f.name, f.descriptor))
        fields.extend(sorted(self.external_fields))
        field_decls = []
        for owner, name, desc in fields:
            mangled = self.mangler.field_const(owner, name)
            sort_type = translate_type(ir.descriptor_sort(desc))
            field_decls.append((mangled, ast.ConstDecl(
                mangled, ast.TName("Field", (sort_type,)), unique=True)))
        field_decls.sort(key=lambda pair: pair[0])
        for index, (mangled, decl) in enumerate(field_decls):
            decls.append(decl)
            decls.append(ast.AxiomDecl(ast.BinOp(
                "==", ast.FnApp("fieldId", (ast.Id(mangled),)), ast.IntLit(index))))
        for value in sorted(self.strings):
            decls.append(ast.ConstDecl(self.strings[value], REFERENCE, unique=True))
        return decls

    def stub_procedures(self) -> list:
        decls = []
        for owner, name, desc, is_static in sorted(self.external_methods):
            mangled = self.mangler.method(owner, name, desc)
            params = []
            if not is_static:
                params.append(("this", REFERENCE))
            ptypes, ret = parse_descriptor(desc)
            for i, p in enumerate(ptypes):
                params.append(("p%d" % i, translate_type(ir.descriptor_sort(p))))
            returns = ()
            if ret != "V":
                returns = (("@ret", translate_type(ir.descriptor_sort(ret))),)
            decls.append(ast.ProcDecl(mangled, tuple(params), returns,
                                      (), (), ("#heap",), (), None))
        return decls

    # -- whole program ------------------------------------------------------------------

    def translate_program(self):
        """Returns (final Program, frames dict keyed by mangled name)."""
        self.prepare()
        prepared: list[TranslatedMethod] = []
        for owner in sorted(self.classes):
            for m in self.classes[owner].methods:
                prepared.append(self._prepare_method(owner, m))

        # translate every body exactly once; spec-function translations feed
        # frame inference only, their emitted form is a Boogie function
        bodies: dict[str, tuple] = {}
        for tm in prepared:
            if tm.body is None:
                continue
            params, returns, param_names = self._signature(tm)
            where = "%s.%s" % (tm.owner, tm.method.name)
            bodies[tm.mangled] = (params, returns,
                                  self.translate_body(tm, param_names, where))

        analysis_program = ast.Program(list(self.prelude_decls))
        for tm in prepared:
            params, returns, _ = self._signature(tm)
            if tm.body is None:
                analysis_program.decls.append(
                    ast.ProcDecl(tm.mangled, params, returns, (), (), (), (), None))
            else:
                _, _, (locals_, stmts) = bodies[tm.mangled]
                analysis_program.decls.append(
                    ast.ProcDecl(tm.mangled, params, returns, (), (), (), locals_, stmts))
        analysis_program.decls.extend(self.stub_procedures())

        frames = infer_frames(analysis_program)
        spec_procs = [(tm.mangled, "%s.%s" % (tm.owner, tm.method.name))
                      for tm in prepared if tm.contracts.is_spec_function
                      and tm.body is not None]
        purity_errors = enforce_purity(spec_procs, frames)
        if purity_errors:
            raise purity_errors[0]

        functions = []
        for tm in prepared:
            if tm.contracts.is_spec_function and tm.body is not None:
                func = self.translate_pure(tm)
                if func is not None:
                    functions.append(func)
        procedures = []
        for tm in prepared:
            if tm.contracts.is_spec_function:
                continue
            prebuilt = bodies[tm.mangled][2] if tm.body is not None else None
            procedures.append(self.translate_procedure(tm, frames.get(tm.mangled),
                                                       prebuilt))
        procedures.extend(self.stub_procedures())

        program = ast.Program(list(self.prelude_decls))
        program.decls.extend(self.declare_classes())
        program.decls.extend(sorted(functions, key=lambda d: d.name))
        program.decls.extend(sorted(procedures, key=lambda d: d.name))
        return program, frames

    def _contract_parts(self, tm: TranslatedMethod):
        m = tm.method
        where = "%s.%s" % (tm.owner, m.name)
        params, returns, param_names = self._signature(tm)
        requires = []
        ensures = []
        for clause in tm.contracts.requires:
            ctx = ExprContext(self, ast.Id("#heap"), in_ensures=False,
                              rename={RESULT_PARAM: "@ret"},
                              used_names=set(param_names), where=where)
            requires.append(ctx.tr_as(clause.expr, ir.BOOL))
        for clause in tm.contracts.ensures:
            ctx = ExprContext(self, ast.Id("#heap"), in_ensures=True,
                              rename={RESULT_PARAM: "@ret"},
                              used_names=set(param_names), where=where)
            ensures.append(ctx.tr_as(clause.expr, ir.BOOL))
        return params, returns, (tuple(requires), tuple(ensures))


def translate_classes(classes: dict[str, ClassFile],
                      namespace: str | SpecNamespace = "byteback.annotations",
                      prelude_text: str | None = None):
    ns = namespace if isinstance(namespace, SpecNamespace) else SpecNamespace(namespace)
    encoder = Encoder(classes, ns, prelude_text)
    return encoder.translate_program()
