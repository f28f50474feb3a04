"""Recognition of the contract convention in lifted code.

@Require/@Ensure annotation strings resolve to @Predicate methods in the
same class; predicate and @Pure bodies must be aggregable (pure,
straight-line, built from the operator library or other pure methods) and
collapse into single logic expressions by inlining each SSA temporary's
definition at its uses.  Loop invariants and inline assertion/assumption
calls are pulled out of method bodies together with their private
defining chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classfile import AnnotationValue, ClassFile, MethodInfo, parse_descriptor, read_annotations
from .errors import SpecificationError
from .lift import build_cfg, detect_loops, infer_expected_types, simulate_stack
from .lift import ir
from .lift.cfg import LoopInfo

DEFAULT_NAMESPACE = "byteback.annotations"

_OBJ = "Ljava/lang/Object;"
_VALUE_DESCS = ("I", "J", "F", "D", "Z", _OBJ)

AGGREGATE_NODE_BUDGET = 100_000


@dataclass(frozen=True)
class IntrinsicKind:
    name: str  # EQ NEQ LT LTE GT GTE NOT IMPLIES CONDITIONAL FORALL EXISTS
    #             OLD INVARIANT ASSERTION ASSUMPTION BINDING
    binding_type: str | None = None


def _operator_table(namespace: str) -> dict[tuple[str, str, str], IntrinsicKind]:
    ops = namespace + ".Operators"
    table: dict[tuple[str, str, str], IntrinsicKind] = {}
    for name, kind in (("eq", "EQ"), ("neq", "NEQ"), ("lt", "LT"), ("lte", "LTE"),
                       ("gt", "GT"), ("gte", "GTE")):
        for t in ("I", "J", "F", "D"):
            table[(ops, name, "(%s%s)Z" % (t, t))] = IntrinsicKind(kind)
        if name in ("eq", "neq"):
            table[(ops, name, "(ZZ)Z")] = IntrinsicKind(kind)
            table[(ops, name, "(%s%s)Z" % (_OBJ, _OBJ))] = IntrinsicKind(kind)
    table[(ops, "not", "(Z)Z")] = IntrinsicKind("NOT")
    table[(ops, "implies", "(ZZ)Z")] = IntrinsicKind("IMPLIES")
    for t in _VALUE_DESCS:
        table[(ops, "conditional", "(Z%s%s)%s" % (t, t, t))] = IntrinsicKind("CONDITIONAL")
        table[(ops, "forall", "(%sZ)Z" % t)] = IntrinsicKind("FORALL")
        table[(ops, "exists", "(%sZ)Z" % t)] = IntrinsicKind("EXISTS")
        table[(ops, "old", "(%s)%s" % (t, t))] = IntrinsicKind("OLD")
    for name, kind in (("invariant", "INVARIANT"), ("assertion", "ASSERTION"),
                       ("assumption", "ASSUMPTION")):
        table[(ops, name, "(Z)V")] = IntrinsicKind(kind)
    binding = namespace + ".Binding"
    for fname, t in (("integer", "I"), ("longInteger", "J"), ("shortInteger", "S"),
                     ("byteValue", "B"), ("character", "C"), ("booleanValue", "Z"),
                     ("floatValue", "F"), ("doubleValue", "D"), ("reference", _OBJ)):
        table[(binding, fname, "()%s" % t)] = IntrinsicKind("BINDING", t)
    return table


class SpecNamespace:
    """Fully-qualified names of the annotation/operator convention."""

    def __init__(self, prefix: str = DEFAULT_NAMESPACE):
        self.prefix = prefix
        self.require = prefix + ".Require"
        self.ensure = prefix + ".Ensure"
        self.predicate = prefix + ".Predicate"
        self.pure = prefix + ".Pure"
        self.operators = _operator_table(prefix)

    def recognize_intrinsics(self, call: ir.Call) -> IntrinsicKind | None:
        return self.operators.get((call.owner, call.name, call.descriptor))

    def is_intrinsic_owner(self, owner: str) -> bool:
        return owner in (self.prefix + ".Operators", self.prefix + ".Binding")


def recognize_intrinsics(call: ir.Call,
                         namespace: str | SpecNamespace = DEFAULT_NAMESPACE) -> IntrinsicKind | None:
    ns = namespace if isinstance(namespace, SpecNamespace) else SpecNamespace(namespace)
    return ns.recognize_intrinsics(call)


# -- aggregability -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    stmt_index: int
    code: str  # IMPURE_WRITE | BRANCHING | IMPURE_CALL | ALLOCATION | BAD_SHAPE


def check_aggregable(body: ir.GrimpBody, ns: SpecNamespace,
                     is_pure_method) -> list[Violation]:
    """Empty list means aggregable: straight-line pure assignments ending in
    a single return."""
    violations: list[Violation] = []

    def expr_ok(i: int, e: ir.Expr):
        for node in ir.walk(e):
            if isinstance(node, (ir.NewObject, ir.NewArray)):
                violations.append(Violation(i, "ALLOCATION"))
            elif isinstance(node, ir.Call):
                if ns.recognize_intrinsics(node) is not None:
                    continue
                if not is_pure_method(node.owner, node.name, node.descriptor):
                    violations.append(Violation(i, "IMPURE_CALL"))

    if not body.stmts:
        return [Violation(0, "BAD_SHAPE")]
    for i, s in enumerate(body.stmts):
        last = i == len(body.stmts) - 1
        if isinstance(s, (ir.If, ir.Goto)):
            violations.append(Violation(i, "BRANCHING"))
        elif isinstance(s, (ir.FieldStore, ir.ArrayStore)):
            violations.append(Violation(i, "IMPURE_WRITE"))
        elif isinstance(s, ir.InvokeStmt):
            kind = ns.recognize_intrinsics(s.call)
            if kind is None or kind.name in ("INVARIANT", "ASSERTION", "ASSUMPTION"):
                violations.append(Violation(i, "IMPURE_CALL"))
            for a in s.call.args:
                expr_ok(i, a)
        elif isinstance(s, ir.Assign):
            if last:
                violations.append(Violation(i, "BAD_SHAPE"))
            expr_ok(i, s.value)
        elif isinstance(s, ir.Return):
            if not last:
                violations.append(Violation(i, "BRANCHING"))
            if s.value is not None:
                expr_ok(i, s.value)
        else:
            violations.append(Violation(i, "BAD_SHAPE"))
    if not isinstance(body.stmts[-1], ir.Return):
        violations.append(Violation(len(body.stmts) - 1, "BAD_SHAPE"))
    return violations


# -- aggregation ---------------------------------------------------------------


class _Aggregator:
    def __init__(self, ns: SpecNamespace, where: str,
                 budget: int = AGGREGATE_NODE_BUDGET):
        self.ns = ns
        self.where = where
        self.budget = budget
        self.count = 0

    def _tick(self):
        self.count += 1
        if self.count > self.budget:
            raise SpecificationError("E_AGGREGATE_TOO_LARGE",
                                     "aggregate exceeds %d nodes" % self.budget, self.where)

    def substitute(self, e: ir.Expr, defs: dict[str, ir.Expr],
                   bindings: dict[str, ir.BoundVar], scope: frozenset[str]) -> ir.Expr:
        self._tick()
        if isinstance(e, ir.Local):
            if e.name in bindings:
                if e.name not in scope:
                    raise SpecificationError(
                        "E_BINDING_ESCAPE",
                        "bound variable %s used outside its quantifier" % e.name, self.where)
                bv = bindings[e.name]
                out = ir.BoundVar(bv.name, bv.rtype)
                out.ex = e.ex or ir.descriptor_sort(bv.rtype)
                return out
            if e.name in defs:
                return self.substitute(defs[e.name], defs, bindings, scope)
            out = ir.Local(e.name, e.kind, e.rtype)
            out.ex = e.ex
            return out
        if isinstance(e, ir.Call):
            kind = self.ns.recognize_intrinsics(e)
            if kind is not None:
                return self._rewrite_intrinsic(e, kind, defs, bindings, scope)
            recv = None
            if e.receiver is not None:
                recv = self.substitute(e.receiver, defs, bindings, scope)
            args = [self.substitute(a, defs, bindings, scope) for a in e.args]
            out = ir.Call(e.invoke_kind, e.owner, e.name, e.descriptor, recv, args)
            out.ex = e.ex
            return out
        out = _shallow_copy(e)
        kids = ir.children(e)
        new_kids = [self.substitute(k, defs, bindings, scope) for k in kids]
        _replace_children(out, new_kids)
        return out

    def _rewrite_intrinsic(self, call: ir.Call, kind: IntrinsicKind, defs, bindings,
                           scope) -> ir.Expr:
        sub = lambda x, sc=scope: self.substitute(x, defs, bindings, sc)
        arg_kind = ir.descriptor_kind(parse_descriptor(call.descriptor)[0][-1])
        name = kind.name
        if name in ("EQ", "NEQ", "LT", "LTE", "GT", "GTE"):
            op = {"EQ": "==", "NEQ": "!=", "LT": "<", "LTE": "<=",
                  "GT": ">", "GTE": ">="}[name]
            out = ir.Binary(op, sub(call.args[0]), sub(call.args[1]), arg_kind)
            out.ex = ir.BOOL
            return out
        if name == "NOT":
            out = ir.Unary("!", sub(call.args[0]), "i")
            out.ex = ir.BOOL
            return out
        if name == "IMPLIES":
            out = ir.Binary("==>", sub(call.args[0]), sub(call.args[1]), "i")
            out.ex = ir.BOOL
            return out
        if name == "CONDITIONAL":
            out = ir.Conditional(sub(call.args[0]), sub(call.args[1]), sub(call.args[2]))
            out.ex = out.then.ex
            return out
        if name == "OLD":
            out = ir.Old(sub(call.args[0]))
            out.ex = out.a.ex
            return out
        if name in ("FORALL", "EXISTS"):
            var_arg = call.args[0]
            if not (isinstance(var_arg, ir.Local) and var_arg.name in bindings):
                raise SpecificationError(
                    "E_BINDING_ESCAPE",
                    "quantifier variable is not a Binding-allocated local", self.where)
            bv = bindings[var_arg.name]
            body = self.substitute(call.args[1], defs, bindings, scope | {var_arg.name})
            out = ir.Quantifier(name.lower(), ir.BoundVar(bv.name, bv.rtype), body)
            out.var.ex = ir.descriptor_sort(bv.rtype)
            out.ex = ir.BOOL
            return out
        raise SpecificationError("E_NOT_AGGREGABLE",
                                 "specification statement %s used in expression" % name,
                                 self.where)


def _shallow_copy(e: ir.Expr) -> ir.Expr:
    import copy as _copy

    return _copy.copy(e)


def _replace_children(e: ir.Expr, kids: list[ir.Expr]):
    ir.set_children(e, kids)


def _ssa_rename(body: ir.GrimpBody) -> list[ir.Stmt]:
    """Rename reused temporaries so every assignment target is unique."""
    current: dict[str, str] = {}
    versions: dict[str, int] = {}
    out: list[ir.Stmt] = []

    def rewrite(e: ir.Expr) -> ir.Expr:
        if isinstance(e, ir.Local):
            new = _shallow_copy(e)
            new.name = current.get(e.name, e.name)
            return new
        new = _shallow_copy(e)
        _replace_children(new, [rewrite(k) for k in ir.children(e)])
        return new

    for s in body.stmts:
        if isinstance(s, ir.Assign):
            value = rewrite(s.value)
            name = s.target.name
            if name in versions:
                versions[name] += 1
                fresh = "%s#%d" % (name, versions[name])
            else:
                versions[name] = 0
                fresh = name
            current[name] = fresh
            target = _shallow_copy(s.target)
            target.name = fresh
            out.append(ir.Assign(target, value))
        elif isinstance(s, ir.Return):
            out.append(ir.Return(rewrite(s.value) if s.value is not None else None))
        elif isinstance(s, ir.InvokeStmt):
            out.append(ir.InvokeStmt(rewrite(s.call)))
        else:
            out.append(s)
    return out


def aggregate(body: ir.GrimpBody, ns: SpecNamespace,
              ssa_prepass: bool = True,
              budget: int = AGGREGATE_NODE_BUDGET) -> ir.Expr:
    """Collapse an aggregable body into one pure expression by inlining each
    temporary's unique definition at every use."""
    where = "%s.%s" % (body.method.owner, body.method.name)
    if ssa_prepass:
        stmts = _ssa_rename(body)
    else:
        stmts = body.stmts
        seen: set[str] = set()
        for s in stmts:
            if isinstance(s, ir.Assign):
                if s.target.name in seen:
                    raise SpecificationError(
                        "E_NON_SSA", "temporary %s assigned twice" % s.target.name, where)
                seen.add(s.target.name)
    if not stmts or not isinstance(stmts[-1], ir.Return) or stmts[-1].value is None:
        raise SpecificationError("E_NOT_AGGREGABLE", "body does not end in a value return",
                                 where)
    defs: dict[str, ir.Expr] = {}
    bindings: dict[str, ir.BoundVar] = {}
    for s in stmts[:-1]:
        if not isinstance(s, ir.Assign):
            raise SpecificationError("E_NOT_AGGREGABLE", "non-assignment in aggregable body",
                                     where)
        if isinstance(s.value, ir.Call):
            kind = ns.recognize_intrinsics(s.value)
            if kind is not None and kind.name == "BINDING":
                bindings[s.target.name] = ir.BoundVar(s.target.name, kind.binding_type)
                continue
        defs[s.target.name] = s.value
    agg = _Aggregator(ns, where, budget)
    return agg.substitute(stmts[-1].value, defs, bindings, frozenset())


# -- contract resolution ---------------------------------------------------------


@dataclass
class ContractClause:
    predicate_name: str
    predicate_descriptor: str
    expr: ir.Expr  # aggregate over the specified method's parameter names
    has_result: bool


@dataclass
class MethodContracts:
    method: MethodInfo
    owner: str
    requires: list[ContractClause] = field(default_factory=list)
    ensures: list[ContractClause] = field(default_factory=list)
    is_pure: bool = False
    is_predicate: bool = False

    @property
    def is_spec_function(self) -> bool:
        return self.is_pure or self.is_predicate


RESULT_PARAM = "#result"


class ClassAnalysis:
    """Per-class cache of lifted/typed bodies and contract links."""

    def __init__(self, cf: ClassFile, ns: SpecNamespace, external_pure=None):
        self.cf = cf
        self.ns = ns
        self.external_pure = external_pure
        self._bodies: dict[tuple[str, str], ir.GrimpBody] = {}
        self._pure: dict[tuple[str, str], bool] = {}
        for m in cf.methods:
            self._pure[(m.name, m.descriptor)] = self._marked_pure(m)

    def _marked_pure(self, m: MethodInfo) -> bool:
        names = {a.type_name for a in read_annotations(m)}
        return self.ns.pure in names or self.ns.predicate in names

    def is_pure_method(self, owner: str, name: str, descriptor: str) -> bool:
        if owner == self.cf.this_class:
            return self._pure.get((name, descriptor), False)
        if self.external_pure is not None:
            return self.external_pure(owner, name, descriptor)
        return False

    def typed_body(self, m: MethodInfo) -> ir.GrimpBody:
        key = (m.name, m.descriptor)
        if key not in self._bodies:
            body = simulate_stack(m.code, m, self.cf.this_class)
            self._bodies[key] = infer_expected_types(body)
        return self._bodies[key]

    def aggregate_method(self, m: MethodInfo) -> ir.Expr:
        body = self.typed_body(m)
        violations = check_aggregable(body, self.ns, self.is_pure_method)
        if violations:
            v = violations[0]
            raise SpecificationError(
                v.code, "method is not aggregable (statement %d)" % v.stmt_index,
                "%s.%s" % (self.cf.this_class, m.name))
        return aggregate(body, self.ns)


def resolve_contracts(cf: ClassFile, namespace: str | SpecNamespace = DEFAULT_NAMESPACE,
                      external_pure=None) -> dict[tuple[str, str], MethodContracts]:
    """Resolve @Require/@Ensure names to aggregated predicate expressions for
    every method of a class."""
    ns = namespace if isinstance(namespace, SpecNamespace) else SpecNamespace(namespace)
    analysis = ClassAnalysis(cf, ns, external_pure)
    out: dict[tuple[str, str], MethodContracts] = {}
    for m in cf.methods:
        annotations = read_annotations(m)
        names = {a.type_name for a in annotations}
        mc = MethodContracts(method=m, owner=cf.this_class,
                             is_pure=ns.pure in names,
                             is_predicate=ns.predicate in names)
        for ann in annotations:
            if ann.type_name == ns.require:
                mc.requires.append(_resolve_clause(cf, analysis, ns, m, ann, False))
            elif ann.type_name == ns.ensure:
                mc.ensures.append(_resolve_clause(cf, analysis, ns, m, ann, True))
        for clause in mc.requires:
            for node in ir.walk(clause.expr):
                if isinstance(node, ir.Old):
                    raise SpecificationError(
                        "E_OLD_OUTSIDE_ENSURES",
                        "old() in a precondition of %s" % m.name, cf.this_class)
        out[(m.name, m.descriptor)] = mc
    return out


def _resolve_clause(cf: ClassFile, analysis: ClassAnalysis, ns: SpecNamespace,
                    m: MethodInfo, ann: AnnotationValue, is_ensure: bool) -> ContractClause:
    where = "%s.%s" % (cf.this_class, m.name)
    pname = ann.element("value")
    if not isinstance(pname, str):
        raise SpecificationError("E_NO_SUCH_PREDICATE",
                                 "annotation value must name a predicate", where)
    mparams, mret = parse_descriptor(m.descriptor)
    expected = list(mparams)
    has_result = False
    if is_ensure and mret != "V":
        expected.append(mret)
        has_result = True
    candidates = [p for p in cf.methods if p.name == pname]
    if not candidates:
        raise SpecificationError("E_NO_SUCH_PREDICATE",
                                 "no method named %r in %s" % (pname, cf.this_class), where)
    match = None
    for p in candidates:
        if parse_descriptor(p.descriptor)[0] == expected:
            match = p
            break
    if match is None:
        raise SpecificationError(
            "E_SIGNATURE_MISMATCH",
            "predicate %r does not take parameter types %s" % (pname, expected), where)
    p_annotations = {a.type_name for a in read_annotations(match)}
    if ns.predicate not in p_annotations:
        raise SpecificationError("E_NOT_A_PREDICATE",
                                 "%r lacks the predicate marker" % pname, where)
    if parse_descriptor(match.descriptor)[1] != "Z":
        raise SpecificationError("E_PREDICATE_NOT_BOOLEAN",
                                 "predicate %r does not return boolean" % pname, where)
    if match.is_static != m.is_static:
        raise SpecificationError(
            "E_SIGNATURE_MISMATCH",
            "predicate %r staticness differs from %s" % (pname, m.name), where)
    expr = analysis.aggregate_method(match)
    pbody = analysis.typed_body(match)
    renames: dict[str, str] = {}
    mbody_params = _param_names(m, cf.this_class)
    pred_params = [p.name for p in pbody.params]
    for i, pred_name in enumerate(pred_params):
        if has_result and i == len(pred_params) - 1:
            renames[pred_name] = RESULT_PARAM
        else:
            renames[pred_name] = mbody_params[i]
    expr = _rename_locals(expr, renames)
    return ContractClause(predicate_name=pname, predicate_descriptor=match.descriptor,
                          expr=expr, has_result=has_result)


def _param_names(m: MethodInfo, owner: str) -> list[str]:
    names: list[str] = []
    if not m.is_static:
        names.append("this")
    declared = m.code.param_names if m.code is not None else None
    for i in range(len(m.param_types)):
        name = None
        if declared and i < len(declared) and declared[i]:
            name = declared[i]
        names.append(name or "p%d" % i)
    return names


def _rename_locals(e: ir.Expr, renames: dict[str, str]) -> ir.Expr:
    new = _shallow_copy(e)
    if isinstance(new, ir.Local) and new.name in renames:
        new.name = renames[new.name]
        return new
    _replace_children(new, [_rename_locals(k, renames) for k in ir.children(e)])
    return new


# -- loop invariants and inline checks -------------------------------------------


@dataclass
class CleanedBody:
    body: ir.GrimpBody
    invariants: dict[str, list[ir.Expr]]  # loop head label -> conjuncts in order
    checks: list[tuple[int, str, ir.Expr]]  # (stmt index, ASSERT|ASSUME, expr)


def clean_spec_statements(body: ir.GrimpBody, loops: list[LoopInfo],
                          ns: SpecNamespace, is_pure_method) -> CleanedBody:
    """Extract invariant/assertion/assumption calls (plus their private
    defining chains) from a lifted body."""
    where = "%s.%s" % (body.method.owner, body.method.name)
    read_counts: dict[str, int] = {}
    assign_counts: dict[str, int] = {}
    for s in body.stmts:
        for e in ir.stmt_exprs(s):
            for node in ir.walk(e):
                if isinstance(node, ir.Local):
                    read_counts[node.name] = read_counts.get(node.name, 0) + 1
        if isinstance(s, ir.Assign):
            assign_counts[s.target.name] = assign_counts.get(s.target.name, 0) + 1

    removed: set[int] = set()
    replacement: dict[int, ir.Stmt] = {}
    invariants: dict[str, list[ir.Expr]] = {}
    check_markers: list[int] = []

    for i, s in enumerate(body.stmts):
        if not isinstance(s, ir.InvokeStmt):
            continue
        kind = ns.recognize_intrinsics(s.call)
        if kind is None or kind.name not in ("INVARIANT", "ASSERTION", "ASSUMPTION"):
            continue
        arg = s.call.args[0]
        chain, defs, bindings = _private_chain(body, i, arg, read_counts, assign_counts,
                                               ns, is_pure_method, where, kind.name)
        agg = _Aggregator(ns, where)
        expr = agg.substitute(arg, defs, bindings, frozenset())
        removed.add(i)
        removed.update(chain)
        if kind.name == "INVARIANT":
            loop = next((lp for lp in loops if i in lp.stmt_indices), None)
            if loop is None:
                raise SpecificationError("E_INVARIANT_OUTSIDE_LOOP",
                                         "invariant at statement %d is not in a loop" % i,
                                         where)
            invariants.setdefault(loop.head_label, []).append(expr)
        else:
            removed.discard(i)
            marker = ir.SpecAssert(expr) if kind.name == "ASSERTION" else ir.SpecAssume(expr)
            replacement[i] = marker
            check_markers.append(i)

    new_stmts: list[ir.Stmt] = []
    index_map: dict[int, int] = {}
    for i, s in enumerate(body.stmts):
        index_map[i] = len(new_stmts)
        if i in removed:
            continue
        new_stmts.append(replacement.get(i, s))
    index_map[len(body.stmts)] = len(new_stmts)
    new_labels = {name: index_map[idx] for name, idx in body.labels.items()}
    new_body = ir.GrimpBody(method=body.method, params=body.params, stmts=new_stmts,
                            labels=new_labels, mutated_params=set(body.mutated_params))
    checks = []
    for i in check_markers:
        marker = replacement[i]
        kind = "ASSERT" if isinstance(marker, ir.SpecAssert) else "ASSUME"
        checks.append((index_map[i], kind, marker.expr))
    return CleanedBody(body=new_body, invariants=invariants, checks=checks)


def _private_chain(body, call_index, arg, read_counts, assign_counts, ns,
                   is_pure_method, where, what):
    """Backward slice of single-assignment temporaries used only by this
    specification call."""
    err_code = ("E_INVARIANT_NOT_AGGREGABLE" if what == "INVARIANT"
                else "E_CHECK_NOT_AGGREGABLE")

    def check_pure(e: ir.Expr):
        for node in ir.walk(e):
            if isinstance(node, (ir.NewObject, ir.NewArray)):
                raise SpecificationError(err_code, "allocation in %s argument" % what, where)
            if isinstance(node, ir.Call):
                kind = ns.recognize_intrinsics(node)
                if kind is not None:
                    if kind.name in ("INVARIANT", "ASSERTION", "ASSUMPTION"):
                        raise SpecificationError(err_code, "nested specification call", where)
                    continue
                if not is_pure_method(node.owner, node.name, node.descriptor):
                    raise SpecificationError(err_code, "impure call in %s argument" % what,
                                             where)

    check_pure(arg)
    chain: set[int] = set()
    defs: dict[str, ir.Expr] = {}
    bindings: dict[str, ir.BoundVar] = {}
    slice_reads: dict[str, int] = {}

    def count_reads(e: ir.Expr):
        for node in ir.walk(e):
            if isinstance(node, ir.Local):
                slice_reads[node.name] = slice_reads.get(node.name, 0) + 1

    count_reads(arg)
    needed = set(slice_reads)
    index = call_index - 1
    while index >= 0 and needed:
        s = body.stmts[index]
        if isinstance(s, ir.Assign) and s.target.name in needed:
            name = s.target.name
            needed.discard(name)
            removable = (assign_counts.get(name, 0) == 1
                         and read_counts.get(name, 0) == slice_reads.get(name, 0))
            if removable:
                check_pure(s.value)
                chain.add(index)
                if isinstance(s.value, ir.Call):
                    kind = ns.recognize_intrinsics(s.value)
                    if kind is not None and kind.name == "BINDING":
                        bindings[name] = ir.BoundVar(name, kind.binding_type)
                        index -= 1
                        continue
                defs[name] = s.value
                count_reads(s.value)
                for node in ir.walk(s.value):
                    if isinstance(node, ir.Local) and node.name not in defs \
                            and node.name not in bindings:
                        needed.add(node.name)
        index -= 1
    return chain, defs, bindings


def extract_loop_invariants(body: ir.GrimpBody, loops: list[LoopInfo],
                            ns: SpecNamespace, is_pure_method) -> tuple[dict, ir.GrimpBody]:
    cleaned = clean_spec_statements(body, loops, ns, is_pure_method)
    return cleaned.invariants, cleaned.body


def extract_inline_checks(body: ir.GrimpBody, ns: SpecNamespace,
                          is_pure_method) -> tuple[list, ir.GrimpBody]:
    loops = detect_loops(build_cfg(body))
    cleaned = clean_spec_statements(body, loops, ns, is_pure_method)
    return cleaned.checks, cleaned.body
