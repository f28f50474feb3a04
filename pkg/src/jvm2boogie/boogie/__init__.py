from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .ast import Program, print_decl, print_expr, print_program
from .parser import parse, parse_expr


@dataclass(frozen=True)
class Provenance:
    kind: str  # "assign" | "call"
    index: int
    detail: str  # assigned variable or callee name


def _walk_stmts(stmts):
    for s in stmts:
        yield s
        if isinstance(s, ast.IfStmt):
            yield from _walk_stmts(s.then)
            if s.other is not None:
                yield from _walk_stmts(s.other)


def scan_heap_writes(program: Program, proc_name: str,
                     heap_var: str = "#heap") -> Provenance | None:
    """First statement of a procedure body that assigns the heap variable or
    calls another procedure (classification of the callee is the caller's
    job), or None."""
    proc = program.find_proc(proc_name)
    if proc is None or proc.body is None:
        return None
    for i, s in enumerate(_walk_stmts(proc.body)):
        if isinstance(s, ast.AssignStmt) and s.target == heap_var:
            return Provenance("assign", i, s.target)
        if isinstance(s, ast.CallStmt):
            return Provenance("call", i, s.callee)
    return None


def heap_effects(proc: ast.ProcDecl, heap_var: str = "#heap"):
    """(first heap-assign index or None, [(index, callee), ...])."""
    first_assign = None
    calls = []
    if proc.body is None:
        return None, []
    for i, s in enumerate(_walk_stmts(proc.body)):
        if isinstance(s, ast.AssignStmt) and s.target == heap_var and first_assign is None:
            first_assign = i
        elif isinstance(s, ast.CallStmt):
            calls.append((i, s.callee))
    return first_assign, calls


def undefined_symbols(program: Program) -> list[str]:
    """Identifiers referenced anywhere but declared nowhere (symbol-closure
    check, run on reparsed output)."""
    types: set[str] = {"int", "real", "bool"}
    values: set[str] = {}.keys() | set()
    functions: set[str] = set()
    procedures: set[str] = set()
    for d in program.decls:
        if isinstance(d, ast.TypeDecl):
            types.add(d.name)
        elif isinstance(d, ast.ConstDecl):
            values.add(d.name)
        elif isinstance(d, ast.GlobalVarDecl):
            values.add(d.name)
        elif isinstance(d, ast.FuncDecl):
            functions.add(d.name)
        elif isinstance(d, ast.ProcDecl):
            procedures.add(d.name)
    missing: list[str] = []

    def check_type(t: ast.TName, scope_types: set[str]):
        if t.name not in types and t.name not in scope_types:
            missing.append("type:" + t.name)
        for a in t.args:
            check_type(a, scope_types)

    def check_expr(e, scope: set[str], scope_types: set[str]):
        if isinstance(e, ast.Id):
            if e.name not in values and e.name not in scope:
                missing.append(e.name)
        elif isinstance(e, ast.FnApp):
            if e.name not in functions:
                missing.append("function:" + e.name)
            for a in e.args:
                check_expr(a, scope, scope_types)
        elif isinstance(e, ast.BinOp):
            check_expr(e.a, scope, scope_types)
            check_expr(e.b, scope, scope_types)
        elif isinstance(e, (ast.UnOp, ast.OldExpr)):
            check_expr(e.a, scope, scope_types)
        elif isinstance(e, ast.Coerce):
            check_expr(e.a, scope, scope_types)
            check_type(e.type, scope_types)
        elif isinstance(e, ast.Ite):
            for sub in (e.cond, e.then, e.other):
                check_expr(sub, scope, scope_types)
        elif isinstance(e, ast.Quant):
            inner_types = scope_types | set(e.typarams)
            inner = scope | {n for n, _ in e.bound}
            for _, t in e.bound:
                check_type(t, inner_types)
            check_expr(e.body, inner, inner_types)

    def check_stmts(stmts, scope, scope_types, labels):
        for s in stmts:
            if isinstance(s, ast.AssignStmt):
                if s.target not in scope and s.target not in values:
                    missing.append(s.target)
                check_expr(s.value, scope, scope_types)
            elif isinstance(s, ast.CallStmt):
                if s.callee not in procedures:
                    missing.append("procedure:" + s.callee)
                if s.lhs is not None and s.lhs not in scope and s.lhs not in values:
                    missing.append(s.lhs)
                for a in s.args:
                    check_expr(a, scope, scope_types)
            elif isinstance(s, ast.IfStmt):
                check_expr(s.cond, scope, scope_types)
                check_stmts(s.then, scope, scope_types, labels)
                if s.other is not None:
                    check_stmts(s.other, scope, scope_types, labels)
            elif isinstance(s, ast.GotoStmt):
                for t in s.targets:
                    if t not in labels:
                        missing.append("label:" + t)
            elif isinstance(s, (ast.AssertStmt, ast.AssumeStmt)):
                check_expr(s.expr, scope, scope_types)

    for d in program.decls:
        if isinstance(d, ast.ConstDecl):
            check_type(d.type, set())
        elif isinstance(d, ast.GlobalVarDecl):
            check_type(d.type, set())
        elif isinstance(d, ast.AxiomDecl):
            check_expr(d.expr, set(), set())
        elif isinstance(d, ast.FuncDecl):
            scope_types = set(d.typarams)
            scope = {n for n, _ in d.params if n is not None}
            for _, t in d.params:
                check_type(t, scope_types)
            check_type(d.ret, scope_types)
            if d.body is not None:
                check_expr(d.body, scope, scope_types)
        elif isinstance(d, ast.ProcDecl):
            scope = {n for n, _ in d.params} | {n for n, _ in d.returns}
            scope |= {v.name for v in d.locals}
            for _, t in list(d.params) + list(d.returns):
                check_type(t, set())
            for clause in list(d.requires) + list(d.ensures):
                check_expr(clause, scope, set())
            for m in d.modifies:
                if m not in values:
                    missing.append(m)
            if d.body is not None:
                labels = {s.name for s in _walk_stmts(d.body) if isinstance(s, ast.LabelStmt)}
                check_stmts(d.body, scope, set(), labels)
    return missing


__all__ = [
    "Program", "Provenance", "ast", "heap_effects", "parse", "parse_expr",
    "print_decl", "print_expr", "print_program", "scan_heap_writes",
    "undefined_symbols",
]
