"""Recursive-descent parser for the emitted Boogie subset.

Covers exactly what the printer produces plus the prelude template: type,
const, var, function, axiom and procedure declarations; goto/assert/
assume/call/assign/if/return statements with labels; quantifiers with
type parameters, old(), coercions and if-then-else expressions.
"""

from __future__ import annotations

import re

from ..errors import BoogieSyntaxError
from . import ast

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<real>\d+\.\d+(?:e[+-]?\d+)?)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_#$.@'`~^?\\][A-Za-z0-9_#$.@'`~^?\\]*)
  | (?P<punct><==>|==>|:=|::|&&|\|\||==|!=|<=|>=|[-+*/!<>(){},;:\[\]])
""", re.VERBOSE)

KEYWORDS = {
    "type", "const", "unique", "var", "function", "returns", "axiom",
    "procedure", "requires", "ensures", "modifies", "forall", "exists",
    "old", "true", "false", "goto", "return", "call", "assert", "assume",
    "if", "then", "else", "div", "mod",
}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise BoogieSyntaxError("unexpected character %r" % text[pos], line, col)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            line += value.count("\n")
            if "\n" in value:
                line_start = pos + value.rindex("\n") + 1
        else:
            if kind == "id" and value in KEYWORDS:
                kind = value
            elif kind == "punct":
                kind = value
            tokens.append(_Token(kind, value, line, col))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str) -> BoogieSyntaxError:
        tok = self.peek()
        return BoogieSyntaxError("%s (got %r)" % (message, tok.text or "<eof>"),
                                 tok.line, tok.col)

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.error("expected %r" % kind)
        return self.next()

    def accept(self, kind: str) -> _Token | None:
        if self.peek().kind == kind:
            return self.next()
        return None

    # -- program -----------------------------------------------------------------

    def program(self) -> ast.Program:
        decls = []
        while self.peek().kind != "eof":
            decls.append(self.declaration())
        return ast.Program(decls)

    def declaration(self):
        kind = self.peek().kind
        if kind == "type":
            self.next()
            name = self.expect("id").text
            params = []
            while self.peek().kind == "id":
                params.append(self.next().text)
            self.expect(";")
            return ast.TypeDecl(name, tuple(params))
        if kind == "const":
            self.next()
            unique = self.accept("unique") is not None
            name = self.expect("id").text
            self.expect(":")
            t = self.type_()
            self.expect(";")
            return ast.ConstDecl(name, t, unique)
        if kind == "var":
            self.next()
            name = self.expect("id").text
            self.expect(":")
            t = self.type_()
            self.expect(";")
            return ast.GlobalVarDecl(name, t)
        if kind == "axiom":
            self.next()
            e = self.expr()
            self.expect(";")
            return ast.AxiomDecl(e)
        if kind == "function":
            return self.function_decl()
        if kind == "procedure":
            return self.procedure_decl()
        raise self.error("expected a declaration")

    def typarams(self) -> tuple[str, ...]:
        if self.peek().kind != "<":
            return ()
        self.next()
        names = [self.expect("id").text]
        while self.accept(","):
            names.append(self.expect("id").text)
        self.expect(">")
        return tuple(names)

    def function_decl(self) -> ast.FuncDecl:
        self.expect("function")
        name = self.expect("id").text
        typarams = self.typarams()
        self.expect("(")
        params = []
        while self.peek().kind != ")":
            params.append(self.opt_named_param())
            if not self.accept(","):
                break
        self.expect(")")
        self.expect("returns")
        self.expect("(")
        if self.peek().kind == "id" and self.peek(1).kind == ":":
            self.next()
            self.next()
        ret = self.type_()
        self.expect(")")
        if self.accept(";"):
            return ast.FuncDecl(name, typarams, tuple(params), ret, None)
        self.expect("{")
        body = self.expr()
        self.expect("}")
        return ast.FuncDecl(name, typarams, tuple(params), ret, body)

    def opt_named_param(self):
        if self.peek().kind == "id" and self.peek(1).kind == ":":
            name = self.next().text
            self.next()
            return (name, self.type_())
        return (None, self.type_())

    def named_param(self):
        name = self.expect("id").text
        self.expect(":")
        return (name, self.type_())

    def procedure_decl(self) -> ast.ProcDecl:
        self.expect("procedure")
        name = self.expect("id").text
        self.expect("(")
        params = []
        while self.peek().kind != ")":
            params.append(self.named_param())
            if not self.accept(","):
                break
        self.expect(")")
        returns = []
        if self.accept("returns"):
            self.expect("(")
            while self.peek().kind != ")":
                returns.append(self.named_param())
                if not self.accept(","):
                    break
            self.expect(")")
        bodiless = self.accept(";") is not None
        requires, ensures, modifies = [], [], []
        while self.peek().kind in ("requires", "ensures", "modifies"):
            which = self.next().kind
            if which == "modifies":
                names = [self.expect("id").text]
                while self.accept(","):
                    names.append(self.expect("id").text)
                self.expect(";")
                modifies.extend(names)
            else:
                e = self.expr()
                self.expect(";")
                (requires if which == "requires" else ensures).append(e)
        locals_: list[ast.LocalVarDecl] = []
        body = None
        if not bodiless:
            self.expect("{")
            while self.peek().kind == "var":
                self.next()
                vname = self.expect("id").text
                self.expect(":")
                t = self.type_()
                self.expect(";")
                locals_.append(ast.LocalVarDecl(vname, t))
            body = self.stmt_list("}")
            self.expect("}")
        return ast.ProcDecl(name, tuple(params), tuple(returns), tuple(requires),
                            tuple(ensures), tuple(modifies), tuple(locals_), body)

    # -- types -------------------------------------------------------------------

    def type_atom(self) -> ast.TName:
        if self.accept("("):
            t = self.type_()
            self.expect(")")
            return t
        tok = self.expect("id")
        return ast.TName(tok.text)

    def type_(self) -> ast.TName:
        head = self.type_atom()
        args = []
        while self.peek().kind in ("id", "("):
            args.append(self.type_atom())
        if args:
            return ast.TName(head.name, tuple(args))
        return head

    # -- statements ----------------------------------------------------------------

    def stmt_list(self, closer: str) -> tuple:
        stmts = []
        while self.peek().kind != closer:
            stmts.append(self.stmt())
        return tuple(stmts)

    def stmt(self):
        kind = self.peek().kind
        if kind == "goto":
            self.next()
            targets = [self.expect("id").text]
            while self.accept(","):
                targets.append(self.expect("id").text)
            self.expect(";")
            return ast.GotoStmt(tuple(targets))
        if kind == "assert":
            self.next()
            e = self.expr()
            self.expect(";")
            return ast.AssertStmt(e)
        if kind == "assume":
            self.next()
            e = self.expr()
            self.expect(";")
            return ast.AssumeStmt(e)
        if kind == "return":
            self.next()
            self.expect(";")
            return ast.ReturnStmt()
        if kind == "call":
            self.next()
            first = self.expect("id").text
            if self.accept(":="):
                callee = self.expect("id").text
                args = self.call_args()
                self.expect(";")
                return ast.CallStmt(first, callee, args)
            args = self.call_args()
            self.expect(";")
            return ast.CallStmt(None, first, args)
        if kind == "if":
            self.next()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect("{")
            then = self.stmt_list("}")
            self.expect("}")
            other = None
            if self.accept("else"):
                self.expect("{")
                other = self.stmt_list("}")
                self.expect("}")
            return ast.IfStmt(cond, then, other)
        if kind == "id":
            name = self.next().text
            if self.accept(":="):
                e = self.expr()
                self.expect(";")
                return ast.AssignStmt(name, e)
            if self.accept(":"):
                return ast.LabelStmt(name)
            raise self.error("expected ':=' or ':' after identifier")
        raise self.error("expected a statement")

    def call_args(self) -> tuple:
        self.expect("(")
        args = []
        while self.peek().kind != ")":
            args.append(self.expr())
            if not self.accept(","):
                break
        self.expect(")")
        return tuple(args)

    # -- expressions ------------------------------------------------------------------

    def expr(self):
        return self.iff_expr()

    def iff_expr(self):
        e = self.implies_expr()
        if self.peek().kind == "<==>":
            self.next()
            return ast.BinOp("<==>", e, self.implies_expr())
        return e

    def implies_expr(self):
        e = self.or_expr()
        if self.peek().kind == "==>":
            self.next()
            return ast.BinOp("==>", e, self.implies_expr())
        return e

    def or_expr(self):
        e = self.rel_expr()
        op = self.peek().kind
        if op not in ("&&", "||"):
            return e
        while self.peek().kind == op:
            self.next()
            e = ast.BinOp(op, e, self.rel_expr())
        if self.peek().kind in ("&&", "||"):
            raise self.error("ambiguous mix of && and || (parenthesize)")
        return e

    def rel_expr(self):
        e = self.add_expr()
        if self.peek().kind in ("==", "!=", "<", "<=", ">", ">="):
            op = self.next().kind
            e = ast.BinOp(op, e, self.add_expr())
            if self.peek().kind in ("==", "!=", "<", "<=", ">", ">="):
                raise self.error("chained relational operators (parenthesize)")
        return e

    def add_expr(self):
        e = self.mul_expr()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            e = ast.BinOp(op, e, self.mul_expr())
        return e

    def mul_expr(self):
        e = self.unary_expr()
        while self.peek().kind in ("*", "/", "div", "mod"):
            op = self.next().kind
            e = ast.BinOp(op, e, self.unary_expr())
        return e

    def unary_expr(self):
        if self.peek().kind == "!":
            self.next()
            return ast.UnOp("!", self.unary_expr())
        if self.peek().kind == "-":
            self.next()
            if self.peek().kind == "int":
                return ast.IntLit(-int(self.next().text))
            if self.peek().kind == "real":
                return ast.RealLit(-float(self.next().text))
            return ast.UnOp("-", self.unary_expr())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return ast.IntLit(int(tok.text))
        if tok.kind == "real":
            self.next()
            return ast.RealLit(float(tok.text))
        if tok.kind in ("true", "false"):
            self.next()
            return ast.BoolLit(tok.kind == "true")
        if tok.kind == "old":
            self.next()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return ast.OldExpr(e)
        if tok.kind == "if":
            self.next()
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            other = self.expr()
            return ast.Ite(cond, then, other)
        if tok.kind == "id":
            name = self.next().text
            if self.peek().kind == "(":
                return ast.FnApp(name, self.call_args())
            return ast.Id(name)
        if tok.kind == "(":
            self.next()
            if self.peek().kind in ("forall", "exists"):
                kind = self.next().kind
                typarams = self.typarams()
                bound = [self.named_param()]
                while self.accept(","):
                    bound.append(self.named_param())
                self.expect("::")
                body = self.expr()
                self.expect(")")
                return ast.Quant(kind, typarams, tuple(bound), body)
            e = self.expr()
            if self.accept(":"):
                t = self.type_()
                self.expect(")")
                return ast.Coerce(e, t)
            self.expect(")")
            return e
        raise self.error("expected an expression")


def parse(text: str) -> ast.Program:
    parser = _Parser(text)
    return parser.program()


def parse_expr(text: str):
    parser = _Parser(text)
    e = parser.expr()
    parser.expect("eof")
    return e
