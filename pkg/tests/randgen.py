"""Random program generators backing the differential oracles."""

import random

from jvm2boogie.boogie import ast
from jvm2boogie.classfile import ClassPlan, MethodPlan

from plans import OPS

INT_MIN = -(2 ** 31)
INT_MAX = 2 ** 31 - 1


class BytecodeGen:
    """Structured random methods lowered to stack code.

    The generator only guarantees verifiable shape (consistent stack
    depths); the semantics oracle is the bytecode interpreter itself.
    """

    def __init__(self, rng: random.Random, array_param: bool = True,
                 wide_ok: bool = True):
        self.rng = rng
        self.array_param = array_param
        self.wide_ok = wide_ok
        self.label_count = 0
        self.code: list[tuple] = []

    def fresh_label(self) -> str:
        self.label_count += 1
        return "g%d" % self.label_count

    def emit(self, *ins):
        self.code.append(tuple(ins))

    def gen_method(self, name: str) -> MethodPlan:
        rng = self.rng
        self.label_count = 0
        self.code = []
        self.n_int_params = rng.randint(2, 3)
        descriptor = "(" + "I" * self.n_int_params
        self.array_slot = None
        slot = self.n_int_params
        if self.array_param and rng.random() < 0.7:
            self.array_slot = slot
            descriptor += "[I"
            slot += 1
        descriptor += ")I"
        self.int_slots = list(range(self.n_int_params))
        # extra scratch locals, initialized before use
        for _ in range(rng.randint(1, 3)):
            self.lower_expr(2)
            self.emit("istore", slot)
            self.int_slots.append(slot)
            slot += 1
        self.next_slot = slot
        self.gen_stmts(depth=2, count=rng.randint(2, 6))
        self.lower_expr(3)
        self.emit("ireturn")
        return MethodPlan(name=name, descriptor=descriptor, code=self.code)

    # -- statements ------------------------------------------------------------

    def gen_stmts(self, depth: int, count: int):
        for _ in range(count):
            self.gen_stmt(depth)

    def gen_stmt(self, depth: int):
        rng = self.rng
        choices = ["assign", "assign", "iinc"]
        if depth > 0:
            choices += ["if", "if", "loop"]
        if self.array_slot is not None:
            choices.append("astore")
        choices.append("shuffle")
        kind = rng.choice(choices)
        if kind == "assign":
            self.lower_expr(2)
            self.emit("istore", rng.choice(self.int_slots))
        elif kind == "iinc":
            self.emit("iinc", rng.choice(self.int_slots), rng.randint(-4, 4))
        elif kind == "astore":
            self.emit("aload", self.array_slot)
            self.lower_index()
            self.lower_expr(1)
            self.emit("iastore")
        elif kind == "if":
            otherwise = rng.random() < 0.5
            l_else = self.fresh_label()
            l_end = self.fresh_label()
            self.lower_cond_jump(l_else, jump_if_false=True)
            self.gen_stmts(depth - 1, rng.randint(1, 3))
            if otherwise:
                self.emit("goto", l_end)
                self.emit("label", l_else)
                self.gen_stmts(depth - 1, rng.randint(1, 3))
                self.emit("label", l_end)
            else:
                self.emit("label", l_else)
        elif kind == "loop":
            counter = self.next_slot
            self.next_slot += 1
            bound = rng.randint(1, 5)
            head = self.fresh_label()
            exit_ = self.fresh_label()
            self.emit("push", "int", 0)
            self.emit("istore", counter)
            self.emit("label", head)
            self.emit("iload", counter)
            self.emit("push", "int", bound)
            self.emit("if_icmpge", exit_)
            self.gen_stmts(depth - 1, rng.randint(1, 2))
            self.emit("iinc", counter, 1)
            self.emit("goto", head)
            self.emit("label", exit_)
        elif kind == "shuffle":
            self._shuffle_template()

    def _shuffle_template(self):
        rng = self.rng
        a, b = rng.choice(self.int_slots), rng.choice(self.int_slots)
        which = rng.randrange(4)
        if which == 0:  # x*x via dup
            self.lower_expr(1)
            self.emit("dup")
            self.emit("imul")
            self.emit("istore", a)
        elif which == 1:  # swap then subtract
            self.lower_expr(1)
            self.lower_expr(1)
            self.emit("swap")
            self.emit("isub")
            self.emit("istore", a)
        elif which == 2:  # dup_x1 shuffle: a b a pattern folded with adds
            self.lower_expr(1)
            self.lower_expr(1)
            self.emit("dup_x1")
            self.emit("iadd")
            self.emit("iadd")
            self.emit("istore", b)
        else:  # pop a computed value
            self.lower_expr(1)
            self.emit("pop")

    # -- expressions ----------------------------------------------------------------

    def lower_expr(self, depth: int):
        """Emit instructions leaving one int on the stack."""
        rng = self.rng
        if depth <= 0 or rng.random() < 0.25:
            if rng.random() < 0.6:
                self.emit("iload", rng.choice(self.int_slots))
            else:
                pool = [0, 1, -1, 2, 3, 7, 100, -13]
                if rng.random() < 0.1:
                    pool = [INT_MIN, INT_MAX, 65535, -65536]
                self.emit("push", "int", rng.choice(pool))
            return
        roll = rng.random()
        if roll < 0.45:
            op = rng.choice(["iadd", "isub", "imul", "idiv", "irem", "iand",
                             "ior", "ixor", "ishl", "ishr", "iushr"])
            self.lower_expr(depth - 1)
            self.lower_expr(depth - 1)
            self.emit(op)
        elif roll < 0.6:
            # ternary via branches: (cond) ? t : e
            l_else = self.fresh_label()
            l_end = self.fresh_label()
            self.lower_cond_jump(l_else, jump_if_false=True)
            self.lower_expr(depth - 1)
            self.emit("goto", l_end)
            self.emit("label", l_else)
            self.lower_expr(depth - 1)
            self.emit("label", l_end)
        elif roll < 0.7 and self.array_slot is not None:
            self.lower_array_read()
        elif roll < 0.8 and self.wide_ok:
            # exercise wide slots: l2i((long) a * (long) b) or lcmp result
            self.lower_expr(depth - 1)
            self.emit("i2l")
            self.lower_expr(depth - 1)
            self.emit("i2l")
            if rng.random() < 0.5:
                self.emit("lmul")
                self.emit("l2i")
            else:
                self.emit("lcmp")
        elif roll < 0.9:
            self.lower_expr(depth - 1)
            self.emit("ineg")
        else:
            self.lower_expr(depth - 1)
            self.emit(rng.choice(["i2b", "i2c", "i2s"]))

    def lower_index(self):
        """Index expression, usually masked in range (arrays have length 4)."""
        if self.rng.random() < 0.75:
            self.lower_expr(1)
            self.emit("push", "int", 3)
            self.emit("iand")
        else:
            self.lower_expr(1)

    def lower_array_read(self):
        self.emit("aload", self.array_slot)
        self.lower_index()
        self.emit("iaload")

    def lower_cond_jump(self, target: str, jump_if_false: bool):
        rng = self.rng
        inverse = {"if_icmpeq": "if_icmpne", "if_icmpne": "if_icmpeq",
                   "if_icmplt": "if_icmpge", "if_icmpge": "if_icmplt",
                   "if_icmpgt": "if_icmple", "if_icmple": "if_icmpgt"}
        if rng.random() < 0.7:
            op = rng.choice(list(inverse))
            self.lower_expr(1)
            self.lower_expr(1)
            self.emit(inverse[op] if jump_if_false else op, target)
        else:
            single = {"ifeq": "ifne", "ifne": "ifeq", "iflt": "ifge",
                      "ifge": "iflt", "ifgt": "ifle", "ifle": "ifgt"}
            op = rng.choice(list(single))
            self.lower_expr(1)
            self.emit(single[op] if jump_if_false else op, target)


def random_method(rng: random.Random, name: str = "f") -> MethodPlan:
    return BytecodeGen(rng).gen_method(name)


def random_inputs(rng: random.Random, plan: MethodPlan, heap):
    """Argument vector matching the plan's descriptor; arrays allocated in
    the given heap with length 4."""
    args = []
    for c in plan.descriptor[1:plan.descriptor.index(")")].replace("[I", "A"):
        if c == "I":
            if rng.random() < 0.08:
                args.append(rng.choice([INT_MIN, INT_MAX, -1]))
            else:
                args.append(rng.randint(-100, 100))
        elif c == "A":
            ref = heap.new_array("I", 4)
            _, data = heap.arrays[ref.id]
            for i in range(4):
                data[i] = rng.randint(-50, 50)
            args.append(ref)
    return args


class StatefulGen(BytecodeGen):
    """Adds static-field traffic and calls to previously generated methods."""

    def __init__(self, rng, owner: str, field_name: str,
                 callees: list[tuple[str, str]]):
        super().__init__(rng, array_param=True, wide_ok=True)
        self.owner = owner
        self.field_name = field_name
        self.callees = callees

    def gen_stmt(self, depth: int):
        roll = self.rng.random()
        if roll < 0.15:
            self.lower_expr(1)
            self.emit("putstatic", (self.owner, self.field_name, "I"))
            return
        if roll < 0.3 and self.callees:
            name, desc = self.rng.choice(self.callees)
            self._lower_call(name, desc)
            self.emit("istore", self.rng.choice(self.int_slots))
            return
        super().gen_stmt(depth)

    def lower_expr(self, depth: int):
        roll = self.rng.random()
        if depth > 0 and roll < 0.1:
            self.emit("getstatic", (self.owner, self.field_name, "I"))
            return
        if depth > 0 and roll < 0.18 and self.callees:
            name, desc = self.rng.choice(self.callees)
            self._lower_call(name, desc)
            return
        super().lower_expr(depth)

    def _lower_call(self, name: str, desc: str):
        params = desc[1:desc.index(")")]
        n_args = params.replace("[I", "").count("I")
        takes_array = "[I" in params
        for _ in range(n_args):
            super().lower_expr(1)
        if takes_array:
            if self.array_slot is not None:
                self.emit("aload", self.array_slot)
            else:
                self.emit("push", "int", 4)
                self.emit("newarray", "I")
        self.emit("invokestatic", (self.owner, name, desc))


def random_stateful_class(rng: random.Random, name: str) -> ClassPlan:
    from jvm2boogie.classfile import FieldPlan

    methods = []
    callees: list[tuple[str, str]] = []
    for k in range(rng.randint(2, 3)):
        gen = StatefulGen(rng, name, "state", list(callees))
        plan = gen.gen_method("m%d" % k)
        methods.append(plan)
        callees.append((plan.name, plan.descriptor))
    return ClassPlan(name=name, fields=[FieldPlan("state", "I", 0x0009)],
                     methods=methods, default_init=False)


# -- aggregable chains -----------------------------------------------------------


def random_aggregable(rng: random.Random, depth: int = 6,
                      class_name: str = "rand.Agg") -> MethodPlan:
    """A straight-line specification-style body: temporaries assigned pure
    expressions over the operator library, ending in a boolean return.
    Occasionally reuses a slot to exercise the SSA pre-pass."""
    code: list[tuple] = []
    # params: two ints, one boolean
    int_values: list[int] = [0, 1]  # slots holding ints
    bool_values: list[int] = [2]  # slots holding booleans
    next_slot = 3
    reuse = rng.random() < 0.3

    def push_int(d: int):
        roll = rng.random()
        if d <= 0 or roll < 0.3:
            if rng.random() < 0.6:
                code.append(("iload", rng.choice(int_values)))
            else:
                code.append(("push", "int", rng.randint(-20, 20)))
            return
        if roll < 0.75:
            push_int(d - 1)
            push_int(d - 1)
            code.append((rng.choice(["iadd", "isub", "imul"]),))
        else:
            push_bool(d - 1)
            push_int(d - 1)
            push_int(d - 1)
            code.append(("invokestatic", (OPS, "conditional", "(ZII)I")))

    def push_bool(d: int):
        roll = rng.random()
        if d <= 0 or roll < 0.25:
            if bool_values and rng.random() < 0.7:
                code.append(("iload", rng.choice(bool_values)))
            else:
                code.append(("push", "int", rng.randint(0, 1)))
            return
        if roll < 0.6:
            op = rng.choice(["eq", "neq", "lt", "lte", "gt", "gte"])
            push_int(d - 1)
            push_int(d - 1)
            code.append(("invokestatic", (OPS, op, "(II)Z")))
        elif roll < 0.75:
            push_bool(d - 1)
            push_bool(d - 1)
            code.append((rng.choice(["iand", "ior", "ixor"]),))
        elif roll < 0.85:
            push_bool(d - 1)
            code.append(("invokestatic", (OPS, "not", "(Z)Z")))
        elif roll < 0.95:
            push_bool(d - 1)
            push_bool(d - 1)
            code.append(("invokestatic", (OPS, "implies", "(ZZ)Z")))
        else:
            push_bool(d - 1)
            push_bool(d - 1)
            push_bool(d - 1)
            code.append(("invokestatic", (OPS, "conditional", "(ZZZ)Z")))

    n_temps = rng.randint(1, 5)
    for _ in range(n_temps):
        is_bool = rng.random() < 0.6
        if reuse and rng.random() < 0.4 and next_slot > 3:
            slot = rng.randrange(3, next_slot)
            # slot type may flip; drop stale type info
            if slot in int_values:
                int_values.remove(slot)
            if slot in bool_values:
                bool_values.remove(slot)
        else:
            slot = next_slot
            next_slot += 1
        if is_bool:
            push_bool(min(depth, 3))
            bool_values.append(slot)
        else:
            push_int(min(depth, 3))
            int_values.append(slot)
        code.append(("istore", slot))
    push_bool(min(depth, 4))
    code.append(("ireturn",))
    return MethodPlan(name="p", descriptor="(IIZ)Z", code=code)


def random_agg_inputs(rng: random.Random):
    return [rng.randint(-30, 30), rng.randint(-30, 30), rng.randint(0, 1)]


# -- random classfile plans ---------------------------------------------------------


def random_class_plan(rng: random.Random, index: int) -> ClassPlan:
    from jvm2boogie.classfile import AnnotationValue, FieldPlan

    methods = []
    for m in range(rng.randint(1, 3)):
        plan = random_method(rng, name="m%d" % m)
        if rng.random() < 0.4:
            plan.annotations = [AnnotationValue(
                "byteback.annotations.Require", (("value", "pred%d" % m),))]
        if rng.random() < 0.3:
            plan.param_names = ["a%d" % i for i in range(plan.descriptor.count("I") - 1)]
        methods.append(plan)
    fields = []
    for f in range(rng.randint(0, 3)):
        fields.append(FieldPlan("f%d" % f, rng.choice(["I", "Z", "J", "D", "[I",
                                                       "Ljava/lang/String;"])))
    return ClassPlan(
        name="rand.c%d.K%d" % (index, rng.randrange(1000)),
        major_version=rng.choice([49, 52, 55, 61, 65]),
        fields=fields,
        methods=methods,
        default_init=rng.random() < 0.8,
    )


# -- random Boogie ASTs ----------------------------------------------------------------


_IDENT_POOL = ["x", "y", "zz", "#heap", "@ret", "a.b", "p$q", "r0", "_t", "f#1"]
_TYPE_POOL = [ast.TINT, ast.TBOOL, ast.TREAL, ast.TName("Reference"),
              ast.TName("Field", (ast.TINT,))]


def random_boogie_expr(rng: random.Random, depth: int = 4):
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice([
            ast.IntLit(rng.randint(-50, 50)),
            ast.RealLit(rng.choice([0.5, 2.75, 13.0, 0.125])),
            ast.BoolLit(rng.random() < 0.5),
            ast.Id(rng.choice(_IDENT_POOL)),
        ])
    roll = rng.random()
    sub = lambda: random_boogie_expr(rng, depth - 1)
    if roll < 0.35:
        op = rng.choice(["<==>", "==>", "&&", "||", "==", "!=", "<", "<=", ">",
                         ">=", "+", "-", "*", "div", "mod", "/"])
        return ast.BinOp(op, sub(), sub())
    if roll < 0.45:
        return ast.UnOp(rng.choice(["!", "-"]), sub())
    if roll < 0.55:
        return ast.FnApp(rng.choice(["f", "g.h", "read"]),
                         tuple(sub() for _ in range(rng.randint(0, 3))))
    if roll < 0.65:
        return ast.OldExpr(sub())
    if roll < 0.75:
        return ast.Coerce(sub(), rng.choice(_TYPE_POOL))
    if roll < 0.85:
        return ast.Ite(sub(), sub(), sub())
    bound = tuple(("q%d" % i, rng.choice(_TYPE_POOL))
                  for i in range(rng.randint(1, 2)))
    typarams = ("tv",) if rng.random() < 0.3 else ()
    return ast.Quant(rng.choice(["forall", "exists"]), typarams, bound, sub())


def random_boogie_program(rng: random.Random) -> ast.Program:
    decls = []
    for i in range(rng.randint(1, 6)):
        roll = rng.random()
        if roll < 0.15:
            decls.append(ast.TypeDecl("T%d" % i, ("a",) if rng.random() < 0.5 else ()))
        elif roll < 0.3:
            decls.append(ast.ConstDecl("c%d" % i, rng.choice(_TYPE_POOL),
                                       unique=rng.random() < 0.5))
        elif roll < 0.4:
            decls.append(ast.GlobalVarDecl("g%d" % i, rng.choice(_TYPE_POOL)))
        elif roll < 0.55:
            decls.append(ast.AxiomDecl(random_boogie_expr(rng)))
        elif roll < 0.7:
            params = tuple(("p%d" % k if rng.random() < 0.7 else None,
                            rng.choice(_TYPE_POOL)) for k in range(rng.randint(0, 3)))
            body = random_boogie_expr(rng) if rng.random() < 0.6 else None
            typarams = ("a",) if rng.random() < 0.3 else ()
            decls.append(ast.FuncDecl("fn%d" % i, typarams, params,
                                      rng.choice(_TYPE_POOL), body))
        else:
            decls.append(random_boogie_proc(rng, i))
    return ast.Program(decls)


def random_boogie_proc(rng: random.Random, index: int) -> ast.ProcDecl:
    params = tuple(("p%d" % k, rng.choice(_TYPE_POOL))
                   for k in range(rng.randint(0, 3)))
    returns = tuple(("r%d" % k, rng.choice(_TYPE_POOL))
                    for k in range(rng.randint(0, 1)))
    requires = tuple(random_boogie_expr(rng, 2) for _ in range(rng.randint(0, 2)))
    ensures = tuple(random_boogie_expr(rng, 2) for _ in range(rng.randint(0, 2)))
    modifies = ("#heap",) if rng.random() < 0.4 else ()
    if rng.random() < 0.3:
        return ast.ProcDecl("proc%d" % index, params, returns, requires,
                            ensures, modifies, (), None)
    labels = ["l%d" % k for k in range(rng.randint(1, 3))]
    stmts: list = []
    for label in labels:
        stmts.append(ast.LabelStmt(label))
        for _ in range(rng.randint(0, 3)):
            stmts.append(random_boogie_stmt(rng, labels))
    stmts.append(ast.ReturnStmt())
    locals_ = tuple(ast.LocalVarDecl("v%d" % k, rng.choice(_TYPE_POOL))
                    for k in range(rng.randint(0, 3)))
    return ast.ProcDecl("proc%d" % index, params, returns, requires, ensures,
                        modifies, locals_, tuple(stmts))


def random_boogie_stmt(rng: random.Random, labels: list[str]):
    roll = rng.random()
    if roll < 0.3:
        return ast.AssignStmt(rng.choice(_IDENT_POOL), random_boogie_expr(rng, 2))
    if roll < 0.45:
        return ast.AssertStmt(random_boogie_expr(rng, 2))
    if roll < 0.6:
        return ast.AssumeStmt(random_boogie_expr(rng, 2))
    if roll < 0.75:
        lhs = rng.choice(_IDENT_POOL) if rng.random() < 0.5 else None
        return ast.CallStmt(lhs, "callee",
                            tuple(random_boogie_expr(rng, 1)
                                  for _ in range(rng.randint(0, 2))))
    if roll < 0.9:
        return ast.IfStmt(random_boogie_expr(rng, 2),
                          (ast.GotoStmt((rng.choice(labels),)),),
                          (ast.ReturnStmt(),) if rng.random() < 0.3 else None)
    return ast.GotoStmt(tuple(rng.choice(labels) for _ in range(rng.randint(1, 2))))
