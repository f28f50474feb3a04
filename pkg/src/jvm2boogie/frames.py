"""Frame inference over generated Boogie bodies.

A procedure's frame is the whole heap as soon as its body assigns the heap
variable, allocates, or calls a whole-heap or bodiless procedure; it is
empty otherwise.  The fixpoint starts optimistic (everything empty) and
ascends monotonically, so mutually recursive pure procedures settle at
EMPTY.  @Pure/@Predicate methods whose frame is not empty are specification
errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .boogie import Program, ast, heap_effects
from .errors import SpecificationError

EMPTY = "EMPTY"
WHOLE_HEAP = "WHOLE_HEAP"


@dataclass(frozen=True)
class FrameResult:
    value: str  # EMPTY | WHOLE_HEAP
    provenance: str | None = None  # first heap write or offending callee


def infer_frames(program: Program, heap_var: str = "#heap") -> dict[str, FrameResult]:
    """Two-point frame fixpoint over every procedure in a program.

    Bodiless procedures (stubs, allocation primitives) are conservatively
    WHOLE_HEAP.
    """
    procs = {d.name: d for d in program.decls if isinstance(d, ast.ProcDecl)}
    result: dict[str, FrameResult] = {}
    effects: dict[str, tuple] = {}
    for name, proc in procs.items():
        if proc.body is None:
            result[name] = FrameResult(WHOLE_HEAP, "no body available")
        else:
            result[name] = FrameResult(EMPTY)
            effects[name] = heap_effects(proc, heap_var)

    changed = True
    while changed:
        changed = False
        for name, proc in procs.items():
            if result[name].value == WHOLE_HEAP:
                continue
            first_assign, calls = effects[name]
            if first_assign is not None:
                result[name] = FrameResult(WHOLE_HEAP,
                                           "heap assignment at statement %d" % first_assign)
                changed = True
                continue
            for index, callee in calls:
                callee_frame = result.get(callee)
                if callee_frame is None:
                    result[name] = FrameResult(WHOLE_HEAP, "call to unknown %s" % callee)
                    changed = True
                    break
                if callee_frame.value == WHOLE_HEAP:
                    result[name] = FrameResult(WHOLE_HEAP, "call to %s" % callee)
                    changed = True
                    break
    return result


def enforce_purity(spec_procs: list[tuple[str, str]],
                   frames: dict[str, FrameResult]) -> list[SpecificationError]:
    """Every @Pure/@Predicate method must have an empty frame.

    `spec_procs` pairs the Boogie procedure name used during analysis with a
    display name for diagnostics.
    """
    errors = []
    for proc_name, display in spec_procs:
        frame = frames.get(proc_name)
        if frame is not None and frame.value == WHOLE_HEAP:
            errors.append(SpecificationError(
                "E_IMPURE_SPEC",
                "pure method modifies the heap (%s)" % (frame.provenance or "unknown"),
                display))
    return errors
