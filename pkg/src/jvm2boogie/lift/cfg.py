"""Control-flow graph over lifted bodies, dominators, natural loops.

Loops are reported by their anchor points: head (the loop's unique entry
block), backjump (the statement whose edge returns to the head), and the
exit points (first statements outside the loop reached from inside).
Irreducible control flow is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import TranslationError
from . import ir


@dataclass
class Block:
    id: int
    start: int
    end: int  # exclusive statement index
    succs: list[int] = field(default_factory=list)
    preds: list[int] = field(default_factory=list)


@dataclass
class CFG:
    body: ir.GrimpBody
    blocks: list[Block]
    block_of_stmt: list[int]

    def block_at(self, stmt_index: int) -> Block:
        return self.blocks[self.block_of_stmt[stmt_index]]


@dataclass
class LoopInfo:
    head_label: str
    head_index: int
    backjump_index: int
    back_indices: list[int]
    exit_points: list[tuple[int, str | None]]  # (stmt index, label if any)
    blocks: frozenset[int]
    stmt_indices: frozenset[int]

    @property
    def exit_labels(self) -> list[str]:
        return [label for _, label in self.exit_points if label is not None]

    @property
    def body_range(self) -> tuple[int, int]:
        return (min(self.stmt_indices), max(self.stmt_indices) + 1)


def build_cfg(body: ir.GrimpBody) -> CFG:
    n = len(body.stmts)
    if n == 0:
        return CFG(body, [Block(0, 0, 0)], [])
    leaders = {0} | set(body.labels.values())
    for i, s in enumerate(body.stmts):
        if isinstance(s, (ir.If, ir.Goto, ir.Return)) and i + 1 < n:
            leaders.add(i + 1)
    starts = sorted(leaders)
    blocks = []
    for bi, start in enumerate(starts):
        end = starts[bi + 1] if bi + 1 < len(starts) else n
        blocks.append(Block(bi, start, end))
    block_of_stmt = [0] * n
    for b in blocks:
        for i in range(b.start, b.end):
            block_of_stmt[i] = b.id
    for b in blocks:
        last = body.stmts[b.end - 1]
        succs: list[int] = []
        if isinstance(last, ir.Goto):
            succs = [block_of_stmt[body.labels[last.target]]]
        elif isinstance(last, ir.If):
            succs = [block_of_stmt[body.labels[last.target]]]
            if b.end < n:
                succs.append(block_of_stmt[b.end])
        elif isinstance(last, ir.Return):
            succs = []
        else:
            if b.end < n:
                succs = [block_of_stmt[b.end]]
        b.succs = succs
    for b in blocks:
        for s in b.succs:
            blocks[s].preds.append(b.id)
    return CFG(body, blocks, block_of_stmt)


def dominators(cfg: CFG) -> list[set[int]]:
    n = len(cfg.blocks)
    full = set(range(n))
    dom = [full.copy() for _ in range(n)]
    dom[0] = {0}
    changed = True
    while changed:
        changed = False
        for b in cfg.blocks[1:]:
            if b.preds:
                new = set.intersection(*(dom[p] for p in b.preds)) | {b.id}
            else:
                new = {b.id}
            if new != dom[b.id]:
                dom[b.id] = new
                changed = True
    return dom


def detect_loops(cfg: CFG) -> list[LoopInfo]:
    """Natural loops, innermost first.  Irreducible flow -> E_IRREDUCIBLE."""
    body = cfg.body
    where = "%s.%s" % (body.method.owner, body.method.name)
    dom = dominators(cfg)

    back_edges = [(b.id, s) for b in cfg.blocks for s in b.succs if s in dom[b.id]]

    # a retreating edge that does not target a dominator makes the CFG irreducible
    state: dict[int, int] = {0: 1}  # 1 = on stack, 2 = done
    stack = [(0, iter(cfg.blocks[0].succs))]
    while stack:
        node, it = stack[-1]
        advanced = False
        for succ in it:
            if state.get(succ, 0) == 1 and succ not in dom[node]:
                raise TranslationError("E_IRREDUCIBLE", "irreducible control flow", where)
            if state.get(succ, 0) == 0:
                state[succ] = 1
                stack.append((succ, iter(cfg.blocks[succ].succs)))
                advanced = True
                break
        if not advanced:
            state[node] = 2
            stack.pop()

    by_head: dict[int, list[int]] = {}
    for u, h in back_edges:
        by_head.setdefault(h, []).append(u)

    loops: list[LoopInfo] = []
    for head, sources in sorted(by_head.items()):
        members = {head}
        work = [u for u in sources]
        while work:
            node = work.pop()
            if node in members:
                continue
            members.add(node)
            work.extend(cfg.blocks[node].preds)
        stmt_indices = set()
        for bid in members:
            stmt_indices.update(range(cfg.blocks[bid].start, cfg.blocks[bid].end))
        back_indices = sorted(cfg.blocks[u].end - 1 for u in sources)
        exit_points: list[tuple[int, str | None]] = []
        seen_exits = set()
        for bid in sorted(members):
            for succ in cfg.blocks[bid].succs:
                if succ not in members:
                    target = cfg.blocks[succ].start
                    if target not in seen_exits:
                        seen_exits.add(target)
                        exit_points.append((target, body.label_at(target)))
        head_index = cfg.blocks[head].start
        head_label = body.label_at(head_index)
        if head_label is None:
            raise TranslationError("E_IRREDUCIBLE", "loop head has no label", where)
        loops.append(LoopInfo(
            head_label=head_label,
            head_index=head_index,
            backjump_index=back_indices[-1],
            back_indices=back_indices,
            exit_points=sorted(exit_points),
            blocks=frozenset(members),
            stmt_indices=frozenset(stmt_indices),
        ))
    loops.sort(key=lambda lp: (len(lp.stmt_indices), lp.head_index))
    return loops
