from . import ir
from .cfg import CFG, Block, LoopInfo, build_cfg, detect_loops, dominators
from .interp import Ref, STEP_LIMIT, TestHeap, Trap, eval_grimp, interpret_bytecode, run_lifted
from .simulate import simulate_stack
from .typing import infer_expected_types

__all__ = [
    "CFG", "Block", "LoopInfo", "Ref", "STEP_LIMIT", "TestHeap", "Trap",
    "build_cfg", "detect_loops", "dominators", "eval_grimp",
    "infer_expected_types", "interpret_bytecode", "ir", "run_lifted",
    "simulate_stack",
]
