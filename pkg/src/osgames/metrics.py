"""Static program metrics: cyclomatic complexity, Halstead counts and the
opponent-script-access score (OSAS).

The operator/operand classification is pinned in docs/metrics.md: keywords,
binary/unary operators, assignments, call sites and index sites count as
operators; identifiers and literals count as operands; grouping delimiters
count as neither.  OSAS marks the ambient `opp_source` binding as tainted,
propagates taint through assignments, compound expressions and calls, treats
the contents of a tainted branch as tainted (implicit flow), and reports the
tainted fraction of all decision sites (branch/loop conditions plus return
statements).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .slang import nodes as n
from .slang.validator import AMBIENT_BINDINGS

TAINT_SOURCE = "opp_source"


@dataclass(frozen=True)
class HalsteadReport:
    eta1: int  # distinct operators
    eta2: int  # distinct operands
    n1: int  # total operators
    n2: int  # total operands
    volume: float
    difficulty: float
    effort: float


@dataclass(frozen=True)
class OsasReport:
    tainted_sites: int
    total_sites: int
    score: float


@dataclass(frozen=True)
class MetricsReport:
    cyclomatic: int
    halstead: HalsteadReport
    osas: OsasReport

    def to_flat_dict(self) -> dict:
        h, o = self.halstead, self.osas
        return {
            "schema": "osgames.metrics/1",
            "cyclomatic": self.cyclomatic,
            "halstead_eta1": h.eta1,
            "halstead_eta2": h.eta2,
            "halstead_n1": h.n1,
            "halstead_n2": h.n2,
            "halstead_volume": h.volume,
            "halstead_difficulty": h.difficulty,
            "halstead_effort": h.effort,
            "osas_tainted_sites": o.tainted_sites,
            "osas_total_sites": o.total_sites,
            "osas_score": o.score,
        }


def cyclomatic(tree: n.Program) -> int:
    """1 + the number of branch points (if, elif, while, for, and, or)."""
    branches = 0
    for d in tree.defs:
        for stmt in n.walk_stmts(d.body):
            if isinstance(stmt, n.If):
                branches += len(stmt.arms)  # the if plus each elif
            elif isinstance(stmt, (n.While, n.For)):
                branches += 1
    for expr in n.walk_program_exprs(tree):
        if isinstance(expr, n.Binary) and expr.op in ("and", "or"):
            branches += 1
    return 1 + branches


def halstead(tree: n.Program) -> HalsteadReport:
    operators: Counter = Counter()
    operands: Counter = Counter()

    def operand_id(name: str) -> None:
        operands[("id", name)] += 1

    def count_expr(expr: n.Expr) -> None:
        if isinstance(expr, n.IntLit):
            operands[("int", expr.value)] += 1
        elif isinstance(expr, n.StrLit):
            operands[("str", expr.value)] += 1
        elif isinstance(expr, n.BoolLit):
            operands[("bool", expr.value)] += 1
        elif isinstance(expr, n.Var):
            operand_id(expr.name)
        elif isinstance(expr, n.Unary):
            operators[expr.op] += 1
        elif isinstance(expr, n.Binary):
            operators[expr.op] += 1
        elif isinstance(expr, n.Call):
            operators["call"] += 1
            operand_id(expr.name)
        elif isinstance(expr, n.Index):
            operators["index"] += 1
        # list/pair literals are pure grouping: neither operator nor operand

    for d in tree.defs:
        operators["fn"] += 1
        operand_id(d.name)
        for p in d.params:
            operand_id(p)
        for stmt in n.walk_stmts(d.body):
            if isinstance(stmt, n.Let):
                operators["let"] += 1
                operators["="] += 1
                operand_id(stmt.name)
            elif isinstance(stmt, n.Assign):
                operators["="] += 1
                operand_id(stmt.name)
            elif isinstance(stmt, n.If):
                operators["if"] += 1
                operators["elif"] += len(stmt.arms) - 1
                if stmt.orelse is not None:
                    operators["else"] += 1
            elif isinstance(stmt, n.While):
                operators["while"] += 1
            elif isinstance(stmt, n.For):
                operators["for"] += 1
                operators["in"] += 1
                operand_id(stmt.var)
            elif isinstance(stmt, n.Return):
                operators["return"] += 1
            for top in n.child_exprs(stmt):
                for expr in n.walk_exprs(top):
                    count_expr(expr)

    eta1 = sum(1 for c in operators.values() if c)
    eta2 = sum(1 for c in operands.values() if c)
    n1 = sum(operators.values())
    n2 = sum(operands.values())
    volume = (n1 + n2) * math.log2(eta1 + eta2) if (eta1 + eta2) else 0.0
    difficulty = (eta1 / 2) * (n2 / eta2) if eta2 else 0.0
    effort = difficulty * volume
    return HalsteadReport(eta1, eta2, n1, n2, volume, difficulty, effort)


# --------------------------------------------------------------------------
# OSAS taint analysis


def _expr_tainted(expr: n.Expr, tainted: set[str]) -> bool:
    for sub in n.walk_exprs(expr):
        if isinstance(sub, n.Var) and (sub.name == TAINT_SOURCE or sub.name in tainted):
            return True
    return False


def _propagate(block: n.Block, tainted: set[str], ctx: bool) -> bool:
    """One propagation pass; returns True if the tainted set grew."""
    changed = False

    def taint(name: str):
        nonlocal changed
        if name not in tainted and name not in AMBIENT_BINDINGS:
            tainted.add(name)
            changed = True

    for stmt in block:
        if isinstance(stmt, (n.Let, n.Assign)):
            if ctx or _expr_tainted(stmt.value, tainted):
                taint(stmt.name)
        elif isinstance(stmt, n.If):
            # A body is control-dependent on its own condition and every
            # condition before it in the chain; the else arm on all of them.
            running = ctx
            for cond, body in stmt.arms:
                running = running or _expr_tainted(cond, tainted)
                changed |= _propagate(body, tainted, running)
            if stmt.orelse is not None:
                changed |= _propagate(stmt.orelse, tainted, running)
        elif isinstance(stmt, n.While):
            inner = ctx or _expr_tainted(stmt.cond, tainted)
            changed |= _propagate(stmt.body, tainted, inner)
        elif isinstance(stmt, n.For):
            inner = ctx or _expr_tainted(stmt.iterable, tainted)
            if inner:
                taint(stmt.var)
            changed |= _propagate(stmt.body, tainted, inner)
    return changed


def _collect_sites(block: n.Block, tainted: set[str], ctx: bool, out: list[bool]):
    for stmt in block:
        if isinstance(stmt, n.If):
            running = ctx
            for cond, body in stmt.arms:
                out.append(_expr_tainted(cond, tainted))
                running = running or out[-1]
                _collect_sites(body, tainted, running, out)
            if stmt.orelse is not None:
                _collect_sites(stmt.orelse, tainted, running, out)
        elif isinstance(stmt, n.While):
            out.append(_expr_tainted(stmt.cond, tainted))
            _collect_sites(stmt.body, tainted, ctx or out[-1], out)
        elif isinstance(stmt, n.For):
            out.append(_expr_tainted(stmt.iterable, tainted))
            _collect_sites(stmt.body, tainted, ctx or out[-1], out)
        elif isinstance(stmt, n.Return):
            out.append(ctx or _expr_tainted(stmt.value, tainted))


def osas(tree: n.Program) -> OsasReport:
    sites: list[bool] = []
    for d in tree.defs:
        tainted: set[str] = set()
        while _propagate(d.body, tainted, False):
            pass
        _collect_sites(d.body, tainted, False, sites)
    total = len(sites)
    hits = sum(sites)
    score = hits / total if total else 0.0
    return OsasReport(hits, total, score)


def collect(tree: n.Program) -> MetricsReport:
    return MetricsReport(cyclomatic(tree), halstead(tree), osas(tree))
