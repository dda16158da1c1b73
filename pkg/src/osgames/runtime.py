"""Deterministic tree-walking evaluator with resource budgets.

A program is run once per round against a set of ambient bindings (its own
and the opponent's history and source, the round index, and for the grid
game a positional view).  Evaluation is pure: identical (tree, bindings,
budget, rng seed) always produce the identical value, step count and draws,
and nothing in the bindings can be mutated from inside the language.

SLANG values map to Python values: integers/booleans/strings to themselves,
lists to Python lists (never mutated), pairs to 2-tuples, and a unit
singleton for functions that fall off the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import games
from .rng import SplitMix64
from .slang import nodes as n
from .slang.tokens import Span
from .slang.validator import BUILTINS, GAME_COIN, GAME_IPD


#: Magnitude caps on produced values; they exist to stop exponential-growth
#: bombs (repeated squaring / string doubling) that would otherwise blow up
#: memory within a handful of budgeted steps.  Generous enough that no sane
#: strategy arithmetic gets near them.
MAX_INT_BITS = 256
MAX_STRING_LENGTH = 1 << 20


@dataclass(frozen=True)
class Budget:
    step_limit: int = 100_000
    call_depth_limit: int = 64
    list_length_cap: int = 4096

    def __post_init__(self):
        if self.step_limit <= 0 or self.call_depth_limit <= 0 or self.list_length_cap <= 0:
            raise ValueError("budget limits must be strictly positive")


class FaultKind(Enum):
    STEP_BUDGET = "step-budget-exceeded"
    CALL_DEPTH = "call-depth-exceeded"
    TYPE_ERROR = "type-error"
    DIV_ZERO = "division-by-zero"
    INDEX_RANGE = "index-out-of-range"
    INVALID_RETURN = "invalid-return"


class RuntimeFault(Exception):
    def __init__(self, kind: FaultKind, span: Span, detail: str, steps: int = 0):
        super().__init__(f"{kind.value}: {detail}")
        self.kind = kind
        self.span = span
        self.detail = detail
        self.steps = steps


@dataclass(frozen=True)
class CoinView:
    """What one player of the coin game observes: full state, own-relative."""

    my_pos: games.Position
    opp_pos: games.Position
    my_coin: games.Position
    opp_coin: games.Position
    board_size: int


@dataclass(frozen=True)
class Bindings:
    game: str = GAME_IPD
    my_history: tuple[str, ...] = ()
    opp_history: tuple[str, ...] = ()
    my_source: str = ""
    opp_source: str = ""
    round_index: int = 0
    coin_view: CoinView | None = None

    def __post_init__(self):
        if len(self.my_history) != len(self.opp_history):
            raise ValueError("histories must have equal length")
        if len(self.my_history) != self.round_index:
            raise ValueError("round_index must equal the history length")
        if self.game == GAME_COIN and self.coin_view is None:
            raise ValueError("coin game bindings need a coin_view")


class _Unit:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "unit"


UNIT = _Unit()


def type_name(value) -> str:
    if type(value) is bool:
        return "boolean"
    if type(value) is int:
        return "integer"
    if type(value) is str:
        return "string"
    if type(value) is list:
        return "list"
    if type(value) is tuple:
        return "pair"
    if value is UNIT:
        return "unit"
    return type(value).__name__


def slang_eq(a, b) -> bool:
    """Structural equality; values of different types are simply unequal."""
    if type(a) is not type(b):
        return False
    if type(a) is list:
        return len(a) == len(b) and all(slang_eq(x, y) for x, y in zip(a, b))
    if type(a) is tuple:
        return slang_eq(a[0], b[0]) and slang_eq(a[1], b[1])
    return a == b


def legal_actions(game: str) -> tuple[str, ...]:
    return games.IPD_ACTIONS if game == GAME_IPD else games.MOVES


class _ReturnSignal(Exception):
    def __init__(self, value, span: Span):
        self.value = value
        self.span = span


class _Interp:
    def __init__(self, tree: n.Program, env: Bindings, budget: Budget, rng: SplitMix64):
        self.funcs = {d.name: d for d in tree.defs}
        self.env = env
        self.budget = budget
        self.rng = rng
        self.steps = 0
        self.depth = 0
        self.stmt_spans: list[Span] = [tree.span]
        self.ambient = {
            "my_history": list(env.my_history),
            "opp_history": list(env.opp_history),
            "my_source": env.my_source,
            "opp_source": env.opp_source,
            "round_index": env.round_index,
        }

    # -- faults -------------------------------------------------------------

    def fault(self, kind: FaultKind, span: Span, detail: str):
        raise RuntimeFault(kind, span, detail, steps=self.steps)

    def tick(self):
        self.steps += 1
        if self.steps > self.budget.step_limit:
            self.fault(
                FaultKind.STEP_BUDGET,
                self.stmt_spans[-1],
                f"exceeded {self.budget.step_limit} steps",
            )

    # -- execution ------------------------------------------------------------

    def run(self):
        entry = self.funcs[n.ENTRY_POINT]
        value, span = self.call_function(entry, [], entry.span)
        legal = legal_actions(self.env.game)
        if type(value) is not str or value not in legal:
            self.fault(
                FaultKind.INVALID_RETURN,
                span,
                f"strategy returned {_show(value)}, expected one of {list(legal)}",
            )
        return value, self.steps

    def call_function(self, func: n.FuncDef, args: list, call_span: Span):
        self.depth += 1
        if self.depth > self.budget.call_depth_limit:
            self.fault(
                FaultKind.CALL_DEPTH,
                call_span,
                f"exceeded call depth {self.budget.call_depth_limit}",
            )
        frame = dict(zip(func.params, args))
        try:
            self.exec_block(func.body, frame)
        except _ReturnSignal as sig:
            return sig.value, sig.span
        finally:
            self.depth -= 1
        return UNIT, func.span

    def exec_block(self, block: n.Block, frame: dict):
        for stmt in block:
            self.exec_stmt(stmt, frame)

    def exec_stmt(self, stmt: n.Stmt, frame: dict):
        self.stmt_spans.append(stmt.span)
        try:
            self.tick()
            if isinstance(stmt, n.Let) or isinstance(stmt, n.Assign):
                value = self.eval_expr(stmt.value, frame)
                if isinstance(stmt, n.Assign) and stmt.name not in frame:
                    self.fault(
                        FaultKind.TYPE_ERROR,
                        stmt.name_span,
                        f"assignment to unbound variable '{stmt.name}'",
                    )
                frame[stmt.name] = value
            elif isinstance(stmt, n.Return):
                raise _ReturnSignal(self.eval_expr(stmt.value, frame), stmt.span)
            elif isinstance(stmt, n.ExprStmt):
                self.eval_expr(stmt.value, frame)
            elif isinstance(stmt, n.If):
                for cond, body in stmt.arms:
                    if self.eval_condition(cond, frame):
                        self.exec_block(body, frame)
                        return
                if stmt.orelse is not None:
                    self.exec_block(stmt.orelse, frame)
            elif isinstance(stmt, n.While):
                while self.eval_condition(stmt.cond, frame):
                    self.exec_block(stmt.body, frame)
                    self.tick()
            elif isinstance(stmt, n.For):
                iterable = self.eval_expr(stmt.iterable, frame)
                if type(iterable) is not list:
                    self.fault(
                        FaultKind.TYPE_ERROR,
                        stmt.iterable.span,
                        f"for-in expects a list, got {type_name(iterable)}",
                    )
                for item in iterable:
                    frame[stmt.var] = item
                    self.exec_block(stmt.body, frame)
                    self.tick()
            else:  # pragma: no cover - statements are exhaustive
                raise TypeError(f"unknown statement {stmt!r}")
        finally:
            self.stmt_spans.pop()

    def eval_condition(self, expr: n.Expr, frame: dict) -> bool:
        value = self.eval_expr(expr, frame)
        if type(value) is not bool:
            self.fault(
                FaultKind.TYPE_ERROR,
                expr.span,
                f"condition must be boolean, got {type_name(value)}",
            )
        return value

    # -- expressions --------------------------------------------------------

    def eval_expr(self, expr: n.Expr, frame: dict):
        self.tick()
        if isinstance(expr, n.IntLit):
            return self.check_int_cap(expr.value, expr.span)
        if isinstance(expr, (n.StrLit, n.BoolLit)):
            return expr.value
        if isinstance(expr, n.Var):
            if expr.name in frame:
                return frame[expr.name]
            if expr.name in self.ambient:
                return self.ambient[expr.name]
            self.fault(
                FaultKind.TYPE_ERROR, expr.span, f"unbound variable '{expr.name}'"
            )
        if isinstance(expr, n.ListLit):
            items = [self.eval_expr(item, frame) for item in expr.items]
            return self.check_list_cap(items, expr.span)
        if isinstance(expr, n.PairLit):
            return (self.eval_expr(expr.first, frame), self.eval_expr(expr.second, frame))
        if isinstance(expr, n.Unary):
            return self.eval_unary(expr, frame)
        if isinstance(expr, n.Binary):
            return self.eval_binary(expr, frame)
        if isinstance(expr, n.Index):
            return self.eval_index(expr, frame)
        if isinstance(expr, n.Call):
            return self.eval_call(expr, frame)
        raise TypeError(f"unknown expression {expr!r}")  # pragma: no cover

    def check_list_cap(self, items: list, span: Span) -> list:
        if len(items) > self.budget.list_length_cap:
            self.fault(
                FaultKind.TYPE_ERROR,
                span,
                f"list length cap {self.budget.list_length_cap} exceeded",
            )
        return items

    def check_int_cap(self, value: int, span: Span) -> int:
        if value.bit_length() > MAX_INT_BITS:
            self.fault(
                FaultKind.TYPE_ERROR,
                span,
                f"integer magnitude cap (2^{MAX_INT_BITS}) exceeded",
            )
        return value

    def eval_unary(self, expr: n.Unary, frame: dict):
        value = self.eval_expr(expr.operand, frame)
        if expr.op == "-":
            if type(value) is not int:
                self.fault(
                    FaultKind.TYPE_ERROR,
                    expr.span,
                    f"unary '-' needs an integer, got {type_name(value)}",
                )
            return -value
        if type(value) is not bool:
            self.fault(
                FaultKind.TYPE_ERROR,
                expr.span,
                f"'not' needs a boolean, got {type_name(value)}",
            )
        return not value

    def eval_binary(self, expr: n.Binary, frame: dict):
        op = expr.op
        if op in ("and", "or"):
            left = self.eval_expr(expr.left, frame)
            if type(left) is not bool:
                self.fault(
                    FaultKind.TYPE_ERROR,
                    expr.left.span,
                    f"'{op}' needs booleans, got {type_name(left)}",
                )
            if (op == "and" and not left) or (op == "or" and left):
                return left
            right = self.eval_expr(expr.right, frame)
            if type(right) is not bool:
                self.fault(
                    FaultKind.TYPE_ERROR,
                    expr.right.span,
                    f"'{op}' needs booleans, got {type_name(right)}",
                )
            return right

        left = self.eval_expr(expr.left, frame)
        right = self.eval_expr(expr.right, frame)
        if op == "==":
            return slang_eq(left, right)
        if op == "!=":
            return not slang_eq(left, right)
        if op == "+":
            if type(left) is int and type(right) is int:
                return self.check_int_cap(left + right, expr.span)
            if type(left) is str and type(right) is str:
                if len(left) + len(right) > MAX_STRING_LENGTH:
                    self.fault(
                        FaultKind.TYPE_ERROR,
                        expr.span,
                        f"string length cap {MAX_STRING_LENGTH} exceeded",
                    )
                return left + right
            if type(left) is list and type(right) is list:
                return self.check_list_cap(left + right, expr.span)
            self.fault(
                FaultKind.TYPE_ERROR,
                expr.span,
                f"'+' cannot combine {type_name(left)} and {type_name(right)}",
            )
        if op in ("-", "*", "/", "%", "<", "<=", ">", ">="):
            if type(left) is not int or type(right) is not int:
                self.fault(
                    FaultKind.TYPE_ERROR,
                    expr.span,
                    f"'{op}' needs integers, got {type_name(left)} and {type_name(right)}",
                )
            if op == "-":
                return self.check_int_cap(left - right, expr.span)
            if op == "*":
                return self.check_int_cap(left * right, expr.span)
            if op == "/":
                if right == 0:
                    self.fault(FaultKind.DIV_ZERO, expr.span, "division by zero")
                return left // right
            if op == "%":
                if right == 0:
                    self.fault(FaultKind.DIV_ZERO, expr.span, "modulo by zero")
                return left % right
            if op == "<":
                return left < right
            if op == "<=":
                return left <= right
            if op == ">":
                return left > right
            return left >= right
        raise TypeError(f"unknown operator {op!r}")  # pragma: no cover

    def eval_index(self, expr: n.Index, frame: dict):
        base = self.eval_expr(expr.base, frame)
        index = self.eval_expr(expr.index, frame)
        if type(index) is not int:
            self.fault(
                FaultKind.TYPE_ERROR,
                expr.index.span,
                f"index must be an integer, got {type_name(index)}",
            )
        if type(base) not in (list, str, tuple):
            self.fault(
                FaultKind.TYPE_ERROR,
                expr.span,
                f"cannot index into {type_name(base)}",
            )
        try:
            return base[index]
        except IndexError:
            self.fault(
                FaultKind.INDEX_RANGE,
                expr.span,
                f"index {index} out of range for length {len(base)}",
            )

    def eval_call(self, expr: n.Call, frame: dict):
        args = [self.eval_expr(a, frame) for a in expr.args]
        func = self.funcs.get(expr.name)
        if func is not None:
            value, _ = self.call_function(func, args, expr.name_span)
            return value
        if expr.name in BUILTINS:
            return self.call_builtin(expr, args)
        self.fault(
            FaultKind.TYPE_ERROR, expr.name_span, f"unknown function '{expr.name}'"
        )

    def call_builtin(self, expr: n.Call, args: list):
        name = expr.name
        span = expr.span

        def need(cond: bool, detail: str):
            if not cond:
                self.fault(FaultKind.TYPE_ERROR, span, detail)

        if name == "len":
            need(type(args[0]) in (list, str), "len needs a list or string")
            return len(args[0])
        if name == "last":
            xs, k = args
            need(type(xs) is list, "last needs a list")
            need(type(k) is int and k >= 0, "last needs a non-negative count")
            return xs[-k:] if k > 0 else []
        if name == "count":
            xs, v = args
            need(type(xs) is list, "count needs a list")
            return sum(1 for item in xs if slang_eq(item, v))
        if name == "contains":
            s, sub = args
            need(type(s) is str and type(sub) is str, "contains needs two strings")
            return sub in s
        if name == "rand_int":
            lo, hi = args
            need(type(lo) is int and type(hi) is int, "rand_int needs integers")
            need(lo <= hi, "rand_int needs lo <= hi")
            return self.rng.rand_int(lo, hi)
        if name == "choice":
            xs = args[0]
            need(type(xs) is list, "choice needs a list")
            if not xs:
                self.fault(FaultKind.INDEX_RANGE, span, "choice on an empty list")
            return xs[self.rng.rand_below(len(xs))]

        view = self.env.coin_view
        assert view is not None  # validated: coin builtins imply a coin view
        if name == "my_pos":
            return view.my_pos
        if name == "opp_pos":
            return view.opp_pos
        if name == "my_coin":
            return view.my_coin
        if name == "opp_coin":
            return view.opp_coin
        if name == "board_size":
            return view.board_size
        if name == "wrap_dist":
            p, q = args
            need(_is_position(p) and _is_position(q), "wrap_dist needs two positions")
            return games.wrap_distance(p, q, view.board_size)
        if name == "adjacent":
            p = args[0]
            need(_is_position(p), "adjacent needs a position")
            return [(move, pos) for move, pos in games.adjacent(p, view.board_size)]
        raise TypeError(f"unknown builtin {name!r}")  # pragma: no cover


def _is_position(v) -> bool:
    return type(v) is tuple and type(v[0]) is int and type(v[1]) is int


def _show(value) -> str:
    if value is UNIT:
        return "unit"
    if type(value) is bool:
        return "true" if value else "false"
    return repr(value)


def evaluate(
    tree: n.Program,
    env: Bindings,
    budget: Budget = Budget(),
    rng: SplitMix64 | None = None,
):
    """Run a program's strategy once.

    Returns (value, steps used) or raises RuntimeFault.  The rng advances by
    exactly the number of draws the program performs.
    """
    if rng is None:
        rng = SplitMix64(0)
    from ._stack import stack_headroom

    with stack_headroom():
        return _Interp(tree, env, budget, rng).run()
