"""Source transforms: comment stripping, masking and obfuscation.

Masking renames helper functions to generic labels (fn_1, fn_2, ...) while
the entry point keeps its required name.  Obfuscation renames every user
identifier (helper functions, parameters, locals, loop variables) to random
strings over the two glyphs I and l, consistently within each scope.
Builtins and ambient bindings are never touched, so a renamed program
validates and behaves exactly like the original.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rng import SplitMix64
from .slang import nodes as n
from .slang.tokens import SourceText, Token, TokenKind, tokenize
from .slang.validator import RESERVED_NAMES

GLOBAL_SCOPE = "<global>"

_OBFUSCATION_GLYPHS = "Il"
_OBFUSCATION_MIN_LEN = 12
_OBFUSCATION_MAX_LEN = 20


@dataclass(frozen=True)
class RenameMap:
    """Scoped identifier renames; scope is a function name or GLOBAL_SCOPE."""

    entries: tuple[tuple[str, str, str], ...]  # (scope, original, renamed)

    def scope(self, scope: str) -> dict[str, str]:
        return {orig: new for s, orig, new in self.entries if s == scope}

    def is_injective(self) -> bool:
        by_scope: dict[str, set[str]] = {}
        for scope, _, new in self.entries:
            seen = by_scope.setdefault(scope, set())
            if new in seen:
                return False
            seen.add(new)
        return True


def strip_comments(src: SourceText | str) -> SourceText:
    """Remove comment tokens; every other token survives unchanged."""
    if not isinstance(src, SourceText):
        src = SourceText(src)
    comments = [t for t in tokenize(src) if t.kind is TokenKind.COMMENT]
    text = src.text
    for tok in reversed(comments):
        text = text[: tok.span.start] + text[tok.span.end :]
    return SourceText(text, origin=src.origin)


def _fresh_obfuscated(rng: SplitMix64, used: set[str]) -> str:
    while True:
        length = rng.rand_int(_OBFUSCATION_MIN_LEN, _OBFUSCATION_MAX_LEN)
        name = "".join(
            _OBFUSCATION_GLYPHS[rng.rand_below(2)] for _ in range(length)
        )
        if name not in used and name not in RESERVED_NAMES:
            used.add(name)
            return name


def _apply_renames(
    tree: n.Program, func_map: dict[str, str], local_maps: dict[str, dict[str, str]]
) -> n.Program:
    def rename_expr(expr: n.Expr, locals_map: dict[str, str]) -> n.Expr:
        if isinstance(expr, n.Var):
            return n.replace(expr, name=locals_map.get(expr.name, expr.name))
        if isinstance(expr, n.Unary):
            return n.replace(expr, operand=rename_expr(expr.operand, locals_map))
        if isinstance(expr, n.Binary):
            return n.replace(
                expr,
                left=rename_expr(expr.left, locals_map),
                right=rename_expr(expr.right, locals_map),
            )
        if isinstance(expr, n.Call):
            return n.replace(
                expr,
                name=func_map.get(expr.name, expr.name),
                args=tuple(rename_expr(a, locals_map) for a in expr.args),
            )
        if isinstance(expr, n.Index):
            return n.replace(
                expr,
                base=rename_expr(expr.base, locals_map),
                index=rename_expr(expr.index, locals_map),
            )
        if isinstance(expr, n.ListLit):
            return n.replace(
                expr, items=tuple(rename_expr(i, locals_map) for i in expr.items)
            )
        if isinstance(expr, n.PairLit):
            return n.replace(
                expr,
                first=rename_expr(expr.first, locals_map),
                second=rename_expr(expr.second, locals_map),
            )
        return expr

    def rename_block(block: n.Block, locals_map: dict[str, str]) -> n.Block:
        out = []
        for stmt in block:
            if isinstance(stmt, (n.Let, n.Assign)):
                out.append(
                    n.replace(
                        stmt,
                        name=locals_map.get(stmt.name, stmt.name),
                        value=rename_expr(stmt.value, locals_map),
                    )
                )
            elif isinstance(stmt, n.If):
                arms = tuple(
                    (rename_expr(c, locals_map), rename_block(b, locals_map))
                    for c, b in stmt.arms
                )
                orelse = (
                    rename_block(stmt.orelse, locals_map)
                    if stmt.orelse is not None
                    else None
                )
                out.append(n.replace(stmt, arms=arms, orelse=orelse))
            elif isinstance(stmt, n.While):
                out.append(
                    n.replace(
                        stmt,
                        cond=rename_expr(stmt.cond, locals_map),
                        body=rename_block(stmt.body, locals_map),
                    )
                )
            elif isinstance(stmt, n.For):
                out.append(
                    n.replace(
                        stmt,
                        var=locals_map.get(stmt.var, stmt.var),
                        iterable=rename_expr(stmt.iterable, locals_map),
                        body=rename_block(stmt.body, locals_map),
                    )
                )
            elif isinstance(stmt, (n.Return, n.ExprStmt)):
                out.append(n.replace(stmt, value=rename_expr(stmt.value, locals_map)))
            else:  # pragma: no cover
                raise TypeError(f"unknown statement {stmt!r}")
        return tuple(out)

    defs = []
    for d in tree.defs:
        locals_map = local_maps.get(d.name, {})
        defs.append(
            n.replace(
                d,
                name=func_map.get(d.name, d.name),
                params=tuple(locals_map.get(p, p) for p in d.params),
                body=rename_block(d.body, locals_map),
            )
        )
    return n.replace(tree, defs=tuple(defs))


def mask(tree: n.Program, rng: SplitMix64 | None = None) -> tuple[n.Program, RenameMap]:
    """Rename helper functions to fn_1, fn_2, ... (the entry point is kept).

    Deterministic; the rng parameter is accepted for interface symmetry with
    obfuscate but unused.
    """
    del rng
    func_map: dict[str, str] = {}
    counter = 0
    for d in tree.defs:
        if d.name != n.ENTRY_POINT:
            counter += 1
            func_map[d.name] = f"fn_{counter}"
    renamed = _apply_renames(tree, func_map, {})
    entries = tuple((GLOBAL_SCOPE, orig, new) for orig, new in func_map.items())
    return renamed, RenameMap(entries)


def obfuscate(tree: n.Program, rng: SplitMix64) -> tuple[n.Program, RenameMap]:
    """Rename every user identifier to a random I/l string of length 12-20."""
    used: set[str] = set()
    entries: list[tuple[str, str, str]] = []

    func_map: dict[str, str] = {}
    for d in tree.defs:
        if d.name != n.ENTRY_POINT:
            func_map[d.name] = _fresh_obfuscated(rng, used)
            entries.append((GLOBAL_SCOPE, d.name, func_map[d.name]))

    local_maps: dict[str, dict[str, str]] = {}
    for d in tree.defs:
        locals_map: dict[str, str] = {}
        names: list[str] = list(d.params)
        for stmt in n.walk_stmts(d.body):
            if isinstance(stmt, n.Let):
                names.append(stmt.name)
            elif isinstance(stmt, n.For):
                names.append(stmt.var)
        for name in names:
            if name not in locals_map:
                locals_map[name] = _fresh_obfuscated(rng, used)
                entries.append((d.name, name, locals_map[name]))
        local_maps[d.name] = locals_map

    renamed = _apply_renames(tree, func_map, local_maps)
    return renamed, RenameMap(tuple(entries))
