"""Recursion-limit headroom for tree walks.

The parser enforces hard caps on program nesting, but walking even a
capped tree can take a dozen host stack frames per level; this guard makes
sure the interpreter's recursion limit never turns a legal (or about-to-be
-rejected) program into an ungraceful host error.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager


@contextmanager
def stack_headroom(limit: int = 10_000):
    previous = sys.getrecursionlimit()
    if previous < limit:
        sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        sys.setrecursionlimit(previous)
