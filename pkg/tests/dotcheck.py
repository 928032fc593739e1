"""A standalone acceptor for the DOT graph language, used to vet emitted text.

Follows the language's reference grammar (graph, stmt_list, node/edge/attr statements,
attr_list, subgraph) closely enough to reject anything structurally wrong,
without depending on the package under test or on graphviz being installed.
"""

from __future__ import annotations

import re

_TOKENS = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<edgeop>->|--)
  | (?P<punct>[{}\[\];,:=])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<number>-?(?:\.\d+|\d+(?:\.\d*)?))
  | (?P<name>[A-Za-z_-￿][A-Za-z0-9_-￿]*)
    """,
    re.VERBOSE | re.DOTALL,
)

_KEYWORDS = {"graph", "digraph", "subgraph", "node", "edge", "strict"}


class DotSyntaxError(Exception):
    pass


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if m is None:
            raise DotSyntaxError(f"lexical error at offset {pos}: {text[pos:pos+10]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "edgeop":
            tokens.append(("edgeop", m.group(0)))
        elif kind == "punct":
            tokens.append((m.group(0), m.group(0)))
        else:
            tokens.append(("id", m.group(0)))
    return tokens


class _Checker:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.directed = None

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, expected=None):
        kind, value = self.peek()
        if kind is None:
            raise DotSyntaxError(f"unexpected end of input (wanted {expected})")
        if expected is not None and kind != expected:
            raise DotSyntaxError(f"expected {expected!r}, got {value!r}")
        self.pos += 1
        return kind, value

    def accept(self, expected):
        if self.peek()[0] == expected:
            self.pos += 1
            return True
        return False

    def check(self):
        kind, value = self.take("id")
        if value == "strict":
            kind, value = self.take("id")
        if value not in ("graph", "digraph"):
            raise DotSyntaxError(f"expected 'graph' or 'digraph', got {value!r}")
        self.directed = value == "digraph"
        if self.peek()[0] == "id":
            self.take("id")
        self.take("{")
        self.stmt_list()
        self.take("}")
        if self.peek()[0] is not None:
            raise DotSyntaxError(f"trailing input: {self.peek()[1]!r}")

    def stmt_list(self):
        while True:
            kind, value = self.peek()
            if kind in (None, "}"):
                return
            self.stmt()
            self.accept(";")

    def stmt(self):
        kind, value = self.peek()
        if kind == "id" and value in ("graph", "node", "edge"):
            self.take("id")
            self.attr_list(required=True)
            return
        if kind == "id" and value == "subgraph" or kind == "{":
            self.endpoint()
            self.edge_rhs()
            return
        if kind != "id":
            raise DotSyntaxError(f"unexpected token {value!r} in statement position")
        self.take("id")
        if self.accept("="):
            self.take("id")
            return
        self.port()
        self.edge_rhs()

    def endpoint(self):
        kind, value = self.peek()
        if kind == "id" and value == "subgraph":
            self.take("id")
            if self.peek()[0] == "id":
                self.take("id")
            self.take("{")
            self.stmt_list()
            self.take("}")
        elif kind == "{":
            self.take("{")
            self.stmt_list()
            self.take("}")
        else:
            self.take("id")
            self.port()

    def port(self):
        if self.accept(":"):
            self.take("id")
            if self.accept(":"):
                self.take("id")

    def edge_rhs(self):
        saw_edge = False
        while self.peek()[0] == "edgeop":
            _, op = self.take("edgeop")
            if self.directed and op != "->":
                raise DotSyntaxError("undirected edge in a digraph")
            if not self.directed and op != "--":
                raise DotSyntaxError("directed edge in a graph")
            self.endpoint()
            saw_edge = True
        self.attr_list(required=False)
        return saw_edge

    def attr_list(self, required):
        if self.peek()[0] != "[":
            if required:
                # bare `graph/node/edge` with no list is tolerated by dot
                return
            return
        while self.accept("["):
            while self.peek()[0] == "id":
                self.take("id")
                if self.accept("="):
                    self.take("id")
                if self.peek()[0] in (",", ";"):
                    self.take()
            self.take("]")


def check_dot(text: str) -> None:
    """Raise DotSyntaxError unless text is a syntactically valid DOT graph."""
    _Checker(text).check()
