"""Reading and writing the PGSolver game and solution formats.

Game files::

    parity <maxid>;
    <id> <priority> <owner> <succ>(,<succ>)* ["name"];

Solution files::

    paritysol <maxid>;
    <id> <winner> [<strategy successor>];

Owners and winners use 0 for Even and 1 for Odd.  The header is optional on
input; when present its ``maxid`` must equal the largest node id and ids must
be dense.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DanglingEdge, DuplicateNode, PGSyntaxError
from .game import ParityGame, Player, build_game

_INT = re.compile(r"-?\d+")
_GAME_LINE = re.compile(
    r"""^\s*(?P<id>\d+)\s+(?P<prio>\d+)\s+(?P<owner>[01])\s+
        (?P<succ>\d+(?:\s*,\s*\d+)*)
        \s*(?:"(?P<name>(?:[^"\\]|\\.)*)")?\s*;\s*$""",
    re.VERBOSE,
)
_SOL_LINE = re.compile(r"^\s*(?P<id>\d+)\s+(?P<winner>[01])(?:\s+(?P<strat>\d+))?\s*;\s*$")


def _lines(text: str):
    for lineno, line in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        if line.strip():
            yield lineno, line


def _header(line: str, keyword: str, lineno: int):
    m = re.match(rf"^\s*{keyword}\s+(\d+)\s*;\s*$", line)
    if m is None:
        raise PGSyntaxError(f"malformed {keyword!r} header", lineno)
    return int(m.group(1))


def parse_pgsolver(text: str) -> ParityGame:
    rows: dict[int, tuple] = {}
    maxid = None
    first = True
    for lineno, line in _lines(text):
        if first and line.lstrip().startswith("parity"):
            maxid = _header(line, "parity", lineno)
            first = False
            continue
        first = False
        m = _GAME_LINE.match(line)
        if m is None:
            raise PGSyntaxError(f"cannot parse node line {line.strip()!r}", lineno)
        v = int(m.group("id"))
        if v in rows:
            raise DuplicateNode(f"line {lineno}: node {v} defined twice")
        succ = [int(s) for s in _INT.findall(m.group("succ"))]
        name = m.group("name")
        if name is not None:
            name = re.sub(r"\\(.)", r"\1", name)
        rows[v] = (int(m.group("prio")), int(m.group("owner")), succ, name, lineno)
    if not rows:
        raise PGSyntaxError("no nodes", None)
    top = max(rows)
    if maxid is not None and maxid != top:
        raise PGSyntaxError(f"header declares maxid {maxid} but largest id is {top}", 1)
    missing = [v for v in range(top + 1) if v not in rows]
    if missing:
        raise PGSyntaxError(f"node ids are not dense: {missing[0]} is missing", None)
    for v, (_, _, succ, _, lineno) in rows.items():
        for w in succ:
            if w > top:
                raise DanglingEdge(f"line {lineno}: node {v} has undefined successor {w}")
    return build_game([rows[v][:4] for v in range(top + 1)])


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_pgsolver(g: ParityGame) -> str:
    out = [f"parity {g.n - 1};"]
    for v in range(g.n):
        line = f"{v} {int(g.priority[v])} {int(g.owner[v])} " + ",".join(map(str, g.successors(v)))
        if g.names is not None and g.names[v] is not None:
            line += " " + _quote(g.names[v])
        out.append(line + ";")
    return "\n".join(out) + "\n"


@dataclass
class Solution:
    """Contents of a solution file: a winner and optional move per node."""

    winner: list[Player]
    strategy: dict[int, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.winner)

    def region(self, player: Player) -> set[int]:
        return {v for v, w in enumerate(self.winner) if w == player}


def write_solution(result) -> str:
    """Serialise a :class:`~fpiter.core.SolveResult`.

    A strategy successor is written for every node whose owner is the winner
    and whose owner's strategy is defined there.
    """
    n = result.w_even.universe
    out = [f"paritysol {n - 1};"]
    for v in range(n):
        if v in result.w_even:
            move = result.strategy_even.get(v)
            winner = 0
        else:
            move = result.strategy_odd.get(v)
            winner = 1
        out.append(f"{v} {winner};" if move is None else f"{v} {winner} {move};")
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> Solution:
    rows: dict[int, tuple] = {}
    maxid = None
    first = True
    for lineno, line in _lines(text):
        if first and line.lstrip().startswith("paritysol"):
            maxid = _header(line, "paritysol", lineno)
            first = False
            continue
        first = False
        m = _SOL_LINE.match(line)
        if m is None:
            raise PGSyntaxError(f"cannot parse solution line {line.strip()!r}", lineno)
        v = int(m.group("id"))
        if v in rows:
            raise DuplicateNode(f"line {lineno}: node {v} listed twice")
        strat = m.group("strat")
        rows[v] = (Player(int(m.group("winner"))), None if strat is None else int(strat))
    if not rows:
        raise PGSyntaxError("empty solution", None)
    top = max(rows)
    if maxid is not None and maxid != top:
        raise PGSyntaxError(f"header declares maxid {maxid} but largest id is {top}", 1)
    if len(rows) != top + 1:
        missing = next(v for v in range(top + 1) if v not in rows)
        raise PGSyntaxError(f"node ids are not dense: {missing} is missing", None)
    sol = Solution([rows[v][0] for v in range(top + 1)])
    sol.strategy = {v: s for v, (_, s) in rows.items() if s is not None}
    return sol
