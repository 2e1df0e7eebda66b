"""Independent oracles for checking the fixpoint solver.

* the finite credit ("pay-off") game, solved by backward induction and by the
  recursive per-priority characterisation;
* brute-force enumeration of positional strategies;
* a recursive attractor-based reference solver;
* a checker for positional strategies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .core import SolveResult, SolveStats, Timestamp
from .errors import ResourceLimit, TerminalConfig
from .game import NodeSet, ParityGame, Player

DEFAULT_CONFIG_BUDGET = 10**7
DEFAULT_STRATEGY_BUDGET = 10**6


# ---------------------------------------------------------------------------
# credit game


@dataclass(frozen=True)
class PayoffConfig:
    node: int
    credit: Timestamp


@dataclass
class PayoffOutcome:
    winner: Player
    play: Optional[list[PayoffConfig]] = None


def step_credit(c: Sequence[int], p: int, n: int) -> Timestamp:
    """Credit after leaving a node of priority ``p``.

    The entry for ``p`` is paid by one, entries above it are kept and entries
    below it are refilled to ``n``.
    """
    c = Timestamp(c)
    if c.at(p) == 0:
        raise TerminalConfig(f"credit for priority {p} is exhausted")
    lv = c.levels()
    out = [n if h < p else lv[h] - 1 if h == p else lv[h] for h in range(len(lv))]
    return Timestamp.from_levels(out)


class PayoffTable:
    """Winners of the credit game for every configuration of one game.

    Entries of a credit range over ``0..top`` (``top`` defaults to ``n``).
    """

    def __init__(self, g: ParityGame, top: Optional[int] = None, d: Optional[int] = None,
                 budget: int = DEFAULT_CONFIG_BUDGET):
        self.g = g
        self.top = g.n if top is None else top
        self.d = g.d if d is None else d
        size = g.n * (self.top + 1) ** self.d
        if size > budget:
            raise ResourceLimit(f"{size} configurations exceed the budget of {budget}")
        self._table = K.payoff_table(g.owner, g.priority, g.ptr, g.succ, self.d, self.top)

    def _code(self, credit: Timestamp) -> int:
        if len(credit) != self.d:
            raise ValueError(f"credit must have {self.d} entries")
        code = 0
        for c in credit:
            if not 0 <= c <= self.top:
                raise ValueError(f"credit entry {c} outside 0..{self.top}")
            code = code * (self.top + 1) + c
        return code

    def even_wins(self, v: int, credit) -> bool:
        return bool(self._table[self._code(Timestamp(credit)), v])

    def winner(self, v: int, credit) -> Player:
        return Player.EVEN if self.even_wins(v, credit) else Player.ODD

    def play(self, v: int, credit) -> list[PayoffConfig]:
        """A play where the winner follows winning moves (first one found)."""
        g = self.g
        credit = Timestamp(credit)
        win = self.winner(v, credit)
        play = [PayoffConfig(v, credit)]
        while credit.at(int(g.priority[v])) != 0:
            nxt = step_credit(credit, int(g.priority[v]), self.top)
            succs = g.successors(v)
            if g.owner_of(v) == win:
                v = next(u for u in succs if self.winner(u, nxt) == win)
            else:
                v = succs[0]
            credit = nxt
            play.append(PayoffConfig(v, credit))
        return play


def payoff_winner(g: ParityGame, start: PayoffConfig, budget: int = DEFAULT_CONFIG_BUDGET,
                  with_play: bool = False) -> PayoffOutcome:
    top = max(g.n, max(start.credit))
    table = PayoffTable(g, top=top, d=len(start.credit), budget=budget)
    winner = table.winner(start.node, start.credit)
    return PayoffOutcome(winner, table.play(start.node, start.credit) if with_play else None)


class SnapshotOracle:
    """Priority-``h`` nodes Even wins from at credit ``c``, computed recursively.

    With ``c(h) = 0`` the answer is every priority-``h`` node if ``h`` is even
    and none otherwise.  Else a node is in iff its owner's quantifier over
    successors holds against the answers at ``c'`` where ``c'(h) = c(h) - 1``,
    higher entries are kept and lower ones are refilled to ``n``.  Results are
    memoised on ``(h, entries from h upwards)``.
    """

    def __init__(self, g: ParityGame, top: Optional[int] = None, d: Optional[int] = None,
                 budget: int = DEFAULT_CONFIG_BUDGET):
        self.g = g
        self.top = g.n if top is None else top
        self.d = g.d if d is None else d
        self.budget = budget
        self._memo: dict[tuple, frozenset] = {}
        self._by_prio = [np.flatnonzero(g.priority == h).tolist() for h in range(self.d)]

    def value(self, h: int, c) -> NodeSet:
        c = Timestamp(c)
        return NodeSet.of(self.g.n, self._value(h, tuple(c[: self.d - h])))

    def _value(self, h: int, prefix: tuple) -> frozenset:
        # explicit stack; recursion depth would be the credit's height
        stack = [(h, prefix)]
        while stack:
            key = stack[-1]
            if key in self._memo:
                stack.pop()
                continue
            kh, kp = key
            if kp[-1] == 0:
                self._memo[key] = frozenset(self._by_prio[kh]) if kh % 2 == 0 else frozenset()
                stack.pop()
                continue
            nxt = kp[:-1] + (kp[-1] - 1,) + (self.top,) * kh
            deps = [(q, nxt[: self.d - q]) for q in range(self.d)]
            missing = [k for k in deps if k not in self._memo]
            if missing:
                if len(self._memo) + len(stack) > self.budget:
                    raise ResourceLimit("snapshot oracle exceeded its budget")
                stack.extend(missing)
                continue
            bank = {q: self._memo[k] for q, k in zip(range(self.d), deps)}
            self._memo[key] = frozenset(v for v in self._by_prio[kh] if self._holds(v, bank))
            stack.pop()
        return self._memo[(h, prefix)]

    def _holds(self, v: int, bank) -> bool:
        g = self.g
        good = (u in bank[int(g.priority[u])] for u in g.successors(v))
        return any(good) if g.owner[v] == 0 else all(good)


def snapshot_value(g: ParityGame, h: int, c, budget: int = DEFAULT_CONFIG_BUDGET) -> NodeSet:
    return SnapshotOracle(g, top=max(g.n, max(c)), d=len(c), budget=budget).value(h, c)


# ---------------------------------------------------------------------------
# brute force


def brute_player(g: ParityGame, player: Player, budget: int = DEFAULT_STRATEGY_BUDGET):
    """Region and strategy of ``player`` by enumerating positional strategies."""
    if g.n > 62:
        raise ResourceLimit("brute force supports at most 62 nodes")
    mask, choice, status = K.brute_player(g.owner, g.priority, g.ptr, g.succ, int(player), budget)
    if status == 1:
        raise ResourceLimit(f"more than {budget} positional strategies for {player}")
    if status == 2:
        raise AssertionError("no positional strategy wins the whole region")
    region = NodeSet([(int(mask) >> v) & 1 == 1 for v in range(g.n)])
    strategy = {v: int(choice[v]) for v in region if g.owner[v] == int(player)}
    return region, strategy


def brute_solve(g: ParityGame, budget: int = DEFAULT_STRATEGY_BUDGET) -> SolveResult:
    w_even, s_even = brute_player(g, Player.EVEN, budget)
    w_odd, s_odd = brute_player(g, Player.ODD, budget)
    if (w_even & w_odd) or len(w_even) + len(w_odd) != g.n:
        raise AssertionError("enumerated regions do not partition the game")
    return SolveResult(w_even, w_odd, s_even, s_odd, SolveStats(solver_variant="brute"))


# ---------------------------------------------------------------------------
# recursive reference solver


def attractor(g: ParityGame, nodes: set, target: set, player: Player):
    """Attractor of ``target`` for ``player`` inside the subgame ``nodes``.

    Returns the attractor and the attracting moves of ``player``'s nodes.
    """
    attr = set(target)
    moves = {}
    remaining = {v: sum(1 for w in g.successors(v) if w in nodes) for v in nodes}
    queue = list(attr)
    while queue:
        w = queue.pop()
        for v in g.predecessors(w):
            if v not in nodes or v in attr:
                continue
            if g.owner[v] == int(player):
                attr.add(v)
                moves[v] = w
                queue.append(v)
            else:
                remaining[v] -= 1
                if remaining[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, moves


def _zielonka(g: ParityGame, nodes: set):
    """Returns ``(regions, strategies)`` indexed by player."""
    if not nodes:
        return [set(), set()], [{}, {}]
    top = max(int(g.priority[v]) for v in nodes)
    me = Player.of_priority(top)
    opp = me.opponent
    heads = {v for v in nodes if g.priority[v] == top}
    a, a_moves = attractor(g, nodes, heads, me)
    w, s = _zielonka(g, nodes - a)
    if not w[opp]:
        strat = dict(s[me])
        strat.update(a_moves)
        for v in heads:
            if g.owner[v] == int(me):
                strat[v] = next(u for u in g.successors(v) if u in nodes)
        regions = [set(), set()]
        regions[me] = set(nodes)
        strategies = [{}, {}]
        strategies[me] = strat
        return regions, strategies
    b, b_moves = attractor(g, nodes, w[opp], opp)
    w2, s2 = _zielonka(g, nodes - b)
    regions = [set(), set()]
    regions[me] = w2[me]
    regions[opp] = w2[opp] | b
    strategies = [{}, {}]
    strategies[me] = dict(s2[me])
    so = dict(s2[opp])
    so.update(b_moves)
    so.update({v: u for v, u in s[opp].items() if v in w[opp]})
    strategies[opp] = so
    return regions, strategies


def reference_solve(g: ParityGame) -> SolveResult:
    regions, strategies = _zielonka(g, set(range(g.n)))
    w_even = NodeSet.of(g.n, regions[Player.EVEN])
    w_odd = NodeSet.of(g.n, regions[Player.ODD])
    s_even = {v: u for v, u in strategies[Player.EVEN].items() if g.owner[v] == 0 and v in w_even}
    s_odd = {v: u for v, u in strategies[Player.ODD].items() if g.owner[v] == 1 and v in w_odd}
    return SolveResult(w_even, w_odd, s_even, s_odd, SolveStats(solver_variant="reference"))


# ---------------------------------------------------------------------------
# strategy checking


@dataclass
class Verdict:
    valid: bool
    reason: str = ""
    node: Optional[int] = None
    cycle: list[int] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def _cycle_through(start: int, adj: dict, allowed: set) -> Optional[list[int]]:
    parent = {}
    queue = [w for w in adj[start] if w in allowed]
    for w in queue:
        parent.setdefault(w, start)
    seen = set(queue)
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        if v == start:
            path = [start]
            cur = parent[start]
            while cur != start:
                path.append(cur)
                cur = parent[cur]
            path.append(start)
            return list(reversed(path))
        for w in adj[v]:
            if w in allowed and w not in seen:
                seen.add(w)
                parent[w] = v
                queue.append(w)
    return None


def verify_positional(g: ParityGame, player: Player, sigma: dict, region) -> Verdict:
    """Check that ``sigma`` wins every play of ``player`` from ``region``."""
    player = Player(player)
    region = set(region)
    for v in sorted(region):
        if g.owner[v] == int(player):
            if v not in sigma:
                return Verdict(False, f"no move at node {v}", v)
            w = sigma[v]
            if w not in g.successors(v):
                return Verdict(False, f"move {v}->{w} is not an edge", v)
            if w not in region:
                return Verdict(False, f"move {v}->{w} leaves the region", v)
        else:
            for w in g.successors(v):
                if w not in region:
                    return Verdict(False, f"opponent escapes the region via {v}->{w}", v)
    adj = {v: [sigma[v]] if g.owner[v] == int(player) else g.successors(v) for v in region}
    opp = 1 - int(player)
    prios = sorted({int(g.priority[v]) for v in region if g.priority[v] % 2 == opp}, reverse=True)
    for q in prios:
        allowed = {v for v in region if g.priority[v] <= q}
        for u in sorted(v for v in allowed if g.priority[v] == q):
            cyc = _cycle_through(u, adj, allowed)
            if cyc is not None:
                # report the cycle starting from its smallest node
                k = cyc.index(min(cyc))
                cyc = cyc[k:-1] + cyc[:k] + [cyc[k]]
                arrow = "->".join(map(str, cyc))
                return Verdict(False, f"opponent closes cycle {arrow} with maximal priority {q}", u, cyc)
    return Verdict(True)
