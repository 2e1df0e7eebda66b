"""Positional strategies from a recorded fixpoint run.

During the run every evaluation of the modal step pushes, for each Even node
it includes and each Odd node it excludes, the current ``count`` together with
the successor that justified the verdict.  :func:`extract_strategies` then
walks the game from the end of the run backwards in time, discarding
decisions that are later than the moment it has reached.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .core import SolveResult, SolverConfig, Timestamp, _result, later_than, run_driver
from .errors import ExtractionStuck
from .game import NodeSet, ParityGame, Player


@dataclass(frozen=True)
class Decision:
    stamp: Timestamp
    target: int


class DecisionStacks:
    """One stack of :class:`Decision` per node; the top is the latest push."""

    def __init__(self, n: int):
        self._stacks: list[list[Decision]] = [[] for _ in range(n)]

    @property
    def n(self) -> int:
        return len(self._stacks)

    def push(self, v: int, stamp: Timestamp, target: int):
        stack = self._stacks[v]
        if stack and not stamp > stack[-1].stamp:
            raise AssertionError(f"node {v}: stamp {stamp} not after {stack[-1].stamp}")
        stack.append(Decision(Timestamp(stamp), int(target)))

    def __getitem__(self, v: int) -> list[Decision]:
        return self._stacks[v]

    def top(self, v: int) -> Optional[Decision]:
        stack = self._stacks[v]
        return stack[-1] if stack else None

    def copy(self) -> "DecisionStacks":
        other = DecisionStacks(self.n)
        other._stacks = [list(s) for s in self._stacks]
        return other

    def __len__(self):
        return sum(len(s) for s in self._stacks)


def _record(g: ParityGame, x, count, stacks: DecisionStacks, player: Player) -> NodeSet:
    bank = np.asarray([s.mask if isinstance(s, NodeSet) else s for s in x], dtype=np.bool_)
    result, witness = K.psi_witness_numpy(g.owner, g.priority, g.ptr, g.succ, bank)
    stamp = Timestamp(count)
    mine = g.owner == int(player)
    for v in np.flatnonzero(mine & (witness >= 0)).tolist():
        stacks.push(v, stamp, int(witness[v]))
    return NodeSet(result & mine)


def diamond_recording(g: ParityGame, x, count, stacks: DecisionStacks) -> NodeSet:
    """Diamond, pushing ``(count, t)`` for every included Even node.

    ``t`` is the first successor, in stored order, lying in ``X[prio(t)]``.
    """
    return _record(g, x, count, stacks, Player.EVEN)


def box_recording(g: ParityGame, x, count, stacks: DecisionStacks) -> NodeSet:
    """Box, pushing ``(count, t)`` for every excluded Odd node.

    ``t`` is the first successor, in stored order, outside ``X[prio(t)]``.
    """
    return _record(g, x, count, stacks, Player.ODD)


@dataclass
class ExtractionState:
    stacks: DecisionStacks
    sigma: dict[int, int] = field(default_factory=dict)
    last: dict[int, Timestamp] = field(default_factory=dict)
    visited: set = field(default_factory=set)


def strip(player: Player, v: int, c: Timestamp, state: ExtractionState) -> bool:
    """Drop decisions at ``v`` later than ``c`` for ``player``.

    True if something was dropped, or if ``v`` has no move yet and still has
    decisions left (the first visit must always assign).
    """
    stack = state.stacks[v]
    before = len(stack)
    stack[:] = [dec for dec in stack if not later_than(dec.stamp, c, player)]
    if len(stack) < before:
        return True
    return v not in state.sigma and bool(stack)


def _consume(c: Timestamp, h: int, top: int) -> Timestamp:
    """Credit left after passing a node of priority ``h``."""
    lv = list(c.levels())
    lv[h] = max(lv[h] - 1, 0)
    lv[:h] = [top] * h
    return Timestamp.from_levels(lv)


def _certified(stamp: Timestamp, q: int, top: int) -> Timestamp:
    """Credit at which the evaluation at ``stamp`` read ``X_q``.

    Higher variables hold their value at ``stamp``; ``X_0`` still holds the
    result of the previous evaluation.  Entries below ``q`` are irrelevant.
    """
    lv = list(stamp.levels())
    if q == 0:
        lv[0] -= 1
    lv[:q] = [top] * q
    return Timestamp.from_levels(lv)


def _project(c: Timestamp, player: Player, top: int) -> Timestamp:
    # entries the player's order ignores are pinned, so they do not split visited states
    lv = [top if h % 2 == int(player) else x for h, x in enumerate(c.levels())]
    return Timestamp.from_levels(lv)


def _traverse(g: ParityGame, player: Player, root: int, credit: Timestamp,
              state: ExtractionState, region: NodeSet, top: int):
    work = [(root, credit)]
    while work:
        v, c = work.pop()
        c = _project(c, player, top)
        if (v, c) in state.visited:
            continue
        state.visited.add((v, c))
        h = int(g.priority[v])
        rest = _consume(c, h, top)
        if g.owner[v] == int(player):
            # a decision stamped E certifies v at E for priority 0, and one
            # step later in c_h for higher priorities
            if strip(player, v, rest if h else c, state):
                dec = state.stacks.top(v)
                if dec is None:
                    if v in region:
                        raise ExtractionStuck(f"all decisions of node {v} were stripped at {c}")
                    continue
                state.sigma[v] = dec.target
                state.last[v] = dec.stamp
                work.append((dec.target, _certified(dec.stamp, int(g.priority[dec.target]), top)))
        else:
            for u in reversed(g.successors(v)):
                work.append((u, rest))


def extract_strategies(g: ParityGame, stacks: DecisionStacks, regions: tuple[NodeSet, NodeSet],
                       top: Optional[int] = None) -> tuple[dict[int, int], dict[int, int]]:
    """Positional strategies for both players on their winning regions.

    ``top`` is the counter value of the initial credit; it defaults to
    ``n + 2``, above every recorded counter value.
    """
    if top is None:
        top = g.n + 2
    credit = Timestamp.full(g.d, top)
    out = []
    for player, region in zip((Player.EVEN, Player.ODD), regions):
        state = ExtractionState(stacks.copy())
        todo = [v for v in region if g.owner[v] == int(player)]
        for v in todo:
            if v in state.sigma:
                continue
            if not state.stacks[v]:
                raise ExtractionStuck(f"node {v} won by {player} has no recorded decision")
            state.visited = set()
            _traverse(g, player, v, credit, state, region, top)
        out.append({v: state.sigma[v] for v in todo})
    return out[0], out[1]


def record_run(g: ParityGame, backend: Optional[str] = None,
               snapshot_budget: Optional[int] = None) -> tuple[SolveResult, DecisionStacks, list]:
    """Baseline fixpoint run with decision recording.

    Returns the regions, the decision stacks and the raw event list
    ``(node, stamp, target, operator)`` in recording order.
    """
    cfg = SolverConfig() if snapshot_budget is None else SolverConfig(snapshot_budget=snapshot_budget)
    t0 = time.perf_counter()
    out = run_driver(g, cfg, record=True, backend=backend)
    result = _result(g, out, cfg, time.perf_counter() - t0)
    stacks = DecisionStacks(g.n)
    events = []
    for v, t, k in out.events:
        stamp = out.stamps[k]
        stacks.push(v, stamp, t)
        events.append((v, stamp, t, "diamond" if g.owner[v] == 0 else "box"))
    return result, stacks, events


def solve_with_strategies(g: ParityGame, backend: Optional[str] = None) -> SolveResult:
    result, stacks, _ = record_run(g, backend=backend)
    t0 = time.perf_counter()
    result.strategy_even, result.strategy_odd = extract_strategies(g, stacks, (result.w_even, result.w_odd))
    result.stats.wall_time += time.perf_counter() - t0
    result.stats.solver_variant = "baseline+strategies"
    return result


def trace_records(events, final_count: Timestamp, stats) -> list[str]:
    """JSON lines for a recorded run: one per decision, then a summary."""
    lines = [json.dumps({"node": v, "stamp": list(stamp), "target": t, "operator": op})
             for v, stamp, t, op in events]
    lines.append(json.dumps({"final_count": list(final_count),
                             "outer_iterations": stats.outer_iterations,
                             "per_level_iterations": stats.per_level_iterations}))
    return lines
