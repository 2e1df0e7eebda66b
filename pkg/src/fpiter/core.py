"""Solving parity games by nested fixpoint iteration.

Even's winning region is the value of the Walukiewicz formula

    sigma X_{d-1} ... mu X_1 . nu X_0 . Psi(X_{d-1}, ..., X_0)

where ``Psi`` is "Even node with a successor ``t`` in ``X[prio(t)]``" or "Odd
node all of whose successors ``t`` are in ``X[prio(t)]``".  The iteration keeps
one variable per priority and a counter array ``count`` recording how many
approximation steps each variable has taken; ``count`` read from level
``d - 1`` downwards increases lexicographically with every evaluation of Psi.

Two implementations share the semantics: :class:`IterationState` is the
literal, instrumented one (also the numpy fallback) and
:func:`fpiter._kernels.fpiter_driver` the compiled one used by :func:`solve`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .errors import LengthMismatch, ResourceLimit
from .game import NodeSet, ParityGame, Player

DEFAULT_SNAPSHOT_BUDGET = 10**7


class Timestamp(tuple):
    """Counter tuple written most significant first: ``(c_{d-1}, ..., c_0)``.

    Plain tuple comparison is the lexicographic order; :meth:`at` reads the
    counter belonging to a priority.
    """

    __slots__ = ()

    def __new__(cls, counters):
        return super().__new__(cls, (int(c) for c in counters))

    @classmethod
    def from_levels(cls, count) -> "Timestamp":
        """Build from an array indexed by level (level 0 first)."""
        return cls(reversed(list(count)))

    @classmethod
    def full(cls, d: int, value: int) -> "Timestamp":
        return cls([value] * d)

    @property
    def d(self) -> int:
        return len(self)

    def at(self, h: int) -> int:
        return self[len(self) - 1 - h]

    def levels(self) -> list[int]:
        """Counters indexed by level, level 0 first."""
        return list(reversed(self))

    def __repr__(self):
        return "[" + ",".join(map(str, self)) + "]"


def later_than(a: Timestamp, b: Timestamp, player: Player) -> bool:
    """``a >_player b``: compare only the counters of the opponent's parity.

    Even's decisions are ordered by the odd-indexed counters and Odd's by the
    even-indexed ones, highest index first.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"timestamps of lengths {len(a)} and {len(b)}")
    d = len(a)
    start = d - 1 if (d - 1) % 2 != int(player) else d - 2
    for h in range(start, -1, -2):
        x, y = a[d - 1 - h], b[d - 1 - h]
        if x != y:
            return x > y
    return False


@dataclass(frozen=True)
class SolverConfig:
    """Variant switches for the fixpoint iteration.

    ``full_iteration_mode`` runs every level until its counter reaches ``n``
    even after stabilisation; it implies snapshot logging and cannot be
    combined with ``eliminate_resets`` (skipped resets break the
    approximant-per-timestamp reading the mode exists for).
    """

    restrict_to_priority: bool = False
    cache_modal_parts: bool = False
    eliminate_resets: bool = False
    log_snapshots: bool = False
    full_iteration_mode: bool = False
    snapshot_budget: int = DEFAULT_SNAPSHOT_BUDGET
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if self.full_iteration_mode:
            if self.eliminate_resets:
                raise ValueError("full_iteration_mode cannot be combined with eliminate_resets")
            object.__setattr__(self, "log_snapshots", True)

    @property
    def tag(self) -> str:
        parts = [name for name, on in (("restrict", self.restrict_to_priority),
                                       ("cache", self.cache_modal_parts),
                                       ("elim", self.eliminate_resets)) if on]
        tag = "+".join(parts) if parts else "baseline"
        return tag + ("/full" if self.full_iteration_mode else "")

    @classmethod
    def baseline(cls, **kw) -> "SolverConfig":
        return cls(**kw)

    @classmethod
    def optimized(cls, **kw) -> "SolverConfig":
        return cls(restrict_to_priority=True, cache_modal_parts=True, eliminate_resets=True, **kw)

    @classmethod
    def variants(cls) -> dict[str, "SolverConfig"]:
        return {
            "baseline": cls(),
            "restrict": cls(restrict_to_priority=True),
            "cache": cls(cache_modal_parts=True),
            "elim": cls(eliminate_resets=True),
            "all": cls.optimized(),
        }


@dataclass
class SolveStats:
    outer_iterations: int = 0
    per_level_iterations: list[int] = field(default_factory=list)
    wall_time: float = 0.0
    solver_variant: str = "baseline"
    final_count: Optional[Timestamp] = None

    def to_json(self) -> dict:
        return {
            "solver_variant": self.solver_variant,
            "outer_iterations": self.outer_iterations,
            "per_level_iterations": list(self.per_level_iterations),
            "wall_time_ms": self.wall_time * 1000.0,
        }


@dataclass
class SolveResult:
    w_even: NodeSet
    w_odd: NodeSet
    strategy_even: dict[int, int] = field(default_factory=dict)
    strategy_odd: dict[int, int] = field(default_factory=dict)
    stats: SolveStats = field(default_factory=SolveStats)

    def region(self, player: Player) -> NodeSet:
        return self.w_even if player == Player.EVEN else self.w_odd

    def strategy(self, player: Player) -> dict[int, int]:
        return self.strategy_even if player == Player.EVEN else self.strategy_odd

    def winner(self, v: int) -> Player:
        return Player.EVEN if v in self.w_even else Player.ODD


@dataclass
class Snapshot:
    """Variable bank right after the evaluation of Psi at ``stamp``."""

    stamp: Timestamp
    bank: np.ndarray  # (d, n) bool, row i is X_i

    def x(self, i: int) -> NodeSet:
        return NodeSet(self.bank[i])


# ---------------------------------------------------------------------------
# modal operators


def _bank_array(g: ParityGame, x) -> np.ndarray:
    if isinstance(x, np.ndarray):
        bank = x.astype(np.bool_, copy=False)
    else:
        bank = np.array([s.mask if isinstance(s, NodeSet) else s for s in x], dtype=np.bool_)
    if bank.ndim != 2 or bank.shape[1] != g.n:
        raise ValueError("variable bank must have one row of n booleans per level")
    if bank.shape[0] < g.d:
        raise ValueError(f"variable bank needs {g.d} levels, got {bank.shape[0]}")
    return bank


def eval_psi(g: ParityGame, x, backend: Optional[str] = None) -> NodeSet:
    bank = _bank_array(g, x)
    if K.check_backend(backend) == "numba":
        out = np.empty(g.n, dtype=np.bool_)
        K.psi_loop(g.owner, g.priority, g.ptr, g.succ, bank, out)
        return NodeSet(out)
    return NodeSet(K.psi_numpy(g.owner, g.priority, g.ptr, g.succ, bank))


def eval_diamond(g: ParityGame, x) -> NodeSet:
    """Even nodes with some successor ``t`` in ``X[prio(t)]``."""
    return eval_psi(g, x) & g.nodes_of(Player.EVEN)


def eval_box(g: ParityGame, x) -> NodeSet:
    """Odd nodes all of whose successors ``t`` lie in ``X[prio(t)]``."""
    return eval_psi(g, x) & g.nodes_of(Player.ODD)


# ---------------------------------------------------------------------------
# instrumented iteration


Recorder = Callable[["IterationState", np.ndarray], np.ndarray]


class IterationState:
    """Mutable state of one fixpoint run: variables, shadows, counters.

    Shadow rows start out unset; reading one before it was written raises.
    """

    def __init__(self, g: ParityGame, cfg: SolverConfig = SolverConfig(), d: Optional[int] = None):
        self.g = g
        self.cfg = cfg
        self.d = g.d if d is None else d
        if self.d < g.d:
            raise ValueError("d must exceed every priority")
        n = g.n
        self.x = np.zeros((self.d, n), dtype=np.bool_)
        self.x_shadow = np.zeros((self.d, n), dtype=np.bool_)
        self.shadow_set = np.zeros(self.d, dtype=np.bool_)
        self.count = np.zeros(self.d, dtype=np.int64)
        self.high = np.zeros(self.d, dtype=np.int64)
        self.prio_mask = np.zeros((self.d, n), dtype=np.bool_)
        self.prio_mask[g.priority, np.arange(n)] = True
        self.work = np.zeros(n, dtype=np.bool_)
        self.outer = 0
        self.done = False
        self.snapshots: Optional[list[Snapshot]] = [] if cfg.log_snapshots else None
        self._prev: Optional[Timestamp] = None
        # cached per-level Diamond/Box parts and their suffix combinations
        self._dia = np.zeros((self.d, n), dtype=np.bool_)
        self._box = np.ones((self.d, n), dtype=np.bool_)
        self._sdia = np.zeros((self.d + 1, n), dtype=np.bool_)
        self._sbox = np.ones((self.d + 1, n), dtype=np.bool_)
        self._dirty = self.d - 1
        for i in range(self.d - 1, -1, -1):
            self.init_level(i)

    @property
    def timestamp(self) -> Timestamp:
        return Timestamp.from_levels(self.count)

    def shadow(self, i: int) -> np.ndarray:
        if not self.shadow_set[i]:
            raise RuntimeError(f"shadow of X_{i} read before it was assigned")
        return self.x_shadow[i]

    def _set_shadow(self, i: int):
        self.x_shadow[i] = self.x[i]
        self.shadow_set[i] = True

    def _store(self, i: int):
        """X_i gets the latest Psi value (restricted to priority i if asked)."""
        self.x[i] = self.work & self.prio_mask[i] if self.cfg.restrict_to_priority else self.work

    def init_level(self, i: int):
        if i % 2 == 0:
            self.x[i] = self.prio_mask[i] if self.cfg.restrict_to_priority else True
        else:
            self.x[i] = False
        self.count[i] = 0

    def _bump(self, i: int):
        self.count[i] += 1
        self.high[i] = max(self.high[i], self.count[i])

    def _psi(self) -> np.ndarray:
        g = self.g
        if not self.cfg.cache_modal_parts:
            return K.psi_numpy(g.owner, g.priority, g.ptr, g.succ, self.x)
        for i in range(self._dirty, -1, -1):
            self._dia[i], self._box[i] = K.level_parts_numpy(g.priority, g.ptr, g.succ, i, self.x[i])
            self._sdia[i] = self._dia[i] | self._sdia[i + 1]
            self._sbox[i] = self._box[i] & self._sbox[i + 1]
        return np.where(g.owner == 0, self._sdia[0], self._sbox[0])

    def evaluate(self, recorder: Optional[Recorder] = None):
        """One evaluation of Psi into X_0, with ``count[0]`` bumped first."""
        self._bump(0)
        stamp = self.timestamp
        if self._prev is not None and not stamp > self._prev:
            raise AssertionError(f"count did not increase: {self._prev} -> {stamp}")
        self._prev = stamp
        self.outer += 1
        limit = self.cfg.max_iterations
        if limit is not None and self.outer > limit:
            raise ResourceLimit(f"more than {limit} evaluations")
        self._set_shadow(0)
        self.work = recorder(self, self.x) if recorder is not None else self._psi()
        self._store(0)
        self._dirty = 0
        if self.snapshots is not None:
            if len(self.snapshots) >= self.cfg.snapshot_budget:
                raise ResourceLimit(f"snapshot budget {self.cfg.snapshot_budget} exceeded")
            self.snapshots.append(Snapshot(stamp, self.x.copy()))

    def shift_and_reset(self) -> int:
        """Propagate stabilised values upward; return the level reached.

        Sets :attr:`done` when the outermost variable is stable.
        """
        if self.cfg.full_iteration_mode:
            return self._shift_full()
        i = 0
        while i < self.d - 1 and np.array_equal(self.x[i], self.shadow(i)):
            i += 1
            self._bump(i)
            self._set_shadow(i)
            self._store(i)
            if not self.cfg.eliminate_resets:
                self.init_level(i - 1)
        self._dirty = i
        if i == self.d - 1 and np.array_equal(self.x[i], self.shadow(i)):
            self.done = True
            return i
        if self.cfg.eliminate_resets:
            for k in range(i - 1, -1, -1):
                if (i - k) % 2 == 1:
                    self.init_level(k)
                else:
                    self.count[k] = 0
        return i

    def _shift_full(self) -> int:
        n = self.g.n
        if self.count[0] < n:
            return 0
        j = 1
        while j < self.d and self.count[j] >= n:
            j += 1
        if j == self.d:
            self.done = True
            return self.d - 1
        self._bump(j)
        self._store(j)
        for k in range(j - 1, -1, -1):
            self.init_level(k)
        self._dirty = j
        return j

    def run(self, recorder: Optional[Recorder] = None) -> "IterationState":
        while not self.done:
            self.evaluate(recorder)
            self.shift_and_reset()
        return self

    @property
    def winning_region(self) -> np.ndarray:
        return self.work.copy()


def iteration_bound(g: ParityGame) -> int:
    return (g.n + 1) ** g.d


def _level_edges(g: ParityGame):
    """Edges grouped by the priority of their target, for cached evaluation."""
    if g._levels is None:
        g._levels = _group_edges(g)
    return g._levels


def _group_edges(g: ParityGame):
    tgt_prio = g.priority[g.succ]
    src = np.repeat(np.arange(g.n), np.diff(g.ptr))
    order = np.argsort(tgt_prio, kind="stable")
    counts = np.bincount(tgt_prio, minlength=g.d)
    lvl_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return lvl_ptr, src[order].astype(np.int64), g.succ[order].astype(np.int64)


@dataclass
class DriverOutput:
    w_even: np.ndarray
    outer: int
    high: np.ndarray
    final_count: Timestamp
    snapshots: Optional[list[Snapshot]]
    stamps: list[Timestamp]
    events: list[tuple[int, int, int]]  # (node, target, evaluation index)


def run_driver(g: ParityGame, cfg: SolverConfig, record: bool = False,
               backend: Optional[str] = None) -> DriverOutput:
    """Run the fixpoint loop on the chosen backend and collect its logs."""
    backend = K.check_backend(backend)
    if backend == "numpy":
        return _run_python(g, cfg, record)
    lvl_ptr, lvl_src, lvl_tgt = _level_edges(g)
    max_iter = cfg.max_iterations or 0
    (work, outer, high, count, status, snap_counts, snap_banks, n_snap,
     ev_node, ev_target, ev_snap, n_ev) = K.fpiter_driver(
        g.owner, g.priority, g.ptr, g.succ, lvl_ptr, lvl_src, lvl_tgt, g.d,
        cfg.restrict_to_priority, cfg.cache_modal_parts, cfg.eliminate_resets,
        cfg.full_iteration_mode, cfg.log_snapshots, record, max_iter, cfg.snapshot_budget)
    if status == K.ITERATION_LIMIT:
        raise ResourceLimit(f"more than {cfg.max_iterations} evaluations")
    if status == K.LOG_LIMIT:
        raise ResourceLimit(f"snapshot budget {cfg.snapshot_budget} exceeded")
    if status == K.ORDER_VIOLATION:
        raise AssertionError("count did not increase lexicographically")
    stamps = [Timestamp.from_levels(snap_counts[k]) for k in range(n_snap)]
    snaps = None
    if cfg.log_snapshots:
        snaps = [Snapshot(stamps[k], snap_banks[k].copy()) for k in range(n_snap)]
    events = list(zip(ev_node[:n_ev].tolist(), ev_target[:n_ev].tolist(), ev_snap[:n_ev].tolist()))
    return DriverOutput(work.copy(), int(outer), high.copy(), Timestamp.from_levels(count),
                        snaps, stamps, events)


def witness_recorder(sink: list):
    """Recorder appending ``(node, target, evaluation index)`` per decision."""

    def record(state: IterationState, bank: np.ndarray) -> np.ndarray:
        g = state.g
        result, witness = K.psi_witness_numpy(g.owner, g.priority, g.ptr, g.succ, bank)
        idx = state.outer - 1
        for v in np.flatnonzero(witness >= 0).tolist():
            sink.append((v, int(witness[v]), idx))
        return result

    return record


def _run_python(g: ParityGame, cfg: SolverConfig, record: bool) -> DriverOutput:
    stamps: list[Timestamp] = []
    events: list = []
    base = witness_recorder(events) if record else None

    def recorder(state, bank):
        stamps.append(state.timestamp)
        if len(stamps) > cfg.snapshot_budget:
            raise ResourceLimit(f"snapshot budget {cfg.snapshot_budget} exceeded")
        return base(state, bank) if base is not None else state._psi()

    logging = record or cfg.log_snapshots
    state = IterationState(g, cfg).run(recorder if logging else None)
    return DriverOutput(state.winning_region, state.outer, state.high.copy(), state.timestamp,
                        state.snapshots, stamps, events)


def _result(g: ParityGame, out: DriverOutput, cfg: SolverConfig, elapsed: float) -> SolveResult:
    bound = iteration_bound(g)
    if out.outer > bound:
        raise AssertionError(f"{out.outer} evaluations exceed the bound (n+1)^d = {bound}")
    w_even = NodeSet(out.w_even)
    stats = SolveStats(out.outer, out.high.tolist(), elapsed, cfg.tag, out.final_count)
    return SolveResult(w_even, w_even.complement(), stats=stats)


def solve(g: ParityGame, cfg: SolverConfig = SolverConfig(), backend: Optional[str] = None) -> SolveResult:
    """Winning regions by fixpoint iteration (strategies are left empty)."""
    t0 = time.perf_counter()
    out = run_driver(g, replace(cfg, log_snapshots=False) if not cfg.full_iteration_mode else cfg,
                     backend=backend)
    return _result(g, out, cfg, time.perf_counter() - t0)


def solve_with_snapshots(g: ParityGame, cfg: SolverConfig = SolverConfig(log_snapshots=True),
                         backend: Optional[str] = None) -> tuple[SolveResult, list[Snapshot]]:
    """Solve while logging the bank after every evaluation of Psi."""
    if not cfg.log_snapshots:
        cfg = replace(cfg, log_snapshots=True)
    t0 = time.perf_counter()
    out = run_driver(g, cfg, backend=backend)
    return _result(g, out, cfg, time.perf_counter() - t0), out.snapshots
