"""Parity game data model.

Games are stored in compressed sparse row form: the successors of node ``v``
are ``succ[ptr[v]:ptr[v + 1]]`` in the order they were given.  Owners are
``0`` for Even and ``1`` for Odd, which is also the PGSolver encoding.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DanglingEdge, DuplicateEdge, EmptyGame, NegativePriority, NoSuccessor


class Player(enum.IntEnum):
    EVEN = 0
    ODD = 1

    @property
    def opponent(self) -> "Player":
        return Player(1 - self)

    @classmethod
    def of_priority(cls, priority: int) -> "Player":
        """The player who benefits from ``priority`` being the limsup."""
        return cls(priority % 2)

    def __str__(self):
        return self.name.capitalize()


def _as_player(x) -> Player:
    if isinstance(x, str):
        return Player[x.upper()]
    return Player(int(x))


class NodeSet:
    """Immutable set of node ids over the fixed universe ``range(n)``.

    Backed by a boolean mask so membership is O(1) and the set algebra is a
    single vectorised pass.
    """

    __slots__ = ("_mask",)

    def __init__(self, mask):
        mask = np.array(mask, dtype=np.bool_, copy=True)
        mask.flags.writeable = False
        self._mask = mask

    @classmethod
    def empty(cls, n: int) -> "NodeSet":
        return cls(np.zeros(n, dtype=np.bool_))

    @classmethod
    def full(cls, n: int) -> "NodeSet":
        return cls(np.ones(n, dtype=np.bool_))

    @classmethod
    def of(cls, n: int, nodes: Iterable[int]) -> "NodeSet":
        mask = np.zeros(n, dtype=np.bool_)
        idx = np.fromiter(nodes, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError("node id outside universe")
        mask[idx] = True
        return cls(mask)

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def universe(self) -> int:
        return self._mask.shape[0]

    def __contains__(self, v) -> bool:
        return 0 <= v < self._mask.shape[0] and bool(self._mask[v])

    def __iter__(self):
        return iter(np.flatnonzero(self._mask).tolist())

    def __len__(self) -> int:
        return int(self._mask.sum())

    def __bool__(self) -> bool:
        return bool(self._mask.any())

    def _check(self, other: "NodeSet"):
        if not isinstance(other, NodeSet):
            return NotImplemented
        if other.universe != self.universe:
            raise ValueError("NodeSet universes differ")
        return None

    def __or__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return NodeSet(self._mask | other._mask)

    def __and__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return NodeSet(self._mask & other._mask)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return NodeSet(self._mask & ~other._mask)

    def complement(self) -> "NodeSet":
        return NodeSet(~self._mask)

    def issubset(self, other: "NodeSet") -> bool:
        self._check(other)
        return not bool((self._mask & ~other._mask).any())

    __le__ = issubset

    def __eq__(self, other):
        if isinstance(other, NodeSet):
            return self.universe == other.universe and bool(np.array_equal(self._mask, other._mask))
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.universe, self._mask.tobytes()))

    def __repr__(self):
        return f"NodeSet({sorted(self)!r}, n={self.universe})"


class ParityGame:
    """A finite, total parity game with dense node ids ``0..n-1``."""

    __slots__ = ("owner", "priority", "ptr", "succ", "names", "_pred", "_levels")

    def __init__(self, owner, priority, ptr, succ, names=None):
        self.owner = np.asarray(owner, dtype=np.int8)
        self.priority = np.asarray(priority, dtype=np.int64)
        self.ptr = np.asarray(ptr, dtype=np.int64)
        self.succ = np.asarray(succ, dtype=np.int64)
        self.names = tuple(names) if names is not None else None
        for arr in (self.owner, self.priority, self.ptr, self.succ):
            arr.flags.writeable = False
        self._pred = None
        self._levels = None
        self._validate()

    def _validate(self):
        n = self.owner.shape[0]
        if n == 0:
            raise EmptyGame("a game needs at least one node")
        if self.priority.shape != (n,) or self.ptr.shape != (n + 1,):
            raise ValueError("inconsistent array shapes")
        if self.ptr[0] != 0 or self.ptr[-1] != self.succ.shape[0]:
            raise ValueError("malformed successor offsets")
        if np.any((self.owner != 0) & (self.owner != 1)):
            raise ValueError("owner must be 0 (Even) or 1 (Odd)")
        neg = np.flatnonzero(self.priority < 0)
        if neg.size:
            raise NegativePriority(f"node {neg[0]} has negative priority {self.priority[neg[0]]}")
        deg = np.diff(self.ptr)
        empty = np.flatnonzero(deg <= 0)
        if empty.size:
            raise NoSuccessor(f"node {empty[0]} has no successor")
        bad = np.flatnonzero((self.succ < 0) | (self.succ >= n))
        if bad.size:
            src = int(np.searchsorted(self.ptr, bad[0], side="right") - 1)
            raise DanglingEdge(f"node {src} has successor {self.succ[bad[0]]} outside 0..{n - 1}")
        for v in range(n):
            s = self.succ[self.ptr[v]:self.ptr[v + 1]]
            if np.unique(s).shape[0] != s.shape[0]:
                raise DuplicateEdge(f"node {v} lists a successor twice")
        if self.names is not None and len(self.names) != n:
            raise ValueError("names must have one entry per node")

    @property
    def n(self) -> int:
        return self.owner.shape[0]

    @property
    def e(self) -> int:
        return self.succ.shape[0]

    @property
    def d(self) -> int:
        """Number of fixpoint levels the solvers use: max priority + 1."""
        return int(self.priority.max()) + 1

    @property
    def index(self) -> int:
        """PGSolver's notion of index: max minus min priority plus one."""
        return int(self.priority.max() - self.priority.min()) + 1

    def successors(self, v: int) -> list[int]:
        return self.succ[self.ptr[v]:self.ptr[v + 1]].tolist()

    def predecessors(self, v: int) -> list[int]:
        if self._pred is None:
            pred = [[] for _ in range(self.n)]
            for u in range(self.n):
                for w in self.successors(u):
                    pred[w].append(u)
            self._pred = tuple(tuple(p) for p in pred)
        return list(self._pred[v])

    def owner_of(self, v: int) -> Player:
        return Player(int(self.owner[v]))

    def nodes_of(self, player: Player) -> NodeSet:
        return NodeSet(self.owner == int(player))

    def nodes_with_priority(self, p: int) -> NodeSet:
        return NodeSet(self.priority == p)

    def edges(self):
        for v in range(self.n):
            for w in self.successors(v):
                yield v, w

    def node_tuples(self) -> list[tuple]:
        """Inverse of :func:`build_game`."""
        out = []
        for v in range(self.n):
            name = self.names[v] if self.names is not None else None
            out.append((int(self.priority[v]), self.owner_of(v), self.successors(v), name))
        return out

    def with_priorities(self, priority) -> "ParityGame":
        return ParityGame(self.owner, priority, self.ptr, self.succ, self.names)

    def __eq__(self, other):
        if not isinstance(other, ParityGame):
            return NotImplemented
        return (
            np.array_equal(self.owner, other.owner)
            and np.array_equal(self.priority, other.priority)
            and np.array_equal(self.ptr, other.ptr)
            and np.array_equal(self.succ, other.succ)
            and self.names == other.names
        )

    def __hash__(self):
        return hash((self.owner.tobytes(), self.priority.tobytes(), self.succ.tobytes(), self.ptr.tobytes()))

    def __repr__(self):
        return f"ParityGame(n={self.n}, e={self.e}, d={self.d})"


def build_game(nodes: Sequence[tuple]) -> ParityGame:
    """Build a game from ``(priority, owner, successors[, name])`` tuples.

    Node ids are the positions in ``nodes``.  Owners may be :class:`Player`
    members, ``0``/``1``, or the strings ``"even"``/``"odd"``.
    """
    if len(nodes) == 0:
        raise EmptyGame("a game needs at least one node")
    owner, prio, ptr, succ, names = [], [], [0], [], []
    has_names = False
    for v, node in enumerate(nodes):
        if len(node) == 3:
            p, o, s = node
            name = None
        else:
            p, o, s, name = node
        if p < 0:
            raise NegativePriority(f"node {v} has negative priority {p}")
        s = list(s)
        if not s:
            raise NoSuccessor(f"node {v} has no successor")
        owner.append(int(_as_player(o)))
        prio.append(int(p))
        succ.extend(int(w) for w in s)
        ptr.append(len(succ))
        names.append(name)
        has_names = has_names or name is not None
    return ParityGame(owner, prio, ptr, succ, names if has_names else None)


def compress_priorities(g: ParityGame) -> tuple[ParityGame, dict[int, int]]:
    """Map priorities onto a minimal segment, preserving order and parity.

    Adjacent priority classes of the same parity are merged.  The least new
    priority is 0 when the least old priority is even and 1 otherwise.
    """
    distinct = sorted(set(g.priority.tolist()))
    mapping = {}
    cur = distinct[0] % 2
    for p in distinct:
        if p % 2 != cur % 2:
            cur += 1
        mapping[p] = cur
    new = np.array([mapping[int(p)] for p in g.priority], dtype=np.int64)
    return g.with_priorities(new), mapping
