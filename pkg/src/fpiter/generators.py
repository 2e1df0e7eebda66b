"""Deterministic game families for benchmarks and property tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .game import ParityGame, build_game

FAMILIES = ("ladder", "jurdzinski", "random")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple

    def __post_init__(self):
        arity = {"ladder": 1, "jurdzinski": 2, "random": 5}
        if self.family not in arity:
            raise InvalidSpec(f"unknown family {self.family!r}")
        if len(self.params) != arity[self.family]:
            raise InvalidSpec(f"{self.family} takes {arity[self.family]} parameters, got {len(self.params)}")
        for p in self.params:
            if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
                raise InvalidSpec(f"parameter {p!r} is not an integer")
        if self.family == "random":
            n, d, lo, hi, seed = self.params
            if min(n, d, lo, hi) < 1:
                raise InvalidSpec("random parameters n, d, min_deg, max_deg must be >= 1")
            if not 0 <= seed < 2**64:
                raise InvalidSpec("seed must fit in 64 bits")
            if lo > hi or hi > n:
                raise InvalidSpec("need 1 <= min_deg <= max_deg <= n")
        elif min(self.params) < 1:
            raise InvalidSpec(f"{self.family} parameters must be >= 1")

    @classmethod
    def ladder(cls, n: int) -> "GeneratorSpec":
        return cls("ladder", (n,))

    @classmethod
    def jurdzinski(cls, n: int, width: int = 3) -> "GeneratorSpec":
        return cls("jurdzinski", (n, width))

    @classmethod
    def random(cls, n: int, d: int, min_deg: int, max_deg: int, seed: int) -> "GeneratorSpec":
        return cls("random", (n, d, min_deg, max_deg, seed))

    @classmethod
    def parse(cls, words) -> "GeneratorSpec":
        """From tokens like ``["ladder", "8"]``."""
        if not words:
            raise InvalidSpec("empty generator spec")
        try:
            params = tuple(int(w) for w in words[1:])
        except ValueError as e:
            raise InvalidSpec(str(e)) from None
        return cls(words[0], params)

    def __str__(self):
        return " ".join([self.family, *map(str, self.params)])


def generate(spec: GeneratorSpec) -> ParityGame:
    if spec.family == "ladder":
        return ladder(*spec.params)
    if spec.family == "jurdzinski":
        return jurdzinski(*spec.params)
    return random_game(*spec.params)


# rung roles: two Odd rails at even priorities, two Even steps at odd
# priorities and one Even hub at an even priority
_A, _B, _C, _D, _E = range(5)
_RUNG_EDGES = {_A: (_E, _B), _B: (_A,), _C: (_A, _D), _D: (_B, _C), _E: (_A,)}
_RUNG_UP = {_B: _A, _D: _D, _E: _C}


def ladder(n: int) -> ParityGame:
    """Ladder of ``n`` five-node rungs; 5n nodes, 11n-3 edges, priorities 0..3n+2.

    Rung ``i`` draws its priorities from ``3i..3i+5``.  Odd only ever moves to
    even priorities and every Even node has an even-priority move, so Even
    wins everywhere, yet plain nested iteration confirms each least-fixpoint
    level in a separate round and needs ``2**(number of odd levels)``
    evaluations.
    """
    if n < 1:
        raise InvalidSpec("ladder needs n >= 1")
    nodes = []
    for i in range(n):
        lo = 3 * i
        even = [p for p in range(lo, lo + 6) if p % 2 == 0]
        odd = [p for p in range(lo, lo + 6) if p % 2 == 1]
        prio = {_A: even[0], _E: even[1], _B: even[2], _C: odd[0], _D: odd[2]}
        for k in range(5):
            succ = [5 * i + t for t in _RUNG_EDGES[k]]
            if i + 1 < n and k in _RUNG_UP:
                succ.append(5 * (i + 1) + _RUNG_UP[k])
            owner = 1 if k in (_A, _B) else 0
            nodes.append((prio[k], owner, sorted(succ), f"r{i}{'abcde'[k]}"))
    return build_game(nodes)


def jurdzinski(n: int, width: int = 3) -> ParityGame:
    """Layered game with ``n`` layers of ``width`` three-node columns and a top layer.

    Layer ``i`` holds an Odd guard (priority ``2i+1``), an Even gate
    (priority ``2i+2``) and an Even connector (priority 0) per column; the top
    layer holds an Even node of priority ``2n+2`` and an Odd node of priority
    ``2n+1`` per column.  For width 3 this gives 9n+6 nodes, 22n+11 edges
    and priorities 0..2n+2.  Narrower widths merge coinciding edges.
    """
    if n < 1 or width < 1:
        raise InvalidSpec("jurdzinski needs n >= 1 and width >= 1")
    m = width

    def guard(i, j):
        return 3 * (i * m + j)

    top = 3 * n * m

    def high(j):
        return top + 2 * j

    succ: dict[int, list] = {}
    prio, owner = {}, {}
    for i in range(n):
        for j in range(m):
            a = guard(i, j)
            b, c = a + 1, a + 2
            prio.update({a: 2 * i + 1, b: 2 * i + 2, c: 0})
            owner.update({a: 1, b: 0, c: 0})
            up = guard(i + 1, j) if i + 1 < n else high(j)
            succ[a] = [b, c]
            succ[b] = [a, c]
            succ[c] = [a, guard(i, (j + 1) % m), up]
        succ[guard(i, 0) + 1].append(guard(i, m - 1) + 1)
    for j in range(m):
        t, u = high(j), high(j) + 1
        prio.update({t: 2 * n + 2, u: 2 * n + 1})
        owner.update({t: 0, u: 1})
        succ[t] = [u]
        succ[u] = [t, guard(0, j)]
    succ[high(0)].append(high(m - 1))
    succ[high(0) + 1].append(high(1 % m) + 1)
    nodes = [(prio[v], owner[v], sorted(set(succ[v]))) for v in range(top + 2 * m)]
    return build_game(nodes)


def random_game(n: int, d: int, min_deg: int, max_deg: int, seed: int) -> ParityGame:
    """Uniform random game from a PCG64 stream seeded with ``seed``.

    Per node, in id order: priority uniform in ``0..d-1``, owner uniform,
    out-degree uniform in ``min_deg..max_deg``, then that many distinct
    successors (self-loops allowed), stored sorted.
    """
    GeneratorSpec.random(n, d, min_deg, max_deg, seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    nodes = []
    for _ in range(n):
        p = int(rng.integers(0, d))
        o = int(rng.integers(0, 2))
        k = int(rng.integers(min_deg, max_deg + 1))
        succ = sorted(int(s) for s in rng.choice(n, size=k, replace=False))
        nodes.append((p, o, succ))
    return build_game(nodes)
