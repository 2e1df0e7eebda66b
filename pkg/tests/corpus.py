"""Small-game corpora shared by the test suite.

The exhaustive corpus holds one representative per isomorphism class of
games with at most 4 nodes, priorities 0..2 and one or two successors per
node.  A game is encoded per node as ``(priority * 2 + owner) * S + set``
where ``set`` indexes the successor set; the representative is the labelling
whose code tuple (node 0 first) is lexicographically smallest.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numba
import numpy as np

from fpiter.game import build_game
from fpiter.generators import random_game

MAX_NODES = 4
PRIORITIES = 3
MAX_DEGREE = 2


def successor_sets(n: int) -> list[tuple[int, ...]]:
    return [s for k in range(1, MAX_DEGREE + 1) for s in itertools.combinations(range(n), k)]


@numba.njit(cache=True)
def _canonical_codes(n, per_node, set_masks, perms, perm_set):
    """Codes (base ``per_node``, node 0 most significant) minimal under relabelling."""
    n_sets = set_masks.shape[0]
    total = per_node ** n
    out = np.empty(total, dtype=np.int64)
    found = 0
    digits = np.empty(n, dtype=np.int64)
    cand = np.empty(n, dtype=np.int64)
    for code in range(total):
        c = code
        for v in range(n - 1, -1, -1):
            digits[v] = c % per_node
            c //= per_node
        minimal = True
        for p in range(1, perms.shape[0]):
            # node v becomes perms[p, v]
            for v in range(n):
                d = digits[v]
                label = d // n_sets
                s = d % n_sets
                cand[perms[p, v]] = label * n_sets + perm_set[p, s]
            for u in range(n):
                if cand[u] < digits[u]:
                    minimal = False
                    break
                if cand[u] > digits[u]:
                    break
            if not minimal:
                break
        if minimal:
            out[found] = code
            found += 1
    return out[:found]


@lru_cache(maxsize=None)
def canonical_codes(n: int) -> np.ndarray:
    sets = successor_sets(n)
    index = {s: i for i, s in enumerate(sets)}
    masks = np.array([sum(1 << v for v in s) for s in sets], dtype=np.int64)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    perm_set = np.array([[index[tuple(sorted(p[v] for v in s))] for s in sets] for p in perms], dtype=np.int64)
    per_node = 2 * PRIORITIES * len(sets)
    return _canonical_codes(n, per_node, masks, perms, perm_set)


def decode(n: int, code: int):
    sets = successor_sets(n)
    per_node = 2 * PRIORITIES * len(sets)
    nodes = []
    digits = []
    for _ in range(n):
        digits.append(code % per_node)
        code //= per_node
    for d in reversed(digits):
        label, s = divmod(d, len(sets))
        prio, owner = divmod(label, 2)
        nodes.append((prio, owner, list(sets[s])))
    return build_game(nodes)


def exhaustive_games(max_nodes: int = MAX_NODES, sample: int | None = None, seed: int = 0):
    """Yield the exhaustive corpus; ``sample`` keeps a seeded subset per size."""
    rng = np.random.default_rng(seed)
    for n in range(1, max_nodes + 1):
        codes = canonical_codes(n)
        if sample is not None and len(codes) > sample:
            codes = np.sort(rng.choice(codes, sample, replace=False))
        for code in codes.tolist():
            yield decode(n, code)


def corpus_size(max_nodes: int = MAX_NODES) -> int:
    return sum(len(canonical_codes(n)) for n in range(1, max_nodes + 1))


def random_corpus(count: int = 1000, max_nodes: int = 8, max_d: int = 4, seed: int = 2024):
    """Seeded random games with 1..max_nodes nodes and priorities below 1..max_d."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, max_nodes + 1))
        d = int(rng.integers(1, max_d + 1))
        hi = int(rng.integers(1, min(n, 3) + 1))
        yield random_game(n, d, 1, hi, int(rng.integers(0, 2**63)))
