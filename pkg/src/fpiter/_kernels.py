"""Compiled inner loops.

Every hot loop lives here in a form numba can compile.  Setting the
environment variable ``FPITER_DISABLE_NUMBA=1`` (before import) switches the
package to the pure-numpy path: the evaluation of the modal step becomes a
vectorised ``reduceat`` pass and the solver loop runs in the instrumented
Python implementation in :mod:`fpiter.core`.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get("FPITER_DISABLE_NUMBA", "0") in ("", "0")

# driver status codes
OK = 0
ITERATION_LIMIT = 1
ORDER_VIOLATION = 2
LOG_LIMIT = 3


def njit(fn):
    if NUMBA_ENABLED:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


BACKENDS = ("numba", "numpy")


def default_backend():
    return "numba" if NUMBA_ENABLED else "numpy"


def check_backend(backend):
    if backend is None:
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_ENABLED:
        raise RuntimeError("numba backend requested but disabled (FPITER_DISABLE_NUMBA)")
    return backend


# ---------------------------------------------------------------------------
# modal step, numpy path


def psi_numpy(owner, prio, ptr, succ, bank):
    """Diamond-or-Box over a ``(d, n)`` boolean bank, vectorised."""
    good = bank[prio[succ], succ]
    starts = ptr[:-1]
    dia = np.logical_or.reduceat(good, starts)
    box = np.logical_and.reduceat(good, starts)
    return np.where(owner == 0, dia, box)


def psi_witness_numpy(owner, prio, ptr, succ, bank):
    """Like :func:`psi_numpy`, also returning the recorded witness per node.

    For an Even node in the result the witness is its first successor ``t``
    with ``t`` in ``X[prio[t]]``; for an Odd node outside the result it is the
    first successor violating that.  Other nodes get ``-1``.
    """
    e = succ.shape[0]
    good = bank[prio[succ], succ]
    starts = ptr[:-1]
    pos = np.arange(e)
    first_good = np.minimum.reduceat(np.where(good, pos, e), starts)
    first_bad = np.minimum.reduceat(np.where(good, e, pos), starts)
    even = owner == 0
    result = np.where(even, first_good < e, first_bad == e)
    wit_edge = np.where(even, first_good, first_bad)
    recorded = np.where(even, result, ~result)
    witness = np.where(recorded, succ[np.minimum(wit_edge, e - 1)], -1)
    return result, witness


def level_parts_numpy(prio, ptr, succ, level, xi):
    """Per-level Diamond and Box parts restricted to edges into ``level``."""
    into = prio[succ] == level
    member = xi[succ]
    starts = ptr[:-1]
    dia = np.logical_or.reduceat(into & member, starts)
    box = np.logical_and.reduceat(~into | member, starts)
    return dia, box


# ---------------------------------------------------------------------------
# modal step, compiled path


@njit
def psi_loop(owner, prio, ptr, succ, bank, out):
    n = owner.shape[0]
    for v in range(n):
        if owner[v] == 0:
            res = False
            for k in range(ptr[v], ptr[v + 1]):
                t = succ[k]
                if bank[prio[t], t]:
                    res = True
                    break
        else:
            res = True
            for k in range(ptr[v], ptr[v + 1]):
                t = succ[k]
                if not bank[prio[t], t]:
                    res = False
                    break
        out[v] = res


@njit
def _init_level(bank, count, prio_mask, i, restrict):
    n = bank.shape[1]
    if i % 2 == 0:
        if restrict:
            for v in range(n):
                bank[i, v] = prio_mask[i, v]
        else:
            for v in range(n):
                bank[i, v] = True
    else:
        for v in range(n):
            bank[i, v] = False
    count[i] = 0


@njit
def _rows_equal(a, i, b, j):
    for v in range(a.shape[1]):
        if a[i, v] != b[j, v]:
            return False
    return True


@njit
def _lex_greater(a, b):
    # counters are indexed by level; level d-1 is most significant
    for i in range(a.shape[0] - 1, -1, -1):
        if a[i] != b[i]:
            return a[i] > b[i]
    return False


@njit
def _recompute_level(lvl_ptr, lvl_src, lvl_tgt, bank, i, dia, box):
    n = bank.shape[1]
    for v in range(n):
        dia[i, v] = False
        box[i, v] = True
    for k in range(lvl_ptr[i], lvl_ptr[i + 1]):
        s = lvl_src[k]
        if bank[i, lvl_tgt[k]]:
            dia[i, s] = True
        else:
            box[i, s] = False


@njit
def fpiter_driver(owner, prio, ptr, succ, lvl_ptr, lvl_src, lvl_tgt, d,
                  restrict, cache, elim, full, log_snap, record, max_iters, log_cap):
    """Nested fixpoint iteration with all solver variants.

    Returns ``(w_even, outer, high_water, final_count, status, snap_counts,
    snap_banks, n_snap, ev_node, ev_target, ev_snap, n_ev)``.  Snapshot rows
    are written once per evaluation when ``log_snap`` or ``record`` is set;
    banks are only stored with ``log_snap``.
    """
    n = owner.shape[0]
    prio_mask = np.zeros((d, n), dtype=np.bool_)
    for v in range(n):
        prio_mask[prio[v], v] = True
    bank = np.zeros((d, n), dtype=np.bool_)
    shadow = np.zeros((d, n), dtype=np.bool_)
    count = np.zeros(d, dtype=np.int64)
    prev = np.zeros(d, dtype=np.int64)
    high = np.zeros(d, dtype=np.int64)
    work = np.zeros(n, dtype=np.bool_)
    for i in range(d - 1, -1, -1):
        _init_level(bank, count, prio_mask, i, restrict)

    dia = np.zeros((d, n), dtype=np.bool_)
    box = np.ones((d, n), dtype=np.bool_)
    sdia = np.zeros((d + 1, n), dtype=np.bool_)
    sbox = np.ones((d + 1, n), dtype=np.bool_)
    dirty = d - 1

    logging = log_snap or record
    cap = 16 if logging else 1
    snap_counts = np.zeros((cap, d), dtype=np.int64)
    snap_banks = np.zeros((cap if log_snap else 1, d, n), dtype=np.bool_)
    n_snap = 0
    ecap = 16 if record else 1
    ev_node = np.zeros(ecap, dtype=np.int64)
    ev_target = np.zeros(ecap, dtype=np.int64)
    ev_snap = np.zeros(ecap, dtype=np.int64)
    n_ev = 0

    outer = 0
    status = 0
    while True:
        count[0] += 1
        if count[0] > high[0]:
            high[0] = count[0]
        if outer > 0 and not _lex_greater(count, prev):
            status = 2
            break
        prev[:] = count
        outer += 1
        if max_iters > 0 and outer > max_iters:
            status = 1
            break

        for v in range(n):
            shadow[0, v] = bank[0, v]
        if record:
            for v in range(n):
                if owner[v] == 0:
                    res = False
                    for k in range(ptr[v], ptr[v + 1]):
                        t = succ[k]
                        if bank[prio[t], t]:
                            res = True
                            break
                else:
                    res = True
                    for k in range(ptr[v], ptr[v + 1]):
                        t = succ[k]
                        if not bank[prio[t], t]:
                            res = False
                            break
                work[v] = res
                if (owner[v] == 0) == res:
                    if n_ev >= ev_node.shape[0]:
                        m = 2 * ev_node.shape[0]
                        a = np.zeros(m, dtype=np.int64)
                        a[:n_ev] = ev_node[:n_ev]
                        ev_node = a
                        b = np.zeros(m, dtype=np.int64)
                        b[:n_ev] = ev_target[:n_ev]
                        ev_target = b
                        c = np.zeros(m, dtype=np.int64)
                        c[:n_ev] = ev_snap[:n_ev]
                        ev_snap = c
                    ev_node[n_ev] = v
                    ev_target[n_ev] = t
                    ev_snap[n_ev] = n_snap
                    n_ev += 1
            if status != 0:
                break
        elif cache:
            for i in range(dirty, -1, -1):
                _recompute_level(lvl_ptr, lvl_src, lvl_tgt, bank, i, dia, box)
                for v in range(n):
                    sdia[i, v] = dia[i, v] or sdia[i + 1, v]
                    sbox[i, v] = box[i, v] and sbox[i + 1, v]
            for v in range(n):
                work[v] = sdia[0, v] if owner[v] == 0 else sbox[0, v]
        else:
            psi_loop(owner, prio, ptr, succ, bank, work)

        for v in range(n):
            bank[0, v] = work[v] and prio_mask[0, v] if restrict else work[v]

        if logging:
            if n_snap >= log_cap:
                status = 3
                break
            if n_snap >= snap_counts.shape[0]:
                m = min(2 * snap_counts.shape[0], log_cap)
                sc = np.zeros((m, d), dtype=np.int64)
                sc[:n_snap] = snap_counts[:n_snap]
                snap_counts = sc
                if log_snap:
                    sb = np.zeros((m, d, n), dtype=np.bool_)
                    sb[:n_snap] = snap_banks[:n_snap]
                    snap_banks = sb
            snap_counts[n_snap] = count
            if log_snap:
                snap_banks[n_snap] = bank
            n_snap += 1

        dirty = 0
        if full:
            if count[0] < n:
                continue
            j = 1
            while j < d and count[j] >= n:
                j += 1
            if j == d:
                break
            count[j] += 1
            if count[j] > high[j]:
                high[j] = count[j]
            for v in range(n):
                bank[j, v] = work[v] and prio_mask[j, v] if restrict else work[v]
            for k in range(j - 1, -1, -1):
                _init_level(bank, count, prio_mask, k, restrict)
            dirty = j
            continue

        i = 0
        while i < d - 1 and _rows_equal(bank, i, shadow, i):
            i += 1
            count[i] += 1
            if count[i] > high[i]:
                high[i] = count[i]
            for v in range(n):
                shadow[i, v] = bank[i, v]
                bank[i, v] = work[v] and prio_mask[i, v] if restrict else work[v]
            if not elim:
                _init_level(bank, count, prio_mask, i - 1, restrict)
        dirty = i
        if i == d - 1 and _rows_equal(bank, i, shadow, i):
            break
        if elim and i > 0:
            for k in range(i - 1, -1, -1):
                if (i - k) % 2 == 1:
                    _init_level(bank, count, prio_mask, k, restrict)
                else:
                    count[k] = 0

    return (work, outer, high, count, status, snap_counts, snap_banks, n_snap,
            ev_node, ev_target, ev_snap, n_ev)


# ---------------------------------------------------------------------------
# oracles


@njit
def _opponent_wins_mask(nbr, prio, n, opp_parity, maxp):
    """Nodes from which the free player (opponent) reaches a good cycle.

    ``nbr[v]`` is a bitmask of successors after fixing the strategy.  A cycle
    is good for the opponent when its maximal priority has ``opp_parity``.
    """
    targets = 0
    for q in range(opp_parity, maxp + 1, 2):
        allowed = 0
        for v in range(n):
            if prio[v] <= q:
                allowed |= 1 << v
        for u in range(n):
            if prio[u] != q:
                continue
            # can u return to itself through nodes of priority <= q?
            seen = 0
            frontier = nbr[u] & allowed
            while frontier != 0:
                seen |= frontier
                nxt = 0
                f = frontier
                while f != 0:
                    low = f & -f
                    w = 0
                    while (low >> w) != 1:
                        w += 1
                    nxt |= nbr[w] & allowed
                    f ^= low
                frontier = nxt & ~seen
            if (seen >> u) & 1:
                targets |= 1 << u
    # backward closure: everything that can reach a target
    reach = targets
    changed = True
    while changed:
        changed = False
        for v in range(n):
            if not (reach >> v) & 1 and (nbr[v] & reach) != 0:
                reach |= 1 << v
                changed = True
    return reach


@njit
def brute_player(owner, prio, ptr, succ, player, budget):
    """Enumerate ``player``'s positional strategies.

    Returns ``(region_mask, choice, status)`` where ``choice[v]`` is the
    successor picked at each of the player's nodes by a strategy winning on
    the whole region, and status is 0 on success, 1 on budget overrun, 2 if
    no single strategy covers the union (which positional determinacy rules
    out).
    """
    n = owner.shape[0]
    maxp = 0
    for v in range(n):
        if prio[v] > maxp:
            maxp = prio[v]
    mine = np.zeros(n, dtype=np.int64)
    k = 0
    total = 1
    for v in range(n):
        if owner[v] == player:
            mine[k] = v
            k += 1
            total *= ptr[v + 1] - ptr[v]
            if total > budget:
                return 0, np.full(n, -1, dtype=np.int64), 1
    full = (1 << n) - 1
    opp_parity = 1 - player
    digits = np.zeros(n, dtype=np.int64)
    nbr = np.zeros(n, dtype=np.int64)
    union = 0
    best_mask = -1
    best = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if owner[v] != player:
            m = 0
            for j in range(ptr[v], ptr[v + 1]):
                m |= 1 << succ[j]
            nbr[v] = m
    masks = np.zeros(total, dtype=np.int64)
    for s in range(total):
        for j in range(k):
            v = mine[j]
            nbr[v] = 1 << succ[ptr[v] + digits[j]]
        won = full & ~_opponent_wins_mask(nbr, prio, n, opp_parity, maxp)
        masks[s] = won
        union |= won
        # advance mixed-radix counter
        for j in range(k):
            v = mine[j]
            digits[j] += 1
            if digits[j] < ptr[v + 1] - ptr[v]:
                break
            digits[j] = 0
    for s in range(total):
        if masks[s] == union:
            best_mask = s
            break
    if best_mask < 0:
        return union, best, 2
    rem = best_mask
    for j in range(k):
        v = mine[j]
        deg = ptr[v + 1] - ptr[v]
        best[v] = succ[ptr[v] + rem % deg]
        rem //= deg
    return union, best, 0


@njit
def payoff_table(owner, prio, ptr, succ, d, top):
    """Winner of the credit game for every (node, credit) pair.

    Credits have ``d`` entries in ``0..top`` and are encoded in mixed radix
    ``top + 1`` with the entry for priority ``d - 1`` most significant, so a
    move always goes to a numerically smaller code.  ``table[code, v]`` is
    ``True`` iff Even wins from ``(v, credit)``.
    """
    n = owner.shape[0]
    base = top + 1
    size = base ** d
    weight = np.ones(d, dtype=np.int64)
    for h in range(1, d):
        weight[h] = weight[h - 1] * base
    table = np.zeros((size, n), dtype=np.bool_)
    digits = np.zeros(d, dtype=np.int64)
    for code in range(size):
        rem = code
        for h in range(d):
            digits[h] = rem % base
            rem //= base
        for v in range(n):
            p = prio[v]
            if digits[p] == 0:
                table[code, v] = p % 2 == 0
                continue
            nxt = code - weight[p]
            for h in range(p):
                nxt += (top - digits[h]) * weight[h]
            if owner[v] == 0:
                res = False
                for k in range(ptr[v], ptr[v + 1]):
                    if table[nxt, succ[k]]:
                        res = True
                        break
            else:
                res = True
                for k in range(ptr[v], ptr[v + 1]):
                    if not table[nxt, succ[k]]:
                        res = False
                        break
            table[code, v] = res
    return table
