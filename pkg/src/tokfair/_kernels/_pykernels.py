"""Pure-Python kernels. Same contracts as the compiled ``_ckernels`` module."""

from heapq import heappop, heappush
from math import log2

CTX_ORDER_MAX = 6


def merge_ids(ids, pair_table):
    """Apply ranked merges to a list of symbol ids.

    ``pair_table`` maps ``(left << 32) | right`` to ``(rank, merged_id)``.
    The result equals merging, one pair per round, the lowest-ranked
    adjacent pair with ties going to the leftmost position. Candidates sit
    in a heap keyed by (rank, original position) over a linked list, and
    stale entries are dropped when popped.
    """
    cur = list(ids)
    n = len(cur)
    if n < 2:
        return cur
    nxt = list(range(1, n + 1))
    nxt[-1] = -1
    prv = list(range(-1, n - 1))
    heap = []
    for i in range(n - 1):
        hit = pair_table.get((cur[i] << 32) | cur[i + 1])
        if hit is not None:
            heap.append((hit[0], i, cur[i], cur[i + 1], hit[1]))
    heap.sort()
    while heap:
        _, pos, left, right, new = heappop(heap)
        if cur[pos] != left:
            continue
        r = nxt[pos]
        if r < 0 or cur[r] != right:
            continue
        cur[pos] = new
        cur[r] = -1  # dead node
        after = nxt[r]
        nxt[pos] = after
        if after >= 0:
            prv[after] = pos
            hit = pair_table.get((new << 32) | cur[after])
            if hit is not None:
                heappush(heap, (hit[0], pos, new, cur[after], hit[1]))
        before = prv[pos]
        if before >= 0:
            hit = pair_table.get((cur[before] << 32) | new)
            if hit is not None:
                heappush(heap, (hit[0], before, cur[before], new, hit[1]))
    out = []
    i = 0
    while i >= 0:
        out.append(cur[i])
        i = nxt[i]
    return out


class BPETable:
    """Pair table and byte ids of one model (see the compiled twin)."""

    def __init__(self, pair_table, byte_ids):
        if len(byte_ids) != 256:
            raise ValueError("byte_ids must have 256 entries")
        self.pair_table = pair_table
        self.byte_ids = list(byte_ids)

    def encode_chunks(self, chunks, cache, cache_max):
        """Ids for pretokenized chunks, memoised per chunk string."""
        byte_ids, pairs = self.byte_ids, self.pair_table
        out = []
        for chunk in chunks:
            hit = cache.get(chunk)
            if hit is None:
                hit = [byte_ids[b] for b in chunk.encode("utf-8")]
                if pairs:
                    hit = merge_ids(hit, pairs)
                if len(cache) < cache_max:
                    cache[chunk] = hit
            out.extend(hit)
        return out


def ctx_key(data, start, stop):
    # sentinel 1-bit keeps contexts of different lengths distinct
    key = 1
    for j in range(start, stop):
        key = (key << 8) | data[j]
    return key


def ngram_count(data, order, pair_counts, totals):
    """Accumulate (context, next byte) counts for every full-length context."""
    n = len(data)
    for i in range(order, n):
        key = ctx_key(data, i - order, i)
        slot = (key << 8) | data[i]
        pair_counts[slot] = pair_counts.get(slot, 0) + 1
        totals[key] = totals.get(key, 0) + 1


def ngram_nll(data, order, pair_counts, totals, alpha):
    """Total negative log2-likelihood of ``data`` under additive smoothing.

    Positions with fewer than ``order`` preceding bytes use the shorter
    context, which is never stored, so they score as uniform.
    """
    denom_alpha = alpha * 256.0
    total = 0.0
    comp = 0.0
    n = len(data)
    for i in range(n):
        start = i - order if i >= order else 0
        key = ctx_key(data, start, i)
        c = pair_counts.get((key << 8) | data[i], 0)
        t = totals.get(key, 0)
        term = -log2((c + alpha) / (t + denom_alpha))
        # Neumaier compensated sum
        s = total + term
        if abs(total) >= abs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
    return total + comp
