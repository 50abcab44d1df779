# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels. Same contracts as ``_pykernels``."""

from libc.math cimport fabs, log2
from libc.stdlib cimport free, malloc

CTX_ORDER_MAX = 6


cdef struct Cand:
    long long rank
    Py_ssize_t pos
    long long left
    long long right
    long long merged


cdef inline bint _less(Cand* a, Cand* b) nogil:
    return a.rank < b.rank or (a.rank == b.rank and a.pos < b.pos)


cdef void _push(Cand* heap, Py_ssize_t* size, Cand c) nogil:
    cdef Py_ssize_t i = size[0], parent
    size[0] += 1
    heap[i] = c
    while i > 0:
        parent = (i - 1) >> 1
        if not _less(&heap[i], &heap[parent]):
            break
        heap[i], heap[parent] = heap[parent], heap[i]
        i = parent


cdef Cand _pop(Cand* heap, Py_ssize_t* size) nogil:
    cdef Cand top = heap[0]
    cdef Py_ssize_t i = 0, child, n
    size[0] -= 1
    n = size[0]
    heap[0] = heap[n]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and _less(&heap[child + 1], &heap[child]):
            child += 1
        if not _less(&heap[child], &heap[i]):
            break
        heap[i], heap[child] = heap[child], heap[i]
        i = child
    return top


cdef inline bint _lookup(dict pair_table, long long left, long long right, Cand* out):
    hit = pair_table.get((<unsigned long long>left << 32) | <unsigned long long>right)
    if hit is None:
        return False
    out.rank = (<tuple>hit)[0]
    out.merged = (<tuple>hit)[1]
    out.left = left
    out.right = right
    return True


def merge_ids(ids, dict pair_table):
    cdef Py_ssize_t n = len(ids), i, r, after, before, size = 0
    if n < 2:
        return list(ids)
    cdef long long* cur = <long long*>malloc(n * sizeof(long long))
    cdef Py_ssize_t* nxt = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* prv = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
    # every merge pushes at most two candidates
    cdef Cand* heap = <Cand*>malloc(3 * n * sizeof(Cand))
    cdef Cand c
    cdef list out
    if not cur or not nxt or not prv or not heap:
        free(cur); free(nxt); free(prv); free(heap)
        raise MemoryError()
    try:
        for i in range(n):
            cur[i] = ids[i]
            nxt[i] = i + 1
            prv[i] = i - 1
        nxt[n - 1] = -1
        for i in range(n - 1):
            if _lookup(pair_table, cur[i], cur[i + 1], &c):
                c.pos = i
                _push(heap, &size, c)
        while size > 0:
            c = _pop(heap, &size)
            if cur[c.pos] != c.left:
                continue
            r = nxt[c.pos]
            if r < 0 or cur[r] != c.right:
                continue
            cur[c.pos] = c.merged
            cur[r] = -1
            after = nxt[r]
            nxt[c.pos] = after
            i = c.pos
            if after >= 0:
                prv[after] = i
                if _lookup(pair_table, cur[i], cur[after], &c):
                    c.pos = i
                    _push(heap, &size, c)
            before = prv[i]
            if before >= 0 and _lookup(pair_table, cur[before], cur[i], &c):
                c.pos = before
                _push(heap, &size, c)
        out = []
        i = 0
        while i >= 0:
            out.append(cur[i])
            i = nxt[i]
        return out
    finally:
        free(cur); free(nxt); free(prv); free(heap)


cdef struct Slot:
    unsigned long long key
    long long rank      # -1 marks an empty slot
    long long merged


cdef class BPETable:
    """Pair table and byte ids of one model, held in C arrays.

    ``pair_table`` has the same layout as for :func:`merge_ids`.
    """

    cdef Slot* slots
    cdef unsigned long long mask
    cdef int shift
    cdef long long byte_ids[256]
    # scratch buffers reused across chunks
    cdef Py_ssize_t cap
    cdef long long* cur
    cdef Py_ssize_t* nxt
    cdef Py_ssize_t* prv
    cdef Cand* heap

    def __cinit__(self, dict pair_table, byte_ids):
        cdef Py_ssize_t cap = 8, i
        cdef int bits = 3
        while cap < 2 * len(pair_table) + 2:
            cap <<= 1
            bits += 1
        self.slots = <Slot*>malloc(cap * sizeof(Slot))
        if not self.slots:
            raise MemoryError()
        self.mask = cap - 1
        self.shift = 64 - bits
        for i in range(cap):
            self.slots[i].rank = -1
        for key, hit in pair_table.items():
            self._insert(key, (<tuple>hit)[0], (<tuple>hit)[1])
        if len(byte_ids) != 256:
            raise ValueError("byte_ids must have 256 entries")
        for i in range(256):
            self.byte_ids[i] = byte_ids[i]

    def __dealloc__(self):
        free(self.slots)
        free(self.cur); free(self.nxt); free(self.prv); free(self.heap)

    cdef void _insert(self, unsigned long long key, long long rank, long long merged):
        cdef unsigned long long h = (key * 0x9E3779B97F4A7C15ULL) >> self.shift
        while self.slots[h].rank >= 0:
            if self.slots[h].key == key:
                return  # first rank wins
            h = (h + 1) & self.mask
        self.slots[h].key = key
        self.slots[h].rank = rank
        self.slots[h].merged = merged

    cdef inline bint _find(self, long long left, long long right, Cand* out) nogil:
        cdef unsigned long long key = (<unsigned long long>left << 32) | <unsigned long long>right
        cdef unsigned long long h = (key * 0x9E3779B97F4A7C15ULL) >> self.shift
        while self.slots[h].rank >= 0:
            if self.slots[h].key == key:
                out.rank = self.slots[h].rank
                out.merged = self.slots[h].merged
                out.left = left
                out.right = right
                return True
            h = (h + 1) & self.mask
        return False

    cdef int _reserve(self, Py_ssize_t n) except -1:
        if n <= self.cap:
            return 0
        free(self.cur); free(self.nxt); free(self.prv); free(self.heap)
        self.cap = max(n, 2 * self.cap)
        self.cur = <long long*>malloc(self.cap * sizeof(long long))
        self.nxt = <Py_ssize_t*>malloc(self.cap * sizeof(Py_ssize_t))
        self.prv = <Py_ssize_t*>malloc(self.cap * sizeof(Py_ssize_t))
        # every merge pushes at most two candidates
        self.heap = <Cand*>malloc(3 * self.cap * sizeof(Cand))
        if not self.cur or not self.nxt or not self.prv or not self.heap:
            self.cap = 0
            raise MemoryError()
        return 0

    cdef list _merge(self, const unsigned char* data, Py_ssize_t n):
        cdef Py_ssize_t i, r, after, before, size = 0
        cdef list out = []
        cdef Cand c
        if n == 0:
            return out
        self._reserve(n)
        cdef long long* cur = self.cur
        cdef Py_ssize_t* nxt = self.nxt
        cdef Py_ssize_t* prv = self.prv
        cdef Cand* heap = self.heap
        for i in range(n):
            cur[i] = self.byte_ids[data[i]]
            nxt[i] = i + 1
            prv[i] = i - 1
        nxt[n - 1] = -1
        for i in range(n - 1):
            if self._find(cur[i], cur[i + 1], &c):
                c.pos = i
                _push(heap, &size, c)
        while size > 0:
            c = _pop(heap, &size)
            if cur[c.pos] != c.left:
                continue
            r = nxt[c.pos]
            if r < 0 or cur[r] != c.right:
                continue
            i = c.pos
            cur[i] = c.merged
            cur[r] = -1
            after = nxt[r]
            nxt[i] = after
            if after >= 0:
                prv[after] = i
                if self._find(cur[i], cur[after], &c):
                    c.pos = i
                    _push(heap, &size, c)
            before = prv[i]
            if before >= 0 and self._find(cur[before], cur[i], &c):
                c.pos = before
                _push(heap, &size, c)
        i = 0
        while i >= 0:
            out.append(cur[i])
            i = nxt[i]
        return out

    def encode_chunks(self, chunks, dict cache, Py_ssize_t cache_max):
        """Ids for pretokenized chunks, memoised per chunk string."""
        cdef list out = []
        for chunk in chunks:
            hit = cache.get(chunk)
            if hit is None:
                raw = (<str>chunk).encode("utf-8")
                hit = self._merge(<bytes>raw, len(<bytes>raw))
                if len(cache) < cache_max:
                    cache[chunk] = hit
            out.extend(<list>hit)
        return out


cdef inline unsigned long long _ctx_key(const unsigned char[:] data,
                                        Py_ssize_t start, Py_ssize_t stop):
    cdef unsigned long long key = 1
    cdef Py_ssize_t j
    for j in range(start, stop):
        key = (key << 8) | data[j]
    return key


def ctx_key(data, Py_ssize_t start, Py_ssize_t stop):
    cdef const unsigned char[:] view = data
    return _ctx_key(view, start, stop)


def ngram_count(data, int order, dict pair_counts, dict totals):
    cdef const unsigned char[:] view = data
    cdef Py_ssize_t i, n = len(data)
    cdef unsigned long long key
    cdef object k, slot
    if order > CTX_ORDER_MAX:
        raise ValueError("order too large")
    for i in range(order, n):
        key = _ctx_key(view, i - order, i)
        k = key
        slot = (key << 8) | view[i]
        pair_counts[slot] = pair_counts.get(slot, 0) + 1
        totals[k] = totals.get(k, 0) + 1


def ngram_nll(data, int order, dict pair_counts, dict totals, double alpha):
    cdef const unsigned char[:] view = data
    cdef Py_ssize_t i, start, n = len(data)
    cdef unsigned long long key
    cdef double denom_alpha = alpha * 256.0
    cdef double total = 0.0, comp = 0.0, term, s
    cdef long long c, t
    if order > CTX_ORDER_MAX:
        raise ValueError("order too large")
    for i in range(n):
        start = i - order if i >= order else 0
        key = _ctx_key(view, start, i)
        c = pair_counts.get((key << 8) | view[i], 0)
        t = totals.get(key, 0)
        term = -log2((c + alpha) / (t + denom_alpha))
        s = total + term
        if fabs(total) >= fabs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
    return total + comp
