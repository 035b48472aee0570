# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitmask kernels; same contracts as ``_pykernels``."""

from libc.stdint cimport uint64_t

BACKEND = "cython"

MODES = ("I", "K", "I^K", "IuK")

cdef enum:
    MAX_OPENS = 64
    MAX_N = 24
    MAX_CHAIN = 8


cdef inline uint64_t _bad(int* vals, int n, uint64_t target) noexcept nogil:
    cdef uint64_t m = 0
    cdef int s
    for s in range(n):
        if not ((target >> vals[s]) & 1):
            m |= (<uint64_t>1) << s
    return m


cdef bint _oracle(uint64_t* bads, int nb, uint64_t* chain, int depth) nogil:
    cdef uint64_t keep, j, gi
    cdef uint64_t local[MAX_OPENS]
    cdef int i
    if depth == 1:
        keep = ~chain[0]
        for i in range(nb):
            if bads[i] & keep:
                return False
        return True
    gi = chain[0]
    j = gi
    while True:
        for i in range(nb):
            local[i] = bads[i] & ~j
        if _oracle(local, nb, chain + 1, depth - 1):
            return True
        if j == 0:
            return False
        j = (j - 1) & gi


cdef bint _cluster(uint64_t* hits, int nb, uint64_t gi, uint64_t gk, bint padded) nogil:
    cdef uint64_t j = gi, keep = ~gk, h
    cdef int i
    cdef bint ok
    while True:
        ok = True
        for i in range(nb):
            if padded:
                h = hits[i] | j
            else:
                h = hits[i] & ~j
            if not (h & keep):
                ok = False
                break
        if ok:
            return True
        if j == 0:
            return False
        j = (j - 1) & gi


def bad_mask(values, uint64_t target):
    cdef uint64_t m = 0
    cdef int s = 0
    for v in values:
        if not ((target >> <int>v) & 1):
            m |= (<uint64_t>1) << s
        s += 1
    return m


def oracle_bads(bads, chain):
    cdef uint64_t cb[MAX_OPENS]
    cdef uint64_t cc[MAX_CHAIN]
    cdef int nb = len(bads), depth = len(chain), i
    if nb > MAX_OPENS or depth > MAX_CHAIN or depth < 1:
        raise ValueError("oracle input exceeds kernel limits")
    for i in range(nb):
        cb[i] = bads[i]
    for i in range(depth):
        cc[i] = chain[i]
    return bool(_oracle(cb, nb, cc, depth))


def oracle_converges(values, int x, opens, chain):
    bads = tuple(bad_mask(values, u) for u in opens if (u >> x) & 1)
    return oracle_bads(bads, tuple(chain))


def cluster_search(hits, uint64_t gi, uint64_t gk, bint padded):
    cdef uint64_t ch[MAX_OPENS]
    cdef int nb = len(hits), i
    if nb > MAX_OPENS:
        raise ValueError("too many neighbourhoods")
    for i in range(nb):
        ch[i] = hits[i]
    return bool(_cluster(ch, nb, gi, gk, padded))


def axiom_filter_topologies(int k):
    cdef int nsub = 1 << k
    cdef int full = nsub - 1
    cdef uint64_t fam, required = (<uint64_t>1) | ((<uint64_t>1) << full)
    cdef uint64_t limit
    cdef int members[64]
    cdef int cnt, i, j, u, v
    cdef bint ok
    if k < 1 or k > 4:
        raise ValueError("axiom filter supports 1 <= k <= 4")
    limit = (<uint64_t>1) << nsub
    out = []
    fam = 0
    while fam < limit:
        if fam & required == required:
            cnt = 0
            for i in range(nsub):
                if (fam >> i) & 1:
                    members[cnt] = i
                    cnt += 1
            ok = True
            for i in range(cnt):
                u = members[i]
                for j in range(i + 1, cnt):
                    v = members[j]
                    if not ((fam >> (u | v)) & 1) or not ((fam >> (u & v)) & 1):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(fam)
        fam += 1
    return out


cdef int _load_space(opens, min_nbhd, int k, uint64_t* nbr, int* nbc, uint64_t* mins) except -1:
    cdef int x, c
    if k > 6 or len(opens) > MAX_OPENS:
        raise ValueError("space exceeds kernel limits")
    for x in range(k):
        mins[x] = min_nbhd[x]
        c = 0
        for u in opens:
            if (u >> x) & 1:
                nbr[x * MAX_OPENS + c] = u
                c += 1
        nbc[x] = c
    return 0


cdef inline void _next_function(int* vals, int n, int k) noexcept nogil:
    cdef int s
    for s in range(n):
        vals[s] += 1
        if vals[s] < k:
            return
        vals[s] = 0


def sweep_agreement(opens, min_nbhd, int k, int n, uint64_t gi, uint64_t gk):
    cdef uint64_t nbr[6 * MAX_OPENS]
    cdef int nbc[6]
    cdef uint64_t mins[6]
    cdef int vals[MAX_N]
    cdef uint64_t bads[MAX_OPENS]
    cdef uint64_t chains[4][2]
    cdef int depths[4]
    cdef uint64_t effs[4]
    cdef long total, code
    cdef long checks = 0
    cdef int x, i, mi
    cdef uint64_t b
    cdef bint fast, slow
    if n > MAX_N:
        raise ValueError("domain too large")
    _load_space(opens, min_nbhd, k, nbr, nbc, mins)
    chains[0][0] = gi; depths[0] = 1; effs[0] = gi
    chains[1][0] = gk; depths[1] = 1; effs[1] = gk
    chains[2][0] = gi; chains[2][1] = gk; depths[2] = 2; effs[2] = gi | gk
    chains[3][0] = gi | gk; depths[3] = 1; effs[3] = gi | gk
    for i in range(n):
        vals[i] = 0
    total = 1
    for i in range(n):
        total *= k
    out = []
    for code in range(total):
        for x in range(k):
            for i in range(nbc[x]):
                bads[i] = _bad(vals, n, nbr[x * MAX_OPENS + i])
            b = _bad(vals, n, mins[x])
            for mi in range(4):
                fast = (b & ~effs[mi]) == 0
                slow = _oracle(bads, nbc[x], chains[mi], depths[mi])
                checks += 1
                if fast != slow:
                    out.append((code, x, mi, bool(fast), bool(slow)))
        _next_function(vals, n, k)
    return checks, out


def sweep_cluster(opens, min_nbhd, int k, int n, uint64_t gi, uint64_t gk):
    cdef uint64_t nbr[6 * MAX_OPENS]
    cdef int nbc[6]
    cdef uint64_t mins[6]
    cdef int vals[MAX_N]
    cdef uint64_t hits[MAX_OPENS]
    cdef uint64_t full = ((<uint64_t>1) << n) - 1
    cdef uint64_t a
    cdef long total, code
    cdef long checks = 0
    cdef int x, i, pi
    cdef bint degenerate = (gi & ~gk) != 0
    cdef bint trace_cf, closed, found
    if n > MAX_N:
        raise ValueError("domain too large")
    _load_space(opens, min_nbhd, k, nbr, nbc, mins)
    for i in range(n):
        vals[i] = 0
    total = 1
    for i in range(n):
        total *= k
    out = []
    for code in range(total):
        for x in range(k):
            for i in range(nbc[x]):
                hits[i] = full & ~_bad(vals, n, nbr[x * MAX_OPENS + i])
            a = full & ~_bad(vals, n, mins[x])
            trace_cf = (a & ~gk) != 0
            for pi in range(2):
                closed = trace_cf or (pi == 1 and degenerate)
                found = _cluster(hits, nbc[x], gi, gk, pi == 1)
                checks += 1
                if closed != found:
                    out.append((code, x, pi == 1, bool(closed), bool(found)))
        _next_function(vals, n, k)
    return checks, out


def mode_open_search(min_nbhd, int k, uint64_t omask, lengths, const unsigned char[:] table):
    cdef int outside[6]
    cdef int inside[6]
    cdef uint64_t mins[6]
    cdef int digits[MAX_N]
    cdef int vals[MAX_N]
    cdef int r = 0, ni = 0, y, s, xi, length
    cdef long offset = 0, code, total
    for y in range(k):
        mins[y] = min_nbhd[y]
        if (omask >> y) & 1:
            inside[ni] = y
            ni += 1
        else:
            outside[r] = y
            r += 1
    if r == 0 or ni == 0:
        return None
    for length in lengths:
        if length > MAX_N:
            raise ValueError("word length exceeds kernel limits")
        total = 1
        for s in range(length):
            total *= r
            digits[s] = 0
            vals[s] = outside[0]
        for code in range(total):
            for xi in range(ni):
                if table[offset + <long>_bad(vals, length, mins[inside[xi]])]:
                    return length, tuple([vals[s] for s in range(length)]), inside[xi]
            _next_function(digits, length, r)
            for s in range(length):
                vals[s] = outside[digits[s]]
        offset += (<long>1) << length
    return None
