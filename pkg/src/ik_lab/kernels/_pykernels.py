"""Pure-Python bitmask kernels (fallback backend).

Conventions shared with the compiled backend:

* a function on ``Finite(n)`` is a sequence of point indices;
* a point set / index set is an int bitmask;
* a *chain* lists generator masks of a nested mode, outermost first;
  ``chain[:-1]`` are the witness (Sup) ideals and ``chain[-1]`` is the
  base ideal.  Each ideal is the down-set of its mask.

Modifying a function off a witness ``M`` (setting it to the candidate
limit ``x``) removes ``M``'s complement ``J`` from every bad set of a
neighbourhood of ``x``, so the oracles carry bad/hit vectors instead of
rebuilding the function at every step.
"""

from __future__ import annotations

BACKEND = "python"

MODES = ("I", "K", "I^K", "IuK")


def bad_mask(values, target: int) -> int:
    m = 0
    for s, v in enumerate(values):
        if not (target >> v) & 1:
            m |= 1 << s
    return m


def _submasks(mask: int):
    j = mask
    while True:
        yield j
        if j == 0:
            return
        j = (j - 1) & mask


def oracle_bads(bads: tuple[int, ...], chain: tuple[int, ...]) -> bool:
    """Definition-faithful convergence on bad-set vectors (one per open around x)."""
    if len(chain) == 1:
        keep = ~chain[0]
        return all(b & keep == 0 for b in bads)
    rest = chain[1:]
    for j in _submasks(chain[0]):
        drop = ~j
        if oracle_bads(tuple(b & drop for b in bads), rest):
            return True
    return False


def oracle_converges(values, x: int, opens, chain) -> bool:
    bads = tuple(bad_mask(values, u) for u in opens if (u >> x) & 1)
    return oracle_bads(bads, tuple(chain))


def cluster_search(hits: tuple[int, ...], gi: int, gk: int, padded: bool) -> bool:
    """Exists a witness ``M`` (complement ``J`` inside ``gi``) with every hit set K-positive."""
    keep = ~gk
    for j in _submasks(gi):
        if padded:
            ok = all((h | j) & keep for h in hits)
        else:
            ok = all((h & ~j) & keep for h in hits)
        if ok:
            return True
    return False


def axiom_filter_topologies(k: int) -> list[int]:
    """Every family of subsets of ``k`` points closed under the topology axioms.

    A family is an int whose bit ``m`` says subset ``m`` is open.
    """
    nsub = 1 << k
    full = nsub - 1
    required = 1 | (1 << full)
    out = []
    for fam in range(1 << nsub):
        if fam & required != required:
            continue
        members = [m for m in range(nsub) if (fam >> m) & 1]
        ok = True
        for i, u in enumerate(members):
            for v in members[i + 1 :]:
                if not (fam >> (u | v)) & 1 or not (fam >> (u & v)) & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(fam)
    return out


def _functions(k: int, n: int):
    vals = [0] * n
    for code in range(k**n):
        c = code
        for s in range(n):
            vals[s] = c % k
            c //= k
        yield code, vals


def sweep_agreement(opens, min_nbhd, k: int, n: int, gi: int, gk: int):
    """Fast path vs oracle over all ``k**n`` functions, all points, modes ``MODES``.

    Returns ``(checks, disagreements)`` with disagreements as
    ``(function_code, x, mode_index, fast, oracle)``.
    """
    chains = ((gi,), (gk,), (gi, gk), (gi | gk,))
    effs = (gi, gk, gi | gk, gi | gk)
    nbs = [[u for u in opens if (u >> x) & 1] for x in range(k)]
    memo: dict = {}
    checks = 0
    bad_list = []
    for code, vals in _functions(k, n):
        for x in range(k):
            bads = tuple(bad_mask(vals, u) for u in nbs[x])
            b = bad_mask(vals, min_nbhd[x])
            for mi in range(4):
                fast = b & ~effs[mi] == 0
                key = (bads, chains[mi])
                slow = memo.get(key)
                if slow is None:
                    slow = memo[key] = oracle_bads(bads, chains[mi])
                checks += 1
                if fast != slow:
                    bad_list.append((code, x, mi, fast, slow))
    return checks, bad_list


def sweep_cluster(opens, min_nbhd, k: int, n: int, gi: int, gk: int):
    """Closed-form cluster membership vs witness search, both semantics.

    Returns ``(checks, mismatches)`` with mismatches as
    ``(function_code, x, padded, closed_form, search)``.
    """
    nbs = [[u for u in opens if (u >> x) & 1] for x in range(k)]
    full = (1 << n) - 1
    degenerate = gi & ~gk != 0
    memo: dict = {}
    checks = 0
    out = []
    for code, vals in _functions(k, n):
        for x in range(k):
            hits = tuple(full & ~bad_mask(vals, u) for u in nbs[x])
            a = full & ~bad_mask(vals, min_nbhd[x])
            trace_cf = a & ~gk != 0
            for padded in (False, True):
                closed = trace_cf or (padded and degenerate)
                key = (hits, padded)
                found = memo.get(key)
                if found is None:
                    found = memo[key] = cluster_search(hits, gi, gk, padded)
                checks += 1
                if closed != found:
                    out.append((code, x, padded, closed, found))
    return checks, out


def mode_open_search(min_nbhd, k: int, omask: int, lengths, table):
    """First word valued outside ``omask`` that converges to a point of ``omask``.

    Words of each length ``L`` in ``lengths`` are tried in order; a word
    converges to ``x`` when ``table[offset(L) + bad]`` is true, ``bad``
    being the positions whose value misses ``min_nbhd[x]``.  Returns
    ``(L, values, x)`` or ``None``.
    """
    outside = [y for y in range(k) if not (omask >> y) & 1]
    inside = [x for x in range(k) if (omask >> x) & 1]
    if not outside or not inside:
        return None
    r = len(outside)
    offset = 0
    for length in lengths:
        vals = [0] * length
        for code in range(r**length):
            c = code
            for s in range(length):
                vals[s] = outside[c % r]
                c //= r
            for x in inside:
                if table[offset + bad_mask(vals, min_nbhd[x])]:
                    return length, tuple(vals), x
        offset += 1 << length
    return None
