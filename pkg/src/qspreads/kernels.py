"""Numba kernels for scans that touch millions of GL(n, q) elements.

The enumeration logic mirrors linalg.gl_iter exactly (row-by-row extension,
rows in increasing packed-code order) so that kernel scans and the pure
stream visit the same matrices in the same order; tests pin that down on
small instances.  All tables come in as flat int64 numpy arrays.

Scans partition deterministically by first-row code range, so thread counts
never change the merged counters.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .errors import CertificationError
from .linalg import all_subspaces, gl_order_product


@njit(cache=True, nogil=True)
def _scan_patterns(n, q, qn, add, smul, dot, powq, member_of, bases, k, N,
                   queries, counters, first_lo, first_hi):
    """DFS over GL rows; classify every leaf matrix's transport pattern.

    counters[0] = matrices visited, counters[1] = matrices transporting at
    least one member, counters[2 + t] = matrices satisfying query t (a row
    of (i0, j0, i1, j1, i2, j2), i2 = -1 for pair queries).
    """
    rows = np.zeros(n, dtype=np.int64)
    span = np.zeros(qn, dtype=np.uint8)
    span[0] = 1
    elems = np.zeros(qn, dtype=np.int64)
    n_elems = 1
    sizes = np.zeros(n, dtype=np.int64)
    cand = np.zeros(n, dtype=np.int64)
    tr = np.zeros(N, dtype=np.int64)
    nq = queries.shape[0]
    depth = 0
    cand[0] = first_lo
    while True:
        top = first_hi if depth == 0 else qn
        code = cand[depth]
        # advance to the next non-span code at this depth
        while code < top and span[code]:
            code += 1
        if code >= top:
            depth -= 1
            if depth < 0:
                break
            # undo the span marks added when depth descended
            base = sizes[depth]
            for idx in range(base, n_elems):
                span[elems[idx]] = 0
            n_elems = base
            cand[depth] = rows[depth] + 1
            continue
        rows[depth] = code
        if depth == n - 1:
            # leaf: classify the matrix with rows[0..n-1]
            counters[0] += 1
            hit = False
            for i in range(N):
                w = 0
                b0 = bases[i * k]
                for t in range(n):
                    d = dot[rows[t] * qn + b0]
                    if d:
                        w += d * powq[t]
                j = member_of[w]
                ok = True
                for s in range(1, k):
                    bs = bases[i * k + s]
                    w2 = 0
                    for t in range(n):
                        d = dot[rows[t] * qn + bs]
                        if d:
                            w2 += d * powq[t]
                    if member_of[w2] != j:
                        ok = False
                        break
                if ok:
                    tr[i] = j
                    hit = True
                else:
                    tr[i] = -1
            if hit:
                counters[1] += 1
            for tq in range(nq):
                if tr[queries[tq, 0]] != queries[tq, 1]:
                    continue
                if tr[queries[tq, 2]] != queries[tq, 3]:
                    continue
                i2 = queries[tq, 4]
                if i2 >= 0 and tr[i2] != queries[tq, 5]:
                    continue
                counters[2 + tq] += 1
            cand[depth] = code + 1
        else:
            # descend: extend the span by the new row
            sizes[depth] = n_elems
            base = n_elems
            for c in range(1, q):
                rc = smul[c * qn + code]
                for idx in range(base):
                    t = add[elems[idx] * qn + rc]
                    span[t] = 1
                    elems[n_elems] = t
                    n_elems += 1
            depth += 1
            cand[depth] = 1


@njit(cache=True, nogil=True)
def _greedy_k2(n, q, qn, add, smul, dot, powq, pairid, bases, N,
               used, out_rows, stop_at):
    """Greedy scan for k = 2: a candidate is accepted iff none of its image
    subspaces (identified through the pair -> subspace id table) was used by
    an earlier accepted candidate.  Returns (accepted, scanned)."""
    rows = np.zeros(n, dtype=np.int64)
    span = np.zeros(qn, dtype=np.uint8)
    span[0] = 1
    elems = np.zeros(qn, dtype=np.int64)
    n_elems = 1
    sizes = np.zeros(n, dtype=np.int64)
    cand = np.zeros(n, dtype=np.int64)
    ids = np.zeros(N, dtype=np.int64)
    accepted = 0
    scanned = 0
    depth = 0
    cand[0] = 1
    while True:
        top = qn
        code = cand[depth]
        while code < top and span[code]:
            code += 1
        if code >= top:
            depth -= 1
            if depth < 0:
                break
            base = sizes[depth]
            for idx in range(base, n_elems):
                span[elems[idx]] = 0
            n_elems = base
            cand[depth] = rows[depth] + 1
            continue
        rows[depth] = code
        if depth == n - 1:
            scanned += 1
            ok = True
            for i in range(N):
                b0 = bases[2 * i]
                b1 = bases[2 * i + 1]
                w1 = 0
                w2 = 0
                for t in range(n):
                    d = dot[rows[t] * qn + b0]
                    if d:
                        w1 += d * powq[t]
                    d = dot[rows[t] * qn + b1]
                    if d:
                        w2 += d * powq[t]
                sid = pairid[w1 * qn + w2]
                if used[sid]:
                    ok = False
                    break
                ids[i] = sid
            if ok:
                for i in range(N):
                    used[ids[i]] = 1
                for t in range(n):
                    out_rows[accepted * n + t] = rows[t]
                accepted += 1
                if accepted >= stop_at:
                    return accepted, scanned
            cand[depth] = code + 1
        else:
            sizes[depth] = n_elems
            base = n_elems
            for c in range(1, q):
                rc = smul[c * qn + code]
                for idx in range(base):
                    t = add[elems[idx] * qn + rc]
                    span[t] = 1
                    elems[n_elems] = t
                    n_elems += 1
            depth += 1
            cand[depth] = 1
    return accepted, scanned


def _frame_arrays(frame):
    tabs = frame.tabs
    qn = tabs.qn
    add = np.asarray(tabs.add, dtype=np.int64)
    smul = np.asarray(tabs.smul, dtype=np.int64)
    dot = np.asarray(tabs.dot, dtype=np.int64)
    powq = np.asarray(tabs.powq, dtype=np.int64)
    member_of = np.asarray(frame.member_of, dtype=np.int64)
    bases = np.asarray([b for basis in frame.bases for b in basis],
                       dtype=np.int64)
    return qn, add, smul, dot, powq, member_of, bases


def scan_transport_counts(frame, queries, threads: int = 1):
    """Kernel-backed variant of search.scan_transport_counts."""
    qn, add, smul, dot, powq, member_of, bases = _frame_arrays(frame)
    n, q, k, N = frame.n, frame.q, frame.k, frame.N
    qarr = np.full((max(len(queries), 1), 6), -1, dtype=np.int64)
    for t, qr in enumerate(queries):
        flat = [v for pair in qr for v in pair]
        if len(flat) == 4:
            flat += [-1, -1]
        qarr[t, :] = flat
    nq = len(queries)
    threads = max(1, threads)
    ranges = _first_row_chunks(qn, threads)
    results = []

    def run(chunk):
        counters = np.zeros(2 + max(nq, 1), dtype=np.int64)
        _scan_patterns(n, q, qn, add, smul, dot, powq, member_of, bases, k, N,
                       qarr[:nq] if nq else qarr[:0], counters,
                       chunk[0], chunk[1])
        return counters

    if threads == 1 or len(ranges) == 1:
        results = [run(ranges[0])] if len(ranges) == 1 else [run(r) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, ranges))
    merged = np.sum(np.stack(results), axis=0)
    total = int(merged[0])
    union = int(merged[1])
    counts = [int(v) for v in merged[2:2 + nq]]
    return total, union, counts


def _first_row_chunks(qn, threads):
    lo, hi = 1, qn
    if threads <= 1 or hi - lo <= threads:
        return [(lo, hi)]
    step = (hi - lo + threads - 1) // threads
    return [(s, min(s + step, hi)) for s in range(lo, hi, step)]


def greedy_scan(frame, stop_at: int):
    """Kernel-backed exhaustive greedy. Only k = 2 has a kernel; the caller
    falls back to the pure path otherwise."""
    from .linalg import Matrix

    if frame.k != 2:
        raise CertificationError("kernel greedy only supports k = 2")
    qn, add, smul, dot, powq, member_of, bases = _frame_arrays(frame)
    n, q, N = frame.n, frame.q, frame.N
    pairid, n_sub = _pair_id_table(frame)
    used = np.zeros(n_sub, dtype=np.uint8)
    out_rows = np.zeros(stop_at * n, dtype=np.int64)
    accepted, scanned = _greedy_k2(n, q, qn, add, smul, dot, powq, pairid,
                                   bases, N, used, out_rows, stop_at)
    tabs = frame.tabs
    matrices = []
    for a in range(accepted):
        rows = [tabs.digits[int(out_rows[a * n + t])] for t in range(n)]
        matrices.append(Matrix(frame.field, rows))
    if accepted < stop_at and scanned != gl_order_product(n, q):
        raise CertificationError(
            f"kernel scan visited {scanned} matrices, formula says "
            f"{gl_order_product(n, q)}")
    return matrices, scanned


def _pair_id_table(frame):
    """pairid[v * qn + w] = subspace id of span{v, w} for independent v, w."""
    tabs = frame.tabs
    qn, q = tabs.qn, frame.q
    pairid = np.full(qn * qn, -1, dtype=np.int64)
    count = 0
    for sub in all_subspaces(frame.n, 2, frame.field):
        vecs = [tabs.pack(v) for v in sub.vectors()]
        nonzero = [v for v in vecs if v]
        for v in nonzero:
            scaled = {tabs.smul[c * qn + v] for c in range(1, q)}
            for w in nonzero:
                if w not in scaled:
                    pairid[v * qn + w] = count
        count += 1
    return pairid, count
