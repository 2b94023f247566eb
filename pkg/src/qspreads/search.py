"""Greedy construction of partial parallelisms over the GL(n, q) candidate
stream, plus exact enumeration of the generating-set union.

A candidate matrix M yields the spread {M(V_i)}; two candidates collide
exactly when their spreads share a member, i.e. when M2^-1 M1 carries some
V_i onto some V_j.  The greedy scan accepts a candidate iff its spread is
disjoint from everything accepted so far, which on the (vertex-transitive)
collision graph guarantees at least |GL(n,q)| / |union of transporter sets|
accepted spreads in exhaustive mode.  The graph itself is never built:
adjacency is evaluated as key-set disjointness against accepted spreads.

Transport bookkeeping runs on packed vector codes: the standard spread
member containing a nonzero vector is just its field power index mod N, so
"where does M send V_i" costs k matrix-vector products and table lookups.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import bounds
from .errors import BudgetExceededError, CertificationError
from .field import FieldTower
from .linalg import (DEFAULT_GL_BUDGET, Matrix, code_tables, gl_iter,
                     gl_order_product, mat_inv, random_gl)
from .spreads import (PartialParallelism, Spread, certify_parallelism,
                      desarguesian_spread, spread_image)

_PURE_SCAN_CAP = 200_000  # above this many matrices, scans go to the kernels


@dataclass
class SearchConfig:
    mode: str = "exhaustive"  # or "random"
    seed: int = 0
    sample_limit: int | None = None
    workers: int = 1
    gl_budget: int = DEFAULT_GL_BUDGET
    ambient: tuple[int, int, int] | None = None  # (n, k, q) echo, validated

    def __post_init__(self):
        if self.mode not in ("exhaustive", "random"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "random" and not self.sample_limit:
            raise ValueError("random mode needs a sample_limit")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class GeneratingSetStats:
    """Exact size data for the Cayley generating set of a base spread."""

    n: int
    k: int
    q: int
    union_size: int
    gl_order: int

    @property
    def degree(self) -> int:
        return self.union_size - 1  # identity removed

    @property
    def thm31_bound(self) -> Fraction:
        return Fraction(self.gl_order, self.union_size)


class SpreadFrame:
    """The standard spread of a tower plus the packed-code lookup tables
    used by transport tests and scans."""

    def __init__(self, tower: FieldTower):
        self.tower = tower
        self.field = tower.scalar_field
        self.n, self.k, self.q, self.N = tower.n, tower.k, tower.q, tower.N
        self.base = desarguesian_spread(tower)
        self.tabs = code_tables(self.field, self.n)
        qn = self.tabs.qn
        # member index of every nonzero vector code: power index mod N
        member_of = [-1] * qn
        theta = tower.subfield_basis_qk()
        bases = []
        for s in range(tower.m):
            code = self.tabs.pack(tower.coords_over_q(s))
            member_of[code] = s % tower.N
        for i in range(tower.N):
            wi = i % tower.m
            bases.append(tuple(
                self.tabs.pack(tower.coords_over_q(tower.mul(wi, t)))
                for t in theta))
        self.member_of = member_of
        self.bases = tuple(bases)
        self.identity_rows = tuple(
            self.tabs.pack(row) for row in Matrix.identity(self.field, self.n).rows)

    # -- per-matrix transport ------------------------------------------------

    def transport_pattern(self, m: Matrix) -> tuple[int, ...]:
        """For each member index i, the j with M(V_i) = V_j, else -1."""
        return self._pattern(m.packed_rows)

    def _pattern(self, packed_rows) -> tuple[int, ...]:
        tabs = self.tabs
        dot, powq, qn = tabs.dot, tabs.powq, tabs.qn
        member_of = self.member_of
        n, k = self.n, self.k
        out = []
        for basis in self.bases:
            w = 0
            b0 = basis[0]
            for t in range(n):
                d = dot[packed_rows[t] * qn + b0]
                if d:
                    w += d * powq[t]
            j = member_of[w]
            ok = True
            for s in range(1, k):
                bs = basis[s]
                w = 0
                for t in range(n):
                    d = dot[packed_rows[t] * qn + bs]
                    if d:
                        w += d * powq[t]
                if member_of[w] != j:
                    ok = False
                    break
            out.append(j if ok else -1)
        return tuple(out)

    def transports_any(self, m: Matrix) -> bool:
        """True iff M carries some member of the base spread onto a member."""
        tabs = self.tabs
        dot, powq, qn = tabs.dot, tabs.powq, tabs.qn
        member_of = self.member_of
        packed = m.packed_rows
        n, k = self.n, self.k
        for basis in self.bases:
            w = 0
            b0 = basis[0]
            for t in range(n):
                d = dot[packed[t] * qn + b0]
                if d:
                    w += d * powq[t]
            j = member_of[w]
            ok = True
            for s in range(1, k):
                bs = basis[s]
                w = 0
                for t in range(n):
                    d = dot[packed[t] * qn + bs]
                    if d:
                        w += d * powq[t]
                if member_of[w] != j:
                    ok = False
                    break
            if ok:
                return True
        return False

    def image_masks(self, m: Matrix) -> list[int]:
        """Span bitmasks of the image subspaces {M(V_i)}; a complete,
        cheap-to-hash invariant used by the greedy disjointness test."""
        tabs = self.tabs
        dot, powq, qn = tabs.dot, tabs.powq, tabs.qn
        packed = m.packed_rows
        n = self.n
        masks = []
        for basis in self.bases:
            gens = []
            for b in basis:
                w = 0
                for t in range(n):
                    d = dot[packed[t] * qn + b]
                    if d:
                        w += d * powq[t]
                gens.append(w)
            masks.append(tabs.span_mask(gens))
        return masks


_frame_cache: dict[int, SpreadFrame] = {}


def base_frame(tower: FieldTower) -> SpreadFrame:
    frame = _frame_cache.get(id(tower))
    if frame is None:
        frame = SpreadFrame(tower)
        _frame_cache[id(tower)] = frame
    return frame


def in_generating_set(m: Matrix, frame: SpreadFrame) -> bool:
    """True iff m is a non-identity matrix carrying some base-spread member
    onto a base-spread member."""
    if m.packed_rows == frame.identity_rows:
        return False
    return frame.transports_any(m)


def symmetric_closure_check(m: Matrix, frame: SpreadFrame) -> bool:
    """Membership of the generating set agrees for m and its inverse."""
    return in_generating_set(m, frame) == in_generating_set(mat_inv(m), frame)


# ---------------------------------------------------------------------------
# exact scans over GL(n, q)


def scan_transport_counts(tower: FieldTower, queries=(), *,
                          budget: int = DEFAULT_GL_BUDGET,
                          threads: int = 1,
                          force_pure: bool = False):
    """One pass over GL(n, q) classifying every matrix's transport pattern.

    Returns (total, union_size, query_counts) where query_counts[t] counts
    the matrices transporting every (i, j) pair in queries[t].  Queries are
    tuples of 2 or 3 (i, j) pairs.
    """
    frame = base_frame(tower)
    order = gl_order_product(frame.n, frame.q)
    if order > budget:
        raise BudgetExceededError(
            f"|GL({frame.n},{frame.q})| = {order} exceeds budget {budget}")
    queries = [tuple(qr) for qr in queries]
    for qr in queries:
        if len(qr) not in (2, 3):
            raise ValueError("queries must hold 2 or 3 (i, j) pairs")
        for (i, j) in qr:
            if not (0 <= i < frame.N and 0 <= j < frame.N):
                raise ValueError(f"member index out of range in query {qr}")
    if force_pure or order <= _PURE_SCAN_CAP:
        return _scan_pure(frame, queries)
    from . import kernels
    return kernels.scan_transport_counts(frame, queries, threads=threads)


def _scan_pure(frame: SpreadFrame, queries):
    total = 0
    union = 0
    counts = [0] * len(queries)
    pattern = frame._pattern
    for m in gl_iter(frame.n, frame.field):
        tr = pattern(m.packed_rows)
        total += 1
        hit = False
        for j in tr:
            if j >= 0:
                hit = True
                break
        if hit:
            union += 1
        for t, qr in enumerate(queries):
            ok = True
            for (i, j) in qr:
                if tr[i] != j:
                    ok = False
                    break
            if ok:
                counts[t] += 1
    return total, union, counts


def union_size_exact(tower: FieldTower, *, budget: int = DEFAULT_GL_BUDGET,
                     threads: int = 1,
                     force_pure: bool = False) -> GeneratingSetStats:
    """Exact |union of transporter sets| by full enumeration of GL(n, q).

    The identity is included in the union (it transports every member), so
    the Cayley degree is union_size - 1.
    """
    frame = base_frame(tower)
    total, union, _ = scan_transport_counts(
        tower, (), budget=budget, threads=threads, force_pure=force_pure)
    order = gl_order_product(frame.n, frame.q)
    if total != order:
        raise CertificationError(
            f"GL scan visited {total} matrices, formula says {order}")
    return GeneratingSetStats(frame.n, frame.k, frame.q, union, order)


# ---------------------------------------------------------------------------
# greedy construction


def greedy_construct(cfg: SearchConfig, tower: FieldTower) -> PartialParallelism:
    """Scan candidates in a deterministic order and keep every matrix whose
    spread avoids all previously accepted spreads.

    Exhaustive mode scans all of GL(n, q) in stream order and therefore
    outputs a maximal family of size >= ceil(|GL| / union_size).  Random
    mode scans cfg.sample_limit seeded candidates; a fixed seed reproduces
    the output bit for bit.  The scan stops early once the absolute upper
    bound of disjoint spreads is reached.
    """
    frame = base_frame(tower)
    n, k, q = frame.n, frame.k, frame.q
    if cfg.ambient is not None and tuple(cfg.ambient) != (n, k, q):
        raise ValueError(
            f"config ambient {cfg.ambient} does not match tower ({n},{k},{q})")
    stop_at = bounds.gaussian_binomial(n - 1, k - 1, q) if k < n else 1
    order = gl_order_product(n, q)

    if cfg.mode == "exhaustive" and order > _PURE_SCAN_CAP:
        if order > cfg.gl_budget:
            raise BudgetExceededError(
                f"|GL({n},{q})| = {order} exceeds budget {cfg.gl_budget}")
        from . import kernels
        accepted, scanned = kernels.greedy_scan(frame, stop_at)
        kernel_used = True
    else:
        if cfg.mode == "exhaustive":
            stream = gl_iter(n, frame.field, budget=cfg.gl_budget)
            limit = None
        else:
            rng = random.Random(cfg.seed)
            limit = cfg.sample_limit

            def _stream():
                for _ in range(limit):
                    yield random_gl(n, frame.field, rng)

            stream = _stream()
        accepted, scanned = _greedy_pure(frame, stream, stop_at, cfg.workers)
        kernel_used = False

    spreads = []
    for m in accepted:
        spreads.append(spread_image(m, frame.base))
    res = certify_parallelism(spreads)
    if not res:
        raise CertificationError(f"greedy output failed certification: {res.reason}")
    meta = {
        "mode": cfg.mode,
        "seed": str(cfg.seed),
        "limit": str(cfg.sample_limit) if cfg.sample_limit else None,
        "workers": cfg.workers,
        "candidates_scanned": str(scanned),
        "accepted": len(spreads),
        "kernel": kernel_used,
        "base_spread": "standard",
        "matrices": [[list(row) for row in m.rows] for m in accepted],
    }
    return PartialParallelism(tuple(spreads), tower.descriptor(), meta)


def _greedy_pure(frame: SpreadFrame, stream, stop_at: int, workers: int):
    used: set[int] = set()
    accepted: list[Matrix] = []
    scanned = 0
    image_masks = frame.image_masks

    def consider(m, masks):
        for mask in masks:
            if mask in used:
                return False
        used.update(masks)
        accepted.append(m)
        return True

    if workers <= 1:
        for m in stream:
            scanned += 1
            consider(m, image_masks(m))
            if len(accepted) >= stop_at:
                break
    else:
        # workers compute image masks in batches; acceptance is arbitrated
        # in stream order, so the result matches the single-threaded run
        batch_size = 256
        done = False
        with ThreadPoolExecutor(max_workers=workers) as pool:
            while not done:
                batch = []
                for m in stream:
                    batch.append(m)
                    if len(batch) >= batch_size:
                        break
                if not batch:
                    break
                masks_list = list(pool.map(image_masks, batch))
                for m, masks in zip(batch, masks_list):
                    scanned += 1
                    consider(m, masks)
                    if len(accepted) >= stop_at:
                        done = True
                        break
    return accepted, scanned
