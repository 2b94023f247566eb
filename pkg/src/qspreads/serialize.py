"""Certificate files for partial parallelisms.

Files are canonical JSON (sorted keys, no whitespace, trailing newline)
with a versioned schema, so a fixed construction seed reproduces them byte
for byte.  A sha256 over the canonical payload (minus the hash field)
makes any byte-level tampering detectable even in fields the geometric
re-validation would not notice, such as the embedded manifest.

Schema, version 1::

    {
      "schema_version": 1,
      "kind": "partial_parallelism",
      "tower": {"p": int, "e": int, "k": int, "n": int,
                 "modulus": [c0, c1, ..., 1]},         # low-to-high
      "spreads": [[[row, ...], ...], ...],             # spread -> subspace -> rows
      "manifest": {...},                               # reproducibility echo
      "sha256": "hex"
    }

Subspace rows hold F_q scalar indices in [0, q): plain residues for prime
q; for prime powers, index 0 is zero and index j >= 1 is the j-th power of
the tower's F_q generator.  Potentially large manifest integers (seeds,
counters) are encoded as decimal strings.
"""

from __future__ import annotations

import hashlib
import json

from . import __version__
from .errors import CertificationError
from .field import build_tower
from .linalg import Subspace, rref
from .spreads import (PartialParallelism, Spread, certify_parallelism,
                      spread_size)

SCHEMA_VERSION = 1


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def payload_hash(obj: dict) -> str:
    payload = {k: v for k, v in obj.items() if k != "sha256"}
    return hashlib.sha256(canonical_dumps(payload).encode()).hexdigest()


def parallelism_to_obj(pp: PartialParallelism) -> dict:
    obj = {
        "schema_version": SCHEMA_VERSION,
        "kind": "partial_parallelism",
        "tool_version": __version__,
        "tower": pp.tower_descriptor,
        "spreads": [
            [[list(row) for row in member.rows] for member in spread.members]
            for spread in pp.spreads
        ],
        "manifest": pp.meta,
    }
    obj["sha256"] = payload_hash(obj)
    return obj


def write_parallelism(path, pp: PartialParallelism) -> dict:
    obj = parallelism_to_obj(pp)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(obj))
        fh.write("\n")
    return obj


def _schema_error(msg: str):
    raise CertificationError(f"schema: {msg}")


def load_parallelism(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CertificationError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(obj, dict):
        _schema_error("top level is not an object")
    for key in ("schema_version", "kind", "tower", "spreads", "sha256"):
        if key not in obj:
            _schema_error(f"missing field {key!r}")
    if obj["schema_version"] != SCHEMA_VERSION:
        _schema_error(f"unsupported schema_version {obj['schema_version']!r}")
    if obj["kind"] != "partial_parallelism":
        _schema_error(f"unsupported kind {obj['kind']!r}")
    if obj["sha256"] != payload_hash(obj):
        raise CertificationError("checksum mismatch: file bytes were altered")
    return obj


def revalidate(obj: dict) -> PartialParallelism:
    """Rebuild the tower from the descriptor and recheck every invariant.

    The modulus from the file is itself revalidated (degree, primitivity),
    so certificates stay verifiable even if the default modulus choice ever
    changes.
    """
    tw = obj["tower"]
    for key in ("p", "e", "k", "n", "modulus"):
        if key not in tw:
            _schema_error(f"tower descriptor missing {key!r}")
    try:
        tower = build_tower(int(tw["p"]), int(tw["e"]), int(tw["k"]),
                            int(tw["n"]), modulus=tw["modulus"])
    except ValueError as exc:
        raise CertificationError(f"tower descriptor invalid: {exc}") from exc
    field = tower.scalar_field
    n, k, q = tower.n, tower.k, tower.q
    want_members = spread_size(n, k, q)
    spreads = []
    raw = obj["spreads"]
    if not isinstance(raw, list) or not raw:
        _schema_error("spreads must be a non-empty list")
    for si, spread_rows in enumerate(raw):
        if len(spread_rows) != want_members:
            raise CertificationError(
                f"spread {si} has {len(spread_rows)} members, expected "
                f"{want_members}")
        members = []
        for mi, rows in enumerate(spread_rows):
            if (not isinstance(rows, list) or len(rows) != k
                    or any(len(r) != n for r in rows)):
                raise CertificationError(
                    f"spread {si} member {mi}: expected {k} rows of length {n}")
            if any(not isinstance(v, int) or not 0 <= v < q
                   for r in rows for v in r):
                raise CertificationError(
                    f"spread {si} member {mi}: entries must be ints in [0, {q})")
            canon, rank = rref(field, rows)
            if rank != k or list(list(r) for r in canon[:k]) != rows:
                raise CertificationError(
                    f"spread {si} member {mi}: rows are not a canonical "
                    f"rank-{k} reduced basis")
            members.append(Subspace(field, n, tuple(tuple(r) for r in rows)))
        try:
            spreads.append(Spread(members))
        except CertificationError as exc:
            raise CertificationError(f"spread {si}: {exc}") from exc
    res = certify_parallelism(spreads)
    if not res:
        raise CertificationError(res.reason)
    return PartialParallelism(tuple(spreads), tower.descriptor(),
                              obj.get("manifest") or {})


def certify_file(path) -> PartialParallelism:
    """Load, checksum, and fully re-validate a certificate file."""
    return revalidate(load_parallelism(path))
