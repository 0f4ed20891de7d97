"""Append-only JSON-lines cache for density polynomials and command results."""

from __future__ import annotations

import fcntl
import json
import logging
import os
import time
from contextlib import contextmanager
from fractions import Fraction

from .lattice import AdmissibleFunction, HermMatrix, jordan_exponents, sort_weight

log = logging.getLogger(__name__)

#: environment variable naming the default cache file
CACHE_ENV = "HERMDEN_CACHE"


def default_cache_path() -> str | None:
    return os.environ.get(CACHE_ENV) or None


def canonical_target(T: HermMatrix, phi: AdmissibleFunction) -> tuple[str, AdmissibleFunction]:
    """Canonical text for ``(T, phi)`` up to the symmetries the density respects.

    With a single effective weight the density only sees the isometry class
    of ``T``, so the Jordan exponents suffice.  Mixed weights only allow
    permutations inside each weight class, so the weight-sorted entries are
    used verbatim.
    """
    Ts, phis = sort_weight(T, phi)
    if len(set(phis.effective_weight())) <= 1:
        body = "J" + ",".join(map(str, jordan_exponents(Ts)))
    else:
        body = "M" + json.dumps(Ts.to_json(), separators=(",", ":"))
    return body, phis


def make_key(kind: str, ctx, **parts) -> str:
    """Deterministic key string; ``parts`` are rendered in sorted order."""
    fields = [kind, f"p={ctx.p}", f"u={ctx.u}"]
    fields += [f"{k}={parts[k]}" for k in sorted(parts)]
    return "|".join(fields)


def encode_fraction(x: Fraction) -> list[str]:
    x = Fraction(x)
    return [str(x.numerator), str(x.denominator)]


def decode_fraction(v) -> Fraction:
    return Fraction(int(v[0]), int(v[1]))


class ResultCache:
    """A key-value store backed by one JSON object per line.

    Readers load the whole file once; writers append under an exclusive
    ``flock``.  A damaged tail (for example after a crash mid-write) is
    truncated when the file is opened.
    """

    def __init__(self, path: str):
        self.path = path
        self._data: dict[str, dict] = {}
        self.hits = 0
        self.misses = 0
        self._load()

    @contextmanager
    def _locked(self, mode):
        with open(self.path, mode) as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield fh
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _load(self):
        if not os.path.exists(self.path):
            return
        with self._locked("r+b") as fh:
            good_end = 0
            bad_at = None
            for line in fh:
                try:
                    rec = json.loads(line.decode("utf-8"))
                    key, value = rec["key"], rec["value"]
                except (ValueError, KeyError, TypeError, UnicodeDecodeError):
                    if bad_at is None:
                        bad_at = good_end
                    continue
                if bad_at is not None:
                    log.warning("skipping corrupt cache line at byte %d of %s", bad_at, self.path)
                    bad_at = None
                self._data[key] = rec
                good_end = fh.tell()
            if bad_at is not None:
                log.warning("truncating corrupt cache tail at byte %d of %s", bad_at, self.path)
                fh.truncate(bad_at)

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data

    def get(self, key: str):
        rec = self._data.get(key)
        if rec is None:
            self.misses += 1
            return None
        self.hits += 1
        return rec["value"]

    def put(self, key: str, value, meta: dict | None = None):
        if key in self._data:
            return
        rec = {"key": key, "value": value, "meta": dict(meta or {}, timestamp=time.time())}
        line = json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n"
        with self._locked("ab") as fh:
            fh.write(line.encode("utf-8"))
        self._data[key] = rec
