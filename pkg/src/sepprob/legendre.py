"""Legendre polynomial machinery built on the three-term recurrence.

Everything here works on [-1, 1] in the mapped variable.  Coefficient
vectors are maintained incrementally via

    (k+1) P_{k+1}(t) = (2k+1) t P_k(t) - k P_{k-1}(t)

so degree-d work costs O(d^2) coefficient operations instead of the O(d^3)
of expanding each polynomial from scratch.  P_k has dyadic coefficients;
we store the integer numerator vector N_k with P_k(t) = sum_j N_k[j] t^j / 2^k,
which keeps the exact path in pure integer arithmetic (the division by k+1
in the recurrence is exact).
"""

from __future__ import annotations

import os
import pickle
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterator

CACHE_ENV_VAR = "SEPPROB_CACHE_DIR"
_CACHE_FILE = "legendre-coeffs.pickle"


def coefficient_vectors(degree: int) -> Iterator[tuple[int, list[int]]]:
    """Yield (k, N_k) for k = 0..degree with P_k(t) = sum N_k[j] t^j / 2^k."""
    prev = [1]
    yield 0, prev
    if degree == 0:
        return
    cur = [0, 2]
    yield 1, cur
    for k in range(1, degree):
        nxt = [0] * (k + 2)
        c1 = 2 * (2 * k + 1)
        for j, v in enumerate(cur):
            nxt[j + 1] = c1 * v
        c2 = 4 * k
        for j, v in enumerate(prev):
            nxt[j] -= c2 * v
        q = k + 1
        nxt = [v // q for v in nxt]
        prev, cur = cur, nxt
        yield k + 1, cur


def coefficients(k: int) -> list[Fraction]:
    """Exact coefficient list of P_k (ascending powers of t)."""
    for kk, vec in coefficient_vectors(k):
        if kk == k:
            scale = Fraction(1, 2 ** k)
            return [v * scale for v in vec]
    raise AssertionError("unreachable")


def values_up_to(t, degree: int) -> list:
    """[P_0(t), ..., P_degree(t)] by the scalar three-term recurrence.

    Works for any field element ``t`` (Fraction, mpf, float): only ring
    operations and division by small integers are used.
    """
    vals = [t * 0 + 1]
    if degree == 0:
        return vals
    vals.append(t)
    for k in range(1, degree):
        vals.append(((2 * k + 1) * t * vals[k] - k * vals[k - 1]) / (k + 1))
    return vals


class CoefficientCache:
    """Per-run cache of integer coefficient vectors, persisted to disk.

    The on-disk file is replaced atomically (write to a temp file in the
    same directory, then rename), so concurrent CLI invocations can share a
    cache directory without corrupting it; readers always see a complete
    file.  Stale or unreadable caches are ignored, never trusted.
    """

    def __init__(self, directory: str | Path | None = None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV_VAR)
        self.directory = Path(directory) if directory else None
        self._vectors: list[list[int]] = []
        if self.directory is not None:
            self._load()

    @property
    def degree(self) -> int:
        return len(self._vectors) - 1

    def ensure(self, degree: int) -> list[list[int]]:
        """Grow the cache to ``degree`` and return vectors 0..degree."""
        if degree > self.degree:
            self._vectors = [vec for _, vec in coefficient_vectors(degree)]
            self._persist()
        return self._vectors[: degree + 1]

    def _cache_path(self) -> Path:
        return self.directory / _CACHE_FILE

    def _load(self):
        path = self._cache_path()
        try:
            with open(path, "rb") as f:
                data = pickle.load(f)
            if (
                isinstance(data, list)
                and data
                and data[0] == [1]
                and all(isinstance(v, list) for v in data)
            ):
                self._vectors = data
        except (OSError, pickle.UnpicklingError, EOFError):
            pass

    def _persist(self):
        if self.directory is None:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                pickle.dump(self._vectors, f, protocol=pickle.HIGHEST_PROTOCOL)
            os.replace(tmp, self._cache_path())
        except OSError:
            try:
                os.unlink(tmp)
            except OSError:
                pass
