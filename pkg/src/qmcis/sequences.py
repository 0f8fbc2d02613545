"""Deterministic low-discrepancy point sets (Halton, Sobol) and a seeded
pseudo-random baseline.

All generators start at sequence index 1, so the all-zeros point is never
emitted.  Every coordinate lies in [0, 1).  Regenerating with identical
parameters is bit-reproducible.

The pseudo-random baseline is fixed permanently to numpy's PCG64 (128-bit
state, counter-based jumps) seeded through ``np.random.Generator``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

MAX_DIM = 16

# First 16 primes, Halton bases for coordinates 1..16.
_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)

_SOBOL_BITS = 32


@dataclass(frozen=True)
class PointSet:
    """An ordered set of n points in [0,1)^d with generator provenance.

    ``source`` records the generator kind ('halton', 'sobol', 'uniform-prng'
    or 'explicit') together with its parameters, enough to regenerate the
    set bit-identically.
    """

    dim: int
    points: np.ndarray  # shape (n, dim), read-only
    source: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim})")
        if pts.shape[0] < 1:
            raise ValueError("a point set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or infinity")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("coordinates must lie in [0, 1]")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _check_dim(d: int):
    if not 1 <= d <= MAX_DIM:
        raise ValueError(f"dimension {d} outside supported range 1..{MAX_DIM}")


def _radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of each index in the given base."""
    out = np.zeros(indices.shape, dtype=np.float64)
    scale = 1.0 / base
    rem = indices.copy()
    while rem.max() > 0:
        out += scale * (rem % base)
        rem //= base
        scale /= base
    return out


def halton(n: int, d: int) -> PointSet:
    """First ``n`` Halton points in dimension ``d`` (prime bases 2, 3, 5, ...).

    Indexing starts at 1: point i has coordinate j equal to the radical
    inverse of i in the j-th prime base.  The d=1 case is the van der
    Corput sequence in base 2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_dim(d)
    idx = np.arange(1, n + 1, dtype=np.int64)
    pts = np.column_stack([_radical_inverse(idx, _PRIMES[j]) for j in range(d)])
    return PointSet(d, pts, {"kind": "halton", "n": n, "dim": d,
                             "bases": list(_PRIMES[:d])})


def _load_joe_kuo() -> dict:
    with resources.files("qmcis.data").joinpath("joe_kuo_16.json").open() as fh:
        return json.load(fh)


def _direction_numbers(d: int) -> np.ndarray:
    """Direction-number matrix V of shape (d, _SOBOL_BITS), entries are
    _SOBOL_BITS-bit integers with the leading digit at the top bit."""
    table = _load_joe_kuo()
    entries = {e["dim"]: e for e in table["entries"]}
    V = np.zeros((d, _SOBOL_BITS), dtype=np.uint64)
    # Coordinate 1: van der Corput in base 2, v_k = 2^(bits-k).
    for k in range(_SOBOL_BITS):
        V[0, k] = 1 << (_SOBOL_BITS - 1 - k)
    for j in range(2, d + 1):
        e = entries[j]
        poly, m = e["poly"], list(e["m"])
        s = poly.bit_length() - 1
        # Extend the initial values by the standard recurrence.
        for k in range(s, _SOBOL_BITS):
            new = m[k - s] ^ (m[k - s] << s)
            for i in range(1, s):
                if (poly >> (s - i)) & 1:
                    new ^= m[k - i] << i
            m.append(new)
        for k in range(_SOBOL_BITS):
            V[j - 1, k] = m[k] << (_SOBOL_BITS - 1 - k)
    return V


def sobol(n: int, d: int) -> PointSet:
    """First ``n`` Sobol points in dimension ``d`` (Gray-code construction).

    Direction numbers come from the embedded Joe-Kuo table
    (``data/joe_kuo_16.json``).  Indexing starts at 1, excluding the
    origin; the first coordinate is the van der Corput sequence in base 2
    in Gray-code order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_dim(d)
    if n > 2**31:
        raise ValueError("n exceeds the supported 2^31 points")
    V = _direction_numbers(d)
    idx = np.arange(1, n + 1, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    X = np.zeros((n, d), dtype=np.uint64)
    for k in range(_SOBOL_BITS):
        mask = (gray >> np.uint64(k)) & np.uint64(1)
        # XOR in the k-th direction number wherever Gray bit k is set.
        X ^= mask[:, None] * V[None, :, k]
    pts = X.astype(np.float64) * 2.0**-_SOBOL_BITS
    return PointSet(d, pts, {"kind": "sobol", "n": n, "dim": d,
                             "table": "joe_kuo_16"})


def uniform_random(n: int, d: int, seed: int) -> PointSet:
    """``n`` i.i.d.-style uniform points from a seeded PCG64 generator."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.random((n, d))
    return PointSet(d, pts, {"kind": "uniform-prng", "n": n, "dim": d,
                             "seed": int(seed), "bit_generator": "PCG64"})


def generate(kind: str, n: int, d: int, seed: int | None = None) -> PointSet:
    """Dispatch on generator kind ('halton' | 'sobol' | 'uniform')."""
    if kind == "halton":
        return halton(n, d)
    if kind == "sobol":
        return sobol(n, d)
    if kind == "uniform":
        if seed is None:
            raise ValueError("uniform generator requires a seed")
        return uniform_random(n, d, seed)
    raise ValueError(f"unknown generator kind {kind!r}")


def write_csv(ps: PointSet, path: str):
    """One row per point, d columns, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in ps.points:
            writer.writerow([f"{x:.17g}" for x in row])


def read_csv(path: str) -> PointSet:
    pts = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return PointSet(pts.shape[1], pts, {"kind": "explicit", "path": str(path)})
