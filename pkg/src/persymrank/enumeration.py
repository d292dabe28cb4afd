"""Exhaustive and sampled rank distributions for stacked persymmetric matrices.

The exhaustive sweep walks every packed index in [0, 2^(n(k+1))), rebuilds
the 2n x k stack and ranks it inside one JIT-compiled loop (tens of millions
of matrices per second per core).  The index space is split into contiguous
shards, each tallied into a private histogram of native 64-bit counters;
shards merge by entrywise addition, so the result is identical for every
worker count and scheduling order.

Where exhaustion is out of reach, a seeded splitmix64 stream drives a
reproducible Monte Carlo estimate over the same index space.

Exact results can be cached as JSON (counts as decimal strings) keyed by
(n, k, method, tool version); entries carry a sha256 checksum and are never
rewritten.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt
from pathlib import Path

import numba
import numpy as np

from ._version import __version__

DEFAULT_BIT_CAP = 32
HUGE_BIT_CAP = 40
CACHE_ENV_VAR = "PERSYMRANK_CACHE"

_DEFAULT_BATCH = 1 << 20


class SearchSpaceTooLarge(ValueError):
    """Raised when a requested sweep exceeds the configured bit budget."""


class CacheCorruptionError(ValueError):
    """Raised when an on-disk cache entry fails its checksum or schema."""


@dataclass(frozen=True)
class SampleMeta:
    """Provenance of a sampled distribution: draw count and generator seed."""

    samples: int
    seed: int


@dataclass(frozen=True)
class RankDistribution:
    """Tallies of stacked matrices by rank for fixed (n, k).

    ``counts[i]`` is the number of swept (or sampled) index values whose
    stacked matrix has rank i.  Exact full sweeps sum to 2^(n(k+1)); partial
    shards and sampled runs sum to whatever was tallied.
    """

    n: int
    k: int
    counts: tuple[int, ...]
    method: str = "exact"
    sample_meta: SampleMeta | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.method not in ("exact", "sampled"):
            raise ValueError(f"unknown method {self.method!r}")
        if (self.sample_meta is not None) != (self.method == "sampled"):
            raise ValueError("sample_meta must be present exactly when method='sampled'")
        expected_len = min(2 * self.n, self.k) + 1
        if len(self.counts) != expected_len:
            raise ValueError(f"counts must cover ranks 0..{expected_len - 1}")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def max_rank(self) -> int:
        return len(self.counts) - 1

    def frequencies(self) -> tuple[float, ...]:
        """Per-rank relative frequencies."""
        t = self.total
        return tuple(c / t for c in self.counts)

    def standard_errors(self) -> tuple[float, ...]:
        """Binomial standard error of each per-rank frequency (sampled runs)."""
        if self.method != "sampled":
            raise ValueError("standard errors are only defined for sampled runs")
        t = self.total
        return tuple(sqrt((c / t) * (1 - c / t) / t) for c in self.counts)


# --------------------------------------------------------------------------
# JIT kernels
# --------------------------------------------------------------------------

@numba.njit(inline="always")
def _rank_of_index(idx, n, k, basis):
    """Rank of the stacked matrix encoded by ``idx``; ``basis`` is scratch."""
    for p in range(k):
        basis[p] = 0
    kp1 = k + 1
    seqmask = (np.int64(1) << kp1) - 1
    colmask = (np.int64(1) << k) - 1
    maxrank = 2 * n if 2 * n < k else k
    rank = 0
    for j in range(n):
        seq = (idx >> (j * kp1)) & seqmask
        for half in range(2):
            v = (seq >> half) & colmask
            for p in range(k - 1, -1, -1):
                if (v >> p) & 1:
                    if basis[p] == 0:
                        basis[p] = v
                        rank += 1
                        break
                    v ^= basis[p]
        if rank == maxrank:
            break
    return rank


@numba.njit(cache=True)
def _sweep_range_kernel(n, k, start, stop):
    counts = np.zeros(min(2 * n, k) + 1, dtype=np.int64)
    basis = np.zeros(64, dtype=np.int64)
    for idx in range(start, stop):
        counts[_rank_of_index(idx, n, k, basis)] += 1
    return counts


@numba.njit(cache=True)
def _ranks_histogram_kernel(n, k, indices):
    counts = np.zeros(min(2 * n, k) + 1, dtype=np.int64)
    basis = np.zeros(64, dtype=np.int64)
    for i in range(indices.shape[0]):
        counts[_rank_of_index(indices[i], n, k, basis)] += 1
    return counts


def _sweep_worker(args: tuple[int, int, int, int]) -> list[int]:
    n, k, start, stop = args
    return [int(c) for c in _sweep_range_kernel(n, k, start, stop)]


# --------------------------------------------------------------------------
# Seeded sampling generator
# --------------------------------------------------------------------------

_SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64_stream(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start``..``start+count-1`` of the splitmix64 stream for ``seed``.

    Counter-indexed form of the standard splitmix64 mixer, so any block of
    the stream can be regenerated independently and identically on any
    platform.  This is the single sampling generator fixed for the repo.
    """
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + counters * _SM64_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _SM64_MIX1
    z = (z ^ (z >> np.uint64(27))) * _SM64_MIX2
    return z ^ (z >> np.uint64(31))


# --------------------------------------------------------------------------
# Public sweep API
# --------------------------------------------------------------------------

def _check_params(n: int, k: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")


def enumerate_exact(
    n: int,
    k: int,
    worker_count: int = 1,
    *,
    allow_huge: bool = False,
    bit_cap: int | None = None,
    cache_dir: str | Path | None = None,
) -> RankDistribution:
    """Exact rank distribution by exhaustive sweep over all 2^(n(k+1)) tuples.

    The sweep refuses index spaces above the bit cap (default 32 bits,
    raised to 40 by ``allow_huge``, overridable via ``bit_cap``).  When
    ``cache_dir`` is given, a verified cached result is returned if present
    and a fresh result is stored otherwise.  The returned counts are
    independent of ``worker_count``.
    """
    _check_params(n, k)
    if worker_count < 1:
        raise ValueError("worker_count must be >= 1")
    bits = n * (k + 1)
    cap = bit_cap if bit_cap is not None else (HUGE_BIT_CAP if allow_huge else DEFAULT_BIT_CAP)
    if bits > cap:
        hint = "" if allow_huge or bit_cap is not None else " (pass allow_huge to raise the cap to 40 bits)"
        raise SearchSpaceTooLarge(
            f"search space too large: n={n}, k={k} needs a {bits}-bit sweep "
            f"(2^{bits} tuples), cap is {cap} bits{hint}"
        )

    if cache_dir is not None:
        cached = load_cached(cache_dir, n, k)
        if cached is not None:
            return cached

    total = 1 << bits
    bounds = [(total * w) // worker_count for w in range(worker_count + 1)]
    shards = [(n, k, bounds[w], bounds[w + 1]) for w in range(worker_count)]
    if worker_count == 1:
        tallies = [_sweep_worker(shards[0])]
    else:
        max_procs = min(worker_count, os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=max_procs) as pool:
            tallies = list(pool.map(_sweep_worker, shards))

    counts = [0] * (min(2 * n, k) + 1)
    for tally in tallies:
        for i, c in enumerate(tally):
            counts[i] += c
    dist = RankDistribution(n, k, tuple(counts))
    if dist.total != total:
        raise AssertionError(f"sweep tallied {dist.total} of {total} tuples")

    if cache_dir is not None:
        store_cached(cache_dir, dist)
    return dist


def enumerate_exact_range(n: int, k: int, start: int, stop: int) -> RankDistribution:
    """Exact tallies over the index sub-range [start, stop); a mergeable shard."""
    _check_params(n, k)
    bits = n * (k + 1)
    if bits > 62:
        raise SearchSpaceTooLarge(f"index space of {bits} bits exceeds the 62-bit kernel limit")
    total = 1 << bits
    if not (0 <= start <= stop <= total):
        raise ValueError(f"invalid index range [{start}, {stop}) for a {total}-point sweep")
    counts = _sweep_worker((n, k, start, stop))
    return RankDistribution(n, k, tuple(counts))


def enumerate_sampled(n: int, k: int, samples: int, seed: int) -> RankDistribution:
    """Seeded Monte Carlo tallies over the tuple space.

    Draws ``samples`` indices from the splitmix64 stream (uniform over
    [0, 2^(n(k+1))) by masking) and tallies ranks.  Identical (n, k,
    samples, seed) always reproduces identical tallies.
    """
    _check_params(n, k)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    bits = n * (k + 1)
    if bits > 62:
        raise SearchSpaceTooLarge(f"index space of {bits} bits exceeds the 62-bit sampling limit")
    mask = np.uint64((1 << bits) - 1)
    counts = np.zeros(min(2 * n, k) + 1, dtype=np.int64)
    done = 0
    while done < samples:
        batch = min(_DEFAULT_BATCH, samples - done)
        idx = (splitmix64_stream(seed, done, batch) & mask).astype(np.int64)
        counts += _ranks_histogram_kernel(n, k, idx)
        done += batch
    return RankDistribution(
        n, k, tuple(int(c) for c in counts), method="sampled",
        sample_meta=SampleMeta(samples=samples, seed=seed),
    )


def merge(parts: list[RankDistribution]) -> RankDistribution:
    """Entrywise sum of exact shards sharing (n, k).

    Callers are responsible for the shards covering disjoint index ranges;
    mismatched parameters or sampled inputs are rejected.
    """
    if not parts:
        raise ValueError("nothing to merge")
    first = parts[0]
    for p in parts:
        if p.method != "exact":
            raise ValueError("only exact distributions can be merged")
        if (p.n, p.k) != (first.n, first.k):
            raise ValueError(
                f"cannot merge (n={p.n}, k={p.k}) into (n={first.n}, k={first.k})"
            )
    counts = [0] * len(first.counts)
    for p in parts:
        for i, c in enumerate(p.counts):
            counts[i] += c
    return RankDistribution(first.n, first.k, tuple(counts))


# --------------------------------------------------------------------------
# Result cache
# --------------------------------------------------------------------------

def _payload_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _to_payload(dist: RankDistribution) -> dict:
    payload = {
        "n": dist.n,
        "k": dist.k,
        "method": dist.method,
        "counts": [str(c) for c in dist.counts],
        "tool_version": __version__,
    }
    if dist.sample_meta is not None:
        payload["sample_meta"] = {
            "samples": dist.sample_meta.samples,
            "seed": dist.sample_meta.seed,
        }
    return payload


def cache_path(cache_dir: str | Path, n: int, k: int, method: str = "exact") -> Path:
    return Path(cache_dir) / f"{method}_n{n}_k{k}_v{__version__}.json"


def store_cached(cache_dir: str | Path, dist: RankDistribution) -> Path:
    """Write ``dist`` to the cache; existing entries are left untouched."""
    path = cache_path(cache_dir, dist.n, dist.k, dist.method)
    if path.exists():
        return path
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = _to_payload(dist)
    payload["checksum"] = _payload_checksum(payload)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    tmp.replace(path)
    return path


def load_cached(cache_dir: str | Path, n: int, k: int, method: str = "exact") -> RankDistribution | None:
    """Load and verify a cached distribution; None when absent."""
    path = cache_path(cache_dir, n, k, method)
    if not path.exists():
        return None
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CacheCorruptionError(f"{path} is not valid JSON: {exc}") from exc
    stored_sum = payload.pop("checksum", None)
    if stored_sum != _payload_checksum(payload):
        raise CacheCorruptionError(f"{path} failed its checksum")
    try:
        meta = payload.get("sample_meta")
        return RankDistribution(
            int(payload["n"]),
            int(payload["k"]),
            tuple(int(c) for c in payload["counts"]),
            method=payload["method"],
            sample_meta=SampleMeta(int(meta["samples"]), int(meta["seed"])) if meta else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheCorruptionError(f"{path} has an invalid schema: {exc}") from exc


__all__ = [
    "CACHE_ENV_VAR",
    "DEFAULT_BIT_CAP",
    "HUGE_BIT_CAP",
    "CacheCorruptionError",
    "RankDistribution",
    "SampleMeta",
    "SearchSpaceTooLarge",
    "cache_path",
    "enumerate_exact",
    "enumerate_exact_range",
    "enumerate_sampled",
    "load_cached",
    "merge",
    "splitmix64_stream",
    "store_cached",
]
