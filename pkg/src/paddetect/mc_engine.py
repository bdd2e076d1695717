"""Deterministic Monte Carlo SEP estimation.

Trial ``t`` transmits symbol ``t mod M`` (round-robin, so every symbol is sent
``floor(n/M)`` or ``ceil(n/M)`` times). Trials are grouped into fixed blocks of
:data:`BLOCK_SIZE`; block ``b`` draws its channel realisation from the Philox
stream ``(seed, offset, b)``. Blocks are independent of the worker count, and
error counts are combined by integer summation, so results are bit-identical
for any ``threads``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ImpairmentParams, RandomStream, impair, snr_to_sigma_n2
from .constellation import Constellation
from .detector import DetectorKind, count_errors

__all__ = [
    "Source",
    "SepEstimate",
    "BLOCK_SIZE",
    "default_threads",
    "estimate_sep",
    "sweep",
    "format_sweep_tsv",
]

BLOCK_SIZE = 1 << 16
THREADS_ENV = "PADDETECT_THREADS"


class Source(str, Enum):
    MONTE_CARLO = "monte_carlo"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class SepEstimate:
    sep: float
    n_symbols: int = 0
    n_errors: int = 0
    ci95_halfwidth: float = 0.0
    source: Source = Source.MONTE_CARLO

    @classmethod
    def from_counts(cls, n_errors: int, n_symbols: int) -> "SepEstimate":
        sep = n_errors / n_symbols
        half = 1.96 * math.sqrt(sep * (1.0 - sep) / n_symbols)
        return cls(sep, n_symbols, n_errors, half, Source.MONTE_CARLO)

    @classmethod
    def analytic(cls, sep: float) -> "SepEstimate":
        return cls(sep, source=Source.ANALYTIC)

    @property
    def std_error(self) -> float:
        return self.ci95_halfwidth / 1.96


def default_threads() -> int:
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def _block_errors(c, kind, p, n_symbols, seed, offset, block) -> int:
    start = block * BLOCK_SIZE
    stop = min(start + BLOCK_SIZE, n_symbols)
    tx = np.arange(start, stop, dtype=np.int64) % c.M
    r = impair(c.points[tx], p, RandomStream(seed, block, offset))
    return count_errors(r, tx, c, kind, p)


def estimate_sep(
    c: Constellation,
    kind: DetectorKind,
    p: ImpairmentParams,
    n_symbols: int = 10**6,
    seed: int = 0,
    *,
    offset: int = 0,
    threads: int | None = None,
) -> SepEstimate:
    """Monte Carlo SEP of detector ``kind`` on constellation ``c``."""
    if n_symbols < 1000:
        raise ValueError(f"n_symbols must be at least 1000, got {n_symbols}")
    kind = DetectorKind.parse(kind)
    if p.is_zero:
        # noiseless channel: every detector returns the transmitted symbol
        return SepEstimate.from_counts(0, n_symbols)
    n_blocks = -(-n_symbols // BLOCK_SIZE)
    threads = default_threads() if threads is None else max(1, int(threads))
    args = (c, kind, p, n_symbols, seed, offset)
    if threads == 1 or n_blocks == 1:
        errors = sum(_block_errors(*args, b) for b in range(n_blocks))
    else:
        with ThreadPoolExecutor(threads) as pool:
            errors = sum(pool.map(lambda b: _block_errors(*args, b), range(n_blocks)))
    return SepEstimate.from_counts(int(errors), n_symbols)


def sweep(
    c: Constellation,
    kind: DetectorKind,
    sigma_g2: float,
    sigma_phi2: float,
    snr_grid_db,
    n_symbols: int = 10**6,
    seed: int = 0,
    *,
    threads: int | None = None,
) -> list[tuple[float, SepEstimate]]:
    """One :func:`estimate_sep` per SNR point; point ``k`` uses stream offset ``k``.

    Detectors swept with the same seed and grid therefore see identical
    channel draws at each point.
    """
    grid = [float(x) for x in snr_grid_db]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("SNR grid must be ascending")
    out = []
    for k, snr in enumerate(grid):
        p = ImpairmentParams(snr_to_sigma_n2(snr), sigma_g2, sigma_phi2)
        out.append((snr, estimate_sep(c, kind, p, n_symbols, seed, offset=k, threads=threads)))
    return out


def format_sweep_tsv(rows, header: list[str] | None = None) -> str:
    """``snr_db, sep, n_symbols, n_errors, ci95`` rows under ``#`` header lines."""
    lines = [f"# {h}" for h in header or ()]
    lines.append("# snr_db\tsep\tn_symbols\tn_errors\tci95")
    for snr, est in rows:
        lines.append(
            f"{snr:g}\t{est.sep:.10e}\t{est.n_symbols}\t{est.n_errors}\t{est.ci95_halfwidth:.10e}"
        )
    return "\n".join(lines) + "\n"
