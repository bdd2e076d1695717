"""Impaired channel: residual gain error, Gaussian phase noise and AWGN.

The received sample is ``r = g |s| exp(j(phi + arg s)) + n`` with
``g ~ N(1, sigma_g2)`` truncated to ``g > 0``, ``phi ~ N(0, sigma_phi2)`` and
``n`` circular complex Gaussian of total variance ``sigma_n2``.

Randomness comes from counter-based Philox streams: a :class:`RandomStream`
is addressed by ``(seed, offset, index)`` and always yields the same draws,
whatever else is running.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ImpairmentParams",
    "RandomStream",
    "snr_to_sigma_n2",
    "draw_impairments",
    "sample_received",
    "impair",
]

MAX_SIGMA_G2 = 0.25


@dataclass(frozen=True)
class ImpairmentParams:
    """Noise variance, amplitude-gain variance and phase-noise variance (rad^2)."""

    sigma_n2: float = 0.0
    sigma_g2: float = 0.0
    sigma_phi2: float = 0.0

    def __post_init__(self):
        for name in ("sigma_n2", "sigma_g2", "sigma_phi2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be a finite non-negative number, got {v}")
        if self.sigma_g2 > MAX_SIGMA_G2:
            raise ValueError(f"sigma_g2 must not exceed {MAX_SIGMA_G2}, got {self.sigma_g2}")

    @classmethod
    def at_snr(cls, snr_db: float, sigma_g2: float = 0.0, sigma_phi2: float = 0.0):
        return cls(snr_to_sigma_n2(snr_db), sigma_g2, sigma_phi2)

    def with_sigma_n2(self, sigma_n2: float) -> "ImpairmentParams":
        return ImpairmentParams(sigma_n2, self.sigma_g2, self.sigma_phi2)

    @property
    def is_zero(self) -> bool:
        return self.sigma_n2 == 0 and self.sigma_g2 == 0 and self.sigma_phi2 == 0


def snr_to_sigma_n2(snr_db: float) -> float:
    """Noise variance for unit symbol energy at ``Es/sigma_n2 = snr_db`` dB."""
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class RandomStream:
    """Address of an independent Philox stream.

    ``seed`` and ``offset`` form the 128-bit Philox key; ``index`` selects a
    disjoint region of the 256-bit counter space. Each stream can produce
    2**128 blocks of output before colliding with the next index.
    """

    seed: int
    index: int = 0
    offset: int = 0

    def __post_init__(self):
        for name in ("seed", "index", "offset"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = self.seed | (self.offset << 64)
        return np.random.Generator(np.random.Philox(key=key, counter=self.index << 128))


def draw_impairments(n: int, p: ImpairmentParams, rng: np.random.Generator):
    """Draw ``n`` gains, phase errors and complex noise samples.

    Draw order is fixed (gains, rejected-gain redraws, phases, noise I, noise Q)
    so a stream always maps to the same realisation.
    """
    g = 1.0 + np.sqrt(p.sigma_g2) * rng.standard_normal(n)
    bad = np.flatnonzero(g <= 0.0)
    while bad.size:
        g[bad] = 1.0 + np.sqrt(p.sigma_g2) * rng.standard_normal(bad.size)
        bad = bad[g[bad] <= 0.0]
    phi = np.sqrt(p.sigma_phi2) * rng.standard_normal(n)
    noise = np.sqrt(p.sigma_n2 / 2.0) * rng.standard_normal((2, n))
    return g, phi, noise[0] + 1j * noise[1]


def impair(symbols, p: ImpairmentParams, stream: RandomStream) -> np.ndarray:
    """Pass an array of transmitted symbols through the channel."""
    s = np.asarray(symbols, dtype=np.complex128)
    g, phi, n = draw_impairments(s.size, p, stream.generator())
    # s * g e^{j phi} keeps s bit-exact when every variance is zero
    return (s.ravel() * (g * np.exp(1j * phi)) + n).reshape(s.shape)


def sample_received(s: complex, p: ImpairmentParams, rng: RandomStream) -> complex:
    """One received sample for transmitted symbol ``s``."""
    if s == 0:
        raise ValueError("transmitted symbol must have non-zero amplitude")
    return complex(impair(np.array([s]), p, rng)[0])
