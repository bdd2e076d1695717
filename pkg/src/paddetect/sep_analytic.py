"""High-SNR union-bound SEP of the PAD-D detector.

For an ordered pair (i, j) with ``s_i`` sent, the metric difference
``eta_ij = L_j - L_i`` is written as ``a0 w^2 + 2 a1 w + 2 a3 psi + a4`` with
``w ~ N(0, V_i^a)`` and ``psi ~ N(0, V_i^t)``. Its first three moments are
matched to a skew-normal, whose CDF at zero gives the pairwise error
probability. Averaging the pairwise terms over transmitted symbols gives the
union-bound SEP; setting ``sigma_n2 = 0`` gives the error floor.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .channel import ImpairmentParams
from .constellation import Constellation
from .detector import pad_variances, wrap_phase
from .specialfn import delta_from_skewness, owen_t, q_function

__all__ = [
    "PairwiseStats",
    "pairwise_coeffs",
    "pairwise_stats_all",
    "pairwise_pep",
    "pep_matrix",
    "sep_union",
    "error_floor",
]

log = logging.getLogger(__name__)

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class PairwiseStats:
    """Coefficients of ``eta_ij`` and the matched skew-normal parameters.

    Fields may be scalars (one pair) or equally shaped arrays (many pairs).
    ``never`` marks pairs that cannot be confused at all (a zero variance
    with a non-zero residual), whose PEP is exactly 0.
    """

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    mu: float
    sigma: float
    gamma1: float
    delta: float
    omega: float
    xi: float
    alpha: float
    va_i: float
    vt_i: float
    never: bool = False


def _safe_div(num, den):
    """num/den with 0/0 -> 0 and x/0 -> +inf (sign of x)."""
    num, den = np.broadcast_arrays(np.asarray(num, dtype=float), np.asarray(den, dtype=float))
    out = np.zeros(num.shape)
    ok = den != 0
    out[ok] = num[ok] / den[ok]
    bad = ~ok & (num != 0)
    out[bad] = np.copysign(np.inf, num[bad])
    return out


def _stats(amp_i, ph_i, amp_j, ph_j, p: ImpairmentParams) -> PairwiseStats:
    va_i, vt_i = pad_variances(amp_i, p)
    va_j, vt_j = pad_variances(amp_j, p)
    dr = amp_j - amp_i
    dth = wrap_phase(ph_j - ph_i)

    inv_va_i, inv_va_j = _safe_div(1.0, va_i), _safe_div(1.0, va_j)
    never = ((va_j == 0) & (dr != 0)) | ((vt_j == 0) & (dth != 0))
    # a zero amplitude variance can only coexist with equal radii once `never`
    # pairs are set aside, so the quadratic and log-ratio terms vanish there
    # np.where evaluates both branches; the discarded ones may divide by zero
    with np.errstate(invalid="ignore", divide="ignore"):
        a0 = np.where(va_i == va_j, 0.0, inv_va_j - inv_va_i)
        a1 = _safe_div(dr, va_j)
        a2 = np.where(vt_i == vt_j, 0.0, _safe_div(1.0, vt_j) - _safe_div(1.0, vt_i))
        a3 = _safe_div(dth, vt_j)
        log_ratio = np.where(va_i == va_j, 0.0, np.log(_safe_div(va_j, va_i))) + np.where(
            vt_i == vt_j, 0.0, np.log(_safe_div(vt_j, vt_i))
        )
    with np.errstate(invalid="ignore"):
        a4 = a1 * dr + a3 * dth + log_ratio
        a0va = np.where(a0 == 0, 0.0, a0 * va_i)
        mu = a0va + a4
        var = 2.0 * a0va**2 + 4.0 * a1**2 * va_i + 4.0 * a3**2 * vt_i
        sigma = np.sqrt(var)
        third = 8.0 * a0va**3 + 24.0 * a0va * a1**2 * va_i
        gamma1 = np.where(third == 0, 0.0, third / np.where(var > 0, var, 1.0) ** 1.5)

    delta = delta_from_skewness(gamma1)
    omega = sigma / np.sqrt(1.0 - 2.0 * np.asarray(delta) ** 2 / np.pi)
    xi = mu - omega * delta * _SQRT_2_OVER_PI
    alpha = delta / np.sqrt(1.0 - np.asarray(delta) ** 2)
    return PairwiseStats(a0, a1, a2, a3, a4, mu, sigma, gamma1, delta, omega, xi, alpha,
                         va_i, vt_i, never)


def _unwrap_scalar(stats: PairwiseStats) -> PairwiseStats:
    return PairwiseStats(**{k: (bool(v) if k == "never" else float(v))
                            for k, v in stats.__dict__.items()})


def pairwise_coeffs(c: Constellation, i: int, j: int, p: ImpairmentParams) -> PairwiseStats:
    """Statistics of ``L_j - L_i`` given ``s_i`` was sent."""
    if i == j:
        raise ValueError("pairwise statistics need two distinct symbol indices")
    si, sj = c.points[i], c.points[j]
    if si == 0 or sj == 0:
        raise ValueError("pairwise statistics are undefined for a symbol at the origin")
    return _unwrap_scalar(_stats(np.abs(si), np.angle(si), np.abs(sj), np.angle(sj), p))


def pairwise_stats_all(c: Constellation, p: ImpairmentParams) -> PairwiseStats:
    """Statistics for every ordered pair, as ``(M, M)`` arrays (diagonal unused)."""
    amp, ph = np.abs(c.points), np.angle(c.points)
    return _stats(amp[:, None], ph[:, None], amp[None, :], ph[None, :], p)


def pairwise_pep(stats: PairwiseStats):
    """``Pr{eta_ij < 0} ~ Q(xi/omega) - 2 T(-xi/omega, alpha)``, clamped to [0, 1]."""
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.asarray(stats.xi, dtype=float) / np.asarray(stats.omega, dtype=float)
    # omega == 0 only when eta is deterministic
    z = np.where(np.asarray(stats.omega) == 0, np.copysign(np.inf, stats.xi), z)
    finite = np.isfinite(z)
    zf = np.where(finite, z, 0.0)
    raw = q_function(zf) - 2.0 * owen_t(-zf, stats.alpha)
    raw = np.where(finite, raw, np.where(z > 0, 0.0, 1.0))
    raw = np.where(stats.never, 0.0, raw)
    lo, hi = np.min(raw), np.max(raw)
    if lo < -1e-12 or hi > 1.0 + 1e-12:
        log.warning("pairwise probability outside [0, 1] before clamping: [%g, %g]", lo, hi)
    out = np.clip(raw, 0.0, 1.0)
    return out if out.ndim else float(out)


def pep_matrix(c: Constellation, p: ImpairmentParams) -> np.ndarray:
    """``(M, M)`` matrix of pairwise error probabilities, zero diagonal."""
    pep = pairwise_pep(pairwise_stats_all(c, p))
    np.fill_diagonal(pep, 0.0)
    return pep


def sep_union(c: Constellation, p: ImpairmentParams) -> float:
    """Union-bound SEP ``(1/M) sum_i sum_{j != i} PEP(i -> j)``, clamped to [0, 1]."""
    if p.is_zero:
        return 0.0
    pep = pep_matrix(c, p)
    # exactly rounded sum so the result does not depend on summation order
    return min(1.0, math.fsum(pep.ravel()) / c.M)


def error_floor(c: Constellation, sigma_g2: float, sigma_phi2: float) -> float:
    """Limit of :func:`sep_union` as the additive noise vanishes."""
    return sep_union(c, ImpairmentParams(0.0, sigma_g2, sigma_phi2))
