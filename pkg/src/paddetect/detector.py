"""Symbol decision rules: Euclidean (EUC-D), GPN-aware (GAP-D) and PAD-D.

GAP-D and PAD-D share the polar form

    L(s_m) = A_m (|r| - |s_m|)^2 + B_m wrap(arg r - arg s_m)^2 + C_m

and differ only in the per-symbol weights. PAD-D uses the amplitude variance
``V_a = sigma_n2/2 + sigma_g2 |s|^2`` and phase variance
``V_t = sigma_phi2 + sigma_n2 / (2 |s|^2)`` with ``A = 1/V_a``, ``B = 1/V_t``,
``C = ln(V_a V_t)``; GAP-D is the same with ``sigma_g2`` ignored and no
``ln V_a`` term.
"""

from __future__ import annotations

from enum import Enum

import numba as nb
import numpy as np

from .channel import ImpairmentParams
from .constellation import Constellation

__all__ = [
    "DetectorKind",
    "PolarResiduals",
    "wrap_phase",
    "polar_residuals",
    "metric_euc",
    "metric_gap",
    "metric_pad",
    "pad_variances",
    "polar_weights",
    "detect",
    "detect_many",
    "count_errors",
]


class DetectorKind(str, Enum):
    EUC = "euc"
    GAP = "gap"
    PAD = "pad"

    @classmethod
    def parse(cls, value) -> "DetectorKind":
        if isinstance(value, cls):
            return value
        # accepts "pad", "PAD-D", "padd"
        key = str(value).lower().replace("-", "")
        if len(key) == 4 and key.endswith("d"):
            key = key[:3]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown detector {value!r}; choose from euc, gap, pad") from None


def wrap_phase(x):
    """Wrap angles to the principal interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)


class PolarResiduals(tuple):
    """``(amp_residual, phase_residual)`` of a received sample against a symbol."""

    __slots__ = ()

    def __new__(cls, amp_residual, phase_residual):
        return super().__new__(cls, (amp_residual, phase_residual))

    amp_residual = property(lambda self: self[0])
    phase_residual = property(lambda self: self[1])


def polar_residuals(r, s) -> PolarResiduals:
    r = np.asarray(r, dtype=np.complex128)
    s = np.asarray(s, dtype=np.complex128)
    return PolarResiduals(np.abs(r) - np.abs(s), wrap_phase(np.angle(r) - np.angle(s)))


def _require_amplitude(s):
    if np.any(np.abs(s) == 0):
        raise ValueError("polar metrics are undefined for a symbol at the origin")


def metric_euc(r, s):
    """Squared Euclidean distance ``|r - s|^2``."""
    d = np.asarray(r, dtype=np.complex128) - np.asarray(s, dtype=np.complex128)
    return d.real**2 + d.imag**2


def metric_gap(r, s, sigma_n2: float, sigma_phi2: float):
    """GAP-D metric (AWGN plus Gaussian phase noise)."""
    s = np.asarray(s, dtype=np.complex128)
    _require_amplitude(s)
    if sigma_n2 <= 0 and sigma_phi2 <= 0:
        raise ValueError("GAP-D needs sigma_n2 > 0 or sigma_phi2 > 0")
    da, dt = polar_residuals(r, s)
    vt = sigma_phi2 + sigma_n2 / (2.0 * np.abs(s) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        amp = np.where(da == 0, 0.0, da**2 / (sigma_n2 / 2.0))
        ph = np.where(dt == 0, 0.0, dt**2 / vt)
        return amp + ph + np.log(vt)


def pad_variances(amplitude, p: ImpairmentParams):
    """Per-symbol amplitude and phase residual variances ``(V_a, V_t)``."""
    a2 = np.asarray(amplitude, dtype=float) ** 2
    va = p.sigma_n2 / 2.0 + p.sigma_g2 * a2
    with np.errstate(divide="ignore"):
        vt = p.sigma_phi2 + p.sigma_n2 / (2.0 * a2)
    return va, vt


def metric_pad(r, s, p: ImpairmentParams):
    """PAD-D metric (AWGN, residual gain error and Gaussian phase noise)."""
    s = np.asarray(s, dtype=np.complex128)
    _require_amplitude(s)
    if p.is_zero:
        raise ValueError("PAD-D metric is undefined when every variance is zero")
    da, dt = polar_residuals(r, s)
    va, vt = pad_variances(np.abs(s), p)
    with np.errstate(divide="ignore", invalid="ignore"):
        amp = np.where(da == 0, 0.0, da**2 / va)
        ph = np.where(dt == 0, 0.0, dt**2 / vt)
        return amp + ph + np.log(va * vt)


def polar_weights(c: Constellation, kind: DetectorKind, p: ImpairmentParams):
    """``(A, B, C)`` weight arrays of the polar metric for every symbol."""
    kind = DetectorKind.parse(kind)
    amp = np.abs(c.points)
    _require_amplitude(c.points)
    if kind is DetectorKind.PAD:
        if p.is_zero:
            raise ValueError("PAD-D metric is undefined when every variance is zero")
        va, vt = pad_variances(amp, p)
        with np.errstate(divide="ignore"):
            return 1.0 / va, 1.0 / vt, np.log(va * vt)
    if kind is DetectorKind.GAP:
        if p.sigma_n2 <= 0 and p.sigma_phi2 <= 0:
            raise ValueError("GAP-D needs sigma_n2 > 0 or sigma_phi2 > 0")
        vt = p.sigma_phi2 + p.sigma_n2 / (2.0 * amp**2)
        with np.errstate(divide="ignore"):
            return np.full(amp.shape, 2.0 / p.sigma_n2), 1.0 / vt, np.log(vt)
    raise ValueError("EUC-D has no polar weights")


@nb.njit(nogil=True, cache=True)
def _wrap(x):
    # inputs are differences of two principal angles, so |x| < 2 pi
    if x > np.pi:
        return x - 2.0 * np.pi
    if x <= -np.pi:
        return x + 2.0 * np.pi
    return x


@nb.njit(nogil=True, cache=True)
def _argmin_euc(rx, ry, sx, sy, out):
    for n in range(rx.size):
        best = np.inf
        idx = 0
        for m in range(sx.size):
            dx = rx[n] - sx[m]
            dy = ry[n] - sy[m]
            d = dx * dx + dy * dy
            if d < best:
                best = d
                idx = m
        out[n] = idx


@nb.njit(nogil=True, cache=True)
def _polar_term(res, w):
    # inf * 0 is treated as 0: a zero residual never costs anything
    if res == 0.0:
        return 0.0
    return res * res * w


@nb.njit(nogil=True, cache=True)
def _argmin_polar(rabs, rang, sabs, sang, wa, wt, c, out):
    for n in range(rabs.size):
        best = np.inf
        idx = 0
        for m in range(sabs.size):
            da = rabs[n] - sabs[m]
            dt = _wrap(rang[n] - sang[m])
            v = _polar_term(da, wa[m]) + _polar_term(dt, wt[m]) + c[m]
            if v < best:
                best = v
                idx = m
        out[n] = idx


@nb.njit(nogil=True, cache=True)
def _count_errors_polar(rabs, rang, tx, sabs, sang, wa, wt, c):
    errors = 0
    for n in range(rabs.size):
        best = np.inf
        idx = 0
        for m in range(sabs.size):
            da = rabs[n] - sabs[m]
            dt = _wrap(rang[n] - sang[m])
            v = _polar_term(da, wa[m]) + _polar_term(dt, wt[m]) + c[m]
            if v < best:
                best = v
                idx = m
        if idx != tx[n]:
            errors += 1
    return errors


@nb.njit(nogil=True, cache=True)
def _count_errors_euc(rx, ry, tx, sx, sy):
    errors = 0
    for n in range(rx.size):
        best = np.inf
        idx = 0
        for m in range(sx.size):
            dx = rx[n] - sx[m]
            dy = ry[n] - sy[m]
            d = dx * dx + dy * dy
            if d < best:
                best = d
                idx = m
        if idx != tx[n]:
            errors += 1
    return errors


def detect_many(r, c: Constellation, kind: DetectorKind, p: ImpairmentParams) -> np.ndarray:
    """Indices of the metric-minimising symbol for each received sample.

    All ``M`` metrics are evaluated per sample; ties go to the lowest index.
    """
    kind = DetectorKind.parse(kind)
    r = np.ascontiguousarray(np.asarray(r, dtype=np.complex128).ravel())
    out = np.empty(r.size, dtype=np.int64)
    s = c.points
    if kind is DetectorKind.EUC:
        _argmin_euc(r.real.copy(), r.imag.copy(), s.real.copy(), s.imag.copy(), out)
    else:
        wa, wt, cc = polar_weights(c, kind, p)
        _argmin_polar(np.abs(r), np.angle(r), np.abs(s), np.angle(s), wa, wt, cc, out)
    return out


def detect(r, c: Constellation, kind: DetectorKind, p: ImpairmentParams):
    """Detected symbol index for ``r`` (scalar) or an index array (array input)."""
    out = detect_many(r, c, kind, p)
    return int(out[0]) if np.ndim(r) == 0 else out.reshape(np.shape(r))


def count_errors(r, tx, c: Constellation, kind: DetectorKind, p: ImpairmentParams) -> int:
    """Number of samples whose decision differs from the transmitted index ``tx``."""
    kind = DetectorKind.parse(kind)
    s = c.points
    tx = np.ascontiguousarray(tx, dtype=np.int64)
    if kind is DetectorKind.EUC:
        return int(_count_errors_euc(r.real.copy(), r.imag.copy(), tx, s.real.copy(), s.imag.copy()))
    wa, wt, cc = polar_weights(c, kind, p)
    return int(_count_errors_polar(np.abs(r), np.angle(r), tx, np.abs(s), np.angle(s), wa, wt, cc))
