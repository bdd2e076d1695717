"""Constellation construction, normalization and text-file I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "SapskSpec",
    "MIN_AMPLITUDE",
    "QAM_ORDERS",
    "make_qam",
    "make_sapsk",
    "sapsk_populations",
    "normalize",
    "load_constellation",
    "save_constellation",
    "parse_source",
]

#: No symbol may sit closer than this to the origin (its phase is undefined there).
MIN_AMPLITUDE = 1e-3
QAM_ORDERS = (4, 16, 32, 64, 128, 256, 1024)
_MIN_SEPARATION = 1e-9


@dataclass(frozen=True, eq=False)
class Constellation:
    """An ordered set of complex symbols.

    ``points`` is stored as a read-only complex128 array. Construction checks
    that there are at least two distinct symbols and that none lies within
    :data:`MIN_AMPLITUDE` of the origin. Unit energy is not enforced here; use
    :func:`normalize` for that.
    """

    points: np.ndarray
    label: str = field(default="custom")

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.complex128).ravel()
        if pts.size < 2:
            raise ValueError(f"a constellation needs at least 2 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("constellation points must be finite")
        amin = np.min(np.abs(pts))
        if amin < MIN_AMPLITUDE:
            raise ValueError(
                f"symbol amplitude {amin:.3g} is below the origin-exclusion floor {MIN_AMPLITUDE}"
            )
        if min_distance(pts) <= _MIN_SEPARATION:
            raise ValueError("constellation points must be pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @property
    def M(self) -> int:
        return self.points.size

    @property
    def energy(self) -> float:
        """Average symbol energy (1/M) sum |s|^2."""
        return float(np.mean(np.abs(self.points) ** 2))

    @property
    def centroid(self) -> complex:
        return complex(np.mean(self.points))

    def rotated(self, theta: float) -> "Constellation":
        return Constellation(self.points * np.exp(1j * theta), self.label)

    def __repr__(self) -> str:
        return f"Constellation(label={self.label!r}, M={self.M}, energy={self.energy:.6g})"


@dataclass(frozen=True)
class SapskSpec:
    """Structured APSK: ``order`` symbols on ``levels`` rings.

    Ring ``k`` (1-based) sits at radius ``r1 * (1 + (k - 1) * rho)``.
    """

    order: int
    levels: int
    rho: float = 1.0

    def __post_init__(self):
        if self.order < 2:
            raise ValueError(f"SAPSK order must be >= 2, got {self.order}")
        if not 1 <= self.levels <= self.order:
            raise ValueError(f"SAPSK levels must satisfy 1 <= levels <= order, got {self.levels}")
        if not self.rho > 0:
            raise ValueError(f"SAPSK ring spacing rho must be positive, got {self.rho}")


def min_distance(points) -> float:
    pts = np.asarray(points, dtype=np.complex128)
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def normalize(points, label: str = "custom") -> Constellation:
    """Shift to zero centroid, then scale to unit average energy."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    pts = pts - pts.mean()
    energy = np.mean(np.abs(pts) ** 2)
    if not energy > 0:
        raise ValueError("cannot normalize a degenerate point set (all points equal)")
    return Constellation(pts / np.sqrt(energy), label)


def make_qam(M: int) -> Constellation:
    """Square QAM for even powers of two, cross QAM for 32 and 128.

    Cross QAM takes the enclosing ``3 * 2^(k-1)``-wide square grid and removes
    a ``side/6`` square block from each corner.
    """
    if M not in QAM_ORDERS:
        raise ValueError(f"unsupported QAM order {M}; supported orders are {QAM_ORDERS}")
    bits = int(np.log2(M))
    if bits % 2 == 0:
        side = 2 ** (bits // 2)
        keep = None
    else:
        side = 3 * 2 ** ((bits - 1) // 2 - 1)
        keep = side - 1 - 2 * (side // 6)
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    i, q = np.meshgrid(levels, levels, indexing="ij")
    i, q = i.ravel(), q.ravel()
    if keep is not None:
        mask = ~((np.abs(i) > keep) & (np.abs(q) > keep))
        i, q = i[mask], q[mask]
    pts = i + 1j * q
    assert pts.size == M
    # grid is symmetric, so only scaling is needed
    return Constellation(pts / np.sqrt(np.mean(np.abs(pts) ** 2)), f"qam{M}")


def sapsk_populations(order: int, levels: int) -> np.ndarray:
    """Symbols per ring, proportional to ring index, by largest remainder."""
    w = np.arange(1, levels + 1, dtype=float)
    exact = order * w / w.sum()
    n = np.floor(exact).astype(int)
    short = order - n.sum()
    if short:
        # ties go to the outer ring
        order_idx = np.lexsort((-np.arange(levels), -(exact - n)))
        n[order_idx[:short]] += 1
    return n


def make_sapsk(spec: SapskSpec) -> Constellation:
    """Concentric-ring APSK with ring populations proportional to ring index.

    Successive rings are rotated by half of the outer ring's angular step.
    """
    n = sapsk_populations(spec.order, spec.levels)
    if np.any(n < 2):
        raise ValueError(
            f"SAPSK({spec.order},{spec.levels}) is infeasible: ring populations {n.tolist()} "
            "need at least 2 symbols per ring"
        )
    k = np.arange(spec.levels)
    radii = 1.0 + k * spec.rho
    radii = radii / np.sqrt(np.sum(n * radii**2) / spec.order)
    pts = []
    offset = 0.0
    for ring, (nk, rk) in enumerate(zip(n, radii)):
        if ring:
            offset += np.pi / nk
        pts.append(rk * np.exp(1j * (offset + 2.0 * np.pi * np.arange(nk) / nk)))
    return Constellation(np.concatenate(pts), f"sapsk{spec.order}_{spec.levels}_{spec.rho:g}")


def parse_source(src: str) -> Constellation:
    """Resolve ``qam:M``, ``sapsk:M:levels:rho`` or a file path."""
    parts = src.split(":")
    if parts[0] == "qam" and len(parts) == 2:
        return make_qam(int(parts[1]))
    if parts[0] == "sapsk" and len(parts) == 4:
        return make_sapsk(SapskSpec(int(parts[1]), int(parts[2]), float(parts[3])))
    if parts[0] in ("qam", "sapsk"):
        raise ValueError(f"malformed constellation shorthand {src!r}")
    return load_constellation(src)


def load_constellation(path, label: str | None = None) -> Constellation:
    """Read a two-column (I, Q) text file; ``#`` starts a comment line."""
    pts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(fields)}")
            try:
                re, im = float(fields[0]), float(fields[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: cannot parse {text!r} as two reals") from None
            pts.append(complex(re, im))
    if len(pts) < 2:
        raise ValueError(f"{path}: need at least 2 symbols, found {len(pts)}")
    if label is None:
        label = os.path.splitext(os.path.basename(str(path)))[0]
    return Constellation(np.array(pts), label)


def save_constellation(c: Constellation, path, header: list[str] | None = None) -> None:
    """Write ``c`` as two columns at 17 significant digits."""
    with open(path, "w") as fh:
        for line in header or ():
            fh.write(f"# {line}\n")
        for s in c.points:
            fh.write(f"{s.real:.17g} {s.imag:.17g}\n")
