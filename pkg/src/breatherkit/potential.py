"""Base sets, random dilation scales, and the assembled breather potential.

The single-site potential is the indicator of t*A for a dilation factor
t in [0, 1] and a measurable base set A inside the centered unit cell.
A is stored as a rasterized boolean mask, which is the only finite
representation that imposes no regularity on the set: membership of a point
x in t*A is a plain cell lookup of x/t, with no smoothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .discretize import GridSpec
from .errors import MaskFormatError

MASK_MAGIC = "BREATHER-MASK 1"

_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True, eq=False)
class BaseSet:
    """Rasterized measurable subset of [-1/2, 1/2]^d with volume in (0, 1/2].

    Mask cell (i_1, ..., i_d) covers the half-open cube with corner
    -1/2 + i_k / R and side 1/R per axis, row-major with axis 0 slowest.
    """

    mask: np.ndarray

    def __post_init__(self):
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        if mask.ndim < 1:
            raise MaskFormatError("mask must have at least one axis")
        r = mask.shape[0]
        if any(s != r for s in mask.shape):
            raise MaskFormatError(f"mask must be cubic, got shape {mask.shape}")
        vol = self.volume
        if vol <= 0:
            raise MaskFormatError("base set is empty: volume must be positive")
        if vol > Fraction(1, 2):
            raise MaskFormatError(
                f"base set volume {vol} exceeds 1/2; at most half the unit "
                "cell may be covered"
            )

    @property
    def d(self) -> int:
        return self.mask.ndim

    @property
    def resolution(self) -> int:
        return self.mask.shape[0]

    @property
    def volume(self) -> Fraction:
        return Fraction(int(np.count_nonzero(self.mask)),
                        int(self.resolution) ** self.d)


def load_baseset(path) -> BaseSet:
    """Read a mask file: magic line, 'd R' line, then R^d characters 0/1."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != MASK_MAGIC:
        raise MaskFormatError(
            f"{path}: first line must be {MASK_MAGIC!r}"
        )
    if len(lines) < 2:
        raise MaskFormatError(f"{path}: missing dimension/resolution line")
    header = lines[1].split()
    if len(header) != 2:
        raise MaskFormatError(
            f"{path}: expected '<d> <R>' on line 2, got {lines[1]!r}"
        )
    try:
        d, r = int(header[0]), int(header[1])
    except ValueError:
        raise MaskFormatError(
            f"{path}: dimension and resolution must be integers, got {lines[1]!r}"
        ) from None
    if d < 1 or r < 1:
        raise MaskFormatError(f"{path}: need d >= 1 and R >= 1, got d={d} R={r}")
    body = "".join(lines[2:]).split()
    digits = "".join(body)
    if set(digits) - {"0", "1"}:
        raise MaskFormatError(
            f"{path}: mask body may contain only '0', '1' and whitespace"
        )
    if len(digits) != r**d:
        raise MaskFormatError(
            f"{path}: expected {r**d} mask cells for d={d} R={r}, got {len(digits)}"
        )
    cells = np.frombuffer(digits.encode(), dtype=np.uint8) - ord("0")
    return BaseSet(cells.astype(bool).reshape((r,) * d))


def save_baseset(base: BaseSet, path) -> None:
    rows = base.mask.reshape(-1, base.resolution)
    body = "\n".join("".join("1" if c else "0" for c in row) for row in rows)
    Path(path).write_text(
        f"{MASK_MAGIC}\n{base.d} {base.resolution}\n{body}\n"
    )


@dataclass(frozen=True)
class ScaleDistribution:
    """Law of the i.i.d. site dilation factors, supported on [0, 1].

    Kinds: uniform01 (uniform on [0,1]), bernoulli_uniform(p) (0 with
    probability 1-p, else uniform), and point_mass(t). Point masses are
    degenerate, violate the small-scale mass assumption, and exist for
    tests only.
    """

    kind: str
    p: Optional[float] = None
    t: Optional[float] = None

    def __post_init__(self):
        if self.kind == "uniform01":
            if self.p is not None or self.t is not None:
                raise ValueError("uniform01 takes no parameters")
        elif self.kind == "bernoulli_uniform":
            if self.p is None or not 0.0 < self.p <= 1.0:
                raise ValueError(
                    f"bernoulli_uniform requires p in (0, 1], got {self.p}"
                )
        elif self.kind == "point_mass":
            if self.t is None or not 0.0 <= self.t <= 1.0:
                raise ValueError(f"point_mass requires t in [0, 1], got {self.t}")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def uniform01(cls) -> "ScaleDistribution":
        return cls("uniform01")

    @classmethod
    def bernoulli_uniform(cls, p: float) -> "ScaleDistribution":
        return cls("bernoulli_uniform", p=p)

    @classmethod
    def point_mass(cls, t: float) -> "ScaleDistribution":
        return cls("point_mass", t=t)

    @property
    def degenerate(self) -> bool:
        return self.kind == "point_mass"

    @classmethod
    def parse(cls, spec: str) -> "ScaleDistribution":
        """Parse 'uniform01', 'bernoulli_uniform(p)' or 'point_mass(t)'."""
        spec = spec.strip()
        if spec == "uniform01":
            return cls.uniform01()
        for name, factory in (("bernoulli_uniform", cls.bernoulli_uniform),
                              ("point_mass", cls.point_mass)):
            if spec.startswith(name + "(") and spec.endswith(")"):
                arg = spec[len(name) + 1:-1]
                try:
                    return factory(float(arg))
                except ValueError as exc:
                    raise ValueError(f"bad distribution spec {spec!r}: {exc}") from None
        raise ValueError(f"unknown distribution spec {spec!r}")

    def spec_string(self) -> str:
        if self.kind == "uniform01":
            return "uniform01"
        if self.kind == "bernoulli_uniform":
            return f"bernoulli_uniform({self.p!r})"
        return f"point_mass({self.t!r})"


@dataclass(frozen=True, eq=False)
class SiteScales:
    """One realization of the dilation factors on the sites in [-L, L)^d."""

    d: int
    L: int
    scales: np.ndarray
    seed: int
    sample: int
    dist: ScaleDistribution = field(repr=False, default=None)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.scales, dtype=np.float64)
        if arr.shape != (2 * self.L,) * self.d:
            raise ValueError(
                f"scales shape {arr.shape} does not match d={self.d}, L={self.L}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "scales", arr)

    @property
    def site_count(self) -> int:
        return (2 * self.L) ** self.d


def sample_scales(dist: ScaleDistribution, d: int, L: int,
                  seed: int, sample: int) -> SiteScales:
    """Draw the (2L)^d site scales for one configuration.

    Each site's draw is a pure function of (seed, sample, site coordinates)
    via a 64-bit avalanche hash, so the result is independent of iteration
    order, thread count, and box size.
    """
    if L < 1:
        raise ValueError(f"box half-length must be >= 1, got {L}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    u = kernels.site_uniforms(seed & _U64, sample & _U64, d, L)
    if dist.kind == "uniform01":
        lam = u
    elif dist.kind == "bernoulli_uniform":
        lam = np.where(u < dist.p, u / dist.p, 0.0)
    else:
        lam = np.full_like(u, dist.t)
    return SiteScales(d, L, lam.reshape((2 * L,) * d), seed, sample, dist)


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Potential sampled at the grid points; values are exactly 0 or 1.

    The per-site supports are disjoint (each is contained in its own unit
    cell), so the sum over sites never exceeds 1 anywhere.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.uint8)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"field shape {vals.shape} does not match grid {self.grid}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def flat(self) -> np.ndarray:
        return self.values.ravel().astype(np.float64)

    def fill_fraction(self) -> float:
        return float(np.count_nonzero(self.values)) / self.grid.size


def indicator(base: BaseSet, t: float, x: Sequence[float]) -> int:
    """Indicator of the dilated set t*A at the point x of the closed unit cell.

    t = 0 gives the empty set (the origin is a null set and is ignored).
    Uses the same half-open cell lookup as the grid kernels.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"scale must be in [0, 1], got {t}")
    pt = np.asarray(x, dtype=float)
    if pt.shape != (base.d,):
        raise ValueError(f"point has shape {pt.shape}, expected ({base.d},)")
    if np.any(np.abs(pt) > 0.5):
        raise ValueError(f"point {x} lies outside the closed unit cell")
    if t == 0.0:
        return 0
    idx = []
    r = base.resolution
    for y in pt / t:
        if y < -0.5 or y >= 0.5:
            return 0
        idx.append(int(np.floor((y + 0.5) * r)))
    return int(base.mask[tuple(idx)])


def assemble_field(scales: SiteScales, base: BaseSet,
                   grid: GridSpec) -> PotentialField:
    """Rasterize the full random potential over the grid.

    Every grid point lies in exactly one half-open site cell; its value is
    the indicator of the site's dilated base set at the point's in-cell
    coordinate.
    """
    if grid.d != scales.d or grid.L != scales.L:
        raise ValueError(
            f"grid (d={grid.d}, L={grid.L}) does not match scales "
            f"(d={scales.d}, L={scales.L})"
        )
    if base.d != grid.d:
        raise ValueError(f"base set dimension {base.d} != grid dimension {grid.d}")
    flat = kernels.field_values(
        scales.scales.ravel(),
        base.mask.astype(np.uint8).ravel(),
        grid.d, grid.L, grid.n, base.resolution,
    )
    return PotentialField(grid, flat.reshape(grid.shape))


def s_statistic(scales: SiteScales, base: BaseSet, mode: str = "continuum",
                grid: Optional[GridSpec] = None) -> float:
    """Mean single-site volume: the spatial average of vol(lambda_k * A).

    Continuum mode is exact: mean of lambda_k^d times vol(A). Grid mode
    reports the fill fraction of the assembled field, which matches the
    continuum value up to rasterization error.
    """
    if mode == "continuum":
        return float(base.volume) * float(np.mean(scales.scales**scales.d))
    if mode == "grid":
        if grid is None:
            raise ValueError("grid mode requires a GridSpec")
        return assemble_field(scales, base, grid).fill_fraction()
    raise ValueError(f"mode must be 'continuum' or 'grid', got {mode!r}")
