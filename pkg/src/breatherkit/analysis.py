"""Post-processing: expected site volume, box scheduling, and tail fits."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence, TYPE_CHECKING

import numpy as np

from .discretize import GAP_COEFF, L_MIN, free_counting
from .errors import PreconditionError
from .potential import BaseSet, ScaleDistribution

if TYPE_CHECKING:
    from .montecarlo import IDSCurve

QUADRATURE_NODES = 10**6


def mean_power_quadrature(dist: ScaleDistribution, d: int,
                          nodes: int = QUADRATURE_NODES) -> float:
    """E[lambda^d] by midpoint quadrature over the continuous part of the law."""
    t = (np.arange(nodes) + 0.5) / nodes
    moment = float(np.mean(t**d))
    if dist.kind == "uniform01":
        return moment
    if dist.kind == "bernoulli_uniform":
        return dist.p * moment
    return dist.t**d


def mean_scale_power(dist: ScaleDistribution, d: int) -> float:
    """E[lambda^d], analytic where the law allows it."""
    if dist.kind == "uniform01":
        return 1.0 / (d + 1)
    if dist.kind == "bernoulli_uniform":
        return dist.p / (d + 1)
    return dist.t**d


def mean_s(dist: ScaleDistribution, base: BaseSet, d: int) -> float:
    """Expected single-site volume E[vol(lambda * A)] = vol(A) E[lambda^d]."""
    if d != base.d:
        raise ValueError(f"dimension {d} does not match base set (d={base.d})")
    value = float(base.volume) * mean_scale_power(dist, d)
    if value == 0.0:
        warnings.warn(
            "expected site volume is zero (degenerate scale distribution); "
            "box scheduling and concentration statements are vacuous",
            stacklevel=2,
        )
    return value


class BoxChoice(NamedTuple):
    L: int
    admissible: bool


def choose_L(energy: float, mean_s1: float) -> BoxChoice:
    """Box half-length floor(sqrt(GAP_COEFF * E[S1] / (8 E))) for the energy.

    The admissible flag records whether the choice clears the minimum box
    size L_MIN; below it the half-gap shift would exceed 1.
    """
    if energy <= 0.0:
        raise ValueError(f"energy must be positive, got {energy}")
    if mean_s1 <= 0.0:
        raise ValueError(f"mean site volume must be positive, got {mean_s1}")
    box = math.floor(math.sqrt(GAP_COEFF * mean_s1 / (8.0 * energy)))
    return BoxChoice(int(box), box >= L_MIN)


@dataclass(frozen=True)
class ConcentrationFit:
    """Log-linear fit of the small-average probability against box volume."""

    sizes: np.ndarray
    log_probs: np.ndarray
    decay_rate: float
    intercept: float
    residual_norm: float

    @property
    def positive(self) -> bool:
        return self.decay_rate > 0.0


def _least_squares_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    coeffs, res, *_ = np.polyfit(x, y, 1, full=True)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    residual_norm = float(np.sqrt(res[0])) if res.size else 0.0
    return slope, intercept, residual_norm


def bernstein_fit(table: Sequence[tuple[int, float]], d: int) -> ConcentrationFit:
    """Fit log p(L) = intercept - rate * (2L)^d through the usable points.

    Needs at least three L values with nonzero empirical probability.
    """
    usable = [(L, p) for L, p in table if p > 0.0]
    if len(usable) < 3:
        raise PreconditionError(
            f"concentration fit needs >= 3 nonzero probabilities, "
            f"got {len(usable)} of {len(table)}"
        )
    sizes = np.array([(2.0 * L) ** d for L, _ in usable])
    log_probs = np.log([p for _, p in usable])
    slope, intercept, residual_norm = _least_squares_line(sizes, log_probs)
    return ConcentrationFit(sizes, log_probs, -slope, intercept, residual_norm)


@dataclass(frozen=True)
class TailFit:
    """Window-dependent estimate of the low-energy decay of the state count.

    All fitted constants are empirical: the slope estimates the exponent of
    the stretched-exponential decay (target -d/2), c_front is the largest
    observed free-counting prefactor on the window, and c_exp the largest
    constant for which the decay bound holds on every window point.
    """

    window: tuple[float, float]
    slope: float
    intercept: float
    c_front: float
    c_exp: float
    residual_norm: float
    n_points: int


def proof_tail_constant(c_ld: float, mean_s1: float, d: int) -> float:
    """Decay constant implied by the concentration rate: c_ld (GAP_COEFF E[S1]/8)^(d/2)."""
    return c_ld * (GAP_COEFF * mean_s1 / 8.0) ** (d / 2.0)


def fit_tail(curve: "IDSCurve", e0: float, d: int,
             window: tuple[float, float]) -> TailFit:
    """Fit log(-log N(E)) against log(E - e0) over the window (lo, hi].

    Only energies with state-count estimates strictly inside (0, 1) enter
    the fit. At least two points are required.
    """
    lo, hi = window
    energies = np.asarray(curve.energies, dtype=float)
    values = np.asarray(curve.estimates, dtype=float)
    box = np.broadcast_to(np.asarray(curve.L), energies.shape)

    keep = ((energies > lo) & (energies <= hi) & (energies > e0)
            & (values > 0.0) & (values < 1.0))
    if np.count_nonzero(keep) < 2:
        raise PreconditionError(
            f"tail fit window ({lo}, {hi}] leaves {np.count_nonzero(keep)} "
            "usable points; need at least 2 with estimates in (0, 1)"
        )
    e = energies[keep] - e0
    nhat = values[keep]
    boxes = box[keep].astype(int)

    x = np.log(e)
    y = np.log(-np.log(nhat))
    slope, intercept, residual_norm = _least_squares_line(x, y)

    prefactor = np.array([
        free_counting(d, int(L), float(en)) / ((2.0 * L) ** d * en ** (d / 2.0))
        for L, en in zip(boxes, e)
    ])
    c_front = float(np.max(prefactor))
    c_exp = float(np.min(
        e ** (d / 2.0) * (np.log(c_front) + (d / 2.0) * np.log(e) - np.log(nhat))
    ))
    return TailFit((lo, hi), slope, intercept, c_front, c_exp,
                   residual_norm, int(np.count_nonzero(keep)))
