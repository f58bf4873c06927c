"""Ensemble estimates: state counts, ground-state statistics, concentration.

Samples are independent tasks keyed by (master seed, sample index); all
randomness is counter-based, so results are bit-identical for every thread
count and aggregation order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .analysis import BoxChoice, choose_L, mean_s
from .discretize import DiscreteOperator, GridSpec, add_potential, free_gap, \
    neumann_laplacian
from .eigensolve import DENSE_LIMIT, dense_eigenvalues
from .errors import PreconditionError, SolverError, VerificationError
from .potential import BaseSet, ScaleDistribution, assemble_field, \
    sample_scales, s_statistic
from .thirring import CHAIN_TOL

WILSON_Z = 1.959963984540054  # two-sided 95%


def wilson_interval(successes: int, trials: int,
                    z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials
                       + z * z / (4 * trials * trials)) / denom
    # rounding can push an endpoint past the point estimate by one ulp;
    # the interval must contain it
    lo = min(max(0.0, center - half), phat)
    hi = max(min(1.0, center + half), phat)
    return float(lo), float(hi)


@dataclass(frozen=True)
class ProbabilityEstimate:
    description: str
    successes: int
    trials: int
    estimate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, description: str, successes: int,
                    trials: int) -> "ProbabilityEstimate":
        lo, hi = wilson_interval(successes, trials)
        return cls(description, successes, trials, successes / trials, lo, hi)


@dataclass(frozen=True)
class EnsembleSpec:
    """Everything needed to reproduce one ensemble."""

    base: BaseSet
    dist: ScaleDistribution
    d: int
    L: int
    n: int
    samples: int
    seed: int
    tol: float = 1e-10
    dense_limit: int = DENSE_LIMIT

    def __post_init__(self):
        if self.d != self.base.d:
            raise ValueError(
                f"ensemble dimension {self.d} != base set dimension {self.base.d}"
            )
        if self.samples < 1:
            raise ValueError(f"need at least one sample, got {self.samples}")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.d, self.L, self.n)


@dataclass(frozen=True, eq=False)
class IDSCurve:
    """Per-energy means of the state count per unit volume, with errors."""

    energies: np.ndarray
    estimates: np.ndarray
    stderrs: np.ndarray
    samples: int
    d: int
    L: Union[int, np.ndarray]
    n: int
    seed: int
    box_admissible: Optional[np.ndarray] = field(default=None)


def _run_samples(count: int, threads: int, task: Callable[[int], object]) -> list:
    if threads <= 1:
        return [task(m) for m in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(task, range(count)))


def _check_ascending(energies: Sequence[float]) -> np.ndarray:
    arr = np.asarray(energies, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("energies must be a nonempty 1d sequence")
    if np.any(np.diff(arr) <= 0):
        raise ValueError("energies must be strictly ascending")
    return arr


def _chain_check(sample: int, gamma: float, s_grid: float, e1: float) -> None:
    floor = gamma * s_grid / 2.0
    if e1 < floor - CHAIN_TOL:
        raise VerificationError(
            f"sample {sample}: ground state E1={e1!r} violates the bound "
            f"gamma*S/2={floor!r} (gamma={gamma!r}, S={s_grid!r}); "
            "this indicates a solver or assembly bug"
        )


def _sample_spectrum(spec: EnsembleSpec, free_op: DiscreteOperator,
                     gamma: float, verify_chain: bool, sample: int) -> np.ndarray:
    scales = sample_scales(spec.dist, spec.d, spec.L, spec.seed, sample)
    fld = assemble_field(scales, spec.base, spec.grid)
    try:
        w = dense_eigenvalues(add_potential(free_op, fld), spec.dense_limit)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"sample {sample}: eigensolve failed: {exc}") from exc
    if verify_chain and gamma <= 1.0:
        _chain_check(sample, gamma, fld.fill_fraction(), float(w[0]))
    return w


def estimate_ids(spec: EnsembleSpec, energies: Sequence[float], threads: int = 1,
                 verify_chain: bool = True) -> IDSCurve:
    """Monte Carlo estimate of the mean state count per unit volume.

    For each sample the box operator is assembled and its eigenvalues at or
    below each energy are counted; the per-realization ground-state bound is
    checked on the fly whenever the half-gap shift is admissible.
    """
    arr = _check_ascending(energies)
    grid = spec.grid
    free_op = neumann_laplacian(grid)
    gamma = free_gap(grid).discrete / 2.0
    cells = (2.0 * spec.L) ** spec.d

    def task(m: int) -> np.ndarray:
        w = _sample_spectrum(spec, free_op, gamma, verify_chain, m)
        return np.searchsorted(w, arr, side="right")

    counts = np.array(_run_samples(spec.samples, threads, task), dtype=float)
    estimates = counts.mean(axis=0) / cells
    if spec.samples > 1:
        stderrs = counts.std(axis=0, ddof=1) / np.sqrt(spec.samples) / cells
    else:
        stderrs = np.zeros_like(estimates)
    return IDSCurve(arr, estimates, stderrs, spec.samples,
                    spec.d, spec.L, spec.n, spec.seed)


def ground_state_probability(spec: EnsembleSpec, energies: Sequence[float],
                             threads: int = 1, verify_chain: bool = True
                             ) -> list[ProbabilityEstimate]:
    """Empirical P(E1 <= E) per energy, with 95% Wilson intervals."""
    arr = _check_ascending(energies)
    grid = spec.grid
    free_op = neumann_laplacian(grid)
    gamma = free_gap(grid).discrete / 2.0

    def task(m: int) -> float:
        w = _sample_spectrum(spec, free_op, gamma, verify_chain, m)
        return float(w[0])

    e1s = np.array(_run_samples(spec.samples, threads, task))
    out = []
    for e in arr:
        hits = int(np.count_nonzero(e1s <= e))
        out.append(ProbabilityEstimate.from_counts(
            f"P(E1 <= {e!r}) at d={spec.d} L={spec.L} n={spec.n}",
            hits, spec.samples))
    return out


def concentration_probability(base: BaseSet, dist: ScaleDistribution, d: int,
                              L_list: Sequence[int], samples: int, seed: int,
                              threads: int = 1
                              ) -> list[tuple[int, ProbabilityEstimate]]:
    """Empirical P(S_L <= E[S_1]/2) for each box size, continuum statistic."""
    threshold = mean_s(dist, base, d)
    if threshold <= 0.0:
        raise PreconditionError(
            "concentration requires a nondegenerate scale distribution with "
            "positive expected site volume"
        )
    half = threshold / 2.0
    out = []
    for L in L_list:
        def task(m: int, L: int = L) -> bool:
            scales = sample_scales(dist, d, L, seed, m)
            return s_statistic(scales, base, "continuum") <= half

        hits = sum(_run_samples(samples, threads, task))
        out.append((L, ProbabilityEstimate.from_counts(
            f"P(S_L <= E[S1]/2) at d={d} L={L}", int(hits), samples)))
    return out


def scheduled_ids(base: BaseSet, dist: ScaleDistribution, d: int, n: int,
                  energies: Sequence[float], samples: int, seed: int,
                  threads: int = 1, verify_chain: bool = True, min_L: int = 1,
                  dense_limit: int = DENSE_LIMIT
                  ) -> tuple[IDSCurve, list[BoxChoice]]:
    """Estimate the curve with the energy-dependent box size schedule.

    Each energy gets its own box half-length from choose_L (clamped below by
    min_L, admissibility recorded), so independent small-box ensembles probe
    the low-energy region the way the tail bound prescribes.
    """
    arr = _check_ascending(energies)
    ms = mean_s(dist, base, d)
    choices = [choose_L(float(e), ms) for e in arr]

    estimates = np.empty_like(arr)
    stderrs = np.empty_like(arr)
    boxes = np.empty(arr.size, dtype=int)
    for i, (e, choice) in enumerate(zip(arr, choices)):
        L = max(choice.L, min_L)
        spec = EnsembleSpec(base, dist, d, L, n, samples, seed,
                            dense_limit=dense_limit)
        curve = estimate_ids(spec, [float(e)], threads=threads,
                             verify_chain=verify_chain)
        estimates[i] = curve.estimates[0]
        stderrs[i] = curve.stderrs[0]
        boxes[i] = L
    admissible = np.array([c.admissible for c in choices])
    curve = IDSCurve(arr, estimates, stderrs, samples, d, boxes, n, seed,
                     box_admissible=admissible)
    return curve, choices
