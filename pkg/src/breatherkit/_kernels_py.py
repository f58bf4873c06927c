"""Pure-NumPy reference implementation of the hot kernels.

The compiled backend in ``_kernels_cy`` mirrors these functions operation by
operation. Both must produce bit-identical output: every floating-point
expression here is written in the exact evaluation order used by the C code,
and the hash is integer-only. Do not "simplify" float expressions in one
backend without changing the other.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

# splitmix64 finalizer constants
_GOLD = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# distinct odd multipliers keeping the (sample, site) counters apart
_MULT_SAMPLE = 0xD1342543DE82EF95
_MULT_SITE = 0xDA942042E4DD58B5
_OFF_SAMPLE = 0x8BB84B93962EACC9
_OFF_SITE = 0x2545F4914F6CDD1D
_AXIS_SALT = 0xA0761D6478BD642F

_INV53 = 2.0 ** -53


def _mix64_int(z: int) -> int:
    """splitmix64 finalizer on a Python int (exact 64-bit wraparound)."""
    z &= MASK64
    z = (z ^ (z >> 30)) * _MIX1 & MASK64
    z = (z ^ (z >> 27)) * _MIX2 & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def axis_multiplier(k: int) -> int:
    """Odd 64-bit constant attached to lattice axis k."""
    return _mix64_int(_AXIS_SALT + k * _GOLD) | 1


def stream_key(seed: int, sample: int) -> int:
    """Combine (seed, sample) into one 64-bit key."""
    key = _mix64_int(seed + _GOLD)
    return _mix64_int(key ^ ((sample * _MULT_SAMPLE + _OFF_SAMPLE) & MASK64))


def site_uniforms(seed: int, sample: int, d: int, L: int) -> np.ndarray:
    """One uniform [0, 1) draw per lattice site of the half-open box.

    Sites are the integer points with coordinates in [-L, L); the returned
    flat array is row-major over site offsets (axis 0 slowest). The draw for
    a site depends only on (seed, sample, site coordinates), never on L or
    on iteration order.
    """
    s_ax = 2 * L
    total = s_ax**d
    j = np.arange(s_ax, dtype=np.int64) - L
    zig = np.where(j >= 0, 2 * j, -2 * j - 1).astype(np.uint64)

    code = np.zeros(total, dtype=np.uint64)
    for k in range(d):
        stride = s_ax ** (d - 1 - k)
        idx = (np.arange(total, dtype=np.int64) // stride) % s_ax
        code += zig[idx] * np.uint64(axis_multiplier(k))

    key = np.uint64(stream_key(seed, sample))
    words = _mix64_array(
        key ^ (code * np.uint64(_MULT_SITE) + np.uint64(_OFF_SITE))
    )
    return (words >> np.uint64(11)).astype(np.float64) * _INV53


def field_values(
    scales: np.ndarray, mask: np.ndarray, d: int, L: int, n: int, r: int
) -> np.ndarray:
    """Rasterize the breather potential on the cell-centered grid.

    ``scales`` is the flat (2L)^d array of site dilation factors, ``mask``
    the flat r^d base-set mask (uint8). Grid point with per-axis index i
    sits at relative coordinate -1/2 + (i mod n + 1/2)/n inside site
    i // n; its value is 1 iff the rescaled coordinate falls in a true
    mask cell. Returns a flat uint8 array of length (2Ln)^d.
    """
    m_ax = 2 * L * n
    total = m_ax**d
    h = 1.0 / n
    ar = np.arange(m_ax, dtype=np.int64)
    site_of = ar // n
    rel = -0.5 + (ar % n + 0.5) * h

    flat = np.arange(total, dtype=np.int64)
    site_flat = np.zeros(total, dtype=np.int64)
    for k in range(d):
        stride = m_ax ** (d - 1 - k)
        site_flat = site_flat * (2 * L) + site_of[(flat // stride) % m_ax]

    lam = scales[site_flat]
    ok = lam > 0.0
    lam_safe = np.where(ok, lam, 1.0)

    cell_flat = np.zeros(total, dtype=np.int64)
    for k in range(d):
        stride = m_ax ** (d - 1 - k)
        y = rel[(flat // stride) % m_ax] / lam_safe
        in_rng = (y >= -0.5) & (y < 0.5)
        cell = np.floor((np.where(in_rng, y, 0.0) + 0.5) * r).astype(np.int64)
        cell_flat = cell_flat * r + cell
        ok &= in_rng

    out = np.where(ok, mask[cell_flat], np.uint8(0))
    return out.astype(np.uint8)
