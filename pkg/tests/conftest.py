import numpy as np
import pytest

from breatherkit import BaseSet


@pytest.fixture
def interval_base():
    """d=1, R=4, mask 0110: the centered interval [-1/4, 1/4), volume 1/2."""
    return BaseSet(np.array([False, True, True, False]))


@pytest.fixture
def square_base():
    """d=2, R=4, centered 2x2 block, volume 1/4."""
    mask = np.zeros((4, 4), dtype=bool)
    mask[1:3, 1:3] = True
    return BaseSet(mask)


def centered_block(d: int, r: int, half_cells: int) -> BaseSet:
    """Centered cube of side 2*half_cells cells at resolution r."""
    mask = np.zeros((r,) * d, dtype=bool)
    lo, hi = r // 2 - half_cells, r // 2 + half_cells
    mask[(slice(lo, hi),) * d] = True
    return BaseSet(mask)
