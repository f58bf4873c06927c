"""Ground-state lower bound: algebra, closed form, and verified instances."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breatherkit import (BaseSet, GridSpec, ScaleDistribution, SiteScales,
                         assemble_field, closed_form_inner, dense_eigenvalues,
                         free_gap, ground_state_lower_bound, inner_vinv,
                         neumann_laplacian, sample_scales,
                         thirring_lower_bound)
from breatherkit.errors import BoxTooSmallError

from conftest import centered_block

UNIFORM = ScaleDistribution.uniform01()

# half the discrete free gap at d=1, L=2, n=4
GAMMA_L2_N4 = 16.0 * (1.0 - np.cos(np.pi / 16))


class TestInnerVinv:
    def test_constant_potential(self):
        psi = np.full(5, 1 / np.sqrt(5))
        assert inner_vinv(psi, np.full(5, 4.0)) == pytest.approx(0.25, abs=1e-15)

    def test_uniform_psi_two_valued_v(self):
        psi = np.full(4, 0.5)
        v = np.array([1.5, 1.5, 0.5, 0.5])
        assert inner_vinv(psi, v) == pytest.approx(4 / 3, abs=1e-14)

    def test_concentrated_psi(self):
        psi = np.array([1.0, 0.0, 0.0])
        assert inner_vinv(psi, np.array([2.0, 17.0, 0.1])) == 0.5

    def test_requires_normalized_psi(self):
        with pytest.raises(ValueError, match="normalized"):
            inner_vinv(np.array([1.0, 1.0]), np.ones(2))

    def test_requires_positive_v(self):
        psi = np.array([1.0, 0.0])
        with pytest.raises(ValueError, match="positive"):
            inner_vinv(psi, np.array([1.0, 0.0]))


class TestClosedFormInner:
    def test_no_potential_reduces_to_inverse_shift(self):
        assert closed_form_inner(0.0, 0.5) == pytest.approx(2.0, abs=1e-15)

    def test_direct_evaluation(self):
        assert closed_form_inner(0.25, 1.0) == pytest.approx(0.875, abs=1e-15)

    def test_cross_check_with_inner_vinv(self):
        assert closed_form_inner(0.5, 0.5) == pytest.approx(4 / 3, abs=1e-14)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            closed_form_inner(1.5, 0.5)
        with pytest.raises(ValueError):
            closed_form_inner(0.5, 0.0)


class TestThirringLowerBound:
    def test_tight_at_zero_fill(self):
        gamma = 0.4
        bound = thirring_lower_bound(-gamma, gamma, 1.0 / gamma)
        assert bound == pytest.approx(0.0, abs=1e-15)

    def test_huge_inner_caps_at_e1(self):
        assert thirring_lower_bound(0.0, 0.7, 1e300) == pytest.approx(0.0,
                                                                      abs=1e-12)

    def test_breather_point_evaluation(self):
        # gamma from the d=1, L=2, n=4 free gap; grid fill 0.1875
        gamma = GAMMA_L2_N4
        inner = closed_form_inner(0.1875, gamma)
        assert inner == pytest.approx(2.786241170916936, rel=1e-12)
        bound = thirring_lower_bound(-gamma, gamma, inner)
        assert bound == pytest.approx(0.05147096247325311, rel=1e-12)
        # algebraic identity: E1 + 1/inner = gamma S / (1 + gamma - S)
        assert bound == pytest.approx(gamma * 0.1875 / (1 + gamma - 0.1875),
                                      rel=1e-12)

    def test_gap_violation_rejected(self):
        with pytest.raises(ValueError, match="E2 > E1"):
            thirring_lower_bound(1.0, 1.0, 2.0)


class TestGroundStateLowerBound:
    def test_free_case_is_tight(self, interval_base):
        scales = sample_scales(ScaleDistribution.point_mass(0.0), 1, 2, 0, 0)
        report = ground_state_lower_bound(scales, interval_base,
                                          GridSpec(1, 2, 4))
        assert report.bound == pytest.approx(0.0, abs=1e-12)
        assert report.e1_perturbed == pytest.approx(0.0, abs=1e-10)
        assert report.verified

    def test_hand_built_instance(self):
        # quarter-volume base [-1/4, 0); three sites at full dilation cover
        # one grid point each: 3 of 16 points, fill 0.1875
        base = BaseSet(np.array([False, True, False, False]))
        scales = SiteScales(1, 2, np.array([1.0, 1.0, 1.0, 0.0]), 0, 0, UNIFORM)
        grid = GridSpec(1, 2, 4)
        report = ground_state_lower_bound(scales, base, grid)
        assert report.s_grid == 0.1875
        assert report.gamma == pytest.approx(GAMMA_L2_N4, rel=1e-14)
        floor = report.gamma * report.s_grid / 2.0
        assert floor == pytest.approx(0.028822, abs=1e-6)
        assert floor <= report.bound <= report.e1_perturbed + 1e-9
        assert report.verified

    def test_box_too_small(self, interval_base):
        scales = sample_scales(UNIFORM, 1, 1, 0, 0)
        with pytest.raises(BoxTooSmallError, match="box too small"):
            ground_state_lower_bound(scales, interval_base, GridSpec(1, 1, 4))

    def test_free_shifted_operator_has_exact_edge_eigenvalues(self):
        # E1(H0) = -gamma and E2(H0) = +gamma once shifted by half the gap
        grid = GridSpec(1, 3, 4)
        gap = free_gap(grid)
        gamma = gap.discrete / 2.0
        op = neumann_laplacian(grid)
        w = dense_eigenvalues(op) - gamma
        assert w[0] == pytest.approx(-gamma, abs=1e-10)
        assert w[1] == pytest.approx(gamma, abs=1e-10)

    @pytest.mark.parametrize("d,L,n", [(1, 2, 4), (1, 4, 8), (2, 2, 2)])
    def test_random_instances_verified(self, d, L, n):
        base = centered_block(d, 4, 1)
        grid = GridSpec(d, L, n)
        for sample in range(10):
            scales = sample_scales(UNIFORM, d, L, 123, sample)
            report = ground_state_lower_bound(scales, base, grid)
            assert report.verified, report


def test_closed_form_matches_inner_vinv_on_assembled_fields(interval_base):
    grid = GridSpec(1, 3, 4)
    gamma = free_gap(grid).discrete / 2.0
    psi = np.full(grid.size, 1.0 / np.sqrt(grid.size))
    for sample in range(20):
        scales = sample_scales(UNIFORM, 1, 3, 55, sample)
        fld = assemble_field(scales, interval_base, grid)
        direct = inner_vinv(psi, fld.flat() + gamma)
        closed = closed_form_inner(fld.fill_fraction(), gamma)
        assert direct == pytest.approx(closed, rel=1e-12)


@given(gamma=st.floats(1e-6, 1.0), s=st.floats(0.0, 1.0))
@settings(max_examples=300, deadline=None)
def test_chain_inequality_algebra(gamma, s):
    """gamma S / (1 + gamma - S) >= gamma S / 2 whenever gamma <= 1."""
    value = gamma * s / (1.0 + gamma - s)
    assert value >= gamma * s / 2.0 - 1e-15
    # and it agrees with E1 + 1/inner for the closed-form inner product
    recon = -gamma + 1.0 / closed_form_inner(s, gamma)
    assert recon == pytest.approx(value, rel=1e-10, abs=1e-13)


def test_random_matrix_suite_small():
    """Dense sanity run of the bound on arbitrary (H, diagonal V) pairs."""
    rng = np.random.default_rng(42)
    for _ in range(100):
        size = int(rng.integers(3, 24))
        sym = rng.standard_normal((size, size))
        sym = (sym + sym.T) / 2.0
        w, vecs = np.linalg.eigh(sym)
        if w[1] - w[0] < 1e-6:
            continue
        psi = vecs[:, 0]
        v_diag = np.exp(rng.uniform(-2.0, 2.0, size))
        inner = inner_vinv(psi / np.linalg.norm(psi), v_diag)
        bound = thirring_lower_bound(w[0], w[1], inner)
        e1_perturbed = np.linalg.eigvalsh(sym + np.diag(v_diag))[0]
        assert e1_perturbed >= bound - 1e-10
