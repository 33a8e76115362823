import math

import numpy as np
import pytest

from lpsections import hankel as hk
from lpsections.closedform import a2_closed_form, a2_general
from lpsections.direction import Direction
from lpsections.specfun import bessel_j1, gamma

INF = math.inf

_trapz = getattr(np, "trapezoid", None) or np.trapz

# Frozen oracle: (2/Gamma(1.5)) * trapezoid of J0(r) exp(-r^4) r on [0, 6]
# with 1e6+1 nodes (truncation beyond 6 is below e^-1296).  The trapezoid
# rule itself carries ~7e-12 discretization error at this step size.
KERNEL_P4_S1_ORACLE = 0.8665252407699683
KERNEL_ORACLE_SELF_ERR = 2e-11

P_GRID = (1.0, 2.0, 3.0, 4.0, 9.0, 26.0, 140.0, INF)


def trapezoid_kernel_oracle():
    sp = pytest.importorskip("scipy.special")
    r = np.linspace(0.0, 6.0, 10 ** 6 + 1)
    f = sp.j0(r) * np.exp(-(r ** 4)) * r
    return 2.0 / gamma(1.5) * float(_trapz(f, r))


class TestKernel:
    def test_value_one_at_zero(self):
        for p in P_GRID:
            kv = hk.gamma_kernel(p, 0.0)
            assert kv.value == 1.0 and kv.err_bound == 0.0

    def test_inf_closed_form(self):
        kv = hk.gamma_kernel(INF, 2.0)
        assert kv.err_bound == 0.0
        assert kv.value == pytest.approx(bessel_j1(2.0), abs=1e-15)
        assert kv.value == pytest.approx(0.5767248077568734, abs=1e-12)

    def test_derived_trapezoid_oracle(self):
        kv = hk.gamma_kernel(4.0, 1.0, inner_tol=1e-10)
        assert abs(kv.value - KERNEL_P4_S1_ORACLE) <= kv.err_bound + KERNEL_ORACLE_SELF_ERR
        # regenerate the oracle to guard the frozen constant
        assert trapezoid_kernel_oracle() == pytest.approx(KERNEL_P4_S1_ORACLE, abs=1e-13)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            hk.gamma_kernel(4.0, -1.0)
        with pytest.raises(ValueError):
            hk.gamma_kernel(0.5, 1.0)

    def test_modulus_bounded_by_one(self):
        s = np.linspace(0.0, 50.0, 26)
        for p in P_GRID:
            vals, errs = hk.kernel_values(p, s)
            assert np.all(np.abs(vals) <= 1.0 + errs + 1e-15)

    def test_invariant_value_within_one_plus_err(self):
        kv = hk.gamma_kernel(9.0, 0.3)
        assert abs(kv.value) <= 1.0 + kv.err_bound


class TestEnvelope:
    def test_clamps_to_one(self):
        # the min clamps whenever 2*0.5819*ratio/s >= 1; at p = 1 the ratio
        # is 1/2, so the clamp holds only below s ~ 0.58 there
        for p in (1.0, 2.0, 4.0, INF):
            assert hk.kernel_envelope(p, 0.5) == 1.0
        for p in (2.0, 4.0, 9.0, INF):
            assert hk.kernel_envelope(p, 1.0) == 1.0
        assert hk.kernel_envelope(1.0, 1.0) == pytest.approx(0.5819, abs=1e-12)

    def test_p9_constant_cap(self):
        assert hk.kernel_envelope(9.0, 2.0) <= 1.2077 / 2.0

    def test_formula_p4_s10(self):
        g_ratio = gamma(1.25) / gamma(1.5)
        assert hk.kernel_envelope(4.0, 10.0) == pytest.approx(1.1638 / 10.0 * g_ratio, rel=1e-12)

    @pytest.mark.parametrize("p", P_GRID)
    def test_dominates_kernel(self, p):
        s = np.linspace(0.05, 50.0, 120)
        vals, errs = hk.kernel_values(p, s)
        for si, v, e in zip(s, vals, errs):
            assert hk.kernel_envelope(p, float(si)) >= abs(v) - e
            assert hk.envelope_refined(p, float(si)) >= abs(v) - e

    def test_refined_never_looser(self):
        for p in P_GRID:
            for s in (0.5, 2.0, 10.0, 200.0):
                assert hk.envelope_refined(p, s) <= hk.kernel_envelope(p, s) + 1e-15


class TestTailBound:
    @pytest.mark.parametrize("n", [3, 4, 5, 8, 12, 16])
    def test_matches_closed_form_reference(self, n):
        # diagonal direction at p = 9 truncated at sqrt(2n): the family of
        # bounds must undercut (2n/(n-2)) 0.854^n
        b = hk.tail_bound_outer(9.0, Direction.diagonal(n), math.sqrt(2.0 * n))
        assert b <= 2.0 * n / (n - 2.0) * 0.854 ** n

    def test_monotone_in_cutoff(self):
        for p in (4.0, 9.0, INF):
            d = Direction([0.8, 0.4, 0.4472135954999579])
            for s in (5.0, 10.0, 40.0):
                assert hk.tail_bound_outer(p, d, 2.0 * s) < hk.tail_bound_outer(p, d, s)

    def test_derived_vs_envelope_quadrature(self):
        # sandwich: integral of the pointwise-min envelope <= bound <= the
        # single-family closed form with the first-order envelope
        p, s_max = 4.0, 10.0
        d = Direction([0.8, 0.4, 0.4472135954999579])
        bound = hk.tail_bound_outer(p, d, s_max)
        s = np.geomspace(s_max, 1e6, 20001)
        prod = np.ones_like(s)
        for c in d.nonzero():
            prod *= np.array([hk.envelope_refined(p, float(c * si)) for si in s])
        lower = float(_trapz(prod * s, s))
        env1 = 1.0
        for c in d.nonzero():
            env1 *= hk.kernel_envelope(p, 1.0) * 2.0 * 0.5819 * gamma(1.25) / gamma(1.5) / c
        env1_tail = env1 / s_max  # prod (C1/a_j) * s^(2-3)/(3-2) at s_max
        assert lower <= bound <= env1_tail * 1.0001

    def test_dimension_error(self):
        with pytest.raises(hk.DimensionError):
            hk.tail_bound_outer(4.0, Direction([1.0, 1.0, 0.0]), 10.0)


class TestQuadSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            hk.QuadSpec(tol_abs=0.0)
        with pytest.raises(ValueError):
            hk.QuadSpec(tol_abs=1e-6, inner_tol=1e-6)  # must be <= tol/10
        with pytest.raises(ValueError):
            hk.QuadSpec(panel_order=4)
        with pytest.raises(ValueError):
            hk.QuadSpec(s_max_policy=-3.0)

    def test_default_inner_tol(self):
        spec = hk.QuadSpec(tol_abs=1e-6)
        assert spec.inner_tol == pytest.approx(1e-7)


class TestSectionVolume:
    def test_two_equal_routed_exact(self):
        for p in (3.0, 4.0, 9.0, 26.265, 140.0):
            res = hk.section_volume_quadrature(p, Direction.two_equal(3))
            assert res.engine == "closed_form"
            assert res.value == a2_closed_form(p)
            assert res.err_bound == 0.0

    def test_polydisc_two_coordinate(self):
        res = hk.section_volume_quadrature(INF, Direction.diagonal(2))
        assert res.value == 2.0

    def test_coordinate_axis(self):
        res = hk.section_volume_quadrature(7.0, Direction.coordinate(4))
        assert res.value == 1.0 and res.err_bound == 0.0

    def test_general_two_nonzero_closed(self):
        rng = np.random.default_rng(5)
        for _ in range(4):
            b = np.abs(rng.standard_normal(2)) + 0.1
            b /= np.linalg.norm(b)
            d = Direction([b[0], b[1], 0.0])
            res = hk.section_volume_quadrature(9.0, d)
            nz = d.nonzero()
            assert res.value == a2_general(9.0, nz[0], nz[1])

    def test_zero_padding_invariance(self):
        spec = hk.QuadSpec(tol_abs=1e-6)
        r1 = hk.section_volume_quadrature(9.0, Direction.diagonal(3), spec)
        r2 = hk.section_volume_quadrature(9.0, Direction([1.0, 1.0, 1.0, 0.0, 0.0]), spec)
        assert abs(r1.value - r2.value) <= 2e-6

    def test_permutation_invariance(self):
        spec = hk.QuadSpec(tol_abs=1e-4)
        raw = [0.8, 0.4, 0.4472135954999579]
        d1 = Direction(raw)
        d2 = Direction([raw[2], raw[0], raw[1]])  # permuted, same multiset
        assert d1 == d2
        r1 = hk.section_volume_quadrature(4.0, d1, spec)
        r2 = hk.section_volume_quadrature(4.0, d2, spec)
        assert r1.value == r2.value  # identical canonical input, deterministic engine
        # with an interior zero the canonical forms also coincide
        assert Direction([0.8, 0.6, 0.0]) == Direction([0.6, 0.0, 0.8])
        ra = hk.section_volume_quadrature(4.0, Direction([0.8, 0.6, 0.0]), spec)
        rb = hk.section_volume_quadrature(4.0, Direction([0.6, 0.0, 0.8]), spec)
        assert ra.value == rb.value

    def test_monotone_in_p_and_range(self):
        # fixed four-coordinate diagonal; values are nondecreasing in p and
        # stay within [1 - tol, 2 + tol] for p >= 2
        spec = hk.QuadSpec(tol_abs=1e-6)
        ps = (2.5, 3.0, 4.0, 6.0, 9.0, 26.0, 140.0)
        vals = []
        for p in ps:
            res = hk.section_volume_quadrature(p, Direction.diagonal(4), spec)
            assert res.value > 0.0
            assert 1.0 - res.err_bound <= res.value <= 2.0 + res.err_bound
            vals.append(res.value)
        for lo, hi in zip(vals, vals[1:]):
            assert hi >= lo - 2e-6

    def test_exact_at_p2(self):
        # at p = 2 every section has normalized volume exactly 1
        res = hk.section_volume_quadrature(2.0, Direction([0.9, 0.3, 0.2, 0.1, 0.1, 0.1]),
                                           hk.QuadSpec(tol_abs=1e-8))
        assert res.value == pytest.approx(1.0, abs=1e-10)
        assert res.err_bound <= 1e-8

    def test_err_bound_within_tol(self):
        spec = hk.QuadSpec(tol_abs=1e-5)
        res = hk.section_volume_quadrature(4.0, Direction.diagonal(5), spec)
        assert res.err_bound <= 1e-5
        assert res.engine == "quadrature"
        assert res.meta["s_max"] > 0

    def test_nonconvergence_reported(self):
        # a fixed cutoff far too small for the requested tolerance
        spec = hk.QuadSpec(tol_abs=1e-6, s_max_policy=3.0)
        with pytest.raises(hk.NonConvergenceError):
            hk.section_volume_quadrature(9.0, Direction.diagonal(3), spec)

    def test_panel_budget_exhaustion(self):
        spec = hk.QuadSpec(tol_abs=1e-6, panel_budget=4)
        with pytest.raises(hk.NonConvergenceError):
            hk.section_volume_quadrature(4.0, Direction.diagonal(3), spec)


class TestCrossEngineLight:
    def test_quad_vs_mc_p4_diag3(self):
        from lpsections.montecarlo import McSpec, estimate_section_volume
        q = hk.section_volume_quadrature(4.0, Direction.diagonal(3), hk.QuadSpec(tol_abs=1e-5))
        m = estimate_section_volume(4.0, Direction.diagonal(3), McSpec(samples=400_000, seed=11))
        assert abs(q.value - m.value) <= 4.0 * m.err_bound + q.err_bound
