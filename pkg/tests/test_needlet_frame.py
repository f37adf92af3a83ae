import math

import numpy as np
import pytest

from hermite_needlets import (
    FrameDepthError,
    FrameMismatchError,
    HermiteExpansion,
    ParameterError,
    ResourceError,
    analyze,
    build_level,
    half_node_count,
    hermite_function,
    localization_profile,
    needlet_eval,
    phi_kernel,
    psi_kernel,
    synthesize,
)
from hermite_needlets import hermite_core as hc
from hermite_needlets import needlet_frame as nf

from conftest import random_expansion_1d, random_expansion_2d


class TestLevelConstruction:
    @pytest.mark.parametrize(
        "j,expected", [(0, 5), (1, 11), (2, 36), (3, 135), (4, 532)]
    )
    def test_level_sizes(self, j, expected):
        assert half_node_count(j, 0.025) == expected

    def test_delta_range(self):
        with pytest.raises(ParameterError):
            half_node_count(1, 0.05)
        with pytest.raises(ParameterError):
            half_node_count(1, 0.0)

    def test_node_counts(self, frame_j3):
        for level in frame_j3.levels:
            assert level.node_count == (2 * level.half_nodes) ** level.d

    def test_level_normalization(self, frame_j3):
        # cubature exactness at degree (0, 0)
        for level in frame_j3.levels:
            h0 = hc.hermite_values(0, level.rule.nodes)[0]
            val = float(np.dot(level.rule.christoffel_weights, h0 * h0))
            assert val == pytest.approx(1.0, abs=1e-13)

    def test_budget_guard(self):
        with pytest.raises(ResourceError):
            build_level(3, 2, node_budget=1000)

    def test_tiles_partition_cube(self, frame_j4):
        for level in frame_j4.levels:
            q0, q1 = level.cube_bounds()
            total = level.tile_measures().sum()
            assert total == pytest.approx((q1 - q0) ** level.d, rel=1e-10)
            assert np.all(np.diff(level.interval_bounds) > 0)

    def test_edge_overhang(self, frame_j3):
        for level in frame_j3.levels:
            z_max = level.rule.nodes[-1]
            assert level.interval_bounds[-1] == pytest.approx(
                z_max + 2.0 ** (-level.j / 6.0), rel=1e-14
            )

    def test_node_inside_its_tile(self, frame_j3):
        level = frame_j3.levels[2]
        for i in (0, 3, 35, 36, 70, 71):
            lo, hi = level.tile_box(i)
            assert np.all(lo <= level.nodes[i]) and np.all(level.nodes[i] <= hi)

    def test_weight_tile_comparability(self, frame_j4):
        # frozen level-independent window for inner nodes
        for level in frame_j4.levels:
            lim = (1.0 + 4.0 * frame_j4.delta) * 2.0 ** (level.j + 1)
            inner = np.abs(level.nodes[:, 0]) <= lim
            ratio = level.weights[inner] / level.tile_measures()[inner]
            assert 0.5 < ratio.min() and ratio.max() < 2.0

    def test_inner_tile_scale(self, frame_j4):
        # |R| * 2^(j d) bounded for nodes within the (1+4 delta) 2^(j+1) cube
        for level in frame_j4.levels:
            lim = (1.0 + 4.0 * frame_j4.delta) * 2.0 ** (level.j + 1)
            inner = np.abs(level.nodes[:, 0]) <= lim
            scaled = level.tile_measures()[inner] * 2.0 ** (level.j * level.d)
            assert 0.4 < scaled.min() and scaled.max() < 7.0  # frozen

    def test_manifest(self, frame_j3):
        m = frame_j3.manifest()
        assert m["d"] == 1 and m["j_max"] == 3
        assert [lev["half_nodes"] for lev in m["levels"]] == [5, 11, 36, 135]


class TestKernels:
    def test_level0_is_ground_state(self, frame_j3):
        x, y = 0.3, -1.1
        want = hermite_function(0, x) * hermite_function(0, y)
        assert phi_kernel(frame_j3, 0, x, y) == pytest.approx(want, rel=1e-14)

    def test_level1_band(self, frame_j3):
        # level 1 samples the cutoff at integers, so only degrees 1..3 enter
        x, y = 0.7, -0.2
        a = frame_j3.pair.a_hat
        want = sum(
            float(a(nu)) * hc.projector_kernel(nu, x, y) for nu in range(1, 4)
        )
        assert phi_kernel(frame_j3, 1, x, y) == pytest.approx(want, rel=1e-12)

    def test_symmetry(self, frame_j3):
        assert phi_kernel(frame_j3, 2, 0.3, -1.1) == phi_kernel(frame_j3, 2, -1.1, 0.3)

    def test_quadratic_pair_kernels_match(self, frame_j3):
        assert psi_kernel(frame_j3, 2, 0.4, 1.0) == phi_kernel(frame_j3, 2, 0.4, 1.0)

    def test_needlet_eval_level0(self, frame_j3):
        level = frame_j3.levels[0]
        i = 4
        xi = level.nodes[i, 0]
        x = 0.55
        want = (
            math.sqrt(level.weights[i])
            * hermite_function(0, x)
            * hermite_function(0, xi)
        )
        assert needlet_eval(frame_j3, "analysis", 0, i, x) == pytest.approx(
            want, rel=1e-13
        )

    def test_analysis_equals_synthesis_for_tight_frame(self, frame_j3):
        v1 = needlet_eval(frame_j3, "analysis", 2, 30, 1.3)
        v2 = needlet_eval(frame_j3, "synthesis", 2, 30, 1.3)
        assert v1 == v2

    def test_needlet_decay_window(self, frame_j4):
        # frozen bound on |phi_xi(x)| (1 + 2^j |x - xi|)^5 / 2^(j/2) for
        # inner nodes, stable across levels
        for j in (2, 3):
            level = frame_j4.levels[j]
            lim = (1.0 + frame_j4.delta) * 2.0 ** (j + 1)
            idxs = [i for i in range(level.node_count) if abs(level.nodes[i, 0]) <= lim]
            i = idxs[len(idxs) // 2]
            xi = level.nodes[i, 0]
            xs = xi + np.linspace(-20.0, 20.0, 101) / 2.0**j
            vals = np.array(
                [needlet_eval(frame_j4, "analysis", j, i, x) for x in xs]
            )
            weighted = (
                np.abs(vals)
                * (1.0 + 2.0**j * np.abs(xs - xi)) ** 5
                / 2.0 ** (j / 2.0)
            )
            assert np.max(weighted) < 2e5  # frozen

    def test_d2_kernel_against_brute_force(self, frame_d2_j3):
        a = frame_d2_j3.pair.a_hat
        j, n = 2, 4
        x, y = np.array([0.4, -0.9]), np.array([1.2, 0.3])
        brute = 0.0
        for nu in range(4**j):
            w = float(a(nu / n))
            if w != 0.0:
                brute += w * hc.projector_kernel(nu, x, y)
        assert phi_kernel(frame_d2_j3, j, x, y) == pytest.approx(brute, rel=1e-13)

    def test_d2_derivative_kernel_matches_fd(self, frame_d2_j3):
        a = frame_d2_j3.pair.a_hat
        x, y = np.array([0.4, -0.9]), np.array([1.2, 0.3])
        val = nf.smoothed_kernel(
            a, 4, x.reshape(1, 2), y.reshape(1, 2), dim=2, dx_order=1
        )[0]
        eps = 1e-6
        xp, xm = x.copy(), x.copy()
        xp[0] += eps
        xm[0] -= eps
        fd = (
            nf.smoothed_kernel(a, 4, xp.reshape(1, 2), y.reshape(1, 2), dim=2)[0]
            - nf.smoothed_kernel(a, 4, xm.reshape(1, 2), y.reshape(1, 2), dim=2)[0]
        ) / (2 * eps)
        assert val == pytest.approx(fd, rel=1e-6)

    def test_d2_needlet_eval(self, frame_d2_j3):
        lev = frame_d2_j3.levels[1]
        i = 17
        got = needlet_eval(frame_d2_j3, "analysis", 1, i, (0.2, 0.8))
        want = math.sqrt(lev.weights[i]) * phi_kernel(
            frame_d2_j3, 1, (0.2, 0.8), lev.nodes[i]
        )
        assert got == want

    def test_d2_localization_inner_node(self, frame_d2_j3):
        # pick a node near the origin (flat middle index is an edge node
        # in the second coordinate under row-major ordering)
        n = 2 * frame_d2_j3.levels[2].half_nodes
        center = (n // 2) * n + n // 2
        rep = localization_profile(frame_d2_j3, 2, center, 6)
        assert rep.inner_max > 1.0  # genuinely inner
        assert rep.tail_max < 1e-8

    def test_invalid_side(self, frame_j3):
        with pytest.raises(ParameterError):
            needlet_eval(frame_j3, "other", 0, 0, 0.0)

    def test_invalid_node(self, frame_j3):
        with pytest.raises(ParameterError):
            needlet_eval(frame_j3, "analysis", 0, 10**6, 0.0)


class TestTransforms:
    def test_ground_state_only_level_zero(self, frame_j3):
        f = HermiteExpansion(1, 0, {(0,): 2.0})
        s = analyze(f, frame_j3)
        assert sorted(s.level_values) == [0]
        level = frame_j3.levels[0]
        h0 = hc.hermite_values(0, level.rule.nodes)[0]
        want = np.sqrt(level.weights) * 2.0 * h0
        np.testing.assert_allclose(s.level_values[0], want, rtol=1e-13)

    def test_level_selectivity(self, frame_j3):
        f = HermiteExpansion(1, 2, {(2,): 1.0})
        assert sorted(analyze(f, frame_j3).level_values) == [1, 2]

    def test_depth_guard(self, frame_j3):
        f = HermiteExpansion(1, 65, {(65,): 1.0})
        with pytest.raises(FrameDepthError):
            analyze(f, frame_j3)

    def test_parseval_tight_frame(self, frame_j4):
        rng = np.random.default_rng(31)
        for _ in range(5):
            f = random_expansion_1d(16, rng)
            s = analyze(f, frame_j4)
            assert s.sum_squares() == pytest.approx(
                f.l2_norm() ** 2, rel=1e-12
            )

    def test_roundtrip_1d(self, frame_j4):
        rng = np.random.default_rng(7)
        f = random_expansion_1d(64, rng)
        g = synthesize(analyze(f, frame_j4), frame_j4)
        want = f.coeff_array()
        got = np.zeros_like(want)
        for (k,), v in g.coeffs.items():
            if k <= 64:
                got[k] = v
            else:
                assert abs(v) < 1e-12
        assert np.max(np.abs(got - want)) < 1e-10

    def test_roundtrip_2d(self, frame_d2_j3):
        rng = np.random.default_rng(11)
        f = random_expansion_2d(16, rng)
        g = synthesize(analyze(f, frame_d2_j3), frame_d2_j3)
        want = f.coeff_array()
        got = np.zeros_like(want)
        for (a1, a2), v in g.coeffs.items():
            if a1 <= 16 and a2 <= 16:
                got[a1, a2] = v
            else:
                assert abs(v) < 1e-12
        assert np.max(np.abs(got - want)) < 1e-10

    def test_roundtrip_deep_level(self):
        # level 5 runs the scale-ledger matrix path: nodes near |t| = 92
        # with degrees near 1024, where the plain recurrence underflows
        from hermite_needlets import build_frame

        frame = build_frame(d=1, delta=0.025, j_max=5, cutoff="quadratic")
        rng = np.random.default_rng(55)
        f = random_expansion_1d(256, rng)
        g = synthesize(analyze(f, frame), frame)
        want = f.coeff_array()
        got = np.zeros_like(want)
        for (k,), v in g.coeffs.items():
            if k <= 256:
                got[k] = v
            else:
                assert abs(v) < 1e-11
        assert np.max(np.abs(got - want)) < 1e-10

    def test_delta_boundaries(self):
        assert half_node_count(0, 1.0 / 37.0 - 1e-9) >= 5
        with pytest.raises(ParameterError):
            half_node_count(0, 1.0 / 37.0)

    def test_zero_coefficients_synthesize_to_zero(self, frame_j3):
        s = nf.NeedletCoefficients(frame=frame_j3)
        g = synthesize(s, frame_j3)
        assert g.coeffs == {}

    def test_single_coefficient_synthesis(self, frame_j3):
        j, i = 1, 7
        level = frame_j3.levels[j]
        s = nf.NeedletCoefficients(
            frame=frame_j3, level_values={j: np.zeros(level.node_count)}
        )
        s.level_values[j][i] = 1.0
        g = synthesize(s, frame_j3)
        xi = level.nodes[i, 0]
        lam = level.weights[i]
        b = frame_j3.pair.b_hat
        for (k,), v in g.coeffs.items():
            want = (
                math.sqrt(lam) * float(b(k / 1.0)) * hermite_function(k, xi)
            )
            assert v == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_frame_mismatch(self, frame_j3, frame_j4):
        f = HermiteExpansion(1, 0, {(0,): 1.0})
        s = analyze(f, frame_j3)
        with pytest.raises(FrameMismatchError):
            synthesize(s, frame_j4)

    def test_dimension_mismatch(self, frame_d2_j3):
        f = HermiteExpansion(1, 0, {(0,): 1.0})
        with pytest.raises(Exception):
            analyze(f, frame_d2_j3)

    def test_parseval_2d(self, frame_d2_j3):
        rng = np.random.default_rng(13)
        f = random_expansion_2d(8, rng)
        s = analyze(f, frame_d2_j3)
        assert s.sum_squares() == pytest.approx(f.l2_norm() ** 2, rel=1e-12)

    def test_coefficient_access(self, frame_j3):
        f = HermiteExpansion(1, 0, {(0,): 1.0})
        s = analyze(f, frame_j3)
        d = s.as_dict()
        assert set(j for j, _ in d) == {0}
        assert s.get(0, 3) == d[(0, 3)]
        assert s.get(2, 0) == 0.0


class TestLocalization:
    def test_tail_is_evanescent(self, frame_j4):
        rep = localization_profile(frame_j4, 3, frame_j4.levels[3].node_count // 2, 6)
        assert rep.tail_max < 1e-8

    def test_k0_is_raw_kernel(self, frame_j4):
        rep = localization_profile(frame_j4, 2, 30, 0)
        max_abs = max(abs(v) for _, v, _ in rep.samples)
        assert rep.inner_max * 2.0**2 <= max_abs + 1e-15

    def test_inner_constant_stable_across_levels(self, frame_j4):
        # frozen: level constants for k = 6 vary by well under a factor 4
        consts = []
        for j in (2, 3, 4):
            level = frame_j4.levels[j]
            lim = (1.0 + frame_j4.delta) * 2.0 ** (j + 1)
            idxs = [
                i
                for i in range(level.node_count)
                if abs(level.nodes[i, 0]) <= lim
            ]
            sample = idxs[:: max(1, len(idxs) // 12)]
            consts.append(
                max(
                    localization_profile(frame_j4, j, i, 6).inner_max
                    for i in sample
                )
            )
        assert max(consts) / min(consts) < 4.0

    def test_k_bound(self, frame_j3):
        with pytest.raises(ParameterError):
            localization_profile(frame_j3, 1, 0, 11)

    def test_derivative_variant_runs(self, frame_j3):
        rep = localization_profile(frame_j3, 2, 30, 6, dx_order=1)
        assert rep.inner_max > 0.0
        assert rep.tail_max < 1e-6
