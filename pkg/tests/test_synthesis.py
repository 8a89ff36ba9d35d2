import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from orbithull import (
    BadEpsilon,
    CentralElement,
    EpsilonTooSmall,
    NotDoublyStochastic,
    NotMajorized,
    RankOverflow,
    apply_combination,
    birkhoff_decompose,
    build_algebra,
    dixmier_pinch,
    embed_element,
    generate_pair,
    hlp_transfer,
    operator_norm,
    orbit_distance,
    synthesize_combination,
    uniform_probe,
)
from orbithull.synthesis import equalize_weights
from orbithull.synthesis import _diag_greedy_synth, _project_spectrum
from conftest import haar_unitary, random_hermitian


def perm_matrix(p):
    m = np.zeros((len(p), len(p)))
    m[np.arange(len(p)), p] = 1.0
    return m


class TestHlpTransfer:
    def test_two_point_average(self):
        d = hlp_transfer([0.5, 0.5], [1.0, 0.0])
        assert np.allclose(d, 0.5 * np.ones((2, 2)), atol=1e-12)

    def test_identity_on_equal(self):
        d = hlp_transfer([0.3, 0.2, 0.1], [0.3, 0.2, 0.1])
        assert np.allclose(d, np.eye(3))

    def test_three_point(self):
        d = hlp_transfer([2 / 3, 1 / 3, 0.0], [1.0, 0.0, 0.0])
        assert np.allclose(d[:, 0], [2 / 3, 1 / 3, 0.0], atol=1e-12)
        assert np.allclose(d @ np.array([1.0, 0.0, 0.0]), [2 / 3, 1 / 3, 0.0], atol=1e-9)

    def test_rejects_unmajorized(self):
        with pytest.raises(NotMajorized):
            hlp_transfer([1.0, 0.0], [0.5, 0.5])

    @given(st.integers(0, 2**31 - 1), st.integers(2, 9))
    def test_transfer_property(self, seed, n):
        rng = np.random.default_rng(seed)
        beta = np.sort(rng.standard_normal(n))[::-1]
        w = rng.dirichlet(np.ones(int(rng.integers(1, 5))))
        alpha = np.sort(sum(wi * beta[rng.permutation(n)] for wi in w))[::-1]
        d = hlp_transfer(alpha, beta)
        assert np.max(np.abs(d @ beta - alpha)) <= 1e-9
        assert np.max(np.abs(d.sum(axis=0) - 1.0)) <= 1e-10
        assert np.max(np.abs(d.sum(axis=1) - 1.0)) <= 1e-10
        assert d.min() >= -1e-12


class TestBirkhoffDecompose:
    def test_two_by_two(self):
        w, perms = birkhoff_decompose(0.5 * np.ones((2, 2)))
        assert len(perms) == 2
        rec = sum(wi * perm_matrix(p) for wi, p in zip(w, perms))
        assert np.allclose(rec, 0.5 * np.ones((2, 2)), atol=1e-10)

    def test_permutation_passthrough(self):
        p = perm_matrix([2, 0, 1])
        w, perms = birkhoff_decompose(p)
        assert len(perms) == 1 and w[0] == pytest.approx(1.0)
        assert list(perms[0]) == [2, 0, 1]

    def test_uniform_three(self):
        d = np.full((3, 3), 1.0 / 3.0)
        w, perms = birkhoff_decompose(d)
        rec = sum(wi * perm_matrix(p) for wi, p in zip(w, perms))
        assert np.max(np.abs(rec - d)) <= 1e-10

    def test_rejects_non_ds(self):
        with pytest.raises(NotDoublyStochastic):
            birkhoff_decompose(np.array([[0.7, 0.4], [0.3, 0.6]]))
        with pytest.raises(NotDoublyStochastic):
            birkhoff_decompose(np.array([[1.5, -0.5], [-0.5, 1.5]]))

    @given(st.integers(0, 2**31 - 1), st.integers(2, 8))
    def test_reconstruction_and_bound(self, seed, n):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 6))
        w0 = rng.dirichlet(np.ones(k))
        d = sum(wi * perm_matrix(rng.permutation(n)) for wi in w0)
        w, perms = birkhoff_decompose(d)
        assert len(perms) <= (n - 1) ** 2 + 1
        assert np.all(w > 0)
        rec = sum(wi * perm_matrix(p) for wi, p in zip(w, perms))
        assert np.max(np.abs(rec - d)) <= 1e-9


class TestSpectrumProjection:
    @staticmethod
    def lp_feasible(alpha, beta, r):
        """Independent feasibility oracle for the projection polytope."""
        n = alpha.size
        a_ub, b_ub = [], []
        for k in range(n - 1):  # decreasing
            row = np.zeros(n)
            row[k + 1], row[k] = 1.0, -1.0
            a_ub.append(row)
            b_ub.append(0.0)
        for k in range(n - 1):  # prefix sums below beta's
            row = np.zeros(n)
            row[: k + 1] = 1.0
            a_ub.append(row)
            b_ub.append(float(np.cumsum(beta)[k]))
        a_eq = [np.ones(n)]
        b_eq = [float(beta.sum())]
        res = linprog(
            np.zeros(n),
            A_ub=np.array(a_ub) if a_ub else None,
            b_ub=np.array(b_ub) if b_ub else None,
            A_eq=np.array(a_eq),
            b_eq=np.array(b_eq),
            bounds=list(zip(alpha - r, alpha + r)),
            method="highs",
        )
        return res.status == 0

    @given(st.integers(0, 2**31 - 1), st.integers(1, 9))
    def test_projection_at_exact_radius(self, seed, n):
        rng = np.random.default_rng(seed)
        alpha = np.sort(rng.standard_normal(n))[::-1]
        beta = np.sort(rng.standard_normal(n))[::-1]
        ks = np.arange(1, n + 1)
        top = np.max((np.cumsum(alpha) - np.cumsum(beta)) / ks)
        bot = np.max((np.cumsum(beta[::-1]) - np.cumsum(alpha[::-1])) / ks)
        r = max(0.0, top, bot) + 1e-12
        assert self.lp_feasible(alpha, beta, r + 1e-9)
        out = _project_spectrum(alpha, beta, r)
        assert np.all(np.diff(out) <= 1e-9)
        assert np.max(np.abs(out - alpha)) <= r + 1e-9
        assert np.all(np.cumsum(out) <= np.cumsum(beta) + 1e-9)
        assert abs(out.sum() - beta.sum()) <= 1e-9

    @given(st.integers(0, 2**31 - 1), st.integers(2, 10))
    def test_diag_greedy_synthesis(self, seed, n):
        # the probe's engine: few permutations of lb landing near la
        rng = np.random.default_rng(seed)
        lb = np.sort(rng.uniform(-1.0, 1.0, size=n))[::-1]
        w0 = rng.dirichlet(np.ones(3))
        la = np.sort(sum(wi * lb[rng.permutation(n)] for wi in w0))[::-1]
        target = 0.2
        perms, w = _diag_greedy_synth(la, lb, target)
        assert abs(w.sum() - 1.0) <= 1e-12
        achieved = sum(wi * lb[p] for wi, p in zip(w, perms))
        assert float(np.max(np.abs(achieved - la))) <= target + 1e-12


class TestSynthesizeCombination:
    def test_two_point(self):
        alg = build_algebra([2])
        a = embed_element(alg, [np.diag([0.5, 0.5])])
        b = embed_element(alg, [np.diag([1.0, 0.0])])
        comb = synthesize_combination(alg, a, b, 1e-6)
        assert len(comb.weights) == 2
        assert comb.weights == pytest.approx((0.5, 0.5), abs=1e-9)
        assert comb.target_error <= 1e-9

    def test_exact_conjugate(self, rng):
        alg = build_algebra([3])
        b = embed_element(alg, [random_hermitian(rng, 3)])
        u = haar_unitary(rng, 3)
        a = embed_element(alg, [u @ b.blocks[0] @ u.conj().T])
        comb = synthesize_combination(alg, a, b, 1e-6)
        assert len(comb.weights) == 1
        assert comb.weights[0] == pytest.approx(1.0)
        assert comb.target_error <= 1e-9

    def test_distance_case(self):
        alg = build_algebra([2])
        a = embed_element(alg, [np.diag([1.0, 1.0])])
        b = embed_element(alg, [np.diag([1.0, 0.0])])
        comb = synthesize_combination(alg, a, b, 1e-3)
        assert 0.5 <= comb.target_error <= 0.5 + 1e-3

    def test_epsilon_too_small(self):
        alg = build_algebra([2])
        a = embed_element(alg, [np.diag([0.5, 0.5])])
        b = embed_element(alg, [np.diag([1.0, 0.0])])
        with pytest.raises(EpsilonTooSmall):
            synthesize_combination(alg, a, b, 1e-12)
        with pytest.raises(BadEpsilon):
            synthesize_combination(alg, a, b, 0.0)

    @given(st.integers(0, 2**31 - 1), st.sampled_from([2, 3, 4, 6]))
    def test_round_trip_on_majorizing_pairs(self, seed, n):
        alg = build_algebra([n])
        a, b = generate_pair(alg, seed, "majorizing")
        comb = synthesize_combination(alg, a, b, 1e-6)
        # type invariants, recomputed from scratch
        assert abs(sum(comb.weights) - 1.0) <= 1e-12
        for u in comb.unitaries:
            for blk in u:
                defect = np.max(np.abs(blk.conj().T @ blk - np.eye(blk.shape[0])))
                assert defect <= 1e-10
        resid = a.blocks[0] - sum(
            w * (u[0] @ b.blocks[0] @ u[0].conj().T) for w, u in zip(comb.weights, comb.unitaries)
        )
        err = float(np.max(np.abs(np.linalg.eigvalsh(resid))))
        assert err <= 1e-6
        assert abs(err - comb.target_error) <= 1e-9
        assert len(comb.weights) <= (n - 1) ** 2 + 1

    @given(st.integers(0, 2**31 - 1))
    def test_multiblock_distance_realized(self, seed):
        alg = build_algebra([2, 3])
        a, b = generate_pair(alg, seed, "random")
        r = orbit_distance(alg, a, b)
        comb = synthesize_combination(alg, a, b, 1e-4)
        assert comb.target_error <= r + 1e-4
        approx = apply_combination(comb, b)
        assert operator_norm(embed_element(alg, [x - y for x, y in zip(a.blocks, approx.blocks)])) <= r + 1e-4


class TestDixmierPinch:
    def test_half_swap(self):
        alg = build_algebra([2])
        rho, comb = dixmier_pinch(alg, [1], [1], CentralElement((1.0,)), CentralElement((0.0,)))
        assert rho.values == (0.5,)
        assert comb.target_error <= 1e-12
        assert sorted(comb.weights) == pytest.approx([0.5, 0.5])

    def test_equal_coefficients(self):
        alg = build_algebra([3])
        rho, comb = dixmier_pinch(alg, [1], [1], CentralElement((0.7,)), CentralElement((0.7,)))
        assert rho.values == (0.7,)
        assert len(comb.weights) == 1

    def test_remark_formula(self):
        # E(P) = 1/3, E(Q) = 2/3: rho = (mu + 2 nu) / 3
        alg = build_algebra([3])
        mu, nu = 0.9, 0.3
        rho, comb = dixmier_pinch(alg, [1], [2], CentralElement((mu,)), CentralElement((nu,)))
        assert rho.values[0] == pytest.approx((mu + 2 * nu) / 3.0, abs=1e-15)
        assert comb.target_error <= 1e-9

    def test_rank_overflow(self):
        alg = build_algebra([2])
        with pytest.raises(RankOverflow):
            dixmier_pinch(alg, [2], [1], CentralElement((1.0,)), CentralElement((0.0,)))

    @given(st.integers(0, 2**31 - 1))
    def test_random_instances(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 3))
        dims = [int(rng.integers(1, 7)) for _ in range(m)]
        alg = build_algebra(dims)
        rank_p = [int(rng.integers(0, n + 1)) for n in dims]
        rank_q = [int(rng.integers(0, n - p + 1)) for n, p in zip(dims, rank_p)]
        mu = CentralElement(tuple(rng.uniform(-1, 1, size=m)))
        nu = CentralElement(tuple(rng.uniform(-1, 1, size=m)))
        rho, comb = dixmier_pinch(alg, rank_p, rank_q, mu, nu)
        for j in range(m):
            lo, hi = min(mu.values[j], nu.values[j]), max(mu.values[j], nu.values[j])
            assert lo - 1e-12 <= rho.values[j] <= hi + 1e-12
            p, q = rank_p[j], rank_q[j]
            if p + q == 0:
                assert rho.values[j] == mu.values[j]
            else:
                assert rho.values[j] == pytest.approx(
                    (mu.values[j] * p + nu.values[j] * q) / (p + q), abs=1e-14
                )
        assert comb.target_error <= 1e-9
        # certified element: uniform rho on the compressed coordinates
        source = embed_element(
            alg,
            [
                np.diag(np.concatenate([np.full(p, mu.values[j]), np.full(q, nu.values[j]), np.zeros(n - p - q)]))
                for j, (p, q, n) in enumerate(zip(rank_p, rank_q, dims))
            ],
        )
        averaged = apply_combination(comb, source)
        for j, (p, q, n) in enumerate(zip(rank_p, rank_q, dims)):
            if p + q:
                lam = np.linalg.eigvalsh(averaged.blocks[j][: p + q, : p + q])
                assert np.max(np.abs(lam - rho.values[j])) <= 1e-9


class TestEqualizeWeights:
    def test_equal_weight_form(self):
        alg = build_algebra([3])
        a, b = generate_pair(alg, 2, "majorizing")
        comb = synthesize_combination(alg, a, b, 1e-6)
        eq = equalize_weights(comb, b, 64)
        assert len(eq.weights) == 64
        assert all(w == 1.0 / 64 for w in eq.weights)
        # drift is bounded by terms/resolution times the norm scale
        assert eq.target_error <= comb.target_error + len(comb.weights) / 64 * 2.5
        approx = apply_combination(eq, b)
        resid = max(
            float(np.max(np.abs(np.linalg.eigvalsh(x - y))))
            for x, y in zip(a.blocks, approx.blocks)
        )
        assert resid <= eq.target_error + 1e-12

    def test_resolution_too_small(self):
        alg = build_algebra([2])
        a = embed_element(alg, [np.diag([0.5, 0.5])])
        b = embed_element(alg, [np.diag([1.0, 0.0])])
        comb = synthesize_combination(alg, a, b, 1e-6)
        with pytest.raises(BadEpsilon):
            equalize_weights(comb, b, 1)


class TestUniformProbe:
    def test_epsilon_two_single_terms(self):
        result = uniform_probe(2.0, [2, 3], trials=5, seed=1)
        assert all(count == 1 for _, count in result.table)
        assert all(err <= 2.0 + 1e-9 for *_, err in result.rows)

    def test_deterministic(self):
        r1 = uniform_probe(0.5, [2, 4], trials=4, seed=9)
        r2 = uniform_probe(0.5, [2, 4], trials=4, seed=9)
        assert r1 == r2
        assert r1.to_csv() == r2.to_csv()

    def test_error_bound_holds(self):
        result = uniform_probe(0.5, [2, 5, 9], trials=6, seed=3)
        assert all(err <= 0.5 for *_, err in result.rows)

    def test_monotone_in_epsilon(self):
        loose = uniform_probe(1.0, [3, 6], trials=6, seed=4)
        tight = uniform_probe(0.25, [3, 6], trials=6, seed=4)
        for (n1, c1), (n2, c2) in zip(loose.table, tight.table):
            assert n1 == n2
            assert c1 <= c2

    def test_bad_epsilon(self):
        with pytest.raises(BadEpsilon):
            uniform_probe(0.0, [2], trials=1, seed=0)
        with pytest.raises(BadEpsilon):
            uniform_probe(2.5, [2], trials=1, seed=0)

    def test_csv_shape(self):
        result = uniform_probe(1.0, [2, 3], trials=2, seed=0)
        lines = result.to_csv().strip().split("\n")
        assert lines[0] == "n,trial,terms,error"
        assert len(lines) == 1 + 2 * 2
