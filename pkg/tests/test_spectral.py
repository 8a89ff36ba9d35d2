import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbithull import (
    build_algebra,
    embed_element,
    eig_hermitian,
    evaluate_trace,
    extremal_traces,
    functional_calculus,
    operator_norm,
    spectrum_profile,
)
from orbithull.spectral import (
    add_constant,
    negative_part,
    positive_part,
    shifted_positive_part,
    truncate_above,
)
from conftest import haar_unitary, random_hermitian


class TestEigHermitian:
    def test_identity(self):
        lam, u = eig_hermitian(np.eye(2))
        assert np.allclose(lam, [1.0, 1.0])
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)

    def test_reflection(self):
        lam, u = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(lam, [1.0, -1.0])

    def test_construct_then_recover(self):
        # plant the spectrum (3, 1, -2) behind a random unitary, recover it
        rng = np.random.default_rng(11)
        v = haar_unitary(rng, 3)
        a = v @ np.diag([3.0, 1.0, -2.0]) @ v.conj().T
        lam, u = eig_hermitian(a)
        assert np.max(np.abs(lam - np.array([3.0, 1.0, -2.0]))) < 1e-10
        rec = u @ np.diag(lam) @ u.conj().T
        assert np.max(np.abs(rec - a)) < 1e-10

    @given(st.integers(0, 2**31 - 1), st.integers(1, 12))
    def test_reconstruction_and_unitarity(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_hermitian(rng, n, scale=float(rng.uniform(0.1, 10.0)))
        lam, u = eig_hermitian(a)
        scale = max(1.0, float(np.max(np.abs(a))))
        assert np.all(np.diff(lam) <= 1e-14 * scale)
        assert np.max(np.abs(u @ np.diag(lam) @ u.conj().T - a)) <= 1e-11 * n * scale
        assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-11

    @given(st.integers(0, 2**31 - 1), st.integers(2, 8))
    def test_matches_numpy(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_hermitian(rng, n)
        lam, _ = eig_hermitian(a)
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.max(np.abs(lam - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))

    def test_no_convergence_when_budget_exhausted(self, monkeypatch, rng):
        import orbithull.spectral as spectral_mod
        from orbithull import NoConvergence

        monkeypatch.setattr(spectral_mod, "SWEEP_BUDGET", 0)
        with pytest.raises(NoConvergence):
            spectral_mod.eig_hermitian(random_hermitian(rng, 4))


class TestFunctionalCalculus:
    def test_positive_part(self):
        alg = build_algebra([2])
        x = embed_element(alg, [np.diag([1.0, -1.0])])
        y = functional_calculus(x, positive_part())
        assert np.allclose(y.blocks[0], np.diag([1.0, 0.0]))

    def test_shifted_positive_part(self):
        alg = build_algebra([2])
        x = embed_element(alg, [np.diag([2.0, 1.0])])
        y = functional_calculus(x, shifted_positive_part(1.5))
        assert np.allclose(y.blocks[0], np.diag([0.5, 0.0]), atol=1e-12)

    def test_identity_function(self, rng):
        alg = build_algebra([3])
        x = embed_element(alg, [random_hermitian(rng, 3)])
        y = functional_calculus(x, lambda s: s)
        assert np.max(np.abs(y.blocks[0] - x.blocks[0])) < 1e-10

    def test_negative_part_and_cap(self):
        alg = build_algebra([3])
        x = embed_element(alg, [np.diag([2.0, -0.5, 0.0])])
        y = functional_calculus(x, negative_part())
        assert sorted(np.diag(y.blocks[0]).real) == pytest.approx([0.0, 0.0, 0.5])
        z = functional_calculus(x, truncate_above(1.0))
        assert sorted(np.diag(z.blocks[0]).real) == pytest.approx([-0.5, 0.0, 1.0])

    @given(st.integers(0, 2**31 - 1), st.integers(1, 6))
    def test_composition(self, seed, n):
        rng = np.random.default_rng(seed)
        alg = build_algebra([n])
        x = embed_element(alg, [random_hermitian(rng, n)])
        f = shifted_positive_part(0.25)
        g = truncate_above(0.5)
        once = functional_calculus(functional_calculus(x, f), g)
        composed = functional_calculus(x, lambda s: g(f(s)))
        scale = max(1.0, float(np.max(np.abs(x.blocks[0]))))
        assert np.max(np.abs(once.blocks[0] - composed.blocks[0])) <= 2e-10 * scale

    def test_shift(self):
        alg = build_algebra([2])
        x = embed_element(alg, [np.diag([1.0, 0.0])])
        y = functional_calculus(x, add_constant(-0.5))
        assert np.allclose(sorted(np.diag(y.blocks[0]).real), [-0.5, 0.5])


class TestSpectrumProfile:
    def test_sorted(self):
        alg = build_algebra([3])
        x = embed_element(alg, [np.diag([0.0, 1.0, 0.5])])
        assert spectrum_profile(x).eigenvalues == ((1.0, 0.5, 0.0),)

    def test_blocks(self):
        alg = build_algebra([2, 1])
        x = embed_element(alg, [np.diag([1.0, 0.0]), np.array([[2.0]])])
        assert spectrum_profile(x).eigenvalues == ((1.0, 0.0), (2.0,))

    def test_conjugation_invariant(self, rng):
        alg = build_algebra([4])
        x = embed_element(alg, [random_hermitian(rng, 4)])
        u = haar_unitary(rng, 4)
        y = embed_element(alg, [u @ x.blocks[0] @ u.conj().T])
        px = np.array(spectrum_profile(x).eigenvalues[0])
        py = np.array(spectrum_profile(y).eigenvalues[0])
        assert np.max(np.abs(px - py)) < 1e-10

    def test_deterministic(self, rng):
        alg = build_algebra([5])
        x = embed_element(alg, [random_hermitian(rng, 5)])
        assert spectrum_profile(x) == spectrum_profile(x)


@given(st.integers(0, 2**31 - 1), st.lists(st.integers(1, 4), min_size=1, max_size=2),
       st.floats(-2.0, 2.0))
def test_trace_of_cutoff_matches_spectral_sum(seed, dims, t):
    # tau((x - t)_+) agrees with the partial sums of the spectrum
    rng = np.random.default_rng(seed)
    alg = build_algebra(dims)
    x = embed_element(alg, [random_hermitian(rng, n) for n in dims])
    cut = functional_calculus(x, shifted_positive_part(t))
    prof = spectrum_profile(x)
    scale = max(1.0, operator_norm(x))
    for tr, lam in zip(extremal_traces(alg), prof.eigenvalues):
        expected = float(np.sum(np.maximum(np.array(lam) - t, 0.0)))
        assert abs(evaluate_trace(tr, cut) - expected) <= 1e-9 * scale


@given(st.integers(0, 2**31 - 1), st.integers(1, 6))
def test_weyl_monotonicity(seed, n):
    # a <= b as forms implies every top-k eigenvalue sum of a is <= that of b
    rng = np.random.default_rng(seed)
    alg = build_algebra([n])
    a = embed_element(alg, [random_hermitian(rng, n)])
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = embed_element(alg, [a.blocks[0] + g @ g.conj().T])
    la = np.array(spectrum_profile(a).eigenvalues[0])
    lb = np.array(spectrum_profile(b).eigenvalues[0])
    scale = max(1.0, operator_norm(b))
    assert np.all(np.cumsum(la) <= np.cumsum(lb) + 1e-9 * scale)
