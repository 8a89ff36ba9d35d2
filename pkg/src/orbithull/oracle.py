"""Brute-force verifiers, independent of the main decision procedures.

The Frank-Wolfe solver searches the hull of unitary conjugates directly in
Frobenius geometry and reports the operator norm of an actual residual, so
its output is an upper bound on the hull distance by construction.  This
module intentionally uses numpy's eigensolver rather than the library's own
Jacobi path: the two routes must stay independent of each other.
"""

from __future__ import annotations

import numpy as np

from .algebra import HermitianElement, MultiMatrixAlgebra, _freeze
from .errors import LengthMismatch, ShapeMismatch

PAIR_KINDS = ("majorizing", "submajorizing", "random", "boundary")


def diagonal_majorization_oracle(alpha, beta, tol: float = 1e-9) -> bool:
    """Classical eigenvalue majorization on plain vectors: equal totals and
    dominance of every top-k partial sum after sorting non-increasing."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.shape != beta.shape or alpha.ndim != 1:
        raise LengthMismatch("vectors must have equal length")
    a = -np.sort(-alpha)
    b = -np.sort(-beta)
    ca, cb = np.cumsum(a), np.cumsum(b)
    if abs(ca[-1] - cb[-1]) > tol:
        return False
    return bool(np.all(ca <= cb + tol))


def _rng_for(seed, salt: int) -> np.random.Generator:
    if isinstance(seed, (tuple, list)):
        entropy = tuple(int(x) for x in seed) + (salt,)
    else:
        entropy = (int(seed), salt)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def _op_norm(blocks) -> float:
    out = 0.0
    for b in blocks:
        vals = np.linalg.eigvalsh(b)
        if vals.size:
            out = max(out, float(np.max(np.abs(vals))))
    return out


def _random_contraction_element(rng: np.random.Generator, alg: MultiMatrixAlgebra) -> list[np.ndarray]:
    blocks = [_random_hermitian(rng, n) for n in alg.block_dims]
    norm = _op_norm(blocks)
    target = 0.4 + 0.55 * rng.random()
    s = target / max(norm, 1e-300)
    return [s * b for b in blocks]


def _hull_deficit(a_blocks, b_blocks) -> float:
    """Largest average partial-sum deficit between the spectra: the hull
    distance when positive, computed here with numpy only."""
    worst = -np.inf
    for x, y in zip(a_blocks, b_blocks):
        la = np.sort(np.linalg.eigvalsh(x))[::-1]
        lb = np.sort(np.linalg.eigvalsh(y))[::-1]
        k = np.arange(1, la.size + 1, dtype=float)
        worst = max(worst, float(np.max((np.cumsum(la) - np.cumsum(lb)) / k)))
        worst = max(worst, float(np.max((np.cumsum(lb[::-1]) - np.cumsum(la[::-1])) / k)))
    return worst


def generate_pair(
    alg: MultiMatrixAlgebra,
    seed,
    kind: str,
    radius: float = 0.3,
) -> tuple[HermitianElement, HermitianElement]:
    """Deterministic test pairs.

    kind:
      * ``majorizing``     a is an explicit convex combination of unitary
                           conjugates of a random contraction b, so a lies in
                           the orbit hull by construction.
      * ``boundary``       the majorizing construction shifted by
                           ``radius * 1``, placing a at hull distance exactly
                           ``radius``.
      * ``submajorizing``  a = sum_i t_i d_i b d_i* with random contractions
                           d_i, so a is submajorized by b.
      * ``random``         independent random selfadjoint contractions,
                           redrawn while the pair sits within 3e-3 of the
                           hull boundary, so that membership is unambiguous
                           (planted near-boundary pairs are what ``boundary``
                           is for).

    The same (seed, kind) always reproduces the same pair bit for bit.
    """
    if kind not in PAIR_KINDS:
        raise ShapeMismatch(f"unknown pair kind {kind!r}; expected one of {PAIR_KINDS}")
    rng = _rng_for(seed, PAIR_KINDS.index(kind))
    b_blocks = _random_contraction_element(rng, alg)

    if kind == "random":
        a_blocks = _random_contraction_element(rng, alg)
        for _ in range(100):
            if abs(_hull_deficit(a_blocks, b_blocks)) > 3e-3:
                break
            a_blocks = _random_contraction_element(rng, alg)
    else:
        terms = int(rng.integers(2, 6))
        weights = rng.dirichlet(np.ones(terms))
        a_blocks = [np.zeros((n, n), dtype=np.complex128) for n in alg.block_dims]
        for i in range(terms):
            for j, n in enumerate(alg.block_dims):
                if kind == "submajorizing":
                    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                    d = g * (rng.random() / max(np.linalg.norm(g, 2), 1e-300))
                else:
                    d = _haar_unitary(rng, n)
                a_blocks[j] += weights[i] * (d @ b_blocks[j] @ d.conj().T)
        if kind == "boundary":
            a_blocks = [blk + radius * np.eye(blk.shape[0]) for blk in a_blocks]

    def finish(blocks):
        return HermitianElement(tuple(_freeze(0.5 * (x + x.conj().T)) for x in blocks))

    return finish(a_blocks), finish(b_blocks)


def _simplex_lsq(mat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """min ||mat @ c - y|| over the probability simplex (active-set on the
    equality-constrained KKT system; deterministic)."""
    k = mat.shape[1]
    if k == 1:
        return np.ones(1)
    gram = mat.T @ mat
    rhs = mat.T @ y
    active = np.ones(k, dtype=bool)
    c = np.full(k, 1.0 / k)
    for _ in range(3 * k + 12):
        idx = np.flatnonzero(active)
        ka = idx.size
        kkt = np.zeros((ka + 1, ka + 1))
        kkt[:ka, :ka] = gram[np.ix_(idx, idx)] + 1e-13 * np.eye(ka)
        kkt[:ka, ka] = 1.0
        kkt[ka, :ka] = 1.0
        b = np.zeros(ka + 1)
        b[:ka] = rhs[idx]
        b[ka] = 1.0
        try:
            sol = np.linalg.solve(kkt, b)
        except np.linalg.LinAlgError:
            break
        ca = sol[:ka]
        if np.all(ca >= -1e-12):
            c = np.zeros(k)
            c[idx] = np.maximum(ca, 0.0)
            c /= c.sum()
            grad = gram @ c - rhs
            mu = -sol[ka]
            outside = np.flatnonzero(~active)
            viol = outside[grad[outside] < mu - 1e-12] if outside.size else outside
            if viol.size == 0:
                return c
            active[viol[np.argmin(grad[viol])]] = True
            continue
        cc = c[idx]
        step = ca - cc
        shrink = step < -1e-15
        alpha = min(1.0, float(np.min(-cc[shrink] / step[shrink]))) if np.any(shrink) else 1.0
        cnew = np.maximum(cc + alpha * step, 0.0)
        c = np.zeros(k)
        c[idx] = cnew
        total = c.sum()
        if total <= 0:
            c[idx[int(np.argmax(cnew))]] = 1.0
        else:
            c /= total
        active = c > 0
        if not active.any():
            active[int(np.argmax(cnew))] = True
    return c


class _FWState:
    """One Frank-Wolfe run: atoms are block tuples u b u*, kept flat for the
    weight re-optimization."""

    def __init__(self, a_blocks, b_blocks, beta_desc, vb_desc):
        self.a = a_blocks
        self.b = b_blocks
        self.beta_desc = beta_desc  # per block, eigenvalues of b descending
        self.vb_desc = vb_desc
        self.atoms: list[tuple[np.ndarray, ...]] = []
        self.weights = np.zeros(0)
        self.x = [np.zeros_like(blk) for blk in a_blocks]

    def flat(self, blocks) -> np.ndarray:
        return np.concatenate([np.concatenate([blk.real.ravel(), blk.imag.ravel()]) for blk in blocks])

    def add_atom(self, atom) -> int:
        for i, existing in enumerate(self.atoms):
            if all(np.max(np.abs(e - n)) < 1e-13 for e, n in zip(existing, atom)):
                return i
        self.atoms.append(tuple(atom))
        self.weights = np.append(self.weights, 0.0)
        return len(self.atoms) - 1

    def set_weights(self, w) -> None:
        self.weights = np.asarray(w, dtype=float)
        self.x = [np.zeros_like(blk) for blk in self.a]
        for wi, atom in zip(self.weights, self.atoms):
            for j, blk in enumerate(atom):
                self.x[j] = self.x[j] + wi * blk

    def correct_weights(self) -> None:
        mat = np.stack([self.flat(atom) for atom in self.atoms], axis=1)
        c = _simplex_lsq(mat, self.flat(self.a))
        keep = c > 1e-14
        self.atoms = [atom for atom, kk in zip(self.atoms, keep) if kk]
        c = c[keep]
        self.set_weights(c / c.sum())


def frank_wolfe_distance(
    alg: MultiMatrixAlgebra,
    a: HermitianElement,
    b: HermitianElement,
    iterations: int = 400,
    restarts: int = 10,
    seed: int = 0,
    stop_below: float | None = None,
    stop_above: float | None = None,
    gap_tol: float | None = None,
) -> float:
    """Upper bound on the distance from a to the hull of unitary conjugates
    of b, found by Frank-Wolfe over growing convex combinations.

    Each step adds the conjugate best aligned against the current gradient
    (eigenvector alignment, the optimizer of the linear subproblem over a
    single orbit), takes a pairwise step, and periodically re-optimizes the
    weights exactly over the collected atoms.  The reported value is the
    operator norm of an actual residual, hence always >= the true distance.

    ``stop_below``: return as soon as the residual drops under this value
    (default 1e-7 * scale).  ``stop_above``: sound early exit once the dual
    certificate proves the distance exceeds this value.  ``gap_tol``: stop a
    run once the Frank-Wolfe gap certifies the squared Frobenius objective
    is within this much of its optimum over the hull.
    """
    if a.block_dims != alg.block_dims or b.block_dims != alg.block_dims:
        raise ShapeMismatch("elements do not match the algebra")
    a_blocks = [np.asarray(blk) for blk in a.blocks]
    b_blocks = [np.asarray(blk) for blk in b.blocks]
    scale = max(1.0, _op_norm(a_blocks), _op_norm(b_blocks))
    if stop_below is None:
        stop_below = 1e-7 * scale
    total_n = sum(alg.block_dims)
    sqrt_n = np.sqrt(total_n)
    if gap_tol is None:
        gap_tol = 0.125 * stop_below * stop_below

    beta_desc = []
    vb_desc = []
    for blk in b_blocks:
        lam, v = np.linalg.eigh(blk)
        beta_desc.append(lam[::-1].copy())
        vb_desc.append(v[:, ::-1].copy())

    best = np.inf
    certified_lb = 0.0
    for rep in range(max(1, restarts)):
        rng = _rng_for(seed, 1_000_000 + rep)
        state = _FWState(a_blocks, b_blocks, beta_desc, vb_desc)
        init = []
        for j, n in enumerate(alg.block_dims):
            u0 = _haar_unitary(rng, n)
            init.append(u0 @ b_blocks[j] @ u0.conj().T)
        state.add_atom(init)
        state.set_weights([1.0])

        for it in range(max(1, iterations)):
            grad = [x - ab for x, ab in zip(state.x, state.a)]
            fro2 = sum(float(np.vdot(g, g).real) for g in grad)
            if np.sqrt(fro2) <= stop_below:
                break
            lmo = []
            for j in range(len(grad)):
                _, vg = np.linalg.eigh(grad[j])  # ascending
                lmo.append((vg * beta_desc[j]) @ vg.conj().T)
            gap = sum(float(np.vdot(g, x - v).real) for g, x, v in zip(grad, state.x, lmo))
            lb2 = fro2 - 2.0 * gap
            if lb2 > 0:
                certified_lb = max(certified_lb, float(np.sqrt(lb2)) / sqrt_n)
            if stop_above is not None and certified_lb > stop_above:
                break
            if gap <= gap_tol:
                break
            scores = [
                sum(float(np.vdot(g, blk).real) for g, blk in zip(grad, atom)) for atom in state.atoms
            ]
            j_away = int(np.argmax(scores))
            away = state.atoms[j_away]
            direction = [v - aw for v, aw in zip(lmo, away)]
            dn2 = sum(float(np.vdot(d, d).real) for d in direction)
            if dn2 <= 1e-30:
                break
            slope = -sum(float(np.vdot(g, d).real) for g, d in zip(grad, direction))
            gamma = min(float(state.weights[j_away]), max(0.0, slope / dn2))
            idx = state.add_atom(lmo)
            w = state.weights.copy()
            w[idx] += gamma
            w[j_away] -= gamma
            state.set_weights(np.maximum(w, 0.0))
            if (it + 1) % 6 == 0:
                state.correct_weights()

        state.correct_weights()
        resid = _op_norm([x - ab for x, ab in zip(state.x, state.a)])
        best = min(best, resid)
        if best <= stop_below:
            break
        if stop_above is not None and certified_lb > stop_above:
            break
    return float(best)
