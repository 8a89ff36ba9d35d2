"""Constructive witnesses: explicit convex combinations of unitary conjugates.

The pipeline realizing membership (and near-membership) in an orbit hull is
entirely finite: diagonalize both elements blockwise, replace the left
spectrum by its projection onto the majorization polytope of the right one
at the hull radius, transport spectra with T-transforms, split the resulting
doubly stochastic matrix into permutations, and conjugate the permutations
back through the two eigenbases.  Every returned object is re-verified
numerically; nothing is trusted from intermediate algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .algebra import CentralElement, HermitianElement, MultiMatrixAlgebra, _freeze, build_algebra
from .errors import (
    BadEpsilon,
    DecompositionStall,
    EpsilonTooSmall,
    InputError,
    NotDoublyStochastic,
    NotMajorized,
    NumericalError,
    RankOverflow,
    ShapeMismatch,
)
from .majorization import _block_distance, _joint_scale
from .oracle import _simplex_lsq, generate_pair
from .spectral import eig_hermitian


@dataclass(frozen=True)
class ConvexCombination:
    """Weights and block-diagonal unitaries, plus the achieved residual norm.

    ``target_error`` is the operator norm of ``a - sum_k w_k u_k b u_k*``,
    recomputed from the stored data at construction time.
    """

    weights: tuple[float, ...]
    unitaries: tuple[tuple[np.ndarray, ...], ...]
    target_error: float


def apply_combination(
    comb: ConvexCombination, b: HermitianElement
) -> HermitianElement:
    """Evaluate sum_k w_k u_k b u_k* blockwise."""
    m = len(b.blocks)
    acc = [np.zeros_like(bb) for bb in b.blocks]
    for w, u in zip(comb.weights, comb.unitaries):
        if len(u) != m:
            raise ShapeMismatch("unitary block count does not match element")
        for j in range(m):
            acc[j] = acc[j] + w * (u[j] @ b.blocks[j] @ u[j].conj().T)
    return HermitianElement(tuple(_freeze(0.5 * (x + x.conj().T)) for x in acc))


def _residual_norm(a: HermitianElement, approx: HermitianElement) -> float:
    out = 0.0
    for x, y in zip(a.blocks, approx.blocks):
        lam, _ = eig_hermitian(x - y)
        if lam.size:
            out = max(out, float(np.max(np.abs(lam))))
    return out


def hlp_transfer(alpha, beta, tol: float = 1e-9) -> np.ndarray:
    """Doubly stochastic transfer D with D @ beta = alpha, for alpha
    majorized by beta (both non-increasing, equal sums).

    Built as a product of at most n-1 T-transforms: each step averages the
    first surplus coordinate against the first deficit coordinate after it,
    making at least one of them match alpha for good.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.shape != beta.shape or alpha.ndim != 1:
        raise NotMajorized("alpha and beta must be equal-length vectors")
    n = alpha.size
    cs_a, cs_b = np.cumsum(alpha), np.cumsum(beta)
    if np.any(cs_a - cs_b > tol) or abs(cs_a[-1] - cs_b[-1]) > tol:
        raise NotMajorized("alpha is not majorized by beta")
    d = np.eye(n)
    cur = beta.copy()
    for _ in range(max(1, n)):
        diff = cur - alpha
        if float(np.max(np.abs(diff))) <= tol:
            break
        j = k = -1
        for i in range(n):
            if diff[i] > tol:
                j = i
                break
        if j >= 0:
            for i in range(j + 1, n):
                if diff[i] < -tol:
                    k = i
                    break
        if j < 0 or k < 0:
            break
        delta = min(diff[j], -diff[k])
        lam = 1.0 - delta / (cur[j] - cur[k])
        t = np.eye(n)
        t[j, j] = t[k, k] = lam
        t[j, k] = t[k, j] = 1.0 - lam
        cur = t @ cur
        d = t @ d
    return d


def _caratheodory_prune(vectors: np.ndarray, weights: np.ndarray, max_terms: int):
    """Reduce an affine combination to at most max_terms atoms.

    vectors: (dim, k) columns; weights on the simplex with
    vectors @ weights fixed.  While more than max_terms atoms remain, a null
    direction of the augmented system shifts weight until one atom drops.
    """
    vectors = np.asarray(vectors, dtype=float)
    weights = np.asarray(weights, dtype=float).copy()
    keep = weights > 0
    while int(np.count_nonzero(keep)) > max_terms:
        idx = np.flatnonzero(keep)
        sub = np.vstack([vectors[:, idx], np.ones((1, idx.size))])
        _, s, vt = np.linalg.svd(sub, full_matrices=True)
        if vt.shape[0] < idx.size or (s.size >= idx.size and s[idx.size - 1] > 1e-12 * max(1.0, s[0])):
            break  # numerically full rank: no null direction to exploit
        z = vt[-1]
        pos = z > 1e-15
        if not np.any(pos):
            z = -z
            pos = z > 1e-15
            if not np.any(pos):
                break
        t = np.min(weights[idx][pos] / z[pos])
        weights[idx] = weights[idx] - t * z
        weights[weights < 1e-15] = 0.0
        keep = weights > 0
    return weights


def birkhoff_decompose(d, tol: float = 1e-10):
    """Split a doubly stochastic matrix into permutations: weights w_k > 0 and
    index arrays p_k (row i maps to column p_k[i]) with
    sum_k w_k P_k = d within 10*tol and at most (n-1)^2 + 1 terms.

    Greedy: repeatedly remove the heaviest permutation through the current
    support (max-product assignment), which zeroes at least one entry per
    step; a Caratheodory pass prunes the rare overshoot of the term bound.
    """
    d = np.array(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NotDoublyStochastic("matrix must be square")
    n = d.shape[0]
    if np.any(d < -tol):
        raise NotDoublyStochastic("negative entries")
    if np.max(np.abs(d.sum(axis=0) - 1.0)) > tol or np.max(np.abs(d.sum(axis=1) - 1.0)) > tol:
        raise NotDoublyStochastic("row/column sums differ from 1")
    d = np.maximum(d, 0.0)
    weights: list[float] = []
    perms: list[np.ndarray] = []
    for _ in range(n * n + 1):
        s = float(d.sum()) / n
        if s <= tol:
            break
        with np.errstate(divide="ignore"):
            cost = -np.log(np.maximum(d, 1e-300))
        rows, cols = linear_sum_assignment(cost)
        w = float(d[rows, cols].min())
        if w <= 0.0:
            if s <= 10.0 * tol:
                break
            raise DecompositionStall(f"no positive permutation left, mass {s:.3e} remains")
        weights.append(w)
        perms.append(cols.copy())
        d[rows, cols] -= w
        np.maximum(d, 0.0, out=d)
    if not weights:
        raise DecompositionStall("empty decomposition")
    w_arr = np.array(weights)
    w_arr = w_arr / w_arr.sum()
    bound = (n - 1) ** 2 + 1
    if len(perms) > bound:
        vecs = np.zeros((n * n, len(perms)))
        for k, p in enumerate(perms):
            mat = np.zeros((n, n))
            mat[np.arange(n), p] = 1.0
            vecs[:, k] = mat.ravel()
        w_arr = _caratheodory_prune(vecs, w_arr, bound)
        keep = w_arr > 0
        perms = [p for p, kk in zip(perms, keep) if kk]
        w_arr = w_arr[keep]
        w_arr = w_arr / w_arr.sum()
    return w_arr, perms


def _project_spectrum(alpha: np.ndarray, beta: np.ndarray, r: float) -> np.ndarray:
    """Non-increasing alpha' with |alpha' - alpha| <= r, majorized by beta.

    Greedy with a feasibility lookahead: each prefix sum is capped by
    min over m >= k of (top-m budget of beta minus the mass the lower-box
    bounds still owe), which keeps every completion feasible; the last
    coordinate closes the trace exactly.
    """
    n = alpha.size
    lo = alpha - r
    hi = alpha + r
    b_cum = np.cumsum(beta)
    lo_cum = np.cumsum(lo)
    suffix = np.minimum.accumulate((b_cum - lo_cum)[::-1])[::-1]
    out = np.empty(n)
    c = 0.0
    prev = math.inf
    for k in range(n):
        cap = suffix[k] + lo_cum[k] - c
        v = min(hi[k], prev, cap)
        if k == n - 1:
            v = min(prev, max(b_cum[-1] - c, lo[k]))
        out[k] = v
        c += v
        prev = v
    return out


def _refine_weights(per_block: list[tuple[np.ndarray, list]]):
    """Common refinement of per-block weight partitions of [0, 1].

    Returns global weights plus, per block, the index of the active
    per-block term on each global segment.  Term count grows additively.
    """
    cuts = {0.0, 1.0}
    cum_blocks = []
    for w, _ in per_block:
        c = np.cumsum(w)
        c[-1] = 1.0
        cum_blocks.append(c)
        cuts.update(float(x) for x in c[:-1])
    grid = sorted(cuts)
    weights = []
    selectors = []
    for left, right in zip(grid[:-1], grid[1:]):
        seg = right - left
        if seg <= 1e-15:
            continue
        mid = 0.5 * (left + right)
        weights.append(seg)
        selectors.append([int(np.searchsorted(c, mid)) for c in cum_blocks])
    w = np.array(weights)
    return w / w.sum(), selectors


def _perm_matrix(p: np.ndarray) -> np.ndarray:
    mat = np.zeros((p.size, p.size))
    mat[np.arange(p.size), p] = 1.0
    return mat


def synthesize_combination(
    alg: MultiMatrixAlgebra,
    a: HermitianElement,
    b: HermitianElement,
    epsilon: float,
) -> ConvexCombination:
    """Explicit convex combination of unitary conjugates of b within
    orbit_distance(a, b) + epsilon of a.

    Blockwise: diagonalize both sides, project a's spectrum onto the
    majorization polytope of b's at the hull radius, transport with
    hlp_transfer, decompose with birkhoff_decompose, and assemble each
    unitary as (eigenvectors of a) @ permutation @ (eigenvectors of b)*.
    Per-block weight lists are merged by common refinement.
    """
    if a.block_dims != alg.block_dims or b.block_dims != alg.block_dims:
        raise ShapeMismatch("elements do not match the algebra")
    if epsilon <= 0:
        raise BadEpsilon("epsilon must be positive")
    dec_a = [eig_hermitian(x) for x in a.blocks]
    dec_b = [eig_hermitian(x) for x in b.blocks]
    scale = _joint_scale([la for la, _ in dec_a], [lb for lb, _ in dec_b])
    floor = 1e-9 * max(1.0, scale)
    if epsilon < floor:
        raise EpsilonTooSmall(f"epsilon below the numerical floor {floor:.3e}")
    r = max(0.0, max(_block_distance(la, lb) for (la, _), (lb, _) in zip(dec_a, dec_b)))

    snap = r <= 1e-12 * max(1.0, scale)
    per_block = []
    for (la, va), (lb, vb) in zip(dec_a, dec_b):
        if snap:
            # already inside the hull up to floating-point dust: transfer the
            # raw spectrum, the T-transform tolerance absorbs the dust
            alpha = la
        else:
            alpha = _project_spectrum(la, lb, r + max(1e-12 * max(1.0, scale), 0.25 * min(epsilon, 1.0) * 1e-3))
            if abs(float(alpha.sum() - lb.sum())) > 1e-8 * max(1.0, scale) * la.size:
                alpha = _project_spectrum(la, lb, r + 0.25 * epsilon)
        d = hlp_transfer(alpha, lb, tol=1e-9 * max(1.0, scale))
        w, perms = birkhoff_decompose(d)
        units = [va @ _perm_matrix(p) @ vb.conj().T for p in perms]
        per_block.append((w, units))

    weights, selectors = _refine_weights(per_block)
    unitaries = tuple(
        tuple(_freeze(per_block[j][1][sel[j]]) for j in range(len(per_block))) for sel in selectors
    )
    comb = ConvexCombination(tuple(float(x) for x in weights), unitaries, 0.0)
    err = _residual_norm(a, apply_combination(comb, b))
    if err > r + epsilon:
        raise NumericalError(f"synthesis residual {err:.3e} exceeds target {r + epsilon:.3e}")
    return ConvexCombination(comb.weights, comb.unitaries, err)


def dixmier_pinch(
    alg: MultiMatrixAlgebra,
    rank_p,
    rank_q,
    mu: CentralElement,
    nu: CentralElement,
) -> tuple[CentralElement, ConvexCombination]:
    """Average mu P + nu Q onto a central multiple of P + Q.

    P and Q are the coordinate projections of ranks rank_p and rank_q per
    block.  Returns rho with rho_j = (mu_j p_j + nu_j q_j)/(p_j + q_j)
    (rho_j = mu_j on blocks with p_j + q_j = 0) and a convex combination of
    permutation unitaries, supported inside the compression by P + Q, whose
    average carries mu P + nu Q to rho (P + Q).
    """
    m = alg.num_blocks
    rank_p = [int(x) for x in rank_p]
    rank_q = [int(x) for x in rank_q]
    if len(rank_p) != m or len(rank_q) != m or len(mu.values) != m or len(nu.values) != m:
        raise ShapeMismatch("per-block data does not match the algebra")
    for p, q, n in zip(rank_p, rank_q, alg.block_dims):
        if p < 0 or q < 0 or p + q > n:
            raise RankOverflow(f"ranks ({p}, {q}) overflow block of dimension {n}")

    rho_vals = []
    per_block = []
    for j, (p, q, n) in enumerate(zip(rank_p, rank_q, alg.block_dims)):
        mj, nj = float(mu.values[j]), float(nu.values[j])
        if p + q == 0:
            rho_vals.append(mj)
            per_block.append((np.array([1.0]), [np.eye(n)]))
            continue
        rho = (mj * p + nj * q) / (p + q)
        rho_vals.append(rho)
        model = np.concatenate([np.full(p, mj), np.full(q, nj)])
        order = np.argsort(-model, kind="stable")
        target = np.full(p + q, rho)
        d = hlp_transfer(target, model[order])
        w, perms = birkhoff_decompose(d)
        units = []
        for perm in perms:
            # act on the sorted model, then undo the sort; fix the rest
            small = _perm_matrix(perm)
            sort_mat = np.zeros((p + q, p + q))
            sort_mat[np.arange(p + q), order] = 1.0
            full = np.eye(n)
            full[: p + q, : p + q] = sort_mat.T @ small @ sort_mat
            units.append(full)
        per_block.append((w, units))

    weights, selectors = _refine_weights(per_block)
    unitaries = tuple(
        tuple(_freeze(per_block[j][1][sel[j]].astype(np.complex128)) for j in range(m)) for sel in selectors
    )
    source = HermitianElement(
        tuple(
            _freeze(np.diag(np.concatenate([
                np.full(p, float(mu.values[j])),
                np.full(q, float(nu.values[j])),
                np.zeros(n - p - q),
            ]).astype(np.complex128)))
            for j, (p, q, n) in enumerate(zip(rank_p, rank_q, alg.block_dims))
        )
    )
    target = HermitianElement(
        tuple(
            _freeze(np.diag(np.concatenate([
                np.full(p + q, rho_vals[j]),
                np.zeros(n - p - q),
            ]).astype(np.complex128)))
            for j, (p, q, n) in enumerate(zip(rank_p, rank_q, alg.block_dims))
        )
    )
    comb = ConvexCombination(tuple(float(x) for x in weights), unitaries, 0.0)
    err = _residual_norm(target, apply_combination(comb, source))
    return CentralElement(tuple(rho_vals)), ConvexCombination(comb.weights, comb.unitaries, err)


def equalize_weights(
    comb: ConvexCombination, b: HermitianElement, resolution: int
) -> ConvexCombination:
    """Optional equal-weight form: approximate the weights by multiples of
    1/resolution (largest-remainder rounding) and repeat each unitary
    proportionally, so the combination reads (1/N) sum_k u_k b u_k* with
    N = resolution.  Costs at most (terms)/resolution in norm."""
    if resolution < len(comb.weights):
        raise BadEpsilon("resolution must be at least the number of terms")
    w = np.asarray(comb.weights)
    scaled = w * resolution
    counts = np.floor(scaled).astype(int)
    short = resolution - int(counts.sum())
    order = np.argsort(-(scaled - counts), kind="stable")
    counts[order[:short]] += 1
    unitaries = []
    for c, u in zip(counts, comb.unitaries):
        unitaries.extend([u] * int(c))
    weights = tuple(1.0 / resolution for _ in range(resolution))
    out = ConvexCombination(weights, tuple(unitaries), 0.0)
    # the achieved element moved; report the drift from the original target
    shift = apply_combination(out, b)
    base = apply_combination(comb, b)
    drift = _residual_norm(base, shift)
    return ConvexCombination(weights, tuple(unitaries), comb.target_error + drift)


# --- uniform majorization probe ------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    """Per-trial synthesis sizes for the dimension-independence probe."""

    table: tuple[tuple[int, int], ...]  # (n, max terms over trials)
    rows: tuple[tuple[int, int, int, float], ...]  # (n, trial, terms, error)

    def to_csv(self) -> str:
        lines = ["n,trial,terms,error"]
        for n, trial, terms, error in self.rows:
            lines.append(f"{n},{trial},{terms},{format(error, '.17g')}")
        return "\n".join(lines) + "\n"


def _minmax_dump_perm(cost: np.ndarray, target: float) -> np.ndarray | None:
    """Assignment whose maximum cost entry is minimal; None when even the
    optimum exceeds target.  Binary search over thresholds with matching
    feasibility."""
    n = cost.shape[0]
    rows, cols = linear_sum_assignment(cost)
    if float(cost[rows, cols].max()) <= target:
        return cols
    vals = np.unique(cost)
    vals = vals[vals <= target]
    if vals.size == 0:
        return None
    lo, hi = 0, vals.size - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        mask = (cost <= vals[mid]).astype(float)
        r, c = linear_sum_assignment(-mask)
        if mask[r, c].sum() == n:
            best = c.copy()
            hi = mid - 1
        else:
            lo = mid + 1
    return best


# closing-weight scan for the probe synthesizer, centered on 1/2 first
_T_SCAN = tuple(i / 40.0 for i in range(20, 0, -1)) + tuple(i / 40.0 for i in range(21, 40))


def _diag_greedy_synth(la: np.ndarray, lb: np.ndarray, target: float, max_atoms: int = 64):
    """Convex combination of permutations of lb within sup-norm `target` of
    la, using as few permutations as possible.

    Alternates two moves: (1) try to finish in one extra permutation, by
    scanning a closing weight t and solving a min-max assignment for the
    residual; (2) otherwise take a Frank-Wolfe step (sorted pairing of the
    gradient against lb) and re-optimize the weights exactly.
    """
    n = la.size
    order_lb_desc = np.argsort(-lb, kind="stable")
    atoms: list[np.ndarray] = []
    vecs: list[np.ndarray] = []
    weights = np.zeros(0)
    x = np.zeros(n)
    for _ in range(max_atoms):
        if atoms:
            for t in _T_SCAN:
                resid = la - (1.0 - t) * x
                cost = np.abs(resid[:, None] - t * lb[None, :])
                dump = _minmax_dump_perm(cost, target)
                if dump is not None:
                    w = np.append(weights * (1.0 - t), t)
                    return [*atoms, dump], w
        else:
            dump = _minmax_dump_perm(np.abs(la[:, None] - lb[None, :]), target)
            if dump is not None:
                return [dump], np.array([1.0])
        grad_order = np.argsort(x - la, kind="stable")  # most negative first
        perm = np.empty(n, dtype=int)
        perm[grad_order] = order_lb_desc
        if any(np.array_equal(perm, a) for a in atoms):
            break
        atoms.append(perm)
        vecs.append(lb[perm])
        mat = np.stack(vecs, axis=1)
        weights = _simplex_lsq(mat, la)
        keep = weights > 1e-12
        atoms = [a for a, kk in zip(atoms, keep) if kk]
        vecs = [v for v, kk in zip(vecs, keep) if kk]
        weights = weights[keep]
        weights = weights / weights.sum()
        x = np.stack(vecs, axis=1) @ weights
    return atoms, weights


def _probe_trial(n: int, epsilon: float, seed_entropy) -> tuple[int, float]:
    """One probe trial: majorizing contraction pair in M_n, both spectra
    rounded to an epsilon/4 grid (at most ceil(8/epsilon)+1 distinct values
    regardless of n), then a minimal-size permutation synthesis on the grid
    vectors.  Returns (terms, recomputed error)."""
    alg = build_algebra([n])
    a, b = generate_pair(alg, seed_entropy, "majorizing")
    if epsilon >= 2.0:
        # selfadjoint contractions sit within diameter 2 of any conjugate
        lam, _ = eig_hermitian(a.blocks[0] - b.blocks[0])
        err = float(np.max(np.abs(lam))) if lam.size else 0.0
        return 1, err
    la, va = eig_hermitian(a.blocks[0])
    lb, vb = eig_hermitian(b.blocks[0])

    # grid rounding costs <= epsilon/8 per side, leaving 0.72 epsilon for
    # the on-grid synthesis and a safety margin on top
    pitch = epsilon / 4.0
    la_g = np.round(la / pitch) * pitch
    lb_g = np.round(lb / pitch) * pitch
    perms, w = _diag_greedy_synth(la_g, lb_g, 0.72 * epsilon)

    approx = np.zeros((n, n), dtype=np.complex128)
    for wk, p in zip(w, perms):
        u = va @ _perm_matrix(p) @ vb.conj().T
        approx += wk * (u @ b.blocks[0] @ u.conj().T)
    lam, _ = eig_hermitian(a.blocks[0] - 0.5 * (approx + approx.conj().T))
    err = float(np.max(np.abs(lam)))
    if err > epsilon:
        raise NumericalError(f"probe residual {err:.4f} exceeds epsilon {epsilon}")
    return len(perms), err


def uniform_probe(epsilon: float, dims, trials: int, seed: int) -> ProbeResult:
    """Empirical probe of dimension-free majorization synthesis.

    For each n, draws `trials` majorizing pairs of selfadjoint contractions
    and synthesizes an epsilon-approximation after rounding both spectra to
    an epsilon/4 grid, which caps the number of distinct eigenvalues at
    ceil(8/epsilon) + 1 regardless of n.  Reports the maximum number of
    unitaries used per n.  Deterministic given the seed; trials are
    independent, with per-trial randomness derived from (seed, n, trial).
    """
    if not (0.0 < epsilon <= 2.0):
        raise BadEpsilon("epsilon must lie in (0, 2]")
    dims = [int(n) for n in dims]
    if not dims:
        raise InputError("dims must be nonempty")
    if trials < 1:
        raise InputError("trials must be at least 1")
    rows = []
    table = []
    for n in dims:
        worst = 0
        for t in range(trials):
            terms, err = _probe_trial(n, epsilon, (int(seed), int(n), int(t)))
            rows.append((n, t, terms, err))
            worst = max(worst, terms)
        table.append((n, worst))
    return ProbeResult(tuple(table), tuple(rows))
