"""Decision procedures for majorization, submajorization, and hull distances.

Everything here reduces to tracial inequalities evaluated on spectra.  For a
selfadjoint x with block spectrum lam (non-increasing), the map
``t -> sum_i (lam_i - t)_+`` is convex piecewise linear with kinks exactly at
the eigenvalues, so an inequality between two such maps over all real t is
settled by checking the union of both spectra plus one point strictly below
the joint minimum (where it degenerates to a trace comparison).  Checking the
m extremal block traces suffices: every bounded trace is a nonnegative
combination of them, and the 0/infinity ideal traces reduce to blockwise
norm comparisons already implied by the block-trace inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import CentralElement, HermitianElement, MultiMatrixAlgebra
from .errors import NotContraction, NotPositive, ShapeMismatch
from .spectral import eig_hermitian, functional_calculus

TOL_FACTOR = 1e-9
POSITIVITY_RTOL = 1e-10
GROUPING_RTOL = 1e-10


@dataclass(frozen=True)
class CanonicalPair:
    """Joint decomposition of a positive pair against shared projections.

    ``rank_profile[i][j]`` is the rank of the i-th projection in block j;
    columns sum to the block dimensions.  ``alpha`` and ``beta`` are the
    central coefficients, non-increasing in i for every block coordinate,
    and reassembling ``sum_i alpha_i P_i`` (blockwise spectral projections)
    reproduces the spectrum profiles of the inputs exactly.
    """

    n: int
    block_dims: tuple[int, ...]
    rank_profile: tuple[tuple[int, ...], ...]
    alpha: tuple[CentralElement, ...]
    beta: tuple[CentralElement, ...]


def _check_pair(alg: MultiMatrixAlgebra, a: HermitianElement, b: HermitianElement) -> None:
    if a.block_dims != alg.block_dims or b.block_dims != alg.block_dims:
        raise ShapeMismatch("elements do not match the algebra's block dimensions")


def _spectra(x: HermitianElement) -> list[np.ndarray]:
    return [eig_hermitian(b)[0] for b in x.blocks]


def _joint_scale(*spectra_lists) -> float:
    s = 1.0
    for spectra in spectra_lists:
        for lam in spectra:
            if lam.size:
                s = max(s, float(np.max(np.abs(lam))))
    return s


def default_tolerance(scale: float, factor: float = TOL_FACTOR) -> float:
    return factor * max(1.0, scale)


def _require_positive(spectra, scale: float, who: str) -> None:
    for lam in spectra:
        if lam.size and float(lam[-1]) < -POSITIVITY_RTOL * max(1.0, scale):
            raise NotPositive(f"{who} is not positive semidefinite (min eigenvalue {lam[-1]:.3e})")


def _trace_gaps(alpha: np.ndarray, beta: np.ndarray, tol: float) -> bool:
    """True iff sum (alpha_i - t)_+ <= sum (beta_i - t)_+ + tol for all real t."""
    ts = np.concatenate([alpha, beta, [min(alpha.min(), beta.min()) - 1.0]])
    fa = np.maximum(alpha[None, :] - ts[:, None], 0.0).sum(axis=1)
    fb = np.maximum(beta[None, :] - ts[:, None], 0.0).sum(axis=1)
    return bool(np.all(fa <= fb + tol))


def tracial_submajorize(
    alg: MultiMatrixAlgebra,
    a: HermitianElement,
    b: HermitianElement,
    tol: float | None = None,
) -> bool:
    """Decide a ≺_T b for positive a, b: the inequalities
    tau((a-t)_+) <= tau((b-t)_+) over every trace and every t >= 0.

    Equivalent to per-block weak (Ky Fan) majorization of the spectra.
    """
    _check_pair(alg, a, b)
    sa, sb = _spectra(a), _spectra(b)
    scale = _joint_scale(sa, sb)
    _require_positive(sa, scale, "a")
    _require_positive(sb, scale, "b")
    if tol is None:
        tol = default_tolerance(scale)
    return all(_trace_gaps(la, lb, tol) for la, lb in zip(sa, sb))


def majorize(
    alg: MultiMatrixAlgebra,
    a: HermitianElement,
    b: HermitianElement,
    tol: float | None = None,
) -> bool:
    """Decide membership of a in the closed convex hull of b's unitary orbit.

    Holds iff tau((a-t)_+) <= tau((b-t)_+) and tau((-a-t)_+) <= tau((-b-t)_+)
    for every trace and every real t; per block this is classical eigenvalue
    majorization (trace equality plus partial-sum dominance).
    """
    _check_pair(alg, a, b)
    sa, sb = _spectra(a), _spectra(b)
    scale = _joint_scale(sa, sb)
    if tol is None:
        tol = default_tolerance(scale)
    for la, lb in zip(sa, sb):
        if not _trace_gaps(la, lb, tol):
            return False
        if not _trace_gaps(np.sort(-la)[::-1], np.sort(-lb)[::-1], tol):
            return False
    return True


def _block_distance(la: np.ndarray, lb: np.ndarray) -> float:
    """max_k of the average top-k and bottom-k partial-sum deficits."""
    k = np.arange(1, la.size + 1, dtype=float)
    top = np.max((np.cumsum(la) - np.cumsum(lb)) / k)
    bottom = np.max((np.cumsum(lb[::-1]) - np.cumsum(la[::-1])) / k)
    return max(top, bottom)


def orbit_distance(alg: MultiMatrixAlgebra, a: HermitianElement, b: HermitianElement) -> float:
    """Distance from a to the closed convex hull of b's unitary orbit.

    This is the least r >= 0 such that tau((a-r-t)_+) <= tau((b-t)_+) and
    tau((-a-r-t)_+) <= tau((-b-t)_+) for all traces and all t, computed in
    closed form per block as the largest average partial-sum deficit.
    """
    _check_pair(alg, a, b)
    sa, sb = _spectra(a), _spectra(b)
    return max(0.0, max(_block_distance(la, lb) for la, lb in zip(sa, sb)))


def _weak_radius(alpha: np.ndarray, targets: np.ndarray) -> float:
    """Least r >= 0 with sum_{i<=k} (alpha_i - r)_+ <= targets[k-1] for all k."""
    best = 0.0
    cum = np.cumsum(alpha)
    for k in range(1, alpha.size + 1):
        t_k = targets[k - 1]
        # h_k(0) clips negative entries since r >= 0 anyway
        h0 = float(np.sum(np.maximum(alpha[:k], 0.0)))
        if h0 <= t_k:
            continue
        # find the crossing of h(r) = sum_{i<=j} (alpha_i - r) with t_k
        r_k = 0.0
        for j in range(1, k + 1):
            cand = (cum[j - 1] - t_k) / j
            upper = alpha[j - 1]
            lower = alpha[j] if j < k else -np.inf
            if max(lower, 0.0) - 1e-15 <= cand <= upper + 1e-15:
                r_k = max(0.0, cand)
                break
        best = max(best, r_k)
    return best


def submaj_distance(
    alg: MultiMatrixAlgebra, a: HermitianElement, b: HermitianElement
) -> tuple[float, HermitianElement]:
    """Distance from a to the hull of contraction conjugates {dbd*, ||d||<=1}.

    Returns the least r with (a-r)_+ ≺_T b_+ and (a+r)_- ≺_T b_-, together
    with the witness element (a-r)_+ - (a+r)_-, which is submajorized by b
    and realizes the distance.
    """
    _check_pair(alg, a, b)
    sa, sb = _spectra(a), _spectra(b)
    r = 0.0
    for la, lb in zip(sa, sb):
        pos_targets = np.cumsum(np.maximum(lb, 0.0))
        r = max(r, _weak_radius(la, pos_targets))
        la_neg = np.sort(-la)[::-1]
        lb_neg = np.sort(-lb)[::-1]
        neg_targets = np.cumsum(np.maximum(lb_neg, 0.0))
        r = max(r, _weak_radius(la_neg, neg_targets))
    witness = functional_calculus(a, lambda s: np.maximum(s - r, 0.0) - np.maximum(-s - r, 0.0))
    return r, witness


def zero_in_hull(
    alg: MultiMatrixAlgebra, a: HermitianElement, tol: float | None = None
) -> tuple[bool, str | None]:
    """Is 0 in the closed convex hull of a's unitary orbit?

    True iff every block trace of a vanishes and no quotient (sub-sum of
    blocks) sees a as positive invertible or negative invertible.  The
    second condition reduces to single blocks: a subset quotient is
    positive invertible iff each of its blocks is.
    """
    if a.block_dims != alg.block_dims:
        raise ShapeMismatch("element does not match the algebra")
    spectra = _spectra(a)
    scale = _joint_scale(spectra)
    if tol is None:
        tol = default_tolerance(scale)
    for j, lam in enumerate(spectra):
        tr = float(lam.sum())
        if abs(tr) > tol:
            return False, f"nonzero trace {tr:.6g} on block {j}"
    for j, lam in enumerate(spectra):
        if float(lam[-1]) > tol:
            return False, f"positive invertible on the quotient onto block {j}"
        if float(lam[0]) < -tol:
            return False, f"negative invertible on the quotient onto block {j}"
    return True, None


def _group_runs(lam: np.ndarray, tol: float) -> list[tuple[float, int]]:
    """Group a non-increasing vector into (value, multiplicity) runs."""
    runs: list[tuple[float, int]] = []
    for v in lam:
        if runs and abs(runs[-1][0] - v) <= tol:
            value, count = runs[-1]
            runs[-1] = (value, count + 1)
        else:
            runs.append((float(v), 1))
    return runs


def canonical_pair(alg: MultiMatrixAlgebra, a: HermitianElement, b: HermitianElement) -> CanonicalPair:
    """Joint canonical form of a positive pair against shared rank data.

    Per block, both spectra are refined to a common partition into
    consecutive groups (greedy consumption of multiplicity runs), yielding
    one rank profile and two coordinatewise non-increasing central
    coefficient sequences whose reassembly reproduces both spectra.
    """
    _check_pair(alg, a, b)
    sa, sb = _spectra(a), _spectra(b)
    scale = _joint_scale(sa, sb)
    _require_positive(sa, scale, "a")
    _require_positive(sb, scale, "b")
    gtol = GROUPING_RTOL * max(1.0, scale)

    per_block: list[list[tuple[int, float, float]]] = []  # (size, alpha, beta) groups
    for la, lb in zip(sa, sb):
        runs_a = _group_runs(la, gtol)
        runs_b = _group_runs(lb, gtol)
        groups = []
        ia = ib = 0
        rema, remb = (runs_a[0][1], runs_b[0][1]) if runs_a else (0, 0)
        while ia < len(runs_a) and ib < len(runs_b):
            size = min(rema, remb)
            groups.append((size, runs_a[ia][0], runs_b[ib][0]))
            rema -= size
            remb -= size
            if rema == 0:
                ia += 1
                if ia < len(runs_a):
                    rema = runs_a[ia][1]
            if remb == 0:
                ib += 1
                if ib < len(runs_b):
                    remb = runs_b[ib][1]
        per_block.append(groups)

    n = max(len(g) for g in per_block)
    ranks = []
    alphas = []
    betas = []
    for i in range(n):
        row_rank = []
        row_a = []
        row_b = []
        for groups in per_block:
            if i < len(groups):
                size, va, vb = groups[i]
            else:
                # exhausted block: zero-rank group carrying the last values,
                # keeping the coefficient sequences non-increasing
                size, va, vb = 0, groups[-1][1], groups[-1][2]
            row_rank.append(size)
            row_a.append(va)
            row_b.append(vb)
        ranks.append(tuple(row_rank))
        alphas.append(CentralElement(tuple(row_a)))
        betas.append(CentralElement(tuple(row_b)))
    return CanonicalPair(n, alg.block_dims, tuple(ranks), tuple(alphas), tuple(betas))


def finite_conditions(cp: CanonicalPair, r: float, tol: float | None = None) -> bool:
    """Check the two families of center-valued trace inequalities at level r.

    Family one: sum_{i<=k} (alpha_i - r)_+ E(P_i) <= sum_{i<=k} beta_i E(Q_i)
    for k = 1..n; family two, its reflection at the unit:
    sum_{i>=k} (1 - alpha_i - r)_+ E(P_i) <= sum_{i>=k} (1 - beta_i) E(Q_i).
    With r = 0 the first family alone characterizes submajorization of
    positive contractions; the pair characterizes r-closeness to the orbit
    hull.  Coefficients must lie in [0, 1].
    """
    if tol is None:
        tol = TOL_FACTOR
    if r < 0:
        raise NotContraction("r must be nonnegative")
    for seq in (cp.alpha, cp.beta):
        for c in seq:
            for v in c.values:
                if v < -tol or v > 1.0 + tol:
                    raise NotContraction(f"coefficient {v} outside [0, 1]")
    m = len(cp.block_dims)
    ranks = np.array(cp.rank_profile, dtype=float)  # n x m
    dims = np.array(cp.block_dims, dtype=float)
    e_p = ranks / dims  # E(P_i) per block coordinate
    av = np.array([c.values for c in cp.alpha])
    bv = np.array([c.values for c in cp.beta])

    lhs1 = np.cumsum(np.maximum(av - r, 0.0) * e_p, axis=0)
    rhs1 = np.cumsum(bv * e_p, axis=0)
    if np.any(lhs1 > rhs1 + tol):
        return False
    lhs2 = np.cumsum((np.maximum(1.0 - av - r, 0.0) * e_p)[::-1], axis=0)[::-1]
    rhs2 = np.cumsum(((1.0 - bv) * e_p)[::-1], axis=0)[::-1]
    return not np.any(lhs2 > rhs2 + tol)


def spectrum_hull_check(a: HermitianElement, b: HermitianElement, tol: float | None = None) -> bool:
    """Per block: is sp(a) inside the convex hull (interval) of sp(b)?"""
    if a.block_dims != b.block_dims:
        raise ShapeMismatch("elements live in different algebras")
    sa, sb = _spectra(a), _spectra(b)
    if tol is None:
        tol = default_tolerance(_joint_scale(sa, sb))
    for la, lb in zip(sa, sb):
        if float(la[0]) > float(lb[0]) + tol or float(la[-1]) < float(lb[-1]) - tol:
            return False
    return True


def quotient_norm_check(
    alg: MultiMatrixAlgebra, a: HermitianElement, b: HermitianElement, tol: float | None = None
) -> bool:
    """||pi_I(a)|| <= ||pi_I(b)|| for every quotient map, for positive a, b.

    Quotients of a multi-matrix algebra are sub-sums of blocks, and the norm
    of a sub-sum is the max over its blocks, so blockwise comparison of top
    eigenvalues settles every quotient at once.
    """
    _check_pair(alg, a, b)
    sa, sb = _spectra(a), _spectra(b)
    scale = _joint_scale(sa, sb)
    _require_positive(sa, scale, "a")
    _require_positive(sb, scale, "b")
    if tol is None:
        tol = default_tolerance(scale)
    return all(float(la[0]) <= float(lb[0]) + tol for la, lb in zip(sa, sb))
