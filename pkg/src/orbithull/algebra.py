"""Finite-dimensional multi-matrix C*-algebras and their traces.

An algebra is a direct sum of full matrix blocks M_{n_1} + ... + M_{n_m};
selfadjoint elements are tuples of Hermitian blocks.  The center is R^m, so
central elements are one real per block, and every bounded trace is a
nonnegative combination of the m block traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, EmptyAlgebra, NotHermitian, ShapeMismatch

HERMITIAN_RTOL = 1e-8


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class MultiMatrixAlgebra:
    """Block dimensions (n_1, ..., n_m) of the ambient algebra."""

    block_dims: tuple[int, ...]

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def total_dim(self) -> int:
        return int(sum(n * n for n in self.block_dims))


@dataclass(frozen=True)
class HermitianElement:
    """One Hermitian complex matrix per block.  Immutable after construction."""

    blocks: tuple[np.ndarray, ...]

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.blocks)


@dataclass(frozen=True)
class CentralElement:
    """A selfadjoint element of the center: one real scalar per block."""

    values: tuple[float, ...]


@dataclass(frozen=True)
class TraceWeights:
    """A trace tau(x) = sum_j weights[j] * Tr(x_j)."""

    weights: tuple[float, ...]


def build_algebra(block_dims) -> MultiMatrixAlgebra:
    dims = tuple(int(n) for n in block_dims)
    if len(dims) == 0:
        raise EmptyAlgebra("an algebra needs at least one block")
    for n in dims:
        if n < 1:
            raise BadDimension(f"block dimension {n} < 1")
    return MultiMatrixAlgebra(dims)


def embed_element(alg: MultiMatrixAlgebra, raw) -> HermitianElement:
    """Validate raw block matrices and return the symmetrized element.

    Inputs whose anti-Hermitian part stays below ``1e-8 * scale`` are
    accepted and replaced by (x + x*)/2; anything farther from Hermitian is
    rejected rather than silently altered.
    """
    if len(raw) != alg.num_blocks:
        raise ShapeMismatch(f"expected {alg.num_blocks} blocks, got {len(raw)}")
    blocks = []
    for j, (n, block) in enumerate(zip(alg.block_dims, raw)):
        b = np.asarray(block, dtype=np.complex128)
        if b.shape != (n, n):
            raise ShapeMismatch(f"block {j}: expected shape {(n, n)}, got {b.shape}")
        scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
        skew = 0.5 * (b - b.conj().T)
        if float(np.max(np.abs(skew))) > HERMITIAN_RTOL * scale:
            raise NotHermitian(f"block {j}: anti-Hermitian part exceeds {HERMITIAN_RTOL} * scale")
        blocks.append(_freeze(0.5 * (b + b.conj().T)))
    return HermitianElement(tuple(blocks))


def zero_element(alg: MultiMatrixAlgebra) -> HermitianElement:
    return HermitianElement(tuple(_freeze(np.zeros((n, n), dtype=np.complex128)) for n in alg.block_dims))


def identity_element(alg: MultiMatrixAlgebra) -> HermitianElement:
    return HermitianElement(tuple(_freeze(np.eye(n, dtype=np.complex128)) for n in alg.block_dims))


def central_to_element(alg: MultiMatrixAlgebra, lam: CentralElement) -> HermitianElement:
    if len(lam.values) != alg.num_blocks:
        raise ShapeMismatch("central element has wrong length")
    return HermitianElement(
        tuple(_freeze(v * np.eye(n, dtype=np.complex128)) for v, n in zip(lam.values, alg.block_dims))
    )


def add_elements(x: HermitianElement, y: HermitianElement, sx: float = 1.0, sy: float = 1.0) -> HermitianElement:
    if x.block_dims != y.block_dims:
        raise ShapeMismatch("elements live in different algebras")
    return HermitianElement(tuple(_freeze(sx * a + sy * b) for a, b in zip(x.blocks, y.blocks)))


def extremal_traces(alg: MultiMatrixAlgebra) -> list[TraceWeights]:
    """The m block traces; they generate the cone of bounded traces.

    Checking a tracial inequality on these suffices for all lower
    semicontinuous traces: bounded traces are their nonnegative combinations,
    and the 0/infinity-valued traces attached to ideals reduce to blockwise
    norm comparisons, which the block-trace inequalities already imply.
    """
    m = alg.num_blocks
    out = []
    for j in range(m):
        w = [0.0] * m
        w[j] = 1.0
        out.append(TraceWeights(tuple(w)))
    return out


def evaluate_trace(tr: TraceWeights, x: HermitianElement) -> float:
    if len(tr.weights) != len(x.blocks):
        raise ShapeMismatch("trace weights do not match element blocks")
    total = 0.0
    for w, b in zip(tr.weights, x.blocks):
        if w != 0.0:
            total += w * float(np.trace(b).real)
    return total


def block_traces(x: HermitianElement) -> tuple[float, ...]:
    return tuple(float(np.trace(b).real) for b in x.blocks)


def center_valued_trace(alg: MultiMatrixAlgebra, x: HermitianElement) -> CentralElement:
    """Per block, the normalized trace Tr(x_j)/n_j.  Fixes the center pointwise."""
    if x.block_dims != alg.block_dims:
        raise ShapeMismatch("element does not belong to the algebra")
    values = []
    for b, n in zip(x.blocks, alg.block_dims):
        diag = np.diag(b).real
        if np.all(diag == diag[0]):
            # constant diagonal: the normalized trace is that constant, exactly
            values.append(float(diag[0]))
        else:
            values.append(float(math.fsum(diag)) / n)
    return CentralElement(tuple(values))


# --- JSON element schema, shared with the command-line interface ---------
#
#   {"blocks": [{"dim": n, "re": [[...]], "im": [[...]]}, ...]}
#
# "im" may be omitted and defaults to zero.


def element_to_obj(x: HermitianElement) -> dict:
    blocks = []
    for b in x.blocks:
        blocks.append(
            {
                "dim": int(b.shape[0]),
                "re": [[float(v) for v in row] for row in b.real],
                "im": [[float(v) for v in row] for row in b.imag],
            }
        )
    return {"blocks": blocks}


def matrix_to_obj(b: np.ndarray) -> dict:
    b = np.asarray(b, dtype=np.complex128)
    return {
        "dim": int(b.shape[0]),
        "re": [[float(v) for v in row] for row in b.real],
        "im": [[float(v) for v in row] for row in b.imag],
    }


def element_from_obj(obj) -> HermitianElement:
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise ShapeMismatch('element JSON must be an object with a "blocks" list')
    raw = []
    dims = []
    for entry in obj["blocks"]:
        n = int(entry["dim"])
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros((n, n))), dtype=float)
        if re.shape != (n, n) or im.shape != (n, n):
            raise ShapeMismatch(f"block data does not match declared dim {n}")
        raw.append(re + 1j * im)
        dims.append(n)
    alg = build_algebra(dims)
    return embed_element(alg, raw)


def algebra_of(x: HermitianElement) -> MultiMatrixAlgebra:
    return build_algebra(x.block_dims)
