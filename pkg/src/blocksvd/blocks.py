"""Block-indexed coefficient and operator containers.

A signal is stored as one complex coefficient vector per block level
``l = 1, 2, 3, ...``; an operator as one complex square matrix per level.
Level ``l`` has a structure-dependent size: ``2l - 1`` on the sphere
(harmonic degree ``l - 1``), the number of integer frequency vectors
``k`` with ``1 + sum|k_j| = l`` on the d-torus, or a caller-supplied
size for custom structures.

All containers are immutable after construction; the operations here are
pure functions and safe to call concurrently on shared values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularMatrixError
from . import linalg

__all__ = [
    "BlockStructure",
    "BlockCoefficients",
    "BlockOperator",
    "SmoothnessClass",
    "IllPosedness",
    "block_size",
    "sobolev_norm",
    "operator_constants",
    "apply_operator",
]


def _circular_level_sizes(d: int, max_level: int) -> tuple[int, ...]:
    """Number of k in Z^d with sum|k_j| = l - 1, for l = 1..max_level.

    Computed by exact dynamic programming over coordinates, not a
    closed-form binomial (the signed-index count differs from it in
    low dimension).
    """
    counts = [1] + [2] * (max_level - 1)  # d = 1: k in {-(m), +(m)}, m = l-1
    for _ in range(d - 1):
        prev = counts
        counts = []
        for m in range(max_level):
            total = prev[m]  # new coordinate = 0
            for t in range(1, m + 1):
                total += 2 * prev[m - t]  # new coordinate = +-t
            counts.append(total)
    return tuple(counts)


@dataclass(frozen=True)
class BlockStructure:
    """Partition of the index set into levels with known per-level sizes.

    kind is one of "circular", "spherical", "custom".  For "circular"
    the dimension ``d`` is required; for "custom" the explicit sizes.
    """

    kind: str
    max_level: int
    d: int | None = None
    sizes: tuple[int, ...] | None = None
    _level_sizes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_level < 1:
            raise ValueError("max_level must be >= 1")
        if self.kind == "circular":
            if self.d is None or self.d < 1:
                raise ValueError("circular structure requires an integer d >= 1")
            sizes = _circular_level_sizes(self.d, self.max_level)
        elif self.kind == "spherical":
            sizes = tuple(2 * level - 1 for level in range(1, self.max_level + 1))
        elif self.kind == "custom":
            if not self.sizes or len(self.sizes) != self.max_level:
                raise ValueError("custom structure requires one size per level")
            if any(s < 1 for s in self.sizes):
                raise ValueError("block sizes must be >= 1")
            sizes = tuple(int(s) for s in self.sizes)
        else:
            raise ValueError(f"unknown structure kind {self.kind!r}")
        object.__setattr__(self, "_level_sizes", sizes)

    @classmethod
    def circular(cls, d: int, max_level: int) -> "BlockStructure":
        return cls(kind="circular", max_level=max_level, d=d)

    @classmethod
    def spherical(cls, max_level: int) -> "BlockStructure":
        return cls(kind="spherical", max_level=max_level)

    @classmethod
    def custom(cls, sizes: Sequence[int]) -> "BlockStructure":
        return cls(kind="custom", max_level=len(tuple(sizes)), sizes=tuple(sizes))

    def block_size(self, level: int) -> int:
        if not 1 <= level <= self.max_level:
            raise IndexError(
                f"level {level} out of range 1..{self.max_level}"
            )
        return self._level_sizes[level - 1]

    def same_family(self, other: "BlockStructure") -> bool:
        """Same kind and parameters, ignoring max_level (truncation depth)."""
        if self.kind != other.kind:
            return False
        if self.kind == "circular":
            return self.d == other.d
        if self.kind == "custom":
            shared = min(self.max_level, other.max_level)
            return self._level_sizes[:shared] == other._level_sizes[:shared]
        return True

    def truncated(self, max_level: int) -> "BlockStructure":
        if max_level > self.max_level:
            raise ValueError("cannot extend a structure by truncation")
        if self.kind == "custom":
            return BlockStructure.custom(self._level_sizes[:max_level])
        return BlockStructure(kind=self.kind, max_level=max_level, d=self.d)


def block_size(structure: BlockStructure, level: int) -> int:
    """Size of the coefficient block at the given 1-based level."""
    return structure.block_size(level)


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BlockCoefficients:
    """A signal as one complex coefficient vector per stored level.

    blocks[i] holds level i+1 and must have exactly the structure's size
    for that level.  Fewer levels than structure.max_level may be stored.
    """

    structure: BlockStructure
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) > self.structure.max_level:
            raise ValueError("more blocks than structure levels")
        frozen = []
        for i, blk in enumerate(self.blocks):
            arr = _freeze(blk)
            if arr.ndim != 1 or arr.shape[0] != self.structure.block_size(i + 1):
                raise ValueError(
                    f"block at level {i + 1} has length {arr.shape}, "
                    f"expected ({self.structure.block_size(i + 1)},)"
                )
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValueError(f"non-finite entry in block at level {i + 1}")
            frozen.append(arr)
        object.__setattr__(self, "blocks", tuple(frozen))

    @property
    def n_levels(self) -> int:
        return len(self.blocks)

    def block(self, level: int) -> np.ndarray:
        if not 1 <= level <= self.n_levels:
            raise IndexError(f"level {level} not stored (have 1..{self.n_levels})")
        return self.blocks[level - 1]

    def norm(self) -> float:
        """Plain l2 norm over all stored coefficients."""
        return math.sqrt(sum(float(np.vdot(b, b).real) for b in self.blocks))

    def truncated(self, n_levels: int) -> "BlockCoefficients":
        return BlockCoefficients(self.structure, self.blocks[:n_levels])


@dataclass(frozen=True)
class BlockOperator:
    """An operator as one complex square matrix per stored level."""

    structure: BlockStructure
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) > self.structure.max_level:
            raise ValueError("more blocks than structure levels")
        frozen = []
        for i, blk in enumerate(self.blocks):
            arr = _freeze(blk)
            side = self.structure.block_size(i + 1)
            if arr.shape != (side, side):
                raise ValueError(
                    f"operator block at level {i + 1} has shape {arr.shape}, "
                    f"expected ({side}, {side})"
                )
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValueError(f"non-finite entry in operator block at level {i + 1}")
            frozen.append(arr)
        object.__setattr__(self, "blocks", tuple(frozen))

    @property
    def n_levels(self) -> int:
        return len(self.blocks)

    def block(self, level: int) -> np.ndarray:
        if not 1 <= level <= self.n_levels:
            raise IndexError(f"level {level} not stored (have 1..{self.n_levels})")
        return self.blocks[level - 1]

    def truncated(self, n_levels: int) -> "BlockOperator":
        return BlockOperator(self.structure, self.blocks[:n_levels])


@dataclass(frozen=True)
class SmoothnessClass:
    """Sobolev ball: signals with sum_l l^{2s} ||f_l||^2 <= radius^2."""

    smoothness: float
    radius: float

    def __post_init__(self):
        if self.smoothness < 0:
            raise ValueError("smoothness must be >= 0")
        if self.radius <= 0:
            raise ValueError("radius must be > 0")

    def contains(self, f: "BlockCoefficients") -> bool:
        return sobolev_norm(f, self.smoothness) <= self.radius


@dataclass(frozen=True)
class IllPosedness:
    """Spectral constants of an operator at polynomial decay ``degree``.

    inverse_constant bounds l^{-degree} ||K_l^{-1}||, forward_constant
    bounds l^{degree} ||K_l||, both over the stored levels only (a
    truncated estimate of the supremum over all levels).
    """

    degree: float
    inverse_constant: float
    forward_constant: float

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if self.inverse_constant <= 0:
            raise ValueError("inverse_constant must be > 0")
        if self.inverse_constant * self.forward_constant < 1.0 - 1e-12:
            raise ValueError("inverse_constant * forward_constant must be >= 1")


def sobolev_norm(f: BlockCoefficients, s: float) -> float:
    """Weighted coefficient norm (sum_l l^{2s} ||f_l||^2)^{1/2} over stored levels."""
    total = 0.0
    for i, blk in enumerate(f.blocks):
        level = i + 1
        total += float(level) ** (2.0 * s) * float(np.vdot(blk, blk).real)
    return math.sqrt(total)


def operator_constants(K: BlockOperator, degree: float) -> IllPosedness:
    """Scan stored levels for the spectral constants at the given decay degree.

    Raises SingularMatrixError naming the level if any block is not
    invertible.
    """
    if K.n_levels == 0:
        raise ValueError("operator stores no levels")
    inv_c = 0.0
    fwd_c = 0.0
    for i, blk in enumerate(K.blocks):
        level = i + 1
        try:
            inv_norm = linalg.inverse_norm(blk)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                f"operator block at level {level} is singular"
            ) from exc
        inv_c = max(inv_c, float(level) ** (-degree) * inv_norm)
        fwd_c = max(fwd_c, float(level) ** degree * linalg.spectral_norm(blk))
    return IllPosedness(degree=degree, inverse_constant=inv_c, forward_constant=fwd_c)


def apply_operator(K: BlockOperator, f: BlockCoefficients) -> BlockCoefficients:
    """Blockwise matrix-vector product K_l f_l, level by level."""
    if not K.structure.same_family(f.structure):
        raise ValueError("operator and coefficients have different structures")
    if K.n_levels < f.n_levels:
        raise ValueError(
            f"operator stores {K.n_levels} levels, coefficients need {f.n_levels}"
        )
    out = tuple(K.blocks[i] @ f.blocks[i] for i in range(f.n_levels))
    return BlockCoefficients(f.structure, out)
