"""Gated blockwise inversion with operator and signal-energy thresholds.

Per level l up to a frequency cap L, the noisy operator block is
inverted only when two gates pass:

* operator gate: ||(K_noisy at level l)^{-1}|| <= kappa_l, with
  kappa_l = lambda0 |block|^{-1/2} (delta^2 |log delta|)^{-1/2}  capped
  at n^{1/2};
* energy gate: ||z_l|| >= tau_l, with
  tau_l = mu0 |block|^{1/2} (log(n)/n)^{1/2}.

Blocks failing either gate are zeroed, as are all levels above L.
Logarithms are natural; delta = 0 and n = inf are supported as exact
no-noise sentinels that disable the corresponding gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import BlockCoefficients, BlockOperator
from .errors import ConfigError, SingularMatrixError
from . import linalg

__all__ = [
    "EstimatorConfig",
    "EstimateReport",
    "gate_cutoff",
    "energy_threshold",
    "max_level",
    "estimate",
    "squared_error",
]


@dataclass(frozen=True)
class EstimatorConfig:
    """All tuning of the estimator.

    delta is the operator noise level, n the signal sample size
    (math.inf means a noise-free signal), nu the ill-posedness degree
    and d the block-growth dimension used in the frequency cap.
    """

    delta: float
    n: float
    nu: float
    d: float
    lambda0: float = 1.0
    mu0: float = 1.0
    max_level_override: int | None = None

    def __post_init__(self):
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        if 0 < self.delta and self.delta >= 1:
            raise ConfigError("positive delta must be < 1 (|log delta| must be > 0)")
        if not (self.n == math.inf or self.n > 1):
            raise ConfigError("n must be > 1 or infinite")
        if self.nu < 0:
            raise ConfigError("nu must be >= 0")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if self.lambda0 <= 0:
            raise ConfigError("lambda0 must be > 0")
        if self.mu0 < 0:
            raise ConfigError("mu0 must be >= 0")
        if self.max_level_override is not None and self.max_level_override < 1:
            raise ConfigError("max_level_override must be >= 1")


@dataclass(frozen=True)
class EstimateReport:
    """Estimate plus per-level audit trail of the gating decisions."""

    f_hat: BlockCoefficients
    gate_pass: tuple[bool, ...]
    energy_pass: tuple[bool, ...]
    max_level_used: int
    gate_cutoffs: tuple[float, ...]
    energy_thresholds: tuple[float, ...]


def gate_cutoff(level: int, cfg: EstimatorConfig, size: int) -> float:
    """Operator-gate cutoff kappa at one level; +inf when both noises vanish."""
    if size < 1:
        raise ValueError("block size must be >= 1")
    n_cap = math.inf if cfg.n == math.inf else math.sqrt(cfg.n)
    if cfg.delta == 0.0:
        return n_cap
    noise = cfg.delta * cfg.delta * abs(math.log(cfg.delta))
    return min(cfg.lambda0 / math.sqrt(size * noise), n_cap)


def energy_threshold(level: int, cfg: EstimatorConfig, size: int) -> float:
    """Block-energy threshold tau at one level; 0 disables the gate."""
    if size < 1:
        raise ValueError("block size must be >= 1")
    if cfg.n == math.inf:
        return 0.0
    return cfg.mu0 * math.sqrt(size * math.log(cfg.n) / cfg.n)


def max_level(cfg: EstimatorConfig) -> int:
    """Frequency cap L = floor((delta^2)^{-1/(2 nu + d - 1)}) ^ floor(n^{1/(2 nu + d)}).

    Either term is +inf when its noise vanishes; an explicit override
    wins.  Both infinite without an override is a configuration error.
    """
    if cfg.max_level_override is not None:
        return cfg.max_level_override
    op_exp = 2.0 * cfg.nu + cfg.d - 1.0
    if cfg.delta > 0.0 and op_exp > 0.0:
        op_term = (cfg.delta * cfg.delta) ** (-1.0 / op_exp)
    else:
        op_term = math.inf
    if cfg.n == math.inf:
        sig_term = math.inf
    else:
        sig_term = cfg.n ** (1.0 / (2.0 * cfg.nu + cfg.d))
    cap = min(op_term, sig_term)
    if cap == math.inf:
        raise ConfigError(
            "delta = 0 and n = inf leave the frequency cap undefined; "
            "set max_level_override"
        )
    return max(1, math.floor(cap))


def _solve_block(K_blk: np.ndarray, z_blk: np.ndarray) -> np.ndarray:
    if K_blk.shape[0] <= 2:
        return linalg.invert(K_blk) @ z_blk
    return np.linalg.solve(K_blk, z_blk)


def estimate(
    z: BlockCoefficients, K_delta: BlockOperator, cfg: EstimatorConfig
) -> EstimateReport:
    """Run the gated blockwise inversion on observed coefficients z.

    Requires z and K_delta to store every level up to the frequency cap.
    A numerically singular block never aborts the run: it fails the
    operator gate and the block is zeroed.
    """
    if not z.structure.same_family(K_delta.structure):
        raise ValueError("observation and operator have different structures")
    L = max_level(cfg)
    if z.n_levels < L or K_delta.n_levels < L:
        raise ValueError(
            f"need blocks up to level {L}, have z:{z.n_levels} K:{K_delta.n_levels}"
        )
    f_blocks: list[np.ndarray] = []
    gate_pass: list[bool] = []
    energy_pass: list[bool] = []
    cutoffs: list[float] = []
    thresholds: list[float] = []
    for level in range(1, L + 1):
        K_blk = K_delta.block(level)
        z_blk = z.block(level)
        size = z_blk.shape[0]
        kappa = gate_cutoff(level, cfg, size)
        tau = energy_threshold(level, cfg, size)
        cutoffs.append(kappa)
        thresholds.append(tau)
        try:
            gate = linalg.inverse_norm(K_blk) <= kappa
        except SingularMatrixError:
            gate = False
        energy = float(np.linalg.norm(z_blk)) >= tau
        if gate and energy:
            try:
                f_blocks.append(_solve_block(K_blk, z_blk))
            except (SingularMatrixError, np.linalg.LinAlgError):
                gate = False
                f_blocks.append(np.zeros(size, dtype=np.complex128))
        else:
            f_blocks.append(np.zeros(size, dtype=np.complex128))
        gate_pass.append(gate)
        energy_pass.append(energy)
    f_hat = BlockCoefficients(z.structure, tuple(f_blocks))
    return EstimateReport(
        f_hat=f_hat,
        gate_pass=tuple(gate_pass),
        energy_pass=tuple(energy_pass),
        max_level_used=L,
        gate_cutoffs=tuple(cutoffs),
        energy_thresholds=tuple(thresholds),
    )


def squared_error(f_hat: BlockCoefficients, f: BlockCoefficients) -> float:
    """Sum of per-level squared distances over the union of stored levels.

    Levels stored on one side only count with the other side zero, so a
    truncated estimate is charged the full tail energy of f.  The sum
    runs left to right in level order.
    """
    if not f_hat.structure.same_family(f.structure):
        raise ValueError("coefficient structures differ")
    total = 0.0
    for level in range(1, max(f_hat.n_levels, f.n_levels) + 1):
        if level <= f_hat.n_levels and level <= f.n_levels:
            diff = f_hat.blocks[level - 1] - f.blocks[level - 1]
        elif level <= f_hat.n_levels:
            diff = f_hat.blocks[level - 1]
        else:
            diff = f.blocks[level - 1]
        total += float(np.vdot(diff, diff).real)
    return total
